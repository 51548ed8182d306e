//! Acceptance suite. Each test prints one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p metafib --test acceptance -- --nocapture` to see
//! the lines.

use std::num::NonZeroUsize;
use std::time::{Duration, Instant};

use metafib::construct::{is_valid_h, Construction};
use metafib::linrec::{growth_bound, GrowthCertificate, LinearRecurrence, Recurrence};
use metafib::metafib::oracle::{eval_oracle_with_budget, OracleError};
use metafib::verify::{check_subsequence, check_theorem, pattern_sweep, trace_case};
use metafib::{eval_prefix, extract_subsequence, EvalError, InitialCondition, MetaFibRecurrence};
use num_bigint::BigUint;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn report(id: u32, name: &str, elapsed: Duration, limit: Duration, result: Result<(), String>) {
    let timed = result.and_then(|()| {
        if elapsed < limit {
            Ok(())
        } else {
            Err(format!("took {elapsed:?}, limit {limit:?}"))
        }
    });
    match &timed {
        Ok(()) => println!("[PASS] criterion {id}: {name} ({elapsed:.2?})"),
        Err(why) => println!("[FAIL] criterion {id}: {name}: {why}"),
    }
    if let Err(why) = timed {
        panic!("criterion {id} failed: {why}");
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn ints(v: &[u64]) -> Vec<BigUint> {
    v.iter().map(|&x| BigUint::from(x)).collect()
}

fn worked_example() -> LinearRecurrence {
    LinearRecurrence::from_u64(&[1, 0, 2], &[30, 40, 60]).unwrap()
}

fn fibonacci_from_five() -> LinearRecurrence {
    LinearRecurrence::from_u64(&[1, 1], &[5, 8]).unwrap()
}

/// Recurrences for the theorem property suite: k <= 4, b_i in [0, 3] with
/// sum >= 2, initial terms in [1, 50].
fn random_recurrences(count: usize, seed: u64) -> Vec<LinearRecurrence> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let k = rng.gen_range(1..=4);
        let coeffs: Vec<u64> = (0..k).map(|_| rng.gen_range(0..=3)).collect();
        if coeffs.iter().sum::<u64>() < 2 {
            continue;
        }
        let initial: Vec<u64> = (0..k).map(|_| rng.gen_range(1..=50)).collect();
        out.push(LinearRecurrence::from_u64(&coeffs, &initial).unwrap());
    }
    out
}

const THEOREM_SUITE_SEED: u64 = 0x5eed_0003;

fn criterion_1() -> Result<(), String> {
    let c = Construction::build(&worked_example()).map_err(|e| e.to_string())?;
    ensure(c.h() == 17, || format!("h = {}, expected 17", c.h()))?;
    let want = ints(&[30, 18, 30, 12, 30, 6, 40, 18, 40, 12, 40, 6, 60, 18, 60, 12, 60, 6]);
    ensure(c.initial().values() == want.as_slice(), || {
        format!("initial condition {:?}", c.initial().values())
    })?;
    let r = eval_prefix(c.target(), c.initial(), 20).map_err(|e| e.to_string())?;
    ensure(r.values[18] == BigUint::from(120u32), || format!("R(18) = {}", r.values[18]))?;
    ensure(r.values[19] == BigUint::from(18u32), || format!("R(19) = {}", r.values[19]))?;
    let t18 = trace_case(&c, 18).map_err(|e| e.to_string())?;
    ensure(t18.total == BigUint::from(120u32), || "trace at 18".into())?;
    let report = check_theorem(&c, 5000).map_err(|e| e.to_string())?;
    ensure(report.pass && report.checked == 5000, || format!("{report:?}"))
}

#[test]
fn criterion_1_worked_example() {
    let start = Instant::now();
    let result = criterion_1();
    report(1, "worked example k=3, b=(1,0,2)", start.elapsed(), Duration::from_secs(1), result);
}

fn criterion_2() -> Result<(), String> {
    let c = Construction::build(&fibonacci_from_five()).map_err(|e| e.to_string())?;
    let want = ints(&[5, 8, 5, 4, 8, 8, 8, 4, 13, 8, 13, 4, 21, 8, 21, 4]);
    ensure(c.interleaved_prefix(16) == want, || "interleaved prefix".into())?;
    ensure(c.target().coeffs() == [1, 1, 1], || format!("coeffs {:?}", c.target().coeffs()))?;

    let r = eval_prefix(c.target(), c.initial(), 4 * 30).map_err(|e| e.to_string())?;
    ensure(r.values[..16] == want[..], || "evaluated prefix".into())?;
    let every_fourth = extract_subsequence(&r.values, NonZeroUsize::new(4).unwrap(), 0);
    // Fibonacci from 5 by plain addition, independent of the recurrence code.
    let mut fib = vec![BigUint::from(5u32), BigUint::from(8u32)];
    while fib.len() < 30 {
        let next = &fib[fib.len() - 1] + &fib[fib.len() - 2];
        fib.push(next);
    }
    ensure(every_fourth == fib, || "stride-4 subsequence is not Fibonacci from 5".into())
}

#[test]
fn criterion_2_fibonacci_from_five() {
    let start = Instant::now();
    let result = criterion_2();
    report(2, "Fibonacci from 5, k=2", start.elapsed(), Duration::from_secs(1), result);
}

fn criterion_3() -> Result<(), String> {
    for rec in random_recurrences(200, THEOREM_SUITE_SEED) {
        let c = Construction::build(&rec).map_err(|e| e.to_string())?;
        let theorem = check_theorem(&c, 3000).map_err(|e| e.to_string())?;
        ensure(theorem.pass, || format!("{rec:?}: {theorem:?}"))?;
        let sub = check_subsequence(&c, 3000).map_err(|e| e.to_string())?;
        ensure(sub.pass && sub.checked == 3000, || format!("{rec:?}: {sub:?}"))?;
        let sweep = pattern_sweep(&c, 1000).map_err(|e| e.to_string())?;
        ensure(sweep.violations.is_empty(), || {
            format!("{rec:?}: {:?}", sweep.violations)
        })?;
    }
    Ok(())
}

#[test]
fn criterion_3_theorem_property_suite() {
    let start = Instant::now();
    let result = criterion_3();
    report(3, "200 random constructions", start.elapsed(), Duration::from_secs(60), result);
}

fn criterion_4() -> Result<(), String> {
    let q = MetaFibRecurrence::hofstadter_q();
    let dying = InitialCondition::from_u64(1, &[1, 0]).unwrap();
    match eval_prefix(&q, &dying, 10) {
        Err(EvalError::Death(d)) => {
            ensure(d.n == 3, || format!("died at {}", d.n))?;
            // Q(3) = Q(3 - Q(2)) + Q(3 - Q(1)); the first term reads Q(2) = 0,
            // i.e. inner offset 1 at inner index 2, and needs Q(3) itself.
            ensure(d.offset == 1 && d.inner_index == 2, || format!("{d:?}"))?;
            ensure(d.inner_value == BigUint::from(0u32), || format!("{d:?}"))?;
        }
        other => return Err(format!("expected death, got {other:?}")),
    }
    let saved = InitialCondition::from_u64(1, &[1, 3]).unwrap();
    let seq = eval_prefix(&q, &saved, 3).map_err(|e| e.to_string())?;
    ensure(seq.at(3) == Some(BigUint::from(3u32)), || format!("{seq:?}"))
}

#[test]
fn criterion_4_death_handling() {
    let start = Instant::now();
    let result = criterion_4();
    report(4, "death and zero convention", start.elapsed(), Duration::from_secs(1), result);
}

fn criterion_5() -> Result<(), String> {
    let q = MetaFibRecurrence::hofstadter_q();
    let init = InitialCondition::from_u64(1, &[3, 2, 1]).unwrap();
    let seq = eval_prefix(&q, &init, 3000).map_err(|e| e.to_string())?;
    let big = |v: u64| Some(BigUint::from(v));
    for m in 1u64.. {
        let n = 3 * m as i64;
        if n + 3 > 3000 {
            break;
        }
        ensure(seq.at(n + 1) == big(3), || format!("Q({}) = {:?}", n + 1, seq.at(n + 1)))?;
        ensure(seq.at(n + 2) == big(3 * m + 2), || format!("Q({})", n + 2))?;
        ensure(seq.at(n + 3) == big(3 * m + 1), || format!("Q({})", n + 3))?;
    }
    Ok(())
}

#[test]
fn criterion_5_golomb_quasilinear() {
    let start = Instant::now();
    let result = criterion_5();
    report(5, "Golomb initial condition (3,2,1)", start.elapsed(), Duration::from_secs(1), result);
}

fn criterion_6() -> Result<(), String> {
    let mut rng = StdRng::seed_from_u64(0x5eed_0006);
    let mut deaths = 0;
    for case in 0..500 {
        let k_max = rng.gen_range(1..=5);
        let mut coeffs: Vec<u64> = (0..k_max).map(|_| rng.gen_range(0..=3)).collect();
        if coeffs.iter().all(|&c| c == 0) {
            coeffs[rng.gen_range(0..k_max)] = 1;
        }
        let n0 = rng.gen_range(-3..=3);
        let len = rng.gen_range(k_max..=k_max + 4);
        let init: Vec<u64> = (0..len).map(|_| rng.gen_range(0..=10)).collect();
        let n_terms = rng.gen_range(0..=500);

        let rec = MetaFibRecurrence::new(coeffs, n0).unwrap();
        let init = InitialCondition::from_u64(n0, &init).unwrap();
        let fast = eval_prefix(&rec, &init, n_terms);
        let slow = eval_oracle_with_budget(&rec, &init, n_terms, 10_000);
        if let Err(OracleError::Eval(EvalError::Death(_))) = &slow {
            deaths += 1;
        }
        ensure(fast.map_err(OracleError::from) == slow, || format!("case {case}: {rec:?} {init:?}"))?;
    }
    ensure(deaths > 0, || "no death case was generated".into())
}

#[test]
fn criterion_6_oracle_equivalence() {
    let start = Instant::now();
    // deep recursion in the reference evaluator
    let result = std::thread::Builder::new()
        .stack_size(256 << 20)
        .spawn(criterion_6)
        .unwrap()
        .join()
        .unwrap();
    report(6, "evaluator vs top-down oracle, 500 cases", start.elapsed(), Duration::from_secs(30), result);
}

/// a_{m-1} >= 2(m+1)k for every m from m0 to 200 indices past the certificate.
fn brute_force_certificate(rot: &impl Recurrence, cert: &GrowthCertificate) -> Result<(), String> {
    let last_m = cert.checked_index + 1 + 200;
    let terms = rot.prefix(last_m);
    for m in cert.m0..=last_m {
        ensure(terms[m - 1] >= growth_bound(cert.k, m), || {
            format!("certificate {cert:?} wrong at m = {m}")
        })?;
    }
    Ok(())
}

fn criterion_7() -> Result<(), String> {
    let mut inputs = vec![worked_example(), fibonacci_from_five()];
    inputs.extend(random_recurrences(200, THEOREM_SUITE_SEED));
    let mut checked = 0;
    for rec in inputs {
        let c = Construction::build(&rec).map_err(|e| e.to_string())?;
        let certs = is_valid_h(c.rotations(), c.h()).map_err(|e| e.to_string())?;
        for (rot, cert) in c.rotations().iter().zip(&certs) {
            brute_force_certificate(rot, cert)?;
            checked += 1;
        }
    }
    ensure(checked > 200, || format!("only {checked} certificates"))
}

#[test]
fn criterion_7_certificate_soundness() {
    let start = Instant::now();
    let result = criterion_7();
    report(7, "growth certificates re-checked by brute force", start.elapsed(), Duration::from_secs(10), result);
}
