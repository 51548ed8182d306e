#![no_main]

use libfuzzer_sys::fuzz_target;
use metafib::metafib::oracle::{eval_oracle_with_budget, OracleError};
use metafib::{eval_prefix, InitialCondition, MetaFibRecurrence};

// Layout: [n0, n_terms, k, coeffs.., initial..]
fuzz_target!(|data: &[u8]| {
    let [n0, n_terms, k, rest @ ..] = data else {
        return;
    };
    let k = usize::from(*k % 6) + 1;
    if rest.len() < k {
        return;
    }
    let (coeffs, initial) = rest.split_at(k);
    let coeffs: Vec<u64> = coeffs.iter().map(|&c| u64::from(c % 4)).collect();
    let initial: Vec<u64> = initial.iter().take(12).map(|&v| u64::from(v % 16)).collect();
    let n0 = i64::from(*n0 as i8 % 8);
    let Ok(rec) = MetaFibRecurrence::new(coeffs, n0) else {
        return;
    };
    let Ok(init) = InitialCondition::from_u64(n0, &initial) else {
        return;
    };
    let n_terms = usize::from(*n_terms);
    let fast = eval_prefix(&rec, &init, n_terms);
    match eval_oracle_with_budget(&rec, &init, n_terms, 2_000) {
        Err(OracleError::BudgetExceeded { .. }) => {}
        slow => assert_eq!(fast.map_err(OracleError::from), slow),
    }
});
