//! Desk-scale invariant battery, one suite per module.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use hnrel::betti::{self, IntSeries};
use hnrel::exactalg::{self, rational, GeneratorSpec, GradedElement, Ring, TSeries, NO_CAP};
use hnrel::parab::{self, ParabolicData};
use hnrel::relgen::{self, BundleData, Caps};
use hnrel::respair::{self, PairingOptions};
use hnrel::strata;
use serde_json::json;

use crate::{CliError, SelftestArgs, SCHEMA};

type Suite = (&'static str, fn() -> Result<(), String>);

const SUITES: &[Suite] = &[
    ("koszul", koszul),
    ("strata", strata_suite),
    ("betti", betti_suite),
    ("relgen", relgen_suite),
    ("respair", respair_suite),
    ("parab", parab_suite),
];

fn ensure(cond: bool, what: &str) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what.to_string())
    }
}

fn koszul() -> Result<(), String> {
    let ring = Ring::new(
        vec![GeneratorSpec::new("a", 2), GeneratorSpec::new("x", 1), GeneratorSpec::new("y", 1), GeneratorSpec::new("z", 3)],
        NO_CAP,
    )
    .map_err(|e| e.to_string())?;
    let g = |n: &str| GradedElement::gen(&ring, n).expect("generator");
    let (a, x, y, z) = (g("a"), g("x"), g("y"), g("z"));
    ensure(&x * &y == (&y * &x).neg_ref(), "odd generators must anticommute")?;
    ensure(&x * &z == (&z * &x).neg_ref(), "odd generators of different degree must anticommute")?;
    ensure(&a * &x == &x * &a, "even generators are central")?;
    let p = &x * &y + &a * &z;
    let q = &a * &x + z.clone();
    ensure(&(&p * &q) * &y == &p * &(&q * &y), "associativity")?;
    // Mixed-degree graded commutativity: |xy| = 2 is even, so xy commutes with z.
    let xy = &x * &y;
    ensure(&xy * &z == &z * &xy, "even products are central")
}

fn strata_suite() -> Result<(), String> {
    for n in 1..=4 {
        for d in 0..n {
            for mu in strata::enumerate_hn_types(n, d, 2, 12) {
                ensure(strata::telescoped_codim(&mu, 2) == strata::codim_mu(&mu, 2), "telescoping codimension")?;
            }
        }
    }
    Ok(())
}

fn betti_suite() -> Result<(), String> {
    for g in 2..=4 {
        let p = betti::p_moduli(1, 0, g, 2 * g as usize).map_err(|e| e.to_string())?;
        ensure(p == IntSeries::binomial(1, 1, 2 * g as usize).pow(2 * g as u32), "Jacobian series")?;
    }
    let p = betti::p_moduli(2, 1, 2, 10).map_err(|e| e.to_string())?;
    let want = IntSeries::binomial(1, 1, 10).pow(4).mul(&IntSeries::from_i64(&[1, 0, 1, 4, 1, 0, 1], 10));
    ensure(p == want, "rank-2 genus-2 series")?;
    let p = betti::p_moduli(3, 1, 2, 20).map_err(|e| e.to_string())?;
    ensure(p.is_palindromic() && p.is_nonnegative(), "rank-3 series is palindromic and nonnegative")
}

fn relgen_suite() -> Result<(), String> {
    let main = BundleData::main(2, 1, 2).map_err(|e| e.to_string())?;
    let hat = BundleData::hat(1, 1, 2).map_err(|e| e.to_string())?;
    let res = relgen::recurrence_residual(&main, &hat, Caps::new(8)).map_err(|e| e.to_string())?;
    ensure(res.iter().all(|c| c.is_empty()), "recurrence tail vanishes")?;
    ensure(relgen::shift_identity_check(&main, &hat, 1, Caps::new(6)).map_err(|e| e.to_string())?, "line-bundle shift identity")?;
    ensure(relgen::relation_window(2, 1, 1, 1, 2).map_err(|e| e.to_string())? == (4..=6), "relation window")
}

fn respair_suite() -> Result<(), String> {
    // Rank one: the Gaussian integral gives t^g (1 + a1 t)^{d̂ − d − 1}.
    let (d, dh, g) = (0, 3, 2);
    let main = BundleData::main(1, d, g).map_err(|e| e.to_string())?;
    let hat = BundleData::hat(1, dh, g).map_err(|e| e.to_string())?;
    let hring = Ring::new(hat.generators(), NO_CAP).map_err(|e| e.to_string())?;
    let out = respair::pairing_thm_10_2(&GradedElement::one(&hring), &main, 1, dh, &PairingOptions::new(5)).map_err(|e| e.to_string())?;
    let mring = out.coeffs()[0].ring().clone();
    let a1 = GradedElement::gen(&mring, "a1").map_err(|e| e.to_string())?;
    let want = TSeries::new(vec![GradedElement::one(&mring), a1], 5).pow_i(dh - d - 1).map_err(|e| e.to_string())?.shift(g as usize);
    ensure(out.coeffs() == want.coeffs(), "rank-one pairing")
}

fn parab_suite() -> Result<(), String> {
    let weights = (1..=3).map(|k| rational::frac(k, 9 + k)).collect();
    let pd = ParabolicData::new(3, 1, weights, vec![1, 1, 1]).map_err(|e| e.to_string())?;
    ensure(parab::good_data_check(&pd).is_good(), "full flag is good")?;
    let bad = ParabolicData::trivial(2, 0).map_err(|e| e.to_string())?;
    ensure(!parab::good_data_check(&bad).is_good(), "(2, 0) is not good")?;
    ensure(parab::weight_degree_count(&[1, 3], &[1, 1, 1], &[1, 0, 1]).map_err(|e| e.to_string())? == 0, "singleton blocks")
}

pub fn run(a: &SelftestArgs) -> Result<String, CliError> {
    exactalg::set_koszul_mutation(a.mutate_koszul);
    let mut suites = Vec::new();
    let mut all = true;
    for (name, f) in SUITES {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        let millis = start.elapsed().as_millis() as u64;
        all &= outcome.is_ok();
        suites.push(json!({
            "name": name,
            "passed": outcome.is_ok(),
            "millis": millis,
            "detail": outcome.err(),
        }));
    }
    exactalg::set_koszul_mutation(false);
    let report = json!({"schema": SCHEMA, "command": "selftest", "mutated": a.mutate_koszul, "passed": all, "suites": suites});
    let mut text = serde_json::to_string_pretty(&report).expect("serializable");
    text.push('\n');
    if all {
        Ok(text)
    } else {
        Err(CliError::Report(text))
    }
}
