//! Acceptance battery. Prints one line per criterion and exits non-zero if
//! any of them fails. Run with `cargo test -p hnrel --test acceptance`.

use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use hnrel::betti::{self, IntSeries};
use hnrel::exactalg::rational::{self, Rational};
use hnrel::exactalg::{GradedElement, Ring, TSeries, NO_CAP};
use hnrel::parab::{self, ParabolicData, SubParabolicData};
use hnrel::relgen::{self, BundleData, Caps};
use hnrel::respair::{self, PairingOptions, SplitHatRing, Thm103Input};
use hnrel::strata::{self, HNType};
use rand::rngs::StdRng;
use rand::{RngExt, SeedableRng};

type Check = fn() -> Result<String, String>;

/// Wall-clock budget per criterion. Exceeding it is a failure.
const CRITERIA: &[(u32, &str, Duration, Check)] = &[
    (1, "jacobian base case", Duration::from_secs(1), jacobian),
    (2, "rank-2 betti numbers", Duration::from_secs(1), rank_two_betti),
    (3, "structural betti properties", Duration::from_secs(30), structural_betti),
    (4, "telescoping codimension", Duration::from_secs(5), telescoping),
    (5, "grr/split two-path equality", Duration::from_secs(120), two_path),
    (6, "recurrence tail", Duration::from_secs(120), recurrence),
    (7, "line-bundle shift identity", Duration::from_secs(60), shift_identity),
    (8, "relation windows", Duration::from_secs(5), windows),
    (9, "residue engine", Duration::from_secs(300), residue_engine),
    (10, "parabolic", Duration::from_secs(10), parabolic),
    (11, "closed-formula diagnostic", Duration::from_secs(5), closed_formula),
];

/// Seed for the randomized insertions of criterion 9.
const SEED: u64 = 0x5eed_2024;

fn ensure(cond: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what())
    }
}

fn e2s<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn main() -> ExitCode {
    let mut failed = 0;
    for &(n, name, budget, check) in CRITERIA {
        let start = Instant::now();
        let outcome = check();
        let took = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if took > budget => Err(format!("{detail}; over budget of {budget:?}")),
            other => other,
        };
        let (tag, detail) = match &outcome {
            Ok(d) => ("pass", d.as_str()),
            Err(d) => ("fail", d.as_str()),
        };
        println!("criterion {n:>2} [{tag}] {name} ({} ms): {detail}", took.as_millis());
        failed += outcome.is_err() as usize;
    }
    if failed == 0 {
        println!("all {} criteria passed", CRITERIA.len());
        ExitCode::SUCCESS
    } else {
        println!("{failed} of {} criteria failed", CRITERIA.len());
        ExitCode::FAILURE
    }
}

fn jacobian() -> Result<String, String> {
    for g in 2..=4 {
        let cap = 2 * g as usize + 2;
        let want = IntSeries::binomial(1, 1, cap).pow(2 * g as u32);
        for d in -3..=3 {
            let p = betti::p_moduli(1, d, g, cap).map_err(e2s)?;
            ensure(p == want, || format!("g = {g}, d = {d}: {:?}", p.coeffs()))?;
        }
    }
    Ok("(1+t)^{2g} for g in 2..=4, d in -3..=3".into())
}

// Plain integer power series for the stratification oracle.
fn ps_mul(a: &[i64], b: &[i64]) -> Vec<i64> {
    let mut out = vec![0; a.len()];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate().take(a.len() - i) {
            out[i + j] += x * y;
        }
    }
    out
}

fn ps_one_plus(k: usize, e: u32, len: usize) -> Vec<i64> {
    let mut base = vec![0; len];
    base[0] = 1;
    if k < len {
        base[k] += 1;
    }
    let mut out = vec![0; len];
    out[0] = 1;
    for _ in 0..e {
        out = ps_mul(&out, &base);
    }
    out
}

/// `1/(1 − t^k)`.
fn ps_geometric(k: usize, len: usize) -> Vec<i64> {
    (0..len).map(|i| (i % k == 0) as i64).collect()
}

/// Equivariant series of the rank-n gauge group.
fn gauge_series(n: usize, g: u32, len: usize) -> Vec<i64> {
    let mut out = vec![0; len];
    out[0] = 1;
    for k in 1..=n {
        out = ps_mul(&out, &ps_one_plus(2 * k - 1, 2 * g, len));
        out = ps_mul(&out, &ps_geometric(2 * k, len));
        if k > 1 {
            out = ps_mul(&out, &ps_geometric(2 * k - 2, len));
        }
    }
    out
}

fn rank_two_betti() -> Result<String, String> {
    let (g, cap) = (2i64, 14usize);
    let len = cap + 1;
    // Oracle: subtract the unstable strata ((1, d1), (1, 1 − d1)) from the
    // gauge series by hand, then divide out the constant central U(1).
    let mut ss = gauge_series(2, g as u32, len);
    let line_pair = ps_mul(&gauge_series(1, g as u32, len), &gauge_series(1, g as u32, len));
    let mut strata_seen = 0;
    for d1 in 1.. {
        let codim = (d1 - (1 - d1) + (g - 1)) as usize;
        if 2 * codim > cap {
            break;
        }
        strata_seen += 1;
        for k in 0..len - 2 * codim {
            ss[k + 2 * codim] -= line_pair[k];
        }
    }
    let oracle = ps_mul(&ss, &[1, 0, -1].iter().copied().chain(std::iter::repeat(0)).take(len).collect::<Vec<_>>());
    let p = betti::p_moduli(2, 1, g, cap).map_err(e2s)?;
    let oracle = IntSeries::from_i64(&oracle, cap);
    ensure(p == oracle, || format!("stratification oracle {:?} vs {:?}", oracle.coeffs(), p.coeffs()))?;
    let printed = IntSeries::binomial(1, 1, cap).pow(4).mul(&IntSeries::from_i64(&[1, 0, 1, 4, 1, 0, 1], cap));
    ensure(p == printed, || format!("closed value {:?}", p.coeffs()))?;
    let dim = betti::moduli_dimension(2, 2);
    ensure(dim == 10 && p.degree() == Some(10), || format!("degree {:?}, dimension {dim}", p.degree()))?;
    ensure(p.is_palindromic(), || "not palindromic".into())?;
    Ok(format!("{:?} matches {strata_seen} hand-subtracted strata", p.coeffs()))
}

fn structural_betti() -> Result<String, String> {
    let mut cases = 0;
    for n in 1..=3i64 {
        for d in 0..n {
            if rational::gcd_i64(n, d) != 1 {
                continue;
            }
            for g in 2..=4i64 {
                let dim = betti::moduli_dimension(n, g);
                let cap = 2 * dim as usize + 2;
                let p = betti::p_moduli(n, d, g, cap).map_err(e2s)?;
                let tag = format!("(n, d, g) = ({n}, {d}, {g})");
                ensure(p.is_nonnegative(), || format!("{tag}: negative coefficient"))?;
                ensure(p.is_palindromic(), || format!("{tag}: not palindromic"))?;
                ensure(p.coeff(0) == 1.into(), || format!("{tag}: constant term"))?;
                ensure(p.degree() == Some(2 * (n * n * (g - 1) + 1) as usize), || format!("{tag}: degree {:?}", p.degree()))?;
                let shifted = betti::p_moduli(n, d + n, g, cap).map_err(e2s)?;
                ensure(p == shifted, || format!("{tag}: changes under d -> d + n"))?;
                cases += 1;
            }
        }
    }
    Ok(format!("{cases} coprime cases"))
}

/// `δ_{n1,d1} + δ^{(n−n1, d−d1)}_{n2,d2} + …`, block by block.
fn chain_codim(mu: &HNType, g: i64) -> Result<i64, String> {
    let (mut n, mut d) = (mu.rank(), mu.degree());
    let mut total = 0;
    let blocks = mu.blocks();
    for &(ni, di) in &blocks[..blocks.len().saturating_sub(1)] {
        total += strata::coarse_codim(n, d, ni, di, g).map_err(e2s)?;
        n -= ni;
        d -= di;
    }
    Ok(total)
}

fn telescoping() -> Result<String, String> {
    let mut types = 0;
    for g in 2..=3 {
        for n in 1..=4 {
            for d in 0..n {
                for mu in strata::enumerate_hn_types(n, d, g, 20) {
                    let direct = strata::codim_mu(&mu, g);
                    ensure(direct <= 20, || format!("{:?} has codimension {direct} > 20", mu.blocks()))?;
                    let chain = chain_codim(&mu, g)?;
                    ensure(chain == direct, || format!("{:?}, g = {g}: chain {chain} vs {direct}", mu.blocks()))?;
                    ensure(strata::telescoped_codim(&mu, g) == direct, || format!("{:?}: library chain", mu.blocks()))?;
                    types += 1;
                }
            }
        }
    }
    Ok(format!("{types} types with codimension at most 20"))
}

fn two_path() -> Result<String, String> {
    let caps = Caps { t_cap: 8, degree_cap: 16 };
    let mut cases = 0;
    let mut full = 0;
    for g in 2..=3 {
        for (n, nh) in [(1, 1), (2, 1), (1, 2), (2, 2)] {
            let main = BundleData::main(n, 1, g).map_err(e2s)?;
            let splits: &[&[i64]] = if nh == 1 { &[&[1]] } else { &[&[1, 0], &[2, -1]] };
            for degrees in splits {
                let split = SplitHatRing::new(g, degrees.to_vec()).map_err(e2s)?;
                let hat = BundleData::hat(nh, split.total_degree(), g).map_err(e2s)?;
                let target = respair::split_pair_ring(&main, &split, caps.degree_cap).map_err(e2s)?;
                let tag = format!("(n, n̂, g) = ({n}, {nh}, {g}), split {degrees:?}");
                // Restriction is a ring map and log is injective on series with
                // constant term 1, so comparing logs decides the identity.
                let log = relgen::grr_log(&main, &hat, caps).map_err(e2s)?;
                let lhs = respair::torus_restrict_series(&log, &hat, &split, &target).map_err(e2s)?;
                let rhs = respair::split_log_in(&target, &main, &split, caps.t_cap).map_err(e2s)?;
                for (r, (a, b)) in lhs.coeffs().iter().zip(rhs.coeffs()).enumerate() {
                    ensure(a == b, || format!("{tag}: log differs at t^{r}"))?;
                }
                // The Chern polynomials themselves where the ring is small enough.
                if n * nh <= 2 && g == 2 && degrees[0] == 1 {
                    let c = relgen::grr_minus_pi(&main, &hat, caps).map_err(e2s)?;
                    let lhs = respair::torus_restrict_series(&c, &hat, &split, &target).map_err(e2s)?;
                    let rhs = respair::split_chern_poly_in(&target, &main, &split, caps.t_cap).map_err(e2s)?;
                    for (r, (a, b)) in lhs.coeffs().iter().zip(rhs.coeffs()).enumerate() {
                        ensure(a == b, || format!("{tag}: Chern polynomial differs at t^{r}"))?;
                    }
                    full += 1;
                }
                cases += 1;
            }
        }
    }
    Ok(format!("{cases} splittings by log, {full} also by Chern polynomial, t_cap 8, degree cap 16"))
}

fn recurrence() -> Result<String, String> {
    let mut done = Vec::new();
    for (n, nh, g) in [(2, 1, 2), (2, 1, 3), (3, 1, 2), (2, 2, 2)] {
        let d: i64 = 1;
        let dh = (d * nh).div_euclid(n) + 1;
        let main = BundleData::main(n, d, g).map_err(e2s)?;
        let hat = BundleData::hat(nh, dh, g).map_err(e2s)?;
        let tail = relgen::recurrence_residual(&main, &hat, Caps::new(12)).map_err(e2s)?;
        ensure(tail.len() == 12 + 1 - 2 * (n * nh) as usize, || format!("({n}, {nh}, {g}): tail has {} entries", tail.len()))?;
        if let Some(k) = tail.iter().position(|c| !c.is_empty()) {
            return Err(format!("({n}, {nh}, {g}): t^{} is nonzero", 2 * n * nh + k as i64));
        }
        done.push(format!("({n},{nh},{g})"));
    }
    Ok(format!("zero tail up to t^12 for {}", done.join(" ")))
}

fn shift_identity() -> Result<String, String> {
    let main = BundleData::main(2, 1, 2).map_err(e2s)?;
    let hat = BundleData::hat(1, 1, 2).map_err(e2s)?;
    for delta in [1, 2] {
        let ok = relgen::shift_identity_check(&main, &hat, delta, Caps::new(8)).map_err(e2s)?;
        ensure(ok, || format!("fails for delta = {delta}"))?;
    }
    Ok("delta in {1, 2}, t_cap 8".into())
}

fn windows() -> Result<String, String> {
    let w = relgen::relation_window(2, 1, 1, 1, 2).map_err(e2s)?;
    ensure(w == (4..=6), || format!("window {w:?}"))?;
    let mut checked = 0;
    for g in 2..=4i64 {
        for n in 1..=4i64 {
            for nh in 1..n {
                for d in -2 * n..=2 * n {
                    for dh in -3 * nh..=3 * nh {
                        // Strict slope window d/n < d̂/n̂ < d/n + 1.
                        if !(d * nh < dh * n && dh * n < (d + n) * nh) {
                            continue;
                        }
                        let w = relgen::relation_window(n, d, nh, dh, g).map_err(e2s)?;
                        let vr = relgen::virtual_rank(n, d, nh, dh, g).map_err(e2s)?;
                        ensure(*w.start() == vr + 1 && w.end() - w.start() + 1 == 2 * n * nh - 1, || {
                            format!("({n}, {d}, {nh}, {dh}, {g}): {w:?}")
                        })?;
                        checked += 1;
                    }
                }
            }
        }
    }
    let mut mumford = 0;
    for g in 2..=4i64 {
        for n in 2..=4i64 {
            for d in -n + 1..0 {
                let vr = relgen::virtual_rank(n, d, 1, 0, g).map_err(e2s)?;
                ensure(vr == n * (g - 1) - d, || format!("Mumford ({n}, {d}, {g}): {vr}"))?;
                mumford += 1;
            }
        }
    }
    Ok(format!("{checked} windows of width 2nn̂ − 1, {mumford} Mumford ranks"))
}

// Criterion 9 helpers.

fn hat_ring(nh: i64, dh: i64, g: i64) -> Result<Arc<Ring>, String> {
    Ring::new(BundleData::hat(nh, dh, g).map_err(e2s)?.generators(), NO_CAP).map_err(e2s)
}

/// Monomials in the non-`f` hat generators of exactly degree `deg`.
fn hat_monomials(ring: &Arc<Ring>, deg: u32) -> Vec<GradedElement> {
    fn go(gens: &[(String, u32, bool)], i: usize, left: u32, acc: GradedElement, out: &mut Vec<GradedElement>, ring: &Arc<Ring>) {
        if left == 0 {
            out.push(acc);
            return;
        }
        if i == gens.len() {
            return;
        }
        let (name, d, odd) = &gens[i];
        let x = GradedElement::gen(ring, name).expect("generator");
        let max_power = if *odd { 1 } else { left / d };
        let mut term = acc;
        for k in 0..=max_power {
            if k * d > left {
                break;
            }
            go(gens, i + 1, left - k * d, term.clone(), out, ring);
            term = &term * &x;
        }
    }
    let gens: Vec<(String, u32, bool)> = ring
        .gens()
        .iter()
        .filter(|s| !s.name.starts_with("hf"))
        .map(|s| (s.name.clone(), s.degree, s.degree % 2 == 1))
        .collect();
    let mut out = Vec::new();
    go(&gens, 0, deg, GradedElement::one(ring), &mut out, ring);
    out.retain(|m| !m.is_empty());
    out
}

fn random_eta(rng: &mut StdRng, ring: &Arc<Ring>, degrees: &[u32], terms: usize) -> GradedElement {
    let mut eta = GradedElement::zero(ring);
    for _ in 0..terms {
        let deg = degrees[rng.random_range(0..degrees.len())];
        let pool = hat_monomials(ring, deg);
        if pool.is_empty() {
            continue;
        }
        let m = &pool[rng.random_range(0..pool.len())];
        let c = rational::frac(rng.random_range(-5..=5), rng.random_range(1..=4));
        eta = eta + m.scale(&c);
    }
    eta
}

/// `∫_Jac η·c(−π_!(V̂*⊗V))(t)` straight from the definition: restrict
/// `â_1 ↦ 0` and read off the top odd coefficient, normalized so that
/// `∫ exp(Σ_s b̂^s b̂^{s+g}) = 1`.
fn jacobian_oracle(eta: &GradedElement, main: &BundleData, dh: i64, t_cap: usize) -> Result<Vec<GradedElement>, String> {
    let g = main.g;
    let hat = BundleData::hat(1, dh, g).map_err(e2s)?;
    let caps = Caps { t_cap, degree_cap: 2 * t_cap as u32 + 8 };
    let ring = relgen::pair_ring(main, &hat, caps.degree_cap).map_err(e2s)?;
    let series = relgen::grr_minus_pi(main, &hat, caps).map_err(e2s)?;
    let eta = eta.transfer(&ring).map_err(e2s)?;
    let odd: Vec<usize> = (1..=2 * g).map(|j| ring.index(&hat.b_name(1, j)).expect("hat generator")).collect();
    let images: Vec<GradedElement> = ring
        .gens()
        .iter()
        .map(|s| {
            if s.name == hat.a_name(1) {
                GradedElement::zero(&ring)
            } else {
                GradedElement::gen(&ring, &s.name).expect("generator")
            }
        })
        .collect();
    let top_part = |x: &GradedElement| -> Option<GradedElement> {
        x.split_off(|i| odd.contains(&i)).into_iter().find(|(m, _)| ring.degree(m) == 2 * g as u32).map(|(_, c)| c)
    };
    let b = |j: i64| GradedElement::gen(&ring, &hat.b_name(1, j)).expect("generator");
    let omega = (1..=g).fold(GradedElement::zero(&ring), |acc, s| acc + &b(s) * &b(s + g));
    let volume = omega.pow(g as u32).scale(&Rational::from_integer(rational::factorial(g as u32)).recip());
    let kappa = top_part(&volume).ok_or("no volume form")?.constant_term().recip();
    series
        .coeffs()
        .iter()
        .map(|c| {
            let x = (c * &eta).substitute(&ring, &images).map_err(e2s)?;
            Ok(top_part(&x).map(|c| c.scale(&kappa)).unwrap_or_else(|| GradedElement::zero(&ring)))
        })
        .collect()
}

fn same_series(a: &TSeries<GradedElement>, b: &TSeries<GradedElement>) -> Result<bool, String> {
    if a.coeffs().len() != b.coeffs().len() {
        return Ok(false);
    }
    for (x, y) in a.coeffs().iter().zip(b.coeffs()) {
        if *x != y.transfer(x.ring()).map_err(e2s)? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn residue_engine() -> Result<String, String> {
    let mut rng = StdRng::seed_from_u64(SEED);
    let mut notes = Vec::new();

    // (a) Rank-one hat side against the direct Berezin evaluation.
    let g = 2;
    let t_cap = 6;
    for trial in 0..20 {
        let (n, d, dh) = if trial % 2 == 0 { (1, 0, 1) } else { (2, 1, 1) };
        let main = BundleData::main(n, d, g).map_err(e2s)?;
        let ring = hat_ring(1, dh, g)?;
        let eta = random_eta(&mut rng, &ring, &[0, 1, 2, 3, 4], 4);
        let got = respair::pairing_thm_10_2(&eta, &main, 1, dh, &PairingOptions::new(t_cap)).map_err(e2s)?;
        let want = jacobian_oracle(&eta, &main, dh, t_cap)?;
        for (r, w) in want.iter().enumerate() {
            let x = got.coeffs()[r].transfer(w.ring()).map_err(e2s)?;
            ensure(x == *w, || format!("(a) trial {trial}, t^{r}: {x} vs {w}"))?;
        }
    }
    notes.push("(a) 20 rank-one insertions".to_string());

    // (b) Degree conservation on the rank-two hat side.
    let (nh, dh) = (2, 1);
    let dim = nh * nh * (g - 1) + 1;
    let ring = hat_ring(nh, dh, g)?;
    let main = BundleData::main(2, 1, g).map_err(e2s)?;
    let mut nonzero = 0;
    for trial in 0..10 {
        let deg = [0u32, 1, 2, 3, 4, 5, 6][rng.random_range(0..7)];
        let eta = random_eta(&mut rng, &ring, &[deg], 3);
        let eta = if eta.is_empty() { GradedElement::one(&ring) } else { eta };
        let deg = eta.degrees()[0] as i64;
        let out = respair::pairing_thm_10_2(&eta, &main, nh, dh, &PairingOptions::new(4)).map_err(e2s)?;
        for (r, c) in out.coeffs().iter().enumerate() {
            let want = deg + 2 * r as i64 - 2 * dim;
            for got in c.degrees() {
                ensure(got as i64 == want, || format!("(b) trial {trial}, t^{r}: degree {got}, expected {want}"))?;
            }
            ensure(want >= 0 || c.is_empty(), || format!("(b) trial {trial}: negative degree at t^{r}"))?;
            nonzero += !c.is_empty() as usize;
        }
    }
    // Rank-one main side is always semistable, so nothing survives above the virtual rank.
    let line = BundleData::main(1, 0, g).map_err(e2s)?;
    let vr = relgen::virtual_rank(1, 0, nh, dh, g).map_err(e2s)?;
    for _ in 0..3 {
        let eta = random_eta(&mut rng, &ring, &[2, 4, 6], 3);
        let out = respair::pairing_thm_10_2(&eta, &line, nh, dh, &PairingOptions::new(6)).map_err(e2s)?;
        for (r, c) in out.coeffs().iter().enumerate().skip(vr as usize + 1) {
            ensure(c.is_empty(), || format!("(b) line bundle: t^{r} above rank {vr} is nonzero"))?;
        }
    }
    notes.push(format!("(b) 10 rank-two insertions, {nonzero} nonzero coefficients"));

    // (c) Relabeling the split blocks.
    let eta = random_eta(&mut rng, &ring, &[4], 3);
    let mut opts = PairingOptions::new(4);
    let base = respair::pairing_thm_10_2(&eta, &main, nh, dh, &opts).map_err(e2s)?;
    opts.relabel = Some(vec![1, 0]);
    let swapped = respair::pairing_thm_10_2(&eta, &main, nh, dh, &opts).map_err(e2s)?;
    ensure(same_series(&base, &swapped)?, || "(c) rank two changes under relabeling".into())?;
    let ring3 = hat_ring(3, 1, g)?;
    let eta3 = GradedElement::gen(&ring3, "ha2").map_err(e2s)?.pow(3);
    let line = BundleData::main(1, 0, g).map_err(e2s)?;
    let mut opts = PairingOptions::new(4);
    let base3 = respair::pairing_thm_10_2(&eta3, &line, 3, 1, &opts).map_err(e2s)?;
    ensure(base3.coeffs().iter().any(|c| !c.is_empty()), || "(c) rank-three test pairing is trivially zero".into())?;
    opts.relabel = Some(vec![2, 0, 1]);
    let cycled = respair::pairing_thm_10_2(&eta3, &line, 3, 1, &opts).map_err(e2s)?;
    ensure(same_series(&base3, &cycled)?, || "(c) rank three changes under relabeling".into())?;
    notes.push("(c) n̂ = 2, 3".to_string());

    // (d) Deformed formula at λ⁰ with no insertions.
    let one = GradedElement::one(&ring);
    let plain = |t_cap: usize| respair::pairing_thm_10_2(&one, &main, nh, dh, &PairingOptions::new(t_cap)).map_err(e2s);
    let deformed = |t_cap: usize, eps: Rational| -> Result<TSeries<GradedElement>, String> {
        let input = Thm103Input { m: vec![0; 2], p: vec![vec![false; 2 * g as usize]; 2], eps: vec![eps], lambda_order: 0 };
        let mut out = respair::pairing_thm_10_3(&input, &main, nh, dh, &PairingOptions::new(t_cap)).map_err(e2s)?;
        Ok(out.swap_remove(0))
    };
    let at4 = plain(4)?;
    for eps in [rational::int(1), rational::frac(3, 2)] {
        ensure(same_series(&at4, &deformed(4, eps)?)?, || "(d) λ⁰ term differs at t_cap 4".into())?;
    }
    // At t_cap 4 both sides vanish by degree, so repeat where they do not.
    let at7 = plain(7)?;
    ensure(at7.coeffs().iter().any(|c| !c.is_empty()), || "(d) t_cap 7 pairing is zero".into())?;
    ensure(same_series(&at7, &deformed(7, rational::int(1))?)?, || "(d) λ⁰ term differs at t_cap 7".into())?;
    notes.push(format!("(d) t_cap 4 and 7, t^5 coefficient {}", at7.coeffs()[5]));
    Ok(notes.join("; "))
}

fn parabolic() -> Result<String, String> {
    // m = 1 reduces to the ordinary rank.
    for g in 2..=4 {
        for n in 1..=4 {
            for d in -n..=n {
                let pd = ParabolicData::trivial(n, d).map_err(e2s)?;
                for nh in 1..=3 {
                    for dh in -3..=3 {
                        if dh * n <= d * nh {
                            continue;
                        }
                        let sub = SubParabolicData::new(nh, dh, vec![nh]);
                        let want = relgen::virtual_rank(n, d, nh, dh, g).map_err(e2s)?;
                        ensure(parab::par_rank_formula(&pd, &sub, g) == want, || format!("rank ({n}, {d}, {nh}, {dh}, {g})"))?;
                    }
                }
            }
        }
    }
    // Full flags with the generic weights α_k = k/(n² + k).
    let mut flags = 0;
    for n in 2..=4i64 {
        for d in 0..n {
            let weights = (1..=n).map(|k| rational::frac(k, n * n + k)).collect();
            let pd = ParabolicData::new(n, d, weights, vec![1; n as usize]).map_err(e2s)?;
            let r = parab::good_data_check(&pd);
            ensure(r.is_good(), || format!("full flag ({n}, {d}) is not good: {:?}", r.witnesses))?;
            flags += 1;
        }
    }
    let bad = parab::good_data_check(&ParabolicData::trivial(2, 0).map_err(e2s)?);
    ensure(!bad.is_good(), || "(2, 0) with α = (0) reported good".into())?;
    ensure(bad.witnesses.iter().any(|w| w.inner.nh == 1 && w.inner.dh == 0), || format!("witnesses {:?}", bad.witnesses))?;
    // Singleton multiplicities: no extra weight-degree count for any subset.
    let mut subsets = 0;
    for n in 1..=5i64 {
        let mults = vec![1; n as usize];
        for mask in 1u32..(1 << n) {
            let subset: Vec<i64> = (1..=n).filter(|i| mask & (1 << (i - 1)) != 0).collect();
            let jh = parab::block_counts(&subset, &mults);
            let c = parab::weight_degree_count(&subset, &mults, &jh).map_err(e2s)?;
            ensure(c == 0, || format!("subset {subset:?} of {n}: {c}"))?;
            subsets += 1;
        }
    }
    Ok(format!("{flags} generic full flags good, (2, 0) bad via (1, 0), {subsets} singleton subsets"))
}

fn closed_formula() -> Result<String, String> {
    let cap = 10;
    let inductive = betti::p_moduli(2, 1, 2, cap).map_err(e2s)?;
    let closed = betti::p_closed(2, 1, 2, cap).map_err(e2s)?;
    let cmp = betti::compare_closed(&closed, &inductive);
    Ok(match cmp.first_difference {
        Some((k, c, i)) => format!("printed reading differs first at t^{k}: closed {c}, inductive {i}"),
        None if cmp.agree => "printed reading agrees with the inductive series".into(),
        None => return Err("comparison report is incomplete".into()),
    })
}
