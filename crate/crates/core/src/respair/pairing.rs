//! The two residue formulas for `∫_{M(n̂,d̂)} Φ(η · c(−π_!(V̂*⊗V))(t))`.
//!
//! Pipeline: for each Weyl element the hat side is split with line degrees
//! `d̂/n̂ − [[wĉ]]_l`; the integrand is the split Chern polynomial (from
//! rank-one GRR, with the main side unsplit) times the restricted insertion
//! and the expanded denominators; the z's are integrated out, `x_l` is put
//! on the SU(n̂) torus in terms of `Y`, and the residues are taken with
//! `Y_{n̂−1}` innermost.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_integer::Integer;
use num_traits::Zero;

use crate::exactalg::rational::{self, Rational};
use crate::exactalg::{GeneratorSpec, GradedElement, Ring, TSeries, NO_CAP};
use crate::relgen::BundleData;

use super::berezin::{Berezin, BerezinSign};
use super::residue::{iterated_residue, LinearForm, ResidueExpr};
use super::split::{denominator_expand, root_poly, s_inverse, split_chern_poly_in, torus_restrict_hat, SplitHatRing};
use super::weights::{c_hat, fundamental_domain, positive_roots, split_degrees, torus_coordinates, weyl_group, WeightVector};
use super::PairingError;

const LAMBDA: &str = "lam";

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PairingOptions {
    pub t_cap: usize,
    pub sign: BerezinSign,
    /// Relabels the blocks of `ĉ` before the Weyl sum (0-based permutation).
    pub relabel: Option<Vec<usize>>,
}

impl PairingOptions {
    pub fn new(t_cap: usize) -> Self {
        PairingOptions { t_cap, ..Default::default() }
    }
}

/// Data for the formula with `exp(Σ ε_r f̂_r)` inserted. `eps[r−2] = ε_r`;
/// `m[r−1]` and `p[r−1][k−1]` give the powers of `â_r` and `b̂_r^k`.
/// The ε's are scaled by a formal `λ` and the result is returned as the
/// coefficients of `λ^0 .. λ^lambda_order`.
#[derive(Clone, Debug, PartialEq)]
pub struct Thm103Input {
    pub m: Vec<u32>,
    pub p: Vec<Vec<bool>>,
    pub eps: Vec<Rational>,
    pub lambda_order: usize,
}

struct Setup {
    nh: usize,
    dh: i64,
    g: i64,
    ring: Arc<Ring>,
    y_ring: Arc<Ring>,
    degree_classes: BTreeMap<Vec<i64>, (Vec<WeightVector>, i64)>,
}

impl Setup {
    fn new(main: &BundleData, nh: i64, dh: i64, opts: &PairingOptions, lambda: bool) -> Result<Self, PairingError> {
        if !(1..=3).contains(&nh) {
            return Err(PairingError::Invalid(format!("hat rank {nh} not supported (1 ≤ n̂ ≤ 3)")));
        }
        if nh.gcd(&dh) != 1 {
            return Err(PairingError::NotCoprime { nh, dh });
        }
        let nh_u = nh as usize;
        let g = main.g;
        let mut c = c_hat(nh_u, dh);
        if let Some(p) = &opts.relabel {
            let mut sorted = p.clone();
            sorted.sort_unstable();
            if sorted != (0..nh_u).collect::<Vec<_>>() {
                return Err(PairingError::Invalid("relabeling must be a permutation".into()));
            }
            c = fundamental_domain(&c.permuted(p));
        }
        let mut degree_classes: BTreeMap<Vec<i64>, (Vec<WeightVector>, i64)> = BTreeMap::new();
        for w in weyl_group(nh_u) {
            let gamma = fundamental_domain(&c.permuted(&w));
            let d = split_degrees(nh_u, dh, &gamma)?;
            let entry = degree_classes.entry(d).or_insert((Vec::new(), 0));
            entry.0.push(gamma);
            entry.1 += 1;
        }
        let split0 = SplitHatRing::new(g, vec![0; nh_u])?;
        let mut gens = split0.generators();
        gens.extend(main.generators());
        let mut y_gens: Vec<GeneratorSpec> = (1..nh_u).map(|a| GeneratorSpec::new(format!("Y{a}"), 2)).collect();
        y_gens.extend(main.generators());
        if lambda {
            gens.push(GeneratorSpec::new(LAMBDA, 2));
            y_gens.push(GeneratorSpec::new(LAMBDA, 2));
        }
        Ok(Setup {
            nh: nh_u,
            dh,
            g,
            ring: Ring::new(gens, NO_CAP)?,
            y_ring: Ring::new(y_gens, NO_CAP)?,
            degree_classes,
        })
    }

    fn x(&self, l: usize) -> GradedElement {
        GradedElement::gen(&self.ring, &SplitHatRing::x_name(l)).expect("split generator")
    }

    fn z(&self, s: i64, l: usize) -> GradedElement {
        GradedElement::gen(&self.ring, &SplitHatRing::z_name(s, l)).expect("split generator")
    }

    fn split(&self, degrees: &[i64]) -> Result<SplitHatRing, PairingError> {
        SplitHatRing::new(self.g, degrees.to_vec())
    }

    fn hat(&self) -> Result<BundleData, PairingError> {
        Ok(BundleData::hat(self.nh as i64, self.dh, self.g)?)
    }

    /// Restricts `η` (hat generators only, no `f̂`) into the split ring.
    fn restrict_eta(&self, eta: &GradedElement) -> Result<GradedElement, PairingError> {
        let hat = self.hat()?;
        let f_names: Vec<String> = (1..=hat.n).map(|r| hat.f_name(r)).collect();
        for (m, _) in eta.terms() {
            for (i, spec) in eta.ring().gens().iter().enumerate() {
                if eta.ring().exponent(m, i) > 0 && f_names.contains(&spec.name) {
                    return Err(PairingError::FGenerator(spec.name.clone()));
                }
            }
        }
        let allowed: Vec<String> = hat.generators().into_iter().map(|s| s.name).collect();
        if let Some(bad) = eta.ring().gens().iter().find(|s| !allowed.contains(&s.name)) {
            return Err(PairingError::Invalid(format!("η involves {} outside the hat ring", bad.name)));
        }
        let split = self.split(&self.degree_classes.keys().next().expect("nonempty Weyl group").clone())?;
        torus_restrict_hat(eta, &hat, &split, &self.ring)
    }

    /// `x_l ↦ X_l(Y)`, z's to 0, everything else by name.
    fn to_y(&self, x: &TSeries<GradedElement>) -> Result<TSeries<GradedElement>, PairingError> {
        let coords = torus_coordinates(self.nh);
        let y: Vec<GradedElement> = (1..self.nh).map(|a| GradedElement::gen(&self.y_ring, &format!("Y{a}")).expect("Y")).collect();
        let images = self
            .ring
            .gens()
            .iter()
            .map(|spec| {
                if let Some(l) = spec.name.strip_prefix("hx").and_then(|s| s.parse::<usize>().ok()) {
                    Ok(linear(&self.y_ring, &y, &coords[l - 1]))
                } else if spec.name.starts_with("hz") {
                    Ok(GradedElement::zero(&self.y_ring))
                } else {
                    GradedElement::gen(&self.y_ring, &spec.name)
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(x.try_map(|c| c.substitute(&self.y_ring, &images))?)
    }

    /// `(−1)^{n̂(n̂−1)(g−1)/2} / n̂!`.
    fn prefactor(&self) -> Rational {
        let nh = self.nh as i64;
        let e = nh * (nh - 1) * (self.g - 1) / 2;
        let sign = if e % 2 == 0 { 1 } else { -1 };
        rational::int(sign) / Rational::from_integer(rational::factorial(self.nh as u32))
    }

    /// Denominators `∏_l Y_l^{−k_l} · D^{−(2g−2)}`.
    fn denominators(&self, y_orders: &[u32]) -> Vec<(LinearForm, u32)> {
        let m = self.nh - 1;
        let mut d: Vec<(LinearForm, u32)> = (0..m)
            .map(|a| ((0..m).map(|b| if a == b { rational::int(1) } else { Rational::zero() }).collect(), y_orders[a]))
            .collect();
        if self.g > 1 {
            for root in positive_roots(self.nh) {
                d.push((root, (2 * self.g - 2) as u32));
            }
        }
        d
    }

    fn finish(&self, expr: &ResidueExpr, t_cap: usize) -> Result<TSeries<GradedElement>, PairingError> {
        let out = iterated_residue(expr, t_cap)?;
        Ok(out.scale(&self.prefactor()))
    }

    fn y_names(&self) -> Vec<String> {
        (1..self.nh).map(|a| format!("Y{a}")).collect()
    }
}

fn linear(ring: &Arc<Ring>, y: &[GradedElement], coeffs: &[Rational]) -> GradedElement {
    y.iter().zip(coeffs).fold(GradedElement::zero(ring), |acc, (v, c)| acc + v.scale(c))
}

/// Main ring image: drops the (absent) Y's and λ.
fn to_main(main: &BundleData, x: &TSeries<GradedElement>) -> Result<TSeries<GradedElement>, PairingError> {
    let ring = Ring::new(main.generators(), NO_CAP)?;
    let images = x.coeffs()[0]
        .ring()
        .gens()
        .iter()
        .map(|s| match GradedElement::gen(&ring, &s.name) {
            Ok(g) => g,
            Err(_) => GradedElement::zero(&ring),
        })
        .collect::<Vec<_>>();
    Ok(x.try_map(|c| c.substitute(&ring, &images))?)
}

/// Residue pairing of `η` with `c(−π_!(V̂*⊗V))`: coefficients of `t^0..t^{t_cap}` as main-ring classes.
pub fn pairing_thm_10_2(
    eta: &GradedElement,
    main: &BundleData,
    nh: i64,
    dh: i64,
    opts: &PairingOptions,
) -> Result<TSeries<GradedElement>, PairingError> {
    let s = Setup::new(main, nh, dh, opts, false)?;
    let j = opts.t_cap + s.nh - 1;
    let eta_r = s.restrict_eta(eta)?;
    let a = main.point_chern(&s.ring)?;
    let mut base = TSeries::constant(eta_r, j);
    for l in 1..s.nh {
        base = base.mul(&denominator_expand(&a, &s.x(l), &s.x(l + 1), j)?);
    }
    let berezin = Berezin::new(&s.ring, s.g, s.nh, opts.sign)?;
    let mut integrand = TSeries::constant(GradedElement::zero(&s.ring), j);
    for (degrees, (_, mult)) in &s.degree_classes {
        let c = split_chern_poly_in(&s.ring, main, &s.split(degrees)?, j)?;
        integrand = integrand.add(&c.mul(&base).scale(&rational::int(*mult)));
    }
    let integrated = integrand.try_map(|c| berezin.integrate(c))?;
    let names = s.y_names();
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let mut expr = ResidueExpr::new(&s.y_ring, &refs)?;
    expr.push(s.to_y(&integrated)?, -(s.nh as i64 - 1), &s.denominators(&vec![1; s.nh - 1]));
    to_main(main, &s.finish(&expr, opts.t_cap)?)
}

/// Keeps terms with `λ`-degree at most `k`.
fn trunc_lambda(x: &GradedElement, lam: usize, k: usize) -> GradedElement {
    x.filter(|m| (x.ring().exponent(m, lam) as usize) <= k)
}

fn mul_trunc(a: &TSeries<GradedElement>, b: &TSeries<GradedElement>, lam: usize, k: usize) -> TSeries<GradedElement> {
    a.mul(b).map(|c| trunc_lambda(c, lam, k))
}

/// `Σ_{i=0}^{k} x^i / i!` for `x` divisible by `λ`.
fn exp_trunc(x: &GradedElement, lam: usize, k: usize) -> GradedElement {
    let mut out = GradedElement::one(x.ring());
    let mut power = GradedElement::one(x.ring());
    for i in 1..=k {
        power = trunc_lambda(&(&power * x), lam, k).scale(&rational::frac(1, i as i64));
        out = out + power.clone();
    }
    out
}

/// Deformed pairing with formal `λ`; entry `k` is the `λ^k` coefficient.
pub fn pairing_thm_10_3(
    input: &Thm103Input,
    main: &BundleData,
    nh: i64,
    dh: i64,
    opts: &PairingOptions,
) -> Result<Vec<TSeries<GradedElement>>, PairingError> {
    if nh < 2 {
        return Err(PairingError::Invalid("needs n̂ ≥ 2".into()));
    }
    if input.eps.len() != nh as usize - 1 {
        return Err(PairingError::Invalid(format!("expected {} values ε_2..ε_n̂", nh - 1)));
    }
    if input.eps[0].is_zero() {
        return Err(PairingError::ZeroEpsilon);
    }
    let s = Setup::new(main, nh, dh, opts, true)?;
    let nhu = s.nh;
    let k_max = input.lambda_order;
    let j = opts.t_cap + (nhu - 1) * (k_max + 1);
    let ring = &s.ring;
    let lam_i = ring.index(LAMBDA).expect("λ present");
    let lam = GradedElement::gen_index(ring, lam_i);
    let xs: Vec<usize> = (1..=nhu).map(|l| ring.index(&SplitHatRing::x_name(l)).expect("x")).collect();

    // Elementary symmetric polynomials in the x's and q = Σ ε_r σ_r.
    let mut sigma = vec![GradedElement::zero(ring); nhu + 1];
    sigma[0] = GradedElement::one(ring);
    for l in 1..=nhu {
        for r in (1..=nhu).rev() {
            sigma[r] = sigma[r].clone() + &sigma[r - 1] * &s.x(l);
        }
    }
    let q = (2..=nhu).fold(GradedElement::zero(ring), |acc, r| acc + sigma[r].scale(&input.eps[r - 2]));
    let dq: Vec<GradedElement> = xs.iter().map(|&i| q.derivative(i).expect("even")).collect();
    let ddq: Vec<Vec<GradedElement>> = dq.iter().map(|d| xs.iter().map(|&i| d.derivative(i).expect("even")).collect()).collect();
    // Directional data along the simple roots ê_a = e_a − e_{a+1}.
    let along = |v: &[GradedElement], a: usize| v[a].clone() - v[a + 1].clone();
    let h: Vec<GradedElement> = (0..nhu - 1).map(|a| along(&dq, a)).collect();
    let hess = |a: usize, b: usize| -> GradedElement {
        let row: Vec<GradedElement> = (0..nhu).map(|i| along(&ddq[i], b)).collect();
        along(&row, a)
    };
    // ζ_a^s = Σ_{l≤a} z_{s,l}.
    let zeta = |a: usize, s_: i64| -> GradedElement { (1..=a + 1).fold(GradedElement::zero(ring), |acc, l| acc + s.z(s_, l)) };

    // Insertions from η: ∏ σ_r^{m_r} ∏ (Σ_a (dσ_r)(ê_a) ζ_a^k)^{p_{r,k}}.
    let mut eta = GradedElement::one(ring);
    for (r, &m) in input.m.iter().enumerate() {
        eta = eta * sigma[r + 1].pow(m);
    }
    for (r0, flags) in input.p.iter().enumerate() {
        let r = r0 + 1;
        let dsig: Vec<GradedElement> = xs.iter().map(|&i| sigma[r].derivative(i).expect("even")).collect();
        for (k0, &on) in flags.iter().enumerate() {
            if on {
                let ins = (0..nhu - 1).fold(GradedElement::zero(ring), |acc, a| acc + along(&dsig, a) * zeta(a, k0 as i64 + 1));
                eta = eta * ins;
            }
        }
    }
    let mut quad = GradedElement::zero(ring);
    for a in 0..nhu - 1 {
        for b in 0..nhu - 1 {
            let hab = hess(a, b);
            if hab.is_empty() {
                continue;
            }
            for s_ in 1..=s.g {
                quad = quad + zeta(a, s_) * zeta(b, s_ + s.g) * hab.clone();
            }
        }
    }
    let quad_exp = exp_trunc(&(&lam * &quad).neg_ref(), lam_i, k_max);
    let common = trunc_lambda(&(eta * quad_exp), lam_i, k_max);

    let a = main.point_chern(ring)?;
    let berezin = Berezin::new(ring, s.g, nhu, opts.sign)?;
    let names = s.y_names();
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let mut expr = ResidueExpr::new(&s.y_ring, &refs)?;

    // Per-l pieces of the deformed denominator: Σ_m (−1)^m E^m P_{l+1}^m P_l S^{−(m+1)} (tY_l)^{−(m+1)}.
    let mut pieces: Vec<Vec<TSeries<GradedElement>>> = Vec::new();
    for l in 1..nhu {
        let e = exp_trunc(&(&lam * &h[l - 1]).neg_ref(), lam_i, k_max) - GradedElement::one(ring);
        let p_next = root_poly(&a, &s.x(l + 1), j);
        let p_l = root_poly(&a, &s.x(l), j);
        let s_inv = s_inverse(&a, &s.x(l), &s.x(l + 1), j)?;
        let mut v = Vec::new();
        let mut acc = p_l.mul(&s_inv);
        for m in 0..=k_max {
            let sign = if m % 2 == 0 { 1 } else { -1 };
            v.push(acc.scale(&rational::int(sign)));
            acc = mul_trunc(&acc, &p_next.mul(&s_inv).scale_by(&e), lam_i, k_max);
        }
        pieces.push(v);
    }

    let mut per_w = Vec::new();
    for (degrees, (gammas, _)) in &s.degree_classes {
        let c = split_chern_poly_in(ring, main, &s.split(degrees)?, j)?;
        for gamma in gammas {
            let shift = (0..nhu).fold(GradedElement::zero(ring), |acc, i| acc + dq[i].scale(&gamma.x()[i]));
            let wf = exp_trunc(&(&lam * &shift).neg_ref(), lam_i, k_max);
            per_w.push(c.scale_by(&trunc_lambda(&(&wf * &common), lam_i, k_max)));
        }
    }
    let mut body = TSeries::constant(GradedElement::zero(ring), j);
    for x in per_w {
        body = body.add(&x);
    }
    // Multi-index over m_l for l < n̂.
    let mut idx = vec![0usize; nhu - 1];
    loop {
        if idx.iter().sum::<usize>() <= k_max {
            let mut term = body.clone();
            for (l, &m) in idx.iter().enumerate() {
                term = mul_trunc(&term, &pieces[l][m], lam_i, k_max);
            }
            let integrated = term.try_map(|c| berezin.integrate(c))?;
            let orders: Vec<u32> = idx.iter().map(|&m| m as u32 + 1).collect();
            let shift = -(orders.iter().sum::<u32>() as i64);
            expr.push(s.to_y(&integrated)?, shift, &s.denominators(&orders));
        }
        let mut p = 0;
        loop {
            if p == idx.len() {
                let out = s.finish(&expr, opts.t_cap)?;
                let lam_y = s.y_ring.index(LAMBDA).expect("λ");
                return (0..=k_max)
                    .map(|k| {
                        let part = out.map(|c| c.powers_of(lam_y).remove(&(k as u32)).unwrap_or_else(|| GradedElement::zero(&s.y_ring)));
                        to_main(main, &part)
                    })
                    .collect();
            }
            idx[p] += 1;
            if idx[p] <= k_max {
                break;
            }
            idx[p] = 0;
            p += 1;
        }
    }
}
