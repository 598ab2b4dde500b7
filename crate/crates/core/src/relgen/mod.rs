//! Chern classes of `−π_!(V̂*⊗V)` through Grothendieck–Riemann–Roch, the
//! relation windows they feed, and the checks that go with them.
//!
//! Everything is computed at the level of Chern characters first. The
//! character of the pushforward is `(g−1)·[ch(V̂*)ch(V)]_1 − [ch(V̂*)ch(V)]_ω`
//! degree by degree, which is `π_*(ch(V̂*)ch(V)((g−1)ω − 1))` unpacked.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_integer::Integer;
use serde_json::json;
use thiserror::Error;

use crate::exactalg::rational;
use crate::exactalg::{AlgError, Algebra, GeneratorSpec, GradedElement, Monomial, Ring, TSeries};
use crate::kunneth::{
    self, character_to_chern, chern_to_character, log_chern_from_character, KunnethError, SigmaClass,
};
use crate::strata;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RelError {
    #[error("slope condition violated: {0}")]
    Slope(String),
    #[error("invalid bundle data: {0}")]
    Invalid(String),
    #[error("degree cap {given} too small, need at least {required}")]
    CapTooSmall { given: u32, required: u32 },
    #[error("r = {r} outside the window {lo}..={hi}")]
    OutsideWindow { r: i64, lo: i64, hi: i64 },
    #[error(transparent)]
    Kunneth(#[from] KunnethError),
    #[error(transparent)]
    Alg(#[from] AlgError),
}

/// Rank, degree and genus of a universal bundle, plus the prefix naming its
/// Künneth generators `{p}a{r}`, `{p}b{r}_{j}` and `{p}f{r}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BundleData {
    pub n: i64,
    pub d: i64,
    pub g: i64,
    pub prefix: String,
    trivial: bool,
    block: Option<usize>,
}

impl BundleData {
    pub fn new(n: i64, d: i64, g: i64, prefix: impl Into<String>) -> Result<Self, RelError> {
        if n < 1 || g < 2 {
            return Err(RelError::Invalid(format!("need n ≥ 1 and g ≥ 2, got n = {n}, g = {g}")));
        }
        Ok(BundleData { n, d, g, prefix: prefix.into(), trivial: false, block: None })
    }

    pub fn main(n: i64, d: i64, g: i64) -> Result<Self, RelError> {
        Self::new(n, d, g, "")
    }

    pub fn hat(n: i64, d: i64, g: i64) -> Result<Self, RelError> {
        Self::new(n, d, g, "h")
    }

    /// The trivial line bundle: rank 1, degree 0, every generator zero.
    pub fn trivial_line(g: i64, prefix: impl Into<String>) -> Result<Self, RelError> {
        let mut b = Self::new(1, 0, g, prefix)?;
        b.trivial = true;
        Ok(b)
    }

    /// Line block `l` of a split bundle: generators `hx{l}` and `hz{s}_{l}`.
    pub fn split_line(l: usize, d: i64, g: i64) -> Result<Self, RelError> {
        let mut b = Self::new(1, d, g, "h")?;
        b.block = Some(l);
        Ok(b)
    }

    pub fn is_trivial(&self) -> bool {
        self.trivial
    }

    pub fn a_name(&self, r: i64) -> String {
        match self.block {
            Some(l) => format!("hx{l}"),
            None => format!("{}a{r}", self.prefix),
        }
    }

    pub fn b_name(&self, r: i64, j: i64) -> String {
        match self.block {
            Some(l) => format!("hz{j}_{l}"),
            None => format!("{}b{r}_{j}", self.prefix),
        }
    }

    pub fn f_name(&self, r: i64) -> String {
        format!("{}f{r}", self.prefix)
    }

    pub fn generators(&self) -> Vec<GeneratorSpec> {
        if self.trivial {
            return Vec::new();
        }
        let mut v = Vec::new();
        for r in 1..=self.n {
            v.push(GeneratorSpec::new(self.a_name(r), 2 * r as u32));
            for j in 1..=2 * self.g {
                v.push(GeneratorSpec::new(self.b_name(r, j), 2 * r as u32 - 1));
            }
            if r >= 2 {
                v.push(GeneratorSpec::new(self.f_name(r), 2 * r as u32 - 2));
            }
        }
        v
    }

    /// Universal Chern classes `c_r = a_r⊗1 + Σ_j b_r^j⊗α_j + f_r⊗ω`, with `f_1 = d`.
    pub fn chern_classes(&self, ring: &Arc<Ring>) -> Result<Vec<SigmaClass>, RelError> {
        let g = self.g as u32;
        if self.trivial {
            return Ok(vec![SigmaClass::zero(ring, g)]);
        }
        let gen = |name: String| GradedElement::gen(ring, &name);
        let mut a = Vec::new();
        let mut b = Vec::new();
        let mut f = Vec::new();
        for r in 1..=self.n {
            a.push(gen(self.a_name(r))?);
            b.push((1..=2 * self.g).map(|j| gen(self.b_name(r, j))).collect::<Result<Vec<_>, _>>()?);
            f.push(if r == 1 { GradedElement::int(ring, self.d) } else { gen(self.f_name(r))? });
        }
        Ok(kunneth::assemble_universal_chern(&a, &b, &f, self.n as usize, g)?)
    }

    /// `c_r` restricted over a point of the surface: just the `a` classes.
    pub fn point_chern(&self, ring: &Arc<Ring>) -> Result<Vec<GradedElement>, RelError> {
        if self.trivial {
            return Ok(vec![GradedElement::zero(ring)]);
        }
        Ok((1..=self.n).map(|r| GradedElement::gen(ring, &self.a_name(r))).collect::<Result<_, _>>()?)
    }

    /// Chern character `ch_0..ch_k_max` as surface classes.
    pub fn character(&self, ring: &Arc<Ring>, k_max: usize) -> Result<Vec<SigmaClass>, RelError> {
        let c = self.chern_classes(ring)?;
        let one = c[0].one_like();
        Ok(chern_to_character(&one, &c, k_max))
    }
}

/// Truncation data: `t_cap` for series in `t`, `degree_cap` for the ring.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Caps {
    pub t_cap: usize,
    pub degree_cap: u32,
}

impl Caps {
    /// Degree cap `2·t_cap`, exactly what `c_{t_cap}` needs.
    pub fn new(t_cap: usize) -> Self {
        Caps { t_cap, degree_cap: 2 * t_cap as u32 }
    }

    pub fn check(&self) -> Result<(), RelError> {
        let required = 2 * self.t_cap as u32;
        if self.degree_cap < required {
            return Err(RelError::CapTooSmall { given: self.degree_cap, required });
        }
        Ok(())
    }
}

pub fn virtual_rank(n: i64, d: i64, nh: i64, dh: i64, g: i64) -> Result<i64, RelError> {
    if n < 1 || nh < 1 {
        return Err(RelError::Invalid("ranks must be positive".into()));
    }
    if dh * n <= d * nh {
        return Err(RelError::Slope(format!("need {dh}/{nh} > {d}/{n}")));
    }
    Ok(rank_formula(n, d, nh, dh, g))
}

fn rank_formula(n: i64, d: i64, nh: i64, dh: i64, g: i64) -> i64 {
    n * nh * (g - 1) - d * nh + dh * n
}

/// The open window `vr < r < vr + 2nn̂` as an inclusive range.
pub fn relation_window(n: i64, d: i64, nh: i64, dh: i64, g: i64) -> Result<std::ops::RangeInclusive<i64>, RelError> {
    if !(0 < nh && nh < n) {
        return Err(RelError::Slope(format!("need 0 < n̂ < n, got n̂ = {nh}, n = {n}")));
    }
    if !(dh * n > d * nh && dh * n < (d + n) * nh) {
        return Err(RelError::Slope(format!("need {d}/{n} < {dh}/{nh} < {d}/{n} + 1")));
    }
    let vr = rank_formula(n, d, nh, dh, g);
    Ok(vr + 1..=vr + 2 * n * nh - 1)
}

/// Ring carrying the hat generators followed by the main ones.
pub fn pair_ring(main: &BundleData, hat: &BundleData, degree_cap: u32) -> Result<Arc<Ring>, RelError> {
    if main.g != hat.g {
        return Err(KunnethError::GenusMismatch(hat.g as u32, main.g as u32).into());
    }
    if main.prefix == hat.prefix && !main.trivial && !hat.trivial {
        return Err(RelError::Invalid("main and hat need distinct prefixes".into()));
    }
    let mut gens = hat.generators();
    gens.extend(main.generators());
    Ok(Ring::new(gens, degree_cap)?)
}

fn ensure_ring(ring: &Arc<Ring>, b: &BundleData) -> Result<(), RelError> {
    for gspec in b.generators() {
        if ring.index(&gspec.name).is_none() {
            return Err(AlgError::UnknownGenerator(gspec.name).into());
        }
    }
    Ok(())
}

/// `ch_0..ch_t_cap` of `−π_!((V̂⊗L)*⊗V)` with `c_1(L) = δω`; `δ = 0` is the plain case.
pub fn grr_character_in(
    ring: &Arc<Ring>,
    main: &BundleData,
    hat: &BundleData,
    delta: i64,
    t_cap: usize,
) -> Result<Vec<GradedElement>, RelError> {
    ensure_ring(ring, main)?;
    ensure_ring(ring, hat)?;
    if main.g != hat.g {
        return Err(KunnethError::GenusMismatch(hat.g as u32, main.g as u32).into());
    }
    let g = main.g as u32;
    let k_max = t_cap + 1;
    let ch_main = main.character(ring, k_max)?;
    let mut ch_hat = hat.character(ring, k_max)?;
    if delta != 0 {
        let q = rational::int(delta);
        for i in (1..=k_max).rev() {
            let twist = SigmaClass::omega_class(ch_hat[i - 1].unit().scale(&q), g);
            ch_hat[i] = ch_hat[i].add(&twist);
        }
    }
    // Dual: ch_i(V̂*) = (−1)^i ch_i(V̂).
    for (i, c) in ch_hat.iter_mut().enumerate() {
        if i % 2 == 1 {
            *c = c.scale(&rational::int(-1));
        }
    }
    let prod = |k: usize| -> SigmaClass {
        let mut acc = SigmaClass::zero(ring, g);
        for i in 0..=k {
            if !ch_hat[i].is_zero() && !ch_main[k - i].is_zero() {
                acc = acc.add(&ch_hat[i].mul(&ch_main[k - i]));
            }
        }
        acc
    };
    let gm1 = rational::int(main.g - 1);
    let mut prods: Vec<SigmaClass> = (0..=k_max).map(prod).collect();
    let mut out = Vec::with_capacity(t_cap + 1);
    for k in 0..=t_cap {
        let next = std::mem::replace(&mut prods[k + 1], SigmaClass::zero(ring, g));
        out.push(prods[k].unit().scale(&gm1) - kunneth::pushforward_pi(&next));
        prods[k + 1] = next;
    }
    Ok(out)
}

pub fn grr_character(main: &BundleData, hat: &BundleData, caps: Caps) -> Result<Vec<GradedElement>, RelError> {
    caps.check()?;
    let ring = pair_ring(main, hat, caps.degree_cap)?;
    grr_character_in(&ring, main, hat, 0, caps.t_cap)
}

/// `log c(−π_!(V̂*⊗V))(t)`.
pub fn grr_log(main: &BundleData, hat: &BundleData, caps: Caps) -> Result<TSeries<GradedElement>, RelError> {
    Ok(log_chern_from_character(&grr_character(main, hat, caps)?, caps.t_cap))
}

/// Chern polynomial `c(−π_!(V̂*⊗V))(t)` up to `t^t_cap`.
pub fn grr_minus_pi(main: &BundleData, hat: &BundleData, caps: Caps) -> Result<TSeries<GradedElement>, RelError> {
    let ch = grr_character(main, hat, caps)?;
    let rank = rank_formula(main.n, main.d, hat.n, hat.d, main.g);
    Ok(character_to_chern(&ch, rank, caps.t_cap)?)
}

/// `Ω(t) = c(V̂*⊗V)` over a point, from the `a` classes alone.
pub fn omega_poly_in(ring: &Arc<Ring>, main: &BundleData, hat: &BundleData, t_cap: usize) -> Result<TSeries<GradedElement>, RelError> {
    let r = (main.n * hat.n) as usize;
    let cap = r.max(t_cap);
    let one = GradedElement::one(ring);
    let ch_m = chern_to_character(&one, &main.point_chern(ring)?, cap);
    let ch_h = chern_to_character(&one, &hat.point_chern(ring)?, cap);
    let ch: Vec<GradedElement> = (0..=cap)
        .map(|k| {
            (0..=k).fold(GradedElement::zero(ring), |acc, i| {
                let term = &ch_h[i] * &ch_m[k - i];
                if i % 2 == 1 { acc - term } else { acc + term }
            })
        })
        .collect();
    let c = character_to_chern(&ch, r as i64, cap)?;
    // A genuine bundle of rank nn̂: coefficients past t^{nn̂} vanish exactly.
    Ok(TSeries::new(c.coeffs()[..=r].to_vec(), t_cap))
}

pub fn omega_poly(main: &BundleData, hat: &BundleData, caps: Caps) -> Result<TSeries<GradedElement>, RelError> {
    let ring = pair_ring(main, hat, caps.degree_cap.max(2 * (main.n * hat.n) as u32))?;
    omega_poly_in(&ring, main, hat, caps.t_cap)
}

/// `R(t) = Ω(t)²·c′(t)/c(t)` up to `t^t_cap`, through `(log c)′`.
pub fn recurrence_series(main: &BundleData, hat: &BundleData, caps: Caps) -> Result<TSeries<GradedElement>, RelError> {
    caps.check()?;
    let t = caps.t_cap;
    let ring = pair_ring(main, hat, 2 * (t as u32 + 1))?;
    let ch = grr_character_in(&ring, main, hat, 0, t + 1)?;
    let dlog = log_chern_from_character(&ch, t + 1).ddt();
    let om = omega_poly_in(&ring, main, hat, t)?;
    Ok(om.mul(&om).mul(&dlog))
}

/// Coefficients of `R(t)` in degrees `2nn̂..=t_cap`; all zero when the recurrence holds.
pub fn recurrence_residual(main: &BundleData, hat: &BundleData, caps: Caps) -> Result<Vec<GradedElement>, RelError> {
    let r = recurrence_series(main, hat, caps)?;
    let lo = (2 * main.n * hat.n) as usize;
    Ok(r.coeffs().iter().skip(lo).cloned().collect())
}

/// The same series formed literally as `Ω²·c′·c^{−1}`; only sensible at small caps.
pub fn recurrence_series_direct(main: &BundleData, hat: &BundleData, caps: Caps) -> Result<TSeries<GradedElement>, RelError> {
    caps.check()?;
    let t = caps.t_cap;
    let big = Caps::new(t + 1);
    let c = grr_minus_pi(main, hat, big)?;
    let ring = c.coeffs()[0].ring().clone();
    let om = omega_poly_in(&ring, main, hat, t)?;
    Ok(om.mul(&om).mul(&c.ddt()).mul(&c.truncate(t).reciprocal()?))
}

/// Compares `c(−π_!((V̂⊗L)*⊗V))` with `c(−π_!(V̂*⊗V))·Ω^δ` for `c_1(L) = δω`.
pub fn shift_identity_check(main: &BundleData, hat: &BundleData, delta: i64, caps: Caps) -> Result<bool, RelError> {
    if delta < 0 {
        return Err(RelError::Invalid("δ must be nonnegative".into()));
    }
    caps.check()?;
    let ring = pair_ring(main, hat, caps.degree_cap)?;
    let t = caps.t_cap;
    let rank = rank_formula(main.n, main.d, hat.n, hat.d, main.g);
    let plain = character_to_chern(&grr_character_in(&ring, main, hat, 0, t)?, rank, t)?;
    let shifted_rank = rank + main.n * hat.n * delta;
    let shifted = character_to_chern(&grr_character_in(&ring, main, hat, delta, t)?, shifted_rank, t)?;
    let om = omega_poly_in(&ring, main, hat, t)?;
    Ok(shifted == plain.mul(&om.pow_i(delta)?))
}

/// Splits a class into `Σ hat monomial · main class`, keyed by the hat monomial.
pub fn kunneth_components(c: &GradedElement, hat: &BundleData) -> BTreeMap<Monomial, GradedElement> {
    let ring = c.ring();
    let hat_names: Vec<String> = hat.generators().into_iter().map(|s| s.name).collect();
    c.split_off(|i| hat_names.contains(&ring.gens()[i].name))
}

/// A relation class: the slant product of `c_r` with the functional dual to
/// a hat monomial.
#[derive(Clone, Debug, PartialEq)]
pub struct RelationRecord {
    pub nhat: i64,
    pub dhat: i64,
    pub r: i64,
    pub functional: String,
    pub value: GradedElement,
}

impl RelationRecord {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "nhat": self.nhat,
            "dhat": self.dhat,
            "r": self.r,
            "functional": self.functional,
            "value": self.value.terms_json(),
        })
    }
}

/// Relation records for every hat monomial appearing in `c_r`.
pub fn relation_records(main: &BundleData, hat: &BundleData, r: i64) -> Result<Vec<RelationRecord>, RelError> {
    let window = relation_window(main.n, main.d, hat.n, hat.d, main.g)?;
    if !window.contains(&r) {
        return Err(RelError::OutsideWindow { r, lo: *window.start(), hi: *window.end() });
    }
    let c = grr_minus_pi(main, hat, Caps::new(r as usize))?;
    let cr = c.coeff(r as usize)?;
    let ring = cr.ring().clone();
    Ok(kunneth_components(cr, hat)
        .into_iter()
        .map(|(h, value)| RelationRecord { nhat: hat.n, dhat: hat.d, r, functional: ring.format_monomial(&h), value })
        .collect())
}

/// `(u, v)` with `un + v(d − n(g−1)) = 1`, `|u|` minimal, ties toward `v > 0`.
pub fn normalization_coeffs(n: i64, d: i64, g: i64) -> Result<(i64, i64), RelError> {
    let e = d - n * (g - 1);
    let eg = n.extended_gcd(&e);
    if eg.gcd.abs() != 1 {
        return Err(RelError::Invalid(format!("gcd(n, d − n(g−1)) = {} ≠ 1", eg.gcd.abs())));
    }
    let (u0, v0) = (eg.x * eg.gcd, eg.y * eg.gcd);
    if e == 0 {
        return Ok((u0, 0));
    }
    // Solutions are (u0 + k e, v0 − k n); scan around the minimizer of |u|.
    let k0 = -Integer::div_floor(&u0, &e);
    let best = (k0 - 2..=k0 + 2)
        .map(|k| (u0 + k * e, v0 - k * n))
        .min_by_key(|&(u, v)| (u.abs(), if v > 0 { 0 } else { 1 }, v.abs()))
        .expect("nonempty");
    Ok(best)
}

/// `c_1(π_!V) = π_*(ch_2 V) + (1 − g)a_1`, read off the character.
pub fn c1_pushforward(main: &BundleData, ring: &Arc<Ring>) -> Result<GradedElement, RelError> {
    let ch = main.character(ring, 2)?;
    let a1 = main.point_chern(ring)?.remove(0);
    Ok(kunneth::pushforward_pi(&ch[2]) + a1.scale(&rational::int(1 - main.g)))
}

/// The element `u a_1 + v c_1(π_!V)` in the main ring.
pub fn normalization_relation(main: &BundleData) -> Result<GradedElement, RelError> {
    let (u, v) = normalization_coeffs(main.n, main.d, main.g)?;
    let ring = Ring::new(main.generators(), 4)?;
    let a1 = main.point_chern(&ring)?.remove(0);
    Ok(a1.scale(&rational::int(u)) + c1_pushforward(main, &ring)?.scale(&rational::int(v)))
}

/// Top Chern class of `−π_!(V̂_1*⊗V_2)` for the two-block stratum, in the
/// ring with generators prefixed `h1` and `h2`.
pub fn euler_class(nh: i64, dh: i64, n2: i64, d2: i64, g: i64) -> Result<GradedElement, RelError> {
    let rank = virtual_rank(n2, d2, nh, dh, g)?;
    let hat = BundleData::new(nh, dh, g, "h1")?;
    let main = BundleData::new(n2, d2, g, "h2")?;
    let c = grr_minus_pi(&main, &hat, Caps::new(rank as usize))?;
    debug_assert_eq!(Ok(rank), strata::coarse_codim(nh + n2, dh + d2, nh, dh, g).map_err(|e| e.to_string()));
    Ok(c.coeff(rank as usize)?.clone())
}
