//! Diagnostic evaluation of the closed product formula for a split hat line,
//! with the main bundle in Chern roots `δ_k`. Derivatives `∂δ_k/∂a_i` are
//! rational in the roots; everything is kept over a power of the Vandermonde
//! `V = ∏_{i<j} (δ_i − δ_j)` and the denominators are cleared at the end.
//!
//! Under our sign conventions the line factor reads
//! `(1+(δ_k−x_l)t)^{g−1+d̂_l−W_k} exp(Ξ_k t/(1+(δ_k−x_l)t))` with
//! `W_k = Σ_i f_i ∂δ_k/∂a_i − Σ_{s≤g} Σ_{i,j} b_i^s b_j^{s+g} ∂²δ_k/∂a_i∂a_j` and
//! `Ξ_k = Σ_{s≤g} (B_k^s − z_{s,l})(B_k^{s+g} − z_{s+g,l})`, `B_k^s = Σ_i b_i^s ∂δ_k/∂a_i`.

use std::sync::Arc;

use crate::exactalg::rational::{self, Rational};
use crate::exactalg::{Algebra, GeneratorSpec, GradedElement, Ring, TSeries, NO_CAP};
use crate::kunneth::log_chern_from_character;
use crate::relgen::{grr_character_in, BundleData};

use super::split::{open_split_ring, SplitHatRing};
use super::PairingError;

#[derive(Clone, Debug)]
struct Frac {
    num: GradedElement,
    e: u32,
    v: Arc<GradedElement>,
}

impl Frac {
    fn poly(num: GradedElement, v: &Arc<GradedElement>) -> Self {
        Frac { num, e: 0, v: v.clone() }
    }

    fn raised(&self, e: u32) -> GradedElement {
        let mut n = self.num.clone();
        for _ in self.e..e {
            n = &n * &self.v;
        }
        n
    }

    /// `∂/∂δ` for the generator index `i`.
    fn derivative(&self, i: usize) -> Self {
        let dn = self.num.derivative(i).expect("even generator");
        let dv = self.v.derivative(i).expect("even generator");
        let num = &dn * &self.v - (&self.num * &dv).scale(&rational::int(self.e as i64));
        Frac { num, e: self.e + 1, v: self.v.clone() }
    }
}

impl PartialEq for Frac {
    fn eq(&self, other: &Self) -> bool {
        let e = self.e.max(other.e);
        self.raised(e) == other.raised(e)
    }
}

impl Algebra for Frac {
    fn zero_like(&self) -> Self {
        Frac::poly(GradedElement::zero(self.num.ring()), &self.v)
    }
    fn one_like(&self) -> Self {
        Frac::poly(GradedElement::one(self.num.ring()), &self.v)
    }
    fn is_zero(&self) -> bool {
        self.num.is_empty()
    }
    fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let e = self.e.max(other.e);
        Frac { num: self.raised(e) + other.raised(e), e, v: self.v.clone() }
    }
    fn mul(&self, other: &Self) -> Self {
        Frac { num: &self.num * &other.num, e: self.e + other.e, v: self.v.clone() }
    }
    fn scale(&self, q: &Rational) -> Self {
        Frac { num: self.num.scale(q), e: self.e, v: self.v.clone() }
    }
}

struct Roots {
    ring: Arc<Ring>,
    n: usize,
    delta: Vec<usize>,
    v: Arc<GradedElement>,
}

impl Roots {
    fn d(&self, k: usize) -> GradedElement {
        GradedElement::gen_index(&self.ring, self.delta[k])
    }

    fn vandermonde_without(&self, skip: Option<usize>) -> GradedElement {
        let mut p = GradedElement::one(&self.ring);
        for i in 0..self.n {
            for j in i + 1..self.n {
                if Some(i) != skip && Some(j) != skip {
                    p = p * (self.d(i) - self.d(j));
                }
            }
        }
        p
    }

    /// `∂δ_k/∂a_i = (−1)^{i−1} δ_k^{n−i} / ∏_{j≠k} (δ_k − δ_j)`, both 0-based.
    fn first(&self, k: usize, i: usize) -> Frac {
        let sign = if (i + k).is_multiple_of(2) { 1 } else { -1 };
        let num = self.d(k).pow((self.n - 1 - i) as u32) * self.vandermonde_without(Some(k)).scale(&rational::int(sign));
        Frac { num, e: 1, v: self.v.clone() }
    }

    fn second(&self, k: usize, i: usize, j: usize) -> Frac {
        let first = self.first(k, i);
        (0..self.n).fold(Frac::poly(GradedElement::zero(&self.ring), &self.v), |acc, m| {
            acc.add(&first.derivative(self.delta[m]).mul(&self.first(m, j)))
        })
    }

    /// `N / V^e` as a polynomial, dividing out each `δ_i − δ_j` in turn.
    fn clear(&self, x: &Frac) -> Result<GradedElement, PairingError> {
        let mut num = x.num.clone();
        for _ in 0..x.e {
            for i in 0..self.n {
                for j in i + 1..self.n {
                    num = divide_linear(&num, self.delta[i], &self.d(j))?;
                }
            }
        }
        Ok(num)
    }
}

/// Exact quotient of `num` by `(gen_i − c)` with `c` free of `gen_i`.
fn divide_linear(num: &GradedElement, i: usize, c: &GradedElement) -> Result<GradedElement, PairingError> {
    let ring = num.ring();
    let coeffs = num.powers_of(i);
    let Some(&top) = coeffs.keys().next_back() else {
        return Ok(num.clone());
    };
    let zero = GradedElement::zero(ring);
    let get = |p: u32| coeffs.get(&p).cloned().unwrap_or_else(|| zero.clone());
    let x = GradedElement::gen_index(ring, i);
    let mut q = vec![zero.clone(); top as usize];
    let mut carry = zero.clone();
    for p in (1..=top).rev() {
        carry = get(p) + c * &carry;
        q[p as usize - 1] = carry.clone();
    }
    let remainder = get(0) + c * &carry;
    if !remainder.is_empty() {
        return Err(PairingError::DenominatorNotCleared);
    }
    Ok(q.into_iter().enumerate().fold(zero, |acc, (p, qp)| acc + qp * x.pow(p as u32)))
}

/// Ring of Chern roots `dl{k}`, the main `b`/`f` generators and the split blocks.
fn roots_ring(main: &BundleData, split: &SplitHatRing) -> Result<Roots, PairingError> {
    let n = main.n as usize;
    let mut gens: Vec<GeneratorSpec> = (1..=n).map(|k| GeneratorSpec::new(format!("dl{k}"), 2)).collect();
    gens.extend(split.generators());
    gens.extend(main.generators().into_iter().filter(|s| !s.name.starts_with(&format!("{}a", main.prefix))));
    let ring = Ring::new(gens, NO_CAP)?;
    let delta = (0..n).collect();
    let mut r = Roots { ring, n, delta, v: Arc::new(GradedElement::zero(&Ring::new(vec![], NO_CAP)?)) };
    r.v = Arc::new(r.vandermonde_without(None));
    Ok(r)
}

/// Closed-form `log ∏_k (line factor)` for block `l`, cleared, in the roots ring.
pub fn closed_form_log(main: &BundleData, split: &SplitHatRing, l: usize, t_cap: usize) -> Result<TSeries<GradedElement>, PairingError> {
    let roots = roots_ring(main, split)?;
    closed_form_in(&roots, main, split, l, t_cap)
}

fn closed_form_in(roots: &Roots, main: &BundleData, split: &SplitHatRing, l: usize, t_cap: usize) -> Result<TSeries<GradedElement>, PairingError> {
    let ring = &roots.ring;
    let (n, g) = (roots.n, main.g);
    let gen = |name: String| GradedElement::gen(ring, &name);
    let poly = |x: GradedElement| Frac::poly(x, &roots.v);
    let x_l = gen(SplitHatRing::x_name(l))?;
    let mut total = TSeries::constant(poly(GradedElement::zero(ring)), t_cap);
    for k in 0..n {
        let first: Vec<Frac> = (0..n).map(|i| roots.first(k, i)).collect();
        let mut w = poly(GradedElement::zero(ring));
        for (i, fi) in first.iter().enumerate() {
            let f = if i == 0 { GradedElement::int(ring, main.d) } else { gen(main.f_name(i as i64 + 1))? };
            w = w.add(&poly(f).mul(fi));
        }
        for s in 1..=g {
            for i in 0..n {
                for j in 0..n {
                    let bb = gen(main.b_name(i as i64 + 1, s))? * gen(main.b_name(j as i64 + 1, s + g))?;
                    w = w.sub(&poly(bb).mul(&roots.second(k, i, j)));
                }
            }
        }
        let b_comb = |s: i64| -> Result<Frac, PairingError> {
            let mut acc = poly(GradedElement::zero(ring));
            for (i, fi) in first.iter().enumerate() {
                acc = acc.add(&poly(gen(main.b_name(i as i64 + 1, s))?).mul(fi));
            }
            Ok(acc.sub(&poly(gen(SplitHatRing::z_name(s, l))?)))
        };
        let mut xi = poly(GradedElement::zero(ring));
        for s in 1..=g {
            xi = xi.add(&b_comb(s)?.mul(&b_comb(s + g)?));
        }
        let u = roots.d(k) - x_l.clone();
        // log(1+ut) and t/(1+ut) as series with polynomial coefficients.
        let mut log1 = vec![poly(GradedElement::zero(ring))];
        let mut geo = vec![poly(GradedElement::zero(ring))];
        for m in 1..=t_cap {
            let sign = if m % 2 == 1 { 1 } else { -1 };
            log1.push(poly(u.pow(m as u32).scale(&rational::frac(sign, m as i64))));
            geo.push(poly(u.pow(m as u32 - 1).scale(&rational::int(-sign))));
        }
        let log1 = TSeries::new(log1, t_cap);
        let geo = TSeries::new(geo, t_cap).neg();
        let base = rational::int(g - 1 + split.degrees()[l - 1]);
        let exponent = poly(GradedElement::one(ring)).scale(&base).sub(&w);
        total = total.add(&log1.scale_by(&exponent)).add(&geo.scale_by(&xi));
    }
    total.try_map(|c| roots.clear(c))
}

/// Compares the closed form with the rank-one GRR logarithm for every block,
/// after sending `a_r ↦ σ_r(δ)`.
pub fn closed_form_check(main: &BundleData, split: &SplitHatRing, t_cap: usize) -> Result<bool, PairingError> {
    let roots = roots_ring(main, split)?;
    let norm_ring = open_split_ring(main, split)?;
    let images = norm_ring
        .gens()
        .iter()
        .map(|spec| match (1..=main.n).find(|&r| main.a_name(r) == spec.name) {
            Some(r) => Ok(elementary(&roots, r as usize)),
            None => GradedElement::gen(&roots.ring, &spec.name),
        })
        .collect::<Result<Vec<_>, _>>()?;
    for l in 1..=split.nh() {
        let ch = grr_character_in(&norm_ring, main, &split.line(l)?, 0, t_cap)?;
        let normative = log_chern_from_character(&ch, t_cap).try_map(|c| c.substitute(&roots.ring, &images))?;
        if normative != closed_form_in(&roots, main, split, l, t_cap)? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn elementary(roots: &Roots, r: usize) -> GradedElement {
    elementary_excluding(roots, r, None)
}

fn elementary_excluding(roots: &Roots, r: usize, skip: Option<usize>) -> GradedElement {
    let vars: Vec<usize> = (0..roots.n).filter(|&k| Some(k) != skip).collect();
    let mut e = vec![GradedElement::zero(&roots.ring); r + 1];
    e[0] = GradedElement::one(&roots.ring);
    for &k in &vars {
        for m in (1..=r).rev() {
            e[m] = e[m].clone() + &e[m - 1] * &roots.d(k);
        }
    }
    e[r].clone()
}

/// `Σ_k ∂a_r/∂δ_k · ∂δ_k/∂a_i = [r = i]` for all `r, i ≤ n`.
pub fn dvandermonde_jacobian_check(n: usize) -> Result<bool, PairingError> {
    let main = BundleData::main(n as i64, 0, 2)?;
    let split = SplitHatRing::new(2, vec![0])?;
    let roots = roots_ring(&main, &split)?;
    for r in 1..=n {
        for i in 0..n {
            let mut acc = Frac::poly(GradedElement::zero(&roots.ring), &roots.v);
            for k in 0..n {
                let da = Frac::poly(elementary_excluding(&roots, r - 1, Some(k)), &roots.v);
                acc = acc.add(&da.mul(&roots.first(k, i)));
            }
            let want = if r == i + 1 { 1 } else { 0 };
            if roots.clear(&acc)? != GradedElement::int(&roots.ring, want) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
