//! Poincaré series: the classifying space of the gauge group, the semistable
//! stratum via the Harder–Narasimhan recursion, the moduli space, the closed
//! formula as printed, and partial flag varieties.

use std::collections::HashMap;
use std::sync::Mutex;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::exactalg::rational::{self, Rational};
use crate::strata::{codim_mu, enumerate_hn_types};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BettiError {
    #[error("rank {n} and degree {d} are not coprime, so semistable and stable bundles differ")]
    NotCoprime { n: i64, d: i64 },
    #[error("t_cap {given} too small, need at least {required}")]
    CapTooSmall { given: usize, required: usize },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("closed formula has non-integral t-exponent {exponent} for composition {composition:?}")]
    NonIntegralExponent { composition: Vec<i64>, exponent: String },
    #[error("result is not a polynomial of degree {expected}")]
    NotPolynomial { expected: usize },
}

/// Integer power series truncated above `t^t_cap`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntSeries {
    coeffs: Vec<BigInt>,
}

impl IntSeries {
    pub fn zero(t_cap: usize) -> Self {
        IntSeries { coeffs: vec![BigInt::zero(); t_cap + 1] }
    }

    pub fn one(t_cap: usize) -> Self {
        Self::monomial(0, 1, t_cap)
    }

    pub fn monomial(k: usize, c: i64, t_cap: usize) -> Self {
        let mut s = Self::zero(t_cap);
        if k <= t_cap {
            s.coeffs[k] = BigInt::from(c);
        }
        s
    }

    pub fn from_coeffs(mut v: Vec<BigInt>, t_cap: usize) -> Self {
        v.resize(t_cap + 1, BigInt::zero());
        v.truncate(t_cap + 1);
        IntSeries { coeffs: v }
    }

    pub fn from_i64(v: &[i64], t_cap: usize) -> Self {
        Self::from_coeffs(v.iter().map(|&c| BigInt::from(c)).collect(), t_cap)
    }

    pub fn t_cap(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> BigInt {
        self.coeffs.get(k).cloned().unwrap_or_default()
    }

    pub fn add(&self, o: &Self) -> Self {
        let cap = self.t_cap().min(o.t_cap());
        Self::from_coeffs((0..=cap).map(|k| &self.coeffs[k] + &o.coeffs[k]).collect(), cap)
    }

    pub fn sub(&self, o: &Self) -> Self {
        let cap = self.t_cap().min(o.t_cap());
        Self::from_coeffs((0..=cap).map(|k| &self.coeffs[k] - &o.coeffs[k]).collect(), cap)
    }

    pub fn mul(&self, o: &Self) -> Self {
        let cap = self.t_cap().min(o.t_cap());
        let mut v = vec![BigInt::zero(); cap + 1];
        for i in 0..=cap {
            if self.coeffs[i].is_zero() {
                continue;
            }
            for j in 0..=cap - i {
                v[i + j] += &self.coeffs[i] * &o.coeffs[j];
            }
        }
        IntSeries { coeffs: v }
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::one(self.t_cap()), |acc, _| acc.mul(self))
    }

    pub fn shift(&self, k: usize) -> Self {
        let mut v = vec![BigInt::zero(); k];
        v.extend(self.coeffs.iter().cloned());
        Self::from_coeffs(v, self.t_cap())
    }

    /// `1 + c t^k`.
    pub fn binomial(k: usize, c: i64, t_cap: usize) -> Self {
        Self::one(t_cap).add(&Self::monomial(k, c, t_cap))
    }

    /// `1 / (1 − t^k)` for `k ≥ 1`.
    pub fn geometric(k: usize, t_cap: usize) -> Self {
        let mut s = Self::zero(t_cap);
        for i in (0..=t_cap).step_by(k) {
            s.coeffs[i] = BigInt::one();
        }
        s
    }

    /// Highest index with a nonzero coefficient.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| !c.is_zero())
    }

    pub fn is_palindromic(&self) -> bool {
        match self.degree() {
            None => true,
            Some(d) => (0..=d).all(|k| self.coeffs[k] == self.coeffs[d - k]),
        }
    }

    pub fn is_nonnegative(&self) -> bool {
        self.coeffs.iter().all(|c| *c >= BigInt::zero())
    }
}

/// Real dimension `2(n²(g−1)+1)` of the moduli space.
pub fn moduli_dimension(n: i64, g: i64) -> i64 {
    2 * (n * n * (g - 1) + 1)
}

fn check_ng(n: i64, g: i64) -> Result<(), BettiError> {
    if n < 1 || g < 2 {
        return Err(BettiError::Invalid(format!("need n ≥ 1 and g ≥ 2, got n = {n}, g = {g}")));
    }
    Ok(())
}

/// Series of the free algebra on a_r (deg 2r), b_r^j (deg 2r−1), f_r (deg 2r−2, r ≥ 2).
pub fn p_gauge(n: i64, g: i64, t_cap: usize) -> Result<IntSeries, BettiError> {
    check_ng(n, g)?;
    let mut s = IntSeries::one(t_cap);
    for k in 1..=n as usize {
        s = s.mul(&IntSeries::binomial(2 * k - 1, 1, t_cap).pow(2 * g as u32));
        s = s.mul(&IntSeries::geometric(2 * k, t_cap));
        if k >= 2 {
            s = s.mul(&IntSeries::geometric(2 * k - 2, t_cap));
        }
    }
    Ok(s)
}

/// Memoizing evaluator for the semistable series, keyed by `(n, d mod n)`.
/// The table sits behind a mutex so one engine can be shared between threads.
#[derive(Default)]
pub struct BettiEngine {
    memo: Mutex<HashMap<(i64, i64, i64, usize), IntSeries>>,
}

impl BettiEngine {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn p_semistable(&self, n: i64, d: i64, g: i64, t_cap: usize) -> Result<IntSeries, BettiError> {
        check_ng(n, g)?;
        let key = (n, d.mod_floor(&n), g, t_cap);
        if let Some(s) = self.memo.lock().expect("memo poisoned").get(&key) {
            return Ok(s.clone());
        }
        let mut s = p_gauge(n, g, t_cap)?;
        for mu in enumerate_hn_types(n, d, g, (t_cap / 2) as i64) {
            if mu.is_semistable() {
                continue;
            }
            let mut term = IntSeries::one(t_cap).shift(2 * codim_mu(&mu, g) as usize);
            for &(nj, dj) in mu.blocks() {
                term = term.mul(&self.p_semistable(nj, dj, g, t_cap)?);
            }
            s = s.sub(&term);
        }
        self.memo.lock().expect("memo poisoned").insert(key, s.clone());
        Ok(s)
    }
}

pub fn p_semistable(n: i64, d: i64, g: i64, t_cap: usize) -> Result<IntSeries, BettiError> {
    BettiEngine::new().p_semistable(n, d, g, t_cap)
}

pub fn p_moduli(n: i64, d: i64, g: i64, t_cap: usize) -> Result<IntSeries, BettiError> {
    check_ng(n, g)?;
    if n.gcd(&d) != 1 {
        return Err(BettiError::NotCoprime { n, d });
    }
    let dim = moduli_dimension(n, g) as usize;
    if t_cap < dim {
        return Err(BettiError::CapTooSmall { given: t_cap, required: dim });
    }
    let s = p_semistable(n, d, g, t_cap)?.mul(&IntSeries::binomial(2, -1, t_cap));
    if s.degree() != Some(dim) {
        return Err(BettiError::NotPolynomial { expected: dim });
    }
    Ok(s)
}

/// All compositions of `n` into positive parts.
pub fn compositions(n: i64) -> Vec<Vec<i64>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for first in 1..=n {
        for mut rest in compositions(n - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// The closed formula read as printed: each of the `l−1` trailing factors
/// carries `t^{E_j}` with `E_j = 2(g−1) Σ_{i<k} n_i n_k + Σ_{i<l} (n_i + n_{i+1}) ⟨−(n_1+…+n_j) d/n⟩`.
pub fn p_closed(n: i64, d: i64, g: i64, t_cap: usize) -> Result<IntSeries, BettiError> {
    check_ng(n, g)?;
    if n.gcd(&d) != 1 {
        return Err(BettiError::NotCoprime { n, d });
    }
    let mut total = IntSeries::zero(t_cap);
    for comp in compositions(n) {
        let l = comp.len();
        let sign = if l % 2 == 1 { 1 } else { -1 };
        let mut term = IntSeries::binomial(1, 1, t_cap).pow((2 * g as usize * l) as u32);
        for _ in 0..l - 1 {
            term = term.mul(&IntSeries::geometric(2, t_cap));
        }
        for &nj in &comp {
            for i in 1..nj as usize {
                term = term
                    .mul(&IntSeries::binomial(2 * i + 1, 1, t_cap).pow(2 * g as u32))
                    .mul(&IntSeries::geometric(2 * i, t_cap))
                    .mul(&IntSeries::geometric(2 * i + 2, t_cap));
            }
        }
        let pairs: i64 = (0..l).flat_map(|i| (i + 1..l).map(move |k| (i, k))).map(|(i, k)| comp[i] * comp[k]).sum();
        let adjacent: i64 = (0..l - 1).map(|i| comp[i] + comp[i + 1]).sum();
        let mut prefix = 0;
        for j in 0..l - 1 {
            prefix += comp[j];
            let frac = rational::fract(&rational::frac(-prefix * d, n));
            let e: Rational = rational::int(2 * pairs * (g - 1)) + rational::int(adjacent) * frac;
            let Some(e) = rational::to_i64(&e) else {
                return Err(BettiError::NonIntegralExponent { composition: comp.clone(), exponent: rational::to_string(&e) });
            };
            term = term.shift(e as usize).mul(&IntSeries::geometric(2 * (comp[j] + comp[j + 1]) as usize, t_cap));
        }
        total = if sign == 1 { total.add(&term) } else { total.sub(&term) };
    }
    Ok(total)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClosedComparison {
    pub agree: bool,
    /// `(k, closed coefficient, inductive coefficient)` at the first mismatch.
    pub first_difference: Option<(usize, BigInt, BigInt)>,
}

pub fn compare_closed(closed: &IntSeries, moduli: &IntSeries) -> ClosedComparison {
    let cap = closed.t_cap().min(moduli.t_cap());
    let first = (0..=cap).find(|&k| closed.coeff(k) != moduli.coeff(k));
    ClosedComparison {
        agree: first.is_none(),
        first_difference: first.map(|k| (k, closed.coeff(k), moduli.coeff(k))),
    }
}

/// Gaussian multinomial `∏_{i≤n} (1−t^{2i}) / ∏_k ∏_{i≤j_k} (1−t^{2i})`.
pub fn p_flag(mults: &[i64], t_cap: usize) -> Result<IntSeries, BettiError> {
    if mults.iter().any(|&j| j < 1) {
        return Err(BettiError::Invalid("multiplicities must be positive".into()));
    }
    let n: i64 = mults.iter().sum();
    let mut s = IntSeries::one(t_cap);
    for i in 1..=n as usize {
        s = s.mul(&IntSeries::binomial(2 * i, -1, t_cap));
    }
    for &j in mults {
        for i in 1..=j as usize {
            s = s.mul(&IntSeries::geometric(2 * i, t_cap));
        }
    }
    Ok(s)
}
