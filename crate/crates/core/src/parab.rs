//! Parabolic bookkeeping at a single marked point: degrees and slopes, the
//! good-data search, parabolic ranks and relation windows, and the weight
//! count that compares torus-level and full relation bounds.

use std::ops::RangeInclusive;

use num_integer::Integer;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::exactalg::rational::{self, Rational};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParabolicError {
    #[error("invalid parabolic data: {0}")]
    Invalid(String),
    #[error("sub-data slope {slope} outside the window ({lo}, {hi})")]
    OutsideWindow { slope: String, lo: String, hi: String },
}

/// Rank `n`, degree `d`, weights `0 ≤ α_1 < … < α_m < 1` with multiplicities `j_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct ParabolicData {
    pub n: i64,
    pub d: i64,
    pub weights: Vec<Rational>,
    pub mults: Vec<i64>,
}

impl ParabolicData {
    pub fn new(n: i64, d: i64, weights: Vec<Rational>, mults: Vec<i64>) -> Result<Self, ParabolicError> {
        if n < 1 {
            return Err(ParabolicError::Invalid(format!("rank must be positive, got {n}")));
        }
        if weights.is_empty() || weights.len() != mults.len() {
            return Err(ParabolicError::Invalid("need as many multiplicities as weights, at least one".into()));
        }
        if weights[0].is_negative() || weights[weights.len() - 1] >= rational::int(1) {
            return Err(ParabolicError::Invalid("weights must lie in [0, 1)".into()));
        }
        if weights.windows(2).any(|w| w[0] >= w[1]) {
            return Err(ParabolicError::Invalid("weights must be strictly increasing".into()));
        }
        if mults.iter().any(|&j| j < 1) || mults.iter().sum::<i64>() != n {
            return Err(ParabolicError::Invalid(format!("multiplicities must be positive and sum to {n}")));
        }
        Ok(ParabolicData { n, d, weights, mults })
    }

    /// Ordinary bundles: one weight 0 with multiplicity `n`.
    pub fn trivial(n: i64, d: i64) -> Result<Self, ParabolicError> {
        Self::new(n, d, vec![Rational::zero()], vec![n])
    }

    pub fn m(&self) -> usize {
        self.weights.len()
    }

    fn weighted(&self, j: &[i64]) -> Rational {
        self.weights.iter().zip(j).map(|(a, &k)| a * rational::int(k)).sum()
    }

    pub fn par_degree(&self) -> Rational {
        rational::int(self.d) + self.weighted(&self.mults)
    }

    pub fn par_slope(&self) -> Rational {
        self.par_degree() / rational::int(self.n)
    }

    /// Same ranks and multiplicities, weights replaced.
    pub fn with_weights(&self, weights: Vec<Rational>) -> Result<Self, ParabolicError> {
        Self::new(self.n, self.d, weights, self.mults.clone())
    }
}

/// `(pardeg, parμ)`.
pub fn par_degree_slope(pd: &ParabolicData) -> (Rational, Rational) {
    (pd.par_degree(), pd.par_slope())
}

/// Sub-data `(n̂, d̂, ĵ)` relative to some ambient multiplicities.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubParabolicData {
    pub nh: i64,
    pub dh: i64,
    pub jh: Vec<i64>,
}

impl SubParabolicData {
    pub fn new(nh: i64, dh: i64, jh: Vec<i64>) -> Self {
        SubParabolicData { nh, dh, jh }
    }

    /// Checks `0 < n̂ < n`, `0 ≤ ĵ_k ≤ j_k`, `Σ ĵ_k = n̂` against `(n, j)`.
    pub fn validate(&self, n: i64, mults: &[i64]) -> Result<(), ParabolicError> {
        if self.jh.len() != mults.len() {
            return Err(ParabolicError::Invalid("ĵ has the wrong length".into()));
        }
        if !(0 < self.nh && self.nh < n) {
            return Err(ParabolicError::Invalid(format!("need 0 < n̂ < {n}, got {}", self.nh)));
        }
        if self.jh.iter().zip(mults).any(|(&a, &b)| a < 0 || a > b) || self.jh.iter().sum::<i64>() != self.nh {
            return Err(ParabolicError::Invalid(format!("ĵ = {:?} incompatible with j = {:?}, n̂ = {}", self.jh, mults, self.nh)));
        }
        Ok(())
    }

    pub fn par_slope(&self, weights: &[Rational]) -> Rational {
        let w: Rational = weights.iter().zip(&self.jh).map(|(a, &k)| a * rational::int(k)).sum();
        (rational::int(self.dh) + w) / rational::int(self.nh)
    }
}

/// All `k` with `0 ≤ k_ℓ ≤ bound_ℓ` and `Σ k_ℓ = total`.
fn bounded_compositions(bound: &[i64], total: i64) -> Vec<Vec<i64>> {
    fn go(bound: &[i64], total: i64, prefix: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if bound.is_empty() {
            if total == 0 {
                out.push(prefix.clone());
            }
            return;
        }
        let rest: i64 = bound[1..].iter().sum();
        for k in (total - rest).max(0)..=bound[0].min(total) {
            prefix.push(k);
            go(&bound[1..], total - k, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(bound, total, &mut Vec::new(), &mut out);
    out
}

/// An equal-slope condition `c_0 + Σ α_ℓ c_ℓ ∈ Z`.
struct Equality {
    value: Rational,
    sensitivity: Rational,
}

impl Equality {
    fn new(pd: &ParabolicData, n_outer: i64, d_outer: i64, j_outer: &[i64], n_inner: i64, j_inner: &[i64]) -> Self {
        let ratio = rational::frac(n_inner, n_outer);
        let coeffs: Vec<Rational> = j_outer.iter().zip(j_inner).map(|(&a, &b)| &ratio * rational::int(a) - rational::int(b)).collect();
        let value = &ratio * rational::int(d_outer) + pd.weights.iter().zip(&coeffs).map(|(a, c)| a * c).sum::<Rational>();
        let sensitivity = coeffs.iter().map(|c| c.abs()).sum();
        Equality { value, sensitivity }
    }

    fn holds(&self) -> bool {
        self.value.is_integer()
    }

    /// Sup-norm weight perturbation needed to make a failed equality hold.
    fn slack(&self) -> Option<Rational> {
        if self.holds() || self.sensitivity.is_zero() {
            return None;
        }
        let f = rational::fract(&self.value);
        let dist = f.clone().min(rational::int(1) - f);
        Some(dist / &self.sensitivity)
    }
}

/// Equal-slope sub-data found by the search.
#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    /// Sub-data in the slope window, or `None` for the top-level data itself.
    pub outer: Option<SubParabolicData>,
    pub inner: SubParabolicData,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GoodDataReport {
    pub witnesses: Vec<Witness>,
    /// Number of windowed sub-data examined.
    pub checked: usize,
    /// Weight perturbations below this (sup norm) cannot create a new equality.
    pub margin: Option<Rational>,
}

impl GoodDataReport {
    pub fn is_good(&self) -> bool {
        self.witnesses.is_empty()
    }

    /// True when the top-level data has no equal-slope sub-data.
    pub fn semistable_is_stable(&self) -> bool {
        self.witnesses.iter().all(|w| w.outer.is_some())
    }
}

/// Integers `d̂` with `μ < (d̂ + Σ α_ℓ ĵ_ℓ)/n̂ < μ + 1`.
fn window_degrees(pd: &ParabolicData, nh: i64, jh: &[i64]) -> RangeInclusive<i64> {
    let mu = pd.par_slope();
    let w = pd.weighted(jh);
    let lo = &mu * rational::int(nh) - &w;
    let hi = &lo + rational::int(nh);
    let first = rational::floor(&lo) + 1;
    let hi_floor = rational::floor(&hi);
    let last = if hi.is_integer() { hi_floor - 1 } else { hi_floor };
    let to = |b: num_bigint::BigInt| i64::try_from(b).expect("degree fits in i64");
    to(first)..=to(last)
}

/// Searches for equal-slope sub-data, at the top level and inside every
/// windowed `(n̂, d̂, ĵ)`. Only one `d̂` per residue mod `n̂` is examined for
/// the inner search, since stability is unchanged by twisting.
pub fn good_data_check(pd: &ParabolicData) -> GoodDataReport {
    let mut witnesses = Vec::new();
    let mut margin: Option<Rational> = None;
    let mut note = |e: &Equality| {
        if let Some(s) = e.slack() {
            margin = Some(match margin.take() {
                Some(m) => m.min(s),
                None => s,
            });
        }
    };
    let mut checked = 0;
    for nh in 1..pd.n {
        for jh in bounded_compositions(&pd.mults, nh) {
            let top = Equality::new(pd, pd.n, pd.d, &pd.mults, nh, &jh);
            note(&top);
            if top.holds() {
                let dh = i64::try_from(top.value.to_integer()).expect("degree fits in i64");
                witnesses.push(Witness { outer: None, inner: SubParabolicData::new(nh, dh, jh.clone()) });
            }
            let mut residues_seen = vec![false; nh as usize];
            for dh in window_degrees(pd, nh, &jh) {
                let r = dh.mod_floor(&nh) as usize;
                if std::mem::replace(&mut residues_seen[r], true) {
                    continue;
                }
                checked += 1;
                let outer = SubParabolicData::new(nh, dh, jh.clone());
                for n1 in 1..nh {
                    for k in bounded_compositions(&jh, n1) {
                        let e = Equality::new(pd, nh, dh, &jh, n1, &k);
                        note(&e);
                        if e.holds() {
                            let d1 = i64::try_from(e.value.to_integer()).expect("degree fits in i64");
                            witnesses.push(Witness { outer: Some(outer.clone()), inner: SubParabolicData::new(n1, d1, k) });
                        }
                    }
                }
            }
        }
    }
    GoodDataReport { witnesses, checked, margin }
}

/// `Σ_{ℓ=2}^m (j_1+⋯+j_{ℓ−1}) ĵ_ℓ`, the flag correction to the rank.
pub fn flag_correction(mults: &[i64], jh: &[i64]) -> i64 {
    let mut prefix = 0;
    let mut total = 0;
    for (j, k) in mults.iter().zip(jh) {
        total += prefix * k;
        prefix += j;
    }
    total
}

/// Rank of `−π_!(ParHom(V̂, V))`: `nn̂(g−1) + d̂n − dn̂ + Σ_ℓ (j_1+⋯+j_{ℓ−1}) ĵ_ℓ`.
pub fn par_rank_formula(pd: &ParabolicData, sub: &SubParabolicData, g: i64) -> i64 {
    pd.n * sub.nh * (g - 1) + sub.dh * pd.n - pd.d * sub.nh + flag_correction(&pd.mults, &sub.jh)
}

/// The open slope window `(μ, μ + 1)` for sub-data.
pub fn check_slope_window(pd: &ParabolicData, sub: &SubParabolicData) -> Result<(), ParabolicError> {
    sub.validate(pd.n, &pd.mults)?;
    let mu = pd.par_slope();
    let s = sub.par_slope(&pd.weights);
    let hi = &mu + rational::int(1);
    if s > mu && s < hi {
        Ok(())
    } else {
        Err(ParabolicError::OutsideWindow { slope: rational::to_string(&s), lo: rational::to_string(&mu), hi: rational::to_string(&hi) })
    }
}

/// Degrees `r` of the relation classes: `rank < r < rank + 2nn̂`.
pub fn par_relation_window(pd: &ParabolicData, sub: &SubParabolicData, g: i64) -> Result<RangeInclusive<i64>, ParabolicError> {
    check_slope_window(pd, sub)?;
    let rank = par_rank_formula(pd, sub, g);
    Ok(rank + 1..=rank + 2 * pd.n * sub.nh - 1)
}

/// `ĵ_k = |J ∩ block_k|` for a 1-based subset `J` of `{1..n}`.
pub fn block_counts(subset: &[i64], mults: &[i64]) -> Vec<i64> {
    let mut out = vec![0; mults.len()];
    let mut start = 0;
    for (k, &j) in mults.iter().enumerate() {
        out[k] = subset.iter().filter(|&&x| x > start && x <= start + j).count() as i64;
        start += j;
    }
    out
}

/// Degree of the Chern polynomial of the flag skyscraper term:
/// `Σ_{ℓ=2}^n |J ∩ {ℓ..n}| − Σ_{k=2}^m (j_1+⋯+j_{k−1}) ĵ_k`.
pub fn weight_degree_count(subset: &[i64], mults: &[i64], jh: &[i64]) -> Result<i64, ParabolicError> {
    let n: i64 = mults.iter().sum();
    let mut sorted = subset.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != subset.len() || sorted.iter().any(|&x| x < 1 || x > n) {
        return Err(ParabolicError::Invalid(format!("J = {subset:?} is not a subset of 1..={n}")));
    }
    if block_counts(subset, mults) != jh {
        return Err(ParabolicError::Invalid(format!("ĵ = {jh:?} does not match J = {subset:?}")));
    }
    let tails: i64 = (2..=n).map(|l| subset.iter().filter(|&&x| x >= l).count() as i64).sum();
    Ok(tails - flag_correction(mults, jh))
}
