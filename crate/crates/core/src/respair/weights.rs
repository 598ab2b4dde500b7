//! Weights on the maximal torus of SU(n̂): X coordinates, simple-root
//! coordinates `Y_l = X_l − X_{l+1}`, and the fundamental cell of the
//! integer lattice.

use num_traits::Zero;

use crate::exactalg::permutations;
use crate::exactalg::rational::{self, Rational};

use super::PairingError;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WeightVector {
    x: Vec<Rational>,
}

impl WeightVector {
    /// Coordinates must sum to zero.
    pub fn new(x: Vec<Rational>) -> Result<Self, PairingError> {
        if x.is_empty() {
            return Err(PairingError::Invalid("empty weight".into()));
        }
        if !x.iter().fold(Rational::zero(), |a, b| a + b).is_zero() {
            return Err(PairingError::Invalid("weight coordinates must sum to zero".into()));
        }
        Ok(WeightVector { x })
    }

    pub fn x(&self) -> &[Rational] {
        &self.x
    }

    pub fn y(&self) -> Vec<Rational> {
        self.x.windows(2).map(|w| &w[0] - &w[1]).collect()
    }

    /// Coroot coordinates `s_a = X_1 + … + X_a`, so that `γ = Σ s_a ê_a`.
    pub fn coroot(&self) -> Vec<Rational> {
        let mut acc = Rational::zero();
        self.x[..self.x.len() - 1]
            .iter()
            .map(|v| {
                acc += v;
                acc.clone()
            })
            .collect()
    }

    fn from_coroot(s: &[Rational]) -> Self {
        let n = s.len() + 1;
        let z = Rational::zero();
        let at = |a: usize| if a == 0 || a == n { z.clone() } else { s[a - 1].clone() };
        WeightVector { x: (1..=n).map(|l| at(l) - at(l - 1)).collect() }
    }

    /// Permutes coordinates: entry `i` of the result is `x[perm[i]]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        WeightVector { x: perm.iter().map(|&i| self.x[i].clone()).collect() }
    }
}

/// The lattice translate of `γ` whose coroot coordinates lie in `[0, 1)`.
pub fn fundamental_domain(gamma: &WeightVector) -> WeightVector {
    let s: Vec<Rational> = gamma.coroot().iter().map(rational::fract).collect();
    WeightVector::from_coroot(&s)
}

/// `ĉ = [[(d̂/n̂, …, d̂/n̂, d̂/n̂ − d̂)]]`.
pub fn c_hat(nh: usize, dh: i64) -> WeightVector {
    let q = rational::frac(dh, nh as i64);
    let mut x = vec![q.clone(); nh];
    x[nh - 1] = q - rational::int(dh);
    fundamental_domain(&WeightVector { x })
}

/// The Weyl group of SU(n̂−1) acting on the first n̂−1 coordinates.
pub fn weyl_group(nh: usize) -> Vec<Vec<usize>> {
    permutations(nh.saturating_sub(1))
        .into_iter()
        .map(|(mut p, _)| {
            p.push(nh - 1);
            p
        })
        .collect()
}

/// Line degrees `d̂/n̂ − γ_l`; integral whenever `γ − ĉ` is a lattice vector.
pub fn split_degrees(nh: usize, dh: i64, gamma: &WeightVector) -> Result<Vec<i64>, PairingError> {
    let q = rational::frac(dh, nh as i64);
    gamma
        .x()
        .iter()
        .map(|gl| {
            let v = &q - gl;
            rational::to_i64(&v).ok_or_else(|| PairingError::Invalid(format!("non-integral line degree {}", rational::to_string(&v))))
        })
        .collect()
}

/// `X_l` on the SU(n̂) torus as a linear form in `Y_1..Y_{n̂−1}`.
pub fn torus_coordinates(nh: usize) -> Vec<Vec<Rational>> {
    let m = nh - 1;
    let mut first = vec![Rational::zero(); m];
    for (l, c) in first.iter_mut().enumerate() {
        *c = rational::frac((nh - 1 - l) as i64, nh as i64);
    }
    let mut out = vec![first];
    for l in 0..m {
        let mut next = out[l].clone();
        next[l] -= rational::int(1);
        out.push(next);
    }
    out
}

/// Positive roots `X_i − X_j = Y_i + … + Y_{j−1}` for `i < j`, as forms in Y.
pub fn positive_roots(nh: usize) -> Vec<Vec<Rational>> {
    let m = nh - 1;
    let mut out = Vec::new();
    for i in 0..nh {
        for j in i + 1..nh {
            out.push((0..m).map(|a| if a >= i && a < j { rational::int(1) } else { Rational::zero() }).collect());
        }
    }
    out
}
