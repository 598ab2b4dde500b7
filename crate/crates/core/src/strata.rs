//! Harder–Narasimhan types: enumeration by codimension, the partial and total
//! orders, and the associated polygons.

use std::cmp::Ordering;

use num_integer::Integer;
use thiserror::Error;

use crate::exactalg::rational::{self, Rational};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StrataError {
    #[error("invalid type: {0}")]
    InvalidType(String),
    #[error("types have different (n, d) context")]
    ContextMismatch,
    #[error("coarse type needs 0 < n_1 < n, got n_1 = {n1}, n = {n}")]
    CoarseRank { n1: i64, n: i64 },
}

/// A type `((n_1,d_1),…,(n_s,d_s))` with strictly decreasing slopes.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HNType {
    blocks: Vec<(i64, i64)>,
}

impl HNType {
    pub fn new(blocks: Vec<(i64, i64)>) -> Result<Self, StrataError> {
        if blocks.is_empty() {
            return Err(StrataError::InvalidType("no blocks".into()));
        }
        if blocks.iter().any(|&(n, _)| n <= 0) {
            return Err(StrataError::InvalidType("ranks must be positive".into()));
        }
        for w in blocks.windows(2) {
            // d_i/n_i > d_{i+1}/n_{i+1}
            if w[0].1 * w[1].0 <= w[1].1 * w[0].0 {
                return Err(StrataError::InvalidType(format!("slopes not strictly decreasing at {:?}", w)));
            }
        }
        Ok(HNType { blocks })
    }

    pub fn semistable(n: i64, d: i64) -> Self {
        HNType { blocks: vec![(n, d)] }
    }

    pub fn blocks(&self) -> &[(i64, i64)] {
        &self.blocks
    }

    pub fn rank(&self) -> i64 {
        self.blocks.iter().map(|b| b.0).sum()
    }

    pub fn degree(&self) -> i64 {
        self.blocks.iter().map(|b| b.1).sum()
    }

    pub fn is_semistable(&self) -> bool {
        self.blocks.len() == 1
    }

    /// Length-n vector repeating each block slope n_i times.
    pub fn slope_vector(&self) -> Vec<Rational> {
        self.blocks
            .iter()
            .flat_map(|&(n, d)| std::iter::repeat_n(rational::frac(d, n), n as usize))
            .collect()
    }
}

/// `d_μ = Σ_{i>j} (n_i d_j − n_j d_i + n_i n_j (g−1))`.
pub fn codim_mu(mu: &HNType, g: i64) -> i64 {
    let b = &mu.blocks;
    let mut s = 0;
    for i in 0..b.len() {
        for j in 0..i {
            let ((ni, di), (nj, dj)) = (b[i], b[j]);
            s += ni * dj - nj * di + ni * nj * (g - 1);
        }
    }
    s
}

/// `δ_{n_1,d_1} = n d_1 − n_1 d + n_1 (n − n_1)(g − 1)`.
pub fn coarse_codim(n: i64, d: i64, n1: i64, d1: i64, g: i64) -> Result<i64, StrataError> {
    if n1 <= 0 || n1 >= n {
        return Err(StrataError::CoarseRank { n1, n });
    }
    Ok(n * d1 - n1 * d + n1 * (n - n1) * (g - 1))
}

/// Sum of successive coarse codimensions along the filtration.
pub fn telescoped_codim(mu: &HNType, g: i64) -> i64 {
    let (mut n, mut d) = (mu.rank(), mu.degree());
    let mut total = 0;
    for &(ni, di) in &mu.blocks[..mu.blocks.len() - 1] {
        total += coarse_codim(n, d, ni, di, g).expect("proper block");
        n -= ni;
        d -= di;
    }
    total
}

/// All types for `(n, d)` with `d_μ ≤ codim_cap`, sorted by codimension then blocks.
pub fn enumerate_hn_types(n: i64, d: i64, g: i64, codim_cap: i64) -> Vec<HNType> {
    let mut out: Vec<HNType> =
        enumerate_below(n, d, g, codim_cap, None).into_iter().map(|blocks| HNType { blocks }).collect();
    out.sort_by_key(|t| (codim_mu(t, g), t.blocks.clone()));
    out
}

/// Types whose first slope is strictly below `bound` (when given).
fn enumerate_below(n: i64, d: i64, g: i64, cap: i64, bound: Option<(i64, i64)>) -> Vec<Vec<(i64, i64)>> {
    let below = |nn: i64, dd: i64| bound.is_none_or(|(bn, bd)| dd * bn < bd * nn);
    let mut out = Vec::new();
    if cap < 0 {
        return out;
    }
    if below(n, d) {
        out.push(vec![(n, d)]);
    }
    for n1 in 1..n {
        let lo = Integer::div_floor(&(n1 * d), &n) + 1;
        let hi = Integer::div_floor(&(cap + n1 * d - n1 * (n - n1) * (g - 1)), &n);
        for d1 in lo..=hi {
            if !below(n1, d1) {
                break;
            }
            let delta = n * d1 - n1 * d + n1 * (n - n1) * (g - 1);
            for tail in enumerate_below(n - n1, d - d1, g, cap - delta, Some((n1, d1))) {
                let mut blocks = vec![(n1, d1)];
                blocks.extend(tail);
                out.push(blocks);
            }
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TypeOrder {
    /// `Some(Less)` means μ ≤ ν and not equal; `None` means incomparable.
    pub partial: Option<Ordering>,
    /// Lexicographic order on slope vectors.
    pub total: Ordering,
}

impl TypeOrder {
    pub fn leq_partial(&self) -> Option<bool> {
        self.partial.map(|o| o != Ordering::Greater)
    }

    pub fn prec_total(&self) -> bool {
        self.total != Ordering::Greater
    }
}

/// μ ≤ ν iff every partial sum of μ's slope vector is at most ν's.
pub fn type_orders(mu: &HNType, nu: &HNType) -> Result<TypeOrder, StrataError> {
    if mu.rank() != nu.rank() || mu.degree() != nu.degree() {
        return Err(StrataError::ContextMismatch);
    }
    let (a, b) = (mu.slope_vector(), nu.slope_vector());
    let (mut sa, mut sb) = (Rational::from_integer(0.into()), Rational::from_integer(0.into()));
    let (mut le, mut ge) = (true, true);
    for i in 0..a.len() {
        sa += &a[i];
        sb += &b[i];
        le &= sa <= sb;
        ge &= sa >= sb;
    }
    let partial = match (le, ge) {
        (true, true) => Some(Ordering::Equal),
        (true, false) => Some(Ordering::Less),
        (false, true) => Some(Ordering::Greater),
        (false, false) => None,
    };
    Ok(TypeOrder { partial, total: a.cmp(&b) })
}

pub fn polygon(mu: &HNType) -> Vec<(i64, i64)> {
    let mut pts = vec![(0, 0)];
    let (mut x, mut y) = (0, 0);
    for &(n, d) in &mu.blocks {
        x += n;
        y += d;
        pts.push((x, y));
    }
    pts
}

/// Height of the polygon at integer abscissa `x`, as a rational.
pub fn polygon_height(mu: &HNType, x: i64) -> Rational {
    let pts = polygon(mu);
    for w in pts.windows(2) {
        let ((x0, y0), (x1, y1)) = (w[0], w[1]);
        if x >= x0 && x <= x1 {
            return rational::int(y0) + rational::frac((y1 - y0) * (x - x0), x1 - x0);
        }
    }
    rational::int(pts.last().unwrap().1)
}
