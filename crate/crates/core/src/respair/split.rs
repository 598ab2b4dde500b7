//! The hat bundle split into line bundles `L_1 ⊕ … ⊕ L_n̂` of degrees `d̂_l`.
//! Line `l` carries `hx{l}` (degree 2) and `hz{s}_{l}` (odd, degree 1).

use std::sync::Arc;

use crate::exactalg::rational;
use crate::exactalg::{GeneratorSpec, GradedElement, Ring, TSeries, NO_CAP};
use crate::kunneth::{character_to_chern, log_chern_from_character, SigmaClass};
use crate::relgen::{grr_character_in, BundleData};

use super::PairingError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitHatRing {
    g: i64,
    degrees: Vec<i64>,
}

impl SplitHatRing {
    pub fn new(g: i64, degrees: Vec<i64>) -> Result<Self, PairingError> {
        if degrees.is_empty() || g < 2 {
            return Err(PairingError::Invalid("need at least one block and g ≥ 2".into()));
        }
        Ok(SplitHatRing { g, degrees })
    }

    pub fn nh(&self) -> usize {
        self.degrees.len()
    }

    pub fn g(&self) -> i64 {
        self.g
    }

    pub fn degrees(&self) -> &[i64] {
        &self.degrees
    }

    pub fn total_degree(&self) -> i64 {
        self.degrees.iter().sum()
    }

    pub fn x_name(l: usize) -> String {
        format!("hx{l}")
    }

    pub fn z_name(s: i64, l: usize) -> String {
        format!("hz{s}_{l}")
    }

    pub fn generators(&self) -> Vec<GeneratorSpec> {
        let mut v = Vec::new();
        for l in 1..=self.nh() {
            v.push(GeneratorSpec::new(Self::x_name(l), 2));
            for s in 1..=2 * self.g {
                v.push(GeneratorSpec::new(Self::z_name(s, l), 1));
            }
        }
        v
    }

    /// Block `l` (1-based) as rank-one bundle data.
    pub fn line(&self, l: usize) -> Result<BundleData, PairingError> {
        Ok(BundleData::split_line(l, self.degrees[l - 1], self.g)?)
    }

    /// Same blocks with the degrees `d̂_p − 1`, `d̂_{p+1} + 1` (p is 1-based).
    pub fn shifted(&self, p: usize) -> Result<Self, PairingError> {
        if p == 0 || p >= self.nh() {
            return Err(PairingError::Invalid(format!("shift index {p} out of range")));
        }
        let mut d = self.degrees.clone();
        d[p - 1] -= 1;
        d[p] += 1;
        Self::new(self.g, d)
    }

    /// Blocks relabeled: new block `i` is old block `perm[i]` (0-based).
    pub fn permuted(&self, perm: &[usize]) -> Self {
        SplitHatRing { g: self.g, degrees: perm.iter().map(|&i| self.degrees[i]).collect() }
    }
}

/// Split generators followed by the main ones.
pub fn split_pair_ring(main: &BundleData, split: &SplitHatRing, cap: u32) -> Result<Arc<Ring>, PairingError> {
    if main.g != split.g {
        return Err(PairingError::Invalid("genus mismatch".into()));
    }
    let mut gens = split.generators();
    gens.extend(main.generators());
    Ok(Ring::new(gens, cap)?)
}

/// Images of `â_r`, `b̂_r^s`, `f̂_r` under the splitting, read off
/// `∏_l (1 + (x_l⊗1 + Σ_s z_{s,l}⊗α_s + d̂_l⊗ω) t)`.
pub fn hat_images(split: &SplitHatRing, target: &Arc<Ring>) -> Result<Vec<SigmaClass>, PairingError> {
    let g = split.g as u32;
    let nh = split.nh();
    let mut prod = TSeries::constant(SigmaClass::unit_class(GradedElement::one(target), g), nh);
    for l in 1..=nh {
        let x = GradedElement::gen(target, &SplitHatRing::x_name(l))?;
        let alpha = (1..=2 * split.g)
            .map(|s| GradedElement::gen(target, &SplitHatRing::z_name(s, l)))
            .collect::<Result<Vec<_>, _>>()?;
        let c = SigmaClass::from_parts(x, alpha, GradedElement::int(target, split.degrees[l - 1]))
            .map_err(|e| PairingError::Invalid(e.to_string()))?;
        prod = prod.mul(&TSeries::linear(c, nh));
    }
    Ok(prod.into_coeffs().into_iter().skip(1).collect())
}

/// Restriction of a hat-ring element along the splitting. Generators outside
/// the hat block are carried over by name.
pub fn torus_restrict_hat(
    x: &GradedElement,
    hat: &BundleData,
    split: &SplitHatRing,
    target: &Arc<Ring>,
) -> Result<GradedElement, PairingError> {
    if hat.n as usize != split.nh() || hat.d != split.total_degree() || hat.g != split.g {
        return Err(PairingError::Invalid("split data does not match the hat bundle".into()));
    }
    let images = hat_images(split, target)?;
    let src = x.ring();
    let mut subs = Vec::with_capacity(src.gens().len());
    for spec in src.gens() {
        let name = &spec.name;
        let mut img = None;
        for r in 1..=hat.n {
            let c = &images[r as usize - 1];
            if *name == hat.a_name(r) {
                img = Some(c.unit().clone());
            } else if *name == hat.f_name(r) {
                img = Some(c.omega().clone());
            }
            for s in 1..=2 * hat.g {
                if *name == hat.b_name(r, s) {
                    img = Some(c.alpha(s as usize).clone());
                }
            }
        }
        subs.push(match img {
            Some(i) => i,
            None => GradedElement::gen(target, name)?,
        });
    }
    Ok(x.substitute(target, &subs)?)
}

pub fn torus_restrict_series(
    x: &TSeries<GradedElement>,
    hat: &BundleData,
    split: &SplitHatRing,
    target: &Arc<Ring>,
) -> Result<TSeries<GradedElement>, PairingError> {
    x.try_map(|c| torus_restrict_hat(c, hat, split, target))
}

/// `log ∏_l c(−π_!(L_l*⊗V))(t)` in `ring`.
pub fn split_log_in(ring: &Arc<Ring>, main: &BundleData, split: &SplitHatRing, t_cap: usize) -> Result<TSeries<GradedElement>, PairingError> {
    let mut total = TSeries::constant(GradedElement::zero(ring), t_cap);
    for l in 1..=split.nh() {
        let ch = grr_character_in(ring, main, &split.line(l)?, 0, t_cap)?;
        total = total.add(&log_chern_from_character(&ch, t_cap));
    }
    Ok(total)
}

/// `∏_l c(−π_!(L_l*⊗V))(t)`, each factor from rank-one GRR.
pub fn split_chern_poly_in(ring: &Arc<Ring>, main: &BundleData, split: &SplitHatRing, t_cap: usize) -> Result<TSeries<GradedElement>, PairingError> {
    let mut total = TSeries::constant(GradedElement::one(ring), t_cap);
    for l in 1..=split.nh() {
        let line = split.line(l)?;
        let ch = grr_character_in(ring, main, &line, 0, t_cap)?;
        let rank = main.n * (main.g - 1) - main.d + line.d * main.n;
        total = total.mul(&character_to_chern(&ch, rank, t_cap).map_err(|e| PairingError::Invalid(e.to_string()))?);
    }
    Ok(total)
}

pub fn split_chern_poly(main: &BundleData, split: &SplitHatRing, t_cap: usize) -> Result<TSeries<GradedElement>, PairingError> {
    let ring = split_pair_ring(main, split, 2 * t_cap as u32)?;
    split_chern_poly_in(&ring, main, split, t_cap)
}

/// `P(x) = ∏_k (1 + (δ_k − x)t) = Σ_j a_j t^j (1 − xt)^{n−j}` with `a_0 = 1`.
pub fn root_poly(a: &[GradedElement], x: &GradedElement, t_cap: usize) -> TSeries<GradedElement> {
    let n = a.len();
    let one = GradedElement::one(x.ring());
    let base = TSeries::linear(x.neg_ref(), t_cap);
    let mut total = TSeries::constant(GradedElement::zero(x.ring()), t_cap);
    for j in 0..=n {
        let aj = if j == 0 { one.clone() } else { a[j - 1].clone() };
        total = total.add(&base.pow_i((n - j) as i64).expect("nonnegative power").shift(j).scale_by(&aj));
    }
    total
}

/// Factor picked up by the split Chern polynomial when `d̂_p` drops by one and
/// `d̂_{p+1}` rises by one: `P(x_{p+1}) / P(x_p)`.
pub fn degree_shift_factor(main: &BundleData, ring: &Arc<Ring>, p: usize, t_cap: usize) -> Result<TSeries<GradedElement>, PairingError> {
    let a = main.point_chern(ring)?;
    let x = |l: usize| GradedElement::gen(ring, &SplitHatRing::x_name(l));
    let num = root_poly(&a, &x(p + 1)?, t_cap);
    let den = root_poly(&a, &x(p)?, t_cap);
    Ok(num.mul(&den.reciprocal()?))
}

/// Regular part of `(P(X_{l+1})/P(X_l) − 1)^{−1} = regular · (t Y_l)^{−1}`:
/// `regular = P(X_l) · S_l^{−1}` with
/// `S_l = Σ_{j<n} a_j t^j Σ_{i<n−j} (1 − tX_{l+1})^i (1 − tX_l)^{n−j−1−i}`.
pub fn denominator_expand(
    a: &[GradedElement],
    x_l: &GradedElement,
    x_next: &GradedElement,
    t_cap: usize,
) -> Result<TSeries<GradedElement>, PairingError> {
    Ok(root_poly(a, x_l, t_cap).mul(&s_inverse(a, x_l, x_next, t_cap)?))
}

/// `S_l^{−1}`, normalizing the constant term `n` first.
pub fn s_inverse(a: &[GradedElement], x_l: &GradedElement, x_next: &GradedElement, t_cap: usize) -> Result<TSeries<GradedElement>, PairingError> {
    let n = rational::int(a.len() as i64);
    let inv = s_series(a, x_l, x_next, t_cap).scale(&n.recip()).reciprocal()?;
    Ok(inv.scale(&n.recip()))
}

/// `S_l`; its constant term is `n`.
pub fn s_series(a: &[GradedElement], x_l: &GradedElement, x_next: &GradedElement, t_cap: usize) -> TSeries<GradedElement> {
    let n = a.len();
    let one = GradedElement::one(x_l.ring());
    let u = TSeries::linear(x_next.neg_ref(), t_cap);
    let v = TSeries::linear(x_l.neg_ref(), t_cap);
    let mut total = TSeries::constant(GradedElement::zero(x_l.ring()), t_cap);
    for j in 0..n {
        let aj = if j == 0 { one.clone() } else { a[j - 1].clone() };
        let mut inner = TSeries::constant(GradedElement::zero(x_l.ring()), t_cap);
        for i in 0..n - j {
            let term = u.pow_i(i as i64).expect("nonnegative").mul(&v.pow_i((n - j - 1 - i) as i64).expect("nonnegative"));
            inner = inner.add(&term);
        }
        total = total.add(&inner.shift(j).scale_by(&aj));
    }
    total
}

/// Ring with only the split blocks and the main generators, no degree cap.
pub fn open_split_ring(main: &BundleData, split: &SplitHatRing) -> Result<Arc<Ring>, PairingError> {
    split_pair_ring(main, split, NO_CAP)
}
