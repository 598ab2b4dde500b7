//! Classes in H ⊗ H*(Σ) with H*(Σ) spanned by 1, α_1..α_{2g}, ω, and the
//! conversions between Chern classes and Chern characters.
//!
//! Convention: α_s·α_{s+g} = ω = −α_{s+g}·α_s for 1 ≤ s ≤ g, every other
//! product of α's vanishes, and (x⊗α)(y⊗β) = (−1)^{|α||y|} xy⊗αβ.

use std::sync::Arc;

use thiserror::Error;

use crate::exactalg::rational::{self, Rational};
use crate::exactalg::{AlgError, Algebra, GradedElement, Ring, TSeries};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KunnethError {
    #[error("genus mismatch: {0} vs {1}")]
    GenusMismatch(u32, u32),
    #[error("size mismatch: {0}")]
    Size(String),
    #[error(transparent)]
    Alg(#[from] AlgError),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SigmaClass {
    g: u32,
    unit: GradedElement,
    alpha: Vec<GradedElement>,
    omega: GradedElement,
}

impl SigmaClass {
    pub fn zero(ring: &Arc<Ring>, g: u32) -> Self {
        let z = GradedElement::zero(ring);
        SigmaClass { g, unit: z.clone(), alpha: vec![z.clone(); 2 * g as usize], omega: z }
    }

    pub fn from_parts(unit: GradedElement, alpha: Vec<GradedElement>, omega: GradedElement) -> Result<Self, KunnethError> {
        if !alpha.len().is_multiple_of(2) || alpha.is_empty() {
            return Err(KunnethError::Size("need 2g alpha components".into()));
        }
        for x in alpha.iter().chain([&omega]) {
            if !x.same_ring(&unit) {
                return Err(AlgError::RingMismatch.into());
            }
        }
        Ok(SigmaClass { g: alpha.len() as u32 / 2, unit, alpha, omega })
    }

    /// `x ⊗ 1`.
    pub fn unit_class(x: GradedElement, g: u32) -> Self {
        let mut s = Self::zero(x.ring(), g);
        s.unit = x;
        s
    }

    /// `x ⊗ ω`.
    pub fn omega_class(x: GradedElement, g: u32) -> Self {
        let mut s = Self::zero(x.ring(), g);
        s.omega = x;
        s
    }

    /// `x ⊗ α_s`, with `s` counted from 1.
    pub fn alpha_class(x: GradedElement, s: usize, g: u32) -> Self {
        let mut c = Self::zero(x.ring(), g);
        c.alpha[s - 1] = x;
        c
    }

    pub fn genus(&self) -> u32 {
        self.g
    }

    pub fn ring(&self) -> &Arc<Ring> {
        self.unit.ring()
    }

    pub fn unit(&self) -> &GradedElement {
        &self.unit
    }

    pub fn alpha(&self, s: usize) -> &GradedElement {
        &self.alpha[s - 1]
    }

    pub fn omega(&self) -> &GradedElement {
        &self.omega
    }

    fn mul_raw(&self, y: &Self) -> Self {
        let g = self.g as usize;
        let unit = &self.unit * &y.unit;
        let y_unit_tw = y.unit.parity_twist();
        let alpha: Vec<_> = (0..2 * g)
            .map(|s| (&self.unit * &y.alpha[s]) + (&self.alpha[s] * &y_unit_tw))
            .collect();
        let mut omega = (&self.unit * &y.omega) + (&self.omega * &y.unit);
        for s in 0..g {
            let fwd = &self.alpha[s] * &y.alpha[s + g].parity_twist();
            let back = &self.alpha[s + g] * &y.alpha[s].parity_twist();
            omega = omega + fwd - back;
        }
        SigmaClass { g: self.g, unit, alpha, omega }
    }

    fn map(&self, f: impl Fn(&GradedElement) -> GradedElement) -> Self {
        SigmaClass { g: self.g, unit: f(&self.unit), alpha: self.alpha.iter().map(&f).collect(), omega: f(&self.omega) }
    }

    /// Applies a ring homomorphism componentwise.
    pub fn substitute(&self, target: &Arc<Ring>, images: &[GradedElement]) -> Result<Self, AlgError> {
        Ok(SigmaClass {
            g: self.g,
            unit: self.unit.substitute(target, images)?,
            alpha: self.alpha.iter().map(|x| x.substitute(target, images)).collect::<Result<_, _>>()?,
            omega: self.omega.substitute(target, images)?,
        })
    }
}

impl Algebra for SigmaClass {
    fn zero_like(&self) -> Self {
        SigmaClass::zero(self.ring(), self.g)
    }
    fn one_like(&self) -> Self {
        SigmaClass::unit_class(GradedElement::one(self.ring()), self.g)
    }
    fn is_zero(&self) -> bool {
        self.unit.is_empty() && self.omega.is_empty() && self.alpha.iter().all(|a| a.is_empty())
    }
    fn add(&self, other: &Self) -> Self {
        SigmaClass {
            g: self.g,
            unit: self.unit.clone() + other.unit.clone(),
            alpha: self.alpha.iter().zip(&other.alpha).map(|(a, b)| a.clone() + b.clone()).collect(),
            omega: self.omega.clone() + other.omega.clone(),
        }
    }
    fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.g, other.g, "genus mismatch");
        self.mul_raw(other)
    }
    fn scale(&self, q: &Rational) -> Self {
        self.map(|x| x.scale(q))
    }
}

pub fn sigma_mul(x: &SigmaClass, y: &SigmaClass) -> Result<SigmaClass, KunnethError> {
    if x.g != y.g {
        return Err(KunnethError::GenusMismatch(x.g, y.g));
    }
    if !x.unit.same_ring(&y.unit) {
        return Err(AlgError::RingMismatch.into());
    }
    Ok(x.mul_raw(y))
}

/// Integration over Σ: the ω component.
pub fn pushforward_pi(x: &SigmaClass) -> GradedElement {
    x.omega.clone()
}

/// Newton's identities: `ch_0 = n`, `ch_k = p_k / k!` with
/// `p_k = Σ_{i<k} (−1)^{i−1} e_i p_{k−i} + (−1)^{k−1} k e_k`.
/// `c` holds `c_1..c_n`; returns `ch_0..ch_cap`.
pub fn chern_to_character<C: Algebra>(one: &C, c: &[C], cap: usize) -> Vec<C> {
    let n = c.len();
    let e = |i: usize| if i <= n { Some(&c[i - 1]) } else { None };
    let mut p: Vec<C> = vec![one.scale(&rational::int(n as i64))];
    for k in 1..=cap {
        let mut acc = one.zero_like();
        for i in 1..k {
            if let Some(ei) = e(i) {
                let term = ei.mul(&p[k - i]);
                acc = if i % 2 == 1 { acc.add(&term) } else { acc.sub(&term) };
            }
        }
        if let Some(ek) = e(k) {
            let term = ek.scale(&rational::int(k as i64));
            acc = if k % 2 == 1 { acc.add(&term) } else { acc.sub(&term) };
        }
        p.push(acc);
    }
    p.iter()
        .enumerate()
        .map(|(k, pk)| if k == 0 { pk.clone() } else { pk.scale(&Rational::new(1.into(), rational::factorial(k as u32))) })
        .collect()
}

/// `log c(t) = Σ_{k≥1} (−1)^{k−1} (k−1)! ch_k t^k`.
pub fn log_chern_from_character<C: Algebra>(ch: &[C], t_cap: usize) -> TSeries<C> {
    let z = ch[0].zero_like();
    let mut v = vec![z.clone()];
    for k in 1..=t_cap {
        let Some(chk) = ch.get(k) else {
            v.push(z.clone());
            continue;
        };
        let mut f = Rational::from_integer(rational::factorial(k as u32 - 1));
        if k % 2 == 0 {
            f = -f;
        }
        v.push(chk.scale(&f));
    }
    TSeries::new(v, t_cap)
}

/// Chern polynomial from a (possibly virtual) character; `ch[0]` must be the rank.
pub fn character_to_chern<C: Algebra>(ch: &[C], rank: i64, t_cap: usize) -> Result<TSeries<C>, KunnethError> {
    if ch.is_empty() {
        return Err(KunnethError::Size("empty character".into()));
    }
    if ch[0] != ch[0].one_like().scale(&rational::int(rank)) {
        return Err(KunnethError::Size("ch_0 differs from the stated rank".into()));
    }
    Ok(log_chern_from_character(ch, t_cap).exp()?)
}

/// `c_r = a_r ⊗ 1 + Σ_j b_r^j ⊗ α_j + f_r ⊗ ω` for r = 1..n.
pub fn assemble_universal_chern(
    a: &[GradedElement],
    b: &[Vec<GradedElement>],
    f: &[GradedElement],
    n: usize,
    g: u32,
) -> Result<Vec<SigmaClass>, KunnethError> {
    if a.len() != n || b.len() != n || f.len() != n {
        return Err(KunnethError::Size(format!("expected {n} entries in a, b and f")));
    }
    (0..n)
        .map(|r| {
            if b[r].len() != 2 * g as usize {
                return Err(KunnethError::Size(format!("b_{} needs {} entries", r + 1, 2 * g)));
            }
            SigmaClass::from_parts(a[r].clone(), b[r].clone(), f[r].clone())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::rational::{frac, int};
    use crate::exactalg::GeneratorSpec;
    use proptest::prelude::*;

    fn ring() -> Arc<Ring> {
        let mut gens = vec![GeneratorSpec::new("x", 2), GeneratorSpec::new("y", 2), GeneratorSpec::new("z", 4)];
        for j in 1..=4 {
            gens.push(GeneratorSpec::new(format!("u{j}"), 1));
        }
        Ring::new(gens, 12).unwrap()
    }

    fn gen(r: &Arc<Ring>, n: &str) -> GradedElement {
        GradedElement::gen(r, n).unwrap()
    }

    #[test]
    fn symplectic_products() {
        let r = ring();
        let one = GradedElement::one(&r);
        let a = |s| SigmaClass::alpha_class(one.clone(), s, 2);
        assert_eq!(a(1).mul(&a(3)), SigmaClass::omega_class(one.clone(), 2));
        assert_eq!(a(3).mul(&a(1)), SigmaClass::omega_class(-one.clone(), 2));
        assert!(a(1).mul(&a(2)).is_zero());
        let w = SigmaClass::omega_class(one.clone(), 2);
        assert!(w.mul(&a(1)).is_zero() && w.mul(&w).is_zero());
    }

    #[test]
    fn koszul_sign_on_alpha_products() {
        let r = ring();
        let (x, y) = (gen(&r, "u1"), gen(&r, "u2"));
        let p = SigmaClass::alpha_class(x.clone(), 1, 2).mul(&SigmaClass::alpha_class(y.clone(), 3, 2));
        assert_eq!(pushforward_pi(&p), -(&x * &y));
        let ye = gen(&r, "y");
        let q = SigmaClass::alpha_class(x.clone(), 1, 2).mul(&SigmaClass::alpha_class(ye.clone(), 3, 2));
        assert_eq!(pushforward_pi(&q), &x * &ye);
    }

    #[test]
    fn genus_mismatch_rejected() {
        let r = ring();
        let x = SigmaClass::zero(&r, 2);
        let y = SigmaClass::zero(&r, 1);
        assert!(matches!(sigma_mul(&x, &y), Err(KunnethError::GenusMismatch(2, 1))));
    }

    #[test]
    fn pushforward_reads_omega() {
        let r = ring();
        let x = gen(&r, "x");
        assert_eq!(pushforward_pi(&SigmaClass::omega_class(x.clone(), 2)), x);
        assert!(pushforward_pi(&SigmaClass::unit_class(x, 2)).is_empty());
        let c1 = assemble_universal_chern(
            &[gen(&r, "x")],
            &[vec![gen(&r, "u1"), gen(&r, "u2"), gen(&r, "u3"), gen(&r, "u4")]],
            &[GradedElement::int(&r, 3)],
            1,
            2,
        )
        .unwrap();
        assert_eq!(pushforward_pi(&c1[0]), GradedElement::int(&r, 3));
    }

    #[test]
    fn newton_small_cases() {
        let r = ring();
        let one = GradedElement::one(&r);
        let x = gen(&r, "x");
        let ch = chern_to_character(&one, std::slice::from_ref(&x), 4);
        for k in 0..=4u32 {
            assert_eq!(ch[k as usize], x.pow(k).scale(&Rational::new(1.into(), rational::factorial(k))));
        }
        let (c1, c2) = (gen(&r, "x"), gen(&r, "z"));
        let ch = chern_to_character(&one, &[c1.clone(), c2.clone()], 2);
        assert_eq!(ch[0], GradedElement::int(&r, 2));
        assert_eq!(ch[2], (c1.pow(2) - c2.scale(&int(2))).scale(&frac(1, 2)));
    }

    #[test]
    fn minus_a_line_bundle() {
        let r = ring();
        let x = gen(&r, "x");
        let one = GradedElement::one(&r);
        let mut ch = vec![one.scale(&int(-1))];
        for k in 1..=5u32 {
            ch.push(x.pow(k).scale(&Rational::new((-1).into(), rational::factorial(k))));
        }
        let c = character_to_chern(&ch, -1, 5).unwrap();
        // Oracle: (1 + x t)^{-1} = Σ (−x t)^k.
        for k in 0..=5u32 {
            let s = if k % 2 == 0 { 1 } else { -1 };
            assert_eq!(c.coeffs()[k as usize], x.pow(k).scale(&int(s)));
        }
        assert_eq!(c.coeffs()[1], ch[1]);
        assert!(character_to_chern(&ch, 1, 5).is_err());
    }

    fn arb_sigma() -> impl Strategy<Value = SigmaClass> {
        let r = ring();
        prop::collection::vec((0usize..6, 0usize..7, -2i64..3), 1..6).prop_map(move |ts| {
            let basis = [
                GradedElement::one(&r),
                gen(&r, "x"),
                gen(&r, "u1"),
                gen(&r, "u2"),
                &gen(&r, "u3") * &gen(&r, "y"),
                gen(&r, "z"),
            ];
            let mut acc = SigmaClass::zero(&r, 2);
            for (b, slot, c) in ts {
                let x = basis[b].scale(&int(c));
                let s = match slot {
                    0 => SigmaClass::unit_class(x, 2),
                    5 | 6 => SigmaClass::omega_class(x, 2),
                    k => SigmaClass::alpha_class(x, k, 2),
                };
                acc = acc.add(&s);
            }
            acc
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn sigma_mul_associative(x in arb_sigma(), y in arb_sigma(), z in arb_sigma()) {
            prop_assert_eq!(x.mul(&y).mul(&z), x.mul(&y.mul(&z)));
        }

        #[test]
        fn projection_formula(x in arb_sigma(), y in arb_sigma()) {
            let yy = SigmaClass::unit_class(y.unit().clone(), 2);
            prop_assert_eq!(pushforward_pi(&x.mul(&yy)), pushforward_pi(&x) * y.unit().clone());
        }

        #[test]
        fn chern_character_roundtrip(n in 1usize..=4, seed in 0u64..1000) {
            let mut gens = Vec::new();
            for i in 1..=n {
                gens.push(GeneratorSpec::new(format!("c{i}"), 2 * i as u32));
            }
            let r = Ring::new(gens, 12).unwrap();
            let one = GradedElement::one(&r);
            let c: Vec<_> = (1..=n)
                .map(|i| GradedElement::gen(&r, &format!("c{i}")).unwrap().scale(&int((seed as i64 % 3) + 1)))
                .collect();
            let ch = chern_to_character(&one, &c, 6);
            let back = character_to_chern(&ch, n as i64, 6).unwrap();
            for i in 1..=6 {
                let want = if i <= n { c[i - 1].clone() } else { GradedElement::zero(&r) };
                prop_assert_eq!(&back.coeffs()[i], &want);
            }
        }
    }
}
