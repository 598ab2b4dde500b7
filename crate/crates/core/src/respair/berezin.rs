//! Integration over the Jacobian tori `(S¹)^{2g n̂}`: the coefficient of the
//! ordered top product of the odd generators `hz{s}_{l}`, scaled so that
//! `∫ exp(ω) = n̂^g` with `ω = Σ_l Σ_{s≤g} z_{s,l} z_{s+g,l}`.

use std::sync::Arc;

use crate::exactalg::rational::{self, Rational};
use crate::exactalg::{GradedElement, Monomial, Ring};

use super::split::SplitHatRing;
use super::PairingError;

/// Residual orientation of the top form; the calibration fixes everything else.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum BerezinSign {
    #[default]
    Plus,
    Minus,
}

#[derive(Clone, Debug)]
pub struct Berezin {
    ring: Arc<Ring>,
    odd: Vec<usize>,
    top: Monomial,
    kappa: Rational,
}

impl Berezin {
    pub fn new(ring: &Arc<Ring>, g: i64, nh: usize, sign: BerezinSign) -> Result<Self, PairingError> {
        let mut odd = Vec::new();
        for l in 1..=nh {
            for s in 1..=2 * g {
                let name = SplitHatRing::z_name(s, l);
                odd.push(ring.index(&name).ok_or_else(|| PairingError::Invalid(format!("missing generator {name}")))?);
            }
        }
        let top = odd.iter().fold(ring.unit_monomial(), |m, &i| m.mul(&ring.gen_monomial(i)).expect("distinct").0);
        let z = |s: i64, l: usize| GradedElement::gen(ring, &SplitHatRing::z_name(s, l)).expect("present");
        let mut omega = GradedElement::zero(ring);
        for l in 1..=nh {
            for s in 1..=g {
                omega = omega + z(s, l) * z(s + g, l);
            }
        }
        let raw = omega.exp()?.coefficient(&top);
        let mut kappa = rational::int((nh as i64).pow(g as u32)) / raw;
        if sign == BerezinSign::Minus {
            kappa = -kappa;
        }
        Ok(Berezin { ring: ring.clone(), odd, top, kappa })
    }

    pub fn kappa(&self) -> &Rational {
        &self.kappa
    }

    /// `∫ x`, an element free of the z's (still in the same ring).
    pub fn integrate(&self, x: &GradedElement) -> Result<GradedElement, PairingError> {
        if !Arc::ptr_eq(x.ring(), &self.ring) && **x.ring() != *self.ring {
            return Err(crate::exactalg::AlgError::RingMismatch.into());
        }
        let odd = &self.odd;
        let parts = x.split_off(|i| odd.contains(&i));
        Ok(parts.get(&self.top).map(|c| c.scale(&self.kappa)).unwrap_or_else(|| GradedElement::zero(&self.ring)))
    }
}

/// One-shot form with the default orientation.
pub fn berezin_integral(x: &GradedElement, g: i64, nh: usize) -> Result<GradedElement, PairingError> {
    Berezin::new(x.ring(), g, nh, BerezinSign::Plus)?.integrate(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::rational::int;
    use crate::exactalg::{GeneratorSpec, NO_CAP};

    fn ring(g: i64, nh: usize) -> Arc<Ring> {
        let mut gens = vec![GeneratorSpec::new("a", 2), GeneratorSpec::new("b", 1)];
        gens.extend(SplitHatRing::new(g, vec![0; nh]).unwrap().generators());
        Ring::new(gens, NO_CAP).unwrap()
    }

    fn z(r: &Arc<Ring>, s: i64, l: usize) -> GradedElement {
        GradedElement::gen(r, &SplitHatRing::z_name(s, l)).unwrap()
    }

    #[test]
    fn normalization() {
        for (g, nh) in [(2, 1), (2, 2), (3, 2), (2, 3)] {
            let r = ring(g, nh);
            let mut omega = GradedElement::zero(&r);
            for l in 1..=nh {
                for s in 1..=g {
                    omega = omega + z(&r, s, l) * z(&r, s + g, l);
                }
            }
            let v = berezin_integral(&omega.exp().unwrap(), g, nh).unwrap();
            assert_eq!(v, GradedElement::int(&r, (nh as i64).pow(g as u32)));
            let minus = Berezin::new(&r, g, nh, BerezinSign::Minus).unwrap();
            assert_eq!(minus.integrate(&omega.exp().unwrap()).unwrap(), GradedElement::int(&r, -(nh as i64).pow(g as u32)));
        }
    }

    #[test]
    fn lower_degree_and_linearity() {
        let r = ring(2, 1);
        let low = z(&r, 1, 1) * z(&r, 3, 1);
        assert!(berezin_integral(&low, 2, 1).unwrap().is_empty());
        let top = z(&r, 1, 1) * z(&r, 3, 1) * z(&r, 2, 1) * z(&r, 4, 1);
        let a = GradedElement::gen(&r, "a").unwrap();
        let b = GradedElement::gen(&r, "b").unwrap();
        let base = berezin_integral(&top, 2, 1).unwrap();
        assert_eq!(base, GradedElement::int(&r, 1));
        let mixed = (&a * &top).scale(&int(3)) + &b * &top + low;
        assert_eq!(berezin_integral(&mixed, 2, 1).unwrap(), (&a * &base).scale(&int(3)) + &b * &base);
    }
}
