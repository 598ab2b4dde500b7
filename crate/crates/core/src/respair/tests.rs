use std::sync::Arc;

use crate::exactalg::rational::{self, Rational};
use crate::exactalg::{GradedElement, Ring, TSeries, NO_CAP};
use crate::relgen::BundleData;

use super::*;

fn main_ring(main: &BundleData) -> Arc<Ring> {
    Ring::new(main.generators(), NO_CAP).unwrap()
}

fn eq_series(a: &TSeries<GradedElement>, b: &TSeries<GradedElement>) -> bool {
    a.coeffs().len() == b.coeffs().len() && a.coeffs().iter().zip(b.coeffs()).all(|(x, y)| x.try_sub(y).unwrap().is_empty())
}

/// `t^g (1 + a1 t)^{d̂ − d − 1}` on the main ring.
fn line_pairing_oracle(main: &BundleData, dh: i64, t_cap: usize) -> TSeries<GradedElement> {
    let ring = main_ring(main);
    let a1 = GradedElement::gen(&ring, &main.a_name(1)).unwrap();
    let base = TSeries::new(vec![GradedElement::one(&ring), a1], t_cap);
    base.pow_i(dh - main.d - 1).unwrap().shift(main.g as usize)
}

#[test]
fn rank_one_pairing_matches_gaussian_integral() {
    for (d, dh, g) in [(0, 1, 2), (0, 3, 2), (1, 0, 2), (-1, 2, 3)] {
        let main = BundleData::main(1, d, g).unwrap();
        let hat = BundleData::hat(1, dh, g).unwrap();
        let one = GradedElement::one(&Ring::new(hat.generators(), NO_CAP).unwrap());
        let got = pairing_thm_10_2(&one, &main, 1, dh, &PairingOptions::new(6)).unwrap();
        assert!(eq_series(&got, &line_pairing_oracle(&main, dh, 6)), "d={d} dh={dh} g={g}");
    }
}

#[test]
fn rank_one_denominator() {
    let main = BundleData::main(1, 0, 2).unwrap();
    let split = SplitHatRing::new(2, vec![0, 1]).unwrap();
    let ring = open_split_ring(&main, &split).unwrap();
    let a = main.point_chern(&ring).unwrap();
    let x1 = GradedElement::gen(&ring, "hx1").unwrap();
    let x2 = GradedElement::gen(&ring, "hx2").unwrap();
    let got = denominator_expand(&a, &x1, &x2, 4).unwrap();
    let want = TSeries::new(vec![GradedElement::one(&ring), a[0].clone() - x1], 4);
    assert!(eq_series(&got, &want));
}

#[test]
fn denominator_reciprocal_identity() {
    for n in 1..=3 {
        let main = BundleData::main(n, 1, 2).unwrap();
        let split = SplitHatRing::new(2, vec![0, 1]).unwrap();
        let ring = open_split_ring(&main, &split).unwrap();
        let a = main.point_chern(&ring).unwrap();
        let x1 = GradedElement::gen(&ring, "hx1").unwrap();
        let x2 = GradedElement::gen(&ring, "hx2").unwrap();
        let cap = 6;
        let reg = denominator_expand(&a, &x1, &x2, cap).unwrap();
        let p1 = root_poly(&a, &x1, cap);
        let p2 = root_poly(&a, &x2, cap);
        let lhs = reg.mul(&p2.sub(&p1));
        let rhs = p1.scale_by(&(x1 - x2)).shift(1);
        assert!(eq_series(&lhs, &rhs), "n={n}");
    }
}

#[test]
fn degree_shift_law() {
    let main = BundleData::main(2, 1, 2).unwrap();
    let split = SplitHatRing::new(2, vec![1, 0]).unwrap();
    let cap = 4;
    let c = split_chern_poly(&main, &split, cap).unwrap();
    let ring = c.coeffs()[0].ring().clone();
    let shifted = split_chern_poly(&main, &split.shifted(1).unwrap(), cap).unwrap();
    let factor = degree_shift_factor(&main, &ring, 1, cap).unwrap();
    assert!(eq_series(&shifted, &c.mul(&factor)));
}

#[test]
fn split_paths_agree() {
    // Two routes to the split Chern polynomial: its own ring vs a wider one.
    let main = BundleData::main(2, 1, 2).unwrap();
    let split = SplitHatRing::new(2, vec![0, 1]).unwrap();
    let a = split_chern_poly(&main, &split, 4).unwrap();
    let b = split_chern_poly_in(&open_split_ring(&main, &split).unwrap(), &main, &split, 4).unwrap();
    let ring = a.coeffs()[0].ring().clone();
    let b = b.try_map(|c| c.transfer(&ring)).unwrap();
    assert!(eq_series(&a, &b));
}

fn hat_one(nh: i64, dh: i64, g: i64) -> GradedElement {
    GradedElement::one(&Ring::new(BundleData::hat(nh, dh, g).unwrap().generators(), NO_CAP).unwrap())
}

#[test]
fn rank_two_degrees_are_conserved() {
    let (g, nh, dh) = (2, 2, 1);
    let main = BundleData::main(1, 0, g).unwrap();
    let t_cap = 6;
    let out = pairing_thm_10_2(&hat_one(nh, dh, g), &main, nh, dh, &PairingOptions::new(t_cap)).unwrap();
    let dim = nh * nh * (g - 1) + 1;
    for (r, c) in out.coeffs().iter().enumerate() {
        let want = 2 * r as i64 - 2 * dim;
        for d in c.degrees() {
            assert_eq!(d as i64, want, "t^{r}");
        }
        if want < 0 {
            assert!(c.is_empty());
        }
    }
}

#[test]
fn relabeling_leaves_the_pairing_unchanged() {
    let (g, nh, dh) = (2, 2, 1);
    let main = BundleData::main(1, 0, g).unwrap();
    let mut opts = PairingOptions::new(4);
    let a = pairing_thm_10_2(&hat_one(nh, dh, g), &main, nh, dh, &opts).unwrap();
    opts.relabel = Some(vec![1, 0]);
    let b = pairing_thm_10_2(&hat_one(nh, dh, g), &main, nh, dh, &opts).unwrap();
    assert!(eq_series(&a, &b));
}

#[test]
fn deformed_formula_reduces_at_lambda_zero() {
    let (g, nh, dh) = (2, 2, 1);
    let main = BundleData::main(1, 0, g).unwrap();
    let hat = BundleData::hat(nh, dh, g).unwrap();
    let hring = Ring::new(hat.generators(), NO_CAP).unwrap();
    let a2 = GradedElement::gen(&hring, &hat.a_name(2)).unwrap();
    let opts = PairingOptions::new(4);
    let plain = pairing_thm_10_2(&a2, &main, nh, dh, &opts).unwrap();
    let input = Thm103Input { m: vec![0, 1], p: vec![vec![false; 2]; 2], eps: vec![rational::int(1)], lambda_order: 1 };
    let deformed = pairing_thm_10_3(&input, &main, nh, dh, &opts).unwrap();
    assert_eq!(deformed.len(), 2);
    assert!(eq_series(&deformed[0], &plain));
}

#[test]
fn rejects_bad_input() {
    let main = BundleData::main(1, 0, 2).unwrap();
    let hat = BundleData::hat(2, 1, 2).unwrap();
    let hring = Ring::new(hat.generators(), NO_CAP).unwrap();
    let f2 = GradedElement::gen(&hring, &hat.f_name(2)).unwrap();
    let opts = PairingOptions::new(2);
    assert!(matches!(pairing_thm_10_2(&f2, &main, 2, 1, &opts), Err(PairingError::FGenerator(_))));
    assert!(matches!(pairing_thm_10_2(&hat_one(2, 2, 2), &main, 2, 2, &opts), Err(PairingError::NotCoprime { .. })));
    let input = Thm103Input { m: vec![], p: vec![], eps: vec![Rational::from_integer(0.into())], lambda_order: 0 };
    assert!(matches!(pairing_thm_10_3(&input, &main, 2, 1, &opts), Err(PairingError::ZeroEpsilon)));
}

#[test]
fn deformed_degrees_are_conserved() {
    // The λ^k part pairs against f̂_2^k η, so it carries 2k extra degrees.
    let (g, nh, dh) = (2, 2, 1);
    let main = BundleData::main(1, 0, g).unwrap();
    let mut p = vec![vec![false; 4]; 2];
    p[1][0] = true;
    p[1][2] = true;
    let input = Thm103Input { m: vec![0, 0], p, eps: vec![rational::int(1)], lambda_order: 2 };
    let out = pairing_thm_10_3(&input, &main, nh, dh, &PairingOptions::new(6)).unwrap();
    let dim = nh * nh * (g - 1) + 1;
    let mut nonzero = 0;
    for (k, series) in out.iter().enumerate() {
        for (r, c) in series.coeffs().iter().enumerate() {
            for d in c.degrees() {
                assert_eq!(d as i64, 6 + 2 * k as i64 + 2 * r as i64 - 2 * dim, "λ^{k} t^{r}");
                nonzero += 1;
            }
        }
    }
    assert!(nonzero > 0);
}
