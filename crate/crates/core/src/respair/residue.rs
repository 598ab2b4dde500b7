//! Iterated residues of expressions `t^k · N · ∏ L_j^{−e_j}` where `N` is a
//! series in `t` whose coefficients are polynomials in `Y_1..Y_m`, and the
//! `L_j` are linear forms in the Y's.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::exactalg::rational::{self, Rational};
use crate::exactalg::{GradedElement, Ring, TSeries};

use super::PairingError;

pub type LinearForm = Vec<Rational>;

#[derive(Clone, Debug, PartialEq)]
pub struct ResidueTerm {
    pub num: TSeries<GradedElement>,
    /// Overall factor `t^{t_shift}`.
    pub t_shift: i64,
    pub denominators: BTreeMap<LinearForm, u32>,
}

/// A finite sum of terms; `vars[a]` is the ring index of `Y_{a+1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct ResidueExpr {
    pub ring: Arc<Ring>,
    pub vars: Vec<usize>,
    pub terms: Vec<ResidueTerm>,
}

impl ResidueExpr {
    pub fn new(ring: &Arc<Ring>, var_names: &[&str]) -> Result<Self, PairingError> {
        let vars = var_names
            .iter()
            .map(|v| ring.index(v).ok_or_else(|| PairingError::Invalid(format!("unknown variable {v}"))))
            .collect::<Result<_, _>>()?;
        Ok(ResidueExpr { ring: ring.clone(), vars, terms: Vec::new() })
    }

    pub fn push(&mut self, num: TSeries<GradedElement>, t_shift: i64, denominators: &[(LinearForm, u32)]) {
        let mut d = BTreeMap::new();
        for (f, e) in denominators {
            *d.entry(f.clone()).or_insert(0) += e;
        }
        self.terms.push(ResidueTerm { num, t_shift, denominators: d });
    }

    pub fn scale(&self, q: &Rational) -> Self {
        let mut out = self.clone();
        for t in &mut out.terms {
            t.num = t.num.scale(q);
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.terms.extend(other.terms.iter().cloned());
        out
    }
}

fn binom_neg(e: u32, i: usize) -> Rational {
    // C(−e, i) = (−1)^i C(e+i−1, i)
    rational::binom_i(-(e as i64), i as u32)
}

/// Residue at `Y_var = 0` of one term, holding the other Y's as generic.
fn residue_term(ring: &Arc<Ring>, var_pos: usize, var: usize, term: &ResidueTerm) -> Result<Vec<ResidueTerm>, PairingError> {
    let mut stay = BTreeMap::new();
    let mut expand = Vec::new();
    let mut pole = 0u32;
    let mut scalar = Rational::one();
    for (form, &e) in &term.denominators {
        if form.iter().all(|c| c.is_zero()) {
            return Err(PairingError::EssentialSingularity);
        }
        let c = form[var_pos].clone();
        if c.is_zero() {
            *stay.entry(form.clone()).or_insert(0) += e;
            continue;
        }
        let mut rest = form.clone();
        rest[var_pos] = Rational::zero();
        if rest.iter().all(|x| x.is_zero()) {
            pole += e;
            scalar /= num_traits::pow(c, e as usize);
        } else {
            expand.push((c, rest, e));
        }
    }
    if pole == 0 {
        return Ok(Vec::new());
    }
    let top = (pole - 1) as usize;
    let powers: Vec<BTreeMap<u32, GradedElement>> = term.num.coeffs().iter().map(|c| c.powers_of(var)).collect();
    let zero = GradedElement::zero(ring);
    let mut out = Vec::new();
    let mut idx = vec![0usize; expand.len()];
    loop {
        let used: usize = idx.iter().sum();
        if used <= top {
            let p = (top - used) as u32;
            let coeffs: Vec<GradedElement> = powers.iter().map(|m| m.get(&p).cloned().unwrap_or_else(|| zero.clone())).collect();
            if coeffs.iter().any(|c| !c.is_empty()) {
                let mut q = scalar.clone();
                let mut dens = stay.clone();
                for ((c, rest, e), &i) in expand.iter().zip(&idx) {
                    q *= binom_neg(*e, i) * num_traits::pow(c.clone(), i);
                    *dens.entry(rest.clone()).or_insert(0) += e + i as u32;
                }
                let num = TSeries::new(coeffs, term.num.t_cap()).scale(&q);
                out.push(ResidueTerm { num, t_shift: term.t_shift, denominators: dens });
            }
        }
        // Next multi-index with entries ≤ top.
        let mut k = 0;
        loop {
            if k == idx.len() {
                return Ok(out);
            }
            idx[k] += 1;
            if idx[k] <= top {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// `Res_{Y_1=0} … Res_{Y_m=0}`, innermost `Y_m` first; returns the series up
/// to `t^t_cap`. Each term's numerator must reach `t^{t_cap − t_shift}`.
pub fn iterated_residue(expr: &ResidueExpr, t_cap: usize) -> Result<TSeries<GradedElement>, PairingError> {
    let mut terms = expr.terms.clone();
    for pos in (0..expr.vars.len()).rev() {
        let mut next = Vec::new();
        for t in &terms {
            next.extend(residue_term(&expr.ring, pos, expr.vars[pos], t)?);
        }
        terms = next;
    }
    let zero = GradedElement::zero(&expr.ring);
    let mut out = TSeries::constant(zero.clone(), t_cap);
    for t in terms {
        if !t.denominators.is_empty() {
            return Err(PairingError::EssentialSingularity);
        }
        let need = t_cap as i64 - t.t_shift;
        if (t.num.t_cap() as i64) < need {
            return Err(PairingError::Cap(format!("numerator reaches t^{} but t^{need} is needed", t.num.t_cap())));
        }
        let mut v = Vec::with_capacity(t_cap + 1);
        for r in 0..=t_cap as i64 {
            let k = r - t.t_shift;
            v.push(if k < 0 { zero.clone() } else { t.num.coeffs()[k as usize].clone() });
        }
        for k in 0..(-t.t_shift).max(0) {
            if !t.num.coeffs()[k as usize].is_empty() {
                return Err(PairingError::Invalid("negative power of t survives the residues".into()));
            }
        }
        out = out.add(&TSeries::new(v, t_cap));
    }
    Ok(out)
}
