use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_traits::{One, Zero};

use super::rational::{self, Rational};
use super::ring::{Monomial, Parity, Ring, Slot};
use super::{AlgError, Algebra};

/// Sparse element of a truncated free graded-commutative algebra.
#[derive(Clone, Debug)]
pub struct GradedElement {
    ring: Arc<Ring>,
    terms: BTreeMap<Monomial, Rational>,
}

impl PartialEq for GradedElement {
    fn eq(&self, other: &Self) -> bool {
        self.same_ring(other) && self.terms == other.terms
    }
}

impl GradedElement {
    pub fn zero(ring: &Arc<Ring>) -> Self {
        GradedElement { ring: ring.clone(), terms: BTreeMap::new() }
    }

    pub fn scalar(ring: &Arc<Ring>, q: Rational) -> Self {
        let mut x = Self::zero(ring);
        if !q.is_zero() {
            x.terms.insert(ring.unit_monomial(), q);
        }
        x
    }

    pub fn one(ring: &Arc<Ring>) -> Self {
        Self::scalar(ring, Rational::one())
    }

    pub fn int(ring: &Arc<Ring>, n: i64) -> Self {
        Self::scalar(ring, rational::int(n))
    }

    pub fn gen_index(ring: &Arc<Ring>, i: usize) -> Self {
        Self::from_terms(ring, [(ring.gen_monomial(i), Rational::one())])
    }

    pub fn gen(ring: &Arc<Ring>, name: &str) -> Result<Self, AlgError> {
        let i = ring.index(name).ok_or_else(|| AlgError::UnknownGenerator(name.into()))?;
        Ok(Self::gen_index(ring, i))
    }

    /// Builds from raw terms, summing duplicates and dropping anything over the cap.
    pub fn from_terms(ring: &Arc<Ring>, terms: impl IntoIterator<Item = (Monomial, Rational)>) -> Self {
        let mut out = BTreeMap::new();
        for (m, c) in terms {
            if ring.degree(&m) > ring.cap() {
                continue;
            }
            accumulate(&mut out, m, c);
        }
        GradedElement { ring: ring.clone(), terms: out }
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn same_ring(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.ring, &other.ring) || *self.ring == *other.ring
    }

    fn check(&self, other: &Self) -> Result<(), AlgError> {
        if self.same_ring(other) {
            Ok(())
        } else {
            Err(AlgError::RingMismatch)
        }
    }

    pub fn constant_term(&self) -> Rational {
        self.terms.get(&self.ring.unit_monomial()).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    /// Degrees of the terms present, ascending and deduplicated.
    pub fn degrees(&self) -> Vec<u32> {
        let mut d: Vec<u32> = self.terms.keys().map(|m| self.ring.degree(m)).collect();
        d.sort_unstable();
        d.dedup();
        d
    }

    /// `Some(d)` when every term has degree `d`; the zero element counts as homogeneous.
    pub fn homogeneous_degree(&self) -> Option<Option<u32>> {
        let d = self.degrees();
        match d.len() {
            0 => Some(None),
            1 => Some(Some(d[0])),
            _ => None,
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, AlgError> {
        self.check(other)?;
        let mut out = self.terms.clone();
        for (m, c) in &other.terms {
            accumulate(&mut out, m.clone(), c.clone());
        }
        Ok(GradedElement { ring: self.ring.clone(), terms: out })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, AlgError> {
        self.try_add(&other.neg_ref())
    }

    pub fn neg_ref(&self) -> Self {
        self.map_coeffs(|c| -c)
    }

    pub fn scale(&self, q: &Rational) -> Self {
        if q.is_zero() {
            return Self::zero(&self.ring);
        }
        self.map_coeffs(|c| c * q)
    }

    fn map_coeffs(&self, f: impl Fn(&Rational) -> Rational) -> Self {
        let terms = self.terms.iter().map(|(m, c)| (m.clone(), f(c))).collect();
        GradedElement { ring: self.ring.clone(), terms }
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, AlgError> {
        self.check(other)?;
        Ok(self.mul_unchecked(other))
    }

    fn mul_unchecked(&self, other: &Self) -> Self {
        let ring = &self.ring;
        let cap = ring.cap();
        if self.terms.is_empty() || other.terms.is_empty() {
            return Self::zero(ring);
        }
        let mut rhs: Vec<(u32, &Monomial, &Rational)> =
            other.terms.iter().map(|(m, c)| (ring.degree(m), m, c)).collect();
        rhs.sort_by_key(|t| t.0);
        let mut acc: HashMap<Monomial, Rational> = HashMap::new();
        for (m1, c1) in &self.terms {
            let d1 = ring.degree(m1);
            if d1 > cap {
                continue;
            }
            for (d2, m2, c2) in &rhs {
                if d1 + d2 > cap {
                    break;
                }
                if let Some((m, negative)) = m1.mul(m2) {
                    let c = c1 * *c2;
                    let c = if negative { -c } else { c };
                    match acc.get_mut(&m) {
                        Some(v) => *v += c,
                        None => {
                            acc.insert(m, c);
                        }
                    }
                }
            }
        }
        let terms = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        GradedElement { ring: ring.clone(), terms }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::one(&self.ring);
        for _ in 0..k {
            out = out.mul_unchecked(self);
        }
        out
    }

    /// Keeps only terms satisfying the predicate.
    pub fn filter(&self, keep: impl Fn(&Monomial) -> bool) -> Self {
        let terms = self.terms.iter().filter(|(m, _)| keep(m)).map(|(m, c)| (m.clone(), c.clone())).collect();
        GradedElement { ring: self.ring.clone(), terms }
    }

    pub fn degree_part(&self, d: u32) -> Self {
        let ring = self.ring.clone();
        self.filter(|m| ring.degree(m) == d)
    }

    /// Negates odd-degree terms: the sign picked up when this element is moved
    /// past an odd symbol.
    pub fn parity_twist(&self) -> Self {
        let ring = self.ring.clone();
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| (m.clone(), if ring.degree(m) % 2 == 1 { -c } else { c.clone() }))
            .collect();
        GradedElement { ring: self.ring.clone(), terms }
    }

    pub fn exp(&self) -> Result<Self, AlgError> {
        if !self.constant_term().is_zero() {
            return Err(AlgError::ConstantTerm("exp needs constant term 0".into()));
        }
        let mut out = Self::one(&self.ring);
        let mut power = Self::one(&self.ring);
        let mut k = 1i64;
        loop {
            power = power.mul_unchecked(self).scale(&rational::frac(1, k));
            if power.is_empty() {
                return Ok(out);
            }
            out = out + power.clone();
            k += 1;
        }
    }

    pub fn log(&self) -> Result<Self, AlgError> {
        if self.constant_term() != Rational::one() {
            return Err(AlgError::ConstantTerm("log needs constant term 1".into()));
        }
        let u = self.clone() - Self::one(&self.ring);
        let mut out = Self::zero(&self.ring);
        let mut power = Self::one(&self.ring);
        let mut k = 1i64;
        loop {
            power = power.mul_unchecked(&u);
            if power.is_empty() {
                return Ok(out);
            }
            let sign = if k % 2 == 1 { 1 } else { -1 };
            out = out + power.scale(&rational::frac(sign, k));
            k += 1;
        }
    }

    /// Ring homomorphism into `target` sending generator `i` to `images[i]`.
    /// Odd images must be odd (or zero) for the result to be a homomorphism.
    pub fn substitute(&self, target: &Arc<Ring>, images: &[GradedElement]) -> Result<Self, AlgError> {
        let ring = &self.ring;
        if images.len() != ring.gens().len() {
            return Err(AlgError::Invalid("one image per generator required".into()));
        }
        for im in images {
            if !Arc::ptr_eq(im.ring(), target) && **im.ring() != **target {
                return Err(AlgError::RingMismatch);
            }
        }
        let mut powers: HashMap<(usize, u32), GradedElement> = HashMap::new();
        let mut out = Self::zero(target);
        for (m, c) in &self.terms {
            let mut prod = Self::scalar(target, c.clone());
            for i in 0..ring.gens().len() {
                let e = ring.exponent(m, i);
                if e == 0 {
                    continue;
                }
                let p = powers.entry((i, e)).or_insert_with(|| images[i].pow(e)).clone();
                prod = prod.mul_unchecked(&p);
                if prod.is_empty() {
                    break;
                }
            }
            out = out + prod;
        }
        Ok(out)
    }

    /// Partial derivative with respect to an even generator.
    pub fn derivative(&self, i: usize) -> Result<Self, AlgError> {
        let k = match self.ring.slot(i) {
            Slot::Even(k) => k,
            Slot::Odd(_) => return Err(AlgError::Invalid("derivative only for even generators".into())),
        };
        let mut out = BTreeMap::new();
        for (m, c) in &self.terms {
            let e = m.even[k];
            if e == 0 {
                continue;
            }
            let mut m2 = m.clone();
            m2.even[k] -= 1;
            accumulate(&mut out, m2, c * rational::int(e as i64));
        }
        Ok(GradedElement { ring: self.ring.clone(), terms: out })
    }

    /// Writes `self = Σ_h h·x_h` with `h` a monomial in the selected
    /// generators and `x_h` free of them; returns the map `h ↦ x_h`.
    pub fn split_off(&self, selected: impl Fn(usize) -> bool) -> BTreeMap<Monomial, GradedElement> {
        let mut table: BTreeMap<Monomial, BTreeMap<Monomial, Rational>> = BTreeMap::new();
        for (m, q) in &self.terms {
            let (h, rest) = self.ring.split_monomial(m, &selected);
            let (_, negative) = h.mul(&rest).expect("disjoint factors");
            let q = if negative { -q.clone() } else { q.clone() };
            table.entry(h).or_default().insert(rest, q);
        }
        table
            .into_iter()
            .map(|(h, terms)| (h, GradedElement { ring: self.ring.clone(), terms }))
            .collect()
    }

    /// Coefficients of the powers of generator `i`.
    pub fn powers_of(&self, i: usize) -> BTreeMap<u32, GradedElement> {
        self.split_off(|j| j == i)
            .into_iter()
            .map(|(h, x)| (self.ring.exponent(&h, i), x))
            .collect()
    }

    /// Re-homes the terms in another ring whose generators extend or reorder
    /// this one's, mapping generators by name. Unknown generators are an error.
    pub fn transfer(&self, target: &Arc<Ring>) -> Result<Self, AlgError> {
        let images = self
            .ring
            .gens()
            .iter()
            .map(|g| GradedElement::gen(target, &g.name))
            .collect::<Result<Vec<_>, _>>()?;
        self.substitute(target, &images)
    }

    pub fn is_even(&self) -> bool {
        self.terms.keys().all(|m| self.ring.degree(m).is_multiple_of(2))
    }

    pub fn to_json(&self) -> serde_json::Value {
        let gens: Vec<_> = self
            .ring
            .gens()
            .iter()
            .map(|g| {
                serde_json::json!({
                    "name": g.name,
                    "degree": g.degree,
                    "parity": if g.parity == Parity::Even { "even" } else { "odd" },
                })
            })
            .collect();
        serde_json::json!({
            "generators": gens,
            "degree_cap": self.ring.cap(),
            "terms": self.terms_json(),
        })
    }

    /// Terms only, as `[monomial, "p/q"]` pairs in canonical order.
    pub fn terms_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.terms
                .iter()
                .map(|(m, c)| serde_json::json!([self.ring.format_monomial(m), rational::to_string(c)]))
                .collect(),
        )
    }
}

fn accumulate(map: &mut BTreeMap<Monomial, Rational>, m: Monomial, c: Rational) {
    if c.is_zero() {
        return;
    }
    match map.get_mut(&m) {
        Some(v) => {
            *v += c;
            if v.is_zero() {
                map.remove(&m);
            }
        }
        None => {
            map.insert(m, c);
        }
    }
}

impl fmt::Display for GradedElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| {
                if m.is_unit() {
                    rational::to_string(c)
                } else if c.is_one() {
                    self.ring.format_monomial(m)
                } else {
                    format!("{}*{}", rational::to_string(c), self.ring.format_monomial(m))
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

// Operator impls panic on ring mismatch; use the `try_` forms at API edges.
impl Add for GradedElement {
    type Output = GradedElement;
    fn add(self, rhs: Self) -> Self {
        self.try_add(&rhs).expect("ring mismatch in +")
    }
}

impl Sub for GradedElement {
    type Output = GradedElement;
    fn sub(self, rhs: Self) -> Self {
        self.try_sub(&rhs).expect("ring mismatch in -")
    }
}

impl Mul for GradedElement {
    type Output = GradedElement;
    fn mul(self, rhs: Self) -> Self {
        self.try_mul(&rhs).expect("ring mismatch in *")
    }
}

impl<'a> Mul<&'a GradedElement> for &'a GradedElement {
    type Output = GradedElement;
    fn mul(self, rhs: &GradedElement) -> GradedElement {
        self.try_mul(rhs).expect("ring mismatch in *")
    }
}

impl Neg for GradedElement {
    type Output = GradedElement;
    fn neg(self) -> Self {
        self.neg_ref()
    }
}

impl Algebra for GradedElement {
    fn zero_like(&self) -> Self {
        Self::zero(&self.ring)
    }
    fn one_like(&self) -> Self {
        Self::one(&self.ring)
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn add(&self, other: &Self) -> Self {
        self.try_add(other).expect("ring mismatch in add")
    }
    fn mul(&self, other: &Self) -> Self {
        self.try_mul(other).expect("ring mismatch in mul")
    }
    fn scale(&self, q: &Rational) -> Self {
        GradedElement::scale(self, q)
    }
}
