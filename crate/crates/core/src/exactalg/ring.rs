use std::collections::HashMap;
use std::fmt;
use std::cell::Cell;
use std::sync::Arc;

use super::AlgError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GeneratorSpec {
    pub name: String,
    pub degree: u32,
    pub parity: Parity,
}

impl GeneratorSpec {
    pub fn new(name: impl Into<String>, degree: u32) -> Self {
        let parity = if degree.is_multiple_of(2) { Parity::Even } else { Parity::Odd };
        GeneratorSpec { name: name.into(), degree, parity }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Slot {
    Even(usize),
    Odd(usize),
}

/// Largest cap accepted; rings built with it are effectively uncapped.
pub const NO_CAP: u32 = u32::MAX / 4;

/// A free graded-commutative algebra over Q, truncated above `cap`.
#[derive(Debug)]
pub struct Ring {
    gens: Vec<GeneratorSpec>,
    cap: u32,
    slots: Vec<Slot>,
    even_gens: Vec<usize>,
    odd_gens: Vec<usize>,
    by_name: HashMap<String, usize>,
}

impl PartialEq for Ring {
    fn eq(&self, other: &Self) -> bool {
        self.cap == other.cap && self.gens == other.gens
    }
}

impl Ring {
    pub fn new(gens: Vec<GeneratorSpec>, cap: u32) -> Result<Arc<Ring>, AlgError> {
        let mut by_name = HashMap::new();
        let mut slots = Vec::with_capacity(gens.len());
        let (mut even_gens, mut odd_gens) = (Vec::new(), Vec::new());
        for (i, g) in gens.iter().enumerate() {
            if g.degree == 0 {
                return Err(AlgError::Invalid(format!("generator {} has degree 0", g.name)));
            }
            let expect = if g.degree % 2 == 0 { Parity::Even } else { Parity::Odd };
            if g.parity != expect {
                return Err(AlgError::Invalid(format!("generator {} parity disagrees with degree", g.name)));
            }
            if by_name.insert(g.name.clone(), i).is_some() {
                return Err(AlgError::Invalid(format!("duplicate generator {}", g.name)));
            }
            match g.parity {
                Parity::Even => {
                    slots.push(Slot::Even(even_gens.len()));
                    even_gens.push(i);
                }
                Parity::Odd => {
                    slots.push(Slot::Odd(odd_gens.len()));
                    odd_gens.push(i);
                }
            }
        }
        if odd_gens.len() > 128 {
            return Err(AlgError::Invalid("at most 128 odd generators are supported".into()));
        }
        Ok(Arc::new(Ring { gens, cap: cap.min(NO_CAP), slots, even_gens, odd_gens, by_name }))
    }

    pub fn gens(&self) -> &[GeneratorSpec] {
        &self.gens
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.by_name.get(name).copied()
    }

    pub(crate) fn slot(&self, i: usize) -> Slot {
        self.slots[i]
    }

    pub fn n_odd(&self) -> usize {
        self.odd_gens.len()
    }

    /// Same generators, different cap.
    pub fn with_cap(&self, cap: u32) -> Arc<Ring> {
        Ring::new(self.gens.clone(), cap).expect("generators already validated")
    }

    pub fn degree(&self, m: &Monomial) -> u32 {
        let mut d = 0u32;
        for (k, &e) in m.even.iter().enumerate() {
            d += e as u32 * self.gens[self.even_gens[k]].degree;
        }
        let mut bits = m.odd;
        while bits != 0 {
            let k = bits.trailing_zeros() as usize;
            d += self.gens[self.odd_gens[k]].degree;
            bits &= bits - 1;
        }
        d
    }

    pub fn unit_monomial(&self) -> Monomial {
        Monomial { even: vec![0; self.even_gens.len()], odd: 0 }
    }

    pub fn gen_monomial(&self, i: usize) -> Monomial {
        let mut m = self.unit_monomial();
        match self.slots[i] {
            Slot::Even(k) => m.even[k] = 1,
            Slot::Odd(k) => m.odd = 1u128 << k,
        }
        m
    }

    /// Exponent of generator `i` in `m`.
    pub fn exponent(&self, m: &Monomial, i: usize) -> u32 {
        match self.slots[i] {
            Slot::Even(k) => m.even[k] as u32,
            Slot::Odd(k) => ((m.odd >> k) & 1) as u32,
        }
    }

    /// Splits `m` into the factor on the selected generators and the rest.
    pub fn split_monomial(&self, m: &Monomial, selected: impl Fn(usize) -> bool) -> (Monomial, Monomial) {
        let (mut a, mut b) = (self.unit_monomial(), self.unit_monomial());
        for i in 0..self.gens.len() {
            let target = if selected(i) { &mut a } else { &mut b };
            match self.slots[i] {
                Slot::Even(k) => target.even[k] = m.even[k],
                Slot::Odd(k) => target.odd |= m.odd & (1u128 << k),
            }
        }
        (a, b)
    }

    pub fn format_monomial(&self, m: &Monomial) -> String {
        let mut parts = Vec::new();
        for (i, g) in self.gens.iter().enumerate() {
            match self.exponent(m, i) {
                0 => {}
                1 => parts.push(g.name.clone()),
                e => parts.push(format!("{}^{}", g.name, e)),
            }
        }
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("*")
        }
    }
}

/// Packed monomial: exponents of the even generators in ring order, plus a
/// bitmask of the odd generators present. The odd factors are always read in
/// increasing generator order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    pub(crate) even: Vec<u16>,
    pub(crate) odd: u128,
}

impl Monomial {
    pub fn is_unit(&self) -> bool {
        self.odd == 0 && self.even.iter().all(|&e| e == 0)
    }

    pub fn odd_mask(&self) -> u128 {
        self.odd
    }

    pub fn odd_count(&self) -> u32 {
        self.odd.count_ones()
    }

    /// Product with its Koszul sign, or `None` when an odd generator repeats.
    pub fn mul(&self, other: &Monomial) -> Option<(Monomial, bool)> {
        if self.odd & other.odd != 0 {
            return None;
        }
        let negative = koszul_parity(self.odd, other.odd);
        let even = self.even.iter().zip(&other.even).map(|(a, b)| a + b).collect();
        Some((Monomial { even, odd: self.odd | other.odd }, negative))
    }
}

thread_local! {
    static KOSZUL_MUTATION: Cell<bool> = const { Cell::new(false) };
}

/// Drops the sign rule on the calling thread, making odd generators commute.
/// Only meant for mutation testing of the invariant battery; other threads
/// are unaffected.
#[doc(hidden)]
pub fn set_koszul_mutation(on: bool) {
    KOSZUL_MUTATION.with(|m| m.set(on));
}

/// Parity of the number of inversions produced when the odd word `b` is moved
/// behind `a`: pairs (i in a, j in b) with i > j.
pub fn koszul_parity(a: u128, b: u128) -> bool {
    let mut bits = b;
    let mut count = 0u32;
    while bits != 0 {
        let j = bits.trailing_zeros();
        let above = if j >= 127 { 0 } else { a >> (j + 1) };
        count += above.count_ones();
        bits &= bits - 1;
    }
    count % 2 == 1 && !KOSZUL_MUTATION.with(Cell::get)
}

impl fmt::Display for GeneratorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(deg {})", self.name, self.degree)
    }
}
