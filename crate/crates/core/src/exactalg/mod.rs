//! Exact rationals, free graded-commutative algebras and truncated series.

mod antisym;
mod element;
pub mod rational;
mod ring;
mod series;

pub use antisym::{antisymmetrize, permutations, BlockAction};
pub use element::GradedElement;
pub use rational::Rational;
pub use ring::{koszul_parity, set_koszul_mutation, GeneratorSpec, Monomial, Parity, Ring, NO_CAP};
pub use series::TSeries;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgError {
    #[error("operands live in different rings")]
    RingMismatch,
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("{0}")]
    ConstantTerm(String),
    #[error("coefficient t^{requested} requested beyond t_cap {cap}")]
    BeyondCap { requested: usize, cap: usize },
    #[error("{0}")]
    Invalid(String),
}

/// The coefficient interface shared by ring elements, surface classes and
/// localized split-coordinate expressions. Operations panic on ring mismatch;
/// callers validate rings at their own API boundary.
pub trait Algebra: Clone + PartialEq {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn scale(&self, q: &Rational) -> Self;

    fn neg(&self) -> Self {
        self.scale(&rational::int(-1))
    }

    fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }
}
