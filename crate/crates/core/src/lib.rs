//! Exact symbolic computations on moduli spaces of bundles over a curve:
//! Harder–Narasimhan strata, Poincaré series, Mumford-type relation classes
//! obtained from Grothendieck–Riemann–Roch, and residue formulas for pairings.

pub mod betti;
pub mod exactalg;
pub mod kunneth;
pub mod parab;
pub mod relgen;
pub mod respair;
pub mod strata;
