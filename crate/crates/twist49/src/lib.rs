//! Verification workbench for the quadratic twist family of A = X0(49).
//!
//! A is the elliptic curve y^2 + xy = x^3 - x^2 - 2x - 1 of conductor 49,
//! with complex multiplication by the ring of integers of Q(sqrt(-7)).
//! The crate computes, by at least two independent routes wherever possible:
//!
//! * 2-isogeny Selmer groups of the twists A^(M) (explicit divisor
//!   criteria vs. a local solubility oracle on the homogeneous spaces),
//! * class groups of imaginary quadratic fields and their 2/4/8-ranks
//!   (composition tables vs. Redei matrices vs. torsor searches),
//! * Tamagawa factors and the 2-adic BSD prediction for the family,
//! * central L-values and derivatives of the twisted CM Hecke L-series,
//! * Waldspurger character sums on a definite quaternion algebra,
//! * Heegner point traces on X0(49) through the modular parametrization.

pub mod arith;
pub mod cache;
pub mod classgroup;
pub mod descent;
pub mod heegner;
pub mod lseries;
pub mod periods;
pub mod quaternion;
pub mod report;
pub mod tamagawa;
pub mod waldspurger;

pub use arith::{classify_prime, factor_twist, kronecker, quartic_is_one, FactoredTwist};
