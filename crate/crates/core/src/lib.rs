//! Exact-arithmetic calculators for the mod-p geometry of unitary and
//! Hilbert modular varieties.
//!
//! Everything here is integer or finite-field arithmetic; there are no
//! approximations anywhere. The crate provides
//!
//! * [`gfpn`]: arithmetic in GF(p^n), dense linear algebra over it, and the
//!   idempotent decomposition of GF(p^f) ⊗ K;
//! * [`dieudonne`]: explicit mod-p Dieudonne modules with semilinear F and V,
//!   their cotangent spaces, slope decompositions, and the inert duality
//!   pairing;
//! * [`eo`]: shuffle combinatorics for Ekedahl-Oort stratum labels, Bruhat
//!   order, and the r_V invariant attached to each stratum;
//! * [`foliation`]: closed-form rank/dimension calculators for V-foliations,
//!   blow-up fibers, and the cascade dimension identities;
//! * [`hilbert`]: Frobenius orbits of embeddings, weight cones, partial Hasse
//!   weights, a weight-feasibility solver, Goren-Oort stratum bookkeeping,
//!   and a q-expansion derivation calculus;
//! * [`case`]: the JSON case-file format consumed by the `folcalc` CLI.
//!
//! Dimensions are small by design (rank at most 12, orbits at most 6), so all
//! linear algebra is dense and every enumeration is exhaustive. Each derived
//! formula is cross-checked in the test suite against an independent brute
//! force oracle.

pub mod case;
pub mod dieudonne;
pub mod eo;
pub mod foliation;
pub mod gfpn;
pub mod hilbert;
