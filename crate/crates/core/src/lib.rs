//! Exact-arithmetic spectral sequences over the rationals.
//!
//! The crate is organized in layers, each usable on its own:
//!
//! * [`qlinalg`] — exact rational matrices, canonical subspaces and the
//!   subspace lattice (sum, intersection, preimage, quotient
//!   presentations).
//! * [`homalg`] — bounded cochain complexes of rational vector spaces,
//!   chain maps, shifts, cones, truncations, filtered and bifiltered
//!   complexes.
//! * [`specseq`] — the spectral sequence engine: pages, differentials,
//!   abutment filtrations, renumeration, translation, morphisms, and the
//!   verifiers for the structural lemmas about them.
//! * [`specobj`] — spectral objects (coherent systems of subquotient
//!   complexes with coboundaries), translation, the graded functor image,
//!   and the realignment construction for shift-exact comparison functors.
//! * [`cellsheaf`] — cellular sheaves on finite face posets, injective
//!   resolutions, supported sections and open pushforwards, flags and
//!   their two filtrations on (hyper)cohomology.
//! * [`gen`] — deterministic seeded instance generators for all of the
//!   above.
//!
//! Everything is computed in exact rational arithmetic; equalities of
//! subspaces are equalities of canonical reduced-row-echelon bases, so the
//! structural identities are checked bit for bit, never up to tolerance.

pub mod cellsheaf;
pub mod gen;
pub mod homalg;
pub mod qlinalg;
pub mod specobj;
pub mod specseq;

mod error;

pub use error::Error;
pub use homalg::{BifilteredSpace, ChainMap, CochainComplex, FilteredComplex};
pub use qlinalg::{LinearMap, Rat, RatMatrix, Subspace};
pub use specseq::{Abutment, SSMorphism, SSSystem, SpectralSequence};
