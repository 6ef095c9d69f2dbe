//! The spectral sequence engine.
//!
//! A [`SpectralSequence`] stores its pages from the first page up to the
//! turning page (after which nothing moves), each slot presented as a
//! subquotient of the ambient filtered complex whenever the sequence is
//! complex-backed. The [`Abutment`] carries the limit filtration in both
//! the `F`- and the re-numbered `L`-indexing.

mod engine;
mod morphism;
mod verify;

pub use engine::{
    compute_ss, Abutment, AbutmentGroup, IndexScheme, Page, SlotSpace, SpectralSequence,
};
pub use morphism::{induced_map, induced_map_shifted, SSMorphism};
pub use verify::{
    check_pippa, check_ssis, shift_compat_check, verify_descrfiltr, DescrReport, PippaDiagram,
    PippaOutcome, SSSystem, ShiftCompatReport, SsisReport, Variant,
};
