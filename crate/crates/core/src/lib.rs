//! Exact arithmetic for degree-p Artin-Schreier and Kummer extensions of
//! valued fields: best-generator classification, generator normalization,
//! Swan conductors, ramification and defect invariants, and sample-level
//! checks of the norm identity relating the Lefschetz and Swan ideals.

#![allow(clippy::result_large_err, clippy::large_enum_variant)]

pub mod best_f;
pub mod dsl;
pub mod extension;
pub mod kummer;
pub mod norm_ideal;
pub mod residue;
pub mod series;
pub mod value_group;

pub use best_f::{AsClassification, AsVerdict, ExtType, InvariantsReport, NormalizeOutcome};
pub use dsl::{parse_expr, ParseError};
pub use extension::{ASExtension, ExtElt};
pub use kummer::{CycloElt, CycloField, KummerClassification, KummerOutcome, KummerVerdict};
pub use residue::{Gf, GfField, GfPoly, ResidueElt, ResidueField};
pub use series::{SeriesElt, SeriesField};
pub use value_group::{GroupElt, GroupKind, ValueGroup};
