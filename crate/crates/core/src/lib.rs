//! Non-signalling correlation boxes with two inputs and two outputs per
//! party: construction and validation, the CHSH, TLM, NPA and
//! information-causality criteria, an exact simulator for the nested random
//! access coding protocol, and scans of two-parameter slices.

#![allow(clippy::needless_range_loop)]

pub mod boxes;
pub mod contour;
pub mod criteria;
pub mod error;
pub mod format;
pub mod io;
pub mod protocol;
pub mod slices;

pub use boxes::{mix, Correlators, NsBox, Relabelling, ValidationReport, Vertex, VertexKind};
pub use criteria::{classify, classify_with, Classification, CriterionResult, Verdict};
pub use error::{Error, Result};
pub use protocol::{min_violating_depth, one_level_success, simulate, ProtocolResult};
pub use slices::{
    analytic_curves, boundary_extract, scan, Curve, SlicePoint, SliceScan, SliceSpec, VerdictPair,
};
