//! First-order ambisonics (FOA) toolkit.
//!
//! * [`foa`]: encoding, decoding, rotation and directional energy maps on a
//!   sphere grid.
//! * [`spatial`] and [`semantic`]: evaluation metrics (CC, AUC, FAD, KLD).
//! * [`saliency`]: patch-level visual energy from embedding tensors.
//! * [`pattern`]: RVQ code-matrix interleaving patterns.
//! * [`guidance`]: classifier-free guidance and a step-by-step generation
//!   harness with pluggable predictors.
//! * [`curation`]: corpus filtering rules.
//! * [`io`]: file formats.

mod error;

pub mod curation;
pub mod foa;
pub mod guidance;
pub mod io;
pub mod pattern;
pub mod saliency;
pub mod semantic;
pub mod spatial;

pub use error::{Error, ParseError, Result};
