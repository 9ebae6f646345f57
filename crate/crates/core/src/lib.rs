//! Numerical toolkit for quasiconformal maps of the upper half-plane and
//! their boundary homeomorphisms of the real line.
//!
//! * [`homeo`]: line and circle homeomorphisms, the explicit catalog and
//!   quasisymmetry / doubling / continuity diagnostics.
//! * [`oscillation`]: mean oscillation (BMO/VMO), John–Nirenberg tails,
//!   A∞ and reverse Hölder weight tests, the Hardy–Littlewood maximal
//!   function and pull-back by homeomorphisms.
//! * [`extension`]: Beurling–Ahlfors and barycentric (Douady–Earle)
//!   extensions, the Cayley transform, complex dilatations and hyperbolic
//!   geometry checks.
//! * [`carleson`]: Carleson box masses, norms and vanishing profiles of
//!   dilatation-induced measures.
//! * [`experiments`]: reproducible scenario runners producing JSON reports
//!   and CSV artifacts.

// `!(x > 0.0)` style guards also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod carleson;
pub mod error;
pub mod experiments;
pub mod extension;
pub mod homeo;
pub mod interval;
pub mod oscillation;
pub mod profile;
pub mod quad;

pub use error::{Error, Result};
pub use interval::Interval;
pub use profile::Profile;
