//! Equivalence of algebra elements under the adjoint action combined with
//! rescaling: exact certificates, numeric witness search, witness replay.

pub mod certificate;
pub mod closed_form;
pub mod decision;
pub mod solver;
pub mod target;

pub use certificate::{CertItem, Certificate, CertificateContext, CertificateKind, Level, LevelKind, SymPoint};
pub use target::TargetFamily;
pub use decision::{decide_equivalence, Decision, Engine, EquivOptions};
pub use solver::{ChainProduct, Solution, WitnessProblem};
pub use closed_form::{ClosedForm, ClosedFormReport};
