//! Square-norm (Hilbert–Schmidt) geometric correlation quantifiers for
//! two-qubit states.
//!
//! The library computes total (`T_g`), quantum (`D_g`) and classical
//! (`C_g`) geometric correlations together with the closure defect `L_g`
//! for two-qubit X states, the closest product and closest classical states
//! that realize them, Monte Carlo ensembles of random X states and the
//! evolution of X states under two independent non-Markovian
//! amplitude-damping channels.
//!
//! # Basis convention
//!
//! Every 4×4 matrix in this crate is written in the ordered basis
//! `{|11⟩, |10⟩, |01⟩, |00⟩}`. Most libraries put `|00⟩` first; here the
//! excited state `|1⟩` of each qubit is the first basis vector, so that
//! `σ3 = diag(1, -1)` has `|1⟩` as its `+1` eigenvector. Consequently
//! `rho11` is the population of `|11⟩` and `rho44` that of `|00⟩`.

pub mod cli;
pub mod closest;
pub mod dynamics;
pub mod ensemble;
pub mod error;
pub mod format;
pub mod optimize;
pub mod poly;
pub mod quantifiers;
pub mod registry;
pub mod state;
pub mod tolerance;

pub use closest::{CaseId, CaseLabel, ProductPair};
pub use error::{Error, Result};
pub use quantifiers::CorrelationReport;
pub use state::{BlochForm, DensityMatrix4, XStateParams};
pub use tolerance::Tolerances;
