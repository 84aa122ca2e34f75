//! Exact simulation and stability certificates for event-triggered control
//! of modally truncated infinite-dimensional linear systems.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod linalg;
pub mod model;
pub mod etm;
pub mod sim;
pub mod cert;

pub use error::{Error, Result};
pub use linalg::{CMatrix, HermitianMatrix, C64};
pub use model::{Decomposition, ModalSystem, StateVector, SystemKind};
pub use etm::{EtmSpec, EtmVariant};
pub use sim::{EventLog, Trajectory};
pub use cert::{CertificateReport, Verdict};
