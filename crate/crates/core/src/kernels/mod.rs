//! Closed-form kernels of one- and two-hidden-layer ReLU networks, the
//! Laplacian baseline, and Gram assembly.

mod arccos;
mod gram;
mod hyper;
mod id;
mod scalar;

pub use arccos::{arc_moments, ArcCosStats, CORRELATION_SLACK};
pub use gram::{cross_kernel, gram_matrix, KernelGram};
pub use hyper::KernelHyperParams;
pub use id::{KernelFamily, KernelId};
pub use scalar::{gp_kernel, laplacian, ntka, ntkb, ntkj};
