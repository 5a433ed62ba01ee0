//! Finite-width fully connected ReLU networks in NTK parameterisation.
//!
//! Layer `l` computes `z_l = b_l + W_l·(factor_l · a_l)` with `a_0 = x`,
//! `a_l = relu(z_{l−1})`, `factor_l = √(c_l/n_l)` for hidden inputs and 1 (or
//! `1/√n₀`, see [`InputScaling`]) for the raw input. The last layer has a
//! single output unit.

mod backprop;
mod network;
mod train;

pub use backprop::{backward, empirical_ntk, forward, output_gradient, ActivationCache};
pub use network::{init_network, InputScaling, Layer, NetworkArch, NetworkParams};
pub use train::{predict, train_sgd, weighted_gradient, BatchSize, TrainConfig, TrainOutcome};
