//! Network assembly, loss, and the per-sample backpropagation trainer.

mod loss;
mod network;
mod trainer;

pub use loss::{cross_entropy, PROBABILITY_FLOOR};
pub use network::{BackwardTiming, FeedForwardNetwork};
pub use trainer::{accuracy, evaluate, train, EpochStats, TrainerConfig};
