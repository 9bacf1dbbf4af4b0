//! Dueling double deep-Q agent with multi-step learning.
//!
//! [`network`] holds the function approximator and its hand-rolled
//! gradients, [`replay`] the sliding window and FIFO memory, and [`train`]
//! the ε-greedy training loop, double-Q targets, greedy rollouts, and
//! checkpoint persistence.

pub mod network;
pub mod replay;
pub mod train;

pub use network::{argmax, AgentError, DuelingNetwork, NetworkShape};
pub use replay::{n_step_return, NStepTransition, ReplayMemory, SlidingWindow};
pub use train::{
    ddqn_target, load_checkpoint, plan, save_checkpoint, select_action, train, train_step, Adam,
    EpisodeLog, TrainConfig, Trajectory, CHECKPOINT_SCHEMA_VERSION,
};
