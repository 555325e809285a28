//! Object-centric reward synthesis: a relational reward language, mini
//! environments emitting object snapshots, a PPO trainer and the multi-turn
//! prompting pipeline that asks a language model for reward programs.

pub mod analysis;
pub mod dsl;
pub mod env;
pub mod fixtures;
pub mod games;
pub mod object;
pub mod run;
pub mod synthesis;
pub mod trainer;

pub use dsl::{compile, evaluate, Diagnostic, Evaluation, Interval, RewardProgram};
pub use games::Game;
pub use object::{GameObject, Snapshot};
