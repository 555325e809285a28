//! Evaluating a reward program over a recorded trace.

use rayon::prelude::*;

use super::EpisodeTrace;
use crate::dsl::{evaluate, Evaluation, RewardProgram};

/// Per-step rewards, in record order. Trapped steps count as 0.0.
pub fn replay(trace: &EpisodeTrace, program: &RewardProgram) -> Vec<f64> {
    trace.snapshots().map(|s| evaluate(program, s).reward).collect()
}

/// Like [`replay`], keeping trap diagnostics.
pub fn replay_evaluations(trace: &EpisodeTrace, program: &RewardProgram) -> Vec<Evaluation> {
    trace.snapshots().map(|s| evaluate(program, s)).collect()
}

/// Parallel replay over chunks of `chunk` records. Equal to [`replay`].
pub fn replay_chunked(trace: &EpisodeTrace, program: &RewardProgram, chunk: usize) -> Vec<f64> {
    trace
        .records
        .par_chunks(chunk.max(1))
        .flat_map_iter(|c| c.iter().map(|r| evaluate(program, &r.snapshot).reward))
        .collect()
}
