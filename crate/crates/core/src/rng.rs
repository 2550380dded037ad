// Copyright 2026 The symchar Developers
// SPDX-License-Identifier: Apache-2.0

//! Seeded randomness.
//!
//! Every stochastic operation runs on ChaCha8 (`rand_chacha`), whose output
//! is fixed across platforms. Trial `t` of a run uses the generator seeded
//! with the master seed and switched to stream `t`, so each trial's draws
//! depend only on `(master_seed, t)` and never on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type TrialRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> TrialRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent generator for `(master_seed, stream)`.
pub fn stream(master_seed: u64, stream: u64) -> TrialRng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(stream);
    rng
}
