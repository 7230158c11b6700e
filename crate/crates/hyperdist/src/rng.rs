//! Seed derivation for reproducible, parallelism-independent sampling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Generator for task number `task` under master seed `seed`.
///
/// Every task gets its own ChaCha stream under the same key, so a result
/// assembled from per-task draws does not depend on how the tasks were
/// scheduled across threads.
pub fn derive_rng(seed: u64, task: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(task);
    rng
}
