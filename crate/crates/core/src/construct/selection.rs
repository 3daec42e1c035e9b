//! Seeded labeling-batch selection.
//!
//! Sampling uses ChaCha8 keyed with the seed as 8 little-endian bytes followed
//! by 24 zero bytes. The not-covered quota is drawn on stream 0, the random
//! sample on stream 1. Each draw is a partial Fisher-Yates shuffle over ids in
//! ascending byte order, taking uniform indices by rejection from 64-bit words.

use std::collections::HashSet;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::Serialize;

use super::partition::{partition, CoverMode};
use crate::error::{Error, Result};
use crate::schema::Dataset;

const NOT_COVERED_STREAM: u64 = 0;
const RANDOM_STREAM: u64 = 1;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelectionRequest {
    pub t: usize,
    pub n_random: usize,
    pub n_not_covered: usize,
    pub mode: CoverMode,
    pub region_factor: Option<String>,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SelectionPlan {
    pub seed: u64,
    pub mode: CoverMode,
    /// Size of the pool's not-covered stratum under `mode`.
    pub stratum_size: usize,
    /// Not-covered quota that could not be met because the stratum ran out.
    pub shortfall: usize,
    /// In draw order.
    pub not_covered_ids: Vec<String>,
    /// In draw order, disjoint from `not_covered_ids`.
    pub random_ids: Vec<String>,
}

impl SelectionPlan {
    /// Not-covered picks followed by random picks.
    pub fn batch(&self) -> impl Iterator<Item = &str> {
        self.not_covered_ids
            .iter()
            .chain(&self.random_ids)
            .map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.not_covered_ids.len() + self.random_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(stream);
    rng
}

/// Uniform integer in `0..bound` by rejection sampling.
fn below(rng: &mut ChaCha8Rng, bound: usize) -> usize {
    let bound = bound as u64;
    let zone = u64::MAX - (u64::MAX % bound);
    loop {
        let x = rng.next_u64();
        if x < zone {
            return (x % bound) as usize;
        }
    }
}

/// Draws `count` items uniformly without replacement, in draw order.
fn draw(mut items: Vec<String>, count: usize, rng: &mut ChaCha8Rng) -> Vec<String> {
    let count = count.min(items.len());
    for i in 0..count {
        let j = i + below(rng, items.len() - i);
        items.swap(i, j);
    }
    items.truncate(count);
    items
}

/// Mixes a quota of not-covered pool records into a seeded random sample.
///
/// The not-covered quota is drawn first; the random sample is then drawn
/// from the pool records not already picked.
pub fn select_labeling_batch(
    pool: &Dataset,
    source: &Dataset,
    request: &SelectionRequest,
) -> Result<SelectionPlan> {
    let requested = request.n_random.saturating_add(request.n_not_covered);
    if requested > pool.len() {
        return Err(Error::Selection {
            pool: pool.len(),
            n_random: request.n_random,
            n_not_covered: request.n_not_covered,
        });
    }
    pool.check_same_schema(source)?;
    pool.schema().check_strength(request.t)?;

    let mut stratum: Vec<String> = if pool.is_empty() {
        Vec::new()
    } else {
        partition(
            pool,
            source,
            request.t,
            request.mode,
            request.region_factor.as_deref(),
        )?
        .not_covered_ids()
        .into_iter()
        .map(String::from)
        .collect()
    };
    stratum.sort_unstable();
    let stratum_size = stratum.len();

    let not_covered_ids = draw(
        stratum,
        request.n_not_covered,
        &mut stream(request.seed, NOT_COVERED_STREAM),
    );
    let taken: HashSet<&str> = not_covered_ids.iter().map(String::as_str).collect();
    let mut remainder: Vec<String> = pool
        .records()
        .iter()
        .map(|r| r.id.as_str())
        .filter(|id| !taken.contains(id))
        .map(String::from)
        .collect();
    remainder.sort_unstable();
    let random_ids = draw(
        remainder,
        request.n_random,
        &mut stream(request.seed, RANDOM_STREAM),
    );

    Ok(SelectionPlan {
        seed: request.seed,
        mode: request.mode,
        stratum_size,
        shortfall: request.n_not_covered - not_covered_ids.len(),
        not_covered_ids,
        random_ids,
    })
}
