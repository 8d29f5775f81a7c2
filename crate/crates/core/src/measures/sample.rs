//! Reproducible sampling and empirical occupation measures.
//!
//! The generator is ChaCha8 (`rand_chacha`), seeded with `seed_from_u64(seed)`
//! and positioned on stream `stream` via `set_stream`. Uniform variates use the
//! top 53 bits of each `next_u64`: `(x >> 11) · 2^-53`, so every draw lies in
//! `[0, 1)` and the sequence depends only on `(seed, stream)`.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Atom, Interval, MixedMeasure};
use crate::error::{Error, Result};

/// Deterministic random stream identified by `(seed, stream)`.
#[derive(Clone, Debug)]
pub struct Rng {
    seed: u64,
    stream: u64,
    inner: ChaCha8Rng,
}

impl Rng {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        Rng { seed, stream, inner }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// A fresh generator on another stream of the same seed.
    pub fn split(&self, stream: u64) -> Rng {
        Rng::new(self.seed, stream)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        (self.inner.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on `[lo, hi)`.
    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Uniform index in `0..n`.
    pub fn index(&mut self, n: usize) -> usize {
        ((self.uniform() * n as f64) as usize).min(n - 1)
    }
}

enum Block<'a> {
    Atom(f64),
    Piece(&'a super::Piece),
}

/// `n` i.i.d. draws from `p` by inversion of the distribution function.
pub fn sample(p: &MixedMeasure, rng: &mut Rng, n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::Argument("sample size must be positive".into()));
    }
    let mut blocks: Vec<(f64, f64, Block)> = p
        .atoms()
        .iter()
        .map(|a| (a.loc, a.weight, Block::Atom(a.loc)))
        .chain(p.pieces().iter().map(|pc| (pc.lo, pc.mass(), Block::Piece(pc))))
        .collect();
    blocks.sort_by(|a, b| a.0.total_cmp(&b.0));
    let total: f64 = blocks.iter().map(|b| b.1).sum();
    let mut cumulative = Vec::with_capacity(blocks.len());
    let mut acc = 0.0;
    for b in &blocks {
        acc += b.1 / total;
        cumulative.push(acc);
    }

    let draws = (0..n)
        .map(|_| {
            let u = rng.uniform();
            let idx = cumulative.partition_point(|&c| c <= u).min(blocks.len() - 1);
            let before = if idx == 0 { 0.0 } else { cumulative[idx - 1] };
            match &blocks[idx].2 {
                Block::Atom(x) => *x,
                Block::Piece(pc) => invert_piece(pc, (u - before) * total),
            }
        })
        .collect();
    Ok(draws)
}

/// Solves `∫_lo^x density = target` by bisection on the monotone antiderivative.
fn invert_piece(pc: &super::Piece, target: f64) -> f64 {
    let anti = pc.density.antiderivative();
    let base = anti.eval(pc.lo);
    let (mut l, mut r) = (pc.lo, pc.hi);
    for _ in 0..100 {
        let m = 0.5 * (l + r);
        if m <= l || m >= r {
            break;
        }
        if anti.eval(m) - base < target {
            l = m;
        } else {
            r = m;
        }
    }
    0.5 * (l + r)
}

/// Empirical occupation measure: an atom at each distinct sample value with
/// weight `multiplicity / n`.
pub fn empirical_measure(samples: &[f64], domain: Interval) -> Result<MixedMeasure> {
    if samples.is_empty() {
        return Err(Error::Argument("empirical measure of an empty sample".into()));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut atoms: Vec<Atom> = Vec::new();
    let mut count = 0usize;
    for (i, &x) in sorted.iter().enumerate() {
        count += 1;
        let last = i + 1 == sorted.len() || sorted[i + 1] != x;
        if last {
            atoms.push(Atom {
                loc: x,
                weight: count as f64 / n,
            });
            count = 0;
        }
    }
    MixedMeasure::new(domain, atoms, Vec::new())
}
