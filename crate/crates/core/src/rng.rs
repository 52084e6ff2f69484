//! Portable random stream: ChaCha8 keyed by a 64-bit seed, uniforms from the
//! top 53 bits of each word, Gaussians by Box–Muller. The same seed yields the
//! same sequence on every platform.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::matcore::{Mat, SymMatrix};

#[derive(Clone, Debug)]
pub struct Stream {
    rng: ChaCha8Rng,
    spare: Option<f64>,
}

impl Stream {
    pub fn new(seed: u64) -> Self {
        Stream {
            rng: ChaCha8Rng::seed_from_u64(seed),
            spare: None,
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on `[lo, hi)`.
    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Uniform integer in `0..n`.
    pub fn below(&mut self, n: usize) -> usize {
        ((self.uniform() * n as f64) as usize).min(n.saturating_sub(1))
    }

    /// Standard normal. Draws come in Box–Muller pairs; the cosine branch is
    /// returned first.
    pub fn gaussian(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = std::f64::consts::TAU * u2;
        self.spare = Some(r * theta.sin());
        r * theta.cos()
    }

    pub fn gaussians(&mut self, n: usize) -> Vec<f64> {
        (0..n).map(|_| self.gaussian()).collect()
    }

    pub fn gaussian_mat(&mut self, rows: usize, cols: usize) -> Mat {
        Mat::from_fn(rows, cols, |_, _| self.gaussian())
    }
}

/// `GᵀG + eps·I` with `G` an `n×n` standard normal matrix.
pub fn random_spd(stream: &mut Stream, n: usize, eps: f64) -> SymMatrix {
    let g = stream.gaussian_mat(n, n);
    gram_plus_floor(&g, eps)
}

/// `GᵀG + eps·I`, symmetric by construction.
pub fn gram_plus_floor(g: &Mat, eps: f64) -> SymMatrix {
    let n = g.cols();
    SymMatrix::from_upper(n, |i, j| {
        let mut s = 0.0;
        for k in 0..g.rows() {
            s += g[(k, i)] * g[(k, j)];
        }
        if i == j {
            s + eps
        } else {
            s
        }
    })
}
