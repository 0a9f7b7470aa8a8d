//! Counter-based random streams.
//!
//! A [`RngSpec`] names one ChaCha20 stream: the seed selects the key and the
//! stream index selects the nonce. Trial `t` of a sweep draws from stream `t`,
//! so results do not depend on the order in which trials are evaluated.

use crate::scalar::{Amplitude, Real};
use nalgebra::{Complex, DMatrix};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngSpec {
    pub seed: u64,
    pub stream_index: u64,
}

impl RngSpec {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            stream_index: 0,
        }
    }

    pub fn with_stream(seed: u64, stream_index: u64) -> Self {
        Self { seed, stream_index }
    }

    /// Same seed, a different stream.
    pub fn stream(self, stream_index: u64) -> Self {
        Self {
            seed: self.seed,
            stream_index,
        }
    }

    pub fn rng(&self) -> ChaCha20Rng {
        let mut rng = ChaCha20Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_index);
        rng
    }
}

pub(crate) fn complex_gaussian<T: Real, R: rand::Rng + ?Sized>(rng: &mut R) -> Amplitude<T> {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex::new(T::lit(re), T::lit(im))
}

/// `rows × cols` matrix of i.i.d. standard complex Gaussians, filled row-major.
pub(crate) fn gaussian_matrix<T: Real, R: rand::Rng + ?Sized>(
    rows: usize,
    cols: usize,
    rng: &mut R,
) -> DMatrix<Amplitude<T>> {
    let mut data = Vec::with_capacity(rows * cols);
    for _ in 0..rows * cols {
        data.push(complex_gaussian(rng));
    }
    DMatrix::from_row_slice(rows, cols, &data)
}
