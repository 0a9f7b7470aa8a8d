use super::operation::LocalOperation;
use super::protocol::{Protocol, ProtocolStep};
use crate::error::Result;
use crate::rng::{gaussian_matrix, RngSpec};
use crate::scalar::{Amplitude, Real};
use crate::state::Side;
use nalgebra::{Complex, DMatrix};
use rand::Rng;

/// Q factor of a Gaussian matrix with the phases of `diag(R)` folded back in,
/// which makes the columns Haar distributed.
fn haar_columns<T: Real, R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> DMatrix<Amplitude<T>> {
    let g = gaussian_matrix::<T, R>(rows, cols, rng);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for k in 0..cols {
        let d = r[(k, k)];
        let m = d.norm_sqr().sqrt();
        let phase = if m > T::zero() {
            d.unscale(m)
        } else {
            Complex::new(T::one(), T::zero())
        };
        q.column_mut(k).iter_mut().for_each(|z| *z *= phase);
    }
    q
}

pub fn haar_unitary<T: Real, R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DMatrix<Amplitude<T>> {
    haar_columns(dim, dim, rng)
}

/// Two Kraus operators cut from a random isometry `dim → 2·dim`, so
/// `K₀†K₀ + K₁†K₁ = V†V = 1` holds by construction.
pub fn random_kraus_pair<T: Real, R: Rng + ?Sized>(
    dim: usize,
    rng: &mut R,
) -> [DMatrix<Amplitude<T>>; 2] {
    let v = haar_columns::<T, R>(2 * dim, dim, rng);
    [v.rows(0, dim).into_owned(), v.rows(dim, dim).into_owned()]
}

/// `depth` steps on alternating sides (the first side is random), each a Haar
/// unitary or a random two-outcome measurement with equal odds.
pub fn random_protocol<T: Real>(
    dims: (usize, usize),
    depth: usize,
    spec: RngSpec,
) -> Result<Protocol<T>> {
    let mut rng = spec.rng();
    let mut side = if rng.gen_bool(0.5) { Side::A } else { Side::B };
    let mut steps = Vec::with_capacity(depth);
    for _ in 0..depth {
        let dim = match side {
            Side::A => dims.0,
            Side::B => dims.1,
        };
        let op = if rng.gen_bool(0.5) {
            LocalOperation::unitary(side, haar_unitary(dim, &mut rng))?
        } else {
            LocalOperation::measurement(side, random_kraus_pair(dim, &mut rng).to_vec())?
        };
        steps.push(ProtocolStep::always(op));
        side = side.other();
    }
    Ok(Protocol::new(steps))
}
