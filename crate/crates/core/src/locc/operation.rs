use crate::error::{Error, Result};
use crate::scalar::{max_modulus, real, Amplitude, Real};
use crate::state::{BipartiteState, Side};
use nalgebra::DMatrix;

/// Local action on one party. Nothing here ever touches both indices of the
/// coefficient matrix at once, so locality holds by construction.
#[derive(Debug, Clone, PartialEq)]
pub enum OperationKind<T: Real> {
    Unitary(DMatrix<Amplitude<T>>),
    /// Kraus operators `Kᵢ` with `Σ Kᵢ†Kᵢ = 1`; outcome `i` is labeled by its index.
    Measurement(Vec<DMatrix<Amplitude<T>>>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalOperation<T: Real> {
    side: Side,
    kind: OperationKind<T>,
}

impl<T: Real> LocalOperation<T> {
    pub fn unitary(side: Side, u: DMatrix<Amplitude<T>>) -> Result<Self> {
        let tol = T::lit(T::EQ_TOL);
        ensure_square(&u)?;
        let dev = max_modulus(&(u.adjoint() * &u - DMatrix::identity(u.nrows(), u.ncols())));
        if dev > tol {
            return Err(Error::Validation(format!(
                "matrix is not unitary (max |U†U − 1| = {dev})"
            )));
        }
        Ok(Self {
            side,
            kind: OperationKind::Unitary(u),
        })
    }

    pub fn measurement(side: Side, kraus: Vec<DMatrix<Amplitude<T>>>) -> Result<Self> {
        let tol = T::lit(T::EQ_TOL);
        let first = kraus
            .first()
            .ok_or_else(|| Error::Validation("measurement needs at least one Kraus operator".into()))?;
        ensure_square(first)?;
        let d = first.nrows();
        let mut sum = DMatrix::<Amplitude<T>>::zeros(d, d);
        for k in &kraus {
            if k.shape() != (d, d) {
                return Err(Error::Shape(format!(
                    "Kraus operators must all be {d}x{d}, found {}x{}",
                    k.nrows(),
                    k.ncols()
                )));
            }
            sum += k.adjoint() * k;
        }
        let dev = max_modulus(&(sum - DMatrix::identity(d, d)));
        if dev > tol {
            return Err(Error::Validation(format!(
                "Kraus set is incomplete (max |ΣK†K − 1| = {dev})"
            )));
        }
        Ok(Self {
            side,
            kind: OperationKind::Measurement(kraus),
        })
    }

    /// Projective measurement in the computational basis of `side`.
    pub fn computational_measurement(side: Side, dim: usize) -> Result<Self> {
        let kraus = (0..dim)
            .map(|i| {
                let mut p = DMatrix::zeros(dim, dim);
                p[(i, i)] = real(T::one());
                p
            })
            .collect();
        Self::measurement(side, kraus)
    }

    /// Projective measurement onto the orthonormal columns of `basis`.
    pub fn basis_measurement(side: Side, basis: &DMatrix<Amplitude<T>>) -> Result<Self> {
        let kraus = basis
            .column_iter()
            .map(|v| {
                let v = v.into_owned();
                &v * v.adjoint()
            })
            .collect();
        Self::measurement(side, kraus)
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn kind(&self) -> &OperationKind<T> {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        match &self.kind {
            OperationKind::Unitary(u) => u.nrows(),
            OperationKind::Measurement(k) => k[0].nrows(),
        }
    }

    pub fn is_unitary(&self) -> bool {
        matches!(self.kind, OperationKind::Unitary(_))
    }

    /// Number of classical outcomes (1 for a unitary).
    pub fn outcomes(&self) -> usize {
        match &self.kind {
            OperationKind::Unitary(_) => 1,
            OperationKind::Measurement(k) => k.len(),
        }
    }

    pub(crate) fn check_fits(&self, s: &BipartiteState<T>) -> Result<()> {
        if self.dim() != s.dim(self.side) {
            return Err(Error::Shape(format!(
                "{}-dimensional operation on side {:?} of a {}x{} state",
                self.dim(),
                self.side,
                s.dim_a(),
                s.dim_b()
            )));
        }
        Ok(())
    }
}

fn ensure_square<T: Real>(m: &DMatrix<Amplitude<T>>) -> Result<()> {
    if m.nrows() != m.ncols() || m.nrows() == 0 {
        return Err(Error::Shape(format!(
            "local operator must be square and nonempty, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(())
}

/// `X` acting on `side`: `X·M` for Alice, `M·Xᵀ` for Bob. Unnormalized.
pub(crate) fn act<T: Real>(
    side: Side,
    x: &DMatrix<Amplitude<T>>,
    amps: &DMatrix<Amplitude<T>>,
) -> DMatrix<Amplitude<T>> {
    match side {
        Side::A => x * amps,
        Side::B => amps * x.transpose(),
    }
}
