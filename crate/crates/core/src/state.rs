//! Bipartite pure states, reduced density operators and the JSON state format.
//!
//! A state of an `A|B` pair is held as its `dim_a × dim_b` coefficient matrix
//! `M`, with `|ψ⟩ = Σᵢⱼ M[i,j] |i⟩_A |j⟩_B`. Composite systems built by
//! [`tensor_product`] use the flattening `a₁·dim_a₂ + a₂` on Alice's side and
//! `b₁·dim_b₂ + b₂` on Bob's; the JSON file format lists `M` row-major.

use crate::error::{Error, Result};
use crate::rng::{gaussian_matrix, RngSpec};
use crate::scalar::{real, Amplitude, Real, Tolerances};
use nalgebra::{Complex, DMatrix};
use serde::{Deserialize, Serialize};

/// Default cap on the number of amplitudes (`dim_a · dim_b`) a state may hold.
pub const DEFAULT_DIMENSION_CAP: usize = 1 << 20;

/// Norm tolerance applied when loading states from files.
pub const FILE_NORM_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    A,
    B,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::A => Side::B,
            Side::B => Side::A,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteState<T: Real> {
    amps: DMatrix<Amplitude<T>>,
}

impl<T: Real> BipartiteState<T> {
    /// Wraps a coefficient matrix, requiring `|Σ|Mᵢⱼ|² − 1| ≤ T::NORM_TOL`.
    pub fn new(amps: DMatrix<Amplitude<T>>) -> Result<Self> {
        Self::with_tolerance(amps, T::lit(T::NORM_TOL))
    }

    pub fn with_tolerance(amps: DMatrix<Amplitude<T>>, norm_tol: T) -> Result<Self> {
        check_dims(amps.nrows(), amps.ncols())?;
        let n2 = norm_sq(&amps);
        if (n2 - T::one()).abs() > norm_tol {
            return Err(Error::Norm {
                norm_sq: n2.as_f64(),
                tolerance: norm_tol.as_f64(),
            });
        }
        Ok(Self { amps })
    }

    /// Rescales any nonzero coefficient matrix to unit norm.
    pub fn normalized(mut amps: DMatrix<Amplitude<T>>) -> Result<Self> {
        check_dims(amps.nrows(), amps.ncols())?;
        let n2 = norm_sq(&amps);
        if !(n2 > T::zero()) || !n2.is_finite() {
            return Err(Error::Validation(format!(
                "cannot normalize a state with norm² {n2}"
            )));
        }
        let inv = T::one() / n2.sqrt();
        amps.iter_mut().for_each(|z| *z = z.scale(inv));
        Ok(Self { amps })
    }

    pub fn from_row_major(dim_a: usize, dim_b: usize, amps: &[Amplitude<T>]) -> Result<Self> {
        check_dims(dim_a, dim_b)?;
        if amps.len() != dim_a * dim_b {
            return Err(Error::Shape(format!(
                "{} amplitudes given for a {dim_a}x{dim_b} state",
                amps.len()
            )));
        }
        Self::new(DMatrix::from_row_slice(dim_a, dim_b, amps))
    }

    /// `√p₀|00⟩ + √p₁|11⟩ + …` on a `d × d` system, `d = probs.len()`.
    pub fn from_schmidt_probabilities(probs: &[T]) -> Result<Self> {
        let d = probs.len();
        let mut amps = DMatrix::zeros(d, d);
        for (i, &p) in probs.iter().enumerate() {
            if p < T::zero() {
                return Err(Error::Validation(format!("negative weight {p}")));
            }
            amps[(i, i)] = real(p.sqrt());
        }
        Self::normalized(amps)
    }

    /// The singlet `(|01⟩ − |10⟩)/√2`.
    pub fn singlet() -> Self {
        let h = T::lit(std::f64::consts::FRAC_1_SQRT_2);
        let mut amps = DMatrix::zeros(2, 2);
        amps[(0, 1)] = real(h);
        amps[(1, 0)] = real(-h);
        Self { amps }
    }

    /// Computational basis product state `|i⟩_A |j⟩_B`.
    pub fn basis(dim_a: usize, dim_b: usize, i: usize, j: usize) -> Result<Self> {
        check_dims(dim_a, dim_b)?;
        if i >= dim_a || j >= dim_b {
            return Err(Error::Shape(format!(
                "basis index ({i},{j}) outside {dim_a}x{dim_b}"
            )));
        }
        let mut amps = DMatrix::zeros(dim_a, dim_b);
        amps[(i, j)] = real(T::one());
        Ok(Self { amps })
    }

    /// `|a⟩ ⊗ |b⟩`, normalizing each factor.
    pub fn product(a: &[Amplitude<T>], b: &[Amplitude<T>]) -> Result<Self> {
        let col = DMatrix::from_column_slice(a.len(), 1, a);
        let row = DMatrix::from_row_slice(1, b.len(), b);
        Self::normalized(col * row)
    }

    pub fn dim_a(&self) -> usize {
        self.amps.nrows()
    }

    pub fn dim_b(&self) -> usize {
        self.amps.ncols()
    }

    pub fn dim(&self, side: Side) -> usize {
        match side {
            Side::A => self.dim_a(),
            Side::B => self.dim_b(),
        }
    }

    pub fn amps(&self) -> &DMatrix<Amplitude<T>> {
        &self.amps
    }

    pub fn into_amps(self) -> DMatrix<Amplitude<T>> {
        self.amps
    }

    pub fn amplitude(&self, i: usize, j: usize) -> Amplitude<T> {
        self.amps[(i, j)]
    }

    pub fn norm_sq(&self) -> T {
        norm_sq(&self.amps)
    }

    /// Amplitudes flattened row-major (index `i·dim_b + j`).
    pub fn row_major(&self) -> Vec<Amplitude<T>> {
        let mut out = Vec::with_capacity(self.amps.len());
        for i in 0..self.dim_a() {
            for j in 0..self.dim_b() {
                out.push(self.amps[(i, j)]);
            }
        }
        out
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Result<Amplitude<T>> {
        same_shape(self, other)?;
        Ok(self
            .amps
            .iter()
            .zip(other.amps.iter())
            .fold(Complex::new(T::zero(), T::zero()), |acc, (x, y)| {
                acc + x.conj() * y
            }))
    }

    pub fn tensor(&self, other: &Self) -> Result<Self> {
        tensor_product(self, other)
    }

    pub fn reduced(&self, side: Side) -> DensityOperator<T> {
        partial_trace(self, side)
    }

    pub fn to_file(&self) -> StateFile {
        StateFile {
            dim_a: self.dim_a(),
            dim_b: self.dim_b(),
            amps: self
                .row_major()
                .into_iter()
                .map(|z| [z.re.as_f64(), z.im.as_f64()])
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("state serialization is infallible")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: StateFile = serde_json::from_str(text)?;
        file.into_state()
    }
}

fn check_dims(dim_a: usize, dim_b: usize) -> Result<()> {
    if dim_a == 0 || dim_b == 0 {
        return Err(Error::Shape(format!(
            "state dimensions must be positive, got {dim_a}x{dim_b}"
        )));
    }
    Ok(())
}

fn same_shape<T: Real>(s1: &BipartiteState<T>, s2: &BipartiteState<T>) -> Result<()> {
    if s1.amps.shape() != s2.amps.shape() {
        return Err(Error::Shape(format!(
            "{}x{} vs {}x{}",
            s1.dim_a(),
            s1.dim_b(),
            s2.dim_a(),
            s2.dim_b()
        )));
    }
    Ok(())
}

pub(crate) fn norm_sq<T: Real>(m: &DMatrix<Amplitude<T>>) -> T {
    m.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr())
}

/// On-disk representation: `{"dim_a", "dim_b", "amps": [[re, im], ...]}`, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    pub dim_a: usize,
    pub dim_b: usize,
    pub amps: Vec<[f64; 2]>,
}

impl StateFile {
    /// Rejects `|‖ψ‖ − 1| > 1e-6`; smaller deviations are renormalized away.
    pub fn into_state<T: Real>(self) -> Result<BipartiteState<T>> {
        check_dims(self.dim_a, self.dim_b)?;
        if self.amps.len() != self.dim_a * self.dim_b {
            return Err(Error::Shape(format!(
                "{} amplitudes given for a {}x{} state",
                self.amps.len(),
                self.dim_a,
                self.dim_b
            )));
        }
        if self.amps.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::Parse("non-finite amplitude".into()));
        }
        let n2: f64 = self.amps.iter().map(|[r, i]| r * r + i * i).sum();
        if (n2.sqrt() - 1.0).abs() > FILE_NORM_TOLERANCE {
            return Err(Error::Norm {
                norm_sq: n2,
                tolerance: FILE_NORM_TOLERANCE,
            });
        }
        let data: Vec<Amplitude<T>> = self
            .amps
            .iter()
            .map(|&[r, i]| Complex::new(T::lit(r), T::lit(i)))
            .collect();
        BipartiteState::normalized(DMatrix::from_row_slice(self.dim_a, self.dim_b, &data))
    }
}

/// Encodes a matrix as a row-major list of `[re, im]` pairs.
pub fn encode_matrix<T: Real>(m: &DMatrix<Amplitude<T>>) -> Vec<[f64; 2]> {
    let mut out = Vec::with_capacity(m.len());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            out.push([m[(i, j)].re.as_f64(), m[(i, j)].im.as_f64()]);
        }
    }
    out
}

/// Decodes a square matrix from a row-major list of `[re, im]` pairs.
pub fn decode_square_matrix<T: Real>(pairs: &[[f64; 2]]) -> Result<DMatrix<Amplitude<T>>> {
    let d = (pairs.len() as f64).sqrt().round() as usize;
    if d == 0 || d * d != pairs.len() {
        return Err(Error::Shape(format!(
            "{} entries do not form a square matrix",
            pairs.len()
        )));
    }
    let data: Vec<Amplitude<T>> = pairs
        .iter()
        .map(|&[r, i]| Complex::new(T::lit(r), T::lit(i)))
        .collect();
    Ok(DMatrix::from_row_slice(d, d, &data))
}

/// Reduced state of one party.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator<T: Real> {
    mat: DMatrix<Amplitude<T>>,
}

impl<T: Real> DensityOperator<T> {
    /// Validates hermiticity, unit trace and positivity with default tolerances.
    pub fn new(mat: DMatrix<Amplitude<T>>) -> Result<Self> {
        let rho = Self { mat };
        rho.validate(&Tolerances::default())?;
        Ok(rho)
    }

    pub(crate) fn from_unchecked(mat: DMatrix<Amplitude<T>>) -> Self {
        Self { mat }
    }

    pub fn from_diagonal(probs: &[T]) -> Result<Self> {
        let d = probs.len();
        let mut mat = DMatrix::zeros(d, d);
        for (i, &p) in probs.iter().enumerate() {
            mat[(i, i)] = real(p);
        }
        Self::new(mat)
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        let p = T::one() / T::lit(dim as f64);
        Self::from_diagonal(&vec![p; dim])
    }

    /// `|v⟩⟨v|` for a normalized vector `v`.
    pub fn projector(v: &[Amplitude<T>]) -> Result<Self> {
        let col = DMatrix::from_column_slice(v.len(), 1, v);
        Self::new(&col * col.adjoint())
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Amplitude<T>> {
        &self.mat
    }

    pub fn trace(&self) -> Amplitude<T> {
        self.mat.trace()
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> T {
        // Tr ρ² = Σᵢⱼ |ρᵢⱼ|² for Hermitian ρ
        norm_sq(&self.mat)
    }

    /// Eigenvalues in descending order.
    pub fn eigenvalues(&self) -> Result<Vec<T>> {
        hermitian_eigenvalues(&self.mat)
    }

    pub fn validate(&self, tol: &Tolerances<T>) -> Result<()> {
        let (r, c) = self.mat.shape();
        if r != c || r == 0 {
            return Err(Error::Shape(format!("density operator must be square, got {r}x{c}")));
        }
        for i in 0..r {
            for j in i..r {
                let d = self.mat[(i, j)] - self.mat[(j, i)].conj();
                if d.norm_sqr().sqrt() > tol.equality {
                    return Err(Error::Validation(format!(
                        "not Hermitian at ({i},{j}): deviation {}",
                        d.norm_sqr().sqrt()
                    )));
                }
            }
        }
        let tr = self.trace();
        if (tr.re - T::one()).abs() > tol.norm.max(tol.equality) || tr.im.abs() > tol.equality {
            return Err(Error::Validation(format!("trace {tr} is not 1")));
        }
        let min = self
            .eigenvalues()?
            .last()
            .copied()
            .unwrap_or_else(T::zero);
        if min < -tol.eig_clamp {
            return Err(Error::Validation(format!(
                "negative eigenvalue {min} below clamp window"
            )));
        }
        Ok(())
    }
}

pub(crate) fn hermitian_eigenvalues<T: Real>(m: &DMatrix<Amplitude<T>>) -> Result<Vec<T>> {
    let n = m.nrows();
    if n == 1 {
        return Ok(vec![m[(0, 0)].re]);
    }
    let eig = m
        .clone()
        .try_symmetric_eigen(T::default_epsilon(), 1000 * n)
        .ok_or_else(|| Error::Computation("Hermitian eigendecomposition did not converge".into()))?;
    let mut vals: Vec<T> = eig.eigenvalues.iter().copied().collect();
    if vals.iter().any(|v| !v.is_finite()) {
        return Err(Error::Computation("non-finite eigenvalue".into()));
    }
    vals.sort_by(|a, b| b.partial_cmp(a).expect("finite"));
    Ok(vals)
}

/// `s₁ ⊗ s₂` with composite sides `A₁A₂ | B₁B₂`.
pub fn tensor_product<T: Real>(
    s1: &BipartiteState<T>,
    s2: &BipartiteState<T>,
) -> Result<BipartiteState<T>> {
    tensor_product_with_cap(s1, s2, DEFAULT_DIMENSION_CAP)
}

pub fn tensor_product_with_cap<T: Real>(
    s1: &BipartiteState<T>,
    s2: &BipartiteState<T>,
    cap: usize,
) -> Result<BipartiteState<T>> {
    let total = [s1.dim_a(), s1.dim_b(), s2.dim_a(), s2.dim_b()]
        .iter()
        .fold(1u128, |acc, &d| acc.saturating_mul(d as u128));
    if total > cap as u128 {
        return Err(Error::Capacity {
            what: "tensor product amplitudes",
            requested: total,
            cap: cap as u128,
        });
    }
    // kronecker row index is a₁·dim_a₂ + a₂, column index b₁·dim_b₂ + b₂
    BipartiteState::normalized(s1.amps.kronecker(&s2.amps))
}

/// Reduced density operator of `side`: `ρ_A = M M†`, `ρ_B = Mᵀ M̄`.
pub fn partial_trace<T: Real>(s: &BipartiteState<T>, side: Side) -> DensityOperator<T> {
    let m = &s.amps;
    let mat = match side {
        Side::A => m * m.adjoint(),
        Side::B => m.transpose() * m.map(|z| z.conj()),
    };
    DensityOperator::from_unchecked(hermitize(mat))
}

fn hermitize<T: Real>(m: DMatrix<Amplitude<T>>) -> DMatrix<Amplitude<T>> {
    let half = T::lit(0.5);
    (&m + m.adjoint()).map(|z| z.scale(half))
}

/// `|⟨s₁|s₂⟩|²`.
pub fn fidelity<T: Real>(s1: &BipartiteState<T>, s2: &BipartiteState<T>) -> Result<T> {
    let f = s1.inner(s2)?.norm_sqr();
    Ok(f.min(T::one()).max(T::zero()))
}

/// Gaussian random state, rotation invariant; deterministic in `rng`.
pub fn random_state<T: Real>(dim_a: usize, dim_b: usize, rng: RngSpec) -> Result<BipartiteState<T>> {
    random_state_from(dim_a, dim_b, &mut rng.rng())
}

pub(crate) fn random_state_from<T: Real, R: rand::Rng + ?Sized>(
    dim_a: usize,
    dim_b: usize,
    rng: &mut R,
) -> Result<BipartiteState<T>> {
    check_dims(dim_a, dim_b)?;
    BipartiteState::normalized(gaussian_matrix(dim_a, dim_b, rng))
}
