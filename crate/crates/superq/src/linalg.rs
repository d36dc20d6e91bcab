//! Dense complex linear algebra for small Hermitian systems (d = 2 or 4):
//! eigendecomposition, spectral matrix exponentials, Frobenius norms, and
//! Bloch decompositions.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Relative tolerance for the Hermiticity check at construction.
pub const HERMITICITY_TOL: f64 = 1e-12;
/// Tolerance on the Euclidean norm of a state vector.
pub const STATE_NORM_TOL: f64 = 1e-10;

pub fn identity(dim: usize) -> CMatrix {
    CMatrix::identity(dim, dim)
}

pub fn sigma_x() -> CMatrix {
    CMatrix::from_row_slice(
        2,
        2,
        &[
            C64::new(0.0, 0.0),
            C64::new(1.0, 0.0),
            C64::new(1.0, 0.0),
            C64::new(0.0, 0.0),
        ],
    )
}

pub fn sigma_y() -> CMatrix {
    CMatrix::from_row_slice(
        2,
        2,
        &[
            C64::new(0.0, 0.0),
            C64::new(0.0, -1.0),
            C64::new(0.0, 1.0),
            C64::new(0.0, 0.0),
        ],
    )
}

pub fn sigma_z() -> CMatrix {
    CMatrix::from_row_slice(
        2,
        2,
        &[
            C64::new(1.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(-1.0, 0.0),
        ],
    )
}

/// Kronecker product, first factor on the left (slow index).
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// √(Σ|M_ij|²). Zero iff M = 0.
pub fn frobenius_norm(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn max_abs_entry(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// A d×d Hermitian operator in angular-frequency units (rad/s, ħ = 1).
///
/// Hermiticity is enforced at construction to within [`HERMITICITY_TOL`]
/// relative to the largest entry magnitude.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    matrix: CMatrix,
}

impl HermitianOperator {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::NotSquare {
                rows: matrix.nrows(),
                cols: matrix.ncols(),
            });
        }
        let scale = max_abs_entry(&matrix);
        let mut deviation = 0.0f64;
        for i in 0..matrix.nrows() {
            for j in i..matrix.ncols() {
                deviation = deviation.max((matrix[(i, j)] - matrix[(j, i)].conj()).norm());
            }
        }
        if deviation > HERMITICITY_TOL * scale {
            return Err(Error::NonHermitian {
                deviation,
                tolerance: HERMITICITY_TOL * scale,
            });
        }
        Ok(Self { matrix })
    }

    /// Construction without the Hermiticity check, for matrices that are
    /// Hermitian by algebra (real linear combinations of checked operators).
    pub(crate) fn new_unchecked(matrix: CMatrix) -> Self {
        Self { matrix }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            matrix: self.matrix.map(|z| z * factor),
        }
    }
}

/// A normalized pure state; basis labels run |0⟩, |1⟩, ... with
/// |↑⟩ ≡ |0⟩ and |↓⟩ ≡ |1⟩ for a single spin.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: CVector,
}

impl StateVector {
    pub fn new(amplitudes: CVector) -> Result<Self> {
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > STATE_NORM_TOL {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self { amplitudes })
    }

    pub(crate) fn new_unchecked(amplitudes: CVector) -> Self {
        Self { amplitudes }
    }

    /// Computational basis state |k⟩ of dimension `dim`.
    pub fn basis(dim: usize, k: usize) -> Self {
        let mut v = CVector::zeros(dim);
        v[k] = C64::new(1.0, 0.0);
        Self { amplitudes: v }
    }

    /// The Bell state (|00⟩ + |11⟩)/√2.
    pub fn bell() -> Self {
        let s = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let mut v = CVector::zeros(4);
        v[0] = s;
        v[3] = s;
        Self { amplitudes: v }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }
}

/// Eigendecomposition of a Hermitian operator: ascending real eigenvalues
/// and a unitary matrix whose columns are the matching eigenvectors.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    pub values: DVector<f64>,
    pub vectors: CMatrix,
}

impl EigenSystem {
    /// V·diag(values)·V†.
    pub fn reconstruct(&self) -> CMatrix {
        let d = self.values.len();
        let diag = CMatrix::from_fn(d, d, |i, j| {
            if i == j {
                C64::new(self.values[i], 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        &self.vectors * diag * self.vectors.adjoint()
    }
}

/// Fix the phase of each column so that its largest-magnitude entry is
/// real and positive. Ties resolve to the lowest row index.
fn canonicalize_columns(vectors: &mut CMatrix) {
    let (d, cols) = (vectors.nrows(), vectors.ncols());
    for j in 0..cols {
        let mut best = 0;
        let mut best_mag = 0.0;
        for i in 0..d {
            let mag = vectors[(i, j)].norm();
            if mag > best_mag {
                best_mag = mag;
                best = i;
            }
        }
        if best_mag > 0.0 {
            let phase = vectors[(best, j)] / best_mag;
            let correction = phase.conj();
            for i in 0..d {
                vectors[(i, j)] *= correction;
            }
        }
    }
}

/// Raw Hermitian eigendecomposition without ordering or phase conventions.
pub(crate) fn eigh_raw(matrix: &CMatrix) -> (DVector<f64>, CMatrix) {
    let se = matrix.clone().symmetric_eigen();
    (se.eigenvalues, se.eigenvectors)
}

/// Eigendecomposition of a Hermitian operator with ascending eigenvalues
/// and a deterministic column phase convention.
pub fn eigh(h: &HermitianOperator) -> EigenSystem {
    let (values, vectors) = eigh_raw(h.matrix());
    let d = values.len();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let sorted_values = DVector::from_fn(d, |i, _| values[order[i]]);
    let mut sorted_vectors = CMatrix::zeros(d, d);
    for (new, &old) in order.iter().enumerate() {
        sorted_vectors.set_column(new, &vectors.column(old));
    }
    canonicalize_columns(&mut sorted_vectors);
    EigenSystem {
        values: sorted_values,
        vectors: sorted_vectors,
    }
}

/// exp(−i H Δt) through the spectral decomposition; exact for Hermitian
/// input up to the eigensolver's accuracy, and unitary by construction.
pub fn evolution_step(h: &CMatrix, dt: f64) -> CMatrix {
    let (values, vectors) = eigh_raw(h);
    let d = values.len();
    let mut scaled = vectors.clone();
    for j in 0..d {
        let phase = C64::from_polar(1.0, -values[j] * dt);
        for i in 0..d {
            scaled[(i, j)] *= phase;
        }
    }
    scaled * vectors.adjoint()
}

/// Bloch vector (⟨σ_x⟩, ⟨σ_y⟩, ⟨σ_z⟩) of a single-qubit state.
pub fn bloch_vector_state(state: &StateVector) -> Result<[f64; 3]> {
    if state.dim() != 2 {
        return Err(Error::UnsupportedDimension { dim: state.dim() });
    }
    let a = state.amplitudes()[0];
    let b = state.amplitudes()[1];
    let cross = a.conj() * b;
    Ok([2.0 * cross.re, 2.0 * cross.im, a.norm_sqr() - b.norm_sqr()])
}

/// Bloch vector of a single-qubit Hermitian operator: twice the traceless
/// Pauli components, so (ω₁/2)σ_x + (Δω/2)σ_z maps to (ω₁, 0, Δω).
pub fn bloch_vector_operator(h: &HermitianOperator) -> Result<[f64; 3]> {
    bloch_vector_matrix(h.matrix())
}

pub(crate) fn bloch_vector_matrix(m: &CMatrix) -> Result<[f64; 3]> {
    if m.nrows() != 2 {
        return Err(Error::UnsupportedDimension { dim: m.nrows() });
    }
    let x = (m[(0, 1)] + m[(1, 0)]).re;
    let y = (m[(1, 0)] - m[(0, 1)]).im;
    let z = (m[(0, 0)] - m[(1, 1)]).re;
    Ok([x, y, z])
}
