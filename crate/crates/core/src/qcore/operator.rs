use num_complex::Complex64;

use super::{Ket, TOL};
use crate::error::{Error, Result};

/// A dense square matrix acting on a finite-dimensional Hilbert space.
///
/// Entries are row-major. Hermiticity is measured once at construction and
/// cached; all constructors go through [`Operator::new`], so the flag is
/// always consistent with the entries.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    dim: usize,
    entries: Vec<Complex64>,
    hermitian: bool,
}

impl Operator {
    /// Wraps row-major entries; `entries.len()` must equal `dim * dim`.
    pub fn new(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if dim == 0 || entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                got: entries.len(),
            });
        }
        for (i, e) in entries.iter().enumerate() {
            if !e.re.is_finite() || !e.im.is_finite() {
                return Err(Error::NonFiniteEntry(i));
            }
        }
        let mut op = Self {
            dim,
            entries,
            hermitian: false,
        };
        op.hermitian = op.hermiticity_deviation() <= TOL;
        Ok(op)
    }

    /// Like [`Operator::new`] but rejects non-Hermitian input.
    pub fn new_hermitian(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        let op = Self::new(dim, entries)?;
        if !op.hermitian {
            return Err(Error::NotHermitian(op.hermiticity_deviation()));
        }
        Ok(op)
    }

    /// Builds entry (i, j) from a closure.
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Result<Self> {
        let mut entries = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                entries.push(f(i, j));
            }
        }
        Self::new(dim, entries)
    }

    pub fn zeros(dim: usize) -> Self {
        Self::from_fn(dim, |_, _| Complex64::new(0.0, 0.0)).expect("zero matrix is valid")
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |i, j| {
            Complex64::new(if i == j { 1.0 } else { 0.0 }, 0.0)
        })
        .expect("identity matrix is valid")
    }

    /// |a⟩⟨b|.
    pub fn outer(a: &Ket, b: &Ket) -> Result<Self> {
        if a.dim() != b.dim() {
            return Err(Error::DimensionMismatch {
                expected: a.dim(),
                got: b.dim(),
            });
        }
        Self::from_fn(a.dim(), |i, j| a.amp(i) * b.amp(j).conj())
    }

    /// |k⟩⟨k| for a normalized `k`.
    pub fn projector(k: &Ket) -> Result<Self> {
        k.require_normalized()?;
        Self::outer(k, k)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.dim + j]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    /// True when the matrix was Hermitian within [`TOL`] at construction.
    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    /// max |M[i][j] - conj(M[j][i])|.
    pub fn hermiticity_deviation(&self) -> f64 {
        let mut dev: f64 = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                dev = dev.max((self.entry(i, j) - self.entry(j, i).conj()).norm());
            }
        }
        dev
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Operator {
        Self::from_fn(self.dim, |i, j| self.entry(j, i).conj())
            .expect("dagger of a valid matrix is valid")
    }

    /// Matrix-vector product A|k⟩. Basis labels of `k` are preserved.
    pub fn apply(&self, k: &Ket) -> Result<Ket> {
        if k.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: k.dim(),
            });
        }
        let amps = (0..self.dim)
            .map(|i| {
                (0..self.dim)
                    .map(|j| self.entry(i, j) * k.amp(j))
                    .sum::<Complex64>()
            })
            .collect::<Vec<_>>();
        match k.labels() {
            Some(labels) => Ket::with_labels(amps, labels.to_vec()),
            None => Ket::new(amps),
        }
    }

    /// Matrix product `self * other`.
    pub fn matmul(&self, other: &Operator) -> Result<Operator> {
        if other.dim != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        Self::from_fn(self.dim, |i, j| {
            (0..self.dim)
                .map(|k| self.entry(i, k) * other.entry(k, j))
                .sum()
        })
    }

    pub fn add(&self, other: &Operator) -> Result<Operator> {
        if other.dim != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        Self::from_fn(self.dim, |i, j| self.entry(i, j) + other.entry(i, j))
    }

    pub fn sub(&self, other: &Operator) -> Result<Operator> {
        if other.dim != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        Self::from_fn(self.dim, |i, j| self.entry(i, j) - other.entry(i, j))
    }

    pub fn scale(&self, z: Complex64) -> Operator {
        Self::from_fn(self.dim, |i, j| self.entry(i, j) * z)
            .expect("scaling a valid matrix by a finite scalar is valid")
    }

    /// A⊗B with the left factor most significant, matching [`Ket::tensor`].
    pub fn tensor(&self, other: &Operator) -> Operator {
        let da = self.dim;
        let db = other.dim;
        Self::from_fn(da * db, |i, j| {
            let (i1, i2) = (i / db, i % db);
            let (j1, j2) = (j / db, j % db);
            self.entry(i1, j1) * other.entry(i2, j2)
        })
        .expect("tensor of valid matrices is valid")
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.entry(i, i)).sum()
    }

    /// max |A[i][j] - B[i][j]|.
    pub fn max_abs_diff(&self, other: &Operator) -> f64 {
        assert_eq!(self.dim, other.dim, "max_abs_diff requires equal dims");
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest entry magnitude off the main diagonal.
    pub fn max_offdiag(&self) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                if i != j {
                    m = m.max(self.entry(i, j).norm());
                }
            }
        }
        m
    }
}

/// Tr(A ρ-like-matrix) is provided on `DensityMatrix`; plain two-operator
/// traces go through `matmul(...).trace()`.
#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn pauli_y() -> Operator {
        Operator::new(2, vec![c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)]).unwrap()
    }

    #[test]
    fn hermitian_flag_tracks_entries() {
        assert!(pauli_y().is_hermitian());
        let upper = Operator::new(2, vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)])
            .unwrap();
        assert!(!upper.is_hermitian());
        assert!(matches!(
            Operator::new_hermitian(2, upper.entries().to_vec()),
            Err(Error::NotHermitian(_))
        ));
    }

    #[test]
    fn dagger_squares_to_identity_on_pauli() {
        let y = pauli_y();
        assert_eq!(y.dagger(), y);
        let y2 = y.matmul(&y).unwrap();
        assert!(y2.max_abs_diff(&Operator::identity(2)) < 1e-15);
    }

    #[test]
    fn outer_then_apply_matches_inner() {
        let a = Ket::new(vec![c(1.0, 2.0), c(0.0, -1.0)]).unwrap();
        let b = Ket::new(vec![c(0.5, 0.0), c(0.0, 0.5)]).unwrap();
        let x = Ket::new(vec![c(1.0, 0.0), c(1.0, 1.0)]).unwrap();
        // (|a⟩⟨b|)|x⟩ = ⟨b|x⟩ |a⟩
        let lhs = Operator::outer(&a, &b).unwrap().apply(&x).unwrap();
        let coeff = b.inner(&x).unwrap();
        for i in 0..2 {
            assert!((lhs.amp(i) - coeff * a.amp(i)).norm() < 1e-15);
        }
    }

    #[test]
    fn projector_requires_normalized_input() {
        let unnorm = Ket::new(vec![c(2.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert!(matches!(
            Operator::projector(&unnorm),
            Err(Error::NotNormalized(_))
        ));
    }

    #[test]
    fn tensor_of_projectors_annihilates_hardy_state() {
        // P_V⊗P_V applied to (|HH⟩+|HV⟩+|VH⟩)/√3 gives the zero vector:
        // the state has no |VV⟩ component.
        let s = 3.0_f64.sqrt().recip();
        let state = Ket::from_reals(&[s, s, s, 0.0]).unwrap();
        let p_v = Operator::projector(&Ket::basis_state(2, 1)).unwrap();
        let joint = p_v.tensor(&p_v);
        let out = joint.apply(&state).unwrap();
        assert!(out.norm() < 1e-15);
    }

    #[test]
    fn tensor_entry_layout() {
        let a = Operator::from_fn(2, |i, j| c((10 * i + j) as f64, 0.0)).unwrap();
        let b = Operator::identity(2);
        let t = a.tensor(&b);
        // Block structure: entry ((i1 i2), (j1 j2)) = A[i1][j1] δ_{i2 j2}.
        assert_eq!(t.entry(0, 2), a.entry(0, 1));
        assert_eq!(t.entry(1, 3), a.entry(0, 1));
        assert_eq!(t.entry(0, 3), c(0.0, 0.0));
        assert_eq!(t.entry(2, 0), a.entry(1, 0));
    }

    #[test]
    fn trace_of_tensor_is_product_of_traces() {
        let a = Operator::from_fn(2, |i, j| c(i as f64 + 1.0, j as f64)).unwrap();
        let b = Operator::from_fn(3, |i, j| c((i * j) as f64, 1.0)).unwrap();
        let lhs = a.tensor(&b).trace();
        let rhs = a.trace() * b.trace();
        assert!((lhs - rhs).norm() < 1e-12);
    }
}
