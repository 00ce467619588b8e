use num_complex::Complex64;

use super::{Ket, Operator, TOL};
use crate::error::{Error, Result};

/// One eigenspace of a spectral decomposition: a real eigenvalue and the
/// orthogonal projector onto its eigenspace.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralBranch {
    pub eigenvalue: f64,
    pub projector: Operator,
}

/// An observable in spectral form: A = Σ aₖ Pₖ with validated projectors.
///
/// Branch order is part of the value and is preserved exactly as given;
/// downstream code (pointer branching, strong-outcome enumeration) iterates
/// branches in this declared order, which keeps every pipeline
/// deterministic.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralOperator {
    dim: usize,
    branches: Vec<SpectralBranch>,
}

impl SpectralOperator {
    /// Validates each projector (Hermitian, idempotent), mutual
    /// orthogonality, and completeness Σ Pₖ = I, all within [`TOL`].
    pub fn new(branches: Vec<(f64, Operator)>) -> Result<Self> {
        let Some((_, first)) = branches.first() else {
            return Err(Error::InvalidSpectralForm("no branches"));
        };
        let dim = first.dim();
        for (a, p) in &branches {
            if !a.is_finite() {
                return Err(Error::InvalidSpectralForm("non-finite eigenvalue"));
            }
            if p.dim() != dim {
                return Err(Error::InvalidSpectralForm("branch dimension mismatch"));
            }
            if !p.is_hermitian() {
                return Err(Error::InvalidSpectralForm("projector not Hermitian"));
            }
            let p2 = p.matmul(p).expect("same dim");
            if p2.max_abs_diff(p) > TOL {
                return Err(Error::InvalidSpectralForm("projector not idempotent"));
            }
        }
        for (i, (_, pi)) in branches.iter().enumerate() {
            for (_, pj) in branches.iter().skip(i + 1) {
                let prod = pi.matmul(pj).expect("same dim");
                if prod.max_abs_diff(&Operator::zeros(dim)) > TOL {
                    return Err(Error::InvalidSpectralForm("projectors not orthogonal"));
                }
            }
        }
        let mut sum = Operator::zeros(dim);
        for (_, p) in &branches {
            sum = sum.add(p).expect("same dim");
        }
        if sum.max_abs_diff(&Operator::identity(dim)) > TOL {
            return Err(Error::InvalidSpectralForm("projectors do not resolve identity"));
        }
        Ok(Self {
            dim,
            branches: branches
                .into_iter()
                .map(|(eigenvalue, projector)| SpectralBranch {
                    eigenvalue,
                    projector,
                })
                .collect(),
        })
    }

    /// Two-branch form (1 on `p`, 0 on its complement). A trivial complement
    /// (when `p` is the identity) is dropped.
    pub fn from_projector(p: &Operator) -> Result<Self> {
        let complement = Operator::identity(p.dim()).sub(p).expect("same dim");
        let complement_trace = complement.trace().re;
        if complement_trace.abs() <= TOL {
            return Self::new(vec![(1.0, p.clone())]);
        }
        Self::new(vec![(1.0, p.clone()), (0.0, complement)])
    }

    /// The identity observable (single branch, eigenvalue 1).
    pub fn identity(dim: usize) -> Self {
        Self::new(vec![(1.0, Operator::identity(dim))]).expect("identity resolves itself")
    }

    /// Spectral form of a Hermitian 2x2 matrix via the closed-form
    /// eigendecomposition. Eigenvalues are ordered descending; a spectrum
    /// degenerate within [`TOL`] collapses to the single branch (λ, I).
    pub fn from_hermitian_2x2(m: &Operator) -> Result<Self> {
        let eig = hermitian_eig_2x2(m)?;
        let gap = eig[0].0 - eig[1].0;
        if gap.abs() <= TOL {
            let mean = 0.5 * (eig[0].0 + eig[1].0);
            return Self::new(vec![(mean, Operator::identity(2))]);
        }
        Self::new(vec![
            (eig[0].0, Operator::projector(&eig[0].1)?),
            (eig[1].0, Operator::projector(&eig[1].1)?),
        ])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn branches(&self) -> &[SpectralBranch] {
        &self.branches
    }

    /// Dense matrix Σ aₖ Pₖ.
    pub fn to_dense(&self) -> Operator {
        let mut sum = Operator::zeros(self.dim);
        for b in &self.branches {
            sum = sum
                .add(&b.projector.scale(Complex64::new(b.eigenvalue, 0.0)))
                .expect("same dim");
        }
        sum
    }

    /// Embeds into a larger system as I_d ⊗ A (this operator acts on the
    /// second factor).
    pub fn tensor_identity_left(&self, d: usize) -> SpectralOperator {
        let id = Operator::identity(d);
        Self::new(
            self.branches
                .iter()
                .map(|b| (b.eigenvalue, id.tensor(&b.projector)))
                .collect(),
        )
        .expect("embedding preserves spectral structure")
    }

    /// Embeds into a larger system as A ⊗ I_d (this operator acts on the
    /// first factor).
    pub fn tensor_identity_right(&self, d: usize) -> SpectralOperator {
        let id = Operator::identity(d);
        Self::new(
            self.branches
                .iter()
                .map(|b| (b.eigenvalue, b.projector.tensor(&id)))
                .collect(),
        )
        .expect("embedding preserves spectral structure")
    }
}

/// Closed-form eigendecomposition of a Hermitian 2x2 matrix.
///
/// Returns [(λ₁, v₁), (λ₂, v₂)] with λ₁ ≥ λ₂. Phases are fixed by making
/// each vector's largest-magnitude component real and positive (lower index
/// wins a magnitude tie). A spectrum degenerate within [`TOL`] returns the
/// computational basis, which keeps ties lexicographic in {H, V}.
pub fn hermitian_eig_2x2(m: &Operator) -> Result<[(f64, Ket); 2]> {
    if m.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: m.dim(),
        });
    }
    if !m.is_hermitian() {
        return Err(Error::NotHermitian(m.hermiticity_deviation()));
    }
    let a = m.entry(0, 0).re;
    let d = m.entry(1, 1).re;
    let b = m.entry(0, 1);
    let mean = 0.5 * (a + d);
    let half_gap = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
    let (lam1, lam2) = (mean + half_gap, mean - half_gap);
    if 2.0 * half_gap <= TOL {
        return Ok([
            (lam1, Ket::basis_state(2, 0)),
            (lam2, Ket::basis_state(2, 1)),
        ]);
    }
    // Two algebraic candidates solve (M - λI)v = 0; pick the better
    // conditioned one (larger norm) for the top eigenvector, then take the
    // exact orthogonal complement for the bottom one.
    let cand_a = [b, Complex64::new(lam1 - a, 0.0)];
    let cand_b = [Complex64::new(lam1 - d, 0.0), b.conj()];
    let norm = |v: &[Complex64; 2]| (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
    let v1 = if norm(&cand_a) >= norm(&cand_b) {
        cand_a
    } else {
        cand_b
    };
    let v1 = fix_phase(normalize2(v1));
    let v2 = fix_phase([-v1[1].conj(), v1[0].conj()]);
    Ok([
        (lam1, Ket::new(v1.to_vec()).expect("finite components")),
        (lam2, Ket::new(v2.to_vec()).expect("finite components")),
    ])
}

fn normalize2(v: [Complex64; 2]) -> [Complex64; 2] {
    let n = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
    [v[0] / n, v[1] / n]
}

/// Rotates a unit vector so its largest-magnitude component is real and
/// positive; the lower index wins when the magnitudes tie.
fn fix_phase(v: [Complex64; 2]) -> [Complex64; 2] {
    let k = if v[0].norm() >= v[1].norm() { 0 } else { 1 };
    let phase = v[k].conj() / v[k].norm();
    [v[0] * phase, v[1] * phase]
}
