use num_complex::Complex64;

use super::{Ket, Operator, NEGATIVITY_FLOOR, TOL};
use crate::error::{Error, Result};

/// Which factor of a bipartite system survives a partial trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    First,
    Second,
}

/// A validated density matrix: Hermitian, unit trace, positive semidefinite
/// within [`NEGATIVITY_FLOOR`].
///
/// Positivity is certified through the characteristic polynomial: the
/// Faddeev-LeVerrier recurrence yields the elementary symmetric functions of
/// the spectrum, and a Hermitian matrix has all eigenvalues ≥ -t exactly
/// when every elementary symmetric function of (M + tI) is nonnegative.
/// This stays closed-form at every dimension used here (≤ 12) and needs no
/// iterative eigensolver.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: Operator,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace, and positivity.
    pub fn new(matrix: Operator) -> Result<Self> {
        if !matrix.is_hermitian() {
            return Err(Error::NotHermitian(matrix.hermiticity_deviation()));
        }
        let tr = matrix.trace();
        let tr_dev = (tr - Complex64::new(1.0, 0.0)).norm();
        if tr_dev > TOL {
            return Err(Error::TraceNotOne(tr_dev));
        }
        if !is_positive_semidefinite(&matrix, NEGATIVITY_FLOOR) {
            return Err(Error::NotPositive);
        }
        Ok(Self { matrix })
    }

    /// |k⟩⟨k| for a normalized `k`. Pure construction is positive by
    /// construction, so only normalization is checked.
    pub fn from_pure(k: &Ket) -> Result<Self> {
        k.require_normalized()?;
        Ok(Self {
            matrix: Operator::outer(k, k).expect("outer product of equal-dim kets"),
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.matrix.entry(i, j)
    }

    /// The underlying matrix.
    pub fn as_operator(&self) -> &Operator {
        &self.matrix
    }

    /// Tr ρ² as a real number.
    pub fn purity(&self) -> f64 {
        self.matrix
            .matmul(&self.matrix)
            .expect("square of a valid matrix")
            .trace()
            .re
    }

    /// Tr(Aρ).
    pub fn expectation(&self, a: &Operator) -> Result<Complex64> {
        if a.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: a.dim(),
            });
        }
        Ok(a.matmul(&self.matrix).expect("dims checked").trace())
    }

    /// ⟨k|ρ|k⟩ for a normalized `k`; real up to rounding.
    pub fn fidelity_with_pure(&self, k: &Ket) -> Result<f64> {
        k.require_normalized()?;
        let rk = self.matrix.apply(k)?;
        Ok(k.inner(&rk)?.re)
    }

    /// Largest off-diagonal entry magnitude; zero for fully decohered
    /// states in the computational basis.
    pub fn max_offdiag(&self) -> f64 {
        self.matrix.max_offdiag()
    }

    /// Traces out one factor of a bipartite system with factor dimensions
    /// `d_first * d_second = dim`, keeping `keep`.
    pub fn partial_trace(
        &self,
        d_first: usize,
        d_second: usize,
        keep: Subsystem,
    ) -> Result<DensityMatrix> {
        if d_first * d_second != self.dim() || d_first == 0 || d_second == 0 {
            return Err(Error::NonFactorizableDim {
                dim: self.dim(),
                left: d_first,
                right: d_second,
            });
        }
        let reduced = match keep {
            Subsystem::First => Operator::from_fn(d_first, |i, j| {
                (0..d_second)
                    .map(|k| self.entry(i * d_second + k, j * d_second + k))
                    .sum()
            }),
            Subsystem::Second => Operator::from_fn(d_second, |i, j| {
                (0..d_first)
                    .map(|k| self.entry(k * d_second + i, k * d_second + j))
                    .sum()
            }),
        }
        .expect("reduced matrix of a valid state is finite");
        // Re-validate: the reduced state of a valid density matrix passes by
        // construction, and the check catches index-convention regressions.
        DensityMatrix::new(reduced)
    }
}

/// Characteristic-polynomial positivity test: all eigenvalues of Hermitian
/// `m` are ≥ -floor.
///
/// A Hermitian matrix has a real spectrum, and the spectrum of (M + tI) is
/// nonnegative exactly when every elementary symmetric function of it is
/// nonnegative: a negative root -μ would make the characteristic polynomial
/// (±1)·(μⁿ + e₁μⁿ⁻¹ + … + eₙ) nonzero at itself. The eₖ come from the
/// power sums Tr((M + tI)ʲ) through Newton's identities.
fn is_positive_semidefinite(m: &Operator, floor: f64) -> bool {
    let n = m.dim();
    let shifted = m
        .add(&Operator::identity(n).scale(Complex64::new(floor, 0.0)))
        .expect("same dim");
    let mut power_sums = Vec::with_capacity(n);
    let mut mk = shifted.clone();
    for j in 1..=n {
        power_sums.push(mk.trace().re);
        if j < n {
            mk = mk.matmul(&shifted).expect("same dim");
        }
    }
    // Newton: k·eₖ = Σᵢ (-1)^(i-1) e_(k-i) pᵢ, with e₀ = 1.
    let mut elementary = vec![1.0];
    for k in 1..=n {
        let acc: f64 = (1..=k)
            .map(|i| {
                let sign = if i % 2 == 1 { 1.0 } else { -1.0 };
                sign * elementary[k - i] * power_sums[i - 1]
            })
            .sum();
        elementary.push(acc / k as f64);
    }
    // Slack absorbs rounding in the recurrence itself; entries of density
    // matrices are O(1), so an absolute slack suffices.
    elementary[1..].iter().all(|&e| e >= -1e-12)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn diag(values: &[f64]) -> Operator {
        Operator::from_fn(values.len(), |i, j| {
            c(if i == j { values[i] } else { 0.0 }, 0.0)
        })
        .unwrap()
    }

    #[test]
    fn accepts_maximally_mixed_and_rejects_negative_eigenvalue() {
        assert!(DensityMatrix::new(diag(&[0.5, 0.5])).is_ok());
        assert!(matches!(
            DensityMatrix::new(diag(&[1.1, -0.1])),
            Err(Error::NotPositive)
        ));
    }

    #[test]
    fn rejects_wrong_trace_and_non_hermitian() {
        assert!(matches!(
            DensityMatrix::new(diag(&[0.7, 0.7])),
            Err(Error::TraceNotOne(_))
        ));
        let skew = Operator::new(2, vec![c(0.5, 0.0), c(0.3, 0.0), c(0.0, 0.0), c(0.5, 0.0)])
            .unwrap();
        assert!(matches!(
            DensityMatrix::new(skew),
            Err(Error::NotHermitian(_))
        ));
    }

    #[test]
    fn positivity_test_catches_hidden_negativity_at_dim_4() {
        // Diagonal entries all positive, but the (0,3) coherence is too
        // large for positivity: the 2x2 principal minor {0,3} is negative.
        let mut entries = vec![c(0.0, 0.0); 16];
        entries[0] = c(0.25, 0.0);
        entries[5] = c(0.25, 0.0);
        entries[10] = c(0.25, 0.0);
        entries[15] = c(0.25, 0.0);
        entries[3] = c(0.3, 0.0);
        entries[12] = c(0.3, 0.0);
        let m = Operator::new(4, entries).unwrap();
        assert!(matches!(DensityMatrix::new(m), Err(Error::NotPositive)));
    }

    #[test]
    fn pure_state_has_unit_purity_and_fidelity() {
        let s = 2.0_f64.sqrt().recip();
        let bell = Ket::from_reals(&[s, 0.0, 0.0, s]).unwrap();
        let rho = DensityMatrix::from_pure(&bell).unwrap();
        assert!((rho.purity() - 1.0).abs() < 1e-14);
        assert!((rho.fidelity_with_pure(&bell).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn partial_trace_of_bell_state_is_maximally_mixed() {
        let s = 2.0_f64.sqrt().recip();
        let bell = Ket::from_reals(&[s, 0.0, 0.0, s]).unwrap();
        let rho = DensityMatrix::from_pure(&bell).unwrap();
        for keep in [Subsystem::First, Subsystem::Second] {
            let red = rho.partial_trace(2, 2, keep).unwrap();
            assert!(red.as_operator().max_abs_diff(&diag(&[0.5, 0.5])) < 1e-15);
        }
    }

    #[test]
    fn partial_trace_of_product_state_recovers_factors() {
        let a = Ket::new(vec![c(0.6, 0.0), c(0.0, 0.8)]).unwrap();
        let b = Ket::from_reals(&[3.0 / 5.0, 4.0 / 5.0]).unwrap();
        let joint = DensityMatrix::from_pure(&a.tensor(&b)).unwrap();
        let ra = joint.partial_trace(2, 2, Subsystem::First).unwrap();
        let rb = joint.partial_trace(2, 2, Subsystem::Second).unwrap();
        let pa = Operator::projector(&a).unwrap();
        let pb = Operator::projector(&b).unwrap();
        assert!(ra.as_operator().max_abs_diff(&pa) < 1e-14);
        assert!(rb.as_operator().max_abs_diff(&pb) < 1e-14);
    }

    #[test]
    fn partial_trace_rejects_bad_factorization() {
        let rho = DensityMatrix::new(diag(&[0.25; 4])).unwrap();
        assert!(matches!(
            rho.partial_trace(3, 2, Subsystem::First),
            Err(Error::NonFactorizableDim { .. })
        ));
    }

    #[test]
    fn expectation_matches_pure_state_formula() {
        let k = Ket::from_reals(&[0.6, 0.8]).unwrap();
        let rho = DensityMatrix::from_pure(&k).unwrap();
        let p1 = Operator::projector(&Ket::basis_state(2, 1)).unwrap();
        let e = rho.expectation(&p1).unwrap();
        assert!((e - c(0.64, 0.0)).norm() < 1e-15);
    }
}
