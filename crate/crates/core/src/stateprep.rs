//! Preparation of the Hardy two-photon state, done wrong and done right.
//!
//! The flawed route entangles the pair with which-path records: each basis
//! component of the target leaves a distinct orthonormal mark on an
//! ancilla, so tracing the ancilla out destroys every coherence and leaves
//! a classical mixture of basis states. The corrected route reads the
//! Schmidt decomposition of the target off its reduced state and rebuilds
//! the pure state from two local rotations acting on a two-term
//! superposition, leaving no record behind.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qcore::{
    hermitian_eig_2x2, DensityMatrix, Ket, Operator, Subsystem,
};
use crate::weakval::{weak_value, PrePostEnsemble};

/// Schmidt coefficients at or below this value are treated as zero; the
/// matching Schmidt vector is completed as an orthogonal complement instead
/// of being read off a vanishing projection.
pub const SCHMIDT_ZERO: f64 = 1e-12;

/// Deterministic phase and ordering rules used by [`schmidt_decompose`].
pub const PHASE_CONVENTION: &str = "coefficients real nonnegative descending; \
photon-1 vectors have their largest-magnitude component real positive (lower \
index wins ties); photon-2 vectors carry the phase induced by the target; \
degenerate reduced spectra fall back to the computational basis in {H, V} order";

/// The two-photon polarization state (|HH⟩ + |HV⟩ + |VH⟩)/√3 over the basis
/// {HH, HV, VH, VV}: the target of both preparation routes.
pub fn hardy_target() -> Ket {
    let s = 3.0_f64.sqrt().recip();
    Ket::with_labels(
        vec![
            Complex64::new(s, 0.0),
            Complex64::new(s, 0.0),
            Complex64::new(s, 0.0),
            Complex64::new(0.0, 0.0),
        ],
        vec!["HH".into(), "HV".into(), "VH".into(), "VV".into()],
    )
    .expect("amplitudes and labels have length 4")
}

/// What a preparation attempt actually produced.
#[derive(Debug, Clone)]
pub struct PreparationOutcome {
    pub state: DensityMatrix,
    /// Tr ρ².
    pub purity: f64,
    /// ⟨target|ρ|target⟩.
    pub fidelity_with_target: f64,
    /// Largest off-diagonal magnitude of ρ in the computational basis.
    pub coherence_offdiag_max: f64,
}

/// Schmidt form of a two-qubit pure state: |t⟩ = a|u₁⟩⊗|v₁⟩ + b|u₂⟩⊗|v₂⟩
/// with a ≥ b ≥ 0. The rotations carry (u₁, u₂) and (v₁, v₂) as columns.
#[derive(Debug, Clone)]
pub struct SchmidtForm {
    pub a: f64,
    pub b: f64,
    pub local_rotation_1: Operator,
    pub local_rotation_2: Operator,
    pub phase_convention: &'static str,
}

/// Prepares `target` with an ancilla that records which basis component was
/// taken: Σₖ tₖ |k⟩⊗|eₖ⟩ over the components with tₖ ≠ 0, then traces the
/// ancilla out. The result is the fully decohered diag(|tₖ|²).
pub fn simulate_flawed_prep(target: &Ket) -> Result<PreparationOutcome> {
    target.require_normalized()?;
    let dim = target.dim();
    let recorded: Vec<usize> = (0..dim)
        .filter(|&k| target.amp(k) != Complex64::new(0.0, 0.0))
        .collect();
    let env_dim = recorded.len();
    let mut joint = vec![Complex64::new(0.0, 0.0); dim * env_dim];
    for (rank, &k) in recorded.iter().enumerate() {
        joint[k * env_dim + rank] = target.amp(k);
    }
    let joint = Ket::new(joint).expect("finite amplitudes");
    let rho_joint = DensityMatrix::from_pure(&joint)?;
    let state = rho_joint.partial_trace(dim, env_dim, Subsystem::First)?;
    outcome(state, target)
}

/// Schmidt-decomposes a normalized two-qubit state.
///
/// The photon-1 basis comes from the closed-form eigendecomposition of the
/// reduced state; the photon-2 basis is read off the target by projection,
/// with an explicit orthonormalization step so the rotations are unitary at
/// machine precision even near degeneracy.
pub fn schmidt_decompose(target: &Ket) -> Result<SchmidtForm> {
    if target.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            got: target.dim(),
        });
    }
    target.require_normalized()?;
    let rho = DensityMatrix::from_pure(target)?;
    let rho1 = rho.partial_trace(2, 2, Subsystem::First)?;
    let eig = hermitian_eig_2x2(rho1.as_operator())?;
    let (lam1, u1) = (&eig[0].0, &eig[0].1);
    let (lam2, u2) = (&eig[1].0, &eig[1].1);
    let a = lam1.max(0.0).sqrt();
    let b = lam2.max(0.0).sqrt();

    // Project the target onto each photon-1 Schmidt vector:
    // (⟨uₖ| ⊗ I)|t⟩ = sₖ|vₖ⟩.
    let project = |u: &Ket| -> [Complex64; 2] {
        let mut out = [Complex64::new(0.0, 0.0); 2];
        for (k, slot) in out.iter_mut().enumerate() {
            *slot = (0..2).map(|i| u.amp(i).conj() * target.amp(i * 2 + k)).sum();
        }
        out
    };
    // λ₁ ≥ 1/2 for any normalized two-qubit state, so v₁ is always well
    // conditioned.
    let v1 = normalize2(project(u1));
    let v2 = if b > SCHMIDT_ZERO {
        // Read v₂ off the target, then clean up rounding: remove any v₁
        // component and renormalize.
        let raw = project(u2);
        let overlap: Complex64 = v1.iter().zip(&raw).map(|(x, y)| x.conj() * y).sum();
        normalize2([raw[0] - overlap * v1[0], raw[1] - overlap * v1[1]])
    } else {
        // b is numerically zero: the second Schmidt vector is any unit
        // vector orthogonal to v₁; fix it deterministically.
        fix_phase([-v1[1].conj(), v1[0].conj()])
    };

    let column_pair = |x: &[Complex64; 2], y: &[Complex64; 2]| {
        Operator::new(2, vec![x[0], y[0], x[1], y[1]]).expect("finite entries")
    };
    let u1a = [u1.amp(0), u1.amp(1)];
    let u2a = [u2.amp(0), u2.amp(1)];
    Ok(SchmidtForm {
        a,
        b,
        local_rotation_1: column_pair(&u1a, &u2a),
        local_rotation_2: column_pair(&v1, &v2),
        phase_convention: PHASE_CONVENTION,
    })
}

impl SchmidtForm {
    /// Rebuilds a|u₁⟩⊗|v₁⟩ + b|u₂⟩⊗|v₂⟩ from the stored rotations.
    pub fn reconstruct(&self) -> Ket {
        let seed = Ket::new(vec![
            Complex64::new(self.a, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(self.b, 0.0),
        ])
        .expect("finite amplitudes");
        self.local_rotation_1
            .tensor(&self.local_rotation_2)
            .apply(&seed)
            .expect("4-dim rotation applied to 4-dim ket")
    }
}

/// Prepares `target` exactly: Schmidt-decompose, start from the two-term
/// superposition a|HH⟩ + b|VV⟩, and apply the local rotations. No ancilla
/// is involved, so the output is pure.
pub fn simulate_correct_prep(target: &Ket) -> Result<PreparationOutcome> {
    let schmidt = schmidt_decompose(target)?;
    let prepared = schmidt.reconstruct().normalize()?;
    let state = DensityMatrix::from_pure(&prepared)?;
    outcome(state, target)
}

/// Joint polarization-projector weak values of a surrounding pre/post
/// context, axis order [V, H] on both photons.
#[derive(Debug, Clone)]
pub struct JointWeakContext {
    pub axis: [&'static str; 2],
    /// values[i][j] = weak value of P(axis[i]) ⊗ P(axis[j]).
    pub values: [[Complex64; 2]; 2],
    pub max_imag_residual: f64,
}

/// Side-by-side result of the two preparation routes.
#[derive(Debug, Clone)]
pub struct PrepComparison {
    pub flawed: PreparationOutcome,
    pub correct: PreparationOutcome,
    pub schmidt: SchmidtForm,
    /// Present when a pre/post context was supplied: the four joint
    /// polarization weak values that the downstream analysis rests on.
    pub context_joint_weak_values: Option<JointWeakContext>,
}

/// Runs both routes against the same target. When `context` is given, the
/// joint polarization weak values of that ensemble are attached so the
/// preparation quality can be read against the analysis it feeds.
pub fn compare_preps(
    target: &Ket,
    context: Option<&PrePostEnsemble>,
) -> Result<PrepComparison> {
    let flawed = simulate_flawed_prep(target)?;
    let correct = simulate_correct_prep(target)?;
    let schmidt = schmidt_decompose(target)?;
    let context_joint_weak_values = match context {
        None => None,
        Some(e) => {
            let mut values = [[Complex64::new(0.0, 0.0); 2]; 2];
            let mut max_imag: f64 = 0.0;
            // Axis order [V, H]: V is basis index 1, H is index 0.
            for (i, &pol1) in [1usize, 0].iter().enumerate() {
                for (j, &pol2) in [1usize, 0].iter().enumerate() {
                    let joint = Operator::projector(
                        &Ket::basis_state(2, pol1).tensor(&Ket::basis_state(2, pol2)),
                    )
                    .expect("basis state");
                    let w = weak_value(e, &joint, "joint")?;
                    values[i][j] = w.value;
                    max_imag = max_imag.max(w.value.im.abs());
                }
            }
            Some(JointWeakContext {
                axis: ["V", "H"],
                values,
                max_imag_residual: max_imag,
            })
        }
    };
    Ok(PrepComparison {
        flawed,
        correct,
        schmidt,
        context_joint_weak_values,
    })
}

fn outcome(state: DensityMatrix, target: &Ket) -> Result<PreparationOutcome> {
    let purity = state.purity();
    let fidelity_with_target = state.fidelity_with_pure(target)?;
    let coherence_offdiag_max = state.max_offdiag();
    Ok(PreparationOutcome {
        state,
        purity,
        fidelity_with_target,
        coherence_offdiag_max,
    })
}

fn normalize2(v: [Complex64; 2]) -> [Complex64; 2] {
    let n = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
    [v[0] / n, v[1] / n]
}

fn fix_phase(v: [Complex64; 2]) -> [Complex64; 2] {
    let k = if v[0].norm() >= v[1].norm() { 0 } else { 1 };
    let phase = v[k].conj() / v[k].norm();
    [v[0] * phase, v[1] * phase]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn flawed_prep_yields_exact_classical_mixture() {
        let out = simulate_flawed_prep(&hardy_target()).unwrap();
        let third = 1.0 / 3.0;
        for i in 0..4 {
            for j in 0..4 {
                let expected = if i == j && i < 3 { third } else { 0.0 };
                let got = out.state.entry(i, j);
                assert!(
                    (got - c(expected, 0.0)).norm() <= 1e-15,
                    "entry ({i},{j}) = {got}"
                );
            }
        }
        assert!((out.purity - third).abs() < 1e-12);
        assert!((out.fidelity_with_target - third).abs() < 1e-12);
        assert_eq!(out.coherence_offdiag_max, 0.0);
    }

    #[test]
    fn hardy_schmidt_coefficients_hit_closed_form() {
        let schmidt = schmidt_decompose(&hardy_target()).unwrap();
        // Reduced state (1/3)[[2, 1], [1, 1]] has eigenvalues (3 ± √5)/6.
        let a2 = (3.0 + 5.0_f64.sqrt()) / 6.0;
        let b2 = (3.0 - 5.0_f64.sqrt()) / 6.0;
        assert!((schmidt.a * schmidt.a - a2).abs() < 1e-12);
        assert!((schmidt.b * schmidt.b - b2).abs() < 1e-12);
        assert!((schmidt.a * schmidt.a + schmidt.b * schmidt.b - 1.0).abs() < 1e-12);
        assert!(schmidt.a >= schmidt.b);
    }

    #[test]
    fn schmidt_rotations_are_unitary_and_reconstruct_target() {
        let target = hardy_target();
        let schmidt = schmidt_decompose(&target).unwrap();
        for r in [&schmidt.local_rotation_1, &schmidt.local_rotation_2] {
            let gram = r.dagger().matmul(r).unwrap();
            assert!(gram.max_abs_diff(&Operator::identity(2)) < 1e-13);
        }
        let rebuilt = schmidt.reconstruct();
        let fid = rebuilt.inner(&target).unwrap();
        assert!((fid.norm() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn product_state_has_single_schmidt_term() {
        let k = Ket::basis_state(2, 0).tensor(&Ket::basis_state(2, 1));
        let schmidt = schmidt_decompose(&k).unwrap();
        assert!((schmidt.a - 1.0).abs() < 1e-14);
        assert!(schmidt.b.abs() < 1e-14);
        let rebuilt = schmidt.reconstruct();
        assert!((rebuilt.inner(&k).unwrap().norm() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn maximally_entangled_state_uses_lexicographic_tie_break() {
        let s = 2.0_f64.sqrt().recip();
        let bell = Ket::from_reals(&[s, 0.0, 0.0, s]).unwrap();
        let schmidt = schmidt_decompose(&bell).unwrap();
        assert!((schmidt.a - s).abs() < 1e-13);
        assert!((schmidt.b - s).abs() < 1e-13);
        // Degenerate reduced spectrum: photon-1 basis is {H, V} itself.
        assert!(schmidt
            .local_rotation_1
            .max_abs_diff(&Operator::identity(2))
            < 1e-13);
        let rebuilt = schmidt.reconstruct();
        assert!((rebuilt.inner(&bell).unwrap().norm() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn correct_prep_is_pure_with_unit_fidelity() {
        let out = simulate_correct_prep(&hardy_target()).unwrap();
        assert!((out.purity - 1.0).abs() < 1e-12);
        assert!((out.fidelity_with_target - 1.0).abs() < 1e-12);
        // |t⟩⟨t| has off-diagonal magnitude 1/3 between recorded components.
        assert!((out.coherence_offdiag_max - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn comparison_attaches_context_weak_values() {
        let post = Ket::from_reals(&[0.5, -0.5, -0.5, 0.5]).unwrap();
        let e = PrePostEnsemble::new(hardy_target(), post).unwrap();
        let cmp = compare_preps(&hardy_target(), Some(&e)).unwrap();
        let ctx = cmp.context_joint_weak_values.unwrap();
        let expected = [[0.0, 1.0], [1.0, -1.0]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((ctx.values[i][j] - c(expected[i][j], 0.0)).norm() < 1e-12);
            }
        }
        assert!(ctx.max_imag_residual < 1e-12);
        assert!(cmp.flawed.purity < cmp.correct.purity);
    }

    #[test]
    fn schmidt_rejects_unnormalized_or_wrong_dim() {
        let long = Ket::from_reals(&[1.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(matches!(
            schmidt_decompose(&long),
            Err(Error::NotNormalized(_))
        ));
        let three = Ket::from_reals(&[1.0, 0.0, 0.0]).unwrap();
        assert!(matches!(
            schmidt_decompose(&three),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
