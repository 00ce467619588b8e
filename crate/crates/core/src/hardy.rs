//! The Hardy interaction-free-measurement scenario, in polarization
//! encoding.
//!
//! Each photon's arm choice is written onto polarization: one polarization
//! letter stands for the inner (overlapping) arm, the other for the outer
//! arm. Which letter plays the inner role is a labeling convention that
//! flips nothing physical, so it is carried explicitly as [`Convention`]
//! and every table reports its axis labels alongside its numbers. Rows and
//! columns are always ordered inner arm first; under either convention the
//! numbers land in the same cells.
//!
//! The pre-selection has no inner-inner component (that path interferes
//! away), and the post-selection puts both photons on the dark port, which
//! fires with probability 1/12.

use num_complex::Complex64;

use crate::error::Result;
use crate::pointer::{strong_regime, StrongReadout};
use crate::qcore::{Ket, Operator, SpectralOperator};
use crate::stateprep::hardy_target;
use crate::weakval::{
    build_readout_vector, decompose_readout_vector, vector_weak_value, weak_value,
    weak_value_spectral, weighted_polarization, PrePostEnsemble,
};

/// Pointer spread used for the strong-collapse comparison.
pub const STRONG_SIGMA: f64 = 1.0;

/// Coupling used for the strong-collapse comparison; g/σ = 20 leaves
/// branch overlaps below 1e-21.
pub const STRONG_G: f64 = 20.0;

/// Which polarization letter encodes the inner arm.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Convention {
    /// V is the inner arm (the default encoding).
    VInner,
    /// H is the inner arm.
    HInner,
}

impl Convention {
    pub fn label(&self) -> &'static str {
        match self {
            Convention::VInner => "v-inner",
            Convention::HInner => "h-inner",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Photon {
    One,
    Two,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarization {
    H,
    V,
}

impl Polarization {
    /// Basis index: H = 0, V = 1.
    pub fn index(&self) -> usize {
        match self {
            Polarization::H => 0,
            Polarization::V => 1,
        }
    }

    pub fn letter(&self) -> &'static str {
        match self {
            Polarization::H => "H",
            Polarization::V => "V",
        }
    }
}

/// Pre- and post-selection of the Hardy pair under a fixed labeling
/// convention.
#[derive(Debug, Clone)]
pub struct HardyScenario {
    convention: Convention,
    pre: Ket,
    post: Ket,
}

/// Builds the scenario: pre-selection with the inner-inner amplitude
/// removed by interference, post-selection on both dark ports.
pub fn build_scenario(convention: Convention) -> HardyScenario {
    let pre = match convention {
        // (|HH⟩ + |HV⟩ + |VH⟩)/√3: no VV component.
        Convention::VInner => hardy_target(),
        // (|HV⟩ + |VH⟩ + |VV⟩)/√3: no HH component.
        Convention::HInner => {
            let s = 3.0_f64.sqrt().recip();
            Ket::from_reals(&[0.0, s, s, s]).expect("finite amplitudes")
        }
    };
    // Dark port per photon is (|outer⟩ - |inner⟩)/√2; under both
    // conventions the product works out to (|HH⟩-|HV⟩-|VH⟩+|VV⟩)/2 once
    // the global phase is fixed to make the HH amplitude positive.
    let post = Ket::from_reals(&[0.5, -0.5, -0.5, 0.5]).expect("finite amplitudes");
    HardyScenario {
        convention,
        pre,
        post,
    }
}

impl HardyScenario {
    pub fn convention(&self) -> Convention {
        self.convention
    }

    pub fn pre(&self) -> &Ket {
        &self.pre
    }

    pub fn post(&self) -> &Ket {
        &self.post
    }

    pub fn ensemble(&self) -> PrePostEnsemble {
        PrePostEnsemble::new(self.pre.clone(), self.post.clone())
            .expect("scenario states are normalized and equal-dimensional")
    }

    pub fn inner_polarization(&self) -> Polarization {
        match self.convention {
            Convention::VInner => Polarization::V,
            Convention::HInner => Polarization::H,
        }
    }

    /// Table axis order: inner arm first, outer arm second.
    pub fn axis(&self) -> [Polarization; 2] {
        match self.convention {
            Convention::VInner => [Polarization::V, Polarization::H],
            Convention::HInner => [Polarization::H, Polarization::V],
        }
    }

    /// |p₁p₂⟩⟨p₁p₂| as a two-branch spectral observable (eigenvalue 1 on
    /// the joint projector).
    pub fn joint_projector(&self, pol1: Polarization, pol2: Polarization) -> SpectralOperator {
        let joint = Ket::basis_state(2, pol1.index()).tensor(&Ket::basis_state(2, pol2.index()));
        SpectralOperator::from_projector(
            &Operator::projector(&joint).expect("basis states are normalized"),
        )
        .expect("rank-1 projector")
    }

    /// The polarization projector of one photon, extended to the pair.
    pub fn single_projector(&self, photon: Photon, pol: Polarization) -> SpectralOperator {
        let p = Operator::projector(&Ket::basis_state(2, pol.index()))
            .expect("basis states are normalized");
        let id = Operator::identity(2);
        let extended = match photon {
            Photon::One => p.tensor(&id),
            Photon::Two => id.tensor(&p),
        };
        SpectralOperator::from_projector(&extended).expect("extended projector")
    }
}

/// The weak-value table of the four joint arm projectors plus the
/// single-photon marginals, rows and columns ordered inner arm first.
#[derive(Debug, Clone)]
pub struct WeakValueTable {
    pub convention: Convention,
    pub axis: [Polarization; 2],
    /// joint[i][j] = Re ⟨P(axis[i]) ⊗ P(axis[j])⟩_w.
    pub joint: [[f64; 2]; 2],
    /// Marginal weak values of photon 1 along the axis.
    pub marginals_photon1: [f64; 2],
    /// Marginal weak values of photon 2 along the axis.
    pub marginals_photon2: [f64; 2],
    /// Σ of the joint table; 1 by the sum rule.
    pub total: f64,
    /// Largest imaginary part encountered anywhere in the table; all these
    /// weak values are real, so this is rounding noise.
    pub max_imag_residual: f64,
    pub postselection_probability: f64,
}

/// Computes the full table for a scenario. On the Hardy ensemble the joint
/// values are (inner-inner, inner-outer, outer-inner, outer-outer) =
/// (0, 1, 1, -1) and both marginals are (1, 0): each photon is certainly
/// in its inner arm, yet jointly they are never both there, paid for by
/// the negative outer-outer value.
pub fn weak_value_table(s: &HardyScenario) -> Result<WeakValueTable> {
    let e = s.ensemble();
    let axis = s.axis();
    let mut joint = [[0.0; 2]; 2];
    let mut max_imag: f64 = 0.0;
    let mut total = 0.0;
    for (i, &p1) in axis.iter().enumerate() {
        for (j, &p2) in axis.iter().enumerate() {
            let w = weak_value_spectral(&e, &s.joint_projector(p1, p2), "joint")?;
            joint[i][j] = w.value.re;
            total += w.value.re;
            max_imag = max_imag.max(w.value.im.abs());
        }
    }
    let mut marginals_photon1 = [0.0; 2];
    let mut marginals_photon2 = [0.0; 2];
    for (i, &pol) in axis.iter().enumerate() {
        for (photon, slot) in [
            (Photon::One, &mut marginals_photon1),
            (Photon::Two, &mut marginals_photon2),
        ] {
            let w = weak_value_spectral(&e, &s.single_projector(photon, pol), "single")?;
            slot[i] = w.value.re;
            max_imag = max_imag.max(w.value.im.abs());
        }
    }
    Ok(WeakValueTable {
        convention: s.convention(),
        axis,
        joint,
        marginals_photon1,
        marginals_photon2,
        total,
        max_imag_residual: max_imag,
        postselection_probability: e.postselection_probability(),
    })
}

/// Diagnostics for the vector observable built from the four joint
/// projectors with per-photon weights (γ on V, ε on H).
#[derive(Debug, Clone)]
pub struct VectorOperatorReport {
    pub gamma: f64,
    pub epsilon: f64,
    /// Entrywise residual between each component and the matching
    /// single-photon observable extended by identity.
    pub decomposition_residual: f64,
    /// Componentwise weak values of the vector observable; component 0
    /// reads photon 2, component 1 reads photon 1.
    pub vector_values: [Complex64; 2],
    /// Weak values of the extended single-photon observables in the same
    /// component order.
    pub single_values: [Complex64; 2],
    /// max |vector_values[k] - single_values[k]|.
    pub consistency_residual: f64,
    /// ⟨P(inner) ⊗ P(inner)⟩_w: the joint quantity the vector observable
    /// is sometimes mistaken for.
    pub joint_inner_value: Complex64,
    /// Product of the two componentwise values, for contrast with
    /// `joint_inner_value`.
    pub product_of_components: Complex64,
    /// |joint_inner_value - product_of_components|: how far the
    /// componentwise readout is from any genuinely joint weak value.
    pub joint_gap: f64,
    /// True when γ = ε, in which case both components collapse to
    /// multiples of the identity and carry no polarization information.
    pub components_are_identity_multiples: bool,
}

/// Analyzes the vector observable on the scenario's ensemble.
///
/// The four-projector construction looks joint but is not: componentwise
/// it factors into single-photon observables (verified entrywise), its
/// component weak values equal the single-photon weak values (verified
/// numerically), and it carries none of the joint inner-inner information.
/// Note the weights are attached to polarization letters, not arms: γ
/// multiplies the V projector. Which arm that measures is set by the
/// scenario's convention, so the same (γ, ε) pair reads out the inner arm
/// under [`Convention::VInner`] and the outer arm under
/// [`Convention::HInner`].
pub fn a12_analysis(s: &HardyScenario, gamma: f64, epsilon: f64) -> Result<VectorOperatorReport> {
    let e = s.ensemble();
    let v = build_readout_vector(gamma, epsilon)?;

    // (i) entrywise: component 0 = I ⊗ A, component 1 = A ⊗ I.
    let single = weighted_polarization(gamma, epsilon)?.to_dense();
    let id = Operator::identity(2);
    let res0 = v.components()[0]
        .to_dense()
        .max_abs_diff(&id.tensor(&single));
    let res1 = v.components()[1]
        .to_dense()
        .max_abs_diff(&single.tensor(&id));
    let decomposition_residual = res0.max(res1);

    // (ii) componentwise weak values equal the single-photon ones.
    let vector = vector_weak_value(&e, &v)?;
    let vector_values = [vector[0].value, vector[1].value];
    let single_values = [
        weak_value(&e, &id.tensor(&single), "photon 2 readout")?.value,
        weak_value(&e, &single.tensor(&id), "photon 1 readout")?.value,
    ];
    let consistency_residual = vector_values
        .iter()
        .zip(&single_values)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);

    // (iii) contrast with the genuinely joint inner-inner weak value.
    let inner = s.inner_polarization();
    let joint_inner_value =
        weak_value_spectral(&e, &s.joint_projector(inner, inner), "inner-inner")?.value;
    let product_of_components = vector_values[0] * vector_values[1];

    let decomposition = decompose_readout_vector(&v)?;
    let components_are_identity_multiples = decomposition.photon1_factor.branches().len() == 1
        && decomposition.photon2_factor.branches().len() == 1;

    Ok(VectorOperatorReport {
        gamma,
        epsilon,
        decomposition_residual,
        vector_values,
        single_values,
        consistency_residual,
        joint_inner_value,
        product_of_components,
        joint_gap: (joint_inner_value - product_of_components).norm(),
        components_are_identity_multiples,
    })
}

/// Strong (collapsing) arm detection side by side with the weak table.
#[derive(Debug, Clone)]
pub struct StrongComparison {
    pub axis: [Polarization; 2],
    /// Conditional probabilities of the four arm outcomes given successful
    /// post-selection, strong detectors on both photons.
    pub strong_conditionals: [[f64; 2]; 2],
    pub strong_postselection_probability: f64,
    pub weak_postselection_probability: f64,
    /// The weak joint table for the same cells.
    pub weak_joint: [[f64; 2]; 2],
    /// Residual bound on the branch-overlap terms the projective
    /// probabilities neglect.
    pub max_branch_overlap: f64,
    pub sigma: f64,
    pub g: f64,
}

/// Measures both photons' arms with strong couplings (σ = [`STRONG_SIGMA`],
/// g = [`STRONG_G`]) and contrasts the collapsed statistics with the weak
/// table: collapse removes the interference that produced both the certain
/// marginals and the negative outer-outer value; the conditional outcome
/// distribution becomes (0, 1/3, 1/3, 1/3) and the post-selection
/// probability rises from 1/12 to 1/4.
pub fn strong_comparison(s: &HardyScenario) -> Result<StrongComparison> {
    let e = s.ensemble();
    let inner = s.inner_polarization();
    let obs1 = s.single_projector(Photon::One, inner);
    let obs2 = s.single_projector(Photon::Two, inner);
    let strong: StrongReadout = strong_regime(&e, &[obs1, obs2], STRONG_SIGMA, STRONG_G)?;

    // Outcome tuples arrive in branch-declaration order: eigenvalue 1
    // means "inner arm", so tuple (e1, e2) lands in cell
    // [1 - e1][1 - e2] of the inner-first table.
    let mut strong_conditionals = [[0.0; 2]; 2];
    for outcome in &strong.outcomes {
        let i = if outcome.eigenvalues[0] == 1.0 { 0 } else { 1 };
        let j = if outcome.eigenvalues[1] == 1.0 { 0 } else { 1 };
        strong_conditionals[i][j] = outcome.conditional_probability;
    }
    let table = weak_value_table(s)?;
    Ok(StrongComparison {
        axis: s.axis(),
        strong_conditionals,
        strong_postselection_probability: strong.postselection_probability,
        weak_postselection_probability: e.postselection_probability(),
        weak_joint: table.joint,
        max_branch_overlap: strong.max_branch_overlap,
        sigma: STRONG_SIGMA,
        g: STRONG_G,
    })
}

/// The paradox narrated with computed numbers.
#[derive(Debug, Clone)]
pub struct Narrative {
    pub postselection_probability: f64,
    pub table: WeakValueTable,
    pub strong_conditionals: [[f64; 2]; 2],
    pub statements: Vec<String>,
}

/// Renders the interaction-free-measurement story for a scenario, every
/// number computed rather than quoted.
pub fn ifm_narrative(s: &HardyScenario) -> Result<Narrative> {
    let table = weak_value_table(s)?;
    let strong = strong_comparison(s)?;
    let [inner, outer] = s.axis();
    let statements = vec![
        format!(
            "Post-selecting both dark ports succeeds with probability {:.6} (1/12); \
             all conditional statements below refer to that subensemble.",
            table.postselection_probability
        ),
        format!(
            "Each photon's inner-arm ({}) marginal weak value is {:.6}: asked \
             separately, both photons certainly took the overlapping arms.",
            inner.letter(),
            table.marginals_photon1[0]
        ),
        format!(
            "The joint inner-inner weak value is {:.6}: asked jointly, the photons \
             were never both in the overlapping arms, which is how they avoid \
             disturbing each other.",
            table.joint[0][0]
        ),
        format!(
            "Consistency is paid for by the outer-outer ({}{}) joint weak value \
             {:.6}: a negative occupation, the signature anomaly of this ensemble.",
            outer.letter(),
            outer.letter(),
            table.joint[1][1]
        ),
        format!(
            "Strong arm detectors destroy the interference instead of probing it: \
             the conditional outcome distribution becomes ({:.6}, {:.6}, {:.6}, {:.6}) \
             over (inner-inner, inner-outer, outer-inner, outer-outer) and the \
             post-selection probability rises to {:.6}.",
            strong.strong_conditionals[0][0],
            strong.strong_conditionals[0][1],
            strong.strong_conditionals[1][0],
            strong.strong_conditionals[1][1],
            strong.strong_postselection_probability
        ),
    ];
    Ok(Narrative {
        postselection_probability: table.postselection_probability,
        table,
        strong_conditionals: strong.strong_conditionals,
        statements,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_conventions_yield_the_same_table_numbers() {
        for convention in [Convention::VInner, Convention::HInner] {
            let s = build_scenario(convention);
            let t = weak_value_table(&s).unwrap();
            let expected = [[0.0, 1.0], [1.0, -1.0]];
            for i in 0..2 {
                for j in 0..2 {
                    assert!(
                        (t.joint[i][j] - expected[i][j]).abs() < 1e-12,
                        "{convention:?} cell ({i},{j}) = {}",
                        t.joint[i][j]
                    );
                }
            }
            assert!((t.marginals_photon1[0] - 1.0).abs() < 1e-12);
            assert!(t.marginals_photon1[1].abs() < 1e-12);
            assert!((t.marginals_photon2[0] - 1.0).abs() < 1e-12);
            assert!(t.marginals_photon2[1].abs() < 1e-12);
            assert!((t.total - 1.0).abs() < 1e-12);
            assert!(t.max_imag_residual < 1e-12);
            assert!((t.postselection_probability - 1.0 / 12.0).abs() < 1e-12);
        }
    }

    #[test]
    fn axis_tracks_convention() {
        let v = build_scenario(Convention::VInner);
        assert_eq!(v.axis(), [Polarization::V, Polarization::H]);
        let h = build_scenario(Convention::HInner);
        assert_eq!(h.axis(), [Polarization::H, Polarization::V]);
        assert_eq!(v.inner_polarization(), Polarization::V);
    }

    #[test]
    fn vector_report_confirms_componentwise_structure() {
        let s = build_scenario(Convention::VInner);
        let r = a12_analysis(&s, 1.0, 0.0).unwrap();
        assert!(r.decomposition_residual <= 1e-12);
        assert!(r.consistency_residual <= 1e-12);
        // γ=1, ε=0 under V-inner: each component reads "inner arm", weak
        // value 1; the joint inner-inner value is 0.
        for v in r.vector_values {
            assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        }
        assert!(r.joint_inner_value.norm() < 1e-12);
        assert!((r.joint_gap - 1.0).abs() < 1e-12);
        assert!(!r.components_are_identity_multiples);
    }

    #[test]
    fn weight_labels_follow_polarization_not_arm() {
        // Same weights, flipped convention: the components now read the
        // outer arm, whose weak value is 0.
        let s = build_scenario(Convention::HInner);
        let r = a12_analysis(&s, 1.0, 0.0).unwrap();
        for v in r.vector_values {
            assert!(v.norm() < 1e-12);
        }
        assert!(r.decomposition_residual <= 1e-12);
        assert!(r.consistency_residual <= 1e-12);
    }

    #[test]
    fn degenerate_weights_are_flagged() {
        let s = build_scenario(Convention::VInner);
        let r = a12_analysis(&s, 0.5, 0.5).unwrap();
        assert!(r.components_are_identity_multiples);
        for v in r.vector_values {
            assert!((v - Complex64::new(0.5, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn strong_comparison_matches_projective_statistics() {
        let s = build_scenario(Convention::VInner);
        let c = strong_comparison(&s).unwrap();
        let third = 1.0 / 3.0;
        let expected = [[0.0, third], [third, third]];
        for i in 0..2 {
            for j in 0..2 {
                assert!(
                    (c.strong_conditionals[i][j] - expected[i][j]).abs() < 1e-12,
                    "cell ({i},{j}) = {}",
                    c.strong_conditionals[i][j]
                );
            }
        }
        assert!((c.strong_postselection_probability - 0.25).abs() < 1e-12);
        assert!((c.weak_postselection_probability - 1.0 / 12.0).abs() < 1e-12);
        assert!(c.max_branch_overlap < 1e-21);
    }

    #[test]
    fn narrative_numbers_are_substituted() {
        let s = build_scenario(Convention::VInner);
        let n = ifm_narrative(&s).unwrap();
        assert_eq!(n.statements.len(), 5);
        assert!(n.statements[0].contains("0.083333"));
        assert!(n.statements[1].contains("1.000000"));
        assert!(n.statements[2].contains("0.000000"));
        assert!(n.statements[3].contains("-1.000000"));
        assert!(n.statements[4].contains("0.250000"));
    }
}
