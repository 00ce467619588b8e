//! Weak values for pre- and post-selected ensembles.
//!
//! The weak value of an observable A between pre-selection |ψ⟩ and
//! post-selection |φ⟩ is ⟨φ|A|ψ⟩ / ⟨φ|ψ⟩. It is linear in A, can lie far
//! outside the spectrum of A, and for products of observables on different
//! subsystems it does not factor into the product of the single-subsystem
//! weak values. The diagnostics here quantify both properties.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qcore::{Ket, Operator, SpectralOperator, TOL};

/// Overlaps at or below this magnitude are treated as orthogonal
/// post-selection: the conditional ensemble is empty and weak values are
/// undefined.
pub const ORTHOGONALITY_THRESHOLD: f64 = 1e-12;

/// A pre- and post-selected ensemble: normalized |ψ⟩ (pre) and |φ⟩ (post)
/// with the cached overlap ⟨φ|ψ⟩.
#[derive(Debug, Clone, PartialEq)]
pub struct PrePostEnsemble {
    pre: Ket,
    post: Ket,
    overlap: Complex64,
}

impl PrePostEnsemble {
    /// Both states must already be normalized within [`TOL`].
    pub fn new(pre: Ket, post: Ket) -> Result<Self> {
        if pre.dim() != post.dim() {
            return Err(Error::DimensionMismatch {
                expected: pre.dim(),
                got: post.dim(),
            });
        }
        pre.require_normalized()?;
        post.require_normalized()?;
        let overlap = post.inner(&pre).expect("dims checked");
        Ok(Self { pre, post, overlap })
    }

    /// Normalizes both inputs first; rejects zero vectors.
    pub fn from_unnormalized(pre: &Ket, post: &Ket) -> Result<Self> {
        Self::new(pre.normalize()?, post.normalize()?)
    }

    pub fn pre(&self) -> &Ket {
        &self.pre
    }

    pub fn post(&self) -> &Ket {
        &self.post
    }

    pub fn dim(&self) -> usize {
        self.pre.dim()
    }

    /// ⟨φ|ψ⟩.
    pub fn overlap(&self) -> Complex64 {
        self.overlap
    }

    /// |⟨φ|ψ⟩|², the probability that post-selection succeeds on the
    /// undisturbed ensemble.
    pub fn postselection_probability(&self) -> f64 {
        self.overlap.norm_sqr()
    }

    /// True when the overlap magnitude is at or below
    /// [`ORTHOGONALITY_THRESHOLD`].
    pub fn is_orthogonal(&self) -> bool {
        self.overlap.norm() <= ORTHOGONALITY_THRESHOLD
    }

    fn require_overlap(&self) -> Result<Complex64> {
        if self.is_orthogonal() {
            return Err(Error::OrthogonalPostSelection);
        }
        Ok(self.overlap)
    }
}

/// A labeled weak value.
#[derive(Debug, Clone, PartialEq)]
pub struct WeakValue {
    pub label: String,
    pub value: Complex64,
}

/// ⟨φ|A|ψ⟩ / ⟨φ|ψ⟩.
pub fn weak_value(e: &PrePostEnsemble, a: &Operator, label: &str) -> Result<WeakValue> {
    let overlap = e.require_overlap()?;
    let a_pre = a.apply(e.pre())?;
    let value = e.post().inner(&a_pre).expect("dims checked") / overlap;
    Ok(WeakValue {
        label: label.to_string(),
        value,
    })
}

/// Weak value of an observable given in spectral form.
pub fn weak_value_spectral(
    e: &PrePostEnsemble,
    a: &SpectralOperator,
    label: &str,
) -> Result<WeakValue> {
    weak_value(e, &a.to_dense(), label)
}

/// Outcome of a sum-rule check: weak values of the parts, of the whole, and
/// the linearity residual |Σₖ ⟨Aₖ⟩_w − ⟨A⟩_w|.
#[derive(Debug, Clone)]
pub struct SumRuleCheck {
    pub part_values: Vec<Complex64>,
    pub whole_value: Complex64,
    pub residual: f64,
}

/// Verifies weak-value linearity for a decomposition A = Σₖ Aₖ.
///
/// The operator identity itself is validated first (entrywise within
/// [`TOL`]); a decomposition that does not sum to the whole would conflate
/// an algebra mistake with arithmetic error.
pub fn sum_rule_check(
    e: &PrePostEnsemble,
    parts: &[Operator],
    whole: &Operator,
) -> Result<SumRuleCheck> {
    let mut sum = Operator::zeros(whole.dim());
    for p in parts {
        if p.dim() != whole.dim() {
            return Err(Error::DimensionMismatch {
                expected: whole.dim(),
                got: p.dim(),
            });
        }
        sum = sum.add(p).expect("dims checked");
    }
    let op_residual = sum.max_abs_diff(whole);
    if op_residual > TOL {
        return Err(Error::InvalidSpectralForm("parts do not sum to the whole"));
    }
    let part_values = parts
        .iter()
        .map(|p| weak_value(e, p, "").map(|w| w.value))
        .collect::<Result<Vec<_>>>()?;
    let whole_value = weak_value(e, whole, "")?.value;
    let part_sum: Complex64 = part_values.iter().sum();
    Ok(SumRuleCheck {
        part_values,
        whole_value,
        residual: (part_sum - whole_value).norm(),
    })
}

/// Outcome of a product-rule check for observables on different photons.
#[derive(Debug, Clone)]
pub struct ProductRuleCheck {
    /// ⟨A⊗B⟩_w.
    pub joint: Complex64,
    /// ⟨A⊗I⟩_w · ⟨I⊗B⟩_w.
    pub product: Complex64,
    /// |joint − product|.
    pub violation: f64,
}

/// Measures how far the joint weak value of A (photon 1) and B (photon 2)
/// is from the product of the marginal weak values. Zero for product
/// pre/post states; generally nonzero for entangled ensembles.
pub fn product_rule_violation(
    e: &PrePostEnsemble,
    a_photon1: &Operator,
    b_photon2: &Operator,
) -> Result<ProductRuleCheck> {
    let d1 = a_photon1.dim();
    let d2 = b_photon2.dim();
    if d1 * d2 != e.dim() {
        return Err(Error::NonFactorizableDim {
            dim: e.dim(),
            left: d1,
            right: d2,
        });
    }
    let joint = weak_value(e, &a_photon1.tensor(b_photon2), "")?.value;
    let a_ext = a_photon1.tensor(&Operator::identity(d2));
    let b_ext = Operator::identity(d1).tensor(b_photon2);
    let wa = weak_value(e, &a_ext, "")?.value;
    let wb = weak_value(e, &b_ext, "")?.value;
    let product = wa * wb;
    Ok(ProductRuleCheck {
        joint,
        product,
        violation: (joint - product).norm(),
    })
}

/// An observable whose outcome is a tuple: one spectral operator per
/// component, all acting on the same space.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorOperator {
    components: Vec<SpectralOperator>,
}

impl VectorOperator {
    pub fn new(components: Vec<SpectralOperator>) -> Result<Self> {
        let Some(first) = components.first() else {
            return Err(Error::InvalidVectorOperator);
        };
        let dim = first.dim();
        if components.iter().any(|c| c.dim() != dim) {
            return Err(Error::InvalidVectorOperator);
        }
        Ok(Self { components })
    }

    pub fn components(&self) -> &[SpectralOperator] {
        &self.components
    }

    pub fn dim(&self) -> usize {
        self.components[0].dim()
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }
}

/// Componentwise weak values of a vector observable, labeled by component
/// index.
pub fn vector_weak_value(e: &PrePostEnsemble, v: &VectorOperator) -> Result<Vec<WeakValue>> {
    v.components()
        .iter()
        .enumerate()
        .map(|(k, c)| weak_value_spectral(e, c, &format!("component {k}")))
        .collect()
}

/// The single-photon observable that weights polarization V by `gamma` and
/// H by `epsilon`: γ|V⟩⟨V| + ε|H⟩⟨H|, in spectral form with the V branch
/// declared first.
pub fn weighted_polarization(gamma: f64, epsilon: f64) -> Result<SpectralOperator> {
    if !gamma.is_finite() {
        return Err(Error::InvalidSpectralForm("non-finite eigenvalue"));
    }
    if !epsilon.is_finite() {
        return Err(Error::InvalidSpectralForm("non-finite eigenvalue"));
    }
    let p_v = Operator::projector(&Ket::basis_state(2, 1)).expect("basis state");
    let p_h = Operator::projector(&Ket::basis_state(2, 0)).expect("basis state");
    SpectralOperator::new(vec![(gamma, p_v), (epsilon, p_h)])
}

/// The two-pointer vector observable built from the four joint polarization
/// projectors of the photon pair.
///
/// Each joint projector |xy⟩⟨xy| carries an eigenvalue pair: the first slot
/// is what pointer 0 shows, the second what pointer 1 shows. The assignment
/// weights V by `gamma` and H by `epsilon` per photon, with pointer 0
/// reading photon 2 and pointer 1 reading photon 1. Componentwise the sum
/// collapses to single-photon observables:
///
/// * component 0 = I ⊗ (γ|V⟩⟨V| + ε|H⟩⟨H|)
/// * component 1 = (γ|V⟩⟨V| + ε|H⟩⟨H|) ⊗ I
///
/// so the "joint" vector observable never couples the photons; see
/// [`decompose_readout_vector`].
pub fn build_readout_vector(gamma: f64, epsilon: f64) -> Result<VectorOperator> {
    let weight = |pol_index: usize| if pol_index == 1 { gamma } else { epsilon };
    let mut branches0 = Vec::with_capacity(4);
    let mut branches1 = Vec::with_capacity(4);
    // Basis order HH, HV, VH, VV; photon 1 is the most significant index.
    for i1 in 0..2 {
        for i2 in 0..2 {
            let joint = Operator::projector(
                &Ket::basis_state(2, i1).tensor(&Ket::basis_state(2, i2)),
            )
            .expect("basis state");
            branches0.push((weight(i2), joint.clone()));
            branches1.push((weight(i1), joint));
        }
    }
    VectorOperator::new(vec![
        SpectralOperator::new(branches0)?,
        SpectralOperator::new(branches1)?,
    ])
}

/// A two-component vector observable separated into per-photon factors.
#[derive(Debug, Clone)]
pub struct ReadoutDecomposition {
    /// Factor of component 1, acting on photon 1.
    pub photon1_factor: SpectralOperator,
    /// Factor of component 0, acting on photon 2.
    pub photon2_factor: SpectralOperator,
    /// Largest entrywise deviation between the components and their
    /// factored forms; at most [`TOL`] when this function succeeds.
    pub residual: f64,
}

/// Splits a two-component vector observable on a 2x2-photon space into
/// single-photon factors, verifying entrywise that component 0 equals
/// I ⊗ B and component 1 equals A ⊗ I. Fails with [`Error::NotSeparable`]
/// when either component couples both photons.
pub fn decompose_readout_vector(v: &VectorOperator) -> Result<ReadoutDecomposition> {
    if v.len() != 2 || v.dim() != 4 {
        return Err(Error::InvalidVectorOperator);
    }
    let m0 = v.components()[0].to_dense();
    let m1 = v.components()[1].to_dense();
    // Component 0 should be I⊗B: read B off the top-left block.
    let b = Operator::from_fn(2, |i, j| m0.entry(i, j)).expect("finite entries");
    let res0 = Operator::identity(2).tensor(&b).max_abs_diff(&m0);
    // Component 1 should be A⊗I: read A off the even-index lattice.
    let a = Operator::from_fn(2, |i, j| m1.entry(2 * i, 2 * j)).expect("finite entries");
    let res1 = a.tensor(&Operator::identity(2)).max_abs_diff(&m1);
    let residual = res0.max(res1);
    if residual > TOL {
        return Err(Error::NotSeparable);
    }
    Ok(ReadoutDecomposition {
        photon1_factor: SpectralOperator::from_hermitian_2x2(&a)?,
        photon2_factor: SpectralOperator::from_hermitian_2x2(&b)?,
        residual,
    })
}
