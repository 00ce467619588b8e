//! Von Neumann measurement with Gaussian pointers, in closed form.
//!
//! Each measured observable couples one fresh pointer to the system through
//! exp(-i g A ⊗ p̂). Writing A = Σₖ aₖ Pₖ, the coupled state is a sum of
//! branches: the system component Pₖ|ψ⟩ paired with a pointer Gaussian
//! shifted to g·aₖ. Post-selected pointer moments then reduce to sums over
//! branch pairs weighted by Gaussian overlap integrals, all with closed
//! forms:
//!
//! * ⟨φ_u|φ_v⟩            = exp(-(u-v)²/(8σ²))
//! * ⟨φ_u|x̂|φ_v⟩          = ((u+v)/2) ⟨φ_u|φ_v⟩
//! * ⟨φ_u|x̂²|φ_v⟩         = (((u+v)/2)² + σ²) ⟨φ_u|φ_v⟩
//! * ⟨φ_u|p̂|φ_v⟩          = (i(u-v)/(4σ²)) ⟨φ_u|φ_v⟩
//!
//! for real Gaussians φ_u(x) = (2πσ²)^(-1/4) exp(-(x-u)²/(4σ²)). No grid
//! or sampling is involved; the only approximation anywhere is the weak
//! limit itself, which the estimators handle by extrapolating g → 0.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qcore::{Ket, SpectralOperator};
use crate::weakval::{weak_value, PrePostEnsemble};

/// Weak-limit momentum readout: Im⟨A⟩_w = IMAG_READOUT_COEFF · σ² ⟨p⟩ / g.
/// Pinned by the calibration fits in tests/calibration.rs.
pub const IMAG_READOUT_COEFF: f64 = 2.0;

/// Weak-limit correlation readout:
/// ⟨x₁x₂⟩/(g₁g₂) → JOINT_CORR_COEFF · (Re⟨A⊗B⟩_w + Re(⟨A⟩_w · conj⟨B⟩_w)).
/// Pinned by the calibration fits in tests/calibration.rs.
pub const JOINT_CORR_COEFF: f64 = 0.5;

/// Minimum g/σ for the strong-collapse regime: branch overlaps are then at
/// most exp(-(g/σ)²/8) ≈ 4e-6, far below every tolerance used here.
pub const STRONG_SEPARATION_MIN: f64 = 10.0;

/// Sample errors at or below this are working-precision noise; order fits
/// exclude them, and an estimator whose samples all sit here reports no
/// fitted order (it has already converged exactly).
pub const ORDER_SATURATION_FLOOR: f64 = 1e-13;

/// Branches with squared norm at or below this are identically zero up to
/// underflow and are dropped during coupling.
const BRANCH_PRUNE_NORM_SQR: f64 = 1e-300;

/// Spread and strength of one pointer coupling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointerConfig {
    sigma: f64,
    g: f64,
}

impl PointerConfig {
    /// `sigma` must be positive and finite; `g` must be finite (zero is a
    /// valid no-op coupling, negative reverses the shift direction).
    pub fn new(sigma: f64, g: f64) -> Result<Self> {
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::InvalidPointerSpread(sigma));
        }
        if !g.is_finite() {
            return Err(Error::InvalidCoupling(g));
        }
        Ok(Self { sigma, g })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn g(&self) -> f64 {
        self.g
    }
}

/// One branch of a coupled system-pointer state: a (generally unnormalized)
/// system component and one pointer shift per coupling applied so far.
#[derive(Debug, Clone)]
struct Branch {
    system: Ket,
    shifts: Vec<f64>,
}

/// A system entangled with a list of Gaussian pointers, kept exactly as a
/// finite branch sum.
#[derive(Debug, Clone)]
pub struct GaussianBranchState {
    dim: usize,
    branches: Vec<Branch>,
    configs: Vec<PointerConfig>,
}

impl GaussianBranchState {
    /// Starts from a normalized system state with no pointers attached.
    pub fn from_pre(pre: &Ket) -> Result<Self> {
        pre.require_normalized()?;
        Ok(Self {
            dim: pre.dim(),
            branches: vec![Branch {
                system: pre.clone(),
                shifts: Vec::new(),
            }],
            configs: Vec::new(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn pointer_count(&self) -> usize {
        self.configs.len()
    }

    pub fn branch_count(&self) -> usize {
        self.branches.len()
    }

    /// Read-only view of the branches: (system component, pointer shifts).
    pub fn branches(&self) -> impl Iterator<Item = (&Ket, &[f64])> {
        self.branches.iter().map(|b| (&b.system, b.shifts.as_slice()))
    }

    pub fn configs(&self) -> &[PointerConfig] {
        &self.configs
    }

    /// Couples a fresh pointer to `obs` via exp(-i g A ⊗ p̂). Each existing
    /// branch splits over the eigenspaces of `obs`, in declared branch
    /// order; components that project to zero are dropped.
    pub fn couple(&self, obs: &SpectralOperator, cfg: PointerConfig) -> Result<Self> {
        if obs.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: obs.dim(),
            });
        }
        let mut branches = Vec::new();
        for branch in &self.branches {
            for spectral in obs.branches() {
                let system = spectral.projector.apply(&branch.system)?;
                let norm_sqr: f64 = system.amps().iter().map(|a| a.norm_sqr()).sum();
                if norm_sqr <= BRANCH_PRUNE_NORM_SQR {
                    continue;
                }
                let mut shifts = branch.shifts.clone();
                shifts.push(cfg.g * spectral.eigenvalue);
                branches.push(Branch { system, shifts });
            }
        }
        let mut configs = self.configs.clone();
        configs.push(cfg);
        Ok(Self {
            dim: self.dim,
            branches,
            configs,
        })
    }

    /// Squared norm of the full system-pointer state; 1 for any state built
    /// from a normalized pre-selection, since coupling is unitary.
    pub fn total_norm_sqr(&self) -> f64 {
        let mut total = Complex64::new(0.0, 0.0);
        for j in &self.branches {
            for k in &self.branches {
                let sys: Complex64 = j.system.inner(&k.system).expect("equal dims");
                total += sys * self.shift_overlap(&j.shifts, &k.shifts);
            }
        }
        total.re
    }

    fn shift_overlap(&self, u: &[f64], v: &[f64]) -> f64 {
        self.configs
            .iter()
            .zip(u.iter().zip(v))
            .map(|(cfg, (&a, &b))| gaussian_overlap(a, b, cfg.sigma))
            .product()
    }

    /// Projects onto a normalized post-selection and integrates the
    /// pointers out, returning exact moments of every pointer.
    pub fn readout(&self, post: &Ket) -> Result<PointerReadout> {
        post.require_normalized()?;
        if post.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: post.dim(),
            });
        }
        let p_count = self.configs.len();
        let coeffs: Vec<Complex64> = self
            .branches
            .iter()
            .map(|b| post.inner(&b.system).expect("equal dims"))
            .collect();

        let mut norm = Complex64::new(0.0, 0.0);
        let mut mean_x = vec![Complex64::new(0.0, 0.0); p_count];
        let mut mean_p = vec![Complex64::new(0.0, 0.0); p_count];
        let mut corr = vec![vec![Complex64::new(0.0, 0.0); p_count]; p_count];
        for (j, branch_j) in self.branches.iter().enumerate() {
            for (k, branch_k) in self.branches.iter().enumerate() {
                let weight = coeffs[j].conj()
                    * coeffs[k]
                    * self.shift_overlap(&branch_j.shifts, &branch_k.shifts);
                if weight == Complex64::new(0.0, 0.0) {
                    continue;
                }
                norm += weight;
                // Per-pointer kernel ratios: K/ov, with the bra shift first.
                let pos = |p: usize| 0.5 * (branch_j.shifts[p] + branch_k.shifts[p]);
                for p in 0..p_count {
                    let sigma = self.configs[p].sigma;
                    mean_x[p] += weight * pos(p);
                    let mom = (branch_j.shifts[p] - branch_k.shifts[p])
                        / (4.0 * sigma * sigma);
                    mean_p[p] += weight * Complex64::new(0.0, mom);
                    for q in 0..p_count {
                        let factor = if p == q {
                            pos(p) * pos(p) + sigma * sigma
                        } else {
                            pos(p) * pos(q)
                        };
                        corr[p][q] += weight * factor;
                    }
                }
            }
        }
        let n = norm.re;
        if n <= BRANCH_PRUNE_NORM_SQR {
            return Err(Error::OrthogonalPostSelection);
        }
        Ok(PointerReadout {
            postselection_probability: n,
            mean_x: mean_x.iter().map(|m| m.re / n).collect(),
            mean_p: mean_p.iter().map(|m| m.re / n).collect(),
            corr_xx: corr
                .iter()
                .map(|row| row.iter().map(|m| m.re / n).collect())
                .collect(),
        })
    }
}

/// Post-selected pointer statistics: exact at any coupling strength.
#[derive(Debug, Clone)]
pub struct PointerReadout {
    /// Probability that the post-selection succeeds on the coupled state.
    pub postselection_probability: f64,
    /// ⟨x̂ₚ⟩ per pointer.
    pub mean_x: Vec<f64>,
    /// ⟨p̂ₚ⟩ per pointer.
    pub mean_p: Vec<f64>,
    /// ⟨x̂ₚ x̂_q⟩ per pointer pair; the diagonal holds ⟨x̂ₚ²⟩.
    pub corr_xx: Vec<Vec<f64>>,
}

fn gaussian_overlap(u: f64, v: f64, sigma: f64) -> f64 {
    let d = u - v;
    (-d * d / (8.0 * sigma * sigma)).exp()
}

/// One coupling strength's worth of single-observable readout.
#[derive(Debug, Clone)]
pub struct SingleSample {
    pub g: f64,
    /// mean_x/g + i · IMAG_READOUT_COEFF σ² mean_p/g.
    pub estimate: Complex64,
    /// |estimate - analytic|.
    pub error: f64,
}

/// Weak-value estimate for one observable from a schedule of finite
/// couplings.
#[derive(Debug, Clone)]
pub struct SingleEstimate {
    /// ⟨A⟩_w computed directly from the ensemble.
    pub analytic: Complex64,
    /// Richardson extrapolation (linear model) of the two weakest samples.
    pub extrapolated: Complex64,
    /// Log-log slope of |error| against g over the non-saturated samples;
    /// `None` when fewer than two samples sit above
    /// [`ORDER_SATURATION_FLOOR`], i.e. the estimator is already exact.
    pub fitted_order: Option<f64>,
    pub samples: Vec<SingleSample>,
}

impl SingleEstimate {
    pub fn extrapolation_error(&self) -> f64 {
        (self.extrapolated - self.analytic).norm()
    }
}

/// Couples one pointer per g in `schedule` to `obs`, reads the weak value
/// off the pointer means, and extrapolates g → 0.
pub fn estimate_single(
    e: &PrePostEnsemble,
    obs: &SpectralOperator,
    sigma: f64,
    schedule: &[f64],
) -> Result<SingleEstimate> {
    validate_schedule(schedule)?;
    let analytic = weak_value(e, &obs.to_dense(), "")?.value;
    let mut samples = Vec::with_capacity(schedule.len());
    for &g in schedule {
        let cfg = PointerConfig::new(sigma, g)?;
        let state = GaussianBranchState::from_pre(e.pre())?.couple(obs, cfg)?;
        let r = state.readout(e.post())?;
        let estimate = Complex64::new(
            r.mean_x[0] / g,
            IMAG_READOUT_COEFF * sigma * sigma * r.mean_p[0] / g,
        );
        samples.push(SingleSample {
            g,
            estimate,
            error: (estimate - analytic).norm(),
        });
    }
    let extrapolated = richardson(&samples.iter().map(|s| (s.g, s.estimate)).collect::<Vec<_>>());
    let fitted_order = fit_order(&samples.iter().map(|s| (s.g, s.error)).collect::<Vec<_>>());
    Ok(SingleEstimate {
        analytic,
        extrapolated,
        fitted_order,
        samples,
    })
}

/// One coupling strength's worth of two-pointer readout.
#[derive(Debug, Clone)]
pub struct JointSample {
    pub g: f64,
    /// ⟨x₁x₂⟩/g² as read off the pointers.
    pub raw_ratio: f64,
    /// raw_ratio / JOINT_CORR_COEFF - Re(⟨A⟩_w conj⟨B⟩_w) with the
    /// marginals estimated from the same run.
    pub extracted: f64,
}

/// Joint weak-value estimate from simultaneous two-pointer readout.
#[derive(Debug, Clone)]
pub struct JointEstimate {
    /// ⟨A⊗B⟩_w computed directly from the ensemble.
    pub analytic: Complex64,
    /// Richardson-extrapolated Re⟨A⊗B⟩_w recovered from the correlator.
    pub extracted: f64,
    /// Richardson-extrapolated marginal ⟨A⊗I⟩_w from pointer 1.
    pub marginal_1: Complex64,
    /// Richardson-extrapolated marginal ⟨I⊗B⟩_w from pointer 2.
    pub marginal_2: Complex64,
    pub samples: Vec<JointSample>,
}

impl JointEstimate {
    pub fn extraction_error(&self) -> f64 {
        (self.extracted - self.analytic.re).abs()
    }
}

/// Couples one pointer to A on photon 1 and one to B on photon 2 at each g
/// in `schedule`, then recovers Re⟨A⊗B⟩_w from the position correlator:
/// the correlator mixes the joint weak value with the product of marginals,
/// and the marginals are estimated from the same pointers and subtracted.
pub fn estimate_joint(
    e: &PrePostEnsemble,
    obs_photon1: &SpectralOperator,
    obs_photon2: &SpectralOperator,
    sigma: f64,
    schedule: &[f64],
) -> Result<JointEstimate> {
    validate_schedule(schedule)?;
    let d1 = obs_photon1.dim();
    let d2 = obs_photon2.dim();
    if d1 * d2 != e.dim() {
        return Err(Error::NonFactorizableDim {
            dim: e.dim(),
            left: d1,
            right: d2,
        });
    }
    let ext1 = obs_photon1.tensor_identity_right(d2);
    let ext2 = obs_photon2.tensor_identity_left(d1);
    let analytic = weak_value(
        e,
        &obs_photon1.to_dense().tensor(&obs_photon2.to_dense()),
        "",
    )?
    .value;

    let mut samples = Vec::with_capacity(schedule.len());
    let mut marginal_samples_1 = Vec::with_capacity(schedule.len());
    let mut marginal_samples_2 = Vec::with_capacity(schedule.len());
    for &g in schedule {
        let cfg = PointerConfig::new(sigma, g)?;
        let state = GaussianBranchState::from_pre(e.pre())?
            .couple(&ext1, cfg)?
            .couple(&ext2, cfg)?;
        let r = state.readout(e.post())?;
        let est = |idx: usize| {
            Complex64::new(
                r.mean_x[idx] / g,
                IMAG_READOUT_COEFF * sigma * sigma * r.mean_p[idx] / g,
            )
        };
        let est_a = est(0);
        let est_b = est(1);
        let raw_ratio = r.corr_xx[0][1] / (g * g);
        let extracted = raw_ratio / JOINT_CORR_COEFF - (est_a * est_b.conj()).re;
        samples.push(JointSample {
            g,
            raw_ratio,
            extracted,
        });
        marginal_samples_1.push((g, est_a));
        marginal_samples_2.push((g, est_b));
    }
    let extracted_pairs: Vec<(f64, Complex64)> = samples
        .iter()
        .map(|s| (s.g, Complex64::new(s.extracted, 0.0)))
        .collect();
    Ok(JointEstimate {
        analytic,
        extracted: richardson(&extracted_pairs).re,
        marginal_1: richardson(&marginal_samples_1),
        marginal_2: richardson(&marginal_samples_2),
        samples,
    })
}

/// One joint outcome of a strong sequential measurement.
#[derive(Debug, Clone)]
pub struct StrongOutcome {
    /// One eigenvalue per measured observable, in coupling order.
    pub eigenvalues: Vec<f64>,
    /// Probability of this outcome tuple together with post-selection.
    pub joint_probability: f64,
    /// Probability of this outcome tuple given post-selection succeeded.
    pub conditional_probability: f64,
}

/// Joint outcome statistics of strongly coupled sequential measurements.
#[derive(Debug, Clone)]
pub struct StrongReadout {
    /// All eigenvalue tuples in branch-declaration order (first observable
    /// outermost), including zero-probability tuples.
    pub outcomes: Vec<StrongOutcome>,
    /// Σ of joint probabilities: how often the post-selection fires at all.
    pub postselection_probability: f64,
    /// Upper bound on any residual overlap between distinct pointer
    /// branches: exp(-(g Δ)²/(8σ²)) with Δ the smallest nonzero eigenvalue
    /// gap. The projective probabilities above ignore terms of this size.
    pub max_branch_overlap: f64,
}

/// Measures the observables sequentially with g/σ ≥
/// [`STRONG_SEPARATION_MIN`], where the pointer branches are effectively
/// orthogonal and the readout collapses to projective statistics.
pub fn strong_regime(
    e: &PrePostEnsemble,
    observables: &[SpectralOperator],
    sigma: f64,
    g: f64,
) -> Result<StrongReadout> {
    if observables.is_empty() {
        return Err(Error::InvalidSpectralForm("no branches"));
    }
    for obs in observables {
        if obs.dim() != e.dim() {
            return Err(Error::DimensionMismatch {
                expected: e.dim(),
                got: obs.dim(),
            });
        }
    }
    PointerConfig::new(sigma, g)?;
    let separation = g / sigma;
    if separation < STRONG_SEPARATION_MIN {
        return Err(Error::NotStrongRegime {
            min: STRONG_SEPARATION_MIN,
            got: separation,
        });
    }

    // Enumerate all eigenvalue tuples, projecting sequentially.
    let mut partial: Vec<(Vec<f64>, Ket)> = vec![(Vec::new(), e.pre().clone())];
    for obs in observables {
        let mut next = Vec::with_capacity(partial.len() * obs.branches().len());
        for (eigs, sys) in &partial {
            for spectral in obs.branches() {
                let mut tagged = eigs.clone();
                tagged.push(spectral.eigenvalue);
                next.push((tagged, spectral.projector.apply(sys)?));
            }
        }
        partial = next;
    }
    let joint: Vec<(Vec<f64>, f64)> = partial
        .iter()
        .map(|(eigs, sys)| {
            let c = e.post().inner(sys).expect("equal dims");
            (eigs.clone(), c.norm_sqr())
        })
        .collect();
    let total: f64 = joint.iter().map(|(_, p)| p).sum();
    if total <= BRANCH_PRUNE_NORM_SQR {
        return Err(Error::OrthogonalPostSelection);
    }
    let outcomes = joint
        .into_iter()
        .map(|(eigenvalues, p)| StrongOutcome {
            eigenvalues,
            joint_probability: p,
            conditional_probability: p / total,
        })
        .collect();

    let mut min_gap = f64::INFINITY;
    for obs in observables {
        let branches = obs.branches();
        for (i, bi) in branches.iter().enumerate() {
            for bj in branches.iter().skip(i + 1) {
                let gap = (bi.eigenvalue - bj.eigenvalue).abs();
                if gap > 0.0 {
                    min_gap = min_gap.min(gap);
                }
            }
        }
    }
    let max_branch_overlap = if min_gap.is_finite() {
        gaussian_overlap(g * min_gap, 0.0, sigma)
    } else {
        // Every observable has a single distinct eigenvalue: there are no
        // off-diagonal branch pairs at all.
        0.0
    };
    Ok(StrongReadout {
        outcomes,
        postselection_probability: total,
        max_branch_overlap,
    })
}

fn validate_schedule(schedule: &[f64]) -> Result<()> {
    if schedule.len() < 3 {
        return Err(Error::InvalidCouplingSchedule { min: 3 });
    }
    for &g in schedule {
        if !(g.is_finite() && g > 0.0) {
            return Err(Error::InvalidCoupling(g));
        }
    }
    if schedule.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidCouplingSchedule { min: 3 });
    }
    Ok(())
}

/// Linear-model Richardson extrapolation from the two weakest couplings:
/// with E(g) ≈ L + Cg, L = (g₁E(g₂) - g₂E(g₁))/(g₁ - g₂) for g₁ > g₂.
fn richardson(samples: &[(f64, Complex64)]) -> Complex64 {
    let (g1, e1) = samples[samples.len() - 2];
    let (g2, e2) = samples[samples.len() - 1];
    (e2 * g1 - e1 * g2) / (g1 - g2)
}

/// Least-squares slope of ln|error| against ln g, excluding saturated
/// samples.
fn fit_order(samples: &[(f64, f64)]) -> Option<f64> {
    let points: Vec<(f64, f64)> = samples
        .iter()
        .filter(|(_, err)| *err > ORDER_SATURATION_FLOOR)
        .map(|(g, err)| (g.ln(), err.ln()))
        .collect();
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mean_x = points.iter().map(|(x, _)| x).sum::<f64>() / n;
    let mean_y = points.iter().map(|(_, y)| y).sum::<f64>() / n;
    let sxy: f64 = points
        .iter()
        .map(|(x, y)| (x - mean_x) * (y - mean_y))
        .sum();
    let sxx: f64 = points.iter().map(|(x, _)| (x - mean_x) * (x - mean_x)).sum();
    Some(sxy / sxx)
}
