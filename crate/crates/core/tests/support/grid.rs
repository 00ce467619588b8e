//! Position-grid quadrature oracle for the Gaussian pointer readout.
//!
//! The oracle never touches the overlap algebra: it materializes the full
//! post-selected pointer wavefunction (or, for two pointers, every pairwise
//! Gaussian integral) on a midpoint grid of 2^12 points spanning 40σ and
//! integrates numerically. Derivatives for the momentum mean use the exact
//! pointwise Gaussian derivative, not finite differences, so quadrature is
//! the only error source and sits far below the 1e-8 comparison tolerance.
//!
//! Shared between test targets via `#[path]` inclusion; it contains no
//! tests of its own, only checkers that panic on disagreement.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use hardyweak::pointer::{GaussianBranchState, PointerConfig};
use hardyweak::qcore::{Ket, Operator, SpectralOperator};

pub const GRID_POINTS: usize = 1 << 12;
pub const GRID_WIDTH_SIGMAS: f64 = 40.0;
pub const ORACLE_TOL: f64 = 1e-8;

/// Normalized Gaussian pointer profile centered at `u`.
fn phi(x: f64, u: f64, sigma: f64) -> f64 {
    let norm = (2.0 * std::f64::consts::PI * sigma * sigma).powf(-0.25);
    norm * (-(x - u) * (x - u) / (4.0 * sigma * sigma)).exp()
}

/// d/dx of [`phi`].
fn phi_prime(x: f64, u: f64, sigma: f64) -> f64 {
    -(x - u) / (2.0 * sigma * sigma) * phi(x, u, sigma)
}

struct Grid {
    xs: Vec<f64>,
    dx: f64,
}

impl Grid {
    fn for_sigma(sigma: f64) -> Self {
        let width = GRID_WIDTH_SIGMAS * sigma;
        let dx = width / GRID_POINTS as f64;
        let xs = (0..GRID_POINTS)
            .map(|i| -0.5 * width + (i as f64 + 0.5) * dx)
            .collect();
        Self { xs, dx }
    }
}

fn random_unit_ket(rng: &mut ChaCha8Rng, dim: usize) -> Ket {
    loop {
        let amps: Vec<Complex64> = (0..dim)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let k = Ket::new(amps).unwrap();
        if k.norm() > 0.3 {
            return k.normalize().unwrap();
        }
    }
}

fn random_projector_obs(rng: &mut ChaCha8Rng, dim: usize) -> SpectralOperator {
    let axis = random_unit_ket(rng, dim);
    SpectralOperator::from_projector(&Operator::projector(&axis).unwrap()).unwrap()
}

/// Collects post-selected branch coefficients and shifts.
fn postselected_branches(
    state: &GaussianBranchState,
    post: &Ket,
) -> Vec<(Complex64, Vec<f64>)> {
    state
        .branches()
        .map(|(sys, shifts)| (post.inner(sys).unwrap(), shifts.to_vec()))
        .collect()
}

/// Checks `count` random single-pointer instances against the grid oracle,
/// panicking on the first moment that strays beyond [`ORACLE_TOL`].
pub fn check_single_pointer_instances(count: usize, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checked = 0;
    while checked < count {
        let sigma = rng.gen_range(0.6..1.8);
        let g = rng.gen_range(0.2..1.2);
        let pre = random_unit_ket(&mut rng, 2);
        let post = random_unit_ket(&mut rng, 2);
        let obs = random_projector_obs(&mut rng, 2);

        let state = GaussianBranchState::from_pre(&pre)
            .unwrap()
            .couple(&obs, PointerConfig::new(sigma, g).unwrap())
            .unwrap();
        let Ok(readout) = state.readout(&post) else {
            continue;
        };
        if readout.postselection_probability < 1e-3 {
            continue;
        }

        // Oracle: materialize Φ(x) = Σ_j c_j φ(x - u_j) and integrate.
        let branches = postselected_branches(&state, &post);
        let grid = Grid::for_sigma(sigma);
        let mut norm = 0.0;
        let mut mean_x = 0.0;
        let mut mean_xx = 0.0;
        let mut mom = Complex64::new(0.0, 0.0);
        for &x in &grid.xs {
            let mut value = Complex64::new(0.0, 0.0);
            let mut deriv = Complex64::new(0.0, 0.0);
            for (c, shifts) in &branches {
                value += c * phi(x, shifts[0], sigma);
                deriv += c * phi_prime(x, shifts[0], sigma);
            }
            let density = value.norm_sqr();
            norm += density;
            mean_x += x * density;
            mean_xx += x * x * density;
            // ⟨p⟩ integrand: conj(Φ)(-i Φ'); the -i turns the imaginary
            // part of conj(Φ)Φ' into the real momentum density.
            mom += value.conj() * deriv;
        }
        norm *= grid.dx;
        mean_x *= grid.dx / norm;
        mean_xx *= grid.dx / norm;
        let mean_p = (mom * grid.dx).im / norm;

        assert!(
            (readout.postselection_probability - norm).abs() < ORACLE_TOL,
            "norm: closed {} vs grid {}",
            readout.postselection_probability,
            norm
        );
        assert!((readout.mean_x[0] - mean_x).abs() < ORACLE_TOL);
        assert!((readout.mean_p[0] - mean_p).abs() < ORACLE_TOL);
        assert!((readout.corr_xx[0][0] - mean_xx).abs() < ORACLE_TOL);
        checked += 1;
    }
}

/// Checks `count` random two-pointer instances against the grid oracle.
pub fn check_two_pointer_instances(count: usize, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checked = 0;
    while checked < count {
        let sigma1 = rng.gen_range(0.6..1.6);
        let sigma2 = rng.gen_range(0.6..1.6);
        let g1 = rng.gen_range(0.2..1.0);
        let g2 = rng.gen_range(0.2..1.0);
        let pre = random_unit_ket(&mut rng, 4);
        let post = random_unit_ket(&mut rng, 4);
        let obs1 = random_projector_obs(&mut rng, 2).tensor_identity_right(2);
        let obs2 = random_projector_obs(&mut rng, 2).tensor_identity_left(2);

        let state = GaussianBranchState::from_pre(&pre)
            .unwrap()
            .couple(&obs1, PointerConfig::new(sigma1, g1).unwrap())
            .unwrap()
            .couple(&obs2, PointerConfig::new(sigma2, g2).unwrap())
            .unwrap();
        let Ok(readout) = state.readout(&post) else {
            continue;
        };
        if readout.postselection_probability < 1e-3 {
            continue;
        }

        // Oracle: numerical one-axis kernels G0, Gx, Gp per pointer,
        // combined over branch pairs. Everything Gaussian is integrated on
        // the grid; nothing reuses the closed forms under test.
        let branches = postselected_branches(&state, &post);
        let grids = [Grid::for_sigma(sigma1), Grid::for_sigma(sigma2)];
        let sigmas = [sigma1, sigma2];
        let kernel = |axis: usize, u: f64, v: f64| -> (f64, f64, Complex64) {
            let grid = &grids[axis];
            let sigma = sigmas[axis];
            let mut g0 = 0.0;
            let mut gx = 0.0;
            let mut gp = 0.0;
            for &x in &grid.xs {
                let bra = phi(x, u, sigma);
                let ket = phi(x, v, sigma);
                g0 += bra * ket;
                gx += x * bra * ket;
                gp += bra * phi_prime(x, v, sigma);
            }
            (
                g0 * grid.dx,
                gx * grid.dx,
                // ∫ φ_u (-i φ_v') dx is purely imaginary for real φ.
                Complex64::new(0.0, -gp * grid.dx),
            )
        };

        let mut norm = Complex64::new(0.0, 0.0);
        let mut mean = [Complex64::new(0.0, 0.0); 2];
        let mut momentum = [Complex64::new(0.0, 0.0); 2];
        let mut corr = Complex64::new(0.0, 0.0);
        for (cj, uj) in &branches {
            for (ck, uk) in &branches {
                let w = cj.conj() * ck;
                let k1 = kernel(0, uj[0], uk[0]);
                let k2 = kernel(1, uj[1], uk[1]);
                norm += w * k1.0 * k2.0;
                mean[0] += w * k1.1 * k2.0;
                mean[1] += w * k1.0 * k2.1;
                corr += w * k1.1 * k2.1;
                momentum[0] += w * k1.2 * k2.0;
                momentum[1] += w * k1.0 * k2.2;
            }
        }
        let n = norm.re;
        assert!((readout.postselection_probability - n).abs() < ORACLE_TOL);
        for axis in 0..2 {
            assert!((readout.mean_x[axis] - mean[axis].re / n).abs() < ORACLE_TOL);
            assert!(
                (readout.mean_p[axis] - momentum[axis].re / n).abs() < ORACLE_TOL,
                "axis {axis}: closed {} vs grid {}",
                readout.mean_p[axis],
                momentum[axis].re / n
            );
        }
        assert!((readout.corr_xx[0][1] - corr.re / n).abs() < ORACLE_TOL);
        assert!((readout.corr_xx[1][0] - corr.re / n).abs() < ORACLE_TOL);
        checked += 1;
    }
}
