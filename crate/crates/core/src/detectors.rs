//! Classical-like (semiquantum) detector models and their statistics.
//!
//! A classical detector responds to the field through a bona fide conditional
//! density over phase space. The continuous-number detector reads
//! `p(n|alpha) = delta(n - |alpha|^2)`; the rotated-quadrature detector reads
//! `p(x|alpha) = delta(x - Re(alpha e^{-i theta}))`. Their statistics on a
//! quantum state are phase-space averages of the Husimi Q function.
//!
//! Each statistic is computed by two independent routes: quadrature over Q
//! (phase averages, y-marginals) and closed-form kernels over the exact
//! quantum distributions (Poisson mixtures, Gaussian smoothing). Route
//! disagreement beyond tolerance fails fast.

use num_complex::Complex;
use num_traits::{Float, Zero};

use crate::fock::{
    ln_factorials, photon_number_distribution, photon_number_moments, quadrature_distribution,
    quadrature_moments, DensityMatrix,
};
use crate::grid::Grid1;
use crate::inversion::SignedJointDistribution;
use crate::two_mode::TwoModeState;
use crate::{eps, r64, to_f64, C, CoreError, Real, Result};

/// Number of uniform phase nodes in the trapezoid average over the coherent
/// phase. `Q(sqrt(n) e^{i phi})` is a trigonometric polynomial of degree
/// below `2 dim` in `phi`, so 256 nodes are exact for every dimension this
/// crate uses; doubling them changes results below 1e-10.
pub const PHASE_NODES: usize = 256;

/// Detector models: two classical kinds and their exact quantum references.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DetectorModel<T> {
    /// Classical intensity reader with a continuous outcome, optionally
    /// widened by a Gaussian response of the given variance.
    ContinuousNumber { response_variance: T },
    /// Classical quadrature reader at angle `theta`, optionally widened by a
    /// Gaussian response.
    RotatedQuadrature { theta: T, response_variance: T },
    /// Exact projective photon-number measurement.
    QuantumNumber,
    /// Exact projective quadrature measurement at angle `theta`.
    QuantumQuadrature { theta: T },
}

impl<T: Real> DetectorModel<T> {
    pub fn continuous_number() -> Self {
        Self::ContinuousNumber {
            response_variance: T::zero(),
        }
    }

    pub fn rotated_quadrature(theta: T) -> Self {
        Self::RotatedQuadrature {
            theta,
            response_variance: T::zero(),
        }
    }

    /// True for the classical kinds, whose conditional responses are bona
    /// fide densities.
    pub fn is_classical(&self) -> bool {
        matches!(
            self,
            Self::ContinuousNumber { .. } | Self::RotatedQuadrature { .. }
        )
    }

    pub fn response_variance(&self) -> T {
        match self {
            Self::ContinuousNumber { response_variance } => *response_variance,
            Self::RotatedQuadrature {
                response_variance, ..
            } => *response_variance,
            _ => T::zero(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.response_variance() < T::zero() {
            return Err(CoreError::InvalidModel(
                "detector response variance must be nonnegative".into(),
            ));
        }
        Ok(())
    }
}

/// Continuous photocount statistics of the classical number detector.
#[derive(Debug, Clone)]
pub struct SemiquantumNumberStats<T: Real> {
    pub n_grid: Grid1<T>,
    pub density: Vec<T>,
    /// Closed-form mean `sum_m (m + 1) p_m`.
    pub mean: T,
    /// Closed-form second moment `sum_m (m^2 + 3m + 2) p_m`.
    pub second_moment: T,
    /// Mean by trapezoid integration of `density`.
    pub grid_mean: T,
    /// Second moment by trapezoid integration of `density`.
    pub grid_second_moment: T,
}

impl<T: Real> SemiquantumNumberStats<T> {
    pub fn variance(&self) -> T {
        self.second_moment - self.mean * self.mean
    }

    pub fn grid_variance(&self) -> T {
        self.grid_second_moment - self.grid_mean * self.grid_mean
    }
}

/// Quadrature statistics of the classical quadrature detector, with both
/// evaluation routes retained.
#[derive(Debug, Clone)]
pub struct SemiquantumQuadratureStats<T: Real> {
    pub x_grid: Grid1<T>,
    /// Density as the imaginary-axis marginal of Q.
    pub density: Vec<T>,
    /// Density as Gaussian smoothing of the exact quadrature distribution.
    pub density_smoothed_route: Vec<T>,
    /// Largest pointwise difference between the two routes.
    pub max_route_discrepancy: T,
    pub mean: T,
    pub second_moment: T,
}

impl<T: Real> SemiquantumQuadratureStats<T> {
    pub fn variance(&self) -> T {
        self.second_moment - self.mean * self.mean
    }
}

/// Joint continuous photocount statistics for two modes.
#[derive(Debug, Clone)]
pub struct SemiquantumJointNumber<T: Real> {
    pub distribution: SignedJointDistribution<T>,
    /// `<n1 n2>` by 2-D trapezoid integration.
    pub correlation: T,
    /// `<n1 n2>` by the closed form `<(n1_hat + 1)(n2_hat + 1)>`.
    pub correlation_closed_form: T,
}

/// Default continuous-number grid for a state: step 0.005, extent sized so
/// that exponential tails stay below the moment gates.
pub fn default_number_grid<T: Real>(rho: &DensityMatrix<T>) -> Result<Grid1<T>> {
    let (mean_n, second_n) = photon_number_moments(rho);
    let (mean, var) = semiquantum_moments_from_quantum(mean_n, second_n);
    Grid1::from_zero(number_grid_max(mean, var), r64(0.005))
}

fn number_grid_max<T: Real>(mean: T, var: T) -> T {
    // Heavy-tailed mixtures decay like exp(-n / s) with s ~ var / mean, so
    // size the grid in units of that scale rather than standard deviations.
    let s_eff = Float::max(T::one(), var / Float::max(mean, r64(1e-2)));
    mean + Float::max(
        r64::<T>(10.0) * Float::sqrt(Float::max(var, T::zero())),
        s_eff * r64(30.0),
    )
}

/// `(mean, variance)` of the semiquantum photocount implied by the exact
/// photon moments: mean shifts by one, variance gains the shifted mean.
fn semiquantum_moments_from_quantum<T: Real>(mean_n: T, second_n: T) -> (T, T) {
    let mean = mean_n + T::one();
    let second = second_n + r64::<T>(3.0) * mean_n + r64(2.0);
    (mean, second - mean * mean)
}

/// Uniform phase sums `S_k = (1/N) sum_j exp(i k phi_j)` for `k = 0..=max_k`.
fn phase_sums<T: Real>(nodes: usize, max_k: usize) -> Vec<C<T>> {
    let mut sums = Vec::with_capacity(max_k + 1);
    let step = T::two_pi() / r64::<T>(nodes as f64);
    let inv_n = T::one() / r64::<T>(nodes as f64);
    for k in 0..=max_k {
        let mut acc = Complex::<T>::zero();
        for j in 0..nodes {
            let phi = step * r64::<T>(j as f64) * r64::<T>(k as f64);
            acc += Complex::from_polar(T::one(), phi);
        }
        sums.push(acc.scale(inv_n));
    }
    sums
}

/// Gate scale for grid-versus-closed-form agreement: 1e-5 at f64 precision,
/// proportionally looser for scalars whose accumulation noise dominates.
fn stats_gate<T: Real>() -> T {
    Float::max(r64(1e-5), eps::<T>() * r64(3e3))
}

fn number_stats_gates<T: Real>(
    n_grid: &Grid1<T>,
    density: &[T],
    closed_mean: T,
    closed_second: T,
) -> Result<(T, T)> {
    let (mass, grid_mean, grid_second) = n_grid.density_moments(density);
    let deficit = T::one() - mass;
    if Float::abs(deficit) > stats_gate::<T>() {
        return Err(CoreError::CoverageDeficit {
            mass: to_f64(mass),
            deficit: to_f64(deficit),
            tol: to_f64(stats_gate::<T>()),
        });
    }
    let gate = stats_gate::<T>() * Float::max(T::one(), closed_second);
    if Float::abs(grid_mean - closed_mean) > gate || Float::abs(grid_second - closed_second) > gate
    {
        return Err(CoreError::InvalidState(format!(
            "grid and closed-form moments disagree: mean {} vs {}, second {} vs {}",
            to_f64(grid_mean),
            to_f64(closed_mean),
            to_f64(grid_second),
            to_f64(closed_second)
        )));
    }
    Ok((grid_mean, grid_second))
}

/// Photocount density by the phase average of Q over circles of constant
/// `n = |alpha|^2`, `p(n) = (1/2) int d phi Q(sqrt(n) e^{i phi})`, using
/// `PHASE_NODES` trapezoid nodes.
pub fn semiquantum_number_via_q<T: Real>(
    rho: &DensityMatrix<T>,
    n_grid: &Grid1<T>,
) -> Result<SemiquantumNumberStats<T>> {
    semiquantum_number_via_q_with_nodes(rho, n_grid, PHASE_NODES)
}

/// Same as [`semiquantum_number_via_q`] with an explicit phase-node count
/// (exposed so tests can assert node-count insensitivity).
pub fn semiquantum_number_via_q_with_nodes<T: Real>(
    rho: &DensityMatrix<T>,
    n_grid: &Grid1<T>,
    nodes: usize,
) -> Result<SemiquantumNumberStats<T>> {
    if n_grid.min() < T::zero() {
        return Err(CoreError::InvalidState(
            "photocount grid must start at n >= 0".into(),
        ));
    }
    let d = rho.dim();
    let sums = phase_sums::<T>(nodes, d - 1);
    let lf = ln_factorials(d - 1);
    // Fold rho and the phase sums into real pair coefficients; the density at
    // each n is then a bounded log-space sum over (m, m') pairs.
    let mut pair_coeff = vec![T::zero(); d * d];
    for m in 0..d {
        for mp in m..d {
            let k = mp - m;
            let z = rho.entry(m, mp) * sums[k];
            pair_coeff[m * d + mp] = if mp == m { z.re } else { z.re * r64(2.0) };
        }
    }
    let mut density = Vec::with_capacity(n_grid.len());
    for i in 0..n_grid.len() {
        let n = n_grid.point(i);
        let mut acc = T::zero();
        if n == T::zero() {
            acc = pair_coeff[0];
        } else {
            let ln_n = Float::ln(n);
            for m in 0..d {
                for mp in m..d {
                    let coeff = pair_coeff[m * d + mp];
                    if coeff == T::zero() {
                        continue;
                    }
                    let log_term = r64::<T>((m + mp) as f64 / 2.0) * ln_n
                        - n
                        - r64::<T>((lf[m] + lf[mp]) / 2.0);
                    acc += coeff * Float::exp(log_term);
                }
            }
        }
        density.push(Float::max(acc, T::zero()));
    }
    let p_m = photon_number_distribution(rho);
    let (closed_mean, closed_second) = closed_form_number_moments(&p_m);
    let (grid_mean, grid_second) = number_stats_gates(n_grid, &density, closed_mean, closed_second)?;
    Ok(SemiquantumNumberStats {
        n_grid: n_grid.clone(),
        density,
        mean: closed_mean,
        second_moment: closed_second,
        grid_mean,
        grid_second_moment: grid_second,
    })
}

fn closed_form_number_moments<T: Real>(p_m: &[T]) -> (T, T) {
    let mut mean = T::zero();
    let mut second = T::zero();
    for (m, &p) in p_m.iter().enumerate() {
        let mf = r64::<T>(m as f64);
        mean += (mf + T::one()) * p;
        second += (mf * mf + r64::<T>(3.0) * mf + r64(2.0)) * p;
    }
    (mean, second)
}

/// Photocount density as the Poisson-kernel mixture over the exact photon
/// distribution, `p(n) = sum_m p_m n^m e^{-n} / m!`, evaluated in log space.
pub fn semiquantum_number_via_kernel<T: Real>(
    p_m: &[T],
    n_grid: &Grid1<T>,
) -> Result<SemiquantumNumberStats<T>> {
    let total: T = p_m.iter().copied().sum();
    if Float::abs(total - T::one()) > r64(1e-10) {
        return Err(CoreError::InvalidState(format!(
            "photon distribution sums to {}, expected 1",
            to_f64(total)
        )));
    }
    if n_grid.min() < T::zero() {
        return Err(CoreError::InvalidState(
            "photocount grid must start at n >= 0".into(),
        ));
    }
    let d = p_m.len();
    let lf = ln_factorials(d.saturating_sub(1));
    let mut density = Vec::with_capacity(n_grid.len());
    for i in 0..n_grid.len() {
        let n = n_grid.point(i);
        let mut acc = T::zero();
        if n == T::zero() {
            acc = p_m[0];
        } else {
            let ln_n = Float::ln(n);
            for (m, &p) in p_m.iter().enumerate() {
                if p == T::zero() {
                    continue;
                }
                let log_term = r64::<T>(m as f64) * ln_n - n - r64::<T>(lf[m]);
                acc += p * Float::exp(log_term);
            }
        }
        density.push(acc);
    }
    let (closed_mean, closed_second) = closed_form_number_moments(p_m);
    let (grid_mean, grid_second) = number_stats_gates(n_grid, &density, closed_mean, closed_second)?;
    Ok(SemiquantumNumberStats {
        n_grid: n_grid.clone(),
        density,
        mean: closed_mean,
        second_moment: closed_second,
        grid_mean,
        grid_second_moment: grid_second,
    })
}

/// Exact `<n1 n2>` of a two-mode state.
pub fn quantum_joint_number_correlation<T: Real>(state: &TwoModeState<T>) -> T {
    state.mean_number_product()
}

/// Joint photocount density of two classical number detectors, by the double
/// phase average of the two-mode Q, with `<n1 n2>` by 2-D trapezoid.
pub fn semiquantum_joint_number<T: Real>(
    state: &TwoModeState<T>,
    n1_grid: &Grid1<T>,
    n2_grid: &Grid1<T>,
) -> Result<SemiquantumJointNumber<T>> {
    let d = state.dim_per_mode();
    if d > 32 {
        return Err(CoreError::InvalidState(
            "joint photocount supports per-mode dimensions up to 32".into(),
        ));
    }
    for g in [n1_grid, n2_grid] {
        if g.min() < T::zero() {
            return Err(CoreError::InvalidState(
                "photocount grids must start at n >= 0".into(),
            ));
        }
    }
    let sums = phase_sums::<T>(PHASE_NODES, d - 1);
    let lf = ln_factorials(d - 1);
    let rho = state.density();
    // Radial pair polynomial: the double phase average leaves, per mode, a
    // polynomial in sqrt(n) whose coefficients fold rho with the phase sums
    // and the factorial normalizers.
    let s_len = 2 * d - 1;
    let mut g_poly = vec![Complex::<T>::zero(); s_len * s_len];
    for m1 in 0..d {
        for m1p in 0..d {
            let s1k = if m1p >= m1 {
                sums[m1p - m1]
            } else {
                sums[m1 - m1p].conj()
            };
            for m2 in 0..d {
                for m2p in 0..d {
                    let s2k = if m2p >= m2 {
                        sums[m2p - m2]
                    } else {
                        sums[m2 - m2p].conj()
                    };
                    let norm = Float::exp(r64::<T>(
                        -((lf[m1] + lf[m1p] + lf[m2] + lf[m2p]) / 2.0),
                    ));
                    let entry = rho[(m1 * d + m2, m1p * d + m2p)];
                    g_poly[(m1 + m1p) * s_len + (m2 + m2p)] += entry * s1k * s2k.scale(norm);
                }
            }
        }
    }
    let g_real: Vec<T> = g_poly
        .iter()
        .map(|z| {
            debug_assert!(Float::abs(z.im) < r64(1e-9));
            z.re
        })
        .collect();

    // powers of sqrt(n) per axis, cumulative so n = 0 is exact
    let powers = |grid: &Grid1<T>| -> Vec<Vec<T>> {
        (0..grid.len())
            .map(|i| {
                let u = Float::sqrt(grid.point(i));
                let mut pw = Vec::with_capacity(s_len);
                let mut acc = T::one();
                for _ in 0..s_len {
                    pw.push(acc);
                    acc *= u;
                }
                pw
            })
            .collect()
    };
    let pow1 = powers(n1_grid);
    let pow2 = powers(n2_grid);

    let mut values = crate::RMatrix::<T>::zeros(n1_grid.len(), n2_grid.len());
    for j in 0..n2_grid.len() {
        let e2 = Float::exp(-n2_grid.point(j));
        // contract the second axis once per column
        let mut col = vec![T::zero(); s_len];
        for s1 in 0..s_len {
            let mut acc = T::zero();
            for s2 in 0..s_len {
                acc += g_real[s1 * s_len + s2] * pow2[j][s2];
            }
            col[s1] = acc;
        }
        for i in 0..n1_grid.len() {
            let e1 = Float::exp(-n1_grid.point(i));
            let mut acc = T::zero();
            for s1 in 0..s_len {
                acc += col[s1] * pow1[i][s1];
            }
            values[(i, j)] = Float::max(acc * e1 * e2, T::zero());
        }
    }

    let distribution = SignedJointDistribution::new(n1_grid.clone(), n2_grid.clone(), values)?;
    let deficit = T::one() - distribution.mass();
    if Float::abs(deficit) > r64(1e-4) {
        return Err(CoreError::CoverageDeficit {
            mass: to_f64(distribution.mass()),
            deficit: to_f64(deficit),
            tol: 1e-4,
        });
    }
    let correlation = distribution.expectation(|n1, n2| n1 * n2);

    let joint_pm = state.joint_number_distribution();
    let mut closed = T::zero();
    for m1 in 0..d {
        for m2 in 0..d {
            closed += joint_pm[(m1, m2)]
                    * (r64::<T>(m1 as f64) + T::one())
                    * (r64::<T>(m2 as f64) + T::one());
        }
    }
    Ok(SemiquantumJointNumber {
        distribution,
        correlation,
        correlation_closed_form: closed,
    })
}

/// Default symmetric quadrature grid `[-6, 6]` with step 0.02.
pub fn default_quadrature_grid<T: Real>() -> Grid1<T> {
    Grid1::symmetric(r64(6.0), r64(0.02)).expect("static grid parameters are valid")
}

/// Quadrature statistics of the classical quadrature detector, by both the
/// imaginary-axis marginal of Q and Gaussian smoothing of the exact
/// distribution. The returned density is the Q-marginal route.
pub fn semiquantum_quadrature<T: Real>(
    rho: &DensityMatrix<T>,
    theta: T,
    x_grid: &Grid1<T>,
) -> Result<SemiquantumQuadratureStats<T>> {
    let (mean_n, _) = photon_number_moments(rho);
    let required = Float::sqrt(mean_n + T::one()) + r64::<T>(3.0);
    let half_width = Float::min(-x_grid.min(), x_grid.max());
    if half_width < required {
        return Err(CoreError::GridTooNarrow {
            half_width: to_f64(half_width),
            required: to_f64(required),
        });
    }

    // Route 1: p(x) = int dy Q((x + i y) e^{i theta}), trapezoid in y.
    let rot = DensityMatrix::from_matrix(rho.rotated_by_number_phase(theta))?;
    let spectral = rot.spectral(eps::<T>() * r64(10.0));
    let d = rho.dim();
    let y_grid = Grid1::<T>::symmetric(Float::sqrt(mean_n + T::one()) + r64(5.0), r64(0.02))?;
    let inv_pi = T::one() / T::pi();
    let mut density = Vec::with_capacity(x_grid.len());
    for i in 0..x_grid.len() {
        let x = x_grid.point(i);
        let mut marginal = T::zero();
        for j in 0..y_grid.len() {
            let alpha = Complex::new(x, y_grid.point(j));
            let c = crate::fock::coherent_amplitudes(d, alpha);
            let mut q = T::zero();
            for (ev, vec) in &spectral {
                let mut overlap = Complex::<T>::zero();
                for m in 0..d {
                    overlap += c[m].conj() * vec[m];
                }
                q += *ev * overlap.norm_sqr();
            }
            marginal += q * inv_pi * y_grid.weight(j);
        }
        density.push(marginal);
    }

    // Route 2: Gaussian smoothing of the exact quadrature distribution,
    // p(x) = sqrt(2/pi) int dx' e^{-2 (x - x')^2} p_exact(x').
    let exact = quadrature_distribution(rho, theta, x_grid)?;
    let kernel_norm = Float::sqrt(r64::<T>(2.0) / T::pi());
    let mut smoothed = Vec::with_capacity(x_grid.len());
    let window = {
        // 5 sigma of the sigma^2 = 1/4 kernel
        let w = to_f64(r64::<T>(2.5) / x_grid.step());
        w.ceil() as usize
    };
    for i in 0..x_grid.len() {
        let x = x_grid.point(i);
        let lo = i.saturating_sub(window);
        let hi = (i + window + 1).min(x_grid.len());
        let mut acc = T::zero();
        for (j, value) in exact.iter().enumerate().take(hi).skip(lo) {
            let dx = x - x_grid.point(j);
            acc += kernel_norm * Float::exp(r64::<T>(-2.0) * dx * dx) * *value * x_grid.weight(j);
        }
        smoothed.push(acc);
    }

    let mut max_dev = T::zero();
    for (a, b) in density.iter().zip(smoothed.iter()) {
        max_dev = Float::max(max_dev, Float::abs(*a - *b));
    }

    let (mass, mean, second) = x_grid.density_moments(&density);
    let deficit = T::one() - mass;
    if Float::abs(deficit) > stats_gate::<T>() {
        return Err(CoreError::CoverageDeficit {
            mass: to_f64(mass),
            deficit: to_f64(deficit),
            tol: to_f64(stats_gate::<T>()),
        });
    }
    Ok(SemiquantumQuadratureStats {
        x_grid: x_grid.clone(),
        density,
        density_smoothed_route: smoothed,
        max_route_discrepancy: max_dev,
        mean,
        second_moment: second,
    })
}

/// What a classicality verdict is about.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VerdictQuantity<T> {
    /// Photocount variance against the Poissonian floor (sub-Poissonian
    /// statistics are nonclassical).
    PhotonNumber,
    /// Quadrature variance at `theta` against the vacuum floor 1/4.
    Quadrature { theta: T },
    /// Two-mode intensity correlation against the classical-detector floor.
    CrossCorrelation,
}

/// Quantum and semiquantum values of one nonclassicality witness. For every
/// valid state the semiquantum side respects the bound; the quantum side may
/// violate it.
#[derive(Debug, Clone, Copy)]
pub struct ClassicalityVerdict<T> {
    pub quantity: VerdictQuantity<T>,
    pub quantum_value: T,
    pub semiquantum_value: T,
    /// The classical floor: values strictly below it witness nonclassicality.
    pub bound: T,
    pub quantum_violates_bound: bool,
    pub semiquantum_violates_bound: bool,
}

fn violates<T: Real>(value: T, bound: T) -> bool {
    value < bound - r64(1e-9)
}

/// Sub-Poissonian and squeezing verdicts for a single-mode state, with the
/// semiquantum side from the closed-form moment identities.
pub fn classicality_verdicts<T: Real>(
    rho: &DensityMatrix<T>,
    thetas: &[T],
) -> Vec<ClassicalityVerdict<T>> {
    let mut out = Vec::with_capacity(1 + thetas.len());

    let (mean_n, second_n) = photon_number_moments(rho);
    let var_n = second_n - mean_n * mean_n;
    let (semi_mean, semi_var) = semiquantum_moments_from_quantum(mean_n, second_n);
    out.push(ClassicalityVerdict {
        quantity: VerdictQuantity::PhotonNumber,
        quantum_value: var_n,
        semiquantum_value: semi_var,
        bound: mean_n,
        quantum_violates_bound: violates(var_n, mean_n),
        semiquantum_violates_bound: violates(semi_var, semi_mean),
    });

    let quarter = r64::<T>(0.25);
    for &theta in thetas {
        let (mean_x, second_x) = quadrature_moments(rho, theta);
        let var_x = second_x - mean_x * mean_x;
        let semi_var = var_x + quarter;
        out.push(ClassicalityVerdict {
            quantity: VerdictQuantity::Quadrature { theta },
            quantum_value: var_x,
            semiquantum_value: semi_var,
            bound: quarter,
            quantum_violates_bound: violates(var_x, quarter),
            semiquantum_violates_bound: violates(semi_var, quarter),
        });
    }
    out
}

/// Cross-correlation verdict for a two-mode state: classical detectors floor
/// `<n1 n2>` at one, while the quantum correlation can reach zero.
pub fn cross_correlation_verdict<T: Real>(state: &TwoModeState<T>) -> ClassicalityVerdict<T> {
    let quantum = quantum_joint_number_correlation(state);
    let joint = state.joint_number_distribution();
    let d = state.dim_per_mode();
    let mut semi = T::zero();
    for m1 in 0..d {
        for m2 in 0..d {
            semi += joint[(m1, m2)]
                    * (r64::<T>(m1 as f64) + T::one())
                    * (r64::<T>(m2 as f64) + T::one());
        }
    }
    ClassicalityVerdict {
        quantity: VerdictQuantity::CrossCorrelation,
        quantum_value: quantum,
        semiquantum_value: semi,
        bound: T::one(),
        quantum_violates_bound: violates(quantum, T::one()),
        semiquantum_violates_bound: violates(semi, T::one()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{
        make_coherent_state, make_number_state, make_squeezed_vacuum, make_thermal_state,
        FockParams,
    };
    use crate::two_mode::{apply_beam_splitter, BeamSplitterParams};
    use approx::assert_relative_eq;

    fn params(dim: usize) -> FockParams<f64> {
        FockParams::with_dim(dim).unwrap()
    }

    #[test]
    fn vacuum_photocount_is_unit_exponential() {
        let rho = make_number_state(0, params(8)).unwrap();
        let grid = default_number_grid(&rho).unwrap();
        let stats = semiquantum_number_via_q(&rho, &grid).unwrap();
        for i in (0..grid.len()).step_by(500) {
            let n = grid.point(i);
            assert_relative_eq!(stats.density[i], (-n).exp(), epsilon = 1e-8);
        }
        assert_relative_eq!(stats.mean, 1.0, epsilon = 1e-12);
        assert_relative_eq!(stats.variance(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn single_photon_photocount_density() {
        let rho = make_number_state(1, params(8)).unwrap();
        let grid = default_number_grid(&rho).unwrap();
        let stats = semiquantum_number_via_q(&rho, &grid).unwrap();
        for i in (0..grid.len()).step_by(700) {
            let n = grid.point(i);
            assert_relative_eq!(stats.density[i], n * (-n).exp(), epsilon = 1e-8);
        }
    }

    #[test]
    fn routes_agree_pointwise() {
        let mixture = crate::fock::DensityMatrix::mixture(&[
            (0.35, make_number_state(2, params(64)).unwrap()),
            (0.4, make_coherent_state(Complex::new(-0.9, 1.1), params(64)).unwrap()),
            (0.25, make_thermal_state(0.7, params(64)).unwrap()),
        ])
        .unwrap();
        let states = [
            make_number_state(3, params(20)).unwrap(),
            make_number_state(5, params(20)).unwrap(),
            make_coherent_state(Complex::new(1.0, 0.5), params(30)).unwrap(),
            make_coherent_state(Complex::new(2.0, 0.0), params(32)).unwrap(),
            make_thermal_state(1.0, params(60)).unwrap(),
            make_thermal_state(2.0, params(80)).unwrap(),
            make_squeezed_vacuum(0.5, params(40)).unwrap(),
            make_squeezed_vacuum(0.8, params(60)).unwrap(),
            mixture,
        ];
        for rho in &states {
            let grid = default_number_grid(rho).unwrap();
            let via_q = semiquantum_number_via_q(rho, &grid).unwrap();
            let p_m = photon_number_distribution(rho);
            let via_k = semiquantum_number_via_kernel(&p_m, &grid).unwrap();
            let mut max_dev = 0.0f64;
            for (a, b) in via_q.density.iter().zip(via_k.density.iter()) {
                max_dev = max_dev.max((a - b).abs());
            }
            assert!(max_dev < 1e-6, "route mismatch {max_dev}");
        }
    }

    #[test]
    fn doubling_phase_nodes_changes_nothing() {
        let rho = make_coherent_state(Complex::new(1.2, -0.3), params(30)).unwrap();
        let grid = default_number_grid(&rho).unwrap();
        let a = semiquantum_number_via_q_with_nodes(&rho, &grid, PHASE_NODES).unwrap();
        let b = semiquantum_number_via_q_with_nodes(&rho, &grid, 2 * PHASE_NODES).unwrap();
        let mut max_dev = 0.0f64;
        for (x, y) in a.density.iter().zip(b.density.iter()) {
            max_dev = max_dev.max((x - y).abs());
        }
        assert!(max_dev < 1e-10, "node sensitivity {max_dev}");
    }

    #[test]
    fn kernel_moments_match_shift_theorem() {
        // |m = 2>: mean 3, variance 3.
        let rho = make_number_state(2, params(10)).unwrap();
        let grid = default_number_grid(&rho).unwrap();
        let p_m = photon_number_distribution(&rho);
        let stats = semiquantum_number_via_kernel(&p_m, &grid).unwrap();
        assert_relative_eq!(stats.mean, 3.0, epsilon = 1e-12);
        assert_relative_eq!(stats.variance(), 3.0, epsilon = 1e-12);
        assert_relative_eq!(stats.grid_mean, 3.0, epsilon = 1e-5);

        // coherent beta = 1: mean 2, variance 3.
        let coh = make_coherent_state(Complex::new(1.0, 0.0), params(30)).unwrap();
        let grid_c = default_number_grid(&coh).unwrap();
        let stats_c =
            semiquantum_number_via_kernel(&photon_number_distribution(&coh), &grid_c).unwrap();
        assert_relative_eq!(stats_c.mean, 2.0, epsilon = 1e-6);
        assert_relative_eq!(stats_c.variance(), 3.0, epsilon = 1e-6);

        // vacuum: mean 1, variance 1 (Poissonian boundary).
        let vac = make_number_state(0, params(8)).unwrap();
        let grid_v = default_number_grid(&vac).unwrap();
        let stats_v =
            semiquantum_number_via_kernel(&photon_number_distribution(&vac), &grid_v).unwrap();
        assert_relative_eq!(stats_v.mean, 1.0, epsilon = 1e-14);
        assert_relative_eq!(stats_v.variance(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn kernel_rejects_unnormalized_input() {
        let grid = Grid1::from_zero(10.0, 0.01).unwrap();
        assert!(semiquantum_number_via_kernel(&[0.5, 0.4], &grid).is_err());
    }

    #[test]
    fn kernel_route_works_in_f32() {
        let p = crate::fock::FockParams::<f32>::new(10, 1e-6).unwrap();
        let rho = crate::fock::make_number_state(0, p).unwrap();
        let grid = Grid1::<f32>::from_zero(30.0, 0.01).unwrap();
        let stats =
            semiquantum_number_via_kernel(&photon_number_distribution(&rho), &grid).unwrap();
        assert!((stats.mean - 1.0).abs() < 1e-3);
        assert!((stats.variance() - 1.0).abs() < 1e-3);
    }

    #[test]
    fn joint_number_anticorrelation_washout() {
        let single = TwoModeState::<f64>::from_fock_pair(1, 0, 6).unwrap();
        for t in [0.3, 0.5, 0.7] {
            let bs = BeamSplitterParams::from_transmission(t).unwrap();
            let out = apply_beam_splitter(&single, &bs).unwrap();
            assert!(quantum_joint_number_correlation(&out) < 1e-12);
            let grid = Grid1::from_zero(25.0, 0.02).unwrap();
            let joint = semiquantum_joint_number(&out, &grid, &grid).unwrap();
            assert_relative_eq!(joint.correlation, 2.0, epsilon = 1e-3);
            assert_relative_eq!(joint.correlation_closed_form, 2.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn joint_number_hom_washout() {
        let hom_in = TwoModeState::<f64>::from_fock_pair(1, 1, 6).unwrap();
        let out = apply_beam_splitter(&hom_in, &BeamSplitterParams::balanced()).unwrap();
        assert!(quantum_joint_number_correlation(&out) < 1e-12);
        let grid = Grid1::from_zero(25.0, 0.02).unwrap();
        let joint = semiquantum_joint_number(&out, &grid, &grid).unwrap();
        assert_relative_eq!(joint.correlation, 3.0, epsilon = 1e-3);
        // density matches (1/4)(n1^2 + n2^2) e^{-n1 - n2}
        for (i, j) in [(10, 400), (250, 250), (700, 120), (0, 0)] {
            let n1 = grid.point(i);
            let n2 = grid.point(j);
            let expected = 0.25 * (n1 * n1 + n2 * n2) * (-n1 - n2).exp();
            assert_relative_eq!(joint.distribution.at(i, j), expected, epsilon = 1e-6);
        }
    }

    #[test]
    fn joint_number_vacuum_product() {
        let vac = TwoModeState::<f64>::from_fock_pair(0, 0, 4).unwrap();
        let grid = Grid1::from_zero(25.0, 0.02).unwrap();
        let joint = semiquantum_joint_number(&vac, &grid, &grid).unwrap();
        assert_relative_eq!(joint.correlation, 1.0, epsilon = 1e-3);
    }

    #[test]
    fn joint_correlation_invariant_under_phase_and_swap() {
        let single = TwoModeState::<f64>::from_fock_pair(1, 0, 6).unwrap();
        let grid = Grid1::from_zero(25.0, 0.05).unwrap();
        let base = {
            let bs = BeamSplitterParams::new(0.3, 0.7, 0.0).unwrap();
            let out = apply_beam_splitter(&single, &bs).unwrap();
            semiquantum_joint_number(&out, &grid, &grid).unwrap().correlation
        };
        for (t, phase) in [(0.3, 1.1), (0.7, 0.0), (0.7, 2.2)] {
            let bs = BeamSplitterParams::new(t, 1.0 - t, phase).unwrap();
            let out = apply_beam_splitter(&single, &bs).unwrap();
            let c = semiquantum_joint_number(&out, &grid, &grid).unwrap().correlation;
            assert_relative_eq!(c, base, epsilon = 1e-6);
        }
    }

    #[test]
    fn quantum_correlation_of_product_state() {
        let both = TwoModeState::<f64>::from_fock_pair(1, 1, 4).unwrap();
        assert_relative_eq!(quantum_joint_number_correlation(&both), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn quadrature_vacuum_variance_is_half() {
        let rho = make_number_state(0, params(10)).unwrap();
        let grid = default_quadrature_grid::<f64>();
        let stats = semiquantum_quadrature(&rho, 0.0, &grid).unwrap();
        assert_relative_eq!(stats.mean, 0.0, epsilon = 1e-10);
        assert_relative_eq!(stats.variance(), 0.5, epsilon = 1e-5);
        assert!(stats.max_route_discrepancy < 1e-6);
    }

    #[test]
    fn quadrature_squeezing_washout() {
        let rho = make_squeezed_vacuum(0.5, params(40)).unwrap();
        let grid = default_quadrature_grid::<f64>();
        let stats = semiquantum_quadrature(&rho, 0.0, &grid).unwrap();
        let expected = (-1.0f64).exp() / 4.0 + 0.25;
        assert_relative_eq!(stats.variance(), expected, epsilon = 1e-5);
        assert!(stats.variance() >= 0.25);
    }

    #[test]
    fn strong_squeezing_approaches_the_floor_from_above() {
        let grid = Grid1::symmetric(7.0, 0.02).unwrap();
        let mut prev = f64::INFINITY;
        for r in [0.3, 0.6, 0.9] {
            let rho = make_squeezed_vacuum(r, params(70)).unwrap();
            let stats = semiquantum_quadrature(&rho, 0.0, &grid).unwrap();
            assert!(stats.variance() >= 0.25 - 1e-9);
            assert!(stats.variance() < prev, "variance must fall toward the floor");
            prev = stats.variance();
            assert_relative_eq!(
                stats.variance(),
                (-2.0 * r).exp() / 4.0 + 0.25,
                epsilon = 1e-5
            );
        }
    }

    #[test]
    fn quadrature_smoothing_fills_the_node() {
        let rho = make_number_state(1, params(10)).unwrap();
        let grid = default_quadrature_grid::<f64>();
        let stats = semiquantum_quadrature(&rho, 0.0, &grid).unwrap();
        let mid = grid.len() / 2;
        assert!(stats.density[mid] > 0.1, "smoothed density must fill the node");
    }

    #[test]
    fn verdicts_single_photon() {
        let rho = make_number_state(1, params(10)).unwrap();
        let verdicts = classicality_verdicts(&rho, &[0.0]);
        let number = &verdicts[0];
        assert!(number.quantum_violates_bound, "Fock state is sub-Poissonian");
        assert!(!number.semiquantum_violates_bound);
        assert_relative_eq!(number.semiquantum_value, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn verdicts_squeezed_and_coherent() {
        let sq = make_squeezed_vacuum(0.5, params(40)).unwrap();
        let v = classicality_verdicts(&sq, &[0.0]);
        let quad = &v[1];
        assert!(quad.quantum_violates_bound);
        assert!(!quad.semiquantum_violates_bound);
        assert_relative_eq!(quad.quantum_value, (-1.0f64).exp() / 4.0, epsilon = 1e-6);

        let coh = make_coherent_state(Complex::new(1.0, 0.0), params(30)).unwrap();
        for verdict in classicality_verdicts(&coh, &[0.0, 0.7]) {
            assert!(!verdict.quantum_violates_bound);
            assert!(!verdict.semiquantum_violates_bound);
        }
    }

    #[test]
    fn cross_correlation_floor() {
        let single = TwoModeState::<f64>::from_fock_pair(1, 0, 6).unwrap();
        let out = apply_beam_splitter(&single, &BeamSplitterParams::balanced()).unwrap();
        let v = cross_correlation_verdict(&out);
        assert!(v.quantum_violates_bound);
        assert!(!v.semiquantum_violates_bound);
        assert_relative_eq!(v.semiquantum_value, 2.0, epsilon = 1e-12);
    }
}
