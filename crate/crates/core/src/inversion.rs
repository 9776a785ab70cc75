//! Joint-measurement inversion machinery: state-independent kernels mapping
//! observed to inferred distributions, classical joint models built from
//! phase-space ensembles and classical detectors, the executable classical
//! separability closure, and the heterodyne-to-Wigner deconvolution as the
//! concrete quantum instance where the inferred distribution goes negative.

use num_complex::Complex;
use num_traits::{Float, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::FftPlanner;

use crate::detectors::{DetectorModel, PHASE_NODES};
use crate::grid::Grid1;
use crate::quasiprob::{q_from_classical_ensemble, ClassicalEnsemble, EnsembleComponent, PhaseSpaceField};
use crate::{r64, to_f64, CoreError, Real, RMatrix, Result};

/// Amplification bound of the spectral deconvolution: frequencies whose
/// divisor would amplify beyond this are cut (sharp circular cutoff).
pub const CUTOFF_AMPLIFICATION: f64 = 1e6;

/// Spectral floor of the invertible smoothing kernels used by the
/// separability suite; bounds the inverse's conditioning by `1 / floor`.
/// A tensor-product inversion amplifies flat roundoff by the product of both
/// axes' bounds, so the floor keeps `(1/floor)^2 * f64 epsilon` well below
/// the suite's 1e-8 negativity gate.
const SMOOTHING_SPECTRAL_FLOOR: f64 = 1e-3;

/// Sampled joint distribution that may carry negative values, with
/// normalization and negativity diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct SignedJointDistribution<T: Real> {
    x: Grid1<T>,
    y: Grid1<T>,
    values: RMatrix<T>,
}

impl<T: Real> SignedJointDistribution<T> {
    pub fn new(x: Grid1<T>, y: Grid1<T>, values: RMatrix<T>) -> Result<Self> {
        if values.nrows() != x.len() || values.ncols() != y.len() {
            return Err(CoreError::GridMismatch(format!(
                "{}x{} values on {}x{} grids",
                values.nrows(),
                values.ncols(),
                x.len(),
                y.len()
            )));
        }
        Ok(Self { x, y, values })
    }

    /// Reinterprets a phase-space field as a joint distribution over
    /// `(Re alpha, Im alpha)`.
    pub fn from_phase_space(field: &PhaseSpaceField<T>) -> Self {
        Self {
            x: field.x_grid().clone(),
            y: field.y_grid().clone(),
            values: field.values().clone(),
        }
    }

    pub fn x_grid(&self) -> &Grid1<T> {
        &self.x
    }

    pub fn y_grid(&self) -> &Grid1<T> {
        &self.y
    }

    pub fn values(&self) -> &RMatrix<T> {
        &self.values
    }

    pub fn at(&self, i: usize, j: usize) -> T {
        self.values[(i, j)]
    }

    pub fn mass(&self) -> T {
        let mut acc = T::zero();
        for i in 0..self.x.len() {
            for j in 0..self.y.len() {
                acc += self.values[(i, j)] * self.x.weight(i) * self.y.weight(j);
            }
        }
        acc
    }

    pub fn norm_defect(&self) -> T {
        T::one() - self.mass()
    }

    pub fn min_value(&self) -> T {
        self.values
            .iter()
            .fold(T::infinity(), |a, &b| Float::min(a, b))
    }

    /// Integral of the negative part, `int max(-p, 0)`.
    pub fn negativity_mass(&self) -> T {
        let mut acc = T::zero();
        for i in 0..self.x.len() {
            for j in 0..self.y.len() {
                let v = self.values[(i, j)];
                if v < T::zero() {
                    acc -= v * self.x.weight(i) * self.y.weight(j);
                }
            }
        }
        acc
    }

    /// Trapezoid expectation of `f(x, y)`.
    pub fn expectation(&self, f: impl Fn(T, T) -> T) -> T {
        let mut acc = T::zero();
        for i in 0..self.x.len() {
            for j in 0..self.y.len() {
                acc += f(self.x.point(i), self.y.point(j))
                        * self.values[(i, j)]
                        * self.x.weight(i)
                        * self.y.weight(j);
            }
        }
        acc
    }

    /// Marginal over `y` (a density on the x grid).
    pub fn marginal_x(&self) -> Vec<T> {
        (0..self.x.len())
            .map(|i| {
                let mut acc = T::zero();
                for j in 0..self.y.len() {
                    acc += self.values[(i, j)] * self.y.weight(j);
                }
                acc
            })
            .collect()
    }

    /// Marginal over `x` (a density on the y grid).
    pub fn marginal_y(&self) -> Vec<T> {
        (0..self.y.len())
            .map(|j| {
                let mut acc = T::zero();
                for i in 0..self.x.len() {
                    acc += self.values[(i, j)] * self.x.weight(i)
                }
                acc
            })
            .collect()
    }
}

/// State-independent inversion kernel acting on one outcome axis.
#[derive(Debug, Clone, PartialEq)]
pub enum MuKernel<T: Real> {
    /// Exact measurement; nothing to invert.
    Identity,
    /// Dense operator on sample vectors over a fixed grid.
    DiscreteOperator { grid: Grid1<T>, matrix: RMatrix<T> },
    /// Symbolic removal of a Gaussian smoothing of the given variance,
    /// applied spectrally with the cutoff at [`CUTOFF_AMPLIFICATION`].
    GaussianDeconvolution { variance: T },
}

impl<T: Real> MuKernel<T> {
    /// A smoothing kernel of the given variance on `grid`, paired with its
    /// exact inverse. Both are circulant operators built from the Gaussian
    /// spectrum clamped at a floor, so they are exact mutual inverses with
    /// conditioning bounded by the floor.
    pub fn smoothing_pair(grid: &Grid1<T>, variance: T) -> Result<(Self, Self)> {
        if variance <= T::zero() {
            return Err(CoreError::InvalidModel(
                "smoothing variance must be positive".into(),
            ));
        }
        let n = grid.len();
        let h = grid.step();
        let floor = r64::<T>(SMOOTHING_SPECTRAL_FLOOR);
        let two_pi = T::two_pi();
        let half = r64::<T>(0.5);
        let mut symbol = Vec::with_capacity(n);
        for j in 0..n {
            let f = if j <= n / 2 {
                r64::<T>(j as f64)
            } else {
                r64::<T>(j as f64) - r64::<T>(n as f64)
            };
            let k = two_pi * f / (r64::<T>(n as f64) * h);
            symbol.push(Float::max(Float::exp(-variance * k * k * half), floor));
        }
        // first circulant column by the inverse transform of the symbol
        let column = |sym: &[T]| -> Vec<T> {
            (0..n)
                .map(|m| {
                    let mut acc = T::zero();
                    for (j, s) in sym.iter().enumerate() {
                        let angle = two_pi * r64::<T>((j * m % n) as f64) / r64::<T>(n as f64);
                        acc += *s * Float::cos(angle);
                    }
                    acc / r64::<T>(n as f64)
                })
                .collect()
        };
        let inv_symbol: Vec<T> = symbol.iter().map(|s| T::one() / *s).collect();
        let blur_col = column(&symbol);
        let inv_col = column(&inv_symbol);
        let circulant = |col: &[T]| -> RMatrix<T> {
            RMatrix::from_fn(n, n, |i, k| col[(n + i - k) % n])
        };
        Ok((
            Self::DiscreteOperator {
                grid: grid.clone(),
                matrix: circulant(&blur_col),
            },
            Self::DiscreteOperator {
                grid: grid.clone(),
                matrix: circulant(&inv_col),
            },
        ))
    }

    fn require_grid(&self, grid: &Grid1<T>, axis: &str) -> Result<()> {
        if let Self::DiscreteOperator { grid: own, .. } = self {
            own.require_same(grid, axis)?;
        }
        Ok(())
    }

    /// Applies the kernel to a sampled density on its grid.
    pub fn apply_to_vector(&self, grid: &Grid1<T>, density: &[T]) -> Result<Vec<T>> {
        match self {
            Self::Identity => Ok(density.to_vec()),
            Self::DiscreteOperator { grid: own, matrix } => {
                own.require_same(grid, "kernel vs density grid")?;
                let n = grid.len();
                let mut out = vec![T::zero(); n];
                for i in 0..n {
                    let mut acc = T::zero();
                    for j in 0..n {
                        acc += matrix[(i, j)] * density[j];
                    }
                    out[i] = acc;
                }
                Ok(out)
            }
            Self::GaussianDeconvolution { .. } => Err(CoreError::InvalidModel(
                "symbolic deconvolution applies to joint distributions, not marginal vectors"
                    .into(),
            )),
        }
    }
}

fn fft_2d<T: Real>(data: &mut [Complex<T>], nx: usize, ny: usize, inverse: bool) {
    let mut planner = FftPlanner::<T>::new();
    let fft_y = if inverse {
        planner.plan_fft_inverse(ny)
    } else {
        planner.plan_fft_forward(ny)
    };
    for row in data.chunks_mut(ny) {
        fft_y.process(row);
    }
    let fft_x = if inverse {
        planner.plan_fft_inverse(nx)
    } else {
        planner.plan_fft_forward(nx)
    };
    let mut col = vec![Complex::<T>::zero(); nx];
    for j in 0..ny {
        for i in 0..nx {
            col[i] = data[i * ny + j];
        }
        fft_x.process(&mut col);
        for i in 0..nx {
            data[i * ny + j] = col[i];
        }
    }
}

fn fft_frequencies<T: Real>(n: usize, h: T) -> Vec<T> {
    (0..n)
        .map(|j| {
            let f = if j <= n / 2 {
                r64::<T>(j as f64)
            } else {
                r64::<T>(j as f64) - r64::<T>(n as f64)
            };
            T::two_pi() * f / (r64::<T>(n as f64) * h)
        })
        .collect()
}

/// Spectral removal of per-axis Gaussian smoothings from a joint
/// distribution, with the sharp cutoff where the combined amplification
/// exceeds [`CUTOFF_AMPLIFICATION`]. Fails when the observed spectrum still
/// carries weight at the cutoff.
fn spectral_deconvolve<T: Real>(
    dist: &SignedJointDistribution<T>,
    var_x: T,
    var_y: T,
) -> Result<SignedJointDistribution<T>> {
    let nx = dist.x_grid().len();
    let ny = dist.y_grid().len();
    let mut data: Vec<Complex<T>> = Vec::with_capacity(nx * ny);
    for i in 0..nx {
        for j in 0..ny {
            data.push(Complex::new(dist.at(i, j), T::zero()));
        }
    }
    fft_2d(&mut data, nx, ny, false);

    let kx = fft_frequencies(nx, dist.x_grid().step());
    let ky = fft_frequencies(ny, dist.y_grid().step());
    let ln_amp_max = r64::<T>(CUTOFF_AMPLIFICATION.ln());
    let half = r64::<T>(0.5);
    let zero_mag = data[0].norm();
    if zero_mag == T::zero() {
        return Err(CoreError::InvalidState(
            "observed distribution has zero total mass".into(),
        ));
    }
    // Residual spectrum near and beyond the cutoff, relative to the mean.
    let mut residual = T::zero();
    let shell = ln_amp_max - r64::<T>(2.0);
    for i in 0..nx {
        for j in 0..ny {
            let ln_amp = half * (var_x * kx[i] * kx[i] + var_y * ky[j] * ky[j]);
            if ln_amp > shell {
                residual = Float::max(residual, data[i * ny + j].norm() / zero_mag);
            }
        }
    }
    // On coarse grids the cutoff surface can lie beyond the representable
    // band; then the outermost representable shell plays its role.
    let mut max_ln_amp = T::zero();
    for &kxi in kx.iter() {
        for &kyj in ky.iter() {
            let ln_amp = half * (var_x * kxi * kxi + var_y * kyj * kyj);
            max_ln_amp = Float::max(max_ln_amp, ln_amp);
        }
    }
    if max_ln_amp < ln_amp_max {
        let edge_shell = max_ln_amp - r64::<T>(2.0);
        for i in 0..nx {
            for j in 0..ny {
                let ln_amp = half * (var_x * kx[i] * kx[i] + var_y * ky[j] * ky[j]);
                if ln_amp > edge_shell {
                    residual = Float::max(residual, data[i * ny + j].norm() / zero_mag);
                }
            }
        }
    }
    if residual > r64(1e-6) {
        return Err(CoreError::CutoffInsufficient {
            residual: to_f64(residual),
            radius: (2.0 * CUTOFF_AMPLIFICATION.ln()).sqrt()
                / to_f64(Float::sqrt(Float::max(var_x, var_y))),
            tol: 1e-6,
        });
    }

    for i in 0..nx {
        for j in 0..ny {
            let ln_amp = half * (var_x * kx[i] * kx[i] + var_y * ky[j] * ky[j]);
            let cell = &mut data[i * ny + j];
            if ln_amp > ln_amp_max {
                *cell = Complex::zero();
            } else {
                *cell = cell.scale(Float::exp(ln_amp));
            }
        }
    }
    fft_2d(&mut data, nx, ny, true);
    let scale = T::one() / r64::<T>((nx * ny) as f64);
    let values = RMatrix::from_fn(nx, ny, |i, j| data[i * ny + j].re * scale);
    SignedJointDistribution::new(dist.x_grid().clone(), dist.y_grid().clone(), values)
}

/// Applies a tensor-product pair of inversion kernels to an observed joint
/// distribution. Marginals of the output equal the independently inverted
/// marginals of the input.
pub fn apply_inversion<T: Real>(
    observed: &SignedJointDistribution<T>,
    mu_x: &MuKernel<T>,
    mu_y: &MuKernel<T>,
) -> Result<SignedJointDistribution<T>> {
    mu_x.require_grid(observed.x_grid(), "mu_x vs x grid")?;
    mu_y.require_grid(observed.y_grid(), "mu_y vs y grid")?;

    let mut values = observed.values().clone();
    if let MuKernel::DiscreteOperator { matrix, .. } = mu_x {
        values = matrix * values;
    }
    if let MuKernel::DiscreteOperator { matrix, .. } = mu_y {
        values *= matrix.transpose();
    }
    let mut out = SignedJointDistribution::new(
        observed.x_grid().clone(),
        observed.y_grid().clone(),
        values,
    )?;

    let var_x = match mu_x {
        MuKernel::GaussianDeconvolution { variance } => *variance,
        _ => T::zero(),
    };
    let var_y = match mu_y {
        MuKernel::GaussianDeconvolution { variance } => *variance,
        _ => T::zero(),
    };
    if var_x > T::zero() || var_y > T::zero() {
        out = spectral_deconvolve(&out, var_x, var_y)?;
    }
    Ok(out)
}

/// Verdict of [`bona_fide_check`].
#[derive(Debug, Clone, Copy)]
pub struct BonaFideVerdict<T> {
    pub min_value: T,
    pub negativity_mass: T,
    pub norm_defect: T,
    /// Set when values dip below `-tol`.
    pub negativity_flagged: bool,
    /// Set when the mass deviates from one by more than 1e-4.
    pub normalization_flagged: bool,
    pub is_bona_fide: bool,
}

/// Checks whether a joint distribution is a bona fide probability
/// distribution: no values below `-tol`, mass equal to one within 1e-4.
pub fn bona_fide_check<T: Real>(dist: &SignedJointDistribution<T>, tol: T) -> BonaFideVerdict<T> {
    let min_value = dist.min_value();
    let negativity_mass = dist.negativity_mass();
    let norm_defect = dist.norm_defect();
    let negativity_flagged = min_value < -tol;
    let normalization_flagged = Float::abs(norm_defect) > r64(1e-4);
    BonaFideVerdict {
        min_value,
        negativity_mass,
        norm_defect,
        negativity_flagged,
        normalization_flagged,
        is_bona_fide: !negativity_flagged && !normalization_flagged,
    }
}

/// A classical state (phase-space ensemble) jointly measured by two
/// classical detectors with factorized conditional responses.
#[derive(Debug, Clone)]
pub struct ClassicalJointModel<T: Real> {
    pub ensemble: ClassicalEnsemble<T>,
    pub detector_x: DetectorModel<T>,
    pub detector_y: DetectorModel<T>,
}

impl<T: Real> ClassicalJointModel<T> {
    pub fn new(
        ensemble: ClassicalEnsemble<T>,
        detector_x: DetectorModel<T>,
        detector_y: DetectorModel<T>,
    ) -> Result<Self> {
        for d in [&detector_x, &detector_y] {
            d.validate()?;
            if !d.is_classical() {
                return Err(CoreError::InvalidModel(
                    "joint model detectors must be classical kinds".into(),
                ));
            }
        }
        Ok(Self {
            ensemble,
            detector_x,
            detector_y,
        })
    }
}

fn gaussian_density<T: Real>(t: T, variance: T) -> T {
    Float::exp(-t * t / (r64::<T>(2.0) * variance))
        / Float::sqrt(T::two_pi() * variance)
}

/// Trapezoid weights with third-order Gregory end corrections, for smooth
/// integrands that do not vanish at the interval ends.
fn end_corrected_weights<T: Real>(grid: &Grid1<T>) -> Vec<T> {
    let n = grid.len();
    let h = grid.step();
    let mut w = vec![h; n];
    w[0] = h * r64(3.0 / 8.0);
    w[n - 1] = h * r64(3.0 / 8.0);
    if n >= 6 {
        w[1] = h * r64(7.0 / 6.0);
        w[n - 2] = h * r64(7.0 / 6.0);
        w[2] = h * r64(23.0 / 24.0);
        w[n - 3] = h * r64(23.0 / 24.0);
    }
    w
}

/// Radial density of an ensemble in `u = |alpha|^2`, by the uniform phase
/// average `(1/2) int d phi Q(sqrt(u) e^{i phi})`.
fn radial_density<T: Real>(ens: &ClassicalEnsemble<T>, u: T) -> T {
    let root = Float::sqrt(u);
    let step = T::two_pi() / r64::<T>(PHASE_NODES as f64);
    let mut acc = T::zero();
    for j in 0..PHASE_NODES {
        let phi = step * r64::<T>(j as f64);
        let alpha = Complex::from_polar(root, phi);
        acc += q_from_classical_ensemble(ens, alpha);
    }
    acc * step * r64::<T>(0.5)
}

fn ensemble_radial_extent<T: Real>(ens: &ClassicalEnsemble<T>) -> T {
    let mut extent = T::zero();
    for (_, comp) in ens.components() {
        let (mean, v) = match comp {
            EnsembleComponent::CoherentPoint(beta) => (*beta, T::zero()),
            EnsembleComponent::IsotropicGaussian { mean, variance } => (*mean, *variance),
        };
        let reach = mean.norm() + r64::<T>(5.0) * Float::sqrt(v + r64(0.5));
        extent = Float::max(extent, reach);
    }
    extent
}

/// Suggested outcome grids for a classical joint model (step 0.06, extents
/// sized from the ensemble and detector responses).
pub fn suggested_model_grids<T: Real>(model: &ClassicalJointModel<T>) -> Result<(Grid1<T>, Grid1<T>)> {
    let radius = ensemble_radial_extent(&model.ensemble);
    let step = r64::<T>(0.08);
    let grid_for = |det: &DetectorModel<T>| -> Result<Grid1<T>> {
        let pad = r64::<T>(5.0) * Float::sqrt(det.response_variance());
        match det {
            DetectorModel::ContinuousNumber { .. } => {
                let max_u = radius * radius + pad + r64(1.0);
                let min = -pad;
                let m = to_f64((max_u - min) / step).ceil() as usize;
                Grid1::new(min, min + step * r64::<T>(m as f64), m + 1)
            }
            DetectorModel::RotatedQuadrature { .. } => {
                Grid1::symmetric(radius + pad + r64(1.0), step)
            }
            _ => Err(CoreError::InvalidModel("classical kinds only".into())),
        }
    };
    Ok((grid_for(&model.detector_x)?, grid_for(&model.detector_y)?))
}

/// Observed joint statistics of a classical model on the given outcome
/// grids: `p(x, y) = int d^2 alpha p_X(x|alpha) p_Y(y|alpha) Q(alpha)`.
/// Nonnegative by construction, normalized within 1e-4.
pub fn classical_joint_statistics<T: Real>(
    model: &ClassicalJointModel<T>,
    x_grid: &Grid1<T>,
    y_grid: &Grid1<T>,
) -> Result<SignedJointDistribution<T>> {
    use DetectorModel::{ContinuousNumber, RotatedQuadrature};
    let values = match (&model.detector_x, &model.detector_y) {
        (
            RotatedQuadrature {
                theta: t1,
                response_variance: s1,
            },
            RotatedQuadrature {
                theta: t2,
                response_variance: s2,
            },
        ) => quad_quad_values(&model.ensemble, *t1, *s1, *t2, *s2, x_grid, y_grid)?,
        (
            ContinuousNumber {
                response_variance: s1,
            },
            RotatedQuadrature {
                theta,
                response_variance: s2,
            },
        ) => num_quad_values(&model.ensemble, *s1, *theta, *s2, x_grid, y_grid)?,
        (
            RotatedQuadrature {
                theta,
                response_variance: s1,
            },
            ContinuousNumber {
                response_variance: s2,
            },
        ) => num_quad_values(&model.ensemble, *s2, *theta, *s1, y_grid, x_grid)?.transpose(),
        (
            ContinuousNumber {
                response_variance: s1,
            },
            ContinuousNumber {
                response_variance: s2,
            },
        ) => num_num_values(&model.ensemble, *s1, *s2, x_grid, y_grid)?,
        _ => {
            return Err(CoreError::InvalidModel(
                "joint statistics are defined for classical detector kinds".into(),
            ))
        }
    };
    let dist = SignedJointDistribution::new(x_grid.clone(), y_grid.clone(), values)?;
    let defect = dist.norm_defect();
    if Float::abs(defect) > r64(1e-4) {
        return Err(CoreError::CoverageDeficit {
            mass: to_f64(dist.mass()),
            deficit: to_f64(defect),
            tol: 1e-4,
        });
    }
    Ok(dist)
}

/// Closed-form bivariate Gaussian mixture for two quadrature detectors.
fn quad_quad_values<T: Real>(
    ens: &ClassicalEnsemble<T>,
    theta1: T,
    s1: T,
    theta2: T,
    s2: T,
    x_grid: &Grid1<T>,
    y_grid: &Grid1<T>,
) -> Result<RMatrix<T>> {
    let half = r64::<T>(0.5);
    struct Comp<T> {
        w: T,
        mx: T,
        my: T,
        cxx: T,
        cyy: T,
        cxy: T,
        det: T,
    }
    let mut comps: Vec<Comp<T>> = Vec::new();
    for (w, comp) in ens.components() {
        let (mean, v) = match comp {
            EnsembleComponent::CoherentPoint(beta) => (*beta, T::zero()),
            EnsembleComponent::IsotropicGaussian { mean, variance } => (*mean, *variance),
        };
        let big_v = v + half;
        let cxx = big_v + s1;
        let cyy = big_v + s2;
        let cxy = big_v * Float::cos(theta1 - theta2);
        let det = cxx * cyy - cxy * cxy;
        if det <= r64(1e-12) {
            return Err(CoreError::InvalidModel(
                "same-angle quadrature pair with no detector response is singular".into(),
            ));
        }
        let rot1 = Complex::from_polar(T::one(), -theta1);
        let rot2 = Complex::from_polar(T::one(), -theta2);
        comps.push(Comp {
            w: *w,
            mx: (mean * rot1).re,
            my: (mean * rot2).re,
            cxx,
            cyy,
            cxy,
            det,
        });
    }
    let mut values = RMatrix::<T>::zeros(x_grid.len(), y_grid.len());
    for i in 0..x_grid.len() {
        for j in 0..y_grid.len() {
            let mut acc = T::zero();
            for c in &comps {
                let dx = x_grid.point(i) - c.mx;
                let dy = y_grid.point(j) - c.my;
                let quad = (c.cyy * dx * dx - r64::<T>(2.0) * c.cxy * dx * dy + c.cxx * dy * dy)
                    / (r64::<T>(2.0) * c.det);
                acc += c.w * Float::exp(-quad) / (T::two_pi() * Float::sqrt(c.det));
            }
            values[(i, j)] = acc;
        }
    }
    Ok(values)
}

/// Number detector crossed with a quadrature detector: a phase-node average
/// over circles of constant intensity, optionally blurred along the number
/// axis by the number detector's response.
fn num_quad_values<T: Real>(
    ens: &ClassicalEnsemble<T>,
    s_n: T,
    theta: T,
    s_x: T,
    n_grid: &Grid1<T>,
    x_grid: &Grid1<T>,
) -> Result<RMatrix<T>> {
    if s_x <= T::zero() {
        return Err(CoreError::InvalidModel(
            "a number-quadrature pair needs a positive quadrature response".into(),
        ));
    }
    let step = n_grid.step();
    let u_grid = if s_n == T::zero() {
        if n_grid.min() < T::zero() {
            return Err(CoreError::InvalidModel(
                "an exact number axis cannot include negative outcomes".into(),
            ));
        }
        n_grid.clone()
    } else {
        let pad = r64::<T>(5.0) * Float::sqrt(s_n);
        Grid1::from_zero(n_grid.max() + pad, step)?
    };

    // f[u, x] = int d phi g_{s_x}(x - sqrt(u) cos(phi - theta)) Q(sqrt(u) e^{i phi})
    let phi_step = T::two_pi() / r64::<T>(PHASE_NODES as f64);
    let mut f = RMatrix::<T>::zeros(u_grid.len(), x_grid.len());
    for (k, &u) in u_grid.points().iter().enumerate() {
        let root = Float::sqrt(u);
        let mut centers = Vec::with_capacity(PHASE_NODES);
        let mut qvals = Vec::with_capacity(PHASE_NODES);
        for j in 0..PHASE_NODES {
            let phi = phi_step * r64::<T>(j as f64);
            let alpha = Complex::from_polar(root, phi);
            centers.push(root * Float::cos(phi - theta));
            qvals.push(q_from_classical_ensemble(ens, alpha));
        }
        for i in 0..x_grid.len() {
            let x = x_grid.point(i);
            let mut acc = T::zero();
            for j in 0..PHASE_NODES {
                if qvals[j] > r64(1e-300) {
                    acc += gaussian_density(x - centers[j], s_x) * qvals[j];
                }
            }
            f[(k, i)] = acc * phi_step;
        }
    }

    let half = r64::<T>(0.5);
    if s_n == T::zero() {
        Ok(f * half)
    } else {
        // blur in the number outcome: p(n, x) = (1/2) int du g_{s_n}(n - u) f(u, x);
        // the integrand is finite at u = 0, so end-corrected weights keep the
        // boundary error out of the normalization budget
        let w_u = end_corrected_weights(&u_grid);
        let mut blur = RMatrix::<T>::zeros(n_grid.len(), u_grid.len());
        for i in 0..n_grid.len() {
            for k in 0..u_grid.len() {
                blur[(i, k)] =
                    gaussian_density(n_grid.point(i) - u_grid.point(k), s_n) * w_u[k];
            }
        }
        Ok(blur * f * half)
    }
}

/// Two number detectors reading the same intensity through independent
/// responses.
fn num_num_values<T: Real>(
    ens: &ClassicalEnsemble<T>,
    s1: T,
    s2: T,
    n1_grid: &Grid1<T>,
    n2_grid: &Grid1<T>,
) -> Result<RMatrix<T>> {
    if s1 <= T::zero() || s2 <= T::zero() {
        return Err(CoreError::InvalidModel(
            "a number-number pair needs positive responses on both detectors".into(),
        ));
    }
    let step = n1_grid.step();
    let pad = r64::<T>(5.0) * Float::sqrt(Float::max(s1, s2));
    let u_max = Float::max(n1_grid.max(), n2_grid.max()) + pad;
    let u_grid = Grid1::from_zero(u_max, step)?;
    let radial: Vec<T> = u_grid
        .points()
        .iter()
        .map(|&u| radial_density(ens, u))
        .collect();
    let w_u = end_corrected_weights(&u_grid);
    let mut a1 = RMatrix::<T>::zeros(n1_grid.len(), u_grid.len());
    for i in 0..n1_grid.len() {
        for k in 0..u_grid.len() {
            a1[(i, k)] = gaussian_density(n1_grid.point(i) - u_grid.point(k), s1)
                * radial[k]
                * w_u[k];
        }
    }
    let mut a2 = RMatrix::<T>::zeros(u_grid.len(), n2_grid.len());
    for k in 0..u_grid.len() {
        for j in 0..n2_grid.len() {
            a2[(k, j)] = gaussian_density(n2_grid.point(j) - u_grid.point(k), s2);
        }
    }
    Ok(a1 * a2)
}

/// Deconvolves a Husimi Q field by the vacuum kernel (variance 1/4 on each
/// axis), recovering the Wigner function within the declared spectral
/// cutoff. Negativity of the output witnesses nonclassicality.
pub fn heterodyne_to_wigner<T: Real>(q: &PhaseSpaceField<T>) -> Result<SignedJointDistribution<T>> {
    for grid in [q.x_grid(), q.y_grid()] {
        if grid.step() > r64(0.1) {
            return Err(CoreError::InvalidState(format!(
                "deconvolution grid step {} exceeds 0.1",
                to_f64(grid.step())
            )));
        }
        let half_width = Float::min(-grid.min(), grid.max());
        if half_width < r64(5.0) {
            return Err(CoreError::GridTooNarrow {
                half_width: to_f64(half_width),
                required: 5.0,
            });
        }
    }
    let observed = SignedJointDistribution::from_phase_space(q);
    let quarter = r64::<T>(0.25);
    apply_inversion(
        &observed,
        &MuKernel::GaussianDeconvolution { variance: quarter },
        &MuKernel::GaussianDeconvolution { variance: quarter },
    )
}

/// One failing trial of the separability suite, with enough detail to
/// reproduce it.
#[derive(Debug, Clone)]
pub struct TrialFinding {
    pub trial: u64,
    pub model: String,
    pub min_value: f64,
    pub norm_defect: f64,
}

/// Outcome of [`separability_property_suite`].
#[derive(Debug, Clone)]
pub struct SeparabilityReport {
    pub seed: u64,
    pub trials: u64,
    pub passes: u64,
    pub worst_min_value: f64,
    pub worst_norm_defect: f64,
    pub failures: Vec<TrialFinding>,
}

impl SeparabilityReport {
    pub fn all_passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn random_detector<T: Real>(rng: &mut ChaCha8Rng) -> (DetectorModel<T>, T) {
    let intrinsic = r64::<T>(rng.random_range(0.05..0.25));
    let extra = r64::<T>(rng.random_range(0.05..0.25));
    let det = if rng.random::<bool>() {
        DetectorModel::ContinuousNumber {
            response_variance: intrinsic,
        }
    } else {
        DetectorModel::RotatedQuadrature {
            theta: r64(rng.random_range(0.0..std::f64::consts::PI)),
            response_variance: intrinsic,
        }
    };
    (det, extra)
}

fn random_ensemble<T: Real>(rng: &mut ChaCha8Rng) -> ClassicalEnsemble<T> {
    let count = rng.random_range(1..=5usize);
    let mut raw: Vec<(f64, EnsembleComponent<T>)> = Vec::with_capacity(count);
    let mut total = 0.0f64;
    for _ in 0..count {
        let w = rng.random_range(0.1..1.0);
        total += w;
        let radius = 2.0 * rng.random::<f64>().sqrt();
        let angle = rng.random_range(0.0..std::f64::consts::TAU);
        let beta = Complex::new(
            r64::<T>(radius * angle.cos()),
            r64::<T>(radius * angle.sin()),
        );
        let comp = if rng.random::<bool>() {
            EnsembleComponent::CoherentPoint(beta)
        } else {
            EnsembleComponent::IsotropicGaussian {
                mean: beta,
                variance: r64(rng.random_range(0.05..1.0)),
            }
        };
        raw.push((w, comp));
    }
    let components = raw
        .into_iter()
        .map(|(w, c)| (r64::<T>(w / total), c))
        .collect();
    ClassicalEnsemble::new(components).expect("randomized ensembles are valid by construction")
}

/// Randomized instantiation of the classical closure: for every separable
/// classical model, observed statistics passed through exactly paired
/// inversion kernels come back bona fide. Failures carry the offending
/// model. Each trial is deterministic in `(seed, trial index)`.
pub fn separability_property_suite<T: Real>(seed: u64, trials: u64) -> Result<SeparabilityReport> {
    let mut worst_min = f64::INFINITY;
    let mut worst_defect = 0.0f64;
    let mut failures = Vec::new();
    for trial in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(trial);
        let ensemble = random_ensemble::<T>(&mut rng);
        let (det_x, extra_x) = random_detector::<T>(&mut rng);
        let (det_y, extra_y) = random_detector::<T>(&mut rng);
        let model = ClassicalJointModel::new(ensemble, det_x, det_y)?;
        let (gx, gy) = suggested_model_grids(&model)?;
        let truth = classical_joint_statistics(&model, &gx, &gy)?;

        let (blur_x, inv_x) = MuKernel::smoothing_pair(&gx, extra_x)?;
        let (blur_y, inv_y) = MuKernel::smoothing_pair(&gy, extra_y)?;
        let observed = apply_inversion(&truth, &blur_x, &blur_y)?;
        let inferred = apply_inversion(&observed, &inv_x, &inv_y)?;

        let verdict = bona_fide_check(&inferred, r64(1e-8));
        worst_min = worst_min.min(to_f64(verdict.min_value));
        worst_defect = worst_defect.max(to_f64(verdict.norm_defect).abs());
        if !verdict.is_bona_fide {
            failures.push(TrialFinding {
                trial,
                model: format!("{model:?}"),
                min_value: to_f64(verdict.min_value),
                norm_defect: to_f64(verdict.norm_defect),
            });
        }
    }
    Ok(SeparabilityReport {
        seed,
        trials,
        passes: trials - failures.len() as u64,
        worst_min_value: worst_min,
        worst_norm_defect: worst_defect,
        failures,
    })
}

trait Transpose<T> {
    fn transpose(self) -> Self;
}

impl<T: Real> Transpose<T> for RMatrix<T> {
    fn transpose(self) -> Self {
        nalgebra::DMatrix::transpose(&self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{make_coherent_state, make_number_state, FockParams};
    use crate::quasiprob::husimi_q_grid;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn params(dim: usize) -> FockParams<f64> {
        FockParams::with_dim(dim).unwrap()
    }

    fn gaussian_field(x: &Grid1<f64>, y: &Grid1<f64>, vx: f64, vy: f64) -> SignedJointDistribution<f64> {
        let values = RMatrix::from_fn(x.len(), y.len(), |i, j| {
            let gx = (-x.point(i).powi(2) / (2.0 * vx)).exp() / (2.0 * PI * vx).sqrt();
            let gy = (-y.point(j).powi(2) / (2.0 * vy)).exp() / (2.0 * PI * vy).sqrt();
            gx * gy
        });
        SignedJointDistribution::new(x.clone(), y.clone(), values).unwrap()
    }

    #[test]
    fn identity_kernels_preserve_input() {
        let x = Grid1::new(-4.0, 4.0, 101).unwrap();
        let y = Grid1::new(-4.0, 4.0, 101).unwrap();
        let dist = gaussian_field(&x, &y, 0.5, 0.8);
        let out = apply_inversion(&dist, &MuKernel::Identity, &MuKernel::Identity).unwrap();
        assert_eq!(out.values(), dist.values());
    }

    #[test]
    fn smoothing_pair_round_trips() {
        // Forward-blur oracle: the blurred field must come back to the
        // original through the exactly paired inverse.
        let x = Grid1::new(-6.0, 6.0, 201).unwrap();
        let y = Grid1::new(-6.0, 6.0, 201).unwrap();
        let dist = gaussian_field(&x, &y, 0.3, 0.6);
        let (blur_x, inv_x) = MuKernel::smoothing_pair(&x, 0.2).unwrap();
        let (blur_y, inv_y) = MuKernel::smoothing_pair(&y, 0.12).unwrap();
        let observed = apply_inversion(&dist, &blur_x, &blur_y).unwrap();
        // blurring spreads the peak
        assert!(observed.at(100, 100) < dist.at(100, 100));
        let recovered = apply_inversion(&observed, &inv_x, &inv_y).unwrap();
        let mut max_dev = 0.0f64;
        for i in 0..x.len() {
            for j in 0..y.len() {
                max_dev = max_dev.max((recovered.at(i, j) - dist.at(i, j)).abs());
            }
        }
        assert!(max_dev < 1e-3, "recovery error {max_dev}");
        assert!(max_dev < 1e-8, "exact-pair recovery should be near roundoff: {max_dev}");
    }

    #[test]
    fn separable_input_factorizes() {
        // A product input stays a product: the output equals the tensor
        // product of the per-axis transformed marginals.
        let x = Grid1::new(-7.5, 7.5, 226).unwrap();
        let dist = gaussian_field(&x, &x, 0.4, 0.9);
        let (blur_x, _) = MuKernel::smoothing_pair(&x, 0.15).unwrap();
        let (blur_y, _) = MuKernel::smoothing_pair(&x, 0.08).unwrap();
        let out = apply_inversion(&dist, &blur_x, &blur_y).unwrap();
        let fx = blur_x.apply_to_vector(&x, &dist.marginal_x()).unwrap();
        let fy = blur_y.apply_to_vector(&x, &dist.marginal_y()).unwrap();
        let mass = dist.mass();
        for i in (0..x.len()).step_by(7) {
            for j in (0..x.len()).step_by(11) {
                assert_relative_eq!(out.at(i, j), fx[i] * fy[j] / mass, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn output_marginals_are_inverted_marginals() {
        let x = Grid1::new(-7.5, 7.5, 226).unwrap();
        let dist = gaussian_field(&x, &x, 0.4, 0.9);
        let (blur, inv) = MuKernel::smoothing_pair(&x, 0.15).unwrap();
        let observed = apply_inversion(&dist, &blur, &blur).unwrap();
        let out = apply_inversion(&observed, &inv, &inv).unwrap();
        let marg_out = out.marginal_x();
        let inverted_marg = inv.apply_to_vector(&x, &observed.marginal_x()).unwrap();
        for (a, b) in inverted_marg.iter().zip(marg_out.iter()) {
            assert_relative_eq!(a, b, epsilon = 1e-8);
        }
    }

    #[test]
    fn inversion_is_linear() {
        let x = Grid1::new(-5.0, 5.0, 121).unwrap();
        let d1 = gaussian_field(&x, &x, 0.4, 0.5);
        let d2 = gaussian_field(&x, &x, 1.1, 0.7);
        let (blur, _) = MuKernel::smoothing_pair(&x, 0.1).unwrap();
        let (a, b) = (0.3, 0.7);
        let mix = SignedJointDistribution::new(
            x.clone(),
            x.clone(),
            d1.values() * a + d2.values() * b,
        )
        .unwrap();
        let out_mix = apply_inversion(&mix, &blur, &blur).unwrap();
        let out_1 = apply_inversion(&d1, &blur, &blur).unwrap();
        let out_2 = apply_inversion(&d2, &blur, &blur).unwrap();
        for i in (0..x.len()).step_by(13) {
            for j in (0..x.len()).step_by(17) {
                assert_relative_eq!(
                    out_mix.at(i, j),
                    a * out_1.at(i, j) + b * out_2.at(i, j),
                    epsilon = 1e-10
                );
            }
        }
    }

    #[test]
    fn bona_fide_check_flags_wigner_negativity() {
        let x = Grid1::new(-5.0, 5.0, 121).unwrap();
        let one = make_number_state(1, params(12)).unwrap();
        let w = crate::quasiprob::wigner_field(&one, x.clone(), x.clone()).unwrap();
        let dist = SignedJointDistribution::from_phase_space(&w);
        let verdict = bona_fide_check(&dist, 1e-8);
        assert!(verdict.negativity_flagged);
        assert!(!verdict.is_bona_fide);
        assert_relative_eq!(verdict.min_value, -2.0 / PI, epsilon = 1e-6);
        // negative-part mass of the single-photon Wigner function is
        // 2/sqrt(e) - 1; the kink at the zero contour limits the trapezoid
        assert_relative_eq!(
            verdict.negativity_mass,
            2.0 * (-0.5f64).exp() - 1.0,
            epsilon = 1e-3
        );

        let uniform = SignedJointDistribution::new(
            x.clone(),
            x.clone(),
            RMatrix::from_element(x.len(), x.len(), 1.0 / 100.0),
        )
        .unwrap();
        assert!(!bona_fide_check(&uniform, 1e-8).negativity_flagged);
    }

    #[test]
    fn heterodyne_recovers_wigner_values() {
        let grid = Grid1::new(-6.0, 6.0, 241).unwrap();
        let one = make_number_state(1, params(16)).unwrap();
        let q = husimi_q_grid(&one, grid.clone(), grid.clone()).unwrap();
        let w = heterodyne_to_wigner(&q).unwrap();
        let mid = grid.len() / 2;
        assert_relative_eq!(w.at(mid, mid), -2.0 / PI, epsilon = 2.0 / PI * 0.02);
        assert!(w.negativity_mass() > 0.05);

        let coh = make_coherent_state(Complex::new(1.0, 0.0), params(24)).unwrap();
        let qc = husimi_q_grid(&coh, grid.clone(), grid.clone()).unwrap();
        let wc = heterodyne_to_wigner(&qc).unwrap();
        assert!(wc.min_value() >= -1e-3);
        assert_relative_eq!(wc.mass(), 1.0, epsilon = 1e-4);
    }

    #[test]
    fn heterodyne_matches_oracle_pointwise() {
        let grid = Grid1::new(-6.0, 6.0, 241).unwrap();
        for rho in [
            make_number_state(0, params(12)).unwrap(),
            make_number_state(2, params(12)).unwrap(),
            make_coherent_state(Complex::new(0.8, 0.6), params(30)).unwrap(),
        ] {
            let q = husimi_q_grid(&rho, grid.clone(), grid.clone()).unwrap();
            let w = heterodyne_to_wigner(&q).unwrap();
            let oracle = crate::quasiprob::wigner_field(&rho, grid.clone(), grid.clone()).unwrap();
            let mut max_dev = 0.0f64;
            for i in 0..grid.len() {
                for j in 0..grid.len() {
                    max_dev = max_dev.max((w.at(i, j) - oracle.at(i, j)).abs());
                }
            }
            assert!(max_dev < 2e-2, "deconvolution error {max_dev}");
        }
    }

    #[test]
    fn heterodyne_rejects_unresolved_fields() {
        // A spike far narrower than the vacuum kernel cannot come from a
        // Husimi function; its spectrum survives at the cutoff.
        let grid = Grid1::new(-6.0, 6.0, 241).unwrap();
        let v = 0.05;
        let values = RMatrix::from_fn(grid.len(), grid.len(), |i, j| {
            let r2 = grid.point(i).powi(2) + grid.point(j).powi(2);
            (-r2 / (2.0 * v)).exp() / (2.0 * PI * v)
        });
        let field = PhaseSpaceField::new(grid.clone(), grid.clone(), values).unwrap();
        let err = heterodyne_to_wigner(&field).unwrap_err();
        assert!(matches!(err, CoreError::CutoffInsufficient { .. }));
    }

    #[test]
    fn heterodyne_rejects_bad_grids() {
        let narrow = Grid1::new(-3.5, 3.5, 101).unwrap();
        let rho = make_number_state(0, params(8)).unwrap();
        let q_narrow = husimi_q_grid(&rho, narrow.clone(), narrow.clone()).unwrap();
        assert!(matches!(
            heterodyne_to_wigner(&q_narrow),
            Err(CoreError::GridTooNarrow { .. })
        ));
        let coarse = Grid1::new(-6.0, 6.0, 41).unwrap();
        let values = RMatrix::from_element(coarse.len(), coarse.len(), 1.0);
        let q_coarse = PhaseSpaceField::new(coarse.clone(), coarse.clone(), values).unwrap();
        assert!(heterodyne_to_wigner(&q_coarse).is_err());
    }

    #[test]
    fn classical_joint_vacuum_quadratures() {
        let ens = ClassicalEnsemble::single_point(Complex::new(0.0, 0.0));
        let model = ClassicalJointModel::new(
            ens,
            DetectorModel::rotated_quadrature(0.0),
            DetectorModel::rotated_quadrature(PI / 2.0),
        )
        .unwrap();
        let (gx, gy) = suggested_model_grids(&model).unwrap();
        let dist = classical_joint_statistics(&model, &gx, &gy).unwrap();
        // product of two variance-1/2 Gaussians
        for (i, j) in [(10, 20), (gx.len() / 2, gy.len() / 2), (40, 70)] {
            let x = gx.point(i);
            let y = gy.point(j);
            let expected = (-x * x - y * y).exp() / PI;
            assert_relative_eq!(dist.at(i, j), expected, epsilon = 1e-10);
        }
        assert!(dist.min_value() >= 0.0);
    }

    #[test]
    fn classical_joint_marginals_match_detector_module() {
        use crate::detectors::{semiquantum_number_via_kernel, semiquantum_quadrature};
        let beta = Complex::new(1.1, -0.4);
        let ens = ClassicalEnsemble::single_point(beta);
        let theta = 0.3;
        let s_x = 0.1;
        let model = ClassicalJointModel::new(
            ens,
            DetectorModel::continuous_number(),
            DetectorModel::RotatedQuadrature {
                theta,
                response_variance: s_x,
            },
        )
        .unwrap();
        // The joint varies in n on the scale of the quadrature response near
        // n = 0, so the marginal check runs on a finer and longer number axis
        // than the suggested default (the moment gates see the n^2 tail).
        let (gn_coarse, gx) = suggested_model_grids(&model).unwrap();
        let gn = Grid1::from_zero(gn_coarse.max() + 8.0, 0.01).unwrap();
        let dist = classical_joint_statistics(&model, &gn, &gx).unwrap();

        // number marginal equals the Poisson-kernel photocount density; the
        // reference is computed on a refined grid whose nodes contain gn's
        let rho = make_coherent_state(beta, params(40)).unwrap();
        let p_m = crate::fock::photon_number_distribution(&rho);
        let refine = 2;
        let gn_fine = Grid1::new(gn.min(), gn.max(), (gn.len() - 1) * refine + 1).unwrap();
        let reference = semiquantum_number_via_kernel(&p_m, &gn_fine).unwrap();
        let marg_n = dist.marginal_x();
        let mut max_dev = 0.0f64;
        for (i, a) in marg_n.iter().enumerate() {
            max_dev = max_dev.max((a - reference.density[i * refine]).abs());
        }
        assert!(max_dev < 1e-6, "number marginal deviates by {max_dev}");

        // quadrature marginal equals the response-smoothed detector density;
        // the joint is integrated over n with end-corrected weights because
        // the density is finite at n = 0
        let quad_grid = Grid1::symmetric(6.0, gx.step()).unwrap();
        let stats = semiquantum_quadrature(&rho, theta, &quad_grid).unwrap();
        let kernel = |t: f64| (-t * t / (2.0 * s_x)).exp() / (2.0 * PI * s_x).sqrt();
        let w_n = end_corrected_weights(&gn);
        let mut max_dev_x = 0.0f64;
        for (j, x) in gx.points().iter().enumerate() {
            let marg = (0..gn.len()).fold(0.0, |acc, i| acc + dist.at(i, j) * w_n[i]);
            let mut smoothed = 0.0;
            for (k, xp) in quad_grid.points().iter().enumerate() {
                smoothed += kernel(x - xp) * stats.density[k] * quad_grid.weight(k);
            }
            max_dev_x = max_dev_x.max((marg - smoothed).abs());
        }
        assert!(max_dev_x < 1e-6, "quadrature marginal deviates by {max_dev_x}");
    }

    #[test]
    fn classical_joint_rejects_singular_pairs() {
        let ens = ClassicalEnsemble::single_point(Complex::new(0.5, 0.0));
        let same_angle = ClassicalJointModel::new(
            ens.clone(),
            DetectorModel::rotated_quadrature(0.4),
            DetectorModel::rotated_quadrature(0.4),
        )
        .unwrap();
        let (gx, gy) = suggested_model_grids(&same_angle).unwrap();
        assert!(matches!(
            classical_joint_statistics(&same_angle, &gx, &gy),
            Err(CoreError::InvalidModel(_))
        ));

        let quantum = ClassicalJointModel::new(
            ens,
            DetectorModel::QuantumNumber,
            DetectorModel::rotated_quadrature(0.0),
        );
        assert!(quantum.is_err());
    }

    #[test]
    fn adversarial_blurred_quadratures_recover_cleanly() {
        let ens = ClassicalEnsemble::single_point(Complex::new(1.3, -0.6));
        let model = ClassicalJointModel::new(
            ens,
            DetectorModel::RotatedQuadrature {
                theta: 0.2,
                response_variance: 0.12,
            },
            DetectorModel::RotatedQuadrature {
                theta: 1.4,
                response_variance: 0.22,
            },
        )
        .unwrap();
        let (gx, gy) = suggested_model_grids(&model).unwrap();
        let truth = classical_joint_statistics(&model, &gx, &gy).unwrap();
        let (bx, ix) = MuKernel::smoothing_pair(&gx, 0.18).unwrap();
        let (by, iy) = MuKernel::smoothing_pair(&gy, 0.07).unwrap();
        let observed = apply_inversion(&truth, &bx, &by).unwrap();
        let inferred = apply_inversion(&observed, &ix, &iy).unwrap();
        let verdict = bona_fide_check(&inferred, 1e-8);
        assert!(verdict.is_bona_fide, "verdict: {verdict:?}");
        assert!(inferred.negativity_mass() <= 1e-8);
    }

    #[test]
    fn separability_suite_passes() {
        let report = separability_property_suite::<f64>(7, 25).unwrap();
        assert!(
            report.all_passed(),
            "failures: {:?}, worst min {}",
            report.failures,
            report.worst_min_value
        );
        assert!(report.worst_min_value >= -1e-8);
        assert!(report.worst_norm_defect <= 1e-4);
    }

    #[test]
    fn quantum_input_fails_the_classical_pipeline() {
        // The same inversion machinery fed the Husimi function of a Fock
        // state (a quantum, non-separable observation) detects negativity.
        let grid = Grid1::new(-6.0, 6.0, 241).unwrap();
        let one = make_number_state(1, params(16)).unwrap();
        let q = husimi_q_grid(&one, grid.clone(), grid.clone()).unwrap();
        let inferred = heterodyne_to_wigner(&q).unwrap();
        let verdict = bona_fide_check(&inferred, 1e-8);
        assert!(verdict.negativity_flagged);
    }
}
