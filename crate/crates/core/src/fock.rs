//! Truncated Fock-space states, mode operators, and exact quantum statistics.
//!
//! Everything here is the "true quantum" side of the comparisons: states are
//! dense density matrices over the basis `{|0>, ..., |dim-1>}`, operators are
//! truncated matrices, and moments are exact traces on the retained space.
//!
//! Truncation policy: the dimension is caller-supplied and constructors of
//! infinite-support states (coherent, squeezed, thermal) fail loudly when the
//! weight at or beyond the truncation edge exceeds `tail_tol`, reporting the
//! dimension that would satisfy the gate. Exact finite-support states (number
//! states) only require their index to fit.

use num_complex::Complex;
use num_traits::{Float, Zero};

use crate::grid::Grid1;
use crate::{r64, to_f64, C, CMatrix, CVector, CoreError, Real, Result};

/// Truncation parameters: basis size and the admissible edge/tail weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FockParams<T> {
    dim: usize,
    tail_tol: T,
}

impl<T: Real> FockParams<T> {
    pub const DEFAULT_TAIL_TOL: f64 = 1e-10;

    pub fn new(dim: usize, tail_tol: T) -> Result<Self> {
        if dim < 2 {
            return Err(CoreError::InvalidState(format!(
                "fock dimension must be at least 2, got {dim}"
            )));
        }
        if !(tail_tol > T::zero() && tail_tol < T::one()) {
            return Err(CoreError::InvalidState(format!(
                "tail tolerance must lie in (0, 1), got {}",
                to_f64(tail_tol)
            )));
        }
        Ok(Self { dim, tail_tol })
    }

    /// `dim` with the default tail tolerance.
    pub fn with_dim(dim: usize) -> Result<Self> {
        Self::new(dim, r64(Self::DEFAULT_TAIL_TOL))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn tail_tol(&self) -> T {
        self.tail_tol
    }
}

/// Density matrix over the truncated Fock basis.
///
/// Valid instances are Hermitian, unit-trace, and positive semidefinite up to
/// scalar-dependent roundoff gates.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix<T> {
    dim: usize,
    matrix: CMatrix<T>,
}

fn herm_tol<T: Real>() -> T {
    Float::max(r64(1e-12), crate::eps::<T>() * r64(1e2))
}

fn trace_tol<T: Real>() -> T {
    Float::max(r64(1e-10), crate::eps::<T>() * r64(1e4))
}

impl<T: Real> DensityMatrix<T> {
    /// Validates and wraps a raw matrix.
    pub fn from_matrix(matrix: CMatrix<T>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() || matrix.nrows() < 2 {
            return Err(CoreError::InvalidState(format!(
                "density matrix must be square with dim >= 2, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let dm = Self {
            dim: matrix.nrows(),
            matrix,
        };
        dm.validate()?;
        Ok(dm)
    }

    /// Builds `|psi><psi|` from a normalized amplitude vector.
    pub fn from_pure(amplitudes: &CVector<T>) -> Result<Self> {
        let norm_sq: T = amplitudes.iter().map(|c| c.norm_sqr()).sum();
        if Float::abs(norm_sq - T::one()) > trace_tol::<T>() {
            return Err(CoreError::InvalidState(format!(
                "pure-state norm^2 = {} deviates from 1",
                to_f64(norm_sq)
            )));
        }
        let d = amplitudes.len();
        let matrix = CMatrix::from_fn(d, d, |i, j| amplitudes[i] * amplitudes[j].conj());
        Ok(Self { dim: d, matrix })
    }

    /// Convex mixture of density matrices of equal dimension.
    pub fn mixture(parts: &[(T, DensityMatrix<T>)]) -> Result<Self> {
        let d = parts
            .first()
            .ok_or_else(|| CoreError::InvalidState("empty mixture".into()))?
            .1
            .dim;
        let mut matrix = CMatrix::<T>::zeros(d, d);
        let mut total = T::zero();
        for (w, rho) in parts {
            if rho.dim != d {
                return Err(CoreError::InvalidState(
                    "mixture components must share a dimension".into(),
                ));
            }
            if *w < T::zero() {
                return Err(CoreError::InvalidState("mixture weights must be >= 0".into()));
            }
            matrix += rho.matrix.clone() * Complex::new(*w, T::zero());
            total += *w;
        }
        if Float::abs(total - T::one()) > trace_tol::<T>() {
            return Err(CoreError::InvalidState(format!(
                "mixture weights sum to {}, expected 1",
                to_f64(total)
            )));
        }
        Self::from_matrix(matrix)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    pub fn entry(&self, m: usize, n: usize) -> C<T> {
        self.matrix[(m, n)]
    }

    pub fn trace(&self) -> T {
        self.matrix.diagonal().iter().map(|c| c.re).sum()
    }

    /// Weight on the last retained basis state.
    pub fn edge_occupation(&self) -> T {
        self.matrix[(self.dim - 1, self.dim - 1)].re
    }

    /// `tr(rho op)`.
    pub fn expectation(&self, op: &CMatrix<T>) -> C<T> {
        assert_eq!(op.nrows(), self.dim, "operator dimension mismatch");
        assert_eq!(op.ncols(), self.dim, "operator dimension mismatch");
        let mut acc = Complex::zero();
        for i in 0..self.dim {
            for j in 0..self.dim {
                acc += self.matrix[(i, j)] * op[(j, i)];
            }
        }
        acc
    }

    /// Checks Hermiticity, unit trace, and positive semidefiniteness.
    pub fn validate(&self) -> Result<()> {
        let d = self.dim;
        let mut herm_dev = T::zero();
        for i in 0..d {
            for j in 0..d {
                let dev = (self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm();
                herm_dev = Float::max(herm_dev, dev);
            }
        }
        if herm_dev > herm_tol::<T>() {
            return Err(CoreError::InvalidState(format!(
                "not Hermitian: max |rho - rho^dagger| = {:.3e}",
                to_f64(herm_dev)
            )));
        }
        let tr = self.trace();
        if Float::abs(tr - T::one()) > trace_tol::<T>() {
            return Err(CoreError::InvalidState(format!(
                "trace = {} deviates from 1",
                to_f64(tr)
            )));
        }
        let eig = self.matrix.clone().symmetric_eigen();
        for ev in eig.eigenvalues.iter() {
            if *ev < -trace_tol::<T>() {
                return Err(CoreError::InvalidState(format!(
                    "negative eigenvalue {:.3e}",
                    to_f64(*ev)
                )));
            }
        }
        Ok(())
    }

    /// Eigenpairs with eigenvalue above `rel_cut * max_eigenvalue`, for
    /// rank-aware evaluation paths.
    pub(crate) fn spectral(&self, rel_cut: T) -> Vec<(T, CVector<T>)> {
        let eig = self.matrix.clone().symmetric_eigen();
        let max_ev = eig
            .eigenvalues
            .iter()
            .fold(T::zero(), |a, &b| Float::max(a, Float::abs(b)));
        let cut = max_ev * rel_cut;
        let mut pairs = Vec::new();
        for (k, &ev) in eig.eigenvalues.iter().enumerate() {
            if ev > cut {
                pairs.push((ev, eig.eigenvectors.column(k).into_owned()));
            }
        }
        pairs
    }

    /// `rho` conjugated by `exp(-i theta n)`, which rotates quadrature
    /// statistics at angle `theta` onto angle zero.
    pub(crate) fn rotated_by_number_phase(&self, theta: T) -> CMatrix<T> {
        let d = self.dim;
        CMatrix::from_fn(d, d, |m, n| {
            let k = r64::<T>(m as f64) - r64::<T>(n as f64);
            self.matrix[(m, n)] * Complex::from_polar(T::one(), -k * theta)
        })
    }
}

/// Annihilation, creation, and number operators on the truncated basis,
/// plus rotated quadratures derived from them.
#[derive(Debug, Clone)]
pub struct ModeOperators<T> {
    dim: usize,
    annihilation: CMatrix<T>,
    creation: CMatrix<T>,
    number: CMatrix<T>,
}

impl<T: Real> ModeOperators<T> {
    pub fn new(dim: usize) -> Self {
        let mut a = CMatrix::<T>::zeros(dim, dim);
        for n in 1..dim {
            a[(n - 1, n)] = Complex::new(Float::sqrt(r64::<T>(n as f64)), T::zero());
        }
        let creation = a.adjoint();
        let number = CMatrix::from_fn(dim, dim, |i, j| {
            if i == j {
                Complex::new(r64::<T>(i as f64), T::zero())
            } else {
                Complex::zero()
            }
        });
        Self {
            dim,
            annihilation: a,
            creation,
            number,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn annihilation(&self) -> &CMatrix<T> {
        &self.annihilation
    }

    pub fn creation(&self) -> &CMatrix<T> {
        &self.creation
    }

    pub fn number(&self) -> &CMatrix<T> {
        &self.number
    }

    /// Rotated quadrature `X_theta = (a e^{-i theta} + a^dagger e^{i theta})/2`.
    ///
    /// The vacuum satisfies `<0|X_theta^2|0> = 1/4`, which anchors the
    /// squeezing bound at 1/4.
    pub fn quadrature(&self, theta: T) -> CMatrix<T> {
        let half = Complex::new(r64::<T>(0.5), T::zero());
        let phase = Complex::from_polar(T::one(), theta);
        (&self.annihilation * phase.conj() + &self.creation * phase) * half
    }
}

/// Log-factorial table `ln(m!)` for `m = 0..=n`, computed in f64.
pub(crate) fn ln_factorials(n: usize) -> Vec<f64> {
    let mut t = Vec::with_capacity(n + 1);
    let mut acc = 0.0f64;
    t.push(0.0);
    for m in 1..=n {
        acc += (m as f64).ln();
        t.push(acc);
    }
    t
}

/// Coherent amplitudes `<m|beta> = e^{-|beta|^2/2} beta^m / sqrt(m!)` for
/// `m < dim`, by stable recurrence.
pub(crate) fn coherent_amplitudes<T: Real>(dim: usize, beta: C<T>) -> CVector<T> {
    let mut c = CVector::<T>::zeros(dim);
    let half = r64::<T>(0.5);
    c[0] = Complex::new(Float::exp(-beta.norm_sqr() * half), T::zero());
    for m in 1..dim {
        let inv_sqrt_m = T::one() / Float::sqrt(r64::<T>(m as f64));
        c[m] = c[m - 1] * beta * Complex::new(inv_sqrt_m, T::zero());
    }
    c
}

// ---------------------------------------------------------------------------
// State constructors
// ---------------------------------------------------------------------------

/// Number-state projector `|m><m|`.
pub fn make_number_state<T: Real>(m: usize, params: FockParams<T>) -> Result<DensityMatrix<T>> {
    let dim = params.dim();
    if m >= dim {
        return Err(CoreError::IndexOutsideBasis { index: m, dim });
    }
    let mut v = CVector::<T>::zeros(dim);
    v[m] = Complex::new(T::one(), T::zero());
    DensityMatrix::from_pure(&v)
}

/// Poisson tail gate computed in f64: weight at and beyond index `dim - 1`.
fn poisson_tail_check(lambda: f64, dim: usize, tol: f64) -> std::result::Result<(), (f64, usize)> {
    let tail_from_edge = |d: usize| -> f64 {
        // mass of indices >= d - 1
        let mut pmf = (-lambda).exp();
        let mut head = 0.0;
        for m in 0..d.saturating_sub(1) {
            head += pmf;
            pmf *= lambda / (m as f64 + 1.0);
        }
        (1.0 - head).max(0.0)
    };
    let tail = tail_from_edge(dim);
    if tail <= tol {
        return Ok(());
    }
    let mut required = dim;
    while required < 100_000 && tail_from_edge(required) > tol {
        required += 1;
    }
    Err((tail, required))
}

/// Coherent state `|beta><beta|`, renormalized after truncation.
pub fn make_coherent_state<T: Real>(beta: C<T>, params: FockParams<T>) -> Result<DensityMatrix<T>> {
    let dim = params.dim();
    let lambda = to_f64(beta.norm_sqr());
    poisson_tail_check(lambda, dim, to_f64(params.tail_tol())).map_err(|(tail, required)| {
        CoreError::TailTooHeavy {
            tail,
            tol: to_f64(params.tail_tol()),
            required_dim: required,
        }
    })?;
    let mut c = coherent_amplitudes(dim, beta);
    let norm: T = Float::sqrt(c.iter().map(|z| z.norm_sqr()).sum());
    c /= Complex::new(norm, T::zero());
    DensityMatrix::from_pure(&c)
}

/// Squeezed vacuum with squeezing parameter `r` (quadrature variance
/// `e^{-2r}/4` at angle zero), renormalized after truncation.
pub fn make_squeezed_vacuum<T: Real>(r: T, params: FockParams<T>) -> Result<DensityMatrix<T>> {
    let dim = params.dim();
    let tol = to_f64(params.tail_tol());
    // Even-amplitude weights in f64 for the tail gate.
    let th = to_f64(r).tanh();
    let mut weights = Vec::new(); // |c_{2k}|^2, un-normalized by 1/cosh r
    let mut amp = 1.0f64; // c_0 (relative)
    let mut k = 0usize;
    loop {
        weights.push(amp * amp);
        // c_{2(k+1)} / c_{2k} = -tanh(r) sqrt((2k+1)(2k+2)) / (2(k+1))
        let kk = k as f64;
        amp *= -th * ((2.0 * kk + 1.0) * (2.0 * kk + 2.0)).sqrt() / (2.0 * (kk + 1.0));
        k += 1;
        if amp * amp < 1e-300 || k > 4000 {
            break;
        }
    }
    let total: f64 = weights.iter().sum();
    let tail_from = |d: usize| -> f64 {
        // mass on even indices >= d - 1
        let mut t = 0.0;
        for (kk, w) in weights.iter().enumerate() {
            if 2 * kk + 1 >= d {
                t += w;
            }
        }
        t / total
    };
    if tail_from(dim) > tol {
        let mut required = dim;
        while required < 100_000 && tail_from(required) > tol {
            required += 1;
        }
        return Err(CoreError::TailTooHeavy {
            tail: tail_from(dim),
            tol,
            required_dim: required,
        });
    }
    let mut c = CVector::<T>::zeros(dim);
    let th_t = Float::tanh(r);
    let mut amp_t = T::one();
    let mut idx = 0usize;
    while 2 * idx < dim {
        c[2 * idx] = Complex::new(amp_t, T::zero());
        let kk = r64::<T>(idx as f64);
        let two = r64::<T>(2.0);
        amp_t = amp_t * -th_t * Float::sqrt((two * kk + T::one()) * (two * kk + two))
            / (two * (kk + T::one()));
        idx += 1;
    }
    let norm: T = Float::sqrt(c.iter().map(|z| z.norm_sqr()).sum());
    c /= Complex::new(norm, T::zero());
    DensityMatrix::from_pure(&c)
}

/// Thermal state with mean photon number `nbar` (diagonal geometric weights),
/// renormalized after truncation.
pub fn make_thermal_state<T: Real>(nbar: T, params: FockParams<T>) -> Result<DensityMatrix<T>> {
    if nbar < T::zero() {
        return Err(CoreError::InvalidState(format!(
            "thermal nbar must be >= 0, got {}",
            to_f64(nbar)
        )));
    }
    let dim = params.dim();
    if nbar == T::zero() {
        return make_number_state(0, params);
    }
    let tol = to_f64(params.tail_tol());
    let q = to_f64(nbar) / (1.0 + to_f64(nbar));
    let tail_from = |d: usize| q.powi((d - 1) as i32);
    if tail_from(dim) > tol {
        let required = ((tol.ln() / q.ln()).ceil() as usize + 1).max(dim);
        return Err(CoreError::TailTooHeavy {
            tail: tail_from(dim),
            tol,
            required_dim: required,
        });
    }
    let qt = nbar / (T::one() + nbar);
    let mut p = Vec::with_capacity(dim);
    let mut w = T::one();
    for _ in 0..dim {
        p.push(w);
        w *= qt;
    }
    let total: T = p.iter().copied().sum();
    let matrix = CMatrix::from_fn(dim, dim, |i, j| {
        if i == j {
            Complex::new(p[i] / total, T::zero())
        } else {
            Complex::zero()
        }
    });
    DensityMatrix::from_matrix(matrix)
}

// ---------------------------------------------------------------------------
// Exact statistics
// ---------------------------------------------------------------------------

/// `(<n>, <n^2>)` as exact traces on the truncated space.
pub fn photon_number_moments<T: Real>(rho: &DensityMatrix<T>) -> (T, T) {
    let ops = ModeOperators::new(rho.dim());
    let n2 = ops.number() * ops.number();
    (
        rho.expectation(ops.number()).re,
        rho.expectation(&n2).re,
    )
}

/// `(<X_theta>, <X_theta^2>)` as exact traces of the truncated operators.
pub fn quadrature_moments<T: Real>(rho: &DensityMatrix<T>, theta: T) -> (T, T) {
    let ops = ModeOperators::new(rho.dim());
    let x = ops.quadrature(theta);
    let x2 = &x * &x;
    (rho.expectation(&x).re, rho.expectation(&x2).re)
}

/// Photon-number distribution `p_m = <m|rho|m>`.
pub fn photon_number_distribution<T: Real>(rho: &DensityMatrix<T>) -> Vec<T> {
    (0..rho.dim()).map(|m| rho.entry(m, m).re).collect()
}

/// Normalized quadrature wavefunctions `psi_m(x)` for `m < dim` in the
/// convention with vacuum variance 1/4 (so `psi_0(x) = (2/pi)^{1/4} e^{-x^2}`).
pub(crate) fn quadrature_wavefunctions<T: Real>(dim: usize, x: T) -> Vec<T> {
    let u = Float::sqrt(r64::<T>(2.0)) * x;
    let mut h = vec![T::zero(); dim];
    let quarter = r64::<T>(-0.25);
    let half = r64::<T>(0.5);
    h[0] = Float::powf(T::pi(), quarter) * Float::exp(-u * u * half);
    if dim > 1 {
        h[1] = u * Float::sqrt(r64::<T>(2.0)) * h[0];
    }
    for m in 2..dim {
        let mf = r64::<T>(m as f64);
        h[m] = u * Float::sqrt(r64::<T>(2.0) / mf) * h[m - 1]
            - Float::sqrt((mf - T::one()) / mf) * h[m - 2];
    }
    let scale = Float::powf(r64::<T>(2.0), r64::<T>(0.25));
    for v in h.iter_mut() {
        *v *= scale;
    }
    h
}

/// Quadrature distribution `p(x) = <x_theta|rho|x_theta>` sampled on `grid`.
///
/// The grid must span the state's support plus six vacuum standard
/// deviations; the samples integrate to one within 1e-6 by the trapezoid
/// rule when it does.
pub fn quadrature_distribution<T: Real>(
    rho: &DensityMatrix<T>,
    theta: T,
    grid: &Grid1<T>,
) -> Result<Vec<T>> {
    let (mean_n, _) = photon_number_moments(rho);
    let required = Float::sqrt(mean_n + T::one()) + r64::<T>(3.0);
    let half_width = Float::min(-grid.min(), grid.max());
    if half_width < required {
        return Err(CoreError::GridTooNarrow {
            half_width: to_f64(half_width),
            required: to_f64(required),
        });
    }
    let rot = rho.rotated_by_number_phase(theta);
    let d = rho.dim();
    let mut out = Vec::with_capacity(grid.len());
    for i in 0..grid.len() {
        let psi = quadrature_wavefunctions(d, grid.point(i));
        let mut acc = T::zero();
        for m in 0..d {
            let mut row = Complex::<T>::zero();
            for n in 0..d {
                row += rot[(m, n)] * Complex::new(psi[n], T::zero());
            }
            acc += (Complex::new(psi[m], T::zero()).conj() * row).re;
        }
        out.push(acc);
    }
    Ok(out)
}
