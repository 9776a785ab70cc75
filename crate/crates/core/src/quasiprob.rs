//! Quasi-probability representations: Husimi Q of states and classical
//! ensembles, plus a Fock-basis Wigner oracle.
//!
//! Normalization convention: every stored phase-space density integrates to
//! one over the plane, `int f(alpha) d^2alpha = 1` with `alpha = x + i y`.
//! The Husimi point value is `Q(alpha) = <alpha|rho|alpha> / pi`.

use num_complex::Complex;
use num_traits::{Float, Zero};

use crate::fock::{coherent_amplitudes, DensityMatrix, FockParams};
use crate::grid::Grid1;
use crate::two_mode::TwoModeState;
use crate::{eps, r64, to_f64, C, CMatrix, CoreError, Real, RMatrix, Result};

/// Sampled real field over a rectangular region of the complex plane.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSpaceField<T: Real> {
    x: Grid1<T>,
    y: Grid1<T>,
    values: RMatrix<T>,
}

impl<T: Real> PhaseSpaceField<T> {
    pub fn new(x: Grid1<T>, y: Grid1<T>, values: RMatrix<T>) -> Result<Self> {
        if values.nrows() != x.len() || values.ncols() != y.len() {
            return Err(CoreError::GridMismatch(format!(
                "field of {}x{} values on {}x{} grid",
                values.nrows(),
                values.ncols(),
                x.len(),
                y.len()
            )));
        }
        Ok(Self { x, y, values })
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

    /// Interior cell area `dx * dy`.
    pub fn cell_area(&self) -> T {
        self.x.step() * self.y.step()
    }

    /// Trapezoid mass `int f dx dy`.
    pub fn mass(&self) -> T {
        let mut acc = T::zero();
        for i in 0..self.x.len() {
            for j in 0..self.y.len() {
                acc += self.values[(i, j)] * self.x.weight(i) * self.y.weight(j);
            }
        }
        acc
    }

    pub fn min_value(&self) -> T {
        self.values
            .iter()
            .fold(T::infinity(), |a, &b| Float::min(a, b))
    }

    pub fn max_value(&self) -> T {
        self.values
            .iter()
            .fold(T::neg_infinity(), |a, &b| Float::max(a, b))
    }
}

/// Largest `|alpha|^2`-like argument the truncated coherent overlap accepts:
/// below both the scalar's underflow envelope and a dimension-relative cap.
fn max_alpha_sq_eff<T: Real>(dim: usize) -> T {
    let underflow_cap = -Float::ln(T::min_positive_value()) * r64(0.8);
    Float::min(underflow_cap, r64(25.0 + 5.0 * dim as f64))
}

/// Envelope where `exp(-|arg|^2 / 2)` stays clear of underflow.
fn underflow_cap<T: Real>() -> T {
    -Float::ln(T::min_positive_value()) * r64(0.8)
}

fn gate<T: Real>(alpha_sq_eff: T, cap: T, dim: usize) -> Result<()> {
    if alpha_sq_eff > cap {
        return Err(CoreError::OutsideConvergence {
            alpha_sq: to_f64(alpha_sq_eff),
            max_alpha_sq: to_f64(cap),
            dim,
        });
    }
    Ok(())
}

fn convergence_gate<T: Real>(alpha_sq_eff: T, dim: usize) -> Result<()> {
    gate(alpha_sq_eff, max_alpha_sq_eff::<T>(dim), dim)
}

/// Husimi Q at a point, `Q(alpha) = <alpha|rho|alpha> / pi`.
pub fn husimi_q_point<T: Real>(rho: &DensityMatrix<T>, alpha: C<T>) -> Result<T> {
    convergence_gate(alpha.norm_sqr(), rho.dim())?;
    let c = coherent_amplitudes(rho.dim(), alpha);
    let mut acc = Complex::<T>::zero();
    for m in 0..rho.dim() {
        for n in 0..rho.dim() {
            acc += c[m].conj() * rho.entry(m, n) * c[n];
        }
    }
    Ok(acc.re / T::pi())
}

/// Suggested half-width covering a state's phase-space support to roughly
/// 1e-6 mass: `3 + 2 sqrt(<n> + 1)`.
pub fn suggested_half_width<T: Real>(rho: &DensityMatrix<T>) -> T {
    let (mean_n, _) = crate::fock::photon_number_moments(rho);
    r64::<T>(3.0) + r64::<T>(2.0) * Float::sqrt(mean_n + T::one())
}

/// Husimi Q sampled on a grid; fails with the mass deficit when the grid does
/// not capture the state (trapezoid mass must be 1 within 1e-4).
pub fn husimi_q_grid<T: Real>(
    rho: &DensityMatrix<T>,
    x: Grid1<T>,
    y: Grid1<T>,
) -> Result<PhaseSpaceField<T>> {
    let corner_sq = {
        let mx = Float::max(Float::abs(x.min()), Float::abs(x.max()));
        let my = Float::max(Float::abs(y.min()), Float::abs(y.max()));
        mx * mx + my * my
    };
    convergence_gate(corner_sq, rho.dim())?;
    let spectral = rho.spectral(eps::<T>() * r64(10.0));
    let d = rho.dim();
    let inv_pi = T::one() / T::pi();
    let mut values = RMatrix::<T>::zeros(x.len(), y.len());
    for i in 0..x.len() {
        for j in 0..y.len() {
            let alpha = Complex::new(x.point(i), y.point(j));
            let c = coherent_amplitudes(d, alpha);
            let mut q = T::zero();
            for (ev, vec) in &spectral {
                let mut overlap = Complex::<T>::zero();
                for m in 0..d {
                    overlap += c[m].conj() * vec[m];
                }
                q += *ev * overlap.norm_sqr();
            }
            values[(i, j)] = q * inv_pi;
        }
    }
    let field = PhaseSpaceField::new(x, y, values)?;
    let mass = field.mass();
    let deficit = T::one() - mass;
    let tol = r64::<T>(1e-4);
    if Float::abs(deficit) > tol {
        return Err(CoreError::CoverageDeficit {
            mass: to_f64(mass),
            deficit: to_f64(deficit),
            tol: to_f64(tol),
        });
    }
    Ok(field)
}

/// Two-mode Husimi Q, `Q(a1, a2) = <a1, a2|rho|a1, a2> / pi^2`.
pub fn two_mode_husimi_q<T: Real>(
    state: &TwoModeState<T>,
    alpha1: C<T>,
    alpha2: C<T>,
) -> Result<T> {
    let d = state.dim_per_mode();
    convergence_gate(alpha1.norm_sqr(), d)?;
    convergence_gate(alpha2.norm_sqr(), d)?;
    let c1 = coherent_amplitudes(d, alpha1);
    let c2 = coherent_amplitudes(d, alpha2);
    let inv_pi2 = T::one() / (T::pi() * T::pi());
    if let Some(psi) = state.amplitudes() {
        let mut overlap = Complex::<T>::zero();
        for m1 in 0..d {
            for m2 in 0..d {
                overlap += c1[m1].conj() * c2[m2].conj() * psi[m1 * d + m2];
            }
        }
        Ok(overlap.norm_sqr() * inv_pi2)
    } else {
        let rho = state.density();
        let mut acc = Complex::<T>::zero();
        for m1 in 0..d {
            for m2 in 0..d {
                let bra = c1[m1].conj() * c2[m2].conj();
                for n1 in 0..d {
                    for n2 in 0..d {
                        let ket = c1[n1] * c2[n2];
                        acc += bra * rho[(m1 * d + m2, n1 * d + n2)] * ket;
                    }
                }
            }
        }
        Ok(acc.re * inv_pi2)
    }
}

/// Matrix elements `<n|D(beta)|m>` of the displacement operator, by the
/// stable row recurrence (all entries are bounded by one).
pub(crate) fn displacement_matrix<T: Real>(dim: usize, beta: C<T>) -> CMatrix<T> {
    let mut x = CMatrix::<T>::zeros(dim, dim);
    let half = r64::<T>(0.5);
    let e = Float::exp(-beta.norm_sqr() * half);
    x[(0, 0)] = Complex::new(e, T::zero());
    for m in 1..dim {
        let inv_sqrt_m = T::one() / Float::sqrt(r64::<T>(m as f64));
        x[(0, m)] = x[(0, m - 1)] * (-beta.conj()).scale(inv_sqrt_m);
    }
    for n in 0..dim - 1 {
        let inv_sqrt_n1 = T::one() / Float::sqrt(r64::<T>((n + 1) as f64));
        for m in 0..dim {
            let lower = if m > 0 {
                x[(n, m - 1)].scale(Float::sqrt(r64::<T>(m as f64)))
            } else {
                Complex::zero()
            };
            x[(n + 1, m)] = (lower + beta * x[(n, m)]).scale(inv_sqrt_n1);
        }
    }
    x
}

/// Wigner function by the displaced-parity closed form on the Fock basis,
/// `W(alpha) = (2/pi) tr[rho D(2 alpha) Pi]`. May be negative. Serves as the
/// independent ground truth for the inversion pipeline.
pub fn wigner_oracle<T: Real>(rho: &DensityMatrix<T>, alpha: C<T>) -> Result<T> {
    let d = rho.dim();
    let beta = alpha.scale(r64(2.0));
    // The displaced-parity recurrence is exact on the truncated state for any
    // displacement; only scalar underflow bounds the argument.
    gate(beta.norm_sqr(), underflow_cap::<T>(), d)?;
    let x = displacement_matrix(d, beta);
    let mut acc = Complex::<T>::zero();
    for m in 0..d {
        let sign = if m % 2 == 0 { T::one() } else { -T::one() };
        for n in 0..d {
            acc += rho.entry(m, n).scale(sign) * x[(n, m)];
        }
    }
    debug_assert!(
        Float::abs(acc.im) < r64(1e-9),
        "Wigner value must be real, imaginary residue {:?}",
        to_f64(acc.im)
    );
    Ok(acc.re * r64::<T>(2.0) / T::pi())
}

/// Wigner oracle sampled on a grid.
pub fn wigner_field<T: Real>(
    rho: &DensityMatrix<T>,
    x: Grid1<T>,
    y: Grid1<T>,
) -> Result<PhaseSpaceField<T>> {
    let mut values = RMatrix::<T>::zeros(x.len(), y.len());
    for i in 0..x.len() {
        for j in 0..y.len() {
            values[(i, j)] = wigner_oracle(rho, Complex::new(x.point(i), y.point(j)))?;
        }
    }
    PhaseSpaceField::new(x, y, values)
}

/// One component of a classical phase-space ensemble.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EnsembleComponent<T> {
    /// A single coherent point `|beta><beta|`.
    CoherentPoint(C<T>),
    /// Isotropic Gaussian of coherent states: mean `beta`, `variance` per
    /// real dimension of the phase-space weight.
    IsotropicGaussian { mean: C<T>, variance: T },
}

/// Mixture of coherent points and isotropic Gaussians — exactly the states
/// whose phase-space weight is nonnegative and no more singular than a delta.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalEnsemble<T: Real> {
    components: Vec<(T, EnsembleComponent<T>)>,
}

impl<T: Real> ClassicalEnsemble<T> {
    pub fn new(components: Vec<(T, EnsembleComponent<T>)>) -> Result<Self> {
        if components.is_empty() {
            return Err(CoreError::InvalidModel("empty ensemble".into()));
        }
        let mut total = T::zero();
        for (w, comp) in &components {
            if *w < T::zero() {
                return Err(CoreError::InvalidModel(
                    "ensemble weights must be nonnegative".into(),
                ));
            }
            if let EnsembleComponent::IsotropicGaussian { variance, .. } = comp {
                if *variance < T::zero() {
                    return Err(CoreError::InvalidModel(
                        "Gaussian component variance must be nonnegative".into(),
                    ));
                }
            }
            total += *w;
        }
        if Float::abs(total - T::one()) > r64(1e-12) {
            return Err(CoreError::InvalidModel(format!(
                "ensemble weights sum to {}, expected 1",
                to_f64(total)
            )));
        }
        Ok(Self { components })
    }

    pub fn single_point(beta: C<T>) -> Self {
        Self {
            components: vec![(T::one(), EnsembleComponent::CoherentPoint(beta))],
        }
    }

    /// Thermal state with mean photon number `nbar` as a Gaussian ensemble
    /// (variance `nbar / 2` per real dimension).
    pub fn thermal(nbar: T) -> Self {
        Self {
            components: vec![(
                T::one(),
                EnsembleComponent::IsotropicGaussian {
                    mean: Complex::zero(),
                    variance: nbar * r64(0.5),
                },
            )],
        }
    }

    pub fn components(&self) -> &[(T, EnsembleComponent<T>)] {
        &self.components
    }

    /// Equivalent density matrix on a truncated basis: coherent projectors
    /// for points, displaced thermal states for Gaussians.
    pub fn to_density_matrix(&self, params: FockParams<T>) -> Result<DensityMatrix<T>> {
        let dim = params.dim();
        let mut acc = CMatrix::<T>::zeros(dim, dim);
        for (w, comp) in &self.components {
            let part = match comp {
                EnsembleComponent::CoherentPoint(beta) => crate::fock::make_coherent_state(*beta, params)?
                    .matrix()
                    .clone(),
                EnsembleComponent::IsotropicGaussian { mean, variance } => {
                    let nbar = *variance * r64(2.0);
                    let thermal = crate::fock::make_thermal_state(nbar, params)?;
                    if mean.norm_sqr() == T::zero() {
                        thermal.matrix().clone()
                    } else {
                        let disp = displacement_matrix(dim, *mean);
                        &disp * thermal.matrix() * disp.adjoint()
                    }
                }
            };
            acc += part * Complex::new(*w, T::zero());
        }
        // Displacement on the truncated space slightly leaks trace; fold it
        // back and gate on the edge weight.
        let tr: T = acc.diagonal().iter().map(|c| c.re).sum();
        acc /= Complex::new(tr, T::zero());
        let rho = DensityMatrix::from_matrix(acc)?;
        if rho.edge_occupation() > params.tail_tol() {
            return Err(CoreError::TailTooHeavy {
                tail: to_f64(rho.edge_occupation()),
                tol: to_f64(params.tail_tol()),
                required_dim: 2 * dim,
            });
        }
        Ok(rho)
    }
}

/// Husimi Q of a classical ensemble, in closed form (each component's Q is a
/// Gaussian of variance `component variance + 1/2` per real dimension).
pub fn q_from_classical_ensemble<T: Real>(ens: &ClassicalEnsemble<T>, alpha: C<T>) -> T {
    let mut acc = T::zero();
    for (w, comp) in ens.components() {
        let (mean, v) = match comp {
            EnsembleComponent::CoherentPoint(beta) => (*beta, T::zero()),
            EnsembleComponent::IsotropicGaussian { mean, variance } => (*mean, *variance),
        };
        let s = r64::<T>(2.0) * v + T::one();
        let d2 = (alpha - mean).norm_sqr();
        acc += *w * Float::exp(-d2 / s) / (T::pi() * s);
    }
    acc
}
