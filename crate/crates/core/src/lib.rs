//! Quantum versus classical-detector statistics in truncated Fock space.
//!
//! The library computes, for canonical quantum-optics experiments, both the
//! exact quantum statistics and the statistics a *classical-like* detector
//! would record, plus the joint-measurement inversion machinery that witnesses
//! nonclassicality as negativity in an inferred joint distribution.
//!
//! Modules map to the pipeline stages:
//!
//! - [`fock`]: states and operators on a truncated Fock basis; the exact
//!   quantum reference side of every comparison.
//! - [`quasiprob`]: Husimi Q of states and classical ensembles, and a
//!   Wigner-function oracle.
//! - [`detectors`]: classical-like (semiquantum) photodetection and
//!   quadrature models, evaluated by two independent routes.
//! - [`inversion`]: state-independent inversion kernels, the classical
//!   separability closure, and the heterodyne-to-Wigner deconvolution.
//!
//! All numerics are generic over the scalar type through the [`Real`] trait
//! (`f32` or `f64`); concrete `f64` aliases live at the crate root.

pub mod detectors;
pub mod error;
pub mod fock;
pub mod grid;
pub mod inversion;
pub mod quasiprob;
pub mod two_mode;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

pub use error::{CoreError, Result};

/// Scalar types the numerical core is generic over.
///
/// `f32` and `f64` satisfy every bound. The union of `nalgebra::RealField`
/// and `num_traits::Float` makes some method calls ambiguous; generic code in
/// this crate disambiguates with `Float::...` at the call site.
pub trait Real:
    nalgebra::RealField
    + num_traits::Float
    + num_traits::FloatConst
    + num_traits::FromPrimitive
    + num_traits::ToPrimitive
    + rustfft::FftNum
    + std::iter::Sum
    + Default
{
}

impl<T> Real for T where
    T: nalgebra::RealField
        + num_traits::Float
        + num_traits::FloatConst
        + num_traits::FromPrimitive
        + num_traits::ToPrimitive
        + rustfft::FftNum
        + std::iter::Sum
        + Default
{
}

/// Complex scalar over `T`.
pub type C<T> = Complex<T>;
/// Dense complex matrix.
pub type CMatrix<T> = DMatrix<Complex<T>>;
/// Dense complex vector.
pub type CVector<T> = DVector<Complex<T>>;
/// Dense real matrix.
pub type RMatrix<T> = DMatrix<T>;
/// Dense real vector.
pub type RVector<T> = DVector<T>;

/// Converts an `f64` constant into the working scalar.
#[inline]
pub(crate) fn r64<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("f64 constant must convert into the scalar type")
}

/// Scalar as `f64` for diagnostics and error payloads.
#[inline]
pub(crate) fn to_f64<T: Real>(x: T) -> f64 {
    num_traits::ToPrimitive::to_f64(&x).unwrap_or(f64::NAN)
}

/// Machine epsilon of the working scalar.
#[inline]
pub(crate) fn eps<T: Real>() -> T {
    <T as num_traits::Float>::epsilon()
}

pub type DensityMatrix64 = fock::DensityMatrix<f64>;
pub type FockParams64 = fock::FockParams<f64>;
pub type ModeOperators64 = fock::ModeOperators<f64>;
pub type TwoModeState64 = two_mode::TwoModeState<f64>;
pub type BeamSplitterParams64 = two_mode::BeamSplitterParams<f64>;
pub type PhaseSpaceField64 = quasiprob::PhaseSpaceField<f64>;
pub type ClassicalEnsemble64 = quasiprob::ClassicalEnsemble<f64>;
pub type DetectorModel64 = detectors::DetectorModel<f64>;
pub type SignedJointDistribution64 = inversion::SignedJointDistribution<f64>;
pub type MuKernel64 = inversion::MuKernel<f64>;
pub type ClassicalJointModel64 = inversion::ClassicalJointModel<f64>;
