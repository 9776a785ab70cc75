//! Uniform grids and trapezoid quadrature.

use num_traits::Float;

use crate::{r64, to_f64, CoreError, Real, Result, RVector};

/// Uniform 1-D grid of `n >= 2` points spanning `[min, max]` inclusive.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid1<T> {
    min: T,
    max: T,
    n: usize,
}

impl<T: Real> Grid1<T> {
    pub fn new(min: T, max: T, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(CoreError::InvalidState(format!(
                "grid needs at least 2 points, got {n}"
            )));
        }
        if min >= max || !Float::is_finite(min) || !Float::is_finite(max) {
            return Err(CoreError::InvalidState(format!(
                "grid range [{}, {}] must be finite and increasing",
                to_f64(min),
                to_f64(max)
            )));
        }
        Ok(Self { min, max, n })
    }

    /// Symmetric grid `[-half_width, half_width]` with the given step,
    /// adjusted so the point count is odd and zero is a grid point.
    pub fn symmetric(half_width: T, step: T) -> Result<Self> {
        let m = Float::ceil(to_raw(half_width / step)) as usize;
        let m = m.max(1);
        let hw = step * r64::<T>(m as f64);
        Self::new(-hw, hw, 2 * m + 1)
    }

    /// Grid `[0, max]` with the given step (point count rounded up).
    pub fn from_zero(max: T, step: T) -> Result<Self> {
        let m = (Float::ceil(to_raw(max / step)) as usize).max(1);
        Self::new(T::zero(), step * r64::<T>(m as f64), m + 1)
    }

    pub fn min(&self) -> T {
        self.min
    }

    pub fn max(&self) -> T {
        self.max
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn step(&self) -> T {
        (self.max - self.min) / r64::<T>((self.n - 1) as f64)
    }

    pub fn point(&self, i: usize) -> T {
        debug_assert!(i < self.n);
        self.min + self.step() * r64::<T>(i as f64)
    }

    pub fn points(&self) -> Vec<T> {
        (0..self.n).map(|i| self.point(i)).collect()
    }

    /// Trapezoid weight of point `i` (step size, halved at the ends).
    pub fn weight(&self, i: usize) -> T {
        let h = self.step();
        if i == 0 || i + 1 == self.n {
            h * r64::<T>(0.5)
        } else {
            h
        }
    }

    /// Trapezoid rule over sampled values.
    pub fn integrate(&self, values: &[T]) -> T {
        assert_eq!(values.len(), self.n, "sample count must match grid");
        let mut acc = T::zero();
        for (i, &v) in values.iter().enumerate() {
            acc += v * self.weight(i);
        }
        acc
    }

    /// Trapezoid rule over `f(x_i) * values[i]`.
    pub fn integrate_weighted(&self, values: &[T], f: impl Fn(T) -> T) -> T {
        assert_eq!(values.len(), self.n);
        let mut acc = T::zero();
        for (i, &v) in values.iter().enumerate() {
            acc += f(self.point(i)) * v * self.weight(i);
        }
        acc
    }

    /// First two moments of a sampled density: `(mass, mean, second_moment)`.
    pub fn density_moments(&self, values: &[T]) -> (T, T, T) {
        let mass = self.integrate(values);
        let mean = self.integrate_weighted(values, |x| x);
        let second = self.integrate_weighted(values, |x| x * x);
        (mass, mean, second)
    }

    pub fn same_as(&self, other: &Self, tol: T) -> bool {
        self.n == other.n
            && Float::abs(self.min - other.min) <= tol
            && Float::abs(self.max - other.max) <= tol
    }

    pub fn require_same(&self, other: &Self, what: &str) -> Result<()> {
        if self.same_as(other, self.step() * r64::<T>(1e-9)) {
            Ok(())
        } else {
            Err(CoreError::GridMismatch(format!(
                "{what}: [{}, {}] x{} vs [{}, {}] x{}",
                to_f64(self.min),
                to_f64(self.max),
                self.n,
                to_f64(other.min),
                to_f64(other.max),
                other.n
            )))
        }
    }

    pub fn weights_vector(&self) -> RVector<T> {
        RVector::from_fn(self.n, |i, _| self.weight(i))
    }
}

fn to_raw<T: Real>(x: T) -> f64 {
    to_f64(x)
}
