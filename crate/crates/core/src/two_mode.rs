//! Two-mode states on a tensor product of truncated Fock spaces and the
//! lossless beam-splitter transform.
//!
//! The beam splitter conserves total photon number, so it acts blockwise on
//! subspaces of fixed `N = m1 + m2`. Blocks with `N <= dim_per_mode - 1` are
//! complete on the truncated space and the transform is exact there; inputs
//! with weight on higher blocks are rejected rather than silently truncated.

use num_complex::Complex;
use num_traits::{Float, Zero};

use crate::{r64, to_f64, CMatrix, CVector, CoreError, Real, RMatrix, Result};

/// Beam-splitter parameters with `T + R = 1`.
///
/// Convention: `a_out = sqrt(T) a + i e^{i phase} sqrt(R) b` and symmetrically
/// for the second mode. Phase-averaged classical statistics are independent of
/// `phase`, which the test suite asserts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamSplitterParams<T> {
    transmission: T,
    reflection: T,
    phase: T,
}

impl<T: Real> BeamSplitterParams<T> {
    pub fn new(transmission: T, reflection: T, phase: T) -> Result<Self> {
        if transmission < T::zero() || transmission > T::one() {
            return Err(CoreError::InvalidState(format!(
                "transmission must lie in [0, 1], got {}",
                to_f64(transmission)
            )));
        }
        let closure = Float::abs(transmission + reflection - T::one());
        let tol = Float::max(r64(1e-12), crate::eps::<T>() * r64(100.0));
        if closure > tol {
            return Err(CoreError::InvalidState(format!(
                "T + R = {} deviates from 1",
                to_f64(transmission + reflection)
            )));
        }
        Ok(Self {
            transmission,
            reflection: T::one() - transmission,
            phase,
        })
    }

    pub fn balanced() -> Self {
        let half = r64::<T>(0.5);
        Self {
            transmission: half,
            reflection: half,
            phase: T::zero(),
        }
    }

    pub fn from_transmission(transmission: T) -> Result<Self> {
        Self::new(transmission, T::one() - transmission, T::zero())
    }

    pub fn transmission(&self) -> T {
        self.transmission
    }

    pub fn reflection(&self) -> T {
        self.reflection
    }

    pub fn phase(&self) -> T {
        self.phase
    }

    /// Same splitter with transmission and reflection exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            transmission: self.reflection,
            reflection: self.transmission,
            phase: self.phase,
        }
    }

    /// Mixing angle `theta` with `cos(theta) = sqrt(T)`.
    fn mixing_angle(&self) -> T {
        Float::atan2(
            Float::sqrt(self.reflection),
            Float::sqrt(self.transmission),
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
enum TwoModeKind<T: Real> {
    Pure(CVector<T>),
    Mixed(CMatrix<T>),
}

/// State of two modes over the basis `|m1> (x) |m2>`, flattened as
/// `index = m1 * dim_per_mode + m2`. Pure states keep the amplitude vector
/// as a fast path; mixed states store the full density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoModeState<T: Real> {
    dim_per_mode: usize,
    kind: TwoModeKind<T>,
}

impl<T: Real> TwoModeState<T> {
    fn norm_tol() -> T {
        Float::max(r64(1e-10), crate::eps::<T>() * r64(1e4))
    }

    /// Product number state `|m1, m2>`.
    pub fn from_fock_pair(m1: usize, m2: usize, dim_per_mode: usize) -> Result<Self> {
        if dim_per_mode < 2 {
            return Err(CoreError::InvalidState(
                "per-mode dimension must be at least 2".into(),
            ));
        }
        for m in [m1, m2] {
            if m >= dim_per_mode {
                return Err(CoreError::IndexOutsideBasis {
                    index: m,
                    dim: dim_per_mode,
                });
            }
        }
        let mut v = CVector::<T>::zeros(dim_per_mode * dim_per_mode);
        v[m1 * dim_per_mode + m2] = Complex::new(T::one(), T::zero());
        Ok(Self {
            dim_per_mode,
            kind: TwoModeKind::Pure(v),
        })
    }

    /// Pure state from flattened amplitudes (must be normalized).
    pub fn pure_from_amplitudes(dim_per_mode: usize, amplitudes: CVector<T>) -> Result<Self> {
        if amplitudes.len() != dim_per_mode * dim_per_mode {
            return Err(CoreError::InvalidState(format!(
                "amplitude vector length {} does not match dim^2 = {}",
                amplitudes.len(),
                dim_per_mode * dim_per_mode
            )));
        }
        let norm_sq: T = amplitudes.iter().map(|c| c.norm_sqr()).sum();
        if Float::abs(norm_sq - T::one()) > Self::norm_tol() {
            return Err(CoreError::InvalidState(format!(
                "two-mode norm^2 = {} deviates from 1",
                to_f64(norm_sq)
            )));
        }
        Ok(Self {
            dim_per_mode,
            kind: TwoModeKind::Pure(amplitudes),
        })
    }

    /// Mixed state from a flattened density matrix.
    pub fn mixed_from_matrix(dim_per_mode: usize, matrix: CMatrix<T>) -> Result<Self> {
        let n = dim_per_mode * dim_per_mode;
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(CoreError::InvalidState(format!(
                "density matrix must be {n}x{n} for per-mode dimension {dim_per_mode}"
            )));
        }
        let mut herm = T::zero();
        for i in 0..n {
            for j in 0..n {
                herm = Float::max(herm, (matrix[(i, j)] - matrix[(j, i)].conj()).norm());
            }
        }
        if herm > Float::max(r64(1e-12), crate::eps::<T>() * r64(100.0)) {
            return Err(CoreError::InvalidState(format!(
                "two-mode density matrix not Hermitian: {:.3e}",
                to_f64(herm)
            )));
        }
        let tr: T = matrix.diagonal().iter().map(|c| c.re).sum();
        if Float::abs(tr - T::one()) > Self::norm_tol() {
            return Err(CoreError::InvalidState(format!(
                "two-mode trace = {} deviates from 1",
                to_f64(tr)
            )));
        }
        let eig = matrix.clone().symmetric_eigen();
        for ev in eig.eigenvalues.iter() {
            if *ev < -Self::norm_tol() {
                return Err(CoreError::InvalidState(format!(
                    "two-mode density matrix has negative eigenvalue {:.3e}",
                    to_f64(*ev)
                )));
            }
        }
        Ok(Self {
            dim_per_mode,
            kind: TwoModeKind::Mixed(matrix),
        })
    }

    pub fn dim_per_mode(&self) -> usize {
        self.dim_per_mode
    }

    pub fn is_pure(&self) -> bool {
        matches!(self.kind, TwoModeKind::Pure(_))
    }

    pub(crate) fn index(&self, m1: usize, m2: usize) -> usize {
        m1 * self.dim_per_mode + m2
    }

    /// Pure amplitudes, if this is a pure state.
    pub fn amplitudes(&self) -> Option<&CVector<T>> {
        match &self.kind {
            TwoModeKind::Pure(v) => Some(v),
            TwoModeKind::Mixed(_) => None,
        }
    }

    /// Full density matrix (outer product for pure states).
    pub fn density(&self) -> CMatrix<T> {
        match &self.kind {
            TwoModeKind::Pure(v) => {
                let n = v.len();
                CMatrix::from_fn(n, n, |i, j| v[i] * v[j].conj())
            }
            TwoModeKind::Mixed(m) => m.clone(),
        }
    }

    /// Joint photon-number distribution `p(m1, m2)`.
    pub fn joint_number_distribution(&self) -> RMatrix<T> {
        let d = self.dim_per_mode;
        RMatrix::from_fn(d, d, |m1, m2| match &self.kind {
            TwoModeKind::Pure(v) => v[self.index(m1, m2)].norm_sqr(),
            TwoModeKind::Mixed(m) => m[(self.index(m1, m2), self.index(m1, m2))].re,
        })
    }

    /// Distribution of the total photon number `N = m1 + m2`.
    pub fn total_number_distribution(&self) -> Vec<T> {
        let d = self.dim_per_mode;
        let joint = self.joint_number_distribution();
        let mut out = vec![T::zero(); 2 * d - 1];
        for m1 in 0..d {
            for m2 in 0..d {
                out[m1 + m2] += joint[(m1, m2)];
            }
        }
        out
    }

    /// Exact `<n1 n2>` on the truncated space.
    pub fn mean_number_product(&self) -> T {
        let joint = self.joint_number_distribution();
        let d = self.dim_per_mode;
        let mut acc = T::zero();
        for m1 in 0..d {
            for m2 in 0..d {
                acc += r64::<T>((m1 * m2) as f64) * joint[(m1, m2)];
            }
        }
        acc
    }

    /// Marginal photon-number distribution of one mode (0 or 1).
    pub fn mode_marginal_distribution(&self, mode: usize) -> Vec<T> {
        assert!(mode < 2, "mode index must be 0 or 1");
        let d = self.dim_per_mode;
        let joint = self.joint_number_distribution();
        let mut out = vec![T::zero(); d];
        for m1 in 0..d {
            for m2 in 0..d {
                let k = if mode == 0 { m1 } else { m2 };
                out[k] += joint[(m1, m2)];
            }
        }
        out
    }

    /// Weight on total-number blocks that are incomplete on the truncated
    /// space (`N > dim_per_mode - 1`).
    fn weight_above_complete_blocks(&self) -> T {
        let d = self.dim_per_mode;
        let total = self.total_number_distribution();
        total
            .iter()
            .enumerate()
            .filter(|(n, _)| *n > d - 1)
            .map(|(_, w)| *w)
            .fold(T::zero(), |a, b| a + b)
    }
}

/// Unitary of the fixed-total-number block `N` (size `N + 1`), acting on the
/// basis `|m, N - m>` ordered by `m`.
fn block_unitary<T: Real>(n_total: usize, theta: T, phase: T) -> CMatrix<T> {
    let size = n_total + 1;
    let mut h = RMatrix::<T>::zeros(size, size);
    for m in 0..n_total {
        let c = Float::sqrt(r64::<T>(((m + 1) * (n_total - m)) as f64));
        h[(m, m + 1)] = c;
        h[(m + 1, m)] = c;
    }
    let eig = h.symmetric_eigen();
    let v = &eig.eigenvectors;
    let mut u = CMatrix::<T>::zeros(size, size);
    for j in 0..size {
        for k in 0..size {
            let mut acc = Complex::<T>::zero();
            for l in 0..size {
                let rot = Complex::from_polar(T::one(), theta * eig.eigenvalues[l]);
                acc += rot * Complex::new(v[(j, l)] * v[(k, l)], T::zero());
            }
            // gauge that carries the splitter phase
            let jk = r64::<T>(j as f64) - r64::<T>(k as f64);
            u[(j, k)] = acc * Complex::from_polar(T::one(), -jk * phase);
        }
    }
    u
}

/// Applies the lossless beam splitter to a two-mode state.
///
/// Photon number is conserved: the total-number distribution of the output
/// equals the input's within roundoff.
pub fn apply_beam_splitter<T: Real>(
    input: &TwoModeState<T>,
    bs: &BeamSplitterParams<T>,
) -> Result<TwoModeState<T>> {
    let d = input.dim_per_mode();
    let stray = input.weight_above_complete_blocks();
    let tol = Float::max(r64(1e-12), crate::eps::<T>() * r64(100.0));
    if stray > tol {
        return Err(CoreError::TailTooHeavy {
            tail: to_f64(stray),
            tol: to_f64(tol),
            required_dim: 2 * d,
        });
    }
    let theta = bs.mixing_angle();
    let blocks: Vec<CMatrix<T>> = (0..d)
        .map(|n| block_unitary(n, theta, bs.phase()))
        .collect();

    match &input.kind {
        TwoModeKind::Pure(psi) => {
            let mut out = CVector::<T>::zeros(d * d);
            for (n, u) in blocks.iter().enumerate() {
                for m_out in 0..=n {
                    let mut acc = Complex::<T>::zero();
                    for m_in in 0..=n {
                        acc += u[(m_out, m_in)] * psi[input.index(m_in, n - m_in)];
                    }
                    out[input.index(m_out, n - m_out)] = acc;
                }
            }
            Ok(TwoModeState {
                dim_per_mode: d,
                kind: TwoModeKind::Pure(out),
            })
        }
        TwoModeKind::Mixed(rho) => {
            // Assemble the full unitary (identity outside complete blocks;
            // those states carry no weight after the gate above).
            let n2 = d * d;
            let mut u_full = CMatrix::<T>::identity(n2, n2);
            for (n, u) in blocks.iter().enumerate() {
                for m_out in 0..=n {
                    for m_in in 0..=n {
                        let row = input.index(m_out, n - m_out);
                        let col = input.index(m_in, n - m_in);
                        u_full[(row, col)] = u[(m_out, m_in)];
                    }
                }
            }
            let out = &u_full * rho * u_full.adjoint();
            Ok(TwoModeState {
                dim_per_mode: d,
                kind: TwoModeKind::Mixed(out),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn transparent_splitter_is_identity() {
        let input = TwoModeState::<f64>::from_fock_pair(1, 0, 4).unwrap();
        let bs = BeamSplitterParams::from_transmission(1.0).unwrap();
        let out = apply_beam_splitter(&input, &bs).unwrap();
        let p = out.joint_number_distribution();
        assert_relative_eq!(p[(1, 0)], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn single_photon_balanced_splitter() {
        // Hand-computed 2x2 unitary: |1,0> -> (1/sqrt2)|1,0> + (i/sqrt2)|0,1>.
        let input = TwoModeState::<f64>::from_fock_pair(1, 0, 4).unwrap();
        let out = apply_beam_splitter(&input, &BeamSplitterParams::balanced()).unwrap();
        let amps = out.amplitudes().unwrap();
        let a10 = amps[out.index(1, 0)];
        let a01 = amps[out.index(0, 1)];
        assert_relative_eq!(a10.re, std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-12);
        assert_relative_eq!(a10.im, 0.0, epsilon = 1e-12);
        assert_relative_eq!(a01.im, std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-12);
        assert_relative_eq!(a01.re, 0.0, epsilon = 1e-12);
        let p = out.joint_number_distribution();
        assert_relative_eq!(p[(1, 0)], 0.5, epsilon = 1e-12);
        assert_relative_eq!(p[(0, 1)], 0.5, epsilon = 1e-12);
    }

    #[test]
    fn hong_ou_mandel_coincidences_vanish() {
        let input = TwoModeState::<f64>::from_fock_pair(1, 1, 6).unwrap();
        let out = apply_beam_splitter(&input, &BeamSplitterParams::balanced()).unwrap();
        let p = out.joint_number_distribution();
        assert!(p[(1, 1)] < 1e-24);
        assert_relative_eq!(p[(2, 0)], 0.5, epsilon = 1e-12);
        assert_relative_eq!(p[(0, 2)], 0.5, epsilon = 1e-12);
        assert!(out.mean_number_product() < 1e-12);
    }

    #[test]
    fn rejects_incomplete_blocks() {
        let input = TwoModeState::<f64>::from_fock_pair(3, 3, 4).unwrap();
        let bs = BeamSplitterParams::balanced();
        assert!(matches!(
            apply_beam_splitter(&input, &bs),
            Err(CoreError::TailTooHeavy { .. })
        ));
    }

    #[test]
    fn rejects_non_closing_coefficients() {
        assert!(BeamSplitterParams::new(0.6, 0.5, 0.0).is_err());
        assert!(BeamSplitterParams::new(1.2, -0.2, 0.0).is_err());
    }

    fn random_blockwise_state(rng: &mut ChaCha8Rng, d: usize) -> TwoModeState<f64> {
        let mut v = CVector::<f64>::zeros(d * d);
        for m1 in 0..d {
            for m2 in 0..d {
                if m1 + m2 < d {
                    v[m1 * d + m2] = Complex::new(
                        rng.random::<f64>() - 0.5,
                        rng.random::<f64>() - 0.5,
                    );
                }
            }
        }
        let norm: f64 = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        v /= Complex::new(norm, 0.0);
        TwoModeState::pure_from_amplitudes(d, v).unwrap()
    }

    #[test]
    fn unitarity_and_number_conservation_on_random_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..40 {
            let d = 2 + (rng.random::<u32>() % 5) as usize;
            let state = random_blockwise_state(&mut rng, d);
            let t: f64 = rng.random();
            let phase: f64 = rng.random::<f64>() * std::f64::consts::TAU;
            let bs = BeamSplitterParams::new(t, 1.0 - t, phase).unwrap();
            let out = apply_beam_splitter(&state, &bs).unwrap();
            let norm: f64 = out.amplitudes().unwrap().iter().map(|c| c.norm_sqr()).sum();
            assert_relative_eq!(norm, 1.0, epsilon = 1e-12);
            let before = state.total_number_distribution();
            let after = out.total_number_distribution();
            for (b, a) in before.iter().zip(after.iter()) {
                assert_relative_eq!(b, a, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn mixed_path_matches_pure_path() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let d = 4;
        let state = random_blockwise_state(&mut rng, d);
        let mixed = TwoModeState::mixed_from_matrix(d, state.density()).unwrap();
        let bs = BeamSplitterParams::new(0.3, 0.7, 0.4).unwrap();
        let out_pure = apply_beam_splitter(&state, &bs).unwrap();
        let out_mixed = apply_beam_splitter(&mixed, &bs).unwrap();
        let p1 = out_pure.joint_number_distribution();
        let p2 = out_mixed.joint_number_distribution();
        for m1 in 0..d {
            for m2 in 0..d {
                assert_relative_eq!(p1[(m1, m2)], p2[(m1, m2)], epsilon = 1e-12);
            }
        }
    }
}
