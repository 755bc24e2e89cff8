use std::ops::Deref;

use crate::error::{Error, Result};
use crate::linalg::{
    eig_hermitian, is_psd, psd_sqrt, rank_eps, vec_norm, ComplexMatrix, HermitianMatrix, C64,
};

use super::pauli::{partial_transpose_1, sigma_tau};

/// Trace tolerance for a valid state.
pub const TRACE_TOL: f64 = 1e-10;
/// Positivity tolerance for a valid state, relative to `max(1, ‖ρ‖_F)`.
pub const PSD_TOL: f64 = 1e-9;
/// Relative eigenvalue cut used for rank decisions.
pub const RANK_EPS: f64 = 1e-9;

/// Unit vector in the computational basis `|00⟩, |01⟩, |10⟩, |11⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState([C64; 4]);

impl PureState {
    pub fn new(amplitudes: [C64; 4]) -> Result<Self> {
        let n = vec_norm(&amplitudes);
        if !n.is_finite() || (n - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidState(format!("pure state norm {n}")));
        }
        Ok(Self(amplitudes))
    }

    /// Normalizes any nonzero vector.
    pub fn normalize(v: &[C64]) -> Result<Self> {
        if v.len() != 4 {
            return Err(Error::DimMismatch { expected: 4, got: v.len() });
        }
        let n = vec_norm(v);
        if !(n > 1e-300) || !n.is_finite() {
            return Err(Error::InvalidState("zero or non-finite vector".into()));
        }
        Ok(Self([v[0] / n, v[1] / n, v[2] / n, v[3] / n]))
    }

    pub fn amplitudes(&self) -> &[C64; 4] {
        &self.0
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.0
    }

    pub fn projector(&self) -> HermitianMatrix {
        HermitianMatrix::projector(&self.0)
    }

    /// Multiplies by the global phase that makes the largest-magnitude
    /// amplitude (first one on ties) real and positive.
    pub fn phase_fixed(&self) -> Self {
        let mut best = 0;
        for k in 1..4 {
            if self.0[k].norm() > self.0[best].norm() {
                best = k;
            }
        }
        let a = self.0[best];
        let phase = if a.norm() > 0.0 { a.conj() / a.norm() } else { C64::new(1.0, 0.0) };
        Self(self.0.map(|z| z * phase))
    }

    /// `(U ⊗ …)|ψ⟩` for a 4×4 `U`.
    pub fn transformed(&self, u: &ComplexMatrix) -> Self {
        let v = u.matvec(&self.0);
        Self([v[0], v[1], v[2], v[3]])
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &PureState) -> f64 {
        crate::linalg::inner(&self.0, &other.0).norm_sqr()
    }
}

/// A two-qubit density matrix: 4×4, Hermitian, unit trace, positive semidefinite.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix(HermitianMatrix);

impl DensityMatrix {
    pub fn new(mat: HermitianMatrix) -> Result<Self> {
        if mat.dim() != 4 {
            return Err(Error::DimMismatch { expected: 4, got: mat.dim() });
        }
        let tr = mat.trace().re;
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} is not 1")));
        }
        if !is_psd(&mat, PSD_TOL)? {
            let min = eig_hermitian(&mat)?.min();
            return Err(Error::InvalidState(format!("not positive semidefinite (min eigenvalue {min:e})")));
        }
        Ok(Self(mat))
    }

    /// Rescales a nonzero PSD matrix to unit trace before validating.
    pub fn from_unnormalized(mat: &HermitianMatrix) -> Result<Self> {
        let tr = mat.trace().re;
        if !(tr > 0.0) {
            return Err(Error::InvalidState("non-positive trace".into()));
        }
        Self::new(mat.scale(1.0 / tr))
    }

    pub fn from_pure(psi: &PureState) -> Self {
        Self(psi.projector())
    }

    pub fn matrix(&self) -> &HermitianMatrix {
        &self.0
    }

    pub fn rank(&self) -> Result<usize> {
        rank_eps(&self.0, RANK_EPS)
    }

    /// `(u⊗v)·ρ·(u⊗v)†` for a 4×4 unitary `u⊗v`.
    pub fn conjugated(&self, u: &ComplexMatrix) -> Self {
        Self(self.0.conjugate_by(u))
    }
}

impl Deref for DensityMatrix {
    type Target = HermitianMatrix;
    fn deref(&self) -> &HermitianMatrix {
        &self.0
    }
}

/// Peres-Horodecki test; for two qubits this decides separability.
pub fn is_ppt(rho: &DensityMatrix, tol: f64) -> Result<bool> {
    is_psd(&partial_transpose_1(rho), tol)
}

/// Pure-state concurrence `|⟨ψ*|σ_2⊗σ_2|ψ⟩| = 2|ad − bc|`.
pub fn concurrence(psi: &PureState) -> f64 {
    let [a, b, c, d] = psi.0;
    (2.0 * (a * d - b * c).norm()).min(1.0)
}

/// Spin-flipped state `(σ_2⊗σ_2)·ρ*·(σ_2⊗σ_2)`.
pub fn spin_flip(rho: &HermitianMatrix) -> HermitianMatrix {
    let yy = sigma_tau(2, 2);
    HermitianMatrix::hermitize(&rho.conj()).conjugate_by(&yy)
}

/// Wootters concurrence `max{0, λ₁−λ₂−λ₃−λ₄}` with `λ_k` the decreasing
/// square roots of the eigenvalues of `ρ·ρ̃`.
pub fn concurrence_mixed(rho: &DensityMatrix) -> Result<f64> {
    let sq = psd_sqrt(rho)?;
    let flipped = spin_flip(rho);
    let r = HermitianMatrix::hermitize(&(&(&*sq * &*flipped) * &*sq));
    let mut lam: Vec<f64> = eig_hermitian(&r)?.values.iter().map(|l| l.max(0.0).sqrt()).collect();
    lam.reverse();
    Ok((lam[0] - lam[1] - lam[2] - lam[3]).clamp(0.0, 1.0))
}

/// Unit vector spanning the kernel of a rank-3 state, phase-fixed.
pub fn orthogonal_pure_state(rho: &DensityMatrix) -> Result<PureState> {
    let rank = rho.rank()?;
    if rank != 3 {
        return Err(Error::RankMismatch { expected: 3, got: rank });
    }
    let spec = eig_hermitian(rho)?;
    Ok(PureState::normalize(&spec.vector(0))?.phase_fixed())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{ONE, ZERO};
    use crate::two_qubit::generators::{random_density, werner_state};
    use std::f64::consts::FRAC_1_SQRT_2;

    fn phi_plus() -> PureState {
        let s = C64::new(FRAC_1_SQRT_2, 0.0);
        PureState::new([s, ZERO, ZERO, s]).unwrap()
    }

    fn psi_plus() -> PureState {
        let s = C64::new(0.0, FRAC_1_SQRT_2);
        PureState::new([ZERO, s, s, ZERO]).unwrap()
    }

    #[test]
    fn maximally_mixed_is_ppt() {
        let rho = DensityMatrix::new(HermitianMatrix::identity(4).scale(0.25)).unwrap();
        assert!(is_ppt(&rho, 1e-9).unwrap());
    }

    #[test]
    fn bell_projectors_are_not_ppt() {
        for psi in [phi_plus(), psi_plus()] {
            assert!(!is_ppt(&DensityMatrix::from_pure(&psi), 1e-9).unwrap());
        }
    }

    #[test]
    fn werner_boundary_is_ppt() {
        assert!(is_ppt(&werner_state(1.0 / 3.0).unwrap(), 1e-9).unwrap());
        assert!(!is_ppt(&werner_state(1.0 / 3.0 + 1e-6).unwrap(), 1e-9).unwrap());
    }

    #[test]
    fn pure_concurrences() {
        assert!((concurrence(&phi_plus()) - 1.0).abs() < 1e-15);
        let prod = PureState::new([ONE, ZERO, ZERO, ZERO]).unwrap();
        assert_eq!(concurrence(&prod), 0.0);
        for k in 0..16 {
            let theta = k as f64 * 0.4;
            let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
            let v: Vec<C64> = phi_plus()
                .as_slice()
                .iter()
                .zip(psi_plus().as_slice())
                .map(|(a, b)| a * c - b * s)
                .collect();
            let psi = PureState::normalize(&v).unwrap();
            assert!((concurrence(&psi) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn mixed_concurrence_agrees_on_pure_and_werner() {
        assert!((concurrence_mixed(&DensityMatrix::from_pure(&phi_plus())).unwrap() - 1.0).abs() < 1e-7);
        // Werner concurrence is max(0, (3p−1)/2).
        for p in [0.2, 0.5, 0.8] {
            let c = concurrence_mixed(&werner_state(p).unwrap()).unwrap();
            assert!((c - ((3.0 * p - 1.0) / 2.0).max(0.0)).abs() < 1e-9, "p={p}: {c}");
        }
    }

    #[test]
    fn kernel_of_rank3_state() {
        let mut m = HermitianMatrix::identity(4);
        m = m.minus(&HermitianMatrix::diag(&[1.0, 0.0, 0.0, 0.0]));
        let rho = DensityMatrix::new(m.scale(1.0 / 3.0)).unwrap();
        let g = orthogonal_pure_state(&rho).unwrap();
        assert!((g.amplitudes()[0] - ONE).norm() < 1e-12);

        let full = random_density(4, 3).unwrap();
        assert!(matches!(orthogonal_pure_state(&full), Err(Error::RankMismatch { got: 4, .. })));
    }

    #[test]
    fn invalid_states_are_rejected() {
        assert!(DensityMatrix::new(HermitianMatrix::identity(4)).is_err());
        assert!(DensityMatrix::new(HermitianMatrix::diag(&[1.5, -0.5, 0.0, 0.0])).is_err());
        assert!(PureState::new([ONE, ONE, ZERO, ZERO]).is_err());
    }
}
