//! Commutator lower bounds and the canonical purification.
//!
//! `C_AB = (1/2i) Tr([A,B] ρ)` is the state-expectation bound; `D_AB =
//! ½ Tr|√ρ [A,B] √ρ|` is its mixed-state strengthening. The purified
//! extension realizes `D_AB` as an ordinary `C` bound on `system ⊗ ancilla`,
//! and [`PurifiedExtension::verify`] checks that numerically.
//!
//! The ancilla is a second copy of the system space: the bra `<φ|` of the dual
//! space is stored as the conjugated component vector of `|φ>`. With that
//! convention the canonical purification has components `ψ[(i,k)] = √ρ[i,k]`
//! and the dual operator `W*` is the plain transpose `Wᵀ`.

use num_complex::Complex;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{mismatch, Error, Result};
use crate::linalg::{self, commutator, polar_selfadjoint, tensor, trace_norm, ComplexMatrix};
use crate::qmodel::{root_of_moment, DensityOperator, MeasuringProcess, Observable};
use crate::scalar::Real;

/// Largest `|Im|` accepted in `C_AB`, scaled by `1 + ||A||_F ||B||_F`.
pub const IMAGINARY_RESIDUE_TOL: f64 = 1e-10;
/// Default cap on `sys² × probe` for the doubled-space verification.
pub const DEFAULT_COMPOSITE_CAP: usize = 256;

fn check_pair<T: Real>(a: &Observable<T>, b: &Observable<T>, rho: &DensityOperator<T>) -> Result<()> {
    let d = rho.dim();
    for (what, o) in [("observable A", a), ("observable B", b)] {
        if o.dim() != d {
            return Err(mismatch(what, d, o.dim()));
        }
    }
    Ok(())
}

/// `C_AB` and `D_AB` for one `(A, B, ρ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundPair<T> {
    pub c_ab: T,
    pub d_ab: T,
}

impl<T: Real> BoundPair<T> {
    pub fn compute(a: &Observable<T>, b: &Observable<T>, rho: &DensityOperator<T>) -> Result<Self> {
        Ok(Self { c_ab: c_bound(a, b, rho)?, d_ab: d_bound(a, b, rho)? })
    }
}

/// `C_AB = (1/2i) Tr([A,B] ρ)`.
pub fn c_bound<T: Real>(a: &Observable<T>, b: &Observable<T>, rho: &DensityOperator<T>) -> Result<T> {
    check_pair(a, b, rho)?;
    let comm = commutator(a.matrix(), b.matrix())?;
    let z = rho.expect_complex(&comm)? / Complex::new(T::zero(), T::lit(2.0));
    let scale = T::one() + a.matrix().frobenius_norm() * b.matrix().frobenius_norm();
    if z.im.abs() > T::tol(IMAGINARY_RESIDUE_TOL) * scale {
        return Err(Error::ImaginaryResidue { what: "C_AB", residue: z.im.to_f64().unwrap_or(f64::NAN) });
    }
    Ok(z.re)
}

/// `√ρ [A,B] √ρ`, anti-Hermitian.
fn sandwiched_commutator<T: Real>(
    a: &Observable<T>,
    b: &Observable<T>,
    rho: &DensityOperator<T>,
) -> Result<ComplexMatrix<T>> {
    check_pair(a, b, rho)?;
    let s = rho.sqrt();
    let comm = commutator(a.matrix(), b.matrix())?;
    Ok(&(s * &comm) * s)
}

/// `-i √ρ [A,B] √ρ`, Hermitian up to round-off (symmetrized).
fn rotated_sandwich<T: Real>(
    a: &Observable<T>,
    b: &Observable<T>,
    rho: &DensityOperator<T>,
) -> Result<ComplexMatrix<T>> {
    Ok(sandwiched_commutator(a, b, rho)?
        .scale(Complex::new(T::zero(), -T::one()))
        .hermitian_part())
}

/// `D_AB = ½ Tr|√ρ [A,B] √ρ|`.
pub fn d_bound<T: Real>(a: &Observable<T>, b: &Observable<T>, rho: &DensityOperator<T>) -> Result<T> {
    let h = rotated_sandwich(a, b, rho)?;
    Ok(trace_norm(&h)? * T::lit(0.5))
}

/// The self-adjoint unitary `W` with `-i W √ρ[A,B]√ρ = |√ρ[A,B]√ρ|`, identity
/// on the kernel.
pub fn polar_unitary<T: Real>(
    a: &Observable<T>,
    b: &Observable<T>,
    rho: &DensityOperator<T>,
) -> Result<ComplexMatrix<T>> {
    Ok(polar_selfadjoint(&rotated_sandwich(a, b, rho)?)?.w)
}

/// Canonical purification of `ρ` together with the extended observables
/// `A' = A ⊗ I` and `B'_W = (B - <B>) ⊗ W*`.
#[derive(Debug, Clone)]
pub struct PurifiedExtension<T> {
    pub w: ComplexMatrix<T>,
    /// Unit vector on `system ⊗ ancilla`.
    pub psi: Vec<Complex<T>>,
    pub a_ext: Observable<T>,
    pub b_ext_w: Observable<T>,
    sys_dim: usize,
}

/// Canonical purification `Σ_j √p_j |φ_j> ⊗ <φ_j|` from the spectral data
/// of `ρ`. Zero-weight eigenvectors stay in the sum with weight zero.
pub fn canonical_purification<T: Real>(rho: &DensityOperator<T>) -> Vec<Complex<T>> {
    let d = rho.dim();
    let eig = rho.eigen();
    let mut psi = vec![Complex::zero(); d * d];
    for (j, &p) in eig.values.iter().enumerate() {
        let weight = p.max(T::zero()).sqrt();
        if weight.is_zero() {
            continue;
        }
        let phi = eig.vector(j);
        for i in 0..d {
            for k in 0..d {
                psi[i * d + k] += phi[i] * phi[k].conj() * weight;
            }
        }
    }
    psi
}

pub fn build_extension<T: Real>(
    a: &Observable<T>,
    b: &Observable<T>,
    rho: &DensityOperator<T>,
) -> Result<PurifiedExtension<T>> {
    let d = rho.dim();
    let w = polar_unitary(a, b, rho)?;
    let psi = canonical_purification(rho);
    let b_mean = rho.expect(b.matrix())?;
    let centered = b.matrix() - &ComplexMatrix::identity(d).scale_real(b_mean);
    let a_ext = Observable::from_exact(a.lift_first(d));
    let b_ext_w = Observable::from_exact(tensor(&centered, &w.transpose()));
    Ok(PurifiedExtension { w, psi, a_ext, b_ext_w, sys_dim: d })
}

/// Quantities of the purified extension computed on the explicit
/// `system ⊗ ancilla ⊗ probe` space, next to the originals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtensionReport<T> {
    /// `σ(B'_W)` in `|Ψ>`.
    pub sigma_bw: T,
    /// `η(B'_W)` for the extended process `U ⊗ I`.
    pub eta_bw: T,
    /// `C_{A'B'_W}`.
    pub c_prime: T,
    /// `<Ψ|B'_W²|Ψ>^{1/2}`, which equals `σ(B)`.
    pub b_w_root_second_moment: T,
    pub sigma_a_ext: T,
    pub eps_a_ext: T,
    pub sigma_a: T,
    pub sigma_b: T,
    pub eps_a: T,
    pub eta_b: T,
    pub c_ab: T,
    pub d_ab: T,
}

/// `U` on `sys ⊗ probe` embedded as `U ⊗ I` on `sys ⊗ ancilla ⊗ probe`.
fn embed_skipping_middle<T: Real>(u: &ComplexMatrix<T>, d: usize, anc: usize, k: usize) -> ComplexMatrix<T> {
    let n = d * anc * k;
    ComplexMatrix::from_fn(n, n, |r, c| {
        let (i, a, p) = (r / (anc * k), (r / k) % anc, r % k);
        let (j, b, q) = (c / (anc * k), (c / k) % anc, c % k);
        if a == b {
            u[(i * k + p, j * k + q)]
        } else {
            Complex::zero()
        }
    })
}

fn norm_sq<T: Real>(v: &[Complex<T>]) -> T {
    v.iter().map(|z| z.norm_sqr()).sum()
}

impl<T: Real> PurifiedExtension<T> {
    pub fn sys_dim(&self) -> usize {
        self.sys_dim
    }

    pub fn verify(
        &self,
        p: &MeasuringProcess<T>,
        a: &Observable<T>,
        b: &Observable<T>,
        rho: &DensityOperator<T>,
    ) -> Result<ExtensionReport<T>> {
        self.verify_with_cap(p, a, b, rho, DEFAULT_COMPOSITE_CAP)
    }

    pub fn verify_with_cap(
        &self,
        p: &MeasuringProcess<T>,
        a: &Observable<T>,
        b: &Observable<T>,
        rho: &DensityOperator<T>,
        cap: usize,
    ) -> Result<ExtensionReport<T>> {
        let d = self.sys_dim;
        if p.sys_dim() != d {
            return Err(mismatch("extension vs process", d, p.sys_dim()));
        }
        check_pair(a, b, rho)?;
        if rho.dim() != d {
            return Err(mismatch("extension vs state", d, rho.dim()));
        }
        let k = p.probe_dim();
        let n = d * d * k;
        if n > cap {
            return Err(Error::TooLarge { dim: n, cap });
        }

        let psi = &self.psi;
        let mean_b = self.b_ext_w.matrix().expectation(psi)?.re;
        let b_psi = self.b_ext_w.matrix().apply(psi)?;
        let second_b = norm_sq(&b_psi);
        let sigma_bw = root_of_moment("sigma(B'_W)", second_b - mean_b * mean_b)?;
        let mean_a = self.a_ext.matrix().expectation(psi)?.re;
        let second_a = norm_sq(&self.a_ext.matrix().apply(psi)?);
        let sigma_a_ext = root_of_moment("sigma(A')", second_a - mean_a * mean_a)?;

        let comm = commutator(self.a_ext.matrix(), self.b_ext_w.matrix())?;
        let c_prime = (comm.expectation(psi)? / Complex::new(T::zero(), T::lit(2.0))).re;

        let u_ext = embed_skipping_middle(p.interaction(), d, d, k);
        let u_ext_adj = u_ext.adjoint();
        let psi_full = linalg::tensor_ket(psi, p.probe_state());
        let id_k = ComplexMatrix::identity(k);

        let b_full = tensor(self.b_ext_w.matrix(), &id_k);
        let b_evolved = &(&u_ext_adj * &b_full) * &u_ext;
        let disturbance = (&b_evolved - &b_full).apply(&psi_full)?;
        let eta_bw = norm_sq(&disturbance).sqrt();

        let meter_full = tensor(&ComplexMatrix::identity(d * d), p.meter().matrix());
        let meter_evolved = &(&u_ext_adj * &meter_full) * &u_ext;
        let a_full = tensor(self.a_ext.matrix(), &id_k);
        let error = (&meter_evolved - &a_full).apply(&psi_full)?;
        let eps_a_ext = norm_sq(&error).sqrt();

        let bounds = BoundPair::compute(a, b, rho)?;
        Ok(ExtensionReport {
            sigma_bw,
            eta_bw,
            c_prime,
            b_w_root_second_moment: second_b.max(T::zero()).sqrt(),
            sigma_a_ext,
            eps_a_ext,
            sigma_a: crate::qmodel::std_dev(a, rho)?,
            sigma_b: crate::qmodel::std_dev(b, rho)?,
            eps_a: p.rms_error(a, rho)?,
            eta_b: p.rms_disturbance(b, rho)?,
            c_ab: bounds.c_ab,
            d_ab: bounds.d_ab,
        })
    }
}

/// Free-function form of [`PurifiedExtension::verify`].
pub fn verify_extension_identities<T: Real>(
    ext: &PurifiedExtension<T>,
    p: &MeasuringProcess<T>,
    a: &Observable<T>,
    b: &Observable<T>,
    rho: &DensityOperator<T>,
) -> Result<ExtensionReport<T>> {
    ext.verify(p, a, b, rho)
}
