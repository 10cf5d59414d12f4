//! Real inner-product geometry behind the tradeoff relations.
//!
//! Operators on `system ⊗ probe` form a real inner-product space under
//! `(X, Y) = Re Tr(X†Y)`. A joint model and `(A, B, ρ)` give four vectors
//! `a, b, m, n` with `m ⊥ n`; the tradeoff relations are then instances of
//! two inequalities valid for any such quadruple.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::bounds::{polar_unitary, BoundPair};
use crate::error::{mismatch, Error, Result};
use crate::linalg::{outer, tensor, ComplexMatrix};
use crate::qmodel::{Channel, DensityOperator, JointModel, MomentSet, Observable};
use crate::scalar::Real;

/// Norms below this make `m̄ = m/‖m‖` undefined.
pub const DEGENERATE_NORM: f64 = 1e-12;
/// Allowed `|(m, n)|`, relative to `1 + ‖m‖‖n‖`.
pub const ORTHOGONALITY_TOL: f64 = 1e-8;
const SLACK: f64 = 1e-10;

/// `Re Tr(X†Y)`.
pub fn op_inner<T: Real>(x: &ComplexMatrix<T>, y: &ComplexMatrix<T>) -> Result<T> {
    if x.rows() != y.rows() || x.cols() != y.cols() {
        return Err(mismatch("operator inner product", x.rows() * x.cols(), y.rows() * y.cols()));
    }
    Ok(x.as_slice().iter().zip(y.as_slice()).map(|(p, q)| (p.conj() * q).re).sum())
}

/// An operator viewed as a vector, with its norm cached.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorVector<T> {
    value: ComplexMatrix<T>,
    norm: T,
}

impl<T: Real> OperatorVector<T> {
    pub fn new(value: ComplexMatrix<T>) -> Self {
        let norm = value.frobenius_norm();
        Self { value, norm }
    }

    /// A real coordinate vector, stored as a single row.
    pub fn from_real(coords: &[T]) -> Self {
        Self::new(ComplexMatrix::from_fn(1, coords.len(), |_, j| Complex::new(coords[j], T::zero())))
    }

    pub fn value(&self) -> &ComplexMatrix<T> {
        &self.value
    }

    pub fn norm(&self) -> T {
        self.norm
    }

    pub fn inner(&self, other: &Self) -> Result<T> {
        op_inner(&self.value, &other.value)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        Ok(Self::new(self.value.try_sub(&other.value)?))
    }

    /// `(self, v/‖v‖)`.
    fn along(&self, v: &Self, what: &'static str) -> Result<T> {
        if v.norm < T::tol(DEGENERATE_NORM) {
            return Err(Error::Precondition(format!("{what} has norm {:.3e}", v.norm)));
        }
        Ok(self.inner(v)? / v.norm)
    }
}

/// The quadruple `(a, b, m, n)` with `m ⊥ n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProofVectors<T> {
    pub a: OperatorVector<T>,
    pub b: OperatorVector<T>,
    pub m: OperatorVector<T>,
    pub n: OperatorVector<T>,
}

/// `lhs >= rhs` for one of the two inequalities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BgiValue<T> {
    pub lhs: T,
    pub rhs: T,
    pub residual: T,
}

impl<T: Real> BgiValue<T> {
    fn new(lhs: T, rhs: T) -> Self {
        Self { lhs, rhs, residual: lhs - rhs }
    }
}

fn root<T: Real>(what: &'static str, v: T, scale: T) -> Result<T> {
    v.clamp_nonneg(T::tol(SLACK) * (T::one() + scale))
        .map(T::sqrt)
        .ok_or_else(|| Error::NegativeRadicand { what, value: v.to_f64().unwrap_or(f64::NAN) })
}

impl<T: Real> ProofVectors<T> {
    /// Checks `(m, n) = 0`.
    pub fn new(a: OperatorVector<T>, b: OperatorVector<T>, m: OperatorVector<T>, n: OperatorVector<T>) -> Result<Self> {
        let v = Self { a, b, m, n };
        let mn = v.m.inner(&v.n)?;
        let tol = T::tol(ORTHOGONALITY_TOL) * (T::one() + v.m.norm * v.n.norm);
        if mn.abs() > tol {
            return Err(Error::Precondition(format!("(m, n) = {mn:.3e} is not zero")));
        }
        v.a.inner(&v.b)?;
        v.a.inner(&v.m)?;
        v.b.inner(&v.n)?;
        Ok(v)
    }

    fn gram_root(&self) -> Result<(T, T)> {
        let ab = self.a.inner(&self.b)?;
        let p = self.a.norm * self.a.norm * self.b.norm * self.b.norm;
        Ok((ab, root("‖a‖²‖b‖² - (a,b)²", p - ab * ab, p)?))
    }

    /// `(‖a‖² - (a,m̄)²)‖b‖² + ‖a‖²(‖b‖² - (b,n̄)²)
    ///  + 2√(‖a‖² - (a,m̄)²)√(‖b‖² - (b,n̄)²)√(‖a‖²‖b‖² - (a,b)²) >= (a,b)²`.
    pub fn bgi1(&self) -> Result<BgiValue<T>> {
        let (na2, nb2) = (self.a.norm * self.a.norm, self.b.norm * self.b.norm);
        let am = self.a.along(&self.m, "m")?;
        let bn = self.b.along(&self.n, "n")?;
        let ea = root("‖a‖² - (a,m̄)²", na2 - am * am, na2)?;
        let eb = root("‖b‖² - (b,n̄)²", nb2 - bn * bn, nb2)?;
        let (ab, g) = self.gram_root()?;
        let lhs = ea * ea * nb2 + na2 * eb * eb + T::lit(2.0) * ea * eb * g;
        Ok(BgiValue::new(lhs, ab * ab))
    }

    /// `‖a-m‖²‖b‖² + ‖a‖²‖b-n‖² + 2‖a-m‖‖b-n‖√(‖a‖²‖b‖² - (a,b)²) >= (a,b)²`.
    pub fn bgi3(&self) -> Result<BgiValue<T>> {
        let (na2, nb2) = (self.a.norm * self.a.norm, self.b.norm * self.b.norm);
        let am = self.a.sub(&self.m)?.norm;
        let bn = self.b.sub(&self.n)?.norm;
        let (ab, g) = self.gram_root()?;
        let lhs = am * am * nb2 + na2 * bn * bn + T::lit(2.0) * am * bn * g;
        Ok(BgiValue::new(lhs, ab * ab))
    }

    pub fn bgi_residuals(&self) -> Result<(T, T)> {
        Ok((self.bgi1()?.residual, self.bgi3()?.residual))
    }

    /// Absolute defects of `‖a‖ = σ_A`, `‖b‖ = σ_B`, `‖a-m‖ = ε`,
    /// `‖b-n‖ = η`, `(a,b) = D_AB`, `(m,n) = 0`, for vectors built with
    /// [`ProofVariant::Tradeoff`].
    pub fn identity_defects(&self, moments: &MomentSet<T>, bounds: &BoundPair<T>) -> Result<[T; 6]> {
        Ok([
            (self.a.norm - moments.sigma_a).abs(),
            (self.b.norm - moments.sigma_b).abs(),
            (self.a.sub(&self.m)?.norm - moments.eps_a).abs(),
            (self.b.sub(&self.n)?.norm - moments.eps_b).abs(),
            (self.a.inner(&self.b)? - bounds.d_ab).abs(),
            self.m.inner(&self.n)?.abs(),
        ])
    }
}

/// How the joint outputs are centred.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProofVariant {
    /// `𝒜 - <A>_ρ`, `ℬ - <B>_ρ`.
    Tradeoff,
    /// `𝒜 - <𝒜>`, `ℬ - <ℬ>`.
    Getrm,
}

/// `a = A₀√ρ ⊗ |ξ><ξ|`, `b = -i B₀√ρW ⊗ |ξ><ξ|`,
/// `m = 𝒜₀(√ρ ⊗ |ξ><ξ|)`, `n = -i ℬ₀(√ρW ⊗ |ξ><ξ|)`.
pub fn construct_proof_vectors<T: Real>(
    j: &JointModel<T>,
    a: &Observable<T>,
    b: &Observable<T>,
    rho: &DensityOperator<T>,
    variant: ProofVariant,
) -> Result<ProofVectors<T>> {
    let d = j.sys_dim();
    if rho.dim() != d {
        return Err(mismatch("state", d, rho.dim()));
    }
    let w = polar_unitary(a, b, rho)?;
    let probe = outer(j.probe_state());
    let sqrt_rho = rho.sqrt();
    let sqrt_rho_w = sqrt_rho * &w;
    let minus_i = Complex::new(T::zero(), -T::one());
    let centred = |x: &ComplexMatrix<T>, mean: T| x - &ComplexMatrix::identity(x.rows()).scale_real(mean);

    let mean_a = rho.expect(a.matrix())?;
    let mean_b = rho.expect(b.matrix())?;
    let (shift_a, shift_b) = match variant {
        ProofVariant::Tradeoff => (mean_a, mean_b),
        ProofVariant::Getrm => {
            let state = tensor(rho.matrix(), &probe);
            (
                j.output(Channel::A).matrix().trace_product(&state)?.re,
                j.output(Channel::B).matrix().trace_product(&state)?.re,
            )
        }
    };
    let a0 = centred(a.matrix(), mean_a);
    let b0 = centred(b.matrix(), mean_b);
    let cal_a0 = centred(j.output(Channel::A).matrix(), shift_a);
    let cal_b0 = centred(j.output(Channel::B).matrix(), shift_b);

    let av = tensor(&(&a0 * sqrt_rho), &probe);
    let bv = tensor(&(&b0 * &sqrt_rho_w), &probe).scale(minus_i);
    let mv = &cal_a0 * &tensor(sqrt_rho, &probe);
    let nv = (&cal_b0 * &tensor(&sqrt_rho_w, &probe)).scale(minus_i);
    ProofVectors::new(
        OperatorVector::new(av),
        OperatorVector::new(bv),
        OperatorVector::new(mv),
        OperatorVector::new(nv),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relations::{evaluate, RelationId, RelationInputs};
    use crate::sampling::{random_density, random_joint_model, random_observable, stream_rng};

    #[test]
    fn inner_product_is_real_part_of_hilbert_schmidt() {
        let x = ComplexMatrix::from_rows(vec![vec![Complex::new(1.0, 2.0), Complex::new(0.0, 1.0)]]).unwrap();
        let y = ComplexMatrix::from_rows(vec![vec![Complex::new(3.0, -1.0), Complex::new(2.0, 0.0)]]).unwrap();
        // conj(1+2i)(3-i) = 1 - 7i, conj(i)·2 = -2i
        let v: f64 = op_inner(&x, &y).unwrap();
        assert!((v - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_non_orthogonal_m_n() {
        let v = |c: &[f64]| OperatorVector::from_real(c);
        assert!(ProofVectors::new(v(&[1.0, 0.0]), v(&[0.0, 1.0]), v(&[1.0, 1.0]), v(&[1.0, 0.0])).is_err());
    }

    #[test]
    fn degenerate_m_is_a_precondition_error() {
        let v = |c: &[f64]| OperatorVector::from_real(c);
        let p = ProofVectors::new(v(&[1.0, 0.0]), v(&[0.0, 1.0]), v(&[0.0, 0.0]), v(&[0.0, 1.0])).unwrap();
        assert!(matches!(p.bgi1(), Err(Error::Precondition(_))));
        assert!(p.bgi3().is_ok());
    }

    #[test]
    fn identities_on_random_joint_models() {
        for i in 0..40 {
            let mut rng = stream_rng(11, i);
            let j = random_joint_model(2, 3, &mut rng);
            let a = random_observable(2, &mut rng);
            let b = random_observable(2, &mut rng);
            let rho = random_density(2, &mut rng);
            let inputs = RelationInputs::from_joint(&j, &a, &b, &rho).unwrap();
            let pv = construct_proof_vectors(&j, &a, &b, &rho, ProofVariant::Tradeoff).unwrap();
            for defect in pv.identity_defects(&inputs.moments, &inputs.bounds).unwrap() {
                assert!(defect < 1e-9, "{defect}");
            }
            let etrm = evaluate(RelationId::Etrm, &inputs, 1e-9).unwrap();
            let b3 = pv.bgi3().unwrap();
            assert!((etrm.lhs - b3.lhs).abs() < 1e-9 && (etrm.rhs - b3.rhs).abs() < 1e-9);

            let pg = construct_proof_vectors(&j, &a, &b, &rho, ProofVariant::Getrm).unwrap();
            let getrm = evaluate(RelationId::Getrm, &inputs, 1e-9).unwrap();
            let b1 = pg.bgi1().unwrap();
            assert!((getrm.lhs - b1.lhs).abs() < 1e-8, "{} vs {}", getrm.lhs, b1.lhs);
        }
    }
}
