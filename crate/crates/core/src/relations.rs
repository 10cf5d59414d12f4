//! Error–disturbance and joint-measurement relations.
//!
//! Every relation is put in the form `lhs >= rhs` and reported with the
//! residual `lhs - rhs`. Inputs are gathered once per `(model, A, B, ρ)` in
//! [`RelationInputs`] and then evaluated for any subset of [`RelationId`].

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bounds::BoundPair;
use crate::error::{Error, Result};
use crate::linalg::{commutator, pauli, ComplexMatrix};
use crate::qmodel::{Channel, DensityOperator, JointModel, MeasuringProcess, MomentSet, Observable};
use crate::scalar::Real;

/// Default tolerance on residuals.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;
/// Tolerance for `A² = I`, zero means and the other exact preconditions.
pub const PRECONDITION_TOL: f64 = 1e-10;
/// `ε` (resp. `η`) at or below this counts as zero for the corollaries.
/// The moments are square roots, so round-off of order `1e-16` in `ε²`
/// already shows up as `1e-8` in `ε`.
pub const ZERO_ERROR_TOL: f64 = 1e-7;
/// How far a radicand may dip below zero before the inputs are rejected.
pub const RADICAND_SLACK: f64 = 1e-10;
/// `16 / (π² e²)`.
pub const INFO_THEORETIC_BOUND: f64 = 0.219_397_297_377_674_13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RelationId {
    /// `εη + εσ_B + σ_Aη >= |C|`.
    OzawaEdr,
    /// `εη + |<[n,B]> + <[A,d]>| >= |C|`.
    OzawaSecond,
    /// `σ_A η >= |C|` when `ε = 0`.
    ErrorFreeCorollary,
    /// `ε σ_B >= |C|` when `η = 0`.
    NondisturbingCorollary,
    /// `εη >= |C|`. Not a theorem; kept as a comparator.
    HeisenbergEdr,
    Branciard,
    BranciardBinary,
    /// `(ε² + 1/3)(η² + 1/3) >= 16/(π²e²)` for `Z`, `X` on the maximally mixed qubit.
    InfoTheoreticZx,
    MixedEdr,
    MixedBinary,
    /// `(ε² - 2)² + (η² - 2)² <= 4`.
    SpinCircle,
    Getrm,
    Robertson,
    RobertsonD,
    Etrm,
    Etrmb,
}

impl RelationId {
    pub const ALL: [RelationId; 16] = [
        RelationId::OzawaEdr,
        RelationId::OzawaSecond,
        RelationId::ErrorFreeCorollary,
        RelationId::NondisturbingCorollary,
        RelationId::HeisenbergEdr,
        RelationId::Branciard,
        RelationId::BranciardBinary,
        RelationId::InfoTheoreticZx,
        RelationId::MixedEdr,
        RelationId::MixedBinary,
        RelationId::SpinCircle,
        RelationId::Getrm,
        RelationId::Robertson,
        RelationId::RobertsonD,
        RelationId::Etrm,
        RelationId::Etrmb,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RelationId::OzawaEdr => "OZAWA_EDR",
            RelationId::OzawaSecond => "OZAWA_SECOND",
            RelationId::ErrorFreeCorollary => "ERROR_FREE_COROLLARY",
            RelationId::NondisturbingCorollary => "NONDISTURBING_COROLLARY",
            RelationId::HeisenbergEdr => "HEISENBERG_EDR",
            RelationId::Branciard => "BRANCIARD",
            RelationId::BranciardBinary => "BRANCIARD_BINARY",
            RelationId::InfoTheoreticZx => "INFO_THEORETIC_ZX",
            RelationId::MixedEdr => "MIXED_EDR",
            RelationId::MixedBinary => "MIXED_BINARY",
            RelationId::SpinCircle => "SPIN_CIRCLE",
            RelationId::Getrm => "GETRM",
            RelationId::Robertson => "ROBERTSON",
            RelationId::RobertsonD => "ROBERTSON_D",
            RelationId::Etrm => "ETRM",
            RelationId::Etrmb => "ETRMB",
        }
    }

    /// Reference relations that never decide a pass/fail status: the
    /// violable Heisenberg form and the information-theoretic bound.
    pub fn is_comparator(self) -> bool {
        matches!(self, RelationId::HeisenbergEdr | RelationId::InfoTheoreticZx)
    }

    /// Relations that need `A² = B² = I`, `±1` outputs and zero means.
    pub fn is_binary(self) -> bool {
        matches!(
            self,
            RelationId::BranciardBinary | RelationId::MixedBinary | RelationId::SpinCircle | RelationId::Etrmb
        )
    }

    /// Relations stated for a general joint measurement model. The others
    /// apply to joint models as well, since they only use the joint errors.
    pub fn is_joint_native(self) -> bool {
        matches!(self, RelationId::Getrm | RelationId::Etrm | RelationId::Etrmb)
    }
}

impl fmt::Display for RelationId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RelationId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let wanted = s.trim().replace('-', "_").to_ascii_uppercase();
        RelationId::ALL
            .into_iter()
            .find(|id| id.name() == wanted)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown relation `{s}`")))
    }
}

/// A measuring process or a bare joint measurement model.
#[derive(Debug, Clone, Copy)]
pub enum Scenario<'a, T> {
    Process(&'a MeasuringProcess<T>),
    Joint(&'a JointModel<T>),
}

/// Everything the relations read from a `(model, A, B, ρ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelationInputs<T> {
    pub moments: MomentSet<T>,
    pub bounds: BoundPair<T>,
    /// `|<[n,B]> + <[A,d]>|` with `n`, `d` the probe contractions of the
    /// noise operators.
    pub cross_term: T,
    pub mean_a: T,
    pub mean_b: T,
    /// `||X² - I||_F` for `A`, `B`, `𝒜`, `ℬ`.
    pub involution_defects: [T; 4],
    /// `A = Z`, `B = X` and `ρ = I/2`.
    pub is_zx_on_maximally_mixed: bool,
}

impl<T: Real> RelationInputs<T> {
    pub fn compute(
        scenario: Scenario<'_, T>,
        a: &Observable<T>,
        b: &Observable<T>,
        rho: &DensityOperator<T>,
    ) -> Result<Self> {
        match scenario {
            Scenario::Process(p) => Self::from_joint(&p.to_joint_model(b)?, a, b, rho),
            Scenario::Joint(j) => Self::from_joint(j, a, b, rho),
        }
    }

    pub fn from_joint(
        j: &JointModel<T>,
        a: &Observable<T>,
        b: &Observable<T>,
        rho: &DensityOperator<T>,
    ) -> Result<Self> {
        let moments = j.moments(a, b, rho)?;
        let bounds = BoundPair::compute(a, b, rho)?;
        let n = j.first_moment_operator(a, Channel::A)?;
        let d = j.first_moment_operator(b, Channel::B)?;
        let cross = rho.expect_complex(&commutator(n.matrix(), b.matrix())?)?
            + rho.expect_complex(&commutator(a.matrix(), d.matrix())?)?;
        let is_zx = a.dim() == 2 && {
            let tol = T::tol(PRECONDITION_TOL);
            let half = ComplexMatrix::<T>::identity(2).scale_real(T::lit(0.5));
            a.matrix().distance(&pauli::z()) <= tol
                && b.matrix().distance(&pauli::x()) <= tol
                && rho.matrix().distance(&half) <= tol
        };
        Ok(Self {
            moments,
            bounds,
            cross_term: cross.norm(),
            mean_a: rho.expect(a.matrix())?,
            mean_b: rho.expect(b.matrix())?,
            involution_defects: [
                a.involution_defect(),
                b.involution_defect(),
                j.output(Channel::A).involution_defect(),
                j.output(Channel::B).involution_defect(),
            ],
            is_zx_on_maximally_mixed: is_zx,
        })
    }

    /// `Ok` when the binary-family preconditions hold.
    pub fn check_binary(&self) -> Result<()> {
        let tol = T::tol(PRECONDITION_TOL);
        let labels = ["A² = I", "B² = I", "𝒜² = I", "ℬ² = I"];
        for (label, defect) in labels.iter().zip(self.involution_defects) {
            if defect > tol {
                return Err(Error::Precondition(format!("precondition {label} failed (defect {defect:.3e})")));
            }
        }
        for (label, mean) in [("⟨A⟩", self.mean_a), ("⟨B⟩", self.mean_b)] {
            if mean.abs() > tol {
                return Err(Error::Precondition(format!("precondition {label}=0 failed ({label} = {mean:.3e})")));
            }
        }
        Ok(())
    }
}

/// One evaluated relation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelationReport<T> {
    pub id: RelationId,
    pub lhs: T,
    pub rhs: T,
    pub residual: T,
    pub satisfied: bool,
    pub tolerance: T,
    pub moments: MomentSet<T>,
    pub bounds: BoundPair<T>,
}

/// Result of evaluating one relation on inputs that may not meet its
/// preconditions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Evaluation<T> {
    Evaluated(RelationReport<T>),
    Skipped { id: RelationId, reason: String },
}

impl<T: Real> Evaluation<T> {
    pub fn id(&self) -> RelationId {
        match self {
            Evaluation::Evaluated(r) => r.id,
            Evaluation::Skipped { id, .. } => *id,
        }
    }

    pub fn report(&self) -> Option<&RelationReport<T>> {
        match self {
            Evaluation::Evaluated(r) => Some(r),
            Evaluation::Skipped { .. } => None,
        }
    }
}

fn radicand<T: Real>(what: &'static str, v: T, scale: T) -> Result<T> {
    v.clamp_nonneg(T::tol(RADICAND_SLACK) * (T::one() + scale))
        .map(T::sqrt)
        .ok_or_else(|| Error::NegativeRadicand { what, value: v.to_f64().unwrap_or(f64::NAN) })
}

/// `x²σ_B² + σ_A²y² + 2xy√(σ_A²σ_B² - k²)`.
fn tradeoff_lhs<T: Real>(x: T, y: T, sa: T, sb: T, k: T) -> Result<T> {
    let prod = sa * sa * sb * sb;
    let root = radicand("σ_A²σ_B² - bound²", prod - k * k, prod)?;
    let two = T::lit(2.0);
    Ok(x * x * sb * sb + sa * sa * y * y + two * x * y * root)
}

/// `ε√(1 - ε²/4)`.
fn binary_rescale<T: Real>(eps: T) -> Result<T> {
    let r = radicand("1 - ε²/4", T::one() - eps * eps / T::lit(4.0), T::one())?;
    Ok(eps * r)
}

/// `x² + y² + 2xy√(1 - k²)`.
fn binary_lhs<T: Real>(x: T, y: T, k: T) -> Result<T> {
    let root = radicand("1 - bound²", T::one() - k * k, T::one())?;
    Ok(x * x + y * y + T::lit(2.0) * x * y * root)
}

/// `√(σ² - ((σ² + σ_out² - (ε² - δ²)) / 2σ_out)²)`.
fn getrm_component<T: Real>(sigma: T, sigma_out: T, eps: T, delta: T) -> Result<T> {
    let s2 = sigma * sigma;
    let shift = (s2 + sigma_out * sigma_out - (eps * eps - delta * delta)) / (T::lit(2.0) * sigma_out);
    radicand("joint-error component", s2 - shift * shift, s2)
}

/// Evaluates one relation; `Err(Precondition)` when it does not apply.
pub fn evaluate<T: Real>(id: RelationId, inputs: &RelationInputs<T>, tolerance: T) -> Result<RelationReport<T>> {
    let m = &inputs.moments;
    let (e, n, sa, sb) = (m.eps_a, m.eps_b, m.sigma_a, m.sigma_b);
    let c = inputs.bounds.c_ab;
    let d = inputs.bounds.d_ab;
    let zero_tol = T::tol(ZERO_ERROR_TOL);
    let (lhs, rhs) = match id {
        RelationId::OzawaEdr => (e * n + e * sb + sa * n, c.abs()),
        RelationId::OzawaSecond => (e * n + inputs.cross_term, c.abs()),
        RelationId::ErrorFreeCorollary => {
            if e > zero_tol {
                return Err(Error::Precondition(format!("ε = {e:.3e} is not zero")));
            }
            (sa * n, c.abs())
        }
        RelationId::NondisturbingCorollary => {
            if n > zero_tol {
                return Err(Error::Precondition(format!("η = {n:.3e} is not zero")));
            }
            (e * sb, c.abs())
        }
        RelationId::HeisenbergEdr => (e * n, c.abs()),
        RelationId::Branciard => (tradeoff_lhs(e, n, sa, sb, c)?, c * c),
        RelationId::MixedEdr | RelationId::Etrm => (tradeoff_lhs(e, n, sa, sb, d)?, d * d),
        RelationId::BranciardBinary => {
            inputs.check_binary()?;
            (binary_lhs(binary_rescale(e)?, binary_rescale(n)?, c)?, c * c)
        }
        RelationId::MixedBinary | RelationId::Etrmb => {
            inputs.check_binary()?;
            (binary_lhs(binary_rescale(e)?, binary_rescale(n)?, d)?, d * d)
        }
        RelationId::SpinCircle => {
            inputs.check_binary()?;
            if (d - T::one()).abs() > T::tol(PRECONDITION_TOL) {
                return Err(Error::Precondition(format!("precondition D_AB=1 failed (D_AB = {d:.6})")));
            }
            let two = T::lit(2.0);
            let (x, y) = (e * e - two, n * n - two);
            (T::lit(4.0), x * x + y * y)
        }
        RelationId::InfoTheoreticZx => {
            if !inputs.is_zx_on_maximally_mixed {
                return Err(Error::Precondition("needs A = Z, B = X and ρ = I/2".into()));
            }
            let third = T::one() / T::lit(3.0);
            ((e * e + third) * (n * n + third), T::lit(INFO_THEORETIC_BOUND))
        }
        RelationId::Getrm => {
            if !m.outputs_fluctuate() {
                return Err(Error::Precondition(format!(
                    "output spread σ(𝒜) = {:.3e}, σ(ℬ) = {:.3e} below floor",
                    m.sigma_cal_a, m.sigma_cal_b
                )));
            }
            let ea = getrm_component(sa, m.sigma_cal_a, e, m.delta_a)?;
            let eb = getrm_component(sb, m.sigma_cal_b, n, m.delta_b)?;
            (tradeoff_lhs(ea, eb, sa, sb, d)?, d * d)
        }
        RelationId::Robertson => (sa * sb, c.abs()),
        RelationId::RobertsonD => (sa * sb, d),
    };
    let residual = lhs - rhs;
    Ok(RelationReport {
        id,
        lhs,
        rhs,
        residual,
        satisfied: residual >= -tolerance,
        tolerance,
        moments: *m,
        bounds: inputs.bounds,
    })
}

/// Computes the inputs and evaluates one relation.
pub fn evaluate_scenario<T: Real>(
    id: RelationId,
    scenario: Scenario<'_, T>,
    a: &Observable<T>,
    b: &Observable<T>,
    rho: &DensityOperator<T>,
    tolerance: T,
) -> Result<RelationReport<T>> {
    evaluate(id, &RelationInputs::compute(scenario, a, b, rho)?, tolerance)
}

/// Evaluates each id, turning unmet preconditions into [`Evaluation::Skipped`].
pub fn evaluate_all<T: Real>(
    ids: &[RelationId],
    inputs: &RelationInputs<T>,
    tolerance: T,
) -> Result<Vec<Evaluation<T>>> {
    ids.iter()
        .map(|&id| match evaluate(id, inputs, tolerance) {
            Ok(r) => Ok(Evaluation::Evaluated(r)),
            Err(Error::Precondition(reason)) => Ok(Evaluation::Skipped { id, reason }),
            Err(e) => Err(e),
        })
        .collect()
}

/// The two corollaries, each `None` when its zero condition fails.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorollaryCheck<T> {
    pub error_free: Option<RelationReport<T>>,
    pub nondisturbing: Option<RelationReport<T>>,
}

pub fn corollary_check<T: Real>(inputs: &RelationInputs<T>, tolerance: T) -> Result<CorollaryCheck<T>> {
    let pick = |id| match evaluate(id, inputs, tolerance) {
        Ok(r) => Ok(Some(r)),
        Err(Error::Precondition(_)) => Ok(None),
        Err(e) => Err(e),
    };
    Ok(CorollaryCheck {
        error_free: pick(RelationId::ErrorFreeCorollary)?,
        nondisturbing: pick(RelationId::NondisturbingCorollary)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::tensor;
    use num_complex::Complex;

    type M = ComplexMatrix<f64>;

    fn spin(theta: f64) -> MeasuringProcess<f64> {
        let x = pauli::x::<f64>();
        let z = pauli::z::<f64>();
        let w = &z.scale_real(theta.cos()) + &x.scale_real(theta.sin());
        let p0 = M::from_real_rows(&[&[1.0, 0.0], &[0.0, 0.0]]).unwrap();
        let p1 = M::from_real_rows(&[&[0.0, 0.0], &[0.0, 1.0]]).unwrap();
        let cx = &tensor(&p0, &M::identity(2)) + &tensor(&p1, &x);
        let u = &cx * &tensor(&M::identity(2), &w);
        let xi = vec![Complex::new(1.0, 0.0), Complex::new(0.0, 0.0)];
        MeasuringProcess::new(2, 2, xi, u, Observable::pauli_z()).unwrap()
    }

    fn inputs(theta: f64) -> RelationInputs<f64> {
        let p = spin(theta);
        let rho = DensityOperator::maximally_mixed(2);
        RelationInputs::compute(Scenario::Process(&p), &Observable::pauli_z(), &Observable::pauli_x(), &rho).unwrap()
    }

    #[test]
    fn names_round_trip() {
        for id in RelationId::ALL {
            assert_eq!(id.name().parse::<RelationId>().unwrap(), id);
        }
        assert_eq!("mixed-edr".parse::<RelationId>().unwrap(), RelationId::MixedEdr);
        assert!("nope".parse::<RelationId>().is_err());
    }

    #[test]
    fn spin_model_moments_follow_closed_form() {
        for theta in [0.0, 0.3, std::f64::consts::FRAC_PI_8, 1.0] {
            let m = inputs(theta).moments;
            let s = std::f64::consts::FRAC_PI_4 - theta;
            assert!((m.eps_a.powi(2) - 4.0 * theta.sin().powi(2)).abs() < 1e-12);
            assert!((m.eps_b.powi(2) - 4.0 * s.sin().powi(2)).abs() < 1e-12);
        }
    }

    #[test]
    fn mixed_binary_is_tight_on_the_spin_family() {
        let r = evaluate(RelationId::MixedBinary, &inputs(std::f64::consts::FRAC_PI_8), 1e-9).unwrap();
        assert!(r.residual.abs() < 1e-9, "{}", r.residual);
        let r = evaluate(RelationId::SpinCircle, &inputs(0.4), 1e-9).unwrap();
        assert!(r.residual.abs() < 1e-9);
    }

    #[test]
    fn maximally_mixed_zx_has_vanishing_c() {
        let i = inputs(std::f64::consts::FRAC_PI_8);
        assert!(i.bounds.c_ab.abs() < 1e-12);
        assert!((i.bounds.d_ab - 1.0).abs() < 1e-12);
        let mixed = evaluate(RelationId::MixedEdr, &i, 1e-9).unwrap();
        let br = evaluate(RelationId::Branciard, &i, 1e-9).unwrap();
        // ε² + η² = 8 sin²(π/8) = 4 - 2√2; the cross term vanishes for the mixed bound
        assert!((mixed.lhs - (4.0 - 2.0 * 2f64.sqrt())).abs() < 1e-12, "{}", mixed.lhs);
        assert!(br.lhs > mixed.lhs);
        assert!(br.rhs.abs() < 1e-12);
        assert!((mixed.rhs - 1.0).abs() < 1e-12);
    }

    #[test]
    fn corollaries_at_the_endpoints() {
        let at0 = corollary_check(&inputs(0.0), 1e-9).unwrap();
        assert!(at0.error_free.is_some());
        assert!(at0.nondisturbing.is_none());
        let at_quarter = corollary_check(&inputs(std::f64::consts::FRAC_PI_4), 1e-9).unwrap();
        assert!(at_quarter.error_free.is_none());
        let nd = at_quarter.nondisturbing.unwrap();
        assert!(nd.satisfied);
    }

    #[test]
    fn binary_relations_skip_non_binary_inputs() {
        let p = spin(0.2);
        let rho = DensityOperator::maximally_mixed(2);
        let a = Observable::new(pauli::z::<f64>().scale_real(2.0)).unwrap();
        let i = RelationInputs::compute(Scenario::Process(&p), &a, &Observable::pauli_x(), &rho).unwrap();
        let all = evaluate_all(&RelationId::ALL, &i, 1e-9).unwrap();
        for ev in &all {
            let skipped = ev.report().is_none();
            if ev.id().is_binary() {
                assert!(skipped, "{}", ev.id());
            }
        }
    }

    #[test]
    fn heisenberg_fails_where_the_others_hold() {
        // ε = 0 with pure state (I + Y)/2: εη = 0 < |C| = 1
        let p = spin(0.0);
        let rho = DensityOperator::qubit_bloch(0.0, 1.0, 0.0).unwrap();
        let i = RelationInputs::compute(Scenario::Process(&p), &Observable::pauli_z(), &Observable::pauli_x(), &rho)
            .unwrap();
        assert!((i.bounds.c_ab.abs() - 1.0).abs() < 1e-12);
        let h = evaluate(RelationId::HeisenbergEdr, &i, 1e-9).unwrap();
        assert!(!h.satisfied);
        for id in [RelationId::OzawaEdr, RelationId::OzawaSecond, RelationId::Branciard, RelationId::MixedEdr] {
            assert!(evaluate(id, &i, 1e-9).unwrap().satisfied, "{id}");
        }
    }

    #[test]
    fn info_theoretic_needs_the_exact_setting() {
        let i = inputs(0.0);
        let r = evaluate(RelationId::InfoTheoreticZx, &i, 1e-9).unwrap();
        assert!(r.satisfied);
        let p = spin(0.0);
        let rho = DensityOperator::qubit_bloch(0.0, 0.5, 0.0).unwrap();
        let i = RelationInputs::compute(Scenario::Process(&p), &Observable::pauli_z(), &Observable::pauli_x(), &rho)
            .unwrap();
        assert!(matches!(evaluate(RelationId::InfoTheoreticZx, &i, 1e-9), Err(Error::Precondition(_))));
    }
}
