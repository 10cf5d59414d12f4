//! The qubit spin model, θ-sweeps and seeded random searches.
//!
//! The model measures `A = Z` with a probe qubit prepared in `|0'>`, meter
//! `Z'` and interaction `U = C[X'] (I ⊗ W(θ))`, `W(θ) = cos θ Z' + sin θ X'`.
//! Its errors do not depend on the state:
//! `ε(Z)² = 4 sin²θ`, `η(X)² = 4 sin²(π/4 - θ)`.

use std::f64::consts::{FRAC_PI_4, PI};

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{pauli, tensor, ComplexMatrix};
use crate::qmodel::{DensityOperator, JointModel, MeasuringProcess, Observable};
use crate::relations::{evaluate, evaluate_all, Evaluation, RelationId, RelationInputs, RelationReport, Scenario};
use crate::sampling;

type M = ComplexMatrix<f64>;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpinModelParams {
    pub theta: f64,
}

impl SpinModelParams {
    pub fn new(theta: f64) -> Self {
        Self { theta }
    }

    /// `θ` reduced to `[0, π)`. Shifting `θ` by `π` flips the sign of `U`
    /// and leaves the model unchanged.
    pub fn canonical_theta(&self) -> f64 {
        let t = self.theta.rem_euclid(PI);
        if t >= PI { 0.0 } else { t }
    }
}

pub fn build_spin_model(params: SpinModelParams) -> MeasuringProcess<f64> {
    let (s, c) = params.theta.sin_cos();
    let w = &pauli::z::<f64>().scale_real(c) + &pauli::x::<f64>().scale_real(s);
    let p0 = M::diag_real(&[1.0, 0.0]);
    let p1 = M::diag_real(&[0.0, 1.0]);
    let cnot = &tensor(&p0, &M::identity(2)) + &tensor(&p1, &pauli::x());
    let u = &cnot * &tensor(&M::identity(2), &w);
    let xi = vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
    MeasuringProcess::new(2, 2, xi, u, Observable::pauli_z()).expect("spin model is valid")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClosedForm {
    pub eps_sq: f64,
    pub eta_sq: f64,
}

pub fn closed_form(params: SpinModelParams) -> ClosedForm {
    let t = params.theta;
    ClosedForm { eps_sq: 4.0 * t.sin().powi(2), eta_sq: 4.0 * (FRAC_PI_4 - t).sin().powi(2) }
}

/// `4 - (ε² - 2)² - (η² - 2)²`; zero on the circle.
pub fn circle_residual(eps_sq: f64, eta_sq: f64) -> f64 {
    4.0 - (eps_sq - 2.0).powi(2) - (eta_sq - 2.0).powi(2)
}

/// Largest deviation of the measured `ε(Z)²`, `η(X)²` from the closed form
/// over `states`.
pub fn state_independence_check(params: SpinModelParams, states: &[DensityOperator<f64>]) -> Result<f64> {
    let p = build_spin_model(params);
    let cf = closed_form(params);
    let (z, x) = (Observable::pauli_z(), Observable::pauli_x());
    let mut worst = 0.0_f64;
    for rho in states {
        let e = p.rms_error(&z, rho)?;
        let n = p.rms_disturbance(&x, rho)?;
        worst = worst.max((e * e - cf.eps_sq).abs()).max((n * n - cf.eta_sq).abs());
    }
    Ok(worst)
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub theta_min: f64,
    pub theta_max: f64,
    /// Grid points, endpoints included.
    pub steps: usize,
    pub state: DensityOperator<f64>,
    pub relations: Vec<RelationId>,
    pub tolerance: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            theta_min: 0.0,
            theta_max: FRAC_PI_4,
            steps: 101,
            state: DensityOperator::maximally_mixed(2),
            relations: RelationId::ALL.to_vec(),
            tolerance: crate::relations::DEFAULT_TOLERANCE,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepPoint {
    pub theta: f64,
    pub eps_sq: f64,
    pub eta_sq: f64,
    pub circle_residual: f64,
    pub evaluations: Vec<Evaluation<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepResult {
    pub points: Vec<SweepPoint>,
    pub min_abs_circle_residual: f64,
    pub max_abs_circle_residual: f64,
    /// Grid point with the smallest `|circle residual|`.
    pub argmin_theta: f64,
}

pub fn sweep(cfg: &SweepConfig) -> Result<SweepResult> {
    if cfg.steps < 2 {
        return Err(Error::InvalidArgument(format!("sweep needs at least 2 steps, got {}", cfg.steps)));
    }
    if cfg.state.dim() != 2 {
        return Err(crate::error::mismatch("sweep state", 2, cfg.state.dim()));
    }
    let (z, x) = (Observable::pauli_z(), Observable::pauli_x());
    let points = (0..cfg.steps)
        .into_par_iter()
        .map(|i| {
            let theta = if i + 1 == cfg.steps {
                cfg.theta_max
            } else {
                cfg.theta_min + (cfg.theta_max - cfg.theta_min) * i as f64 / (cfg.steps - 1) as f64
            };
            let p = build_spin_model(SpinModelParams::new(theta));
            let inputs = RelationInputs::compute(Scenario::Process(&p), &z, &x, &cfg.state)?;
            let eps_sq = inputs.moments.eps_a.powi(2);
            let eta_sq = inputs.moments.eps_b.powi(2);
            Ok(SweepPoint {
                theta,
                eps_sq,
                eta_sq,
                circle_residual: circle_residual(eps_sq, eta_sq),
                evaluations: evaluate_all(&cfg.relations, &inputs, cfg.tolerance)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut min_abs = f64::INFINITY;
    let mut max_abs = 0.0_f64;
    let mut argmin = cfg.theta_min;
    for p in &points {
        let r = p.circle_residual.abs();
        if r < min_abs {
            min_abs = r;
            argmin = p.theta;
        }
        max_abs = max_abs.max(r);
    }
    Ok(SweepResult { points, min_abs_circle_residual: min_abs, max_abs_circle_residual: max_abs, argmin_theta: argmin })
}

/// Where random models come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelFamily {
    /// Haar interaction, Gaussian meter.
    Process,
    /// Haar interaction, `±1` meter.
    BinaryProcess,
    /// Commuting outputs with Gaussian spectra.
    Joint,
    /// Commuting `±1` outputs.
    BinaryJoint,
    /// The spin model at a uniform `θ ∈ [0, π)`, measuring `Z` and
    /// disturbing `X` in `(I + αY)/2` with uniform `α ∈ [-1, 1]`.
    Spin,
}

impl ModelFamily {
    /// The family a relation is naturally tested on.
    pub fn for_relation(id: RelationId) -> Self {
        match id {
            RelationId::Etrmb => ModelFamily::BinaryJoint,
            RelationId::Etrm | RelationId::Getrm => ModelFamily::Joint,
            RelationId::BranciardBinary | RelationId::MixedBinary | RelationId::SpinCircle => {
                ModelFamily::BinaryProcess
            }
            RelationId::InfoTheoreticZx => ModelFamily::BinaryProcess,
            _ => ModelFamily::Process,
        }
    }
}

/// Observables and state held fixed across a search.
#[derive(Debug, Clone)]
pub struct FixedTargets {
    pub a: Observable<f64>,
    pub b: Observable<f64>,
    pub rho: DensityOperator<f64>,
}

#[derive(Debug, Clone)]
pub struct SearchConfig {
    pub sys_dim: usize,
    pub probe_dim: usize,
    pub draws: u64,
    pub seed: u64,
    pub objective: RelationId,
    pub fixed: Option<FixedTargets>,
    /// Defaults to [`ModelFamily::for_relation`].
    pub family: Option<ModelFamily>,
    pub tolerance: f64,
}

impl SearchConfig {
    pub fn new(objective: RelationId, draws: u64, seed: u64) -> Self {
        Self {
            sys_dim: 2,
            probe_dim: 2,
            draws,
            seed,
            objective,
            fixed: None,
            family: None,
            tolerance: crate::relations::DEFAULT_TOLERANCE,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SearchResult {
    pub objective: RelationId,
    pub draws: u64,
    pub evaluated: u64,
    pub skipped: u64,
    pub violations: u64,
    pub min_residual: Option<f64>,
    pub argmin_draw: Option<u64>,
    pub min_report: Option<RelationReport<f64>>,
    pub best_model: Option<ModelDescriptor>,
}

/// Enough to regenerate a draw: `(family, dims, seed, draw)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelDescriptor {
    pub family: ModelFamily,
    pub sys_dim: usize,
    pub probe_dim: usize,
    pub seed: u64,
    pub draw: u64,
}

enum Model {
    Process(MeasuringProcess<f64>),
    Joint(JointModel<f64>),
}

/// One draw of the search: model, observables and state.
fn draw(cfg: &SearchConfig, index: u64) -> Result<(Model, Observable<f64>, Observable<f64>, DensityOperator<f64>)> {
    let mut rng = sampling::stream_rng(cfg.seed, index);
    let family = cfg.family.unwrap_or_else(|| ModelFamily::for_relation(cfg.objective));
    let (d, k) = (cfg.sys_dim, cfg.probe_dim);
    let binary = cfg.objective.is_binary()
        || matches!(family, ModelFamily::BinaryProcess | ModelFamily::BinaryJoint);
    if matches!(family, ModelFamily::Spin) && (d != 2 || k != 2) {
        return Err(Error::InvalidArgument("the spin family is a qubit model".into()));
    }
    let model = match family {
        ModelFamily::Process => Model::Process(sampling::random_process(d, k, &mut rng)),
        ModelFamily::BinaryProcess => Model::Process(sampling::random_binary_process(d, k, &mut rng)),
        ModelFamily::Joint => Model::Joint(sampling::random_joint_model(d, k, &mut rng)),
        ModelFamily::BinaryJoint => Model::Joint(sampling::random_binary_joint_model(d, k, &mut rng)),
        ModelFamily::Spin => {
            let theta = rng.random_range(0.0..PI);
            Model::Process(build_spin_model(SpinModelParams::new(theta)))
        }
    };
    let (a, b, rho) = match &cfg.fixed {
        Some(t) => (t.a.clone(), t.b.clone(), t.rho.clone()),
        None if matches!(family, ModelFamily::Spin) => {
            let alpha = rng.random_range(-1.0..=1.0);
            (Observable::pauli_z(), Observable::pauli_x(), DensityOperator::qubit_bloch(0.0, alpha, 0.0)?)
        }
        None if cfg.objective == RelationId::InfoTheoreticZx => {
            (Observable::pauli_z(), Observable::pauli_x(), DensityOperator::maximally_mixed(2))
        }
        None if binary => {
            if d != 2 {
                return Err(Error::InvalidArgument("binary draws use a qubit system".into()));
            }
            sampling::random_zero_mean_qubit_pair(cfg.objective == RelationId::SpinCircle, &mut rng)
        }
        None => (
            sampling::random_observable(d, &mut rng),
            sampling::random_observable(d, &mut rng),
            sampling::random_density(d, &mut rng),
        ),
    };
    Ok((model, a, b, rho))
}

/// Evaluates the objective on `draws` seeded random models and reports the
/// smallest residual. The result does not depend on the thread count.
pub fn random_model_search(cfg: &SearchConfig) -> Result<SearchResult> {
    if cfg.draws == 0 {
        return Err(Error::InvalidArgument("search needs at least one draw".into()));
    }
    let outcomes = (0..cfg.draws)
        .into_par_iter()
        .map(|i| {
            let (model, a, b, rho) = draw(cfg, i)?;
            let scenario = match &model {
                Model::Process(p) => Scenario::Process(p),
                Model::Joint(j) => Scenario::Joint(j),
            };
            let inputs = RelationInputs::compute(scenario, &a, &b, &rho)?;
            match evaluate(cfg.objective, &inputs, cfg.tolerance) {
                Ok(r) => Ok(Some(r)),
                Err(Error::Precondition(_)) => Ok(None),
                Err(e) => Err(e),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out = SearchResult {
        objective: cfg.objective,
        draws: cfg.draws,
        evaluated: 0,
        skipped: 0,
        violations: 0,
        min_residual: None,
        argmin_draw: None,
        min_report: None,
        best_model: None,
    };
    let family = cfg.family.unwrap_or_else(|| ModelFamily::for_relation(cfg.objective));
    for (i, o) in outcomes.into_iter().enumerate() {
        let Some(r) = o else {
            out.skipped += 1;
            continue;
        };
        out.evaluated += 1;
        if !r.satisfied {
            out.violations += 1;
        }
        if out.min_residual.is_none_or(|m| r.residual < m) {
            out.min_residual = Some(r.residual);
            out.argmin_draw = Some(i as u64);
            out.min_report = Some(r);
            out.best_model = Some(ModelDescriptor {
                family,
                sys_dim: cfg.sys_dim,
                probe_dim: cfg.probe_dim,
                seed: cfg.seed,
                draw: i as u64,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_matches_simulation() {
        let states = [
            DensityOperator::maximally_mixed(2),
            DensityOperator::qubit_bloch(0.3, -0.2, 0.5).unwrap(),
            DensityOperator::qubit_bloch(0.0, 0.0, 1.0).unwrap(),
        ];
        for theta in [0.0, 0.2, FRAC_PI_4, 1.3, 2.9] {
            let dev = state_independence_check(SpinModelParams::new(theta), &states).unwrap();
            assert!(dev < 1e-12, "{theta}: {dev}");
        }
    }

    #[test]
    fn canonical_theta_reduces_by_pi() {
        let p = SpinModelParams::new(-0.25);
        assert!((p.canonical_theta() - (PI - 0.25)).abs() < 1e-15);
        let a = closed_form(p);
        let b = closed_form(SpinModelParams::new(p.canonical_theta()));
        assert!((a.eps_sq - b.eps_sq).abs() < 1e-12 && (a.eta_sq - b.eta_sq).abs() < 1e-12);
    }

    #[test]
    fn sweep_stays_on_the_circle() {
        let res = sweep(&SweepConfig { steps: 33, ..SweepConfig::default() }).unwrap();
        assert_eq!(res.points.len(), 33);
        assert!(res.max_abs_circle_residual < 1e-12);
        let y_plus = DensityOperator::qubit_bloch(0.0, 1.0, 0.0).unwrap();
        let res = sweep(&SweepConfig { steps: 11, state: y_plus, ..SweepConfig::default() }).unwrap();
        assert!(res.max_abs_circle_residual < 1e-9);
    }

    #[test]
    fn two_step_sweep_hits_the_endpoints() {
        let res = sweep(&SweepConfig { steps: 2, relations: vec![], ..SweepConfig::default() }).unwrap();
        let (a, b) = (&res.points[0], &res.points[1]);
        assert!(a.eps_sq.abs() < 1e-12 && (a.eta_sq - 2.0).abs() < 1e-12);
        assert!((b.eps_sq - 2.0).abs() < 1e-12 && b.eta_sq.abs() < 1e-12);
        assert!(sweep(&SweepConfig { steps: 1, ..SweepConfig::default() }).is_err());
    }

    #[test]
    fn mixed_binary_search_versus_spin_family() {
        let random = random_model_search(&SearchConfig::new(RelationId::MixedBinary, 10_000, 21)).unwrap();
        let mut cfg = SearchConfig::new(RelationId::MixedBinary, 200, 21);
        cfg.family = Some(ModelFamily::Spin);
        let spin = random_model_search(&cfg).unwrap();
        let best_random = random.min_residual.unwrap();
        let best_spin = spin.min_residual.unwrap();
        assert!(best_random >= -1e-9);
        assert!(best_spin.abs() < 1e-9, "{best_spin}");
        assert!(best_spin <= best_random + 1e-9);
        assert_eq!(spin.evaluated, 200);
    }

    #[test]
    fn single_draw_is_reproducible() {
        let cfg = SearchConfig::new(RelationId::Getrm, 1, 4);
        let a = random_model_search(&cfg).unwrap();
        let b = random_model_search(&cfg).unwrap();
        assert_eq!(a.min_report, b.min_report);
        assert_eq!(a.best_model.unwrap().draw, 0);
    }

    #[test]
    fn search_is_deterministic() {
        let cfg = SearchConfig::new(RelationId::OzawaEdr, 40, 9);
        let a = random_model_search(&cfg).unwrap();
        let b = random_model_search(&cfg).unwrap();
        assert_eq!(a.min_residual, b.min_residual);
        assert_eq!(a.argmin_draw, b.argmin_draw);
        assert_eq!(a.violations, 0);
        assert_eq!(a.evaluated, 40);
    }
}
