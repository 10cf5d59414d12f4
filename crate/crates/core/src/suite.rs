//! Acceptance checks: nine numbered criteria, each returning a pass/fail
//! outcome with a one-line detail. Tolerances are fixed here.

use std::f64::consts::{FRAC_PI_4, SQRT_2};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{build_extension, BoundPair};
use crate::error::{Error, Result};
use crate::geometry::{construct_proof_vectors, ProofVariant};
use crate::qmodel::{DensityOperator, JointModel, MeasuringProcess, Observable};
use crate::relations::{evaluate, RelationId, RelationInputs, Scenario, INFO_THEORETIC_BOUND};
use crate::sampling::{self, stream_rng};
use crate::spinlab::{build_spin_model, circle_residual, state_independence_check, SpinModelParams};

/// Closed-form and circle checks on the θ grid.
pub const GRID_TOL: f64 = 1e-9;
/// Exact bound values at the maximally mixed qubit.
pub const BOUND_TOL: f64 = 1e-12;
/// Residual floor for universality.
pub const RESIDUAL_TOL: f64 = 1e-9;
/// Proof-vector and extension identities.
pub const IDENTITY_TOL: f64 = 1e-9;
/// Allowed excess of `σ(B'_W)` over `σ(B)`.
pub const SIGMA_EXCESS_TOL: f64 = 1e-10;

pub const GRID_POINTS: usize = 101;
pub const STATES_PER_POINT: usize = 20;
pub const CLOSED_FORM_BUDGET: Duration = Duration::from_secs(5);
pub const UNIVERSALITY_BUDGET: Duration = Duration::from_secs(60);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub seed: u64,
    pub universality_draws: u64,
    pub bridge_draws: u64,
    pub pure_draws: u64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self { seed: 20_240_611, universality_draws: 1000, bridge_draws: 500, pure_draws: 500 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionOutcome {
    pub number: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl std::fmt::Display for CriterionOutcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "[{status}] {}. {}: {}", self.number, self.name, self.detail)
    }
}

fn outcome(number: u8, name: &'static str, passed: bool, detail: String) -> CriterionOutcome {
    CriterionOutcome { number, name, passed, detail }
}

fn theta_grid() -> impl Iterator<Item = f64> {
    (0..GRID_POINTS).map(|i| FRAC_PI_4 * i as f64 / (GRID_POINTS - 1) as f64)
}

fn zx() -> (Observable<f64>, Observable<f64>) {
    (Observable::pauli_z(), Observable::pauli_x())
}

/// Random qubit state: pure, mixed and maximally mixed all occur.
fn random_qubit_state(seed: u64, index: u64) -> DensityOperator<f64> {
    let mut rng = stream_rng(seed, index);
    match index % 3 {
        0 => sampling::random_pure_state(2, &mut rng),
        1 => sampling::random_density(2, &mut rng),
        _ => {
            let pure = sampling::random_pure_state(2, &mut rng);
            let mixed = DensityOperator::maximally_mixed(2);
            let m = &pure.matrix().scale_real(0.5) + &mixed.matrix().scale_real(0.5);
            DensityOperator::new(m).expect("convex combination")
        }
    }
}

pub fn spin_closed_forms(cfg: &SuiteConfig) -> Result<CriterionOutcome> {
    let start = Instant::now();
    let mut worst = 0.0_f64;
    for (i, theta) in theta_grid().enumerate() {
        let states: Vec<_> = (0..STATES_PER_POINT as u64)
            .map(|s| random_qubit_state(cfg.seed, (i * STATES_PER_POINT) as u64 + s))
            .collect();
        worst = worst.max(state_independence_check(SpinModelParams::new(theta), &states)?);
    }
    let elapsed = start.elapsed();
    let passed = worst <= GRID_TOL && elapsed < CLOSED_FORM_BUDGET;
    Ok(outcome(
        1,
        "spin closed forms",
        passed,
        format!(
            "max |measured - closed form| = {worst:.2e} over {GRID_POINTS}x{STATES_PER_POINT} (tol {GRID_TOL:e}), {:.2?}",
            elapsed
        ),
    ))
}

pub fn circle_tightness() -> Result<CriterionOutcome> {
    let states = [
        DensityOperator::maximally_mixed(2),
        DensityOperator::qubit_bloch(0.0, 1.0, 0.0)?,
        DensityOperator::qubit_bloch(0.0, -1.0, 0.0)?,
        DensityOperator::qubit_bloch(0.0, 0.5, 0.0)?,
    ];
    let (z, x) = zx();
    let mut worst = 0.0_f64;
    for theta in theta_grid() {
        let p = build_spin_model(SpinModelParams::new(theta));
        for rho in &states {
            let e = p.rms_error(&z, rho)?;
            let n = p.rms_disturbance(&x, rho)?;
            worst = worst.max(circle_residual(e * e, n * n).abs());
        }
    }
    Ok(outcome(
        2,
        "spin circle tightness",
        worst <= GRID_TOL,
        format!("max |(ε²-2)² + (η²-2)² - 4| = {worst:.2e} over {} points (tol {GRID_TOL:e})", GRID_POINTS * 4),
    ))
}

pub fn mixed_state_separation() -> Result<CriterionOutcome> {
    let (z, x) = zx();
    let rho = DensityOperator::maximally_mixed(2);
    let p = build_spin_model(SpinModelParams::new(0.3));
    let inputs = RelationInputs::compute(Scenario::Process(&p), &z, &x, &rho)?;
    let BoundPair { c_ab, d_ab } = inputs.bounds;
    let mixed = evaluate(RelationId::MixedEdr, &inputs, RESIDUAL_TOL)?;
    let branciard = evaluate(RelationId::Branciard, &inputs, RESIDUAL_TOL)?;
    let passed = c_ab.abs() <= BOUND_TOL
        && (d_ab - 1.0).abs() <= BOUND_TOL
        && (mixed.rhs - 1.0).abs() <= BOUND_TOL
        && branciard.rhs.abs() <= BOUND_TOL;
    Ok(outcome(
        3,
        "mixed-state separation",
        passed,
        format!(
            "C = {c_ab:.3e}, D = {d_ab:.15}, MIXED_EDR rhs = {:.15}, BRANCIARD rhs = {:.3e} (tol {BOUND_TOL:e})",
            mixed.rhs, branciard.rhs
        ),
    ))
}

pub fn extremal_points() -> Result<CriterionOutcome> {
    let (z, x) = zx();
    let rho = DensityOperator::maximally_mixed(2);
    let p0 = build_spin_model(SpinModelParams::new(0.0));
    let (e0, n0) = (p0.rms_error(&z, &rho)?, p0.rms_disturbance(&x, &rho)?);
    let pq = build_spin_model(SpinModelParams::new(FRAC_PI_4));
    let (eq, nq) = (pq.rms_error(&z, &rho)?, pq.rms_disturbance(&x, &rho)?);
    let passed = e0 <= GRID_TOL && (n0 - SQRT_2).abs() <= GRID_TOL && nq <= GRID_TOL && (eq - SQRT_2).abs() <= GRID_TOL;
    Ok(outcome(
        4,
        "extremal points",
        passed,
        format!("θ=0: ε={e0:.2e}, η={n0:.12}; θ=π/4: ε={eq:.12}, η={nq:.2e} (tol {GRID_TOL:e})"),
    ))
}

/// `(sys, probe)` for draw `i`, cycling through `{2,3} × {2,3}`.
fn dims(i: u64) -> (usize, usize) {
    (2 + (i % 2) as usize, 2 + ((i / 2) % 2) as usize)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum DrawKind {
    Process,
    Joint,
    BinaryProcess,
    BinaryJoint,
    /// Binary process with `B ⊥ A` on the Bloch sphere, so `D_AB = 1`.
    OrthogonalBinaryProcess,
}

fn universality_inputs(kind: DrawKind, seed: u64, i: u64) -> Result<RelationInputs<f64>> {
    let mut rng = stream_rng(seed, i);
    let (d, k) = dims(i);
    let general = |rng: &mut _| -> (Observable<f64>, Observable<f64>, DensityOperator<f64>) {
        (sampling::random_observable(d, rng), sampling::random_observable(d, rng), sampling::random_density(d, rng))
    };
    let process = |p: &MeasuringProcess<f64>, a, b, rho| RelationInputs::compute(Scenario::Process(p), a, b, rho);
    let joint = |j: &JointModel<f64>, a, b, rho| RelationInputs::compute(Scenario::Joint(j), a, b, rho);
    match kind {
        DrawKind::Process => {
            let p = sampling::random_process(d, k, &mut rng);
            let (a, b, rho) = general(&mut rng);
            process(&p, &a, &b, &rho)
        }
        DrawKind::Joint => {
            let j = sampling::random_joint_model(d, k, &mut rng);
            let (a, b, rho) = general(&mut rng);
            joint(&j, &a, &b, &rho)
        }
        DrawKind::BinaryProcess | DrawKind::OrthogonalBinaryProcess => {
            let p = sampling::random_binary_process(2, k, &mut rng);
            let (a, b, rho) =
                sampling::random_zero_mean_qubit_pair(kind == DrawKind::OrthogonalBinaryProcess, &mut rng);
            process(&p, &a, &b, &rho)
        }
        DrawKind::BinaryJoint => {
            let j = sampling::random_binary_joint_model(2, k, &mut rng);
            let (a, b, rho) = sampling::random_zero_mean_qubit_pair(false, &mut rng);
            joint(&j, &a, &b, &rho)
        }
    }
}

#[derive(Debug, Default, Clone, Copy)]
struct Tally {
    evaluated: u64,
    skipped: u64,
    violations: u64,
    min_residual: f64,
}

fn tally(kind: DrawKind, ids: &[RelationId], seed: u64, draws: u64) -> Result<Vec<Tally>> {
    let per_draw = (0..draws)
        .into_par_iter()
        .map(|i| {
            let inputs = universality_inputs(kind, seed, i)?;
            ids.iter()
                .map(|&id| match evaluate(id, &inputs, RESIDUAL_TOL) {
                    Ok(r) => Ok(Some(r.residual)),
                    Err(Error::Precondition(_)) => Ok(None),
                    Err(e) => Err(e),
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out = vec![Tally { min_residual: f64::INFINITY, ..Tally::default() }; ids.len()];
    for row in per_draw {
        for (t, r) in out.iter_mut().zip(row) {
            match r {
                Some(res) => {
                    t.evaluated += 1;
                    t.min_residual = t.min_residual.min(res);
                    if res < -RESIDUAL_TOL {
                        t.violations += 1;
                    }
                }
                None => t.skipped += 1,
            }
        }
    }
    Ok(out)
}

pub fn universality(cfg: &SuiteConfig) -> Result<CriterionOutcome> {
    use RelationId::*;
    let start = Instant::now();
    let general = [OzawaEdr, OzawaSecond, Branciard, MixedEdr, Getrm, Robertson, RobertsonD, Etrm];
    let plan: [(DrawKind, &[RelationId]); 5] = [
        (DrawKind::Process, &general),
        (DrawKind::Joint, &general),
        (DrawKind::BinaryProcess, &[BranciardBinary, MixedBinary, Etrmb]),
        (DrawKind::BinaryJoint, &[BranciardBinary, MixedBinary, Etrmb]),
        (DrawKind::OrthogonalBinaryProcess, &[SpinCircle, MixedBinary]),
    ];
    let mut passed = true;
    let mut parts = Vec::new();
    for (k, (kind, ids)) in plan.iter().enumerate() {
        let seed = cfg.seed.wrapping_add(k as u64 + 1);
        for (id, t) in ids.iter().zip(tally(*kind, ids, seed, cfg.universality_draws)?) {
            let ok = t.violations == 0 && t.evaluated == cfg.universality_draws;
            passed &= ok;
            if !ok {
                parts.push(format!(
                    "{id} on {kind:?}: {} evaluated, {} skipped, {} violations, min residual {:.3e}",
                    t.evaluated, t.skipped, t.violations, t.min_residual
                ));
            } else {
                parts.push(format!("{id}/{kind:?} min {:.1e}", t.min_residual));
            }
        }
    }
    let elapsed = start.elapsed();
    passed &= elapsed < UNIVERSALITY_BUDGET;
    Ok(outcome(
        5,
        "universality",
        passed,
        format!("{} draws per relation and family, {:.2?}; {}", cfg.universality_draws, elapsed, parts.join("; ")),
    ))
}

pub fn heisenberg_violability() -> Result<CriterionOutcome> {
    let (z, x) = zx();
    let rho = DensityOperator::qubit_bloch(0.0, 1.0, 0.0)?;
    let p = build_spin_model(SpinModelParams::new(0.0));
    let inputs = RelationInputs::compute(Scenario::Process(&p), &z, &x, &rho)?;
    let h = evaluate(RelationId::HeisenbergEdr, &inputs, RESIDUAL_TOL)?;
    let passed = (h.residual + 1.0).abs() <= RESIDUAL_TOL && !h.satisfied;
    Ok(outcome(
        6,
        "Heisenberg violability",
        passed,
        format!("εη = {:.3e}, |C| = {:.12}, residual = {:.12} (target -1 ± {RESIDUAL_TOL:e})", h.lhs, h.rhs, h.residual),
    ))
}

fn bridge_draw(seed: u64, i: u64) -> Result<(f64, f64, f64, f64)> {
    let mut rng = stream_rng(seed, i);
    let (d, k) = dims(i);
    let p = sampling::random_process(d, k, &mut rng);
    let a = sampling::random_observable(d, &mut rng);
    let b = sampling::random_observable(d, &mut rng);
    let rho = sampling::random_density(d, &mut rng);
    let j = p.to_joint_model(&b)?;
    let inputs = RelationInputs::from_joint(&j, &a, &b, &rho)?;
    let pv = construct_proof_vectors(&j, &a, &b, &rho, ProofVariant::Tradeoff)?;
    let proof = pv.identity_defects(&inputs.moments, &inputs.bounds)?.into_iter().fold(0.0, f64::max);
    let ext = build_extension(&a, &b, &rho)?.verify(&p, &a, &b, &rho)?;
    Ok((proof, ext.sigma_bw - ext.sigma_b, (ext.eta_bw - ext.eta_b).abs(), (ext.c_prime - ext.d_ab).abs()))
}

pub fn supplemental_bridge(cfg: &SuiteConfig) -> Result<CriterionOutcome> {
    let seed = cfg.seed.wrapping_add(100);
    let rows = (0..cfg.bridge_draws).into_par_iter().map(|i| bridge_draw(seed, i)).collect::<Result<Vec<_>>>()?;
    let mut w = (0.0_f64, f64::NEG_INFINITY, 0.0_f64, 0.0_f64);
    for (p, s, e, c) in rows {
        w = (w.0.max(p), w.1.max(s), w.2.max(e), w.3.max(c));
    }
    let passed = w.0 <= IDENTITY_TOL && w.1 <= SIGMA_EXCESS_TOL && w.2 <= IDENTITY_TOL && w.3 <= IDENTITY_TOL;
    Ok(outcome(
        7,
        "supplemental bridge",
        passed,
        format!(
            "{} models: proof-vector defect {:.2e}, σ(B'_W)-σ(B) ≤ {:.2e}, |Δη| {:.2e}, |C'-D| {:.2e}",
            cfg.bridge_draws, w.0, w.1, w.2, w.3
        ),
    ))
}

fn pure_draw(seed: u64, i: u64) -> Result<(f64, f64)> {
    let mut rng = stream_rng(seed, i);
    let (d, k) = dims(i);
    let p = sampling::random_process(d, k, &mut rng);
    let a = sampling::random_observable(d, &mut rng);
    let b = sampling::random_observable(d, &mut rng);
    let rho = sampling::random_pure_state(d, &mut rng);
    let inputs = RelationInputs::compute(Scenario::Process(&p), &a, &b, &rho)?;
    let gap = (inputs.bounds.d_ab - inputs.bounds.c_ab.abs()).abs();
    let m = evaluate(RelationId::MixedEdr, &inputs, RESIDUAL_TOL)?;
    let br = evaluate(RelationId::Branciard, &inputs, RESIDUAL_TOL)?;
    let mut diff = (m.lhs - br.lhs).abs().max((m.rhs - br.rhs).abs()).max((m.residual - br.residual).abs());
    if m.satisfied != br.satisfied {
        diff = f64::INFINITY;
    }
    Ok((gap, diff))
}

pub fn pure_state_collapse(cfg: &SuiteConfig) -> Result<CriterionOutcome> {
    let seed = cfg.seed.wrapping_add(200);
    let rows = (0..cfg.pure_draws).into_par_iter().map(|i| pure_draw(seed, i)).collect::<Result<Vec<_>>>()?;
    let (gap, diff) = rows.into_iter().fold((0.0_f64, 0.0_f64), |w, r| (w.0.max(r.0), w.1.max(r.1)));
    Ok(outcome(
        8,
        "pure-state collapse",
        gap <= IDENTITY_TOL && diff <= IDENTITY_TOL,
        format!("{} pure models: max |D - |C|| = {gap:.2e}, max MIXED_EDR vs BRANCIARD gap = {diff:.2e}", cfg.pure_draws),
    ))
}

/// Smallest `η²` allowed at `ε = 0` by the information-theoretic relation.
pub fn info_theoretic_eta_sq_floor() -> f64 {
    3.0 * INFO_THEORETIC_BOUND - 1.0 / 3.0
}

pub fn comparator_dominance() -> Result<CriterionOutcome> {
    let (z, x) = zx();
    let rho = DensityOperator::maximally_mixed(2);
    let p = build_spin_model(SpinModelParams::new(0.0));
    let inputs = RelationInputs::compute(Scenario::Process(&p), &z, &x, &rho)?;
    let circle = evaluate(RelationId::SpinCircle, &inputs, RESIDUAL_TOL)?;
    let info = evaluate(RelationId::InfoTheoreticZx, &inputs, RESIDUAL_TOL)?;
    let eta_sq = inputs.moments.eps_b.powi(2);
    // at ε = 0 the circle (η² - 2)² ≤ 0 pins η² = 2
    let circle_floor = 2.0;
    let info_floor = info_theoretic_eta_sq_floor();
    let expected_floor = 48.0 / (std::f64::consts::PI.powi(2) * std::f64::consts::E.powi(2)) - 1.0 / 3.0;
    let passed = circle.satisfied
        && info.satisfied
        && circle_floor > info_floor
        && (info_floor - expected_floor).abs() <= 1e-12
        && (eta_sq - circle_floor).abs() <= GRID_TOL;
    Ok(outcome(
        9,
        "comparator dominance",
        passed,
        format!(
            "ε = 0: spin circle forces η² = {circle_floor}, information bound allows η² ≥ {info_floor:.6}; model η² = {eta_sq:.12}"
        ),
    ))
}

/// Runs all nine criteria in order.
pub fn run_all(cfg: &SuiteConfig) -> Result<Vec<CriterionOutcome>> {
    Ok(vec![
        spin_closed_forms(cfg)?,
        circle_tightness()?,
        mixed_state_separation()?,
        extremal_points()?,
        universality(cfg)?,
        heisenberg_violability()?,
        supplemental_bridge(cfg)?,
        pure_state_collapse(cfg)?,
        comparator_dominance()?,
    ])
}
