use edr_core::geometry::{OperatorVector, ProofVectors};
use edr_core::linalg::{tensor, ComplexMatrix};
use edr_core::relations::{evaluate, RelationId, Scenario};
use edr_core::sampling::{self, stream_rng};
use edr_core::spinlab::{random_model_search, FixedTargets, ModelFamily, SearchConfig};
use edr_core::{BoundPair, DensityOperator, MeasuringProcess, Observable, RelationInputs};
use proptest::prelude::*;
use rand::Rng;

const TOL: f64 = 1e-9;

struct Draw {
    p: MeasuringProcess,
    a: Observable,
    b: Observable,
    rho: DensityOperator,
}

fn draw(seed: u64, d: usize, k: usize, pure: bool) -> Draw {
    let mut rng = stream_rng(seed, 0);
    let p = sampling::random_process(d, k, &mut rng);
    let a = sampling::random_observable(d, &mut rng);
    let b = sampling::random_observable(d, &mut rng);
    let rho = if pure { sampling::random_pure_state(d, &mut rng) } else { sampling::random_density(d, &mut rng) };
    Draw { p, a, b, rho }
}

fn inputs(x: &Draw) -> RelationInputs {
    RelationInputs::compute(Scenario::Process(&x.p), &x.a, &x.b, &x.rho).unwrap()
}

fn conjugate(v: &ComplexMatrix<f64>, m: &ComplexMatrix<f64>) -> ComplexMatrix<f64> {
    &(v * m) * &v.adjoint()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn d_dominates_c(seed in any::<u64>(), d in 2usize..=4) {
        let x = draw(seed, d, 2, false);
        let b = BoundPair::compute(&x.a, &x.b, &x.rho).unwrap();
        prop_assert!(b.d_ab >= b.c_ab.abs() - TOL);
    }

    #[test]
    fn pure_states_close_the_gap(seed in any::<u64>(), d in 2usize..=4) {
        let x = draw(seed, d, 2, true);
        let b = BoundPair::compute(&x.a, &x.b, &x.rho).unwrap();
        prop_assert!((b.d_ab - b.c_ab.abs()).abs() < TOL);
    }

    #[test]
    fn robertson_orderings(seed in any::<u64>(), d in 2usize..=3, k in 2usize..=3) {
        let i = inputs(&draw(seed, d, k, false));
        let r = evaluate(RelationId::Robertson, &i, TOL).unwrap();
        let rd = evaluate(RelationId::RobertsonD, &i, TOL).unwrap();
        prop_assert!(rd.satisfied);
        prop_assert!(rd.residual <= r.residual + TOL);
    }

    #[test]
    fn mixed_relations_are_stronger(seed in any::<u64>(), d in 2usize..=3, k in 2usize..=3) {
        let i = inputs(&draw(seed, d, k, false));
        let m = evaluate(RelationId::MixedEdr, &i, TOL).unwrap();
        let br = evaluate(RelationId::Branciard, &i, TOL).unwrap();
        prop_assert!(m.satisfied && br.satisfied);
        prop_assert!(m.residual <= br.residual + TOL);
        let etrm = evaluate(RelationId::Etrm, &i, TOL).unwrap();
        prop_assert_eq!(etrm.lhs, m.lhs);
        prop_assert_eq!(etrm.rhs, m.rhs);
    }

    #[test]
    fn binary_mixed_is_stronger(seed in any::<u64>(), k in 2usize..=3) {
        let mut rng = stream_rng(seed, 0);
        let p = sampling::random_binary_process(2, k, &mut rng);
        let (a, b, rho) = sampling::random_zero_mean_qubit_pair(false, &mut rng);
        let i = RelationInputs::compute(Scenario::Process(&p), &a, &b, &rho).unwrap();
        let m = evaluate(RelationId::MixedBinary, &i, TOL).unwrap();
        let br = evaluate(RelationId::BranciardBinary, &i, TOL).unwrap();
        prop_assert!(m.satisfied);
        prop_assert!(m.residual <= br.residual + TOL);
    }

    #[test]
    fn unitary_invariance(seed in any::<u64>(), d in 2usize..=3, k in 2usize..=3) {
        let x = draw(seed, d, k, false);
        let mut rng = stream_rng(seed, 1);
        let v = sampling::haar_unitary(d, &mut rng);
        let lifted = tensor(&v, &ComplexMatrix::identity(k));
        let p2 = MeasuringProcess::new(
            d, k, x.p.probe_state().to_vec(), conjugate(&lifted, x.p.interaction()), x.p.meter().clone(),
        ).unwrap();
        let a2 = Observable::new(conjugate(&v, x.a.matrix())).unwrap();
        let b2 = Observable::new(conjugate(&v, x.b.matrix())).unwrap();
        let rho2 = DensityOperator::new(conjugate(&v, x.rho.matrix())).unwrap();
        let before = inputs(&x);
        let after = RelationInputs::compute(Scenario::Process(&p2), &a2, &b2, &rho2).unwrap();
        prop_assert!((before.bounds.c_ab - after.bounds.c_ab).abs() < TOL);
        prop_assert!((before.bounds.d_ab - after.bounds.d_ab).abs() < TOL);
        prop_assert!((before.moments.eps_a - after.moments.eps_a).abs() < TOL);
        prop_assert!((before.moments.eps_b - after.moments.eps_b).abs() < TOL);
    }

    #[test]
    fn theorems_hold_on_process_draws(seed in any::<u64>(), d in 2usize..=3, k in 2usize..=3) {
        let i = inputs(&draw(seed, d, k, false));
        for id in [RelationId::OzawaEdr, RelationId::OzawaSecond, RelationId::Getrm, RelationId::Etrm] {
            let r = evaluate(id, &i, TOL).unwrap();
            prop_assert!(r.satisfied, "{} residual {}", id, r.residual);
        }
    }
}

fn gram_schmidt(m: &[f64], n: &[f64]) -> Vec<f64> {
    let mm: f64 = m.iter().map(|x| x * x).sum();
    if mm == 0.0 {
        return n.to_vec();
    }
    let mn: f64 = m.iter().zip(n).map(|(x, y)| x * y).sum();
    n.iter().zip(m).map(|(y, x)| y - mn / mm * x).collect()
}

#[test]
fn inequalities_on_random_real_quadruples() {
    let mut worst = (f64::INFINITY, f64::INFINITY);
    for i in 0..10_000u64 {
        let mut rng = stream_rng(77, i);
        let dim = rng.random_range(2..=16);
        let mut vec = || -> Vec<f64> { (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect() };
        let (a, b, m, n0) = (vec(), vec(), vec(), vec());
        let n = gram_schmidt(&m, &n0);
        let pv = ProofVectors::new(
            OperatorVector::from_real(&a),
            OperatorVector::from_real(&b),
            OperatorVector::from_real(&m),
            OperatorVector::from_real(&n),
        )
        .unwrap();
        let (r1, r3) = pv.bgi_residuals().unwrap();
        worst = (worst.0.min(r1), worst.1.min(r3));
    }
    assert!(worst.0 >= -TOL && worst.1 >= -TOL, "{worst:?}");
}

#[test]
fn heisenberg_is_violated_by_random_models() {
    let fixed = FixedTargets {
        a: Observable::pauli_z(),
        b: Observable::pauli_x(),
        rho: DensityOperator::qubit_bloch(0.0, 1.0, 0.0).unwrap(),
    };
    for family in [ModelFamily::Process, ModelFamily::Spin] {
        let mut cfg = SearchConfig::new(RelationId::HeisenbergEdr, 1000, 3);
        cfg.fixed = Some(fixed.clone());
        cfg.family = Some(family);
        let res = random_model_search(&cfg).unwrap();
        assert!(res.violations > 0, "{family:?}: {res:?}");
        assert!(res.min_residual.unwrap() < -0.1);
    }
}

#[test]
fn search_results_do_not_depend_on_threads() {
    let cfg = SearchConfig::new(RelationId::MixedEdr, 200, 5);
    let parallel = random_model_search(&cfg).unwrap();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let serial = pool.install(|| random_model_search(&cfg).unwrap());
    assert_eq!(parallel.min_residual, serial.min_residual);
    assert_eq!(parallel.argmin_draw, serial.argmin_draw);
}
