//! Seeded random models.
//!
//! Every draw takes its own ChaCha stream keyed by `(seed, index)`, so a
//! batch gives identical results whether it runs serially or under rayon.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{self, ComplexMatrix};
use crate::qmodel::{DensityOperator, JointModel, MeasuringProcess, Observable};

type M = ComplexMatrix<f64>;

/// Independent random stream `index` under `seed`.
pub fn stream_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Standard complex normal: real and imaginary parts have variance ½.
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * s, im * s)
}

/// Ginibre matrix with i.i.d. standard complex normal entries.
pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> M {
    M::from_fn(rows, cols, |_, _| complex_normal(rng))
}

/// Haar-distributed unitary: Gram–Schmidt QR of a Ginibre matrix, with the
/// diagonal of `R` made real positive.
pub fn haar_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> M {
    loop {
        let g = ginibre(n, n, rng);
        if let Some(q) = orthonormalize_columns(&g) {
            return q;
        }
    }
}

/// Modified Gram–Schmidt with re-orthogonalization; `None` if the columns
/// are numerically dependent.
fn orthonormalize_columns(g: &M) -> Option<M> {
    let n = g.rows();
    let mut cols: Vec<Vec<Complex64>> = (0..g.cols())
        .map(|j| (0..n).map(|i| g[(i, j)]).collect())
        .collect();
    for j in 0..cols.len() {
        for _ in 0..2 {
            for k in 0..j {
                let proj = linalg::inner(&cols[k], &cols[j]);
                let (done, rest) = cols.split_at_mut(j);
                for (x, y) in rest[0].iter_mut().zip(&done[k]) {
                    *x -= proj * y;
                }
            }
        }
        let norm = linalg::ket_norm(&cols[j]);
        if norm < 1e-8 {
            return None;
        }
        for x in cols[j].iter_mut() {
            *x /= norm;
        }
    }
    Some(M::from_fn(n, cols.len(), |i, j| cols[j][i]))
}

/// Gaussian Hermitian matrix `(G + G†)/2`.
pub fn random_hermitian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> M {
    ginibre(n, n, rng).hermitian_part()
}

pub fn random_observable<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Observable<f64> {
    Observable::new(random_hermitian(n, rng)).expect("Hermitian by construction")
}

/// `V S V†` for Haar `V` and a `±1` diagonal `S` containing both signs.
pub fn random_binary_observable<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Observable<f64> {
    assert!(n >= 2, "binary observables need dimension at least 2");
    let minus = rng.random_range(1..n);
    let signs: Vec<f64> = (0..n).map(|i| if i < minus { -1.0 } else { 1.0 }).collect();
    conjugated_diagonal(&signs, &haar_unitary(n, rng))
}

fn conjugated_diagonal(values: &[f64], v: &M) -> Observable<f64> {
    let s = M::diag_real(values);
    Observable::new((&(v * &s) * &v.adjoint()).hermitian_part()).expect("Hermitian by construction")
}

pub fn random_unit_ket<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..n).map(|_| complex_normal(rng)).collect();
    let norm = linalg::ket_norm(&v);
    v.into_iter().map(|z| z / norm).collect()
}

/// Full-rank state `G G† / Tr(G G†)` (Hilbert–Schmidt measure).
pub fn random_density<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DensityOperator<f64> {
    let g = ginibre(n, n, rng);
    let gg = (&g * &g.adjoint()).hermitian_part();
    let tr = gg.trace().re;
    DensityOperator::new(gg.scale_real(1.0 / tr)).expect("positive by construction")
}

pub fn random_pure_state<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DensityOperator<f64> {
    DensityOperator::pure(&random_unit_ket(n, rng)).expect("unit vector")
}

/// Haar interaction, random probe state, Gaussian meter.
pub fn random_process<R: Rng + ?Sized>(sys: usize, probe: usize, rng: &mut R) -> MeasuringProcess<f64> {
    let xi = random_unit_ket(probe, rng);
    let u = haar_unitary(sys * probe, rng);
    let meter = random_observable(probe, rng);
    MeasuringProcess::new(sys, probe, xi, u, meter).expect("valid by construction")
}

/// As [`random_process`] with a `±1` meter.
pub fn random_binary_process<R: Rng + ?Sized>(sys: usize, probe: usize, rng: &mut R) -> MeasuringProcess<f64> {
    let xi = random_unit_ket(probe, rng);
    let u = haar_unitary(sys * probe, rng);
    let meter = random_binary_observable(probe, rng);
    MeasuringProcess::new(sys, probe, xi, u, meter).expect("valid by construction")
}

/// Commuting pair `V diag(x) V†`, `V diag(y) V†` with Gaussian spectra.
pub fn random_joint_model<R: Rng + ?Sized>(sys: usize, probe: usize, rng: &mut R) -> JointModel<f64> {
    let n = sys * probe;
    let v = haar_unitary(n, rng);
    let x: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
    let y: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
    let xi = random_unit_ket(probe, rng);
    JointModel::new(sys, probe, xi, conjugated_diagonal(&x, &v), conjugated_diagonal(&y, &v))
        .expect("commuting by construction")
}

/// Commuting pair of `±1` observables.
pub fn random_binary_joint_model<R: Rng + ?Sized>(sys: usize, probe: usize, rng: &mut R) -> JointModel<f64> {
    let n = sys * probe;
    let v = haar_unitary(n, rng);
    let signs = |rng: &mut R| -> Vec<f64> {
        (0..n).map(|_| if rng.random_bool(0.5) { 1.0 } else { -1.0 }).collect()
    };
    let x = signs(rng);
    let y = signs(rng);
    let xi = random_unit_ket(probe, rng);
    JointModel::new(sys, probe, xi, conjugated_diagonal(&x, &v), conjugated_diagonal(&y, &v))
        .expect("commuting by construction")
}

fn random_unit_3<R: Rng + ?Sized>(rng: &mut R) -> [f64; 3] {
    loop {
        let v: [f64; 3] = [rng.sample(StandardNormal), rng.sample(StandardNormal), rng.sample(StandardNormal)];
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n > 1e-6 {
            return [v[0] / n, v[1] / n, v[2] / n];
        }
    }
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn bloch_observable(n: [f64; 3]) -> Observable<f64> {
    let m = &(&linalg::pauli::x().scale_real(n[0]) + &linalg::pauli::y().scale_real(n[1]))
        + &linalg::pauli::z().scale_real(n[2]);
    Observable::new(m).expect("Hermitian")
}

/// Qubit pair `A = a·σ`, `B = b·σ` with a state satisfying `<A> = <B> = 0`.
///
/// The state's Bloch vector is a uniform multiple in `[-1, 1]` of `a × b`,
/// the only direction orthogonal to both. With `orthogonal` set, `b ⊥ a`
/// and the pair is unitarily equivalent to `(Z, X)`.
pub fn random_zero_mean_qubit_pair<R: Rng + ?Sized>(
    orthogonal: bool,
    rng: &mut R,
) -> (Observable<f64>, Observable<f64>, DensityOperator<f64>) {
    let a = random_unit_3(rng);
    let b = if orthogonal {
        let c = cross(a, random_unit_3(rng));
        let n = (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt();
        [c[0] / n, c[1] / n, c[2] / n]
    } else {
        random_unit_3(rng)
    };
    let c = cross(a, b);
    let cn = (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt();
    let alpha: f64 = rng.random_range(-1.0..=1.0);
    let r = if cn > 1e-9 { [c[0] / cn * alpha, c[1] / cn * alpha, c[2] / cn * alpha] } else { [0.0; 3] };
    let rho = DensityOperator::qubit_bloch(r[0], r[1], r[2]).expect("|r| <= 1");
    (bloch_observable(a), bloch_observable(b), rho)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: f64 = stream_rng(7, 3).sample(StandardNormal);
        let b: f64 = stream_rng(7, 3).sample(StandardNormal);
        let c: f64 = stream_rng(7, 4).sample(StandardNormal);
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn haar_is_unitary() {
        let mut rng = stream_rng(1, 0);
        for n in 1..=9 {
            assert!(haar_unitary(n, &mut rng).unitarity_defect() < 1e-12);
        }
    }

    #[test]
    fn haar_first_moment_vanishes() {
        // E[U] = 0 for Haar U; the mean entry over many draws shrinks like 1/sqrt(N)
        let mut rng = stream_rng(2, 0);
        let n = 3;
        let draws = 4000;
        let mut acc = M::zeros(n, n);
        for _ in 0..draws {
            acc = &acc + &haar_unitary(n, &mut rng);
        }
        let mean = acc.scale_real(1.0 / draws as f64);
        assert!(mean.max_abs() < 0.05, "{}", mean.max_abs());
    }

    #[test]
    fn binary_observables_square_to_identity() {
        let mut rng = stream_rng(3, 0);
        for n in 2..=4 {
            let a = random_binary_observable(n, &mut rng);
            assert!(a.involution_defect() < 1e-12);
        }
    }

    #[test]
    fn zero_mean_pairs() {
        let mut rng = stream_rng(4, 0);
        for orthogonal in [false, true] {
            for _ in 0..50 {
                let (a, b, rho) = random_zero_mean_qubit_pair(orthogonal, &mut rng);
                assert!(rho.expect(a.matrix()).unwrap().abs() < 1e-12);
                assert!(rho.expect(b.matrix()).unwrap().abs() < 1e-12);
                if orthogonal {
                    let ab = (a.matrix() * b.matrix()).trace().re;
                    assert!(ab.abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn random_states_are_valid() {
        let mut rng = stream_rng(5, 0);
        for n in 2..=3 {
            let rho = random_density(n, &mut rng);
            assert!((rho.matrix().trace().re - 1.0).abs() < 1e-12);
            let pure = random_pure_state(n, &mut rng);
            assert!(pure.linear_entropy().abs() < 1e-12);
        }
    }
}
