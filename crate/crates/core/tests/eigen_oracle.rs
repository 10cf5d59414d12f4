use edr_core::linalg::{eig_hermitian, trace_norm};
use edr_core::sampling::{random_hermitian, stream_rng};
use nalgebra::DMatrix;

#[test]
fn eigenvalues_match_nalgebra() {
    for i in 0..300u64 {
        let n = 1 + (i % 12) as usize;
        let h = random_hermitian(n, &mut stream_rng(31, i));
        let ours = eig_hermitian(&h).unwrap();
        let reference = DMatrix::from_fn(n, n, |r, c| h[(r, c)]).symmetric_eigen();
        let mut theirs: Vec<f64> = reference.eigenvalues.iter().copied().collect();
        theirs.sort_by(f64::total_cmp);
        for (x, y) in ours.values.iter().zip(&theirs) {
            assert!((x - y).abs() < 1e-10 * (1.0 + y.abs()), "n={n}: {x} vs {y}");
        }
        let tn: f64 = theirs.iter().map(|v| v.abs()).sum();
        assert!((trace_norm(&h).unwrap() - tn).abs() < 1e-9 * (1.0 + tn));
    }
}
