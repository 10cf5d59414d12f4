//! States, observables, measuring processes and joint measurement models,
//! together with the first and second moments built from them.
//!
//! Composite operators live on `system ⊗ probe` with the system factor first.

use num_complex::Complex;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{mismatch, Error, Result};
use crate::linalg::{self, eig_hermitian, tensor, ComplexMatrix, HermitianEigen};
use crate::scalar::Real;

/// Trace tolerance for density operators.
pub const TRACE_TOL: f64 = 1e-10;
/// Probe states must be unit vectors to this precision.
pub const KET_NORM_TOL: f64 = 1e-12;
/// `||U†U - I||_F` bound for interactions.
pub const UNITARY_TOL: f64 = 1e-10;
/// Relative commutator bound for joint observables.
pub const COMMUTE_TOL: f64 = 1e-8;
/// Round-off allowance for second moments before taking square roots.
pub const MOMENT_CLAMP: f64 = 1e-12;
/// `σ(𝒜)`, `σ(ℬ)` below this are treated as vanishing.
pub const SIGMA_FLOOR: f64 = 1e-10;

/// A self-adjoint operator.
#[derive(Debug, Clone, PartialEq)]
pub struct Observable<T> {
    matrix: ComplexMatrix<T>,
}

impl<T: Real> Observable<T> {
    pub fn new(matrix: ComplexMatrix<T>) -> Result<Self> {
        matrix.dim()?;
        matrix.hermitian_check().into_result("observable")?;
        Ok(Self { matrix })
    }

    /// Wraps a matrix that is Hermitian by construction, symmetrizing away
    /// round-off.
    pub(crate) fn from_exact(matrix: ComplexMatrix<T>) -> Self {
        Self { matrix: matrix.hermitian_part() }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix<T> {
        self.matrix
    }

    /// `A ⊗ I_k`.
    pub fn lift_first(&self, k: usize) -> ComplexMatrix<T> {
        tensor(&self.matrix, &ComplexMatrix::identity(k))
    }

    /// `I_d ⊗ A`.
    pub fn lift_second(&self, d: usize) -> ComplexMatrix<T> {
        tensor(&ComplexMatrix::identity(d), &self.matrix)
    }

    /// `||A² - I||_F`.
    pub fn involution_defect(&self) -> T {
        (&self.matrix * &self.matrix).distance(&ComplexMatrix::identity(self.dim()))
    }

    pub fn pauli_x() -> Self {
        Self { matrix: linalg::pauli::x() }
    }

    pub fn pauli_y() -> Self {
        Self { matrix: linalg::pauli::y() }
    }

    pub fn pauli_z() -> Self {
        Self { matrix: linalg::pauli::z() }
    }
}

/// A density operator with cached spectral data and square root.
#[derive(Debug, Clone)]
pub struct DensityOperator<T> {
    rho: ComplexMatrix<T>,
    sqrt_rho: ComplexMatrix<T>,
    eigen: HermitianEigen<T>,
}

impl<T: Real> DensityOperator<T> {
    pub fn new(rho: ComplexMatrix<T>) -> Result<Self> {
        rho.dim()?;
        rho.hermitian_check().into_result("density operator")?;
        let tr = rho.trace();
        if (tr.re - T::one()).abs() > T::tol(TRACE_TOL) || tr.im.abs() > T::tol(TRACE_TOL) {
            return Err(Error::BadTrace { trace: tr.re.to_f64().unwrap_or(f64::NAN) });
        }
        let eigen = eig_hermitian(&rho)?;
        let sqrt_rho = linalg::sqrt_from_eigen(&eigen, "density operator")?;
        Ok(Self { rho: rho.hermitian_part(), sqrt_rho, eigen })
    }

    pub fn pure(ket: &[Complex<T>]) -> Result<Self> {
        let norm = linalg::ket_norm(ket);
        if (norm - T::one()).abs() > T::tol(KET_NORM_TOL) {
            return Err(Error::NotNormalized { what: "pure state", norm: norm.to_f64().unwrap_or(f64::NAN) });
        }
        Self::new(linalg::outer(ket))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        let n = T::from_usize(dim).expect("dimension");
        Self::new(ComplexMatrix::identity(dim).scale_real(T::one() / n)).expect("I/d is a state")
    }

    /// `(I + x X + y Y + z Z) / 2` for a Bloch vector of length at most one.
    pub fn qubit_bloch(x: T, y: T, z: T) -> Result<Self> {
        let half = T::lit(0.5);
        let m = &(&linalg::pauli::x().scale_real(x) + &linalg::pauli::y().scale_real(y))
            + &linalg::pauli::z().scale_real(z);
        Self::new((&ComplexMatrix::identity(2) + &m).scale_real(half))
    }

    pub fn dim(&self) -> usize {
        self.rho.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.rho
    }

    pub fn sqrt(&self) -> &ComplexMatrix<T> {
        &self.sqrt_rho
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> &[T] {
        &self.eigen.values
    }

    pub fn eigen(&self) -> &HermitianEigen<T> {
        &self.eigen
    }

    /// `Re Tr[X ρ]`.
    pub fn expect(&self, x: &ComplexMatrix<T>) -> Result<T> {
        Ok(self.expect_complex(x)?.re)
    }

    pub fn expect_complex(&self, x: &ComplexMatrix<T>) -> Result<Complex<T>> {
        if x.rows() != self.dim() || x.cols() != self.dim() {
            return Err(mismatch("expectation", self.dim(), format!("{}x{}", x.rows(), x.cols())));
        }
        x.trace_product(&self.rho)
    }

    /// `1 - Tr ρ²`; zero for pure states.
    pub fn linear_entropy(&self) -> T {
        T::one() - self.eigen.values.iter().map(|&p| p * p).sum::<T>()
    }
}

fn check_dim<T: Real>(what: &'static str, m: &ComplexMatrix<T>, n: usize) -> Result<()> {
    if m.rows() != n || m.cols() != n {
        return Err(mismatch(what, format!("{n}x{n}"), format!("{}x{}", m.rows(), m.cols())));
    }
    Ok(())
}

fn unit_ket<T: Real>(what: &'static str, ket: &[Complex<T>]) -> Result<()> {
    let norm = linalg::ket_norm(ket);
    if (norm - T::one()).abs() > T::tol(KET_NORM_TOL) {
        return Err(Error::NotNormalized { what, norm: norm.to_f64().unwrap_or(f64::NAN) });
    }
    Ok(())
}

/// `sqrt(v)` after clamping round-off negatives.
pub(crate) fn root_of_moment<T: Real>(what: &'static str, v: T) -> Result<T> {
    v.clamp_nonneg(T::tol(MOMENT_CLAMP))
        .map(T::sqrt)
        .ok_or_else(|| Error::NegativeRadicand { what, value: v.to_f64().unwrap_or(f64::NAN) })
}

/// The product state `ρ ⊗ |ξ><ξ|`.
fn product_state<T: Real>(rho: &DensityOperator<T>, xi: &[Complex<T>]) -> ComplexMatrix<T> {
    tensor(rho.matrix(), &linalg::outer(xi))
}

/// Contracts the probe factor of an operator on `system ⊗ probe` against
/// `|ξ>`: the unique system operator with `<φ|n|ψ> = <φ⊗ξ|N|ψ⊗ξ>`.
pub fn contract_probe<T: Real>(
    op: &ComplexMatrix<T>,
    sys_dim: usize,
    xi: &[Complex<T>],
) -> Result<ComplexMatrix<T>> {
    let k = xi.len();
    check_dim("probe contraction", op, sys_dim * k)?;
    Ok(ComplexMatrix::from_fn(sys_dim, sys_dim, |i, j| {
        let mut acc = Complex::zero();
        for p in 0..k {
            for q in 0..k {
                acc += xi[p].conj() * op[(i * k + p, j * k + q)] * xi[q];
            }
        }
        acc
    }))
}

/// A measuring process `(K, |ξ>, U, M)`.
#[derive(Debug, Clone)]
pub struct MeasuringProcess<T> {
    sys_dim: usize,
    probe_dim: usize,
    probe_state: Vec<Complex<T>>,
    interaction: ComplexMatrix<T>,
    meter: Observable<T>,
}

/// Which operator to carry through the interaction.
#[derive(Debug, Clone, Copy)]
pub enum Evolved<'a, T> {
    /// `M(Δt) = U†(I ⊗ M)U`.
    Meter,
    /// `B(Δt) = U†(B ⊗ I)U`.
    System(&'a Observable<T>),
}

impl<T: Real> MeasuringProcess<T> {
    pub fn new(
        sys_dim: usize,
        probe_dim: usize,
        probe_state: Vec<Complex<T>>,
        interaction: ComplexMatrix<T>,
        meter: Observable<T>,
    ) -> Result<Self> {
        if sys_dim == 0 || probe_dim == 0 {
            return Err(Error::Empty);
        }
        if probe_state.len() != probe_dim {
            return Err(mismatch("probe state", probe_dim, probe_state.len()));
        }
        unit_ket("probe state", &probe_state)?;
        check_dim("interaction", &interaction, sys_dim * probe_dim)?;
        let defect = interaction.unitarity_defect();
        if defect > T::tol(UNITARY_TOL) {
            return Err(Error::NotUnitary { what: "interaction", deviation: defect.to_f64().unwrap_or(f64::NAN) });
        }
        check_dim("meter", meter.matrix(), probe_dim)?;
        Ok(Self { sys_dim, probe_dim, probe_state, interaction, meter })
    }

    pub fn sys_dim(&self) -> usize {
        self.sys_dim
    }

    pub fn probe_dim(&self) -> usize {
        self.probe_dim
    }

    pub fn probe_state(&self) -> &[Complex<T>] {
        &self.probe_state
    }

    pub fn interaction(&self) -> &ComplexMatrix<T> {
        &self.interaction
    }

    pub fn meter(&self) -> &Observable<T> {
        &self.meter
    }

    fn check_system(&self, what: &'static str, a: &Observable<T>) -> Result<()> {
        check_dim(what, a.matrix(), self.sys_dim)
    }

    fn check_state(&self, rho: &DensityOperator<T>) -> Result<()> {
        check_dim("state", rho.matrix(), self.sys_dim)
    }

    /// Heisenberg picture after the interaction.
    pub fn heisenberg_evolve(&self, which: Evolved<'_, T>) -> Result<Observable<T>> {
        let lifted = match which {
            Evolved::Meter => self.meter.lift_second(self.sys_dim),
            Evolved::System(b) => {
                self.check_system("observable", b)?;
                b.lift_first(self.probe_dim)
            }
        };
        let u = &self.interaction;
        Ok(Observable::from_exact(&(&u.adjoint() * &lifted) * u))
    }

    /// `N(A) = M(Δt) - A ⊗ I`.
    pub fn error_observable(&self, a: &Observable<T>) -> Result<Observable<T>> {
        self.check_system("observable", a)?;
        let m = self.heisenberg_evolve(Evolved::Meter)?;
        Ok(Observable::from_exact(m.matrix() - &a.lift_first(self.probe_dim)))
    }

    /// `D(B) = B(Δt) - B ⊗ I`.
    pub fn disturbance_observable(&self, b: &Observable<T>) -> Result<Observable<T>> {
        let bt = self.heisenberg_evolve(Evolved::System(b))?;
        Ok(Observable::from_exact(bt.matrix() - &b.lift_first(self.probe_dim)))
    }

    fn second_moment(&self, what: &'static str, op: &Observable<T>, rho: &DensityOperator<T>) -> Result<T> {
        self.check_state(rho)?;
        let state = product_state(rho, &self.probe_state);
        let sq = op.matrix() * op.matrix();
        root_of_moment(what, sq.trace_product(&state)?.re)
    }

    /// `ε(A) = Tr[N(A)² ρ⊗|ξ><ξ|]^{1/2}`.
    pub fn rms_error(&self, a: &Observable<T>, rho: &DensityOperator<T>) -> Result<T> {
        let n = self.error_observable(a)?;
        self.second_moment("rms error", &n, rho)
    }

    /// `η(B) = Tr[D(B)² ρ⊗|ξ><ξ|]^{1/2}`.
    pub fn rms_disturbance(&self, b: &Observable<T>, rho: &DensityOperator<T>) -> Result<T> {
        let d = self.disturbance_observable(b)?;
        self.second_moment("rms disturbance", &d, rho)
    }

    /// The joint model `(K, |ξ>, M(Δt), B(Δt))`.
    pub fn to_joint_model(&self, b: &Observable<T>) -> Result<JointModel<T>> {
        let cal_a = self.heisenberg_evolve(Evolved::Meter)?;
        let cal_b = self.heisenberg_evolve(Evolved::System(b))?;
        JointModel::new(self.sys_dim, self.probe_dim, self.probe_state.clone(), cal_a, cal_b)
    }

    /// `(n(A), d(B))`: probe contractions of `N(A)` and `D(B)`.
    pub fn first_moment_operators(
        &self,
        a: &Observable<T>,
        b: &Observable<T>,
    ) -> Result<(Observable<T>, Observable<T>)> {
        let n = self.error_observable(a)?;
        let d = self.disturbance_observable(b)?;
        Ok((
            Observable::from_exact(contract_probe(n.matrix(), self.sys_dim, &self.probe_state)?),
            Observable::from_exact(contract_probe(d.matrix(), self.sys_dim, &self.probe_state)?),
        ))
    }
}

/// `σ(A)² = <A²> - <A>²` in `ρ`.
pub fn std_dev<T: Real>(a: &Observable<T>, rho: &DensityOperator<T>) -> Result<T> {
    let mean = rho.expect(a.matrix())?;
    let sq = rho.expect(&(a.matrix() * a.matrix()))?;
    root_of_moment("standard deviation", sq - mean * mean)
}

/// Output channel of a joint measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Channel {
    A,
    B,
}

/// A joint measurement model `(K, |ξ>, 𝒜, ℬ)` with commuting outputs.
#[derive(Debug, Clone)]
pub struct JointModel<T> {
    sys_dim: usize,
    probe_dim: usize,
    probe_state: Vec<Complex<T>>,
    cal_a: Observable<T>,
    cal_b: Observable<T>,
}

impl<T: Real> JointModel<T> {
    pub fn new(
        sys_dim: usize,
        probe_dim: usize,
        probe_state: Vec<Complex<T>>,
        cal_a: Observable<T>,
        cal_b: Observable<T>,
    ) -> Result<Self> {
        if sys_dim == 0 || probe_dim == 0 {
            return Err(Error::Empty);
        }
        if probe_state.len() != probe_dim {
            return Err(mismatch("probe state", probe_dim, probe_state.len()));
        }
        unit_ket("probe state", &probe_state)?;
        let n = sys_dim * probe_dim;
        check_dim("joint observable A", cal_a.matrix(), n)?;
        check_dim("joint observable B", cal_b.matrix(), n)?;
        let comm = linalg::commutator(cal_a.matrix(), cal_b.matrix())?.frobenius_norm();
        let tolerance = T::tol(COMMUTE_TOL)
            * (T::one() + cal_a.matrix().frobenius_norm() * cal_b.matrix().frobenius_norm());
        if comm > tolerance {
            return Err(Error::NotCommuting {
                norm: comm.to_f64().unwrap_or(f64::NAN),
                tolerance: tolerance.to_f64().unwrap_or(0.0),
            });
        }
        Ok(Self { sys_dim, probe_dim, probe_state, cal_a, cal_b })
    }

    pub fn sys_dim(&self) -> usize {
        self.sys_dim
    }

    pub fn probe_dim(&self) -> usize {
        self.probe_dim
    }

    pub fn probe_state(&self) -> &[Complex<T>] {
        &self.probe_state
    }

    pub fn output(&self, channel: Channel) -> &Observable<T> {
        match channel {
            Channel::A => &self.cal_a,
            Channel::B => &self.cal_b,
        }
    }

    fn state(&self, rho: &DensityOperator<T>) -> Result<ComplexMatrix<T>> {
        check_dim("state", rho.matrix(), self.sys_dim)?;
        Ok(product_state(rho, &self.probe_state))
    }

    /// `𝒜 - A ⊗ I` (resp. `ℬ - B ⊗ I`).
    pub fn noise_operator(&self, target: &Observable<T>, channel: Channel) -> Result<ComplexMatrix<T>> {
        check_dim("observable", target.matrix(), self.sys_dim)?;
        Ok(self.output(channel).matrix() - &target.lift_first(self.probe_dim))
    }

    /// `ε(A, 𝒜, ρ)` or `ε(B, ℬ, ρ)`.
    pub fn joint_rms_error(&self, target: &Observable<T>, channel: Channel, rho: &DensityOperator<T>) -> Result<T> {
        let noise = self.noise_operator(target, channel)?;
        let state = self.state(rho)?;
        root_of_moment("joint rms error", (&noise * &noise).trace_product(&state)?.re)
    }

    /// Probe contraction of `𝒜 - A⊗I` (resp. `ℬ - B⊗I`). For a model built
    /// from a measuring process these are `n(A)` and `d(B)`.
    pub fn first_moment_operator(&self, target: &Observable<T>, channel: Channel) -> Result<Observable<T>> {
        let noise = self.noise_operator(target, channel)?;
        Ok(Observable::from_exact(contract_probe(&noise, self.sys_dim, &self.probe_state)?))
    }

    pub fn moments(&self, a: &Observable<T>, b: &Observable<T>, rho: &DensityOperator<T>) -> Result<MomentSet<T>> {
        let state = self.state(rho)?;
        let mut out = MomentSet::default();
        for (channel, target) in [(Channel::A, a), (Channel::B, b)] {
            let noise = self.noise_operator(target, channel)?;
            let eps = root_of_moment("joint rms error", (&noise * &noise).trace_product(&state)?.re)?;
            let delta = noise.trace_product(&state)?.re;
            let output = self.output(channel).matrix();
            let mean = output.trace_product(&state)?.re;
            let sq = (output * output).trace_product(&state)?.re;
            let sigma_out = root_of_moment("output standard deviation", sq - mean * mean)?;
            let sigma = std_dev(target, rho)?;
            match channel {
                Channel::A => {
                    out.eps_a = eps;
                    out.delta_a = delta;
                    out.sigma_cal_a = sigma_out;
                    out.sigma_a = sigma;
                }
                Channel::B => {
                    out.eps_b = eps;
                    out.delta_b = delta;
                    out.sigma_cal_b = sigma_out;
                    out.sigma_b = sigma;
                }
            }
        }
        Ok(out)
    }
}

/// Errors, standard deviations and biases of a joint measurement of `(A, B)`.
///
/// For a measuring process `eps_b` is the rms disturbance `η(B)`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct MomentSet<T> {
    pub eps_a: T,
    pub eps_b: T,
    pub sigma_a: T,
    pub sigma_b: T,
    pub sigma_cal_a: T,
    pub sigma_cal_b: T,
    pub delta_a: T,
    pub delta_b: T,
}

impl<T: Real> MomentSet<T> {
    /// `σ(𝒜)` and `σ(ℬ)` both above [`SIGMA_FLOOR`].
    pub fn outputs_fluctuate(&self) -> bool {
        let floor = T::lit(SIGMA_FLOOR);
        self.sigma_cal_a >= floor && self.sigma_cal_b >= floor
    }
}
