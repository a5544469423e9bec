//! Synthetic generators: Pauli connections, the sphere tangent-frame loop,
//! the Abelian spin-coherent loop, transfer-matrix frame extraction, and
//! analytic reference holonomies.

use num_complex::Complex;
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{expm_antihermitian, orthonormalize, real, ComplexMatrix, Scalar};
use crate::transport::{Frame, FramePath};

/// Anti-Hermitian connection A(t) on a rank-m logical space.
pub struct ConnectionModel<T> {
    logical_rank: usize,
    eval: Box<dyn Fn(T) -> ComplexMatrix<T> + Send + Sync>,
}

impl<T: Scalar> ConnectionModel<T> {
    pub fn new(
        logical_rank: usize,
        eval: impl Fn(T) -> ComplexMatrix<T> + Send + Sync + 'static,
    ) -> Self {
        Self {
            logical_rank,
            eval: Box::new(eval),
        }
    }

    pub fn logical_rank(&self) -> usize {
        self.logical_rank
    }

    /// A(t); anti-Hermitian by construction for the built-in models.
    pub fn evaluate(&self, t: T) -> ComplexMatrix<T> {
        (self.eval)(t)
    }
}

/// Uniform partition of [t_start, t_end] into N steps.
#[derive(Clone, Copy, Debug)]
pub struct Partition<T> {
    pub t_start: T,
    pub t_end: T,
    pub steps: usize,
}

impl<T: Scalar> Partition<T> {
    pub fn new(t_start: T, t_end: T, steps: usize) -> Result<Self> {
        if steps < 1 || t_end <= t_start {
            return Err(Error::Domain(
                "partition needs N >= 1 and t_end > t_start".into(),
            ));
        }
        Ok(Self {
            t_start,
            t_end,
            steps,
        })
    }

    pub fn mesh(&self) -> T {
        (self.t_end - self.t_start) / real::<T>(self.steps as f64)
    }

    pub fn node(&self, k: usize) -> T {
        self.t_start + self.mesh() * real::<T>(k as f64)
    }

    /// Partition with `factor` times as many steps.
    pub fn refined(&self, factor: usize) -> Self {
        Self {
            t_start: self.t_start,
            t_end: self.t_end,
            steps: self.steps * factor,
        }
    }
}

/// A(t) = i(a_x(t)σ_x + a_y(t)σ_y + a_z(t)σ_z): a rank-2 connection that is
/// anti-Hermitian by construction and noncommuting whenever the coefficient
/// ratios vary along the path.
pub fn pauli_connection<T: Scalar>(
    ax: impl Fn(T) -> T + Send + Sync + 'static,
    ay: impl Fn(T) -> T + Send + Sync + 'static,
    az: impl Fn(T) -> T + Send + Sync + 'static,
) -> ConnectionModel<T> {
    ConnectionModel::new(2, move |t| {
        let (x, y, z) = (ax(t), ay(t), az(t));
        // i(xσ_x + yσ_y + zσ_z)
        ComplexMatrix::from_fn(2, 2, |i, j| match (i, j) {
            (0, 0) => Complex::new(T::zero(), z),
            (0, 1) => Complex::new(y, x),
            (1, 0) => Complex::new(-y, x),
            (1, 1) => Complex::new(T::zero(), -z),
            _ => unreachable!(),
        })
    })
}

/// The noncommuting rank-2 benchmark connection
/// A(t) = i[0.7·cos(t)·σ_x + 0.4·sin(2t)·σ_y + 0.2·σ_z].
pub fn benchmark_connection<T: Scalar>() -> ConnectionModel<T> {
    pauli_connection(
        |t: T| real::<T>(0.7) * t.cos(),
        |t: T| real::<T>(0.4) * (t + t).sin(),
        |_t: T| real::<T>(0.2),
    )
}

/// Midpoint ordered product of exp(−A(t_mid)Δt) over the partition,
/// earliest step applied first (rightmost factor).
pub fn discrete_ordered_product<T: Scalar>(
    model: &ConnectionModel<T>,
    partition: &Partition<T>,
) -> Result<ComplexMatrix<T>> {
    let h = partition.mesh();
    let half = h / real::<T>(2.0);
    let mut u = ComplexMatrix::<T>::identity(model.logical_rank());
    for k in 0..partition.steps {
        let t_mid = partition.node(k) + half;
        let a = model.evaluate(t_mid);
        let step = expm_antihermitian(&a.scale_real(-h))?;
        u = step.matmul(&u);
    }
    Ok(u)
}

/// Reference transport U_ref ≈ P-exp(−∫A dt), computed as the midpoint
/// ordered product on the partition refined by `refine_factor`.
pub fn reference_transport<T: Scalar>(
    model: &ConnectionModel<T>,
    partition: &Partition<T>,
    refine_factor: usize,
) -> Result<ComplexMatrix<T>> {
    if refine_factor < 1 {
        return Err(Error::Domain("refine_factor must be >= 1".into()));
    }
    discrete_ordered_product(model, &partition.refined(refine_factor))
}

/// Rank-2 tangent-frame loop on the sphere at fixed polar angle θ_0:
/// frames (e_θ, e_φ) sampled at φ_k = 2πk/N, closed exactly by reusing the
/// first frame as the last.
pub fn tangent_frame_loop<T: Scalar>(theta0: T, n: usize) -> Result<FramePath<T>> {
    let pi = real::<T>(std::f64::consts::PI);
    if theta0 <= T::zero() || theta0 >= pi {
        return Err(Error::Domain(
            "tangent frames degenerate at the poles; need 0 < theta0 < pi".into(),
        ));
    }
    if n < 3 {
        return Err(Error::Domain("tangent-frame loop needs N >= 3".into()));
    }
    let two_pi = pi + pi;
    let (st, ct) = (theta0.sin(), theta0.cos());
    let frame_at = |phi: T| -> Result<Frame<T>> {
        let (sp, cp) = (phi.sin(), phi.cos());
        let zero = T::zero();
        let entries = vec![
            Complex::new(ct * cp, zero),
            Complex::new(-sp, zero),
            Complex::new(ct * sp, zero),
            Complex::new(cp, zero),
            Complex::new(-st, zero),
            Complex::new(zero, zero),
        ];
        Frame::new(ComplexMatrix::from_entries(3, 2, entries)?)
    };
    let mut frames = Vec::with_capacity(n + 1);
    for k in 0..n {
        frames.push(frame_at(
            two_pi * real::<T>(k as f64) / real::<T>(n as f64),
        )?);
    }
    frames.push(frames[0].clone());
    let params: Vec<T> = (0..=n)
        .map(|k| two_pi * real::<T>(k as f64) / real::<T>(n as f64))
        .collect();
    FramePath::new(frames, params, true)
}

/// The exact connection of the tangent-frame loop per unit φ:
/// A_φ = [[0, −cosθ_0], [cosθ_0, 0]].
pub fn tangent_connection<T: Scalar>(theta0: T) -> ComplexMatrix<T> {
    let ct = theta0.cos();
    let zero = T::zero();
    ComplexMatrix::from_fn(2, 2, |i, j| match (i, j) {
        (0, 1) => Complex::new(-ct, zero),
        (1, 0) => Complex::new(ct, zero),
        _ => Complex::new(zero, zero),
    })
}

/// Exact tangent-loop holonomy U_ref = exp(−2π·A_φ): a rotation by
/// −2π·cosθ_0.
pub fn exact_tangent_holonomy<T: Scalar>(theta0: T) -> Result<ComplexMatrix<T>> {
    let two_pi = real::<T>(2.0 * std::f64::consts::PI);
    let a = tangent_connection(theta0).scale_real(-two_pi);
    expm_antihermitian(&a)
}

/// m = 1 loop of spin-coherent vectors
/// u(φ_k) = (cos(θ_0/2), e^{iφ_k}·sin(θ_0/2)) in d = 2, closed exactly.
pub fn abelian_loop<T: Scalar>(theta0: T, n: usize) -> Result<FramePath<T>> {
    let pi = real::<T>(std::f64::consts::PI);
    if theta0 < T::zero() || theta0 >= pi {
        return Err(Error::Domain("abelian loop needs 0 <= theta0 < pi".into()));
    }
    if n < 3 {
        return Err(Error::Domain("abelian loop needs N >= 3".into()));
    }
    let two_pi = pi + pi;
    let half = theta0 / real::<T>(2.0);
    let (c0, s0) = (half.cos(), half.sin());
    let mut frames = Vec::with_capacity(n + 1);
    for k in 0..n {
        let phi = two_pi * real::<T>(k as f64) / real::<T>(n as f64);
        let entries = vec![
            Complex::new(c0, T::zero()),
            Complex::new(phi.cos() * s0, phi.sin() * s0),
        ];
        frames.push(Frame::new(ComplexMatrix::from_entries(2, 1, entries)?)?);
    }
    frames.push(frames[0].clone());
    let params: Vec<T> = (0..=n)
        .map(|k| two_pi * real::<T>(k as f64) / real::<T>(n as f64))
        .collect();
    FramePath::new(frames, params, true)
}

/// Exact Berry phase of the spin-coherent loop: the m = 1 holonomy is
/// e^{−iπ(1 − cosθ_0)} (phase reported in (−π, π]).
pub fn exact_abelian_phase<T: Scalar>(theta0: T) -> T {
    let pi = real::<T>(std::f64::consts::PI);
    let mut phase = -pi * (T::one() - theta0.cos());
    let two_pi = pi + pi;
    while phase <= -pi {
        phase = phase + two_pi;
    }
    while phase > pi {
        phase = phase - two_pi;
    }
    phase
}

/// Extracts a frame path from device-style transfer matrices by
/// orthonormalizing T_k·Φ_in at every control sample (deterministic QR
/// gauge fix); parameter values are the sample indices.
pub fn frames_from_transfer_model<T: Scalar>(
    transfer_matrices: &[ComplexMatrix<T>],
    input_frame: &Frame<T>,
) -> Result<FramePath<T>> {
    if transfer_matrices.len() < 2 {
        return Err(Error::Domain("need at least two transfer matrices".into()));
    }
    let d = input_frame.ambient_dim();
    let mut frames = Vec::with_capacity(transfer_matrices.len());
    for (k, t) in transfer_matrices.iter().enumerate() {
        if t.rows() != d || t.cols() != d {
            return Err(Error::DimensionMismatch {
                expected: format!("{d}x{d} transfer matrix at index {k}"),
                got: format!("{}x{}", t.rows(), t.cols()),
            });
        }
        let propagated = t.matmul(input_frame.matrix());
        let phi = orthonormalize(&propagated, real::<T>(1e-12))
            .map_err(|_| Error::RankDeficient { index: Some(k) })?;
        frames.push(Frame::new(phi)?);
    }
    let params: Vec<T> = (0..frames.len()).map(|k| real::<T>(k as f64)).collect();
    // Closure is a property of the supplied transfer loop, not assumed here.
    FramePath::new(frames, params, false)
}

/// Smooth closed synthetic subspace loop of rank m in ambient dimension d:
/// Φ(t) = exp(X₁ sin t)·exp(X₂ (1 − cos t))·Φ₀ over t ∈ [0, 2π], with random
/// anti-Hermitian generators. Used by the gauge and noise harnesses.
pub fn synthetic_subspace_loop<T: Scalar>(
    d: usize,
    m: usize,
    n: usize,
    rng: &mut impl Rng,
) -> Result<FramePath<T>> {
    if d < m || m < 1 || n < 3 {
        return Err(Error::Domain(
            "synthetic loop needs d >= m >= 1 and N >= 3".into(),
        ));
    }
    let x1 = random_antihermitian::<T>(d, real::<T>(0.4), rng);
    let x2 = random_antihermitian::<T>(d, real::<T>(0.4), rng);
    let phi0 = ComplexMatrix::from_fn(d, m, |i, j| {
        if i == j {
            Complex::new(T::one(), T::zero())
        } else {
            Complex::new(T::zero(), T::zero())
        }
    });
    let two_pi = real::<T>(2.0 * std::f64::consts::PI);
    let mut frames = Vec::with_capacity(n + 1);
    for k in 0..n {
        let t = two_pi * real::<T>(k as f64) / real::<T>(n as f64);
        let q1 = expm_antihermitian(&x1.scale_real(t.sin()))?;
        let q2 = expm_antihermitian(&x2.scale_real(T::one() - t.cos()))?;
        frames.push(Frame::new(&(&q1 * &q2) * &phi0)?);
    }
    frames.push(frames[0].clone());
    let params: Vec<T> = (0..=n)
        .map(|k| two_pi * real::<T>(k as f64) / real::<T>(n as f64))
        .collect();
    FramePath::new(frames, params, true)
}

fn random_antihermitian<T: Scalar>(d: usize, scale: T, rng: &mut impl Rng) -> ComplexMatrix<T> {
    let g = ComplexMatrix::from_fn(d, d, |_, _| {
        Complex::new(
            real::<T>(rng.gen::<f64>() - 0.5),
            real::<T>(rng.gen::<f64>() - 0.5),
        )
    });
    (&g - &g.adjoint()).scale_real(scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transport::overlaps_from_frames;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    type M = ComplexMatrix<f64>;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn zero_coefficients_give_zero_connection() {
        let model = pauli_connection(|_: f64| 0.0, |_| 0.0, |_| 0.0);
        let a = model.evaluate(1.3);
        assert!(a.frobenius_norm() < 1e-15);
    }

    #[test]
    fn benchmark_connection_at_zero() {
        // A(0) = i(0.7σ_x + 0.2σ_z)
        let model = benchmark_connection::<f64>();
        let a = model.evaluate(0.0);
        let expect = M::from_rows(&[
            vec![c(0.0, 0.2), c(0.0, 0.7)],
            vec![c(0.0, 0.7), c(0.0, -0.2)],
        ])
        .unwrap();
        assert!((&a - &expect).frobenius_norm() < 1e-14);
        assert!(a.antihermiticity_residual() < 1e-15);
    }

    #[test]
    fn benchmark_connection_does_not_commute() {
        let model = benchmark_connection::<f64>();
        let a0 = model.evaluate(0.0);
        let a1 = model.evaluate(PI / 2.0);
        let comm = &(&a0 * &a1) - &(&a1 * &a0);
        assert!(comm.frobenius_norm() > 0.1);
    }

    #[test]
    fn zero_connection_transports_to_identity() {
        let model = pauli_connection(|_: f64| 0.0, |_| 0.0, |_| 0.0);
        let p = Partition::new(0.0, 2.0 * PI, 16).unwrap();
        let u = reference_transport(&model, &p, 4).unwrap();
        assert!((&u - &M::identity(2)).frobenius_norm() < 1e-14);
    }

    #[test]
    fn constant_connection_is_exact_exponential() {
        let model = pauli_connection(|_: f64| 0.3, |_| 0.0, |_| 0.1);
        let t_end = 1.5;
        let p = Partition::new(0.0, t_end, 1).unwrap();
        let u = discrete_ordered_product(&model, &p).unwrap();
        let exact = expm_antihermitian(&model.evaluate(0.0).scale_real(-t_end)).unwrap();
        assert!((&u - &exact).frobenius_norm() < 1e-12);
    }

    #[test]
    fn reference_transport_self_consistency() {
        let model = benchmark_connection::<f64>();
        let p = Partition::new(0.0, 2.0 * PI, 640).unwrap();
        // Both references carry O(h²) error at their own mesh; doubling the
        // refinement should move the result by no more than that.
        let u16 = reference_transport(&model, &p, 16).unwrap();
        let u32 = reference_transport(&model, &p, 32).unwrap();
        assert!((&u16 - &u32).frobenius_norm() < 1e-6);
        assert!(u16.unitarity_residual() < 1e-12);
    }

    #[test]
    fn tangent_loop_frames_are_orthonormal_and_closed() {
        let path = tangent_frame_loop(0.7, 24).unwrap();
        assert_eq!(path.len(), 25);
        for f in path.frames() {
            assert!(f.matrix().unitarity_residual() < 1e-14);
        }
        let first = path.frames().first().unwrap().matrix();
        let last = path.frames().last().unwrap().matrix();
        assert!((first - last).frobenius_norm() == 0.0);
    }

    #[test]
    fn tangent_loop_rejects_poles() {
        assert!(tangent_frame_loop(0.0, 10).is_err());
        assert!(tangent_frame_loop(PI, 10).is_err());
    }

    #[test]
    fn equator_holonomy_is_identity() {
        let u = exact_tangent_holonomy(PI / 2.0).unwrap();
        assert!((&u - &M::identity(2)).frobenius_norm() < 1e-12);
    }

    #[test]
    fn exact_tangent_holonomy_benchmark_eigenphases() {
        let u = exact_tangent_holonomy(0.7f64).unwrap();
        assert!(u.unitarity_residual() < 1e-13);
        let phases = crate::linalg::eigenphases(&u).unwrap();
        assert!((phases[0] + 1.47754).abs() < 1e-4, "{phases:?}");
        assert!((phases[1] - 1.47754).abs() < 1e-4, "{phases:?}");
        assert!((0.7f64.cos() - 0.76484).abs() < 1e-5);
    }

    #[test]
    fn tangent_discrete_connection_approaches_exact() {
        // (Φ_k†Φ_{k+1} − I)/Δφ → A_φ at O(Δφ)
        let theta0 = 0.7;
        let a_exact = tangent_connection(theta0);
        let mut prev_err = f64::INFINITY;
        for &n in &[40usize, 80, 160] {
            let path = tangent_frame_loop(theta0, n).unwrap();
            let ov = overlaps_from_frames(&path, 1e-12).unwrap();
            let dphi = 2.0 * PI / n as f64;
            let a_disc = (&ov.overlaps()[0] - &M::identity(2)).scale_real(1.0 / dphi);
            let err = (&a_disc - &a_exact).frobenius_norm();
            assert!(
                err < 2.0 * dphi,
                "connection error {err:e} at dphi {dphi:e}"
            );
            assert!(err < prev_err);
            prev_err = err;
        }
    }

    #[test]
    fn abelian_loop_theta_zero_is_constant() {
        let path = abelian_loop(0.0, 8).unwrap();
        let first = path.frames()[0].matrix().clone();
        for f in path.frames() {
            assert!((f.matrix() - &first).frobenius_norm() < 1e-15);
        }
    }

    #[test]
    fn transfer_model_identity_gives_constant_path() {
        let input = Frame::new(
            M::from_rows(&[vec![c(1.0, 0.0)], vec![c(0.0, 0.0)], vec![c(0.0, 0.0)]]).unwrap(),
        )
        .unwrap();
        let ts = vec![M::identity(3); 4];
        let path = frames_from_transfer_model(&ts, &input).unwrap();
        for f in path.frames() {
            assert!((f.matrix() - input.matrix()).frobenius_norm() < 1e-14);
        }
    }

    #[test]
    fn transfer_model_projectors_match_oracle() {
        // For unitary T the extracted projector equals T Φ_in Φ_in† T†.
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let input = Frame::new(
            M::from_rows(&[
                vec![c(1.0, 0.0), c(0.0, 0.0)],
                vec![c(0.0, 0.0), c(1.0, 0.0)],
                vec![c(0.0, 0.0), c(0.0, 0.0)],
            ])
            .unwrap(),
        )
        .unwrap();
        let ts: Vec<M> = (0..3)
            .map(|_| crate::linalg::haar_unitary(3, &mut rng))
            .collect();
        let path = frames_from_transfer_model(&ts, &input).unwrap();
        for (t, f) in ts.iter().zip(path.frames()) {
            let propagated = t.matmul(input.matrix());
            let oracle = &propagated * &propagated.adjoint();
            assert!((&f.projector() - &oracle).frobenius_norm() < 1e-12);
        }
    }

    #[test]
    fn transfer_model_rank_deficiency_reports_index() {
        let input =
            Frame::new(M::from_rows(&[vec![c(1.0, 0.0)], vec![c(0.0, 0.0)]]).unwrap()).unwrap();
        let killer = M::from_rows(&[
            vec![c(0.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(1.0, 0.0)],
        ])
        .unwrap();
        let ts = vec![M::identity(2), killer];
        match frames_from_transfer_model(&ts, &input) {
            Err(Error::RankDeficient { index: Some(1) }) => {}
            other => panic!("expected rank deficiency at index 1, got {other:?}"),
        }
    }

    #[test]
    fn synthetic_loop_is_closed_and_orthonormal() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let path: FramePath<f64> = synthetic_subspace_loop(5, 3, 20, &mut rng).unwrap();
        assert_eq!(path.len(), 21);
        assert!(path.closed_subspace());
        for f in path.frames() {
            assert!(f.matrix().unitarity_residual() < 1e-12);
        }
    }
}
