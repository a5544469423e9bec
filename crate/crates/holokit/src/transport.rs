//! The core estimator: frames → overlaps → polar comparators → forward
//! transports → ordered-product holonomy, with endpoint identification and
//! gauge-invariant diagnostics.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::{eigenphases, polar, real, svd, ComplexMatrix, Scalar};

/// Orthonormal d×m frame for a rank-m subspace.
#[derive(Clone, Debug)]
pub struct Frame<T> {
    matrix: ComplexMatrix<T>,
}

impl<T: Scalar> Frame<T> {
    /// Checks Φ†Φ = I within 1e−10 and d ≥ m ≥ 1.
    pub fn new(matrix: ComplexMatrix<T>) -> Result<Self> {
        let d = matrix.rows();
        let m = matrix.cols();
        if m < 1 || d < m {
            return Err(Error::Domain(format!(
                "frame requires d >= m >= 1, got {d}x{m}"
            )));
        }
        let residual = matrix.unitarity_residual();
        if residual > real::<T>(1e-10) {
            return Err(Error::Domain(format!(
                "frame columns are not orthonormal: residual {:e}",
                residual.to_f64().unwrap()
            )));
        }
        Ok(Self { matrix })
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.matrix
    }

    pub fn ambient_dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn logical_rank(&self) -> usize {
        self.matrix.cols()
    }

    /// The gauge-invariant projector ΦΦ†.
    pub fn projector(&self) -> ComplexMatrix<T> {
        &self.matrix * &self.matrix.adjoint()
    }
}

/// Frames sampled along a parameter path.
#[derive(Clone, Debug)]
pub struct FramePath<T> {
    frames: Vec<Frame<T>>,
    parameter_values: Vec<T>,
    closed_subspace: bool,
}

impl<T: Scalar> FramePath<T> {
    pub fn new(
        frames: Vec<Frame<T>>,
        parameter_values: Vec<T>,
        closed_subspace: bool,
    ) -> Result<Self> {
        if frames.len() < 2 {
            return Err(Error::Domain("frame path needs at least two frames".into()));
        }
        if frames.len() != parameter_values.len() {
            return Err(Error::DimensionMismatch {
                expected: format!("{} parameter values", frames.len()),
                got: format!("{}", parameter_values.len()),
            });
        }
        let d = frames[0].ambient_dim();
        let m = frames[0].logical_rank();
        if frames
            .iter()
            .any(|f| f.ambient_dim() != d || f.logical_rank() != m)
        {
            return Err(Error::DimensionMismatch {
                expected: format!("uniform frame shape {d}x{m}"),
                got: "mixed frame shapes".into(),
            });
        }
        if parameter_values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Domain(
                "parameter values must be strictly increasing".into(),
            ));
        }
        if closed_subspace {
            let first = frames.first().unwrap().projector();
            let last = frames.last().unwrap().projector();
            let residual = (&last - &first).frobenius_norm();
            if residual > real::<T>(1e-8) {
                return Err(Error::NotClosed {
                    residual: residual.to_f64().unwrap(),
                });
            }
        }
        Ok(Self {
            frames,
            parameter_values,
            closed_subspace,
        })
    }

    pub fn frames(&self) -> &[Frame<T>] {
        &self.frames
    }

    pub fn parameter_values(&self) -> &[T] {
        &self.parameter_values
    }

    pub fn closed_subspace(&self) -> bool {
        self.closed_subspace
    }

    pub fn logical_rank(&self) -> usize {
        self.frames[0].logical_rank()
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }
}

/// Adjacent overlaps M_k = Φ_k†Φ_{k+1} with per-step conditioning data.
#[derive(Clone, Debug)]
pub struct OverlapSequence<T> {
    overlaps: Vec<ComplexMatrix<T>>,
    min_singular_values: Vec<T>,
    logical_rank: usize,
}

impl<T: Scalar> OverlapSequence<T> {
    /// Wraps raw m×m overlap matrices, recomputing σ_min per step.
    pub fn new(overlaps: Vec<ComplexMatrix<T>>) -> Result<Self> {
        if overlaps.is_empty() {
            return Err(Error::Domain("overlap sequence is empty".into()));
        }
        let m = overlaps[0].rows();
        if overlaps.iter().any(|o| o.rows() != m || o.cols() != m) {
            return Err(Error::DimensionMismatch {
                expected: format!("{m}x{m} overlaps"),
                got: "mixed shapes".into(),
            });
        }
        let mut mins = Vec::with_capacity(overlaps.len());
        for o in &overlaps {
            let s = svd(o)?;
            mins.push(*s.singular_values.last().unwrap());
        }
        Ok(Self {
            overlaps,
            min_singular_values: mins,
            logical_rank: m,
        })
    }

    pub fn overlaps(&self) -> &[ComplexMatrix<T>] {
        &self.overlaps
    }

    pub fn min_singular_values(&self) -> &[T] {
        &self.min_singular_values
    }

    pub fn logical_rank(&self) -> usize {
        self.logical_rank
    }

    pub fn len(&self) -> usize {
        self.overlaps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.overlaps.is_empty()
    }

    /// min over k of σ_min(M_k).
    pub fn mu_min(&self) -> T {
        self.min_singular_values
            .iter()
            .copied()
            .fold(T::infinity(), T::min)
    }
}

/// Reconstructed holonomy with gauge-invariant diagnostics.
#[derive(Clone, Debug)]
pub struct HolonomyEstimate<T> {
    /// Raw ordered product Û_γ = T_{N−1}⋯T_0.
    pub holonomy: ComplexMatrix<T>,
    /// Base-frame representative Û_γ^(0) = B·Û_γ.
    pub base_frame_holonomy: ComplexMatrix<T>,
    /// Endpoint identification B with Φ_N = Φ_0 B (identity for overlap input).
    pub endpoint_identification: ComplexMatrix<T>,
    /// Eigenphases of the base-frame holonomy, ascending in (−π, π].
    pub eigenphase_list: Vec<T>,
    /// Tr(Û^r) of the base-frame holonomy for r = 1, 2, 3.
    pub wilson_traces: Vec<Complex<T>>,
    /// Minimum overlap singular value over the run.
    pub mu_min: T,
    /// ‖Û†Û − I‖_F of the base-frame holonomy.
    pub unitarity_residual: T,
}

/// Estimator input: a sampled frame path or precomputed overlaps.
pub enum HolonomyInput<'a, T> {
    Frames(&'a FramePath<T>),
    Overlaps(&'a OverlapSequence<T>),
}

/// Computes the adjacent overlaps of a frame path, erroring on the first
/// step whose overlap falls below `tol`.
pub fn overlaps_from_frames<T: Scalar>(path: &FramePath<T>, tol: T) -> Result<OverlapSequence<T>> {
    let frames = path.frames();
    let mut overlaps = Vec::with_capacity(frames.len() - 1);
    for pair in frames.windows(2) {
        overlaps.push(pair[0].matrix().adjoint().matmul(pair[1].matrix()));
    }
    let seq = OverlapSequence::new(overlaps)?;
    if let Some((k, &sv)) = seq
        .min_singular_values
        .iter()
        .enumerate()
        .find(|(_, &sv)| sv < tol)
    {
        return Err(Error::SingularOverlap {
            index: Some(k),
            sigma_min: sv.to_f64().unwrap(),
            tol: tol.to_f64().unwrap(),
        });
    }
    Ok(seq)
}

/// Forward transports T_k = polar(M_k)†, each exactly unitary.
pub fn forward_transports<T: Scalar>(
    overlaps: &OverlapSequence<T>,
    tol: T,
) -> Result<Vec<ComplexMatrix<T>>> {
    let mut transports = Vec::with_capacity(overlaps.len());
    for (k, m) in overlaps.overlaps().iter().enumerate() {
        let p = polar(m, tol).map_err(|e| match e {
            Error::SingularOverlap { sigma_min, tol, .. } => Error::SingularOverlap {
                index: Some(k),
                sigma_min,
                tol,
            },
            other => other,
        })?;
        transports.push(p.unitary.adjoint());
    }
    Ok(transports)
}

/// Ordered product Û_γ = T_{N−1}⋯T_0 with endpoint identification and
/// gauge-invariant diagnostics.
///
/// Frame input additionally yields B = polar(Φ_0†Φ_N); overlap input uses
/// B = I. Diagnostics are always computed from the base-frame holonomy.
pub fn estimate_holonomy<T: Scalar>(
    input: HolonomyInput<'_, T>,
    tol: T,
) -> Result<HolonomyEstimate<T>> {
    let (overlaps_owned, endpoint): (OverlapSequence<T>, ComplexMatrix<T>);
    match input {
        HolonomyInput::Frames(path) => {
            let seq = overlaps_from_frames(path, tol)?;
            let first = path.frames().first().unwrap().matrix();
            let last = path.frames().last().unwrap().matrix();
            let closure = first.adjoint().matmul(last);
            let b = polar(&closure, tol)?.unitary;
            overlaps_owned = seq;
            endpoint = b;
        }
        HolonomyInput::Overlaps(seq) => {
            overlaps_owned = seq.clone();
            endpoint = ComplexMatrix::identity(seq.logical_rank());
        }
    }
    estimate_from_overlaps(&overlaps_owned, endpoint, tol)
}

/// Convenience wrapper over [`estimate_holonomy`] for frame input.
pub fn estimate_holonomy_from_frames<T: Scalar>(
    path: &FramePath<T>,
    tol: T,
) -> Result<HolonomyEstimate<T>> {
    estimate_holonomy(HolonomyInput::Frames(path), tol)
}

/// Convenience wrapper over [`estimate_holonomy`] for overlap input.
pub fn estimate_holonomy_from_overlaps<T: Scalar>(
    overlaps: &OverlapSequence<T>,
    tol: T,
) -> Result<HolonomyEstimate<T>> {
    estimate_holonomy(HolonomyInput::Overlaps(overlaps), tol)
}

fn estimate_from_overlaps<T: Scalar>(
    overlaps: &OverlapSequence<T>,
    endpoint: ComplexMatrix<T>,
    tol: T,
) -> Result<HolonomyEstimate<T>> {
    let transports = forward_transports(overlaps, tol)?;
    let m = overlaps.logical_rank();
    // Right-to-left ordered product: T_0 acts first on coefficient vectors.
    let mut u = ComplexMatrix::<T>::identity(m);
    for t in &transports {
        u = t.matmul(&u);
    }
    let base = endpoint.matmul(&u);
    let eigenphase_list = eigenphases(&base)?;
    let wilson_traces = wilson_traces(&base, 3)?;
    let mu_min = overlaps.mu_min();
    let residual = base.unitarity_residual();
    Ok(HolonomyEstimate {
        holonomy: u,
        base_frame_holonomy: base,
        endpoint_identification: endpoint,
        eigenphase_list,
        wilson_traces,
        mu_min,
        unitarity_residual: residual,
    })
}

/// Wilson-loop traces Tr(U^r) for r = 1 … r_max.
pub fn wilson_traces<T: Scalar>(u: &ComplexMatrix<T>, r_max: usize) -> Result<Vec<Complex<T>>> {
    if !u.is_square() {
        return Err(Error::Domain("wilson traces of a non-square matrix".into()));
    }
    if u.unitarity_residual() > real::<T>(1e-8) {
        return Err(Error::Domain(
            "wilson traces of a non-unitary matrix".into(),
        ));
    }
    let mut traces = Vec::with_capacity(r_max);
    let mut power = u.clone();
    for _ in 0..r_max {
        traces.push(power.trace());
        power = power.matmul(u);
    }
    Ok(traces)
}

/// `‖U†U − I‖_F` for any square matrix.
pub fn unitarity_residual<T: Scalar>(u: &ComplexMatrix<T>) -> T {
    u.unitarity_residual()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    type M = ComplexMatrix<f64>;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn identity_overlaps(m: usize, n: usize) -> OverlapSequence<f64> {
        OverlapSequence::new(vec![M::identity(m); n]).unwrap()
    }

    #[test]
    fn constant_path_gives_identity_overlaps() {
        let f = Frame::new(
            M::from_rows(&[
                vec![c(1.0, 0.0), c(0.0, 0.0)],
                vec![c(0.0, 0.0), c(1.0, 0.0)],
                vec![c(0.0, 0.0), c(0.0, 0.0)],
            ])
            .unwrap(),
        )
        .unwrap();
        let path =
            FramePath::new(vec![f.clone(), f.clone(), f], vec![0.0, 0.5, 1.0], true).unwrap();
        let ov = overlaps_from_frames(&path, 1e-12).unwrap();
        for m in ov.overlaps() {
            assert!((m - &M::identity(2)).frobenius_norm() < 1e-14);
        }
        assert!((ov.mu_min() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn scalar_phase_overlap() {
        let delta = 0.3f64;
        let u0 =
            Frame::new(M::from_rows(&[vec![c(1.0, 0.0)], vec![c(0.0, 0.0)]]).unwrap()).unwrap();
        let u1 = Frame::new(
            M::from_rows(&[vec![c(delta.cos(), delta.sin())], vec![c(0.0, 0.0)]]).unwrap(),
        )
        .unwrap();
        let path = FramePath::new(vec![u0, u1], vec![0.0, 1.0], false).unwrap();
        let ov = overlaps_from_frames(&path, 1e-12).unwrap();
        let m = &ov.overlaps()[0];
        assert!((m.get(0, 0) - c(delta.cos(), delta.sin())).norm() < 1e-14);
    }

    #[test]
    fn transports_of_unitary_overlaps_are_adjoints() {
        let q = M::from_rows(&[
            vec![c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(-1.0, 0.0), c(0.0, 0.0)],
        ])
        .unwrap();
        let seq = OverlapSequence::new(vec![q.clone()]).unwrap();
        let t = forward_transports(&seq, 1e-12).unwrap();
        assert!((&t[0] - &q.adjoint()).frobenius_norm() < 1e-13);
    }

    #[test]
    fn identity_overlaps_give_identity_holonomy() {
        let seq = identity_overlaps(2, 5);
        let est = estimate_holonomy_from_overlaps(&seq, 1e-12).unwrap();
        assert!((&est.base_frame_holonomy - &M::identity(2)).frobenius_norm() < 1e-13);
        assert!(est.eigenphase_list.iter().all(|p| p.abs() < 1e-12));
        assert!(est.unitarity_residual < 1e-13);
    }

    #[test]
    fn abelian_discrete_limit() {
        // m = 1 with M_k = e^{iδ}: the estimator yields e^{−iNδ}.
        let n = 7;
        let delta = 0.11f64;
        let overlaps: Vec<M> = (0..n)
            .map(|_| M::from_rows(&[vec![c(delta.cos(), delta.sin())]]).unwrap())
            .collect();
        let seq = OverlapSequence::new(overlaps).unwrap();
        let est = estimate_holonomy_from_overlaps(&seq, 1e-12).unwrap();
        let total = n as f64 * delta;
        let expect = c(total.cos(), -total.sin());
        assert!((est.base_frame_holonomy.get(0, 0) - expect).norm() < 1e-12);
    }

    #[test]
    fn ordering_contract_per_step_application() {
        // Iterating c_{k+1} = T_k c_k equals applying the assembled product.
        use rand::SeedableRng;
        use rand_chacha::ChaCha8Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let overlaps: Vec<M> = (0..4)
            .map(|_| {
                // near-identity nonunitary overlaps
                let e = M::from_fn(3, 3, |i, j| {
                    let base = if i == j { 1.0 } else { 0.0 };
                    use rand::Rng;
                    c(
                        base + 0.05 * (rng.gen::<f64>() - 0.5),
                        0.05 * (rng.gen::<f64>() - 0.5),
                    )
                });
                e
            })
            .collect();
        let seq = OverlapSequence::new(overlaps).unwrap();
        let transports = forward_transports(&seq, 1e-12).unwrap();
        let est = estimate_holonomy_from_overlaps(&seq, 1e-12).unwrap();

        let c0 = vec![c(0.3, 0.1), c(-0.5, 0.2), c(0.0, 0.9)];
        let mut v = c0.clone();
        for t in &transports {
            v = t.matvec(&v);
        }
        let direct = est.holonomy.matvec(&c0);
        for i in 0..3 {
            assert!((v[i] - direct[i]).norm() < 1e-13);
        }
    }

    #[test]
    fn brute_force_product_equivalence() {
        use rand::SeedableRng;
        use rand_chacha::ChaCha8Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        use rand::Rng;
        let overlaps: Vec<M> = (0..4)
            .map(|_| {
                M::from_fn(2, 2, |i, j| {
                    let base = if i == j { 1.0 } else { 0.0 };
                    c(
                        base + 0.2 * (rng.gen::<f64>() - 0.5),
                        0.2 * (rng.gen::<f64>() - 0.5),
                    )
                })
            })
            .collect();
        let seq = OverlapSequence::new(overlaps.clone()).unwrap();
        let est = estimate_holonomy_from_overlaps(&seq, 1e-12).unwrap();
        let w = |m: &M| polar(m, 1e-12).unwrap().unitary.adjoint();
        let hand = &(&(&w(&overlaps[3]) * &w(&overlaps[2])) * &w(&overlaps[1])) * &w(&overlaps[0]);
        assert!((&est.holonomy - &hand).frobenius_norm() < 1e-12);
    }

    #[test]
    fn singular_overlap_reports_offending_index() {
        let good = M::identity(2);
        let bad = M::diagonal(&[1.0, 1e-15]);
        let seq = OverlapSequence::new(vec![good.clone(), bad, good]).unwrap();
        match forward_transports(&seq, 1e-12) {
            Err(Error::SingularOverlap { index: Some(1), .. }) => {}
            other => panic!("expected singular overlap at index 1, got {other:?}"),
        }
    }

    #[test]
    fn non_closed_path_rejected_when_claimed_closed() {
        let f0 =
            Frame::new(M::from_rows(&[vec![c(1.0, 0.0)], vec![c(0.0, 0.0)]]).unwrap()).unwrap();
        let f1 = Frame::new(
            M::from_rows(&[vec![c((0.9f64).cos(), 0.0)], vec![c((0.9f64).sin(), 0.0)]]).unwrap(),
        )
        .unwrap();
        match FramePath::new(vec![f0, f1], vec![0.0, 1.0], true) {
            Err(Error::NotClosed { .. }) => {}
            other => panic!("expected closure error, got {other:?}"),
        }
    }

    #[test]
    fn wilson_traces_basics() {
        let id = M::identity(2);
        let t = wilson_traces(&id, 3).unwrap();
        for z in t {
            assert!((z - c(2.0, 0.0)).norm() < 1e-14);
        }
        let u = M::from_rows(&[
            vec![c(0.0, 1.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(0.0, -1.0)],
        ])
        .unwrap();
        let t = wilson_traces(&u, 3).unwrap();
        assert!((t[0] - c(0.0, 0.0)).norm() < 1e-14);
        assert!((t[1] - c(-2.0, 0.0)).norm() < 1e-14);
        assert!((t[2] - c(0.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn unitarity_residual_of_scaled_identity() {
        let m = M::identity(2).scale_real(2.0);
        let r = unitarity_residual(&m);
        assert!((r - 3.0 * 2.0f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn eigenphases_of_adjoint_are_negated() {
        let theta = 0.4f64;
        let u = M::from_rows(&[
            vec![c(theta.cos(), theta.sin()), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c((2.0 * theta).cos(), (2.0 * theta).sin())],
        ])
        .unwrap();
        let p = eigenphases(&u).unwrap();
        let mut q = eigenphases(&u.adjoint()).unwrap();
        q.reverse();
        for (a, b) in p.iter().zip(q.iter()) {
            assert!((a + b).abs() < 1e-12 || (a + b - 2.0 * PI).abs() < 1e-12);
        }
    }
}
