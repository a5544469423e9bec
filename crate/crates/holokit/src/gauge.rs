//! Random gauge sequences, gauge application to frame paths, and covariance
//! residual checks.

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{haar_unitary, real, ComplexMatrix, Scalar};
use crate::transport::{Frame, FramePath, HolonomyEstimate};

/// A sequence G_0 … G_N of unitary frame changes.
///
/// Closed sequences store G_0 once and alias the endpoint, so G_N = G_0
/// holds exactly with no floating-point drift.
#[derive(Clone, Debug)]
pub struct GaugeSequence<T> {
    gauges: Vec<ComplexMatrix<T>>,
    closed: bool,
}

impl<T: Scalar> GaugeSequence<T> {
    /// Wraps explicit gauges (length N+1 for an open sequence, N for a
    /// closed one whose endpoint aliases the start).
    pub fn new(gauges: Vec<ComplexMatrix<T>>, closed: bool) -> Result<Self> {
        if gauges.is_empty() {
            return Err(Error::Domain("gauge sequence is empty".into()));
        }
        for (k, g) in gauges.iter().enumerate() {
            if !g.is_square() {
                return Err(Error::Domain(format!("gauge {k} is not square")));
            }
            if g.unitarity_residual() > real::<T>(1e-12) {
                return Err(Error::Domain(format!("gauge {k} is not unitary")));
            }
        }
        Ok(Self { gauges, closed })
    }

    pub fn closed(&self) -> bool {
        self.closed
    }

    /// Number of gauges including the endpoint: N + 1.
    pub fn len(&self) -> usize {
        if self.closed {
            self.gauges.len() + 1
        } else {
            self.gauges.len()
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// G_k; for a closed sequence G_N is the stored G_0.
    pub fn get(&self, k: usize) -> &ComplexMatrix<T> {
        if self.closed && k == self.gauges.len() {
            &self.gauges[0]
        } else {
            &self.gauges[k]
        }
    }

    pub fn logical_rank(&self) -> usize {
        self.gauges[0].rows()
    }
}

/// N+1 Haar-random gauges; the endpoint equals the start exactly when
/// `closed`.
pub fn random_gauge_sequence<T: Scalar>(
    m: usize,
    n: usize,
    closed: bool,
    rng: &mut impl Rng,
) -> GaugeSequence<T> {
    assert!(n >= 1, "gauge sequence needs N >= 1");
    let count = if closed { n } else { n + 1 };
    let gauges = (0..count).map(|_| haar_unitary(m, rng)).collect();
    GaugeSequence { gauges, closed }
}

/// Frames'[k] = frames[k]·G_k: new representatives of the same projector
/// path.
pub fn apply_gauge<T: Scalar>(path: &FramePath<T>, g: &GaugeSequence<T>) -> Result<FramePath<T>> {
    if g.len() != path.len() {
        return Err(Error::DimensionMismatch {
            expected: format!("{} gauges", path.len()),
            got: format!("{}", g.len()),
        });
    }
    if g.logical_rank() != path.logical_rank() {
        return Err(Error::DimensionMismatch {
            expected: format!("gauge rank {}", path.logical_rank()),
            got: format!("{}", g.logical_rank()),
        });
    }
    let frames: Result<Vec<Frame<T>>> = path
        .frames()
        .iter()
        .enumerate()
        .map(|(k, f)| Frame::new(f.matrix().matmul(g.get(k))))
        .collect();
    FramePath::new(
        frames?,
        path.parameter_values().to_vec(),
        path.closed_subspace(),
    )
}

/// ‖Û'^(0) − G_0†·Û^(0)·G_0‖_F computed from base-frame holonomies.
pub fn covariance_residual<T: Scalar>(
    est: &HolonomyEstimate<T>,
    est_gauged: &HolonomyEstimate<T>,
    g0: &ComplexMatrix<T>,
) -> Result<T> {
    let m = est.base_frame_holonomy.rows();
    if est_gauged.base_frame_holonomy.rows() != m || g0.rows() != m || g0.cols() != m {
        return Err(Error::DimensionMismatch {
            expected: format!("{m}x{m} holonomies and gauge"),
            got: format!(
                "{}x{} gauged, {}x{} gauge",
                est_gauged.base_frame_holonomy.rows(),
                est_gauged.base_frame_holonomy.cols(),
                g0.rows(),
                g0.cols()
            ),
        });
    }
    let conjugated = &(&g0.adjoint() * &est.base_frame_holonomy) * g0;
    Ok((&est_gauged.base_frame_holonomy - &conjugated).frobenius_norm())
}
