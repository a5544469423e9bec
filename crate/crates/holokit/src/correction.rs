//! Left/right feed-forward correction of effective gates, fidelity
//! diagnostics, and synthetic effective-gate construction.

use crate::error::{Error, Result};
use crate::linalg::{real, ComplexMatrix, Scalar};

/// Side on which the geometric distortion multiplies the intended gate.
/// The two are not interchangeable when the factors do not commute.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Convention {
    /// V_eff ≈ U_γ·V
    Left,
    /// V_eff ≈ V·U_γ
    Right,
}

impl std::fmt::Display for Convention {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Convention::Left => write!(f, "left"),
            Convention::Right => write!(f, "right"),
        }
    }
}

/// An effective logical operation tagged with its distortion convention.
#[derive(Clone, Debug)]
pub struct EffectiveGate<T> {
    matrix: ComplexMatrix<T>,
    convention: Convention,
}

impl<T: Scalar> EffectiveGate<T> {
    /// Rejects gates whose unitarity residual exceeds 1e−8.
    pub fn new(matrix: ComplexMatrix<T>, convention: Convention) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::Domain("effective gate must be square".into()));
        }
        let residual = matrix.unitarity_residual();
        if residual > real::<T>(1e-8) {
            return Err(Error::Domain(format!(
                "effective gate is not unitary within tolerance: residual {:e}",
                residual.to_f64().unwrap()
            )));
        }
        Ok(Self { matrix, convention })
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.matrix
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }
}

/// V_corr = Û†·V_eff for a left-acting distortion. Cross-convention
/// application is a hard error rather than a silent transpose.
pub fn correct_left<T: Scalar>(
    holonomy: &ComplexMatrix<T>,
    v_eff: &EffectiveGate<T>,
) -> Result<ComplexMatrix<T>> {
    if v_eff.convention != Convention::Left {
        return Err(Error::ConventionMismatch {
            expected: "left".into(),
            got: v_eff.convention.to_string(),
        });
    }
    check_dims(holonomy, v_eff.matrix())?;
    Ok(holonomy.adjoint().matmul(v_eff.matrix()))
}

/// V_corr = V_eff·Û† for a right-acting distortion.
pub fn correct_right<T: Scalar>(
    v_eff: &EffectiveGate<T>,
    holonomy: &ComplexMatrix<T>,
) -> Result<ComplexMatrix<T>> {
    if v_eff.convention != Convention::Right {
        return Err(Error::ConventionMismatch {
            expected: "right".into(),
            got: v_eff.convention.to_string(),
        });
    }
    check_dims(holonomy, v_eff.matrix())?;
    Ok(v_eff.matrix().matmul(&holonomy.adjoint()))
}

fn check_dims<T: Scalar>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> Result<()> {
    if a.rows() != b.rows() || a.cols() != b.cols() {
        return Err(Error::DimensionMismatch {
            expected: format!("{}x{}", a.rows(), a.cols()),
            got: format!("{}x{}", b.rows(), b.cols()),
        });
    }
    Ok(())
}

/// Normalised unitary overlap F = |Tr(V_corr†·V)|²/m²; equals 1 exactly when
/// the gates agree up to a global phase.
pub fn gate_fidelity<T: Scalar>(v_corr: &ComplexMatrix<T>, v: &ComplexMatrix<T>) -> T {
    debug_assert_eq!(v_corr.rows(), v.rows());
    let m = real::<T>(v.rows() as f64);
    let overlap = v_corr.adjoint().matmul(v).trace();
    (overlap.norm_sqr() / (m * m)).min(T::one())
}

/// Builds a synthetic effective gate V_eff = U·V + R (left) or V·U + R
/// (right); a residual large enough to break unitarity is rejected.
pub fn synth_effective_gate<T: Scalar>(
    u_true: &ComplexMatrix<T>,
    v: &ComplexMatrix<T>,
    convention: Convention,
    residual: Option<&ComplexMatrix<T>>,
) -> Result<EffectiveGate<T>> {
    let mut v_eff = match convention {
        Convention::Left => u_true.matmul(v),
        Convention::Right => v.matmul(u_true),
    };
    if let Some(r) = residual {
        v_eff = &v_eff + r;
    }
    EffectiveGate::new(v_eff, convention)
}
