//! Reproducible study harnesses: convergence sweeps with log-log order
//! fitting, overlap-noise perturbation, controlled-conditioning
//! construction, and slope statistics.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{polar, real, ComplexMatrix, Scalar};
use crate::models::{discrete_ordered_product, ConnectionModel, Partition};
use crate::transport::{
    estimate_holonomy_from_frames, estimate_holonomy_from_overlaps, overlaps_from_frames,
    FramePath, OverlapSequence,
};

/// Convergence sweep outcome: per-partition errors against a reference
/// unitary plus the fitted order.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub partition_sizes: Vec<usize>,
    pub mesh_sizes: Vec<f64>,
    /// Frobenius distance to the reference per partition.
    pub errors: Vec<f64>,
    /// Least-squares slope of log error vs log mesh; `None` when every
    /// error sits at numerical zero.
    pub fitted_order: Option<f64>,
    pub reference_eigenphases: Vec<f64>,
    /// Per-partition μ_min; empty for connection-based sweeps that never
    /// form overlaps.
    pub mu_min_per_partition: Vec<f64>,
    pub unitarity_residuals: Vec<f64>,
    /// Partition sizes excluded from the fit due to ill-conditioned
    /// overlaps.
    pub failed_partitions: Vec<usize>,
    pub seed: u64,
}

/// Noise sweep outcome: mean holonomy error per (μ, ρ) grid point and the
/// per-μ slopes fitted in the perturbative regime.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NoiseReport {
    pub conditioning_levels: Vec<f64>,
    pub noise_ratios: Vec<f64>,
    /// mean_errors[i][j] is the mean error at μ = levels[i], ρ = ratios[j].
    pub mean_errors: Vec<Vec<f64>>,
    pub fitted_slopes: Vec<f64>,
    pub mean_slope: f64,
    pub trials_per_point: usize,
    pub seed: u64,
}

/// Fixed-η conditioning sweep: mean error as μ decreases at constant
/// absolute perturbation.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FixedEtaReport {
    pub eta: f64,
    pub conditioning_levels: Vec<f64>,
    pub mean_errors: Vec<f64>,
    /// Slope of log error vs log(1/μ).
    pub slope_vs_inverse_mu: f64,
    pub trials_per_point: usize,
    pub seed: u64,
}

/// What a convergence sweep refines.
pub enum ConvergenceSource<'a, T> {
    /// Frame paths sampled at N steps over a loop of the given parameter
    /// length; the full overlap → polar → product pipeline is exercised.
    Frames {
        generator: &'a dyn Fn(usize) -> Result<FramePath<T>>,
        loop_length: f64,
    },
    /// Midpoint ordered products of a connection model.
    Connection {
        model: &'a ConnectionModel<T>,
        t_start: T,
        t_end: T,
    },
}

/// Runs a refinement sweep against a reference unitary and fits the
/// convergence order on log-log axes.
///
/// Partitions whose overlaps are ill-conditioned are recorded and excluded
/// from the fit rather than failing the study.
pub fn convergence_study<T: Scalar>(
    source: ConvergenceSource<'_, T>,
    ladder: &[usize],
    reference: &ComplexMatrix<T>,
    tol: T,
    seed: u64,
) -> Result<ConvergenceReport> {
    if ladder.is_empty() {
        return Err(Error::Domain("empty partition ladder".into()));
    }
    let reference_eigenphases: Vec<f64> = crate::linalg::eigenphases(reference)?
        .iter()
        .map(|p| p.to_f64().unwrap())
        .collect();

    let mut sizes = Vec::new();
    let mut meshes = Vec::new();
    let mut errors = Vec::new();
    let mut mu_mins = Vec::new();
    let mut residuals = Vec::new();
    let mut failed = Vec::new();

    for &n in ladder {
        let outcome: Result<(T, Option<T>, T)> = match &source {
            ConvergenceSource::Frames { generator, .. } => {
                let path = generator(n)?;
                match estimate_holonomy_from_frames(&path, tol) {
                    Ok(est) => Ok((
                        (&est.base_frame_holonomy - reference).frobenius_norm(),
                        Some(est.mu_min),
                        est.unitarity_residual,
                    )),
                    Err(e @ Error::SingularOverlap { .. }) => Err(e),
                    Err(e) => return Err(e),
                }
            }
            ConvergenceSource::Connection {
                model,
                t_start,
                t_end,
            } => {
                let p = Partition::new(*t_start, *t_end, n)?;
                let u = discrete_ordered_product(model, &p)?;
                Ok((
                    (&u - reference).frobenius_norm(),
                    None,
                    u.unitarity_residual(),
                ))
            }
        };
        match outcome {
            Ok((err, mu, res)) => {
                sizes.push(n);
                meshes.push(mesh_for(&source, n));
                errors.push(err.to_f64().unwrap());
                if let Some(mu) = mu {
                    mu_mins.push(mu.to_f64().unwrap());
                }
                residuals.push(res.to_f64().unwrap());
            }
            Err(_) => failed.push(n),
        }
    }

    // Zero-error guard: nothing meaningful to fit at numerical zero.
    let fitted_order = if errors.iter().all(|&e| e < 1e-13) || errors.len() < 2 {
        None
    } else {
        Some(fit_loglog_slope(&meshes, &errors)?)
    };

    Ok(ConvergenceReport {
        partition_sizes: sizes,
        mesh_sizes: meshes,
        errors,
        fitted_order,
        reference_eigenphases,
        mu_min_per_partition: mu_mins,
        unitarity_residuals: residuals,
        failed_partitions: failed,
        seed,
    })
}

fn mesh_for<T: Scalar>(source: &ConvergenceSource<'_, T>, n: usize) -> f64 {
    match source {
        ConvergenceSource::Frames { loop_length, .. } => loop_length / n as f64,
        ConvergenceSource::Connection { t_start, t_end, .. } => {
            (t_end.to_f64().unwrap() - t_start.to_f64().unwrap()) / n as f64
        }
    }
}

/// Adds a complex-Gaussian perturbation of exact spectral norm `eta` to
/// every overlap. Returns the perturbed sequence together with the indices
/// driven below `tol` (studies deliberately probe that failure region).
pub fn perturb_overlaps<T: Scalar>(
    overlaps: &OverlapSequence<T>,
    eta: T,
    tol: T,
    rng: &mut impl Rng,
) -> Result<(OverlapSequence<T>, Vec<usize>)> {
    if eta < T::zero() {
        return Err(Error::Domain("perturbation magnitude must be >= 0".into()));
    }
    if eta == T::zero() {
        return Ok((overlaps.clone(), Vec::new()));
    }
    let m = overlaps.logical_rank();
    let mut perturbed = Vec::with_capacity(overlaps.len());
    for mk in overlaps.overlaps() {
        let g = ComplexMatrix::from_fn(m, m, |_, _| {
            Complex::new(
                real::<T>(rng.gen::<f64>() - 0.5),
                real::<T>(rng.gen::<f64>() - 0.5),
            )
        });
        let norm = g.spectral_norm();
        let e = g.scale_real(eta / norm);
        perturbed.push(mk + &e);
    }
    let seq = OverlapSequence::new(perturbed)?;
    let flagged = seq
        .min_singular_values()
        .iter()
        .enumerate()
        .filter(|(_, &sv)| sv < tol)
        .map(|(k, _)| k)
        .collect();
    Ok((seq, flagged))
}

/// Replaces each overlap by polar(M_k)·diag(1, …, 1, μ): the polar
/// comparator is unchanged while σ_min is pinned to μ exactly.
pub fn conditioned_overlaps<T: Scalar>(
    overlaps: &OverlapSequence<T>,
    mu: T,
) -> Result<OverlapSequence<T>> {
    if mu <= T::zero() || mu > T::one() {
        return Err(Error::Domain("conditioning level must be in (0, 1]".into()));
    }
    let m = overlaps.logical_rank();
    let mut diag = vec![T::one(); m];
    diag[m - 1] = mu;
    let d = ComplexMatrix::diagonal(&diag);
    let mut out = Vec::with_capacity(overlaps.len());
    for mk in overlaps.overlaps() {
        let w = polar(mk, real::<T>(1e-15))?.unitary;
        out.push(w.matmul(&d));
    }
    OverlapSequence::new(out)
}

/// Scaled-noise study: for each conditioning level μ, perturb the
/// conditioned overlaps at η = ρ·μ and fit the slope of mean holonomy error
/// versus ρ in the perturbative regime.
pub fn noise_study<T: Scalar>(
    path: &FramePath<T>,
    mu_levels: &[f64],
    rho_grid: &[f64],
    trials: usize,
    tol: T,
    seed: u64,
) -> Result<NoiseReport> {
    let clean = overlaps_from_frames(path, tol)?;
    if clean.mu_min() <= real::<T>(0.9) {
        return Err(Error::Domain(format!(
            "noise study baseline must be well-conditioned (mu_min > 0.9), got {:e}",
            clean.mu_min().to_f64().unwrap()
        )));
    }
    let mut mean_errors = Vec::with_capacity(mu_levels.len());
    let mut fitted_slopes = Vec::with_capacity(mu_levels.len());
    for (a, &mu) in mu_levels.iter().enumerate() {
        let conditioned = conditioned_overlaps(&clean, real::<T>(mu))?;
        let baseline = estimate_holonomy_from_overlaps(&conditioned, tol)?;
        let mut row = Vec::with_capacity(rho_grid.len());
        for (b, &rho) in rho_grid.iter().enumerate() {
            let eta = real::<T>(rho * mu);
            let mut acc = 0.0f64;
            for t in 0..trials {
                let mut rng = derive_stream(seed, 1, (a * rho_grid.len() + b) as u64, t as u64);
                let (perturbed, _) = perturb_overlaps(&conditioned, eta, tol, &mut rng)?;
                let est = estimate_holonomy_from_overlaps(&perturbed, tol)?;
                let err =
                    (&est.base_frame_holonomy - &baseline.base_frame_holonomy).frobenius_norm();
                acc += err.to_f64().unwrap();
            }
            row.push(acc / trials as f64);
        }
        // Slopes are fitted only in the perturbative regime.
        let (xs, ys): (Vec<f64>, Vec<f64>) = rho_grid
            .iter()
            .zip(&row)
            .filter(|(_, &e)| e > 0.0 && e < 0.1)
            .map(|(&r, &e)| (r, e))
            .unzip();
        fitted_slopes.push(fit_loglog_slope(&xs, &ys)?);
        mean_errors.push(row);
    }
    let mean_slope = fitted_slopes.iter().sum::<f64>() / fitted_slopes.len() as f64;
    Ok(NoiseReport {
        conditioning_levels: mu_levels.to_vec(),
        noise_ratios: rho_grid.to_vec(),
        mean_errors,
        fitted_slopes,
        mean_slope,
        trials_per_point: trials,
        seed,
    })
}

/// Fixed-η sweep over conditioning levels: the same absolute perturbation
/// hurts more as μ decreases.
pub fn fixed_eta_sweep<T: Scalar>(
    path: &FramePath<T>,
    mu_levels: &[f64],
    eta: f64,
    trials: usize,
    tol: T,
    seed: u64,
) -> Result<FixedEtaReport> {
    let clean = overlaps_from_frames(path, tol)?;
    let mut mean_errors = Vec::with_capacity(mu_levels.len());
    for (a, &mu) in mu_levels.iter().enumerate() {
        let conditioned = conditioned_overlaps(&clean, real::<T>(mu))?;
        let baseline = estimate_holonomy_from_overlaps(&conditioned, tol)?;
        let mut acc = 0.0f64;
        for t in 0..trials {
            let mut rng = derive_stream(seed, 2, a as u64, t as u64);
            let (perturbed, _) = perturb_overlaps(&conditioned, real::<T>(eta), tol, &mut rng)?;
            let est = estimate_holonomy_from_overlaps(&perturbed, tol)?;
            acc += (&est.base_frame_holonomy - &baseline.base_frame_holonomy)
                .frobenius_norm()
                .to_f64()
                .unwrap();
        }
        mean_errors.push(acc / trials as f64);
    }
    let inverse_mu: Vec<f64> = mu_levels.iter().map(|&mu| 1.0 / mu).collect();
    let slope = fit_loglog_slope(&inverse_mu, &mean_errors)?;
    Ok(FixedEtaReport {
        eta,
        conditioning_levels: mu_levels.to_vec(),
        mean_errors,
        slope_vs_inverse_mu: slope,
        trials_per_point: trials,
        seed,
    })
}

/// Ordinary least-squares slope of log y versus log x.
pub fn fit_loglog_slope(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::Domain(format!(
            "log-log fit needs >= 2 matched points, got {} and {}",
            xs.len(),
            ys.len()
        )));
    }
    if xs.iter().chain(ys.iter()).any(|&v| v <= 0.0) {
        return Err(Error::Domain("log-log fit requires positive values".into()));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in lx.iter().zip(&ly) {
        num += (x - mx) * (y - my);
        den += (x - mx) * (x - mx);
    }
    if den == 0.0 {
        return Err(Error::Domain("log-log fit abscissae are all equal".into()));
    }
    Ok(num / den)
}

/// Default ρ grid: logarithmic from 1e−6 to 1e−2, five points per decade.
pub fn default_rho_grid() -> Vec<f64> {
    let mut grid = Vec::new();
    let mut k = 0;
    loop {
        let rho = 10f64.powf(-6.0 + k as f64 / 5.0);
        if rho > 1e-2 * (1.0 + 1e-12) {
            break;
        }
        grid.push(rho);
        k += 1;
    }
    grid
}

/// Derives an independent, reproducible RNG stream from the study seed and
/// point/trial indices, so aggregation order cannot affect results.
pub fn derive_stream(seed: u64, study_id: u64, point: u64, trial: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    for (slot, value) in [seed, study_id, point, trial].iter().enumerate() {
        // splitmix64 finalizer per word
        let mut z = value
            .wrapping_add(0x9E3779B97F4A7C15)
            .wrapping_add(slot as u64);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^= z >> 31;
        key[slot * 8..(slot + 1) * 8].copy_from_slice(&z.to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}
