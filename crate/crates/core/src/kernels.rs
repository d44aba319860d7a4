//! Kernel inner products and the C-weighted kernel combinations used by the
//! diffusion filter and its performance predictors.

use serde::Serialize;
use std::f64::consts::PI;

use crate::error::{check_dim, Error, Result};

/// Kernel family and parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum KernelSpec {
    /// `scale · exp(−‖x−y‖² / 2σ²)`, where `scale = 1/√(2πσ²)` when
    /// `normalized` and 1 otherwise.
    Gaussian { sigma: f64, normalized: bool },
    /// `(xᵀy + offset)^degree`.
    Polynomial { degree: u32, offset: f64 },
}

impl KernelSpec {
    /// Normalized Gaussian kernel (peak `1/√(2πσ²)`).
    pub fn gaussian(sigma: f64) -> Result<Self> {
        check_sigma(sigma)?;
        Ok(Self::Gaussian { sigma, normalized: true })
    }

    /// Conventional Gaussian kernel with peak value 1.
    pub fn gaussian_unnormalized(sigma: f64) -> Result<Self> {
        check_sigma(sigma)?;
        Ok(Self::Gaussian { sigma, normalized: false })
    }

    pub fn polynomial(degree: u32, offset: f64) -> Result<Self> {
        if degree == 0 {
            return Err(Error::InvalidParameter("polynomial degree must be positive".into()));
        }
        if !offset.is_finite() {
            return Err(Error::InvalidParameter("polynomial offset must be finite".into()));
        }
        Ok(Self::Polynomial { degree, offset })
    }

    pub fn eval(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        check_dim(x.len(), y.len())?;
        Ok(self.eval_unchecked(x, y))
    }

    /// Evaluates without the dimension check; `x` and `y` are zipped.
    #[inline]
    pub(crate) fn eval_unchecked(&self, x: &[f64], y: &[f64]) -> f64 {
        match *self {
            KernelSpec::Gaussian { sigma, normalized } => {
                let dist2: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
                let g = (-dist2 / (2.0 * sigma * sigma)).exp();
                if normalized {
                    g / (2.0 * PI * sigma * sigma).sqrt()
                } else {
                    g
                }
            }
            KernelSpec::Polynomial { degree, offset } => {
                let dot: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
                (dot + offset).powi(degree as i32)
            }
        }
    }

    /// Maximum of the Gaussian kernel, attained at `x = y`; `None` for the
    /// polynomial family, whose self-value depends on `x`.
    pub fn gaussian_peak(&self) -> Option<f64> {
        match *self {
            KernelSpec::Gaussian { sigma, normalized: true } => {
                Some(1.0 / (2.0 * PI * sigma * sigma).sqrt())
            }
            KernelSpec::Gaussian { normalized: false, .. } => Some(1.0),
            KernelSpec::Polynomial { .. } => None,
        }
    }
}

fn check_sigma(sigma: f64) -> Result<()> {
    if sigma > 0.0 && sigma.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("kernel spread must be positive, got {sigma}")))
    }
}

/// How a node merges its neighbors' data inside the kernel expansion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Combination {
    /// Kernel between the C-combined stored regressors and the C-combined
    /// current regressors: `κ(Σ_l c_ql x_l(i), Σ_l c_ql x_l(n))`.
    #[default]
    CombinedData,
    /// C-combination of kernels between each neighbor's stored regressor
    /// and the node's own current regressor: `Σ_l c_ql κ(x_l(i), x_q(n))`.
    CombinedKernels,
}

impl Combination {
    pub fn parse(text: &str) -> Option<Self> {
        match text {
            "combined-data" => Some(Self::CombinedData),
            "combined-kernels" => Some(Self::CombinedKernels),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::CombinedData => "combined-data",
            Self::CombinedKernels => "combined-kernels",
        }
    }
}

pub fn kernel_eval(spec: &KernelSpec, x: &[f64], y: &[f64]) -> Result<f64> {
    spec.eval(x, y)
}

/// `Σ_l weights[l] · κ(centers[l], probe)`.
pub fn combined_kernel<V: AsRef<[f64]>>(
    spec: &KernelSpec,
    weights: &[f64],
    centers: &[V],
    probe: &[f64],
) -> Result<f64> {
    check_dim(weights.len(), centers.len())?;
    let mut total = 0.0;
    for (w, center) in weights.iter().zip(centers) {
        let center = center.as_ref();
        check_dim(probe.len(), center.len())?;
        total += w * spec.eval_unchecked(center, probe);
    }
    Ok(total)
}

/// `κ(Σ_l weights[l] · centers[l], Σ_l weights[l] · probes[l])`.
pub fn kernel_of_combined<V: AsRef<[f64]>, P: AsRef<[f64]>>(
    spec: &KernelSpec,
    weights: &[f64],
    centers: &[V],
    probes: &[P],
) -> Result<f64> {
    check_dim(weights.len(), centers.len())?;
    check_dim(weights.len(), probes.len())?;
    let dim = centers.first().map_or(0, |c| c.as_ref().len());
    let center = mix(weights, centers, dim)?;
    let probe = mix(weights, probes, dim)?;
    Ok(spec.eval_unchecked(&center, &probe))
}

/// The self-interaction of one diffusion step at node `q`: the kernel value
/// that multiplies the coefficient just stored when the filter is probed at
/// the same snapshot.
pub fn step_self_kernel<V: AsRef<[f64]>>(
    spec: &KernelSpec,
    combination: Combination,
    weights: &[f64],
    snapshot: &[V],
    node: usize,
) -> Result<f64> {
    if node >= snapshot.len() {
        return Err(Error::InvalidParameter(format!(
            "node {node} out of range for {} regressors",
            snapshot.len()
        )));
    }
    match combination {
        Combination::CombinedKernels => {
            combined_kernel(spec, weights, snapshot, snapshot[node].as_ref())
        }
        Combination::CombinedData => kernel_of_combined(spec, weights, snapshot, snapshot),
    }
}

pub(crate) fn mix<V: AsRef<[f64]>>(weights: &[f64], vectors: &[V], dim: usize) -> Result<Vec<f64>> {
    let mut out = vec![0.0; dim];
    for (w, v) in weights.iter().zip(vectors) {
        let v = v.as_ref();
        check_dim(dim, v.len())?;
        for (o, x) in out.iter_mut().zip(v) {
            *o += w * x;
        }
    }
    Ok(out)
}
