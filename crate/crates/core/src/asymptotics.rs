//! Closed-form long-time predictions (Dirac weights, convergence laws,
//! surviving peak) and the estimators that recover the same quantities
//! from simulated trajectories.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid1D;
use crate::landscape::{argmin_zeta, Peak};

/// Exponential fits start once the residual is below this fraction of its
/// initial value.
pub const EXP_WINDOW_START: f64 = 0.1;
/// Exponential fits stop before the residual reaches this floor.
pub const EXP_WINDOW_FLOOR: f64 = 1e-12;
/// Minimum number of samples in the algebraic fit window.
pub const MIN_ALGEBRAIC_SAMPLES: usize = 50;
const MIN_EXPONENTIAL_SAMPLES: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightPrediction {
    /// `a_i`, summing to one.
    pub weights: Vec<f64>,
    /// `A` in `a_i = A n⁰(x̄_i) / sqrt|det H_i|`.
    pub normalizer: f64,
    /// Stationary boundary peaks, whose weight carries an extra factor ½.
    pub half_weight: Vec<bool>,
    /// Non-stationary boundary peaks forced to zero by a stationary one.
    pub suppressed: Vec<bool>,
}

/// Limit weights of the selection dynamics from the initial density at each
/// peak and the peak curvatures. `initial_at_peaks[i]` is `n⁰(x̄_i)`.
///
/// Stationary boundary peaks get half the interior weight. Non-stationary
/// boundary peaks get zero as soon as any stationary peak exists; if none
/// does, their linear decay gives `a_i ∝ n⁰(x̄_i) / |r'(x̄_i)|`.
pub fn predict_weights(peaks: &[Peak], initial_at_peaks: &[f64]) -> Result<WeightPrediction> {
    if peaks.is_empty() || peaks.len() != initial_at_peaks.len() {
        return Err(Error::InvalidInput(format!(
            "{} peaks but {} initial values",
            peaks.len(),
            initial_at_peaks.len()
        )));
    }
    if initial_at_peaks
        .iter()
        .any(|v| !(v.is_finite() && *v >= 0.0))
    {
        return Err(Error::InvalidInput(
            "initial density must be non-negative at every peak".into(),
        ));
    }
    let any_stationary = peaks.iter().any(|p| p.is_stationary);
    let mut raw = Vec::with_capacity(peaks.len());
    let mut half_weight = Vec::with_capacity(peaks.len());
    let mut suppressed = Vec::with_capacity(peaks.len());
    for (peak, &n0) in peaks.iter().zip(initial_at_peaks) {
        if peak.is_stationary {
            peak.validated_eigenvalues()?;
            let half = !peak.is_interior;
            let factor = if half { 0.5 } else { 1.0 };
            raw.push(factor * n0 / peak.curvature.sqrt_abs_det());
            half_weight.push(half);
            suppressed.push(false);
        } else if peak.is_interior {
            return Err(Error::NonStationaryPeak(peak.location));
        } else if any_stationary {
            raw.push(0.0);
            half_weight.push(false);
            suppressed.push(true);
        } else {
            raw.push(n0 / peak.slope.abs());
            half_weight.push(false);
            suppressed.push(false);
        }
    }
    let total: f64 = raw.iter().sum();
    if !(total > 0.0) {
        return Err(Error::EmptySupport);
    }
    // a_i = A * n0 / sqrt|det H_i| (times boundary factors)
    let unscaled: f64 = peaks
        .iter()
        .zip(initial_at_peaks)
        .zip(&raw)
        .find(|(_, r)| **r > 0.0)
        .map(|((p, n0), r)| {
            if p.is_stationary {
                r / (n0 / p.curvature.sqrt_abs_det())
            } else {
                1.0
            }
        })
        .unwrap_or(1.0);
    Ok(WeightPrediction {
        weights: raw.iter().map(|r| r / total).collect(),
        normalizer: unscaled / total,
        half_weight,
        suppressed,
    })
}

/// [`predict_weights`] with `n⁰` evaluated at each peak location.
pub fn predict_weights_with(
    peaks: &[Peak],
    initial: impl Fn(f64) -> f64,
) -> Result<WeightPrediction> {
    let values: Vec<f64> = peaks.iter().map(|p| initial(p.location)).collect();
    predict_weights(peaks, &values)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RateModel {
    /// `L - ρ(t) ≈ c / t`
    Algebraic,
    /// `L - ρ(t) ≈ K e^{γt}`
    Exponential,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub model: RateModel,
    /// `c` for the algebraic law, `K` for the exponential one.
    pub coefficient: f64,
    /// Fitted exponent `γ`; zero for the algebraic law.
    pub rate: f64,
    /// Mean of `(L - ρ(t)) t` over the window (algebraic law only).
    pub mean_scaled: Option<f64>,
    pub window: (f64, f64),
    pub samples: usize,
    /// Algebraic: max relative spread of `(L - ρ) t` around its mean.
    /// Exponential: max relative misfit of the fitted curve.
    pub max_rel_deviation: f64,
    /// Relative change of the exponential slope between window halves.
    pub slope_drift: Option<f64>,
    /// Set when the floating-point floor cut the exponential window short.
    pub truncated: bool,
}

/// `(L - ρ(t)) t` over the trailing `window_fraction` of the time span.
pub fn fit_algebraic(
    times: &[f64],
    rho: &[f64],
    limit: f64,
    window_fraction: f64,
) -> Result<RateFit> {
    check_series(times, rho)?;
    if !(window_fraction > 0.0 && window_fraction <= 1.0) {
        return Err(Error::InvalidInput(format!(
            "window fraction must lie in (0, 1], got {window_fraction}"
        )));
    }
    let t_end = *times.last().unwrap();
    let t_start = t_end * (1.0 - window_fraction);
    let idx: Vec<usize> = (0..times.len())
        .filter(|&k| times[k] >= t_start && times[k] > 0.0)
        .collect();
    if idx.len() < MIN_ALGEBRAIC_SAMPLES {
        return Err(Error::InvalidInput(format!(
            "algebraic fit needs {MIN_ALGEBRAIC_SAMPLES} samples in the window, found {}",
            idx.len()
        )));
    }
    let scaled: Vec<f64> = idx.iter().map(|&k| (limit - rho[k]) * times[k]).collect();
    let mean = scaled.iter().sum::<f64>() / scaled.len() as f64;
    let max_rel_deviation = scaled
        .iter()
        .map(|s| (s - mean).abs() / mean.abs())
        .fold(0.0, f64::max);
    // least squares for L - ρ = c / t
    let (num, den) = idx.iter().fold((0.0, 0.0), |(n, d), &k| {
        let inv = 1.0 / times[k];
        (n + (limit - rho[k]) * inv, d + inv * inv)
    });
    Ok(RateFit {
        model: RateModel::Algebraic,
        coefficient: num / den,
        rate: 0.0,
        mean_scaled: Some(mean),
        window: (times[idx[0]], t_end),
        samples: idx.len(),
        max_rel_deviation,
        slope_drift: None,
        truncated: false,
    })
}

/// Least-squares line through `(t, ln|L - ρ(t)|)`.
///
/// The window opens once the residual has dropped below
/// [`EXP_WINDOW_START`] of its initial value and after its last sign change,
/// and closes before the residual reaches [`EXP_WINDOW_FLOOR`].
pub fn fit_exponential(times: &[f64], rho: &[f64], limit: f64) -> Result<RateFit> {
    check_series(times, rho)?;
    let residual: Vec<f64> = rho.iter().map(|r| limit - r).collect();
    let initial = residual[0].abs();
    if !(initial > 0.0) {
        return Err(Error::InvalidInput(
            "residual vanishes at the first sample".into(),
        ));
    }
    let floor_at = residual
        .iter()
        .position(|e| e.abs() < EXP_WINDOW_FLOOR)
        .unwrap_or(residual.len());
    let truncated = floor_at < residual.len();
    let usable = &residual[..floor_at];
    let below = usable
        .iter()
        .position(|e| e.abs() < EXP_WINDOW_START * initial)
        .ok_or_else(|| {
            Error::InvalidInput("residual never decays below the window start".into())
        })?;
    let after_sign_change = usable
        .windows(2)
        .rposition(|w| w[0].signum() != w[1].signum())
        .map_or(0, |k| k + 1);
    let start = below.max(after_sign_change);
    let range = start..floor_at;
    if range.len() < MIN_EXPONENTIAL_SAMPLES {
        return Err(Error::InvalidInput(format!(
            "exponential fit window holds only {} samples",
            range.len()
        )));
    }
    let ts = &times[range.clone()];
    let logs: Vec<f64> = residual[range.clone()]
        .iter()
        .map(|e| e.abs().ln())
        .collect();
    let (slope, intercept) = linear_fit(ts, &logs);
    let mid = ts.len() / 2;
    let (s1, _) = linear_fit(&ts[..mid], &logs[..mid]);
    let (s2, _) = linear_fit(&ts[mid..], &logs[mid..]);
    let sign = residual[start].signum();
    let max_rel_deviation = ts
        .iter()
        .zip(&logs)
        .map(|(t, l)| ((intercept + slope * t) - l).exp_m1().abs())
        .fold(0.0, f64::max);
    Ok(RateFit {
        model: RateModel::Exponential,
        coefficient: sign * intercept.exp(),
        rate: slope,
        mean_scaled: None,
        window: (ts[0], *ts.last().unwrap()),
        samples: ts.len(),
        max_rel_deviation,
        slope_drift: Some((s1 - s2).abs() / slope.abs()),
        truncated,
    })
}

/// Rate expected for `-λ_β - ρ_β(t)`: `γ_β` when `γ_β > λ_β`, else `λ_β`.
pub fn predicted_exponential_rate(lambda: f64, gamma: f64) -> f64 {
    if gamma > lambda {
        gamma
    } else {
        lambda
    }
}

fn check_series(times: &[f64], rho: &[f64]) -> Result<()> {
    if times.len() != rho.len() || times.is_empty() {
        return Err(Error::InvalidInput(
            "time and mass series differ in length".into(),
        ));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput("sample times must increase".into()));
    }
    Ok(())
}

fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (sxy, sxx) = xs.iter().zip(ys).fold((0.0, 0.0), |(a, b), (x, y)| {
        (a + (x - mx) * (y - my), b + (x - mx) * (x - mx))
    });
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Selection {
    /// The mutation limit is one Dirac mass at this peak.
    Single { peak: usize },
    /// Tied mirror-image peaks sharing the mass equally.
    Symmetric {
        peaks: Vec<usize>,
        weights: Vec<f64>,
    },
    /// Tied peaks with no symmetry to break the tie.
    Indeterminate { peaks: Vec<usize> },
}

/// Peaks that survive vanishing mutation: the minimisers of `ζ`. A tie
/// between two peaks that mirror each other about `mirror_center` (already
/// checked to be a symmetry of `r`) resolves to equal halves.
pub fn select_surviving_peak(
    peaks: &[Peak],
    mirror_center: Option<f64>,
    grid: &Grid1D,
) -> Result<Selection> {
    if peaks.is_empty() {
        return Err(Error::InvalidInput("no peaks to select from".into()));
    }
    let winners = argmin_zeta(peaks)?;
    if winners.len() == 1 {
        return Ok(Selection::Single { peak: winners[0] });
    }
    if let (Some(c), [i, j]) = (mirror_center, winners.as_slice()) {
        let (xi, xj) = (peaks[*i].location, peaks[*j].location);
        if (xi + xj - 2.0 * c).abs() <= grid.spacing() {
            return Ok(Selection::Symmetric {
                peaks: winners.clone(),
                weights: vec![0.5, 0.5],
            });
        }
    }
    Ok(Selection::Indeterminate { peaks: winners })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationReport {
    pub radius: f64,
    /// Fraction of the total mass within `radius` of each centre.
    pub fractions: Vec<f64>,
    pub off_peak: f64,
    pub total: f64,
}

/// Share of the mass of `density` in disjoint balls around `centers`.
pub fn concentration_report(
    grid: &Grid1D,
    density: &[f64],
    centers: &[f64],
    radius: f64,
) -> Result<ConcentrationReport> {
    if !(radius > 0.0) {
        return Err(Error::InvalidInput(format!(
            "radius must be positive, got {radius}"
        )));
    }
    let mut sorted = centers.to_vec();
    sorted.sort_by(f64::total_cmp);
    if sorted.windows(2).any(|w| w[1] - w[0] < 2.0 * radius) {
        return Err(Error::InvalidInput(format!(
            "balls of radius {radius} around the peaks overlap"
        )));
    }
    let total = grid.trapezoid(density);
    if !(total > 0.0) {
        return Err(Error::InvalidInput("density has no mass".into()));
    }
    let fractions: Vec<f64> = centers
        .iter()
        .map(|c| grid.integrate_between(density, c - radius, c + radius) / total)
        .collect();
    let off_peak = (1.0 - fractions.iter().sum::<f64>()).max(0.0);
    Ok(ConcentrationReport {
        radius,
        fractions,
        off_peak,
        total,
    })
}
