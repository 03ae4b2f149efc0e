//! Fitness landscapes built from Gaussian bumps, their maxima, and the
//! curvature functional that decides which maximum survives vanishing
//! mutation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid1D;

/// Default relative tolerance under which two maxima count as equally high.
pub const PEAK_REL_TOL: f64 = 1e-6;
/// `|r'| <= STATIONARY_TOL * r_M / h` marks a refined maximum as stationary.
pub const STATIONARY_TOL: f64 = 1e-8;
/// Relative tie tolerance when comparing curvature functionals.
pub const ZETA_TIE_TOL: f64 = 1e-9;
/// Curvatures within this fraction of the bump curvature scale are degenerate.
const DEGENERACY_TOL: f64 = 1e-10;
const NEWTON_MAX_STEPS: usize = 20;

/// `amplitude * exp(-(x - center)^2 / width)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianBump {
    pub amplitude: f64,
    pub center: f64,
    pub width: f64,
}

impl GaussianBump {
    pub fn new(amplitude: f64, center: f64, width: f64) -> Result<Self> {
        if !(amplitude > 0.0 && amplitude.is_finite()) {
            return Err(Error::InvalidLandscape(format!(
                "bump amplitude must be positive, got {amplitude}"
            )));
        }
        if !(width > 0.0 && width.is_finite()) {
            return Err(Error::InvalidLandscape(format!(
                "bump width must be positive, got {width}"
            )));
        }
        if !center.is_finite() {
            return Err(Error::InvalidLandscape("bump center is not finite".into()));
        }
        Ok(Self {
            amplitude,
            center,
            width,
        })
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        let u = x - self.center;
        self.amplitude * (-u * u / self.width).exp()
    }

    #[inline]
    pub fn derivative(&self, x: f64) -> f64 {
        let u = x - self.center;
        -2.0 * u / self.width * self.eval(x)
    }

    #[inline]
    pub fn second_derivative(&self, x: f64) -> f64 {
        let u = x - self.center;
        let s = self.width;
        (4.0 * u * u / (s * s) - 2.0 / s) * self.eval(x)
    }
}

/// Growth rate `r(x) = offset + Σ bumps` on a bounded trait interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Landscape {
    bumps: Vec<GaussianBump>,
    offset: f64,
    grid: Grid1D,
}

impl Landscape {
    /// Fails when the grid maximum of `r` is not positive.
    pub fn new(bumps: Vec<GaussianBump>, offset: f64, grid: Grid1D) -> Result<Self> {
        if !offset.is_finite() {
            return Err(Error::InvalidLandscape("offset is not finite".into()));
        }
        let landscape = Self {
            bumps,
            offset,
            grid,
        };
        let r_max = landscape.grid_max();
        if r_max <= 0.0 {
            return Err(Error::InvalidLandscape(format!(
                "max r = {r_max} on the domain; growth must be positive somewhere"
            )));
        }
        Ok(landscape)
    }

    pub fn constant(value: f64, grid: Grid1D) -> Result<Self> {
        Self::new(Vec::new(), value, grid)
    }

    pub fn bumps(&self) -> &[GaussianBump] {
        &self.bumps
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    /// Same bumps, shifted vertically by `delta`.
    pub fn shifted(&self, delta: f64) -> Result<Self> {
        Self::new(self.bumps.clone(), self.offset + delta, self.grid)
    }

    /// Same bumps on another grid.
    pub fn with_grid(&self, grid: Grid1D) -> Result<Self> {
        Self::new(self.bumps.clone(), self.offset, grid)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.bumps
            .iter()
            .fold(self.offset, |acc, b| acc + b.eval(x))
    }

    pub fn derivative(&self, x: f64) -> f64 {
        self.bumps.iter().map(|b| b.derivative(x)).sum()
    }

    pub fn second_derivative(&self, x: f64) -> f64 {
        self.bumps.iter().map(|b| b.second_derivative(x)).sum()
    }

    /// `r` at every grid node.
    pub fn values(&self) -> Vec<f64> {
        self.grid.sample(|x| self.eval(x))
    }

    pub fn grid_max(&self) -> f64 {
        self.values().into_iter().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn grid_min(&self) -> f64 {
        self.values().into_iter().fold(f64::INFINITY, f64::min)
    }

    /// Scale of `|r''|` used to decide degeneracy.
    fn curvature_scale(&self) -> f64 {
        self.bumps.iter().map(|b| 2.0 * b.amplitude / b.width).sum()
    }

    /// Every grid-local maximum, refined by guarded Newton steps on `r'`,
    /// whose refined value is within `rel_tol` of the highest one. Sorted
    /// by location. Empty when `max r <= 0`.
    pub fn find_peaks(&self, rel_tol: f64) -> Result<Vec<Peak>> {
        if !(rel_tol > 0.0 && rel_tol < 1.0) {
            return Err(Error::InvalidInput(format!(
                "rel_tol must lie in (0, 1), got {rel_tol}"
            )));
        }
        let v = self.values();
        let last = v.len() - 1;
        let h = self.grid.spacing();

        let mut candidates: Vec<(f64, f64)> = Vec::new();
        let mut k = 0;
        while k <= last {
            // a maximal run of equal values counts once, from its first node
            let mut end = k;
            while end < last && v[end + 1] == v[k] {
                end += 1;
            }
            let rises = k == 0 || v[k] > v[k - 1];
            let falls = end == last || v[end + 1] < v[k];
            if rises && falls && !(k == 0 && end == last) {
                let x = self.refine(k);
                candidates.push((x, self.eval(x)));
            }
            k = end + 1;
        }
        let r_max = candidates
            .iter()
            .map(|c| c.1)
            .fold(f64::NEG_INFINITY, f64::max);
        if !(r_max > 0.0) {
            return Ok(Vec::new());
        }

        let threshold = (1.0 - rel_tol) * r_max;
        let slope_tol = STATIONARY_TOL * r_max / h;
        let (lo, hi) = (self.grid.x_min(), self.grid.x_max());
        let mut peaks: Vec<Peak> = candidates
            .into_iter()
            .filter(|&(_, value)| value >= threshold)
            .map(|(x, value)| {
                let slope = self.derivative(x);
                Peak {
                    location: x,
                    value,
                    slope,
                    curvature: Curvature::Second(self.second_derivative(x)),
                    is_interior: x - lo >= h && hi - x >= h,
                    is_stationary: slope.abs() <= slope_tol,
                }
            })
            .collect();
        peaks.sort_by(|a, b| a.location.total_cmp(&b.location));
        Ok(peaks)
    }

    /// Newton iteration on `r'` started at node `k`, never leaving the two
    /// cells adjacent to it.
    fn refine(&self, k: usize) -> f64 {
        let g = &self.grid;
        let lo = if k == 0 { g.x_min() } else { g.node(k - 1) };
        let hi = if k + 1 == g.len() {
            g.x_max()
        } else {
            g.node(k + 1)
        };
        let mut x = g.node(k);
        for _ in 0..NEWTON_MAX_STEPS {
            let d2 = self.second_derivative(x);
            if !(d2 < 0.0) {
                break;
            }
            let next = (x - self.derivative(x) / d2).clamp(lo, hi);
            let done = (next - x).abs() <= 4.0 * f64::EPSILON * x.abs().max(1.0);
            x = next;
            if done {
                break;
            }
        }
        x
    }

    /// Analytic `r''` at a stationary 1-D peak, rejected unless strictly
    /// negative.
    pub fn curvature_at(&self, peak: &Peak) -> Result<f64> {
        if !peak.is_stationary {
            return Err(Error::NonStationaryPeak(peak.location));
        }
        let d2 = self.second_derivative(peak.location);
        if !(d2 < -DEGENERACY_TOL * self.curvature_scale()) {
            return Err(Error::DegeneratePeak {
                location: peak.location,
                curvature: d2,
            });
        }
        Ok(d2)
    }

    /// True iff `|r(c+u) - r(c-u)| <= tol * r_M` for every node offset `u`
    /// whose mirror image stays in the domain.
    pub fn check_symmetry(&self, c: f64, tol: f64) -> bool {
        let g = &self.grid;
        if !g.contains(c) {
            return false;
        }
        let r_max = self.grid_max();
        let reach = (c - g.x_min()).min(g.x_max() - c);
        (0..g.len())
            .map(|k| (g.node(k) - c).abs())
            .filter(|&u| u <= reach)
            .all(|u| (self.eval(c + u) - self.eval(c - u)).abs() <= tol * r_max)
    }
}

/// Curvature data at a maximum: `r''` in 1-D, Hessian eigenvalues in general.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Curvature {
    Second(f64),
    Hessian(Vec<f64>),
}

impl Curvature {
    pub fn eigenvalues(&self) -> Vec<f64> {
        match self {
            Curvature::Second(d2) => vec![*d2],
            Curvature::Hessian(eigs) => eigs.clone(),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Curvature::Second(_) => 1,
            Curvature::Hessian(eigs) => eigs.len(),
        }
    }

    /// `sqrt(|det H|)`.
    pub fn sqrt_abs_det(&self) -> f64 {
        self.eigenvalues()
            .iter()
            .map(|l| l.abs())
            .product::<f64>()
            .sqrt()
    }
}

/// A maximum point of `r`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    pub location: f64,
    pub value: f64,
    /// `r'` at the refined location.
    pub slope: f64,
    pub curvature: Curvature,
    pub is_interior: bool,
    pub is_stationary: bool,
}

impl Peak {
    /// An interior, stationary peak of arbitrary dimension given by its
    /// Hessian eigenvalues, as input for the weight and selection formulas.
    pub fn from_hessian(location: f64, value: f64, eigenvalues: &[f64]) -> Result<Self> {
        let eigs = validate_hessian(location, eigenvalues)?;
        Ok(Self {
            location,
            value,
            slope: 0.0,
            curvature: Curvature::Hessian(eigs),
            is_interior: true,
            is_stationary: true,
        })
    }

    /// Checks that every curvature eigenvalue is strictly negative.
    pub fn validated_eigenvalues(&self) -> Result<Vec<f64>> {
        validate_hessian(self.location, &self.curvature.eigenvalues())
    }
}

/// Returns the eigenvalues unchanged after checking they are all negative.
pub fn validate_hessian(location: f64, eigenvalues: &[f64]) -> Result<Vec<f64>> {
    if eigenvalues.is_empty() {
        return Err(Error::InvalidInput("empty Hessian spectrum".into()));
    }
    if let Some(&bad) = eigenvalues.iter().find(|l| !(**l < 0.0) || !l.is_finite()) {
        return Err(Error::DegeneratePeak {
            location,
            curvature: bad,
        });
    }
    Ok(eigenvalues.to_vec())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZetaValue {
    pub peak: usize,
    pub value: f64,
}

/// `ζ = Σ_j sqrt(|λ_j|)` over the curvature eigenvalues of a peak.
pub fn zeta(index: usize, peak: &Peak) -> Result<ZetaValue> {
    let value = peak
        .validated_eigenvalues()?
        .iter()
        .map(|l| l.abs().sqrt())
        .sum();
    Ok(ZetaValue { peak: index, value })
}

/// Indices of the peaks whose `ζ` lies within [`ZETA_TIE_TOL`] (relative)
/// of the minimum.
pub fn argmin_zeta(peaks: &[Peak]) -> Result<Vec<usize>> {
    let values = peaks
        .iter()
        .enumerate()
        .map(|(i, p)| zeta(i, p).map(|z| z.value))
        .collect::<Result<Vec<_>>>()?;
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(values
        .iter()
        .enumerate()
        .filter(|(_, &z)| z - min <= ZETA_TIE_TOL * min)
        .map(|(i, _)| i)
        .collect())
}
