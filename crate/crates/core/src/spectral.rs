//! Principal and second eigenpairs of `L_β = βΔ + r` with zero-flux
//! boundary, on the same discrete operator the method-of-lines solver uses.
//!
//! Sign convention: `L_β ψ = -λ ψ`, so `λ_β = -μ₁` where `μ₁` is the top
//! eigenvalue of the matrix `βΔ_h + diag(r)`. That matrix is self-adjoint in
//! the trapezoid inner product; conjugating with `W^{1/2}` (trapezoid
//! weights) turns it into a symmetric tridiagonal matrix, which is where
//! the bisection and inverse iteration run.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::asymptotics::concentration_report;
use crate::error::{Error, Result};
use crate::grid::Grid1D;
use crate::landscape::{Landscape, PEAK_REL_TOL};
use crate::pde::NeumannLaplacian;
use crate::tridiag::SymTridiag;

/// Residual contract: `‖L_β ψ + λψ‖_∞ <= RESIDUAL_TOL · (β/h² + r_M)`.
pub const RESIDUAL_TOL: f64 = 1e-10;
/// `|γ_β|` below `DEGENERACY_TOL · (β/h² + r_M)` is beyond resolution.
pub const DEGENERACY_TOL: f64 = 1e-13;
/// Relative tolerance for detecting a mirror-symmetric growth profile.
const MIRROR_TOL: f64 = 1e-12;
const MAX_ITERATIONS: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Normalization {
    /// `∫ψ = 1`.
    UnitMass,
    /// `∫ψ² = 1`.
    UnitL2,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenPair {
    /// `λ` in the `L_β ψ = -λψ` convention.
    pub lambda: f64,
    pub psi: Vec<f64>,
    pub normalization: Normalization,
    /// `‖L_β ψ + λψ‖_∞`.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralSummary {
    pub lambda: f64,
    pub lambda2: f64,
    /// `-(μ₁ - μ₂)`: minus the spectral gap, always `<= 0`.
    pub gamma: f64,
    /// Set when `|γ|` is below what the solver can resolve.
    pub degenerate: bool,
    /// `∫ α₂(n⁰)`, when an initial density was supplied.
    pub projection: Option<f64>,
}

/// The discretised operator for one landscape and mutation rate.
#[derive(Debug, Clone)]
pub struct SpectralProblem {
    grid: Grid1D,
    beta: f64,
    r: Vec<f64>,
    r_max: f64,
    sym: SymTridiag,
    sqrt_w: Vec<f64>,
    mirror_symmetric: bool,
}

impl SpectralProblem {
    pub fn new(landscape: &Landscape, beta: f64) -> Result<Self> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "eigenproblem needs a positive mutation rate, got {beta}"
            )));
        }
        let grid = *landscape.grid();
        let r = landscape.values();
        let r_max = r.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let h = grid.spacing();
        let coupling = beta / (h * h);
        let len = grid.len();

        let diag: Vec<f64> = r.iter().map(|ri| ri - 2.0 * coupling).collect();
        let mut off = vec![coupling; len - 1];
        off[0] = std::f64::consts::SQRT_2 * coupling;
        off[len - 2] = std::f64::consts::SQRT_2 * coupling;
        let sqrt_w = grid.weights().into_iter().map(f64::sqrt).collect();

        let scale = r.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let mirror_symmetric =
            (0..len / 2).all(|k| (r[k] - r[len - 1 - k]).abs() <= MIRROR_TOL * scale);

        Ok(Self {
            grid,
            beta,
            r,
            r_max,
            sym: SymTridiag::new(diag, off),
            sqrt_w,
            mirror_symmetric,
        })
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn is_mirror_symmetric(&self) -> bool {
        self.mirror_symmetric
    }

    /// `β/h² + r_M`, the scale of the residual and degeneracy tolerances.
    pub fn resolution_scale(&self) -> f64 {
        let h = self.grid.spacing();
        self.beta / (h * h) + self.r_max.abs()
    }

    /// `‖(βΔ_h + r) ψ - μ ψ‖_∞` with `μ = -λ`.
    pub fn residual(&self, lambda: f64, psi: &[f64]) -> f64 {
        let mut lap = vec![0.0; psi.len()];
        NeumannLaplacian::new(self.grid).apply(psi, &mut lap);
        psi.iter()
            .zip(&lap)
            .zip(&self.r)
            .map(|((p, l), ri)| (self.beta * l + ri * p + lambda * p).abs())
            .fold(0.0, f64::max)
    }

    fn shift_gap(&self) -> f64 {
        1e-9 * self.sym.norm_bound().max(1.0)
    }

    fn mirror(&self, x: &mut [f64], even: bool) {
        let n = x.len();
        for k in 0..n / 2 {
            let (a, b) = (x[k], x[n - 1 - k]);
            let (lo, hi) = if even {
                (0.5 * (a + b), 0.5 * (a + b))
            } else {
                (0.5 * (a - b), 0.5 * (b - a))
            };
            x[k] = lo;
            x[n - 1 - k] = hi;
        }
        if !even && n % 2 == 1 {
            x[n / 2] = 0.0;
        }
    }

    fn sym_residual(&self, mu: f64, x: &[f64]) -> f64 {
        let mut sx = vec![0.0; x.len()];
        self.sym.mul(x, &mut sx);
        sx.iter()
            .zip(x)
            .map(|(s, v)| (s - mu * v).abs())
            .fold(0.0, f64::max)
    }

    /// Inverse iteration at `σ = μ + shift`; `deflate` is kept orthogonal.
    fn inverse_iteration(&self, mu: f64, start: Vec<f64>, deflate: Option<&[f64]>) -> Vec<f64> {
        let sigma = mu + self.shift_gap();
        let target = 64.0 * f64::EPSILON * self.sym.norm_bound().max(1.0);
        let mut x = start;
        let mut best = (f64::INFINITY, x.clone());
        for _ in 0..MAX_ITERATIONS {
            if let Some(q) = deflate {
                orthogonalize(&mut x, q);
            }
            normalize(&mut x);
            let res = self.sym_residual(mu, &x);
            if res < best.0 {
                best = (res, x.clone());
            }
            if res <= target {
                break;
            }
            x = match deflate {
                None => self.sym.solve_shifted_definite(sigma, &x),
                Some(_) => self.sym.solve_shifted(sigma, &x),
            };
        }
        best.1
    }

    fn to_grid(&self, x: &[f64]) -> Vec<f64> {
        x.iter().zip(&self.sqrt_w).map(|(v, s)| v / s).collect()
    }

    fn check_residual(&self, lambda: f64, psi: &[f64]) -> Result<f64> {
        let residual = self.residual(lambda, psi);
        if !(residual <= RESIDUAL_TOL * self.resolution_scale()) {
            return Err(Error::NoConvergence {
                iterations: MAX_ITERATIONS,
                residual,
            });
        }
        Ok(residual)
    }

    fn principal_unit(&self) -> (f64, Vec<f64>) {
        let mu = self.sym.eigenvalue_from_top(0);
        let start = self.sqrt_w.clone();
        let mut x = self.inverse_iteration(mu, start, None);
        if self.mirror_symmetric {
            self.mirror(&mut x, true);
        }
        fix_sign(&mut x);
        normalize(&mut x);
        (mu, x)
    }

    /// Principal pair with `∫ψ = 1` and `ψ >= 0`.
    pub fn principal(&self) -> Result<EigenPair> {
        let (mu, x) = self.principal_unit();
        if mu > self.r_max + 16.0 * f64::EPSILON * self.sym.norm_bound() {
            return Err(Error::NoConvergence {
                iterations: 0,
                residual: mu - self.r_max,
            });
        }
        let mut psi = self.to_grid(&x);
        let mass = self.grid.trapezoid(&psi);
        psi.iter_mut().for_each(|v| *v /= mass);
        let lambda = -mu;
        let residual = self.check_residual(lambda, &psi)?;
        Ok(EigenPair {
            lambda,
            psi,
            normalization: Normalization::UnitMass,
            residual,
        })
    }

    /// Second pair with `∫ψ² = 1`, its largest-magnitude entry positive.
    pub fn second(&self) -> Result<EigenPair> {
        let (_, x1) = self.principal_unit();
        let mu = self.sym.eigenvalue_from_top(1);
        let len = self.grid.len();
        let start: Vec<f64> = (0..len)
            .map(|k| (std::f64::consts::PI * k as f64 / (len - 1) as f64).cos() + 0.1)
            .collect();
        let mut x = self.inverse_iteration(mu, start, Some(&x1));
        if self.mirror_symmetric {
            self.mirror(&mut x, false);
        }
        fix_sign(&mut x);
        normalize(&mut x);
        let psi = self.to_grid(&x);
        let lambda = -mu;
        let residual = self.check_residual(lambda, &psi)?;
        Ok(EigenPair {
            lambda,
            psi,
            normalization: Normalization::UnitL2,
            residual,
        })
    }

    /// `λ_{2,β}` in the `-μ` convention, hence `>= λ_β`.
    pub fn second_eigenvalue(&self) -> f64 {
        -self.sym.eigenvalue_from_top(1)
    }

    /// `(γ_β, degenerate)` with `γ_β = μ₂ - μ₁ <= 0`.
    pub fn spectral_gap(&self) -> (f64, bool) {
        let mu1 = self.sym.eigenvalue_from_top(0);
        let mu2 = self.sym.eigenvalue_from_top(1);
        let gamma = (mu2 - mu1).min(0.0);
        (
            gamma,
            gamma.abs() < DEGENERACY_TOL * self.resolution_scale(),
        )
    }

    /// `(β∫|φ'|² - ∫rφ²) / ∫φ²`, with the gradient on cell midpoints.
    pub fn rayleigh_quotient(&self, phi: &[f64]) -> Result<f64> {
        if phi.len() != self.grid.len() {
            return Err(Error::InvalidInput(
                "test function has the wrong length".into(),
            ));
        }
        let norm = self.grid.inner(phi, phi);
        if !(norm > 0.0) {
            return Err(Error::InvalidInput(
                "Rayleigh quotient of the zero function".into(),
            ));
        }
        let h = self.grid.spacing();
        let gradient: f64 = phi.windows(2).map(|w| (w[1] - w[0]).powi(2)).sum::<f64>() / h;
        let r_phi2: Vec<f64> = phi.iter().zip(&self.r).map(|(p, r)| r * p * p).collect();
        Ok((self.beta * gradient - self.grid.trapezoid(&r_phi2)) / norm)
    }

    /// `∫ α₂(n⁰)`: the trapezoid projection of `n⁰` on the unit second
    /// eigenvector, times that eigenvector's integral.
    pub fn project_second(&self, initial: &[f64]) -> Result<f64> {
        let second = self.second()?;
        Ok(project_on(&self.grid, initial, &second.psi))
    }

    pub fn summary(&self, initial: Option<&[f64]>) -> Result<SpectralSummary> {
        let lambda = -self.sym.eigenvalue_from_top(0);
        let (gamma, degenerate) = self.spectral_gap();
        let projection = initial.map(|n0| self.project_second(n0)).transpose()?;
        Ok(SpectralSummary {
            lambda,
            lambda2: self.second_eigenvalue(),
            gamma,
            degenerate,
            projection,
        })
    }
}

/// `⟨u, ψ⟩ ∫ψ` for a unit-L² `ψ`.
pub fn project_on(grid: &Grid1D, u: &[f64], psi: &[f64]) -> f64 {
    grid.inner(u, psi) * grid.trapezoid(psi)
}

fn normalize(x: &mut [f64]) {
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 0.0 {
        x.iter_mut().for_each(|v| *v /= norm);
    }
}

fn orthogonalize(x: &mut [f64], q: &[f64]) {
    let dot: f64 = x.iter().zip(q).map(|(a, b)| a * b).sum();
    x.iter_mut().zip(q).for_each(|(a, b)| *a -= dot * b);
}

/// Flips the sign so the largest-magnitude entry is positive.
fn fix_sign(x: &mut [f64]) {
    let pivot = x
        .iter()
        .copied()
        .fold(0.0f64, |m, v| if v.abs() > m.abs() { v } else { m });
    if pivot < 0.0 {
        x.iter_mut().for_each(|v| *v = -*v);
    }
}

pub fn principal_eigenpair(landscape: &Landscape, beta: f64) -> Result<EigenPair> {
    SpectralProblem::new(landscape, beta)?.principal()
}

pub fn second_eigenvalue(landscape: &Landscape, beta: f64) -> Result<f64> {
    Ok(SpectralProblem::new(landscape, beta)?.second_eigenvalue())
}

pub fn spectral_gap(landscape: &Landscape, beta: f64) -> Result<(f64, bool)> {
    Ok(SpectralProblem::new(landscape, beta)?.spectral_gap())
}

pub fn rayleigh_quotient(landscape: &Landscape, beta: f64, phi: &[f64]) -> Result<f64> {
    SpectralProblem::new(landscape, beta)?.rayleigh_quotient(phi)
}

pub fn project_second(landscape: &Landscape, beta: f64, initial: &[f64]) -> Result<f64> {
    SpectralProblem::new(landscape, beta)?.project_second(initial)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub epsilon: f64,
    pub lambda: f64,
    pub lambda2: f64,
    pub gamma: f64,
    pub degenerate: bool,
    pub residual: f64,
    /// Fraction of `∫ψ_ε` within `radius` of each peak.
    pub peak_fractions: Vec<f64>,
    pub off_peak: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpsilonSweep {
    pub peak_locations: Vec<f64>,
    pub radius: f64,
    pub points: Vec<SweepPoint>,
}

/// Principal eigenpairs for a decreasing list of mutation rates, each with
/// the concentration of `ψ_ε` around the maxima of `r`. Rates are solved on
/// up to `jobs` worker threads; results come back in input order.
pub fn epsilon_sweep(
    landscape: &Landscape,
    epsilons: &[f64],
    radius: f64,
    jobs: usize,
) -> Result<EpsilonSweep> {
    if epsilons.is_empty() || epsilons.iter().any(|e| !(*e > 0.0 && e.is_finite())) {
        return Err(Error::InvalidInput(
            "sweep needs a non-empty list of positive rates".into(),
        ));
    }
    if epsilons.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidInput(
            "sweep rates must be strictly decreasing".into(),
        ));
    }
    let peaks = landscape.find_peaks(PEAK_REL_TOL)?;
    let locations: Vec<f64> = peaks.iter().map(|p| p.location).collect();

    let solve = |&epsilon: &f64| -> Result<SweepPoint> {
        let problem = SpectralProblem::new(landscape, epsilon)?;
        let pair = problem.principal()?;
        let (gamma, degenerate) = problem.spectral_gap();
        let report = concentration_report(problem.grid(), &pair.psi, &locations, radius)?;
        Ok(SweepPoint {
            epsilon,
            lambda: pair.lambda,
            lambda2: problem.second_eigenvalue(),
            gamma,
            degenerate,
            residual: pair.residual,
            peak_fractions: report.fractions,
            off_peak: report.off_peak,
        })
    };

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::InvalidInput(format!("cannot start worker pool: {e}")))?;
    let points = pool.install(|| epsilons.par_iter().map(solve).collect::<Result<Vec<_>>>())?;
    Ok(EpsilonSweep {
        peak_locations: locations,
        radius,
        points,
    })
}
