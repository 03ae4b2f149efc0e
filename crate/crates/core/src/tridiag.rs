//! Symmetric tridiagonal eigen-machinery: Sturm-sequence bisection for
//! individual eigenvalues and shifted solves for inverse iteration.

/// Symmetric tridiagonal matrix with diagonal `diag` and off-diagonal `off`
/// (`off[i]` couples rows `i` and `i + 1`).
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiag {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl SymTridiag {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Self {
        assert!(!diag.is_empty() && off.len() + 1 == diag.len());
        Self { diag, off }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// `max_i (|d_i| + |e_{i-1}| + |e_i|)`, an upper bound on the spectral radius.
    pub fn norm_bound(&self) -> f64 {
        let (lo, hi) = self.gershgorin();
        lo.abs().max(hi.abs())
    }

    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let left = if i > 0 { self.off[i - 1].abs() } else { 0.0 };
            let right = if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - left - right);
            hi = hi.max(self.diag[i] + left + right);
        }
        (lo, hi)
    }

    pub fn mul(&self, x: &[f64], out: &mut [f64]) {
        let n = self.len();
        for i in 0..n {
            let mut v = self.diag[i] * x[i];
            if i > 0 {
                v += self.off[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                v += self.off[i] * x[i + 1];
            }
            out[i] = v;
        }
    }

    /// Number of eigenvalues strictly below `x` (negative pivots of the
    /// `LDLᵀ` factorisation of `T - xI`).
    pub fn count_below(&self, x: f64) -> usize {
        let guard = f64::MIN_POSITIVE.sqrt() * self.norm_bound().max(1.0);
        let mut count = 0;
        let mut q = self.diag[0] - x;
        for i in 0..self.len() {
            if i > 0 {
                let e = self.off[i - 1];
                q = (self.diag[i] - x) - e * e / q;
            }
            if q.abs() < guard {
                q = -guard;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// The `k`-th smallest eigenvalue (`k = 0` is the smallest), bisected
    /// to full double precision.
    pub fn eigenvalue(&self, k: usize) -> f64 {
        assert!(k < self.len());
        let (lo0, hi0) = self.gershgorin();
        let pad = f64::EPSILON * self.norm_bound().max(1.0);
        let (mut lo, mut hi) = (lo0 - pad, hi0 + pad);
        for _ in 0..256 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// The `k`-th largest eigenvalue (`k = 0` is the largest).
    pub fn eigenvalue_from_top(&self, k: usize) -> f64 {
        self.eigenvalue(self.len() - 1 - k)
    }

    /// Solves `(σI - T) x = b` by elimination without pivoting. Only valid
    /// for `σ` above the spectrum, where `σI - T` is positive definite. When
    /// the off-diagonals of `T` are non-negative, a non-negative `b` yields a
    /// non-negative `x` with no cancellation anywhere.
    pub fn solve_shifted_definite(&self, sigma: f64, b: &[f64]) -> Vec<f64> {
        let n = self.len();
        let mut pivot = vec![0.0; n];
        let mut y = vec![0.0; n];
        pivot[0] = sigma - self.diag[0];
        y[0] = b[0];
        for i in 1..n {
            let e = self.off[i - 1];
            let m = -e / pivot[i - 1];
            pivot[i] = (sigma - self.diag[i]) - m * (-e);
            y[i] = b[i] - m * y[i - 1];
        }
        let mut x = vec![0.0; n];
        x[n - 1] = y[n - 1] / pivot[n - 1];
        for i in (0..n - 1).rev() {
            x[i] = (y[i] + self.off[i] * x[i + 1]) / pivot[i];
        }
        x
    }

    /// Solves `(σI - T) x = b` by Gaussian elimination with partial
    /// pivoting; exact zero pivots are replaced by a tiny multiple of the
    /// matrix norm, as usual for inverse iteration.
    pub fn solve_shifted(&self, sigma: f64, b: &[f64]) -> Vec<f64> {
        let n = self.len();
        let tiny = f64::EPSILON * self.norm_bound().max(sigma.abs()).max(1.0);
        let mut d: Vec<f64> = self.diag.iter().map(|v| sigma - v).collect();
        let dl: Vec<f64> = self.off.iter().map(|v| -v).collect();
        let mut du = dl.clone();
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut x = b.to_vec();

        for i in 0..n - 1 {
            if d[i].abs() >= dl[i].abs() {
                if d[i] == 0.0 {
                    d[i] = tiny;
                }
                let fact = dl[i] / d[i];
                d[i + 1] -= fact * du[i];
                x[i + 1] -= fact * x[i];
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                let temp = d[i + 1];
                d[i + 1] = du[i] - fact * temp;
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] = -fact * du2[i];
                }
                du[i] = temp;
                x.swap(i, i + 1);
                x[i + 1] -= fact * x[i];
            }
        }
        if d[n - 1] == 0.0 {
            d[n - 1] = tiny;
        }

        x[n - 1] /= d[n - 1];
        if n > 1 {
            x[n - 2] = (x[n - 2] - du[n - 2] * x[n - 1]) / d[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            x[i] = (x[i] - du[i] * x[i + 1] - du2[i] * x[i + 2]) / d[i];
        }
        x
    }
}
