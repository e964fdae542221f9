//! Platt's sequential minimal optimization on a precomputed kernel.
//!
//! Solves the soft-margin dual
//!
//! ```text
//! max  Σ α_i − ½ Σ_ij α_i α_j y_i y_j K_ij
//! s.t. 0 ≤ α_i ≤ C,  Σ α_i y_i = 0
//! ```
//!
//! with decision function `f(x) = Σ α_i y_i K(x_i, x) + b`.

use crate::kernel::DenseMatrix;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SmoParams {
    /// KKT tolerance on `y_i E_i`.
    pub tolerance: f64,
    /// Smallest relative change of a multiplier counted as progress.
    pub alpha_epsilon: f64,
    /// Bound on outer passes (full sweeps and non-bound sweeps).
    pub max_passes: usize,
}

impl Default for SmoParams {
    fn default() -> Self {
        SmoParams {
            tolerance: 1e-3,
            alpha_epsilon: 1e-8,
            max_passes: 100_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BinarySolution {
    pub alpha: Vec<f64>,
    pub bias: f64,
    pub passes: usize,
}

struct Solver<'a> {
    kernel: &'a DenseMatrix,
    y: &'a [f64],
    c: f64,
    params: SmoParams,
    alpha: Vec<f64>,
    /// `E_i = f(x_i) - y_i`, kept current for every example.
    error: Vec<f64>,
    bias: f64,
}

/// Run SMO. Returns `None` when `max_passes` is exhausted.
pub fn solve(kernel: &DenseMatrix, y: &[f64], c: f64, params: SmoParams) -> Option<BinarySolution> {
    let n = y.len();
    let mut s = Solver {
        kernel,
        y,
        c,
        params,
        alpha: vec![0.0; n],
        error: y.iter().map(|v| -v).collect(),
        bias: 0.0,
    };

    let mut passes = 0;
    let mut examine_all = true;
    let mut changed = 0;
    while changed > 0 || examine_all {
        if passes >= params.max_passes {
            return None;
        }
        passes += 1;
        changed = 0;
        for i in 0..n {
            if (examine_all || s.is_free(i)) && s.examine(i) {
                changed += 1;
            }
        }
        if examine_all {
            examine_all = false;
        } else if changed == 0 {
            examine_all = true;
        }
    }
    s.refit_bias();
    Some(BinarySolution {
        alpha: s.alpha,
        bias: s.bias,
        passes,
    })
}

impl Solver<'_> {
    fn is_free(&self, i: usize) -> bool {
        self.alpha[i] > 0.0 && self.alpha[i] < self.c
    }

    fn violates_kkt(&self, i: usize) -> bool {
        let r = self.error[i] * self.y[i];
        let tol = self.params.tolerance;
        (r < -tol && self.alpha[i] < self.c) || (r > tol && self.alpha[i] > 0.0)
    }

    fn examine(&mut self, i2: usize) -> bool {
        if !self.violates_kkt(i2) {
            return false;
        }
        let n = self.y.len();
        let e2 = self.error[i2];

        // Second choice: the free multiplier with the largest |E1 - E2|,
        // lowest index on ties.
        let mut best: Option<(usize, f64)> = None;
        let mut free_count = 0;
        for i in (0..n).filter(|&i| self.is_free(i)) {
            free_count += 1;
            let gap = (self.error[i] - e2).abs();
            if best.is_none_or(|(_, g)| gap > g) {
                best = Some((i, gap));
            }
        }
        if free_count > 1 {
            if let Some((i1, _)) = best {
                if self.take_step(i1, i2) {
                    return true;
                }
            }
        }
        for i1 in 0..n {
            if self.is_free(i1) && self.take_step(i1, i2) {
                return true;
            }
        }
        for i1 in 0..n {
            if !self.is_free(i1) && self.take_step(i1, i2) {
                return true;
            }
        }
        false
    }

    fn take_step(&mut self, i1: usize, i2: usize) -> bool {
        if i1 == i2 {
            return false;
        }
        let c = self.c;
        let (a1, a2) = (self.alpha[i1], self.alpha[i2]);
        let (y1, y2) = (self.y[i1], self.y[i2]);
        let (e1, e2) = (self.error[i1], self.error[i2]);
        let s = y1 * y2;

        let (lo, hi) = if y1 != y2 {
            ((a2 - a1).max(0.0), (c + a2 - a1).min(c))
        } else {
            ((a2 + a1 - c).max(0.0), (a2 + a1).min(c))
        };
        if hi - lo <= 0.0 {
            return false;
        }

        let k11 = self.kernel.get(i1, i1);
        let k12 = self.kernel.get(i1, i2);
        let k22 = self.kernel.get(i2, i2);
        let eta = k11 + k22 - 2.0 * k12;

        let mut new2 = if eta > 1e-12 {
            (a2 + y2 * (e1 - e2) / eta).clamp(lo, hi)
        } else {
            // Objective gain along the constraint line at each end.
            let gain = |t: f64| {
                let d = t - a2;
                y2 * (e1 - e2) * d - 0.5 * eta * d * d
            };
            let (gl, gh) = (gain(lo), gain(hi));
            if gl > gh + 1e-12 {
                lo
            } else if gh > gl + 1e-12 {
                hi
            } else {
                a2
            }
        };
        let eps = self.params.alpha_epsilon;
        if (new2 - a2).abs() < eps * (new2 + a2 + eps) {
            return false;
        }

        let mut new1 = a1 + s * (a2 - new2);
        if new1 < 0.0 {
            new2 += s * new1;
            new1 = 0.0;
        } else if new1 > c {
            new2 += s * (new1 - c);
            new1 = c;
        }
        let snap = |a: f64| {
            if a < 1e-12 * c {
                0.0
            } else if a > c * (1.0 - 1e-12) {
                c
            } else {
                a
            }
        };
        let (new1, new2) = (snap(new1), snap(new2));

        let d1 = y1 * (new1 - a1);
        let d2 = y2 * (new2 - a2);
        let b1 = self.bias - e1 - d1 * k11 - d2 * k12;
        let b2 = self.bias - e2 - d1 * k12 - d2 * k22;
        let new_bias = if new1 > 0.0 && new1 < c {
            b1
        } else if new2 > 0.0 && new2 < c {
            b2
        } else {
            0.5 * (b1 + b2)
        };
        let db = new_bias - self.bias;

        let row1 = self.kernel.row(i1);
        let row2 = self.kernel.row(i2);
        for (k, e) in self.error.iter_mut().enumerate() {
            *e += d1 * row1[k] + d2 * row2[k] + db;
        }
        self.alpha[i1] = new1;
        self.alpha[i2] = new2;
        self.bias = new_bias;
        true
    }

    /// Recompute the bias from the final multipliers: the mean over free
    /// examples, or the middle of the feasible interval when none is free.
    fn refit_bias(&mut self) {
        let n = self.y.len();
        let f_no_bias: Vec<f64> = (0..n).map(|i| self.error[i] + self.y[i] - self.bias).collect();
        let free: Vec<usize> = (0..n).filter(|&i| self.is_free(i)).collect();
        let bias = if !free.is_empty() {
            free.iter().map(|&i| self.y[i] - f_no_bias[i]).sum::<f64>() / free.len() as f64
        } else {
            let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
            for i in 0..n {
                let b = self.y[i] - f_no_bias[i];
                // y_i f_i >= 1 at α = 0, <= 1 at α = C
                let lower_bound = (self.alpha[i] == 0.0) == (self.y[i] > 0.0);
                if lower_bound {
                    lo = lo.max(b);
                } else {
                    hi = hi.min(b);
                }
            }
            match (lo.is_finite(), hi.is_finite()) {
                (true, true) => 0.5 * (lo + hi),
                (true, false) => lo,
                (false, true) => hi,
                (false, false) => self.bias,
            }
        };
        let db = bias - self.bias;
        for e in &mut self.error {
            *e += db;
        }
        self.bias = bias;
    }
}

/// Largest KKT violation `max(0, ...)` of a solution, in units of `y_i E_i`.
pub fn max_kkt_violation(kernel: &DenseMatrix, y: &[f64], c: f64, sol: &BinarySolution) -> f64 {
    let n = y.len();
    (0..n)
        .map(|i| {
            let f: f64 = (0..n)
                .map(|j| sol.alpha[j] * y[j] * kernel.get(i, j))
                .sum::<f64>()
                + sol.bias;
            let r = y[i] * f - 1.0;
            let a = sol.alpha[i];
            if a <= 0.0 {
                (-r).max(0.0)
            } else if a >= c {
                r.max(0.0)
            } else {
                r.abs()
            }
        })
        .fold(0.0, f64::max)
}
