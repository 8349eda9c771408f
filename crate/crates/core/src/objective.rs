//! One-dimensional convex minimization.
//!
//! Every shipped regularized objective is a sum of quadratic, linear and
//! absolute-value terms in the hypothesis, so it is minimized exactly by a
//! subgradient walk over the kinks. Anything else falls back to golden-section
//! search.

use crate::sum::CompensatedSum;

/// `a·h² + b·h + c + Σ_k w_k·|h − p_k|` with `a ≥ 0`, `w_k ≥ 0`.
#[derive(Debug, Clone, Default)]
pub struct PiecewiseQuadratic {
    quad: CompensatedSum,
    lin: CompensatedSum,
    constant: CompensatedSum,
    kinks: Vec<(f64, f64)>,
}

impl PiecewiseQuadratic {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_quadratic(&mut self, a: f64) {
        self.quad.add(a);
    }

    pub fn add_linear(&mut self, b: f64) {
        self.lin.add(b);
    }

    pub fn add_constant(&mut self, c: f64) {
        self.constant.add(c);
    }

    /// Adds `weight·|h − position|`. Zero weights are dropped.
    pub fn add_kink(&mut self, position: f64, weight: f64) {
        if weight != 0.0 {
            self.kinks.push((position, weight));
        }
    }

    /// Adds `weight·(h − center)²`.
    pub fn add_squared_distance(&mut self, center: f64, weight: f64) {
        self.add_quadratic(weight);
        self.add_linear(-2.0 * weight * center);
        self.add_constant(weight * center * center);
    }

    pub fn eval(&self, h: f64) -> f64 {
        let a = self.quad.value();
        let b = self.lin.value();
        let mut acc = CompensatedSum::new();
        acc.add(a * h * h);
        acc.add(b * h);
        acc.add(self.constant.value());
        for &(p, w) in &self.kinks {
            acc.add(w * (h - p).abs());
        }
        acc.value()
    }

    /// Smallest minimizer on `[lo, hi]`.
    pub fn minimize(&self, lo: f64, hi: f64) -> f64 {
        debug_assert!(lo <= hi);
        let a = self.quad.value();
        let b = self.lin.value();
        let mut kinks = self.kinks.clone();
        kinks.sort_by(|x, y| x.0.total_cmp(&y.0));
        let total: f64 = kinks.iter().map(|k| k.1).sum();

        // Weight of kinks at or left of lo.
        let mut idx = 0;
        let mut left = 0.0;
        while idx < kinks.len() && kinks[idx].0 <= lo {
            left += kinks[idx].1;
            idx += 1;
        }
        let right_derivative = |x: f64, left: f64| 2.0 * a * x + b + left - (total - left);
        if right_derivative(lo, left) >= 0.0 {
            return lo;
        }

        let mut cur = lo;
        loop {
            let next = if idx < kinks.len() && kinks[idx].0 < hi {
                kinks[idx].0
            } else {
                hi
            };
            let s = left - (total - left);
            if a > 0.0 {
                let root = -(b + s) / (2.0 * a);
                if root > cur && root < next {
                    return root;
                }
            }
            if next >= hi {
                return hi;
            }
            // Merge all kinks sitting at `next`.
            while idx < kinks.len() && kinks[idx].0 == next {
                left += kinks[idx].1;
                idx += 1;
            }
            if right_derivative(next, left) >= 0.0 {
                return next;
            }
            cur = next;
        }
    }
}

/// Golden-section search for a convex (unimodal) `f` on `[lo, hi]`, stopping
/// once the bracket is narrower than `tol`. Endpoints are also compared so
/// monotone objectives land exactly on the boundary.
pub fn golden_section<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let mid = 0.5 * (a + b);
    let mut best = (lo, f(lo));
    for x in [mid, hi] {
        let fx = f(x);
        if fx < best.1 {
            best = (x, fx);
        }
    }
    best.0
}
