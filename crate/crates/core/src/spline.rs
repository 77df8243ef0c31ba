//! Cubic splines on uniform grids.

use crate::error::{Error, Result};

/// Boundary condition at the left end of the grid. The right end is always
/// natural (zero second derivative).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LeftBoundary {
    /// Prescribed first derivative. Zero slope suits even functions sampled on
    /// `tau >= 0`.
    Clamped(f64),
    /// Zero second derivative. Suits odd functions sampled on `tau >= 0`.
    Natural,
}

/// Interpolating cubic spline over `x0, x0 + h, ..., x0 + (n-1) h`.
#[derive(Debug, Clone)]
pub struct UniformSpline {
    x0: f64,
    step: f64,
    values: Vec<f64>,
    second: Vec<f64>,
}

impl UniformSpline {
    pub fn new(x0: f64, step: f64, values: Vec<f64>, left: LeftBoundary) -> Result<Self> {
        let n = values.len();
        if n < 4 {
            return Err(Error::InvalidInput(format!(
                "spline needs at least 4 nodes, got {n}"
            )));
        }
        if !(step > 0.0) {
            return Err(Error::InvalidInput(format!("spline step must be positive, got {step}")));
        }
        let h2 = step * step;
        // Tridiagonal system for the second derivatives, solved by Thomas.
        let mut diag = vec![4.0; n];
        let mut upper = vec![1.0; n];
        let mut lower = vec![1.0; n];
        let mut rhs = vec![0.0; n];
        for i in 1..n - 1 {
            rhs[i] = 6.0 * (values[i - 1] - 2.0 * values[i] + values[i + 1]) / h2;
        }
        match left {
            LeftBoundary::Clamped(slope) => {
                diag[0] = 2.0;
                upper[0] = 1.0;
                rhs[0] = 6.0 * ((values[1] - values[0]) / step - slope) / step;
            }
            LeftBoundary::Natural => {
                diag[0] = 1.0;
                upper[0] = 0.0;
                rhs[0] = 0.0;
            }
        }
        diag[n - 1] = 1.0;
        lower[n - 1] = 0.0;
        rhs[n - 1] = 0.0;

        for i in 1..n {
            let w = lower[i] / diag[i - 1];
            diag[i] -= w * upper[i - 1];
            rhs[i] -= w * rhs[i - 1];
        }
        let mut second = vec![0.0; n];
        second[n - 1] = rhs[n - 1] / diag[n - 1];
        for i in (0..n - 1).rev() {
            second[i] = (rhs[i] - upper[i] * second[i + 1]) / diag[i];
        }
        Ok(Self {
            x0,
            step,
            values,
            second,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn x_max(&self) -> f64 {
        self.x0 + self.step * (self.values.len() - 1) as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        self.x0 + self.step * i as f64
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Evaluate inside cell `i` at local coordinate `u in [0, 1]`.
    #[inline]
    pub fn eval_in_cell(&self, i: usize, u: f64) -> f64 {
        let v = 1.0 - u;
        let h2 = self.step * self.step / 6.0;
        v * self.values[i]
            + u * self.values[i + 1]
            + h2 * ((v * v * v - v) * self.second[i] + (u * u * u - u) * self.second[i + 1])
    }

    /// Evaluate at `x`; the caller guarantees `x0 <= x <= x_max`.
    pub fn eval(&self, x: f64) -> f64 {
        let s = (x - self.x0) / self.step;
        let last = self.values.len() - 2;
        let i = (s.floor().max(0.0) as usize).min(last);
        let u = s - i as f64;
        if u == 0.0 {
            return self.values[i];
        }
        self.eval_in_cell(i, u)
    }

    /// Integral of `spline(x) * weight(x)` over `[x0, upper]`, evaluated with
    /// a 4-point Gauss–Legendre rule per cell. Exact whenever `weight` is a
    /// polynomial of degree at most 4.
    pub fn integrate_weighted<W: FnMut(f64) -> f64>(&self, upper: f64, mut weight: W) -> f64 {
        const GL4_X: [f64; 4] = [
            -0.861_136_311_594_052_6,
            -0.339_981_043_584_856_3,
            0.339_981_043_584_856_3,
            0.861_136_311_594_052_6,
        ];
        const GL4_W: [f64; 4] = [
            0.347_854_845_137_453_86,
            0.652_145_154_862_546_1,
            0.652_145_154_862_546_1,
            0.347_854_845_137_453_86,
        ];
        if upper <= self.x0 {
            return 0.0;
        }
        let s = ((upper - self.x0) / self.step).min((self.values.len() - 1) as f64);
        let full = s.floor() as usize;
        let mut total = 0.0;
        let mut cell = |i: usize, u_end: f64, total: &mut f64| {
            let half = 0.5 * u_end;
            let mut acc = 0.0;
            for (xg, wg) in GL4_X.iter().zip(GL4_W.iter()) {
                let u = half * (1.0 + xg);
                let x = self.x0 + self.step * (i as f64 + u);
                acc += wg * self.eval_in_cell(i, u) * weight(x);
            }
            *total += acc * half * self.step;
        };
        for i in 0..full.min(self.values.len() - 1) {
            cell(i, 1.0, &mut total);
        }
        let frac = s - full as f64;
        if frac > 0.0 && full < self.values.len() - 1 {
            cell(full, frac, &mut total);
        }
        total
    }

    /// Spline through every other node of `self`, with the same boundary
    /// rule. Used for refinement error estimates.
    pub fn coarsened(&self, left: LeftBoundary) -> Result<Self> {
        let values: Vec<f64> = self.values.iter().step_by(2).copied().collect();
        Self::new(self.x0, 2.0 * self.step, values, left)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interpolates_odd_function_with_natural_left_end() {
        let h = 0.01;
        let ys: Vec<f64> = (0..=200).map(|i| (i as f64 * h).sin()).collect();
        let s = UniformSpline::new(0.0, h, ys, LeftBoundary::Natural).unwrap();
        for x in [0.0, 0.003, 0.5, 1.234, 1.9] {
            assert!((s.eval(x) - x.sin()).abs() < 1e-8, "x={x}");
        }
    }

    #[test]
    fn exact_at_nodes() {
        let ys: Vec<f64> = (0..50).map(|i| ((i * 7) % 11) as f64).collect();
        let s = UniformSpline::new(1.0, 0.5, ys.clone(), LeftBoundary::Clamped(0.0)).unwrap();
        for (i, y) in ys.iter().enumerate() {
            assert_eq!(s.eval(1.0 + 0.5 * i as f64), *y);
        }
    }

    #[test]
    fn weighted_integral_matches_analytic() {
        let h = 0.005;
        let ys: Vec<f64> = (0..=1000).map(|i| (-(i as f64 * h)).exp()).collect();
        let s = UniformSpline::new(0.0, h, ys, LeftBoundary::Clamped(-1.0)).unwrap();
        // int_0^2.3 x e^{-x} dx = 1 - (1 + 2.3) e^{-2.3}
        let got = s.integrate_weighted(2.3, |x| x);
        let want = 1.0 - 3.3 * (-2.3f64).exp();
        assert!((got - want).abs() < 1e-9, "{got} vs {want}");
    }

    #[test]
    fn rejects_short_grids() {
        assert!(UniformSpline::new(0.0, 1.0, vec![1.0, 2.0], LeftBoundary::Natural).is_err());
    }
}
