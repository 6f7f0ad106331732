use crate::error::domain;
use crate::Result;

/// Natural cubic spline through tabulated points.
#[derive(Debug, Clone, PartialEq)]
pub struct CubicSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    /// Second derivatives at the knots.
    m: Vec<f64>,
}

impl CubicSpline {
    /// Needs at least three points with strictly increasing abscissae.
    pub fn new(points: &[(f64, f64)]) -> Result<Self> {
        const OP: &str = "CubicSpline::new";
        if points.len() < 3 {
            return Err(domain(OP, format!("need at least 3 points, got {}", points.len())));
        }
        if points.iter().any(|p| !p.0.is_finite() || !p.1.is_finite()) {
            return Err(domain(OP, "non-finite table entry"));
        }
        if points.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(domain(OP, "abscissae must be strictly increasing"));
        }
        let x: Vec<f64> = points.iter().map(|p| p.0).collect();
        let y: Vec<f64> = points.iter().map(|p| p.1).collect();
        let n = x.len();
        // Tridiagonal system for interior second derivatives (Thomas algorithm).
        let mut m = vec![0.0; n];
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        for i in 1..n - 1 {
            let h0 = x[i] - x[i - 1];
            let h1 = x[i + 1] - x[i];
            let rhs = 6.0 * ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0);
            let diag = 2.0 * (h0 + h1) - h0 * c[i - 1];
            c[i] = h1 / diag;
            d[i] = (rhs - h0 * d[i - 1]) / diag;
        }
        for i in (1..n - 1).rev() {
            m[i] = d[i] - c[i] * m[i + 1];
        }
        Ok(CubicSpline { x, y, m })
    }

    pub fn range(&self) -> (f64, f64) {
        (self.x[0], *self.x.last().unwrap())
    }

    pub fn knots(&self) -> &[f64] {
        &self.x
    }

    fn segment(&self, at: f64) -> Result<usize> {
        let (lo, hi) = self.range();
        if !(at >= lo && at <= hi) {
            return Err(domain("CubicSpline", format!("{at} outside table range [{lo}, {hi}]")));
        }
        Ok(self.x.partition_point(|&k| k <= at).clamp(1, self.x.len() - 1) - 1)
    }

    pub fn eval(&self, at: f64) -> Result<f64> {
        let i = self.segment(at)?;
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - at) / h;
        let b = (at - self.x[i]) / h;
        Ok(a * self.y[i] + b * self.y[i + 1] + ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[i + 1]) * h * h / 6.0)
    }

    pub fn derivative(&self, at: f64) -> Result<f64> {
        let i = self.segment(at)?;
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - at) / h;
        let b = (at - self.x[i]) / h;
        Ok((self.y[i + 1] - self.y[i]) / h + ((1.0 - 3.0 * a * a) * self.m[i] + (3.0 * b * b - 1.0) * self.m[i + 1]) * h / 6.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_knots_and_smooth_functions() {
        let pts: Vec<(f64, f64)> = (0..=40).map(|k| {
            let x = k as f64 * 0.1;
            (x, x.sin())
        }).collect();
        let s = CubicSpline::new(&pts).unwrap();
        for &(x, y) in &pts {
            assert!((s.eval(x).unwrap() - y).abs() < 1e-15);
        }
        for &x in &[0.35, 1.234, 2.5, 3.45] {
            assert!((s.eval(x).unwrap() - x.sin()).abs() < 2e-5);
            assert!((s.derivative(x).unwrap() - x.cos()).abs() < 2e-3);
        }
        assert!(s.eval(4.1).is_err());
    }

    #[test]
    fn rejects_bad_tables() {
        assert!(CubicSpline::new(&[(0.0, 1.0), (1.0, 2.0)]).is_err());
        assert!(CubicSpline::new(&[(0.0, 1.0), (1.0, 2.0), (1.0, 3.0)]).is_err());
        assert!(CubicSpline::new(&[(0.0, 1.0), (1.0, f64::NAN), (2.0, 3.0)]).is_err());
    }

    #[test]
    fn linear_data_is_exact() {
        let s = CubicSpline::new(&[(0.0, 1.0), (0.5, 2.0), (2.0, 5.0), (3.0, 7.0)]).unwrap();
        assert!((s.eval(1.3).unwrap() - 3.6).abs() < 1e-14);
        assert!((s.derivative(2.7).unwrap() - 2.0).abs() < 1e-14);
    }
}
