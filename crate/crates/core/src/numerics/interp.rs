//! Shape-preserving (Fritsch–Carlson) monotone cubic interpolation.

use crate::error::{Error, Result};

/// Monotone piecewise-cubic Hermite interpolant. Exact at the nodes; the
/// interpolant never overshoots monotone data, which keeps derived group
/// indices free of spurious oscillation.
#[derive(Debug, Clone)]
pub struct Pchip {
    x: Vec<f64>,
    y: Vec<f64>,
    /// Node derivatives dy/dx.
    d: Vec<f64>,
}

impl Pchip {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::Domain(format!(
                "pchip: {} abscissae but {} ordinates",
                x.len(),
                y.len()
            )));
        }
        if x.len() < 2 {
            return Err(Error::Domain("pchip: need at least two nodes".into()));
        }
        if x.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Domain("pchip: abscissae must increase strictly".into()));
        }
        if x.iter().chain(y.iter()).any(|v| !v.is_finite()) {
            return Err(Error::Domain("pchip: non-finite node".into()));
        }

        let n = x.len();
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let s: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();

        let mut d = vec![0.0; n];
        if n == 2 {
            d[0] = s[0];
            d[1] = s[0];
        } else {
            for i in 1..n - 1 {
                if s[i - 1] * s[i] <= 0.0 {
                    d[i] = 0.0;
                } else {
                    let w1 = 2.0 * h[i] + h[i - 1];
                    let w2 = h[i] + 2.0 * h[i - 1];
                    d[i] = (w1 + w2) / (w1 / s[i - 1] + w2 / s[i]);
                }
            }
            d[0] = edge_derivative(h[0], h[1], s[0], s[1]);
            d[n - 1] = edge_derivative(h[n - 2], h[n - 3], s[n - 2], s[n - 3]);
        }

        Ok(Self { x, y, d })
    }

    pub fn x_min(&self) -> f64 {
        self.x[0]
    }

    pub fn x_max(&self) -> f64 {
        *self.x.last().unwrap()
    }

    fn segment(&self, x: f64) -> usize {
        match self.x.binary_search_by(|v| v.total_cmp(&x)) {
            Ok(i) => i.min(self.x.len() - 2),
            Err(i) => i.clamp(1, self.x.len() - 1) - 1,
        }
    }

    /// Interpolated value and first derivative at `x`; linear continuation
    /// outside the node range (callers decide whether that is allowed).
    pub fn eval(&self, x: f64) -> (f64, f64) {
        let n = self.x.len();
        if x <= self.x[0] {
            return (self.y[0] + self.d[0] * (x - self.x[0]), self.d[0]);
        }
        if x >= self.x[n - 1] {
            return (self.y[n - 1] + self.d[n - 1] * (x - self.x[n - 1]), self.d[n - 1]);
        }
        let i = self.segment(x);
        let h = self.x[i + 1] - self.x[i];
        let t = (x - self.x[i]) / h;
        let (y0, y1, d0, d1) = (self.y[i], self.y[i + 1], self.d[i], self.d[i + 1]);

        let h00 = (1.0 + 2.0 * t) * (1.0 - t) * (1.0 - t);
        let h10 = t * (1.0 - t) * (1.0 - t);
        let h01 = t * t * (3.0 - 2.0 * t);
        let h11 = t * t * (t - 1.0);
        let value = h00 * y0 + h * h10 * d0 + h01 * y1 + h * h11 * d1;

        let g00 = 6.0 * t * (t - 1.0);
        let g10 = (1.0 - t) * (1.0 - 3.0 * t);
        let g01 = -g00;
        let g11 = t * (3.0 * t - 2.0);
        let deriv = (g00 * y0 + g01 * y1) / h + g10 * d0 + g11 * d1;

        (value, deriv)
    }

    pub fn value(&self, x: f64) -> f64 {
        self.eval(x).0
    }
}

/// Three-point endpoint derivative with the usual shape-preserving clamps.
fn edge_derivative(h0: f64, h1: f64, s0: f64, s1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * s0 - h0 * s1) / (h0 + h1);
    if d.signum() != s0.signum() {
        0.0
    } else if s0.signum() != s1.signum() && d.abs() > 3.0 * s0.abs() {
        3.0 * s0
    } else {
        d
    }
}
