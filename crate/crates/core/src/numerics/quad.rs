//! Adaptive Gauss–Kronrod quadrature (15-point panels, bisection refinement).

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;

use super::Tolerance;
use crate::error::{Error, Result};

// Abscissae of the 15-point Kronrod rule, positive half; odd indices are the
// embedded 7-point Gauss nodes.
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];

const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    /// Conservative estimate of the absolute error.
    pub error: f64,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Conservative error rescaling used by QUADPACK' s 15-point kernel.
fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / res_asc).powf(1.5);
        scaled = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        let min_err = 50.0 * f64::EPSILON * res_abs;
        if min_err > scaled {
            scaled = min_err;
        }
    }
    scaled
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center);

    let mut res_kronrod = f_center * WGK[7];
    let mut res_gauss = f_center * WG[3];
    let mut res_abs = res_kronrod.abs();

    let mut fv = [0.0_f64; 15];
    fv[7] = f_center;

    for j in 0..7 {
        let x = half * XGK[j];
        let f1 = f(center - x);
        let f2 = f(center + x);
        fv[j] = f1;
        fv[14 - j] = f2;
        let fsum = f1 + f2;
        res_kronrod += WGK[j] * fsum;
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_gauss += WG[j / 2] * fsum;
        }
    }

    let mean = 0.5 * res_kronrod;
    let mut res_asc = WGK[7] * (f_center - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv[j] - mean).abs() + (fv[14 - j] - mean).abs());
    }

    let err = rescale_error((res_kronrod - res_gauss) * half, res_abs * half.abs(), res_asc * half.abs());
    Panel { a, b, value: res_kronrod * half, error: err }
}

/// Integrate `f` over `[a, b]`, bisecting the worst panel until the summed
/// error estimate satisfies `tol`, or fail with the worst subinterval.
pub fn adaptive_quad<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: &Tolerance) -> Result<QuadResult> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Domain(format!("non-finite interval [{a}, {b}]")));
    }
    if a == b {
        return Ok(QuadResult { value: 0.0, error: 0.0 });
    }

    let mut heap = BinaryHeap::new();
    let first = gk15(&f, a, b);
    let mut total = first.value;
    let mut total_err = first.error;
    heap.push(first);

    for _ in 0..tol.max_iter {
        if total_err <= tol.abs.max(tol.rel * total.abs()) {
            return Ok(QuadResult { value: total, error: total_err });
        }
        let worst = heap.pop().expect("heap never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval at floating-point resolution; cannot split further.
            heap.push(worst);
            break;
        }
        let left = gk15(&f, worst.a, mid);
        let right = gk15(&f, mid, worst.b);
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }

    if total_err <= tol.abs.max(tol.rel * total.abs()) {
        return Ok(QuadResult { value: total, error: total_err });
    }
    let worst = heap.peek().expect("heap never empty");
    Err(Error::NonConvergence(format!(
        "quadrature error {:.3e} above tolerance after {} subdivisions; worst subinterval [{:.6e}, {:.6e}] contributes {:.3e}",
        total_err, tol.max_iter, worst.a, worst.b, worst.error
    )))
}

/// Complex-valued integrand; real and imaginary parts are integrated
/// independently to the same tolerance.
pub fn adaptive_quad_complex<F: Fn(f64) -> Complex64>(
    f: F,
    a: f64,
    b: f64,
    tol: &Tolerance,
) -> Result<Complex64> {
    let re = adaptive_quad(|x| f(x).re, a, b, tol)?;
    let im = adaptive_quad(|x| f(x).im, a, b, tol)?;
    Ok(Complex64::new(re.value, im.value))
}

/// Integrate across a sorted list of breakpoints (useful when the integrand
/// has known narrow peaks: seed one panel per segment).
pub fn adaptive_quad_segmented<F: Fn(f64) -> f64>(
    f: F,
    points: &[f64],
    tol: &Tolerance,
) -> Result<QuadResult> {
    if points.len() < 2 {
        return Err(Error::Domain("need at least two breakpoints".into()));
    }
    if points.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Domain("breakpoints must be sorted ascending".into()));
    }
    let mut value = 0.0;
    let mut error = 0.0;
    for w in points.windows(2) {
        let r = adaptive_quad(&f, w[0], w[1], tol)?;
        value += r.value;
        error += r.error;
    }
    Ok(QuadResult { value, error })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn polynomial_exact() {
        let tol = Tolerance::default();
        let r = adaptive_quad(|x| x * x, 0.0, 1.0, &tol).unwrap();
        assert_relative_eq!(r.value, 1.0 / 3.0, max_relative = 1e-14);
    }

    #[test]
    fn lorentzian_mass_over_fifty_widths() {
        // ∫ (Γ/π) v dk / ((vΔk)² + Γ²) over ±50 widths = 1 - 2/(50π) + O(w³).
        let gamma = 2.0e9;
        let v = 1.0e8;
        let w = 50.0;
        let half = w * gamma / v;
        let tol = Tolerance { abs: 1e-14, rel: 1e-12, max_iter: 5000 };
        let r = adaptive_quad(
            |dk| (gamma / std::f64::consts::PI) * v / ((v * dk).powi(2) + gamma * gamma),
            -half,
            half,
            &tol,
        )
        .unwrap();
        let exact = 2.0 / std::f64::consts::PI * w.atan() / 1.0;
        assert_relative_eq!(r.value, exact, max_relative = 1e-10);
        // And the analytic arctan value is 1 - O(1/(50π)).
        assert!((1.0 - r.value) < 1.0 / (25.0 * std::f64::consts::PI));
    }

    #[test]
    fn oscillatory_ring_phase_integrates_to_zero() {
        // ∫₀^L e^{inζ/R} dζ = 0 for integer n ≠ 0.
        let radius = 30e-6;
        let len = std::f64::consts::TAU * radius;
        let tol = Tolerance { abs: 1e-13 * len, rel: 1e-12, max_iter: 4000 };
        for n in [1i32, 2, 5, -3] {
            let v = adaptive_quad_complex(
                |z| Complex64::from_polar(1.0, n as f64 * z / radius),
                0.0,
                len,
                &tol,
            )
            .unwrap();
            assert!(v.norm() < 1e-9 * len, "n={n}: |∫|={}", v.norm());
        }
    }

    #[test]
    fn segmented_matches_plain() {
        let tol = Tolerance { abs: 1e-14, rel: 1e-12, max_iter: 4000 };
        let f = |x: f64| 1.0 / (1.0 + x * x);
        let a = adaptive_quad(f, -30.0, 30.0, &tol).unwrap().value;
        let b = adaptive_quad_segmented(f, &[-30.0, -1.0, 0.0, 2.0, 30.0], &tol).unwrap().value;
        assert_relative_eq!(a, b, max_relative = 1e-11);
    }

    #[test]
    fn impossible_tolerance_reports_worst_interval() {
        let tol = Tolerance { abs: 1e-300, rel: 1e-16, max_iter: 8 };
        let err = adaptive_quad(|x: f64| (1e6 * x).sin() / (x * x + 1e-6), -1.0, 1.0, &tol);
        assert!(matches!(err, Err(Error::NonConvergence(_))));
    }
}
