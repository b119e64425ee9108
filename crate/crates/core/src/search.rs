//! One-dimensional search primitives shared by the norm and projection code.

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search for the minimizer of a unimodal `f` on `[a, b]`.
///
/// Stops once the bracket is narrower than `tol` or stops shrinking in
/// floating point.
pub fn golden_min<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..200 {
        if (b - a).abs() <= tol {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
        if !(c < d) {
            break;
        }
    }
    0.5 * (a + b)
}

pub fn golden_max<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    golden_min(|x| -f(x), a, b, tol)
}

/// Bisection for a sign change of a nondecreasing `g` on `[a, b]`.
///
/// Returns the point where `g` crosses zero, to floating-point resolution
/// or `tol`, whichever is reached first.
pub fn bisect_increasing<G: Fn(f64) -> f64>(g: G, mut a: f64, mut b: f64, tol: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b || (b - a) <= tol {
            break;
        }
        if g(mid) < 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_finds_parabola_vertex() {
        let x = golden_min(|x| (x - 0.3).powi(2), -2.0, 5.0, 1e-12);
        assert!((x - 0.3).abs() < 1e-7);
    }

    #[test]
    fn golden_max_on_cosine() {
        let x = golden_max(|x: f64| (x - 1.0).cos(), 0.0, 3.0, 1e-12);
        assert!((x - 1.0).abs() < 1e-7);
    }

    #[test]
    fn bisect_reaches_machine_precision() {
        let x = bisect_increasing(|x| x * x * x - 2.0, 0.0, 2.0, 0.0);
        assert!((x - 2f64.cbrt()).abs() < 1e-15);
    }
}
