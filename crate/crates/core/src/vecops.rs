//! Small dense-vector helpers on slices.

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn scale(a: &[f64], c: f64) -> Vec<f64> {
    a.iter().map(|x| x * c).collect()
}

/// `a + c * b`
pub fn axpy(a: &[f64], c: f64, b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + c * y).collect()
}

pub fn normalized(a: &[f64]) -> Vec<f64> {
    let n = norm2(a);
    scale(a, 1.0 / n)
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// z-component of the planar cross product.
#[inline]
pub fn cross2(a: &[f64], b: &[f64]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

#[inline]
pub fn unit(angle: f64) -> [f64; 2] {
    [angle.cos(), angle.sin()]
}

/// Counterclockwise rotation by a quarter turn.
#[inline]
pub fn rot90(a: &[f64]) -> [f64; 2] {
    [-a[1], a[0]]
}

/// Polar angle in `[0, 2pi)`.
pub fn polar_angle(a: &[f64]) -> f64 {
    let t = a[1].atan2(a[0]);
    if t < 0.0 {
        t + std::f64::consts::TAU
    } else {
        t
    }
}

/// Signed angle from `a` to `b` in `(-pi, pi]`, accurate for tiny angles.
pub fn turn_angle(a: &[f64], b: &[f64]) -> f64 {
    cross2(a, b).atan2(dot(a, b))
}
