//! Small dense-vector helpers over `&[f64]`.

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `f · (a - b)` without materializing the difference.
#[inline]
pub fn dot_diff(f: &[f64], a: &[f64], b: &[f64]) -> f64 {
    f.iter()
        .zip(a.iter().zip(b))
        .map(|(fi, (ai, bi))| fi * (ai - bi))
        .sum()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn scale(a: &[f64], t: f64) -> Vec<f64> {
    a.iter().map(|x| x * t).collect()
}

/// `a + t (b - a)`.
pub fn lerp(a: &[f64], b: &[f64], t: f64) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect()
}

pub fn midpoint(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| 0.5 * (x + y)).collect()
}

pub fn max_abs(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Bit pattern with `-0.0` folded onto `+0.0`, for exact equality keys.
pub fn canonical_bits(a: &[f64]) -> Vec<u64> {
    a.iter().map(|&x| (x + 0.0).to_bits()).collect()
}

pub fn negated(a: &[f64]) -> Vec<f64> {
    a.iter().map(|x| -x).collect()
}
