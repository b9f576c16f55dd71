//! Helpers for complex 2-vectors.

use num_complex::Complex64;

pub type CVec2 = [Complex64; 2];

pub const ZERO2: CVec2 = [Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)];

/// Hermitian inner product `aᴴ b`.
pub fn inner(a: &CVec2, b: &CVec2) -> Complex64 {
    a[0].conj() * b[0] + a[1].conj() * b[1]
}

pub fn norm_sqr(a: &CVec2) -> f64 {
    a[0].norm_sqr() + a[1].norm_sqr()
}

pub fn norm(a: &CVec2) -> f64 {
    norm_sqr(a).sqrt()
}

pub fn scale(a: &CVec2, s: Complex64) -> CVec2 {
    [a[0] * s, a[1] * s]
}

pub fn scale_re(a: &CVec2, s: f64) -> CVec2 {
    [a[0] * s, a[1] * s]
}

pub fn add(a: &CVec2, b: &CVec2) -> CVec2 {
    [a[0] + b[0], a[1] + b[1]]
}

/// `a / ‖a‖`, or `None` for the zero vector.
pub fn unit(a: &CVec2) -> Option<CVec2> {
    let n = norm(a);
    (n > 0.0 && n.is_finite()).then(|| scale_re(a, 1.0 / n))
}

/// Unit vector spanning the orthogonal complement of `a` in C², with its
/// first non-zero component real and positive.
pub fn orthogonal_unit(a: &CVec2) -> Option<CVec2> {
    let v = unit(&[a[1].conj(), -a[0].conj()])?;
    let lead = if v[0].norm() > 1e-12 { v[0] } else { v[1] };
    Some(scale(&v, Complex64::from_polar(1.0, -lead.arg())))
}
