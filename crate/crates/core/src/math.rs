// Float helpers for no_std builds.

#[inline]
pub fn powf(x: f64, p: f64) -> f64 {
    // The benchmark networks all use integer BPR powers.
    if p == 4.0 {
        let x2 = x * x;
        return x2 * x2;
    }
    if p == 1.0 {
        return x;
    }
    if p == 0.0 {
        return 1.0;
    }
    if p > 0.0 && p <= 16.0 && p == libm::trunc(p) {
        let mut acc = 1.0;
        for _ in 0..p as u32 {
            acc *= x;
        }
        return acc;
    }
    libm::pow(x, p)
}

#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub fn ceil(x: f64) -> f64 {
    libm::ceil(x)
}

#[inline]
pub fn norm2(x: &[f64]) -> f64 {
    sqrt(x.iter().map(|v| v * v).sum())
}

pub fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
