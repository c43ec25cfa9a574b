//! Small numeric helpers shared across modules.

/// Reduces `x` into `[0, period)`.
#[inline]
pub fn wrap(x: f64, period: f64) -> f64 {
    let r = x.rem_euclid(period);
    // rem_euclid can return `period` itself for tiny negative inputs
    if r >= period {
        0.0
    } else {
        r
    }
}

/// Forward distance from `from` to `to` on a circle of length `period`, in `[0, period)`.
#[inline]
pub fn forward(from: f64, to: f64, period: f64) -> f64 {
    wrap(to - from, period)
}

/// `(cos(θ + jπ/2), sin(θ + jπ/2))` given `(cos θ, sin θ)`: the j-th derivative phase shift.
#[inline]
pub fn quarter_shift(c: f64, s: f64, j: usize) -> (f64, f64) {
    match j % 4 {
        0 => (c, s),
        1 => (-s, c),
        2 => (-c, -s),
        _ => (s, -c),
    }
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Best rational approximation `p/q` of `x` with `q <= max_den` whose error is
/// within `tol`, scanning continued-fraction convergents in order.
pub fn rationalize(x: f64, max_den: u64, tol: f64) -> Option<(i64, u64)> {
    if !x.is_finite() {
        return None;
    }
    let (mut h0, mut h1) = (0i128, 1i128);
    let (mut k0, mut k1) = (1i128, 0i128);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        if a.abs() > 1e15 {
            break;
        }
        let ai = a as i128;
        let h2 = ai * h1 + h0;
        let k2 = ai * k1 + k0;
        if k2 > max_den as i128 {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        if (x - h1 as f64 / k1 as f64).abs() <= tol {
            return Some((h1 as i64, k1 as u64));
        }
        let frac = r - a;
        if frac.abs() < 1e-300 {
            break;
        }
        r = 1.0 / frac;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wrap_stays_in_range() {
        assert_eq!(wrap(-1e-18, 1.0), 0.0);
        assert!((wrap(-0.25, 1.0) - 0.75).abs() < 1e-15);
        assert!((forward(0.9, 0.1, 1.0) - 0.2).abs() < 1e-15);
    }

    #[test]
    fn rationalize_finds_simple_fractions() {
        assert_eq!(rationalize(0.4, 1000, 1e-12), Some((2, 5)));
        assert_eq!(rationalize(3.0, 10, 1e-12), Some((3, 1)));
        let golden = (5f64.sqrt() - 1.0) / 2.0;
        assert_eq!(rationalize(golden, 1000, 1e-9), None);
    }
}
