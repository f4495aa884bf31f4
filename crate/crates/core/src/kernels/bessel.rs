//! Bessel functions of the first kind, orders zero and one.
//!
//! Below [`SERIES_LIMIT`] the ascending power series is summed in
//! double-double arithmetic, which absorbs the cancellation between its
//! alternating terms (the largest term near r = 25 is about 1e9 times the
//! result). Beyond it the Hankel asymptotic expansion is used; its optimal
//! truncation error there is of order exp(-2r) < 1e-21.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::{invalid, Result};

/// Crossover from the power series to the asymptotic expansion.
pub const SERIES_LIMIT: f64 = 25.0;

/// `J0(r)`. Even in `r`; rejects NaN and infinities.
pub fn bessel_j0(r: f64) -> Result<f64> {
    check(r)?;
    Ok(j0(r))
}

/// `J1(r)`. Odd in `r`; rejects NaN and infinities.
pub fn bessel_j1(r: f64) -> Result<f64> {
    check(r)?;
    Ok(j1(r))
}

fn check(r: f64) -> Result<()> {
    if r.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("Bessel argument must be finite, got {r}")))
    }
}

pub(crate) fn j0(r: f64) -> f64 {
    let x = r.abs();
    if x <= SERIES_LIMIT {
        series(x, 0)
    } else {
        asymptotic(x, 0)
    }
}

pub(crate) fn j1(r: f64) -> f64 {
    let x = r.abs();
    let v = if x <= SERIES_LIMIT {
        series(x, 1)
    } else {
        asymptotic(x, 1)
    };
    if r < 0.0 {
        -v
    } else {
        v
    }
}

/// `J_n(x) = (x/2)^n sum_k (-x^2/4)^k / (k! (k+n)!)` for n in {0, 1}.
fn series(x: f64, order: u32) -> f64 {
    if x == 0.0 {
        return if order == 0 { 1.0 } else { 0.0 };
    }
    let q = DoubleDouble::square(x).scale(0.25);
    let mut term = DoubleDouble::from(1.0);
    let mut sum = term;
    let mut largest = 1.0f64;
    for k in 1..400u32 {
        let denom = (k * (k + order)) as f64;
        term = term.mul(q).div_f64(-denom);
        sum = sum.add(term);
        let size = term.hi.abs();
        largest = largest.max(size);
        if size < 1e-34 * largest {
            break;
        }
    }
    let value = sum.to_f64();
    if order == 1 {
        value * 0.5 * x
    } else {
        value
    }
}

/// Hankel expansion `sqrt(2/(pi x)) (P cos chi - Q sin chi)`,
/// `chi = x - (2n + 1) pi / 4`.
fn asymptotic(x: f64, order: u32) -> f64 {
    let mu = 4.0 * (order * order) as f64;
    let mut term = 1.0f64;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut prev = f64::INFINITY;
    for k in 1..60u32 {
        let odd = (2 * k - 1) as f64;
        term *= (mu - odd * odd) / (8.0 * k as f64 * x);
        let size = term.abs();
        if size > prev {
            break;
        }
        prev = size;
        // terms enter P and Q alternately with signs + - - + + - - ...
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            p += sign * term;
        } else {
            q += sign * term;
        }
        if size < 1e-18 {
            break;
        }
    }
    let (s, c) = x.sin_cos();
    // cos/sin of x - pi/4 and x - 3pi/4 without subtracting pi/4 from x.
    let (cos_chi, sin_chi) = if order == 0 {
        ((c + s) * FRAC_1_SQRT_2, (s - c) * FRAC_1_SQRT_2)
    } else {
        ((s - c) * FRAC_1_SQRT_2, -(s + c) * FRAC_1_SQRT_2)
    };
    (2.0 / (PI * x)).sqrt() * (p * cos_chi - q * sin_chi)
}

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi) / 2`.
#[derive(Debug, Clone, Copy)]
struct DoubleDouble {
    hi: f64,
    lo: f64,
}

impl From<f64> for DoubleDouble {
    fn from(v: f64) -> Self {
        DoubleDouble { hi: v, lo: 0.0 }
    }
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl DoubleDouble {
    fn square(x: f64) -> Self {
        let (hi, lo) = two_prod(x, x);
        DoubleDouble { hi, lo }
    }

    /// Exact for powers of two.
    fn scale(self, s: f64) -> Self {
        DoubleDouble {
            hi: self.hi * s,
            lo: self.lo * s,
        }
    }

    fn add(self, o: Self) -> Self {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        DoubleDouble { hi, lo }
    }

    fn mul(self, o: Self) -> Self {
        let (p, e) = two_prod(self.hi, o.hi);
        let e = e + (self.hi * o.lo + self.lo * o.hi);
        let (hi, lo) = quick_two_sum(p, e);
        DoubleDouble { hi, lo }
    }

    fn div_f64(self, d: f64) -> Self {
        let q1 = self.hi / d;
        let (p, e) = two_prod(q1, d);
        let (s, f) = two_sum(self.hi, -p);
        let q2 = (s + (f - e + self.lo)) / d;
        let (hi, lo) = quick_two_sum(q1, q2);
        DoubleDouble { hi, lo }
    }

    fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn values_at_zero() {
        assert_eq!(bessel_j0(0.0).unwrap(), 1.0);
        assert_eq!(bessel_j1(0.0).unwrap(), 0.0);
    }

    #[test]
    fn values_at_one() {
        assert_abs_diff_eq!(
            bessel_j0(1.0).unwrap(),
            0.765_197_686_557_966_6,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            bessel_j1(1.0).unwrap(),
            0.440_050_585_744_933_5,
            epsilon = 1e-15
        );
    }

    #[test]
    fn first_zeros() {
        assert_abs_diff_eq!(bessel_j0(2.404825557695773).unwrap(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(bessel_j1(3.8317059702075).unwrap(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn symmetry_for_negative_arguments() {
        for r in [0.3, 4.0, 31.0] {
            assert_eq!(j0(-r), j0(r));
            assert_eq!(j1(-r), -j1(r));
        }
    }

    #[test]
    fn non_finite_rejected() {
        assert!(bessel_j0(f64::NAN).is_err());
        assert!(bessel_j1(f64::INFINITY).is_err());
        assert!(bessel_j0(f64::NEG_INFINITY).is_err());
    }

    #[test]
    fn branches_agree_at_the_crossover() {
        for x in [SERIES_LIMIT - 0.5, SERIES_LIMIT, SERIES_LIMIT + 0.5] {
            assert_abs_diff_eq!(series(x, 0), asymptotic(x, 0), epsilon = 1e-15);
            assert_abs_diff_eq!(series(x, 1), asymptotic(x, 1), epsilon = 1e-15);
        }
    }

    #[test]
    fn bounded_by_one() {
        for i in 0..2000 {
            let r = i as f64 * 0.05;
            assert!(j0(r).abs() <= 1.0);
            assert!(j1(r).abs() <= 1.0);
        }
    }
}
