//! Test oracles shared by the integration tests.

#![allow(dead_code)]

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

/// Fractional bits of the fixed-point representation.
const FRACTION_BITS: u32 = 384;

/// `x` as an exact fixed-point integer `x * 2^FRACTION_BITS`.
fn to_fixed(x: f64) -> BigInt {
    assert!(x.is_finite() && x >= 0.0);
    if x == 0.0 {
        return BigInt::zero();
    }
    let bits = x.to_bits();
    let exponent = ((bits >> 52) & 0x7ff) as i64;
    let mantissa = if exponent == 0 {
        (bits & ((1 << 52) - 1)) << 1
    } else {
        (bits & ((1 << 52) - 1)) | (1 << 52)
    };
    let shift = exponent - 1075 + FRACTION_BITS as i64;
    assert!(shift >= 0, "argument too small for the fixed-point oracle");
    BigInt::from(mantissa) << shift as usize
}

fn from_fixed(v: &BigInt) -> f64 {
    // Keep 120 fractional bits, which is plenty for a correctly rounded f64
    // of the magnitudes involved.
    let kept: BigInt = v >> (FRACTION_BITS - 120) as usize;
    kept.to_f64().expect("finite") / 2f64.powi(120)
}

/// `J_n(x)` for n in {0, 1} from the power series in exact fixed-point
/// integer arithmetic. Every operation truncates at 2^-384, so the result
/// is good to far more than double precision for `x` up to about 60.
pub fn bessel_series_oracle(x: f64, order: u32) -> f64 {
    assert!(order <= 1);
    let one = BigInt::from(1) << FRACTION_BITS as usize;
    let xf = to_fixed(x);
    // q = x^2 / 4
    let q: BigInt = (&xf * &xf) >> (FRACTION_BITS + 2) as usize;
    let mut term = one.clone();
    let mut sum = one;
    let mut k: u64 = 1;
    loop {
        term = (&term * &q) >> FRACTION_BITS as usize;
        term /= BigInt::from(k * (k + order as u64));
        term = -term;
        if term.is_zero() {
            break;
        }
        sum += &term;
        k += 1;
    }
    if order == 1 {
        sum = (&sum * &xf) >> (FRACTION_BITS + 1) as usize;
    }
    from_fixed(&sum)
}
