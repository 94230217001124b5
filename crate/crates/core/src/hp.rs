//! Thin layer over `astro_float::BigFloat` for the alternating
//! inclusion–exclusion sums, plus exact conversions back to `f64`.

use astro_float::{BigFloat, RoundingMode, Sign};

const RM: RoundingMode = RoundingMode::ToEven;

/// Working precision in bits for one evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Prec(pub usize);

impl Prec {
    pub fn f64(self, x: f64) -> BigFloat {
        BigFloat::from_f64(x, self.0)
    }

    pub fn int(self, k: u64) -> BigFloat {
        BigFloat::from_u64(k, self.0)
    }

    pub fn one(self) -> BigFloat {
        self.int(1)
    }

    pub fn zero(self) -> BigFloat {
        self.int(0)
    }

    pub fn add(self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.add(b, self.0, RM)
    }

    pub fn sub(self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.sub(b, self.0, RM)
    }

    pub fn mul(self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.mul(b, self.0, RM)
    }

    pub fn div(self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.div(b, self.0, RM)
    }

    /// `a^k` with `0^0 = 1`.
    pub fn powi(self, a: &BigFloat, k: u64) -> BigFloat {
        if k == 0 {
            self.one()
        } else if a.is_zero() {
            self.zero()
        } else {
            a.powi(k as usize, self.0, RM)
        }
    }

    /// Table `[a^0, a^1, ..., a^len]`.
    pub fn power_table(self, a: &BigFloat, len: usize) -> Vec<BigFloat> {
        let mut t = Vec::with_capacity(len + 1);
        t.push(self.one());
        for k in 1..=len {
            let next = self.mul(&t[k - 1], a);
            t.push(next);
        }
        t
    }

    /// `C(n, k)` by the multiplicative formula.
    pub fn binomial(self, n: u64, k: u64) -> BigFloat {
        if k > n {
            return self.zero();
        }
        let k = k.min(n - k);
        let mut acc = self.one();
        for i in 0..k {
            acc = self.mul(&acc, &self.int(n - i));
            acc = self.div(&acc, &self.int(i + 1));
        }
        acc
    }
}

/// Split a finite nonzero value into `(top, exp)` with value = `top * 2^exp`
/// and `top` the leading 64 mantissa bits.
fn parts(x: &BigFloat) -> Option<(u64, i64, bool)> {
    let (words, _, sign, exp, _) = x.as_raw_parts()?;
    let top = *words.last()?;
    if top == 0 {
        return None;
    }
    Some((top, exp as i64 - 64, sign == Sign::Neg))
}

fn ldexp(mut x: f64, mut e: i64) -> f64 {
    while e > 1000 {
        x *= 2f64.powi(1000);
        e -= 1000;
        if x.is_infinite() {
            return x;
        }
    }
    while e < -1000 {
        x *= 2f64.powi(-1000);
        e += 1000;
        if x == 0.0 {
            return x;
        }
    }
    x * 2f64.powi(e as i32)
}

/// Nearest `f64` (up to one ulp) of a `BigFloat`; saturates to `±inf`/0.
pub(crate) fn to_f64(x: &BigFloat) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x.is_inf_pos() {
        return f64::INFINITY;
    }
    if x.is_inf_neg() {
        return f64::NEG_INFINITY;
    }
    match parts(x) {
        None => 0.0,
        Some((top, e, neg)) => {
            let v = ldexp(top as f64, e);
            if neg {
                -v
            } else {
                v
            }
        }
    }
}

/// Natural logarithm of a positive `BigFloat` as `f64`; `-inf` at zero.
pub(crate) fn ln(x: &BigFloat) -> f64 {
    match parts(x) {
        None => f64::NEG_INFINITY,
        Some((top, e, neg)) => {
            if neg {
                f64::NAN
            } else {
                // top / 2^64 lies in [1/2, 1)
                (top as f64 / 2f64.powi(64)).ln() + (e + 64) as f64 * std::f64::consts::LN_2
            }
        }
    }
}
