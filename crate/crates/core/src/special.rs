//! Log-space helpers: log-factorials, log-binomials and powers of `1-p`.
//!
//! `ln C(n, k)` uses Loader's saddle-point form, which stays accurate to
//! a few ulps even when `n` is around `1e12` and `k` is small, where the
//! naive difference of log-gamma values loses most of its digits.

use std::f64::consts::PI;

const TABLE_LEN: usize = 32;

fn ln_factorial_table() -> &'static [f64; TABLE_LEN] {
    use std::sync::OnceLock;
    static TABLE: OnceLock<[f64; TABLE_LEN]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = [0.0; TABLE_LEN];
        for k in 2..TABLE_LEN {
            t[k] = t[k - 1] + (k as f64).ln();
        }
        t
    })
}

/// `ln(k!) - [(k + 1/2) ln k - k + ln(2 pi)/2]`, the Stirling remainder.
fn stirlerr(k: u64) -> f64 {
    if (k as usize) < TABLE_LEN {
        if k == 0 {
            return 1.0 - 0.5 * (2.0 * PI).ln();
        }
        let x = k as f64;
        return ln_factorial_table()[k as usize] - (x + 0.5) * x.ln() + x - 0.5 * (2.0 * PI).ln();
    }
    const S0: f64 = 1.0 / 12.0;
    const S1: f64 = 1.0 / 360.0;
    const S2: f64 = 1.0 / 1260.0;
    const S3: f64 = 1.0 / 1680.0;
    const S4: f64 = 1.0 / 1188.0;
    let x = k as f64;
    let xx = x * x;
    (S0 - (S1 - (S2 - (S3 - S4 / xx) / xx) / xx) / xx) / x
}

pub fn ln_factorial(k: u64) -> f64 {
    if (k as usize) < TABLE_LEN {
        return ln_factorial_table()[k as usize];
    }
    let x = k as f64;
    stirlerr(k) + (x + 0.5) * x.ln() - x + 0.5 * (2.0 * PI).ln()
}

/// `ln C(n, k)`; `-inf` when `k > n`.
pub fn ln_binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    let k = k.min(n - k);
    if k == 0 {
        return 0.0;
    }
    if (n as usize) < TABLE_LEN {
        let t = ln_factorial_table();
        return t[n as usize] - t[k as usize] - t[(n - k) as usize];
    }
    if k == 1 {
        return (n as f64).ln();
    }
    let (nf, kf, mf) = (n as f64, k as f64, (n - k) as f64);
    let frac = kf / nf;
    stirlerr(n) - stirlerr(k) - stirlerr(n - k) + 0.5 * (nf / (2.0 * PI * kf * mf)).ln()
        - kf * frac.ln()
        - mf * (-frac).ln_1p()
}

/// `(1-p)^k` from `ln(1-p)`, with `0^0 = 1`.
#[inline]
pub fn pow_q(ln_q: f64, k: f64) -> f64 {
    if k == 0.0 {
        1.0
    } else {
        (k * ln_q).exp()
    }
}

/// `1 - (1-p)^k`, accurate when `(1-p)^k` is close to one.
#[inline]
pub fn one_minus_pow_q(ln_q: f64, k: f64) -> f64 {
    if k == 0.0 {
        0.0
    } else {
        -(k * ln_q).exp_m1()
    }
}

/// `k * ln(x)` with the convention `0 * ln(0) = 0`.
#[inline]
pub fn xlny(k: f64, x: f64) -> f64 {
    if k == 0.0 {
        0.0
    } else {
        k * x.ln()
    }
}

/// Natural log of `1 - p`, exact at the endpoints.
#[inline]
pub fn ln_q(p: f64) -> f64 {
    (-p).ln_1p()
}
