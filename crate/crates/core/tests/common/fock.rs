//! Exact rational Fock coupling.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn binomial(n: u64, k: u64) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// `L_n^a(x)` from its finite power series, exactly.
pub fn laguerre_series(n: u64, a: u64, x: &BigRational) -> BigRational {
    let mut sum = BigRational::zero();
    let mut xk = BigRational::one();
    let mut kfact = BigInt::one();
    for k in 0..=n {
        if k > 0 {
            xk = &xk * x;
            kfact *= BigInt::from(k);
        }
        let term = BigRational::from_integer(binomial(n + a, n - k)) * &xk / BigRational::from_integer(kfact.clone());
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    sum
}

/// Coupling for η = p/q, with the square-root and exponential factors applied
/// in floating point after exact accumulation.
pub fn exact_coupling(n: u64, m: u64, p: i64, q: i64) -> f64 {
    let (lo, hi) = (n.min(m), n.max(m));
    let d = hi - lo;
    let eta = rat(p) / rat(q);
    let x = &eta * &eta;
    let l = laguerre_series(lo, d, &x);
    // n<!/n>! * eta^(2d)
    let mut sq = BigRational::one();
    for k in (lo + 1)..=hi {
        sq /= rat(k as i64);
    }
    for _ in 0..d {
        sq = &sq * &x;
    }
    let eta_f = p as f64 / q as f64;
    (-eta_f * eta_f / 2.0).exp() * sq.to_f64().unwrap().sqrt() * l.to_f64().unwrap()
}
