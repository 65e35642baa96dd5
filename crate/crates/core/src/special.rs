//! Special functions used by the motional coupling model.

/// `ln(lo! / hi!)` for `lo <= hi`, summed directly so it never overflows.
pub fn ln_factorial_ratio(lo: u64, hi: u64) -> f64 {
    debug_assert!(lo <= hi);
    -((lo + 1)..=hi).map(|k| (k as f64).ln()).sum::<f64>()
}

/// Generalized Laguerre polynomial `L_n^alpha(x)` by upward three-term
/// recurrence in `n` at fixed `alpha`.
pub fn laguerre(n: u64, alpha: f64, x: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    // Double-double accumulation keeps the relative error small next to the
    // polynomial's zeros, where the plain recurrence loses several digits.
    let mut prev = Dd::from(1.0);
    let mut cur = Dd::sum(1.0 + alpha, -x);
    for k in 1..n {
        let k = k as f64;
        let c1 = Dd::sum(2.0 * k + 1.0 + alpha, -x);
        let next = c1.mul(cur).sub(prev.scale(k + alpha)).div(k + 1.0);
        prev = cur;
        cur = next;
    }
    cur.hi + cur.lo
}

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi) / 2`.
#[derive(Clone, Copy, Debug)]
struct Dd {
    hi: f64,
    lo: f64,
}

impl Dd {
    fn from(v: f64) -> Self {
        Self { hi: v, lo: 0.0 }
    }

    /// Exact `a + b`.
    fn sum(a: f64, b: f64) -> Self {
        let s = a + b;
        let bb = s - a;
        Self { hi: s, lo: (a - (s - bb)) + (b - bb) }
    }

    fn renorm(hi: f64, lo: f64) -> Self {
        let s = hi + lo;
        Self { hi: s, lo: lo - (s - hi) }
    }

    fn add(self, o: Self) -> Self {
        let s = Self::sum(self.hi, o.hi);
        Self::renorm(s.hi, s.lo + self.lo + o.lo)
    }

    fn sub(self, o: Self) -> Self {
        self.add(Self { hi: -o.hi, lo: -o.lo })
    }

    fn mul(self, o: Self) -> Self {
        let p = self.hi * o.hi;
        let e = self.hi.mul_add(o.hi, -p) + (self.hi * o.lo + self.lo * o.hi);
        Self::renorm(p, e)
    }

    fn scale(self, c: f64) -> Self {
        let p = self.hi * c;
        Self::renorm(p, self.hi.mul_add(c, -p) + self.lo * c)
    }

    fn div(self, d: f64) -> Self {
        let q1 = self.hi / d;
        let r = self.sub(Self::from(q1).scale(d));
        Self::renorm(q1, r.hi / d)
    }
}

/// Bessel function of the first kind `J_order(x)` from its power series.
///
/// Accurate to roughly 1e-13 absolute for `|x| <= 10`, which covers every
/// argument the sideband approximation produces in the Lamb–Dicke regime.
pub fn bessel_j(order: i32, x: f64) -> f64 {
    let n = order.unsigned_abs();
    let half = 0.5 * x;
    // (x/2)^n / n!
    let mut term = (1..=n).fold(1.0, |acc, k| acc * half / k as f64);
    let mut sum = term;
    let q = -half * half;
    for k in 1..200u32 {
        term *= q / (k as f64 * (k + n) as f64);
        sum += term;
        if term.abs() < 1e-17 * sum.abs().max(1e-300) {
            break;
        }
    }
    if order < 0 && n % 2 == 1 {
        -sum
    } else {
        sum
    }
}
