use std::ops::{Add, Div, Mul, Neg, Sub};

/// Unevaluated sum `hi + lo` with `|lo| ≤ ulp(hi)/2`, about 32 digits.
#[derive(Clone, Copy, Debug, Default, PartialEq, PartialOrd)]
pub struct DoubleDouble {
    hi: f64,
    lo: f64,
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl DoubleDouble {
    pub const ZERO: Self = Self { hi: 0.0, lo: 0.0 };
    pub const ONE: Self = Self { hi: 1.0, lo: 0.0 };

    pub fn hi(self) -> f64 {
        self.hi
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn abs(self) -> Self {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    pub fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return Self::ZERO;
        }
        // one Newton step from the f64 root
        let x = self.hi.sqrt();
        let (p, e) = two_prod(x, x);
        let r = ((self.hi - p) - e + self.lo) / (2.0 * x);
        let (hi, lo) = quick_two_sum(x, r);
        Self { hi, lo }
    }
}

impl From<f64> for DoubleDouble {
    fn from(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }
}

impl Add for DoubleDouble {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Self { hi, lo }
    }
}

impl Neg for DoubleDouble {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Sub for DoubleDouble {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl Mul for DoubleDouble {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let (p, e) = two_prod(self.hi, o.hi);
        let e = e + (self.hi * o.lo + self.lo * o.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Self { hi, lo }
    }
}

impl Div for DoubleDouble {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let q1 = self.hi / o.hi;
        let r = self - o * Self::from(q1);
        let q2 = r.hi / o.hi;
        let r = r - o * Self::from(q2);
        let q3 = r.hi / o.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Self { hi, lo } + Self::from(q3)
    }
}

/// Eigenvalue of the real symmetric tridiagonal matrix `(diag, off)` nearest
/// `guess`, polished by Newton steps on the characteristic polynomial.
pub fn refine_tridiagonal(diag: &[DoubleDouble], off: &[DoubleDouble], guess: f64) -> DoubleDouble {
    let mut x = DoubleDouble::from(guess);
    for _ in 0..8 {
        // p_k(x) = (d_k − x) p_{k−1} − o_{k−1}² p_{k−2}, with its derivative
        let (mut p0, mut p1) = (DoubleDouble::ONE, diag[0] - x);
        let (mut d0, mut d1) = (DoubleDouble::ZERO, -DoubleDouble::ONE);
        for k in 1..diag.len() {
            let o2 = off[k - 1] * off[k - 1];
            let p2 = (diag[k] - x) * p1 - o2 * p0;
            let d2 = (diag[k] - x) * d1 - p1 - o2 * d0;
            (p0, p1, d0, d1) = (p1, p2, d1, d2);
        }
        if d1.hi == 0.0 {
            break;
        }
        let step = p1 / d1;
        x = x - step;
        if step.hi.abs() <= 1e-31 * x.hi.abs().max(f64::MIN_POSITIVE) {
            break;
        }
    }
    x
}
