//! Small numeric helpers: log-gamma, signed logarithms, scaled values.

use serde::{Deserialize, Serialize};

/// `ln Γ(x)` for `x > 0`.
#[inline]
pub fn ln_gamma(x: f64) -> f64 {
    debug_assert!(x > 0.0, "ln_gamma argument must be positive, got {x}");
    libm::lgamma_r(x).0
}

/// `ln n!`.
#[inline]
pub fn ln_factorial(n: usize) -> f64 {
    ln_gamma(n as f64 + 1.0)
}

/// `ln (a)_k` (rising factorial), `a > 0`.
#[inline]
pub fn ln_pochhammer(a: f64, k: usize) -> f64 {
    if k == 0 {
        0.0
    } else {
        ln_gamma(a + k as f64) - ln_gamma(a)
    }
}

/// `ln(e^a + e^b)` without overflow.
#[inline]
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// A real number stored as sign and natural log of its magnitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignedLog {
    pub sign: i8,
    pub ln_abs: f64,
}

impl SignedLog {
    pub const ZERO: SignedLog = SignedLog { sign: 0, ln_abs: f64::NEG_INFINITY };

    pub fn from_f64(x: f64) -> Self {
        if x == 0.0 {
            Self::ZERO
        } else {
            SignedLog { sign: if x > 0.0 { 1 } else { -1 }, ln_abs: x.abs().ln() }
        }
    }

    pub fn new(sign: i8, ln_abs: f64) -> Self {
        SignedLog { sign, ln_abs }
    }

    pub fn to_f64(self) -> f64 {
        f64::from(self.sign) * self.ln_abs.exp()
    }

    pub fn mul(self, o: SignedLog) -> SignedLog {
        SignedLog { sign: self.sign * o.sign, ln_abs: self.ln_abs + o.ln_abs }
    }

    pub fn div(self, o: SignedLog) -> SignedLog {
        SignedLog { sign: self.sign * o.sign, ln_abs: self.ln_abs - o.ln_abs }
    }

    /// Sum of two values; exact in sign when signs agree.
    pub fn add(self, o: SignedLog) -> SignedLog {
        if self.sign == 0 {
            return o;
        }
        if o.sign == 0 {
            return self;
        }
        if self.sign == o.sign {
            return SignedLog { sign: self.sign, ln_abs: log_add_exp(self.ln_abs, o.ln_abs) };
        }
        let (big, small) = if self.ln_abs >= o.ln_abs { (self, o) } else { (o, self) };
        let r = (small.ln_abs - big.ln_abs).exp();
        if r >= 1.0 {
            return Self::ZERO;
        }
        SignedLog { sign: big.sign, ln_abs: big.ln_abs + (-r).ln_1p() }
    }
}

const SCALE_BITS: i32 = 512;

/// `mantissa * 2^exponent`, mantissa magnitude in `[0.5, 1)` or exactly zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scaled {
    pub mantissa: f64,
    pub exponent: i64,
}

impl Scaled {
    pub const ZERO: Scaled = Scaled { mantissa: 0.0, exponent: 0 };

    /// Normalise `x * 2^e`.
    pub fn new(x: f64, e: i64) -> Self {
        if x == 0.0 || !x.is_finite() {
            return Scaled { mantissa: x, exponent: if x == 0.0 { 0 } else { e } };
        }
        let (m, k) = frexp(x);
        Scaled { mantissa: m, exponent: e + k as i64 }
    }

    pub fn from_f64(x: f64) -> Self {
        Self::new(x, 0)
    }

    /// Converts to `f64`; may overflow to infinity or underflow to zero.
    pub fn to_f64(self) -> f64 {
        ldexp(self.mantissa, self.exponent)
    }

    pub fn ln_abs(self) -> f64 {
        self.mantissa.abs().ln() + self.exponent as f64 * std::f64::consts::LN_2
    }

    pub fn signum(self) -> i8 {
        if self.mantissa > 0.0 {
            1
        } else if self.mantissa < 0.0 {
            -1
        } else {
            0
        }
    }

    pub fn to_signed_log(self) -> SignedLog {
        if self.mantissa == 0.0 {
            SignedLog::ZERO
        } else {
            SignedLog::new(self.signum(), self.ln_abs())
        }
    }

    /// `self / other` as a plain `f64`.
    pub fn ratio(self, other: Scaled) -> f64 {
        ldexp(self.mantissa / other.mantissa, self.exponent - other.exponent)
    }

    pub fn is_zero(self) -> bool {
        self.mantissa == 0.0
    }

    pub fn neg(self) -> Scaled {
        Scaled { mantissa: -self.mantissa, exponent: self.exponent }
    }

    pub fn mul(self, o: Scaled) -> Scaled {
        Scaled::new(self.mantissa * o.mantissa, self.exponent + o.exponent)
    }

    pub fn div(self, o: Scaled) -> Scaled {
        Scaled::new(self.mantissa / o.mantissa, self.exponent - o.exponent)
    }

    pub fn add(self, o: Scaled) -> Scaled {
        if self.is_zero() {
            return o;
        }
        if o.is_zero() {
            return self;
        }
        let (big, small) = if self.exponent >= o.exponent { (self, o) } else { (o, self) };
        let shift = small.exponent - big.exponent;
        if shift < -1100 {
            return big;
        }
        Scaled::new(big.mantissa + ldexp(small.mantissa, shift), big.exponent)
    }

    pub fn sub(self, o: Scaled) -> Scaled {
        self.add(o.neg())
    }

    /// Square root of a nonnegative value.
    pub fn sqrt(self) -> Scaled {
        if self.is_zero() {
            return self;
        }
        let half = self.exponent.div_euclid(2);
        let m = if self.exponent.rem_euclid(2) == 1 { 2.0 * self.mantissa } else { self.mantissa };
        Scaled::new(m.sqrt(), half)
    }

    pub fn lt(self, o: Scaled) -> bool {
        self.sub(o).mantissa < 0.0
    }
}

/// Splits `x` into `m * 2^k` with `|m|` in `[0.5, 1)`.
pub fn frexp(x: f64) -> (f64, i32) {
    if x == 0.0 || !x.is_finite() {
        return (x, 0);
    }
    let bits = x.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i32;
    if exp == 0 {
        let (m, k) = frexp(x * 2f64.powi(64));
        return (m, k - 64);
    }
    let m = f64::from_bits((bits & !(0x7ff << 52)) | (1022u64 << 52));
    (m, exp - 1022)
}

/// `m * 2^e` with saturation to 0 / infinity.
pub fn ldexp(m: f64, e: i64) -> f64 {
    if m == 0.0 || !m.is_finite() {
        return m;
    }
    let mut x = m;
    let mut e = e;
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

/// Running rescaler for a group of values sharing one binary exponent.
///
/// Values are kept as `v * 2^exponent`; `renorm` shifts all of them when the
/// largest magnitude leaves `[2^-SCALE_BITS, 2^SCALE_BITS]`.
#[derive(Debug, Clone, Copy, Default)]
pub struct SharedScale {
    pub exponent: i64,
}

impl SharedScale {
    pub fn renorm(&mut self, vals: &mut [f64]) {
        let big = vals.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        if big == 0.0 || !big.is_finite() {
            return;
        }
        let (_, k) = frexp(big);
        if k > SCALE_BITS || k < -SCALE_BITS {
            let f = 2f64.powi(-k);
            for v in vals.iter_mut() {
                *v *= f;
            }
            self.exponent += k as i64;
        }
    }

    pub fn scaled(&self, v: f64) -> Scaled {
        Scaled::new(v, self.exponent)
    }
}

/// Relative difference `|a-b| / max(|a|,|b|)`, zero when both vanish.
pub fn rel_diff(a: f64, b: f64) -> f64 {
    let s = a.abs().max(b.abs());
    if s == 0.0 {
        0.0
    } else {
        (a - b).abs() / s
    }
}

/// Unevaluated sum `hi + lo`, about 106 significant bits.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DoubleDouble {
    pub hi: f64,
    pub lo: f64,
}

impl DoubleDouble {
    pub const ZERO: DoubleDouble = DoubleDouble { hi: 0.0, lo: 0.0 };

    pub fn from_f64(x: f64) -> Self {
        DoubleDouble { hi: x, lo: 0.0 }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
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

    pub fn add(self, o: DoubleDouble) -> DoubleDouble {
        let (s, e) = Self::two_sum(self.hi, o.hi);
        let (t, f) = Self::two_sum(self.lo, o.lo);
        let (s, e) = Self::quick_two_sum(s, e + t);
        let (hi, lo) = Self::quick_two_sum(s, e + f);
        DoubleDouble { hi, lo }
    }

    pub fn neg(self) -> DoubleDouble {
        DoubleDouble { hi: -self.hi, lo: -self.lo }
    }

    pub fn sub(self, o: DoubleDouble) -> DoubleDouble {
        self.add(o.neg())
    }

    pub fn mul(self, o: DoubleDouble) -> DoubleDouble {
        let p = self.hi * o.hi;
        let e = self.hi.mul_add(o.hi, -p);
        let (hi, lo) = Self::quick_two_sum(p, e + (self.hi * o.lo + self.lo * o.hi));
        DoubleDouble { hi, lo }
    }

    pub fn mul_f64(self, x: f64) -> DoubleDouble {
        self.mul(DoubleDouble::from_f64(x))
    }
}
