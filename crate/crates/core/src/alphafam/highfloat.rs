//! Binary floating point with a big-integer mantissa.
//!
//! A value is `mant · 2^exp` with `|mant| < 2^p`, where the precision `p`
//! is fixed per process: 128 bits unless `BIRKHOFF_PRECISION_BITS` says
//! otherwise (never below 64). Rounding is to nearest on every operation,
//! so results are deterministic for a given precision.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::float::FloatCore;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::exactalg::Rational;
use crate::{Error, Result};

pub const DEFAULT_PRECISION_BITS: u64 = 128;
pub const MIN_PRECISION_BITS: u64 = 64;

/// Mantissa bits in effect for this process.
pub fn precision_bits() -> u64 {
    static BITS: OnceLock<u64> = OnceLock::new();
    *BITS.get_or_init(|| {
        std::env::var("BIRKHOFF_PRECISION_BITS")
            .ok()
            .and_then(|s| s.trim().parse::<u64>().ok())
            .map_or(DEFAULT_PRECISION_BITS, |p| p.max(MIN_PRECISION_BITS))
    })
}

#[derive(Clone)]
pub struct HighFloat {
    mant: BigInt,
    exp: i64,
}

impl HighFloat {
    fn normalized(mant: BigInt, exp: i64) -> Self {
        if mant.is_zero() {
            return HighFloat { mant, exp: 0 };
        }
        let prec = precision_bits();
        let bits = mant.bits();
        if bits <= prec {
            return HighFloat { mant, exp };
        }
        let shift = bits - prec;
        let (sign, mag) = (mant.sign(), mant.magnitude());
        let half = num_bigint::BigUint::from(1u8) << (shift - 1);
        let rounded = (mag + half) >> shift;
        HighFloat { mant: BigInt::from_biguint(sign, rounded), exp: exp + shift as i64 }
    }

    pub fn zero() -> Self {
        HighFloat { mant: BigInt::zero(), exp: 0 }
    }

    pub fn from_int(v: impl Into<BigInt>) -> Self {
        Self::normalized(v.into(), 0)
    }

    pub fn from_ratio(p: i64, q: i64) -> Self {
        Self::from_int(p) / Self::from_int(q)
    }

    pub fn from_rational(r: &Rational) -> Self {
        Self::from_int(r.numer().clone()) / Self::from_int(r.denom().clone())
    }

    /// Exact conversion; `None` for NaN and infinities.
    pub fn from_f64(x: f64) -> Option<Self> {
        if !x.is_finite() {
            return None;
        }
        let (m, e, s) = FloatCore::integer_decode(x);
        let mant = BigInt::from(m) * i64::from(s);
        Some(Self::normalized(mant, i64::from(e)))
    }

    pub fn to_f64(&self) -> f64 {
        if self.mant.is_zero() {
            return 0.0;
        }
        let bits = self.mant.bits();
        let (m, e) = if bits > 64 {
            let shift = bits - 64;
            let mag = self.mant.magnitude() >> shift;
            (BigInt::from_biguint(self.mant.sign(), mag), self.exp + shift as i64)
        } else {
            (self.mant.clone(), self.exp)
        };
        let m = m.to_f64().expect("at most 64 bits");
        let e = e.clamp(-2200, 2200) as i32;
        m * 2f64.powi(e / 2) * 2f64.powi(e - e / 2)
    }

    pub fn is_negative(&self) -> bool {
        self.mant.is_negative()
    }

    pub fn abs(&self) -> Self {
        HighFloat { mant: self.mant.abs(), exp: self.exp }
    }

    /// Square root; `None` for negative input.
    pub fn sqrt(&self) -> Option<Self> {
        if self.mant.is_negative() {
            return None;
        }
        if self.mant.is_zero() {
            return Some(Self::zero());
        }
        let want = 2 * precision_bits() + 2;
        let mut shift = want.saturating_sub(self.mant.bits()) as i64;
        if (self.exp - shift) % 2 != 0 {
            shift += 1;
        }
        let root = (&self.mant << shift as usize).sqrt();
        Some(Self::normalized(root, (self.exp - shift) / 2))
    }

    pub fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    pub fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    fn add_ref(&self, other: &Self) -> Self {
        if self.mant.is_zero() {
            return other.clone();
        }
        if other.mant.is_zero() {
            return self.clone();
        }
        let (hi, lo) = if self.exp >= other.exp { (self, other) } else { (other, self) };
        // A term below the rounding unit of the other cannot change the result.
        let gap = (hi.exp + hi.mant.bits() as i64) - (lo.exp + lo.mant.bits() as i64);
        if gap > precision_bits() as i64 + 2 {
            return hi.clone();
        }
        let diff = (hi.exp - lo.exp) as usize;
        Self::normalized((&hi.mant << diff) + &lo.mant, lo.exp)
    }

    fn mul_ref(&self, other: &Self) -> Self {
        Self::normalized(&self.mant * &other.mant, self.exp + other.exp)
    }

    fn div_ref(&self, other: &Self) -> Self {
        assert!(!other.mant.is_zero(), "HighFloat division by zero");
        let shift = (precision_bits() + other.mant.bits() + 2).saturating_sub(self.mant.bits());
        let q = (&self.mant << shift as usize) / &other.mant;
        Self::normalized(q, self.exp - shift as i64 - other.exp)
    }

    fn neg_ref(&self) -> Self {
        HighFloat { mant: -&self.mant, exp: self.exp }
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $f:ident) => {
        impl $tr<&HighFloat> for &HighFloat {
            type Output = HighFloat;
            fn $m(self, rhs: &HighFloat) -> HighFloat {
                self.$f(rhs)
            }
        }
        impl $tr<HighFloat> for HighFloat {
            type Output = HighFloat;
            fn $m(self, rhs: HighFloat) -> HighFloat {
                self.$f(&rhs)
            }
        }
        impl $tr<&HighFloat> for HighFloat {
            type Output = HighFloat;
            fn $m(self, rhs: &HighFloat) -> HighFloat {
                self.$f(rhs)
            }
        }
        impl $tr<HighFloat> for &HighFloat {
            type Output = HighFloat;
            fn $m(self, rhs: HighFloat) -> HighFloat {
                self.$f(&rhs)
            }
        }
    };
}

impl HighFloat {
    fn sub_ref(&self, other: &Self) -> Self {
        self.add_ref(&other.neg_ref())
    }
}

binop!(Add, add, add_ref);
binop!(Sub, sub, sub_ref);
binop!(Mul, mul, mul_ref);
binop!(Div, div, div_ref);

impl Neg for HighFloat {
    type Output = HighFloat;
    fn neg(self) -> HighFloat {
        self.neg_ref()
    }
}

impl Neg for &HighFloat {
    type Output = HighFloat;
    fn neg(self) -> HighFloat {
        self.neg_ref()
    }
}

impl Zero for HighFloat {
    fn zero() -> Self {
        HighFloat::zero()
    }

    fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }
}

impl Sum for HighFloat {
    fn sum<I: Iterator<Item = HighFloat>>(iter: I) -> Self {
        iter.fold(HighFloat::zero(), |a, b| a + b)
    }
}

impl<'a> Sum<&'a HighFloat> for HighFloat {
    fn sum<I: Iterator<Item = &'a HighFloat>>(iter: I) -> Self {
        iter.fold(HighFloat::zero(), |a, b| a + b)
    }
}

impl From<i64> for HighFloat {
    fn from(v: i64) -> Self {
        HighFloat::from_int(v)
    }
}

impl PartialEq for HighFloat {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for HighFloat {}

impl PartialOrd for HighFloat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HighFloat {
    fn cmp(&self, other: &Self) -> Ordering {
        // Differences are exact here: aligning mantissas loses nothing.
        let (a, b) = (self, other);
        if a.mant.sign() != b.mant.sign() || a.mant.is_zero() {
            return a.mant.sign().cmp(&b.mant.sign());
        }
        let e = a.exp.min(b.exp);
        let am = &a.mant << (a.exp - e) as usize;
        let bm = &b.mant << (b.exp - e) as usize;
        am.cmp(&bm)
    }
}

impl fmt::Display for HighFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::format::fmt_sig(self.to_f64()))
    }
}

impl fmt::Debug for HighFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for HighFloat {
    type Err = Error;

    /// Decimal and `p/q` input is converted exactly before rounding;
    /// exponent notation goes through `f64`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Ok(r) = Rational::from_str(s) {
            return Ok(HighFloat::from_rational(&r));
        }
        s.parse::<f64>()
            .ok()
            .and_then(HighFloat::from_f64)
            .ok_or_else(|| Error::parse(1, format!("bad number `{s}`")))
    }
}
