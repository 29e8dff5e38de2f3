//! Exact rational arithmetic and the integer number theory used everywhere else.
//!
//! [`Rational`] wraps a pair of `i128` values kept in lowest terms with a
//! positive denominator. Every operation is exact; an intermediate that does
//! not fit in 128 bits panics instead of wrapping.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NumericsError {
    #[error("gcd of (0, 0) has no Bezout coefficients")]
    BothZero,
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("cannot parse rational from {0:?}")]
    Parse(String),
}

/// Greatest common divisor, always non-negative; `gcd(0, 0) == 0`.
pub fn gcd(u: i64, v: i64) -> i64 {
    let g = gcd_u128(u.unsigned_abs() as u128, v.unsigned_abs() as u128);
    i64::try_from(g).expect("gcd does not fit in i64")
}

fn gcd_u64(mut u: u64, mut v: u64) -> u64 {
    if u == 0 {
        return v;
    }
    if v == 0 {
        return u;
    }
    let shift = (u | v).trailing_zeros();
    u >>= u.trailing_zeros();
    loop {
        v >>= v.trailing_zeros();
        if u > v {
            std::mem::swap(&mut u, &mut v);
        }
        v -= u;
        if v == 0 {
            return u << shift;
        }
    }
}

fn gcd_u128(mut u: u128, mut v: u128) -> u128 {
    if u == 1 || v == 1 {
        return 1;
    }
    if u == 0 {
        return v;
    }
    if v == 0 {
        return u;
    }
    if let (Ok(a), Ok(b)) = (u64::try_from(u), u64::try_from(v)) {
        return gcd_u64(a, b) as u128;
    }
    let shift = (u | v).trailing_zeros();
    u >>= u.trailing_zeros();
    loop {
        v >>= v.trailing_zeros();
        if u > v {
            std::mem::swap(&mut u, &mut v);
        }
        v -= u;
        if v == 0 {
            return u << shift;
        }
    }
}

fn gcd_i128(u: i128, v: i128) -> i128 {
    let g = gcd_u128(u.unsigned_abs(), v.unsigned_abs());
    i128::try_from(g).expect("gcd does not fit in i128")
}

/// Bezout coefficients in the subtractive form `a*a1 - b*b1 == g`.
///
/// `g = gcd(|a|, |b|)` is positive. For coprime inputs the identity reads
/// `a*a1 - b*b1 == 1`.
pub fn extended_gcd(a: i64, b: i64) -> Result<(i64, i64, i64), NumericsError> {
    if a == 0 && b == 0 {
        return Err(NumericsError::BothZero);
    }
    // Classic iterative Euclid for x*a + y*b = g, then flip the sign of y.
    let (mut old_r, mut r) = (a as i128, b as i128);
    let (mut old_x, mut x) = (1i128, 0i128);
    let (mut old_y, mut y) = (0i128, 1i128);
    while r != 0 {
        let q = old_r.div_euclid(r);
        (old_r, r) = (r, old_r - q * r);
        (old_x, x) = (x, old_x - q * x);
        (old_y, y) = (y, old_y - q * y);
    }
    if old_r < 0 {
        old_r = -old_r;
        old_x = -old_x;
        old_y = -old_y;
    }
    let narrow = |v: i128| i64::try_from(v).expect("Bezout coefficient overflow");
    Ok((narrow(old_r), narrow(old_x), narrow(-old_y)))
}

/// Floor division for `i128`, rounding toward negative infinity.
pub(crate) fn floor_div(n: i128, d: i128) -> i128 {
    n.div_euclid(d) - if d < 0 && n.rem_euclid(d) != 0 { 1 } else { 0 }
}

/// Exact fraction in lowest terms with a positive denominator.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rational {
    num: i128,
    den: i128,
}

fn overflow() -> ! {
    panic!("rational arithmetic overflowed 128 bits")
}

impl Rational {
    pub const ZERO: Rational = Rational { num: 0, den: 1 };
    pub const ONE: Rational = Rational { num: 1, den: 1 };
    pub const HALF: Rational = Rational { num: 1, den: 2 };

    /// Builds `num/den` in lowest terms. Panics on a zero denominator.
    pub fn new(num: i128, den: i128) -> Self {
        Self::try_new(num, den).expect("zero denominator")
    }

    pub fn try_new(num: i128, den: i128) -> Result<Self, NumericsError> {
        if den == 0 {
            return Err(NumericsError::ZeroDenominator);
        }
        if num == 0 {
            return Ok(Self::ZERO);
        }
        let g = gcd_i128(num, den);
        let (mut num, mut den) = (num / g, den / g);
        if den < 0 {
            num = num.checked_neg().unwrap_or_else(|| overflow());
            den = den.checked_neg().unwrap_or_else(|| overflow());
        }
        Ok(Rational { num, den })
    }

    pub const fn from_integer(n: i128) -> Self {
        Rational { num: n, den: 1 }
    }

    pub fn numer(&self) -> i128 {
        self.num
    }

    pub fn denom(&self) -> i128 {
        self.den
    }

    pub fn is_integer(&self) -> bool {
        self.den == 1
    }

    /// True for values of the form `k + 1/2`.
    pub fn is_half_integer(&self) -> bool {
        self.den == 2
    }

    pub fn floor(&self) -> i128 {
        floor_div(self.num, self.den)
    }

    /// Smallest integer not below `self`.
    pub fn ceil(&self) -> i128 {
        -floor_div(-self.num, self.den)
    }

    /// Fractional part in `[0, 1)`.
    pub fn fract(&self) -> Rational {
        *self - Rational::from_integer(self.floor())
    }

    pub fn abs(&self) -> Rational {
        if self.num < 0 {
            -*self
        } else {
            *self
        }
    }

    pub fn signum(&self) -> i32 {
        self.num.signum() as i32
    }

    pub fn recip(&self) -> Rational {
        Rational::new(self.den, self.num)
    }

    /// Lossy conversion, for display and rendering only.
    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn mul_int(&self, k: i64) -> Rational {
        if k == 0 || self.num == 0 {
            return Rational::ZERO;
        }
        let g = gcd_i128(self.den, k as i128);
        let num = self
            .num
            .checked_mul(k as i128 / g)
            .unwrap_or_else(|| overflow());
        Rational { num, den: self.den / g }
    }
}

/// Free-function form of [`Rational::ceil`].
pub fn ceil_exact(r: Rational) -> i128 {
    r.ceil()
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n as i128)
    }
}

impl From<i32> for Rational {
    fn from(n: i32) -> Self {
        Rational::from_integer(n as i128)
    }
}

impl Add for Rational {
    type Output = Rational;
    fn add(self, rhs: Rational) -> Rational {
        if self.den == rhs.den {
            let num = self.num.checked_add(rhs.num).unwrap_or_else(|| overflow());
            return Rational::new(num, self.den);
        }
        let g = gcd_i128(self.den, rhs.den);
        let (ls, rs) = (rhs.den / g, self.den / g);
        let num = self
            .num
            .checked_mul(ls)
            .and_then(|x| rhs.num.checked_mul(rs).and_then(|y| x.checked_add(y)))
            .unwrap_or_else(|| overflow());
        let den = self.den.checked_mul(ls).unwrap_or_else(|| overflow());
        Rational::new(num, den)
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational {
            num: self.num.checked_neg().unwrap_or_else(|| overflow()),
            den: self.den,
        }
    }
}

impl Sub for Rational {
    type Output = Rational;
    fn sub(self, rhs: Rational) -> Rational {
        self + (-rhs)
    }
}

impl Mul for Rational {
    type Output = Rational;
    fn mul(self, rhs: Rational) -> Rational {
        if self.num == 0 || rhs.num == 0 {
            return Rational::ZERO;
        }
        let g1 = gcd_i128(self.num, rhs.den);
        let g2 = gcd_i128(rhs.num, self.den);
        let num = (self.num / g1)
            .checked_mul(rhs.num / g2)
            .unwrap_or_else(|| overflow());
        let den = (self.den / g2)
            .checked_mul(rhs.den / g1)
            .unwrap_or_else(|| overflow());
        Rational { num, den }
    }
}

impl Div for Rational {
    type Output = Rational;
    fn div(self, rhs: Rational) -> Rational {
        assert!(rhs.num != 0, "division by zero rational");
        self * rhs.recip()
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        if self.den == other.den {
            return self.num.cmp(&other.num);
        }
        match (
            self.num.checked_mul(other.den),
            other.num.checked_mul(self.den),
        ) {
            (Some(l), Some(r)) => l.cmp(&r),
            _ => cmp_by_expansion(*self, *other),
        }
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

// Continued-fraction comparison: never forms a product of the operands.
fn cmp_by_expansion(x: Rational, y: Rational) -> Ordering {
    let (fx, fy) = (x.floor(), y.floor());
    if fx != fy {
        return fx.cmp(&fy);
    }
    let (rx, ry) = (x.num - fx * x.den, y.num - fy * y.den);
    match (rx == 0, ry == 0) {
        (true, true) => Ordering::Equal,
        (true, false) => Ordering::Less,
        (false, true) => Ordering::Greater,
        // x = f + rx/dx, so comparing x with y is comparing dy/ry with dx/rx.
        (false, false) => cmp_by_expansion(
            Rational { num: y.den, den: ry },
            Rational { num: x.den, den: rx },
        ),
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// Accepts `"n/d"`, `"n"`, and terminating decimals such as `"-0.25"`.
///
/// Decimals are converted digit by digit, so `"0.1"` is exactly `1/10`.
impl FromStr for Rational {
    type Err = NumericsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || NumericsError::Parse(s.to_string());
        let t = s.trim();
        if let Some((n, d)) = t.split_once('/') {
            let n = strip_parens(n).parse::<Rational>().map_err(|_| bad())?;
            let d = strip_parens(d).parse::<Rational>().map_err(|_| bad())?;
            if d.num == 0 {
                return Err(NumericsError::ZeroDenominator);
            }
            return Ok(n / d);
        }
        let (neg, body) = match t.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, t.strip_prefix('+').unwrap_or(t)),
        };
        let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(bad());
        }
        let all_digits = |p: &str| p.chars().all(|c| c.is_ascii_digit());
        if !all_digits(int_part) || !all_digits(frac_part) {
            return Err(bad());
        }
        let digits = format!("{int_part}{frac_part}");
        let num: i128 = digits.parse().map_err(|_| bad())?;
        let den = 10i128
            .checked_pow(frac_part.len() as u32)
            .ok_or_else(bad)?;
        let r = Rational::new(num, den);
        Ok(if neg { -r } else { r })
    }
}

fn strip_parens(s: &str) -> &str {
    let s = s.trim();
    s.strip_prefix('(')
        .and_then(|x| x.strip_suffix(')'))
        .unwrap_or(s)
        .trim()
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
