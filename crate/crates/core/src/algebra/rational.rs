//! Exact rationals with a machine-word fast path.
//!
//! Values that fit in `i64/i64` are stored inline; everything else spills to
//! a `BigRational`. The representation is canonical (reduced, positive
//! denominator, demoted to the small form whenever possible), so structural
//! equality and hashing coincide with numeric equality.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::AlgebraError;

#[derive(Clone)]
pub enum Rational {
    Small(i64, i64),
    Big(BigRational),
}

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl Rational {
    pub fn zero() -> Self {
        Rational::Small(0, 1)
    }

    pub fn one() -> Self {
        Rational::Small(1, 1)
    }

    pub fn from_int(n: i64) -> Self {
        Rational::Small(n, 1)
    }

    /// `num/den`, reduced. Panics if `den == 0`.
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Self::from_i128(num as i128, den as i128)
    }

    pub fn from_bigs(num: BigInt, den: BigInt) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        Self::from_big(BigRational::new(num, den))
    }

    fn from_i128(num: i128, den: i128) -> Self {
        if num == 0 {
            return Rational::zero();
        }
        let (mut n, mut d) = if den < 0 { (-num, -den) } else { (num, den) };
        let g = gcd_u128(n.unsigned_abs(), d as u128) as i128;
        if g > 1 {
            n /= g;
            d /= g;
        }
        match (i64::try_from(n), i64::try_from(d)) {
            (Ok(n), Ok(d)) => Rational::Small(n, d),
            _ => Rational::Big(BigRational::new_raw(BigInt::from(n), BigInt::from(d))),
        }
    }

    fn from_big(r: BigRational) -> Self {
        // BigRational::new already reduces and normalises the sign.
        if let (Some(n), Some(d)) = (r.numer().to_i64(), r.denom().to_i64()) {
            Rational::Small(n, d)
        } else {
            Rational::Big(r)
        }
    }

    pub fn to_big(&self) -> BigRational {
        match self {
            Rational::Small(n, d) => BigRational::new_raw(BigInt::from(*n), BigInt::from(*d)),
            Rational::Big(r) => r.clone(),
        }
    }

    pub fn numer(&self) -> BigInt {
        match self {
            Rational::Small(n, _) => BigInt::from(*n),
            Rational::Big(r) => r.numer().clone(),
        }
    }

    pub fn denom(&self) -> BigInt {
        match self {
            Rational::Small(_, d) => BigInt::from(*d),
            Rational::Big(r) => r.denom().clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Rational::Small(0, _))
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Rational::Small(1, 1))
    }

    pub fn is_integer(&self) -> bool {
        match self {
            Rational::Small(_, d) => *d == 1,
            Rational::Big(r) => r.is_integer(),
        }
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Rational::Small(n, _) => *n < 0,
            Rational::Big(r) => r.is_negative(),
        }
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    pub fn recip(&self) -> Result<Self, AlgebraError> {
        match self {
            Rational::Small(0, _) => Err(AlgebraError::DivisionByZero),
            Rational::Small(n, d) => Ok(Self::from_i128(*d as i128, *n as i128)),
            Rational::Big(r) => Ok(Self::from_big(r.recip())),
        }
    }

    pub fn pow(&self, e: i32) -> Result<Self, AlgebraError> {
        let base = if e < 0 { self.recip()? } else { self.clone() };
        let mut acc = Rational::one();
        let mut b = base;
        let mut k = e.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &b;
            }
            b = &b * &b;
            k >>= 1;
        }
        Ok(acc)
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Rational::Small(n, d) => *n as f64 / *d as f64,
            Rational::Big(r) => {
                // Scale down before converting so huge numerators/denominators
                // do not overflow to inf/inf.
                let n = r.numer();
                let d = r.denom();
                let nb = n.bits() as i64;
                let db = d.bits() as i64;
                let shift = (nb.max(db) - 1000).max(0) as usize;
                let nf = (n >> shift).to_f64().unwrap_or(f64::NAN);
                let df = (d >> shift).to_f64().unwrap_or(f64::NAN);
                nf / df
            }
        }
    }

    pub fn factorial(n: u32) -> Self {
        let mut acc = BigInt::one();
        for k in 2..=n {
            acc *= k;
        }
        Self::from_big(BigRational::from_integer(acc))
    }

    pub fn binomial(n: i64, k: i64) -> Self {
        if k < 0 || n < 0 || k > n {
            return Rational::zero();
        }
        let k = k.min(n - k);
        let mut acc = BigInt::one();
        for i in 0..k {
            acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
        }
        Self::from_big(BigRational::from_integer(acc))
    }

    /// Canonical string form: `p` or `p/q`.
    pub fn to_canonical(&self) -> String {
        self.to_string()
    }
}

impl Default for Rational {
    fn default() -> Self {
        Rational::zero()
    }
}

impl PartialEq for Rational {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Rational::Small(a, b), Rational::Small(c, d)) => a == c && b == d,
            (Rational::Big(a), Rational::Big(b)) => a == b,
            _ => false,
        }
    }
}

impl Eq for Rational {}

impl Hash for Rational {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match self {
            Rational::Small(n, d) => {
                0u8.hash(state);
                n.hash(state);
                d.hash(state);
            }
            Rational::Big(r) => {
                1u8.hash(state);
                r.hash(state);
            }
        }
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Rational::Small(a, b), Rational::Small(c, d)) => {
                ((*a as i128) * (*d as i128)).cmp(&((*c as i128) * (*b as i128)))
            }
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rational::Small(n, 1) => write!(f, "{n}"),
            Rational::Small(n, d) => write!(f, "{n}/{d}"),
            Rational::Big(r) => {
                if r.is_integer() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rational {
    type Err = AlgebraError;

    /// Accepts `p`, `p/q`, and decimal literals such as `-1.25` or `3e-2`;
    /// decimals are converted exactly.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || AlgebraError::Parse(s.to_string());
        if s.is_empty() {
            return Err(bad());
        }
        if let Some((p, q)) = s.split_once('/') {
            let n = BigInt::from_str(p.trim()).map_err(|_| bad())?;
            let d = BigInt::from_str(q.trim()).map_err(|_| bad())?;
            if d.is_zero() {
                return Err(AlgebraError::DivisionByZero);
            }
            return Ok(Self::from_bigs(n, d));
        }
        let (mantissa, exp) = match s.find(['e', 'E']) {
            Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
            None => (s, 0),
        };
        let (neg, digits) = match mantissa.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
        };
        let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(bad());
        }
        if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let all = format!("{int_part}{frac_part}");
        let mut n = BigInt::from_str(if all.is_empty() { "0" } else { &all }).map_err(|_| bad())?;
        if neg {
            n = -n;
        }
        let scale = exp - frac_part.len() as i32;
        let ten = BigInt::from(10);
        let r = if scale >= 0 {
            BigRational::from_integer(n * num_traits::pow(ten, scale as usize))
        } else {
            BigRational::new(n, num_traits::pow(ten, (-scale) as usize))
        };
        Ok(Self::from_big(r))
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_int(n)
    }
}

impl From<BigRational> for Rational {
    fn from(r: BigRational) -> Self {
        Rational::from_big(r)
    }
}

impl<'a> Add<&'a Rational> for &'a Rational {
    type Output = Rational;
    fn add(self, rhs: &'a Rational) -> Rational {
        match (self, rhs) {
            (Rational::Small(0, _), _) => rhs.clone(),
            (_, Rational::Small(0, _)) => self.clone(),
            (Rational::Small(a, b), Rational::Small(c, d)) => {
                if b == d {
                    Rational::from_i128(*a as i128 + *c as i128, *b as i128)
                } else {
                    let n = (*a as i128) * (*d as i128) + (*c as i128) * (*b as i128);
                    let den = (*b as i128) * (*d as i128);
                    Rational::from_i128(n, den)
                }
            }
            _ => Rational::from_big(self.to_big() + rhs.to_big()),
        }
    }
}

impl<'a> Sub<&'a Rational> for &'a Rational {
    type Output = Rational;
    fn sub(self, rhs: &'a Rational) -> Rational {
        self + &(-rhs.clone())
    }
}

impl<'a> Mul<&'a Rational> for &'a Rational {
    type Output = Rational;
    fn mul(self, rhs: &'a Rational) -> Rational {
        match (self, rhs) {
            (Rational::Small(0, _), _) | (_, Rational::Small(0, _)) => Rational::zero(),
            (Rational::Small(1, 1), _) => rhs.clone(),
            (_, Rational::Small(1, 1)) => self.clone(),
            (Rational::Small(a, b), Rational::Small(c, d)) => {
                Rational::from_i128((*a as i128) * (*c as i128), (*b as i128) * (*d as i128))
            }
            _ => Rational::from_big(self.to_big() * rhs.to_big()),
        }
    }
}

impl<'a> Div<&'a Rational> for &'a Rational {
    type Output = Rational;
    fn div(self, rhs: &'a Rational) -> Rational {
        self * &rhs.recip().expect("division by zero rational")
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        match self {
            Rational::Small(n, d) if n != i64::MIN => Rational::Small(-n, d),
            Rational::Small(n, d) => Rational::from_i128(-(n as i128), d as i128),
            Rational::Big(r) => Rational::from_big(-r),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Rational> for Rational {
            type Output = Rational;
            fn $m(self, rhs: Rational) -> Rational {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a Rational> for Rational {
            type Output = Rational;
            fn $m(self, rhs: &'a Rational) -> Rational {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl AddAssign<&Rational> for Rational {
    fn add_assign(&mut self, rhs: &Rational) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&Rational> for Rational {
    fn sub_assign(&mut self, rhs: &Rational) {
        *self = &*self - rhs;
    }
}

impl MulAssign<&Rational> for Rational {
    fn mul_assign(&mut self, rhs: &Rational) {
        *self = &*self * rhs;
    }
}

/// Least common multiple of denominators, used to clear fractions.
pub fn lcm_denominators<'a>(it: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    it.into_iter().fold(BigInt::one(), |acc, r| acc.lcm(&r.denom()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduces_and_normalises_sign() {
        assert_eq!(Rational::new(6, -4), Rational::new(-3, 2));
        assert_eq!(Rational::new(0, -5), Rational::zero());
        assert_eq!(Rational::new(-3, 2).to_string(), "-3/2");
    }

    #[test]
    fn overflow_spills_to_big_and_demotes_back() {
        let big = Rational::from_int(i64::MAX);
        let sq = &big * &big;
        assert!(matches!(sq, Rational::Big(_)));
        let back = &sq / &big;
        assert!(matches!(back, Rational::Small(_, _)));
        assert_eq!(back, big);
    }

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!("3/6".parse::<Rational>().unwrap(), Rational::new(1, 2));
        assert_eq!("-1.25".parse::<Rational>().unwrap(), Rational::new(-5, 4));
        assert_eq!("2.5e-1".parse::<Rational>().unwrap(), Rational::new(1, 4));
        assert_eq!("12".parse::<Rational>().unwrap(), Rational::from_int(12));
        assert!("1/0".parse::<Rational>().is_err());
        assert!("abc".parse::<Rational>().is_err());
    }

    #[test]
    fn factorial_and_binomial() {
        assert_eq!(Rational::factorial(5), Rational::from_int(120));
        assert_eq!(Rational::binomial(6, 2), Rational::from_int(15));
        assert_eq!(Rational::binomial(3, 5), Rational::zero());
        assert_eq!(Rational::factorial(25).to_string(), "15511210043330985984000000");
    }

    #[test]
    fn pow_negative() {
        let r = Rational::new(2, 3);
        assert_eq!(r.pow(-2).unwrap(), Rational::new(9, 4));
        assert!(Rational::zero().pow(-1).is_err());
    }
}
