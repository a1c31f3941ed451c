//! Exact scalars: rationals with arbitrary precision and prime fields GF(p).
//!
//! Every computation in this crate is generic over [`Scalar`]. The rational
//! type keeps small values inline in machine words and only spills to a
//! heap-allocated big rational when a numerator or denominator outgrows `i64`,
//! so the common case of structure constants in `{-2, ..., 2}` stays cheap.

use std::fmt;
use std::hash::Hash;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Failure to read a coefficient string such as `"3/7"` or `"-1"`.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot parse coefficient {input:?}: {reason}")]
pub struct ParseScalarError {
    pub input: String,
    pub reason: &'static str,
}

impl ParseScalarError {
    fn new(input: &str, reason: &'static str) -> Self {
        ParseScalarError {
            input: input.to_string(),
            reason,
        }
    }
}

/// An element of the base field.
///
/// Implementations must be exact and canonical: two equal field elements
/// compare equal with `==` and hash identically.
pub trait Scalar:
    Clone
    + Eq
    + Hash
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
    + for<'a> AddAssign<&'a Self>
    + for<'a> SubAssign<&'a Self>
    + for<'a> MulAssign<&'a Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn from_i64(v: i64) -> Self;
    /// Multiplicative inverse, `None` for zero.
    fn inv(&self) -> Option<Self>;
    /// 0 for the rationals, p for GF(p).
    fn characteristic() -> u64;
    /// Field designation used in documents: `"rational"` or `"gf:<p>"`.
    fn field_name() -> String;
    /// Parses `"p/q"` or an integer literal.
    fn parse_coeff(s: &str) -> Result<Self, ParseScalarError>;

    fn is_one(&self) -> bool {
        *self == Self::one()
    }

    /// `self += a * b`.
    fn add_mul(&mut self, a: &Self, b: &Self) {
        if a.is_zero() || b.is_zero() {
            return;
        }
        let prod = a.clone() * b;
        *self += &prod;
    }

    /// `self -= a * b`.
    fn sub_mul(&mut self, a: &Self, b: &Self) {
        if a.is_zero() || b.is_zero() {
            return;
        }
        let prod = a.clone() * b;
        *self -= &prod;
    }

    fn div(&self, rhs: &Self) -> Option<Self> {
        rhs.inv().map(|r| self.clone() * &r)
    }
}

// ---------------------------------------------------------------------------
// Rationals
// ---------------------------------------------------------------------------

/// Exact rational number in lowest terms with positive denominator.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Rational(Repr);

// Small is used whenever numerator and denominator fit (numerator != i64::MIN),
// so structural equality is value equality.
#[derive(Clone, PartialEq, Eq, Hash)]
enum Repr {
    Small { num: i64, den: i64 },
    Big(Box<BigRational>),
}

impl Rational {
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Self::from_i128(num as i128, den as i128)
    }

    pub fn integer(v: i64) -> Self {
        Self::from_i128(v as i128, 1)
    }

    fn from_i128(mut num: i128, mut den: i128) -> Self {
        debug_assert!(den != 0);
        if den < 0 {
            num = -num;
            den = -den;
        }
        let g = num.gcd(&den);
        if g > 1 {
            num /= g;
            den /= g;
        }
        if num > i64::MIN as i128 && num <= i64::MAX as i128 && den <= i64::MAX as i128 {
            Rational(Repr::Small {
                num: num as i64,
                den: den as i64,
            })
        } else {
            Rational(Repr::Big(Box::new(BigRational::new_raw(
                BigInt::from(num),
                BigInt::from(den),
            ))))
        }
    }

    fn from_big(r: BigRational) -> Self {
        // BigRational arithmetic already reduces; only demote when it fits.
        if let (Some(n), Some(d)) = (r.numer().to_i64(), r.denom().to_i64()) {
            if n != i64::MIN {
                return Rational(Repr::Small { num: n, den: d });
            }
        }
        Rational(Repr::Big(Box::new(r)))
    }

    fn to_big(&self) -> BigRational {
        match &self.0 {
            Repr::Small { num, den } => BigRational::new_raw(BigInt::from(*num), BigInt::from(*den)),
            Repr::Big(b) => (**b).clone(),
        }
    }

    pub fn numer(&self) -> BigInt {
        match &self.0 {
            Repr::Small { num, .. } => BigInt::from(*num),
            Repr::Big(b) => b.numer().clone(),
        }
    }

    pub fn denom(&self) -> BigInt {
        match &self.0 {
            Repr::Small { den, .. } => BigInt::from(*den),
            Repr::Big(b) => b.denom().clone(),
        }
    }

    pub fn is_integer(&self) -> bool {
        match &self.0 {
            Repr::Small { den, .. } => *den == 1,
            Repr::Big(b) => b.is_integer(),
        }
    }

    fn add_impl(&self, rhs: &Rational) -> Rational {
        if let (Repr::Small { num: a, den: b }, Repr::Small { num: c, den: d }) = (&self.0, &rhs.0) {
            let (a, b, c, d) = (*a as i128, *b as i128, *c as i128, *d as i128);
            if b == d {
                return Rational::from_i128(a + c, b);
            }
            if let Some(n) = (a * d).checked_add(c * b) {
                return Rational::from_i128(n, b * d);
            }
        }
        Rational::from_big(self.to_big() + rhs.to_big())
    }

    fn mul_impl(&self, rhs: &Rational) -> Rational {
        if let (Repr::Small { num: a, den: b }, Repr::Small { num: c, den: d }) = (&self.0, &rhs.0) {
            return Rational::from_i128(*a as i128 * *c as i128, *b as i128 * *d as i128);
        }
        Rational::from_big(self.to_big() * rhs.to_big())
    }

    fn neg_impl(&self) -> Rational {
        match &self.0 {
            Repr::Small { num, den } => Rational(Repr::Small { num: -num, den: *den }),
            Repr::Big(b) => Rational::from_big(-(**b).clone()),
        }
    }
}

impl Default for Rational {
    fn default() -> Self {
        Rational::integer(0)
    }
}

impl From<i64> for Rational {
    fn from(v: i64) -> Self {
        Rational::integer(v)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Small { num, den } if *den == 1 => write!(f, "{num}"),
            Repr::Small { num, den } => write!(f, "{num}/{den}"),
            Repr::Big(b) if b.is_integer() => write!(f, "{}", b.numer()),
            Repr::Big(b) => write!(f, "{}/{}", b.numer(), b.denom()),
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rational {
    type Err = ParseScalarError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if t.is_empty() {
            return Err(ParseScalarError::new(s, "empty"));
        }
        let parse_int = |x: &str| -> Result<BigInt, ParseScalarError> {
            let digits = x.strip_prefix(['-', '+']).unwrap_or(x);
            if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                return Err(ParseScalarError::new(s, "expected an integer or p/q"));
            }
            x.parse::<BigInt>()
                .map_err(|_| ParseScalarError::new(s, "expected an integer or p/q"))
        };
        let (n, d) = match t.split_once('/') {
            Some((n, d)) => (parse_int(n)?, parse_int(d)?),
            None => (parse_int(t)?, BigInt::one()),
        };
        if d.is_zero() {
            return Err(ParseScalarError::new(s, "zero denominator"));
        }
        Ok(Rational::from_big(BigRational::new(n, d)))
    }
}

macro_rules! forward_binops {
    ($t:ty, $($trait:ident $method:ident $assign_trait:ident $assign_method:ident => $imp:expr;)*) => {$(
        impl $trait for $t {
            type Output = $t;
            fn $method(self, rhs: $t) -> $t { ($imp)(&self, &rhs) }
        }
        impl<'a> $trait<&'a $t> for $t {
            type Output = $t;
            fn $method(self, rhs: &'a $t) -> $t { ($imp)(&self, rhs) }
        }
        impl<'a> $assign_trait<&'a $t> for $t {
            fn $assign_method(&mut self, rhs: &'a $t) { *self = ($imp)(self, rhs); }
        }
        impl $assign_trait for $t {
            fn $assign_method(&mut self, rhs: $t) { *self = ($imp)(self, &rhs); }
        }
    )*};
}

forward_binops!(Rational,
    Add add AddAssign add_assign => |a: &Rational, b: &Rational| a.add_impl(b);
    Sub sub SubAssign sub_assign => |a: &Rational, b: &Rational| a.add_impl(&b.neg_impl());
    Mul mul MulAssign mul_assign => |a: &Rational, b: &Rational| a.mul_impl(b);
);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        self.neg_impl()
    }
}

impl Scalar for Rational {
    fn zero() -> Self {
        Rational(Repr::Small { num: 0, den: 1 })
    }

    fn one() -> Self {
        Rational(Repr::Small { num: 1, den: 1 })
    }

    fn is_zero(&self) -> bool {
        matches!(self.0, Repr::Small { num: 0, .. })
    }

    fn from_i64(v: i64) -> Self {
        Rational::integer(v)
    }

    fn inv(&self) -> Option<Self> {
        match &self.0 {
            Repr::Small { num: 0, .. } => None,
            Repr::Small { num, den } => Some(Rational::from_i128(*den as i128, *num as i128)),
            Repr::Big(b) => Some(Rational::from_big(b.recip())),
        }
    }

    fn characteristic() -> u64 {
        0
    }

    fn field_name() -> String {
        "rational".to_string()
    }

    fn parse_coeff(s: &str) -> Result<Self, ParseScalarError> {
        s.parse()
    }
}

impl Rational {
    pub fn abs(&self) -> Rational {
        match &self.0 {
            Repr::Small { num, den } => Rational(Repr::Small { num: num.abs(), den: *den }),
            Repr::Big(b) => Rational::from_big(b.abs()),
        }
    }
}

// ---------------------------------------------------------------------------
// Prime fields
// ---------------------------------------------------------------------------

pub const fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut q = 2u64;
    while q * q <= p {
        if p % q == 0 {
            return false;
        }
        q += 1;
    }
    true
}

/// Element of GF(P), stored as the reduced representative in `[0, P)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Fp<const P: u64>(u64);

impl<const P: u64> Fp<P> {
    const PRIME_CHECK: () = assert!(is_prime(P) && P < (1u64 << 62), "modulus must be a prime below 2^62");

    pub fn new(v: i64) -> Self {
        #[allow(clippy::let_unit_value)]
        let () = Self::PRIME_CHECK;
        Fp(v.rem_euclid(P as i64) as u64)
    }

    pub fn value(self) -> u64 {
        self.0
    }

    fn pow(self, mut e: u64) -> Self {
        let mut base = self.0 as u128;
        let mut acc = 1u128;
        let m = P as u128;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % m;
            }
            base = base * base % m;
            e >>= 1;
        }
        Fp(acc as u64)
    }
}

impl<const P: u64> fmt::Display for Fp<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl<const P: u64> fmt::Debug for Fp<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.0, P)
    }
}

fn fp_add<const P: u64>(a: &Fp<P>, b: &Fp<P>) -> Fp<P> {
    let s = a.0 + b.0;
    Fp(if s >= P { s - P } else { s })
}

fn fp_sub<const P: u64>(a: &Fp<P>, b: &Fp<P>) -> Fp<P> {
    Fp(if a.0 >= b.0 { a.0 - b.0 } else { a.0 + P - b.0 })
}

fn fp_mul<const P: u64>(a: &Fp<P>, b: &Fp<P>) -> Fp<P> {
    Fp((a.0 as u128 * b.0 as u128 % P as u128) as u64)
}

macro_rules! fp_binops {
    ($($trait:ident $method:ident $assign_trait:ident $assign_method:ident => $imp:ident;)*) => {$(
        impl<const P: u64> $trait for Fp<P> {
            type Output = Fp<P>;
            fn $method(self, rhs: Fp<P>) -> Fp<P> { $imp(&self, &rhs) }
        }
        impl<'a, const P: u64> $trait<&'a Fp<P>> for Fp<P> {
            type Output = Fp<P>;
            fn $method(self, rhs: &'a Fp<P>) -> Fp<P> { $imp(&self, rhs) }
        }
        impl<'a, const P: u64> $assign_trait<&'a Fp<P>> for Fp<P> {
            fn $assign_method(&mut self, rhs: &'a Fp<P>) { *self = $imp(self, rhs); }
        }
        impl<const P: u64> $assign_trait for Fp<P> {
            fn $assign_method(&mut self, rhs: Fp<P>) { *self = $imp(self, &rhs); }
        }
    )*};
}

fp_binops!(
    Add add AddAssign add_assign => fp_add;
    Sub sub SubAssign sub_assign => fp_sub;
    Mul mul MulAssign mul_assign => fp_mul;
);

impl<const P: u64> Neg for Fp<P> {
    type Output = Fp<P>;
    fn neg(self) -> Fp<P> {
        Fp(if self.0 == 0 { 0 } else { P - self.0 })
    }
}

impl<const P: u64> Scalar for Fp<P> {
    fn zero() -> Self {
        Fp::new(0)
    }

    fn one() -> Self {
        Fp::new(1)
    }

    fn is_zero(&self) -> bool {
        self.0 == 0
    }

    fn from_i64(v: i64) -> Self {
        Fp::new(v)
    }

    fn inv(&self) -> Option<Self> {
        if self.0 == 0 {
            None
        } else {
            Some(self.pow(P - 2))
        }
    }

    fn characteristic() -> u64 {
        P
    }

    fn field_name() -> String {
        format!("gf:{P}")
    }

    fn parse_coeff(s: &str) -> Result<Self, ParseScalarError> {
        let r: Rational = s.parse()?;
        let reduce = |x: &BigInt| -> u64 {
            let m = BigInt::from(P);
            let v = x.mod_floor(&m);
            v.to_u64().expect("reduced value fits")
        };
        let num = Fp::<P>(reduce(&r.numer()));
        let den = Fp::<P>(reduce(&r.denom()));
        let inv = den
            .inv()
            .ok_or_else(|| ParseScalarError::new(s, "denominator vanishes in the prime field"))?;
        Ok(num * inv)
    }
}
