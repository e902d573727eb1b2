//! Exact integer and fraction types used by every predicate.
//!
//! `Int` keeps values in an `i128` while they fit and moves to a `BigInt`
//! on overflow, so predicates on moderate coordinates never allocate while
//! large inputs stay exact.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

#[derive(Clone, Debug)]
pub enum Int {
    Small(i128),
    Big(BigInt),
}

impl Int {
    pub fn zero() -> Int {
        Int::Small(0)
    }

    pub fn one() -> Int {
        Int::Small(1)
    }

    pub fn from_big(b: BigInt) -> Int {
        match b.to_i128() {
            Some(v) => Int::Small(v),
            None => Int::Big(b),
        }
    }

    pub fn to_big(&self) -> BigInt {
        match self {
            Int::Small(v) => BigInt::from(*v),
            Int::Big(b) => b.clone(),
        }
    }

    pub fn signum(&self) -> i32 {
        match self {
            Int::Small(v) => v.signum() as i32,
            Int::Big(b) => {
                if b.is_positive() {
                    1
                } else if b.is_negative() {
                    -1
                } else {
                    0
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.signum() == 0
    }

    pub fn abs(&self) -> Int {
        if self.signum() < 0 {
            -self
        } else {
            self.clone()
        }
    }

    pub fn gcd(&self, other: &Int) -> Int {
        match (self, other) {
            (Int::Small(a), Int::Small(b)) if *a != i128::MIN && *b != i128::MIN => {
                let (mut a, mut b) = (a.abs(), b.abs());
                while b != 0 {
                    let r = a % b;
                    a = b;
                    b = r;
                }
                Int::Small(a)
            }
            _ => Int::from_big(self.to_big().gcd(&other.to_big())),
        }
    }

    /// Exact division; the caller guarantees `other` divides `self`.
    pub fn div_exact(&self, other: &Int) -> Int {
        match (self, other) {
            (Int::Small(a), Int::Small(b)) => match a.checked_div(*b) {
                Some(q) => Int::Small(q),
                None => Int::from_big(self.to_big() / other.to_big()),
            },
            _ => Int::from_big(self.to_big() / other.to_big()),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Int::Small(v) => *v as f64,
            Int::Big(b) => b.to_f64().unwrap_or(f64::NAN),
        }
    }
}

impl From<i64> for Int {
    fn from(v: i64) -> Int {
        Int::Small(v as i128)
    }
}

impl From<i32> for Int {
    fn from(v: i32) -> Int {
        Int::Small(v as i128)
    }
}

impl From<i128> for Int {
    fn from(v: i128) -> Int {
        Int::Small(v)
    }
}

impl From<BigInt> for Int {
    fn from(b: BigInt) -> Int {
        Int::from_big(b)
    }
}

impl PartialEq for Int {
    fn eq(&self, other: &Int) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Int {}

impl PartialOrd for Int {
    fn partial_cmp(&self, other: &Int) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Int {
    fn cmp(&self, other: &Int) -> Ordering {
        match (self, other) {
            (Int::Small(a), Int::Small(b)) => a.cmp(b),
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl std::hash::Hash for Int {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        // Small and Big encodings of one value must hash alike.
        self.to_big().hash(state)
    }
}

impl fmt::Display for Int {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Int::Small(v) => write!(f, "{v}"),
            Int::Big(b) => write!(f, "{b}"),
        }
    }
}

macro_rules! int_binop {
    ($trait:ident, $method:ident, $checked:ident, $op:tt) => {
        impl<'a, 'b> $trait<&'b Int> for &'a Int {
            type Output = Int;
            #[inline]
            fn $method(self, rhs: &'b Int) -> Int {
                if let (Int::Small(a), Int::Small(b)) = (self, rhs) {
                    if let Some(v) = a.$checked(*b) {
                        return Int::Small(v);
                    }
                }
                Int::from_big(self.to_big() $op rhs.to_big())
            }
        }
        impl $trait<Int> for Int {
            type Output = Int;
            #[inline]
            fn $method(self, rhs: Int) -> Int {
                (&self).$method(&rhs)
            }
        }
        impl<'b> $trait<&'b Int> for Int {
            type Output = Int;
            #[inline]
            fn $method(self, rhs: &'b Int) -> Int {
                (&self).$method(rhs)
            }
        }
        impl<'a> $trait<Int> for &'a Int {
            type Output = Int;
            #[inline]
            fn $method(self, rhs: Int) -> Int {
                self.$method(&rhs)
            }
        }
    };
}

int_binop!(Add, add, checked_add, +);
int_binop!(Sub, sub, checked_sub, -);
int_binop!(Mul, mul, checked_mul, *);

impl Neg for &Int {
    type Output = Int;
    fn neg(self) -> Int {
        match self {
            Int::Small(v) => match v.checked_neg() {
                Some(n) => Int::Small(n),
                None => Int::from_big(-BigInt::from(*v)),
            },
            Int::Big(b) => Int::from_big(-b),
        }
    }
}

impl Neg for Int {
    type Output = Int;
    fn neg(self) -> Int {
        -&self
    }
}

/// A fraction `num / den` with `den > 0`, not necessarily reduced.
///
/// Comparisons cross-multiply, so reduction is only needed when a
/// canonical value is printed or hashed (see [`Frac::to_rational`]).
#[derive(Clone, Debug)]
pub struct Frac {
    pub num: Int,
    pub den: Int,
}

impl Frac {
    /// Builds `num / den`; `den` must be nonzero.
    pub fn new(num: Int, den: Int) -> Frac {
        assert!(!den.is_zero(), "fraction with zero denominator");
        if den.signum() < 0 {
            Frac { num: -num, den: -den }
        } else {
            Frac { num, den }
        }
    }

    pub fn from_int(v: Int) -> Frac {
        Frac { num: v, den: Int::one() }
    }

    pub fn signum(&self) -> i32 {
        self.num.signum()
    }

    pub fn to_rational(&self) -> BigRational {
        BigRational::new(self.num.to_big(), self.den.to_big())
    }

    pub fn reduced(&self) -> Frac {
        let g = self.num.gcd(&self.den);
        if g.is_zero() || g == Int::one() {
            return self.clone();
        }
        Frac { num: self.num.div_exact(&g), den: self.den.div_exact(&g) }
    }
}

impl PartialEq for Frac {
    fn eq(&self, other: &Frac) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Frac {}

impl PartialOrd for Frac {
    fn partial_cmp(&self, other: &Frac) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Frac {
    fn cmp(&self, other: &Frac) -> Ordering {
        (&self.num * &other.den).cmp(&(&other.num * &self.den))
    }
}

/// Converts an exact rational to a pair of integers scaled by `scale`.
pub fn rational_times(r: &BigRational, scale: &BigInt) -> Option<BigInt> {
    let v = r * BigRational::from_integer(scale.clone());
    if v.is_integer() {
        Some(v.to_integer())
    } else {
        None
    }
}

/// Prints a rational as `num/den` in lowest terms.
pub fn fmt_rational(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Reduces an integer vector to its primitive representative.
pub fn primitive(x: &Int, y: &Int) -> (Int, Int) {
    let g = x.gcd(y);
    if g.is_zero() || g == Int::one() {
        return (x.clone(), y.clone());
    }
    (x.div_exact(&g), y.div_exact(&g))
}

pub fn big_one() -> BigInt {
    BigInt::one()
}

pub fn big_zero() -> BigInt {
    BigInt::zero()
}
