//! Numeric abstractions shared by every solver.
//!
//! Distances and budgets are always `i64`. Rewards, sizes and probabilities
//! are generic: the deterministic solvers only need [`Reward`] (ordered
//! addition), while anything that divides, such as Lagrangian multipliers or
//! probabilities, needs a [`Field`].

use std::fmt::Debug;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{FromPrimitive, Num, ToPrimitive, Zero};

/// Ordered additive scalar used for rewards and sizes.
pub trait Reward: Num + Clone + PartialOrd + Debug + Send + Sync + 'static {
    fn from_int(v: i64) -> Self;

    fn to_f64(&self) -> f64;

    fn max_of(a: Self, b: Self) -> Self {
        if b > a {
            b
        } else {
            a
        }
    }
}

/// Scalar with real division: floats and rationals.
pub trait Field: Reward {
    /// Largest integer not above `self`.
    fn floor_int(&self) -> i64;

    /// Slack allowed when checking that probabilities sum to one.
    /// Zero for exact types.
    fn tolerance() -> Self;

    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_int(num) / Self::from_int(den)
    }

    /// Nearest representable value; exact types convert the binary float exactly.
    fn from_f64(x: f64) -> Self;
}

macro_rules! impl_int_reward {
    ($($t:ty),*) => {$(
        impl Reward for $t {
            fn from_int(v: i64) -> Self {
                <$t>::from_i64(v).expect("integer out of range")
            }
            fn to_f64(&self) -> f64 {
                *self as f64
            }
        }
    )*};
}

impl_int_reward!(i32, i64, i128);

macro_rules! impl_float {
    ($($t:ty),*) => {$(
        impl Reward for $t {
            fn from_int(v: i64) -> Self {
                v as $t
            }
            fn to_f64(&self) -> f64 {
                *self as f64
            }
        }

        impl Field for $t {
            fn floor_int(&self) -> i64 {
                self.floor() as i64
            }
            fn tolerance() -> Self {
                1e-6
            }
            fn from_f64(x: f64) -> Self {
                x as $t
            }
        }
    )*};
}

impl_float!(f32, f64);

impl<I> Reward for Ratio<I>
where
    I: Integer + Clone + FromPrimitive + ToPrimitive + Debug + Send + Sync + 'static,
{
    fn from_int(v: i64) -> Self {
        Ratio::from_integer(I::from_i64(v).expect("integer out of range"))
    }

    fn to_f64(&self) -> f64 {
        let n = self.numer().to_f64().unwrap_or(f64::NAN);
        let d = self.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    }
}

impl<I> Field for Ratio<I>
where
    I: Integer + Clone + FromPrimitive + ToPrimitive + Debug + Send + Sync + 'static,
{
    fn floor_int(&self) -> i64 {
        self.floor().to_integer().to_i64().expect("floor out of i64 range")
    }

    fn tolerance() -> Self {
        Ratio::zero()
    }

    fn from_f64(x: f64) -> Self {
        let exact = BigRational::from_float(x).expect("finite float");
        let num = I::from_str_radix(&exact.numer().to_string(), 10).ok().expect("numerator in range");
        let den = I::from_str_radix(&exact.denom().to_string(), 10).ok().expect("denominator in range");
        Ratio::new(num, den)
    }
}

/// Parses `"3"`, `"-2/5"` or `"0.125"` into an exact rational.
pub fn parse_rational(text: &str) -> Option<BigRational> {
    let text = text.trim();
    if let Some((n, d)) = text.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    if let Some((int_part, frac)) = text.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let negative = int_part.starts_with('-');
        let int_digits = int_part.trim_start_matches(['-', '+']);
        let digits = format!("{}{}", if int_digits.is_empty() { "0" } else { int_digits }, frac);
        let mut n: BigInt = digits.parse().ok()?;
        if negative {
            n = -n;
        }
        let d = num_traits::pow(BigInt::from(10), frac.len());
        return Some(BigRational::new(n, d));
    }
    text.parse::<BigInt>().ok().map(BigRational::from_integer)
}

/// Canonical text form used by the instance and policy formats.
pub fn format_rational(value: &BigRational) -> String {
    if value.is_integer() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}
