//! Exact nonnegative edge costs.
//!
//! Costs are rationals so that `max` comparisons in power computations are
//! exact. At I/O they are written as decimal strings (`2.5`) and, when the
//! value has no finite decimal expansion, as a fraction (`1/3`).

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, Sub};
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Cost(Ratio<i128>);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid cost literal `{0}`")]
pub struct CostParseError(pub String);

impl Cost {
    pub const ZERO: Cost = Cost(Ratio::new_raw(0, 1));

    pub fn new(numer: i128, denom: i128) -> Cost {
        Cost(Ratio::new(numer, denom))
    }

    pub fn integer(value: i128) -> Cost {
        Cost(Ratio::from_integer(value))
    }

    pub fn numer(&self) -> i128 {
        *self.0.numer()
    }

    pub fn denom(&self) -> i128 {
        *self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        *self.0.numer() < 0
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn ratio(&self) -> Ratio<i128> {
        self.0
    }

    /// Rounds `value` to `places` decimal digits and returns it exactly.
    pub fn from_f64_rounded(value: f64, places: u32) -> Cost {
        let scale = 10i128.pow(places);
        let scaled = (value * scale as f64).round() as i128;
        Cost::new(scaled, scale)
    }
}

impl Zero for Cost {
    fn zero() -> Self {
        Cost::ZERO
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl Add for Cost {
    type Output = Cost;
    fn add(self, rhs: Cost) -> Cost {
        Cost(self.0 + rhs.0)
    }
}

impl AddAssign for Cost {
    fn add_assign(&mut self, rhs: Cost) {
        self.0 += rhs.0;
    }
}

impl Sub for Cost {
    type Output = Cost;
    fn sub(self, rhs: Cost) -> Cost {
        Cost(self.0 - rhs.0)
    }
}

impl Mul<i128> for Cost {
    type Output = Cost;
    fn mul(self, rhs: i128) -> Cost {
        Cost(self.0 * rhs)
    }
}

impl Mul<Ratio<i128>> for Cost {
    type Output = Cost;
    fn mul(self, rhs: Ratio<i128>) -> Cost {
        Cost(self.0 * rhs)
    }
}

impl Div<i128> for Cost {
    type Output = Cost;
    fn div(self, rhs: i128) -> Cost {
        Cost(self.0 / rhs)
    }
}

impl Sum for Cost {
    fn sum<I: Iterator<Item = Cost>>(iter: I) -> Cost {
        iter.fold(Cost::ZERO, |a, b| a + b)
    }
}

impl<'a> Sum<&'a Cost> for Cost {
    fn sum<I: Iterator<Item = &'a Cost>>(iter: I) -> Cost {
        iter.fold(Cost::ZERO, |a, b| a + *b)
    }
}

impl From<i128> for Cost {
    fn from(v: i128) -> Cost {
        Cost::integer(v)
    }
}

impl From<Ratio<i128>> for Cost {
    fn from(v: Ratio<i128>) -> Cost {
        Cost(v)
    }
}

fn strip_twos_and_fives(mut d: i128) -> (i128, u32, u32) {
    let (mut twos, mut fives) = (0, 0);
    while d % 2 == 0 {
        d /= 2;
        twos += 1;
    }
    while d % 5 == 0 {
        d /= 5;
        fives += 1;
    }
    (d, twos, fives)
}

impl fmt::Display for Cost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (n, d) = (*self.0.numer(), *self.0.denom());
        if d == 1 {
            return write!(f, "{n}");
        }
        let (rest, twos, fives) = strip_twos_and_fives(d);
        if rest != 1 {
            return write!(f, "{n}/{d}");
        }
        let places = twos.max(fives);
        let scaled = n * (10i128.pow(places) / d);
        let sign = if scaled < 0 { "-" } else { "" };
        let abs = scaled.abs();
        let pow = 10i128.pow(places);
        let (int, frac) = abs.div_rem(&pow);
        write!(f, "{sign}{int}.{frac:0width$}", width = places as usize)
    }
}

impl fmt::Debug for Cost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Cost {
    type Err = CostParseError;

    fn from_str(s: &str) -> Result<Cost, CostParseError> {
        let err = || CostParseError(s.to_string());
        let s = s.trim();
        if let Some((n, d)) = s.split_once('/') {
            let n: i128 = n.trim().parse().map_err(|_| err())?;
            let d: i128 = d.trim().parse().map_err(|_| err())?;
            if d == 0 {
                return Err(err());
            }
            return Ok(Cost::new(n, d));
        }
        let (neg, body) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s.strip_prefix('+').unwrap_or(s)),
        };
        let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(err());
        }
        let all_digits = |p: &str| p.bytes().all(|b| b.is_ascii_digit());
        if !all_digits(int_part) || !all_digits(frac_part) || frac_part.len() > 30 {
            return Err(err());
        }
        let digits = format!("{int_part}{frac_part}");
        let numer: i128 = if digits.is_empty() { 0 } else { digits.parse().map_err(|_| err())? };
        let denom = 10i128.pow(frac_part.len() as u32);
        let numer = if neg { -numer } else { numer };
        Ok(Cost::new(numer, denom))
    }
}

impl Serialize for Cost {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Cost {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Cost, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_is_stored_exactly() {
        let c: Cost = "2.50".parse().unwrap();
        assert_eq!(c, Cost::new(5, 2));
        assert_eq!(c.to_string(), "2.5");
    }

    #[test]
    fn integers_and_fractions() {
        assert_eq!("7".parse::<Cost>().unwrap(), Cost::integer(7));
        assert_eq!("1/3".parse::<Cost>().unwrap().to_string(), "1/3");
        assert_eq!(".25".parse::<Cost>().unwrap(), Cost::new(1, 4));
        assert_eq!(Cost::new(3, 40).to_string(), "0.075");
        assert!("abc".parse::<Cost>().is_err());
        assert!("1/0".parse::<Cost>().is_err());
        assert!(".".parse::<Cost>().is_err());
    }

    #[test]
    fn rounding_from_float() {
        assert_eq!(Cost::from_f64_rounded(2.0f64.sqrt(), 3), Cost::new(1414, 1000));
    }
}
