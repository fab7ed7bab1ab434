//! Exact rational probabilities.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

/// Error produced when reading a rational literal.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RationalParseError {
    #[error("empty rational literal")]
    Empty,
    #[error("decimal literal `{0}` is not accepted; write an exact fraction p/q")]
    Decimal(String),
    #[error("malformed rational literal `{0}`")]
    Malformed(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

/// Error produced when a rational lies outside `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{0} is not a probability (must lie in [0, 1])")]
pub struct OutOfRange(pub BigRational);

/// Parses `p/q` or a bare integer into a reduced rational.
///
/// Decimal notation is rejected rather than approximated.
pub fn parse_rational(text: &str) -> Result<BigRational, RationalParseError> {
    let text = text.trim();
    if text.is_empty() {
        return Err(RationalParseError::Empty);
    }
    if text.contains('.') || text.contains('e') || text.contains('E') {
        return Err(RationalParseError::Decimal(text.to_owned()));
    }
    let malformed = || RationalParseError::Malformed(text.to_owned());
    let int = |s: &str| -> Result<BigInt, RationalParseError> {
        let digits = s.strip_prefix(['-', '+']).unwrap_or(s);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(malformed());
        }
        s.parse::<BigInt>().map_err(|_| malformed())
    };
    match text.split_once('/') {
        Some((num, den)) => {
            let num = int(num)?;
            let den = int(den)?;
            if den.is_zero() {
                return Err(RationalParseError::ZeroDenominator(text.to_owned()));
            }
            if den < BigInt::zero() {
                return Err(malformed());
            }
            Ok(BigRational::new(num, den))
        }
        None => Ok(BigRational::from_integer(int(text)?)),
    }
}

/// Formats a rational as `p/q`, or as a bare integer when `q = 1`.
pub fn format_rational(value: &BigRational) -> String {
    if value.denom().is_one() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

/// A probability held as an exact rational in lowest terms, always in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Prob(BigRational);

impl Prob {
    pub fn new(value: BigRational) -> Result<Self, OutOfRange> {
        if value < BigRational::zero() || value > BigRational::one() {
            Err(OutOfRange(value))
        } else {
            Ok(Prob(value))
        }
    }

    /// `num / den`. Panics on a zero denominator.
    pub fn ratio(num: i64, den: i64) -> Result<Self, OutOfRange> {
        Prob::new(BigRational::new(num.into(), den.into()))
    }

    pub fn zero() -> Self {
        Prob(BigRational::zero())
    }

    pub fn one() -> Self {
        Prob(BigRational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn value(&self) -> &BigRational {
        &self.0
    }

    pub fn into_value(self) -> BigRational {
        self.0
    }

    /// `1 - self`.
    pub fn complement(&self) -> Prob {
        Prob(BigRational::one() - &self.0)
    }

    /// Product of two probabilities, which is again a probability.
    pub fn times(&self, other: &Prob) -> Prob {
        Prob(&self.0 * &other.0)
    }

    /// Lossy conversion used only for drawing.
    pub fn to_f64(&self) -> f64 {
        ratio_to_f64(&self.0)
    }
}

pub(crate) fn ratio_to_f64(value: &BigRational) -> f64 {
    // Scale to 2^53 resolution so large numerators and denominators stay finite.
    let scale = BigInt::from(1u64 << 53);
    let scaled = (value * BigRational::from_integer(scale)).round().to_integer();
    let as_f = scaled.to_string().parse::<f64>().unwrap_or(f64::NAN);
    as_f / (1u64 << 53) as f64
}

impl fmt::Display for Prob {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_rational(&self.0))
    }
}

/// Parse failure for a probability literal.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProbParseError {
    #[error(transparent)]
    Syntax(#[from] RationalParseError),
    #[error(transparent)]
    Range(#[from] OutOfRange),
}

impl FromStr for Prob {
    type Err = ProbParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(Prob::new(parse_rational(s)?)?)
    }
}

impl TryFrom<BigRational> for Prob {
    type Error = OutOfRange;

    fn try_from(value: BigRational) -> Result<Self, Self::Error> {
        Prob::new(value)
    }
}

impl From<Prob> for BigRational {
    fn from(p: Prob) -> Self {
        p.0
    }
}

/// Exact sum of probabilities (may exceed one).
pub fn total<'a, I>(probs: I) -> BigRational
where
    I: IntoIterator<Item = &'a Prob>,
{
    probs
        .into_iter()
        .fold(BigRational::zero(), |acc, p| acc + &p.0)
}
