//! Exact rationals, primitive homogeneous coordinates and Farey mediants.
//!
//! Every vertex of every triangulation in this crate is a rational point of
//! the unit cube. It is stored as the primitive integer vector
//! `(x_1 * den, ..., x_d * den, den)`, where `den` is the least common
//! denominator of the coordinates. Mediants, determinants and hat heights are
//! all read directly off this representation.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Exact rational number, always kept in lowest terms with a positive
/// denominator.
pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NumericError {
    #[error("coordinate {value} at position {index} lies outside [0,1]")]
    OutOfRange { index: usize, value: String },
    #[error("Farey mediant of a point with itself is undefined")]
    DegenerateEdge,
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("denominator must be positive")]
    NonPositiveDenominator,
    #[error("malformed rational {0:?}: expected an integer or a fraction p/q")]
    Malformed(String),
}

pub fn rational_in_unit_interval(r: &Rational) -> bool {
    !r.is_negative() && *r <= Rational::one()
}

/// Parses `p/q` or `p` into an exact rational. Decimal notation is rejected.
pub fn parse_rational(text: &str) -> Result<Rational, NumericError> {
    let text = text.trim();
    let bad = || NumericError::Malformed(text.to_string());
    let int = |s: &str| -> Result<BigInt, NumericError> {
        let s = s.trim();
        if s.is_empty() || !s.trim_start_matches(['-', '+']).chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        s.parse::<BigInt>().map_err(|_| bad())
    };
    match text.split_once('/') {
        Some((n, d)) => {
            let d = int(d)?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(int(n)?, d))
        }
        None => Ok(Rational::from_integer(int(text)?)),
    }
}

/// Parses a comma-separated list of exact fractions, e.g. `3/4,1/2`.
pub fn parse_point(text: &str) -> Result<Vec<Rational>, NumericError> {
    text.split(',').map(parse_rational).collect()
}

pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// A rational point of `[0,1]^d` in primitive homogeneous integer form.
///
/// Field order matters: the derived `Ord` compares `den` first and then the
/// coordinate vector lexicographically, which is the canonical point order
/// used for every deterministic choice in the crate.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HomogeneousPoint {
    den: BigInt,
    coords: Vec<BigInt>,
}

impl HomogeneousPoint {
    /// Builds a point from integer numerators and a common denominator,
    /// reducing to primitive form.
    pub fn new(coords: Vec<BigInt>, den: BigInt) -> Result<Self, NumericError> {
        if !den.is_positive() {
            return Err(NumericError::NonPositiveDenominator);
        }
        for (index, c) in coords.iter().enumerate() {
            if c.is_negative() || *c > den {
                return Err(NumericError::OutOfRange {
                    index,
                    value: format_rational(&Rational::new(c.clone(), den.clone())),
                });
            }
        }
        Ok(Self::primitive(coords, den))
    }

    fn primitive(mut coords: Vec<BigInt>, mut den: BigInt) -> Self {
        let g = coords.iter().fold(den.clone(), |g, c| g.gcd(c));
        if !g.is_one() {
            for c in &mut coords {
                *c /= &g;
            }
            den /= &g;
        }
        HomogeneousPoint { den, coords }
    }

    /// The lattice corner with the given 0/1 coordinates.
    pub fn corner(bits: &[bool]) -> Self {
        HomogeneousPoint {
            den: BigInt::one(),
            coords: bits.iter().map(|&b| if b { BigInt::one() } else { BigInt::zero() }).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn den(&self) -> &BigInt {
        &self.den
    }

    pub fn coords(&self) -> &[BigInt] {
        &self.coords
    }

    /// The affine point this vector represents.
    pub fn to_rationals(&self) -> Vec<Rational> {
        self.coords
            .iter()
            .map(|c| Rational::new(c.clone(), self.den.clone()))
            .collect()
    }

    /// Homogeneous row `(coords..., den)`.
    pub fn homogeneous_row(&self) -> Vec<BigInt> {
        let mut row = self.coords.clone();
        row.push(self.den.clone());
        row
    }

    pub fn is_lattice_point(&self) -> bool {
        self.den.is_one()
    }
}

impl fmt::Display for HomogeneousPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, x) in self.to_rationals().iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            f.write_str(&format_rational(x))?;
        }
        f.write_str(")")
    }
}

/// Converts an affine rational point of the cube into its primitive
/// homogeneous correspondent.
pub fn to_homogeneous(p: &[Rational]) -> Result<HomogeneousPoint, NumericError> {
    for (index, x) in p.iter().enumerate() {
        if !rational_in_unit_interval(x) {
            return Err(NumericError::OutOfRange { index, value: format_rational(x) });
        }
    }
    let den = p.iter().fold(BigInt::one(), |l, x| l.lcm(x.denom()));
    let coords = p.iter().map(|x| x.numer() * (&den / x.denom())).collect();
    Ok(HomogeneousPoint::primitive(coords, den))
}

/// Componentwise sum of homogeneous vectors, reduced to primitive form.
pub fn farey_mediant(
    v: &HomogeneousPoint,
    w: &HomogeneousPoint,
) -> Result<HomogeneousPoint, NumericError> {
    if v.dim() != w.dim() {
        return Err(NumericError::DimensionMismatch(v.dim(), w.dim()));
    }
    if v == w {
        return Err(NumericError::DegenerateEdge);
    }
    let coords = v.coords.iter().zip(&w.coords).map(|(a, b)| a + b).collect();
    Ok(HomogeneousPoint::primitive(coords, &v.den + &w.den))
}

#[derive(Serialize, Deserialize)]
struct PointJson {
    num: Vec<String>,
    den: String,
}

impl Serialize for HomogeneousPoint {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        PointJson {
            num: self.coords.iter().map(ToString::to_string).collect(),
            den: self.den.to_string(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for HomogeneousPoint {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = PointJson::deserialize(deserializer)?;
        let parse = |s: &str| s.parse::<BigInt>().map_err(D::Error::custom);
        let coords = raw.num.iter().map(|s| parse(s)).collect::<Result<Vec<_>, _>>()?;
        let den = parse(&raw.den)?;
        let point = HomogeneousPoint::new(coords.clone(), den.clone()).map_err(D::Error::custom)?;
        if point.den != den {
            return Err(D::Error::custom("point is not in primitive form"));
        }
        Ok(point)
    }
}
