//! Constant profiles.
//!
//! `Strict` carries the constants of the asymptotic argument; `Desk` relaxes
//! them to values reachable with enumerable block measures.

use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    Strict,
    #[default]
    Desk,
}

fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

impl Profile {
    /// Relative half-width of the continuant window for the block measure.
    pub fn nu_window(self) -> BigRational {
        match self {
            Profile::Strict => ratio(1, 10_000),
            Profile::Desk => ratio(1, 4),
        }
    }

    /// Target atom exponent for the block measure.
    pub fn nu_beta(self) -> BigRational {
        match self {
            Profile::Strict => ratio(198, 100),
            Profile::Desk => ratio(3, 2),
        }
    }

    /// Exponent required of `ln mass / ln q` on products.
    pub fn qnu_beta(self) -> BigRational {
        match self {
            Profile::Strict => ratio(196, 100),
            Profile::Desk => ratio(148, 100),
        }
    }

    /// `c` in the gap condition `i_{n+2} - i_{n+1} >= (c / sigma) log max phi`.
    pub fn gap_constant(self) -> BigRational {
        match self {
            Profile::Strict => ratio(100, 1),
            Profile::Desk => ratio(10, 1),
        }
    }

    /// Relative window for `log q` of typical prefixes.
    pub fn scale_window(self) -> BigRational {
        match self {
            Profile::Strict => ratio(1, 100),
            Profile::Desk => ratio(1, 4),
        }
    }

    /// Mass exponent for typical prefixes.
    pub fn scale_beta(self) -> BigRational {
        self.qnu_beta()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Profile::Strict => "strict",
            Profile::Desk => "desk",
        }
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Profile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "strict" => Ok(Profile::Strict),
            "desk" => Ok(Profile::Desk),
            other => Err(Error::Parse(format!("unknown profile {other:?}"))),
        }
    }
}

/// Float view of an exact constant.
pub fn to_f64(x: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap_or(f64::NAN)
}
