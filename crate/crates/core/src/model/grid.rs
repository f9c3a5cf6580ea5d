use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{Error, Result};

/// Exact rational used for every scale, distance and derived quantity.
pub type Rat = Ratio<i128>;

/// Largest supported grid denominator; keeps squared sums well inside i128.
pub const MAX_Q: i64 = 1 << 16;

pub fn rat(n: i128, d: i128) -> Rat {
    Rat::new(n, d)
}

pub fn rat_int(n: i128) -> Rat {
    Rat::from_integer(n)
}

/// Formats a rational as `p/q` (always with the slash, reduced).
pub fn fmt_rat(r: &Rat) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `p/q`, `p` or a plain JSON-style integer string.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let bad = || Error::InvalidParameter(format!("cannot parse rational `{s}`"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p: i128 = p.trim().parse().map_err(|_| bad())?;
            let q: i128 = q.trim().parse().map_err(|_| bad())?;
            if q == 0 {
                return Err(bad());
            }
            Ok(Rat::new(p, q))
        }
        None => Ok(Rat::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

pub fn rat_to_f64(r: &Rat) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Alphabet {
    /// Values `1..=m`, denominator 1.
    Integer { m: i64 },
    /// Values `k/q` for `-q <= k <= q`.
    RealGrid,
}

/// A finite value alphabet; every stored value is an integer numerator over `q`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ValueGrid {
    q: i64,
    alphabet: Alphabet,
}

impl ValueGrid {
    pub fn integer(m: i64) -> Result<Self> {
        if !(2..=MAX_Q).contains(&m) {
            return Err(Error::InvalidParameter(format!(
                "integer alphabet needs 2 <= M <= {MAX_Q}, got {m}"
            )));
        }
        Ok(Self {
            q: 1,
            alphabet: Alphabet::Integer { m },
        })
    }

    pub fn real(q: i64) -> Result<Self> {
        if !(1..=MAX_Q).contains(&q) {
            return Err(Error::InvalidParameter(format!(
                "grid denominator must be in 1..={MAX_Q}, got {q}"
            )));
        }
        Ok(Self {
            q,
            alphabet: Alphabet::RealGrid,
        })
    }

    pub fn q(&self) -> i64 {
        self.q
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn is_integer(&self) -> bool {
        matches!(self.alphabet, Alphabet::Integer { .. })
    }

    /// Alphabet size M for integer grids.
    pub fn m(&self) -> Option<i64> {
        match self.alphabet {
            Alphabet::Integer { m } => Some(m),
            Alphabet::RealGrid => None,
        }
    }

    pub fn min_num(&self) -> i64 {
        match self.alphabet {
            Alphabet::Integer { .. } => 1,
            Alphabet::RealGrid => -self.q,
        }
    }

    pub fn max_num(&self) -> i64 {
        match self.alphabet {
            Alphabet::Integer { m } => m,
            Alphabet::RealGrid => self.q,
        }
    }

    pub fn size(&self) -> usize {
        (self.max_num() - self.min_num() + 1) as usize
    }

    /// Position of a numerator within the alphabet (0-based).
    pub fn index_of(&self, num: i64) -> usize {
        (num - self.min_num()) as usize
    }

    pub fn contains(&self, num: i64) -> bool {
        (self.min_num()..=self.max_num()).contains(&num)
    }

    pub fn values(&self) -> impl Iterator<Item = i64> {
        self.min_num()..=self.max_num()
    }

    pub fn to_rat(&self, num: i64) -> Rat {
        Rat::new(num as i128, self.q as i128)
    }

    /// Numerator of `r` over `q`, without a range check.
    pub fn scale(&self, r: &Rat) -> Result<i64> {
        let scaled = r * Rat::from_integer(self.q as i128);
        if !scaled.is_integer() {
            return Err(Error::NotRepresentable {
                value: fmt_rat(r),
                denominator: self.q,
            });
        }
        i64::try_from(scaled.to_integer()).map_err(|_| Error::NotRepresentable {
            value: fmt_rat(r),
            denominator: self.q,
        })
    }

    /// Numerator of a value that must lie on the grid.
    pub fn from_rat(&self, r: &Rat) -> Result<i64> {
        let num = self.scale(r)?;
        if !self.contains(num) {
            return Err(Error::OffGrid {
                value: fmt_rat(r),
                grid: self.to_string(),
            });
        }
        Ok(num)
    }

    /// Real grid with denominator `q * k`; numerators scale by `k`.
    pub fn refine(&self, k: i64) -> Result<Self> {
        match self.alphabet {
            Alphabet::Integer { .. } => Err(Error::InvalidParameter(
                "integer alphabets cannot be refined".into(),
            )),
            Alphabet::RealGrid => ValueGrid::real(self.q * k),
        }
    }

    /// Smallest real grid on which `r` is representable, as a multiple of this one.
    pub fn refinement_for(&self, r: &Rat) -> i64 {
        let d = *r.denom() as i64;
        let g = d.gcd(&self.q);
        d / g
    }
}

impl fmt::Display for ValueGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.alphabet {
            Alphabet::Integer { m } => write!(f, "[1..{m}]"),
            Alphabet::RealGrid => write!(f, "{{k/{q} : |k| <= {q}}}", q = self.q),
        }
    }
}

pub(crate) fn require_positive(name: &str, r: &Rat) -> Result<()> {
    if r.is_zero() || r.is_negative() {
        return Err(Error::InvalidParameter(format!(
            "{name} must be positive, got {}",
            fmt_rat(r)
        )));
    }
    Ok(())
}
