//! Exact nonnegative rational arithmetic for scale factors.
//!
//! Lattice constructions in the q-case hinge on arithmetic relations
//! between the scales `A_i`, `B_j` (integer-multiple relations, common
//! refinements), which are undecidable from floating point. Scales are
//! therefore carried as reduced fractions with bounded denominators.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{CertError, Result};

/// Denominator cap; keeps lcm computations comfortably inside 128 bits.
pub const MAX_DEN: u64 = 1_000_000_000;

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = b;
        b = a % b;
        a = t;
    }
    a
}

/// A nonnegative rational `num/den` in lowest terms, `den >= 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Rational {
    num: u64,
    den: u64,
}

impl Rational {
    pub fn new(num: u64, den: u64) -> Result<Self> {
        if den == 0 {
            return Err(CertError::Input("rational with zero denominator".into()));
        }
        let g = gcd_u128(num as u128, den as u128) as u64;
        let (num, den) = if g == 0 { (0, 1) } else { (num / g, den / g) };
        if den > MAX_DEN {
            return Err(CertError::Input(format!(
                "denominator {den} exceeds cap {MAX_DEN}"
            )));
        }
        Ok(Rational { num, den })
    }

    pub fn integer(n: u64) -> Self {
        Rational { num: n, den: 1 }
    }

    pub fn num(&self) -> u64 {
        self.num
    }

    pub fn den(&self) -> u64 {
        self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn checked_mul(&self, other: &Rational) -> Result<Rational> {
        let n = self.num as u128 * other.num as u128;
        let d = self.den as u128 * other.den as u128;
        let g = gcd_u128(n, d);
        let (n, d) = (n / g, d / g);
        if n > u64::MAX as u128 || d > MAX_DEN as u128 {
            return Err(CertError::Input("rational overflow in multiplication".into()));
        }
        Rational::new(n as u64, d as u64)
    }

    /// Reconstructs a rational from a float by continued fractions.
    ///
    /// Returns the smallest-denominator fraction within `tol` relative
    /// error, or `None` if no denominator up to `max_den` fits. Used to
    /// recover the mutual rational structure of float scales declared
    /// inside one irrationality class.
    pub fn approx_from_f64(x: f64, max_den: u64, tol: f64) -> Option<Rational> {
        if !(x.is_finite()) || x < 0.0 {
            return None;
        }
        if x == 0.0 {
            return Some(Rational { num: 0, den: 1 });
        }
        // Stern-Brocot style continued fraction expansion.
        let (mut h0, mut h1) = (1u128, x.floor() as u128);
        let (mut k0, mut k1) = (0u128, 1u128);
        let mut frac = x - x.floor();
        for _ in 0..64 {
            let approx = h1 as f64 / k1 as f64;
            if (approx - x).abs() <= tol * x {
                return Rational::new(h1 as u64, k1 as u64).ok();
            }
            if frac == 0.0 {
                break;
            }
            let r = 1.0 / frac;
            let a = r.floor();
            frac = r - a;
            let a = a as u128;
            let h2 = a * h1 + h0;
            let k2 = a * k1 + k0;
            if k2 > max_den as u128 || h2 > u64::MAX as u128 {
                break;
            }
            h0 = h1;
            h1 = h2;
            k0 = k1;
            k1 = k2;
        }
        let approx = h1 as f64 / k1 as f64;
        if k1 <= max_den as u128 && (approx - x).abs() <= tol * x {
            Rational::new(h1 as u64, k1 as u64).ok()
        } else {
            None
        }
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl FromStr for Rational {
    type Err = CertError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s.split_once('/') {
            Some((n, d)) => {
                let num = n
                    .trim()
                    .parse::<u64>()
                    .map_err(|e| CertError::Input(format!("bad numerator {n:?}: {e}")))?;
                let den = d
                    .trim()
                    .parse::<u64>()
                    .map_err(|e| CertError::Input(format!("bad denominator {d:?}: {e}")))?;
                Rational::new(num, den)
            }
            None => {
                let num = s
                    .parse::<u64>()
                    .map_err(|e| CertError::Input(format!("bad rational {s:?}: {e}")))?;
                Ok(Rational::integer(num))
            }
        }
    }
}

impl TryFrom<String> for Rational {
    type Error = CertError;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Rational> for String {
    fn from(r: Rational) -> String {
        r.to_string()
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        let lhs = self.num as u128 * other.den as u128;
        let rhs = other.num as u128 * self.den as u128;
        lhs.cmp(&rhs)
    }
}

/// Largest rational `g` such that every list entry is an integer multiple
/// of `g`; equals `gcd(nums * L) / L` with `L` the lcm of denominators.
pub fn rational_gcd(list: &[Rational]) -> Result<Rational> {
    if list.is_empty() {
        return Err(CertError::Input("rational_gcd of empty list".into()));
    }
    if list.iter().any(|r| r.is_zero()) {
        return Err(CertError::Input("rational_gcd requires positive entries".into()));
    }
    let mut lcm: u128 = 1;
    for r in list {
        let g = gcd_u128(lcm, r.den as u128);
        lcm = lcm / g * r.den as u128;
        if lcm > MAX_DEN as u128 {
            return Err(CertError::Input("denominator lcm exceeds cap".into()));
        }
    }
    let mut g: u128 = 0;
    for r in list {
        let scaled = r.num as u128 * (lcm / r.den as u128);
        g = gcd_u128(g, scaled);
    }
    Rational::new(g as u64, lcm as u64)
}

/// Returns `n` when `x = n * y` for an integer `n >= 1`, else `None`.
pub fn integer_multiple_of(x: &Rational, y: &Rational) -> Option<u64> {
    if x.is_zero() || y.is_zero() {
        return None;
    }
    // x / y = (x.num * y.den) / (x.den * y.num)
    let num = x.num as u128 * y.den as u128;
    let den = x.den as u128 * y.num as u128;
    if num % den == 0 {
        let n = num / den;
        if n >= 1 && n <= u64::MAX as u128 {
            return Some(n as u64);
        }
    }
    None
}
