//! Exact finite sums `Σ c·2^e` with integer coefficients and real exponents.
//!
//! Gap bounds for the shrinking-hole family are differences of powers of two
//! spanning hundreds of binary orders of magnitude (`2^-24 - 2^-72 + 2^-256`), which f64 cannot
//! hold. Exponents are kept symbolically; only comparisons ever look at
//! magnitudes, and they do so relative to the leading term.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PowerSum {
    /// Nonzero odd coefficients, exponents strictly decreasing.
    terms: Vec<(i64, f64)>,
}

impl PowerSum {
    pub fn zero() -> Self {
        PowerSum { terms: vec![] }
    }

    /// `c·2^e`.
    pub fn term(c: i64, e: f64) -> Self {
        Self::from_terms(vec![(c, e)])
    }

    pub fn pow2(e: f64) -> Self {
        Self::term(1, e)
    }

    pub fn int(c: i64) -> Self {
        Self::term(c, 0.0)
    }

    pub fn from_terms(raw: Vec<(i64, f64)>) -> Self {
        let mut terms: Vec<(i64, f64)> = raw.into_iter().filter(|t| t.0 != 0).collect();
        loop {
            for t in terms.iter_mut() {
                while t.0 % 2 == 0 {
                    t.0 /= 2;
                    t.1 += 1.0;
                }
            }
            terms.sort_by(|a, b| b.1.total_cmp(&a.1));
            let mut merged: Vec<(i64, f64)> = Vec::with_capacity(terms.len());
            let mut changed = false;
            for t in terms {
                match merged.last_mut() {
                    Some(last) if last.1 == t.1 => {
                        last.0 += t.0;
                        changed = true;
                    }
                    _ => merged.push(t),
                }
            }
            merged.retain(|t| t.0 != 0);
            terms = merged;
            if !changed {
                return PowerSum { terms };
            }
        }
    }

    pub fn terms(&self) -> &[(i64, f64)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Multiplies by `2^a`.
    pub fn scale_pow2(&self, a: f64) -> Self {
        PowerSum {
            terms: self.terms.iter().map(|&(c, e)| (c, e + a)).collect(),
        }
    }

    pub fn sign(&self) -> Result<Ordering> {
        let Some(&(c0, e0)) = self.terms.first() else {
            return Ok(Ordering::Equal);
        };
        let rest: f64 = self.terms[1..]
            .iter()
            .map(|&(c, e)| c.unsigned_abs() as f64 * (e - e0).exp2())
            .sum();
        if c0.unsigned_abs() as f64 > rest * (1.0 + 1e-12) {
            return Ok(c0.cmp(&0));
        }
        let s: f64 = self
            .terms
            .iter()
            .rev()
            .map(|&(c, e)| c as f64 * (e - e0).exp2())
            .sum();
        if s.abs() > 1e-9 * (c0.unsigned_abs() as f64 + rest) {
            Ok(s.partial_cmp(&0.0).unwrap())
        } else {
            Err(Error::Undecidable)
        }
    }

    pub fn compare(&self, other: &PowerSum) -> Result<Ordering> {
        (self.clone() - other.clone()).sign()
    }

    pub fn le(&self, other: &PowerSum) -> Result<bool> {
        Ok(self.compare(other)? != Ordering::Greater)
    }

    pub fn abs(&self) -> Result<Self> {
        Ok(if self.sign()? == Ordering::Less {
            -self.clone()
        } else {
            self.clone()
        })
    }

    pub fn min(&self, other: &PowerSum) -> Result<Self> {
        Ok(if self.le(other)? {
            self.clone()
        } else {
            other.clone()
        })
    }

    pub fn max(&self, other: &PowerSum) -> Result<Self> {
        Ok(if self.le(other)? {
            other.clone()
        } else {
            self.clone()
        })
    }

    /// Nearest f64, summed from the smallest term up. May underflow to zero.
    pub fn to_f64(&self) -> f64 {
        self.terms
            .iter()
            .rev()
            .map(|&(c, e)| c as f64 * e.exp2())
            .sum()
    }
}

impl Add for PowerSum {
    type Output = PowerSum;
    fn add(self, rhs: PowerSum) -> PowerSum {
        let mut t = self.terms;
        t.extend(rhs.terms);
        PowerSum::from_terms(t)
    }
}

impl Neg for PowerSum {
    type Output = PowerSum;
    fn neg(self) -> PowerSum {
        PowerSum {
            terms: self.terms.into_iter().map(|(c, e)| (-c, e)).collect(),
        }
    }
}

impl Sub for PowerSum {
    type Output = PowerSum;
    fn sub(self, rhs: PowerSum) -> PowerSum {
        self + (-rhs)
    }
}

impl fmt::Display for PowerSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, &(c, e)) in self.terms.iter().enumerate() {
            let sign = if c < 0 {
                "-"
            } else if i > 0 {
                "+"
            } else {
                ""
            };
            if i > 0 {
                write!(f, " ")?;
            }
            let m = c.unsigned_abs();
            if m == 1 {
                write!(f, "{sign}2^{e}")?;
            } else {
                write!(f, "{sign}{m}*2^{e}")?;
            }
        }
        Ok(())
    }
}
