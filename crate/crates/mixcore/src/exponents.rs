//! Hölder exponent triples (p, q, r) with 1/r = 1/p + 1/q.
//!
//! Exponents are plain `f64` with `f64::INFINITY` for ∞ (so 1/∞ = 0 falls out
//! of the arithmetic). Every norm pairing in the crate is governed by one of
//! these triples.

use crate::error::{Error, Result};

const RELATION_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentTriple {
    p: f64,
    q: f64,
    r: f64,
}

fn check_pq(e: f64, name: &'static str) -> Result<()> {
    if e.is_nan() || e <= 1.0 {
        return Err(Error::InvalidExponent(match name {
            "p" => "p must lie in (1, inf]",
            _ => "q must lie in (1, inf]",
        }));
    }
    Ok(())
}

impl ExponentTriple {
    /// Builds the triple from (p, q), deriving r = (1/p + 1/q)^{-1}.
    /// Requires p, q ∈ (1, ∞] and the derived r ∈ [1, ∞).
    pub fn new(p: f64, q: f64) -> Result<Self> {
        check_pq(p, "p")?;
        check_pq(q, "q")?;
        let inv = recip(p) + recip(q);
        if inv <= 0.0 {
            return Err(Error::InvalidExponent("r must be finite: p and q cannot both be inf"));
        }
        if inv > 1.0 + RELATION_TOL {
            return Err(Error::InvalidExponent("1/p + 1/q must not exceed 1 (r >= 1)"));
        }
        Ok(ExponentTriple { p, q, r: 1.0 / inv })
    }

    /// Validates an explicitly supplied (p, q, r) against 1/r = 1/p + 1/q
    /// to 1e−12.
    pub fn with_r(p: f64, q: f64, r: f64) -> Result<Self> {
        let derived = Self::new(p, q)?;
        if r.is_nan() || libm::fabs(recip(r) - recip(derived.r)) > RELATION_TOL {
            return Err(Error::ExponentMismatch { expected_r: derived.r, got_r: r });
        }
        Ok(ExponentTriple { p, q, r })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn r(&self) -> f64 {
        self.r
    }
}

#[inline]
fn recip(e: f64) -> f64 {
    if e.is_infinite() { 0.0 } else { 1.0 / e }
}

/// Hölder conjugate e' with 1/e + 1/e' = 1 (1 ↔ ∞).
pub fn holder_conjugate(e: f64) -> f64 {
    if e.is_infinite() {
        1.0
    } else if e == 1.0 {
        f64::INFINITY
    } else {
        e / (e - 1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derives_r_from_p_and_q() {
        let t = ExponentTriple::new(4.0, 4.0).unwrap();
        assert!((t.r() - 2.0).abs() < 1e-15);
        let t = ExponentTriple::new(f64::INFINITY, 2.0).unwrap();
        assert!((t.r() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(ExponentTriple::new(1.0, 2.0).is_err());
        assert!(ExponentTriple::new(2.0, 1.5).is_err()); // 1/2 + 2/3 > 1
        assert!(ExponentTriple::new(f64::INFINITY, f64::INFINITY).is_err());
    }

    #[test]
    fn with_r_checks_the_relation() {
        assert!(ExponentTriple::with_r(4.0, 4.0, 2.0).is_ok());
        assert!(matches!(
            ExponentTriple::with_r(4.0, 4.0, 2.1),
            Err(Error::ExponentMismatch { .. })
        ));
    }

    #[test]
    fn conjugates() {
        assert_eq!(holder_conjugate(2.0), 2.0);
        assert_eq!(holder_conjugate(1.0), f64::INFINITY);
        assert_eq!(holder_conjugate(f64::INFINITY), 1.0);
        assert!((holder_conjugate(4.0) - 4.0 / 3.0).abs() < 1e-15);
    }
}
