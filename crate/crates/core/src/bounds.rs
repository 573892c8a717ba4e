//! Exact bound arithmetic.
//!
//! Small bounds are plain [`BigUint`]s. The run-length and domain bounds have
//! exponents far beyond what can be written out, so they are kept in the form
//! `coeff * base^exp` and only expanded when the result stays below a size cap.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

/// Largest number of bits [`PowerBound::value`] will materialize.
pub const MATERIALIZE_BITS: u64 = 1 << 24;

/// The number `coeff * base^exp`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PowerBound {
    pub coeff: BigUint,
    pub base: BigUint,
    pub exp: BigUint,
}

impl PowerBound {
    pub fn new(coeff: impl Into<BigUint>, base: impl Into<BigUint>, exp: impl Into<BigUint>) -> Self {
        PowerBound {
            coeff: coeff.into(),
            base: base.into(),
            exp: exp.into(),
        }
    }

    fn degenerate(&self) -> Option<BigUint> {
        if self.coeff.is_zero() || (self.base.is_zero() && !self.exp.is_zero()) {
            Some(BigUint::zero())
        } else if self.exp.is_zero() || self.base.is_one() {
            Some(self.coeff.clone())
        } else {
            None
        }
    }

    /// Upper estimate of the bit length of the value.
    pub fn bits_upper(&self) -> Option<u64> {
        if self.degenerate().is_some() {
            return Some(self.coeff.bits());
        }
        let exp = self.exp.to_u64()?;
        exp.checked_mul(self.base.bits())?
            .checked_add(self.coeff.bits())
    }

    /// Lower estimate of `log2` of the value, saturating.
    fn log2_lower(&self) -> BigUint {
        if self.degenerate().is_some() {
            return BigUint::zero();
        }
        &self.exp * BigUint::from(self.base.bits() - 1)
    }

    /// The exact value, unless it would exceed `MATERIALIZE_BITS` bits.
    pub fn value(&self) -> Option<BigUint> {
        if let Some(v) = self.degenerate() {
            return Some(v);
        }
        let bits = self.bits_upper()?;
        if bits > MATERIALIZE_BITS {
            return None;
        }
        let exp = self.exp.to_u32()?;
        Some(&self.coeff * num_traits::pow(self.base.clone(), exp as usize))
    }

    /// Exact comparison of `v` against the bound.
    pub fn cmp_value(&self, v: &BigUint) -> Ordering {
        if let Some(own) = self.degenerate() {
            return own.cmp(v);
        }
        if BigUint::from(v.bits()) <= self.log2_lower() {
            // v < 2^bits(v) <= base^exp <= self
            return Ordering::Greater;
        }
        let own = self
            .value()
            .or_else(|| {
                let exp = self.exp.to_u32()?;
                Some(&self.coeff * num_traits::pow(self.base.clone(), exp as usize))
            })
            .expect("a bound comparable to a materialized value is materializable");
        own.cmp(v)
    }

    /// `v <= self`.
    pub fn admits(&self, v: &BigUint) -> bool {
        self.cmp_value(v) != Ordering::Less
    }

    pub fn admits_u64(&self, v: u64) -> bool {
        self.admits(&BigUint::from(v))
    }
}

impl fmt::Display for PowerBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(v) = self.value().filter(|v| v.bits() <= 64) {
            return write!(f, "{v}");
        }
        if self.coeff.is_one() {
            write!(f, "{}^{}", self.base, self.exp)
        } else {
            write!(f, "{}*{}^{}", self.coeff, self.base, self.exp)
        }
    }
}

fn big(v: u64) -> BigUint {
    BigUint::from(v)
}

fn d_pow(d: u64, e: u64) -> BigUint {
    num_traits::pow(big(d), e as usize)
}

/// `(q^(d+1) a (1+2a)^d + m)^d`.
pub fn kirchhoff_bound(q: u64, d: u32, a: u64, m: u64) -> BigUint {
    let d = d as usize;
    let inner = num_traits::pow(big(q), d + 1) * big(a) * num_traits::pow(big(1 + 2 * a), d) + big(m);
    num_traits::pow(inner, d)
}

/// `(q (1+2a))^(d(d+1))`.
pub fn zero_kirchhoff_bound(q: u64, d: u32, a: u64) -> BigUint {
    let d = d as usize;
    num_traits::pow(big(q) * big(1 + 2 * a), d * (d + 1))
}

/// `x^(d^d)`.
pub fn pump_state_bound(x: u64, d: u32) -> BigUint {
    let e = d_pow(d as u64, d as u64);
    num_traits::pow(big(x), e.to_usize().expect("d^d fits in usize at supported dimensions"))
}

/// `(1+2a)(1+p+delta)`.
pub fn revbound_x(a: u64, p_norm: u64, delta_norm: u64) -> BigUint {
    big(1 + 2 * a) * (big(1) + big(p_norm) + big(delta_norm))
}

/// `(1+2a)(1+2 max)`.
pub fn corollary_x(a: u64, max_norm: u64) -> BigUint {
    big(1 + 2 * a) * (big(1) + big(2) * big(max_norm))
}

/// `17 d^2 x^(15 d^(d+2))`.
pub fn run_length_bound(d: u64, x: &BigUint) -> PowerBound {
    PowerBound::new(big(17 * d * d), x.clone(), big(15) * d_pow(d, d + 2))
}

/// `3 d x^(7 d^(d+2))`.
pub fn u_cycle_bound(d: u64, x: &BigUint) -> PowerBound {
    PowerBound::new(big(3 * d), x.clone(), big(7) * d_pow(d, d + 2))
}

/// `2 x^(7 d^(d+2))`.
pub fn alpha_tilde_bound(d: u64, x: &BigUint) -> PowerBound {
    PowerBound::new(big(2), x.clone(), big(7) * d_pow(d, d + 2))
}

/// `(102 d^2 a^2)^((15 d^(d+2))^(d+2))`, and 0 when `a = 0`.
pub fn domain_bound(d: u64, a: u64) -> PowerBound {
    let e = big(15) * d_pow(d, d + 2);
    let exp = num_traits::pow(e, (d + 2) as usize);
    PowerBound::new(big(1), big(102 * d * d) * big(a) * big(a), exp)
}

/// The run-length bounds for a reversible word `alpha` on `p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundReport {
    pub d: u64,
    pub a: u64,
    pub p_norm: u64,
    pub delta_norm: u64,
    /// `(1+2a)(1+p+delta)`.
    pub x: BigUint,
    pub main: PowerBound,
    pub u_cycle: PowerBound,
    pub alpha_tilde: PowerBound,
    /// `(1+2a)(1+2p)`, reading `p_norm` as the larger endpoint norm.
    pub corollary_x: BigUint,
    pub corollary: PowerBound,
}

pub fn bound_report(d: u64, a: u64, p_norm: u64, delta_norm: u64) -> BoundReport {
    assert!(d >= 1, "dimension must be positive");
    let x = revbound_x(a, p_norm, delta_norm);
    let cx = corollary_x(a, p_norm);
    BoundReport {
        d,
        a,
        p_norm,
        delta_norm,
        main: run_length_bound(d, &x),
        u_cycle: u_cycle_bound(d, &x),
        alpha_tilde: alpha_tilde_bound(d, &x),
        corollary: run_length_bound(d, &cx),
        corollary_x: cx,
        x,
    }
}
