//! Exact scalar fields: the rationals and prime fields 𝔽_p.

use std::fmt::{Debug, Display};
use std::hash::Hash;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;

use crate::error::{Error, Result};

pub trait Field: Clone + Debug + Send + Sync + 'static {
    type E: Clone + PartialEq + Eq + Hash + Debug + Display + Send + Sync + 'static;

    fn zero(&self) -> Self::E;
    fn one(&self) -> Self::E;
    fn is_zero(&self, a: &Self::E) -> bool;
    fn add(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn sub(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn mul(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn neg(&self, a: &Self::E) -> Self::E;
    /// Panics on zero.
    fn inv(&self, a: &Self::E) -> Self::E;
    fn from_i64(&self, n: i64) -> Self::E;
    /// `None` when the denominator vanishes in the field.
    fn from_rational(&self, q: &BigRational) -> Option<Self::E>;
    /// The element as a rational number; `None` in positive characteristic.
    fn to_rational(&self, a: &Self::E) -> Option<BigRational>;
    /// 0 for the rationals.
    fn characteristic(&self) -> u64;
    /// Number of elements, `None` if infinite.
    fn order(&self) -> Option<u64>;
    /// The `i`-th element in a fixed enumeration; only meaningful for finite fields.
    fn nth(&self, i: u64) -> Self::E;
    /// A random element drawn from a small range.
    fn random<R: Rng>(&self, rng: &mut R) -> Self::E;
    fn config(&self) -> FieldConfig;

    fn is_one(&self, a: &Self::E) -> bool {
        *a == self.one()
    }

    fn div(&self, a: &Self::E, b: &Self::E) -> Self::E {
        self.mul(a, &self.inv(b))
    }

    fn random_nonzero<R: Rng>(&self, rng: &mut R) -> Self::E {
        loop {
            let x = self.random(rng);
            if !self.is_zero(&x) {
                return x;
            }
        }
    }

    /// All elements when the field is small enough to list.
    fn elements(&self, cap: u64) -> Option<Vec<Self::E>> {
        match self.order() {
            Some(q) if q <= cap => Some((0..q).map(|i| self.nth(i)).collect()),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum FieldConfig {
    Rationals,
    Prime(u64),
}

impl FieldConfig {
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "q" || s == "Q" {
            return Ok(FieldConfig::Rationals);
        }
        if let Some(p) = s.strip_prefix("fp:") {
            let p: u64 = p
                .parse()
                .map_err(|_| Error::Input(format!("bad prime in field spec `{s}`")))?;
            Fp::new(p)?;
            return Ok(FieldConfig::Prime(p));
        }
        Err(Error::Input(format!("unknown field `{s}` (expected q or fp:P)")))
    }
}

impl Display for FieldConfig {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FieldConfig::Rationals => write!(f, "q"),
            FieldConfig::Prime(p) => write!(f, "fp:{p}"),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Rationals;

impl Field for Rationals {
    type E = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        if a.is_zero() || b.is_zero() {
            return BigRational::zero();
        }
        a * b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn inv(&self, a: &BigRational) -> BigRational {
        assert!(!a.is_zero(), "inverse of zero");
        a.recip()
    }
    fn from_i64(&self, n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }
    fn from_rational(&self, q: &BigRational) -> Option<BigRational> {
        Some(q.clone())
    }
    fn to_rational(&self, a: &BigRational) -> Option<BigRational> {
        Some(a.clone())
    }
    fn characteristic(&self) -> u64 {
        0
    }
    fn order(&self) -> Option<u64> {
        None
    }
    fn nth(&self, i: u64) -> BigRational {
        // 0, 1, -1, 2, -2, ...
        let k = i.div_ceil(2) as i64;
        self.from_i64(if i % 2 == 1 { k } else { -k })
    }
    fn random<R: Rng>(&self, rng: &mut R) -> BigRational {
        self.from_i64(rng.gen_range(-4..=4))
    }
    fn config(&self) -> FieldConfig {
        FieldConfig::Rationals
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Fp {
    p: u64,
}

impl Fp {
    pub fn new(p: u64) -> Result<Self> {
        if p < 2 || p >= (1 << 31) || !is_prime(p) {
            return Err(Error::Input(format!("{p} is not a prime below 2^31")));
        }
        Ok(Fp { p })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    fn pow(&self, mut a: u64, mut e: u64) -> u64 {
        let mut r = 1u64;
        a %= self.p;
        while e > 0 {
            if e & 1 == 1 {
                r = r * a % self.p;
            }
            a = a * a % self.p;
            e >>= 1;
        }
        r
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl Field for Fp {
    type E = u64;

    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        (a + b) % self.p
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        (a + self.p - b) % self.p
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        a * b % self.p
    }
    fn neg(&self, a: &u64) -> u64 {
        (self.p - a) % self.p
    }
    fn inv(&self, a: &u64) -> u64 {
        assert!(*a != 0, "inverse of zero");
        self.pow(*a, self.p - 2)
    }
    fn from_i64(&self, n: i64) -> u64 {
        n.rem_euclid(self.p as i64) as u64
    }
    fn from_rational(&self, q: &BigRational) -> Option<u64> {
        let p = BigInt::from(self.p);
        let reduce = |x: &BigInt| -> u64 {
            let r = ((x % &p) + &p) % &p;
            r.to_u64().unwrap()
        };
        let n = reduce(q.numer());
        let d = reduce(q.denom());
        if d == 0 {
            return None;
        }
        Some(self.mul(&n, &self.inv(&d)))
    }
    fn to_rational(&self, _a: &u64) -> Option<BigRational> {
        None
    }
    fn characteristic(&self) -> u64 {
        self.p
    }
    fn order(&self) -> Option<u64> {
        Some(self.p)
    }
    fn nth(&self, i: u64) -> u64 {
        i % self.p
    }
    fn random<R: Rng>(&self, rng: &mut R) -> u64 {
        if self.p <= 64 {
            rng.gen_range(0..self.p)
        } else {
            self.from_i64(rng.gen_range(-4..=4))
        }
    }
    fn config(&self) -> FieldConfig {
        FieldConfig::Prime(self.p)
    }
}

/// Renders a field element for JSON/DSL output.
pub fn format_rational(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else if q.is_negative() {
        format!("-{}/{}", q.numer().abs(), q.denom())
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}
