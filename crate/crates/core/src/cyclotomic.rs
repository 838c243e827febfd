//! Exact arithmetic in cyclotomic fields Q(ζ_N).
//!
//! An element is a rational coefficient vector of length φ(N) in the power
//! basis 1, ζ, …, ζ^{φ(N)-1}, always reduced modulo the N-th cyclotomic
//! polynomial. The reduced form is unique, so equality and zero tests are
//! exact. Elements of different levels are compared and combined by lifting
//! both to the least common multiple.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use num::integer::Integer;
use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::linalg::{self, Field};

/// Integer coefficients of Φ_n, lowest degree first.
pub fn cyclotomic_polynomial(n: u32) -> Arc<Vec<i64>> {
    static CACHE: OnceLock<RwLock<HashMap<u32, Arc<Vec<i64>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(p) = cache.read().unwrap().get(&n) {
        return p.clone();
    }
    assert!(n >= 1, "cyclotomic level must be positive");
    // x^n - 1 divided by Φ_d for every proper divisor d.
    let mut num = vec![0i64; n as usize + 1];
    num[0] = -1;
    num[n as usize] = 1;
    for d in 1..n {
        if n.is_multiple_of(d) {
            num = exact_monic_division(&num, &cyclotomic_polynomial(d));
        }
    }
    let p = Arc::new(num);
    cache.write().unwrap().insert(n, p.clone());
    p
}

fn exact_monic_division(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let nd = num.len() - 1;
    let mut quot = vec![0i64; nd - dd + 1];
    for k in (0..=nd - dd).rev() {
        let c = rem[k + dd];
        quot[k] = c;
        for (j, &dj) in den.iter().enumerate() {
            rem[k + j] -= c * dj;
        }
    }
    debug_assert!(rem.iter().all(|&r| r == 0));
    quot
}

pub fn euler_phi(n: u32) -> usize {
    cyclotomic_polynomial(n).len() - 1
}

fn lcm(a: u32, b: u32) -> u32 {
    a.lcm(&b)
}

/// An exact element of Q(ζ_level).
#[derive(Clone, Debug)]
pub struct CyclotomicNumber {
    level: u32,
    coeffs: Vec<BigRational>,
}

impl CyclotomicNumber {
    pub fn zero(level: u32) -> Self {
        CyclotomicNumber {
            level,
            coeffs: vec![BigRational::zero(); euler_phi(level)],
        }
    }

    pub fn from_rational(level: u32, q: BigRational) -> Self {
        let mut z = Self::zero(level);
        z.coeffs[0] = q;
        z
    }

    pub fn from_int(level: u32, v: i64) -> Self {
        Self::from_rational(level, BigRational::from_integer(v.into()))
    }

    pub fn one(level: u32) -> Self {
        Self::from_int(level, 1)
    }

    /// ζ_level^k for any integer k.
    pub fn zeta_pow(level: u32, k: i64) -> Self {
        let e = k.rem_euclid(level as i64) as usize;
        let mut raw = vec![BigRational::zero(); e + 1];
        raw[e] = BigRational::one();
        Self::from_raw(level, raw)
    }

    /// Builds from an unreduced coefficient vector (any length).
    pub fn from_raw(level: u32, mut raw: Vec<BigRational>) -> Self {
        let phi = cyclotomic_polynomial(level);
        let deg = phi.len() - 1;
        if raw.len() > deg {
            for k in (deg..raw.len()).rev() {
                if raw[k].is_zero() {
                    continue;
                }
                let c = std::mem::take(&mut raw[k]);
                for (j, &pj) in phi.iter().enumerate().take(deg) {
                    if pj != 0 {
                        raw[k - deg + j] -= &c * BigInt::from(pj);
                    }
                }
            }
            raw.truncate(deg);
        }
        raw.resize(deg, BigRational::zero());
        CyclotomicNumber { level, coeffs: raw }
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// The same number viewed in Q(ζ_m); requires level | m.
    pub fn lift(&self, m: u32) -> Self {
        if m == self.level {
            return self.clone();
        }
        assert!(
            m.is_multiple_of(self.level),
            "cannot lift level {} to {}",
            self.level,
            m
        );
        let step = (m / self.level) as usize;
        let mut raw = vec![BigRational::zero(); (self.coeffs.len().max(1) - 1) * step + 1];
        for (j, c) in self.coeffs.iter().enumerate() {
            raw[j * step] = c.clone();
        }
        Self::from_raw(m, raw)
    }

    fn aligned(&self, other: &Self) -> (Self, Self) {
        if self.level == other.level {
            (self.clone(), other.clone())
        } else {
            let m = lcm(self.level, other.level);
            (self.lift(m), other.lift(m))
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.level != other.level {
            let (a, b) = self.aligned(other);
            return a.add(&b);
        }
        CyclotomicNumber {
            level: self.level,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        CyclotomicNumber {
            level: self.level,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.level != other.level {
            let (a, b) = self.aligned(other);
            return a.mul(&b);
        }
        let d = self.coeffs.len();
        let mut raw = vec![BigRational::zero(); 2 * d - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    raw[i + j] += a * b;
                }
            }
        }
        Self::from_raw(self.level, raw)
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        CyclotomicNumber {
            level: self.level,
            coeffs: self.coeffs.iter().map(|c| c * q).collect(),
        }
    }

    /// Complex conjugation, ζ ↦ ζ^{-1}.
    pub fn conj(&self) -> Self {
        let n = self.level as usize;
        let mut raw = vec![BigRational::zero(); n];
        for (j, c) in self.coeffs.iter().enumerate() {
            raw[(n - j) % n] += c;
        }
        Self::from_raw(self.level, raw)
    }

    /// Multiplicative inverse, `None` for zero.
    pub fn inverse(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let d = self.coeffs.len();
        // Column j of the multiplication matrix is self·ζ^j.
        let cols: Vec<Self> = (0..d)
            .map(|j| self.mul(&Self::zeta_pow(self.level, j as i64)))
            .collect();
        let m: Vec<Vec<BigRational>> = (0..d)
            .map(|i| cols.iter().map(|c| c.coeffs[i].clone()).collect())
            .collect();
        let mut e0 = vec![BigRational::zero(); d];
        e0[0] = BigRational::one();
        let x = linalg::solve(&m, &e0)?;
        Some(CyclotomicNumber {
            level: self.level,
            coeffs: x,
        })
    }

    /// The rational value when the number lies in Q.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.coeffs.iter().skip(1).all(Zero::is_zero) {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    pub fn as_integer(&self) -> Option<BigInt> {
        self.as_rational()
            .filter(|q| q.is_integer())
            .map(|q| q.to_integer())
    }

    pub fn is_real(&self) -> bool {
        *self == self.conj()
    }

    /// Floating-point shadow (re, im).
    pub fn to_complex(&self) -> (f64, f64) {
        let n = self.level as f64;
        self.coeffs
            .iter()
            .enumerate()
            .fold((0.0, 0.0), |(re, im), (j, c)| {
                let v = linalg::rational_to_f64(c);
                let th = 2.0 * std::f64::consts::PI * j as f64 / n;
                (re + v * th.cos(), im + v * th.sin())
            })
    }

    /// Exact sign of a real number: rational values are decided exactly,
    /// irrational real values through the floating-point shadow (they cannot
    /// be zero, so only the sign is read).
    pub fn real_sign(&self) -> Option<std::cmp::Ordering> {
        if let Some(q) = self.as_rational() {
            return Some(q.cmp(&BigRational::zero()));
        }
        if !self.is_real() {
            return None;
        }
        let (re, _) = self.to_complex();
        Some(re.partial_cmp(&0.0).unwrap_or(std::cmp::Ordering::Equal))
    }

    /// Decimal rendering of the shadow value.
    pub fn decimal(&self) -> String {
        let (re, im) = self.to_complex();
        let clean = |x: f64| if x.abs() < 1e-12 { 0.0 } else { x };
        let (re, im) = (clean(re), clean(im));
        if im == 0.0 {
            format!("{re:.6}")
        } else if im < 0.0 {
            format!("{re:.6}-{:.6}i", -im)
        } else {
            format!("{re:.6}+{im:.6}i")
        }
    }
}

impl PartialEq for CyclotomicNumber {
    fn eq(&self, other: &Self) -> bool {
        if self.level == other.level {
            self.coeffs == other.coeffs
        } else {
            let (a, b) = self.aligned(other);
            a.coeffs == b.coeffs
        }
    }
}

impl Eq for CyclotomicNumber {}

impl fmt::Display for CyclotomicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            let sign = if c.is_negative() { "-" } else { "+" };
            let body = match (j, mag.is_one()) {
                (0, _) => linalg::fmt_rational(&mag),
                (1, true) => format!("z{}", self.level),
                (_, true) => format!("z{}^{}", self.level, j),
                (1, false) => format!("{}*z{}", linalg::fmt_rational(&mag), self.level),
                (_, false) => format!("{}*z{}^{}", linalg::fmt_rational(&mag), self.level, j),
            };
            terms.push((sign, body));
        }
        if terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (sign, body)) in terms.iter().enumerate() {
            match (i, *sign) {
                (0, "-") => write!(f, "-{body}")?,
                (0, _) => write!(f, "{body}")?,
                (_, s) => write!(f, " {s} {body}")?,
            }
        }
        Ok(())
    }
}

impl Field for CyclotomicNumber {
    fn zero_like(&self) -> Self {
        Self::zero(self.level)
    }
    fn one_like(&self) -> Self {
        Self::one(self.level)
    }
    fn is_zero_elem(&self) -> bool {
        self.is_zero()
    }
    fn add_ref(&self, other: &Self) -> Self {
        self.add(other)
    }
    fn sub_ref(&self, other: &Self) -> Self {
        self.sub(other)
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self.mul(other)
    }
    fn inv_ref(&self) -> Self {
        self.inverse().expect("inverse of zero")
    }
}

#[derive(Serialize, Deserialize)]
struct CycloRepr {
    level: u32,
    coeffs: Vec<String>,
    #[serde(default, skip_deserializing)]
    decimal: String,
}

impl Serialize for CyclotomicNumber {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        CycloRepr {
            level: self.level,
            coeffs: self.coeffs.iter().map(linalg::fmt_rational).collect(),
            decimal: self.decimal(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CyclotomicNumber {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = CycloRepr::deserialize(d)?;
        if r.level == 0 {
            return Err(serde::de::Error::custom(
                "cyclotomic level must be positive",
            ));
        }
        let raw = r
            .coeffs
            .iter()
            .map(|c| {
                linalg::parse_rational(c)
                    .ok_or_else(|| serde::de::Error::custom(format!("bad rational {c:?}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(CyclotomicNumber::from_raw(r.level, raw))
    }
}

/// Nearest-integer helper used when rendering shadows of integral values.
pub fn round_shadow(z: &CyclotomicNumber) -> Option<i64> {
    let (re, im) = z.to_complex();
    if im.abs() > 1e-9 {
        return None;
    }
    re.round().to_i64()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cyclotomic_polynomials() {
        assert_eq!(*cyclotomic_polynomial(1), vec![-1, 1]);
        assert_eq!(*cyclotomic_polynomial(2), vec![1, 1]);
        assert_eq!(*cyclotomic_polynomial(4), vec![1, 0, 1]);
        assert_eq!(*cyclotomic_polynomial(6), vec![1, -1, 1]);
        assert_eq!(*cyclotomic_polynomial(12), vec![1, 0, -1, 0, 1]);
        assert_eq!(euler_phi(24), 8);
    }

    #[test]
    fn roots_of_unity_reduce() {
        let z4 = CyclotomicNumber::zeta_pow(4, 1);
        assert_eq!(z4.mul(&z4), CyclotomicNumber::from_int(4, -1));
        assert_eq!(CyclotomicNumber::zeta_pow(4, 4), CyclotomicNumber::one(4));
        let z3 = CyclotomicNumber::zeta_pow(3, 1);
        let sum = z3.add(&CyclotomicNumber::zeta_pow(3, 2));
        assert_eq!(sum, CyclotomicNumber::from_int(3, -1));
    }

    #[test]
    fn golden_ratio_shadow() {
        let v = CyclotomicNumber::zeta_pow(5, 1).add(&CyclotomicNumber::zeta_pow(5, 4));
        let (re, im) = v.to_complex();
        assert!((re - (5f64.sqrt() - 1.0) / 2.0).abs() < 1e-12);
        assert!(im.abs() < 1e-12);
        assert!(v.is_real());
        assert_eq!(v.real_sign(), Some(std::cmp::Ordering::Greater));
    }

    #[test]
    fn lifting_preserves_value() {
        let z2 = CyclotomicNumber::zeta_pow(2, 1);
        assert_eq!(z2, CyclotomicNumber::from_int(2, -1));
        let z3 = CyclotomicNumber::zeta_pow(3, 1);
        assert_eq!(z3.lift(6), CyclotomicNumber::zeta_pow(6, 2));
        assert_eq!(z3, CyclotomicNumber::zeta_pow(12, 4));
        let mixed = z3.add(&CyclotomicNumber::zeta_pow(4, 1));
        assert_eq!(mixed.level(), 12);
    }

    #[test]
    fn inverse_and_conjugate() {
        let a = CyclotomicNumber::from_int(5, 2).add(&CyclotomicNumber::zeta_pow(5, 2));
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv), CyclotomicNumber::one(5));
        assert_eq!(
            CyclotomicNumber::zeta_pow(7, 3).conj(),
            CyclotomicNumber::zeta_pow(7, 4)
        );
        assert!(CyclotomicNumber::zero(7).inverse().is_none());
    }

    #[test]
    fn serde_round_trip() {
        let a = CyclotomicNumber::zeta_pow(8, 3).scale(&BigRational::new(1.into(), 3.into()));
        let json = serde_json::to_string(&a).unwrap();
        let back: CyclotomicNumber = serde_json::from_str(&json).unwrap();
        assert_eq!(a, back);
    }

    #[test]
    fn display_is_readable() {
        let a = CyclotomicNumber::from_int(4, 1).sub(&CyclotomicNumber::zeta_pow(4, 1));
        assert_eq!(a.to_string(), "1 - z4");
        assert_eq!(CyclotomicNumber::zero(3).to_string(), "0");
    }
}
