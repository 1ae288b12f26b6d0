//! Integer-valued polynomials in the binomial basis `Σ c_k·C(n,k)`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("polynomial syntax error at position {position}: {message}")]
    Parse { position: usize, message: String },
    #[error("interpolation needs at least one sample")]
    NoSamples,
    #[error("samples must sit at consecutive arguments; found {found} after {previous}")]
    NonConsecutive { previous: i64, found: i64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntPolynomial {
    /// Trailing coefficient nonzero unless the polynomial is zero (then empty).
    coeffs: Vec<BigInt>,
}

/// `C(n, k)` for any integer `n`.
pub fn binomial(n: &BigInt, k: usize) -> BigInt {
    if !n.is_negative() {
        if let Some(nn) = n.to_u64() {
            if (k as u64) > nn {
                return BigInt::zero();
            }
        }
    }
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..k {
        num *= n - BigInt::from(i);
        den *= BigInt::from(i + 1);
    }
    num / den
}

impl IntPolynomial {
    pub fn zero() -> Self {
        IntPolynomial { coeffs: Vec::new() }
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        Self::from_binomial_coeffs(vec![c.into()])
    }

    /// The identity polynomial `n`.
    pub fn n() -> Self {
        Self::from_binomial_coeffs(vec![BigInt::zero(), BigInt::one()])
    }

    /// `C(n, k)`.
    pub fn choose(k: usize) -> Self {
        let mut coeffs = vec![BigInt::zero(); k + 1];
        coeffs[k] = BigInt::one();
        IntPolynomial { coeffs }
    }

    pub fn from_binomial_coeffs(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        IntPolynomial { coeffs }
    }

    pub fn from_i64_coeffs(coeffs: &[i64]) -> Self {
        Self::from_binomial_coeffs(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn binomial_coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with the zero polynomial counted as 0.
    pub fn degree_or_zero(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn eval(&self, n: &BigInt) -> BigInt {
        let mut total = BigInt::zero();
        let mut c = BigInt::one();
        for (k, coeff) in self.coeffs.iter().enumerate() {
            if k > 0 {
                // C(n,k) = C(n,k−1)·(n−k+1)/k
                c = c * (n - BigInt::from(k - 1)) / BigInt::from(k);
            }
            total += coeff * &c;
        }
        total
    }

    pub fn eval_u64(&self, n: u64) -> BigInt {
        self.eval(&BigInt::from(n))
    }

    /// Value at `n` as a machine integer, if it is non-negative and fits.
    pub fn eval_usize(&self, n: u64) -> Option<usize> {
        self.eval_u64(n).to_usize()
    }

    /// Newton interpolation through consecutive samples `(n0, v0), (n0+1, v1), …`.
    pub fn interpolate(samples: &[(i64, BigInt)]) -> Result<Self, PolyError> {
        let Some(&(start, _)) = samples.first() else {
            return Err(PolyError::NoSamples);
        };
        for w in samples.windows(2) {
            if w[1].0 != w[0].0 + 1 {
                return Err(PolyError::NonConsecutive {
                    previous: w[0].0,
                    found: w[1].0,
                });
            }
        }
        let shifted = forward_differences(samples.iter().map(|(_, v)| v.clone()).collect());
        if start == 0 {
            return Ok(Self::from_binomial_coeffs(shifted));
        }
        // Σ d_k C(n − start, k), re-expanded by sampling at 0, 1, ….
        let shifted = IntPolynomial::from_binomial_coeffs(shifted);
        let values = (0..samples.len() as i64)
            .map(|n| shifted.eval(&BigInt::from(n - start)))
            .collect();
        Ok(Self::from_binomial_coeffs(forward_differences(values)))
    }

    /// Interpolates `f` sampled at `0..=degree`.
    fn from_samples(degree: usize, f: impl Fn(&BigInt) -> BigInt) -> Self {
        let values = (0..=degree).map(|n| f(&BigInt::from(n))).collect();
        Self::from_binomial_coeffs(forward_differences(values))
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &IntPolynomial) -> IntPolynomial {
        let d = self.degree_or_zero() * inner.degree_or_zero();
        Self::from_samples(d, |n| self.eval(&inner.eval(n)))
    }

    pub fn pow(&self, e: u32) -> IntPolynomial {
        (0..e).fold(IntPolynomial::constant(1), |acc, _| &acc * self)
    }

    /// Coefficients in the monomial basis, as exact rationals `(num, den)`
    /// with a common denominator.
    pub fn monomial_coeffs(&self) -> (Vec<BigInt>, BigInt) {
        let d = self.degree_or_zero();
        let mut factorial = BigInt::one();
        for i in 2..=d {
            factorial *= i;
        }
        // d!·C(n,k) = (d!/k!)·n(n−1)…(n−k+1); expand falling factorials.
        let mut out = vec![BigInt::zero(); d + 1];
        let mut falling = vec![BigInt::one()];
        let mut k_fact = BigInt::one();
        for (k, c) in self.coeffs.iter().enumerate() {
            if k > 0 {
                k_fact *= k;
                let mut next = vec![BigInt::zero(); falling.len() + 1];
                for (i, a) in falling.iter().enumerate() {
                    next[i + 1] += a;
                    next[i] -= a * BigInt::from(k - 1);
                }
                falling = next;
            }
            let scale = &factorial / &k_fact * c;
            for (i, a) in falling.iter().enumerate() {
                out[i] += a * &scale;
            }
        }
        (out, factorial)
    }
}

/// Leading entries of the forward-difference table.
fn forward_differences(mut values: Vec<BigInt>) -> Vec<BigInt> {
    let mut out = Vec::with_capacity(values.len());
    while !values.is_empty() {
        out.push(values[0].clone());
        values = values.windows(2).map(|w| &w[1] - &w[0]).collect();
    }
    out
}

impl Add for &IntPolynomial {
    type Output = IntPolynomial;
    fn add(self, rhs: &IntPolynomial) -> IntPolynomial {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..len)
            .map(|i| {
                self.coeffs.get(i).cloned().unwrap_or_default() + rhs.coeffs.get(i).cloned().unwrap_or_default()
            })
            .collect();
        IntPolynomial::from_binomial_coeffs(coeffs)
    }
}

impl Neg for &IntPolynomial {
    type Output = IntPolynomial;
    fn neg(self) -> IntPolynomial {
        IntPolynomial {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Sub for &IntPolynomial {
    type Output = IntPolynomial;
    fn sub(self, rhs: &IntPolynomial) -> IntPolynomial {
        self + &(-rhs)
    }
}

impl Mul for &IntPolynomial {
    type Output = IntPolynomial;
    fn mul(self, rhs: &IntPolynomial) -> IntPolynomial {
        if self.is_zero() || rhs.is_zero() {
            return IntPolynomial::zero();
        }
        let d = self.degree_or_zero() + rhs.degree_or_zero();
        IntPolynomial::from_samples(d, |n| self.eval(n) * rhs.eval(n))
    }
}

impl fmt::Display for IntPolynomial {
    /// Binomial form, e.g. `1 + 3*C(n,1) - C(n,2)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if c.is_negative() { '-' } else { '+' })?;
            }
            first = false;
            if k == 0 {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "C(n,{k})")?;
            } else {
                write!(f, "{mag}*C(n,{k})")?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl FromStr for IntPolynomial {
    type Err = PolyError;

    /// Integer expressions in `n` with `+ - * ^`, parentheses and `C(expr,k)`.
    fn from_str(s: &str) -> Result<Self, PolyError> {
        let mut p = PolyParser {
            chars: s.chars().collect(),
            at: 0,
        };
        let out = p.expr()?;
        p.skip_ws();
        if p.at < p.chars.len() {
            return p.error("unexpected trailing input");
        }
        Ok(out)
    }
}

impl Serialize for IntPolynomial {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for IntPolynomial {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

struct PolyParser {
    chars: Vec<char>,
    at: usize,
}

impl PolyParser {
    fn error<T>(&self, message: &str) -> Result<T, PolyError> {
        Err(PolyError::Parse {
            position: self.at + 1,
            message: message.to_string(),
        })
    }

    fn skip_ws(&mut self) {
        while self.chars.get(self.at).is_some_and(|c| c.is_whitespace()) {
            self.at += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.at).copied()
    }

    fn eat(&mut self, c: char) -> Result<(), PolyError> {
        if self.peek() == Some(c) {
            self.at += 1;
            Ok(())
        } else {
            self.error(&format!("expected `{c}`"))
        }
    }

    fn integer(&mut self) -> Result<BigInt, PolyError> {
        self.skip_ws();
        let start = self.at;
        while self.chars.get(self.at).is_some_and(|c| c.is_ascii_digit()) {
            self.at += 1;
        }
        if start == self.at {
            return self.error("expected an integer");
        }
        let text: String = self.chars[start..self.at].iter().collect();
        Ok(text.parse().expect("digits parse"))
    }

    fn small(&mut self, what: &str) -> Result<usize, PolyError> {
        let v = self.integer()?;
        match v.to_usize() {
            Some(k) if k <= 64 => Ok(k),
            _ => self.error(&format!("{what} must be at most 64")),
        }
    }

    fn expr(&mut self) -> Result<IntPolynomial, PolyError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some('+') => {
                    self.at += 1;
                    acc = &acc + &self.term()?;
                }
                Some('-') => {
                    self.at += 1;
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<IntPolynomial, PolyError> {
        let mut acc = self.power()?;
        while self.peek() == Some('*') {
            self.at += 1;
            acc = &acc * &self.power()?;
        }
        Ok(acc)
    }

    fn power(&mut self) -> Result<IntPolynomial, PolyError> {
        if self.peek() == Some('-') {
            self.at += 1;
            return Ok(-&self.power()?);
        }
        let base = self.unary()?;
        if self.peek() == Some('^') {
            self.at += 1;
            let e = self.small("exponent")?;
            return Ok(base.pow(e as u32));
        }
        Ok(base)
    }

    fn unary(&mut self) -> Result<IntPolynomial, PolyError> {
        match self.peek() {
            Some('(') => {
                self.at += 1;
                let e = self.expr()?;
                self.eat(')')?;
                Ok(e)
            }
            Some('n') => {
                self.at += 1;
                Ok(IntPolynomial::n())
            }
            Some('C') => {
                self.at += 1;
                self.eat('(')?;
                let inner = self.expr()?;
                self.eat(',')?;
                let k = self.small("binomial index")?;
                self.eat(')')?;
                Ok(IntPolynomial::choose(k).compose(&inner))
            }
            Some(c) if c.is_ascii_digit() => Ok(IntPolynomial::constant(self.integer()?)),
            Some(c) => self.error(&format!("unexpected `{c}`")),
            None => self.error("unexpected end of input"),
        }
    }
}
