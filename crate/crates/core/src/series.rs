//! Truncated power series with exact rational coefficients and rational
//! functions of the form N(u) / (1 - u^b)^p.
//!
//! Both carry a root `s`: the formal variable is u = q^(1/s), so that
//! fractional powers of q are represented exactly.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct PowerSeries {
    coeffs: Vec<BigRational>,
    root: u64,
}

impl PowerSeries {
    /// Series `sum c_k u^k` known up to (and including) `u^order` where
    /// `order = coeffs.len() - 1`.
    pub fn new(coeffs: Vec<BigRational>, root: u64) -> Self {
        assert!(!coeffs.is_empty(), "a series needs at least one coefficient");
        assert!(root >= 1);
        PowerSeries { coeffs, root }
    }

    pub fn from_integers(coeffs: Vec<BigInt>, root: u64) -> Self {
        Self::new(coeffs.into_iter().map(BigRational::from_integer).collect(), root)
    }

    pub fn from_i64(coeffs: &[i64], root: u64) -> Self {
        Self::from_integers(coeffs.iter().map(|&c| BigInt::from(c)).collect(), root)
    }

    pub fn zero(order: usize, root: u64) -> Self {
        Self::new(vec![BigRational::zero(); order + 1], root)
    }

    pub fn one(order: usize, root: u64) -> Self {
        let mut s = Self::zero(order, root);
        s.coeffs[0] = BigRational::one();
        s
    }

    /// Truncation order in the variable u.
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn root(&self) -> u64 {
        self.root
    }

    pub fn coefficients(&self) -> &[BigRational] {
        &self.coeffs
    }

    /// Coefficient of u^k, or `None` beyond the truncation order.
    pub fn coeff(&self, k: usize) -> Option<&BigRational> {
        self.coeffs.get(k)
    }

    /// Coefficient of q^e for a rational exponent e; `None` if beyond order,
    /// zero if e is not a multiple of 1/s.
    pub fn coeff_at_q(&self, e: &BigRational) -> Option<BigRational> {
        let k = e * BigRational::from_integer(BigInt::from(self.root));
        if !k.is_integer() {
            return Some(BigRational::zero());
        }
        let k = k.to_integer().to_usize()?;
        self.coeffs.get(k).cloned()
    }

    pub fn truncate(&self, order: usize) -> Self {
        let mut c = self.coeffs.clone();
        c.truncate(order + 1);
        Self::new(c, self.root)
    }

    fn check_root(&self, other: &Self) -> Result<()> {
        if self.root != other.root {
            return Err(Error::InvalidArgument(format!("series roots differ ({} vs {})", self.root, other.root)));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_root(other)?;
        let k = self.order().min(other.order());
        Ok(Self::new((0..=k).map(|i| &self.coeffs[i] + &other.coeffs[i]).collect(), self.root))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_root(other)?;
        let k = self.order().min(other.order());
        Ok(Self::new((0..=k).map(|i| &self.coeffs[i] - &other.coeffs[i]).collect(), self.root))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_root(other)?;
        let k = self.order().min(other.order());
        let mut out = vec![BigRational::zero(); k + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(k + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(k + 1 - i) {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        Ok(Self::new(out, self.root))
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Self::new(self.coeffs.iter().map(|x| x * c).collect(), self.root)
    }

    /// Multiplicative inverse; requires a nonzero constant term.
    pub fn reciprocal(&self) -> Result<Self> {
        let c0 = &self.coeffs[0];
        if c0.is_zero() {
            return Err(Error::InvalidArgument("reciprocal of a series with zero constant term".into()));
        }
        let k = self.order();
        let mut out: Vec<BigRational> = Vec::with_capacity(k + 1);
        out.push(BigRational::one() / c0);
        for i in 1..=k {
            let mut s = BigRational::zero();
            for j in 1..=i {
                if !self.coeffs[j].is_zero() {
                    s += &self.coeffs[j] * &out[i - j];
                }
            }
            out.push(-s / c0);
        }
        Ok(Self::new(out, self.root))
    }

    pub fn pow(&self, e: u32) -> Result<Self> {
        let mut r = Self::one(self.order(), self.root);
        for _ in 0..e {
            r = r.mul(self)?;
        }
        Ok(r)
    }

    /// Same series written in v = q^(1/new_root); `new_root` must be a
    /// multiple of the current root.
    pub fn with_root(&self, new_root: u64) -> Result<Self> {
        if new_root % self.root != 0 {
            return Err(Error::InvalidArgument(format!("root {new_root} is not a multiple of {}", self.root)));
        }
        let f = (new_root / self.root) as usize;
        let mut c = vec![BigRational::zero(); self.order() * f + 1];
        for (k, x) in self.coeffs.iter().enumerate() {
            c[k * f] = x.clone();
        }
        Ok(Self::new(c, new_root))
    }

    /// Substitutes q -> q^c for a positive rational c: the theta series of a
    /// lattice scaled by c in the l1 case.
    pub fn substitute_q_power(&self, c: &BigRational) -> Result<Self> {
        if !c.is_positive() {
            return Err(Error::InvalidArgument("exponent scale must be positive".into()));
        }
        // u^k = q^(k/s) -> q^(k c / s) = w^(k a) with w = q^(1/(s b)), c = a/b
        let a = c.numer().to_usize().ok_or(Error::Overflow("series substitution"))?;
        let b = c.denom().to_u64().ok_or(Error::Overflow("series substitution"))?;
        let mut out = vec![BigRational::zero(); self.order() * a + 1];
        for (k, x) in self.coeffs.iter().enumerate() {
            out[k * a] = x.clone();
        }
        Ok(Self::new(out, self.root * b).normalized())
    }

    /// Reduces the root as far as the nonzero exponents allow.
    pub fn normalized(&self) -> Self {
        let g = self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()).fold(self.root, |g, (k, _)| g.gcd(&(k as u64)));
        let g = g.gcd(&(self.order() as u64)).max(1);
        if g == 1 {
            return self.clone();
        }
        let c = self.coeffs.iter().step_by(g as usize).cloned().collect();
        Self::new(c, self.root / g)
    }

    /// Truncation order measured in powers of q.
    pub fn q_order(&self) -> BigRational {
        BigRational::new(BigInt::from(self.order()), BigInt::from(self.root))
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integer())
    }

    pub fn integer_coefficients(&self) -> Option<Vec<BigInt>> {
        self.coeffs.iter().map(|c| c.is_integer().then(|| c.to_integer())).collect()
    }

    /// Partial sum at a numerical q in (0, 1).
    pub fn evaluate(&self, q: f64) -> f64 {
        let u = q.powf(1.0 / self.root as f64);
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * u + c.to_f64().unwrap_or(f64::NAN);
        }
        acc
    }
}

fn q_power(k: usize, root: u64) -> String {
    let e = BigRational::new(BigInt::from(k), BigInt::from(root));
    if e.is_one() {
        "q".to_string()
    } else if e.is_integer() {
        format!("q^{e}")
    } else {
        format!("q^({e})")
    }
}

impl fmt::Display for PowerSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            if k == 0 {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{}", q_power(k, self.root))?;
            } else {
                write!(f, "{mag}*{}", q_power(k, self.root))?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O({})", q_power(self.order() + 1, self.root))
    }
}

/// Rational function N(u) / (1 - u^b)^p with integer numerator, u = q^(1/s).
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaRational {
    numerator: Vec<BigInt>,
    den_base: u64,
    den_power: u32,
    root: u64,
}

impl ThetaRational {
    pub fn new(numerator: Vec<BigInt>, den_base: u64, den_power: u32, root: u64) -> Self {
        let mut numerator = numerator;
        while numerator.len() > 1 && numerator.last().map_or(false, |c| c.is_zero()) {
            numerator.pop();
        }
        ThetaRational { numerator, den_base, den_power, root }
    }

    pub fn numerator(&self) -> &[BigInt] {
        &self.numerator
    }

    /// Expanded denominator polynomial (1 - u^b)^p.
    pub fn denominator(&self) -> Vec<BigInt> {
        let b = self.den_base as usize;
        let p = self.den_power as usize;
        let mut d = vec![BigInt::zero(); b * p + 1];
        let mut binom = BigInt::one();
        for j in 0..=p {
            d[j * b] = if j % 2 == 0 { binom.clone() } else { -binom.clone() };
            binom = binom * BigInt::from(p - j) / BigInt::from(j + 1);
        }
        d
    }

    pub fn denominator_base(&self) -> u64 {
        self.den_base
    }

    pub fn denominator_power(&self) -> u32 {
        self.den_power
    }

    pub fn root(&self) -> u64 {
        self.root
    }

    /// Series expansion to order `order` in u.
    pub fn to_series(&self, order: usize) -> PowerSeries {
        let b = self.den_base as usize;
        let p = self.den_power as usize;
        // 1/(1-u^b)^p = sum_j C(p-1+j, j) u^{bj}
        let mut inv = vec![BigInt::zero(); order + 1];
        if p == 0 {
            inv[0] = BigInt::one();
        } else {
            let mut c = BigInt::one();
            let mut j = 0usize;
            while j * b <= order {
                inv[j * b] = c.clone();
                c = c * BigInt::from(p + j) / BigInt::from(j + 1);
                j += 1;
                if b == 0 {
                    break;
                }
            }
        }
        let mut out = vec![BigInt::zero(); order + 1];
        for (i, a) in self.numerator.iter().enumerate().take(order + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, d) in inv.iter().enumerate().take(order + 1 - i) {
                if !d.is_zero() {
                    out[i + j] += a * d;
                }
            }
        }
        PowerSeries::from_integers(out, self.root)
    }

    /// Expansion up to q^`q_order` (order `q_order * s` in u).
    pub fn expand_q(&self, q_order: usize) -> PowerSeries {
        self.to_series(q_order * self.root as usize)
    }

    /// Numerical value at q in (0, 1).
    pub fn evaluate(&self, q: f64) -> f64 {
        let u = q.powf(1.0 / self.root as f64);
        let mut acc = 0.0;
        for c in self.numerator.iter().rev() {
            acc = acc * u + c.to_f64().unwrap_or(f64::NAN);
        }
        acc / (1.0 - u.powi(self.den_base as i32)).powi(self.den_power as i32)
    }

    pub fn variable(&self) -> String {
        if self.root == 1 {
            "q".into()
        } else {
            format!("q^(1/{})", self.root)
        }
    }
}

fn poly_string(c: &[BigInt], var: &str) -> String {
    let mut s = String::new();
    for (k, a) in c.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        let mag = a.abs();
        if s.is_empty() {
            if a.is_negative() {
                s.push('-');
            }
        } else {
            s.push_str(if a.is_negative() { " - " } else { " + " });
        }
        let mono = match k {
            0 => String::new(),
            1 => var.to_string(),
            _ => format!("{var}^{k}"),
        };
        if k == 0 {
            s.push_str(&mag.to_string());
        } else if mag.is_one() {
            s.push_str(&mono);
        } else {
            s.push_str(&format!("{mag}*{mono}"));
        }
    }
    if s.is_empty() {
        s.push('0');
    }
    s
}

impl fmt::Display for ThetaRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let var = if self.root == 1 { "q".to_string() } else { "u".to_string() };
        write!(f, "({})/({})", poly_string(&self.numerator, &var), poly_string(&self.denominator(), &var))?;
        if self.root != 1 {
            write!(f, " with u = q^(1/{})", self.root)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(p: i64, q: i64) -> BigRational {
        BigRational::new(BigInt::from(p), BigInt::from(q))
    }

    #[test]
    fn reciprocal_of_geometric() {
        let s = PowerSeries::from_i64(&[1, -1, 0, 0, 0], 1);
        assert_eq!(s.reciprocal().unwrap(), PowerSeries::from_i64(&[1, 1, 1, 1, 1], 1));
        let t = PowerSeries::from_i64(&[2, 1, 0], 1);
        let inv = t.reciprocal().unwrap();
        assert_eq!(inv.coefficients(), &[r(1, 2), r(-1, 4), r(1, 8)]);
        assert!(PowerSeries::from_i64(&[0, 1], 1).reciprocal().is_err());
    }

    #[test]
    fn product_truncates_to_common_order() {
        let a = PowerSeries::from_i64(&[1, 1, 1], 1);
        let b = PowerSeries::from_i64(&[1, 1], 1);
        assert_eq!(a.mul(&b).unwrap(), PowerSeries::from_i64(&[1, 2], 1));
    }

    #[test]
    fn root_changes() {
        let a = PowerSeries::from_i64(&[1, 2, 3], 1);
        let b = a.with_root(2).unwrap();
        assert_eq!(b, PowerSeries::from_i64(&[1, 0, 2, 0, 3], 2));
        assert_eq!(b.normalized(), a);
        let half = a.substitute_q_power(&r(1, 2)).unwrap();
        assert_eq!(half, PowerSeries::from_i64(&[1, 2, 3], 2));
        assert_eq!(half.coeff_at_q(&r(1, 2)), Some(r(2, 1)));
        assert_eq!(a.substitute_q_power(&r(2, 1)).unwrap(), PowerSeries::from_i64(&[1, 0, 2, 0, 3], 1));
    }

    #[test]
    fn rational_expansion_of_z_squared() {
        // ((1+q)/(1-q))^2 = (1 + 2q + q^2)/(1-q)^2
        let t = ThetaRational::new(vec![1.into(), 2.into(), 1.into()], 1, 2, 1);
        assert_eq!(t.to_series(4), PowerSeries::from_i64(&[1, 4, 8, 12, 16], 1));
        assert_eq!(t.denominator(), vec![BigInt::from(1), BigInt::from(-2), BigInt::from(1)]);
        let v = t.evaluate(0.1);
        assert!((v - (1.1f64 / 0.9).powi(2)).abs() < 1e-14);
        assert_eq!(t.to_string(), "(1 + 2*q + q^2)/(1 - 2*q + q^2)");
    }

    #[test]
    fn display_fractional_exponents() {
        let s = PowerSeries::from_i64(&[1, 0, 4, 3], 2);
        assert_eq!(s.to_string(), "1 + 4*q + 3*q^(3/2) + O(q^2)");
    }
}
