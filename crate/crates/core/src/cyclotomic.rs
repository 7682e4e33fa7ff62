//! Exact arithmetic in the group ring Z[x]/(x^m - 1).
//!
//! Sums of the form sum_j a_j cos(2 pi j k / m) that are known to be rational
//! integers are evaluated by working with x^j + x^{-j} in place of
//! 2 cos(2 pi j / m) and reducing the final element modulo the m-th
//! cyclotomic polynomial, where it must collapse to a constant.

use std::collections::HashMap;

use crate::error::{Error, Result};

pub(crate) type Elem = Vec<i128>;

#[derive(Debug, Clone)]
pub(crate) struct CyclicRing {
    m: usize,
    phi: Vec<i128>,
}

impl CyclicRing {
    pub fn new(m: usize) -> Self {
        assert!(m >= 1);
        CyclicRing { m, phi: cyclotomic_polynomial(m) }
    }

    pub fn zero(&self) -> Elem {
        vec![0; self.m]
    }

    pub fn constant(&self, c: i128) -> Elem {
        let mut e = self.zero();
        e[0] = c;
        e
    }

    /// x^k + x^{-k}, the image of 2 cos(2 pi k / m).
    pub fn two_cos(&self, k: i64) -> Elem {
        let m = self.m as i64;
        let mut e = self.zero();
        e[k.rem_euclid(m) as usize] += 1;
        e[(-k).rem_euclid(m) as usize] += 1;
        e
    }

    pub fn is_zero(a: &Elem) -> bool {
        a.iter().all(|&x| x == 0)
    }

    pub fn add_assign(a: &mut Elem, b: &Elem) -> Result<()> {
        for (x, &y) in a.iter_mut().zip(b) {
            *x = x.checked_add(y).ok_or(Error::Overflow("group ring addition"))?;
        }
        Ok(())
    }

    pub fn sub(a: &Elem, b: &Elem) -> Result<Elem> {
        a.iter().zip(b).map(|(&x, &y)| x.checked_sub(y).ok_or(Error::Overflow("group ring subtraction"))).collect()
    }

    pub fn scale(a: &Elem, c: i128) -> Result<Elem> {
        a.iter().map(|&x| x.checked_mul(c).ok_or(Error::Overflow("group ring scaling"))).collect()
    }

    pub fn mul(&self, a: &Elem, b: &Elem) -> Result<Elem> {
        let m = self.m;
        let mut out = self.zero();
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                if y == 0 {
                    continue;
                }
                let k = if i + j >= m { i + j - m } else { i + j };
                let p = x.checked_mul(y).ok_or(Error::Overflow("group ring product"))?;
                out[k] = out[k].checked_add(p).ok_or(Error::Overflow("group ring product"))?;
            }
        }
        Ok(out)
    }

    /// Value of `a` at a primitive m-th root of unity, which must be a rational
    /// integer.
    pub fn to_integer(&self, a: &Elem) -> Result<i128> {
        let r = reduce(a, &self.phi)?;
        if r.iter().skip(1).any(|&x| x != 0) {
            return Err(Error::NonIntegralResult("cyclotomic sum is not rational".into()));
        }
        Ok(r.first().copied().unwrap_or(0))
    }
}

/// Remainder of `a` modulo a monic polynomial (coefficients low to high).
fn reduce(a: &[i128], monic: &[i128]) -> Result<Vec<i128>> {
    let d = monic.len() - 1;
    let mut r: Vec<i128> = a.to_vec();
    if d == 0 {
        return Ok(Vec::new());
    }
    for k in (d..r.len()).rev() {
        let c = r[k];
        if c == 0 {
            continue;
        }
        for (i, &p) in monic.iter().enumerate() {
            let idx = k - d + i;
            let t = c.checked_mul(p).ok_or(Error::Overflow("cyclotomic reduction"))?;
            r[idx] = r[idx].checked_sub(t).ok_or(Error::Overflow("cyclotomic reduction"))?;
        }
    }
    r.truncate(d.min(r.len()));
    Ok(r)
}

/// Exact quotient of `a` by a monic `b`.
fn divide_exact(a: &[i128], b: &[i128]) -> Vec<i128> {
    let db = b.len() - 1;
    let mut r = a.to_vec();
    let mut q = vec![0i128; a.len() - db];
    for k in (0..q.len()).rev() {
        let c = r[k + db];
        q[k] = c;
        for (i, &p) in b.iter().enumerate() {
            r[k + i] -= c * p;
        }
    }
    debug_assert!(r.iter().all(|&x| x == 0));
    q
}

pub(crate) fn cyclotomic_polynomial(m: usize) -> Vec<i128> {
    let mut memo: HashMap<usize, Vec<i128>> = HashMap::new();
    phi_rec(m, &mut memo)
}

fn phi_rec(m: usize, memo: &mut HashMap<usize, Vec<i128>>) -> Vec<i128> {
    if let Some(p) = memo.get(&m) {
        return p.clone();
    }
    let mut p = vec![0i128; m + 1];
    p[0] = -1;
    p[m] = 1;
    for d in 1..m {
        if m % d == 0 {
            let f = phi_rec(d, memo);
            p = divide_exact(&p, &f);
        }
    }
    memo.insert(m, p.clone());
    p
}
