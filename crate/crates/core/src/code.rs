//! Linear codes over Z/mZ, symmetrized weight enumerators and the
//! MacWilliams transform for them.

use std::collections::{BTreeMap, HashMap};
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::cyclotomic::{CyclicRing, Elem};
use crate::error::{Error, Result};
use crate::lattice::{construction_a, mod_u64, IntegerLattice};
use crate::matrix;

/// A linear code over Z/mZ given by generator rows.
#[derive(Debug, Clone)]
pub struct LinearCode {
    m: u64,
    n: usize,
    generators: Vec<Vec<u64>>,
    lattice: OnceLock<IntegerLattice>,
}

impl PartialEq for LinearCode {
    fn eq(&self, other: &Self) -> bool {
        self.m == other.m && self.n == other.n && self.lattice() == other.lattice()
    }
}

impl LinearCode {
    /// Generator entries are reduced mod `m`. `m = 1` is allowed and gives
    /// the trivial code.
    pub fn new(m: u64, n: usize, generators: Vec<Vec<u64>>) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidArgument("modulus must be positive".into()));
        }
        if n == 0 {
            return Err(Error::InvalidArgument("code length must be positive".into()));
        }
        if let Some(r) = generators.iter().find(|r| r.len() != n) {
            return Err(Error::InvalidArgument(format!("generator row has length {}, expected {n}", r.len())));
        }
        let generators = generators.into_iter().map(|r| r.into_iter().map(|x| x % m).collect()).collect();
        Ok(LinearCode { m, n, generators, lattice: OnceLock::new() })
    }

    pub fn from_signed(m: u64, n: usize, generators: &[Vec<i64>]) -> Result<Self> {
        let rows = generators.iter().map(|r| r.iter().map(|&x| x.rem_euclid(m as i64) as u64).collect()).collect();
        Self::new(m, n, rows)
    }

    pub fn zero(m: u64, n: usize) -> Self {
        Self::new(m, n, Vec::new()).expect("valid")
    }

    pub fn full(m: u64, n: usize) -> Self {
        let rows = (0..n).map(|i| (0..n).map(|j| u64::from(i == j)).collect()).collect();
        Self::new(m, n, rows).expect("valid")
    }

    pub fn repetition(m: u64, n: usize) -> Self {
        Self::new(m, n, vec![vec![1; n]]).expect("valid")
    }

    /// Binary code of even-weight words.
    pub fn even_weight(n: usize) -> Self {
        let rows = (1..n).map(|i| (0..n).map(|j| u64::from(j == 0 || j == i)).collect()).collect();
        Self::new(2, n, rows).expect("valid")
    }

    /// The extended binary Hamming code of length 8.
    pub fn extended_hamming8() -> Self {
        let rows =
            vec![vec![1, 1, 1, 1, 0, 0, 0, 0], vec![0, 0, 1, 1, 1, 1, 0, 0], vec![0, 0, 0, 0, 1, 1, 1, 1], vec![0, 1, 0, 1, 0, 1, 0, 1]];
        Self::new(2, 8, rows).expect("valid")
    }

    /// The extended quaternary Golay code of length 24: cyclic shifts of the
    /// Hensel lift of the binary Golay generator, extended by an overall
    /// parity coordinate.
    pub fn quaternary_golay() -> Self {
        const G: [u64; 12] = [3, 2, 1, 0, 1, 1, 1, 2, 0, 0, 3, 1];
        let rows = (0..12)
            .map(|s| {
                let mut row = vec![0u64; 24];
                for (k, &c) in G.iter().enumerate() {
                    row[s + k] = c;
                }
                let sum: u64 = row[..23].iter().sum();
                row[23] = (4 - sum % 4) % 4;
                row
            })
            .collect();
        Self::new(4, 24, rows).expect("valid")
    }

    pub fn modulus(&self) -> u64 {
        self.m
    }

    pub fn length(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[Vec<u64>] {
        &self.generators
    }

    /// Construction A lattice of the code (cached).
    pub fn lattice(&self) -> &IntegerLattice {
        self.lattice.get_or_init(|| construction_a(self))
    }

    /// Number of codewords, m^n / [Z^n : A(C)].
    pub fn cardinality(&self) -> BigInt {
        num_traits::pow(BigInt::from(self.m), self.n) / self.lattice().index()
    }

    pub fn size(&self) -> u128 {
        self.cardinality().to_u128().expect("code size fits in u128")
    }

    pub fn contains(&self, word: &[u64]) -> bool {
        word.len() == self.n && self.lattice().contains(&word.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>())
    }

    /// Calls `f` once per codeword (entries in [0, m)), walking the digits of
    /// the Hermite normal form of the Construction A lattice.
    pub fn for_each_codeword<F: FnMut(&[u64])>(&self, cap: usize, mut f: F) -> Result<()> {
        let size = self.cardinality();
        if size > BigInt::from(cap) {
            return Err(Error::CapExceeded { cap });
        }
        let m = self.m;
        let h = self.lattice().hnf();
        // (row mod m, radix m / pivot, radix * row mod m) for rows with radix > 1
        let mut steps: Vec<(Vec<u64>, u64, Vec<u64>)> = Vec::new();
        for (i, row) in h.iter().enumerate() {
            let pivot = row[i].to_u64().expect("pivot divides m");
            let radix = m / pivot;
            if radix > 1 {
                let r: Vec<u64> = row.iter().map(|x| mod_u64(x, m)).collect();
                let wrap: Vec<u64> = r.iter().map(|&x| ((x as u128 * radix as u128) % m as u128) as u64).collect();
                steps.push((r, radix, wrap));
            }
        }
        let mut x = vec![0u64; self.n];
        let mut digits = vec![0u64; steps.len()];
        loop {
            f(&x);
            let mut k = steps.len();
            loop {
                if k == 0 {
                    return Ok(());
                }
                k -= 1;
                let (row, radix, wrap) = &steps[k];
                digits[k] += 1;
                for (xi, &ri) in x.iter_mut().zip(row) {
                    *xi = add_mod(*xi, ri, m);
                }
                if digits[k] < *radix {
                    break;
                }
                digits[k] = 0;
                for (xi, &wi) in x.iter_mut().zip(wrap) {
                    *xi = add_mod(*xi, m - wi, m);
                }
            }
        }
    }

    pub fn codewords(&self, cap: usize) -> Result<Vec<Vec<u64>>> {
        let mut out = Vec::new();
        self.for_each_codeword(cap, |c| out.push(c.to_vec()))?;
        Ok(out)
    }

    /// Symmetrized weight enumerator by exhaustive codeword enumeration.
    pub fn swe(&self, cap: usize) -> Result<SweEnumerator> {
        let m = self.m;
        let t = (m / 2) as usize;
        let base = self.n as u128 + 1;
        let packed = (0..=t).try_fold(1u128, |acc, _| acc.checked_mul(base)).map_or(false, |v| v <= u64::MAX as u128);
        let mut classes = vec![0u32; t + 1];
        let class = |r: u64| -> usize { r.min(m - r) as usize };
        let mut terms: BTreeMap<Vec<u32>, u128> = BTreeMap::new();
        if packed {
            let mut counts: HashMap<u64, u128> = HashMap::new();
            self.for_each_codeword(cap, |c| {
                classes.iter_mut().for_each(|x| *x = 0);
                for &r in c {
                    classes[class(r)] += 1;
                }
                let key = classes.iter().rev().fold(0u64, |k, &e| k * base as u64 + e as u64);
                *counts.entry(key).or_insert(0) += 1;
            })?;
            for (mut key, count) in counts {
                let mut e = vec![0u32; t + 1];
                for x in e.iter_mut() {
                    *x = (key % base as u64) as u32;
                    key /= base as u64;
                }
                terms.insert(e, count);
            }
        } else {
            self.for_each_codeword(cap, |c| {
                classes.iter_mut().for_each(|x| *x = 0);
                for &r in c {
                    classes[class(r)] += 1;
                }
                *terms.entry(classes.clone()).or_insert(0) += 1;
            })?;
        }
        Ok(SweEnumerator { m, n: self.n, terms })
    }

    /// Dual code, read off from the dual of the Construction A lattice:
    /// A(C)^* = (1/m) A(C^perp).
    pub fn dual(&self) -> LinearCode {
        let h = matrix::rat_from_int(self.lattice().hnf());
        let inv = matrix::inverse_rat(&h).expect("nonsingular");
        let m = BigInt::from(self.m);
        let rows = matrix::transpose(&inv)
            .iter()
            .map(|r| {
                r.iter()
                    .map(|x| {
                        let y = x * num_rational::BigRational::from_integer(m.clone());
                        debug_assert!(y.is_integer());
                        mod_u64(&y.to_integer(), self.m)
                    })
                    .collect()
            })
            .collect();
        LinearCode::new(self.m, self.n, rows).expect("valid")
    }

    /// Hamming weight distribution (index = weight).
    pub fn weight_distribution(&self, cap: usize) -> Result<Vec<u128>> {
        let mut w = vec![0u128; self.n + 1];
        self.for_each_codeword(cap, |c| w[c.iter().filter(|&&x| x != 0).count()] += 1)?;
        Ok(w)
    }
}

fn add_mod(a: u64, b: u64, m: u64) -> u64 {
    let s = a as u128 + b as u128;
    (s % m as u128) as u64
}

/// Symmetrized weight enumerator: counts of codewords by the numbers
/// (n_0, ..., n_t) of coordinates congruent to 0, +-1, ..., +-t mod m.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweEnumerator {
    m: u64,
    n: usize,
    terms: BTreeMap<Vec<u32>, u128>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct SweTerm {
    exponents: Vec<u32>,
    count: u128,
}

impl SweEnumerator {
    pub fn new(m: u64, n: usize, terms: BTreeMap<Vec<u32>, u128>) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidArgument("modulus must be positive".into()));
        }
        let t = (m / 2) as usize;
        for e in terms.keys() {
            if e.len() != t + 1 {
                return Err(Error::InvalidArgument(format!("exponent vector must have {} entries", t + 1)));
            }
            if e.iter().map(|&x| x as usize).sum::<usize>() != n {
                return Err(Error::InvalidArgument(format!("exponent vector {e:?} does not sum to {n}")));
            }
        }
        let terms = terms.into_iter().filter(|(_, c)| *c != 0).collect();
        Ok(SweEnumerator { m, n, terms })
    }

    pub fn zero_code(m: u64, n: usize) -> Self {
        let mut e = vec![0u32; (m / 2) as usize + 1];
        e[0] = n as u32;
        SweEnumerator { m, n, terms: BTreeMap::from([(e, 1)]) }
    }

    pub fn modulus(&self) -> u64 {
        self.m
    }

    pub fn length(&self) -> usize {
        self.n
    }

    pub fn t(&self) -> usize {
        (self.m / 2) as usize
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, u128> {
        &self.terms
    }

    pub fn count(&self, exponents: &[u32]) -> u128 {
        self.terms.get(exponents).copied().unwrap_or(0)
    }

    /// Total count, i.e. the size of the code.
    pub fn total(&self) -> u128 {
        self.terms.values().sum()
    }

    /// Hamming weight distribution implied by the enumerator.
    pub fn weight_distribution(&self) -> Vec<u128> {
        let mut w = vec![0u128; self.n + 1];
        for (e, &c) in &self.terms {
            w[self.n - e[0] as usize] += c;
        }
        w
    }

    /// Numerical value of the polynomial at `x`.
    pub fn evaluate(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|(e, &c)| c as f64 * e.iter().zip(x).map(|(&k, &v)| v.powi(k as i32)).product::<f64>()).sum()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let list: Vec<SweTerm> = self.terms.iter().map(|(e, &c)| SweTerm { exponents: e.clone(), count: c }).collect();
        serde_json::to_value(list).expect("serializable")
    }

    pub fn from_json(m: u64, n: usize, value: &serde_json::Value) -> Result<Self> {
        let list: Vec<SweTerm> =
            serde_json::from_value(value.clone()).map_err(|e| Error::Parse { location: "swe".into(), message: e.to_string() })?;
        let mut terms = BTreeMap::new();
        for t in list {
            *terms.entry(t.exponents).or_insert(0) += t.count;
        }
        Self::new(m, n, terms)
    }
}

type RingPoly = HashMap<Vec<u32>, Elem>;

fn poly_mul(ring: &CyclicRing, a: &RingPoly, b: &RingPoly) -> Result<RingPoly> {
    let mut out: RingPoly = HashMap::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let e: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
            let p = ring.mul(ca, cb)?;
            match out.get_mut(&e) {
                Some(acc) => CyclicRing::add_assign(acc, &p)?,
                None => {
                    out.insert(e, p);
                }
            }
        }
    }
    out.retain(|_, c| !CyclicRing::is_zero(c));
    Ok(out)
}

/// Enumerator of the dual code from the enumerator of `C` and `|C|`.
///
/// Each x_i is replaced by y_i = x_0 + sum_j c_ij x_j where c_ij is
/// 2cos(2 pi ij/m), except that for even m the last coefficient is
/// cos(pi i). The sums are carried out exactly in the cyclotomic group ring.
pub fn macwilliams_swe(swe: &SweEnumerator, size_c: u128) -> Result<SweEnumerator> {
    if size_c == 0 {
        return Err(Error::InvalidArgument("code size must be positive".into()));
    }
    let m = swe.m as usize;
    let t = swe.t();
    let n = swe.n;
    let ring = CyclicRing::new(m);
    let unit = |j: usize| -> Vec<u32> {
        let mut e = vec![0u32; t + 1];
        e[j] = 1;
        e
    };
    let mut powers: Vec<Vec<RingPoly>> = Vec::with_capacity(t + 1);
    for i in 0..=t {
        let mut y: RingPoly = HashMap::new();
        y.insert(unit(0), ring.constant(1));
        for j in 1..=t {
            let c = if m % 2 == 0 && j == t { ring.constant(if i % 2 == 0 { 1 } else { -1 }) } else { ring.two_cos((i * j) as i64) };
            if !CyclicRing::is_zero(&c) {
                y.insert(unit(j), c);
            }
        }
        let max_e = swe.terms.keys().map(|e| e[i]).max().unwrap_or(0) as usize;
        let mut p: Vec<RingPoly> = vec![HashMap::from([(vec![0u32; t + 1], ring.constant(1))])];
        for k in 1..=max_e {
            p.push(poly_mul(&ring, &p[k - 1], &y)?);
        }
        powers.push(p);
    }
    let mut total: RingPoly = HashMap::new();
    for (e, &count) in &swe.terms {
        let mut term: RingPoly = HashMap::from([(vec![0u32; t + 1], ring.constant(1))]);
        for (i, &k) in e.iter().enumerate() {
            if k > 0 {
                term = poly_mul(&ring, &term, &powers[i][k as usize])?;
            }
        }
        let c = i128::try_from(count).map_err(|_| Error::Overflow("MacWilliams transform"))?;
        for (mono, coeff) in term {
            let scaled = CyclicRing::scale(&coeff, c)?;
            match total.get_mut(&mono) {
                Some(acc) => CyclicRing::add_assign(acc, &scaled)?,
                None => {
                    total.insert(mono, scaled);
                }
            }
        }
    }
    let size = size_c as i128;
    let mut terms = BTreeMap::new();
    for (mono, coeff) in total {
        let v = ring.to_integer(&coeff)?;
        if v == 0 {
            continue;
        }
        if v < 0 || v % size != 0 {
            return Err(Error::NonIntegralResult(format!("coefficient {v} of {mono:?} is not a nonnegative multiple of {size}")));
        }
        terms.insert(mono, (v / size) as u128);
    }
    SweEnumerator::new(swe.m, n, terms)
}

/// Binary/ternary helper: the Hamming weight enumerator as an swe.
pub fn swe_from_weight_distribution(m: u64, weights: &[u128]) -> Result<SweEnumerator> {
    if m != 2 && m != 3 {
        return Err(Error::InvalidArgument("weight distributions determine the swe only for m = 2, 3".into()));
    }
    let n = weights.len() - 1;
    let terms = weights.iter().enumerate().filter(|(_, &c)| c != 0).map(|(w, &c)| (vec![(n - w) as u32, w as u32], c)).collect();
    SweEnumerator::new(m, n, terms)
}

/// True if the two codes satisfy x . y = 0 mod m for all generator pairs.
pub fn orthogonal(a: &LinearCode, b: &LinearCode) -> bool {
    let m = a.m as u128;
    a.generators.iter().all(|x| b.generators.iter().all(|y| x.iter().zip(y).map(|(&p, &q)| p as u128 * q as u128).sum::<u128>() % m == 0))
}

/// Sum of exponent vectors is `n`; convenient for building fixtures.
pub fn swe_from_pairs(m: u64, n: usize, pairs: &[(&[u32], u128)]) -> Result<SweEnumerator> {
    let terms = pairs.iter().map(|(e, c)| (e.to_vec(), *c)).collect();
    SweEnumerator::new(m, n, terms)
}

#[cfg(test)]
mod tests {
    use super::*;

    const CAP: usize = 1 << 24;

    #[test]
    fn enumeration_small_codes() {
        assert_eq!(LinearCode::zero(3, 4).codewords(CAP).unwrap(), vec![vec![0; 4]]);
        let mut rep = LinearCode::repetition(2, 5).codewords(CAP).unwrap();
        rep.sort();
        assert_eq!(rep, vec![vec![0; 5], vec![1; 5]]);
        let h = LinearCode::extended_hamming8();
        assert_eq!(h.size(), 16);
        assert_eq!(h.weight_distribution(CAP).unwrap(), vec![1, 0, 0, 0, 14, 0, 0, 0, 1]);
    }

    #[test]
    fn codewords_are_distinct_members() {
        let c = LinearCode::new(6, 4, vec![vec![1, 2, 3, 4], vec![0, 3, 3, 0], vec![2, 2, 0, 4]]).unwrap();
        let words = c.codewords(CAP).unwrap();
        assert_eq!(words.len() as u128, c.size());
        let set: std::collections::HashSet<_> = words.iter().cloned().collect();
        assert_eq!(set.len(), words.len());
        for w in &words {
            assert!(c.contains(w));
        }
    }

    #[test]
    fn cap_is_enforced() {
        let err = LinearCode::full(2, 10).codewords(100).unwrap_err();
        assert_eq!(err, Error::CapExceeded { cap: 100 });
    }

    #[test]
    fn swe_examples() {
        let s = LinearCode::full(2, 3).swe(CAP).unwrap();
        assert_eq!(s.count(&[3, 0]), 1);
        assert_eq!(s.count(&[2, 1]), 3);
        assert_eq!(s.count(&[1, 2]), 3);
        assert_eq!(s.count(&[0, 3]), 1);
        assert_eq!(LinearCode::zero(5, 4).swe(CAP).unwrap(), SweEnumerator::zero_code(5, 4));
    }

    #[test]
    fn dual_codes() {
        for n in 2..7 {
            assert_eq!(LinearCode::even_weight(n).dual(), LinearCode::repetition(2, n));
            assert_eq!(LinearCode::repetition(2, n).dual(), LinearCode::even_weight(n));
        }
        assert_eq!(LinearCode::full(3, 4).dual(), LinearCode::zero(3, 4));
        let h = LinearCode::extended_hamming8();
        assert!(orthogonal(&h, &h));
        assert_eq!(h.dual(), h);
    }

    #[test]
    fn macwilliams_examples() {
        let c = LinearCode::even_weight(5);
        let t = macwilliams_swe(&c.swe(CAP).unwrap(), c.size()).unwrap();
        assert_eq!(t, LinearCode::repetition(2, 5).swe(CAP).unwrap());
        let f = LinearCode::full(3, 4);
        assert_eq!(macwilliams_swe(&f.swe(CAP).unwrap(), f.size()).unwrap(), SweEnumerator::zero_code(3, 4));
        let h = LinearCode::extended_hamming8();
        let s = h.swe(CAP).unwrap();
        assert_eq!(macwilliams_swe(&s, 16).unwrap(), s);
    }

    #[test]
    fn macwilliams_rejects_inconsistent_size() {
        let c = LinearCode::even_weight(4);
        let err = macwilliams_swe(&c.swe(CAP).unwrap(), 3).unwrap_err();
        assert!(matches!(err, Error::NonIntegralResult(_)));
    }

    #[test]
    fn swe_json_round_trip() {
        let s = LinearCode::new(5, 3, vec![vec![1, 2, 3]]).unwrap().swe(CAP).unwrap();
        let v = s.to_json();
        assert_eq!(SweEnumerator::from_json(5, 3, &v).unwrap(), s);
    }
}
