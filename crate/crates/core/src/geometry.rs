//! l1 geometry of lattices: LLL reduction, short-vector enumeration, l1
//! minima, kissing numbers and cross-polytope packing density.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{rat_to_f64, FloatLattice, Lattice};
use crate::matrix;

/// Relative tolerance for grouping l1 norms of float lattices.
pub const FLOAT_NORM_TOL: f64 = 1e-9;

/// LLL reduction of float rows, tracking the integer transform
/// (`reduced = transform * basis`).
#[derive(Debug, Clone)]
pub(crate) struct Reduction {
    pub reduced: Vec<Vec<f64>>,
    pub transform: Vec<Vec<i64>>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn combine(t: &[i64], basis: &[Vec<f64>]) -> Vec<f64> {
    let n = basis[0].len();
    (0..n).map(|j| t.iter().zip(basis).map(|(&c, r)| c as f64 * r[j]).sum()).collect()
}

/// Gram-Schmidt data: squared lengths of b*_i and coefficients mu[i][j].
fn gram_schmidt(b: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = b.len();
    let mut star: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut bs = vec![0.0; n];
    let mut mu = vec![vec![0.0; n]; n];
    for i in 0..n {
        let mut v = b[i].clone();
        for j in 0..i {
            mu[i][j] = dot(&b[i], &star[j]) / bs[j];
            for (x, y) in v.iter_mut().zip(&star[j]) {
                *x -= mu[i][j] * y;
            }
        }
        bs[i] = dot(&v, &v);
        star.push(v);
    }
    (bs, mu)
}

pub(crate) fn lll(basis: &[Vec<f64>], delta: f64) -> Reduction {
    let n = basis.len();
    let mut t: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
    let mut b: Vec<Vec<f64>> = basis.to_vec();
    let (mut bs, mut mu) = gram_schmidt(&b);
    let mut k = 1;
    let mut guard = 0usize;
    while k < n {
        guard += 1;
        if guard > 1_000_000 {
            break;
        }
        for j in (0..k).rev() {
            let r = mu[k][j].round();
            if r != 0.0 {
                let ri = r as i64;
                let tj = t[j].clone();
                for (x, y) in t[k].iter_mut().zip(&tj) {
                    *x -= ri * y;
                }
                for l in 0..j {
                    mu[k][l] -= r * mu[j][l];
                }
                mu[k][j] -= r;
            }
        }
        b[k] = combine(&t[k], basis);
        if bs[k] >= (delta - mu[k][k - 1] * mu[k][k - 1]) * bs[k - 1] {
            k += 1;
        } else {
            b.swap(k, k - 1);
            t.swap(k, k - 1);
            let gs = gram_schmidt(&b);
            bs = gs.0;
            mu = gs.1;
            k = k.saturating_sub(1).max(1);
        }
    }
    let reduced = t.iter().map(|r| combine(r, basis)).collect();
    Reduction { reduced, transform: t }
}

/// LLL-reduced basis of the same lattice (exact row operations).
pub fn lll_reduce(lat: &Lattice, delta: f64) -> Result<Lattice> {
    if !(0.25 < delta && delta < 1.0) {
        return Err(Error::InvalidArgument("LLL delta must lie in (1/4, 1)".into()));
    }
    let red = lll(&lat.to_float().basis().to_vec(), delta);
    let t: matrix::IntMatrix = red.transform.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
    lat.transform(&t)
}

pub fn lll_reduce_float(lat: &FloatLattice, delta: f64) -> FloatLattice {
    FloatLattice::new(lll(lat.basis(), delta).reduced).expect("unimodular image is nonsingular")
}

/// Fincke-Pohst enumeration of integer coefficient vectors `c` with
/// `|c * B|_2^2 <= r2` on an LLL-reduced basis. Exactly one of each pair
/// `+-c` is produced (the last nonzero coefficient is positive) and zero is
/// skipped.
pub(crate) struct Enumerator {
    n: usize,
    bs: Vec<f64>,
    mu: Vec<Vec<f64>>,
}

impl Enumerator {
    pub fn new(reduced: &[Vec<f64>]) -> Self {
        let (bs, mu) = gram_schmidt(reduced);
        Enumerator { n: reduced.len(), bs, mu }
    }

    pub fn half_ball<F: FnMut(&[i64])>(&self, r2: f64, cap: usize, mut f: F) -> Result<()> {
        let n = self.n;
        let mut c = vec![0i64; n];
        let mut count = 0usize;
        self.recurse(n, r2, 0.0, true, &mut c, &mut count, cap, &mut f)
    }

    #[allow(clippy::too_many_arguments)]
    fn recurse<F: FnMut(&[i64])>(
        &self,
        level: usize,
        r2: f64,
        partial: f64,
        all_zero_above: bool,
        c: &mut Vec<i64>,
        count: &mut usize,
        cap: usize,
        f: &mut F,
    ) -> Result<()> {
        if level == 0 {
            if all_zero_above {
                return Ok(());
            }
            *count += 1;
            if *count > cap {
                return Err(Error::CapExceeded { cap });
            }
            f(c);
            return Ok(());
        }
        let i = level - 1;
        let center: f64 = -(i + 1..self.n).map(|j| self.mu[j][i] * c[j] as f64).sum::<f64>();
        let rem = r2 - partial;
        if rem < 0.0 {
            return Ok(());
        }
        let w = (rem / self.bs[i]).sqrt();
        let lo = (center - w).ceil() as i64;
        let hi = (center + w).floor() as i64;
        let lo = if all_zero_above { lo.max(0) } else { lo };
        for x in lo..=hi {
            let d = x as f64 - center;
            let p = partial + d * d * self.bs[i];
            if p > r2 {
                continue;
            }
            c[i] = x;
            self.recurse(level - 1, r2, p, all_zero_above && x == 0, c, count, cap, f)?;
        }
        c[i] = 0;
        Ok(())
    }
}

fn l1_f64(v: &[f64]) -> f64 {
    v.iter().map(|x| x.abs()).sum()
}

/// Denominator-cleared integer image of a rational lattice, reduced.
struct ExactFrame {
    scale: BigInt,
    basis_int: Vec<Vec<i128>>,
    reduction: Reduction,
    reduced_int: Vec<Vec<i128>>,
}

impl ExactFrame {
    fn new(lat: &Lattice) -> Result<Self> {
        let (d, int) = matrix::clear_denominators(lat.basis());
        let basis_int: Vec<Vec<i128>> = int
            .iter()
            .map(|r| r.iter().map(|x| x.to_i128().ok_or(Error::Overflow("lattice entries exceed 128 bits"))).collect())
            .collect::<Result<_>>()?;
        let float: Vec<Vec<f64>> = basis_int.iter().map(|r| r.iter().map(|&x| x as f64).collect()).collect();
        let reduction = lll(&float, 0.99);
        let reduced_int = reduction
            .transform
            .iter()
            .map(|t| {
                let n = basis_int.len();
                (0..n).map(|j| t.iter().zip(&basis_int).map(|(&c, r)| c as i128 * r[j]).sum()).collect()
            })
            .collect();
        Ok(ExactFrame { scale: d, basis_int, reduction, reduced_int })
    }

    fn vector(&self, c: &[i64]) -> Vec<i128> {
        let n = self.reduced_int.len();
        (0..n).map(|j| c.iter().zip(&self.reduced_int).map(|(&x, r)| x as i128 * r[j]).sum()).collect()
    }

    /// Coordinates with respect to the original basis.
    fn original_coeffs(&self, c: &[i64]) -> Vec<i64> {
        let n = c.len();
        (0..n).map(|j| c.iter().zip(&self.reduction.transform).map(|(&x, r)| x * r[j]).sum()).collect()
    }

    /// All +-pairs (one representative each) of nonzero vectors with integer
    /// l1 norm at most `radius` (in cleared units).
    fn half_within(&self, radius: i128, cap: usize) -> Result<Vec<(Vec<i64>, Vec<i128>)>> {
        let enumr = Enumerator::new(&self.reduction.reduced);
        let r = radius as f64;
        let r2 = r * r * (1.0 + 1e-9) + 1e-9;
        let mut out = Vec::new();
        enumr.half_ball(r2, cap, |c| {
            let v = self.vector(c);
            if v.iter().map(|x| x.abs()).sum::<i128>() <= radius {
                out.push((c.to_vec(), v));
            }
        })?;
        Ok(out)
    }
}

/// Calls `f` with one vector of each +- pair of nonzero vectors of `d*L`
/// (`d` the common denominator, returned) with l2 norm at most `radius`
/// measured in cleared units.
pub(crate) fn exact_half_ball<F: FnMut(&[i128])>(lat: &Lattice, radius: f64, cap: usize, mut f: F) -> Result<BigInt> {
    let frame = ExactFrame::new(lat)?;
    let enumr = Enumerator::new(&frame.reduction.reduced);
    let r2 = radius * radius * (1.0 + 1e-9) + 1e-9;
    enumr.half_ball(r2, cap, |c| f(&frame.vector(c)))?;
    Ok(frame.scale)
}

/// Calls `f` with one vector of each +- pair of nonzero vectors of a float
/// lattice with l2 norm at most `radius`.
pub(crate) fn float_half_ball<F: FnMut(&[f64])>(lat: &FloatLattice, radius: f64, cap: usize, mut f: F) -> Result<()> {
    let red = lll(lat.basis(), 0.99);
    let enumr = Enumerator::new(&red.reduced);
    let r2 = radius * radius * (1.0 + 1e-9);
    enumr.half_ball(r2, cap, |c| {
        let v = combine(c, &red.reduced);
        if dot(&v, &v) <= radius * radius {
            f(&v);
        }
    })
}

fn rat(x: i128, d: &BigInt) -> BigRational {
    BigRational::new(BigInt::from(x), d.clone())
}

/// All nonzero lattice vectors with l1 norm at most `radius`, both signs.
pub fn enumerate_within_l1(lat: &Lattice, radius: &BigRational) -> Result<Vec<Vec<BigRational>>> {
    enumerate_within_l1_capped(lat, radius, crate::enumeration_cap())
}

pub fn enumerate_within_l1_capped(lat: &Lattice, radius: &BigRational, cap: usize) -> Result<Vec<Vec<BigRational>>> {
    if !radius.is_positive() {
        return Err(Error::InvalidArgument("radius must be positive".into()));
    }
    let frame = ExactFrame::new(lat)?;
    let r = (radius * BigRational::from_integer(frame.scale.clone())).floor().to_integer();
    let r = r.to_i128().ok_or(Error::Overflow("enumeration radius"))?;
    let half = frame.half_within(r, cap)?;
    let mut out = Vec::with_capacity(2 * half.len());
    for (_, v) in half {
        out.push(v.iter().map(|&x| rat(x, &frame.scale)).collect::<Vec<_>>());
        out.push(v.iter().map(|&x| rat(-x, &frame.scale)).collect());
    }
    Ok(out)
}

/// Float-lattice variant; norms within the relative tolerance count as inside.
pub fn enumerate_within_l1_float(lat: &FloatLattice, radius: f64) -> Result<Vec<Vec<f64>>> {
    let mut out = Vec::new();
    for (_, v) in float_half_within(lat, radius, crate::enumeration_cap())? {
        out.push(v.iter().map(|x| -x).collect());
        out.push(v);
    }
    Ok(out)
}

fn float_half_within(lat: &FloatLattice, radius: f64, cap: usize) -> Result<Vec<(Vec<i64>, Vec<f64>)>> {
    if !(radius > 0.0) {
        return Err(Error::InvalidArgument("radius must be positive".into()));
    }
    let red = lll(lat.basis(), 0.99);
    let enumr = Enumerator::new(&red.reduced);
    let lim = radius * (1.0 + FLOAT_NORM_TOL);
    let mut out = Vec::new();
    enumr.half_ball(lim * lim * (1.0 + 1e-9), cap, |c| {
        let v = combine(c, &red.reduced);
        if l1_f64(&v) <= lim {
            let n = c.len();
            let orig: Vec<i64> = (0..n).map(|j| c.iter().zip(&red.transform).map(|(&x, r)| x * r[j]).sum()).collect();
            let w = lat.vector(&orig);
            out.push((orig, w));
        }
    })?;
    Ok(out)
}

/// Shortest nonzero vectors in the l1 norm.
#[derive(Debug, Clone, Serialize)]
pub struct MinimalVectorSet {
    pub lambda1: f64,
    /// Exact minimum for rational lattices.
    #[serde(serialize_with = "ser_opt_rat")]
    pub lambda1_exact: Option<BigRational>,
    /// Minimal vectors, both signs.
    pub vectors: Vec<Vec<f64>>,
    /// Coordinates of `vectors` in the input basis.
    pub coefficients: Vec<Vec<i64>>,
}

fn ser_opt_rat<S: serde::Serializer>(x: &Option<BigRational>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match x {
        Some(r) => s.serialize_some(&r.to_string()),
        None => s.serialize_none(),
    }
}

impl MinimalVectorSet {
    pub fn kissing(&self) -> usize {
        self.vectors.len()
    }

    /// One representative of each +- pair (coefficients, vector).
    pub fn half(&self) -> impl Iterator<Item = (&Vec<i64>, &Vec<f64>)> {
        self.coefficients.iter().zip(&self.vectors).step_by(2)
    }
}

fn minkowski_l1_bound(n: usize, vol: f64) -> f64 {
    let fact: f64 = (1..=n).map(|k| k as f64).product();
    (fact * vol).powf(1.0 / n as f64)
}

/// Exact l1 minimum and minimal vectors of a rational lattice.
pub fn l1_minimum(lat: &Lattice) -> Result<MinimalVectorSet> {
    l1_minimum_capped(lat, crate::enumeration_cap())
}

pub fn l1_minimum_capped(lat: &Lattice, cap: usize) -> Result<MinimalVectorSet> {
    let frame = ExactFrame::new(lat)?;
    let n = lat.dim();
    let basis_min = frame.reduced_int.iter().map(|r| r.iter().map(|x| x.abs()).sum::<i128>()).min().unwrap_or(1);
    let vol = frame.basis_int.iter().map(|r| r.iter().map(|&x| x as f64).collect::<Vec<_>>()).collect::<Vec<_>>();
    let vol = FloatLattice::new(vol).map(|l| l.volume()).unwrap_or(f64::INFINITY);
    let mink = minkowski_l1_bound(n, vol).floor() as i128;
    let mut radius = basis_min.min(mink.max(1));
    loop {
        let half = frame.half_within(radius, cap)?;
        if let Some(min) = half.iter().map(|(_, v)| v.iter().map(|x| x.abs()).sum::<i128>()).min() {
            let d = &frame.scale;
            let lambda = rat(min, d);
            let mut vectors = Vec::new();
            let mut coefficients = Vec::new();
            for (c, v) in half.iter().filter(|(_, v)| v.iter().map(|x| x.abs()).sum::<i128>() == min) {
                let orig = frame.original_coeffs(c);
                let vf: Vec<f64> = v.iter().map(|&x| rat_to_f64(&rat(x, d))).collect();
                vectors.push(vf.clone());
                coefficients.push(orig.clone());
                vectors.push(vf.iter().map(|x| -x).collect());
                coefficients.push(orig.iter().map(|x| -x).collect());
            }
            return Ok(MinimalVectorSet { lambda1: rat_to_f64(&lambda), lambda1_exact: Some(lambda), vectors, coefficients });
        }
        radius *= 2;
    }
}

/// l1 minimum of a float lattice; norms within 1e-9 (relative) of the
/// minimum are grouped together.
pub fn l1_minimum_float(lat: &FloatLattice) -> Result<MinimalVectorSet> {
    let n = lat.dim();
    let red = lll(lat.basis(), 0.99);
    let basis_min = red.reduced.iter().map(|r| l1_f64(r)).fold(f64::INFINITY, f64::min);
    let mut radius = basis_min.min(minkowski_l1_bound(n, lat.volume()));
    let cap = crate::enumeration_cap();
    loop {
        let half = float_half_within(lat, radius, cap)?;
        if let Some(min) = half.iter().map(|(_, v)| l1_f64(v)).min_by(|a, b| a.total_cmp(b)) {
            let tol = FLOAT_NORM_TOL * min.max(1.0);
            let mut vectors = Vec::new();
            let mut coefficients = Vec::new();
            for (c, v) in half.iter().filter(|(_, v)| (l1_f64(v) - min).abs() <= tol) {
                vectors.push(v.clone());
                coefficients.push(c.clone());
                vectors.push(v.iter().map(|x| -x).collect());
                coefficients.push(c.iter().map(|x| -x).collect());
            }
            return Ok(MinimalVectorSet { lambda1: min, lambda1_exact: None, vectors, coefficients });
        }
        radius *= 2.0;
    }
}

/// Packing data of the cross-polytope packing induced by a lattice.
#[derive(Debug, Clone, Serialize)]
pub struct PackingReport {
    pub dimension: usize,
    pub lambda1: f64,
    pub volume: f64,
    /// lambda1^n / (n! vol)
    pub density: f64,
    pub kissing: usize,
    pub well_rounded: bool,
    pub strongly_well_rounded: bool,
    pub has_minimal_basis: bool,
    /// Coefficients (in the input basis) of a basis of minimal vectors.
    pub minimal_basis: Option<Vec<Vec<i64>>>,
    /// False if the exhaustive basis search was skipped for size.
    pub minimal_basis_search_complete: bool,
}

/// Limit on the number of n-subsets tried in the minimal-basis search.
pub const MINIMAL_BASIS_COMBINATIONS: u128 = 1_000_000;

pub fn packing_report(lat: &Lattice) -> Result<PackingReport> {
    let mvs = l1_minimum(lat)?;
    Ok(report_from(lat.dim(), lat.volume_f64(), &mvs))
}

pub fn packing_report_float(lat: &FloatLattice) -> Result<PackingReport> {
    let mvs = l1_minimum_float(lat)?;
    Ok(report_from(lat.dim(), lat.volume(), &mvs))
}

pub fn density(lambda1: f64, n: usize, volume: f64) -> f64 {
    let fact: f64 = (1..=n).map(|k| k as f64).product();
    lambda1.powi(n as i32) / (fact * volume)
}

pub(crate) fn report_from(n: usize, volume: f64, mvs: &MinimalVectorSet) -> PackingReport {
    let half: Vec<Vec<i64>> = mvs.half().map(|(c, _)| c.clone()).collect();
    let as_int: matrix::IntMatrix = half.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
    let h = matrix::hnf(&as_int);
    let well_rounded = h.len() == n;
    let strongly = well_rounded && h.iter().enumerate().all(|(i, r)| r[i].is_one());
    let (basis, complete) = if strongly { find_minimal_basis(&half, n) } else { (None, true) };
    PackingReport {
        dimension: n,
        lambda1: mvs.lambda1,
        volume,
        density: density(mvs.lambda1, n, volume),
        kissing: mvs.kissing(),
        well_rounded,
        strongly_well_rounded: strongly,
        has_minimal_basis: basis.is_some(),
        minimal_basis: basis,
        minimal_basis_search_complete: complete,
    }
}

fn det_i128(rows: &[&Vec<i64>]) -> Option<i128> {
    let n = rows.len();
    let mut a: Vec<Vec<i128>> = rows.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n.saturating_sub(1) {
        if a[k][k] == 0 {
            let p = (k + 1..n).find(|&i| a[i][k] != 0)?;
            a.swap(p, k);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = a[i][j].checked_mul(a[k][k])?.checked_sub(a[i][k].checked_mul(a[k][j])?)?;
                a[i][j] = v / prev;
            }
        }
        prev = a[k][k];
    }
    Some(sign * a[n - 1][n - 1])
}

fn is_unimodular(rows: &[&Vec<i64>]) -> bool {
    det_i128(rows).map_or(false, |d| d.abs() == 1)
}

/// Greedy pass, then an exhaustive search over n-subsets (bounded by
/// [`MINIMAL_BASIS_COMBINATIONS`]).
fn find_minimal_basis(half: &[Vec<i64>], n: usize) -> (Option<Vec<Vec<i64>>>, bool) {
    let mut chosen: Vec<Vec<i64>> = Vec::new();
    for v in half {
        let mut trial = chosen.clone();
        trial.push(v.clone());
        let as_int: matrix::IntMatrix = trial.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
        let h = matrix::hnf(&as_int);
        if h.len() == trial.len() {
            chosen = trial;
            if chosen.len() == n {
                break;
            }
        }
    }
    if chosen.len() == n && is_unimodular(&chosen.iter().collect::<Vec<_>>()) {
        return (Some(chosen), true);
    }
    let k = half.len();
    let combos = binomial(k as u128, n as u128);
    if combos > MINIMAL_BASIS_COMBINATIONS {
        return (None, false);
    }
    let mut idx: Vec<usize> = (0..n).collect();
    if k < n {
        return (None, true);
    }
    loop {
        let rows: Vec<&Vec<i64>> = idx.iter().map(|&i| &half[i]).collect();
        if is_unimodular(&rows) {
            return (Some(rows.into_iter().cloned().collect()), true);
        }
        // next combination
        let mut i = n;
        loop {
            if i == 0 {
                return (None, true);
            }
            i -= 1;
            if idx[i] < k - n + i {
                idx[i] += 1;
                for j in i + 1..n {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let mut r: u128 = 1;
    for i in 0..k {
        r = r.saturating_mul(n - i) / (i + 1);
    }
    r
}

/// Number of +- pairs of minimal vectors with max-norm at most lambda1 / 2.
pub fn halfnorm_pair_count(mvs: &MinimalVectorSet) -> usize {
    let lim = mvs.lambda1 / 2.0 * (1.0 + FLOAT_NORM_TOL);
    mvs.half().filter(|(_, v)| v.iter().all(|x| x.abs() <= lim)).count()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(p: i64, q: i64) -> BigRational {
        BigRational::new(BigInt::from(p), BigInt::from(q))
    }

    #[test]
    fn lll_identity_is_fixed() {
        let z = Lattice::standard(3);
        assert_eq!(lll_reduce(&z, 0.99).unwrap().basis(), z.basis());
    }

    #[test]
    fn lll_skewed_2d() {
        let lat = Lattice::from_integer_rows(&[vec![1, 0], vec![100, 1]]).unwrap();
        let red = lll_reduce(&lat, 0.99).unwrap();
        assert_eq!(red, lat);
        for row in red.to_float().basis() {
            assert!(row.iter().map(|x| x * x).sum::<f64>().sqrt() <= 2f64.sqrt() + 1e-12);
        }
    }

    #[test]
    fn ball_enumeration_z2() {
        let v = enumerate_within_l1(&Lattice::standard(2), &r(1, 1)).unwrap();
        assert_eq!(v.len(), 4);
    }

    #[test]
    fn minimum_of_zn_and_dn() {
        for n in 2..6 {
            let z = l1_minimum(&Lattice::standard(n)).unwrap();
            assert_eq!(z.lambda1_exact, Some(r(1, 1)));
            assert_eq!(z.kissing(), 2 * n);
        }
        for n in 3..7 {
            let d = crate::construction_a(&crate::LinearCode::even_weight(n)).to_lattice();
            let m = l1_minimum(&d).unwrap();
            assert_eq!(m.lambda1_exact, Some(r(2, 1)));
            assert_eq!(m.kissing(), 2 * n * n);
        }
    }

    #[test]
    fn minimal_vectors_are_closed_under_negation() {
        let lat = Lattice::from_integer_rows(&[vec![3, -2, 1], vec![1, 3, -2], vec![-2, 1, 3]]).unwrap();
        let m = l1_minimum(&lat).unwrap();
        for pair in m.vectors.chunks(2) {
            assert!(pair[0].iter().zip(&pair[1]).all(|(a, b)| a == &-b));
        }
    }

    #[test]
    fn zn_report() {
        let rep = packing_report(&Lattice::standard(4)).unwrap();
        assert!((rep.density - 1.0 / 24.0).abs() < 1e-15);
        assert!(rep.well_rounded && rep.strongly_well_rounded && rep.has_minimal_basis);
    }

    #[test]
    fn halfnorm_examples() {
        let z = l1_minimum(&Lattice::standard(3)).unwrap();
        assert_eq!(halfnorm_pair_count(&z), 0);
        let h = Lattice::new(vec![vec![r(1, 2), r(1, 2)], vec![r(1, 2), r(-1, 2)]]).unwrap();
        let m = l1_minimum(&h).unwrap();
        assert_eq!(m.lambda1_exact, Some(r(1, 1)));
        assert_eq!(halfnorm_pair_count(&m), 2);
        let rep = packing_report(&h).unwrap();
        assert!((rep.density - 1.0).abs() < 1e-15);
    }

    #[test]
    fn float_minimum_matches_exact() {
        let lat = Lattice::from_integer_rows(&[vec![3, -2, 1], vec![1, 3, -2], vec![-2, 1, 3]]).unwrap();
        let e = l1_minimum(&lat).unwrap();
        let f = l1_minimum_float(&lat.to_float()).unwrap();
        assert_eq!(e.kissing(), f.kissing());
        assert!((e.lambda1 - f.lambda1).abs() < 1e-12);
    }
}
