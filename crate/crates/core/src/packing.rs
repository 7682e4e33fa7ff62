//! Search for locally critical lattice packings of the cross-polytope.
//!
//! A minimal configuration M is a set of integer coefficient vectors that a
//! basis B should map to l1-unit lattice vectors. For each M the program
//! minimizes det(B)^2 subject to |xB|_1 = 1 on M and |xB|_1 >= 1 on a finite
//! set S_M, grown lazily from vectors that enumeration finds below 1.

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{self, PackingReport};
use crate::lattice::FloatLattice;

fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

/// Largest coefficient a minimal configuration may contain: n! in general,
/// 2^((1-n)/2) n! when the basis entries are bounded by 1/2.
pub fn coefficient_bound(n: usize, half_box: bool) -> i64 {
    let f = factorial(n) as f64;
    let b = if half_box { (2f64.powf((1.0 - n as f64) / 2.0) * f + 1e-9).floor() } else { f };
    (b as i64).max(1)
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Flip the sign so that the first nonzero entry is positive.
fn normalize_sign(v: &mut [i64]) {
    if v.iter().find(|&&x| x != 0).is_some_and(|&x| x < 0) {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

/// Lower bound on |xB|_1 implied by the unit basis vectors having norm 1
/// and every nonzero lattice vector having norm at least 1.
fn norm_lower_bound(x: &[i64]) -> i64 {
    let g = x.iter().fold(0, |a, &b| gcd(a, b));
    if g == 0 {
        return 0;
    }
    let max = x.iter().map(|v| v.abs()).max().unwrap_or(0) / g;
    let l1: i64 = x.iter().map(|v| v.abs()).sum::<i64>() / g;
    g * (2 * max - l1).max(1)
}

/// Consistency of a single member: primitive and not forced above norm 1 by
/// the reverse triangle inequality against the basis.
fn member_consistent(x: &[i64]) -> bool {
    x.iter().any(|&v| v != 0) && norm_lower_bound(x) <= 1
}

/// Consistency of two members: x +- y has norm at most 2.
fn pair_consistent(x: &[i64], y: &[i64]) -> bool {
    [1, -1].iter().all(|&s| {
        let z: Vec<i64> = x.iter().zip(y).map(|(a, b)| a + s * b).collect();
        z.iter().all(|&v| v == 0) || norm_lower_bound(&z) <= 2
    })
}

/// Candidate minimal coefficient vectors, one per +- pair, with unit vectors
/// e_1..e_n always present.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct MinimalConfiguration {
    pub n: usize,
    pub vectors: Vec<Vec<i64>>,
}

impl MinimalConfiguration {
    /// Validates and normalizes (sign, order, duplicates) a configuration.
    pub fn new(n: usize, vectors: Vec<Vec<i64>>) -> Result<Self> {
        Self::build(n, vectors, true)
    }

    /// Like [`MinimalConfiguration::new`] without the minimum size, for the
    /// configuration a lattice actually attains.
    pub fn attained(n: usize, vectors: Vec<Vec<i64>>) -> Result<Self> {
        Self::build(n, vectors, false)
    }

    fn build(n: usize, vectors: Vec<Vec<i64>>, check_size: bool) -> Result<Self> {
        let mut set = BTreeSet::new();
        for mut v in vectors {
            if v.len() != n {
                return Err(Error::InvalidArgument(format!("configuration vector of length {} in dimension {n}", v.len())));
            }
            if !member_consistent(&v) {
                return Err(Error::InvalidArgument(format!("{v:?} cannot be a minimal vector (triangle inequality)")));
            }
            normalize_sign(&mut v);
            set.insert(v);
        }
        for i in 0..n {
            let e: Vec<i64> = (0..n).map(|j| (i == j) as i64).collect();
            if !set.contains(&e) {
                return Err(Error::InvalidArgument(format!("configuration lacks unit vector e_{}", i + 1)));
            }
        }
        if check_size && set.len() < n * (n + 1) / 2 {
            return Err(Error::InvalidArgument(format!("configuration has {} pairs, need at least {}", set.len(), n * (n + 1) / 2)));
        }
        let vectors: Vec<Vec<i64>> = set.into_iter().collect();
        for (i, x) in vectors.iter().enumerate() {
            for y in &vectors[i + 1..] {
                if !pair_consistent(x, y) {
                    return Err(Error::InvalidArgument(format!("{x:?} and {y:?} cannot both be minimal (triangle inequality)")));
                }
            }
        }
        Ok(MinimalConfiguration { n, vectors })
    }

    /// Representative of the orbit under signed permutations of coordinates.
    pub fn canonical(&self) -> MinimalConfiguration {
        let n = self.n;
        let mut best: Option<Vec<Vec<i64>>> = None;
        for perm in permutations(n) {
            for mask in 0u32..(1 << n) {
                let mut img: Vec<Vec<i64>> = self
                    .vectors
                    .iter()
                    .map(|v| {
                        let mut w = vec![0; n];
                        for i in 0..n {
                            w[perm[i]] = if mask >> i & 1 == 1 { -v[i] } else { v[i] };
                        }
                        normalize_sign(&mut w);
                        w
                    })
                    .collect();
                img.sort();
                if best.as_ref().map_or(true, |b| img < *b) {
                    best = Some(img);
                }
            }
        }
        MinimalConfiguration { n, vectors: best.unwrap_or_default() }
    }

    fn max_coefficient(&self) -> i64 {
        self.vectors.iter().flatten().map(|x| x.abs()).max().unwrap_or(0)
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    heap_permute(n, &mut p, &mut out);
    out
}

fn heap_permute(k: usize, p: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if k <= 1 {
        out.push(p.clone());
        return;
    }
    for i in 0..k {
        heap_permute(k - 1, p, out);
        if k % 2 == 0 {
            p.swap(i, k - 1);
        } else {
            p.swap(0, k - 1);
        }
    }
}

fn unit(n: usize, i: usize) -> Vec<i64> {
    (0..n).map(|j| (i == j) as i64).collect()
}

/// Integer vectors with max-norm at most `cap`, one per +- pair, excluding 0.
fn box_points(n: usize, cap: i64) -> Vec<Vec<i64>> {
    let side = (2 * cap + 1) as usize;
    let total = side.pow(n as u32);
    let mut out = Vec::new();
    for mut k in 0..total {
        let mut v = vec![0i64; n];
        for x in v.iter_mut() {
            *x = (k % side) as i64 - cap;
            k /= side;
        }
        if v.iter().find(|&&x| x != 0).is_some_and(|&x| x > 0) {
            out.push(v);
        }
    }
    out
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).map(|i| (n - i) as f64 / (i + 1) as f64).product()
}

/// Exhaustive enumeration is used below this many subsets.
const EXHAUSTIVE_SUBSETS: f64 = 2e6;

/// Consistent minimal configurations of the minimum size n(n+1)/2, up to
/// signed permutations, ordered by largest coefficient (ties shuffled by
/// `seed`) and truncated to `count_target`. Random subsets are sampled when
/// the exhaustive space is too large.
pub fn enumerate_configurations(n: usize, coeff_cap: i64, count_target: usize, seed: u64) -> Vec<MinimalConfiguration> {
    if n == 0 || coeff_cap < 1 || count_target == 0 {
        return Vec::new();
    }
    let cap = coeff_cap.min(coefficient_bound(n, false));
    let units: Vec<Vec<i64>> = (0..n).map(|i| unit(n, i)).collect();
    let cands: Vec<Vec<i64>> = box_points(n, cap)
        .into_iter()
        .filter(|v| !units.contains(v) && member_consistent(v) && units.iter().all(|e| pair_consistent(v, e)))
        .collect();
    let k = n * (n + 1) / 2 - n;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut found = BTreeSet::new();
    let push = |extra: &[&Vec<i64>], found: &mut BTreeSet<MinimalConfiguration>| {
        for (i, x) in extra.iter().enumerate() {
            if extra[i + 1..].iter().any(|y| !pair_consistent(x, y)) {
                return;
            }
        }
        let mut vectors = units.clone();
        vectors.extend(extra.iter().map(|v| (*v).clone()));
        if let Ok(cfg) = MinimalConfiguration::new(n, vectors) {
            found.insert(cfg.canonical());
        }
    };
    if cands.len() < k {
        return Vec::new();
    }
    if binomial(cands.len(), k) <= EXHAUSTIVE_SUBSETS {
        let mut idx: Vec<usize> = (0..k).collect();
        loop {
            let extra: Vec<&Vec<i64>> = idx.iter().map(|&i| &cands[i]).collect();
            push(&extra, &mut found);
            let mut i = k;
            while i > 0 && idx[i - 1] == cands.len() - k + i - 1 {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            idx[i - 1] += 1;
            for j in i..k {
                idx[j] = idx[j - 1] + 1;
            }
        }
    } else {
        let attempts = 200 * count_target;
        for _ in 0..attempts {
            let extra: Vec<&Vec<i64>> = cands.choose_multiple(&mut rng, k).collect();
            push(&extra, &mut found);
            if found.len() >= 4 * count_target {
                break;
            }
        }
    }
    let mut list: Vec<MinimalConfiguration> = found.into_iter().collect();
    list.shuffle(&mut rng);
    list.sort_by_key(|c| c.max_coefficient());
    list.truncate(count_target);
    list
}

/// The nonlinear program for one configuration.
#[derive(Debug, Clone)]
pub struct NlpProblem {
    pub n: usize,
    /// Equality constraints |xB|_1 = 1.
    pub equalities: Vec<Vec<i64>>,
    /// Inequality constraints |xB|_1 >= 1.
    pub inequalities: Vec<Vec<i64>>,
    /// Enforce |B_ij| <= 1/2.
    pub half_box: bool,
}

impl NlpProblem {
    /// S_M starts as the consistent points of the coefficient box.
    pub fn new(cfg: &MinimalConfiguration, coeff_cap: i64, half_box: bool) -> Self {
        let n = cfg.n;
        let cap = coeff_cap.max(1).min(coefficient_bound(n, half_box));
        let inequalities = box_points(n, cap).into_iter().filter(|v| member_consistent(v) && !cfg.vectors.contains(v)).collect();
        NlpProblem { n, equalities: cfg.vectors.clone(), inequalities, half_box }
    }

    fn add_inequality(&mut self, mut v: Vec<i64>) -> bool {
        normalize_sign(&mut v);
        if self.equalities.contains(&v) || self.inequalities.contains(&v) {
            false
        } else {
            self.inequalities.push(v);
            true
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PackingOptions {
    pub coeff_cap: i64,
    pub half_box: bool,
    pub multistarts: usize,
    pub seed: u64,
    /// Configurations tried by [`search`].
    pub count_target: usize,
    /// Lazy-constraint rounds before giving up.
    pub max_rounds: usize,
    pub kkt_tol: f64,
    /// Standard deviation of the multistart perturbation.
    pub init_sigma: f64,
}

impl Default for PackingOptions {
    fn default() -> Self {
        PackingOptions {
            coeff_cap: 2,
            half_box: false,
            multistarts: 10,
            seed: 0,
            count_target: 100,
            max_rounds: 20,
            kkt_tol: 1e-8,
            init_sigma: 0.2,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PackingSolution {
    /// Basis rows, scaled so that the l1 minimum is 1.
    pub basis: Vec<Vec<f64>>,
    pub achieved_det: f64,
    pub report: PackingReport,
    /// Minimal vectors attained, as coefficients in `basis`.
    pub configuration: MinimalConfiguration,
    pub kkt_residual: f64,
    pub fingerprint: Vec<(f64, usize)>,
}

impl PackingSolution {
    pub fn density(&self) -> f64 {
        self.report.density
    }

    pub fn lattice(&self) -> FloatLattice {
        FloatLattice::new(self.basis.clone()).expect("nonsingular")
    }
}

type Mat = DMatrix<f64>;

fn to_mat(n: usize, x: &[f64]) -> Mat {
    Mat::from_row_slice(n, n, x)
}

fn rows_of(b: &Mat) -> Vec<Vec<f64>> {
    (0..b.nrows()).map(|i| b.row(i).iter().copied().collect()).collect()
}

fn flat(b: &Mat) -> Vec<f64> {
    rows_of(b).concat()
}

fn image(x: &[f64], b: &Mat) -> Vec<f64> {
    let n = b.nrows();
    (0..n).map(|i| (0..n).map(|j| x[j] * b[(j, i)]).sum()).collect()
}

fn as_f64(v: &[Vec<i64>]) -> Vec<Vec<f64>> {
    v.iter().map(|r| r.iter().map(|&x| x as f64).collect()).collect()
}

/// Limited-memory BFGS with Armijo backtracking.
fn lbfgs<F: FnMut(&[f64]) -> (f64, Vec<f64>)>(x0: Vec<f64>, iters: usize, mut f: F) -> Vec<f64> {
    const MEMORY: usize = 10;
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let mut x = x0;
    let (mut fx, mut g) = f(&x);
    let mut hist: Vec<(Vec<f64>, Vec<f64>, f64)> = Vec::new();
    for _ in 0..iters {
        let mut q = g.clone();
        let mut alphas = Vec::with_capacity(hist.len());
        for (s, y, rho) in hist.iter().rev() {
            let a = rho * dot(s, &q);
            q.iter_mut().zip(y).for_each(|(qi, yi)| *qi -= a * yi);
            alphas.push(a);
        }
        if let Some((s, y, _)) = hist.last() {
            let gamma = dot(s, y) / dot(y, y);
            q.iter_mut().for_each(|qi| *qi *= gamma);
        }
        for ((s, y, rho), a) in hist.iter().zip(alphas.iter().rev()) {
            let b = rho * dot(y, &q);
            q.iter_mut().zip(s).for_each(|(qi, si)| *qi += si * (a - b));
        }
        let mut d: Vec<f64> = q.iter().map(|v| -v).collect();
        let mut slope = dot(&g, &d);
        if slope >= 0.0 {
            d = g.iter().map(|v| -v).collect();
            slope = -dot(&g, &g);
        }
        let mut t = 1.0;
        let (xn, fnew, gn) = loop {
            let xn: Vec<f64> = x.iter().zip(&d).map(|(a, b)| a + t * b).collect();
            let (fnew, gn) = f(&xn);
            if (fnew.is_finite() && fnew <= fx + 1e-4 * t * slope) || t < 1e-20 {
                break (xn, fnew, gn);
            }
            t *= 0.5;
        };
        if !fnew.is_finite() {
            break;
        }
        let s: Vec<f64> = xn.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = gn.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-300 {
            hist.push((s.clone(), y, 1.0 / sy));
            if hist.len() > MEMORY {
                hist.remove(0);
            }
        }
        let step = dot(&s, &s).sqrt();
        x = xn;
        fx = fnew;
        g = gn;
        if dot(&g, &g).sqrt() < 1e-12 || step < 1e-16 {
            break;
        }
    }
    x
}

/// Augmented Lagrangian with the smoothed norm |t| ~ sqrt(t^2 + eps^2),
/// eps annealed from 1e-2 to 1e-8. Returns the last iterate and the largest
/// equality violation.
fn augmented_lagrangian(prob: &NlpProblem, b0: &Mat) -> (Mat, f64) {
    let n = prob.n;
    let eq = as_f64(&prob.equalities);
    let ineq = as_f64(&prob.inequalities);
    let nbox = if prob.half_box { n * n } else { 0 };
    let mut lam = vec![0.0; eq.len()];
    let mut mu = vec![0.0; ineq.len() + nbox];
    let mut rho = 10.0;
    let mut x = flat(b0);
    let mut viol = f64::INFINITY;
    for eps in [1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8] {
        for _ in 0..20 {
            let lagrangian = |x: &[f64]| -> (f64, Vec<f64>) {
                let b = to_mat(n, x);
                let det = b.determinant();
                let mut grad = vec![0.0; n * n];
                if let Some(inv) = b.clone().try_inverse() {
                    for i in 0..n {
                        for j in 0..n {
                            grad[i * n + j] = 2.0 * det * det * inv[(j, i)];
                        }
                    }
                }
                let mut val = det * det;
                let add_row = |row: &[f64], weight: f64, grad: &mut [f64]| {
                    let v = image(row, &b);
                    for (i, vi) in v.iter().enumerate() {
                        let dphi = vi / (vi * vi + eps * eps).sqrt();
                        for (j, xj) in row.iter().enumerate() {
                            grad[j * n + i] += weight * xj * dphi;
                        }
                    }
                };
                for (k, row) in eq.iter().enumerate() {
                    let h = smoothed_norm(row, &b, eps) - 1.0;
                    val += lam[k] * h + rho / 2.0 * h * h;
                    add_row(row, lam[k] + rho * h, &mut grad);
                }
                for (l, row) in ineq.iter().enumerate() {
                    let g = smoothed_norm(row, &b, eps) - 1.0;
                    let z = (mu[l] - rho * g).max(0.0);
                    val += (z * z - mu[l] * mu[l]) / (2.0 * rho);
                    add_row(row, -z, &mut grad);
                }
                for k in 0..nbox {
                    let g = 0.25 - x[k] * x[k];
                    let m = mu[ineq.len() + k];
                    let z = (m - rho * g).max(0.0);
                    val += (z * z - m * m) / (2.0 * rho);
                    grad[k] += z * 2.0 * x[k];
                }
                (val, grad)
            };
            x = lbfgs(x, 300, lagrangian);
            let b = to_mat(n, &x);
            viol = 0.0f64;
            for (k, row) in eq.iter().enumerate() {
                let h = smoothed_norm(row, &b, eps) - 1.0;
                lam[k] += rho * h;
                viol = viol.max(h.abs());
            }
            for (l, row) in ineq.iter().enumerate() {
                let g = smoothed_norm(row, &b, eps) - 1.0;
                mu[l] = (mu[l] - rho * g).max(0.0);
                viol = viol.max(-g);
            }
            for k in 0..nbox {
                let g = 0.25 - x[k] * x[k];
                let m = &mut mu[ineq.len() + k];
                *m = (*m - rho * g).max(0.0);
                viol = viol.max(-g);
            }
            if viol < 0.1 * eps {
                break;
            }
            rho = (rho * 2.0).min(1e8);
        }
    }
    (to_mat(n, &x), viol)
}

fn smoothed_norm(row: &[f64], b: &Mat, eps: f64) -> f64 {
    image(row, b).iter().map(|v| (v * v + eps * eps).sqrt()).sum()
}

/// Entries of xB below this are treated as sitting on the kink of |t|.
const ZERO_COORD: f64 = 1e-6;

/// Linearized active constraints at b: each active vector contributes its
/// frozen-sign norm row plus a row (xB)_i = 0 per coordinate on the kink;
/// box-active entries contribute B_ij = +-1/2.
fn active_rows(active: &[Vec<f64>], b: &Mat, half_box: bool) -> (Vec<Vec<f64>>, Vec<f64>) {
    let n = b.nrows();
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for x in active {
        let v = image(x, b);
        let mut row = vec![0.0; n * n];
        let mut norm = 0.0;
        for (i, vi) in v.iter().enumerate() {
            if vi.abs() <= ZERO_COORD {
                let mut z = vec![0.0; n * n];
                for (j, xj) in x.iter().enumerate() {
                    z[j * n + i] = *xj;
                }
                rows.push(z);
                rhs.push(-vi);
            } else {
                let s = vi.signum();
                norm += vi.abs();
                for (j, xj) in x.iter().enumerate() {
                    row[j * n + i] = xj * s;
                }
            }
        }
        rows.push(row);
        rhs.push(1.0 - norm);
    }
    if half_box {
        for i in 0..n {
            for j in 0..n {
                let bij = b[(i, j)];
                if bij.abs() >= 0.5 - 1e-7 {
                    let mut e = vec![0.0; n * n];
                    e[i * n + j] = 1.0;
                    rows.push(e);
                    rhs.push(0.5 * bij.signum() - bij);
                }
            }
        }
    }
    (rows, rhs)
}

fn pinv_solve(a: &Mat, r: &DVector<f64>) -> Option<DVector<f64>> {
    let svd = a.clone().svd(true, true);
    let tol = 1e-12 * svd.singular_values.max();
    svd.solve(r, tol).ok()
}

/// Newton iterations on the KKT system of min log|det B| subject to the
/// active constraints with frozen sign patterns.
fn polish(b0: &Mat, active: &[Vec<f64>], half_box: bool) -> Option<Mat> {
    let n = b0.nrows();
    let nn = n * n;
    let mut b = b0.clone();
    for _ in 0..60 {
        let inv = b.clone().try_inverse()?;
        let (rows, rhs) = active_rows(active, &b, half_box);
        let m = rows.len();
        let mut k = Mat::zeros(nn + m, nn + m);
        let mut r = DVector::zeros(nn + m);
        for i in 0..n {
            for j in 0..n {
                r[i * n + j] = -inv[(j, i)];
                for kk in 0..n {
                    for l in 0..n {
                        k[(i * n + j, kk * n + l)] = -inv[(j, kk)] * inv[(l, i)];
                    }
                }
            }
        }
        for (c, (row, h)) in rows.iter().zip(&rhs).enumerate() {
            for (p, &v) in row.iter().enumerate() {
                k[(nn + c, p)] = v;
                k[(p, nn + c)] = v;
            }
            r[nn + c] = *h;
        }
        let sol = pinv_solve(&k, &r)?;
        let d = Mat::from_row_slice(n, n, &sol.as_slice()[..nn]);
        b += &d;
        if !b.iter().all(|x| x.is_finite()) {
            return None;
        }
        if d.norm() < 1e-15 * b.norm() {
            break;
        }
    }
    Some(b)
}

/// Relative residual of the stationarity condition grad log|det B| in the
/// span of the active constraint gradients.
fn kkt_residual(b: &Mat, active: &[Vec<f64>], half_box: bool) -> f64 {
    let n = b.nrows();
    let Some(inv) = b.clone().try_inverse() else { return f64::INFINITY };
    let (rows, _) = active_rows(active, b, half_box);
    if rows.is_empty() {
        return 1.0;
    }
    let g = DVector::from_iterator(n * n, (0..n * n).map(|p| inv[(p % n, p / n)]));
    let at = Mat::from_fn(n * n, rows.len(), |p, c| rows[c][p]);
    match pinv_solve(&at, &g) {
        Some(nu) => (&g - &at * nu).norm() / g.norm(),
        None => f64::INFINITY,
    }
}

/// Solutions are told apart by the first shells of their l1 theta series.
pub const FINGERPRINT_SHELLS: usize = 5;

/// Sorted theta prefix: (norm, count) for the first shells of the lattice,
/// norms rounded to 1e-9.
pub fn fingerprint(lat: &FloatLattice) -> Result<Vec<(f64, usize)>> {
    let lambda = geometry::l1_minimum_float(lat)?.lambda1;
    let mut radius = 2.0 * lambda;
    loop {
        let vecs = geometry::enumerate_within_l1_float(lat, radius)?;
        let mut shells: BTreeMap<i64, usize> = BTreeMap::new();
        for v in vecs {
            let norm: f64 = v.iter().map(|x| x.abs()).sum();
            if norm > 0.0 {
                *shells.entry((norm * 1e9).round() as i64).or_default() += 1;
            }
        }
        if shells.len() >= FINGERPRINT_SHELLS || radius > 8.0 * lambda {
            return Ok(shells.into_iter().take(FINGERPRINT_SHELLS).map(|(k, c)| (k as f64 * 1e-9, c)).collect());
        }
        radius *= 1.5;
    }
}

fn finish(b: &Mat, active: &[Vec<f64>], half_box: bool) -> Result<PackingSolution> {
    let n = b.nrows();
    let lat = FloatLattice::new(rows_of(b))?;
    let mvs = geometry::l1_minimum_float(&lat)?;
    let b = b / mvs.lambda1;
    let lat = FloatLattice::new(rows_of(&b))?;
    let report = geometry::packing_report_float(&lat)?;
    let mvs = geometry::l1_minimum_float(&lat)?;
    let mut attained: Vec<Vec<f64>> = mvs.half().map(|(c, _)| c.iter().map(|&x| x as f64).collect()).collect();
    attained.extend(active.iter().filter(|x| (image(x, &b).iter().map(|v| v.abs()).sum::<f64>() - 1.0).abs() < 1e-9).cloned());
    let configuration = MinimalConfiguration::attained(n, mvs.half().map(|(c, _)| c.clone()).collect())
        .unwrap_or_else(|_| MinimalConfiguration { n, vectors: mvs.half().map(|(c, _)| c.clone()).collect() });
    Ok(PackingSolution {
        kkt_residual: kkt_residual(&b, &attained, half_box),
        achieved_det: b.determinant(),
        fingerprint: fingerprint(&lat)?,
        basis: rows_of(&b),
        report,
        configuration,
    })
}

/// Solves the program for one configuration from the start `b0` (rows).
pub fn solve_configuration(cfg: &MinimalConfiguration, opts: &PackingOptions, b0: &[Vec<f64>]) -> Result<PackingSolution> {
    let n = cfg.n;
    if b0.len() != n || b0.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidArgument("initial basis has the wrong shape".into()));
    }
    let mut prob = NlpProblem::new(cfg, opts.coeff_cap, opts.half_box);
    let mut b = to_mat(n, &b0.concat());
    for _ in 0..opts.max_rounds {
        let (smooth, viol) = augmented_lagrangian(&prob, &b);
        if !(viol < 1e-4) || smooth.determinant().abs() < 1e-12 {
            return Err(Error::Infeasible(format!("constraint violation {viol:e} after smoothing")));
        }
        let mut active: Vec<Vec<f64>> = as_f64(&prob.equalities);
        active
            .extend(as_f64(&prob.inequalities).into_iter().filter(|x| image(x, &smooth).iter().map(|v| v.abs()).sum::<f64>() < 1.0 + 1e-6));
        b = match polish(&smooth, &active, prob.half_box) {
            Some(p) if max_violation(&p, &prob) < 1e-9 => p,
            _ => smooth,
        };
        let lat = FloatLattice::new(rows_of(&b))?;
        let mvs = geometry::l1_minimum_float(&lat)?;
        if mvs.lambda1 >= 1.0 - 1e-9 {
            let sol = finish(&b, &active, prob.half_box)?;
            if sol.kkt_residual > opts.kkt_tol {
                return Err(Error::NoConvergence(format!("KKT residual {:e}", sol.kkt_residual)));
            }
            return Ok(sol);
        }
        let mut added = false;
        for (c, _) in mvs.half() {
            added |= prob.add_inequality(c.clone());
        }
        if !added {
            return Err(Error::NoConvergence("admissibility violated by constrained vectors".into()));
        }
    }
    Err(Error::NoConvergence(format!("{} lazy-constraint rounds", opts.max_rounds)))
}

fn max_violation(b: &Mat, prob: &NlpProblem) -> f64 {
    let norm = |x: &Vec<i64>| image(&x.iter().map(|&v| v as f64).collect::<Vec<_>>(), b).iter().map(|v| v.abs()).sum::<f64>();
    let eq = prob.equalities.iter().map(|x| (norm(x) - 1.0).abs()).fold(0.0, f64::max);
    let ineq = prob.inequalities.iter().map(|x| 1.0 - norm(x)).fold(0.0, f64::max);
    let bx = if prob.half_box { b.iter().map(|x| x.abs() - 0.5).fold(0.0, f64::max) } else { 0.0 };
    eq.max(ineq).max(bx)
}

/// Multistart initial basis: identity plus N(0, sigma) noise for even
/// `start`, a random orthogonal matrix for odd `start`; rows rescaled to
/// unit l1 norm.
pub fn initial_basis(n: usize, sigma: f64, start: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let mut b = if start % 2 == 0 {
        Mat::from_fn(n, n, |i, j| (i == j) as u8 as f64 + sigma * rng.sample::<f64, _>(StandardNormal))
    } else {
        let g = Mat::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
        g.qr().q()
    };
    for i in 0..n {
        let s: f64 = b.row(i).iter().map(|x| x.abs()).sum();
        b.row_mut(i).iter_mut().for_each(|x| *x /= s);
    }
    rows_of(&b)
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Enumerates configurations, solves each from `multistarts` starts in
/// parallel, and returns distinct solutions ranked by density (ties by
/// fingerprint).
pub fn search(n: usize, opts: &PackingOptions) -> Result<Vec<PackingSolution>> {
    if n == 0 {
        return Err(Error::InvalidArgument("dimension must be positive".into()));
    }
    let configs = enumerate_configurations(n, opts.coeff_cap, opts.count_target, opts.seed);
    let jobs: Vec<(usize, usize)> = (0..configs.len()).flat_map(|c| (0..opts.multistarts.max(1)).map(move |s| (c, s))).collect();
    let mut sols: Vec<PackingSolution> = jobs
        .par_iter()
        .filter_map(|&(c, s)| {
            let mut rng = rng_for(opts.seed, (c * opts.multistarts.max(1) + s) as u64);
            let b0 = initial_basis(n, opts.init_sigma, s, &mut rng);
            solve_configuration(&configs[c], opts, &b0).ok()
        })
        .collect();
    sols.sort_by(|a, b| {
        b.density()
            .partial_cmp(&a.density())
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| a.fingerprint.partial_cmp(&b.fingerprint).unwrap_or(std::cmp::Ordering::Equal))
    });
    let mut out: Vec<PackingSolution> = Vec::new();
    for s in sols {
        if !out.iter().any(|o| o.fingerprint == s.fingerprint && (o.density() - s.density()).abs() < 1e-9) {
            out.push(s);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct CriticalityDiagnostics {
    pub well_rounded: bool,
    pub kissing: usize,
    /// kissing >= n(n+1)
    pub kissing_lower: bool,
    /// kissing <= 3^n - 1
    pub kissing_upper: bool,
    pub halfnorm_pairs: usize,
    /// at least n(n-1)/2 pairs with max-norm <= lambda1/2
    pub halfnorm_ok: bool,
    pub perturbations: usize,
    /// Largest decrease of |det| among admissible perturbations.
    pub worst_det_decrease: f64,
    pub perturbation_ok: bool,
    pub passed: bool,
}

pub const PERTURBATION_SIZE: f64 = 1e-4;
pub const PERTURBATION_SAMPLES: usize = 200;

/// Local criticality checks; the perturbation test rescales each perturbed
/// basis to l1 minimum 1 (which keeps it admissible) and compares |det|.
pub fn verify_local_criticality(basis: &[Vec<f64>], seed: u64) -> Result<CriticalityDiagnostics> {
    let lat = FloatLattice::new(basis.to_vec())?;
    let n = lat.dim();
    let mvs = geometry::l1_minimum_float(&lat)?;
    let report = geometry::report_from(n, lat.volume(), &mvs);
    let kissing = mvs.kissing();
    let halfnorm_pairs = geometry::halfnorm_pair_count(&mvs);
    let det0 = lat.volume() / mvs.lambda1.powi(n as i32);
    let worst = (0..PERTURBATION_SAMPLES)
        .into_par_iter()
        .map(|k| -> Result<f64> {
            let mut rng = rng_for(seed, k as u64);
            let pert: Vec<Vec<f64>> =
                basis.iter().map(|r| r.iter().map(|x| x + PERTURBATION_SIZE * rng.sample::<f64, _>(StandardNormal)).collect()).collect();
            let p = FloatLattice::new(pert)?;
            let lam = geometry::l1_minimum_float(&p)?.lambda1;
            Ok(det0 - p.volume() / lam.powi(n as i32))
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max);
    let kissing_lower = kissing >= n * (n + 1);
    let kissing_upper = (kissing as f64) <= 3f64.powi(n as i32) - 1.0;
    let halfnorm_ok = halfnorm_pairs >= n * (n - 1) / 2;
    let perturbation_ok = worst <= 1e-8;
    Ok(CriticalityDiagnostics {
        well_rounded: report.well_rounded,
        kissing,
        kissing_lower,
        kissing_upper,
        halfnorm_pairs,
        halfnorm_ok,
        perturbations: PERTURBATION_SAMPLES,
        worst_det_decrease: worst,
        perturbation_ok,
        passed: report.well_rounded && kissing_lower && kissing_upper && halfnorm_ok && perturbation_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_rules() {
        assert!(MinimalConfiguration::new(4, vec![unit(4, 0), unit(4, 1), unit(4, 2), unit(4, 3), vec![3, 1, 0, 0]]).is_err());
        let mut v: Vec<Vec<i64>> = (0..4).map(|i| unit(4, i)).collect();
        v.extend([vec![2, 1, 0, 0], vec![1, -1, 0, 0]]);
        assert!(MinimalConfiguration::attained(4, v.clone()).is_err());
        v.pop();
        assert!(MinimalConfiguration::attained(4, v).is_ok());
    }

    #[test]
    fn planar_configurations() {
        // oracle: every 3-subset of {e1, e2, (1,1), (1,-1)} containing e1, e2
        let all = [vec![1, 1], vec![1, -1]];
        let mut orbits = BTreeSet::new();
        for extra in &all {
            let cfg = MinimalConfiguration::new(2, vec![vec![1, 0], vec![0, 1], extra.clone()]).unwrap();
            orbits.insert(cfg.canonical());
        }
        let got: BTreeSet<_> = enumerate_configurations(2, 1, 10, 0).into_iter().collect();
        assert_eq!(got, orbits);
        assert_eq!(got.len(), 1);
    }

    #[test]
    fn coefficient_bounds() {
        assert_eq!(coefficient_bound(3, false), 6);
        assert_eq!(coefficient_bound(3, true), 3);
        assert_eq!(coefficient_bound(4, true), 8);
    }

    #[test]
    fn solve_square() {
        let cfg = MinimalConfiguration::new(2, vec![vec![1, 0], vec![0, 1], vec![1, 1]]).unwrap();
        let opts = PackingOptions::default();
        let b0 = initial_basis(2, 0.2, 0, &mut rng_for(3, 0));
        let sol = solve_configuration(&cfg, &opts, &b0).unwrap();
        assert!((sol.achieved_det.abs() - 0.5).abs() < 1e-9, "{}", sol.achieved_det);
        assert!((sol.density() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn standard_lattice_is_not_critical() {
        let d = verify_local_criticality(&[vec![1.0, 0.0], vec![0.0, 1.0]], 0).unwrap();
        assert!(!d.kissing_lower && !d.passed);
    }
}
