//! Monte Carlo simulation of coset coding over a Rayleigh fast-fading
//! wiretap channel, r = diag(alpha) x + noise, with perfect channel state at
//! the receivers and maximum-likelihood decoding over the constellation.

use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry;
use crate::lattice::Lattice;
use crate::matrix::{self, IntMatrix};
use crate::wiretap::db_to_linear;

/// Constellations up to this size are decoded by exhaustive search.
pub const EXHAUSTIVE_LIMIT: usize = 1 << 16;

/// Coset code Lambda_b / Lambda_e with a PAM constellation carved in the
/// generator frame of Lambda_b (scaled to unit volume).
#[derive(Debug, Clone)]
pub struct CosetCode {
    pub lattice_b: Lattice,
    pub lattice_e: Lattice,
    /// Coefficient vectors (in the Lambda_b basis) of one point per coset,
    /// reduced against the Hermite form of Lambda_e.
    pub coset_reps: Vec<Vec<i64>>,
    pub pam_levels: usize,
    /// Coefficient vectors of the constellation, entries in 0..pam_levels.
    pub constellation: Vec<Vec<i64>>,
    /// Constellation points in R^n, centered.
    pub points: Vec<Vec<f64>>,
    /// Coset index of each constellation point.
    pub coset_of: Vec<usize>,
    /// Constellation indices grouped by coset.
    pub members: Vec<Vec<usize>>,
    /// Unit-volume generator rows of Lambda_b.
    pub generator: Vec<Vec<f64>>,
}

impl CosetCode {
    pub fn dim(&self) -> usize {
        self.lattice_b.dim()
    }

    pub fn num_cosets(&self) -> usize {
        self.coset_reps.len()
    }
}

struct CosetReducer {
    hnf: IntMatrix,
    diag: Vec<i64>,
}

impl CosetReducer {
    fn new(lat_b: &Lattice, lat_e: &Lattice) -> Result<Self> {
        let t = lat_e.coordinates_in(lat_b)?;
        let hnf = matrix::hnf(&t);
        let diag = (0..hnf.len()).map(|i| hnf[i][i].to_i64().ok_or(Error::Overflow("coset index"))).collect::<Result<_>>()?;
        Ok(CosetReducer { hnf, diag })
    }

    /// Mixed-radix index of the coset of u.
    fn index(&self, u: &[i64]) -> usize {
        let n = u.len();
        let mut v: Vec<BigInt> = u.iter().map(|&x| BigInt::from(x)).collect();
        let mut idx = 0usize;
        for i in 0..n {
            let q = v[i].div_floor(&self.hnf[i][i]);
            if !q.is_zero() {
                for j in i..n {
                    v[j] -= &q * &self.hnf[i][j];
                }
            }
            idx = idx * self.diag[i] as usize + v[i].to_usize().expect("reduced");
        }
        idx
    }

    fn representative(&self, mut idx: usize) -> Vec<i64> {
        let n = self.diag.len();
        let mut u = vec![0; n];
        for i in (0..n).rev() {
            u[i] = (idx % self.diag[i] as usize) as i64;
            idx /= self.diag[i] as usize;
        }
        u
    }

    fn count(&self) -> u64 {
        self.diag.iter().map(|&d| d as u64).product()
    }
}

/// Builds the coset code with a `pam_levels`-PAM constellation per
/// coordinate of the Lambda_b generator frame.
pub fn build_coset_code(lat_b: &Lattice, lat_e: &Lattice, pam_levels: usize) -> Result<CosetCode> {
    let n = lat_b.dim();
    if pam_levels < 1 {
        return Err(Error::InvalidArgument("PAM size must be positive".into()));
    }
    let reducer = CosetReducer::new(lat_b, lat_e)?;
    let cosets = reducer.count();
    let size = (pam_levels as f64).powi(n as i32);
    if size < cosets as f64 {
        return Err(Error::InsufficientConstellation { levels: pam_levels, n, cosets });
    }
    if size > 1e8 {
        return Err(Error::InvalidArgument(format!("constellation of {size} points is too large")));
    }
    let unit = lat_b.unit_volume_form();
    let generator = unit.basis().to_vec();
    let center = (pam_levels as f64 - 1.0) / 2.0;
    let mut constellation = Vec::with_capacity(size as usize);
    let mut points = Vec::with_capacity(size as usize);
    let mut coset_of = Vec::with_capacity(size as usize);
    let mut members = vec![Vec::new(); cosets as usize];
    for k in 0..size as usize {
        let mut u = vec![0i64; n];
        let mut r = k;
        for x in u.iter_mut().rev() {
            *x = (r % pam_levels) as i64;
            r /= pam_levels;
        }
        let x: Vec<f64> = (0..n).map(|j| (0..n).map(|i| (u[i] as f64 - center) * generator[i][j]).sum()).collect();
        let c = reducer.index(&u);
        members[c].push(k);
        coset_of.push(c);
        constellation.push(u);
        points.push(x);
    }
    if members.iter().any(|m| m.is_empty()) {
        return Err(Error::InsufficientConstellation { levels: pam_levels, n, cosets });
    }
    Ok(CosetCode {
        lattice_b: lat_b.clone(),
        lattice_e: lat_e.clone(),
        coset_reps: (0..cosets as usize).map(|i| reducer.representative(i)).collect(),
        pam_levels,
        constellation,
        points,
        coset_of,
        members,
        generator,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Receiver {
    Eve,
    Bob,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Decoder {
    /// Exhaustive up to [`EXHAUSTIVE_LIMIT`] points, sphere decoding beyond.
    Auto,
    Exhaustive,
    Sphere,
}

#[derive(Debug, Clone, Serialize)]
pub struct SimConfig {
    pub snr_db_grid: Vec<f64>,
    pub num_rounds: u64,
    pub seed: u64,
    /// Rayleigh parameter of the fading coefficients.
    pub sigma_h: f64,
    pub decoder: Decoder,
}

impl SimConfig {
    pub fn new(snr_db_grid: Vec<f64>, num_rounds: u64, seed: u64) -> Self {
        SimConfig { snr_db_grid, num_rounds, seed, sigma_h: 1.0, decoder: Decoder::Auto }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SimPoint {
    pub snr_db: f64,
    pub rounds: u64,
    /// Correct coset decisions (Eve) or coset errors (Bob).
    pub events: u64,
    pub estimate: f64,
    /// Wilson 95% half-width.
    pub ci_halfwidth: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SimResult {
    pub receiver: Receiver,
    pub cosets: usize,
    pub points: Vec<SimPoint>,
}

/// Wilson score interval (95%): returns (center, half-width).
pub fn wilson_interval(events: u64, n: u64) -> (f64, f64) {
    const Z: f64 = 1.959963984540054;
    if n == 0 {
        return (0.5, 0.5);
    }
    let nf = n as f64;
    let p = events as f64 / nf;
    let denom = 1.0 + Z * Z / nf;
    let center = (p + Z * Z / (2.0 * nf)) / denom;
    let half = Z * (p * (1.0 - p) / nf + Z * Z / (4.0 * nf * nf)).sqrt() / denom;
    (center, half)
}

/// Rounds are generated in blocks; each block has its own keyed stream.
const BLOCK: u64 = 1024;

fn block_rng(seed: u64, snr_index: usize, block: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (snr_index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    rng.set_stream(block);
    rng
}

struct Channel<'a> {
    code: &'a CosetCode,
    flat: Vec<f64>,
    sphere: bool,
}

impl<'a> Channel<'a> {
    fn new(code: &'a CosetCode, decoder: Decoder) -> Self {
        let sphere = match decoder {
            Decoder::Auto => code.points.len() > EXHAUSTIVE_LIMIT,
            Decoder::Exhaustive => false,
            Decoder::Sphere => true,
        };
        Channel { code, flat: code.points.concat(), sphere }
    }

    /// One transmission: returns true if the decoded coset is the sent one.
    fn round(&self, rng: &mut ChaCha8Rng, sigma_h: f64, noise_sd: f64, alpha: &mut [f64], r: &mut [f64]) -> bool {
        let code = self.code;
        let n = code.dim();
        let msg = rng.gen_range(0..code.num_cosets());
        let group = &code.members[msg];
        let sent = group[rng.gen_range(0..group.len())];
        for i in 0..n {
            let u: f64 = rng.gen::<f64>();
            alpha[i] = sigma_h * (-2.0 * (1.0 - u).ln()).sqrt();
            let z: f64 = rng.sample(StandardNormal);
            r[i] = alpha[i] * code.points[sent][i] + noise_sd * z;
        }
        let decoded = if self.sphere { sphere_decode(code, alpha, r) } else { self.exhaustive(alpha, r) };
        code.coset_of[decoded] == msg
    }

    fn exhaustive(&self, alpha: &[f64], r: &[f64]) -> usize {
        let n = alpha.len();
        let mut best = f64::INFINITY;
        let mut arg = 0;
        for (k, x) in self.flat.chunks_exact(n).enumerate() {
            let mut d = 0.0;
            for i in 0..n {
                let e = r[i] - alpha[i] * x[i];
                d += e * e;
            }
            if d < best {
                best = d;
                arg = k;
            }
        }
        arg
    }
}

/// Box-constrained Schnorr-Euchner enumeration of the ML point under the
/// faded generator diag-scaled by alpha.
fn sphere_decode(code: &CosetCode, alpha: &[f64], r: &[f64]) -> usize {
    let n = code.dim();
    let levels = code.pam_levels as i64;
    let center = (code.pam_levels as f64 - 1.0) / 2.0;
    // columns of gt are the faded generators: x = gt * u - shift
    let gt = DMatrix::from_fn(n, n, |j, i| code.generator[i][j] * alpha[j]);
    let shift: Vec<f64> = (0..n).map(|j| center * (0..n).map(|i| gt[(j, i)]).sum::<f64>()).collect();
    let y = DVector::from_iterator(n, (0..n).map(|j| r[j] + shift[j]));
    let qr = gt.qr();
    let rm = qr.r();
    let z = qr.q().transpose() * y;
    let mut best = f64::INFINITY;
    let mut best_u = vec![0i64; n];
    let mut u = vec![0i64; n];
    search_level(n - 1, &rm, &z, levels, 0.0, &mut u, &mut best, &mut best_u);
    let mut k = 0usize;
    for &x in &best_u {
        k = k * code.pam_levels + x as usize;
    }
    k
}

#[allow(clippy::too_many_arguments)]
fn search_level(
    level: usize,
    rm: &DMatrix<f64>,
    z: &DVector<f64>,
    levels: i64,
    dist: f64,
    u: &mut [i64],
    best: &mut f64,
    best_u: &mut [i64],
) {
    let n = u.len();
    let mut t = z[level];
    for j in level + 1..n {
        t -= rm[(level, j)] * u[j] as f64;
    }
    let diag = rm[(level, level)];
    let c = t / diag;
    let mut order: Vec<i64> = (0..levels).collect();
    order.sort_by(|a, b| (*a as f64 - c).abs().total_cmp(&(*b as f64 - c).abs()));
    for v in order {
        let e = diag * (c - v as f64);
        let d = dist + e * e;
        if d >= *best {
            break;
        }
        u[level] = v;
        if level == 0 {
            *best = d;
            best_u.copy_from_slice(u);
        } else {
            search_level(level - 1, rm, z, levels, d, u, best, best_u);
        }
    }
}

/// Estimates Eve's correct coset decision probability or Bob's coset error
/// probability on every SNR of the grid. SNR is sigma_h^2 / noise variance.
pub fn simulate(code: &CosetCode, cfg: &SimConfig, who: Receiver) -> Result<SimResult> {
    if cfg.num_rounds < 1 {
        return Err(Error::InvalidArgument("at least one round is required".into()));
    }
    if !(cfg.sigma_h > 0.0) {
        return Err(Error::InvalidArgument("sigma_h must be positive".into()));
    }
    let channel = Channel::new(code, cfg.decoder);
    let n = code.dim();
    let blocks = cfg.num_rounds.div_ceil(BLOCK);
    let mut points = Vec::with_capacity(cfg.snr_db_grid.len());
    for (si, &db) in cfg.snr_db_grid.iter().enumerate() {
        let noise_sd = cfg.sigma_h / db_to_linear(db).sqrt();
        let correct: u64 = (0..blocks)
            .into_par_iter()
            .map(|b| {
                let mut rng = block_rng(cfg.seed, si, b);
                let (mut alpha, mut r) = (vec![0.0; n], vec![0.0; n]);
                let rounds = BLOCK.min(cfg.num_rounds - b * BLOCK);
                (0..rounds).filter(|_| channel.round(&mut rng, cfg.sigma_h, noise_sd, &mut alpha, &mut r)).count() as u64
            })
            .sum();
        let events = match who {
            Receiver::Eve => correct,
            Receiver::Bob => cfg.num_rounds - correct,
        };
        let (_, half) = wilson_interval(events, cfg.num_rounds);
        points.push(SimPoint {
            snr_db: db,
            rounds: cfg.num_rounds,
            events,
            estimate: events as f64 / cfg.num_rounds as f64,
            ci_halfwidth: half,
        });
    }
    Ok(SimResult { receiver: who, cosets: code.num_cosets(), points })
}

#[derive(Debug, Clone, Serialize)]
pub struct SublatticeRow {
    /// l1 minimum of the dual of Lambda_e with Lambda_b at unit volume.
    pub dual_lambda1: f64,
    pub eve: Vec<SimPoint>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Comparison {
    pub snr_db: Vec<f64>,
    pub rows: Vec<SublatticeRow>,
    /// Spearman correlation between Eve's estimate and the dual minimum, per SNR.
    pub spearman: Vec<f64>,
}

/// Dual l1 minimum of `lat_e` after scaling `lat_b` to unit volume.
pub fn normalized_dual_minimum(lat_b: &Lattice, lat_e: &Lattice) -> Result<f64> {
    let n = lat_b.dim() as f64;
    Ok(geometry::l1_minimum(&lat_e.dual())?.lambda1 * lat_b.volume_f64().powf(1.0 / n))
}

/// Simulates Eve on each sublattice of a fixed superlattice (equal index)
/// and correlates her success with the dual l1 minima.
pub fn compare_sublattices(lat_b: &Lattice, sublattices: &[Lattice], pam_levels: usize, cfg: &SimConfig) -> Result<Comparison> {
    let index = |e: &Lattice| lat_e_index(lat_b, e);
    if let Some(first) = sublattices.first() {
        let idx = index(first)?;
        for e in sublattices {
            if index(e)? != idx {
                return Err(Error::InvalidArgument("sublattices have different indices".into()));
            }
        }
    }
    let mut rows = Vec::with_capacity(sublattices.len());
    for e in sublattices {
        let code = build_coset_code(lat_b, e, pam_levels)?;
        rows.push(SublatticeRow { dual_lambda1: normalized_dual_minimum(lat_b, e)?, eve: simulate(&code, cfg, Receiver::Eve)?.points });
    }
    let lambdas: Vec<f64> = rows.iter().map(|r| r.dual_lambda1).collect();
    let spearman =
        (0..cfg.snr_db_grid.len()).map(|k| spearman(&rows.iter().map(|r| r.eve[k].estimate).collect::<Vec<_>>(), &lambdas)).collect();
    Ok(Comparison { snr_db: cfg.snr_db_grid.clone(), rows, spearman })
}

fn lat_e_index(lat_b: &Lattice, lat_e: &Lattice) -> Result<BigInt> {
    let t = lat_e.coordinates_in(lat_b)?;
    Ok(matrix::det_int(&t).abs())
}

fn ranks(x: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut r = vec![0.0; x.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && x[idx[j + 1]] == x[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for k in i..=j {
            r[idx[k]] = avg;
        }
        i = j + 1;
    }
    r
}

/// Spearman rank correlation with average ranks for ties (NaN if either
/// side is constant).
pub fn spearman(a: &[f64], b: &[f64]) -> f64 {
    let (ra, rb) = (ranks(a), ranks(b));
    let n = ra.len() as f64;
    let (ma, mb) = (ra.iter().sum::<f64>() / n, rb.iter().sum::<f64>() / n);
    let cov: f64 = ra.iter().zip(&rb).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = ra.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = rb.iter().map(|y| (y - mb).powi(2)).sum();
    cov / (va * vb).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn scaled(n: usize, c: i64) -> Lattice {
        Lattice::standard(n).scale(&BigRational::from_integer(BigInt::from(c))).unwrap()
    }

    #[test]
    fn coset_counts() {
        assert_eq!(build_coset_code(&Lattice::standard(3), &scaled(3, 2), 4).unwrap().num_cosets(), 8);
        let code = build_coset_code(&Lattice::standard(4), &scaled(4, 4), 16).unwrap();
        assert_eq!(code.num_cosets(), 256);
        assert!(code.members.iter().all(|m| m.len() == 256));
        assert_eq!(build_coset_code(&Lattice::standard(2), &Lattice::standard(2), 2).unwrap().num_cosets(), 1);
        assert!(matches!(build_coset_code(&Lattice::standard(4), &scaled(4, 4), 3), Err(Error::InsufficientConstellation { .. })));
        assert_eq!(build_coset_code(&scaled(2, 2), &Lattice::standard(2), 4).unwrap_err(), Error::NotSublattice);
    }

    #[test]
    fn coset_reduction_is_consistent() {
        let b = crate::catalog::d_n(3);
        let e = b.scale(&BigRational::from_integer(BigInt::from(3))).unwrap();
        let code = build_coset_code(&b, &e, 5).unwrap();
        assert_eq!(code.num_cosets(), 27);
        let red = CosetReducer::new(&b, &e).unwrap();
        for (i, rep) in code.coset_reps.iter().enumerate() {
            assert_eq!(red.index(rep), i);
        }
    }

    #[test]
    fn sphere_matches_exhaustive() {
        let b = crate::catalog::d_n(4);
        let e = b.scale(&BigRational::from_integer(BigInt::from(2))).unwrap();
        let code = build_coset_code(&b, &e, 4).unwrap();
        let ch = Channel::new(&code, Decoder::Exhaustive);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..500 {
            let alpha: Vec<f64> = (0..4).map(|_| rng.gen_range(0.1..2.5)).collect();
            let r: Vec<f64> = (0..4).map(|_| rng.gen_range(-3.0..3.0)).collect();
            assert_eq!(ch.exhaustive(&alpha, &r), sphere_decode(&code, &alpha, &r));
        }
    }

    #[test]
    fn wilson_interval_shrinks() {
        let (_, a) = wilson_interval(50, 1000);
        let (_, b) = wilson_interval(200, 4000);
        assert!((a / b - 2.0).abs() < 0.05);
    }

    #[test]
    fn spearman_examples() {
        assert!((spearman(&[1.0, 2.0, 3.0], &[10.0, 20.0, 30.0]) - 1.0).abs() < 1e-12);
        assert!((spearman(&[3.0, 2.0, 1.0], &[10.0, 20.0, 30.0]) + 1.0).abs() < 1e-12);
    }

    #[test]
    fn determinism_and_limits() {
        let code = build_coset_code(&Lattice::standard(2), &scaled(2, 2), 4).unwrap();
        let cfg = SimConfig::new(vec![-40.0, 60.0], 5000, 3);
        let a = simulate(&code, &cfg, Receiver::Eve).unwrap();
        let b = simulate(&code, &cfg, Receiver::Eve).unwrap();
        assert_eq!(a.points[0].events, b.points[0].events);
        assert!((a.points[0].estimate - 0.25).abs() <= 3.0 * a.points[0].ci_halfwidth);
        let bob = simulate(&code, &cfg, Receiver::Bob).unwrap();
        assert!(bob.points[1].estimate <= 3.0 * bob.points[1].ci_halfwidth);
        let sphere = simulate(&code, &SimConfig { decoder: Decoder::Sphere, ..cfg.clone() }, Receiver::Eve).unwrap();
        assert_eq!(sphere.points[1].events, a.points[1].events);
    }
}
