//! Correct-decoding and error probability expressions for Rayleigh fading
//! wiretap channels with lattice coset coding, and their upper bounds in
//! terms of l1 theta functions of dual lattices.
//!
//! For a rational lattice L with d L = A(C) a product kernel sum
//! sum_{x in L} prod_i g(x_i) splits over the cosets of m Z^n into
//! swe_C(S_0, ..., S_t) with one-dimensional sums
//! S_j = sum_{z in Z} g((j + m z) / d). Those are summed explicitly near the
//! origin and closed with a midpoint Euler-Maclaurin tail, which is what the
//! "direct" route below means.

use rayon::prelude::*;
use serde::Serialize;

use num_traits::ToPrimitive;

use crate::code::SweEnumerator;
use crate::error::{Error, Result};
use crate::geometry;
use crate::lattice::{code_from_lattice, FloatLattice, Lattice};

/// Relative tolerance between the direct and theta-function routes.
pub const IDENTITY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Eavesdropper,
    Legitimate,
}

/// Average SNR of one receiver (linear scale).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChannelParams {
    pub gamma: f64,
    pub n: usize,
    pub role: Role,
}

impl ChannelParams {
    pub fn new(gamma: f64, n: usize, role: Role) -> Result<Self> {
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(Error::InvalidArgument(format!("gamma must be positive, got {gamma}")));
        }
        Ok(ChannelParams { gamma, n, role })
    }

    pub fn from_db(db: f64, n: usize, role: Role) -> Result<Self> {
        Self::new(db_to_linear(db), n, role)
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    FExact,
    GUpper,
    PebBound,
    PceBound,
    InverseNormSum,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundCurve {
    pub kind: BoundKind,
    pub gammas_db: Vec<f64>,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Copy)]
enum Kernel {
    /// 1 / (1 + s x^2)
    Cauchy(f64),
    /// (1 + g x^2)^(-3/2)
    ThreeHalves(f64),
}

impl Kernel {
    fn value(self, x: f64) -> f64 {
        match self {
            Kernel::Cauchy(s) => 1.0 / (1.0 + s * x * x),
            Kernel::ThreeHalves(g) => (1.0 + g * x * x).powf(-1.5),
        }
    }

    fn derivative(self, x: f64) -> f64 {
        match self {
            Kernel::Cauchy(s) => {
                let d = 1.0 + s * x * x;
                -2.0 * s * x / (d * d)
            }
            Kernel::ThreeHalves(g) => -3.0 * g * x * (1.0 + g * x * x).powf(-2.5),
        }
    }

    /// Integral from x to infinity (x > 0), written without cancellation.
    fn tail_integral(self, x: f64) -> f64 {
        match self {
            Kernel::Cauchy(s) => {
                let r = s.sqrt();
                (1.0 / (r * x)).atan() / r
            }
            Kernel::ThreeHalves(g) => {
                let r = g.sqrt();
                let w = (1.0 + g * x * x).sqrt();
                1.0 / (r * w * (w + r * x))
            }
        }
    }

    fn scale(self) -> f64 {
        match self {
            Kernel::Cauchy(s) => s.sqrt(),
            Kernel::ThreeHalves(g) => g.sqrt(),
        }
    }
}

/// The code of a rational lattice and the data the coset route needs.
struct CosetData {
    n: usize,
    d: f64,
    m: u64,
    swe: SweEnumerator,
    size: u128,
    volume: f64,
}

impl CosetData {
    fn new(lat: &Lattice) -> Result<Self> {
        let (d, int) = lat.integral_scaling();
        let pair = code_from_lattice(&int);
        let swe = pair.code.swe(crate::enumeration_cap())?;
        Ok(CosetData {
            n: lat.dim(),
            d: d.to_f64().ok_or(Error::Overflow("lattice denominator"))?,
            m: pair.m,
            size: pair.code.size(),
            swe,
            volume: lat.volume_f64(),
        })
    }

    /// sum_{z in Z} g((j + m z) / d)
    fn line_sum(&self, j: u64, kernel: Kernel) -> f64 {
        let (m, d) = (self.m as f64, self.d);
        let steps = (2000.0 * d / (m * kernel.scale())).ceil().clamp(2000.0, 2.0e6) as i64;
        let j = j as f64;
        let mut s = 0.0;
        for z in (-steps..=steps).rev() {
            if z >= 0 {
                s += kernel.value((j + m * z as f64) / d);
            }
        }
        for z in (1..=steps).rev() {
            s += kernel.value((j - m * z as f64) / d);
        }
        let half = steps as f64 + 0.5;
        for a in [j, -j] {
            let x0 = (a + m * half) / d;
            s += d / m * kernel.tail_integral(x0) + m / d * kernel.derivative(x0) / 24.0;
        }
        s
    }

    fn direct(&self, kernel: Kernel) -> f64 {
        let t = self.swe.t() as u64;
        let sums: Vec<f64> = (0..=t).map(|j| self.line_sum(j, kernel)).collect();
        self.swe.evaluate(&sums)
    }

    /// Theta^1 of the dual lattice at q = exp(-c).
    fn dual_theta(&self, c: f64) -> f64 {
        dual_theta_exp(&self.swe, self.size, c * self.d / self.m as f64)
    }

    /// Theta side of the Poisson identity for the kernel 1/(1 + s x^2).
    fn poisson_theta_side(&self, s: f64) -> f64 {
        let r = s.sqrt();
        (std::f64::consts::PI / r).powi(self.n as i32) / self.volume * self.dual_theta(2.0 * std::f64::consts::PI / r)
    }
}

/// Theta^1 of A(C^perp) at x = exp(-c) from the enumerator of C; the factors
/// 1 - x are formed with expm1 so that x close to 1 stays accurate.
fn dual_theta_exp(swe: &SweEnumerator, size_c: u128, c: f64) -> f64 {
    let x = (-c).exp();
    let omx = -(-c).exp_m1();
    let m = swe.modulus() as f64;
    let t = swe.t();
    let y: Vec<f64> = (0..=t)
        .map(|k| {
            let h = (std::f64::consts::PI * k as f64 / m).sin();
            1.0 / (omx * omx + 4.0 * x * h * h)
        })
        .collect();
    let n = swe.length() as i32;
    (omx * (1.0 + x)).powi(n) / size_c as f64 * swe.evaluate(&y)
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::InvalidArgument(format!("gamma must be positive and finite, got {gamma}")));
    }
    Ok(())
}

fn agree(lhs: f64, rhs: f64) -> Result<()> {
    let rel = (lhs - rhs).abs() / lhs.abs().max(rhs.abs()).max(f64::MIN_POSITIVE);
    if rel <= IDENTITY_TOL {
        Ok(())
    } else {
        Err(Error::IdentityMismatch { lhs, rhs, rel })
    }
}

/// Evaluation route for a lattice: the coset decomposition when the code of
/// its integral scaling can be enumerated, float enumeration otherwise.
enum Route {
    Coset(CosetData),
    Float(FloatLattice),
}

impl Route {
    fn new(lat: &Lattice) -> Result<Self> {
        match CosetData::new(lat) {
            Ok(d) => Ok(Route::Coset(d)),
            Err(Error::CapExceeded { .. }) => Ok(Route::Float(lat.to_float())),
            Err(e) => Err(e),
        }
    }

    fn f_sum(&self, gamma: f64, tail_tol: f64) -> Result<f64> {
        match self {
            Route::Coset(d) => Ok(d.direct(Kernel::ThreeHalves(gamma))),
            Route::Float(l) => eval_f_float(l, gamma, tail_tol),
        }
    }

    /// Direct sum of prod 1/(1 + s x_i^2); only the coset route reaches the
    /// accuracy needed for the identity check.
    fn cauchy_direct(&self, s: f64) -> Option<f64> {
        match self {
            Route::Coset(d) => Some(d.direct(Kernel::Cauchy(s))),
            Route::Float(_) => None,
        }
    }

    /// Theta^1 of the dual lattice at q = exp(-c).
    fn dual_theta(&self, c: f64) -> Result<f64> {
        match self {
            Route::Coset(d) => Ok(d.dual_theta(c)),
            Route::Float(l) => theta_l1_value_float(&l.dual(), (-c).exp()),
        }
    }

    fn poisson_theta_side(&self, s: f64) -> Result<f64> {
        let (n, vol) = match self {
            Route::Coset(d) => (d.n, d.volume),
            Route::Float(l) => (l.dim(), l.volume()),
        };
        let r = s.sqrt();
        Ok((std::f64::consts::PI / r).powi(n as i32) / vol * self.dual_theta(2.0 * std::f64::consts::PI / r)?)
    }

    fn check(&self, s: f64, theta: f64) -> Result<()> {
        match self.cauchy_direct(s) {
            Some(direct) => agree(direct, theta),
            None => Ok(()),
        }
    }
}

/// F(L; gamma) = sum_{x in L} prod_i (1 + gamma x_i^2)^(-3/2).
///
/// Rational lattices with an enumerable code are summed over cosets with an
/// analytic tail, far below any practical `tail_tol`; otherwise l2 shells
/// are used as in [`eval_f_float`].
pub fn eval_f(lat: &Lattice, gamma: f64, tail_tol: f64) -> Result<f64> {
    check_gamma(gamma)?;
    if !(tail_tol > 0.0) {
        return Err(Error::InvalidArgument("tail tolerance must be positive".into()));
    }
    Route::new(lat)?.f_sum(gamma, tail_tol)
}

/// Direct lattice sum and theta side of the Poisson identity for the
/// kernel prod_i 1/(1 + s x_i^2).
pub fn poisson_sides(lat: &Lattice, s: f64) -> Result<(f64, f64)> {
    check_gamma(s)?;
    let data = CosetData::new(lat)?;
    Ok((data.direct(Kernel::Cauchy(s)), data.poisson_theta_side(s)))
}

/// G(L; gamma) = sum_{x in L} prod_i 1/(1 + (3/2) gamma x_i^2), evaluated
/// through the dual theta function. Debug builds also sum directly (when the
/// coset route is available) and fail with `IdentityMismatch` on disagreement.
pub fn eval_g(lat: &Lattice, gamma: f64) -> Result<f64> {
    check_gamma(gamma)?;
    let route = Route::new(lat)?;
    let s = 1.5 * gamma;
    let theta = route.poisson_theta_side(s)?;
    if cfg!(debug_assertions) {
        route.check(s, theta)?;
    }
    Ok(theta)
}

/// Both routes for G, always checked.
pub fn eval_g_checked(lat: &Lattice, gamma: f64) -> Result<(f64, f64)> {
    check_gamma(gamma)?;
    let (direct, theta) = poisson_sides(lat, 1.5 * gamma)?;
    agree(direct, theta)?;
    Ok((direct, theta))
}

/// Upper bound on the legitimate receiver's error probability:
/// (1/2) ((1/vol) (2 pi / sqrt(gamma_b))^n Theta_{L*}(exp(-4 pi / sqrt(gamma_b))) - 1).
pub fn bound_peb(lat_b: &Lattice, gamma_b: f64) -> Result<f64> {
    check_gamma(gamma_b)?;
    let route = Route::new(lat_b)?;
    let s = gamma_b / 4.0;
    let theta = route.poisson_theta_side(s)?;
    if cfg!(debug_assertions) {
        route.check(s, theta)?;
    }
    Ok(0.5 * (theta - 1.0))
}

/// The same bound as a direct sum (1/2) sum_{x != 0} prod 1/(1 + gamma_b x_i^2 / 4).
pub fn bound_peb_direct(lat_b: &Lattice, gamma_b: f64) -> Result<f64> {
    check_gamma(gamma_b)?;
    Ok(0.5 * (CosetData::new(lat_b)?.direct(Kernel::Cauchy(gamma_b / 4.0)) - 1.0))
}

fn check_sublattice(lat_b: &Lattice, lat_e: &Lattice) -> Result<()> {
    if lat_e.is_sublattice_of(lat_b) {
        Ok(())
    } else {
        Err(Error::NotSublattice)
    }
}

/// Upper bound on the eavesdropper's correct-decoding probability:
/// vol_b / vol_e (pi / sqrt 6)^n Theta_{L_e*}(exp(-2 sqrt2 pi / sqrt(3 gamma_e))).
pub fn bound_pce(lat_b: &Lattice, lat_e: &Lattice, gamma_e: f64) -> Result<f64> {
    check_gamma(gamma_e)?;
    check_sublattice(lat_b, lat_e)?;
    let n = lat_e.dim() as i32;
    let route = Route::new(lat_e)?;
    let c = 2.0 * 2f64.sqrt() * std::f64::consts::PI / (3.0 * gamma_e).sqrt();
    let bound = lat_b.volume_f64() / lat_e.volume_f64() * (std::f64::consts::PI / 6f64.sqrt()).powi(n) * route.dual_theta(c)?;
    if cfg!(debug_assertions) {
        if let Some(g) = route.cauchy_direct(1.5 * gamma_e) {
            agree((gamma_e / 4.0).powf(n as f64 / 2.0) * lat_b.volume_f64() * g, bound)?;
        }
    }
    Ok(bound)
}

/// The (approximate) correct-decoding probability of the eavesdropper,
/// (gamma_e/4)^(n/2) vol_b F(L_e; gamma_e).
pub fn ecdp_estimate(lat_b: &Lattice, lat_e: &Lattice, gamma_e: f64, tail_tol: f64) -> Result<f64> {
    check_gamma(gamma_e)?;
    check_sublattice(lat_b, lat_e)?;
    let n = lat_e.dim() as f64;
    let f = eval_f(lat_e, gamma_e, tail_tol)?;
    Ok((gamma_e / 4.0).powf(n / 2.0) * lat_b.volume_f64() * f)
}

/// Bound curves over a grid of SNRs in dB: F and G of the eavesdropper's
/// lattice, the eavesdropper bound and the legitimate receiver's bound.
pub fn bound_curves(lat_b: &Lattice, lat_e: &Lattice, gammas_db: &[f64], tail_tol: f64) -> Result<Vec<BoundCurve>> {
    check_sublattice(lat_b, lat_e)?;
    let rows: Vec<[f64; 4]> = gammas_db
        .par_iter()
        .map(|&db| {
            let g = db_to_linear(db);
            Ok([eval_f(lat_e, g, tail_tol)?, eval_g(lat_e, g)?, bound_pce(lat_b, lat_e, g)?, bound_peb(lat_b, g)?])
        })
        .collect::<Result<_>>()?;
    let kinds = [BoundKind::FExact, BoundKind::GUpper, BoundKind::PceBound, BoundKind::PebBound];
    Ok(kinds
        .iter()
        .enumerate()
        .map(|(k, &kind)| BoundCurve { kind, gammas_db: gammas_db.to_vec(), values: rows.iter().map(|r| r[k]).collect() })
        .collect())
}

/// Hard cap on the l2 radius of shell truncation for float lattices.
pub const SHELL_RADIUS_CAP: f64 = 50.0;

/// Sums a product kernel over l2 shells of width 1. With shell contributions
/// decaying like r^-3 the remainder beyond r is a third of what the shells in
/// (r/2, r] contribute; that estimate is added to the partial sum and also
/// drives the stop.
fn shell_sum(lat: &FloatLattice, kernel: Kernel, tail_tol: f64) -> Result<f64> {
    let mut radius = 8.0f64;
    loop {
        let bins_len = radius as usize + 1;
        let mut bins = vec![0.0; bins_len];
        geometry::float_half_ball(lat, radius, crate::enumeration_cap(), |v| {
            let r = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            let k = (r.ceil() as usize).min(bins_len - 1);
            bins[k] += 2.0 * v.iter().map(|&x| kernel.value(x)).product::<f64>();
        })?;
        let mut partial = vec![1.0; bins_len];
        for k in 1..bins_len {
            partial[k] = partial[k - 1] + bins[k];
            if k >= 4 {
                let tail = (partial[k] - partial[k / 2]) / 3.0;
                if tail < tail_tol * partial[k] {
                    return Ok(partial[k] + tail);
                }
            }
        }
        if radius >= SHELL_RADIUS_CAP {
            return Err(Error::CapExceeded { cap: SHELL_RADIUS_CAP as usize });
        }
        radius = (radius * 2.0).min(SHELL_RADIUS_CAP);
    }
}

/// w K_1(w) by the trapezoid rule on w * int_0^inf exp(-w cosh t) cosh t dt;
/// the integrand is analytic in a strip, so step 0.2 is exact to rounding.
pub fn bessel_k1_scaled(w: f64) -> f64 {
    if w <= 0.0 {
        return 1.0;
    }
    const STEP: f64 = 0.2;
    let mut sum = 0.5 * (-w).exp();
    let mut t = STEP;
    loop {
        let c = t.cosh();
        let term = (-w * c).exp() * c;
        sum += term;
        if term < 1e-18 * sum {
            break;
        }
        t += STEP;
    }
    w * STEP * sum
}

/// Largest dual enumeration accepted by the Poisson route for F.
const POISSON_POINTS: f64 = 2e7;

/// F by Poisson summation over the dual lattice: the transform of
/// (1 + g x^2)^(-3/2) is (2/sqrt g) w K_1(w) with w = 2 pi |xi| / sqrt g,
/// which decays exponentially. Fails with `CapExceeded` when the ball
/// needed for `tail_tol` is too large.
fn f_poisson_float(unit: &FloatLattice, gamma: f64, tail_tol: f64) -> Result<f64> {
    let n = unit.dim();
    let r = gamma.sqrt();
    let radius = (1.0 / tail_tol).ln().max(1.0) * r / (2.0 * std::f64::consts::PI) + 1.0;
    let ball = std::f64::consts::PI.powf(n as f64 / 2.0) / gamma_half_integer(n as f64 / 2.0 + 1.0) * radius.powi(n as i32);
    if ball > POISSON_POINTS {
        return Err(Error::CapExceeded { cap: POISSON_POINTS as usize });
    }
    let fhat = |xi: f64| 2.0 / r * bessel_k1_scaled(2.0 * std::f64::consts::PI * xi.abs() / r);
    let mut total = fhat(0.0).powi(n as i32);
    geometry::float_half_ball(&unit.dual(), radius, crate::enumeration_cap(), |y| {
        total += 2.0 * y.iter().map(|&v| fhat(v)).product::<f64>();
    })?;
    Ok(total)
}

/// Gamma function for half-integers and integers.
fn gamma_half_integer(x: f64) -> f64 {
    if x == 0.5 {
        std::f64::consts::PI.sqrt()
    } else if x == 1.0 {
        1.0
    } else {
        (x - 1.0) * gamma_half_integer(x - 1.0)
    }
}

/// F for a float lattice on its unit-volume form: Poisson summation over
/// the dual when the required dual ball is small, otherwise l2 shells of
/// step 1 until the estimated remainder falls below `tail_tol` relatively
/// (radius capped at 50).
pub fn eval_f_float(lat: &FloatLattice, gamma: f64, tail_tol: f64) -> Result<f64> {
    check_gamma(gamma)?;
    // F(cL; g) = F(L; c^2 g)
    let c = lat.volume().powf(-1.0 / lat.dim() as f64);
    let unit = lat.scale(c);
    let g = gamma / (c * c);
    match f_poisson_float(&unit, g, tail_tol.min(1e-12)) {
        Err(Error::CapExceeded { .. }) => shell_sum(&unit, Kernel::ThreeHalves(g), tail_tol),
        other => other,
    }
}

/// Numerical Theta^1 of a float lattice at q in (0, 1), summed over growing
/// l1 balls until the outer half of the ball contributes below 1e-15.
pub fn theta_l1_value_float(lat: &FloatLattice, q: f64) -> Result<f64> {
    if !(0.0 < q && q < 1.0) {
        return Err(Error::InvalidArgument("q must lie in (0, 1)".into()));
    }
    let mut radius = geometry::l1_minimum_float(lat)?.lambda1 * 2.0;
    loop {
        let (mut total, mut outer) = (1.0, 0.0);
        geometry::float_half_ball(lat, radius, crate::enumeration_cap(), |v| {
            let l1: f64 = v.iter().map(|x| x.abs()).sum();
            if l1 <= radius {
                let w = 2.0 * q.powf(l1);
                total += w;
                if l1 > radius / 2.0 {
                    outer += w;
                }
            }
        })?;
        if outer < 1e-15 * total && q.powf(radius / 2.0) < 1e-15 {
            return Ok(total);
        }
        radius *= 1.5;
    }
}

/// G for a float lattice through the dual theta function.
pub fn eval_g_float(lat: &FloatLattice, gamma: f64) -> Result<f64> {
    check_gamma(gamma)?;
    let s = 1.5 * gamma;
    let r = s.sqrt();
    let theta = theta_l1_value_float(&lat.dual(), (-2.0 * std::f64::consts::PI / r).exp())?;
    Ok((std::f64::consts::PI / r).powi(lat.dim() as i32) / lat.volume() * theta)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum InverseNormSum {
    Finite(f64),
    /// Some enumerated nonzero vector has a zero coordinate.
    Divergent,
}

/// Truncated sum of prod_i |x_i|^-3 over 0 < |x|_2 <= cutoff.
pub fn inverse_norm_sum(lat: &FloatLattice, cutoff_radius: f64) -> Result<InverseNormSum> {
    if !(cutoff_radius > 0.0) {
        return Err(Error::InvalidArgument("cutoff radius must be positive".into()));
    }
    let mut sum = 0.0;
    let mut divergent = false;
    geometry::float_half_ball(lat, cutoff_radius, crate::enumeration_cap(), |v| {
        let scale = v.iter().fold(0.0f64, |a, x| a.max(x.abs()));
        if v.iter().any(|x| x.abs() <= 1e-12 * scale) {
            divergent = true;
        } else {
            sum += 2.0 * v.iter().map(|x| x.abs().powi(-3)).product::<f64>();
        }
    })?;
    Ok(if divergent { InverseNormSum::Divergent } else { InverseNormSum::Finite(sum) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_rational::BigRational;

    fn z(n: usize) -> Lattice {
        Lattice::standard(n)
    }

    #[test]
    fn poisson_on_standard_lattices() {
        for n in 1..4 {
            for s in [1.0, 6.0, 25.0] {
                let (a, b) = poisson_sides(&z(n), s).unwrap();
                assert!((a - b).abs() / b < 1e-10, "n={n} s={s}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn poisson_scaled_plane() {
        let two = Lattice::from_integer_rows(&[vec![2, 0], vec![0, 2]]).unwrap();
        let (a, b) = poisson_sides(&two, 6.0).unwrap();
        let half = two.dual();
        let theta = crate::theta::theta_l1_lattice(&half).unwrap().evaluate((-2.0 * std::f64::consts::PI / 6f64.sqrt()).exp());
        let expect = 0.25 * (std::f64::consts::PI / 6f64.sqrt()).powi(2) * theta;
        assert!((a - b).abs() / b < 1e-10);
        assert!((b - expect).abs() / expect < 1e-12);
    }

    #[test]
    fn f_factorizes_on_z2() {
        let one_d: f64 =
            (-200000..=200000).map(|x: i64| (1.0 + (x * x) as f64).powf(-1.5)).sum::<f64>() + 2.0 * 1.0 / (2.0 * 200000.5f64.powi(2));
        let f = eval_f(&z(2), 1.0, 1e-12).unwrap();
        assert!((f - one_d * one_d).abs() / f < 1e-9, "{f} vs {}", one_d * one_d);
    }

    #[test]
    fn f_scaling_identity() {
        let lat = Lattice::from_integer_rows(&[vec![2, 1], vec![0, 3]]).unwrap();
        let c = BigRational::new(BigInt::from(3), BigInt::from(2));
        let a = eval_f(&lat.scale(&c).unwrap(), 0.7, 1e-12).unwrap();
        let b = eval_f(&lat, 0.7 * 2.25, 1e-12).unwrap();
        assert!((a - b).abs() / b < 1e-10);
    }

    #[test]
    fn g_dominates_f_and_tends_to_one() {
        let lat = crate::catalog::d_n(3);
        for g in [0.1, 1.0, 10.0, 100.0] {
            assert!(eval_g(&lat, g).unwrap() >= eval_f(&lat, g, 1e-12).unwrap());
        }
        let f = eval_f(&z(1), 1e8, 1e-12).unwrap();
        assert!((f - 1.0).abs() < 1e-10);
    }

    #[test]
    fn g_small_gamma_asymptote() {
        let lat = crate::catalog::d_n(3);
        let gamma: f64 = 1e-4;
        let g = eval_g(&lat, gamma).unwrap();
        let asym = (std::f64::consts::PI * 2f64.sqrt() / (3.0 * gamma).sqrt()).powi(3) / lat.volume_f64();
        assert!((g / asym - 1.0).abs() < 1e-6);
    }

    #[test]
    fn peb_examples() {
        let z4 = z(4);
        let a = bound_peb(&z4, 100.0).unwrap();
        let b = bound_peb_direct(&z4, 100.0).unwrap();
        assert!((a - b).abs() / b < 1e-8);
        let two = z4.scale(&BigRational::from_integer(BigInt::from(2))).unwrap();
        assert!(bound_peb(&two, 100.0).unwrap() < a);
        assert!(bound_peb(&z4, 1e8).unwrap() < 1e-3);
    }

    #[test]
    fn pce_examples() {
        let z4 = z(4);
        let e = z4.scale(&BigRational::from_integer(BigInt::from(4))).unwrap();
        let low = bound_pce(&z4, &e, 1e-6).unwrap();
        let limit = (std::f64::consts::PI / 6f64.sqrt()).powi(4) / 256.0;
        assert!((low / limit - 1.0).abs() < 1e-3);
        assert_eq!(bound_pce(&e, &z4, 1.0).unwrap_err(), Error::NotSublattice);
        let est = ecdp_estimate(&z4, &e, 10.0, 1e-12).unwrap();
        assert!(est <= bound_pce(&z4, &e, 10.0).unwrap());
    }

    #[test]
    fn inverse_norm_sums() {
        assert_eq!(inverse_norm_sum(&z(2).to_float(), 5.0).unwrap(), InverseNormSum::Divergent);
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let golden = FloatLattice::new(vec![vec![1.0, 1.0], vec![phi, 1.0 - phi]]).unwrap();
        assert_eq!(inverse_norm_sum(&golden, 0.5).unwrap(), InverseNormSum::Finite(0.0));
        match inverse_norm_sum(&golden, 10.0).unwrap() {
            InverseNormSum::Finite(v) => assert!(v > 2.0),
            InverseNormSum::Divergent => panic!("golden embedding has full diversity"),
        }
    }

    #[test]
    fn bessel_values() {
        // K_1(1), K_1(0.1), K_1(5)
        assert!((bessel_k1_scaled(1.0) - 0.6019072301972346).abs() < 1e-15);
        assert!((bessel_k1_scaled(0.1) / 0.1 - 9.853844780870606).abs() < 1e-12);
        assert!((bessel_k1_scaled(5.0) / 5.0 - 0.004044613445452164).abs() < 1e-17);
        assert!((bessel_k1_scaled(1e-9) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn float_poisson_f_matches_cosets() {
        let lat = crate::catalog::d_n(3);
        for g in [0.1, 1.0, 10.0, 100.0] {
            let exact = eval_f(&lat, g, 1e-12).unwrap();
            let float = eval_f_float(&lat.to_float(), g, 1e-12).unwrap();
            assert!((exact - float).abs() / exact < 1e-10, "{g}: {exact} vs {float}");
        }
    }

    #[test]
    fn float_routes_match_exact() {
        let lat = crate::catalog::d_n(3);
        let g = eval_g(&lat, 2.0).unwrap();
        let gf = eval_g_float(&lat.to_float(), 2.0).unwrap();
        assert!((g - gf).abs() / g < 1e-10);
        let f = eval_f(&lat, 50.0, 1e-12).unwrap();
        let ff = eval_f_float(&lat.to_float(), 50.0, 1e-5).unwrap();
        assert!((f - ff).abs() / f < 1e-5, "{f} vs {ff}");
    }
}
