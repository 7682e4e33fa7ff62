//! l1 theta series: closed forms for Construction A lattices and their duals,
//! rational lattices via denominator clearing, and a brute-force l^p oracle.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::code::{LinearCode, SweEnumerator};
use crate::cyclotomic::{CyclicRing, Elem};
use crate::error::{Error, Result};
use crate::geometry;
use crate::lattice::{code_from_lattice, IntegerLattice, Lattice};
use crate::series::{PowerSeries, ThetaRational};

fn poly_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    out
}

/// The polynomial substituted for the class-i variable: q^i + q^(m-i),
/// which is 1 + q^m for i = 0 and 2 q^(m/2) for the middle class of even m.
fn class_polynomial(m: usize, i: usize) -> Vec<BigInt> {
    let mut p = vec![BigInt::zero(); m + 1];
    p[i] += 1;
    p[m - i] += 1;
    p
}

/// Theta^1 of A(C) from the symmetrized weight enumerator of C:
/// swe(1 + q^m, q + q^(m-1), ..., q^t + q^(m-t)) / (1 - q^m)^n.
pub fn theta_l1_from_swe(swe: &SweEnumerator) -> ThetaRational {
    let m = swe.modulus() as usize;
    let n = swe.length();
    let t = swe.t();
    let mut powers: Vec<Vec<Vec<BigInt>>> = Vec::with_capacity(t + 1);
    for i in 0..=t {
        let base = class_polynomial(m, i);
        let max_e = swe.terms().keys().map(|e| e[i]).max().unwrap_or(0) as usize;
        let mut p = vec![vec![BigInt::one()]];
        for k in 1..=max_e {
            p.push(poly_mul(&p[k - 1], &base));
        }
        powers.push(p);
    }
    let mut num = vec![BigInt::zero(); n * m + 1];
    for (e, &count) in swe.terms() {
        let mut term = vec![BigInt::one()];
        for (i, &k) in e.iter().enumerate() {
            if k > 0 {
                term = poly_mul(&term, &powers[i][k as usize]);
            }
        }
        let c = BigInt::from(count);
        for (j, x) in term.iter().enumerate() {
            num[j] += &c * x;
        }
    }
    ThetaRational::new(num, m as u64, n as u32, 1)
}

/// Theta^1 of the Construction A lattice of `code`, in closed form.
pub fn theta_l1_construction_a(code: &LinearCode) -> Result<ThetaRational> {
    Ok(theta_l1_from_swe(&code.swe(crate::enumeration_cap())?))
}

/// Series with coefficients in the cyclotomic group ring, truncated at `order`.
type RingSeries = Vec<Elem>;

fn ring_series_mul(ring: &CyclicRing, a: &RingSeries, b: &RingSeries, order: usize) -> Result<RingSeries> {
    let mut out: RingSeries = vec![ring.zero(); order + 1];
    for (i, x) in a.iter().enumerate().take(order + 1) {
        if CyclicRing::is_zero(x) {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(order + 1 - i) {
            if CyclicRing::is_zero(y) {
                continue;
            }
            let p = ring.mul(x, y)?;
            CyclicRing::add_assign(&mut out[i + j], &p)?;
        }
    }
    Ok(out)
}

/// Theta^1 of A(C^perp) to order `order`, computed from the enumerator of C
/// alone: (1 - q^2)^n / |C| * swe_C(y_0, ..., y_t) with
/// y_k = 1 / (1 - 2 cos(2 pi k / m) q + q^2).
pub fn theta_l1_dual_from_swe(swe: &SweEnumerator, size_c: u128, order: usize) -> Result<PowerSeries> {
    if size_c == 0 {
        return Err(Error::InvalidArgument("code size must be positive".into()));
    }
    let m = swe.modulus() as usize;
    let n = swe.length();
    let t = swe.t();
    let ring = CyclicRing::new(m);
    let mut powers: Vec<Vec<RingSeries>> = Vec::with_capacity(t + 1);
    for k in 0..=t {
        // Chebyshev recursion: a_0 = 1, a_1 = c, a_j = c a_{j-1} - a_{j-2}
        let c = ring.two_cos(k as i64);
        let mut y: RingSeries = Vec::with_capacity(order + 1);
        y.push(ring.constant(1));
        if order >= 1 {
            y.push(c.clone());
        }
        for j in 2..=order {
            let next = CyclicRing::sub(&ring.mul(&c, &y[j - 1])?, &y[j - 2])?;
            y.push(next);
        }
        let max_e = swe.terms().keys().map(|e| e[k]).max().unwrap_or(0) as usize;
        let mut one: RingSeries = vec![ring.zero(); order + 1];
        one[0] = ring.constant(1);
        let mut p = vec![one];
        for e in 1..=max_e {
            p.push(ring_series_mul(&ring, &p[e - 1], &y, order)?);
        }
        powers.push(p);
    }
    let mut total: RingSeries = vec![ring.zero(); order + 1];
    for (e, &count) in swe.terms() {
        let mut term: Option<RingSeries> = None;
        for (k, &ek) in e.iter().enumerate() {
            if ek == 0 {
                continue;
            }
            let p = &powers[k][ek as usize];
            term = Some(match term {
                None => p.clone(),
                Some(acc) => ring_series_mul(&ring, &acc, p, order)?,
            });
        }
        let term = term.unwrap_or_else(|| {
            let mut one = vec![ring.zero(); order + 1];
            one[0] = ring.constant(1);
            one
        });
        let c = i128::try_from(count).map_err(|_| Error::Overflow("dual theta series"))?;
        for (acc, x) in total.iter_mut().zip(&term) {
            CyclicRing::add_assign(acc, &CyclicRing::scale(x, c)?)?;
        }
    }
    let values: Vec<i128> = total.iter().map(|x| ring.to_integer(x)).collect::<Result<_>>()?;
    // multiply by (1 - q^2)^n
    let mut factor = vec![BigInt::zero(); order + 1];
    let mut binom = BigInt::one();
    for j in 0..=n {
        if 2 * j > order {
            break;
        }
        factor[2 * j] = if j % 2 == 0 { binom.clone() } else { -binom.clone() };
        binom = binom * BigInt::from(n - j) / BigInt::from(j + 1);
    }
    let size = BigInt::from(size_c);
    let mut coeffs = Vec::with_capacity(order + 1);
    for k in 0..=order {
        let mut s = BigInt::zero();
        for j in 0..=k {
            if !factor[j].is_zero() && values[k - j] != 0 {
                s += &factor[j] * BigInt::from(values[k - j]);
            }
        }
        let (q, r) = num_integer::Integer::div_rem(&s, &size);
        if !r.is_zero() || q < BigInt::zero() {
            return Err(Error::NonIntegralResult(format!("coefficient {s} of q^{k} is not a nonnegative multiple of |C| = {size_c}")));
        }
        coeffs.push(q);
    }
    Ok(PowerSeries::from_integers(coeffs, 1))
}

/// Theta^1 of the Construction A lattice of the dual code, to `order`.
pub fn theta_l1_dual_construction_a(code: &LinearCode, order: usize) -> Result<PowerSeries> {
    let swe = code.swe(crate::enumeration_cap())?;
    theta_l1_dual_from_swe(&swe, code.size(), order)
}

/// Closed-form Theta^1 of an integer lattice, via its code.
pub fn theta_l1_integer_lattice(lat: &IntegerLattice) -> Result<ThetaRational> {
    theta_l1_construction_a(&code_from_lattice(lat).code)
}

/// Closed-form Theta^1 of a rational lattice in u = q^(1/d), `d` the common
/// denominator of the basis.
pub fn theta_l1_lattice(lat: &Lattice) -> Result<ThetaRational> {
    let (d, int) = lat.integral_scaling();
    let r = theta_l1_integer_lattice(&int)?;
    let d = d.to_u64().ok_or(Error::Overflow("lattice denominator"))?;
    Ok(ThetaRational::new(r.numerator().to_vec(), r.denominator_base(), r.denominator_power(), d))
}

/// Theta^1 of a rational lattice through the dual-code formula, to order
/// `q_order` in q (root = common denominator).
pub fn theta_l1_lattice_via_dual(lat: &Lattice, q_order: usize) -> Result<PowerSeries> {
    let (d, int) = lat.integral_scaling();
    let d = d.to_u64().ok_or(Error::Overflow("lattice denominator"))?;
    let code = code_from_lattice(&int).code;
    let dual = code.dual();
    let s = theta_l1_dual_from_swe(&dual.swe(crate::enumeration_cap())?, dual.size(), q_order * d as usize)?;
    Ok(PowerSeries::new(s.coefficients().to_vec(), d))
}

/// Theta^1 of the dual lattice L^*, to order `q_order` in q.
///
/// With d L = A(C) and m the exponent of the code, L^* = (d/m) A(C^perp).
pub fn theta_l1_dual_lattice(lat: &Lattice, q_order: usize) -> Result<PowerSeries> {
    let (d, int) = lat.integral_scaling();
    let d = d.to_usize().ok_or(Error::Overflow("lattice denominator"))?;
    let pair = code_from_lattice(&int);
    let m = pair.m as usize;
    let inner_order = (q_order * m).div_ceil(d);
    let s = theta_l1_dual_from_swe(&pair.code.swe(crate::enumeration_cap())?, pair.code.size(), inner_order)?;
    let scaled = s.substitute_q_power(&BigRational::new(BigInt::from(d), BigInt::from(m)))?;
    let target = q_order * scaled.root() as usize;
    Ok(scaled.truncate(target))
}

/// Numerical Theta^1 of the dual lattice L^* at q in (0, 1), from the
/// enumerator of the code of d L (all terms positive).
pub fn theta_l1_dual_lattice_value(lat: &Lattice, q: f64) -> Result<f64> {
    let (d, int) = lat.integral_scaling();
    let d = d.to_f64().ok_or(Error::Overflow("lattice denominator"))?;
    let pair = code_from_lattice(&int);
    let swe = pair.code.swe(crate::enumeration_cap())?;
    Ok(dual_theta_value_from_swe(&swe, pair.code.size(), q.powf(d / pair.m as f64)))
}

/// Value of Theta^1 of A(C^perp) at x from the enumerator of C.
pub fn dual_theta_value_from_swe(swe: &SweEnumerator, size_c: u128, x: f64) -> f64 {
    let m = swe.modulus() as f64;
    let t = swe.t();
    let y: Vec<f64> = (0..=t)
        .map(|k| {
            let c = (2.0 * std::f64::consts::PI * k as f64 / m).cos();
            1.0 / (1.0 - 2.0 * c * x + x * x)
        })
        .collect();
    let n = swe.length() as i32;
    (1.0 - x * x).powi(n) / size_c as f64 * swe.evaluate(&y)
}

/// Brute-force Theta^p: sum over lattice vectors of q^(|x|_p^p), for
/// integer p >= 1, to order `q_order` in q. Coefficients are exact counts;
/// the series variable is q^(1/d^p).
pub fn theta_lp_bruteforce(lat: &Lattice, p: u32, q_order: usize) -> Result<PowerSeries> {
    if p == 0 {
        return Err(Error::InvalidArgument("p must be a positive integer".into()));
    }
    let n = lat.dim() as f64;
    let (d, _) = lat.integral_scaling();
    let d = d.to_u64().ok_or(Error::Overflow("lattice denominator"))?;
    let root = d.checked_pow(p).ok_or(Error::Overflow("series root"))?;
    let max_k = q_order as u128 * root as u128;
    let max_k_usize = usize::try_from(max_k).map_err(|_| Error::Overflow("series order"))?;
    // |x|_2 <= n^(1/2 - 1/p) |x|_p for p >= 2 and |x|_2 <= |x|_1
    let lp_radius = (max_k as f64).powf(1.0 / p as f64);
    let radius = lp_radius * n.powf(0.5 - 1.0 / p as f64).max(1.0);
    let mut counts = vec![0u128; max_k_usize + 1];
    counts[0] = 1;
    let mut overflow = false;
    geometry::exact_half_ball(lat, radius, crate::enumeration_cap(), |v| {
        let mut s: u128 = 0;
        for &x in v {
            match (x.unsigned_abs()).checked_pow(p).and_then(|y| s.checked_add(y)) {
                Some(t) => s = t,
                None => {
                    overflow = true;
                    return;
                }
            }
        }
        if s <= max_k {
            counts[s as usize] += 2;
        }
    })?;
    if overflow {
        return Err(Error::Overflow("l^p norm"));
    }
    Ok(PowerSeries::from_integers(counts.into_iter().map(BigInt::from).collect(), root))
}

fn unit_volume_exponent(lat: &Lattice) -> f64 {
    lat.volume_f64().powf(-1.0 / lat.dim() as f64)
}

/// Point q in the bracket where Theta^1 of the unit-volume rescalings of the
/// two lattices cross, found by bisection on the closed forms.
pub fn theta_crossover(a: &Lattice, b: &Lattice, bracket: (f64, f64)) -> Result<f64> {
    let (lo, hi) = bracket;
    if !(0.0 < lo && lo < hi && hi < 1.0) {
        return Err(Error::InvalidArgument("bracket must satisfy 0 < lo < hi < 1".into()));
    }
    let ta = theta_l1_lattice(a)?;
    let tb = theta_l1_lattice(b)?;
    let (ca, cb) = (unit_volume_exponent(a), unit_volume_exponent(b));
    let f = |q: f64| ta.evaluate(q.powf(ca)) - tb.evaluate(q.powf(cb));
    let (mut lo, mut hi) = (lo, hi);
    let (flo, fhi) = (f(lo), f(hi));
    if !(flo * fhi < 0.0) {
        return Err(Error::NoSignChange);
    }
    let lo_sign = flo.signum();
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == lo_sign {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Theta^1 of Z^n and of the orthogonal lattice alpha_1 Z + ... + alpha_n Z
/// at q, for scalings with product one.
pub fn theta_orthogonal_comparison(alphas: &[f64], q: f64) -> Result<(f64, f64)> {
    if alphas.is_empty() || alphas.iter().any(|&a| !(a > 0.0)) {
        return Err(Error::InvalidArgument("scalings must be positive".into()));
    }
    let prod: f64 = alphas.iter().product();
    if (prod - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidArgument(format!("product of scalings is {prod}, expected 1")));
    }
    if !(0.0 < q && q < 1.0) {
        return Err(Error::InvalidArgument("q must lie in (0, 1)".into()));
    }
    let factor = |x: f64| (1.0 + x) / (1.0 - x);
    let z = factor(q).powi(alphas.len() as i32);
    let scaled = alphas.iter().map(|&a| factor(q.powf(a))).product();
    Ok((z, scaled))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(s: &PowerSeries) -> Vec<i64> {
        s.integer_coefficients().unwrap().iter().map(|x| x.to_i64().unwrap()).collect()
    }

    #[test]
    fn z_n_closed_form() {
        for n in 1..=4usize {
            let t = theta_l1_construction_a(&LinearCode::full(2, n)).unwrap();
            let s = ints(&t.to_series(3));
            let n = n as i64;
            assert_eq!(s, vec![1, 2 * n, 2 * n * n, 2 * n * (1 + 2 * n * n) / 3]);
        }
    }

    #[test]
    fn z1_bruteforce() {
        let s = theta_lp_bruteforce(&Lattice::standard(1), 1, 3).unwrap();
        assert_eq!(ints(&s), vec![1, 2, 2, 2]);
    }

    #[test]
    fn d4_bruteforce_and_closed_form() {
        let d4 = LinearCode::even_weight(4);
        let lat = d4.lattice().to_lattice();
        let brute = theta_lp_bruteforce(&lat, 1, 2).unwrap();
        assert_eq!(ints(&brute), vec![1, 0, 32]);
        let closed = theta_l1_construction_a(&d4).unwrap().to_series(6);
        assert_eq!(closed, theta_lp_bruteforce(&lat, 1, 6).unwrap());
    }

    #[test]
    fn l2_theta_of_z2() {
        // r_2(k): 1, 4, 4, 0, 4, 8
        let s = theta_lp_bruteforce(&Lattice::standard(2), 2, 5).unwrap();
        assert_eq!(ints(&s), vec![1, 4, 4, 0, 4, 8]);
    }

    #[test]
    fn dual_formula_matches_dual_code() {
        let c = LinearCode::new(5, 3, vec![vec![1, 2, 0], vec![0, 1, 4]]).unwrap();
        let via = theta_l1_dual_construction_a(&c, 10).unwrap();
        let direct = theta_l1_construction_a(&c.dual()).unwrap().to_series(10);
        assert_eq!(via, direct);
    }

    #[test]
    fn full_code_dual_is_scaled_cubic() {
        let s = theta_l1_dual_construction_a(&LinearCode::full(3, 2), 6).unwrap();
        assert_eq!(ints(&s), vec![1, 0, 0, 4, 0, 0, 8]);
    }

    #[test]
    fn rational_lattice_theta() {
        let z3 = theta_l1_lattice(&Lattice::standard(3)).unwrap();
        assert_eq!(z3.to_series(2), theta_l1_construction_a(&LinearCode::full(2, 3)).unwrap().to_series(2));
        let half = Lattice::standard(2).scale(&BigRational::new(1.into(), 2.into())).unwrap();
        let t = theta_l1_lattice(&half).unwrap();
        assert_eq!(t.root(), 2);
        assert_eq!(ints(&t.to_series(2)), vec![1, 4, 8]);
    }

    #[test]
    fn checkerboard_plane() {
        let lat = Lattice::from_integer_rows(&[vec![2, 0], vec![1, 1]]).unwrap();
        let s = theta_l1_lattice(&lat).unwrap().expand_q(4);
        assert_eq!(ints(&s), vec![1, 0, 8, 0, 16]);
        assert_eq!(s, theta_lp_bruteforce(&lat, 1, 4).unwrap());
    }

    #[test]
    fn orthogonal_examples() {
        let (a, b) = theta_orthogonal_comparison(&[1.0, 1.0], 0.3).unwrap();
        assert_eq!(a, b);
        let q = (-2.0f64).exp();
        let (z, s) = theta_orthogonal_comparison(&[2.0, 0.5], q).unwrap();
        let coth = |x: f64| x.cosh() / x.sinh();
        assert!((z - coth(1.0).powi(2)).abs() < 1e-12);
        assert!((s - coth(2.0) * coth(0.5)).abs() < 1e-12);
        assert!(z < s);
        assert!(theta_orthogonal_comparison(&[2.0, 1.0], 0.3).is_err());
    }

    #[test]
    fn crossover_errors() {
        let z2 = Lattice::standard(2);
        assert_eq!(theta_crossover(&z2, &z2, (0.001, 0.5)).unwrap_err(), Error::NoSignChange);
        let flipped = z2.signed_permutation(&[1, 0], &[-1, 1]);
        assert_eq!(theta_crossover(&z2, &flipped, (0.001, 0.5)).unwrap_err(), Error::NoSignChange);
    }
}
