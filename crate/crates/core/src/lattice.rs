//! Exact rational lattices, integer sublattices of Z^n and the Construction A
//! correspondence with linear codes.

use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::code::LinearCode;
use crate::error::{Error, Result};
use crate::matrix::{self, IntMatrix, RatMatrix, Snf};

/// A full-rank lattice in Q^n given by an exact rational basis (rows are
/// basis vectors).
///
/// Equality is lattice equality (HNF of the denominator-cleared basis), not
/// basis equality.
#[derive(Clone)]
pub struct Lattice {
    basis: RatMatrix,
    volume: BigRational,
}

impl Lattice {
    pub fn new(basis: RatMatrix) -> Result<Self> {
        let n = basis.len();
        if n == 0 {
            return Err(Error::InvalidLattice("empty basis".into()));
        }
        if basis.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidLattice(format!("basis must be {n}x{n}")));
        }
        let volume = matrix::det_rat(&basis).abs();
        if volume.is_zero() {
            return Err(Error::InvalidLattice("singular basis".into()));
        }
        Ok(Lattice { basis, volume })
    }

    pub fn from_integer_rows(rows: &[Vec<i64>]) -> Result<Self> {
        Self::new(matrix::rat_from_int(&matrix::int_from_i64(rows)))
    }

    /// Z^n.
    pub fn standard(n: usize) -> Self {
        Self::new(matrix::rat_from_int(&matrix::identity_int(n))).expect("identity is nonsingular")
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &RatMatrix {
        &self.basis
    }

    pub fn volume(&self) -> &BigRational {
        &self.volume
    }

    pub fn volume_f64(&self) -> f64 {
        rat_to_f64(&self.volume)
    }

    /// Dual lattice, generated by the inverse transpose of the basis.
    pub fn dual(&self) -> Lattice {
        let inv = matrix::inverse_rat(&self.basis).expect("lattice bases are nonsingular");
        let basis = matrix::transpose(&inv);
        let volume = BigRational::one() / &self.volume;
        Lattice { basis, volume }
    }

    pub fn scale(&self, c: &BigRational) -> Result<Lattice> {
        if !c.is_positive() {
            return Err(Error::InvalidArgument("scale factor must be positive".into()));
        }
        let basis = self.basis.iter().map(|r| r.iter().map(|x| x * c).collect()).collect();
        Lattice::new(basis)
    }

    pub fn to_float(&self) -> FloatLattice {
        FloatLattice { basis: self.basis.iter().map(|r| r.iter().map(rat_to_f64).collect()).collect() }
    }

    /// Scaled copy with volume one. The scale factor vol^(-1/n) is in general
    /// irrational, so the result is a float lattice.
    pub fn unit_volume_form(&self) -> FloatLattice {
        self.to_float().unit_volume_form()
    }

    /// `(d, d*L)` with `d` the least common denominator of the basis.
    pub fn integral_scaling(&self) -> (BigInt, IntegerLattice) {
        let (d, int) = matrix::clear_denominators(&self.basis);
        (d, IntegerLattice::new_unchecked(int))
    }

    /// The same lattice viewed as an integer lattice; fails if not in Z^n.
    pub fn to_integer(&self) -> Result<IntegerLattice> {
        let (d, lat) = self.integral_scaling();
        if d.is_one() {
            Ok(lat)
        } else {
            Err(Error::NotIntegral)
        }
    }

    /// Canonical form: least common denominator and HNF of the cleared basis.
    pub fn canonical_form(&self) -> (BigInt, IntMatrix) {
        let (d, lat) = self.integral_scaling();
        (d, lat.hnf().clone())
    }

    pub fn contains(&self, v: &[BigRational]) -> bool {
        coefficients_of(&self.basis, v).map_or(false, |c| c.iter().all(|x| x.is_integer()))
    }

    /// True when every basis vector of `self` lies in `other`.
    pub fn is_sublattice_of(&self, other: &Lattice) -> bool {
        self.dim() == other.dim() && self.basis.iter().all(|b| other.contains(b))
    }

    /// Integer coordinates of `self`'s basis in terms of `other`'s basis.
    pub fn coordinates_in(&self, other: &Lattice) -> Result<IntMatrix> {
        if self.dim() != other.dim() {
            return Err(Error::NotSublattice);
        }
        let inv = matrix::inverse_rat(&other.basis).expect("nonsingular");
        let t = matrix::mul_rat(&self.basis, &inv);
        t.iter().map(|r| r.iter().map(|x| if x.is_integer() { Ok(x.to_integer()) } else { Err(Error::NotSublattice) }).collect()).collect()
    }

    /// Applies `x -> (s_0 x_{p_0}, ..., s_{n-1} x_{p_{n-1}})` to every basis vector.
    pub fn signed_permutation(&self, perm: &[usize], signs: &[i8]) -> Lattice {
        let basis = self
            .basis
            .iter()
            .map(|r| perm.iter().zip(signs).map(|(&p, &s)| if s < 0 { -r[p].clone() } else { r[p].clone() }).collect())
            .collect();
        Lattice { basis, volume: self.volume.clone() }
    }

    /// Multiplies the basis on the left by an integer matrix (unimodular
    /// matrices give another basis of the same lattice).
    pub fn transform(&self, t: &IntMatrix) -> Result<Lattice> {
        Lattice::new(matrix::mul_rat(&matrix::rat_from_int(t), &self.basis))
    }
}

impl PartialEq for Lattice {
    fn eq(&self, other: &Self) -> bool {
        self.dim() == other.dim() && self.volume == other.volume && self.canonical_form() == other.canonical_form()
    }
}

impl fmt::Debug for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<String>> = self.basis.iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect();
        f.debug_struct("Lattice").field("basis", &rows).field("volume", &self.volume.to_string()).finish()
    }
}

fn coefficients_of(basis: &RatMatrix, v: &[BigRational]) -> Option<Vec<BigRational>> {
    let inv = matrix::inverse_rat(basis)?;
    let n = basis.len();
    if v.len() != n {
        return None;
    }
    Some((0..n).map(|j| (0..n).fold(BigRational::zero(), |acc, i| acc + &v[i] * &inv[i][j])).collect())
}

pub fn rat_to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        // extreme magnitudes: fall back to a scaled division
        let n = x.numer().to_f64().unwrap_or(f64::INFINITY);
        let d = x.denom().to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

/// A full-rank sublattice of Z^n with cached Hermite and Smith normal forms.
pub struct IntegerLattice {
    basis: IntMatrix,
    hnf: OnceLock<IntMatrix>,
    snf: OnceLock<Snf>,
}

impl Clone for IntegerLattice {
    fn clone(&self) -> Self {
        IntegerLattice::new_unchecked(self.basis.clone())
    }
}

impl fmt::Debug for IntegerLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<String>> = self.basis.iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect();
        f.debug_struct("IntegerLattice").field("basis", &rows).finish()
    }
}

impl PartialEq for IntegerLattice {
    fn eq(&self, other: &Self) -> bool {
        self.hnf() == other.hnf()
    }
}

impl IntegerLattice {
    pub fn new(basis: IntMatrix) -> Result<Self> {
        let n = basis.len();
        if n == 0 || basis.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidLattice("basis must be square and nonempty".into()));
        }
        if matrix::det_int(&basis).is_zero() {
            return Err(Error::InvalidLattice("singular basis".into()));
        }
        Ok(Self::new_unchecked(basis))
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        Self::new(matrix::int_from_i64(rows))
    }

    /// Lattice generated by arbitrary integer rows (may be more than n); fails
    /// if they do not span a full-rank lattice.
    pub fn from_generators(rows: &IntMatrix, n: usize) -> Result<Self> {
        let h = matrix::hnf(rows);
        if h.len() != n {
            return Err(Error::InvalidLattice(format!("generators have rank {} < {n}", h.len())));
        }
        let lat = Self::new_unchecked(h.clone());
        let _ = lat.hnf.set(h);
        Ok(lat)
    }

    pub(crate) fn new_unchecked(basis: IntMatrix) -> Self {
        IntegerLattice { basis, hnf: OnceLock::new(), snf: OnceLock::new() }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &IntMatrix {
        &self.basis
    }

    pub fn hnf(&self) -> &IntMatrix {
        self.hnf.get_or_init(|| matrix::hnf(&self.basis))
    }

    pub fn snf(&self) -> &Snf {
        self.snf.get_or_init(|| matrix::snf(&self.basis))
    }

    /// Invariant factors alpha_1 | alpha_2 | ... | alpha_n of Z^n / L.
    pub fn invariant_factors(&self) -> &[BigInt] {
        &self.snf().diagonal
    }

    /// Smallest m with m Z^n contained in the lattice.
    pub fn exponent(&self) -> BigInt {
        self.invariant_factors().last().cloned().unwrap_or_else(BigInt::one)
    }

    /// |det|, the index of the lattice in Z^n.
    pub fn index(&self) -> BigInt {
        self.hnf().iter().enumerate().fold(BigInt::one(), |acc, (i, r)| acc * &r[i])
    }

    pub fn to_lattice(&self) -> Lattice {
        Lattice::new(matrix::rat_from_int(&self.basis)).expect("integer lattices are nonsingular")
    }

    pub fn contains(&self, v: &[BigInt]) -> bool {
        // reduce against the echelon HNF
        let h = self.hnf();
        let mut r: Vec<BigInt> = v.to_vec();
        for (i, row) in h.iter().enumerate() {
            if r[i].is_zero() {
                continue;
            }
            let (q, rem) = num_integer::Integer::div_rem(&r[i], &row[i]);
            if !rem.is_zero() {
                return false;
            }
            for (x, y) in r.iter_mut().zip(row) {
                *x -= &q * y;
            }
        }
        r.iter().all(|x| x.is_zero())
    }
}

/// A lattice with a floating-point basis, used where exact arithmetic is not
/// available (optimizer output, irrational rotations, unit-volume scalings).
#[derive(Debug, Clone, PartialEq)]
pub struct FloatLattice {
    basis: Vec<Vec<f64>>,
}

impl FloatLattice {
    pub fn new(basis: Vec<Vec<f64>>) -> Result<Self> {
        let n = basis.len();
        if n == 0 || basis.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidLattice("basis must be square and nonempty".into()));
        }
        if basis.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::InvalidLattice("non-finite basis entry".into()));
        }
        let lat = FloatLattice { basis };
        if lat.determinant() == 0.0 {
            return Err(Error::InvalidLattice("singular basis".into()));
        }
        Ok(lat)
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<f64>] {
        &self.basis
    }

    pub fn determinant(&self) -> f64 {
        let n = self.dim();
        nalgebra::DMatrix::from_fn(n, n, |i, j| self.basis[i][j]).determinant()
    }

    pub fn volume(&self) -> f64 {
        self.determinant().abs()
    }

    pub fn scale(&self, c: f64) -> FloatLattice {
        FloatLattice { basis: self.basis.iter().map(|r| r.iter().map(|x| x * c).collect()).collect() }
    }

    pub fn unit_volume_form(&self) -> FloatLattice {
        self.scale(self.volume().powf(-1.0 / self.dim() as f64))
    }

    pub fn dual(&self) -> FloatLattice {
        let n = self.dim();
        let m = nalgebra::DMatrix::from_fn(n, n, |i, j| self.basis[i][j]);
        let inv = m.try_inverse().expect("nonsingular basis");
        FloatLattice { basis: (0..n).map(|i| (0..n).map(|j| inv[(j, i)]).collect()).collect() }
    }

    /// Basis multiplied on the right by `r` (e.g. a rotation of the frame).
    pub fn rotate(&self, r: &[Vec<f64>]) -> FloatLattice {
        let n = self.dim();
        let basis = self.basis.iter().map(|row| (0..n).map(|j| (0..n).map(|k| row[k] * r[k][j]).sum()).collect()).collect();
        FloatLattice { basis }
    }

    /// Lattice vector with the given integer coefficients.
    pub fn vector(&self, coeffs: &[i64]) -> Vec<f64> {
        let n = self.dim();
        (0..n).map(|j| coeffs.iter().zip(&self.basis).map(|(&c, r)| c as f64 * r[j]).sum()).collect()
    }
}

/// An integer lattice together with the code it induces via Construction A.
#[derive(Debug, Clone)]
pub struct CodeLatticePair {
    pub m: u64,
    pub code: LinearCode,
    pub lattice: IntegerLattice,
}

/// Lattice `{x in Z^n : x mod m in C}`.
pub fn construction_a(code: &LinearCode) -> IntegerLattice {
    let n = code.length();
    let m = BigInt::from(code.modulus());
    let mut rows: IntMatrix = code.generators().iter().map(|g| g.iter().map(|&x| BigInt::from(x)).collect()).collect();
    for i in 0..n {
        rows.push((0..n).map(|j| if i == j { m.clone() } else { BigInt::zero() }).collect());
    }
    IntegerLattice::from_generators(&rows, n).expect("m*I has full rank")
}

/// The code `L / m Z^n` with `m` the largest invariant factor of `L`.
pub fn code_from_lattice(lat: &IntegerLattice) -> CodeLatticePair {
    let m_big = lat.exponent();
    let m = m_big.to_u64().expect("lattice exponent fits in u64");
    let generators = lat.hnf().iter().map(|r| r.iter().map(|x| mod_u64(x, m)).collect()).collect();
    let code = LinearCode::new(m, lat.dim(), generators).expect("valid generators");
    CodeLatticePair { m, code, lattice: lat.clone() }
}

/// Same as [`code_from_lattice`] for rational lattices, after clearing
/// denominators; returns the scaling `d` with `d*L` integral.
pub fn code_from_rational_lattice(lat: &Lattice) -> (BigInt, CodeLatticePair) {
    let (d, int) = lat.integral_scaling();
    (d, code_from_lattice(&int))
}

pub(crate) fn mod_u64(x: &BigInt, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mb = BigInt::from(m);
    let r = ((x % &mb) + &mb) % &mb;
    r.to_u64().expect("residue fits")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::LinearCode;

    fn rat(p: i64, q: i64) -> BigRational {
        BigRational::new(BigInt::from(p), BigInt::from(q))
    }

    #[test]
    fn volumes() {
        assert_eq!(Lattice::standard(3).volume(), &rat(1, 1));
        let d = Lattice::from_integer_rows(&[vec![2, 0, 0, 0], vec![0, 2, 0, 0], vec![0, 0, 2, 0], vec![0, 0, 0, 2]]).unwrap();
        assert_eq!(d.volume(), &rat(16, 1));
    }

    #[test]
    fn singular_basis_is_rejected() {
        let err = Lattice::from_integer_rows(&[vec![1, 2], vec![2, 4]]).unwrap_err();
        assert!(matches!(err, Error::InvalidLattice(_)));
    }

    #[test]
    fn duality_examples() {
        let z3 = Lattice::standard(3);
        assert_eq!(z3.dual(), z3);
        let two = Lattice::from_integer_rows(&[vec![2, 0], vec![0, 2]]).unwrap();
        let half = Lattice::standard(2).scale(&rat(1, 2)).unwrap();
        assert_eq!(two.dual(), half);
        let d4 = construction_a(&LinearCode::even_weight(4)).to_lattice();
        assert_eq!(d4.volume(), &rat(2, 1));
        assert_eq!(d4.dual().volume(), &rat(1, 2));
        assert_eq!(d4.dual().dual(), d4);
    }

    #[test]
    fn scaling_and_unit_volume() {
        let z2 = Lattice::standard(2);
        let s = z2.scale(&rat(2, 1)).unwrap();
        assert_eq!(s.volume(), &rat(4, 1));
        let u = s.unit_volume_form();
        for (i, r) in u.basis().iter().enumerate() {
            for (j, &x) in r.iter().enumerate() {
                assert!((x - if i == j { 1.0 } else { 0.0 }).abs() < 1e-15);
            }
        }
        let circ = Lattice::from_integer_rows(&[vec![3, -2, 1], vec![1, 3, -2], vec![-2, 1, 3]]).unwrap();
        assert!((circ.unit_volume_form().volume() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn snf_invariant_factors() {
        let l = IntegerLattice::from_rows(&[vec![2, 0], vec![1, 1]]).unwrap();
        assert_eq!(l.invariant_factors(), &[BigInt::from(1), BigInt::from(2)]);
        assert_eq!(l.exponent(), BigInt::from(2));
        let id = IntegerLattice::from_rows(&[vec![1, 0], vec![0, 1]]).unwrap();
        assert_eq!(id.invariant_factors(), &[BigInt::from(1), BigInt::from(1)]);
    }

    #[test]
    fn code_from_lattice_examples() {
        let z3 = IntegerLattice::from_rows(&[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]).unwrap();
        let pair = code_from_lattice(&z3);
        assert_eq!(pair.m, 1);
        assert_eq!(pair.code.size(), 1);

        let d5 = construction_a(&LinearCode::even_weight(5));
        let pair = code_from_lattice(&d5);
        assert_eq!(pair.m, 2);
        assert_eq!(pair.code.size(), 16);
        pair.code.for_each_codeword(1 << 20, |c| assert_eq!(c.iter().sum::<u64>() % 2, 0)).unwrap();

        let rep = IntegerLattice::from_rows(&[vec![2, 0], vec![1, 1]]).unwrap();
        let pair = code_from_lattice(&rep);
        assert_eq!(pair.m, 2);
        let mut words = pair.code.codewords(16).unwrap();
        words.sort();
        assert_eq!(words, vec![vec![0, 0], vec![1, 1]]);
    }

    #[test]
    fn construction_a_examples() {
        let full = construction_a(&LinearCode::full(2, 3));
        assert_eq!(full.index(), BigInt::one());
        let zero = construction_a(&LinearCode::zero(2, 2));
        assert_eq!(zero, IntegerLattice::from_rows(&[vec![2, 0], vec![0, 2]]).unwrap());
        let e8 = construction_a(&LinearCode::extended_hamming8());
        assert_eq!(e8.index(), BigInt::from(16));
    }

    #[test]
    fn not_integral() {
        let half = Lattice::standard(2).scale(&rat(1, 2)).unwrap();
        assert_eq!(half.to_integer().unwrap_err(), Error::NotIntegral);
    }

    #[test]
    fn membership_and_sublattices() {
        let z2 = Lattice::standard(2);
        let d2 = Lattice::from_integer_rows(&[vec![1, 1], vec![1, -1]]).unwrap();
        assert!(d2.is_sublattice_of(&z2));
        assert!(!z2.is_sublattice_of(&d2));
        let int = d2.to_integer().unwrap();
        assert!(int.contains(&[BigInt::from(2), BigInt::from(0)]));
        assert!(!int.contains(&[BigInt::from(1), BigInt::from(0)]));
    }
}
