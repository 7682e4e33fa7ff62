//! Named lattices and codes: the densest known lattice cross-polytope
//! packings in dimensions 1 to 6, the index-256 sublattices of Z^4 used in
//! the simulations, and the quaternary Golay enumerator.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::code::{LinearCode, SweEnumerator};
use crate::lattice::{construction_a, Lattice};

/// Circulant matrix whose i-th row is the first row shifted right by i.
pub fn circulant(first: &[i64]) -> Vec<Vec<i64>> {
    let n = first.len();
    (0..n).map(|i| (0..n).map(|j| first[(j + n - i) % n]).collect()).collect()
}

/// Printed data for one dimension of the densest known packings.
#[derive(Debug, Clone, Copy)]
pub struct PackingRecord {
    pub n: usize,
    /// l1 minimum after rescaling to unit volume.
    pub lambda1: f64,
    pub density: f64,
    pub kissing: usize,
}

#[allow(clippy::approx_constant)]
pub const PACKING_RECORDS: [PackingRecord; 6] = [
    PackingRecord { n: 1, lambda1: 1.0, density: 1.0, kissing: 2 },
    PackingRecord { n: 2, lambda1: 1.41421, density: 1.0, kissing: 8 },
    PackingRecord { n: 3, lambda1: 1.78467, density: 0.947368, kissing: 14 },
    PackingRecord { n: 4, lambda1: 2.10934, density: 0.824858, kissing: 30 },
    PackingRecord { n: 5, lambda1: 2.41383, density: 0.682885, kissing: 50 },
    PackingRecord { n: 6, lambda1: 2.69874, density: 0.536574, kissing: 72 },
];

/// Integer generator rows of the densest known lattice cross-polytope
/// packing in dimension `n` (1 to 6).
pub fn record_packing_rows(n: usize) -> Option<Vec<Vec<i64>>> {
    Some(match n {
        1 => vec![vec![1]],
        2 => vec![vec![1, 1], vec![1, -1]],
        3 => circulant(&[3, -2, 1]),
        4 => vec![vec![20, 53, -53, -42], vec![-62, -22, 42, -42], vec![-22, -22, -62, 62], vec![20, 53, 42, 53]],
        5 => circulant(&[-1, -4, 4, 5, 6]),
        6 => circulant(&[-3, -4, 5, 4, 9, 3]),
        _ => return None,
    })
}

pub fn record_packing(n: usize) -> Option<Lattice> {
    record_packing_rows(n).map(|r| Lattice::from_integer_rows(&r).expect("nonsingular"))
}

/// Index-256 sublattices of Z^4 (before rotation into a fixed superlattice)
/// with the printed l1 minima of the duals of their rotated versions.
pub const SIM_SUBLATTICES: [([[i64; 4]; 4], f64); 6] = [
    ([[-2, 5, -4, -4], [2, 2, -2, 4], [2, 4, -5, -3], [0, -4, 1, 1]], 1.91095),
    ([[0, 2, 0, -4], [4, 0, 0, 2], [0, 0, -4, -2], [3, -3, -1, -1]], 1.63028),
    ([[0, 5, 0, 4], [-1, 1, 1, -2], [-1, 0, 0, 6], [8, 8, 2, -8]], 1.38677),
    ([[3, -1, -6, -4], [2, -6, -4, -2], [-8, -7, -3, -4], [1, -7, -6, -3]], 1.1595),
    ([[6, 9, -6, 8], [1, 8, 1, -4], [4, -2, -2, 1], [7, -6, -7, 9]], 0.990213),
    ([[-5, 3, 4, 7], [1, 7, 4, 5], [6, 4, 2, -3], [9, 2, -4, -9]], 0.705421),
];

pub fn sim_sublattice(i: usize) -> Option<Lattice> {
    SIM_SUBLATTICES
        .get(i)
        .map(|(rows, _)| Lattice::from_integer_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).expect("nonsingular"))
}

/// D_n, the even-coordinate-sum sublattice of Z^n.
pub fn d_n(n: usize) -> Lattice {
    construction_a(&LinearCode::even_weight(n)).to_lattice()
}

/// Z^4 rotated by the normalized Hadamard matrix (1/2) H_4.
pub fn hadamard_4() -> Lattice {
    let h = [[1, 1, 1, 1], [1, -1, 1, -1], [1, 1, -1, -1], [1, -1, -1, 1]];
    let basis = h.iter().map(|r| r.iter().map(|&x| BigRational::new(BigInt::from(x), BigInt::from(2))).collect()).collect();
    Lattice::new(basis).expect("nonsingular")
}

/// Symmetrized weight enumerator of the extended quaternary Golay code, as
/// printed (variables x, y, z for coordinates 0, +-1, 2 mod 4).
pub fn quaternary_golay_swe() -> SweEnumerator {
    const TERMS: [(u32, u32, u32, u128); 24] = [
        (24, 0, 0, 1),
        (16, 0, 8, 759),
        (14, 8, 2, 12144),
        (12, 8, 4, 170016),
        (12, 0, 12, 2576),
        (11, 12, 1, 61824),
        (10, 8, 6, 765072),
        (9, 12, 3, 1133440),
        (8, 16, 0, 24288),
        (8, 8, 8, 1214400),
        (8, 0, 16, 759),
        (7, 12, 5, 4080384),
        (6, 16, 2, 680064),
        (6, 8, 10, 765072),
        (5, 12, 7, 4080384),
        (4, 16, 4, 1700160),
        (4, 8, 12, 170016),
        (3, 12, 9, 1133440),
        (2, 16, 6, 680064),
        (2, 8, 14, 12144),
        (1, 12, 11, 61824),
        (0, 24, 0, 4096),
        (0, 16, 8, 24288),
        (0, 0, 24, 1),
    ];
    let terms: BTreeMap<Vec<u32>, u128> = TERMS.iter().map(|&(x, y, z, c)| (vec![x, y, z], c)).collect();
    SweEnumerator::new(4, 24, terms).expect("homogeneous of degree 24")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golay_fixture_totals() {
        let s = quaternary_golay_swe();
        assert_eq!(s.total(), 1 << 24);
    }

    #[test]
    fn record_volumes_are_consistent() {
        for rec in PACKING_RECORDS {
            let lat = record_packing(rec.n).unwrap();
            assert_eq!(lat.dim(), rec.n);
        }
        // circ(3,-2,1) has determinant 38
        assert_eq!(record_packing(3).unwrap().volume_f64(), 38.0);
    }

    #[test]
    fn sublattices_have_index_256() {
        for i in 0..6 {
            assert_eq!(sim_sublattice(i).unwrap().volume_f64(), 256.0);
        }
    }
}
