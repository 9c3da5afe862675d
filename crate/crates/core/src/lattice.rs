//! Subgroups of `Z^n` in lower-triangular Hermite normal form.
//!
//! Basis rows are stored in the original coordinates; triangularity is with
//! respect to `ordering`, a permutation of the axes. Row `i` is supported on
//! the axes `ordering[0..=i]`, its entry on `ordering[i]` (the diagonal) is
//! non-negative, and every entry below a positive diagonal lies in
//! `[0, diagonal)`. Under these rules the basis is unique for a given
//! subgroup and ordering, so lattice equality is matrix equality.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("lattice has infinite index (rank {rank} < {n})")]
    InfiniteIndex { rank: usize, n: usize },
    #[error("no period for axis {axis} within bound {bound}")]
    NoPeriodWithinBound { axis: usize, bound: i64 },
    #[error("generator of length {got}, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("no generators given")]
    Empty,
    #[error("invalid axis ordering {0:?}")]
    BadOrdering(Vec<usize>),
}

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Lattice {
    n: usize,
    basis: Vec<Vec<i64>>,
    ordering: Vec<usize>,
}

impl fmt::Debug for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Lattice{:?}", self.basis)
    }
}

/// `(e_2, ..., e_n, e_1)`, the ordering used for twisted supports.
pub fn twisted_ordering(n: usize) -> Vec<usize> {
    (1..n).chain(std::iter::once(0)).take(n).collect()
}

impl Lattice {
    pub fn identity(n: usize) -> Self {
        let basis = (0..n)
            .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
            .collect();
        Lattice {
            n,
            basis,
            ordering: (0..n).collect(),
        }
    }

    pub fn from_generators(
        n: usize,
        gens: &[Vec<i64>],
        ordering: Option<&[usize]>,
    ) -> Result<Self, LatticeError> {
        if gens.is_empty() {
            return Err(LatticeError::Empty);
        }
        let ordering: Vec<usize> = match ordering {
            Some(o) => o.to_vec(),
            None => (0..n).collect(),
        };
        let mut seen = vec![false; n];
        if ordering.len() != n || ordering.iter().any(|&a| a >= n || std::mem::replace(&mut seen[a], true)) {
            return Err(LatticeError::BadOrdering(ordering));
        }
        // work in permuted coordinates
        let mut rows: Vec<Vec<i128>> = Vec::with_capacity(gens.len());
        for g in gens {
            if g.len() != n {
                return Err(LatticeError::DimensionMismatch {
                    expected: n,
                    got: g.len(),
                });
            }
            let r: Vec<i128> = ordering.iter().map(|&a| g[a] as i128).collect();
            if r.iter().any(|&x| x != 0) {
                rows.push(r);
            }
        }
        let mut tri: Vec<Vec<i128>> = vec![vec![0; n]; n];
        for col in (0..n).rev() {
            // gcd-eliminate column `col` among the remaining rows
            loop {
                let mut nz: Vec<usize> = (0..rows.len()).filter(|&i| rows[i][col] != 0).collect();
                if nz.len() <= 1 {
                    break;
                }
                nz.sort_by_key(|&i| rows[i][col].abs());
                let p = nz[0];
                let pivot = rows[p].clone();
                for &i in &nz[1..] {
                    let f = rows[i][col].div_euclid(pivot[col]);
                    for (x, y) in rows[i].iter_mut().zip(&pivot) {
                        *x -= f * y;
                    }
                }
            }
            if let Some(pos) = rows.iter().position(|r| r[col] != 0) {
                let mut r = rows.swap_remove(pos);
                if r[col] < 0 {
                    r.iter_mut().for_each(|x| *x = -*x);
                }
                tri[col] = r;
            }
            rows.retain(|r| r.iter().any(|&x| x != 0));
        }
        debug_assert!(rows.is_empty());
        // reduce below-diagonal entries
        for i in 0..n {
            for j in (0..i).rev() {
                let d = tri[j][j];
                if d == 0 {
                    continue;
                }
                let f = tri[i][j].div_euclid(d);
                if f != 0 {
                    let rj = tri[j].clone();
                    for (x, y) in tri[i].iter_mut().zip(&rj) {
                        *x -= f * y;
                    }
                }
            }
        }
        let basis = tri
            .iter()
            .map(|r| {
                let mut v = vec![0i64; n];
                for (k, &a) in ordering.iter().enumerate() {
                    v[a] = i64::try_from(r[k]).expect("lattice entry overflow");
                }
                v
            })
            .collect();
        Ok(Lattice { n, basis, ordering })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn basis(&self) -> &[Vec<i64>] {
        &self.basis
    }

    pub fn ordering(&self) -> &[usize] {
        &self.ordering
    }

    /// Diagonal entry of row `i`, i.e. its coefficient on `ordering[i]`.
    pub fn diagonal(&self, i: usize) -> i64 {
        self.basis[i][self.ordering[i]]
    }

    pub fn rank(&self) -> usize {
        (0..self.n).filter(|&i| self.diagonal(i) != 0).count()
    }

    pub fn is_full_rank(&self) -> bool {
        self.rank() == self.n
    }

    /// `[Z^n : L]`, or `None` when the index is infinite.
    pub fn index(&self) -> Option<u64> {
        if !self.is_full_rank() {
            return None;
        }
        Some((0..self.n).map(|i| self.diagonal(i) as u64).product())
    }

    pub fn contains(&self, m: &[i64]) -> bool {
        assert_eq!(m.len(), self.n);
        let mut v: Vec<i128> = m.iter().map(|&x| x as i128).collect();
        for i in (0..self.n).rev() {
            let a = self.ordering[i];
            let d = self.diagonal(i) as i128;
            if d == 0 {
                if v[a] != 0 {
                    return false;
                }
                continue;
            }
            if v[a] % d != 0 {
                return false;
            }
            let c = v[a] / d;
            for (x, &b) in v.iter_mut().zip(&self.basis[i]) {
                *x -= c * b as i128;
            }
        }
        debug_assert!(v.iter().all(|&x| x == 0));
        true
    }

    /// Smallest `t` in `[1, bound]` with `t e_axis` in the lattice.
    pub fn axis_period(&self, axis: usize, bound: i64) -> Result<i64, LatticeError> {
        let mut e = vec![0i64; self.n];
        for t in 1..=bound {
            e[axis] = t;
            if self.contains(&e) {
                return Ok(t);
            }
        }
        Err(LatticeError::NoPeriodWithinBound { axis, bound })
    }

    /// All axis periods, searched up to the index.
    pub fn axis_periods(&self) -> Result<Vec<i64>, LatticeError> {
        let idx = self.index().ok_or(LatticeError::InfiniteIndex {
            rank: self.rank(),
            n: self.n,
        })? as i64;
        (0..self.n).map(|i| self.axis_period(i, idx)).collect()
    }

    /// One representative per coset: the lexicographically smallest vector
    /// of the box `prod [0, r_i)` in each coset.
    pub fn coset_reps(&self) -> Result<Vec<Vec<i64>>, LatticeError> {
        let periods = self.axis_periods()?;
        let mut reps: Vec<Vec<i64>> = Vec::new();
        for m in box_points(&periods) {
            let fresh = reps.iter().all(|r| {
                let diff: Vec<i64> = m.iter().zip(r).map(|(a, b)| a - b).collect();
                !self.contains(&diff)
            });
            if fresh {
                reps.push(m);
            }
        }
        debug_assert_eq!(Some(reps.len() as u64), self.index());
        Ok(reps)
    }

    /// True iff every basis row of `self` lies in `other`.
    pub fn is_sublattice_of(&self, other: &Lattice) -> bool {
        self.basis.iter().all(|r| other.contains(r))
    }

    /// Same subgroup, regardless of the ordering used for the basis.
    pub fn same_group(&self, other: &Lattice) -> bool {
        self.n == other.n && self.is_sublattice_of(other) && other.is_sublattice_of(self)
    }
}

/// Lexicographic enumeration of `prod [0, r_i)`.
pub fn box_points(sides: &[i64]) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for &r in sides {
        let mut next = Vec::with_capacity(out.len() * r.max(0) as usize);
        for p in &out {
            for t in 0..r {
                let mut q = p.clone();
                q.push(t);
                next.push(q);
            }
        }
        out = next;
    }
    out
}

/// Lexicographic enumeration of `[-radius, radius]^n`.
pub fn cube_points(n: usize, radius: i64) -> Vec<Vec<i64>> {
    box_points(&vec![2 * radius + 1; n])
        .into_iter()
        .map(|p| p.into_iter().map(|x| x - radius).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lat(gens: &[&[i64]]) -> Lattice {
        let n = gens[0].len();
        let g: Vec<Vec<i64>> = gens.iter().map(|v| v.to_vec()).collect();
        Lattice::from_generators(n, &g, None).unwrap()
    }

    #[test]
    fn hnf_example() {
        let l = lat(&[&[2, 0], &[1, 1]]);
        assert_eq!(l.basis(), &[vec![2, 0], vec![1, 1]]);
        assert_eq!(l.index(), Some(2));
        let l2 = lat(&[&[1, 1], &[0, 2], &[4, 6]]);
        assert_eq!(l2, l);
    }

    #[test]
    fn identity_and_diag() {
        let l = lat(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
        assert_eq!(l, Lattice::identity(3));
        assert_eq!(l.index(), Some(1));
        let d = lat(&[&[2, 0, 0], &[0, 3, 0], &[0, 0, 5]]);
        assert_eq!(d.index(), Some(30));
    }

    #[test]
    fn rank_deficient() {
        let l = lat(&[&[2, 0]]);
        assert_eq!(l.rank(), 1);
        assert!(!l.is_full_rank());
        assert_eq!(l.index(), None);
        assert!(l.contains(&[4, 0]));
        assert!(!l.contains(&[2, 1]));
        assert!(matches!(l.coset_reps(), Err(LatticeError::InfiniteIndex { .. })));
    }

    #[test]
    fn membership() {
        let l = lat(&[&[2, 0], &[1, 1]]);
        assert!(l.contains(&[1, 1]));
        assert!(!l.contains(&[1, 0]));
        assert!(l.contains(&[0, 2]));
        assert!(l.contains(&[0, 0]));
        let z = lat(&[&[2]]);
        assert!(!z.contains(&[3]));
    }

    #[test]
    fn periods() {
        let l = lat(&[&[2, 0], &[1, 1]]);
        assert_eq!(l.axis_periods().unwrap(), vec![2, 2]);
        assert_eq!(Lattice::identity(3).axis_periods().unwrap(), vec![1, 1, 1]);
        assert_eq!(lat(&[&[3, 0], &[0, 1]]).axis_periods().unwrap(), vec![3, 1]);
        assert!(matches!(
            lat(&[&[3, 0], &[0, 1]]).axis_period(0, 2),
            Err(LatticeError::NoPeriodWithinBound { axis: 0, bound: 2 })
        ));
    }

    #[test]
    fn cosets() {
        let l = lat(&[&[2, 0], &[1, 1]]);
        assert_eq!(l.coset_reps().unwrap(), vec![vec![0, 0], vec![0, 1]]);
        assert_eq!(Lattice::identity(2).coset_reps().unwrap(), vec![vec![0, 0]]);
        assert_eq!(lat(&[&[2]]).coset_reps().unwrap(), vec![vec![0], vec![1]]);
    }

    #[test]
    fn twisted_order_puts_first_axis_last() {
        let g = vec![vec![1, 1], vec![0, 2]];
        let l = Lattice::from_generators(2, &g, Some(&twisted_ordering(2))).unwrap();
        // rows triangular w.r.t. (e2, e1): first row supported on e2 only
        assert_eq!(l.basis()[0][0], 0);
        assert_eq!(l.diagonal(0), 2);
        assert_eq!(l.diagonal(1), 1);
        assert!(l.same_group(&lat(&[&[2, 0], &[1, 1]])));
        assert_eq!(twisted_ordering(3), vec![1, 2, 0]);
        assert_eq!(twisted_ordering(1), vec![0]);
    }
}
