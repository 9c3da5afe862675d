//! Finite-dimensional simple Lie algebra data.
//!
//! Cartan matrices follow Bourbaki numbering with
//! `cartan[i][j] = <alpha_i^vee, alpha_j> = alpha_j(h_i)`. Weights are given in
//! the fundamental-weight basis, so a weight's `i`-th coordinate is its value
//! on the coroot `h_i`.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{rat_int, CycNum, CycScalar, CyclotomicField, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LieError {
    #[error("unsupported simple Lie algebra {0}{1}")]
    Unsupported(Series, usize),
    #[error("weight {0:?} is not dominant")]
    NonDominant(Vec<i64>),
    #[error("weight has {got} coordinates, algebra has rank {rank}")]
    RankMismatch { rank: usize, got: usize },
    #[error("invalid diagram automorphism: {0}")]
    BadAutomorphism(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Series {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// Integral weight in fundamental-weight coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Weight(pub Vec<i64>);

impl Weight {
    pub fn zero(rank: usize) -> Self {
        Weight(vec![0; rank])
    }

    pub fn is_dominant(&self) -> bool {
        self.0.iter().all(|&c| c >= 0)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimpleLieAlgebra {
    series: Series,
    rank: usize,
    cartan: Vec<Vec<i64>>,
    /// `(alpha_i, alpha_i) / 2`, up to a common factor.
    symmetrizer: Vec<Rational>,
    /// Positive roots in simple-root coordinates, sorted by height.
    positive_roots: Vec<Vec<i64>>,
}

fn chain(rank: usize) -> Vec<Vec<i64>> {
    let mut c = vec![vec![0i64; rank]; rank];
    for i in 0..rank {
        c[i][i] = 2;
        if i + 1 < rank {
            c[i][i + 1] = -1;
            c[i + 1][i] = -1;
        }
    }
    c
}

fn cartan_matrix(series: Series, rank: usize) -> Option<Vec<Vec<i64>>> {
    use Series::*;
    let ok = match series {
        A => rank >= 1,
        B | C => rank >= 2,
        D => rank >= 4,
        E => (6..=8).contains(&rank),
        F => rank == 4,
        G => rank == 2,
    };
    if !ok {
        return None;
    }
    let mut c = chain(rank);
    let d = rank;
    match series {
        A => {}
        B => c[d - 1][d - 2] = -2,
        C => c[d - 2][d - 1] = -2,
        D => {
            c[d - 2][d - 1] = 0;
            c[d - 1][d - 2] = 0;
            c[d - 3][d - 1] = -1;
            c[d - 1][d - 3] = -1;
        }
        E => {
            c = vec![vec![0; d]; d];
            let mut edges = vec![(0, 2), (2, 3), (3, 4), (1, 3)];
            for i in 4..d - 1 {
                edges.push((i, i + 1));
            }
            for i in 0..d {
                c[i][i] = 2;
            }
            for (a, b) in edges {
                c[a][b] = -1;
                c[b][a] = -1;
            }
        }
        F => c[2][1] = -2,
        G => c[0][1] = -3,
    }
    Some(c)
}

impl SimpleLieAlgebra {
    pub fn new(series: Series, rank: usize) -> Result<Self, LieError> {
        let cartan = cartan_matrix(series, rank).ok_or(LieError::Unsupported(series, rank))?;
        let symmetrizer = symmetrizer(&cartan);
        let positive_roots = positive_roots(&cartan);
        Ok(SimpleLieAlgebra {
            series,
            rank,
            cartan,
            symmetrizer,
            positive_roots,
        })
    }

    pub fn series(&self) -> Series {
        self.series
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn cartan(&self) -> &[Vec<i64>] {
        &self.cartan
    }

    pub fn positive_roots(&self) -> &[Vec<i64>] {
        &self.positive_roots
    }

    pub fn check_weight(&self, w: &Weight) -> Result<(), LieError> {
        if w.0.len() != self.rank {
            return Err(LieError::RankMismatch {
                rank: self.rank,
                got: w.0.len(),
            });
        }
        if !w.is_dominant() {
            return Err(LieError::NonDominant(w.0.clone()));
        }
        Ok(())
    }

    /// `alpha(h_i)` for `alpha` in simple-root coordinates.
    pub fn root_on_coroot(&self, alpha: &[i64], i: usize) -> i64 {
        alpha
            .iter()
            .zip(&self.cartan[i])
            .map(|(c, a)| c * a)
            .sum()
    }

    /// `(lambda, alpha)` with `lambda` in fundamental-weight coordinates.
    fn pairing(&self, lambda: &[i64], alpha: &[i64]) -> Rational {
        lambda
            .iter()
            .zip(alpha)
            .zip(&self.symmetrizer)
            .map(|((l, c), d)| d * rat_int(l * c))
            .fold(Rational::zero(), |a, b| a + b)
    }

    /// Weyl dimension formula.
    pub fn weyl_dim(&self, lambda: &Weight) -> Result<u64, LieError> {
        self.check_weight(lambda)?;
        let rho = vec![1i64; self.rank];
        let shifted: Vec<i64> = lambda.0.iter().map(|c| c + 1).collect();
        let mut dim = Rational::one();
        for alpha in &self.positive_roots {
            dim *= self.pairing(&shifted, alpha) / self.pairing(&rho, alpha);
        }
        assert!(dim.is_integer(), "Weyl dimension must be integral");
        Ok(num_traits::ToPrimitive::to_u64(&dim.to_integer()).expect("dimension overflow"))
    }
}

fn symmetrizer(cartan: &[Vec<i64>]) -> Vec<Rational> {
    let d = cartan.len();
    let mut sym: Vec<Option<Rational>> = vec![None; d];
    sym[0] = Some(Rational::one());
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        for j in 0..d {
            if i != j && cartan[i][j] != 0 && sym[j].is_none() {
                // d_i a_ij = d_j a_ji
                let di = sym[i].clone().unwrap();
                sym[j] = Some(di * rat_int(cartan[i][j]) / rat_int(cartan[j][i]));
                queue.push_back(j);
            }
        }
    }
    sym.into_iter().map(|s| s.expect("connected Dynkin diagram")).collect()
}

/// Positive roots by root-string closure from the simple roots.
fn positive_roots(cartan: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let d = cartan.len();
    let mut known: BTreeSet<Vec<i64>> = BTreeSet::new();
    let mut layer: Vec<Vec<i64>> = (0..d)
        .map(|i| (0..d).map(|j| i64::from(i == j)).collect())
        .collect();
    let mut all = Vec::new();
    while !layer.is_empty() {
        for r in &layer {
            known.insert(r.clone());
        }
        all.extend(layer.iter().cloned());
        let mut next: BTreeSet<Vec<i64>> = BTreeSet::new();
        for beta in &layer {
            for i in 0..d {
                // p = how far beta - k alpha_i stays a root (or zero at simple)
                let mut p = 0;
                let mut down = beta.clone();
                loop {
                    down[i] -= 1;
                    if known.contains(&down) {
                        p += 1;
                    } else {
                        break;
                    }
                }
                let pair: i64 = (0..d).map(|j| beta[j] * cartan[i][j]).sum();
                let q = p - pair;
                if q > 0 {
                    let mut up = beta.clone();
                    up[i] += 1;
                    next.insert(up);
                }
            }
        }
        layer = next.into_iter().collect();
    }
    all
}

/// Diagram automorphism: a permutation of the Dynkin nodes preserving the
/// Cartan matrix, of minimal order `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagramAut {
    sigma: Vec<usize>,
    k: u32,
}

impl DiagramAut {
    pub fn identity(rank: usize) -> Self {
        DiagramAut {
            sigma: (0..rank).collect(),
            k: 1,
        }
    }

    pub fn new(g: &SimpleLieAlgebra, sigma: Vec<usize>) -> Result<Self, LieError> {
        let d = g.rank();
        let bad = |msg: String| Err(LieError::BadAutomorphism(msg));
        if sigma.len() != d {
            return bad(format!("permutation of length {} for rank {d}", sigma.len()));
        }
        let mut seen = vec![false; d];
        for &s in &sigma {
            if s >= d || seen[s] {
                return bad(format!("{sigma:?} is not a permutation"));
            }
            seen[s] = true;
        }
        for i in 0..d {
            for j in 0..d {
                if g.cartan[sigma[i]][sigma[j]] != g.cartan[i][j] {
                    return bad(format!("{sigma:?} does not preserve the Cartan matrix"));
                }
            }
        }
        let mut k = 1;
        let mut pw = sigma.clone();
        while pw.iter().enumerate().any(|(i, &s)| i != s) {
            pw = pw.iter().map(|&s| sigma[s]).collect();
            k += 1;
        }
        let allowed = match k {
            1 => true,
            2 => matches!(
                (g.series(), d),
                (Series::A, 2..) | (Series::D, _) | (Series::E, 6)
            ),
            3 => g.series() == Series::D && d == 4,
            _ => false,
        };
        if !allowed {
            return bad(format!("order {k} automorphism not supported on {}{d}", g.series()));
        }
        Ok(DiagramAut { sigma, k })
    }

    pub fn order(&self) -> u32 {
        self.k
    }

    pub fn sigma(&self) -> &[usize] {
        &self.sigma
    }

    /// `mu(lambda)`: `mu(lambda)(h_{sigma(i)}) = lambda(h_i)`.
    pub fn apply(&self, lambda: &Weight) -> Weight {
        let mut out = vec![0; lambda.0.len()];
        for (i, &s) in self.sigma.iter().enumerate() {
            out[s] = lambda.0[i];
        }
        Weight(out)
    }

    pub fn fixes(&self, lambda: &Weight) -> bool {
        self.apply(lambda) == *lambda
    }

    /// Orbits of `sigma`, each listed as `j, sigma(j), sigma^2(j), ...`
    /// starting from its smallest node; orbits sorted by that node.
    pub fn orbits(&self) -> Vec<Vec<usize>> {
        let d = self.sigma.len();
        let mut seen = vec![false; d];
        let mut out = Vec::new();
        for j in 0..d {
            if seen[j] {
                continue;
            }
            let mut orbit = vec![j];
            seen[j] = true;
            let mut x = self.sigma[j];
            while x != j {
                seen[x] = true;
                orbit.push(x);
                x = self.sigma[x];
            }
            out.push(orbit);
        }
        out
    }

    /// The fixed basis of the `eps^t` eigenspace of `mu` on the Cartan
    /// subalgebra (`eps = exp(2 pi i / k)`): for every orbit `O` (of full
    /// length `k` when `t != 0`), the vector `sum_u eps^{-t u} h_{sigma^u(j)}`.
    /// Each basis vector is a list of `(node, coefficient)` pairs.
    pub fn eigenbasis(&self, t: u32, field: &Arc<CyclotomicField>) -> Vec<Vec<(usize, CycNum)>> {
        let eps = CycScalar::primitive_root(self.k, field.order())
            .expect("cyclotomic order must be divisible by the automorphism order");
        let t = t % self.k;
        self.orbits()
            .into_iter()
            .filter(|o| t == 0 || o.len() == self.k as usize)
            .map(|o| {
                o.iter()
                    .enumerate()
                    .map(|(u, &node)| (node, eps.pow(-((t as usize * u) as i64)).to_num(field)))
                    .collect()
            })
            .collect()
    }
}

/// Weight values on the fixed eigenbasis of each `h_t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RestrictedWeight {
    /// Values on the basis of `h_0`.
    pub comp0: Vec<Rational>,
    /// `comps[t - 1]` holds the values on the basis of `h_t`, `t = 1..k-1`.
    pub comps: Vec<Vec<CycNum>>,
}

impl RestrictedWeight {
    pub fn higher_vanish(&self) -> bool {
        self.comps.iter().flatten().all(|c| c.is_zero())
    }
}

/// Evaluates a functional given by its values on `h_1..h_d` against the
/// eigenbasis of `h_t`.
pub fn restrict_values(
    mu: &DiagramAut,
    values: &[CycNum],
    t: u32,
    field: &Arc<CyclotomicField>,
) -> Vec<CycNum> {
    mu.eigenbasis(t, field)
        .iter()
        .map(|vec| {
            vec.iter()
                .fold(CycNum::zero(field), |acc, (node, c)| acc.add(&values[*node].mul(c)))
        })
        .collect()
}

pub fn restrict_weight(
    mu: &DiagramAut,
    lambda: &Weight,
    field: &Arc<CyclotomicField>,
) -> RestrictedWeight {
    let values: Vec<CycNum> = lambda
        .0
        .iter()
        .map(|&c| CycNum::from_rational(field, rat_int(c)))
        .collect();
    let comp0 = restrict_values(mu, &values, 0, field)
        .into_iter()
        .map(|c| c.coeffs()[0].clone())
        .collect();
    let comps = (1..mu.order())
        .map(|t| restrict_values(mu, &values, t, field))
        .collect();
    RestrictedWeight { comp0, comps }
}
