//! Random spec generators shared by the integration tests.
#![allow(dead_code)]

use std::io::Write;

use multiloop::liedata::{DiagramAut, Series, SimpleLieAlgebra, Weight};
use multiloop::psi::PsiSpec;
use multiloop::scalar::{rat, rat_int, CycScalar, Rational};
use multiloop::twisted::TwistedSpec;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Writes a line to stderr bypassing the test harness capture, so summary
/// lines appear in the normal `cargo test` output.
pub fn report(line: &str) {
    let _ = writeln!(std::io::stderr(), "{line}");
}

pub fn sc(q: i64, e: i64, l: u32) -> CycScalar {
    CycScalar::new(rat_int(q), e, l).unwrap()
}

pub fn scq(q: Rational, e: i64, l: u32) -> CycScalar {
    CycScalar::new(q, e, l).unwrap()
}

/// Pairwise distinct evaluation scalars: +-1, +-2, +-3, multiples of
/// primitive cube roots and of primitive fourth roots of unity.
pub fn eval_pool() -> Vec<CycScalar> {
    let mut pool = Vec::new();
    for q in [1, -1, 2, -2, 3, -3] {
        pool.push(sc(q, 0, 1));
    }
    for q in [1, -1, 2, -2] {
        for e in [1, 2] {
            pool.push(sc(q, e, 3));
        }
        pool.push(sc(q, 1, 4));
    }
    pool
}

pub fn algebra(series: Series, rank: usize) -> SimpleLieAlgebra {
    SimpleLieAlgebra::new(series, rank).unwrap()
}

pub fn random_weight<R: Rng>(rng: &mut R, rank: usize, max: i64) -> Weight {
    Weight((0..rank).map(|_| rng.gen_range(0..=max)).collect())
}

fn distinct_evals<R: Rng>(rng: &mut R, pool: &[CycScalar], count: usize) -> Vec<CycScalar> {
    pool.choose_multiple(rng, count).cloned().collect()
}

/// Unconstrained spec: `n <= max_n`, `N_i <= max_dim`, weight coordinates
/// `<= max_coord`, distinct parameters per axis drawn from [`eval_pool`].
pub fn random_spec<R: Rng>(
    rng: &mut R,
    g: &SimpleLieAlgebra,
    max_n: usize,
    max_dim: usize,
    max_coord: i64,
) -> PsiSpec {
    let pool = eval_pool();
    let n = rng.gen_range(1..=max_n);
    let dims: Vec<usize> = (0..n).map(|_| rng.gen_range(1..=max_dim)).collect();
    let total: usize = dims.iter().product();
    let weights = (0..total).map(|_| random_weight(rng, g.rank(), max_coord)).collect();
    let evals = dims.iter().map(|&d| distinct_evals(rng, &pool, d)).collect();
    PsiSpec::new(g.clone(), dims, weights, evals, vec![rat_int(0); n]).unwrap()
}

/// A spec in canonical block form together with its construction data.
pub struct Canonical {
    pub spec: PsiSpec,
    /// Per axis: the period `r_i`.
    pub periods: Vec<i64>,
    /// Per axis, per parameter position: `(block, phase)`.
    pub layout: Vec<Vec<(usize, u32)>>,
    /// `p = prod r_i`.
    pub p: u64,
}

fn divisors(n: usize) -> Vec<usize> {
    (1..=n).filter(|d| n % d == 0).collect()
}

/// Distinct nonzero dominant weights.
fn distinct_weights<R: Rng>(rng: &mut R, rank: usize, count: usize, max: i64) -> Vec<Weight> {
    let mut out: Vec<Weight> = Vec::new();
    while out.len() < count {
        let w = random_weight(rng, rank, max);
        if !w.is_zero() && !out.contains(&w) {
            out.push(w);
        }
    }
    out
}

/// Canonical block form: on axis `i`, `a = c_b * eps_i^u` for blocks `b`
/// (distinct positive rational `c_b`) and phases `u in [0, r_i)`, shuffled;
/// the weight at a multi-index depends only on the blocks, with distinct
/// weights for distinct block tuples.
pub fn canonical_spec<R: Rng>(
    rng: &mut R,
    g: &SimpleLieAlgebra,
    max_n: usize,
    max_dim: usize,
    max_coord: i64,
) -> Canonical {
    let cs = [rat(1, 1), rat(2, 1), rat(3, 1), rat(1, 2), rat(3, 2), rat(1, 3)];
    let n = rng.gen_range(1..=max_n);
    let mut dims = Vec::new();
    let mut periods = Vec::new();
    let mut layout = Vec::new();
    let mut evals = Vec::new();
    for _ in 0..n {
        let d = rng.gen_range(1..=max_dim);
        let r = *divisors(d).choose(rng).unwrap();
        let s = d / r;
        let c: Vec<Rational> = cs.choose_multiple(rng, s).cloned().collect();
        let mut slots: Vec<(usize, u32)> = (0..s)
            .flat_map(|b| (0..r as u32).map(move |u| (b, u)))
            .collect();
        slots.shuffle(rng);
        let a = slots
            .iter()
            .map(|&(b, u)| scq(c[b].clone(), u as i64, r as u32))
            .collect();
        dims.push(d);
        periods.push(r as i64);
        layout.push(slots);
        evals.push(a);
    }
    let block_counts: Vec<usize> = dims.iter().zip(&periods).map(|(&d, &r)| d / r as usize).collect();
    let tuples: usize = block_counts.iter().product();
    let lambdas = distinct_weights(rng, g.rank(), tuples, max_coord.max(tuples as i64));
    let total: usize = dims.iter().product();
    let weights = (0..total)
        .map(|mut flat| {
            let mut idx = vec![0; n];
            for i in (0..n).rev() {
                idx[i] = flat % dims[i];
                flat /= dims[i];
            }
            let tuple = (0..n).fold(0, |acc, i| acc * block_counts[i] + layout[i][idx[i]].0);
            lambdas[tuple].clone()
        })
        .collect();
    let spec = PsiSpec::new(g.clone(), dims, weights, evals, vec![rat_int(0); n]).unwrap();
    let p = periods.iter().product::<i64>() as u64;
    Canonical {
        spec,
        periods,
        layout,
        p,
    }
}

pub fn a2_flip() -> (SimpleLieAlgebra, DiagramAut) {
    let g = algebra(Series::A, 2);
    let mu = DiagramAut::new(&g, vec![1, 0]).unwrap();
    (g, mu)
}

pub fn d4_triality() -> (SimpleLieAlgebra, DiagramAut) {
    let g = algebra(Series::D, 4);
    let mu = DiagramAut::new(&g, vec![2, 1, 3, 0]).unwrap();
    (g, mu)
}

/// Random twisted spec: axis-1 parameters have distinct `k`-th powers;
/// with probability `fixed_prob` every weight is `mu`-fixed.
pub fn random_twisted<R: Rng>(
    rng: &mut R,
    g: &SimpleLieAlgebra,
    mu: &DiagramAut,
    max_first: usize,
    max_dim: usize,
    max_coord: i64,
    fixed_prob: f64,
) -> TwistedSpec {
    let pool = eval_pool();
    let k = mu.order() as i64;
    let n = rng.gen_range(1..=2);
    let mut dims = vec![rng.gen_range(1..=max_first)];
    if n == 2 {
        dims.push(rng.gen_range(1..=max_dim));
    }
    let mut first: Vec<CycScalar> = Vec::new();
    let mut shuffled = pool.clone();
    shuffled.shuffle(rng);
    for a in shuffled {
        if first.len() == dims[0] {
            break;
        }
        if first.iter().all(|b| b.pow(k) != a.pow(k)) {
            first.push(a);
        }
    }
    dims[0] = first.len();
    let mut evals = vec![first];
    if n == 2 {
        evals.push(distinct_evals(rng, &pool, dims[1]));
    }
    let fixed = rng.gen_bool(fixed_prob);
    let total: usize = dims.iter().product();
    let weights = (0..total)
        .map(|_| {
            let w = random_weight(rng, g.rank(), max_coord);
            if fixed {
                symmetrize(&w, mu)
            } else {
                w
            }
        })
        .collect();
    let base = PsiSpec::new(g.clone(), dims, weights, evals, vec![rat_int(0); n]).unwrap();
    TwistedSpec::new(base, mu.clone()).unwrap()
}

/// A `mu`-fixed weight: each orbit takes the value of its least node.
pub fn symmetrize(w: &Weight, mu: &DiagramAut) -> Weight {
    let mut out = w.clone();
    for orbit in mu.orbits() {
        let v = w.0[orbit[0]];
        for &j in &orbit {
            out.0[j] = v;
        }
    }
    out
}
