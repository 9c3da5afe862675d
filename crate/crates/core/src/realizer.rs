//! Brute-force realization of graded evaluation modules.
//!
//! The finite-dimensional module `V = V(lambda_1) (x) ... (x) V(lambda_N)` is
//! built explicitly, `X (x) t^s` acts on `V (x) t^m` by
//! `sum_I a_I^s X^{(I)}` (the action on tensor slot `I`), and submodules
//! generated by vectors `w (x) t^m` are computed by closure on a truncated
//! degree box, with exact row reduction over `Q(zeta_L)`.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::sync::Arc;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::lattice::box_points;
use crate::liedata::{LieError, SimpleLieAlgebra, Weight};
use crate::psi::PsiSpec;
use crate::scalar::{rat_int, CycNum, CycScalar, CyclotomicField, Rational};
use crate::twisted::TwistedSpec;

pub const DEFAULT_CAP: usize = 64;
pub const DEFAULT_RADIUS: i64 = 3;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RealizerError {
    #[error("module dimension {dim} exceeds the cap {cap}")]
    CapExceeded { dim: u64, cap: usize },
    #[error(transparent)]
    Lie(#[from] LieError),
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

/// Closure parameters. Closures run on the box of radius
/// `radius + margin`; only degrees within `radius` are reported.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RealizerOptions {
    pub cap: usize,
    pub margin: i64,
}

impl Default for RealizerOptions {
    fn default() -> Self {
        RealizerOptions {
            cap: DEFAULT_CAP,
            margin: 2,
        }
    }
}

// ---------------------------------------------------------------------------
// Linear algebra

/// Minimal field interface used by the row reduction.
pub trait FieldElem: Clone {
    fn is_zero(&self) -> bool;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn inv(&self) -> Self;
}

impl FieldElem for Rational {
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn inv(&self) -> Self {
        self.recip()
    }
}

impl FieldElem for CycNum {
    fn is_zero(&self) -> bool {
        CycNum::is_zero(self)
    }
    fn sub(&self, other: &Self) -> Self {
        CycNum::sub(self, other)
    }
    fn mul(&self, other: &Self) -> Self {
        CycNum::mul(self, other)
    }
    fn inv(&self) -> Self {
        CycNum::inv(self).expect("pivot is nonzero")
    }
}

/// Semi-echelon basis: every row has a unit pivot that is zero in all rows
/// inserted after it.
#[derive(Debug, Clone)]
pub struct Echelon<T> {
    rows: Vec<(usize, Vec<T>)>,
}

impl<T: FieldElem> Default for Echelon<T> {
    fn default() -> Self {
        Echelon { rows: Vec::new() }
    }
}

impl<T: FieldElem> Echelon<T> {
    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> impl Iterator<Item = &Vec<T>> {
        self.rows.iter().map(|(_, r)| r)
    }

    /// Reduces `v` in place; returns the coefficients used per row.
    fn reduce(&self, v: &mut [T]) -> Vec<Option<T>> {
        self.rows
            .iter()
            .map(|(p, row)| {
                if v[*p].is_zero() {
                    return None;
                }
                let c = v[*p].clone();
                for (x, r) in v.iter_mut().zip(row) {
                    if !r.is_zero() {
                        *x = x.sub(&c.mul(r));
                    }
                }
                Some(c)
            })
            .collect()
    }

    pub fn contains(&self, v: &[T]) -> bool {
        let mut w = v.to_vec();
        self.reduce(&mut w);
        w.iter().all(FieldElem::is_zero)
    }

    /// Inserts `v`; returns the new normalized row if `v` was independent.
    pub fn insert(&mut self, mut v: Vec<T>) -> Option<&Vec<T>> {
        self.reduce(&mut v);
        let p = v.iter().position(|x| !x.is_zero())?;
        let inv = v[p].inv();
        for x in v.iter_mut() {
            if !x.is_zero() {
                *x = x.mul(&inv);
            }
        }
        self.rows.push((p, v));
        self.rows.last().map(|(_, r)| r)
    }
}

// ---------------------------------------------------------------------------
// Irreducible modules

/// Sparse matrix by columns: `cols[j]` lists `(row, value)` of the image of
/// basis vector `j`.
pub type SparseMat = Vec<Vec<(usize, Rational)>>;

/// An irreducible highest-weight module with a weight basis; basis vector 0
/// is the highest-weight vector.
#[derive(Debug, Clone)]
pub struct Irrep {
    pub weights: Vec<Vec<i64>>,
    pub e: Vec<SparseMat>,
    pub f: Vec<SparseMat>,
}

impl Irrep {
    pub fn dim(&self) -> usize {
        self.weights.len()
    }
}

/// Tracks, for a row built from basis signatures, its expression in those
/// signatures.
struct TrackedRow {
    pivot: usize,
    sig: Vec<Rational>,
    combo: Vec<Rational>,
}

/// Builds `V(lambda)` by descending from the highest-weight vector: each
/// candidate `f_j b` is represented by its images under all `e_i`, which
/// determine it uniquely below the top (a vector killed by every `e_i` is
/// a highest-weight vector). Independent candidates become basis vectors;
/// dependent ones give the matrix entries of `f_j`.
pub fn build_irrep(g: &SimpleLieAlgebra, lambda: &Weight) -> Result<Irrep, RealizerError> {
    g.check_weight(lambda)?;
    let r = g.rank();
    let alpha: Vec<Vec<i64>> = (0..r)
        .map(|j| (0..r).map(|i| g.cartan()[i][j]).collect())
        .collect();
    let mut weights = vec![lambda.0.clone()];
    // e_img[b][i]: e_i applied to basis b; f_img[b][j] likewise.
    let mut e_img: Vec<Vec<Vec<(usize, Rational)>>> = vec![vec![Vec::new(); r]];
    let mut f_img: Vec<Vec<Vec<(usize, Rational)>>> = vec![Vec::new()];
    let mut level: Vec<usize> = vec![0];
    while !level.is_empty() {
        let pos: HashMap<usize, usize> = level.iter().enumerate().map(|(k, &b)| (b, k)).collect();
        let width = level.len();
        let mut groups: BTreeMap<Vec<i64>, (Vec<TrackedRow>, Vec<usize>)> = BTreeMap::new();
        let mut next = Vec::new();
        for &b in &level {
            let mut images = Vec::with_capacity(r);
            for j in 0..r {
                let mut sig = vec![Rational::zero(); r * width];
                for i in 0..r {
                    for (x, c) in &e_img[b][i] {
                        for (y, c2) in &f_img[*x][j] {
                            sig[i * width + pos[y]] += c * c2;
                        }
                    }
                    if i == j && weights[b][i] != 0 {
                        sig[i * width + pos[&b]] += rat_int(weights[b][i]);
                    }
                }
                if sig.iter().all(Zero::is_zero) {
                    images.push(Vec::new());
                    continue;
                }
                let w: Vec<i64> = weights[b].iter().zip(&alpha[j]).map(|(x, a)| x - a).collect();
                let (rows, members) = groups.entry(w.clone()).or_default();
                let mut rem = sig.clone();
                let mut combo = vec![Rational::zero(); members.len() + 1];
                for row in rows.iter() {
                    let c = rem[row.pivot].clone();
                    if Zero::is_zero(&c) {
                        continue;
                    }
                    for (x, y) in rem.iter_mut().zip(&row.sig) {
                        *x -= &c * y;
                    }
                    for (x, y) in combo.iter_mut().zip(&row.combo) {
                        *x += &c * y;
                    }
                }
                match rem.iter().position(|x| !Zero::is_zero(x)) {
                    None => {
                        // f_j b = sum combo[k] * members[k]
                        let img = combo
                            .iter()
                            .enumerate()
                            .filter(|(_, c)| !Zero::is_zero(*c))
                            .map(|(k, c)| (members[k], c.clone()))
                            .collect();
                        images.push(img);
                    }
                    Some(p) => {
                        let id = weights.len();
                        weights.push(w);
                        let e_new = (0..r)
                            .map(|i| {
                                (0..width)
                                    .filter(|&k| !Zero::is_zero(&sig[i * width + k]))
                                    .map(|k| (level[k], sig[i * width + k].clone()))
                                    .collect()
                            })
                            .collect();
                        e_img.push(e_new);
                        f_img.push(Vec::new());
                        let k = members.len();
                        members.push(id);
                        // rem = sig_k - sum c_r sig_r  =>  combo_new = e_k - combo
                        let pv = rem[p].recip();
                        let mut new_combo: Vec<Rational> = combo.iter().map(|c| -c * &pv).collect();
                        new_combo[k] = pv.clone();
                        let sig_row = rem.iter().map(|x| x * &pv).collect();
                        for row in rows.iter_mut() {
                            row.combo.push(Rational::zero());
                        }
                        rows.push(TrackedRow {
                            pivot: p,
                            sig: sig_row,
                            combo: new_combo,
                        });
                        images.push(vec![(id, Rational::one())]);
                        next.push(id);
                    }
                }
            }
            f_img[b] = images;
        }
        level = next;
    }
    for img in f_img.iter_mut() {
        if img.is_empty() {
            *img = vec![Vec::new(); r];
        }
    }
    let dim = weights.len();
    let expected = g.weyl_dim(lambda)?;
    if dim as u64 != expected {
        return Err(RealizerError::Internal(format!(
            "built dimension {dim} for {:?}, Weyl dimension {expected}",
            lambda.0
        )));
    }
    let e = (0..r)
        .map(|i| (0..dim).map(|b| e_img[b][i].clone()).collect())
        .collect();
    let f = (0..r)
        .map(|j| (0..dim).map(|b| f_img[b][j].clone()).collect())
        .collect();
    Ok(Irrep { weights, e, f })
}

// ---------------------------------------------------------------------------
// Tensor products and the loop action

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GenKind {
    E,
    F,
    H,
}

/// Chevalley generator `e_i`, `f_i` or `h_i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Gen {
    pub kind: GenKind,
    pub node: usize,
}

/// `V(lambda_1) (x) ... (x) V(lambda_N)` in the product weight basis (first
/// slot most significant). Basis vector 0 is the highest-weight vector.
#[derive(Debug, Clone)]
pub struct FinModule {
    rank: usize,
    factors: Vec<Arc<Irrep>>,
    dims: Vec<usize>,
    dim: usize,
    weights: Vec<Vec<i64>>,
}

impl FinModule {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn factor_dims(&self) -> &[usize] {
        &self.dims
    }

    /// Weight (fundamental coordinates) of each basis vector.
    pub fn weights(&self) -> &[Vec<i64>] {
        &self.weights
    }

    fn digits(&self, mut x: usize) -> Vec<usize> {
        let mut d = vec![0; self.dims.len()];
        for i in (0..self.dims.len()).rev() {
            d[i] = x % self.dims[i];
            x /= self.dims[i];
        }
        d
    }

    fn index(&self, digits: &[usize]) -> usize {
        digits.iter().zip(&self.dims).fold(0, |acc, (&d, &n)| acc * n + d)
    }

    /// `X^{(slot)}` applied to basis vector `x`.
    pub fn slot_action(&self, gen: Gen, slot: usize, x: usize) -> Vec<(usize, Rational)> {
        let digits = self.digits(x);
        let irrep = &self.factors[slot];
        let d = digits[slot];
        match gen.kind {
            GenKind::H => {
                let c = irrep.weights[d][gen.node];
                if c == 0 {
                    vec![]
                } else {
                    vec![(x, rat_int(c))]
                }
            }
            GenKind::E | GenKind::F => {
                let mat = if gen.kind == GenKind::E {
                    &irrep.e[gen.node]
                } else {
                    &irrep.f[gen.node]
                };
                mat[d]
                    .iter()
                    .map(|(row, c)| {
                        let mut nd = digits.clone();
                        nd[slot] = *row;
                        (self.index(&nd), c.clone())
                    })
                    .collect()
            }
        }
    }
}

/// Builds the tensor product; the irreducible factors are cached per weight.
pub fn build_tensor(
    g: &SimpleLieAlgebra,
    lambdas: &[Weight],
    cap: usize,
) -> Result<FinModule, RealizerError> {
    let mut dim: u64 = 1;
    for l in lambdas {
        dim = dim.saturating_mul(g.weyl_dim(l)?);
        if dim > cap as u64 {
            return Err(RealizerError::CapExceeded { dim, cap });
        }
    }
    let mut cache: BTreeMap<Weight, Arc<Irrep>> = BTreeMap::new();
    let mut factors = Vec::with_capacity(lambdas.len());
    for l in lambdas {
        if !cache.contains_key(l) {
            cache.insert(l.clone(), Arc::new(build_irrep(g, l)?));
        }
        factors.push(cache[l].clone());
    }
    let dims: Vec<usize> = factors.iter().map(|f| f.dim()).collect();
    let dim = dims.iter().product();
    let mut module = FinModule {
        rank: g.rank(),
        factors,
        dims,
        dim,
        weights: Vec::new(),
    };
    module.weights = (0..dim)
        .map(|x| {
            let digits = module.digits(x);
            let mut w = vec![0i64; module.rank];
            for (slot, &d) in digits.iter().enumerate() {
                for (a, b) in w.iter_mut().zip(&module.factors[slot].weights[d]) {
                    *a += b;
                }
            }
            w
        })
        .collect();
    Ok(module)
}

/// A linear combination of Chevalley generators with field coefficients.
pub type GenCombo = Vec<(Gen, CycNum)>;

/// The matrix of `X (x) t^s` on `V`, by columns.
#[derive(Debug, Clone)]
pub struct LoopOp {
    pub step: Vec<i64>,
    cols: Vec<Vec<(usize, CycNum)>>,
}

impl LoopOp {
    pub fn new(module: &FinModule, spec: &PsiSpec, combo: &GenCombo, step: Vec<i64>) -> Self {
        let field = spec.field();
        let monos: Vec<CycNum> = spec.monomials(&step).iter().map(|m| m.to_num(field)).collect();
        let cols = (0..module.dim)
            .map(|x| {
                let mut acc: BTreeMap<usize, CycNum> = BTreeMap::new();
                for (gen, coef) in combo {
                    for (slot, mono) in monos.iter().enumerate() {
                        let k = coef.mul(mono);
                        for (row, q) in module.slot_action(*gen, slot, x) {
                            let term = k.scale(&q);
                            acc.entry(row)
                                .and_modify(|v| *v = v.add(&term))
                                .or_insert(term);
                        }
                    }
                }
                acc.into_iter().filter(|(_, v)| !v.is_zero()).collect()
            })
            .collect();
        LoopOp { step, cols }
    }

    pub fn apply(&self, v: &[CycNum], field: &Arc<CyclotomicField>) -> Vec<CycNum> {
        let mut out = vec![CycNum::zero(field); v.len()];
        for (x, vx) in v.iter().enumerate() {
            if vx.is_zero() {
                continue;
            }
            for (row, c) in &self.cols[x] {
                out[*row] = out[*row].add(&c.mul(vx));
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(Vec::is_empty)
    }
}

/// Fiber bases of a graded subspace of `V (x) A` on `|m_i| <= radius`.
#[derive(Debug, Clone)]
pub struct GradedBox {
    pub radius: i64,
    pub fibers: BTreeMap<Vec<i64>, Echelon<CycNum>>,
}

impl GradedBox {
    pub fn fiber_dim(&self, m: &[i64]) -> usize {
        self.fibers.get(m).map_or(0, Echelon::dim)
    }

    pub fn contains(&self, m: &[i64], v: &[CycNum]) -> bool {
        match self.fibers.get(m) {
            Some(e) => e.contains(v),
            None => v.iter().all(CycNum::is_zero),
        }
    }

    /// Degrees (within the box) whose fiber contains the highest-weight line.
    pub fn highest_weight_support(&self, dim: usize, field: &Arc<CyclotomicField>) -> Vec<Vec<i64>> {
        let hw = unit(0, dim, field);
        self.fibers
            .iter()
            .filter(|(_, e)| e.contains(&hw))
            .map(|(m, _)| m.clone())
            .collect()
    }

    pub fn dims_table(&self) -> BTreeMap<Vec<i64>, usize> {
        self.fibers.iter().map(|(m, e)| (m.clone(), e.dim())).collect()
    }
}

fn unit(i: usize, dim: usize, field: &Arc<CyclotomicField>) -> Vec<CycNum> {
    let mut v = vec![CycNum::zero(field); dim];
    v[i] = CycNum::one(field);
    v
}

fn in_box(m: &[i64], radius: i64) -> bool {
    m.iter().all(|x| x.abs() <= radius)
}

/// All points with `|m_i| <= radius`, lexicographic.
pub fn degree_box(n: usize, radius: i64) -> Vec<Vec<i64>> {
    box_points(&vec![2 * radius + 1; n])
        .into_iter()
        .map(|m| m.into_iter().map(|x| x - radius).collect())
        .collect()
}

/// Closure of the start vectors under the operators, on the box of radius
/// `work_radius`, truncated to `radius` afterwards.
fn closure(
    field: &Arc<CyclotomicField>,
    ops: &[LoopOp],
    starts: Vec<(Vec<i64>, Vec<CycNum>)>,
    radius: i64,
    work_radius: i64,
) -> GradedBox {
    let mut fibers: BTreeMap<Vec<i64>, Echelon<CycNum>> = BTreeMap::new();
    let mut queue = VecDeque::new();
    for (m, v) in starts {
        if let Some(row) = fibers.entry(m.clone()).or_default().insert(v) {
            queue.push_back((m, row.clone()));
        }
    }
    while let Some((m, v)) = queue.pop_front() {
        for op in ops {
            let target: Vec<i64> = m.iter().zip(&op.step).map(|(a, b)| a + b).collect();
            if !in_box(&target, work_radius) {
                continue;
            }
            let w = op.apply(&v, field);
            if w.iter().all(CycNum::is_zero) {
                continue;
            }
            if let Some(row) = fibers.entry(target.clone()).or_default().insert(w) {
                queue.push_back((target, row.clone()));
            }
        }
    }
    fibers.retain(|m, e| in_box(m, radius) && e.dim() > 0);
    GradedBox { radius, fibers }
}

fn chevalley_gens(rank: usize, field: &Arc<CyclotomicField>) -> Vec<GenCombo> {
    let mut out = Vec::new();
    for kind in [GenKind::E, GenKind::F, GenKind::H] {
        for node in 0..rank {
            out.push(vec![(Gen { kind, node }, CycNum::one(field))]);
        }
    }
    out
}

fn unit_steps(n: usize) -> Vec<Vec<i64>> {
    let mut steps = vec![vec![0; n]];
    for j in 0..n {
        for s in [1, -1] {
            let mut v = vec![0; n];
            v[j] = s;
            steps.push(v);
        }
    }
    steps
}

/// The evaluation module of a spec together with its loop operators.
pub struct Realization {
    pub spec: PsiSpec,
    pub module: FinModule,
    pub ops: Vec<LoopOp>,
    pub options: RealizerOptions,
}

impl Realization {
    /// Untwisted realization: generators `e_i, f_i, h_i` at steps
    /// `0, +-e_j`.
    pub fn new(spec: &PsiSpec, options: RealizerOptions) -> Result<Self, RealizerError> {
        let module = build_tensor(spec.algebra(), spec.weights(), options.cap)?;
        let mut ops = Vec::new();
        for combo in chevalley_gens(spec.algebra().rank(), spec.field()) {
            for step in unit_steps(spec.n()) {
                let op = LoopOp::new(&module, spec, &combo, step);
                if !op.is_zero() {
                    ops.push(op);
                }
            }
        }
        Ok(Realization {
            spec: spec.clone(),
            module,
            ops,
            options,
        })
    }

    /// Twisted realization: eigen-combinations of the Chevalley generators
    /// in `g_t`, paired with first-axis degrees congruent to `t` mod `k`.
    pub fn twisted(spec: &TwistedSpec, options: RealizerOptions) -> Result<Self, RealizerError> {
        let base = spec.base();
        let field = base.field();
        let module = build_tensor(base.algebra(), base.weights(), options.cap)?;
        let k = spec.k() as i64;
        let n = base.n();
        let eps = CycScalar::primitive_root(spec.k(), field.order()).expect("k divides L");
        let mut ops = Vec::new();
        for t in 0..k {
            let mut steps: Vec<Vec<i64>> = Vec::new();
            if t == 0 {
                steps.push(vec![0; n]);
                for s in [k, -k] {
                    let mut v = vec![0; n];
                    v[0] = s;
                    steps.push(v);
                }
                steps.extend(unit_steps(n).into_iter().skip(3));
            } else {
                for s in [t, t - k] {
                    let mut v = vec![0; n];
                    v[0] = s;
                    steps.push(v);
                }
            }
            for kind in [GenKind::E, GenKind::F, GenKind::H] {
                for orbit in spec.mu().orbits() {
                    if t != 0 && orbit.len() != k as usize {
                        continue;
                    }
                    let combo: GenCombo = orbit
                        .iter()
                        .enumerate()
                        .map(|(u, &node)| {
                            (Gen { kind, node }, eps.pow(-(t * u as i64)).to_num(field))
                        })
                        .collect();
                    for step in &steps {
                        let op = LoopOp::new(&module, base, &combo, step.clone());
                        if !op.is_zero() {
                            ops.push(op);
                        }
                    }
                }
            }
        }
        Ok(Realization {
            spec: base.clone(),
            module,
            ops,
            options,
        })
    }

    pub fn field(&self) -> &Arc<CyclotomicField> {
        self.spec.field()
    }

    pub fn dim(&self) -> usize {
        self.module.dim()
    }

    /// The submodule generated by `v (x) t^start` (`v` the highest-weight
    /// vector), on the box of the given radius.
    pub fn component(&self, start: &[i64], radius: i64) -> GradedBox {
        let v = unit(0, self.dim(), self.field());
        closure(
            self.field(),
            &self.ops,
            vec![(start.to_vec(), v)],
            radius,
            radius + self.options.margin,
        )
    }

    /// Distinct components generated from the highest-weight lines at the
    /// degrees in `starts`, skipping lines already inside an earlier one.
    pub fn components(&self, starts: &[Vec<i64>], radius: i64) -> Vec<(Vec<i64>, GradedBox)> {
        let hw = unit(0, self.dim(), self.field());
        let mut out: Vec<(Vec<i64>, GradedBox)> = Vec::new();
        for m in starts {
            if out.iter().any(|(_, c)| c.contains(m, &hw)) {
                continue;
            }
            out.push((m.clone(), self.component(m, radius)));
        }
        out
    }

    /// Weight multiset of a fiber: the multiplicity of weight `w` is the rank
    /// of the projection onto the basis vectors of weight `key(w)`.
    pub fn fiber_character(
        &self,
        fiber: &Echelon<CycNum>,
        key: &dyn Fn(&[i64]) -> Vec<i64>,
    ) -> BTreeMap<Vec<i64>, usize> {
        let mut groups: BTreeMap<Vec<i64>, Vec<usize>> = BTreeMap::new();
        for (x, w) in self.module.weights().iter().enumerate() {
            groups.entry(key(w)).or_default().push(x);
        }
        let mut out = BTreeMap::new();
        for (w, coords) in groups {
            let mut e: Echelon<CycNum> = Echelon::default();
            for row in fiber.rows() {
                e.insert(coords.iter().map(|&x| row[x].clone()).collect());
            }
            if e.dim() > 0 {
                out.insert(w, e.dim());
            }
        }
        out
    }
}

/// Per-degree weight multisets.
pub type GradedCharacter = BTreeMap<Vec<i64>, BTreeMap<Vec<i64>, usize>>;

/// Closure of `v (x) t^0` under the untwisted generators.
pub fn generate_component(
    spec: &PsiSpec,
    radius: i64,
    options: RealizerOptions,
) -> Result<GradedBox, RealizerError> {
    let r = Realization::new(spec, options)?;
    Ok(r.component(&vec![0; spec.n()], radius))
}

/// Result of decomposing `V (x) A` on a degree box.
#[derive(Debug, Clone)]
pub struct ComponentReport {
    pub dim: usize,
    pub radius: i64,
    /// Start degrees of the distinct components found.
    pub starts: Vec<Vec<i64>>,
    pub components: Vec<GradedBox>,
    /// Component fibers are independent at every degree.
    pub disjoint: bool,
    /// Component fiber dimensions sum to `dim` at every degree.
    pub exhaustive: bool,
}

impl ComponentReport {
    pub fn count(&self) -> usize {
        self.components.len()
    }
}

fn decompose(r: &Realization, starts: &[Vec<i64>], radius: i64) -> ComponentReport {
    let comps = r.components(starts, radius);
    let n = r.spec.n();
    let mut disjoint = true;
    let mut exhaustive = true;
    for m in degree_box(n, radius) {
        let mut joint: Echelon<CycNum> = Echelon::default();
        let mut total = 0;
        for (_, c) in &comps {
            if let Some(f) = c.fibers.get(&m) {
                total += f.dim();
                for row in f.rows() {
                    joint.insert(row.clone());
                }
            }
        }
        disjoint &= joint.dim() == total;
        exhaustive &= total == r.dim();
    }
    let (starts, components) = comps.into_iter().unzip();
    ComponentReport {
        dim: r.dim(),
        radius,
        starts,
        components,
        disjoint,
        exhaustive,
    }
}

/// Decomposes `V (x) A` into the submodules generated by highest-weight
/// lines, starting from every degree in `prod [0, N_i)` (clipped to the box).
pub fn count_components(
    spec: &PsiSpec,
    radius: i64,
    options: RealizerOptions,
) -> Result<ComponentReport, RealizerError> {
    let r = Realization::new(spec, options)?;
    let sides: Vec<i64> = spec.dims().iter().map(|&d| (d as i64).min(radius + 1)).collect();
    Ok(decompose(&r, &box_points(&sides), radius))
}

/// Weight multisets of the `v (x) t^0` component per degree.
pub fn graded_character(
    spec: &PsiSpec,
    radius: i64,
    options: RealizerOptions,
) -> Result<GradedCharacter, RealizerError> {
    let r = Realization::new(spec, options)?;
    let comp = r.component(&vec![0; spec.n()], radius);
    Ok(comp
        .fibers
        .iter()
        .map(|(m, f)| (m.clone(), r.fiber_character(f, &|w: &[i64]| w.to_vec())))
        .collect())
}

/// Closure of `v (x) t^0` under the twisted generators.
pub fn twisted_generate_component(
    spec: &TwistedSpec,
    radius: i64,
    options: RealizerOptions,
) -> Result<GradedBox, RealizerError> {
    let r = Realization::twisted(spec, options)?;
    Ok(r.component(&vec![0; spec.base().n()], radius))
}

/// Decomposition of `V (x) A` under the twisted algebra, starting from every
/// degree in `prod [0, b_i)` with `b_1 = k N_1`, `b_i = N_i` (clipped).
pub fn twisted_count_components(
    spec: &TwistedSpec,
    radius: i64,
    options: RealizerOptions,
) -> Result<ComponentReport, RealizerError> {
    let r = Realization::twisted(spec, options)?;
    let mut sides: Vec<i64> = spec.base().dims().iter().map(|&d| d as i64).collect();
    sides[0] *= spec.k() as i64;
    let sides: Vec<i64> = sides.into_iter().map(|s| s.min(radius + 1)).collect();
    Ok(decompose(&r, &box_points(&sides), radius))
}

/// Twisted character: weights restricted to `h_0` (orbit sums).
pub fn twisted_graded_character(
    spec: &TwistedSpec,
    radius: i64,
    options: RealizerOptions,
) -> Result<GradedCharacter, RealizerError> {
    let r = Realization::twisted(spec, options)?;
    let comp = r.component(&vec![0; spec.base().n()], radius);
    let orbits = spec.mu().orbits();
    let key = move |w: &[i64]| -> Vec<i64> {
        orbits.iter().map(|o| o.iter().map(|&j| w[j]).sum()).collect()
    };
    Ok(comp
        .fibers
        .iter()
        .map(|(m, f)| (m.clone(), r.fiber_character(f, &key)))
        .collect())
}
