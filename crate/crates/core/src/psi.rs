//! The graded functional `v(m) = sum_I a_I^m lambda_I` and its support
//! lattice.
//!
//! A [`PsiSpec`] holds a table of dominant weights `lambda_I` indexed by
//! `I in prod [1..N_i]` together with per-axis evaluation parameters
//! `a_i = (a_{i1}, ..., a_{iN_i})`. The degree-`m` functional on the Cartan
//! subalgebra is `v(m) = sum_I a_{1 i_1}^{m_1} ... a_{n i_n}^{m_n} lambda_I`,
//! and the support `{m : v(m) != 0}` is a full-rank subgroup of `Z^n`.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::{box_points, cube_points, Lattice, LatticeError};
use crate::liedata::{LieError, Series, SimpleLieAlgebra, Weight};
use crate::scalar::{lcm, rational_json, CycNum, CycScalar, CycVector, CyclotomicField, Rational, ScalarError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PsiError {
    #[error("malformed input: {0}")]
    Input(String),
    #[error(transparent)]
    Lie(#[from] LieError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error("all weights vanish: the module is trivial")]
    TrivialModule,
    #[error("no period for axis {axis} within bound {bound}")]
    NoPeriodWithinBound { axis: usize, bound: i64 },
    #[error("support is not a subgroup: membership differs from the generated lattice at {m:?}")]
    SupportNotSubgroup { m: Vec<i64> },
}

impl From<LatticeError> for PsiError {
    fn from(e: LatticeError) -> Self {
        match e {
            LatticeError::NoPeriodWithinBound { axis, bound } => {
                PsiError::NoPeriodWithinBound { axis, bound }
            }
            other => PsiError::Input(other.to_string()),
        }
    }
}

impl PsiError {
    /// True for errors signalling that the input lies outside the hypotheses
    /// of the structure theory (as opposed to malformed input).
    pub fn is_structural(&self) -> bool {
        matches!(
            self,
            PsiError::TrivialModule
                | PsiError::NoPeriodWithinBound { .. }
                | PsiError::SupportNotSubgroup { .. }
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PsiSpec {
    g: SimpleLieAlgebra,
    dims: Vec<usize>,
    /// Row-major over `prod [0, N_i)` (last axis fastest).
    weights: Vec<Weight>,
    evals: Vec<Vec<CycScalar>>,
    rho: Vec<Rational>,
    field: Arc<CyclotomicField>,
}

impl PsiSpec {
    /// Validates and normalizes the data; all evaluation parameters are
    /// lifted to a common cyclotomic order (a multiple of `min_order`).
    pub fn new(
        g: SimpleLieAlgebra,
        dims: Vec<usize>,
        weights: Vec<Weight>,
        evals: Vec<Vec<CycScalar>>,
        rho: Vec<Rational>,
    ) -> Result<Self, PsiError> {
        Self::with_order(g, dims, weights, evals, rho, 1)
    }

    pub fn with_order(
        g: SimpleLieAlgebra,
        dims: Vec<usize>,
        weights: Vec<Weight>,
        evals: Vec<Vec<CycScalar>>,
        rho: Vec<Rational>,
        min_order: u32,
    ) -> Result<Self, PsiError> {
        let n = dims.len();
        let input = |s: String| Err(PsiError::Input(s));
        if n == 0 {
            return input("at least one loop variable is required".into());
        }
        if dims.iter().any(|&d| d == 0) {
            return input(format!("dims must be positive, got {dims:?}"));
        }
        if evals.len() != n {
            return input(format!("{} evaluation tuples for n = {n}", evals.len()));
        }
        for (i, (a, &d)) in evals.iter().zip(&dims).enumerate() {
            if a.len() != d {
                return input(format!("axis {}: {} parameters, expected {d}", i + 1, a.len()));
            }
        }
        if rho.len() != n {
            return input(format!("rho has {} entries, expected {n}", rho.len()));
        }
        let total: usize = dims.iter().product();
        if weights.len() != total {
            return input(format!("{} weights, expected {total}", weights.len()));
        }
        for w in &weights {
            g.check_weight(w)?;
        }
        let order = evals
            .iter()
            .flatten()
            .fold(min_order.max(1), |acc, s| lcm(acc, s.order()));
        let evals: Vec<Vec<CycScalar>> = evals
            .iter()
            .map(|a| a.iter().map(|s| s.lift(order)).collect::<Result<_, _>>())
            .collect::<Result<_, _>>()?;
        for (i, a) in evals.iter().enumerate() {
            for j in 0..a.len() {
                for k in 0..j {
                    if a[j] == a[k] {
                        return input(format!(
                            "axis {}: parameters {} and {} coincide",
                            i + 1,
                            k + 1,
                            j + 1
                        ));
                    }
                }
            }
        }
        Ok(PsiSpec {
            g,
            dims,
            weights,
            evals,
            rho,
            field: CyclotomicField::new(order),
        })
    }

    /// Re-lifts the parameters so the cyclotomic order is divisible by `k`.
    pub fn lifted(&self, k: u32) -> Result<Self, PsiError> {
        Self::with_order(
            self.g.clone(),
            self.dims.clone(),
            self.weights.clone(),
            self.evals.clone(),
            self.rho.clone(),
            lcm(self.order(), k),
        )
    }

    pub fn algebra(&self) -> &SimpleLieAlgebra {
        &self.g
    }

    pub fn n(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// `N = prod N_i`.
    pub fn total(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[Weight] {
        &self.weights
    }

    pub fn evals(&self) -> &[Vec<CycScalar>] {
        &self.evals
    }

    pub fn rho(&self) -> &[Rational] {
        &self.rho
    }

    pub fn order(&self) -> u32 {
        self.field.order()
    }

    pub fn field(&self) -> &Arc<CyclotomicField> {
        &self.field
    }

    /// Multi-index (0-based) of a flat table position.
    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut out = vec![0; self.n()];
        for i in (0..self.n()).rev() {
            out[i] = flat % self.dims[i];
            flat /= self.dims[i];
        }
        out
    }

    /// Flat table position of a 0-based multi-index.
    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter()
            .zip(&self.dims)
            .fold(0, |acc, (&j, &d)| acc * d + j)
    }

    pub fn weight_at(&self, idx: &[usize]) -> &Weight {
        &self.weights[self.flat_index(idx)]
    }

    pub fn is_trivial(&self) -> bool {
        self.weights.iter().all(Weight::is_zero)
    }

    /// `a_I^m` for every table position.
    pub fn monomials(&self, m: &[i64]) -> Vec<CycScalar> {
        let powers: Vec<Vec<CycScalar>> = self
            .evals
            .iter()
            .zip(m)
            .map(|(a, &mi)| a.iter().map(|s| s.pow(mi)).collect())
            .collect();
        (0..self.total())
            .map(|flat| {
                let idx = self.multi_index(flat);
                idx.iter()
                    .enumerate()
                    .fold(CycScalar::one(self.order()), |acc, (i, &j)| {
                        acc.mul_same(&powers[i][j])
                    })
            })
            .collect()
    }

    /// `v(m)` in fundamental-weight coordinates, unreduced.
    pub fn eval_functional(&self, m: &[i64]) -> Vec<CycVector> {
        assert_eq!(m.len(), self.n(), "degree has wrong length");
        let mut out = vec![CycVector::new(self.order()); self.g.rank()];
        for (w, mono) in self.weights.iter().zip(self.monomials(m)) {
            for (c, &x) in out.iter_mut().zip(&w.0) {
                if x != 0 {
                    c.add_scalar(&mono, &Rational::from_integer(x.into()));
                }
            }
        }
        out
    }

    /// `v(m)(h_j)` as field elements.
    pub fn functional_values(&self, m: &[i64]) -> Vec<CycNum> {
        self.eval_functional(m)
            .iter()
            .map(|c| c.reduce(&self.field))
            .collect()
    }

    pub fn functional_nonzero(&self, m: &[i64]) -> bool {
        self.eval_functional(m)
            .iter()
            .any(|c| !c.is_zero(&self.field))
    }

    // JSON -----------------------------------------------------------------

    pub fn from_json(value: &serde_json::Value) -> Result<Self, PsiError> {
        let raw: PsiSpecJson = serde_json::from_value(value.clone())
            .map_err(|e| PsiError::Input(e.to_string()))?;
        raw.into_spec()
    }

    pub fn from_json_str(s: &str) -> Result<Self, PsiError> {
        let v: serde_json::Value =
            serde_json::from_str(s).map_err(|e| PsiError::Input(e.to_string()))?;
        Self::from_json(&v)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let weights = (0..self.total())
            .map(|flat| WeightEntry {
                index: self.multi_index(flat).iter().map(|j| j + 1).collect(),
                coords: self.weights[flat].0.clone(),
            })
            .collect();
        let raw = PsiSpecJson {
            algebra: AlgebraJson {
                series: self.g.series(),
                rank: self.g.rank(),
            },
            n: self.n(),
            dims: self.dims.clone(),
            weights,
            evals: self.evals.clone(),
            rho: Some(self.rho.clone()),
        };
        serde_json::to_value(raw).expect("serializable")
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub(crate) struct AlgebraJson {
    pub series: Series,
    pub rank: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub(crate) struct WeightEntry {
    /// 1-based multi-index.
    pub index: Vec<usize>,
    pub coords: Vec<i64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub(crate) struct PsiSpecJson {
    pub algebra: AlgebraJson,
    pub n: usize,
    pub dims: Vec<usize>,
    pub weights: Vec<WeightEntry>,
    pub evals: Vec<Vec<CycScalar>>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "opt_rationals")]
    pub rho: Option<Vec<Rational>>,
}

mod opt_rationals {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<Vec<Rational>>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(v) => rational_json::vec::serialize(v, s),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Vec<Rational>>, D::Error> {
        rational_json::vec::deserialize(d).map(Some)
    }
}

impl PsiSpecJson {
    pub fn into_spec(self) -> Result<PsiSpec, PsiError> {
        self.into_spec_with_order(1)
    }

    pub fn into_spec_with_order(self, min_order: u32) -> Result<PsiSpec, PsiError> {
        let g = SimpleLieAlgebra::new(self.algebra.series, self.algebra.rank)?;
        let n = self.n;
        if self.dims.len() != n {
            return Err(PsiError::Input(format!("dims has {} entries, n = {n}", self.dims.len())));
        }
        let mut table: BTreeMap<Vec<usize>, Vec<i64>> = BTreeMap::new();
        for w in self.weights {
            if w.index.len() != n
                || w.index.iter().zip(&self.dims).any(|(&j, &d)| j == 0 || j > d)
            {
                return Err(PsiError::Input(format!("weight index {:?} out of range", w.index)));
            }
            let key: Vec<usize> = w.index.iter().map(|j| j - 1).collect();
            if table.insert(key, w.coords).is_some() {
                return Err(PsiError::Input(format!("duplicate weight index {:?}", w.index)));
            }
        }
        let total: usize = self.dims.iter().product();
        if table.len() != total {
            return Err(PsiError::Input(format!(
                "weight table has {} of {total} entries",
                table.len()
            )));
        }
        // BTreeMap order on 0-based multi-indices is row-major order.
        let weights = table.into_values().map(Weight).collect();
        let rho = self
            .rho
            .unwrap_or_else(|| vec![Rational::zero(); n]);
        PsiSpec::with_order(g, self.dims, weights, self.evals, rho, min_order)
    }
}

/// The support of `v` with its axis periods `r_i` and index `p`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupportLattice {
    pub lattice: Lattice,
    pub periods: Vec<i64>,
    pub index: u64,
}

impl SupportLattice {
    pub fn contains(&self, m: &[i64]) -> bool {
        self.lattice.contains(m)
    }
}

/// Shared box algorithm. `pred` is the membership test of the nonzero set
/// `S`; `r_i` is the least `t <= bounds[i]` with `t e_i in S`.
///
/// With `strict`, `S` is required to be a subgroup: the lattice generated by
/// the members of the period box and the `r_i e_i` is audited against `pred`
/// on `prod [-bounds_i, bounds_i]`. Without it, the result is the group
/// generated by all members of that box together with the `r_i e_i`.
/// Minimal per-axis radius of the box on which the support is audited.
pub const AUDIT_RADIUS: i64 = 4;

pub(crate) fn support_from_predicate(
    n: usize,
    bounds: &[i64],
    ordering: Option<&[usize]>,
    strict: bool,
    pred: impl Fn(&[i64]) -> bool,
) -> Result<SupportLattice, PsiError> {
    let mut periods = Vec::with_capacity(n);
    for (axis, &bound) in bounds.iter().enumerate() {
        let mut found = None;
        for t in 1..=bound {
            let mut m = vec![0; n];
            m[axis] = t;
            if pred(&m) {
                found = Some(t);
                break;
            }
        }
        periods.push(found.ok_or(PsiError::NoPeriodWithinBound { axis, bound })?);
    }
    let mut gens: Vec<Vec<i64>> = Vec::new();
    for (axis, &r) in periods.iter().enumerate() {
        let mut g = vec![0; n];
        g[axis] = r;
        gens.push(g);
    }
    // Isolated zeros of the functional can sit outside prod [-N_i, N_i]
    // (e.g. at m = (-4, -4) for N = (1, 3)), so the audit box has radius at
    // least AUDIT_RADIUS on every axis.
    let audit: Vec<i64> = bounds.iter().map(|&b| b.max(AUDIT_RADIUS)).collect();
    let sides: Vec<i64> = audit.iter().map(|b| 2 * b + 1).collect();
    let audit_box = || {
        box_points(&sides)
            .into_iter()
            .map(|m| m.iter().zip(&audit).map(|(x, b)| x - b).collect::<Vec<i64>>())
    };
    let lattice = if strict {
        gens.extend(box_points(&periods).into_iter().filter(|m| pred(m)));
        let lattice = Lattice::from_generators(n, &gens, ordering)?;
        for m in audit_box() {
            if lattice.contains(&m) != pred(&m) {
                return Err(PsiError::SupportNotSubgroup { m });
            }
        }
        lattice
    } else {
        let mut lattice = Lattice::from_generators(n, &gens, ordering)?;
        for m in audit_box() {
            if !lattice.contains(&m) && pred(&m) {
                gens.push(m);
                lattice = Lattice::from_generators(n, &gens, ordering)?;
            }
        }
        lattice
    };
    let index = lattice.index().expect("contains r_i e_i, so full rank");
    Ok(SupportLattice {
        lattice,
        periods,
        index,
    })
}

/// Computes `Gamma = {m : v(m) != 0}`.
pub fn support_lattice(spec: &PsiSpec) -> Result<SupportLattice, PsiError> {
    if spec.is_trivial() {
        return Err(PsiError::TrivialModule);
    }
    let bounds: Vec<i64> = spec.dims().iter().map(|&d| d as i64).collect();
    support_from_predicate(spec.n(), &bounds, None, true, |m| spec.functional_nonzero(m))
}

/// A degree where lattice membership and functional support disagree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportMismatch {
    pub m: Vec<i64>,
    pub in_lattice: bool,
    pub functional_nonzero: bool,
}

/// Checks `m in Gamma <=> v(m) != 0` for every `|m_i| <= radius`.
pub fn verify_support(
    spec: &PsiSpec,
    gamma: &SupportLattice,
    radius: i64,
) -> Result<(), SupportMismatch> {
    for m in cube_points(spec.n(), radius) {
        let in_lattice = gamma.contains(&m);
        let functional_nonzero = spec.functional_nonzero(&m);
        if in_lattice != functional_nonzero {
            return Err(SupportMismatch {
                m,
                in_lattice,
                functional_nonzero,
            });
        }
    }
    Ok(())
}
