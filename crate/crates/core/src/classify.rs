//! Untwisted classification: block structure of the evaluation parameters,
//! replication of the weight table, and the isomorphism criteria.

use std::collections::BTreeMap;

use serde_json::{json, Value};
use thiserror::Error;

use crate::liedata::Weight;
use crate::psi::{support_lattice, PsiError, PsiSpec, SupportLattice};
use crate::scalar::{lcm, CycScalar, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassifyError {
    #[error(transparent)]
    Psi(#[from] PsiError),
    #[error("structure violation: {0}")]
    StructureViolation(String),
}

impl ClassifyError {
    pub fn is_structural(&self) -> bool {
        match self {
            ClassifyError::Psi(e) => e.is_structural(),
            ClassifyError::StructureViolation(_) => true,
        }
    }
}

/// Block decomposition of one axis: `a_j = eps^{phase_j} * c_{block_j}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxisBlocks {
    pub r: i64,
    /// Primitive `r`-th root of unity `exp(2 pi i / r)`.
    pub eps: CycScalar,
    /// One base point per block (lexicographically minimal member).
    pub bases: Vec<CycScalar>,
    /// `(block, phase)` for every parameter, `phase in [0, r)`.
    pub assignment: Vec<(usize, u32)>,
}

impl AxisBlocks {
    pub fn block_count(&self) -> usize {
        self.bases.len()
    }

    fn to_json(&self) -> Value {
        json!({
            "r": self.r,
            "blocks": self.bases.len(),
            "eps": self.eps,
            "bases": self.bases,
            "assignment": self.assignment.iter()
                .map(|&(b, p)| json!({"block": b + 1, "phase": p}))
                .collect::<Vec<_>>(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockStructure {
    pub axes: Vec<AxisBlocks>,
}

impl BlockStructure {
    pub fn to_json(&self) -> Value {
        Value::Array(self.axes.iter().map(AxisBlocks::to_json).collect())
    }
}

/// Groups each axis's parameters by their `r_i`-th powers and checks every
/// group is a complete orbit under multiplication by `eps_i`.
pub fn detect_blocks(spec: &PsiSpec, gamma: &SupportLattice) -> Result<BlockStructure, ClassifyError> {
    let violation = |s: String| Err(ClassifyError::StructureViolation(s));
    let mut axes = Vec::with_capacity(spec.n());
    for (i, a) in spec.evals().iter().enumerate() {
        let r = gamma.periods[i];
        if spec.dims()[i] as i64 % r != 0 {
            return violation(format!(
                "axis {}: period {r} does not divide N = {}",
                i + 1,
                spec.dims()[i]
            ));
        }
        let Some(eps) = CycScalar::primitive_root(r as u32, spec.order()) else {
            return violation(format!(
                "axis {}: no primitive {r}-th root of unity at cyclotomic order {}",
                i + 1,
                spec.order()
            ));
        };
        // Groups in order of first appearance.
        let mut groups: Vec<(CycScalar, Vec<usize>)> = Vec::new();
        for (j, s) in a.iter().enumerate() {
            let pw = s.pow(r);
            match groups.iter_mut().find(|(p, _)| *p == pw) {
                Some((_, members)) => members.push(j),
                None => groups.push((pw, vec![j])),
            }
        }
        let mut bases = Vec::with_capacity(groups.len());
        let mut assignment = vec![(0usize, 0u32); a.len()];
        for (b, (_, members)) in groups.iter().enumerate() {
            if members.len() as i64 != r {
                return violation(format!(
                    "axis {}: parameters {:?} share an {r}-th power but form a group of size {} != {r}",
                    i + 1,
                    members.iter().map(|j| j + 1).collect::<Vec<_>>(),
                    members.len()
                ));
            }
            let base = members
                .iter()
                .map(|&j| &a[j])
                .min_by(|x, y| x.lex_cmp(y))
                .unwrap()
                .clone();
            let mut seen = vec![false; r as usize];
            for &j in members {
                let ratio = a[j].div(&base).expect("same order");
                let phase = (0..r as u32).find(|&p| eps.pow(p as i64) == ratio);
                match phase {
                    Some(p) if !seen[p as usize] => {
                        seen[p as usize] = true;
                        assignment[j] = (b, p);
                    }
                    _ => {
                        return violation(format!(
                            "axis {}: parameter {} is not an eps-multiple of its block base",
                            i + 1,
                            j + 1
                        ))
                    }
                }
            }
            bases.push(base);
        }
        axes.push(AxisBlocks {
            r,
            eps,
            bases,
            assignment,
        });
    }
    Ok(BlockStructure { axes })
}

/// A classified irreducible module.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModuleDescriptor {
    pub spec: PsiSpec,
    pub gamma: SupportLattice,
    pub blocks: BlockStructure,
    /// `p = [Z^n : Gamma]`.
    pub p: u64,
    /// Equality classes of the weight table with their sizes.
    pub classes: Vec<(Weight, usize)>,
    /// Tensor factors `(lambda, multiplicity)` with `sum multiplicity = N/p`;
    /// the module is a component of `(tensor_lambda V(lambda)^{mult})^{p} (x) A`.
    pub realization: Vec<(Weight, usize)>,
}

impl ModuleDescriptor {
    pub fn realization_statement(&self) -> String {
        let factors: Vec<String> = self
            .realization
            .iter()
            .map(|(w, k)| {
                if *k == 1 {
                    format!("V({:?})", w.0)
                } else {
                    format!("V({:?})^{k}", w.0)
                }
            })
            .collect();
        format!(
            "irreducible component of ({})^{{(x){}}} (x) A",
            factors.join(" (x) "),
            self.p
        )
    }

    pub fn to_json(&self) -> Value {
        json!({
            "n": self.spec.n(),
            "dims": self.spec.dims(),
            "gamma": self.gamma,
            "periods": self.gamma.periods,
            "p": self.p,
            "blocks": self.blocks.to_json(),
            "classes": self.classes.iter()
                .map(|(w, k)| json!({"weight": w, "size": k}))
                .collect::<Vec<_>>(),
            "realization": {
                "factors": self.realization.iter()
                    .map(|(w, k)| json!({"weight": w, "multiplicity": k}))
                    .collect::<Vec<_>>(),
                "power": self.p,
                "statement": self.realization_statement(),
            },
        })
    }
}

pub(crate) fn weight_classes(weights: &[Weight]) -> Vec<(Weight, usize)> {
    let mut counts: BTreeMap<Weight, usize> = BTreeMap::new();
    for w in weights {
        *counts.entry(w.clone()).or_default() += 1;
    }
    counts.into_iter().collect()
}

pub fn classify(spec: &PsiSpec) -> Result<ModuleDescriptor, ClassifyError> {
    let gamma = support_lattice(spec)?;
    let blocks = detect_blocks(spec, &gamma)?;
    let p = gamma.index;
    let classes = weight_classes(spec.weights());
    let mut realization = Vec::new();
    for (w, size) in &classes {
        if *size as u64 % p != 0 {
            return Err(ClassifyError::StructureViolation(format!(
                "weight {:?} occurs {size} times, not a multiple of p = {p}",
                w.0
            )));
        }
        if !w.is_zero() {
            realization.push((w.clone(), *size / p as usize));
        }
    }
    Ok(ModuleDescriptor {
        spec: spec.clone(),
        gamma,
        blocks,
        p,
        classes,
        realization,
    })
}

/// Data of an isomorphism `V(lambda, a, rho) -> V(xi, b, sigma)`:
/// `b_{ij} = s_i a_{i tau_i(j)}`, `xi_J = lambda_{tau(J)}`, `sigma - rho = shift`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IsoWitness {
    /// 0-based permutations, one per axis.
    pub taus: Vec<Vec<usize>>,
    pub scalings: Vec<CycScalar>,
    pub shift: Vec<i64>,
}

impl IsoWitness {
    pub fn identity(spec: &PsiSpec) -> Self {
        IsoWitness {
            taus: spec.dims().iter().map(|&d| (0..d).collect()).collect(),
            scalings: vec![CycScalar::one(spec.order()); spec.n()],
            shift: vec![0; spec.n()],
        }
    }

    pub fn inverse(&self) -> Self {
        let taus = self
            .taus
            .iter()
            .map(|t| {
                let mut inv = vec![0; t.len()];
                for (j, &k) in t.iter().enumerate() {
                    inv[k] = j;
                }
                inv
            })
            .collect();
        IsoWitness {
            taus,
            scalings: self.scalings.iter().map(CycScalar::inv).collect(),
            shift: self.shift.iter().map(|m| -m).collect(),
        }
    }

    /// Witness for the composite `V1 -> V2 -> V3` where `self: V1 -> V2`.
    pub fn then(&self, next: &IsoWitness) -> Result<Self, ClassifyError> {
        let taus = self
            .taus
            .iter()
            .zip(&next.taus)
            .map(|(t, t2)| t2.iter().map(|&j| t[j]).collect())
            .collect();
        let scalings = self
            .scalings
            .iter()
            .zip(&next.scalings)
            .map(|(s, s2)| {
                let l = lcm(s.order(), s2.order());
                Ok(s.lift(l)?.mul(&s2.lift(l)?)?)
            })
            .collect::<Result<_, PsiError>>()?;
        let shift = self.shift.iter().zip(&next.shift).map(|(a, b)| a + b).collect();
        Ok(IsoWitness {
            taus,
            scalings,
            shift,
        })
    }

    pub fn to_json(&self) -> Value {
        json!({
            "taus": self.taus.iter()
                .map(|t| t.iter().map(|j| j + 1).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
            "scalings": self.scalings,
            "shift": self.shift,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IsoResult {
    Witness(IsoWitness),
    NotSatisfied { criterion: u32, reason: String },
}

impl IsoResult {
    pub fn witness(&self) -> Option<&IsoWitness> {
        match self {
            IsoResult::Witness(w) => Some(w),
            IsoResult::NotSatisfied { .. } => None,
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            IsoResult::Witness(w) => json!({"status": "witness", "witness": w.to_json()}),
            IsoResult::NotSatisfied { criterion, reason } => json!({
                "status": "criteria-not-satisfied",
                "criterion": criterion,
                "reason": reason,
            }),
        }
    }
}

/// Applies a transformation: `b_{ij} = s_i a_{i tau_i(j)}`,
/// `xi_J = lambda_{tau(J)}`, `sigma = rho + shift`.
pub fn transform_spec(spec: &PsiSpec, w: &IsoWitness) -> Result<PsiSpec, PsiError> {
    let order = w.scalings.iter().fold(spec.order(), |acc, s| lcm(acc, s.order()));
    let spec = spec.lifted(order)?;
    let evals = spec
        .evals()
        .iter()
        .zip(&w.taus)
        .zip(&w.scalings)
        .map(|((a, tau), s)| {
            let s = s.lift(order)?;
            tau.iter().map(|&k| s.mul(&a[k])).collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    let weights = (0..spec.total())
        .map(|flat| {
            let idx: Vec<usize> = spec
                .multi_index(flat)
                .iter()
                .zip(&w.taus)
                .map(|(&j, t)| t[j])
                .collect();
            spec.weight_at(&idx).clone()
        })
        .collect();
    let rho = spec
        .rho()
        .iter()
        .zip(&w.shift)
        .map(|(r, &m)| r + Rational::from_integer(m.into()))
        .collect();
    PsiSpec::new(spec.algebra().clone(), spec.dims().to_vec(), weights, evals, rho)
}

/// Per-axis candidates `(tau, s)` with `b_j = s * a_{tau(j)}` for all `j`.
pub(crate) fn axis_candidates(a: &[CycScalar], b: &[CycScalar]) -> Vec<(Vec<usize>, CycScalar)> {
    let mut out = Vec::new();
    for j0 in 0..a.len() {
        let s = b[0].div(&a[j0]).expect("common order");
        let tau: Option<Vec<usize>> = b
            .iter()
            .map(|bj| a.iter().position(|ak| s.mul_same(ak) == *bj))
            .collect();
        if let Some(tau) = tau {
            out.push((tau, s));
        }
    }
    out
}

/// Iterates the cartesian product of per-axis choices in lexicographic order.
pub(crate) fn product_indices(sizes: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for &s in sizes {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..s).map(move |k| {
                    let mut p = prefix.clone();
                    p.push(k);
                    p
                })
            })
            .collect();
    }
    out
}

/// Integer vector `sigma - rho`, if integral.
pub(crate) fn rho_difference(rho: &[Rational], sigma: &[Rational]) -> Option<Vec<i64>> {
    rho.iter()
        .zip(sigma)
        .map(|(r, s)| {
            let d = s - r;
            if d.is_integer() {
                num_traits::ToPrimitive::to_i64(&d.to_integer())
            } else {
                None
            }
        })
        .collect()
}

fn not_satisfied(criterion: u32, reason: impl Into<String>) -> IsoResult {
    IsoResult::NotSatisfied {
        criterion,
        reason: reason.into(),
    }
}

/// Decides whether the isomorphism criteria hold between two classified
/// modules, returning the lexicographically first witness.
pub fn decide_iso(d1: &ModuleDescriptor, d2: &ModuleDescriptor) -> Result<IsoResult, ClassifyError> {
    if d1.spec.algebra() != d2.spec.algebra() {
        return Ok(not_satisfied(0, "different simple Lie algebras"));
    }
    if d1.spec.dims() != d2.spec.dims() {
        return Ok(not_satisfied(
            1,
            format!("dims differ: {:?} vs {:?}", d1.spec.dims(), d2.spec.dims()),
        ));
    }
    let order = lcm(d1.spec.order(), d2.spec.order());
    let s1 = d1.spec.lifted(order)?;
    let s2 = d2.spec.lifted(order)?;
    let candidates: Vec<Vec<(Vec<usize>, CycScalar)>> = s1
        .evals()
        .iter()
        .zip(s2.evals())
        .map(|(a, b)| axis_candidates(a, b))
        .collect();
    if let Some(i) = candidates.iter().position(Vec::is_empty) {
        return Ok(not_satisfied(
            2,
            format!("axis {}: parameters are not a rescaled permutation", i + 1),
        ));
    }
    let sizes: Vec<usize> = candidates.iter().map(Vec::len).collect();
    let mut found = None;
    for choice in product_indices(&sizes) {
        let taus: Vec<&Vec<usize>> = choice
            .iter()
            .enumerate()
            .map(|(i, &c)| &candidates[i][c].0)
            .collect();
        let ok = (0..s2.total()).all(|flat| {
            let idx: Vec<usize> = s2
                .multi_index(flat)
                .iter()
                .zip(&taus)
                .map(|(&j, t)| t[j])
                .collect();
            s2.weights()[flat] == *s1.weight_at(&idx)
        });
        if ok {
            found = Some(choice);
            break;
        }
    }
    let Some(choice) = found else {
        return Ok(not_satisfied(
            2,
            "no admissible permutation matches the weight tables",
        ));
    };
    if !d1.gamma.lattice.same_group(&d2.gamma.lattice) {
        return Ok(not_satisfied(2, "support lattices differ"));
    }
    let Some(shift) = rho_difference(s1.rho(), s2.rho()) else {
        return Ok(not_satisfied(3, "rho difference is not an integer vector"));
    };
    if !d1.gamma.contains(&shift) {
        return Ok(not_satisfied(
            3,
            format!("rho difference {shift:?} is not in the support lattice"),
        ));
    }
    let (taus, scalings) = choice
        .iter()
        .enumerate()
        .map(|(i, &c)| candidates[i][c].clone())
        .unzip();
    Ok(IsoResult::Witness(IsoWitness {
        taus,
        scalings,
        shift,
    }))
}

/// Checks a witness directly against the two descriptors.
pub fn verify_witness(d1: &ModuleDescriptor, d2: &ModuleDescriptor, w: &IsoWitness) -> bool {
    let Ok(expected) = transform_spec(&d1.spec, w) else {
        return false;
    };
    let order = lcm(expected.order(), d2.spec.order());
    match (expected.lifted(order), d2.spec.lifted(order)) {
        (Ok(e), Ok(s2)) => e == s2 && d1.gamma.contains(&w.shift),
        _ => false,
    }
}
