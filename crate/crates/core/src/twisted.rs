//! Twisted classification: a diagram automorphism `mu` of order `k` acts on
//! the first loop variable, and modules are classified through the restriction
//! of the graded functional to the eigenspaces `h_t` of `mu`.

use serde::Deserialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::classify::{axis_candidates, product_indices, rho_difference, weight_classes};
use crate::lattice::twisted_ordering;
use crate::liedata::{restrict_values, restrict_weight, DiagramAut, LieError, Weight};
use crate::psi::{support_from_predicate, support_lattice, PsiError, PsiSpec, PsiSpecJson, SupportLattice};
use crate::scalar::{lcm, CycNum, CycScalar, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TwistedError {
    #[error(transparent)]
    Psi(#[from] PsiError),
    #[error("the k-th powers of the first-axis parameters are not distinct; the module is completely reducible under the restricted action and lies outside the classification path")]
    ImageMismatch,
    #[error("structure violation: {0}")]
    StructureViolation(String),
}

impl From<LieError> for TwistedError {
    fn from(e: LieError) -> Self {
        TwistedError::Psi(PsiError::Lie(e))
    }
}

impl TwistedError {
    pub fn is_structural(&self) -> bool {
        match self {
            TwistedError::Psi(e) => e.is_structural(),
            TwistedError::StructureViolation(_) => true,
            TwistedError::ImageMismatch => false,
        }
    }
}

/// A [`PsiSpec`] with a diagram automorphism acting on loop axis 1. The
/// cyclotomic order of the base spec is divisible by `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwistedSpec {
    base: PsiSpec,
    mu: DiagramAut,
}

#[derive(Deserialize)]
struct AutJson {
    /// 1-based node permutation.
    perm: Vec<usize>,
    order: Option<u32>,
    /// 1-based loop axis the twist acts on (default 1).
    axis: Option<usize>,
}

impl TwistedSpec {
    pub fn new(base: PsiSpec, mu: DiagramAut) -> Result<Self, TwistedError> {
        if mu.sigma().len() != base.algebra().rank() {
            return Err(PsiError::Input("automorphism rank mismatch".into()).into());
        }
        DiagramAut::new(base.algebra(), mu.sigma().to_vec())?;
        let base = base.lifted(mu.order())?;
        Ok(TwistedSpec { base, mu })
    }

    pub fn base(&self) -> &PsiSpec {
        &self.base
    }

    pub fn mu(&self) -> &DiagramAut {
        &self.mu
    }

    pub fn k(&self) -> u32 {
        self.mu.order()
    }

    pub fn from_json(value: &Value) -> Result<Self, TwistedError> {
        let input = |s: String| TwistedError::Psi(PsiError::Input(s));
        let mut obj = value
            .as_object()
            .cloned()
            .ok_or_else(|| input("spec must be a JSON object".into()))?;
        let aut = obj
            .remove("aut")
            .ok_or_else(|| input("missing \"aut\"".into()))?;
        let aut: AutJson = serde_json::from_value(aut).map_err(|e| input(e.to_string()))?;
        let mut raw: PsiSpecJson =
            serde_json::from_value(Value::Object(obj)).map_err(|e| input(e.to_string()))?;
        if let Some(axis) = aut.axis {
            if axis == 0 || axis > raw.n || raw.dims.len() != raw.n || raw.evals.len() != raw.n {
                return Err(input(format!("twist axis {axis} out of range")));
            }
            swap_axes(&mut raw, 0, axis - 1)?;
        }
        let g = crate::liedata::SimpleLieAlgebra::new(raw.algebra.series, raw.algebra.rank)?;
        if aut.perm.iter().any(|&j| j == 0) {
            return Err(input("automorphism permutation is 1-based".into()));
        }
        let mu = DiagramAut::new(&g, aut.perm.iter().map(|j| j - 1).collect())?;
        if let Some(k) = aut.order {
            if k != mu.order() {
                return Err(input(format!(
                    "declared order {k} but the permutation has order {}",
                    mu.order()
                )));
            }
        }
        let base = raw.into_spec_with_order(mu.order())?;
        Ok(TwistedSpec { base, mu })
    }

    pub fn from_json_str(s: &str) -> Result<Self, TwistedError> {
        let v: Value = serde_json::from_str(s)
            .map_err(|e| TwistedError::Psi(PsiError::Input(e.to_string())))?;
        Self::from_json(&v)
    }

    pub fn to_json(&self) -> Value {
        let mut v = self.base.to_json();
        v["aut"] = json!({
            "perm": self.mu.sigma().iter().map(|j| j + 1).collect::<Vec<_>>(),
            "order": self.k(),
        });
        v
    }

    /// `v(m)` restricted to `h_{m_1 mod k}`, in the fixed eigenbasis.
    pub fn restricted_functional(&self, m: &[i64]) -> Vec<CycNum> {
        let t = m[0].rem_euclid(self.k() as i64) as u32;
        restrict_values(&self.mu, &self.base.functional_values(m), t, self.base.field())
    }

    pub fn restricted_nonzero(&self, m: &[i64]) -> bool {
        self.restricted_functional(m).iter().any(|c| !c.is_zero())
    }
}

fn swap_axes(raw: &mut PsiSpecJson, a: usize, b: usize) -> Result<(), TwistedError> {
    if a == b {
        return Ok(());
    }
    raw.dims.swap(a, b);
    raw.evals.swap(a, b);
    if let Some(rho) = raw.rho.as_mut() {
        if rho.len() > a.max(b) {
            rho.swap(a, b);
        }
    }
    for w in &mut raw.weights {
        if w.index.len() > a.max(b) {
            w.index.swap(a, b);
        }
    }
    Ok(())
}

/// True iff the `k`-th powers of the first-axis parameters are distinct.
pub fn image_equality(spec: &TwistedSpec) -> bool {
    let k = spec.k() as i64;
    let powers: Vec<CycScalar> = spec.base.evals()[0].iter().map(|a| a.pow(k)).collect();
    (0..powers.len()).all(|j| (0..j).all(|i| powers[i] != powers[j]))
}

/// `Gamma^mu`: the degrees of the image of the restricted functional, i.e.
/// the group generated by `{m : v(m) restricted to h_{m_1 mod k} != 0}`, in
/// Hermite form with respect to the ordering `(e_2, ..., e_n, e_1)`. The
/// nonzero set itself need not be closed under addition for first-type data
/// (e.g. `1 - 2^{m+1}` vanishes only at `m = -1`); its products still fill
/// the generated group.
pub fn twisted_support(spec: &TwistedSpec) -> Result<SupportLattice, TwistedError> {
    let base = &spec.base;
    if base.is_trivial() {
        return Err(PsiError::TrivialModule.into());
    }
    let mut bounds: Vec<i64> = base.dims().iter().map(|&d| d as i64).collect();
    bounds[0] *= spec.k() as i64;
    let bases: Vec<_> = (0..spec.k())
        .map(|t| spec.mu.eigenbasis(t, base.field()))
        .collect();
    let k = spec.k() as i64;
    let pred = |m: &[i64]| {
        let values = base.functional_values(m);
        let t = m[0].rem_euclid(k) as usize;
        bases[t].iter().any(|vec| {
            !vec.iter()
                .fold(CycNum::zero(base.field()), |acc, (node, c)| acc.add(&values[*node].mul(c)))
                .is_zero()
        })
    };
    let ordering = twisted_ordering(base.n());
    Ok(support_from_predicate(base.n(), &bounds, Some(&ordering), false, pred)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum TwistType {
    First,
    Second,
}

impl TwistType {
    pub fn as_str(self) -> &'static str {
        match self {
            TwistType::First => "first",
            TwistType::Second => "second",
        }
    }
}

/// `Second` iff every table weight is fixed by `mu`.
pub fn classify_type(spec: &TwistedSpec) -> TwistType {
    if spec.base.weights().iter().all(|w| spec.mu.fixes(w)) {
        TwistType::Second
    } else {
        TwistType::First
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwistedDescriptor {
    pub spec: TwistedSpec,
    pub kind: TwistType,
    /// Untwisted support of the base spec.
    pub gamma: SupportLattice,
    /// Twisted support, triangular for the ordering `(e_2, ..., e_n, e_1)`.
    pub gamma_mu: SupportLattice,
    /// Last diagonal entry of `gamma_mu` (the first-axis coordinate).
    pub m_hat: i64,
    /// `[Z^{n-1} : Gamma_{n-1}]`, where `Gamma_{n-1}` is the support of the
    /// untwisted functional on degrees with `m_1 = 0`.
    pub rest_index: u64,
    /// Index of the slice `{m in Gamma^mu : m_1 = 0}` in `Z^{n-1}`, read off
    /// the Hermite form; equals `rest_index` for second-type data.
    pub slice_index: u64,
    /// `p` (first type) or `q` (second type).
    pub exponent: u64,
}

impl TwistedDescriptor {
    pub fn realization_statement(&self) -> String {
        let factors: Vec<String> = weight_classes(self.spec.base.weights())
            .into_iter()
            .filter(|(w, _)| !w.is_zero())
            .map(|(w, _)| format!("V({:?})", w.0))
            .collect();
        format!(
            "irreducible twisted submodule of the evaluation module built from {} with exponent {}",
            factors.join(", "),
            self.exponent
        )
    }

    pub fn to_json(&self) -> Value {
        json!({
            "type": self.kind.as_str(),
            "k": self.spec.k(),
            "gamma": self.gamma,
            "gamma_mu": self.gamma_mu,
            "m_hat": self.m_hat,
            "rest_index": self.rest_index,
            "slice_index": self.slice_index,
            "exponent_name": match self.kind { TwistType::First => "p", TwistType::Second => "q" },
            "exponent": self.exponent,
            "statement": self.realization_statement(),
        })
    }
}

pub fn twisted_classify(spec: &TwistedSpec) -> Result<TwistedDescriptor, TwistedError> {
    if !image_equality(spec) {
        return Err(TwistedError::ImageMismatch);
    }
    let gamma = support_lattice(&spec.base)?;
    let gamma_mu = twisted_support(spec)?;
    if !gamma_mu.lattice.is_sublattice_of(&gamma.lattice) {
        return Err(TwistedError::StructureViolation(
            "twisted support is not contained in the untwisted support".into(),
        ));
    }
    let n = spec.base.n();
    let m_hat = gamma_mu.lattice.diagonal(n - 1);
    let slice_index: u64 = (0..n - 1).map(|i| gamma_mu.lattice.diagonal(i) as u64).product();
    let rest_index = residual_support(&spec.base)?.map_or(1, |g| g.index);
    let kind = classify_type(spec);
    let k = spec.k() as i64;
    let exponent = match kind {
        TwistType::First => {
            if m_hat != 1 {
                return Err(TwistedError::StructureViolation(format!(
                    "first type requires m_hat = 1, found {m_hat}"
                )));
            }
            rest_index
        }
        TwistType::Second => {
            if m_hat % k != 0 {
                return Err(TwistedError::StructureViolation(format!(
                    "second type requires {k} | m_hat, found {m_hat}"
                )));
            }
            rest_index * (m_hat / k) as u64
        }
    };
    Ok(TwistedDescriptor {
        spec: spec.clone(),
        kind,
        gamma,
        gamma_mu,
        m_hat,
        rest_index,
        slice_index,
        exponent,
    })
}

/// Support of the functional on the hyperplane `m_1 = 0`, computed from the
/// spec obtained by summing the weight table over the first axis. `None`
/// when `n = 1`.
pub fn residual_support(spec: &PsiSpec) -> Result<Option<SupportLattice>, PsiError> {
    let n = spec.n();
    if n == 1 {
        return Ok(None);
    }
    let dims = spec.dims()[1..].to_vec();
    let total: usize = dims.iter().product();
    let rank = spec.algebra().rank();
    let mut weights = vec![Weight(vec![0; rank]); total];
    for flat in 0..spec.total() {
        let idx = spec.multi_index(flat);
        let rest = idx[1..]
            .iter()
            .zip(&dims)
            .fold(0, |acc, (&j, &d)| acc * d + j);
        for (c, x) in weights[rest].0.iter_mut().zip(&spec.weights()[flat].0) {
            *c += x;
        }
    }
    // Summing over the first axis may merge equal parameters on other axes;
    // they stay distinct since the other axes are untouched.
    let rest = PsiSpec::new(
        spec.algebra().clone(),
        dims,
        weights,
        spec.evals()[1..].to_vec(),
        spec.rho()[1..].to_vec(),
    )?;
    support_lattice(&rest).map(Some)
}

/// Complete-reducibility test for the restricted action.
pub fn check_complete_reducibility(spec: &TwistedSpec) -> Result<(bool, Option<&'static str>), TwistedError> {
    if image_equality(spec) {
        return Ok((true, Some("image-equality")));
    }
    let gamma = support_lattice(&spec.base)?;
    if gamma.index == 1 {
        Ok((true, Some("full-image")))
    } else {
        Ok((false, None))
    }
}

/// Data of a twisted isomorphism: on axis 1,
/// `b_{1i} = eps_i * s_1 * a_{1 tau_1(i)}` with `eps_i = zeta_k^{eps_exps[i]}`;
/// on other axes `b_{ij} = s_i a_{i tau_i(j)}`; `sigma - rho = shift`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwistedIsoWitness {
    pub taus: Vec<Vec<usize>>,
    pub scalings: Vec<CycScalar>,
    pub eps_exps: Vec<u32>,
    pub shift: Vec<i64>,
}

impl TwistedIsoWitness {
    pub fn to_json(&self) -> Value {
        json!({
            "taus": self.taus.iter()
                .map(|t| t.iter().map(|j| j + 1).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
            "scalings": self.scalings,
            "eps_exponents": self.eps_exps,
            "shift": self.shift,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TwistedIsoResult {
    Witness(TwistedIsoWitness),
    NotSatisfied { criterion: u32, reason: String },
}

impl TwistedIsoResult {
    pub fn witness(&self) -> Option<&TwistedIsoWitness> {
        match self {
            TwistedIsoResult::Witness(w) => Some(w),
            TwistedIsoResult::NotSatisfied { .. } => None,
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            TwistedIsoResult::Witness(w) => json!({"status": "witness", "witness": w.to_json()}),
            TwistedIsoResult::NotSatisfied { criterion, reason } => json!({
                "status": "criteria-not-satisfied",
                "criterion": criterion,
                "reason": reason,
            }),
        }
    }
}

/// Applies a twisted transformation. The weight at index `J` of the result
/// is `mu^{e}(lambda_{tau(J)})` where `zeta_k^e` is the root attached to
/// `J_1`, which realizes `xi^0 = lambda^0`, `xi^t = eps^{-t} lambda^t`.
pub fn transform_twisted(spec: &TwistedSpec, w: &TwistedIsoWitness) -> Result<TwistedSpec, TwistedError> {
    let order = w.scalings.iter().fold(spec.base.order(), |acc, s| lcm(acc, s.order()));
    let base = spec.base.lifted(order)?;
    let zk = CycScalar::primitive_root(spec.k(), order).expect("order divisible by k");
    let mut evals = Vec::with_capacity(base.n());
    for (i, (a, tau)) in base.evals().iter().zip(&w.taus).enumerate() {
        let s = w.scalings[i].lift(order).map_err(PsiError::from)?;
        let axis: Vec<CycScalar> = tau
            .iter()
            .enumerate()
            .map(|(j, &t)| {
                let mut x = s.mul_same(&a[t]);
                if i == 0 {
                    x = x.mul_same(&zk.pow(w.eps_exps[j] as i64));
                }
                x
            })
            .collect();
        evals.push(axis);
    }
    let weights = (0..base.total())
        .map(|flat| {
            let idx0 = base.multi_index(flat);
            let idx: Vec<usize> = idx0.iter().zip(&w.taus).map(|(&j, t)| t[j]).collect();
            let mut wt = base.weight_at(&idx).clone();
            for _ in 0..w.eps_exps[idx0[0]] {
                wt = spec.mu.apply(&wt);
            }
            wt
        })
        .collect();
    let rho = base
        .rho()
        .iter()
        .zip(&w.shift)
        .map(|(r, &m)| r + Rational::from_integer(m.into()))
        .collect();
    let new = PsiSpec::with_order(
        base.algebra().clone(),
        base.dims().to_vec(),
        weights,
        evals,
        rho,
        spec.k(),
    )?;
    TwistedSpec::new(new, spec.mu.clone())
}

fn not_satisfied(criterion: u32, reason: impl Into<String>) -> TwistedIsoResult {
    TwistedIsoResult::NotSatisfied {
        criterion,
        reason: reason.into(),
    }
}

/// Axis-1 candidates `(tau, s, eps_exps)` matching `k`-th powers. The
/// factorization `b = eps * s * a` is only determined up to a common `k`-th
/// root of unity, and the weight clause depends on `eps`, so every rescaling
/// `s = zeta_k^c b_1 / a_{j0}` is tried.
fn first_axis_candidates(
    a: &[CycScalar],
    b: &[CycScalar],
    k: u32,
    zk: &CycScalar,
) -> Vec<(Vec<usize>, CycScalar, Vec<u32>)> {
    let mut out = Vec::new();
    for j0 in 0..a.len() {
        for c in 0..k {
            let s = b[0].div(&a[j0]).expect("common order").mul_same(&zk.pow(c as i64));
            let mut tau = Vec::with_capacity(b.len());
            let mut exps = Vec::with_capacity(b.len());
            for bi in b {
                let target = bi.pow(k as i64);
                let Some(t) = a
                    .iter()
                    .position(|aj| s.mul_same(aj).pow(k as i64) == target)
                else {
                    break;
                };
                let ratio = bi.div(&s.mul_same(&a[t])).expect("common order");
                debug_assert!(ratio.root_of_unity_order_divides(k));
                let Some(e) = (0..k).find(|&e| zk.pow(e as i64) == ratio) else {
                    break;
                };
                tau.push(t);
                exps.push(e);
            }
            let mut sorted = tau.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if tau.len() == b.len() && sorted.len() == b.len() {
                out.push((tau, s, exps));
            }
        }
    }
    out
}

/// Decides the twisted isomorphism criteria, returning the first witness.
pub fn decide_twisted_iso(
    d1: &TwistedDescriptor,
    d2: &TwistedDescriptor,
) -> Result<TwistedIsoResult, TwistedError> {
    let (t1, t2) = (&d1.spec, &d2.spec);
    if t1.base.algebra() != t2.base.algebra() || t1.mu != t2.mu {
        return Ok(not_satisfied(0, "different algebra or automorphism"));
    }
    if t1.base.dims() != t2.base.dims() {
        return Ok(not_satisfied(0, "dims differ"));
    }
    if d1.kind != d2.kind {
        return Ok(not_satisfied(1, "type mismatch"));
    }
    let k = t1.k();
    let order = lcm(t1.base.order(), t2.base.order());
    let s1 = t1.base.lifted(order)?;
    let s2 = t2.base.lifted(order)?;
    let field = s1.field().clone();
    let zk = CycScalar::primitive_root(k, order).expect("order divisible by k");

    let first = first_axis_candidates(&s1.evals()[0], &s2.evals()[0], k, &zk);
    if first.is_empty() {
        return Ok(not_satisfied(
            2,
            "axis 1: parameters are not a rescaled permutation up to k-th roots of unity",
        ));
    }
    let mut rest = Vec::new();
    for i in 1..s1.n() {
        let c = axis_candidates(&s1.evals()[i], &s2.evals()[i]);
        if c.is_empty() {
            return Ok(not_satisfied(
                2,
                format!("axis {}: parameters are not a rescaled permutation", i + 1),
            ));
        }
        rest.push(c);
    }

    let restricted1: Vec<_> = s1.weights().iter().map(|w| restrict_weight(&t1.mu, w, &field)).collect();
    let restricted2: Vec<_> = s2.weights().iter().map(|w| restrict_weight(&t1.mu, w, &field)).collect();

    let mut sizes = vec![first.len()];
    sizes.extend(rest.iter().map(Vec::len));
    let mut found = None;
    for choice in product_indices(&sizes) {
        let (tau1, _, exps) = &first[choice[0]];
        let taus: Vec<&Vec<usize>> = std::iter::once(tau1)
            .chain(choice[1..].iter().enumerate().map(|(i, &c)| &rest[i][c].0))
            .collect();
        let ok = (0..s2.total()).all(|flat| {
            let idx0 = s2.multi_index(flat);
            let idx: Vec<usize> = idx0.iter().zip(&taus).map(|(&j, t)| t[j]).collect();
            let lam_flat = s1.flat_index(&idx);
            match d1.kind {
                TwistType::Second => s2.weights()[flat] == s1.weights()[lam_flat],
                TwistType::First => {
                    let (xi, lam) = (&restricted2[flat], &restricted1[lam_flat]);
                    if xi.comp0 != lam.comp0 {
                        return false;
                    }
                    let e = exps[idx0[0]] as i64;
                    (1..k as usize).all(|t| {
                        let factor = zk.pow(-e * t as i64).to_num(&field);
                        xi.comps[t - 1]
                            .iter()
                            .zip(&lam.comps[t - 1])
                            .all(|(x, l)| *x == l.mul(&factor))
                    })
                }
            }
        });
        if ok {
            found = Some(choice);
            break;
        }
    }
    let Some(choice) = found else {
        return Ok(not_satisfied(3, "no admissible matching satisfies the weight conditions"));
    };
    let Some(shift) = rho_difference(s1.rho(), s2.rho()) else {
        return Ok(not_satisfied(4, "rho difference is not an integer vector"));
    };
    if !d1.gamma_mu.contains(&shift) {
        return Ok(not_satisfied(
            4,
            format!("rho difference {shift:?} is not in the twisted support lattice"),
        ));
    }
    let (tau1, s, exps) = first[choice[0]].clone();
    let mut taus = vec![tau1];
    let mut scalings = vec![s];
    for (i, &c) in choice[1..].iter().enumerate() {
        taus.push(rest[i][c].0.clone());
        scalings.push(rest[i][c].1.clone());
    }
    Ok(TwistedIsoResult::Witness(TwistedIsoWitness {
        taus,
        scalings,
        eps_exps: exps,
        shift,
    }))
}
