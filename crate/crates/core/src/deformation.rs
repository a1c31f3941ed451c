//! Truncated equivariant formal deformations `μ_t = μ_0 + μ_1 t + ... + μ_n t^n`.
//!
//! A deformation of order `n` is read modulo `t^{n+1}`: the order-`r`
//! equations
//!
//! ```text
//! Σ_{i+j=r} μ_i(a, b, μ_j(c, d, e))
//!     = Σ_{i+j=r} μ_i(μ_j(a, b, c), d, e) + μ_i(c, μ_j(a, b, d), e) + μ_i(c, d, μ_j(a, b, e))
//! ```
//!
//! are required for `r ≤ n` only. Reports also evaluate `r ≤ 2n`, which
//! detects deformations that hold exactly as polynomials in `t`.
//!
//! The residual of the order-1 equation is `−δ³μ_1`, and the order-`(n+1)`
//! equation reads `δ³μ_{n+1} = F_{n+1}` where `F_{n+1}` collects the terms
//! with `i, j > 0`. Gauge transformations `Ψ_t = Id + ψ_1 t + ...` act by
//! `μ̃_t = Ψ_t ∘ μ_t ∘ (Ψ_t^{-1})^{⊗3}`.

use std::fmt;

use thiserror::Error;

use crate::cohomology::{Caps, Cochain, CochainViolation, CohomologyError, YamagutiComplex};
use crate::group::{act_on_sparse, GroupAction, ModuleAction};
use crate::kernel::Matrix;
use crate::lts::{LieTripleSystem, StructureTensor};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DeformationError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("the order-0 term must be the bracket of the system")]
    BaseMismatch,
    #[error("term {order} is not equivariant under {element}: witness triple {triple:?}")]
    NotEquivariant {
        order: usize,
        element: String,
        triple: [usize; 3],
    },
    #[error("term {order} is not a 3-cochain: {} condition fails at {:?}, output {}", .violation.condition, .violation.args, .violation.output)]
    NotCochain { order: usize, violation: CochainViolation },
    #[error("isomorphism term {order} is not equivariant")]
    IsomorphismNotEquivariant { order: usize },
    #[error("isomorphism must start with the identity")]
    IsomorphismNotUnipotent,
    #[error("order cap {cap} is below the deformation order {order}")]
    OrderCap { cap: usize, order: usize },
    #[error("internal inconsistency: {0}")]
    Internal(String),
    #[error(transparent)]
    Cohomology(#[from] CohomologyError),
}

impl DeformationError {
    pub fn is_cap(&self) -> bool {
        matches!(self, DeformationError::Cohomology(e) if e.is_cap())
    }
}

/// A validated truncated deformation: every term `μ_r`, `r ≥ 1`, is an
/// equivariant 3-cochain. The deformation equations are checked separately
/// by [`check_deformation_equations`].
#[derive(Clone)]
pub struct TruncatedDeformation<F> {
    action: GroupAction<F>,
    terms: Vec<StructureTensor<F>>,
}

impl<F: Scalar> fmt::Debug for TruncatedDeformation<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TruncatedDeformation")
            .field("order", &self.order())
            .field("terms", &self.terms)
            .finish()
    }
}

pub fn make_deformation<F: Scalar>(
    action: &GroupAction<F>,
    terms: Vec<StructureTensor<F>>,
) -> Result<TruncatedDeformation<F>, DeformationError> {
    let system = action.system();
    let d = system.dim();
    let Some(first) = terms.first() else {
        return Err(DeformationError::BaseMismatch);
    };
    if first != system.mu() {
        return Err(DeformationError::BaseMismatch);
    }
    for (r, t) in terms.iter().enumerate().skip(1) {
        if t.dim_in() != d || t.dim_out() != d {
            return Err(DeformationError::ShapeMismatch(format!(
                "term {r} maps {}→{}, expected {d}→{d}",
                t.dim_in(),
                t.dim_out()
            )));
        }
        if let Some(violation) = Cochain::from_tensor(t).constraint_violation() {
            return Err(DeformationError::NotCochain { order: r, violation });
        }
        if let Some((g, triple)) = action.tensor_witness(t) {
            return Err(DeformationError::NotEquivariant {
                order: r,
                element: action.labels()[g].clone(),
                triple,
            });
        }
    }
    Ok(TruncatedDeformation {
        action: action.clone(),
        terms,
    })
}

impl<F: Scalar> TruncatedDeformation<F> {
    /// The undeformed system as an order-0 deformation.
    pub fn trivial(action: &GroupAction<F>) -> Self {
        TruncatedDeformation {
            action: action.clone(),
            terms: vec![action.system().mu().clone()],
        }
    }

    pub fn order(&self) -> usize {
        self.terms.len() - 1
    }

    pub fn terms(&self) -> &[StructureTensor<F>] {
        &self.terms
    }

    /// `μ_r`, which is zero beyond the order.
    pub fn term(&self, r: usize) -> StructureTensor<F> {
        match self.terms.get(r) {
            Some(t) => t.clone(),
            None => {
                let d = self.system().dim();
                StructureTensor::zeros(d, d)
            }
        }
    }

    pub fn system(&self) -> &LieTripleSystem<F> {
        self.action.system()
    }

    pub fn action(&self) -> &GroupAction<F> {
        &self.action
    }

    /// The same series read at a higher order, padded with zero terms.
    pub fn padded(&self, order: usize) -> Self {
        let mut terms = self.terms.clone();
        while terms.len() < order + 1 {
            let d = self.system().dim();
            terms.push(StructureTensor::zeros(d, d));
        }
        TruncatedDeformation {
            action: self.action.clone(),
            terms,
        }
    }

    /// Whether all terms past the order-0 term vanish.
    pub fn is_trivial(&self) -> bool {
        self.terms.iter().skip(1).all(StructureTensor::is_zero)
    }
}

/// `(a,b,c,d,e) ↦ A(a,b,B(c,d,e)) − A(B(a,b,c),d,e) − A(c,B(a,b,d),e) − A(c,d,B(a,b,e))`
/// as a degree-5 cochain.
pub fn composition<F: Scalar>(a: &StructureTensor<F>, b: &StructureTensor<F>) -> Cochain<F> {
    let d = a.dim_in();
    let bs = b.sparse_values();
    let tri = |x: usize, y: usize, z: usize| (x * d + y) * d + z;
    let mut values = vec![F::zero(); d.pow(5) * d];
    for x0 in 0..d {
        for x1 in 0..d {
            for x2 in 0..d {
                for x3 in 0..d {
                    for x4 in 0..d {
                        let base = ((((x0 * d + x1) * d + x2) * d + x3) * d + x4) * d;
                        let slot = &mut values[base..base + d];
                        let mut add = |coeff: &F, ai: usize, aj: usize, ak: usize, negative: bool| {
                            for (o, v) in slot.iter_mut().zip(a.basis_value(ai, aj, ak)) {
                                if v.is_zero() {
                                    continue;
                                }
                                if negative {
                                    o.sub_mul(coeff, v);
                                } else {
                                    o.add_mul(coeff, v);
                                }
                            }
                        };
                        for (q, c) in &bs[tri(x2, x3, x4)] {
                            add(c, x0, x1, *q, false);
                        }
                        for (q, c) in &bs[tri(x0, x1, x2)] {
                            add(c, *q, x3, x4, true);
                        }
                        for (q, c) in &bs[tri(x0, x1, x3)] {
                            add(c, x2, *q, x4, true);
                        }
                        for (q, c) in &bs[tri(x0, x1, x4)] {
                            add(c, x2, x3, *q, true);
                        }
                    }
                }
            }
        }
    }
    Cochain::from_values(5, d, d, values).expect("consistent shape")
}

/// Residual `R_r` of the order-`r` deformation equation.
pub fn residual<F: Scalar>(def: &TruncatedDeformation<F>, r: usize) -> Cochain<F> {
    sum_compositions(def, r, false)
}

fn sum_compositions<F: Scalar>(def: &TruncatedDeformation<F>, r: usize, skip_zero: bool) -> Cochain<F> {
    let d = def.system().dim();
    let mut acc = Cochain::zeros(5, d, d);
    let lo = if skip_zero { 1 } else { 0 };
    for i in lo..=r - lo {
        let j = r - i;
        if i > def.order() || j > def.order() {
            continue;
        }
        if def.terms[i].is_zero() || def.terms[j].is_zero() {
            continue;
        }
        acc = acc.add(&composition(&def.terms[i], &def.terms[j]));
    }
    acc
}

/// Outcome of one order-`r` equation.
#[derive(Clone)]
pub struct ResidualStatus<F> {
    pub order: usize,
    pub vanishes: bool,
    /// Lexicographically first basis 5-tuple with a nonzero residual, and
    /// the residual there.
    pub witness: Option<([usize; 5], Vec<F>)>,
}

impl<F: Scalar> fmt::Debug for ResidualStatus<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ResidualStatus")
            .field("order", &self.order)
            .field("vanishes", &self.vanishes)
            .field("witness", &self.witness)
            .finish()
    }
}

#[derive(Clone)]
pub struct DeformationReport<F> {
    pub order: usize,
    /// Residuals for `r = 0, ..., 2 · order`.
    pub residuals: Vec<ResidualStatus<F>>,
}

impl<F: Scalar> fmt::Debug for DeformationReport<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DeformationReport")
            .field("order", &self.order)
            .field("residuals", &self.residuals)
            .finish()
    }
}

impl<F: Scalar> DeformationReport<F> {
    /// All equations up to the order hold.
    pub fn passed(&self) -> bool {
        self.residuals.iter().take(self.order + 1).all(|r| r.vanishes)
    }

    /// The equations hold for every power of `t`, so the truncated series
    /// is an exact deformation.
    pub fn exact(&self) -> bool {
        self.residuals.iter().all(|r| r.vanishes)
    }

    pub fn first_failure(&self) -> Option<&ResidualStatus<F>> {
        self.residuals.iter().take(self.order + 1).find(|r| !r.vanishes)
    }
}

fn first_nonzero<F: Scalar>(c: &Cochain<F>) -> Option<([usize; 5], Vec<F>)> {
    let d = c.dim_in();
    let m = c.dim_out();
    let pos = c.values().iter().position(|v| !v.is_zero())?;
    let mut rest = pos / m;
    let mut args = [0usize; 5];
    for s in (0..5).rev() {
        args[s] = rest % d;
        rest /= d;
    }
    Some((args, c.value(&args).to_vec()))
}

/// Evaluates the equations for `r = 0, ..., 2 · order`.
pub fn check_deformation_equations<F: Scalar>(def: &TruncatedDeformation<F>) -> DeformationReport<F> {
    let residuals = (0..=2 * def.order())
        .map(|r| {
            let res = residual(def, r);
            let witness = first_nonzero(&res);
            ResidualStatus {
                order: r,
                vanishes: witness.is_none(),
                witness,
            }
        })
        .collect();
    DeformationReport {
        order: def.order(),
        residuals,
    }
}

/// The first nonzero `μ_n` with `n ≥ 1`.
pub fn infinitesimal<F: Scalar>(def: &TruncatedDeformation<F>) -> Option<(usize, Cochain<F>)> {
    def.terms
        .iter()
        .enumerate()
        .skip(1)
        .find(|(_, t)| !t.is_zero())
        .map(|(n, t)| (n, Cochain::from_tensor(t)))
}

/// `F_{n+1}`: the order-`(n+1)` terms with `i, j > 0`.
pub fn obstruction_cochain<F: Scalar>(def: &TruncatedDeformation<F>) -> Cochain<F> {
    sum_compositions(def, def.order() + 1, true)
}

#[derive(Clone)]
pub struct ObstructionResult<F> {
    pub order: usize,
    pub cochain: Cochain<F>,
    pub invariant: bool,
    /// `None` when `δ⁵` is beyond the caps.
    pub is_cocycle: Option<bool>,
    pub preimage: Option<Cochain<F>>,
}

impl<F: Scalar> fmt::Debug for ObstructionResult<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ObstructionResult")
            .field("order", &self.order)
            .field("cochain", &self.cochain)
            .field("invariant", &self.invariant)
            .field("is_cocycle", &self.is_cocycle)
            .field("preimage", &self.preimage)
            .finish()
    }
}

/// A truncated formal isomorphism `Ψ_t = Id + ψ_1 t + ... + ψ_N t^N` with
/// equivariant coefficients.
#[derive(Clone, PartialEq, Eq)]
pub struct FormalIsomorphism<F> {
    terms: Vec<Matrix<F>>,
}

impl<F: Scalar> fmt::Debug for FormalIsomorphism<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FormalIsomorphism").field("terms", &self.terms).finish()
    }
}

impl<F: Scalar> FormalIsomorphism<F> {
    pub fn identity(d: usize) -> Self {
        FormalIsomorphism {
            terms: vec![Matrix::identity(d)],
        }
    }

    pub fn new(action: &GroupAction<F>, terms: Vec<Matrix<F>>) -> Result<Self, DeformationError> {
        let d = action.system().dim();
        if terms.first() != Some(&Matrix::identity(d)) {
            return Err(DeformationError::IsomorphismNotUnipotent);
        }
        for (k, psi) in terms.iter().enumerate() {
            if psi.rows() != d || psi.cols() != d {
                return Err(DeformationError::ShapeMismatch(format!("isomorphism term {k} is not {d}x{d}")));
            }
            if !action.commutes_with(psi) {
                return Err(DeformationError::IsomorphismNotEquivariant { order: k });
            }
        }
        Ok(FormalIsomorphism { terms })
    }

    /// `Id + ψ t^k`.
    pub fn elementary(action: &GroupAction<F>, psi: Matrix<F>, k: usize) -> Result<Self, DeformationError> {
        let d = action.system().dim();
        let mut terms = vec![Matrix::zeros(d, d); k + 1];
        terms[0] = Matrix::identity(d);
        terms[k] = psi;
        Self::new(action, terms)
    }

    pub fn order(&self) -> usize {
        self.terms.len() - 1
    }

    pub fn terms(&self) -> &[Matrix<F>] {
        &self.terms
    }

    /// `ψ_k`, which is zero beyond the order.
    pub fn term(&self, k: usize) -> Matrix<F> {
        let d = self.terms[0].rows();
        self.terms.get(k).cloned().unwrap_or_else(|| Matrix::zeros(d, d))
    }

    /// Terms of `Ψ_t^{-1}` through `t^cap`: `φ_0 = Id`, `φ_k = −Σ_{i=1}^k ψ_i φ_{k−i}`.
    pub fn inverse_terms(&self, cap: usize) -> Vec<Matrix<F>> {
        let d = self.terms[0].rows();
        let mut phi = vec![Matrix::identity(d)];
        for k in 1..=cap {
            let mut acc = Matrix::zeros(d, d);
            for i in 1..=k.min(self.order()) {
                acc = acc.sub(&self.terms[i].mul(&phi[k - i]).expect("square")).expect("square");
            }
            phi.push(acc);
        }
        phi
    }

    /// The truncated product `Ψ_t ∘ Φ_t` through `t^cap`.
    pub fn compose(&self, other: &Self, cap: usize) -> Self {
        let d = self.terms[0].rows();
        let terms = (0..=cap)
            .map(|k| {
                let mut acc = Matrix::zeros(d, d);
                for i in 0..=k {
                    acc = acc.add(&self.term(i).mul(&other.term(k - i)).expect("square")).expect("square");
                }
                acc
            })
            .collect();
        FormalIsomorphism { terms }
    }

    /// Drops trailing zero terms.
    pub fn trimmed(mut self) -> Self {
        while self.terms.len() > 1 && self.terms.last().is_some_and(Matrix::is_zero) {
            self.terms.pop();
        }
        self
    }
}

/// `μ̃_t = Ψ_t ∘ μ_t ∘ (Ψ_t^{-1})^{⊗3}` through `t^cap`.
pub fn apply_isomorphism<F: Scalar>(
    def: &TruncatedDeformation<F>,
    psi: &FormalIsomorphism<F>,
    cap: usize,
) -> Result<TruncatedDeformation<F>, DeformationError> {
    if cap < def.order() {
        return Err(DeformationError::OrderCap {
            cap,
            order: def.order(),
        });
    }
    let d = def.system().dim();
    let phi = psi.inverse_terms(cap);
    let psi_terms: Vec<Matrix<F>> = (0..=cap).map(|k| psi.term(k)).collect();
    let mut out: Vec<StructureTensor<F>> = (0..=cap).map(|_| StructureTensor::zeros(d, d)).collect();
    for (i, mu) in def.terms.iter().enumerate() {
        if mu.is_zero() || i > cap {
            continue;
        }
        for j1 in 0..=cap - i {
            if phi[j1].is_zero() {
                continue;
            }
            for j2 in 0..=cap - i - j1 {
                if phi[j2].is_zero() {
                    continue;
                }
                for j3 in 0..=cap - i - j1 - j2 {
                    if phi[j3].is_zero() {
                        continue;
                    }
                    let inner = mu.compose(None, &phi[j1], &phi[j2], &phi[j3]);
                    for a in 0..=cap - i - j1 - j2 - j3 {
                        if psi_terms[a].is_zero() {
                            continue;
                        }
                        let k = a + i + j1 + j2 + j3;
                        let id = Matrix::identity(d);
                        let t = inner.compose(Some(&psi_terms[a]), &id, &id, &id);
                        out[k] = out[k].add(&t);
                    }
                }
            }
        }
    }
    make_deformation(&def.action, out)
}

/// Result of an order-by-order equivalence search.
#[derive(Clone)]
pub struct EquivalenceResult<F> {
    /// An equivariant isomorphism carrying the first deformation to the
    /// second through the cap.
    pub isomorphism: Option<FormalIsomorphism<F>>,
    /// First order at which no equivariant `ψ_k` exists.
    pub obstructed_order: Option<usize>,
    /// The 3-cocycle `μ̃_k − μ'_k` that is not an equivariant coboundary.
    pub class_witness: Option<Cochain<F>>,
    /// Whether a plain, not necessarily equivariant, `ψ_k` would have
    /// existed at the obstructed order.
    pub plain_solvable: Option<bool>,
}

impl<F: Scalar> fmt::Debug for EquivalenceResult<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EquivalenceResult")
            .field("isomorphism", &self.isomorphism)
            .field("obstructed_order", &self.obstructed_order)
            .field("class_witness", &self.class_witness)
            .field("plain_solvable", &self.plain_solvable)
            .finish()
    }
}

/// One line of a trivialization log.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GaugeStep {
    /// `Id + ψ t^n` removed the `n`-infinitesimal.
    Removed { order: usize },
    /// The `n`-infinitesimal is not an equivariant coboundary.
    Stuck { order: usize },
    /// All terms through the cap vanish.
    Trivial,
}

impl fmt::Display for GaugeStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GaugeStep::Removed { order } => write!(f, "order {order}: infinitesimal is a coboundary, removed by Id + ψ t^{order}"),
            GaugeStep::Stuck { order } => write!(f, "order {order}: infinitesimal class is nonzero, stopping"),
            GaugeStep::Trivial => write!(f, "all terms vanish through the cap: deformation is trivial"),
        }
    }
}

#[derive(Clone)]
pub struct TrivializeResult<F> {
    pub deformation: TruncatedDeformation<F>,
    /// Product of the applied gauge transformations.
    pub isomorphism: FormalIsomorphism<F>,
    pub log: Vec<GaugeStep>,
    pub trivial: bool,
}

impl<F: Scalar> fmt::Debug for TrivializeResult<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TrivializeResult")
            .field("deformation", &self.deformation)
            .field("isomorphism", &self.isomorphism)
            .field("log", &self.log)
            .field("trivial", &self.trivial)
            .finish()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RigidityReport {
    pub dim_h3: usize,
    pub dim_c3: usize,
    pub rigid: bool,
}

impl fmt::Display for RigidityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.rigid {
            write!(f, "rigid (sufficient condition met: dim H^3_G = 0)")
        } else {
            write!(f, "inconclusive (dim H^3_G = {})", self.dim_h3)
        }
    }
}

/// Cohomological operations on deformations of one system with one action,
/// sharing the cached equivariant complex of self-coefficients.
pub struct DeformationContext<F> {
    action: GroupAction<F>,
    complex: YamagutiComplex<F>,
    plain: YamagutiComplex<F>,
}

impl<F: Scalar> DeformationContext<F> {
    pub fn new(action: &GroupAction<F>, caps: Caps) -> Result<Self, DeformationError> {
        let complex = YamagutiComplex::self_coefficients(action.system(), Some(action), caps)?;
        let plain = YamagutiComplex::self_coefficients(action.system(), None, caps)?;
        Ok(DeformationContext {
            action: action.clone(),
            complex,
            plain,
        })
    }

    pub fn complex(&self) -> &YamagutiComplex<F> {
        &self.complex
    }

    pub fn action(&self) -> &GroupAction<F> {
        &self.action
    }

    fn check_same(&self, def: &TruncatedDeformation<F>) -> Result<(), DeformationError> {
        if def.system() != self.action.system() || def.action.matrices() != self.action.matrices() {
            return Err(DeformationError::ShapeMismatch(
                "deformation belongs to a different system or action".into(),
            ));
        }
        Ok(())
    }

    /// Whether a cochain is fixed by every element.
    pub fn is_invariant(&self, c: &Cochain<F>) -> bool {
        let module = ModuleAction::self_module(&self.action);
        let sparse = c.to_sparse();
        (0..self.action.order()).all(|g| act_on_sparse(&self.action, &module, g, c.degree(), &sparse) == sparse)
    }

    /// `F_{n+1}` with its invariance, cocycle and coboundary status.
    pub fn obstruction(&self, def: &TruncatedDeformation<F>) -> Result<ObstructionResult<F>, DeformationError> {
        self.check_same(def)?;
        let cochain = obstruction_cochain(def);
        let invariant = self.is_invariant(&cochain);
        let is_cocycle = match self.complex.is_cocycle(&cochain) {
            Ok(b) => Some(b),
            Err(e) if e.is_cap() => None,
            Err(e) => return Err(e.into()),
        };
        let preimage = if cochain.is_zero() {
            let d = def.system().dim();
            Some(Cochain::zeros(3, d, d))
        } else {
            self.complex.is_coboundary(&cochain)?
        };
        Ok(ObstructionResult {
            order: def.order() + 1,
            cochain,
            invariant,
            is_cocycle,
            preimage,
        })
    }

    /// Extends an order-`n` deformation by `μ_{n+1}` with `δ³μ_{n+1} = F_{n+1}`;
    /// `None` when the obstruction is not an equivariant coboundary.
    pub fn extend(&self, def: &TruncatedDeformation<F>) -> Result<Option<TruncatedDeformation<F>>, DeformationError> {
        let obs = self.obstruction(def)?;
        let Some(pre) = obs.preimage else {
            return Ok(None);
        };
        let mut terms = def.terms.clone();
        terms.push(pre.to_tensor());
        let extended = make_deformation(&self.action, terms)?;
        if !check_deformation_equations(&extended).passed() {
            return Err(DeformationError::Internal(
                "extended deformation fails its equations".into(),
            ));
        }
        Ok(Some(extended))
    }

    /// Solves `δ¹ψ = c` for an equivariant `ψ`, as a `d x d` matrix.
    pub fn solve_gauge(&self, c: &Cochain<F>) -> Result<Option<Matrix<F>>, DeformationError> {
        Ok(self.complex.is_coboundary(c)?.map(|x| x.to_matrix()))
    }

    /// Searches for `Ψ` with `apply_isomorphism(a, Ψ) = b` through `cap`,
    /// fixing `ψ_1, ψ_2, ...` in turn.
    pub fn check_equivalence(
        &self,
        a: &TruncatedDeformation<F>,
        b: &TruncatedDeformation<F>,
        cap: usize,
    ) -> Result<EquivalenceResult<F>, DeformationError> {
        self.check_same(a)?;
        self.check_same(b)?;
        let d = a.system().dim();
        let mut psi = FormalIsomorphism::identity(d);
        for k in 1..=cap {
            let current = apply_isomorphism(a, &psi, cap)?;
            let diff = Cochain::from_tensor(&current.term(k)).sub(&Cochain::from_tensor(&b.term(k)));
            // Lower orders already agree, so ψ_k enters as current_k − δ¹ψ_k.
            match self.solve_gauge(&diff)? {
                Some(step) => {
                    let mut terms = psi.terms.clone();
                    terms.resize(k + 1, Matrix::zeros(d, d));
                    terms[k] = step;
                    psi = FormalIsomorphism { terms };
                }
                None => {
                    let plain_solvable = Some(self.plain.is_coboundary(&diff)?.is_some());
                    return Ok(EquivalenceResult {
                        isomorphism: None,
                        obstructed_order: Some(k),
                        class_witness: Some(diff),
                        plain_solvable,
                    });
                }
            }
        }
        let psi = psi.trimmed();
        let image = apply_isomorphism(a, &psi, cap)?;
        for k in 0..=cap {
            if image.term(k) != b.term(k) {
                return Err(DeformationError::Internal(format!(
                    "equivalence search produced a mismatch at order {k}"
                )));
            }
        }
        Ok(EquivalenceResult {
            isomorphism: Some(psi),
            obstructed_order: None,
            class_witness: None,
            plain_solvable: None,
        })
    }

    /// Removes coboundary infinitesimals one order at a time.
    pub fn trivialize(&self, def: &TruncatedDeformation<F>, cap: usize) -> Result<TrivializeResult<F>, DeformationError> {
        self.check_same(def)?;
        let d = def.system().dim();
        let mut total = FormalIsomorphism::identity(d);
        let mut current = apply_isomorphism(def, &total, cap)?;
        let mut log = Vec::new();
        loop {
            let Some((n, mu_n)) = infinitesimal(&current) else {
                log.push(GaugeStep::Trivial);
                return Ok(TrivializeResult {
                    deformation: current,
                    isomorphism: total.trimmed(),
                    log,
                    trivial: true,
                });
            };
            let Some(step) = self.solve_gauge(&mu_n)? else {
                log.push(GaugeStep::Stuck { order: n });
                return Ok(TrivializeResult {
                    deformation: current,
                    isomorphism: total.trimmed(),
                    log,
                    trivial: false,
                });
            };
            let gauge = FormalIsomorphism::elementary(&self.action, step, n)?;
            current = apply_isomorphism(&current, &gauge, cap)?;
            total = gauge.compose(&total, cap);
            log.push(GaugeStep::Removed { order: n });
        }
    }

    /// `dim H^3_G = 0` certifies rigidity; otherwise the test is inconclusive.
    pub fn rigidity_certificate(&self) -> Result<RigidityReport, DeformationError> {
        let report = self.complex.cohomology(3, false)?;
        Ok(RigidityReport {
            dim_h3: report.dim_h,
            dim_c3: report.dim_cochains,
            rigid: report.dim_h == 0,
        })
    }
}
