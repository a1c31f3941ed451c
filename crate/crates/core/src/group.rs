//! Finite groups acting on a Lie triple system by automorphisms, and the
//! induced action on multilinear maps.
//!
//! A group is given as an explicit list of labelled matrices. Validation is
//! exhaustive: invertibility, an identity element, no duplicates, closure, and
//! equivariance of the bracket.
//!
//! On `k`-linear maps `c : T^{⊗k} → V` the action is
//! `ρ(g) c = g_V ∘ c ∘ (g^{-1})^{⊗k}`, so invariant maps are exactly the
//! fixed points of every `ρ(g)`.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::kernel::{Echelon, Matrix, SparseVec};
use crate::lts::builders::rect_lts;
use crate::lts::{ActionTensor, LieTripleSystem, LtsError, LtsModule, StructureTensor};
use crate::scalar::Scalar;

pub const DEFAULT_MAX_GROUP_ORDER: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("the group must have at least one element")]
    Empty,
    #[error("element {0} is not invertible")]
    NotInvertible(String),
    #[error("elements {0} and {1} have the same matrix")]
    DuplicateElement(String, String),
    #[error("no element acts as the identity")]
    IdentityMissing,
    #[error("not closed: the product {0}·{1} is not in the list")]
    NotClosed(String, String),
    #[error("group order {order} exceeds the cap {cap}")]
    TooLarge { order: usize, cap: usize },
    #[error("bracket is not equivariant under {element}: witness triple {triple:?}")]
    NotEquivariant { element: String, triple: [usize; 3] },
    #[error("module action is not equivariant under {element}: {what}")]
    ModuleNotEquivariant { element: String, what: String },
    #[error("module matrices do not form a representation: {0}")]
    NotRepresentation(String),
    #[error("field characteristic {0} divides the group order {1}")]
    CharacteristicDividesOrder(u64, usize),
    #[error("ambient matrix of size {size}x{size} exceeds the entry cap {cap}")]
    AmbientTooLarge { size: usize, cap: usize },
    #[error(transparent)]
    Lts(#[from] LtsError),
}

/// A validated action of a finite group on a Lie triple system.
#[derive(Clone)]
pub struct GroupAction<F> {
    system: LieTripleSystem<F>,
    labels: Vec<String>,
    matrices: Vec<Matrix<F>>,
    inverses: Vec<Matrix<F>>,
    identity: usize,
    mult: Vec<Vec<usize>>,
    inverse_index: Vec<usize>,
}

/// Index of the first `(i, j, k)` with `μ(g e_i, g e_j, g e_k) ≠ g μ(e_i, e_j, e_k)`,
/// for a map `μ : T^{⊗3} → V` with `g` acting on `V` by `out`.
pub fn equivariance_witness<F: Scalar>(
    mu: &StructureTensor<F>,
    g: &Matrix<F>,
    out: &Matrix<F>,
) -> Option<[usize; 3]> {
    let d = mu.dim_in();
    let lhs = mu.compose(None, g, g, g);
    let id = Matrix::identity(d);
    let rhs = mu.compose(Some(out), &id, &id, &id);
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                if lhs.basis_value(i, j, k) != rhs.basis_value(i, j, k) {
                    return Some([i, j, k]);
                }
            }
        }
    }
    None
}

impl<F: Scalar> GroupAction<F> {
    /// Validates a labelled list of matrices as a group acting on `system`.
    pub fn new(system: LieTripleSystem<F>, elements: Vec<(String, Matrix<F>)>) -> Result<Self, GroupError> {
        Self::with_cap(system, elements, DEFAULT_MAX_GROUP_ORDER)
    }

    pub fn with_cap(
        system: LieTripleSystem<F>,
        elements: Vec<(String, Matrix<F>)>,
        max_order: usize,
    ) -> Result<Self, GroupError> {
        let d = system.dim();
        if elements.is_empty() {
            return Err(GroupError::Empty);
        }
        if elements.len() > max_order {
            return Err(GroupError::TooLarge {
                order: elements.len(),
                cap: max_order,
            });
        }
        let (labels, matrices): (Vec<String>, Vec<Matrix<F>>) = elements.into_iter().unzip();
        for (label, g) in labels.iter().zip(&matrices) {
            if g.rows() != d || g.cols() != d {
                return Err(GroupError::ShapeMismatch(format!(
                    "element {label} is {}x{}, expected {d}x{d}",
                    g.rows(),
                    g.cols()
                )));
            }
        }
        let inverses = labels
            .iter()
            .zip(&matrices)
            .map(|(label, g)| g.inverse().ok_or_else(|| GroupError::NotInvertible(label.clone())))
            .collect::<Result<Vec<_>, _>>()?;
        for a in 0..matrices.len() {
            for b in 0..a {
                if matrices[a] == matrices[b] {
                    return Err(GroupError::DuplicateElement(labels[b].clone(), labels[a].clone()));
                }
            }
        }
        let id = Matrix::identity(d);
        let identity = matrices.iter().position(|g| *g == id).ok_or(GroupError::IdentityMissing)?;
        let find = |m: &Matrix<F>| matrices.iter().position(|g| g == m);
        let mut mult = vec![vec![0; matrices.len()]; matrices.len()];
        for a in 0..matrices.len() {
            for b in 0..matrices.len() {
                let p = matrices[a].mul(&matrices[b]).expect("square matrices");
                mult[a][b] = find(&p).ok_or_else(|| GroupError::NotClosed(labels[a].clone(), labels[b].clone()))?;
            }
        }
        // A finite set closed under products is closed under inverses, so
        // every row of the table contains the identity.
        let inverse_index = (0..matrices.len())
            .map(|a| mult[a].iter().position(|&p| p == identity).expect("finite closed set"))
            .collect();
        for (label, g) in labels.iter().zip(&matrices) {
            if let Some(triple) = equivariance_witness(system.mu(), g, g) {
                return Err(GroupError::NotEquivariant {
                    element: label.clone(),
                    triple,
                });
            }
        }
        Ok(GroupAction {
            system,
            labels,
            matrices,
            inverses,
            identity,
            mult,
            inverse_index,
        })
    }

    /// The one-element group.
    pub fn trivial(system: LieTripleSystem<F>) -> Self {
        let d = system.dim();
        GroupAction {
            system,
            labels: vec!["e".to_string()],
            matrices: vec![Matrix::identity(d)],
            inverses: vec![Matrix::identity(d)],
            identity: 0,
            mult: vec![vec![0]],
            inverse_index: vec![0],
        }
    }

    pub fn system(&self) -> &LieTripleSystem<F> {
        &self.system
    }

    pub fn order(&self) -> usize {
        self.matrices.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn matrices(&self) -> &[Matrix<F>] {
        &self.matrices
    }

    pub fn matrix(&self, g: usize) -> &Matrix<F> {
        &self.matrices[g]
    }

    pub fn inverse_matrix(&self, g: usize) -> &Matrix<F> {
        &self.inverses[g]
    }

    pub fn identity_index(&self) -> usize {
        self.identity
    }

    pub fn mult_table(&self) -> &[Vec<usize>] {
        &self.mult
    }

    pub fn product(&self, a: usize, b: usize) -> usize {
        self.mult[a][b]
    }

    pub fn inverse_index(&self, a: usize) -> usize {
        self.inverse_index[a]
    }

    /// Whether a `T → T` linear map commutes with every element.
    pub fn commutes_with(&self, psi: &Matrix<F>) -> bool {
        self.matrices
            .iter()
            .all(|g| g.mul(psi).expect("square") == psi.mul(g).expect("square"))
    }

    /// First `(element, triple)` at which a trilinear map `T^{⊗3} → T` fails
    /// to be equivariant.
    pub fn tensor_witness(&self, mu: &StructureTensor<F>) -> Option<(usize, [usize; 3])> {
        self.matrices
            .iter()
            .enumerate()
            .find_map(|(g, m)| equivariance_witness(mu, m, m).map(|t| (g, t)))
    }
}

impl<F: Scalar> fmt::Debug for GroupAction<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GroupAction")
            .field("labels", &self.labels)
            .field("matrices", &self.matrices)
            .finish()
    }
}

/// The ℤ₂ action on `rect_lts(p, p)` by transposition.
pub fn transpose_action_on_rect<F: Scalar>(p: usize) -> Result<GroupAction<F>, GroupError> {
    let system = rect_lts::<F>(p, p)?;
    let n = p * p;
    let mut t = Matrix::zeros(n, n);
    for i in 0..p {
        for j in 0..p {
            t.set(j * p + i, i * p + j, F::one());
        }
    }
    GroupAction::new(system, vec![("e".into(), Matrix::identity(n)), ("t".into(), t)])
}

/// The action of a group on a coefficient module, one `m x m` matrix per
/// group element in the same order.
#[derive(Clone)]
pub struct ModuleAction<F> {
    matrices: Vec<Matrix<F>>,
    inverses: Vec<Matrix<F>>,
    pub left_equivariant: bool,
    pub right_equivariant: bool,
    pub middle_equivariant: bool,
}

fn action_tensor_witness<F: Scalar>(
    t: &ActionTensor<F>,
    d: usize,
    m: usize,
    g: &Matrix<F>,
    g_v: &Matrix<F>,
) -> Option<[usize; 3]> {
    // t(g a, g b, g_V v) = g_V t(a, b, v)
    for a in 0..d {
        let ga = g.column(a);
        for b in 0..d {
            let gb = g.column(b);
            let lhs_op = t.operator(&ga, &gb).mul(g_v).expect("square");
            let rhs_op = g_v.mul(&t.operator(&unit_vec::<F>(d, a), &unit_vec::<F>(d, b))).expect("square");
            if lhs_op != rhs_op {
                let v = (0..m).find(|&v| lhs_op.column(v) != rhs_op.column(v)).unwrap_or(0);
                return Some([a, b, v]);
            }
        }
    }
    None
}

fn unit_vec<F: Scalar>(n: usize, i: usize) -> Vec<F> {
    let mut v = vec![F::zero(); n];
    v[i] = F::one();
    v
}

impl<F: Scalar> ModuleAction<F> {
    /// The coefficient module is the system itself, with the same matrices.
    pub fn self_module(action: &GroupAction<F>) -> Self {
        ModuleAction {
            matrices: action.matrices.clone(),
            inverses: action.inverses.clone(),
            left_equivariant: true,
            right_equivariant: true,
            middle_equivariant: true,
        }
    }

    /// Validates that `matrices` represent the group on `module` and records
    /// which of the three actions are equivariant.
    pub fn new(action: &GroupAction<F>, module: &LtsModule<F>, matrices: Vec<Matrix<F>>) -> Result<Self, GroupError> {
        let m = module.dim();
        let d = action.system().dim();
        if module.base().dim() != d {
            return Err(GroupError::ShapeMismatch("module and action have different base systems".into()));
        }
        if matrices.len() != action.order() {
            return Err(GroupError::ShapeMismatch(format!(
                "{} module matrices for a group of order {}",
                matrices.len(),
                action.order()
            )));
        }
        let mut inverses = Vec::with_capacity(matrices.len());
        for (label, g) in action.labels().iter().zip(&matrices) {
            if g.rows() != m || g.cols() != m {
                return Err(GroupError::ShapeMismatch(format!("module matrix for {label} is not {m}x{m}")));
            }
            inverses.push(g.inverse().ok_or_else(|| GroupError::NotInvertible(label.clone()))?);
        }
        if matrices[action.identity_index()] != Matrix::identity(m) {
            return Err(GroupError::NotRepresentation("identity acts nontrivially".into()));
        }
        for a in 0..matrices.len() {
            for b in 0..matrices.len() {
                let p = matrices[a].mul(&matrices[b]).expect("square");
                if p != matrices[action.product(a, b)] {
                    return Err(GroupError::NotRepresentation(format!(
                        "{}·{}",
                        action.labels()[a],
                        action.labels()[b]
                    )));
                }
            }
        }
        let check = |t: &ActionTensor<F>| {
            (0..action.order()).all(|g| action_tensor_witness(t, d, m, action.matrix(g), &matrices[g]).is_none())
        };
        Ok(ModuleAction {
            left_equivariant: check(module.left()),
            right_equivariant: check(module.right()),
            middle_equivariant: check(module.middle()),
            matrices,
            inverses,
        })
    }

    pub fn matrices(&self) -> &[Matrix<F>] {
        &self.matrices
    }

    pub fn matrix(&self, g: usize) -> &Matrix<F> {
        &self.matrices[g]
    }

    pub fn inverse_matrix(&self, g: usize) -> &Matrix<F> {
        &self.inverses[g]
    }

    pub fn fully_equivariant(&self) -> bool {
        self.left_equivariant && self.right_equivariant && self.middle_equivariant
    }
}

impl<F: Scalar> fmt::Debug for ModuleAction<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ModuleAction")
            .field("matrices", &self.matrices)
            .field("left_equivariant", &self.left_equivariant)
            .field("right_equivariant", &self.right_equivariant)
            .field("middle_equivariant", &self.middle_equivariant)
            .finish()
    }
}

/// Applies `c ↦ out ∘ c ∘ slot^{⊗k}` to a `k`-linear map `T^{⊗k} → V` given as
/// a sparse vector in the row-major layout `((i_1 d + i_2) d + ... ) m + l`.
///
/// Works entry by entry, so the cost is proportional to the number of stored
/// entries times the fill of the matrices.
pub fn transform_sparse<F: Scalar>(
    c: &[(usize, F)],
    k: usize,
    slot: &Matrix<F>,
    out: &Matrix<F>,
) -> SparseVec<F> {
    let d = slot.rows();
    let m = out.rows();
    // (slot · e_i)_j = slot[j][i]; entry c[j_1..j_k, l'] feeds every i with
    // slot[j_s][i_s] ≠ 0.
    let slot_rows: Vec<Vec<(usize, F)>> = (0..d)
        .map(|j| (0..d).filter(|&i| !slot.get(j, i).is_zero()).map(|i| (i, slot.get(j, i).clone())).collect())
        .collect();
    let out_cols: Vec<Vec<(usize, F)>> = (0..m)
        .map(|lp| (0..m).filter(|&l| !out.get(l, lp).is_zero()).map(|l| (l, out.get(l, lp).clone())).collect())
        .collect();
    let mut acc: BTreeMap<usize, F> = BTreeMap::new();
    let mut digits = vec![0usize; k];
    for (idx, value) in c {
        let mut rest = idx / m;
        let lp = idx % m;
        for s in (0..k).rev() {
            digits[s] = rest % d;
            rest /= d;
        }
        // partial products over the slots, as (flattened prefix, coefficient)
        let mut partial: Vec<(usize, F)> = vec![(0, value.clone())];
        for &j in &digits {
            let mut next = Vec::with_capacity(partial.len() * slot_rows[j].len());
            for (p, coeff) in &partial {
                for (i, a) in &slot_rows[j] {
                    next.push((p * d + i, coeff.clone() * a));
                }
            }
            partial = next;
        }
        for (p, coeff) in partial {
            for (l, b) in &out_cols[lp] {
                let e = acc.entry(p * m + l).or_insert_with(F::zero);
                e.add_mul(&coeff, b);
            }
        }
    }
    acc.into_iter().filter(|(_, v)| !v.is_zero()).collect()
}

/// `ρ(g) c` for a `k`-linear map given sparsely.
pub fn act_on_sparse<F: Scalar>(
    action: &GroupAction<F>,
    module: &ModuleAction<F>,
    g: usize,
    k: usize,
    c: &[(usize, F)],
) -> SparseVec<F> {
    transform_sparse(c, k, action.inverse_matrix(g), module.matrix(g))
}

/// Matrices of `ρ(g)` on the ambient space `Hom(T^{⊗k}, V)`, one per element.
///
/// `max_entries` bounds the number of entries of each dense matrix.
pub fn action_on_cochain_ambient<F: Scalar>(
    action: &GroupAction<F>,
    module: &ModuleAction<F>,
    k: usize,
    max_entries: usize,
) -> Result<Vec<Matrix<F>>, GroupError> {
    let d = action.system().dim();
    let m = module.matrix(0).rows();
    let size = (d as u128).pow(k as u32) * m as u128;
    if size * size > max_entries as u128 {
        return Err(GroupError::AmbientTooLarge {
            size: size as usize,
            cap: max_entries,
        });
    }
    Ok((0..action.order())
        .map(|g| {
            let inv_t = action.inverse_matrix(g).transpose();
            let mut acc = Matrix::identity(1);
            for _ in 0..k {
                acc = acc.kron(&inv_t);
            }
            acc.kron(module.matrix(g))
        })
        .collect())
}

/// Basis of the common fixed space of `mats`, as the columns of a matrix:
/// the nullspace of the stacked blocks `ρ(g) − I`.
pub fn invariant_subspace<F: Scalar>(mats: &[Matrix<F>]) -> Matrix<F> {
    let n = mats.first().map_or(0, |m| m.cols());
    let mut e = Echelon::new(n);
    let id = Matrix::identity(n);
    for g in mats {
        let block = g.sub(&id).expect("square action matrices");
        for i in 0..n {
            e.insert_dense(block.row(i));
        }
    }
    let basis = e.nullspace();
    let mut out = Matrix::zeros(n, basis.len());
    for (j, v) in basis.iter().enumerate() {
        for (i, x) in v {
            out.set(*i, j, x.clone());
        }
    }
    out
}

/// Group average `|G|^{-1} Σ_g ρ(g) c`.
pub fn reynolds_project<F: Scalar>(mats: &[Matrix<F>], c: &[F]) -> Result<Vec<F>, GroupError> {
    let order = mats.len();
    let inv = F::from_i64(order as i64)
        .inv()
        .ok_or(GroupError::CharacteristicDividesOrder(F::characteristic(), order))?;
    let mut acc = vec![F::zero(); c.len()];
    for g in mats {
        let v = g
            .mul_vec(c)
            .map_err(|e| GroupError::ShapeMismatch(e.to_string()))?;
        for (a, b) in acc.iter_mut().zip(v) {
            *a += &b;
        }
    }
    Ok(acc.into_iter().map(|x| x * &inv).collect())
}
