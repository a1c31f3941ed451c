//! Odd-degree cochain spaces, the coboundary, and (equivariant) cohomology.
//!
//! A `(2n+1)`-cochain `f : T^{⊗(2n+1)} → V` is stored densely in row-major
//! order: the coefficient of `v_l` in `f(e_{i_1}, ..., e_{i_k})` sits at
//! `((i_1 d + i_2) d + ... + i_k) m + l`. For `k ≥ 3` the cochains are cut out
//! by conditions on the last three slots only:
//!
//! ```text
//! f(..., x, x, y) = 0
//! f(..., x, y, z) + f(..., y, z, x) + f(..., z, x, y) = 0
//! ```
//!
//! The square condition is imposed in polarized form together with its
//! diagonal, which is correct in every characteristic. Degree 1 is all of
//! `Hom(T, V)`.
//!
//! Subspace bases are kept as sparse columns. Each basis is the canonical
//! kernel basis of some reduced echelon form, so column `j` has a 1 at a
//! position `p_j` where every other column vanishes; the coordinates of a
//! vector of the span are simply its entries at those positions.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};

use rayon::prelude::*;
use thiserror::Error;

use crate::group::{act_on_sparse, GroupAction, GroupError, ModuleAction};
use crate::kernel::{solve, Echelon, Matrix, SparseVec};
use crate::lts::{LieTripleSystem, LtsModule, StructureTensor};
use crate::scalar::Scalar;

/// Size limits shared by every computation that builds cochain spaces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    /// Largest cochain degree that may be built.
    pub max_degree: usize,
    /// Largest ambient dimension `d^k m` of a cochain space, and largest
    /// entry count of a dense ambient action matrix.
    pub max_ambient: usize,
    /// Largest group order accepted.
    pub max_group_order: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            max_degree: 7,
            max_ambient: 10_000_000,
            max_group_order: 64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CohomologyError {
    #[error("cochain degrees are odd and at least 1, got {0}")]
    InvalidDegree(usize),
    #[error("degree {degree} exceeds the degree cap {cap}")]
    DegreeCap { degree: usize, cap: usize },
    #[error("ambient dimension {size} exceeds the cap {cap}")]
    AmbientCap { size: u128, cap: usize },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("coboundary of basis column {0} leaves the target space")]
    ImageEscapes(usize),
    #[error("coefficient action is not equivariant: {0}")]
    ModuleNotEquivariant(String),
    #[error(transparent)]
    Group(#[from] GroupError),
}

impl CohomologyError {
    /// Whether the failure is a size limit rather than a mathematical fact.
    pub fn is_cap(&self) -> bool {
        matches!(
            self,
            CohomologyError::DegreeCap { .. }
                | CohomologyError::AmbientCap { .. }
                | CohomologyError::Group(GroupError::AmbientTooLarge { .. })
                | CohomologyError::Group(GroupError::TooLarge { .. })
        )
    }
}

fn check_degree(degree: usize) -> Result<(), CohomologyError> {
    if degree % 2 == 0 {
        return Err(CohomologyError::InvalidDegree(degree));
    }
    Ok(())
}

fn ambient_size(d: usize, m: usize, degree: usize) -> u128 {
    (d as u128).pow(degree as u32) * m as u128
}

/// Rejects degrees and ambient sizes beyond `caps`.
pub fn check_caps(d: usize, m: usize, degree: usize, caps: &Caps) -> Result<usize, CohomologyError> {
    check_degree(degree)?;
    if degree > caps.max_degree {
        return Err(CohomologyError::DegreeCap {
            degree,
            cap: caps.max_degree,
        });
    }
    let size = ambient_size(d, m, degree);
    if size > caps.max_ambient as u128 {
        return Err(CohomologyError::AmbientCap {
            size,
            cap: caps.max_ambient,
        });
    }
    Ok(size as usize)
}

/// A multilinear map `T^{⊗k} → V` with `k` odd.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Cochain<F> {
    degree: usize,
    d: usize,
    m: usize,
    values: Vec<F>,
}

/// First failing cochain condition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CochainViolation {
    pub condition: &'static str,
    pub args: Vec<usize>,
    pub output: usize,
}

impl<F: Scalar> Cochain<F> {
    pub fn zeros(degree: usize, d: usize, m: usize) -> Self {
        Cochain {
            degree,
            d,
            m,
            values: vec![F::zero(); ambient_size(d, m, degree) as usize],
        }
    }

    pub fn from_values(degree: usize, d: usize, m: usize, values: Vec<F>) -> Result<Self, CohomologyError> {
        check_degree(degree)?;
        let size = ambient_size(d, m, degree);
        if values.len() as u128 != size {
            return Err(CohomologyError::ShapeMismatch(format!(
                "{} values for a degree-{degree} cochain with d={d}, m={m}",
                values.len()
            )));
        }
        Ok(Cochain { degree, d, m, values })
    }

    pub fn from_sparse(degree: usize, d: usize, m: usize, v: &[(usize, F)]) -> Self {
        let mut c = Self::zeros(degree, d, m);
        for (i, x) in v {
            c.values[*i] = x.clone();
        }
        c
    }

    /// A linear map `T → V` given as an `m x d` matrix.
    pub fn from_matrix(a: &Matrix<F>) -> Self {
        let (m, d) = (a.rows(), a.cols());
        let mut c = Self::zeros(1, d, m);
        for i in 0..d {
            for l in 0..m {
                c.values[i * m + l] = a.get(l, i).clone();
            }
        }
        c
    }

    /// The `m x d` matrix of a degree-1 cochain.
    pub fn to_matrix(&self) -> Matrix<F> {
        assert_eq!(self.degree, 1, "only degree-1 cochains are linear maps");
        let mut a = Matrix::zeros(self.m, self.d);
        for i in 0..self.d {
            for l in 0..self.m {
                a.set(l, i, self.values[i * self.m + l].clone());
            }
        }
        a
    }

    pub fn from_tensor(t: &StructureTensor<F>) -> Self {
        Cochain {
            degree: 3,
            d: t.dim_in(),
            m: t.dim_out(),
            values: t.entries().to_vec(),
        }
    }

    pub fn to_tensor(&self) -> StructureTensor<F> {
        assert_eq!(self.degree, 3, "only degree-3 cochains are trilinear maps");
        StructureTensor::from_entries(self.d, self.m, self.values.clone()).expect("shape is consistent")
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dim_in(&self) -> usize {
        self.d
    }

    pub fn dim_out(&self) -> usize {
        self.m
    }

    pub fn values(&self) -> &[F] {
        &self.values
    }

    pub fn into_values(self) -> Vec<F> {
        self.values
    }

    pub fn to_sparse(&self) -> SparseVec<F> {
        crate::kernel::sparse_from_dense(&self.values)
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(F::is_zero)
    }

    /// Flat index of `(args, l)`.
    pub fn index(&self, args: &[usize], l: usize) -> usize {
        args.iter().fold(0, |acc, a| acc * self.d + a) * self.m + l
    }

    /// The value `f(e_{args})` as a coefficient vector.
    pub fn value(&self, args: &[usize]) -> &[F] {
        let start = self.index(args, 0);
        &self.values[start..start + self.m]
    }

    fn zip_with(&self, rhs: &Self, f: impl Fn(&F, &F) -> F) -> Self {
        assert_eq!(
            (self.degree, self.d, self.m),
            (rhs.degree, rhs.d, rhs.m),
            "cochain shapes differ"
        );
        Cochain {
            values: self.values.iter().zip(&rhs.values).map(|(a, b)| f(a, b)).collect(),
            ..*self
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        self.zip_with(rhs, |a, b| a.clone() + b)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.zip_with(rhs, |a, b| a.clone() - b)
    }

    pub fn scale(&self, c: &F) -> Self {
        Cochain {
            values: self.values.iter().map(|a| a.clone() * c).collect(),
            ..*self
        }
    }

    /// The first point where the last-three-slot conditions fail, scanning
    /// prefixes, then slot triples, then outputs in lexicographic order.
    pub fn constraint_violation(&self) -> Option<CochainViolation> {
        if self.degree < 3 {
            return None;
        }
        let d = self.d;
        let k = self.degree;
        let block = d * d * d;
        for p in 0..d.pow(k as u32 - 3) {
            let at = |a: usize, b: usize, c: usize, l: usize| &self.values[(p * block + (a * d + b) * d + c) * self.m + l];
            for a in 0..d {
                for b in 0..d {
                    for c in 0..d {
                        for l in 0..self.m {
                            let condition = if a == b && !at(a, a, c, l).is_zero() {
                                "square"
                            } else if !(at(a, b, c, l).clone() + at(b, a, c, l)).is_zero() {
                                "skew"
                            } else if !(at(a, b, c, l).clone() + at(b, c, a, l) + at(c, a, b, l)).is_zero() {
                                "cyclic"
                            } else {
                                continue;
                            };
                            let mut args = vec![0; k];
                            let mut rest = p;
                            for s in (0..k - 3).rev() {
                                args[s] = rest % d;
                                rest /= d;
                            }
                            args[k - 3..].copy_from_slice(&[a, b, c]);
                            return Some(CochainViolation {
                                condition,
                                args,
                                output: l,
                            });
                        }
                    }
                }
            }
        }
        None
    }
}

impl<F: Scalar> fmt::Debug for Cochain<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let nz: Vec<String> = self
            .values
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(i, v)| format!("{i}:{v}"))
            .collect();
        write!(f, "Cochain(deg {}, {}→{}; {})", self.degree, self.d, self.m, nz.join(", "))
    }
}

/// Constraint rows of the last-three-slot conditions on `T^{⊗3} → k`,
/// over column index `(a d + b) d + c`.
fn local_constraint_rows<F: Scalar>(d: usize) -> Vec<SparseVec<F>> {
    let idx = |a: usize, b: usize, c: usize| (a * d + b) * d + c;
    let mut rows = Vec::new();
    let mut push = |terms: &[usize]| {
        let mut acc: BTreeMap<usize, F> = BTreeMap::new();
        for t in terms {
            *acc.entry(*t).or_insert_with(F::zero) += &F::one();
        }
        let row: SparseVec<F> = acc.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        if !row.is_empty() {
            rows.push(row);
        }
    };
    for a in 0..d {
        for c in 0..d {
            push(&[idx(a, a, c)]);
        }
    }
    for a in 0..d {
        for b in a + 1..d {
            for c in 0..d {
                push(&[idx(a, b, c), idx(b, a, c)]);
            }
        }
    }
    for a in 0..d {
        for b in 0..d {
            for c in 0..d {
                push(&[idx(a, b, c), idx(b, c, a), idx(c, a, b)]);
            }
        }
    }
    rows
}

/// All constraint rows on the ambient space of a degree-`k` cochain, in the
/// flat layout. Used by tests as a monolithic oracle for [`cochain_space_basis`].
pub fn constraint_rows<F: Scalar>(d: usize, m: usize, degree: usize) -> Vec<SparseVec<F>> {
    if degree < 3 {
        return Vec::new();
    }
    let local = local_constraint_rows::<F>(d);
    let prefixes = d.pow(degree as u32 - 3);
    let block = d * d * d;
    let mut rows = Vec::new();
    for p in 0..prefixes {
        for l in 0..m {
            for r in &local {
                rows.push(r.iter().map(|(t, v)| ((p * block + t) * m + l, v.clone())).collect());
            }
        }
    }
    rows
}

/// Basis of a subspace of a cochain space, with pivot positions.
#[derive(Clone)]
pub struct CochainSpaceBasis<F> {
    degree: usize,
    d: usize,
    m: usize,
    columns: Vec<SparseVec<F>>,
    positions: Vec<usize>,
    equivariant: bool,
}

impl<F: Scalar> fmt::Debug for CochainSpaceBasis<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CochainSpaceBasis")
            .field("degree", &self.degree)
            .field("ambient", &self.ambient_dim())
            .field("dim", &self.dim())
            .field("equivariant", &self.equivariant)
            .finish()
    }
}

impl<F: Scalar> CochainSpaceBasis<F> {
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.columns.len()
    }

    pub fn dim_in(&self) -> usize {
        self.d
    }

    pub fn dim_out(&self) -> usize {
        self.m
    }

    pub fn ambient_dim(&self) -> usize {
        ambient_size(self.d, self.m, self.degree) as usize
    }

    pub fn is_equivariant(&self) -> bool {
        self.equivariant
    }

    pub fn columns(&self) -> &[SparseVec<F>] {
        &self.columns
    }

    /// Positions at which the basis restricts to the identity.
    pub fn positions(&self) -> &[usize] {
        &self.positions
    }

    pub fn column_cochain(&self, j: usize) -> Cochain<F> {
        Cochain::from_sparse(self.degree, self.d, self.m, &self.columns[j])
    }

    /// Dense basis matrix, one column per basis vector.
    pub fn to_matrix(&self) -> Matrix<F> {
        let mut out = Matrix::zeros(self.ambient_dim(), self.dim());
        for (j, col) in self.columns.iter().enumerate() {
            for (i, v) in col {
                out.set(*i, j, v.clone());
            }
        }
        out
    }

    /// `Σ_j coords[j] · column_j` as a dense ambient vector.
    pub fn combine(&self, coords: &[F]) -> Vec<F> {
        let mut out = vec![F::zero(); self.ambient_dim()];
        for (c, col) in coords.iter().zip(&self.columns) {
            if c.is_zero() {
                continue;
            }
            for (i, v) in col {
                out[*i].add_mul(c, v);
            }
        }
        out
    }

    pub fn combine_cochain(&self, coords: &[F]) -> Cochain<F> {
        Cochain {
            degree: self.degree,
            d: self.d,
            m: self.m,
            values: self.combine(coords),
        }
    }

    /// Coordinates of `v`, or `None` when `v` is outside the span.
    pub fn coordinates(&self, v: &[F]) -> Option<Vec<F>> {
        if v.len() != self.ambient_dim() {
            return None;
        }
        let coords: Vec<F> = self.positions.iter().map(|&p| v[p].clone()).collect();
        if self.combine(&coords) == v {
            Some(coords)
        } else {
            None
        }
    }

    /// Coordinates of a sparse vector, or `None` when it is outside the span.
    pub fn sparse_coordinates(&self, v: &[(usize, F)]) -> Option<Vec<F>> {
        let dense = crate::kernel::dense_from_sparse(v, self.ambient_dim());
        self.coordinates(&dense)
    }

    pub fn contains(&self, c: &Cochain<F>) -> bool {
        c.degree == self.degree && c.d == self.d && c.m == self.m && self.coordinates(&c.values).is_some()
    }

    /// Intersection with the fixed points of a group acting on the cochains.
    pub fn invariant_part(&self, action: &GroupAction<F>, module: &ModuleAction<F>) -> Self {
        let n = self.dim();
        let mut e = Echelon::new(n);
        for g in 0..action.order() {
            if g == action.identity_index() {
                continue;
            }
            // Column j of the block is coords(ρ(g) b_j) − e_j; collect rows.
            let mut rows: BTreeMap<usize, SparseVec<F>> = BTreeMap::new();
            let pos_index: HashMap<usize, usize> = self.positions.iter().enumerate().map(|(i, p)| (*p, i)).collect();
            for (j, col) in self.columns.iter().enumerate() {
                let image = act_on_sparse(action, module, g, self.degree, col);
                let mut entries: BTreeMap<usize, F> = BTreeMap::new();
                for (p, v) in &image {
                    if let Some(&i) = pos_index.get(p) {
                        entries.insert(i, v.clone());
                    }
                }
                *entries.entry(j).or_insert_with(F::zero) -= &F::one();
                for (i, v) in entries {
                    if !v.is_zero() {
                        rows.entry(i).or_default().push((j, v));
                    }
                }
            }
            for row in rows.values() {
                e.insert(row);
            }
        }
        let kernel = e.nullspace();
        let mut columns = Vec::with_capacity(kernel.len());
        let mut positions = Vec::with_capacity(kernel.len());
        for y in &kernel {
            let mut acc: BTreeMap<usize, F> = BTreeMap::new();
            for (j, c) in y {
                for (i, v) in &self.columns[*j] {
                    acc.entry(*i).or_insert_with(F::zero).add_mul(c, v);
                }
            }
            columns.push(acc.into_iter().filter(|(_, v)| !v.is_zero()).collect());
        }
        for j in e.free_columns() {
            positions.push(self.positions[j]);
        }
        CochainSpaceBasis {
            degree: self.degree,
            d: self.d,
            m: self.m,
            columns,
            positions,
            equivariant: true,
        }
    }
}

/// Canonical basis of the degree-`degree` cochains `T^{⊗k} → V` with
/// `dim T = d`, `dim V = m`.
///
/// The constraint system is block diagonal over (prefix, output) pairs, so
/// its reduced echelon kernel basis is the local kernel on the last three
/// slots copied into every block.
pub fn cochain_space_basis<F: Scalar>(
    d: usize,
    m: usize,
    degree: usize,
    caps: &Caps,
) -> Result<CochainSpaceBasis<F>, CohomologyError> {
    let size = check_caps(d, m, degree, caps)?;
    if degree == 1 {
        return Ok(CochainSpaceBasis {
            degree,
            d,
            m,
            columns: (0..size).map(|i| vec![(i, F::one())]).collect(),
            positions: (0..size).collect(),
            equivariant: false,
        });
    }
    let block = d * d * d;
    let mut e = Echelon::new(block);
    for r in local_constraint_rows::<F>(d) {
        e.insert(&r);
    }
    let local = e.nullspace();
    let local_free = e.free_columns();
    let prefixes = d.pow(degree as u32 - 3);
    let mut columns = Vec::with_capacity(prefixes * local.len() * m);
    let mut positions = Vec::with_capacity(columns.capacity());
    for p in 0..prefixes {
        for (v, f) in local.iter().zip(&local_free) {
            for l in 0..m {
                columns.push(v.iter().map(|(t, x)| ((p * block + t) * m + l, x.clone())).collect());
                positions.push((p * block + f) * m + l);
            }
        }
    }
    Ok(CochainSpaceBasis {
        degree,
        d,
        m,
        columns,
        positions,
        equivariant: false,
    })
}

/// The coboundary of a `(2n−1)`-cochain, evaluated term by term on every
/// basis `(2n+1)`-tuple.
///
/// With `x_1, ..., x_{2n+1}`:
///
/// ```text
/// δf = θ(x_{2n}, x_{2n+1}) f(x_1, ..., x_{2n−1})
///    − θ(x_{2n−1}, x_{2n+1}) f(x_1, ..., x_{2n−2}, x_{2n})
///    + Σ_{k=1}^{n} (−1)^{k+n} D(x_{2k−1}, x_{2k}) f(x_1, ..., x̂_{2k−1}, x̂_{2k}, ..., x_{2n+1})
///    + Σ_{k=1}^{n} Σ_{j=2k+1}^{2n+1} (−1)^{n+k+1}
///          f(x_1, ..., x̂_{2k−1}, x̂_{2k}, ..., [x_{2k−1} x_{2k} x_j], ..., x_{2n+1})
/// ```
///
/// where `θ(a, b) v` is the right action and `D(a, b) = θ(b, a) − θ(a, b)`.
pub fn apply_coboundary<F: Scalar>(module: &LtsModule<F>, f: &Cochain<F>) -> Result<Cochain<F>, CohomologyError> {
    let d = module.base().dim();
    let m = module.dim();
    check_degree(f.degree)?;
    if f.d != d || f.m != m {
        return Err(CohomologyError::ShapeMismatch(format!(
            "cochain {}→{} for a module {d}→{m}",
            f.d, f.m
        )));
    }
    let p = f.degree + 2;
    let n = (p - 1) / 2;
    let theta: Vec<Vec<(usize, usize, F)>> = (0..d * d)
        .map(|ab| {
            let (a, b) = (ab / d, ab % d);
            let mut ops = Vec::new();
            for v in 0..m {
                for o in 0..m {
                    let c = module.right().get(a, b, v, o);
                    if !c.is_zero() {
                        ops.push((v, o, c.clone()));
                    }
                }
            }
            ops
        })
        .collect();
    let dop: Vec<Vec<(usize, usize, F)>> = (0..d * d)
        .map(|ab| {
            let (a, b) = (ab / d, ab % d);
            let mut ops = Vec::new();
            for v in 0..m {
                for o in 0..m {
                    let c = module.right().get(b, a, v, o).clone() - module.right().get(a, b, v, o);
                    if !c.is_zero() {
                        ops.push((v, o, c));
                    }
                }
            }
            ops
        })
        .collect();
    let mu = module.base().mu().sparse_values();
    let sign = |e: usize| if e % 2 == 0 { F::one() } else { -F::one() };
    let total = d.pow(p as u32);
    let mut values = vec![F::zero(); total * m];
    values.par_chunks_mut(m).enumerate().for_each(|(t, out)| {
        let mut x = vec![0usize; p];
        let mut rest = t;
        for s in (0..p).rev() {
            x[s] = rest % d;
            rest /= d;
        }
        let flat = |args: &[usize]| args.iter().fold(0, |acc, a| acc * d + a) * m;
        let apply_op = |out: &mut [F], ops: &[(usize, usize, F)], args: &[usize], scale: &F| {
            let start = flat(args);
            let fv = &f.values[start..start + m];
            for (v, o, c) in ops {
                if !fv[*v].is_zero() {
                    out[*o].add_mul(&(c.clone() * scale), &fv[*v]);
                }
            }
        };
        let one = F::one();
        let minus_one = -F::one();
        // θ terms
        apply_op(out, &theta[x[p - 2] * d + x[p - 1]], &x[..p - 2], &one);
        let mut args: Vec<usize> = x[..p - 3].to_vec();
        args.push(x[p - 2]);
        apply_op(out, &theta[x[p - 3] * d + x[p - 1]], &args, &minus_one);
        for k in 1..=n {
            let (i1, i2) = (2 * k - 2, 2 * k - 1);
            let mut omitted: Vec<usize> = x[..i1].to_vec();
            omitted.extend_from_slice(&x[i2 + 1..]);
            apply_op(out, &dop[x[i1] * d + x[i2]], &omitted, &sign(k + n));
            let s4 = sign(n + k + 1);
            for j0 in 2 * k..p {
                // position of x_j within the omitted argument list
                let slot = j0 - 2;
                for (q, c) in &mu[(x[i1] * d + x[i2]) * d + x[j0]] {
                    let mut a = omitted.clone();
                    a[slot] = *q;
                    let start = flat(&a);
                    let coeff = c.clone() * &s4;
                    for (o, fv) in out.iter_mut().zip(&f.values[start..start + m]) {
                        if !fv.is_zero() {
                            o.add_mul(&coeff, fv);
                        }
                    }
                }
            }
        }
    });
    Ok(Cochain {
        degree: p,
        d,
        m,
        values,
    })
}

/// Matrix of the coboundary from `from` to `to` in their bases, built column
/// by column. Fails if an image leaves the target span.
pub fn coboundary_matrix<F: Scalar>(
    module: &LtsModule<F>,
    from: &CochainSpaceBasis<F>,
    to: &CochainSpaceBasis<F>,
) -> Result<Matrix<F>, CohomologyError> {
    if to.degree != from.degree + 2 {
        return Err(CohomologyError::ShapeMismatch(format!(
            "coboundary goes from degree {} to {}, not {}",
            from.degree,
            from.degree + 2,
            to.degree
        )));
    }
    let columns: Vec<Vec<F>> = (0..from.dim())
        .into_par_iter()
        .map(|j| {
            let image = apply_coboundary(module, &from.column_cochain(j))?;
            to.coordinates(&image.values).ok_or(CohomologyError::ImageEscapes(j))
        })
        .collect::<Result<_, _>>()?;
    let mut out = Matrix::zeros(to.dim(), from.dim());
    for (j, col) in columns.iter().enumerate() {
        for (i, v) in col.iter().enumerate() {
            if !v.is_zero() {
                out.set(i, j, v.clone());
            }
        }
    }
    Ok(out)
}

/// Dimensions and representatives of one cohomology group.
#[derive(Clone)]
pub struct CohomologyReport<F> {
    pub degree: usize,
    pub equivariant: bool,
    pub dim_cochains: usize,
    pub dim_cocycles: usize,
    pub dim_coboundaries: usize,
    pub dim_h: usize,
    pub representatives: Vec<Cochain<F>>,
}

impl<F: Scalar> fmt::Debug for CohomologyReport<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CohomologyReport")
            .field("degree", &self.degree)
            .field("equivariant", &self.equivariant)
            .field("dim_cochains", &self.dim_cochains)
            .field("dim_cocycles", &self.dim_cocycles)
            .field("dim_coboundaries", &self.dim_coboundaries)
            .field("dim_h", &self.dim_h)
            .field("representatives", &self.representatives)
            .finish()
    }
}

/// The Yamaguti complex of a module, optionally restricted to invariant
/// cochains. Bases and differentials are computed on demand and cached.
pub struct YamagutiComplex<F> {
    module: LtsModule<F>,
    group: Option<(GroupAction<F>, ModuleAction<F>)>,
    caps: Caps,
    bases: Mutex<HashMap<usize, Arc<CochainSpaceBasis<F>>>>,
    differentials: Mutex<HashMap<usize, Arc<Matrix<F>>>>,
}

impl<F: Scalar> YamagutiComplex<F> {
    pub fn new(module: LtsModule<F>, caps: Caps) -> Self {
        YamagutiComplex {
            module,
            group: None,
            caps,
            bases: Mutex::new(HashMap::new()),
            differentials: Mutex::new(HashMap::new()),
        }
    }

    /// The invariant subcomplex. The right action must be equivariant, since
    /// the coboundary is built from it.
    pub fn equivariant(
        module: LtsModule<F>,
        action: GroupAction<F>,
        module_action: ModuleAction<F>,
        caps: Caps,
    ) -> Result<Self, CohomologyError> {
        if action.order() > caps.max_group_order {
            return Err(GroupError::TooLarge {
                order: action.order(),
                cap: caps.max_group_order,
            }
            .into());
        }
        if module.base() != action.system() {
            return Err(CohomologyError::ShapeMismatch("module and group act on different systems".into()));
        }
        if !module_action.right_equivariant {
            return Err(CohomologyError::ModuleNotEquivariant("right action".into()));
        }
        Ok(YamagutiComplex {
            module,
            group: Some((action, module_action)),
            caps,
            bases: Mutex::new(HashMap::new()),
            differentials: Mutex::new(HashMap::new()),
        })
    }

    /// Self-coefficients, plain when `action` is `None`.
    pub fn self_coefficients(
        system: &LieTripleSystem<F>,
        action: Option<&GroupAction<F>>,
        caps: Caps,
    ) -> Result<Self, CohomologyError> {
        let module = LtsModule::self_module(system);
        match action {
            None => Ok(Self::new(module, caps)),
            Some(g) => Self::equivariant(module, g.clone(), ModuleAction::self_module(g), caps),
        }
    }

    pub fn module(&self) -> &LtsModule<F> {
        &self.module
    }

    pub fn caps(&self) -> &Caps {
        &self.caps
    }

    pub fn group(&self) -> Option<(&GroupAction<F>, &ModuleAction<F>)> {
        self.group.as_ref().map(|(a, b)| (a, b))
    }

    pub fn is_equivariant(&self) -> bool {
        self.group.is_some()
    }

    /// Basis of `C^k` (or `C^k_G`).
    pub fn basis(&self, degree: usize) -> Result<Arc<CochainSpaceBasis<F>>, CohomologyError> {
        if let Some(b) = self.bases.lock().expect("cache lock").get(&degree) {
            return Ok(b.clone());
        }
        let d = self.module.base().dim();
        let m = self.module.dim();
        let mut basis = cochain_space_basis(d, m, degree, &self.caps)?;
        if let Some((g, v)) = &self.group {
            basis = basis.invariant_part(g, v);
        }
        let basis = Arc::new(basis);
        self.bases.lock().expect("cache lock").insert(degree, basis.clone());
        Ok(basis)
    }

    /// Matrix of `δ^{from}` between the cached bases.
    pub fn differential(&self, from: usize) -> Result<Arc<Matrix<F>>, CohomologyError> {
        if let Some(mat) = self.differentials.lock().expect("cache lock").get(&from) {
            return Ok(mat.clone());
        }
        let src = self.basis(from)?;
        let dst = self.basis(from + 2)?;
        let mat = Arc::new(coboundary_matrix(&self.module, &src, &dst)?);
        self.differentials.lock().expect("cache lock").insert(from, mat.clone());
        Ok(mat)
    }

    pub fn apply(&self, f: &Cochain<F>) -> Result<Cochain<F>, CohomologyError> {
        apply_coboundary(&self.module, f)
    }

    /// Whether `δc = 0`; needs the next degree to be within the caps.
    pub fn is_cocycle(&self, c: &Cochain<F>) -> Result<bool, CohomologyError> {
        check_caps(self.module.base().dim(), self.module.dim(), c.degree + 2, &self.caps)?;
        Ok(self.apply(c)?.is_zero())
    }

    /// A preimage `x` with `δx = c` in the (invariant) cochains of degree
    /// `deg c − 2`, or `None` when `c` is not a coboundary there. Degree-1
    /// cochains have no incoming differential and are rejected.
    pub fn is_coboundary(&self, c: &Cochain<F>) -> Result<Option<Cochain<F>>, CohomologyError> {
        if c.degree < 3 {
            return Err(CohomologyError::InvalidDegree(c.degree));
        }
        let target = self.basis(c.degree)?;
        let Some(coords) = target.coordinates(&c.values) else {
            return Ok(None);
        };
        let mat = self.differential(c.degree - 2)?;
        let source = self.basis(c.degree - 2)?;
        let x = solve(&mat, &coords).expect("coordinates match the differential");
        Ok(x.map(|x| source.combine_cochain(&x)))
    }

    /// Cohomology at `degree`, with representatives when requested.
    pub fn cohomology(&self, degree: usize, representatives: bool) -> Result<CohomologyReport<F>, CohomologyError> {
        check_degree(degree)?;
        let d = self.module.base().dim();
        let m = self.module.dim();
        check_caps(d, m, degree + 2, &self.caps)?;
        let basis = self.basis(degree)?;
        let outgoing = self.differential(degree)?;
        let out_echelon = outgoing.echelon();
        let dim_cocycles = basis.dim() - out_echelon.rank();
        let incoming = if degree >= 3 { Some(self.differential(degree - 2)?) } else { None };
        let mut span = Echelon::new(basis.dim());
        if let Some(inc) = &incoming {
            for j in 0..inc.cols() {
                span.insert_dense(&inc.column(j));
            }
        }
        let dim_coboundaries = span.rank();
        let mut reps = Vec::new();
        if representatives {
            for z in out_echelon.nullspace() {
                if span.insert(&z) {
                    let dense = crate::kernel::dense_from_sparse(&z, basis.dim());
                    reps.push(basis.combine_cochain(&dense));
                }
            }
        }
        Ok(CohomologyReport {
            degree,
            equivariant: self.is_equivariant(),
            dim_cochains: basis.dim(),
            dim_cocycles,
            dim_coboundaries,
            dim_h: dim_cocycles - dim_coboundaries,
            representatives: reps,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lts::builders::{meson, skew_lts};
    use crate::scalar::Rational;

    type Q = Rational;

    fn meson_swap() -> GroupAction<Q> {
        GroupAction::new(
            meson(2).unwrap(),
            vec![
                ("0".into(), Matrix::identity(2)),
                ("1".into(), Matrix::from_i64_rows(&[&[0, 1], &[1, 0]])),
            ],
        )
        .unwrap()
    }

    #[test]
    fn meson_dimensions() {
        let t = meson::<Q>(2).unwrap();
        let plain = YamagutiComplex::self_coefficients(&t, None, Caps::default()).unwrap();
        assert_eq!(plain.basis(1).unwrap().dim(), 4);
        assert_eq!(plain.basis(3).unwrap().dim(), 4);
        let g = meson_swap();
        let eq = YamagutiComplex::self_coefficients(&t, Some(&g), Caps::default()).unwrap();
        assert_eq!(eq.basis(1).unwrap().dim(), 2);
        assert_eq!(eq.basis(3).unwrap().dim(), 2);
    }

    #[test]
    fn tiled_basis_matches_monolithic_elimination() {
        for (d, m, k) in [(2, 2, 3), (3, 1, 3), (2, 1, 5), (3, 2, 3)] {
            let tiled = cochain_space_basis::<Q>(d, m, k, &Caps::default()).unwrap();
            let n = tiled.ambient_dim();
            let mut e = Echelon::new(n);
            for r in constraint_rows::<Q>(d, m, k) {
                e.insert(&r);
            }
            assert_eq!(e.nullspace(), tiled.columns);
            assert_eq!(e.free_columns(), tiled.positions);
        }
    }

    #[test]
    fn identity_coboundary_is_twice_the_bracket() {
        let t = meson::<Q>(2).unwrap();
        let module = LtsModule::self_module(&t);
        let id = Cochain::from_matrix(&Matrix::identity(2));
        let image = apply_coboundary(&module, &id).unwrap();
        assert_eq!(image, Cochain::from_tensor(&t.mu().scale(&Q::from_i64(2))));
        let mu = Cochain::from_tensor(t.mu());
        assert!(apply_coboundary(&module, &mu).unwrap().is_zero());
    }

    #[test]
    fn delta_squared_vanishes_on_skew3() {
        let t = skew_lts::<Q>(3).unwrap();
        let c = YamagutiComplex::self_coefficients(&t, None, Caps::default()).unwrap();
        let d1 = c.differential(1).unwrap();
        let d3 = c.differential(3).unwrap();
        assert!(d3.mul(&d1).unwrap().is_zero());
    }

    #[test]
    fn abelian_degree_one() {
        let t = LieTripleSystem::<Q>::abelian(3);
        let c = YamagutiComplex::self_coefficients(&t, None, Caps::default()).unwrap();
        let r = c.cohomology(1, true).unwrap();
        assert_eq!((r.dim_cocycles, r.dim_coboundaries, r.dim_h), (9, 0, 9));
        assert_eq!(r.representatives.len(), 9);
    }

    #[test]
    fn caps_are_enforced() {
        let t = meson::<Q>(2).unwrap();
        let c = YamagutiComplex::self_coefficients(&t, None, Caps::default()).unwrap();
        assert!(matches!(c.basis(9), Err(CohomologyError::DegreeCap { .. })));
        assert!(c.cohomology(7, false).unwrap_err().is_cap());
        assert!(matches!(c.basis(2), Err(CohomologyError::InvalidDegree(2))));
        let small = Caps {
            max_ambient: 10,
            ..Caps::default()
        };
        let c = YamagutiComplex::self_coefficients(&t, None, small).unwrap();
        assert!(matches!(c.basis(3), Err(CohomologyError::AmbientCap { .. })));
    }

    #[test]
    fn coboundary_preimage() {
        let t = meson::<Q>(2).unwrap();
        let c = YamagutiComplex::self_coefficients(&t, Some(&meson_swap()), Caps::default()).unwrap();
        let psi = Cochain::from_matrix(&Matrix::from_i64_rows(&[&[2, 5], &[5, 2]]));
        let target = c.apply(&psi).unwrap();
        let pre = c.is_coboundary(&target).unwrap().expect("a coboundary");
        assert_eq!(c.apply(&pre).unwrap(), target);
        let zero = Cochain::zeros(3, 2, 2);
        assert!(c.is_coboundary(&zero).unwrap().unwrap().is_zero());
    }
}
