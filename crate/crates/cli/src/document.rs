//! JSON interchange documents.
//!
//! Coefficients are always strings (`"3/7"`, `"-1"`), never JSON numbers.
//! Trilinear maps use the sparse quadruple form `[i, j, k, {"l": "c"}]`
//! with omitted entries zero. [`to_canonical_json`] fixes one layout so that
//! serializing a parsed canonical document reproduces it byte for byte.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use lts_core::{FormalIsomorphism, LieTripleSystem, Matrix, Scalar, StructureTensor, TruncatedDeformation};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::CliError;

pub const SYSTEM_SCHEMA: &str = "lts-system/1";
pub const ACTION_SCHEMA: &str = "lts-action/1";
pub const DEFORMATION_SCHEMA: &str = "lts-deformation/1";
pub const ISOMORPHISM_SCHEMA: &str = "lts-isomorphism/1";

/// `[i, j, k, {l: coefficient}]`
#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
pub struct TensorEntry(pub usize, pub usize, pub usize, pub BTreeMap<usize, String>);

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct SystemDocument {
    pub schema: String,
    pub field: String,
    pub dim: usize,
    #[serde(rename = "basisNames")]
    pub basis_names: Vec<String>,
    pub bracket: Vec<TensorEntry>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct ElementDocument {
    pub label: String,
    pub matrix: Vec<Vec<String>>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct ActionDocument {
    pub schema: String,
    pub elements: Vec<ElementDocument>,
    /// Matrices of the same elements on the coefficient module, when it is
    /// acted on differently from the system.
    #[serde(rename = "moduleMatrices", default, skip_serializing_if = "Option::is_none")]
    pub module_matrices: Option<Vec<Vec<Vec<String>>>>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct TermDocument {
    pub order: usize,
    pub entries: Vec<TensorEntry>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct DeformationDocument {
    pub schema: String,
    /// Path of the system document, relative to this document.
    pub system: String,
    /// Path of the action document; absent means the trivial group.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub action: Option<String>,
    pub order: usize,
    /// Nonzero terms `μ_r`, `1 ≤ r ≤ order`, by increasing `r`.
    pub terms: Vec<TermDocument>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct MatrixTermDocument {
    pub order: usize,
    pub matrix: Vec<Vec<String>>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct IsomorphismDocument {
    pub schema: String,
    pub system: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub action: Option<String>,
    pub order: usize,
    /// Nonzero terms `ψ_k`, `k ≥ 1`; `ψ_0` is the identity.
    pub terms: Vec<MatrixTermDocument>,
}

/// Whether an array prints on one line: it holds only scalars, or only
/// arrays and objects of scalars.
fn is_flat(v: &Value) -> bool {
    let leaf = |x: &Value| !x.is_array() && !x.is_object();
    match v {
        Value::Array(items) => items.iter().all(|x| match x {
            Value::Array(inner) => inner.iter().all(leaf),
            Value::Object(inner) => inner.values().all(leaf),
            other => leaf(other),
        }),
        _ => true,
    }
}

fn write_value(v: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent + 1);
    match v {
        Value::Object(map) if !map.is_empty() => {
            out.push_str("{\n");
            for (i, (k, x)) in map.iter().enumerate() {
                out.push_str(&pad);
                out.push_str(&serde_json::to_string(k).expect("string key"));
                out.push_str(": ");
                write_value(x, indent + 1, out);
                if i + 1 < map.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            out.push_str(&"  ".repeat(indent));
            out.push('}');
        }
        Value::Array(items) if !items.is_empty() && !is_flat(v) => {
            out.push_str("[\n");
            for (i, x) in items.iter().enumerate() {
                out.push_str(&pad);
                write_value(x, indent + 1, out);
                if i + 1 < items.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            out.push_str(&"  ".repeat(indent));
            out.push(']');
        }
        other => out.push_str(&serde_json::to_string(other).expect("serializable value")),
    }
}

/// Canonical text: two-space indentation, keys in declaration order, flat
/// arrays on one line, trailing newline.
pub fn to_canonical_json<T: Serialize>(doc: &T) -> String {
    let value = serde_json::to_value(doc).expect("documents serialize");
    let mut out = String::new();
    write_value(&value, 0, &mut out);
    out.push('\n');
    out
}

pub fn parse_document<T: for<'de> Deserialize<'de>>(text: &str, what: &str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Parse(format!("{what}: {e}")))
}

pub fn read_document<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    parse_document(&text, &path.display().to_string())
}

/// Resolves a reference inside a document relative to the document's directory.
pub fn resolve(base: &Path, reference: &str) -> PathBuf {
    let r = Path::new(reference);
    if r.is_absolute() {
        r.to_path_buf()
    } else {
        base.parent().unwrap_or(Path::new(".")).join(r)
    }
}

fn check_schema(found: &str, expected: &str) -> Result<(), CliError> {
    if found != expected {
        return Err(CliError::Parse(format!("schema {found:?}, expected {expected:?}")));
    }
    Ok(())
}

fn coeff<F: Scalar>(s: &str) -> Result<F, CliError> {
    F::parse_coeff(s).map_err(|e| CliError::Parse(e.to_string()))
}

pub fn tensor_entries<F: Scalar>(t: &StructureTensor<F>) -> Vec<TensorEntry> {
    let d = t.dim_in();
    let mut out = Vec::new();
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                let coeffs: BTreeMap<usize, String> = t
                    .basis_value(i, j, k)
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| !v.is_zero())
                    .map(|(l, v)| (l, v.to_string()))
                    .collect();
                if !coeffs.is_empty() {
                    out.push(TensorEntry(i, j, k, coeffs));
                }
            }
        }
    }
    out
}

pub fn tensor_from_entries<F: Scalar>(d: usize, entries: &[TensorEntry]) -> Result<StructureTensor<F>, CliError> {
    let mut t = StructureTensor::zeros(d, d);
    let mut seen = std::collections::BTreeSet::new();
    for TensorEntry(i, j, k, coeffs) in entries {
        if *i >= d || *j >= d || *k >= d {
            return Err(CliError::Parse(format!("entry [{i}, {j}, {k}] out of range for dimension {d}")));
        }
        if !seen.insert((*i, *j, *k)) {
            return Err(CliError::Parse(format!("entry [{i}, {j}, {k}] appears twice")));
        }
        for (l, c) in coeffs {
            if *l >= d {
                return Err(CliError::Parse(format!("output index {l} out of range for dimension {d}")));
            }
            t.set(*i, *j, *k, *l, coeff(c)?);
        }
    }
    Ok(t)
}

fn matrix_strings<F: Scalar>(m: &Matrix<F>) -> Vec<Vec<String>> {
    (0..m.rows()).map(|i| m.row(i).iter().map(|x| x.to_string()).collect()).collect()
}

fn matrix_from_strings<F: Scalar>(rows: &[Vec<String>], n: usize, what: &str) -> Result<Matrix<F>, CliError> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(CliError::Parse(format!("{what} is not {n}x{n}")));
    }
    let parsed = rows
        .iter()
        .map(|r| r.iter().map(|s| coeff(s)).collect::<Result<Vec<F>, _>>())
        .collect::<Result<Vec<_>, _>>()?;
    Matrix::from_rows(parsed).map_err(|e| CliError::Parse(e.to_string()))
}

impl SystemDocument {
    pub fn from_system<F: Scalar>(t: &LieTripleSystem<F>) -> Self {
        SystemDocument {
            schema: SYSTEM_SCHEMA.into(),
            field: F::field_name(),
            dim: t.dim(),
            basis_names: t.basis_names().to_vec(),
            bracket: tensor_entries(t.mu()),
        }
    }

    /// Basis names and structure constants, before any axiom check.
    pub fn to_tensor<F: Scalar>(&self) -> Result<(Vec<String>, StructureTensor<F>), CliError> {
        check_schema(&self.schema, SYSTEM_SCHEMA)?;
        if self.basis_names.len() != self.dim {
            return Err(CliError::Parse(format!(
                "{} basis names for dimension {}",
                self.basis_names.len(),
                self.dim
            )));
        }
        Ok((self.basis_names.clone(), tensor_from_entries(self.dim, &self.bracket)?))
    }

    /// The validated system.
    pub fn to_system<F: Scalar>(&self) -> Result<LieTripleSystem<F>, CliError> {
        let (names, mu) = self.to_tensor()?;
        LieTripleSystem::new(names, mu).map_err(|e| CliError::Math(e.to_string()))
    }
}

impl ActionDocument {
    pub fn from_matrices<F: Scalar>(labels: &[String], matrices: &[Matrix<F>]) -> Self {
        ActionDocument {
            schema: ACTION_SCHEMA.into(),
            elements: labels
                .iter()
                .zip(matrices)
                .map(|(label, m)| ElementDocument {
                    label: label.clone(),
                    matrix: matrix_strings(m),
                })
                .collect(),
            module_matrices: None,
        }
    }

    /// Labelled element matrices and optional module matrices.
    #[allow(clippy::type_complexity)]
    pub fn to_matrices<F: Scalar>(
        &self,
        d: usize,
    ) -> Result<(Vec<(String, Matrix<F>)>, Option<Vec<Matrix<F>>>), CliError> {
        check_schema(&self.schema, ACTION_SCHEMA)?;
        let mut labels = std::collections::BTreeSet::new();
        let mut elements = Vec::new();
        for e in &self.elements {
            if !labels.insert(e.label.clone()) {
                return Err(CliError::Parse(format!("label {:?} appears twice", e.label)));
            }
            elements.push((e.label.clone(), matrix_from_strings(&e.matrix, d, &format!("element {}", e.label))?));
        }
        let module = match &self.module_matrices {
            None => None,
            Some(ms) => {
                if ms.len() != self.elements.len() {
                    return Err(CliError::Parse("one module matrix per element is required".into()));
                }
                let m = ms.first().map_or(0, Vec::len);
                Some(
                    ms.iter()
                        .map(|rows| matrix_from_strings(rows, m, "module matrix"))
                        .collect::<Result<Vec<_>, _>>()?,
                )
            }
        };
        Ok((elements, module))
    }
}

impl DeformationDocument {
    pub fn from_deformation<F: Scalar>(def: &TruncatedDeformation<F>, system: &str, action: Option<&str>) -> Self {
        DeformationDocument {
            schema: DEFORMATION_SCHEMA.into(),
            system: system.into(),
            action: action.map(Into::into),
            order: def.order(),
            terms: def
                .terms()
                .iter()
                .enumerate()
                .skip(1)
                .filter(|(_, t)| !t.is_zero())
                .map(|(r, t)| TermDocument {
                    order: r,
                    entries: tensor_entries(t),
                })
                .collect(),
        }
    }

    /// Terms `μ_1, ..., μ_order` (zeros filled in).
    pub fn to_terms<F: Scalar>(&self, d: usize) -> Result<Vec<StructureTensor<F>>, CliError> {
        check_schema(&self.schema, DEFORMATION_SCHEMA)?;
        let mut terms = vec![StructureTensor::zeros(d, d); self.order];
        let mut last = 0;
        for t in &self.terms {
            if t.order <= last || t.order > self.order {
                return Err(CliError::Parse(format!(
                    "term orders must increase strictly from 1 up to {}; got {}",
                    self.order, t.order
                )));
            }
            last = t.order;
            terms[t.order - 1] = tensor_from_entries(d, &t.entries)?;
        }
        Ok(terms)
    }
}

impl IsomorphismDocument {
    pub fn from_isomorphism<F: Scalar>(psi: &FormalIsomorphism<F>, system: &str, action: Option<&str>) -> Self {
        IsomorphismDocument {
            schema: ISOMORPHISM_SCHEMA.into(),
            system: system.into(),
            action: action.map(Into::into),
            order: psi.order(),
            terms: psi
                .terms()
                .iter()
                .enumerate()
                .skip(1)
                .filter(|(_, m)| !m.is_zero())
                .map(|(k, m)| MatrixTermDocument {
                    order: k,
                    matrix: matrix_strings(m),
                })
                .collect(),
        }
    }

    /// Terms `ψ_0 = Id, ψ_1, ..., ψ_order`.
    pub fn to_terms<F: Scalar>(&self, d: usize) -> Result<Vec<Matrix<F>>, CliError> {
        check_schema(&self.schema, ISOMORPHISM_SCHEMA)?;
        let mut terms = vec![Matrix::zeros(d, d); self.order + 1];
        terms[0] = Matrix::identity(d);
        let mut last = 0;
        for t in &self.terms {
            if t.order <= last || t.order > self.order {
                return Err(CliError::Parse(format!(
                    "term orders must increase strictly from 1 up to {}; got {}",
                    self.order, t.order
                )));
            }
            last = t.order;
            terms[t.order] = matrix_from_strings(&t.matrix, d, &format!("term {}", t.order))?;
        }
        Ok(terms)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_arrays_stay_on_one_line() {
        let doc = SystemDocument {
            schema: SYSTEM_SCHEMA.into(),
            field: "rational".into(),
            dim: 1,
            basis_names: vec!["x".into()],
            bracket: vec![TensorEntry(0, 0, 0, [(0, "1/2".to_string())].into_iter().collect())],
        };
        let text = to_canonical_json(&doc);
        assert!(text.contains("\"basisNames\": [\"x\"]"), "{text}");
        assert!(text.contains("[0,0,0,{\"0\":\"1/2\"}]"), "{text}");
        let back: SystemDocument = parse_document(&text, "test").unwrap();
        assert_eq!(back, doc);
        assert_eq!(to_canonical_json(&back), text);
    }
}
