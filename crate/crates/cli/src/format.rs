//! Text and JSON renderings of vectors, cochains and witnesses.

use std::collections::BTreeMap;

use lts_core::{Cochain, Scalar};
use serde_json::{json, Value};

/// `2 g1 - 1/2 g3`, or `0`.
pub fn vector<F: Scalar>(names: &[String], v: &[F]) -> String {
    let mut out = String::new();
    for (name, c) in names.iter().zip(v) {
        if c.is_zero() {
            continue;
        }
        let text = c.to_string();
        let (negative, magnitude) = match text.strip_prefix('-') {
            Some(rest) => (true, rest.to_string()),
            None => (false, text),
        };
        if out.is_empty() {
            if negative {
                out.push('-');
            }
        } else {
            out.push_str(if negative { " - " } else { " + " });
        }
        if magnitude != "1" {
            out.push_str(&magnitude);
            out.push(' ');
        }
        out.push_str(name);
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

/// `(g1,g2,g1)`
pub fn tuple(names: &[String], args: &[usize]) -> String {
    let parts: Vec<&str> = args.iter().map(|&i| names[i].as_str()).collect();
    format!("({})", parts.join(","))
}

/// `{"l": "c"}` for the nonzero coordinates.
pub fn sparse_json<F: Scalar>(v: &[F]) -> Value {
    let map: BTreeMap<String, String> = v
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(l, c)| (l.to_string(), c.to_string()))
        .collect();
    json!(map)
}

pub fn dense_json<F: Scalar>(v: &[F]) -> Value {
    Value::Array(v.iter().map(|c| Value::String(c.to_string())).collect())
}

/// Basis tuples with a nonzero value, in lexicographic order.
pub fn cochain_support<F: Scalar>(c: &Cochain<F>) -> Vec<(Vec<usize>, Vec<F>)> {
    let d = c.dim_in();
    let m = c.dim_out();
    let k = c.degree();
    let mut out = Vec::new();
    for (p, chunk) in c.values().chunks(m.max(1)).enumerate() {
        if chunk.iter().all(F::is_zero) {
            continue;
        }
        let mut args = vec![0; k];
        let mut rest = p;
        for s in (0..k).rev() {
            args[s] = rest % d;
            rest /= d;
        }
        out.push((args, chunk.to_vec()));
    }
    out
}

/// One line per nonzero value, `f(g1,g2,g1) = g2`, indented by `indent`.
pub fn cochain_lines<F: Scalar>(names: &[String], symbol: &str, c: &Cochain<F>, indent: &str) -> Vec<String> {
    let support = cochain_support(c);
    if support.is_empty() {
        return vec![format!("{indent}{symbol} = 0")];
    }
    support
        .into_iter()
        .map(|(args, v)| format!("{indent}{symbol}{} = {}", tuple(names, &args), vector(names, &v)))
        .collect()
}

/// `[[args...], {"l": "c"}]` per nonzero value.
pub fn cochain_json<F: Scalar>(c: &Cochain<F>) -> Value {
    Value::Array(
        cochain_support(c)
            .into_iter()
            .map(|(args, v)| json!([args, sparse_json(&v)]))
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use lts_core::Rational;

    #[test]
    fn vectors_read_naturally() {
        let names: Vec<String> = ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
        let v = vec![Rational::new(-1, 1), Rational::new(1, 2), Rational::new(-3, 1)];
        assert_eq!(vector(&names, &v), "-a + 1/2 b - 3 c");
        assert_eq!(vector(&names, &[Rational::zero(), Rational::zero(), Rational::one()]), "c");
        assert_eq!(vector::<Rational>(&names, &vec![Rational::zero(); 3]), "0");
    }
}
