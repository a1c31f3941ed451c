//! Command implementations, generic over the coefficient field.

use std::path::{Path, PathBuf};

use clap::Subcommand;
use lts_core::builders::{self, LieAlgebraConstants};
use lts_core::{
    check_deformation_equations, infinitesimal, make_deformation, verify_lts_with, Caps, DeformationContext,
    FormalIsomorphism, GroupAction, LieTripleSystem, LtsModule, Matrix, ModuleAction, Scalar, TruncatedDeformation,
    Verbosity, YamagutiComplex,
};
use serde_json::{json, Value};

use crate::document::{
    read_document, resolve, to_canonical_json, ActionDocument, DeformationDocument, IsomorphismDocument,
    SystemDocument,
};
use crate::format::{cochain_json, cochain_lines, dense_json, sparse_json, tuple, vector};
use crate::{Cli, CliError, Command, GlobalArgs, EXIT_MATH, EXIT_OK};

/// Primes accepted by `gf:<p>`. Each one is a separate instantiation of the
/// generic code, so the list is kept short.
pub const SUPPORTED_PRIMES: [u64; 30] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97, 101, 257, 65537,
    1_000_000_007, 2_147_483_647,
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldSpec {
    Rational,
    Prime(u64),
}

pub fn parse_field(s: &str) -> Result<FieldSpec, CliError> {
    if s == "rational" {
        return Ok(FieldSpec::Rational);
    }
    let p = s
        .strip_prefix("gf:")
        .and_then(|p| p.parse::<u64>().ok())
        .ok_or_else(|| CliError::Usage(format!("field {s:?} is neither \"rational\" nor \"gf:<p>\"")))?;
    if !SUPPORTED_PRIMES.contains(&p) {
        return Err(CliError::Usage(format!(
            "gf:{p} is not supported; supported primes are {SUPPORTED_PRIMES:?}"
        )));
    }
    Ok(FieldSpec::Prime(p))
}

macro_rules! with_field {
    ($spec:expr, $F:ident => $body:expr) => {
        match $spec {
            FieldSpec::Rational => {
                type $F = lts_core::Rational;
                $body
            }
            FieldSpec::Prime(p) => with_field!(@prime p, $F, $body,
                [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
                 101, 257, 65537, 1_000_000_007, 2_147_483_647])
        }
    };
    (@prime $p:ident, $F:ident, $body:expr, [$($q:literal),*]) => {
        match $p {
            $($q => {
                type $F = lts_core::Fp<$q>;
                $body
            })*
            other => Err(CliError::Usage(format!("gf:{other} is not supported"))),
        }
    };
}

/// Output of a command before rendering.
pub struct Report {
    pub code: i32,
    pub lines: Vec<String>,
    pub json: Value,
}

impl Report {
    fn new(code: i32, lines: Vec<String>, json: Value) -> Self {
        Report { code, lines, json }
    }

    pub fn render(&self, json: bool) -> String {
        if json {
            let mut v = self.json.clone();
            if let Value::Object(map) = &mut v {
                map.insert("exitCode".into(), json!(self.code));
            }
            format!("{}\n", serde_json::to_string_pretty(&v).expect("json"))
        } else {
            let mut s = self.lines.join("\n");
            s.push('\n');
            s
        }
    }
}

#[derive(Subcommand, Debug, Clone)]
pub enum BuildKind {
    /// Meson system `T_n`.
    Meson { n: usize },
    /// All `n x n` matrices.
    Matrix { n: usize },
    /// Skew-symmetric `n x n` matrices.
    Skew { n: usize },
    /// Symmetric `n x n` matrices.
    Sym { n: usize },
    /// Rectangular `p x q` matrices with `[xyz] = x y^T z + z y^T x - y x^T z - z x^T y`.
    Rect { p: usize, q: usize },
    /// `sl_2` as a Lie triple system.
    Sl2,
    /// `s` copies of the meson system `T_n`.
    FunctionMeson { n: usize, s: usize },
    /// The abelian system of dimension `n`.
    Abelian { n: usize },
    /// `{Id, -Id}` acting on a system of dimension `n`.
    SignAction { n: usize },
    /// The swap of `g1` and `g2` acting on the meson system `T_n`.
    SwapAction { n: usize },
    /// Transposition acting on square `p x p` matrices.
    TransposeAction { p: usize },
}

pub fn execute(cli: &Cli) -> Result<Report, CliError> {
    let g = &cli.global;
    match &cli.command {
        Command::Verify { system, action } => {
            with_field!(field_of_system(g, system)?, F => verify::<F>(g, system, action.as_deref()))
        }
        Command::Cohomology {
            system,
            degree,
            equivariant,
            representatives,
        } => {
            if *degree % 2 == 0 {
                return Err(CliError::Usage(format!(
                    "degree {degree} requested, but the complex has odd degrees only"
                )));
            }
            with_field!(field_of_system(g, system)?, F =>
                cohomology::<F>(g, system, *degree, equivariant.as_deref(), *representatives))
        }
        Command::DeformCheck { deformation, order } => {
            with_field!(field_of_deformation(g, deformation)?, F => deform_check::<F>(g, deformation, *order))
        }
        Command::DeformObstruct { deformation, out } => {
            with_field!(field_of_deformation(g, deformation)?, F =>
                deform_obstruct::<F>(g, deformation, out.as_deref(), false))
        }
        Command::DeformExtend { deformation, out } => {
            with_field!(field_of_deformation(g, deformation)?, F =>
                deform_obstruct::<F>(g, deformation, out.as_deref(), true))
        }
        Command::DeformEquiv { first, second, cap, out } => {
            with_field!(field_of_deformation(g, first)?, F =>
                deform_equiv::<F>(g, first, second, *cap, out.as_deref()))
        }
        Command::DeformTrivialize { deformation, cap, out } => {
            with_field!(field_of_deformation(g, deformation)?, F =>
                deform_trivialize::<F>(g, deformation, *cap, out.as_deref()))
        }
        Command::Rigidity { system, equivariant } => {
            with_field!(field_of_system(g, system)?, F => rigidity::<F>(g, system, equivariant.as_deref()))
        }
        Command::Build { kind, out } => {
            let spec = parse_field(g.field.as_deref().unwrap_or("rational"))?;
            with_field!(spec, F => build::<F>(kind, out.as_deref()))
        }
    }
}

fn field_of_system(g: &GlobalArgs, path: &Path) -> Result<FieldSpec, CliError> {
    match &g.field {
        Some(f) => parse_field(f),
        None => {
            let doc: SystemDocument = read_document(path)?;
            parse_field(&doc.field)
        }
    }
}

fn field_of_deformation(g: &GlobalArgs, path: &Path) -> Result<FieldSpec, CliError> {
    if let Some(f) = &g.field {
        return parse_field(f);
    }
    let doc: DeformationDocument = read_document(path)?;
    field_of_system(g, &resolve(path, &doc.system))
}

fn load_system<F: Scalar>(path: &Path) -> Result<LieTripleSystem<F>, CliError> {
    let doc: SystemDocument = read_document(path)?;
    doc.to_system()
}

fn load_action<F: Scalar>(
    system: &LieTripleSystem<F>,
    path: &Path,
    caps: &Caps,
) -> Result<(GroupAction<F>, Option<ModuleAction<F>>), CliError> {
    let doc: ActionDocument = read_document(path)?;
    let (elements, module) = doc.to_matrices::<F>(system.dim())?;
    let action = GroupAction::with_cap(system.clone(), elements, caps.max_group_order)?;
    let module = match module {
        None => None,
        Some(mats) => Some(ModuleAction::new(&action, &LtsModule::self_module(system), mats)?),
    };
    Ok((action, module))
}

struct DeformationInput<F> {
    system_path: PathBuf,
    action_path: Option<PathBuf>,
    def: TruncatedDeformation<F>,
}

fn load_deformation<F: Scalar>(path: &Path, caps: &Caps) -> Result<DeformationInput<F>, CliError> {
    let doc: DeformationDocument = read_document(path)?;
    let system_path = resolve(path, &doc.system);
    let system = load_system::<F>(&system_path)?;
    let action_path = doc.action.as_ref().map(|a| resolve(path, a));
    let action = match &action_path {
        Some(p) => load_action(&system, p, caps)?.0,
        None => GroupAction::trivial(system.clone()),
    };
    let mut terms = vec![system.mu().clone()];
    terms.extend(doc.to_terms::<F>(system.dim())?);
    let def = make_deformation(&action, terms)?;
    Ok(DeformationInput {
        system_path,
        action_path,
        def,
    })
}

/// A reference to `target` as seen from a document written to `out`; with
/// no output file the path is given relative to the working directory.
fn reference(target: &Path, out: Option<&Path>) -> Result<String, CliError> {
    let io = |e: std::io::Error| CliError::Io(e.to_string());
    let target = std::path::absolute(target).map_err(io)?;
    let base = match out {
        Some(o) => std::path::absolute(o).map_err(io)?.parent().map(Path::to_path_buf).unwrap_or_default(),
        None => std::env::current_dir().map_err(io)?,
    };
    let rel = pathdiff::diff_paths(&target, &base).unwrap_or(target);
    Ok(rel.to_string_lossy().replace('\\', "/"))
}

fn write_out(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn deformation_document<F: Scalar>(
    input: &DeformationInput<F>,
    def: &TruncatedDeformation<F>,
    out: Option<&Path>,
) -> Result<DeformationDocument, CliError> {
    let system = reference(&input.system_path, out)?;
    let action = input.action_path.as_deref().map(|a| reference(a, out)).transpose()?;
    Ok(DeformationDocument::from_deformation(def, &system, action.as_deref()))
}

fn matrix_text<F: Scalar>(m: &Matrix<F>) -> String {
    let rows: Vec<String> = (0..m.rows())
        .map(|i| {
            let cells: Vec<String> = m.row(i).iter().map(|x| x.to_string()).collect();
            format!("[{}]", cells.join(", "))
        })
        .collect();
    format!("[{}]", rows.join(", "))
}

fn matrix_json<F: Scalar>(m: &Matrix<F>) -> Value {
    Value::Array((0..m.rows()).map(|i| dense_json(m.row(i))).collect())
}

fn verify<F: Scalar>(g: &GlobalArgs, path: &Path, action_path: Option<&Path>) -> Result<Report, CliError> {
    let doc: SystemDocument = read_document(path)?;
    let (names, mu) = doc.to_tensor::<F>()?;
    let report = verify_lts_with(&mu, Verbosity::FirstPerAxiom).map_err(|e| CliError::Parse(e.to_string()))?;
    let mut lines = vec![format!("system {} (dimension {}, field {})", path.display(), mu.dim_in(), F::field_name())];
    let violations: Vec<Value> = report
        .violations
        .iter()
        .map(|v| {
            json!({
                "axiom": v.axiom,
                "witness": v.witness,
                "witnessNames": v.witness.iter().map(|&i| names[i].clone()).collect::<Vec<_>>(),
                "residual": sparse_json(&v.residual),
            })
        })
        .collect();
    if report.passed() {
        lines.push("axioms: LT1, LT2, LT3 hold on all basis tuples".into());
    }
    for v in &report.violations {
        lines.push(format!(
            "axiom {} fails at {}: residual {}",
            v.axiom,
            tuple(&names, &v.witness),
            vector(&names, &v.residual)
        ));
    }
    let mut out = json!({
        "command": "verify",
        "field": F::field_name(),
        "dim": mu.dim_in(),
        "axiomsPassed": report.passed(),
        "violations": violations,
    });
    let mut passed = report.passed();
    if let Some(ap) = action_path {
        if !passed {
            lines.push(format!("action {}: not checked, the system is invalid", ap.display()));
            out["action"] = json!({ "checked": false });
        } else {
            let system = LieTripleSystem::new_unchecked(names.clone(), mu)
                .map_err(|e| CliError::Math(e.to_string()))?;
            match load_action(&system, ap, &g.caps()) {
                Ok((action, module)) => {
                    lines.push(format!(
                        "action {}: group of order {} acting by bracket automorphisms",
                        ap.display(),
                        action.order()
                    ));
                    let mut a = json!({ "checked": true, "valid": true, "order": action.order(), "labels": action.labels() });
                    if let Some(m) = module {
                        let flags = json!({
                            "left": m.left_equivariant,
                            "right": m.right_equivariant,
                            "middle": m.middle_equivariant,
                        });
                        lines.push(format!(
                            "module matrices: representation; equivariant actions left {} right {} middle {}",
                            m.left_equivariant, m.right_equivariant, m.middle_equivariant
                        ));
                        if !m.fully_equivariant() {
                            passed = false;
                            a["valid"] = json!(false);
                        }
                        a["module"] = flags;
                    }
                    out["action"] = a;
                }
                Err(CliError::Math(msg)) => {
                    passed = false;
                    lines.push(format!("action {}: invalid: {msg}", ap.display()));
                    out["action"] = json!({ "checked": true, "valid": false, "error": msg });
                }
                Err(e) => return Err(e),
            }
        }
    }
    out["passed"] = json!(passed);
    lines.push(if passed { "result: valid".into() } else { "result: INVALID".into() });
    Ok(Report::new(if passed { EXIT_OK } else { EXIT_MATH }, lines, out))
}

fn complex_for<F: Scalar>(
    g: &GlobalArgs,
    system: &LieTripleSystem<F>,
    action_path: Option<&Path>,
) -> Result<YamagutiComplex<F>, CliError> {
    let caps = g.caps();
    match action_path {
        None => Ok(YamagutiComplex::self_coefficients(system, None, caps)?),
        Some(ap) => {
            let (action, module) = load_action(system, ap, &caps)?;
            let module = module.unwrap_or_else(|| ModuleAction::self_module(&action));
            Ok(YamagutiComplex::equivariant(LtsModule::self_module(system), action, module, caps)?)
        }
    }
}

fn cohomology<F: Scalar>(
    g: &GlobalArgs,
    path: &Path,
    degree: usize,
    action_path: Option<&Path>,
    representatives: bool,
) -> Result<Report, CliError> {
    let system = load_system::<F>(path)?;
    let names = system.basis_names().to_vec();
    let complex = complex_for(g, &system, action_path)?;
    let r = complex.cohomology(degree, representatives)?;
    let kind = match complex.group() {
        Some((a, _)) => format!("cochains invariant under a group of order {}", a.order()),
        None => "plain cochains".to_string(),
    };
    let mut lines = vec![
        format!("system {} (dimension {}, field {})", path.display(), system.dim(), F::field_name()),
        format!("degree {degree}, {kind}"),
        format!("dim C^{degree} = {}", r.dim_cochains),
        format!("dim Z^{degree} = {}", r.dim_cocycles),
        format!("dim B^{degree} = {}", r.dim_coboundaries),
        format!("dim H^{degree} = {}", r.dim_h),
    ];
    for (i, rep) in r.representatives.iter().enumerate() {
        lines.push(format!("representative {}:", i + 1));
        lines.extend(cochain_lines(&names, "f", rep, "  "));
    }
    let json = json!({
        "command": "cohomology",
        "field": F::field_name(),
        "degree": degree,
        "equivariant": r.equivariant,
        "dimC": r.dim_cochains,
        "dimZ": r.dim_cocycles,
        "dimB": r.dim_coboundaries,
        "dimH": r.dim_h,
        "representatives": r.representatives.iter().map(cochain_json).collect::<Vec<_>>(),
    });
    Ok(Report::new(EXIT_OK, lines, json))
}

fn at_order<F: Scalar>(def: &TruncatedDeformation<F>, order: usize) -> Result<TruncatedDeformation<F>, CliError> {
    if order >= def.order() {
        Ok(def.padded(order))
    } else {
        Ok(make_deformation(def.action(), def.terms()[..=order].to_vec())?)
    }
}

fn deform_check<F: Scalar>(g: &GlobalArgs, path: &Path, order: Option<usize>) -> Result<Report, CliError> {
    let input = load_deformation::<F>(path, &g.caps())?;
    let def = match order {
        Some(n) => at_order(&input.def, n)?,
        None => input.def.clone(),
    };
    let names = def.system().basis_names().to_vec();
    let report = check_deformation_equations(&def);
    let mut lines = vec![format!(
        "deformation {} read at order {} (group order {})",
        path.display(),
        def.order(),
        def.action().order()
    )];
    let mut residuals = Vec::new();
    for r in report.residuals.iter().take(def.order() + 1) {
        match &r.witness {
            None => lines.push(format!("order {}: equation holds", r.order)),
            Some((args, v)) => lines.push(format!(
                "order {}: fails at {}: residual {}",
                r.order,
                tuple(&names, args),
                vector(&names, v)
            )),
        }
        residuals.push(json!({
            "order": r.order,
            "vanishes": r.vanishes,
            "witness": r.witness.as_ref().map(|(a, _)| a.to_vec()),
            "residual": r.witness.as_ref().map(|(_, v)| sparse_json(v)),
        }));
    }
    let passed = report.passed();
    lines.push(if passed {
        format!("result: pass through order {}", def.order())
    } else {
        format!("result: FAIL at order {}", report.first_failure().map_or(0, |r| r.order))
    });
    if passed && report.exact() {
        lines.push("the equations hold at every power of t".into());
    }
    let json = json!({
        "command": "deform-check",
        "order": def.order(),
        "passed": passed,
        "exact": report.exact(),
        "residuals": residuals,
    });
    Ok(Report::new(if passed { EXIT_OK } else { EXIT_MATH }, lines, json))
}

fn require_equations<F: Scalar>(def: &TruncatedDeformation<F>, what: &Path) -> Result<(), CliError> {
    let report = check_deformation_equations(def);
    match report.first_failure() {
        None => Ok(()),
        Some(r) => Err(CliError::Math(format!(
            "{} fails the deformation equation at order {}",
            what.display(),
            r.order
        ))),
    }
}

fn deform_obstruct<F: Scalar>(g: &GlobalArgs, path: &Path, out: Option<&Path>, extend: bool) -> Result<Report, CliError> {
    let input = load_deformation::<F>(path, &g.caps())?;
    let def = &input.def;
    require_equations(def, path)?;
    let names = def.system().basis_names().to_vec();
    let ctx = DeformationContext::new(def.action(), g.caps())?;
    let obs = ctx.obstruction(def)?;
    let n1 = obs.order;
    let mut lines = vec![format!(
        "deformation {} of order {} (group order {})",
        path.display(),
        def.order(),
        def.action().order()
    )];
    lines.push(format!("obstruction F_{n1}:"));
    lines.extend(cochain_lines(&names, "F", &obs.cochain, "  "));
    lines.push(format!("invariant under the group: {}", obs.invariant));
    lines.push(match obs.is_cocycle {
        Some(b) => format!("cocycle: {b}"),
        None => "cocycle: not checked, the next degree exceeds the caps".into(),
    });
    let extendable = obs.preimage.is_some();
    lines.push(if extendable {
        format!("equivariant coboundary: true, extendable to order {n1}")
    } else {
        "equivariant coboundary: false, not extendable".into()
    });
    let mut json = json!({
        "command": if extend { "deform-extend" } else { "deform-obstruct" },
        "order": def.order(),
        "obstructionOrder": n1,
        "obstruction": cochain_json(&obs.cochain),
        "obstructionZero": obs.cochain.is_zero(),
        "invariant": obs.invariant,
        "cocycle": obs.is_cocycle,
        "extendable": extendable,
    });
    if let Some(pre) = &obs.preimage {
        let mut terms = def.terms().to_vec();
        terms.push(pre.to_tensor());
        let extended = make_deformation(def.action(), terms)?;
        if !check_deformation_equations(&extended).passed() {
            return Err(CliError::Math("extended deformation fails its equations".into()));
        }
        lines.push(format!("new term mu_{n1}:"));
        lines.extend(cochain_lines(&names, "mu", pre, "  "));
        let doc = deformation_document(&input, &extended, out)?;
        let text = to_canonical_json(&doc);
        match out {
            Some(o) => {
                write_out(o, &text)?;
                lines.push(format!("wrote order-{n1} deformation to {}", o.display()));
                json["written"] = json!(o.display().to_string());
            }
            None if extend => lines.push(text.trim_end().to_string()),
            None => {}
        }
        json["document"] = serde_json::to_value(&doc).expect("json");
    }
    let code = if extend && !extendable { EXIT_MATH } else { EXIT_OK };
    Ok(Report::new(code, lines, json))
}

fn same_base<F: Scalar>(a: &TruncatedDeformation<F>, b: &TruncatedDeformation<F>) -> bool {
    a.system() == b.system() && a.action().matrices() == b.action().matrices()
}

fn isomorphism_lines<F: Scalar>(psi: &FormalIsomorphism<F>) -> Vec<String> {
    let mut lines = Vec::new();
    for (k, m) in psi.terms().iter().enumerate().skip(1) {
        if !m.is_zero() {
            lines.push(format!("  psi_{k} = {}", matrix_text(m)));
        }
    }
    if lines.is_empty() {
        lines.push("  Psi = Id".into());
    }
    lines
}

fn isomorphism_json<F: Scalar>(psi: &FormalIsomorphism<F>) -> Value {
    Value::Array(
        psi.terms()
            .iter()
            .enumerate()
            .skip(1)
            .filter(|(_, m)| !m.is_zero())
            .map(|(k, m)| json!({ "order": k, "matrix": matrix_json(m) }))
            .collect(),
    )
}

fn write_isomorphism<F: Scalar>(
    input: &DeformationInput<F>,
    psi: &FormalIsomorphism<F>,
    out: &Path,
    lines: &mut Vec<String>,
) -> Result<(), CliError> {
    let system = reference(&input.system_path, Some(out))?;
    let action = input.action_path.as_deref().map(|a| reference(a, Some(out))).transpose()?;
    let doc = IsomorphismDocument::from_isomorphism(psi, &system, action.as_deref());
    write_out(out, &to_canonical_json(&doc))?;
    lines.push(format!("wrote isomorphism to {}", out.display()));
    Ok(())
}

fn deform_equiv<F: Scalar>(
    g: &GlobalArgs,
    first: &Path,
    second: &Path,
    cap: Option<usize>,
    out: Option<&Path>,
) -> Result<Report, CliError> {
    let a = load_deformation::<F>(first, &g.caps())?;
    let b = load_deformation::<F>(second, &g.caps())?;
    if !same_base(&a.def, &b.def) {
        return Err(CliError::Parse("the two deformations refer to different systems or actions".into()));
    }
    let cap = cap.unwrap_or(a.def.order().max(b.def.order()));
    let da = at_order(&a.def, cap)?;
    let db = at_order(&b.def, cap)?;
    require_equations(&da, first)?;
    require_equations(&db, second)?;
    let names = da.system().basis_names().to_vec();
    let ctx = DeformationContext::new(da.action(), g.caps())?;
    let result = ctx.check_equivalence(&da, &db, cap)?;
    let mut lines = vec![format!(
        "equivalence of {} and {} through order {cap} (group order {})",
        first.display(),
        second.display(),
        da.action().order()
    )];
    let mut json = json!({
        "command": "deform-equiv",
        "cap": cap,
        "equivalent": result.isomorphism.is_some(),
    });
    match &result.isomorphism {
        Some(psi) => {
            lines.push(format!(
                "equivalent: each order's difference is an equivariant coboundary, giving Psi = Id + sum psi_k t^k with"
            ));
            lines.extend(isomorphism_lines(psi));
            json["isomorphism"] = isomorphism_json(psi);
            if let Some(o) = out {
                write_isomorphism(&a, psi, o, &mut lines)?;
            }
            Ok(Report::new(EXIT_OK, lines, json))
        }
        None => {
            let k = result.obstructed_order.unwrap_or(0);
            lines.push(format!(
                "not equivalent through order {cap}: at order {k} the difference of the transported terms is a cocycle whose class in H^3_G is nonzero"
            ));
            if let Some(w) = &result.class_witness {
                lines.extend(cochain_lines(&names, "c", w, "  "));
                json["classWitness"] = cochain_json(w);
            }
            if let Some(p) = result.plain_solvable {
                lines.push(format!("a non-equivariant psi_{k} exists: {p}"));
                json["plainSolvable"] = json!(p);
            }
            json["obstructedOrder"] = json!(k);
            Ok(Report::new(EXIT_MATH, lines, json))
        }
    }
}

fn deform_trivialize<F: Scalar>(
    g: &GlobalArgs,
    path: &Path,
    cap: Option<usize>,
    out: Option<&Path>,
) -> Result<Report, CliError> {
    let input = load_deformation::<F>(path, &g.caps())?;
    let cap = cap.unwrap_or(input.def.order());
    let def = at_order(&input.def, cap)?;
    require_equations(&def, path)?;
    let names = def.system().basis_names().to_vec();
    let ctx = DeformationContext::new(def.action(), g.caps())?;
    let result = ctx.trivialize(&def, cap)?;
    let mut lines = vec![format!("gauge reduction of {} through order {cap}", path.display())];
    lines.extend(result.log.iter().map(|s| s.to_string()));
    lines.push("accumulated isomorphism:".into());
    lines.extend(isomorphism_lines(&result.isomorphism));
    if !result.trivial {
        if let Some((n, mu)) = infinitesimal(&result.deformation) {
            lines.push(format!("remaining infinitesimal mu_{n}:"));
            lines.extend(cochain_lines(&names, "mu", &mu, "  "));
        }
    }
    if let Some(o) = out {
        write_isomorphism(&input, &result.isomorphism, o, &mut lines)?;
    }
    let json = json!({
        "command": "deform-trivialize",
        "cap": cap,
        "trivial": result.trivial,
        "log": result.log.iter().map(|s| s.to_string()).collect::<Vec<_>>(),
        "isomorphism": isomorphism_json(&result.isomorphism),
        "remaining": infinitesimal(&result.deformation).map(|(n, mu)| json!({ "order": n, "term": cochain_json(&mu) })),
    });
    Ok(Report::new(if result.trivial { EXIT_OK } else { EXIT_MATH }, lines, json))
}

fn rigidity<F: Scalar>(g: &GlobalArgs, path: &Path, action_path: Option<&Path>) -> Result<Report, CliError> {
    let system = load_system::<F>(path)?;
    let action = match action_path {
        Some(ap) => load_action(&system, ap, &g.caps())?.0,
        None => GroupAction::trivial(system.clone()),
    };
    let ctx = DeformationContext::new(&action, g.caps())?;
    let cert = ctx.rigidity_certificate()?;
    let lines = vec![
        format!("system {} with a group of order {}", path.display(), action.order()),
        format!("dim C^3_G = {}, dim H^3_G = {}", cert.dim_c3, cert.dim_h3),
        cert.to_string(),
    ];
    let json = json!({
        "command": "rigidity",
        "groupOrder": action.order(),
        "dimC3": cert.dim_c3,
        "dimH3": cert.dim_h3,
        "rigid": cert.rigid,
    });
    Ok(Report::new(EXIT_OK, lines, json))
}

fn sign_action<F: Scalar>(n: usize) -> ActionDocument {
    ActionDocument::from_matrices::<F>(
        &["e".into(), "s".into()],
        &[Matrix::identity(n), Matrix::identity(n).scale(&(-F::one()))],
    )
}

fn swap_action<F: Scalar>(n: usize) -> Result<ActionDocument, CliError> {
    if n < 2 {
        return Err(CliError::Usage("the swap needs n >= 2".into()));
    }
    let mut s = Matrix::identity(n);
    s.set(0, 0, F::zero());
    s.set(1, 1, F::zero());
    s.set(0, 1, F::one());
    s.set(1, 0, F::one());
    Ok(ActionDocument::from_matrices::<F>(&["e".into(), "s".into()], &[Matrix::identity(n), s]))
}

/// The document text for a standard example.
pub fn build_text<F: Scalar>(kind: &BuildKind) -> Result<String, CliError> {
    let math = |e: lts_core::LtsError| CliError::Usage(e.to_string());
    let system = |t: LieTripleSystem<F>| to_canonical_json(&SystemDocument::from_system(&t));
    Ok(match kind {
        BuildKind::Meson { n } => system(builders::meson(*n).map_err(math)?),
        BuildKind::Matrix { n } => system(builders::matrix_lts(*n).map_err(math)?),
        BuildKind::Skew { n } => system(builders::skew_lts(*n).map_err(math)?),
        BuildKind::Sym { n } => system(builders::sym_lts(*n).map_err(math)?),
        BuildKind::Rect { p, q } => system(builders::rect_lts(*p, *q).map_err(math)?),
        BuildKind::Sl2 => system(builders::from_lie_algebra(&LieAlgebraConstants::sl2()).map_err(math)?),
        BuildKind::FunctionMeson { n, s } => {
            system(builders::function_lts(&builders::meson(*n).map_err(math)?, *s).map_err(math)?)
        }
        BuildKind::Abelian { n } => system(LieTripleSystem::abelian(*n)),
        BuildKind::SignAction { n } => to_canonical_json(&sign_action::<F>(*n)),
        BuildKind::SwapAction { n } => to_canonical_json(&swap_action::<F>(*n)?),
        BuildKind::TransposeAction { p } => {
            let a = lts_core::group::transpose_action_on_rect::<F>(*p)?;
            to_canonical_json(&ActionDocument::from_matrices(a.labels(), a.matrices()))
        }
    })
}

fn build<F: Scalar>(kind: &BuildKind, out: Option<&Path>) -> Result<Report, CliError> {
    let text = build_text::<F>(kind)?;
    match out {
        Some(o) => {
            write_out(o, &text)?;
            Ok(Report::new(
                EXIT_OK,
                vec![format!("wrote {}", o.display())],
                json!({ "command": "build", "written": o.display().to_string() }),
            ))
        }
        None => {
            let value: Value = serde_json::from_str(&text).expect("canonical documents parse");
            Ok(Report::new(
                EXIT_OK,
                vec![text.trim_end().to_string()],
                json!({ "command": "build", "document": value }),
            ))
        }
    }
}
