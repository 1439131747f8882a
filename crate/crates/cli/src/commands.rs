//! Command implementations. Each fills a [`Report`]; nothing is printed here.

use std::fs;
use std::path::Path;

use quantclass_core::decompose::{
    distinguishing_system, encode_nary, decode_nary, inj_decompose, inj_reconstruct, monadic_core,
    monadic_extraction, monadic_reconstruct, verify_ac_support, verify_system, ExtractionCase, Reduction,
};
use quantclass_core::family::FamilySpec;
use quantclass_core::invariants::{lambda0, lambda0_prime, lambda1, nu_ge};
use quantclass_core::logic::{
    check_definable, check_expressibility, check_interpretation, compose_interpretations, defined_relation,
    eval_formula, format_formula, parse_formula, search_interpretation, verify_certificate, Certificate, Formula,
    Model, Outcome, SearchBounds, SearchOutcome,
};
use quantclass_core::relation::for_each_tuple;
use quantclass_core::{Budget, ElemSet, Error, QuantifierFamily, Relation, Universe};
use serde_json::{json, Value};

use crate::cli::{Command, Context, FormulaArgs, InterpArgs, Kind, RelArgs};
use crate::error::{locate, CliError};
use crate::relfile::{RelationFile, Structure};
use crate::report::{self, digest, Report};

type Result<T> = std::result::Result<T, CliError>;

fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn load_file(path: &Path, rep: &mut Report) -> Result<RelationFile> {
    let bytes = read(path)?;
    rep.input("file", &bytes);
    let text = String::from_utf8(bytes).map_err(|_| CliError::Io(format!("{}: not UTF-8", path.display())))?;
    let parsed = RelationFile::parse(&text).map_err(|e| e.in_file(&path.display().to_string()))?;
    rep.warnings.extend(parsed.warnings);
    Ok(parsed.file)
}

fn load_relation(args: &RelArgs, rep: &mut Report) -> Result<(RelationFile, Relation)> {
    let file = load_file(&args.file, rep)?;
    let r = file.relation(&args.rel)?;
    rep.flag("rel", args.rel.as_str());
    Ok((file, r))
}

/// The universe and parameters given by `FILE`, `--universe` and `--family`.
fn load_context(c: &Context, rep: &mut Report) -> Result<Model> {
    let mut model = match &c.file {
        Some(p) => load_file(p, rep)?.model()?,
        None => match c.universe {
            Some(n) => Model::new(Universe::new(n)?),
            None => return Err(CliError::Usage("give a relation file or --universe".into())),
        },
    };
    if let Some(n) = c.universe {
        if n != model.universe.size() {
            return Err(CliError::Usage(format!(
                "--universe {n} disagrees with the file's universe {}",
                model.universe.size()
            )));
        }
    }
    rep.flag("universe", model.universe.size());
    let mut named = serde_json::Map::new();
    for f in &c.families {
        let (name, spec) =
            f.split_once('=').ok_or_else(|| CliError::Usage(format!("`{f}` is not of the form NAME=SPEC")))?;
        let k = family(spec, &model)?;
        named.insert(name.into(), json!(spec));
        model = model.with_family(name, k);
    }
    if !named.is_empty() {
        rep.flag("families", Value::Object(named));
    }
    Ok(model)
}

fn family(spec: &str, model: &Model) -> Result<QuantifierFamily> {
    let s = FamilySpec::parse(spec).map_err(|e| match e {
        Error::Parse { message, .. } => CliError::Usage(format!("family `{spec}`: {message}")),
        e => e.into(),
    })?;
    Ok(s.resolve(&|name| model.relations.get(name).cloned())?)
}

fn load_formula(path: &Option<std::path::PathBuf>, text: &Option<String>, key: &str, rep: &mut Report) -> Result<Formula> {
    let (source, label) = match (path, text) {
        (Some(p), _) => {
            let bytes = read(p)?;
            let s = String::from_utf8(bytes).map_err(|_| CliError::Io(format!("{}: not UTF-8", p.display())))?;
            (s, p.display().to_string())
        }
        (None, Some(t)) => (t.clone(), format!("--{key}")),
        (None, None) => return Err(CliError::Usage(format!("a formula is required for `{key}`"))),
    };
    rep.input(key, source.as_bytes());
    let f = parse_formula(&source).map_err(|e| locate(&source, e).in_file(&label))?;
    rep.flag(key, format_formula(&f));
    Ok(f)
}

fn formula(args: &FormulaArgs, rep: &mut Report) -> Result<Formula> {
    load_formula(&args.phi, &args.formula, "formula", rep)
}

fn default_vars(vars: &[String], n: usize) -> Vec<String> {
    if vars.is_empty() {
        (0..n).map(|i| format!("x{i}")).collect()
    } else {
        vars.to_vec()
    }
}

/// Whether `pred(t) == r(t)` on every tuple, or the first disagreement.
fn agreement(r: &Relation, budget: &Budget, pred: impl Fn(&[u32]) -> bool) -> Result<Value> {
    let n = r.universe().size();
    budget.check_work("tuple agreement check", (n as u128).saturating_pow(r.arity() as u32))?;
    let mut bad = None;
    for_each_tuple(n, r.arity(), |t| {
        if pred(t) != r.contains(t) {
            bad = Some(t.to_vec());
            return true;
        }
        false
    });
    Ok(match bad {
        None => json!({ "agrees": true }),
        Some(t) => json!({ "agrees": false, "first_difference": t }),
    })
}

fn invariants(args: &RelArgs, b: &Budget, rep: &mut Report) -> Result<()> {
    let (file, r) = load_relation(args, rep)?;
    let l0p = lambda0_prime(&r, b)?;
    let l0 = lambda0(&r, b)?;
    let l1 = lambda1(&r, b)?;
    rep.set("relation", json!({ "universe": r.universe().size(), "arity": r.arity(), "size": r.len() }));
    rep.set(
        "lambda0_prime",
        json!({
            "value": l0p.value,
            "lower": l0p.lower,
            "exact": l0p.exact,
            "witness": report::set(&l0p.witness.set),
            "verified": l0p.witness.verified,
        }),
    );
    rep.set("lambda0", l0);
    rep.set(
        "lambda1",
        json!({ "value": l1.value, "exact": l1.exact, "witness": report::set(&l1.witness.set), "types": l1.witness.count }),
    );
    if let Some(Structure::Eq(e)) = file.get(&args.rel) {
        rep.set("equivalence", json!({ "classes": e.num_classes(), "nu_ge_2": nu_ge(e, 2) }));
    }
    Ok(())
}

fn decompose(args: &RelArgs, kind: Kind, b: &Budget, rep: &mut Report) -> Result<()> {
    let (_, r) = load_relation(args, rep)?;
    let n = r.arity();
    match kind {
        Kind::Mon => {
            rep.flag("kind", "mon");
            let core = monadic_core(&r, b)?;
            let l0p = core.support.len();
            let dom = core.r1.domain().len();
            rep.set("support", report::set(&core.support));
            rep.set("lambda0_prime", l0p);
            rep.set("d", json!(core.d));
            rep.set("whole", core.whole);
            rep.set("r1", report::relation(&core.r1));
            rep.set("r1_domain", json!({ "size": dom, "bound": l0p + n, "within_bound": dom <= l0p + n }));
            rep.set("reconstruction", agreement(&r, b, |t| monadic_reconstruct(&core, t))?);
        }
        Kind::Inj => {
            rep.flag("kind", "inj");
            let core = inj_decompose(&r, b)?;
            let check = verify_ac_support(&r, &core.support, b)?;
            let l = &core.support;
            rep.set("lambda1", json!({ "value": l.lambda1, "exact": l.lambda1_exact }));
            rep.set("a", report::set(&l.a));
            rep.set("levels", json!(l.levels.iter().map(report::set).collect::<Vec<_>>()));
            rep.set("c", json!(l.c.iter().map(report::set).collect::<Vec<_>>()));
            rep.set("classes", json!(l.classes));
            rep.set(
                "clauses",
                json!({
                    "size_bound": check.size_bound,
                    "factor": check.factor_violation.is_none(),
                    "factor_violation": check.factor_violation,
                    "class_bound": check.class_bound,
                    "c_bound": check.c_bound,
                    "all": check.ok(),
                }),
            );
            rep.set("a1", report::set(&core.a1));
            rep.set("r1", report::relation(&core.r1));
            let dom = core.r1.domain().len();
            rep.set(
                "r1_domain",
                json!({ "size": dom, "bound": n * n * l.lambda1, "within_bound": core.domain_bound }),
            );
            rep.set("reconstruction", agreement(&r, b, |t| inj_reconstruct(&core, t))?);
        }
        Kind::System => {
            rep.flag("kind", "system");
            let s = distinguishing_system(&r, b)?;
            let triples: Vec<Value> = s
                .triples
                .iter()
                .map(|t| json!({ "a": t.a, "b": t.b, "c": t.c, "pattern": t.pattern }))
                .collect();
            rep.set("a", report::set(&s.a));
            rep.set("level", s.level);
            rep.set("triples", triples);
            rep.set("count", s.triples.len());
            rep.set("stated_bound", s.stated_bound);
            rep.set("proved_bound", s.proved_bound);
            rep.set("meets_stated_bound", s.meets_stated_bound());
            rep.set("exact_bounds", s.exact_bounds);
            rep.set("rematched", s.rematched);
            rep.set("steps", s.steps.len());
            rep.set("verification", json!(verify_system(&r, &s.a, &s.triples)));
        }
    }
    Ok(())
}

fn case(c: &ExtractionCase) -> Value {
    match c {
        ExtractionCase::Unary { complement } => json!({ "kind": "unary", "complement": complement }),
        ExtractionCase::PhiStar => json!({ "kind": "phi_star" }),
        ExtractionCase::Reduced { reduction, lambda0, inner } => {
            let red = match reduction {
                Reduction::Identify { keep, drop } => json!({ "identify": [keep, drop] }),
                Reduction::Constant { place, value } => json!({ "constant": { "place": place, "value": value } }),
            };
            json!({ "kind": "reduced", "reduction": red, "lambda0": lambda0, "inner": case(inner) })
        }
        ExtractionCase::Distinguishing { j, lambda0_prime_psi, pattern } => json!({
            "kind": "distinguishing",
            "j": j,
            "lambda0_prime_psi": lambda0_prime_psi,
            "pattern": pattern,
        }),
    }
}

fn extract(args: &RelArgs, b: &Budget, rep: &mut Report) -> Result<()> {
    let (_, r) = load_relation(args, rep)?;
    let e = monadic_extraction(&r, b)?;
    let again = e.definition.evaluate(b)?;
    rep.set("set", report::set(&e.set));
    rep.set("size", e.set.len());
    rep.set("lambda0", e.target);
    rep.set("lambda0_prime", e.lambda0_prime);
    rep.set("case", case(&e.case));
    rep.set("var", e.definition.var.as_str());
    rep.set("formula", format_formula(&e.definition.formula));
    rep.set(
        "copies",
        e.definition
            .copies
            .iter()
            .map(|(name, p)| json!({ "name": name, "permutation": report::permutation(p) }))
            .collect::<Vec<_>>(),
    );
    rep.set("reevaluated", again == e.set);
    Ok(())
}

fn parse_set(text: &str, u: Universe) -> Result<ElemSet> {
    let mut s = ElemSet::new();
    for w in text.split(',').map(str::trim).filter(|w| !w.is_empty()) {
        let x: u32 = w.parse().map_err(|_| CliError::Usage(format!("`{w}` is not an element")))?;
        u.check(x)?;
        s.insert(x);
    }
    Ok(s)
}

fn encode(args: &RelArgs, set: &str, emit: Option<&Path>, b: &Budget, rep: &mut Report) -> Result<()> {
    let (_, r) = load_relation(args, rep)?;
    let a = parse_set(set, r.universe())?;
    rep.flag("set", report::set(&a));
    let enc = encode_nary(&r, &a)?;
    rep.set("carriers", json!(enc.carriers));
    rep.set(
        "functions",
        enc.functions.iter().map(|f| json!(f.pairs())).collect::<Vec<_>>(),
    );
    rep.set("decoding", agreement(&r, b, |t| decode_nary(&enc, t))?);
    if let Some(path) = emit {
        let mut out = RelationFile::new(r.universe());
        out.push("A", Structure::Rel(Relation::unary(r.universe(), &a)?))?;
        for (i, f) in enc.functions.iter().enumerate() {
            out.push(&format!("F{i}"), Structure::Inj(f.clone()))?;
        }
        let text = out.format();
        fs::write(path, &text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        rep.set("emitted", json!({ "path": path.display().to_string(), "sha256": digest(text.as_bytes()) }));
    }
    Ok(())
}

fn eval(context: &Context, phi: &FormulaArgs, vars: &[String], b: &Budget, rep: &mut Report) -> Result<()> {
    let model = load_context(context, rep)?;
    let f = formula(phi, rep)?;
    rep.flag("vars", json!(vars));
    if vars.is_empty() {
        rep.set("value", eval_formula(&f, &model, &[], b)?);
    } else {
        rep.set("relation", report::relation(&defined_relation(&f, &model, vars, b)?));
    }
    Ok(())
}

fn check_def(context: &Context, phi: &FormulaArgs, k: &str, b: &Budget, rep: &mut Report) -> Result<()> {
    let model = load_context(context, rep)?;
    let f = formula(phi, rep)?;
    rep.flag("k", k);
    let fam = family(k, &model)?;
    let d = check_definable(&fam, &f, &model, b)?;
    rep.set("definable", d.definable);
    rep.set("checked", report::count(d.checked));
    rep.set(
        "mismatch",
        match d.mismatch {
            None => Value::Null,
            Some((r, v)) => json!({ "relation": report::tuples(&r), "formula_value": v }),
        },
    );
    Ok(())
}

/// Entries as canonical text, hashed so reports stay small.
fn entries_text(c: &Certificate) -> String {
    let mut s = String::new();
    for (m, ws) in &c.entries {
        s.push_str(&format!("{:?}", m.tuples().collect::<Vec<_>>()));
        for w in ws {
            s.push_str(&format!(" {:?}", w.tuples().collect::<Vec<_>>()));
        }
        s.push('\n');
    }
    s
}

fn certificate(c: &Certificate, params: &Model, b: &Budget, entries: bool) -> Result<Value> {
    let verified = verify_certificate(c, params, b)?;
    let mut v = json!({
        "formula": format_formula(&c.formula),
        "elem_vars": c.elem_vars,
        "rel_vars": c.rel_vars,
        "universe": c.universe.size(),
        "members": c.entries.len(),
        "entries_sha256": digest(entries_text(c).as_bytes()),
        "verified": verified,
    });
    if entries {
        v["entries"] = c
            .entries
            .iter()
            .map(|(m, ws)| json!({ "member": report::tuples(m), "witnesses": ws.iter().map(report::tuples).collect::<Vec<_>>() }))
            .collect();
    }
    Ok(v)
}

fn outcome(o: &Outcome, params: &Model, b: &Budget, entries: bool) -> Result<Value> {
    Ok(match o {
        Outcome::Certified(c) => json!({ "certified": true, "certificate": certificate(c, params, b, entries)? }),
        Outcome::Counterexample(r) => json!({ "certified": false, "counterexample": report::tuples(r) }),
    })
}

fn interp(a: &InterpArgs, second_order: bool, b: &Budget, rep: &mut Report) -> Result<()> {
    let model = load_context(&a.context, rep)?;
    let f = formula(&a.phi, rep)?;
    let k1 = family(&a.k1, &model)?;
    let k2 = a.k2.iter().map(|s| family(s, &model)).collect::<Result<Vec<_>>>()?;
    let vars = default_vars(&a.vars, k1.arity());
    rep.flag("k1", a.k1.as_str());
    rep.flag("k2", json!(a.k2));
    rep.flag("vars", json!(vars));
    let o = if second_order {
        check_expressibility(&f, &vars, &k1, &k2, &model, b)?
    } else {
        check_interpretation(&f, &vars, &k1, &k2, &model, b)?
    };
    for (k, v) in outcome(&o, &model, b, a.entries)?.as_object().expect("an object") {
        rep.set(k, v.clone());
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn search(
    context: &Context,
    k1: &str,
    k2: &str,
    bounds: SearchBounds,
    entries: bool,
    b: &Budget,
    rep: &mut Report,
) -> Result<()> {
    let model = load_context(context, rep)?;
    let f1 = family(k1, &model)?;
    let f2 = family(k2, &model)?;
    rep.flag("k1", k1);
    rep.flag("k2", k2);
    rep.flag(
        "bounds",
        json!({
            "max_witnesses": bounds.max_witnesses,
            "max_depth": bounds.max_depth,
            "max_size": bounds.max_size,
            "max_so_depth": bounds.max_so_depth,
        }),
    );
    match search_interpretation(&f1, &f2, &model, &bounds, b)? {
        SearchOutcome::Found(c) => {
            rep.set("found", true);
            rep.set("certificate", certificate(&c, &model, b, entries)?);
        }
        SearchOutcome::Exhausted { tried } => {
            rep.set("found", false);
            rep.set("tried", tried);
        }
    }
    Ok(())
}

fn family_cmd(spec: &str, context: &Context, list: bool, b: &Budget, rep: &mut Report) -> Result<()> {
    let model = load_context(context, rep)?;
    let k = family(spec, &model)?;
    rep.flag("spec", spec);
    rep.set("arity", k.arity());
    rep.set("count", report::count(k.count(model.universe, b)?));
    if list {
        let members = k.members(model.universe, b)?;
        rep.set("members", members.iter().map(report::tuples).collect::<Vec<_>>());
    }
    Ok(())
}

pub fn execute(cmd: &Command, b: &Budget, rep: &mut Report) -> Result<()> {
    match cmd {
        Command::Invariants(a) => invariants(a, b, rep),
        Command::Decompose { rel, kind } => decompose(rel, *kind, b, rep),
        Command::ExtractMon(a) => extract(a, b, rep),
        Command::Encode { rel, set, emit } => encode(rel, set, emit.as_deref(), b, rep),
        Command::Eval { context, phi, vars } => eval(context, phi, vars, b, rep),
        Command::CheckDef { context, phi, k } => check_def(context, phi, k, b, rep),
        Command::CheckInterp(a) => interp(a, false, b, rep),
        Command::CheckExp(a) => interp(a, true, b, rep),
        Command::SearchInterp { context, k1, k2, max_witnesses, max_depth, max_size, max_so_depth, entries } => {
            let bounds = SearchBounds {
                max_witnesses: *max_witnesses,
                max_depth: *max_depth,
                max_size: *max_size,
                max_so_depth: *max_so_depth,
            };
            search(context, k1, k2, bounds, *entries, b, rep)
        }
        Command::Compose {
            context,
            phi12,
            formula12,
            phi23,
            formula23,
            vars12,
            vars23,
            k1,
            k2,
            k3,
            entries,
        } => {
            let model = load_context(context, rep)?;
            let f12 = load_formula(phi12, formula12, "formula12", rep)?;
            let f23 = load_formula(phi23, formula23, "formula23", rep)?;
            let fam1 = family(k1, &model)?;
            let fam2 = family(k2, &model)?;
            let fam3 = k3.iter().map(|s| family(s, &model)).collect::<Result<Vec<_>>>()?;
            rep.flag("k1", k1.as_str());
            rep.flag("k2", k2.as_str());
            rep.flag("k3", json!(k3));
            let v12 = default_vars(vars12, fam1.arity());
            let v23 = default_vars(vars23, fam2.arity());
            let o12 = check_interpretation(&f12, &v12, &fam1, std::slice::from_ref(&fam2), &model, b)?;
            let o23 = check_interpretation(&f23, &v23, &fam2, &fam3, &model, b)?;
            rep.set("first", outcome(&o12, &model, b, false)?);
            rep.set("second", outcome(&o23, &model, b, false)?);
            match (o12, o23) {
                (Outcome::Certified(c12), Outcome::Certified(c23)) => {
                    let c = compose_interpretations(&c12, &c23, &model, b)?;
                    rep.set("composed", certificate(&c, &model, b, *entries)?);
                }
                _ => rep.set("composed", Value::Null),
            }
            Ok(())
        }
        Command::Family { spec, context, list } => family_cmd(spec, context, *list, b, rep),
    }
}

pub fn name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Invariants(_) => "invariants",
        Command::Decompose { .. } => "decompose",
        Command::ExtractMon(_) => "extract-mon",
        Command::Encode { .. } => "encode",
        Command::Eval { .. } => "eval",
        Command::CheckDef { .. } => "check-def",
        Command::CheckInterp(_) => "check-interp",
        Command::CheckExp(_) => "check-exp",
        Command::SearchInterp { .. } => "search-interp",
        Command::Compose { .. } => "compose",
        Command::Family { .. } => "family",
    }
}
