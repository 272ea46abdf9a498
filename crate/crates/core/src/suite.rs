//! The verification suite: runs every applicable checker on documents and
//! built-in instances and collects one record per check.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};
use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Instant;

use crate::budget::Budget;
use crate::datum::{construct_gamma, unitality_check, verify_datum, Datum, GammaAction};
use crate::error::{Error, Result};
use crate::examples::{
    build_example, random_datums, random_support_spec, symmetry_rings, Example, ExampleSpec, FamilySampler, RandomSupport,
};
use crate::galois::{block_invariants, check_block_trace, galois_theorem_check, invariants, separability_equivalence, UnitalView, Verdict};
use crate::genmatrix::{ideal_blocks, ideal_equivalence, symmetric_ideal};
use crate::groupoid::{check_group_type, classify_groupoid_action, verify_groupoid_action, GroupTypeData, PartialGroupoidAction};
use crate::grouptype::{gamma_from_grouptype, iso_chain_check};
use crate::io::{Document, Workspace};
use crate::morita::check_morita_equivalent;
use crate::partial_action::{classify, verify_partial_action, PartialGroupAction};
use crate::report::Report;
use crate::ring::{ideal_generated_by, verify_ring};
use crate::FiniteRing;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Skipped,
    Fail,
    Budget,
    Io,
    Bug,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckRecord {
    pub source: String,
    pub check: String,
    pub status: Status,
    pub detail: String,
    #[serde(skip_serializing_if = "Value::is_null")]
    pub witness: Value,
    pub ms: u64,
}

/// Result of one check before it is timed and labelled.
pub struct Outcome {
    pub status: Status,
    pub detail: String,
    pub witness: Value,
}

impl Outcome {
    pub fn pass(detail: impl Into<String>) -> Outcome {
        Outcome { status: Status::Pass, detail: detail.into(), witness: Value::Null }
    }

    pub fn skip(detail: impl Into<String>) -> Outcome {
        Outcome { status: Status::Skipped, detail: detail.into(), witness: Value::Null }
    }

    pub fn with(status: Status, detail: impl Into<String>, witness: Value) -> Outcome {
        Outcome { status, detail: detail.into(), witness }
    }

    pub fn report(rep: &Report, ok: impl Into<String>) -> Outcome {
        if rep.is_ok() {
            let mut o = Outcome::pass(ok);
            if !rep.skipped.is_empty() {
                o.witness = json!({ "skipped": rep.skipped });
            }
            o
        } else {
            Outcome::with(Status::Fail, format!("{} violation(s)", rep.violations.len()), json!(rep))
        }
    }

    pub fn error(e: &Error) -> Outcome {
        let status = if e.is_bug_signal() {
            Status::Bug
        } else if e.is_budget() {
            Status::Budget
        } else if e.is_io() {
            Status::Io
        } else {
            Status::Fail
        };
        let witness = match e {
            Error::InvalidRing(r)
            | Error::InvalidBimodule(r)
            | Error::InvalidAction(r)
            | Error::DatumInvalid(r)
            | Error::InvalidGlobalDatum(r)
            | Error::InvalidGroupoid(r) => json!(r),
            _ => json!({ "error": e.to_string() }),
        };
        Outcome::with(status, e.to_string(), witness)
    }
}

/// Records for one source.
pub struct Checks<'a> {
    pub source: String,
    pub budget: &'a Budget,
    /// Galois search bound; `n |G|` when absent.
    pub m_max: Option<usize>,
    pub records: Vec<CheckRecord>,
}

impl<'a> Checks<'a> {
    pub fn new(source: impl Into<String>, budget: &'a Budget) -> Checks<'a> {
        Checks { source: source.into(), budget, m_max: None, records: Vec::new() }
    }

    fn push(&mut self, check: &str, o: Outcome, start: Instant) {
        self.records.push(CheckRecord {
            source: self.source.clone(),
            check: check.to_string(),
            status: o.status,
            detail: o.detail,
            witness: o.witness,
            ms: start.elapsed().as_millis() as u64,
        });
    }

    pub fn run(&mut self, check: &str, f: impl FnOnce() -> Result<Outcome>) {
        let start = Instant::now();
        let o = f().unwrap_or_else(|e| Outcome::error(&e));
        self.push(check, o, start);
    }

    /// Runs a construction; success is recorded as a pass with the given detail.
    pub fn attempt<T>(&mut self, check: &str, f: impl FnOnce() -> Result<(T, String)>) -> Option<T> {
        let start = Instant::now();
        match f() {
            Ok((t, detail)) => {
                self.push(check, Outcome::pass(detail), start);
                Some(t)
            }
            Err(e) => {
                self.push(check, Outcome::error(&e), start);
                None
            }
        }
    }

    pub fn skip(&mut self, check: &str, why: &str) {
        self.push(check, Outcome::skip(why), Instant::now());
    }
}

fn verdict_text(v: &Verdict) -> String {
    match v {
        Verdict::Galois { pairs, via } => format!("Galois ({pairs} pairs, {via})"),
        Verdict::NotGalois => "not Galois".into(),
        Verdict::NotWithinBound => "no system within bound".into(),
        Verdict::Undecided => "undecided".into(),
    }
}

/// Every datum-level check: axioms, `gamma`, unitality, Morita pairs and, for
/// unital `gamma`, invariants, trace, separability and the Galois theorem.
/// `expected` is a second route to `gamma`, compared elementwise.
pub fn datum_checks(c: &mut Checks, scope: &str, d: &Datum, expected: Option<&PartialGroupAction>) {
    let b = c.budget;
    let name = |s: &str| format!("{scope}.{s}");
    let rep = verify_datum(d, b);
    let ok = rep.is_ok();
    c.run(&name("axioms"), || Ok(Outcome::report(&rep, format!("n = {}, |G| = {}, |R| = {}", d.size(), d.group.order(), d.parent.order()))));
    if !ok {
        for s in ["gamma", "unitality", "morita", "galois"] {
            c.skip(&name(s), "datum is invalid");
        }
        return;
    }
    let gamma = c.attempt(&name("gamma"), || {
        let g = construct_gamma(d, b)?;
        let rep = verify_partial_action(&g, b);
        if !rep.is_ok() {
            return Err(Error::TheoremCheckFailed(rep.to_string()));
        }
        let sizes: Vec<usize> = g.domains.iter().map(|s| s.len()).collect();
        Ok((g, format!("partial action with |I_g| = {sizes:?}")))
    });
    let Some(gamma) = gamma else { return };
    if let Some(alpha) = expected {
        c.run(&name("coincidence"), || coincidence(alpha, &gamma));
    }
    let mut unital = false;
    c.run(&name("unitality"), || {
        let u = unitality_check(d, b)?;
        unital = u.unital_action;
        Ok(Outcome::pass(format!("central {}, unit ideals {}, unital {}", u.central, u.unit_ideal, u.unital_action)))
    });
    for i in 0..d.size() {
        for j in i + 1..d.size() {
            c.run(&name(&format!("morita.{}-{}", i + 1, j + 1)), || match check_morita_equivalent(d, i, j, b) {
                Ok(m) if m.is_ok() => Ok(Outcome::pass(match &m.product_action {
                    Some(_) => "context, module structures and product action hold",
                    None => "context and module structures hold",
                })),
                Ok(m) => Ok(Outcome::with(Status::Fail, "Morita conditions fail", json!(m))),
                Err(e @ (Error::HypothesisFails(_) | Error::NotRegular(_))) => Ok(Outcome::skip(e.to_string())),
                Err(e) => Err(e),
            });
        }
    }
    if unital {
        galois_checks(c, scope, d, &gamma);
    } else {
        c.skip(&name("galois"), "gamma is not unital");
    }
}

fn coincidence(alpha: &PartialGroupAction, gamma: &GammaAction) -> Result<Outcome> {
    let mut n = 0;
    for g in gamma.group.elements() {
        if alpha.domains[g] != gamma.domains[g] {
            return Err(Error::CoincidenceCheckFailed(format!("domains differ at {}", gamma.group.name(g))));
        }
        for &x in gamma.domains[gamma.group.inv(g)].members() {
            if alpha.apply(g, x) != gamma.apply(g, x) {
                return Err(Error::CoincidenceCheckFailed(format!("values differ at ({}, {x})", gamma.group.name(g))));
            }
            n += 1;
        }
    }
    Ok(Outcome::pass(format!("{n} values agree")))
}

fn galois_checks(c: &mut Checks, scope: &str, d: &Datum, gamma: &GammaAction) {
    let b = c.budget;
    let name = |s: &str| format!("{scope}.{s}");
    let Some(view) = c.attempt(&name("galois.view"), || Ok((UnitalView::for_gamma(d, gamma, b)?, "units 1_g = diag(1_g^(i))".into())))
    else {
        return;
    };
    c.run(&name("galois.invariants"), || {
        let blocks = block_invariants(d, &view, b)?;
        let direct = invariants(&view)?;
        if d.parent.block_set(&blocks, b)? != direct {
            return Err(Error::BlockMismatch("blockwise invariants differ from the direct computation".into()));
        }
        check_block_trace(d, &view, b)?;
        Ok(Outcome::pass(format!("|R^gamma| = {}, trace agrees blockwise", direct.len())))
    });
    c.run(&name("galois.separability"), || {
        let s = separability_equivalence(d, &view)?;
        let all = s.components.iter().all(Option::is_some);
        if s.ambient.is_some() != all || (all && s.diagonal_witness != Some(true)) {
            return Err(Error::BlockMismatch(format!("separability disagrees: {s:?}")));
        }
        Ok(Outcome::pass(if all { "separable, diagonal witness" } else { "not separable" }))
    });
    let m_max = c.m_max.unwrap_or(d.size() * d.group.order());
    c.run(&name("galois.theorem"), || {
        let t = galois_theorem_check(d, &view, m_max, b)?;
        let comps: Vec<String> = t.components.iter().map(verdict_text).collect();
        let detail = format!("m_max {m_max}: ambient {}, components [{}]", verdict_text(&t.ambient), comps.join(", "));
        if !t.agree {
            return Ok(Outcome::with(Status::Bug, format!("verdicts disagree; {detail}"), json!(t)));
        }
        if t.components.iter().chain([&t.ambient]).any(|v| *v == Verdict::Undecided) {
            return Ok(Outcome::with(Status::Budget, detail, json!(t)));
        }
        Ok(Outcome::pass(detail))
    });
}

/// Axioms, classification and, for unital actions of group type, the
/// isomorphism chain and the induced datum.
pub fn groupoid_action_checks(c: &mut Checks, scope: &str, a: &PartialGroupoidAction, data: Option<&GroupTypeData>) {
    let b = c.budget;
    let name = |s: &str| format!("{scope}.{s}");
    let rep = verify_groupoid_action(a, b);
    let ok = rep.is_ok();
    c.run(&name("axioms"), || {
        Ok(Outcome::report(&rep, format!("{} objects, {} morphisms, |A| = {}", a.groupoid.object_count(), a.groupoid.morphism_count(), a.ring.order())))
    });
    if !ok {
        c.skip(&name("chain"), "groupoid action is invalid");
        return;
    }
    let cl = classify_groupoid_action(a);
    c.run(&name("classify"), || Ok(Outcome::pass(format!("global {}, unital {}, group type {}", cl.global, cl.unital(), cl.group_type.is_some()))));
    let Some(data) = data else {
        c.skip(&name("chain"), "no group-type system");
        return;
    };
    if let Err(e) = check_group_type(a, data) {
        c.run(&name("group_type"), || Err(e));
        c.skip(&name("chain"), "group-type system is invalid");
        return;
    }
    if !cl.unital() {
        c.skip(&name("chain"), "action is not unital");
        return;
    }
    c.run(&name("chain"), || {
        let rep = iso_chain_check(a, data, b)?;
        Ok(Outcome::with(Status::Pass, format!("orders {:?}, {} stages", rep.orders, rep.stages.len()), json!(rep.stages)))
    });
    if let Some(gt) = c.attempt(&name("datum.build"), || Ok((gamma_from_grouptype(a, data, b)?, "datum from the group-type system".into()))) {
        datum_checks(c, &name("datum"), &gt.datum, None);
    }
}

pub fn example_checks(c: &mut Checks, spec: &ExampleSpec) {
    let b = c.budget;
    let Some(ex) = c.attempt("example.build", || Ok((build_example(spec, b)?, "built".into()))) else { return };
    match ex {
        Example::Bundle(bun) => datum_checks(c, "example", bun.datum(), Some(&bun.induced.alpha)),
        Example::Sec63(s) => {
            c.run("example.closed_forms", || {
                Ok(Outcome::pass(format!("{} units and {} values match the closed forms", s.units_checked, s.entries_checked)))
            });
            datum_checks(c, "example", s.bundle.datum(), Some(&s.bundle.induced.alpha));
        }
        Example::GroupType { instance, .. } => groupoid_action_checks(c, "example.groupoid_action", &instance.action, Some(&instance.data)),
        Example::CoarseSkew(cs) => c.run("example.coarse_skew", || {
            Ok(Outcome::pass(format!("|I_1| = {}, family of {} ideals is symmetric", cs.ideal.len(), cs.family.len())))
        }),
    }
}

/// What `document_checks` covers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Focus {
    All,
    GenMatrix,
    Action,
    Datum,
    /// 0-based indices.
    Morita(usize, usize),
    GroupoidAction,
}

/// Checks every section of a document that `focus` selects.
pub fn document_checks(c: &mut Checks, doc: Document, focus: Focus) {
    let b = *c.budget;
    let Some(ws) = c.attempt("load", || {
        let secs = doc.sections().join(", ");
        Ok((Workspace::new(doc, b)?, format!("sections: {secs}")))
    }) else {
        return;
    };
    let want = |f: Focus| focus == Focus::All || focus == f;
    let missing = |c: &mut Checks, check: &str, section: &str| c.run(check, || Ok(Outcome::with(Status::Fail, format!("no {section} section"), Value::Null)));
    if focus == Focus::All {
        for name in ws.doc.rings.keys() {
            let r = ws.ring(&crate::io::RingDesc::Named(name.clone()));
            c.run(&format!("ring.{name}"), || {
                let r = r?;
                Ok(Outcome::report(&verify_ring(r.ring.as_ref(), &b), format!("|{name}| = {}", r.ring.order())))
            });
        }
    }
    let need_matrix = matches!(focus, Focus::GenMatrix | Focus::Datum | Focus::Morita(..));
    if ws.doc.genmatrix.is_some() && (want(Focus::GenMatrix) || need_matrix) {
        c.run("genmatrix", || {
            let m = ws.genmatrix()?;
            Ok(Outcome::pass(format!(
                "n = {}, |R| = {}, associativity checked {}",
                m.ring.size(),
                m.ring.order(),
                if m.ring.exhaustive_associativity { "on all triples" } else { "on additive generators" }
            )))
        });
    } else if focus == Focus::GenMatrix {
        missing(c, "genmatrix", "genmatrix");
    }
    if ws.doc.partial_action.is_some() && want(Focus::Action) {
        if let Some(a) = c.attempt("action.shape", || Ok((ws.partial_action()?, "one map per group element".into()))) {
            let rep = verify_partial_action(&a, &b);
            let ok = rep.is_ok();
            c.run("action.axioms", || Ok(Outcome::report(&rep, format!("|G| = {}, |A| = {}", a.group.order(), a.ring.order()))));
            if ok {
                c.run("action.classify", || {
                    let cl = classify(&a, &b)?;
                    Ok(Outcome::pass(format!("global {}, unital {}, regular {}, product {}", cl.global, cl.unital(), cl.regular, cl.product)))
                });
            }
        }
    } else if focus == Focus::Action {
        missing(c, "action", "partial_action");
    }
    if ws.doc.datum.is_some() && (want(Focus::Datum) || matches!(focus, Focus::Morita(..))) {
        if let Some(d) = c.attempt("datum.shape", || Ok((ws.datum()?, "maps defined exactly on D_{g^-1} M_ij".into()))) {
            match focus {
                Focus::Morita(i, j) => {
                    c.run(&format!("datum.morita.{}-{}", i + 1, j + 1), || {
                        let m = check_morita_equivalent(&d, i, j, &b)?;
                        Ok(Outcome::with(if m.is_ok() { Status::Pass } else { Status::Fail }, "Morita conditions", json!(m)))
                    });
                }
                _ => datum_checks(c, "datum", &d, None),
            }
        }
    } else if matches!(focus, Focus::Datum | Focus::Morita(..)) {
        missing(c, "datum", "datum");
    }
    if ws.doc.groupoid_action.is_some() && want(Focus::GroupoidAction) {
        if let Some((a, data)) = c.attempt("groupoid_action.shape", || Ok((ws.groupoid_action()?, "one map per morphism".into()))) {
            groupoid_action_checks(c, "groupoid_action", &a, data.as_ref());
        }
    } else if ws.doc.groupoid.is_some() && focus == Focus::All {
        c.run("groupoid", || Ok(Outcome::pass(format!("{} morphisms", ws.groupoid()?.morphism_count()))));
    } else if focus == Focus::GroupoidAction {
        missing(c, "groupoid_action", "groupoid_action");
    }
    if let (Some(spec), Focus::All) = (&ws.doc.example, focus) {
        example_checks(c, spec);
    }
}

pub const BUILTINS: &[(&str, &str)] = &[
    ("smoke", "small instances of every construction"),
    ("sec62", "the 2x2 idempotent example over Z_2^4"),
    ("sec63-z2-4-2", "the cyclic shift example with k = Z_2, n = 4, r = 2"),
    ("sec63-z3-5-2", "the cyclic shift example with k = Z_3, n = 5, r = 2"),
    ("corpus", "the unital corpus used for the Galois checks"),
];

fn sec62_spec() -> ExampleSpec {
    ExampleSpec::Sec62 { modulus: 2, coords: 4, perm: vec![0, 1, 3, 2], order: 2, e1: vec![0, 1], e2: vec![1, 2] }
}

fn builtin(name: &str, seed: u64, b: &Budget, out: &mut Vec<CheckRecord>) -> Result<()> {
    let mut example = |label: &str, spec: ExampleSpec| {
        let mut c = Checks::new(format!("{name}/{label}"), b);
        c.run("example.spec", || Ok(Outcome::with(Status::Pass, "parameters", json!(spec))));
        example_checks(&mut c, &spec);
        out.extend(c.records);
    };
    match name {
        "sec62" => example("sec62", sec62_spec()),
        "sec63-z2-4-2" => example("sec63", ExampleSpec::Sec63 { modulus: 2, n: 4, r: 2 }),
        "sec63-z3-5-2" => example("sec63", ExampleSpec::Sec63 { modulus: 3, n: 5, r: 2 }),
        "smoke" => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let small = RandomSupport { max_coords: 2, max_blocks: 2, max_group: 2, max_j: 64, max_r: 1024, ..Default::default() };
            let support = random_support_spec(&mut rng, &small)?;
            example("sec62", sec62_spec());
            example("sec63-z2-3-1", ExampleSpec::Sec63 { modulus: 2, n: 3, r: 1 });
            example("grouptype", ExampleSpec::GrouptypeRandom { seed, objects: 2, isotropy: 2, exponent: 1 });
            example("support", ExampleSpec::Support(support));
            example("coarse-skew", ExampleSpec::CoarseSkew { modulus: 2, coords: 2, perms: vec![vec![0, 1], vec![1, 0]], ideal: vec![0] });
            for it in random_datums(&mut rng, 2, b)? {
                let mut c = Checks::new(format!("{name}/random/{}", it.label), b);
                datum_checks(&mut c, "datum", &it.datum, Some(&it.gamma));
                out.extend(c.records);
            }
            let mut c = Checks::new(format!("{name}/ideal-families"), b);
            family_checks(&mut c, &mut rng, 8)?;
            out.extend(c.records);
        }
        "corpus" => {
            for it in crate::examples::galois_corpus(b)? {
                let mut c = Checks::new(format!("{name}/{}", it.label), b);
                datum_checks(&mut c, "datum", &it.datum, Some(&it.gamma));
                out.extend(c.records);
            }
        }
        _ => return Err(Error::InvalidParameters(format!("unknown builtin {name:?}"))),
    }
    Ok(())
}

/// Random ideal families: the symmetry criterion against the one-sided
/// conditions, and the resulting ideal against its closure.
pub fn family_checks(c: &mut Checks, rng: &mut ChaCha8Rng, count: usize) -> Result<()> {
    let b = c.budget;
    let rings = symmetry_rings(b)?;
    let samplers = rings.into_iter().map(|r| FamilySampler::new(r, b)).collect::<Result<Vec<_>>>()?;
    for k in 0..count {
        let s = &samplers[k % samplers.len()];
        let fam = s.sample(rng);
        c.run(&format!("family.{k:02}"), || {
            let eq = ideal_equivalence(&s.ring, &fam)?;
            if !(eq.symmetric || eq.triples.right_holds() || eq.triples.left_holds()) {
                return Ok(Outcome::pass(format!("{}: not symmetric, no one-sided condition", s.ring.label())));
            }
            let cand = s.ring.block_set(&ideal_blocks(&s.ring, &fam), b)?;
            if ideal_generated_by(s.ring.as_ref(), cand.members().iter().copied()) != cand {
                return Err(Error::ClosureViolation(format!("candidate in {} is not an ideal", s.ring.label())));
            }
            let ideal = symmetric_ideal(&s.ring, &fam, b)?;
            if ideal != cand {
                return Err(Error::ClosureViolation("promoted ideal differs from the candidate".into()));
            }
            Ok(Outcome::pass(format!("{}: symmetric {}, ideal of order {}", s.ring.label(), eq.symmetric, ideal.len())))
        });
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub enum Input {
    Builtin(String),
    File(PathBuf),
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub config: Value,
    pub records: Vec<CheckRecord>,
}

impl SuiteReport {
    /// `2` on a bug signal, else `1` on a failure, else `3` on budget or I/O trouble.
    pub fn exit_code(&self) -> i32 {
        let worst = |s: Status| self.records.iter().any(|r| r.status == s);
        if worst(Status::Bug) {
            2
        } else if worst(Status::Fail) {
            1
        } else if worst(Status::Budget) || worst(Status::Io) {
            3
        } else {
            0
        }
    }

    pub fn count(&self, s: Status) -> usize {
        self.records.iter().filter(|r| r.status == s).count()
    }

    /// The config line followed by one line per check. Without `timings` the
    /// output depends only on the inputs and the seed.
    pub fn to_jsonl(&self, timings: bool) -> String {
        let mut out = serde_json::to_string(&json!({ "config": self.config })).expect("json");
        out.push('\n');
        for r in &self.records {
            let mut v = json!(r);
            if !timings {
                v.as_object_mut().expect("record is an object").remove("ms");
            }
            out.push_str(&serde_json::to_string(&v).expect("json"));
            out.push('\n');
        }
        out
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        for r in &self.records {
            if r.status != Status::Pass {
                let _ = writeln!(s, "{:>7}  {} {}: {}", format!("{:?}", r.status).to_lowercase(), r.source, r.check, r.detail);
            }
        }
        let _ = writeln!(
            s,
            "{} checks: {} pass, {} fail, {} bug, {} budget, {} io, {} skipped",
            self.records.len(),
            self.count(Status::Pass),
            self.count(Status::Fail),
            self.count(Status::Bug),
            self.count(Status::Budget),
            self.count(Status::Io),
            self.count(Status::Skipped)
        );
        s
    }
}

fn sort(records: &mut [CheckRecord]) {
    records.sort_by(|a, b| (&a.source, &a.check).cmp(&(&b.source, &b.check)));
}

/// Runs the suite over builtins and files. Records are sorted by source and
/// check name.
pub fn run_suite(inputs: &[Input], seed: u64, m_max: Option<usize>, budget: &Budget) -> SuiteReport {
    let mut records = Vec::new();
    for input in inputs {
        match input {
            Input::Builtin(name) => {
                if let Err(e) = builtin(name, seed, budget, &mut records) {
                    let mut c = Checks::new(name.clone(), budget);
                    c.run("builtin", || Err(e));
                    records.extend(c.records);
                }
            }
            Input::File(path) => {
                let mut c = Checks::new(path.display().to_string(), budget);
                c.m_max = m_max;
                match Document::from_path(path) {
                    Ok(doc) => document_checks(&mut c, doc, Focus::All),
                    Err(e) => c.run("load", || Err(e)),
                }
                records.extend(c.records);
            }
        }
    }
    sort(&mut records);
    let config = json!({
        "inputs": inputs.iter().map(|i| match i {
            Input::Builtin(n) => format!("builtin:{n}"),
            Input::File(p) => p.display().to_string(),
        }).collect::<Vec<_>>(),
        "seed": seed,
        "m_max": m_max,
        "max_elements": budget.max_elements,
    });
    SuiteReport { config, records }
}

/// Checks on a single document, for the `check` command.
pub fn check_document(source: &str, doc: Document, focus: Focus, budget: &Budget) -> SuiteReport {
    let mut c = Checks::new(source, budget);
    document_checks(&mut c, doc, focus);
    let mut records = c.records;
    sort(&mut records);
    SuiteReport { config: json!({ "inputs": [source], "max_elements": budget.max_elements }), records }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smoke_passes_and_is_reproducible() {
        let b = Budget::default();
        let a = run_suite(&[Input::Builtin("smoke".into())], 7, None, &b);
        assert_eq!(a.exit_code(), 0, "{}", a.summary());
        assert!(a.count(Status::Pass) > 20);
        let again = run_suite(&[Input::Builtin("smoke".into())], 7, None, &b);
        assert_eq!(a.to_jsonl(false), again.to_jsonl(false));
    }

    #[test]
    fn unknown_builtin_fails() {
        let r = run_suite(&[Input::Builtin("nope".into())], 0, None, &Budget::default());
        assert_eq!(r.exit_code(), 1);
    }

    #[test]
    fn missing_file_is_io() {
        let r = run_suite(&[Input::File("/nonexistent/x.json".into())], 0, None, &Budget::default());
        assert_eq!(r.exit_code(), 3);
    }
}
