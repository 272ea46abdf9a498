//! The eight acceptance criteria, run in order with wall-clock limits. Prints
//! one PASS/FAIL line per criterion and exits nonzero if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use gmpa_core::datum::construct_gamma;
use gmpa_core::examples::{galois_corpus, gen_sec63, random_datums, sec62_standard, symmetry_rings, Bundle, CorpusItem, FamilySampler};
use gmpa_core::galois::{block_invariants, check_block_trace, galois_theorem_check, invariants, separability_equivalence, UnitalView, Verdict};
use gmpa_core::genmatrix::{ideal_blocks, ideal_equivalence, symmetric_ideal};
use gmpa_core::group::FiniteGroup;
use gmpa_core::grouptype::{build_group_type, iso_chain_check};
use gmpa_core::partial_action::{verify_partial_action, PartialGroupAction, PartialMap};
use gmpa_core::ring::{ideal_generated_by, zn, DirectProduct};
use gmpa_core::{Budget, ElemSet, FiniteRing};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn c1(b: &Budget) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xacce);
    let items = random_datums(&mut rng, 26, b).map_err(|e| e.to_string())?;
    let mut kinds = (0, 0);
    for it in &items {
        ensure(it.datum.parent.order() <= 256 && it.datum.group.order() <= 4, || format!("{} too large", it.label))?;
        let gamma = construct_gamma(&it.datum, b).map_err(|e| format!("{}: {e}", it.label))?;
        let rep = verify_partial_action(&gamma, b);
        ensure(rep.is_ok(), || format!("{}: {rep}", it.label))?;
        match it.source {
            gmpa_core::examples::Source::GroupType => kinds.1 += 1,
            _ => kinds.0 += 1,
        }
    }
    Ok(format!("{} datums ({} induced, {} group type), no witnesses", items.len(), kinds.0, kinds.1))
}

fn coincidence(bun: &Bundle) -> Result<usize, String> {
    let (a, g) = (&bun.induced.alpha, bun.gamma());
    let mut n = 0;
    for x in g.group.elements() {
        ensure(a.domains[x] == g.domains[x], || format!("{}: domains differ at {x}", bun.label))?;
        for &y in g.domains[g.group.inv(x)].members() {
            ensure(a.apply(x, y) == g.apply(x, y), || format!("{}: values differ at ({x}, {y})", bun.label))?;
            n += 1;
        }
    }
    Ok(n)
}

fn c2(b: &Budget) -> Outcome {
    let mut total = 0;
    total += coincidence(&sec62_standard(b).map_err(|e| e.to_string())?)?;
    for (q, n, r) in [(2, 4, 2), (3, 5, 2)] {
        let s = gen_sec63(zn(q).unwrap(), n, r, b).map_err(|e| e.to_string())?;
        total += coincidence(&s.bundle)?;
    }
    Ok(format!("{total} values agree on three bundles"))
}

fn c3(b: &Budget) -> Outcome {
    let mut out = Vec::new();
    for (q, n, r) in [(2, 4, 2), (3, 5, 2)] {
        let s = gen_sec63(zn(q).unwrap(), n, r, b).map_err(|e| e.to_string())?;
        let j = s.bundle.induced.j.ring.order();
        let g = s.bundle.datum().group.order();
        ensure(s.entries_checked == j * g, || format!("only {} of {} entries compared", s.entries_checked, j * g))?;
        out.push(format!("(Z{q},{n},{r}): {} units, {} entries", s.units_checked, s.entries_checked));
    }
    Ok(out.join("; "))
}

fn c4(b: &Budget) -> Outcome {
    let r = DirectProduct::power(zn(2).unwrap(), 2, b).unwrap().ring();
    let dg = ElemSet::from_iter(4, [0, 2]);
    let base = PartialGroupAction::new(
        Arc::new(FiniteGroup::cyclic(2)),
        r,
        vec![ElemSet::full(4), dg.clone()],
        vec![PartialMap { table: (0..4).collect() }, PartialMap::identity_on(&dg)],
    )
    .map_err(|e| e.to_string())?;
    let (a, data) = build_group_type(&base, &[vec![0, 1], vec![1, 0]], b).map_err(|e| e.to_string())?;
    let rep = iso_chain_check(&a, &data, b).map_err(|e| e.to_string())?;
    ensure(rep.orders[0] == rep.orders[1] && rep.orders[1] == rep.orders[2], || format!("{:?}", rep.orders))?;
    Ok(format!("orders {:?}, {} stages", rep.orders, rep.stages.len()))
}

fn views(corpus: &[CorpusItem], b: &Budget) -> Result<Vec<UnitalView>, String> {
    corpus
        .iter()
        .map(|it| UnitalView::for_gamma(&it.datum, &it.gamma, b).map_err(|e| format!("{}: {e}", it.label)))
        .collect()
}

fn c5(b: &Budget, corpus: &[CorpusItem]) -> Outcome {
    ensure(corpus.len() >= 10, || "corpus has fewer than 10 instances".into())?;
    let vs = views(corpus, b)?;
    let (mut galois, mut non_galois_comp) = (0, 0);
    for (it, v) in corpus.iter().zip(&vs) {
        let m_max = it.datum.size() * it.datum.group.order();
        let t = galois_theorem_check(&it.datum, v, m_max, b).map_err(|e| format!("{}: {e}", it.label))?;
        ensure(t.agree, || format!("{}: verdicts disagree: {:?}", it.label, t))?;
        if t.components.iter().all(Verdict::is_galois) {
            ensure(t.lifted.is_some(), || format!("{}: no lifted system", it.label))?;
        }
        galois += t.ambient.is_galois() as usize;
        non_galois_comp += t.components.iter().any(|c| matches!(c, Verdict::NotGalois)) as usize;
    }
    ensure(non_galois_comp > 0, || "no instance with a non-Galois component".into())?;
    Ok(format!("{} instances, {galois} Galois, {non_galois_comp} with a non-Galois component", corpus.len()))
}

fn c6(b: &Budget, corpus: &[CorpusItem]) -> Outcome {
    let vs = views(corpus, b)?;
    let mut diag = 0;
    for (it, v) in corpus.iter().zip(&vs) {
        let s = separability_equivalence(&it.datum, v).map_err(|e| format!("{}: {e}", it.label))?;
        ensure(s.ambient.is_some() == s.components.iter().all(Option::is_some), || format!("{}: {s:?}", it.label))?;
        if s.components.iter().all(Option::is_some) {
            ensure(s.diagonal_witness == Some(true), || format!("{}: diagonal witness fails", it.label))?;
            diag += 1;
        }
    }
    Ok(format!("{} instances, {diag} with a diagonal witness", corpus.len()))
}

fn c7(b: &Budget) -> Outcome {
    let rings = symmetry_rings(b).map_err(|e| e.to_string())?;
    let samplers: Vec<FamilySampler> = rings.into_iter().map(|r| FamilySampler::new(r, b)).collect::<Result<_, _>>().map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5717);
    let (mut sym, mut asym) = (0, 0);
    for k in 0..100 {
        let s = &samplers[k % samplers.len()];
        let fam = s.sample(&mut rng);
        let eq = ideal_equivalence(&s.ring, &fam).map_err(|e| e.to_string())?;
        if eq.symmetric || eq.triples.right_holds() || eq.triples.left_holds() {
            let cand = s.ring.block_set(&ideal_blocks(&s.ring, &fam), b).map_err(|e| e.to_string())?;
            let closure = ideal_generated_by(s.ring.as_ref(), cand.members().iter().copied());
            ensure(closure == cand, || format!("candidate is not closed in {}", s.ring.label()))?;
            ensure(symmetric_ideal(&s.ring, &fam, b).map_err(|e| e.to_string())? == cand, || "promoted ideal differs".into())?;
        }
        if eq.symmetric {
            sym += 1;
        } else {
            asym += 1;
        }
    }
    ensure(sym > 0 && asym > 0, || format!("only one side exercised: {sym} symmetric, {asym} not"))?;
    Ok(format!("100 families, {sym} symmetric, {asym} not"))
}

fn c8(b: &Budget, corpus: &[CorpusItem]) -> Outcome {
    let vs = views(corpus, b)?;
    for (it, v) in corpus.iter().zip(&vs) {
        let blocks = block_invariants(&it.datum, v, b).map_err(|e| format!("{}: {e}", it.label))?;
        let direct = invariants(v).map_err(|e| format!("{}: {e}", it.label))?;
        let assembled = it.datum.parent.block_set(&blocks, b).map_err(|e| e.to_string())?;
        ensure(assembled == direct, || format!("{}: invariants differ", it.label))?;
        check_block_trace(&it.datum, v, b).map_err(|e| format!("{}: {e}", it.label))?;
    }
    Ok(format!("{} instances", corpus.len()))
}

fn run(n: usize, limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let res = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_else(|| "panic".into()))
    });
    let took = start.elapsed();
    let late = limit.is_some_and(|l| took > l);
    let limit_s = limit.map_or("none".to_string(), |l| format!("{} s", l.as_secs()));
    match (&res, late) {
        (Ok(msg), false) => println!("criterion {n}: PASS ({:.1} s, limit {limit_s}) {msg}", took.as_secs_f64()),
        (Ok(msg), true) => println!("criterion {n}: FAIL ({:.1} s, over limit {limit_s}) {msg}", took.as_secs_f64()),
        (Err(e), _) => println!("criterion {n}: FAIL ({:.1} s) {e}", took.as_secs_f64()),
    }
    res.is_ok() && !late
}

fn main() -> ExitCode {
    let b = Budget::default();
    let secs = Duration::from_secs;
    let mut ok = true;
    ok &= run(1, Some(secs(60)), || c1(&b));
    ok &= run(2, Some(secs(30)), || c2(&b));
    ok &= run(3, Some(secs(30)), || c3(&b));
    ok &= run(4, Some(secs(60)), || c4(&b));
    let corpus_start = Instant::now();
    let corpus = galois_corpus(&b);
    let built = corpus_start.elapsed();
    match corpus {
        Ok(corpus) => {
            ok &= run(5, Some(secs(120).saturating_sub(built)), || c5(&b, &corpus));
            ok &= run(6, None, || c6(&b, &corpus));
            ok &= run(7, Some(secs(60)), || c7(&b));
            ok &= run(8, None, || c8(&b, &corpus));
        }
        Err(e) => {
            for n in [5, 6, 8] {
                println!("criterion {n}: FAIL corpus construction: {e}");
            }
            run(7, Some(secs(60)), || c7(&b));
            ok = false;
        }
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
