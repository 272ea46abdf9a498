use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use gmpa_core::datum::{construct_gamma, verify_datum};
use gmpa_core::examples::{galois_corpus, gen_sec63};
use gmpa_core::galois::{galois_search, UnitalView};
use gmpa_core::genmatrix::{matrix_ring, verify_genmatrix};
use gmpa_core::partial_action::verify_partial_action;
use gmpa_core::ring::{all_ideals, verify_ring, zn, DirectProduct};
use gmpa_core::suite::{run_suite, Input};
use gmpa_core::Budget;

fn rings(c: &mut Criterion) {
    let b = Budget::default();
    let p = DirectProduct::power(zn(2).unwrap(), 6, &b).unwrap().ring();
    let m = matrix_ring(zn(3).unwrap(), 2, &b).unwrap();
    c.bench_function("verify_ring Z2^6", |x| x.iter(|| verify_ring(p.as_ref(), &b)));
    c.bench_function("verify_genmatrix M2(Z3)", |x| x.iter(|| verify_genmatrix(&m, &b)));
    c.bench_function("all_ideals M2(Z3)", |x| x.iter(|| all_ideals(&m, &b).unwrap()));
}

fn datums(c: &mut Criterion) {
    let b = Budget::default();
    let mut g = c.benchmark_group("sec63");
    for (k, n, r) in [(2, 4, 2), (2, 5, 2), (3, 5, 2)] {
        let s = gen_sec63(zn(k).unwrap(), n, r, &b).unwrap();
        let d = s.bundle.datum();
        let id = format!("Z{k} n={n} r={r}");
        g.bench_with_input(BenchmarkId::new("verify_datum", &id), d, |x, d| x.iter(|| verify_datum(d, &b)));
        g.bench_with_input(BenchmarkId::new("construct_gamma", &id), d, |x, d| x.iter(|| construct_gamma(d, &b).unwrap()));
        let gamma = construct_gamma(d, &b).unwrap();
        g.bench_with_input(BenchmarkId::new("verify_gamma", &id), &gamma, |x, a| x.iter(|| verify_partial_action(a, &b)));
    }
    g.finish();
}

fn galois(c: &mut Criterion) {
    let b = Budget::default();
    let mut g = c.benchmark_group("galois_search");
    g.sample_size(10);
    for item in galois_corpus(&b).unwrap().into_iter().take(6) {
        let Ok(view) = UnitalView::for_gamma(&item.datum, &item.gamma, &b) else { continue };
        let m = item.datum.size() * item.datum.group.order();
        g.bench_with_input(BenchmarkId::from_parameter(&item.label), &view, |x, v| x.iter(|| galois_search(v, m, &b).unwrap()));
    }
    g.finish();
}

fn suite(c: &mut Criterion) {
    let b = Budget::default();
    let mut g = c.benchmark_group("suite");
    g.sample_size(10);
    g.bench_function("smoke", |x| x.iter(|| run_suite(&[Input::Builtin("smoke".into())], 0, None, &b)));
    g.finish();
}

criterion_group!(benches, rings, datums, galois, suite);
criterion_main!(benches);
