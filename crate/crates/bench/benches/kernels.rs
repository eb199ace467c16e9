use criterion::{black_box, criterion_group, criterion_main, Criterion};
use num_complex::Complex64;
use pllsym::phasemodel::{relative_hopf_scan, releq_branches};
use pllsym::simulator::{integrate, HistorySpec};
use pllsym::snmap::crossings_up_to;
use pllsym::spectrum::{lambert_w, rightmost_root, root_census, CensusBox, Scheme};
use pllsym::{build_blocks, Block, Equilibrium, EquilibriumBranch, LinearizationPoint, ModelKind, NetworkParams};

fn params(n: usize, tau: f64) -> NetworkParams {
    NetworkParams {
        n_nodes: n,
        coupling: 1.05,
        filter_gain: 0.3,
        free_freq: 1.0,
        delay: tau,
    }
}

fn fix_block(tau: f64) -> pllsym::QuasiPolynomial {
    let p = params(2, tau);
    let eq = Equilibrium::new(p.coupling, EquilibriumBranch::Minus).unwrap();
    build_blocks(ModelKind::FullPhase, &p, LinearizationPoint::Equilibrium(eq))
        .unwrap()
        .block(Block::Fix)
        .clone()
}

fn kernels(c: &mut Criterion) {
    let z = Complex64::new(0.7, -1.3);
    c.bench_function("lambert_w branches -3..=3", |b| {
        b.iter(|| (-3..=3).map(|k| lambert_w(k, black_box(z)).unwrap()).sum::<Complex64>())
    });

    let p = fix_block(8.0);
    c.bench_function("rightmost_root tau=8", |b| {
        b.iter(|| rightmost_root(black_box(&p), 8.0, Scheme::Newton).unwrap())
    });

    let bx = CensusBox::new((0.0, 2.0), (-5.0, 5.0));
    c.bench_function("root_census right half box", |b| b.iter(|| root_census(black_box(&p), 8.0, &bx).unwrap()));

    c.bench_function("crossings_up_to tau=40", |b| {
        b.iter(|| crossings_up_to(black_box(&p), Block::Fix, 40.0).unwrap())
    });

    let pm = params(2, 0.0);
    c.bench_function("releq_branches [0, 5pi]", |b| {
        b.iter(|| releq_branches(black_box(&pm), (0.0, 5.0 * std::f64::consts::PI), 0.01))
    });
    c.bench_function("relative_hopf_scan fix", |b| {
        b.iter(|| relative_hopf_scan(black_box(&pm), Block::Fix, (0.0, 5.0 * std::f64::consts::PI)))
    });

    let sp = params(3, 2.0);
    let eq = Equilibrium::new(sp.coupling, EquilibriumBranch::Minus).unwrap();
    let history = HistorySpec::perturbed(eq.state(3), &[1.0, 0.0, 0.0], 1e-2).unwrap();
    c.bench_function("integrate N=3 t=200", |b| {
        b.iter(|| integrate(ModelKind::FullPhase, black_box(&sp), &history, 200.0, 0.02).unwrap())
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(20);
    targets = kernels
}
criterion_main!(benches);
