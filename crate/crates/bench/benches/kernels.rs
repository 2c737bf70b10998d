use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use dilute_fermi::fock::checks::sector_pair;
use dilute_fermi::fock::hamiltonian::hamiltonian;
use dilute_fermi::hf::exchange_term;
use dilute_fermi::scattering::solve;
use dilute_fermi::{Decomposition, DecompositionOptions, NeumannConfig, PairKernel};
use dilute_fermi_bench::{balls, fourier, modes, potential};

fn exchange(c: &mut Criterion) {
    let f = fourier();
    let mut g = c.benchmark_group("exchange_sum");
    for (l, n) in [(20.0, 57), (40.0, 619), (80.0, 5041)] {
        let b = balls(l, n);
        g.bench_with_input(BenchmarkId::from_parameter(n), &b, |bench, b| {
            bench.iter(|| exchange_term(black_box(b), &f).unwrap())
        });
    }
    g.finish();
}

fn fock(c: &mut Criterion) {
    let m = modes();
    let k = PairKernel::fourier(&m, &fourier()).unwrap();
    let (a, _) = sector_pair(&m).unwrap();
    c.bench_function("hamiltonian_build_16_modes", |bench| {
        bench.iter(|| hamiltonian(black_box(&m), &k, &a).unwrap())
    });
    c.bench_function("normal_ordered_decomposition_16_modes", |bench| {
        bench.iter(|| Decomposition::new(black_box(&m), &k, DecompositionOptions::default()).unwrap())
    });
}

fn neumann(c: &mut Criterion) {
    let pot = potential();
    let cfg = NeumannConfig::default();
    let mut g = c.benchmark_group("neumann_solve");
    g.sample_size(10);
    for rho in [1e-4, 1e-2] {
        g.bench_with_input(BenchmarkId::from_parameter(rho), &rho, |bench, &rho| {
            bench.iter(|| solve(&pot, 1.0 / 3.0, black_box(rho), &cfg).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, exchange, fock, neumann);
criterion_main!(benches);
