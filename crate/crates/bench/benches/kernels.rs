use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use matconc_core::estimators::sample_covariance;
use matconc_core::mc::{simulate, SimOptions};
use matconc_core::samplers::{
    build_covariance, sample_vectors, CovarianceSpec, Ensemble, ScalarLaw, SpectrumSpec, VectorLaw, VectorModel,
};
use matconc_core::subsample::{exact_subsample_moments, SubsampleInput};
use matconc_core::{RectMatrix, SeedSpec, SymMatrix};

fn random_sym(dim: usize, seed: u64) -> SymMatrix {
    let x = RectMatrix::new(gaussian(dim, dim, seed)).unwrap();
    let m = x.as_dmatrix();
    SymMatrix::from_dmatrix((m + m.transpose()) * 0.5).unwrap()
}

fn gaussian(rows: usize, cols: usize, seed: u64) -> nalgebra::DMatrix<f64> {
    let spec = CovarianceSpec {
        spectrum: SpectrumSpec::Explicit { eigenvalues: vec![1.0; rows] },
        random_basis: false,
        basis_seed: 0,
    };
    let model = VectorModel::new(VectorLaw::Gaussian, build_covariance(&spec).unwrap()).unwrap();
    sample_vectors(&model, cols, SeedSpec::new(seed, 0))
}

fn spectral(c: &mut Criterion) {
    let mut g = c.benchmark_group("spectral");
    for dim in [10, 50, 200] {
        let a = random_sym(dim, 1);
        g.bench_with_input(BenchmarkId::new("op_norm", dim), &a, |b, a| b.iter(|| black_box(a).op_norm()));
        g.bench_with_input(BenchmarkId::new("eig", dim), &a, |b, a| b.iter(|| black_box(a).eig().unwrap()));
    }
    g.finish();
}

fn covariance(c: &mut Criterion) {
    let spec = CovarianceSpec {
        spectrum: SpectrumSpec::TargetRank { dim: 50, erank: 10.0 },
        random_basis: true,
        basis_seed: 3,
    };
    let model = VectorModel::new(VectorLaw::StudentT { dof: 5.0 }, build_covariance(&spec).unwrap()).unwrap();
    let x = sample_vectors(&model, 1024, SeedSpec::new(5, 0));
    c.bench_function("sample_covariance_d50_n1024", |b| b.iter(|| sample_covariance(black_box(&x)).unwrap()));
}

fn monte_carlo(c: &mut Criterion) {
    let mats: Vec<SymMatrix> = (0..50).map(|k| random_sym(10, 100 + k)).collect();
    let e = Ensemble::scalar_heavy(mats, ScalarLaw::StudentT { dof: 5.0 }).unwrap();
    let opts = SimOptions {
        symmetrize: true,
        truncation: Some(1.0),
        directions: None,
    };
    c.bench_function("simulate_n50_d10_200_trials", |b| {
        b.iter(|| simulate(black_box(&e), 200, SeedSpec::new(9, 0), &opts).unwrap())
    });
}

fn subsampling(c: &mut Criterion) {
    let b_mat = RectMatrix::new(gaussian(6, 12, 11)).unwrap();
    let input = SubsampleInput::new(b_mat, 0.3, SeedSpec::new(1, 0)).unwrap();
    c.bench_function("exact_subsample_d12", |b| b.iter(|| exact_subsample_moments(black_box(&input)).unwrap()));
}

criterion_group!(benches, spectral, covariance, monte_carlo, subsampling);
criterion_main!(benches);
