use matconc_core::estimators::aligned_eigvec;
use matconc_core::matcore::{
    effective_rank, hermitian_dilation, projector_distance, relative_rank, tj_operator, Spectrum,
};
use matconc_core::samplers::random_orthonormal;
use matconc_core::{RectMatrix, SeedSpec, SymMatrix};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

/// Descending spectrum with every adjacent gap at least `min_gap`.
fn gapped_spectrum(rng: &mut impl Rng, d: usize, min_gap: f64) -> Vec<f64> {
    let mut ev = Vec::with_capacity(d);
    let mut x: f64 = rng.random_range(0.0..1.0);
    for _ in 0..d {
        ev.push(x);
        x += min_gap + rng.random_range(0.0..2.0);
    }
    ev.reverse();
    ev
}

fn rotated(ev: &[f64], seed: SeedSpec) -> SymMatrix {
    let q = random_orthonormal(ev.len(), seed);
    let m = &q * DMatrix::from_diagonal(&DVector::from_column_slice(ev)) * q.transpose();
    SymMatrix::from_dmatrix((&m + m.transpose()) * 0.5).unwrap()
}

fn unit(rng: &mut impl Rng, d: usize) -> DVector<f64> {
    let v = DVector::from_fn(d, |_, _| rng.sample::<f64, _>(StandardNormal));
    v.normalize()
}

#[test]
fn effective_rank_on_diagonal_families() {
    let mut rng = SeedSpec::new(1, 0).rng();
    for d in 1..=12 {
        let flat = SymMatrix::from_diagonal(&vec![2.5; d]);
        assert!((effective_rank(&flat).unwrap() - d as f64).abs() < 1e-12);
        for _ in 0..50 {
            let diag: Vec<f64> = (0..d).map(|_| rng.random_range(0.0..3.0)).collect();
            if diag.iter().all(|&x| x == 0.0) {
                continue;
            }
            let r = effective_rank(&SymMatrix::from_diagonal(&diag)).unwrap();
            assert!((1.0 - 1e-12..=d as f64 + 1e-12).contains(&r));
            let max = diag.iter().cloned().fold(0.0, f64::max);
            let all_equal = diag.iter().all(|&x| (x - max).abs() < 1e-15);
            if !all_equal {
                assert!(r < d as f64 - 1e-12);
            }
        }
    }
}

#[test]
fn dilation_norm_is_top_singular_value() {
    let mut rng = SeedSpec::new(2, 0).rng();
    for _ in 0..1000 {
        let r = rng.random_range(1..7);
        let c = rng.random_range(1..7);
        let w = DMatrix::from_fn(r, c, |_, _| rng.sample::<f64, _>(StandardNormal));
        let smax = w.singular_values().max();
        let dil = hermitian_dilation(&RectMatrix::new(w).unwrap());
        assert!((dil.op_norm() - smax).abs() <= 1e-10 * smax.max(1e-300));
    }
}

#[test]
fn projector_identity_on_random_pairs() {
    let mut rng = SeedSpec::new(3, 0).rng();
    for _ in 0..1000 {
        let d = rng.random_range(1..8);
        let (u, v) = (unit(&mut rng, d), unit(&mut rng, d));
        let p = projector_distance(&u, &v).unwrap();
        assert!((p.projector.powi(2) + 2.0 * p.inner.powi(2) - 2.0).abs() < 1e-12);
        assert!(p.vector <= p.projector + 1e-12);
        let outer = &u * u.transpose() - &v * v.transpose();
        assert!((outer.norm() - p.projector).abs() < 1e-10);
    }
}

#[test]
fn tj_trace_and_norm_on_random_spectra() {
    let mut rng = SeedSpec::new(4, 0).rng();
    for case in 0..1000 {
        let d = rng.random_range(2..8);
        let ev = gapped_spectrum(&mut rng, d, 0.5);
        let sigma = rotated(&ev, SeedSpec::new(4, case + 1));
        let s = Spectrum::of(&sigma).unwrap();
        let j = rng.random_range(0..d);
        let t = tj_operator(&s, j).unwrap();
        let rr = relative_rank(&s, j).unwrap();
        let tst = sigma.congruence(&t);
        assert!((tst.trace() - rr.rank).abs() <= 1e-10 * rr.rank, "trace, case {case}");
        assert!((tst.op_norm() - rr.max_ratio).abs() <= 1e-10 * rr.max_ratio, "norm, case {case}");
    }
}

#[test]
fn relative_rank_lower_bound_and_scale_invariance() {
    let mut rng = SeedSpec::new(5, 0).rng();
    for _ in 0..500 {
        let d = rng.random_range(2..8);
        let ev = gapped_spectrum(&mut rng, d, 0.2);
        let j = rng.random_range(0..d);
        let s = Spectrum::of(&SymMatrix::from_diagonal(&ev)).unwrap();
        let rr = relative_rank(&s, j).unwrap();
        let ratio = ev[j] / rr.gap;
        if ev[j] >= rr.gap {
            assert!(rr.rank >= ratio && ratio >= 1.0);
        }
        let c = rng.random_range(0.01..100.0);
        let scaled: Vec<f64> = ev.iter().map(|x| c * x).collect();
        let rc = relative_rank(&Spectrum::of(&SymMatrix::from_diagonal(&scaled)).unwrap(), j).unwrap();
        assert!((rc.rank - rr.rank).abs() <= 1e-10 * rr.rank);
    }
}

#[test]
fn davis_kahan_chain_on_random_instances() {
    let mut rng = SeedSpec::new(6, 0).rng();
    for case in 0..1000 {
        let d = rng.random_range(2..7);
        let ev = gapped_spectrum(&mut rng, d, 0.5);
        let sigma = rotated(&ev, SeedSpec::new(6, case + 1));
        let eps = 10f64.powf(rng.random_range(-6.0..0.5));
        let e = DMatrix::from_fn(d, d, |_, _| rng.sample::<f64, _>(StandardNormal));
        let pert = (&e + e.transpose()) * (0.5 * eps);
        let sigma_hat = SymMatrix::from_dmatrix(sigma.as_dmatrix() + pert).unwrap();
        let j = rng.random_range(0..d);
        let a = aligned_eigvec(&sigma_hat, &sigma, j).unwrap();
        assert!(a.chain_holds(1e-10), "case {case}: {a:?}");
    }
}
