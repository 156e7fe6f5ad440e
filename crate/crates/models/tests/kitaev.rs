use nalgebra::{Complex, DMatrix};
use proptest::prelude::*;
use z2flow::path::{sf2_path_windowed_with, PathOptions};
use z2flow::{Tolerance, Z2};
use z2flow_models::bdg::{bdg_residual, from_majorana, hermitian_eigenvalues, majorana_rep, C64};
use z2flow_models::disorder::symmetry_residuals;
use z2flow_models::kitaev::{
    apply_gauge, clean_hamiltonian, flux_path, gauge_function, kitaev_disorder,
};
use z2flow_models::*;

fn open(n: usize, mu: f64) -> KitaevConfig {
    KitaevConfig::new(n, mu, Boundary::OpenDirichlet)
}

fn ring(n: usize, mu: f64) -> KitaevConfig {
    KitaevConfig::new(n, mu, Boundary::Periodic)
}

fn c(x: f64) -> C64 {
    Complex::new(x, 0.0)
}

#[test]
fn symmetry_suite_passes() {
    for (n, mu) in [(20, 0.0), (20, 0.5), (12, 0.3)] {
        let items = symmetry_suite(n, mu, &[0.0, 0.37, 0.5, 1.23, -0.8]).unwrap();
        for it in &items {
            assert!(it.passed, "N={n} mu={mu}: {} residual {:.3e} > {:.3e}", it.name, it.residual, it.limit);
        }
    }
}

#[test]
fn gauge_is_zero_without_flux() {
    let g = gauge_transform(&open(10, 0.2), 0.0).unwrap();
    assert!(g.g.iter().all(|&x| x == 0.0));
    assert_eq!(g.residual, 0.0);
}

#[test]
fn gauge_residual_at_generic_flux() {
    let cfg = open(15, 0.4);
    let g = gauge_transform(&cfg, 0.37).unwrap();
    assert!(g.residual <= 1e-10, "{}", g.residual);
    let h = clean_hamiltonian(&cfg, FluxGauge::local(0.37));
    let ht = clean_hamiltonian(&cfg, FluxGauge::nonlocal(0.37));
    let a = hermitian_eigenvalues(&h);
    let b = hermitian_eigenvalues(&ht);
    for (x, y) in a.iter().zip(&b) {
        assert!((x - y).abs() < 1e-9);
    }
}

#[test]
fn propagated_gauge_matches_closed_form_up_to_constant() {
    let cfg = open(8, 0.0);
    let h = clean_hamiltonian(&cfg, FluxGauge::local(0.61));
    let ht = clean_hamiltonian(&cfg, FluxGauge::nonlocal(0.61));
    let (g, residual) = kitaev::solve_gauge(&h, &ht);
    assert!(residual < 1e-12);
    let closed = gauge_function(&cfg, 0.61);
    let shift = g[0] - closed[0];
    for (a, b) in g.iter().zip(&closed) {
        let d = (a - b - shift).rem_euclid(2.0 * std::f64::consts::PI);
        assert!(d < 1e-12 || (2.0 * std::f64::consts::PI - d) < 1e-12);
    }
}

#[test]
fn full_flux_gauge_is_the_sign_flip() {
    let cfg = open(9, 0.3);
    let g = gauge_function(&cfg, 1.0);
    let h1 = clean_hamiltonian(&cfg, FluxGauge::local(1.0));
    let ht0 = clean_hamiltonian(&cfg, FluxGauge::nonlocal(0.0));
    let flipped = DMatrix::from_fn(ht0.nrows(), ht0.ncols(), |r, s| {
        if (r ^ s) & 1 == 1 {
            -ht0[(r, s)]
        } else {
            ht0[(r, s)]
        }
    });
    let d = apply_gauge(&h1, &g) - flipped;
    assert!(d.iter().all(|z| z.norm() < 1e-12));
}

#[test]
fn ring_flux_is_not_a_gauge() {
    match gauge_transform(&ring(6, 0.2), 0.37) {
        Err(ModelError::NotGaugeEquivalent { residual }) => assert!(residual > 1e-3),
        other => panic!("expected NotGaugeEquivalent, got {other:?}"),
    }
    assert!(gauge_transform(&ring(6, 0.2), 0.0).is_ok());
    assert!(gauge_transform(&ring(6, 0.2), 2.0).is_ok());
}

#[test]
fn majorana_of_single_cell() {
    let s3 = DMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(-1.0)]);
    let t = majorana_rep(&s3).unwrap();
    assert!((t[(0, 1)] + t[(1, 0)]).abs() < 1e-15);
    assert!((t[(0, 1)].abs() - 1.0).abs() < 1e-15);
    assert!(from_majorana(&t).iter().zip(s3.iter()).all(|(a, b)| (a - b).norm() < 1e-15));

    let i = Complex::new(0.0, 1.0);
    let s2 = DMatrix::from_row_slice(2, 2, &[c(0.0), -i, i, c(0.0)]);
    assert!(matches!(majorana_rep(&s2), Err(ModelError::NotBdGSymmetric { .. })));
}

fn random_bdg(seed: u64, orbitals: usize) -> DMatrix<C64> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let n = 2 * orbitals;
    let m = DMatrix::from_fn(n, n, |_, _| Complex::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
    let h = (&m + m.adjoint()) * c(0.5);
    DMatrix::from_fn(n, n, |a, b| (h[(a, b)] - h[(a ^ 1, b ^ 1)].conj()) * 0.5)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn majorana_round_trip(seed in any::<u64>(), orbitals in 1usize..12) {
        let h = random_bdg(seed, orbitals);
        prop_assert!(bdg_residual(&h) < 1e-15);
        let t = majorana_rep(&h).unwrap();
        let back = from_majorana(&t);
        let err = (&back - &h).iter().map(|z| z.norm()).fold(0.0, f64::max);
        prop_assert!(err < 1e-14, "{}", err);
    }

    #[test]
    fn disorder_is_symmetric(seed in any::<u64>(), n in 2usize..10) {
        let cfg = ring(n, 0.3).with_disorder(0.1, seed);
        let v = kitaev_disorder(&cfg);
        let (ph, tr) = symmetry_residuals(&v);
        prop_assert!(ph < 1e-15 && tr < 1e-15);
        let norm = hermitian_eigenvalues(&v).iter().map(|x| x.abs()).fold(0.0, f64::max);
        prop_assert!((norm - 1.0).abs() < 1e-12);
    }
}

#[test]
fn disorder_is_reproducible() {
    let cfg = ring(7, 0.3).with_disorder(0.1, 42);
    let a = kitaev_disorder(&cfg);
    let b = kitaev_disorder(&cfg);
    assert!(a.iter().zip(b.iter()).all(|(x, y)| x.re.to_bits() == y.re.to_bits() && x.im.to_bits() == y.im.to_bits()));
    let other = kitaev_disorder(&cfg.clone().with_disorder(0.1, 43));
    assert!((a - other).norm() > 1e-3);
}

#[test]
fn halfline_kernels_at_dimerized_point() {
    let s = halfline_split(&open(20, 0.0)).unwrap();
    assert!(s.residual <= 1e-12);
    assert_eq!((s.left_kernel.near_cut, s.left_kernel.far), (1, 1));
    assert_eq!((s.right_kernel.near_cut, s.right_kernel.far), (1, 1));
    assert_eq!(s.sum_kernel.near_cut, 2);
}

#[test]
fn halfline_edge_splitting() {
    let cfg = open(40, 0.5);
    let s = halfline_split(&cfg).unwrap();
    assert_eq!(s.sum_kernel.near_cut, 2);
    let h0 = kitaev_hamiltonian(&cfg, FluxGauge::local(0.0)).unwrap();
    let h1 = kitaev_hamiltonian(&cfg, FluxGauge::local(1.0)).unwrap();
    let mut sv: Vec<f64> = hermitian_eigenvalues(&(h0 + h1)).iter().map(|x| x.abs()).collect();
    sv.sort_by(|a, b| a.total_cmp(b));
    // two cut modes and two far-end modes of the truncation
    assert!(sv[3] <= 10.0 * 0.5f64.powi(40), "{:?}", &sv[..5]);
    assert!(sv[4] >= 0.5 * cfg.bulk_gap(), "{:?}", &sv[..5]);
}

#[test]
fn flux_flow_on_ring() {
    let tol = Tolerance::default();
    let opts = PathOptions::default();
    for (n, mu, expect) in [(20, 0.0, 1), (30, 0.5, 1), (30, 1.5, 0)] {
        let r = flux_sf2(&ring(n, mu), &tol, &opts).unwrap();
        assert_eq!(r.sf2.value.value(), expect, "N={n} mu={mu}");
        assert_eq!(r.straight_line, r.sf2.value);
        assert_eq!(r.endpoint_value, r.sf2.value);
    }
}

#[test]
fn trivial_phase_has_no_crossing() {
    // dense scan: the spectrum stays away from 0 for the whole flux insertion
    let cfg = ring(30, 1.5);
    let min = (0..=200)
        .map(|k| {
            let h = kitaev_hamiltonian(&cfg, FluxGauge::local(k as f64 / 200.0)).unwrap();
            hermitian_eigenvalues(&h).iter().map(|x| x.abs()).fold(f64::INFINITY, f64::min)
        })
        .fold(f64::INFINITY, f64::min);
    assert!(min > 0.2, "{min}");
}

#[test]
fn open_chain_endpoints_are_refused() {
    let err = flux_sf2(&open(10, 0.0), &Tolerance::default(), &PathOptions::default()).unwrap_err();
    assert!(matches!(err, ModelError::GapClosed { .. }), "{err}");
}

#[test]
fn flux_reflection_symmetry() {
    let cfg = ring(16, 0.3);
    let path = flux_path(&cfg).unwrap();
    let tol = Tolerance::default();
    let opts = PathOptions::default();
    for a0 in [0.3, 0.45, 0.7] {
        let l = sf2_path_windowed_with(&path.restrict(0.0, a0), &tol, &opts).unwrap().value;
        let r = sf2_path_windowed_with(&path.restrict(1.0 - a0, 1.0), &tol, &opts).unwrap().value;
        assert_eq!(l, r, "alpha0 = {a0}");
    }
}

#[test]
fn defect_parity() {
    let r = defect_kernel_parity(&ring(20, 0.0)).unwrap();
    assert_eq!(r.value, Z2::ONE);
    assert_eq!(r.kernel.near_zero % 4, 2);
    assert!(r.time_reversal_residual < 1e-12);
    assert_eq!(defect_kernel_parity(&ring(40, 0.3)).unwrap().value, Z2::ONE);
    assert_eq!(defect_kernel_parity(&ring(40, 1.5)).unwrap().value, Z2::ZERO);
    // the open chain also has end modes, which are not counted
    let o = defect_kernel_parity(&open(20, 0.0)).unwrap();
    assert_eq!((o.value, o.kernel.near_cut, o.kernel.far), (Z2::ONE, 2, 2));
}

#[test]
fn disordered_results_are_stable() {
    let tol = Tolerance::default();
    let opts = PathOptions::default();
    for seed in 0..4u64 {
        for mu in [0.0, 0.5] {
            let base = ring(20, mu);
            let cfg = base.clone().with_disorder(0.2 * base.bulk_gap(), seed);
            assert_eq!(flux_sf2(&cfg, &tol, &opts).unwrap().sf2.value, Z2::ONE, "seed {seed} mu {mu}");
            assert_eq!(defect_kernel_parity(&cfg).unwrap().value, Z2::ONE, "seed {seed} mu {mu}");
        }
    }
}
