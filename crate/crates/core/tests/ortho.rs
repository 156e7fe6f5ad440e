mod common;

use common::*;
use nalgebra::DMatrix;
use proptest::prelude::*;
use z2flow::ortho::*;
use z2flow::*;

fn tol() -> Tolerance {
    Tolerance::default()
}

fn orth(m: DMatrix<f64>) -> OrthogonalMatrix {
    OrthogonalMatrix::new(m).unwrap()
}

fn standard(n: usize) -> ComplexStructure {
    ComplexStructure::standard(n).unwrap()
}

/// Rank-one reflection `1 - 2vvᵀ`.
fn reflection(v: &[f64]) -> OrthogonalMatrix {
    let v = nalgebra::DVector::from_column_slice(v).normalize();
    let n = v.len();
    orth(DMatrix::identity(n, n) - &v * v.transpose() * 2.0)
}

#[test]
fn identity_has_trivial_index() {
    let (o, j) = (OrthogonalMatrix::identity(6), standard(6));
    assert_eq!(j_det(&o), Z2::ZERO);
    for f in KernelFormula::ALL {
        assert_eq!(j_kernel(&o, &j, f, &tol()).unwrap(), Z2::ZERO);
    }
    let fz = factorize(&o, &j, &tol()).unwrap();
    assert_eq!(fz.value, Z2::ZERO);
    assert!(fz.k.norm() < 1e-12);
}

#[test]
fn single_reflection_has_odd_index() {
    let o = reflection(&[0.3, -1.0, 0.2, 0.5]);
    let j = standard(4);
    assert_eq!(j_det(&o), Z2::ONE);
    for f in KernelFormula::ALL {
        let c = j_kernel_count(&o, &j, f, &tol()).unwrap();
        assert_eq!(c.value, Z2::ONE, "{f:?}");
        assert_eq!(c.below, 2, "{f:?}");
    }
    let fz = factorize(&o, &j, &tol()).unwrap();
    assert_eq!(fz.value, Z2::ONE);
    assert_eq!(fz.kernel_dim, 2);
    // exactly one eigenvalue -1 of 1 + K
    let k2 = &fz.k + DMatrix::identity(4, 4) * 2.0;
    let small = z2flow::linalg::singular_values(&k2).iter().filter(|&&s| s < 1e-10).count();
    assert_eq!(small, 1);
}

#[test]
fn commutator_operator_of_reflection() {
    // 1 - ½OᵀJ[O,J] is the projection complementary to span{v, Jv}
    let v = nalgebra::DVector::from_column_slice(&[1.0, 2.0, 0.0, -1.0, 0.5, 0.0]).normalize();
    let o = reflection(v.as_slice());
    let j = standard(6);
    let (m, _) = kernel_operator(&o, &j, KernelFormula::Commutator);
    let jv = j.matrix() * &v;
    let p = &v * v.transpose() + &jv * jv.transpose();
    assert!((m - (DMatrix::identity(6, 6) - p)).norm() < 1e-12);
}

#[test]
fn commuting_orthogonal_factorizes_trivially() {
    let mut r = rng(5);
    // O = exp(A) with A commuting with J: A = X - JXJ for skew X
    let j = standard(8);
    let x = random_skew(&mut r, 8);
    let a = &x - j.matrix() * &x * j.matrix();
    let o = orth(a.exp());
    let fz = factorize(&o, &j, &tol()).unwrap();
    assert!((&fz.u - o.matrix()).norm() < 1e-10);
    assert!(fz.k.norm() < 1e-10);
    assert_eq!(fz.value, Z2::ZERO);
}

#[test]
fn householder_products_count_reflections() {
    let mut r = rng(11);
    for k in 0..9 {
        let mut m = DMatrix::identity(10, 10);
        for _ in 0..k {
            m = householder(&mut r, 10) * m;
        }
        let o = orth(m);
        assert_eq!(j_det(&o), Z2::from_count(k));
        for f in KernelFormula::ALL {
            assert_eq!(j_kernel(&o, &standard(10), f, &tol()).unwrap(), Z2::from_count(k));
        }
    }
}

#[test]
fn identities_for_equal_and_opposite_structures() {
    let j = standard(6);
    assert!(verify_pair_identities(&j, &j).unwrap().max() < 1e-14);
    assert!(verify_pair_identities(&j, &j.neg()).unwrap().max() < 1e-14);
}

#[test]
fn odd_dimension_refused() {
    assert!(ComplexStructure::standard(3).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn all_formulas_match_determinant(seed in 0u64..100_000, half in 1usize..12) {
        let n = 2 * half;
        let mut r = rng(seed);
        let mut m = random_orthogonal(&mut r, n);
        if seed % 2 == 0 {
            m = householder(&mut r, n) * m;
        }
        let o = orth(m);
        let j = ComplexStructure::new({
            let q = random_orthogonal(&mut r, n);
            &q * standard(n).matrix() * q.transpose()
        }).unwrap();
        let d = j_det(&o);
        prop_assert_eq!(d, Z2::from_count((o.matrix().determinant() < 0.0) as usize));
        for f in KernelFormula::ALL {
            prop_assert_eq!(j_kernel(&o, &j, f, &tol()).unwrap(), d);
        }
        let fz = factorize(&o, &j, &tol()).unwrap();
        prop_assert_eq!(fz.value, d);
        prop_assert!(fz.residuals.max() < 1e-9);
    }

    #[test]
    fn determinant_is_a_homomorphism(seed in 0u64..100_000, n in 1usize..20) {
        let mut r = rng(seed);
        let a = random_orthogonal(&mut r, n) * householder(&mut r, n);
        let b = random_orthogonal(&mut r, n);
        let (oa, ob) = (orth(a.clone()), orth(b.clone()));
        prop_assert_eq!(j_det(&orth(a * b)), j_det(&oa) + j_det(&ob));
    }

    #[test]
    fn pair_identities_hold(seed in 0u64..100_000, half in 1usize..12) {
        let n = 2 * half;
        let mut r = rng(seed);
        let q = random_orthogonal(&mut r, n);
        let j0 = standard(n);
        let j1 = ComplexStructure::new(&q * j0.matrix() * q.transpose()).unwrap();
        prop_assert!(verify_pair_identities(&j0, &j1).unwrap().max() < 1e-10);
    }

    // multiplicities of (J₀+J₁)² strictly between -4 and 0 are multiples of 4
    #[test]
    fn square_sum_multiplicities(seed in 0u64..100_000, half in 1usize..12) {
        let n = 2 * half;
        let mut r = rng(seed);
        let q = random_orthogonal(&mut r, n);
        let j0 = standard(n);
        let j1 = ComplexStructure::new(&q * j0.matrix() * q.transpose()).unwrap();
        for (c, m) in square_sum_clusters(&j0, &j1, -4.0, 0.0, 1e-8) {
            prop_assert!(m % 4 == 0, "cluster {} has multiplicity {}", c, m);
        }
    }
}
