//! Property tests for the arithmetic and normal-form invariants.

use std::sync::Arc;

use proptest::prelude::*;

use kisin::field::FinField;
use kisin::matrix::{Membership, SeriesMatrix};
use kisin::module::{hom_space, Height};
use kisin::series::{USeries, Val};

fn fields() -> Vec<Arc<FinField>> {
    vec![
        FinField::prime(2).unwrap(),
        FinField::prime(3).unwrap(),
        FinField::prime(5).unwrap(),
        FinField::extension(2, 2).unwrap(),
        FinField::extension(3, 2).unwrap(),
    ]
}

fn series_strategy() -> impl Strategy<Value = (usize, Vec<(i64, i64)>)> {
    (0usize..5, proptest::collection::vec((-4i64..8, 0i64..25), 0..6))
}

fn lookup(idx: usize) -> Arc<FinField> {
    fields()[idx % fields().len()].clone()
}

proptest! {
    #[test]
    fn phi_is_a_ring_homomorphism((fi, ta) in series_strategy(), (_, tb) in series_strategy()) {
        let field = lookup(fi);
        let a = USeries::from_terms(&field, &ta);
        let b = USeries::from_terms(&field, &tb);
        let sum_phi = a.add(&b).unwrap().phi();
        let phi_sum = a.phi().add(&b.phi()).unwrap();
        prop_assert_eq!(sum_phi, phi_sum);
        let prod_phi = a.mul(&b).unwrap().phi();
        let phi_prod = a.phi().mul(&b.phi()).unwrap();
        prop_assert_eq!(prod_phi, phi_prod);
    }

    #[test]
    fn valuation_arithmetic((fi, ta) in series_strategy(), (_, tb) in series_strategy()) {
        let field = lookup(fi);
        let a = USeries::from_terms(&field, &ta);
        let b = USeries::from_terms(&field, &tb);
        let ab = a.mul(&b).unwrap();
        match (a.val(), b.val()) {
            (Val::Exact(va), Val::Exact(vb)) => {
                prop_assert_eq!(ab.val(), Val::Exact(va + vb));
            }
            _ => prop_assert!(ab.is_zero_exact()),
        }
        // ultrametric inequality, with equality at distinct valuations
        let s = a.add(&b).unwrap();
        if let (Val::Exact(va), Val::Exact(vb)) = (a.val(), b.val()) {
            if va != vb {
                prop_assert_eq!(s.val(), Val::Exact(va.min(vb)));
            } else if let Val::Exact(vs) = s.val() {
                prop_assert!(vs >= va);
            }
        }
    }

    #[test]
    fn inverse_is_two_sided((fi, ta) in series_strategy()) {
        let field = lookup(fi);
        let a = USeries::from_terms(&field, &ta);
        prop_assume!(!a.is_zero_to_prec());
        let inv = a.inv_to(16).unwrap();
        let one = USeries::one(field.clone());
        let left = a.mul(&inv).unwrap();
        let right = inv.mul(&a).unwrap();
        prop_assert!(left.agrees_with(&one, 10));
        prop_assert!(right.agrees_with(&one, 10));
    }
}

fn matrix_strategy() -> impl Strategy<Value = (usize, Vec<Vec<(i64, i64)>>)> {
    (0usize..3, proptest::collection::vec(proptest::collection::vec((0i64..5, 0i64..25), 0..3), 4))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn smith_reassembles_and_divisors_match((fi, data) in matrix_strategy()) {
        let field = lookup(fi);
        let entries: Vec<USeries> = data.iter().map(|t| USeries::from_terms(&field, t)).collect();
        let a = SeriesMatrix::new(field.clone(), 2, 2, entries).unwrap();
        let det = a.determinant().unwrap();
        prop_assume!(!det.is_zero_to_prec());
        let snf = a.smith_normal_form(30).unwrap();
        // nondecreasing divisors summing to the determinant valuation
        prop_assert!(snf.divisors.windows(2).all(|w| w[0] <= w[1]));
        let sum: i64 = snf.divisors.iter().sum();
        prop_assert_eq!(det.val().exact(), Some(sum));
        // reassembly to precision
        let diag = SeriesMatrix::diag_monomials(field.clone(), &snf.divisors);
        let back = snf.left.mul(&diag).unwrap().mul(&snf.right).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                prop_assert!(back.at(i, j).agrees_with(a.at(i, j), 12));
            }
        }
        // agreement with the minor-based route
        prop_assert_eq!(snf.divisors, a.divisors_via_minors().unwrap());
    }

    #[test]
    fn hnf_is_canonical((fi, data) in matrix_strategy(), (_, undata) in matrix_strategy()) {
        let field = lookup(fi);
        let entries: Vec<USeries> = data.iter().map(|t| USeries::from_terms(&field, t)).collect();
        let b = SeriesMatrix::new(field.clone(), 2, 2, entries).unwrap();
        prop_assume!(!b.determinant().unwrap().is_zero_to_prec());
        let h = SeriesMatrix::hnf_lattice(&b, 30).unwrap();
        // idempotent
        prop_assert_eq!(&SeriesMatrix::hnf_lattice(&h, 30).unwrap(), &h);
        // invariant under right multiplication by a unit matrix
        let uentries: Vec<USeries> = undata.iter().map(|t| USeries::from_terms(&field, t)).collect();
        let mut unit = SeriesMatrix::new(field.clone(), 2, 2, uentries).unwrap();
        unit.set(0, 0, USeries::one(field.clone()).add(unit.at(0, 0)).unwrap().mul(&USeries::one(field.clone())).unwrap());
        // force unit determinant: make it unit triangular
        let tri = SeriesMatrix::from_fn(field.clone(), 2, 2, |i, j| {
            if i == j {
                USeries::one(field.clone())
            } else if i > j {
                unit.at(i, j).clone()
            } else {
                USeries::zero(field.clone())
            }
        });
        let bu = b.mul(&tri).unwrap();
        prop_assert_eq!(&SeriesMatrix::hnf_lattice(&bu, 30).unwrap(), &h);
        // invariant under augmentation by redundant generators
        let aug = b.hstack(&bu).unwrap();
        prop_assert_eq!(&SeriesMatrix::hnf_lattice(&aug, 30).unwrap(), &h);
    }

    #[test]
    fn membership_recovers_integral_coordinates((fi, data) in matrix_strategy(), (_, xdata) in matrix_strategy()) {
        let field = lookup(fi);
        let entries: Vec<USeries> = data.iter().map(|t| USeries::from_terms(&field, t)).collect();
        let b = SeriesMatrix::new(field.clone(), 2, 2, entries).unwrap();
        prop_assume!(!b.determinant().unwrap().is_zero_to_prec());
        let basis = SeriesMatrix::hnf_lattice(&b, 30).unwrap();
        let x: Vec<USeries> = xdata.iter().take(2).map(|t| USeries::from_terms(&field, t)).collect();
        let v = basis.mul_vec(&x).unwrap();
        match SeriesMatrix::solve_membership(&basis, &v, 30).unwrap() {
            Membership::Inside(coords) => {
                for (got, want) in coords.iter().zip(x.iter()) {
                    prop_assert!(got.agrees_with(want, 10));
                }
            }
            Membership::Outside => prop_assert!(false, "integral point reported outside"),
        }
    }

    #[test]
    fn inverse_laurent_is_involutive((fi, data) in matrix_strategy()) {
        let field = lookup(fi);
        let entries: Vec<USeries> = data.iter().map(|t| USeries::from_terms(&field, t)).collect();
        let a = SeriesMatrix::new(field.clone(), 2, 2, entries).unwrap();
        prop_assume!(!a.determinant().unwrap().is_zero_to_prec());
        let inv = a.inverse_laurent(40).unwrap();
        let back = inv.inverse_laurent(40).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                prop_assert!(back.at(i, j).agrees_with(a.at(i, j), 8));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn random_modules_validate_and_hom_bounded(seed in 0u64..512) {
        use rand_core::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let field = FinField::prime(if seed % 2 == 0 { 2 } else { 3 }).unwrap();
        let m = kisin::corpus::random_module(&mut rng, &field, 1, 2, 2, 1);
        prop_assert!(m.validate().unwrap().passed());
        let divs = m.divisors().unwrap();
        prop_assert!(divs.iter().all(|&a| (0..=2).contains(&a)));
        if seed % 8 == 0 {
            let homs = hom_space(&m, &m).unwrap();
            prop_assert!(homs.len() <= m.rank() * m.rank() * field.f() as usize);
            for h in &homs {
                prop_assert!(h.commutes_to(10).unwrap());
            }
        }
        // unbounded-height modules accept the same matrix
        let unb = m.with_height(Height::Unbounded);
        prop_assert!(unb.validate().unwrap().passed());
    }
}
