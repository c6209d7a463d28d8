use std::sync::Arc;

use num_bigint::BigInt;
use proptest::prelude::*;

use starmod_core::algebra::{Algebra, Element};
use starmod_core::matrix::StarMatrix;
use starmod_core::picard::{
    compose_witnesses, morita_check, outequiv_compose, outequiv_normal_form, CharacteristicClass, CohomologyModel,
    LatticeAction, MoritaWitness, OutEquivElement,
};
use starmod_core::sample::Sampler;
use starmod_core::scalar::{rational, GaussianRational};
use starmod_core::star::StarProduct;
use starmod_core::FormalSeries;

fn gq() -> impl Strategy<Value = GaussianRational> {
    (-12i64..12, 1i64..7, -12i64..12, 1i64..7)
        .prop_map(|(a, b, c, d)| GaussianRational::new(rational(a, b), rational(c, d)))
}

fn outequiv(d1: usize, k: usize) -> impl Strategy<Value = OutEquivElement> {
    (prop::collection::vec(gq(), d1), prop::collection::vec(prop::collection::vec(gq(), d1), k))
        .prop_map(|(v0, higher)| outequiv_normal_form(&OutEquivElement { v0, higher }))
}

fn model(d1: usize) -> CohomologyModel {
    CohomologyModel::new(d1, 1, vec![rational(1, 1)], vec![], true).unwrap()
}

fn torus_star(theta: (i64, i64), k: usize) -> Arc<StarProduct> {
    StarProduct::moyal(&Algebra::torus(rational(theta.0, theta.1)), k)
}

fn random_matrix(star: &Arc<StarProduct>, n: usize, sampler: &mut Sampler) -> StarMatrix {
    let entries = (0..n * n).map(|_| sampler.sparse_series(star.algebra(), star.order())).collect();
    StarMatrix::new(star, n, n, entries).unwrap()
}

fn swap_model() -> CohomologyModel {
    let swap = LatticeAction { name: "swap".into(), a1: vec![vec![0, 1], vec![1, 0]], a2: vec![vec![0, 1], vec![1, 0]] };
    CohomologyModel::new(2, 2, vec![rational(1, 1), rational(3, 1)], vec![swap], true).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn gaussian_rationals_round_trip_through_strings(x in gq()) {
        let s = x.to_string();
        prop_assert_eq!(s.parse::<GaussianRational>().unwrap(), x);
    }

    #[test]
    fn gaussian_field_axioms(a in gq(), b in gq(), c in gq()) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!((&a * &b).conj(), &a.conj() * &b.conj());
        if let Some(inv) = a.inv() {
            prop_assert_eq!(&a * &inv, GaussianRational::from_ints(1, 0));
        }
    }

    #[test]
    fn star_matrix_product_is_associative(seed in any::<u64>(), theta in (-3i64..4, 1i64..4)) {
        let star = torus_star(theta, 3);
        let mut s = Sampler::new(seed);
        let (a, b, c) = (random_matrix(&star, 2, &mut s), random_matrix(&star, 2, &mut s), random_matrix(&star, 2, &mut s));
        prop_assert_eq!(a.mul(&b).unwrap().mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
    }

    #[test]
    fn adjoint_reverses_products(seed in any::<u64>(), theta in (-3i64..4, 1i64..4)) {
        let star = torus_star(theta, 3);
        let mut s = Sampler::new(seed);
        let (a, b) = (random_matrix(&star, 2, &mut s), random_matrix(&star, 2, &mut s));
        prop_assert_eq!(a.mul(&b).unwrap().adjoint(), b.adjoint().mul(&a.adjoint()).unwrap());
    }

    #[test]
    fn plane_matrix_product_is_associative(seed in any::<u64>()) {
        let star = StarProduct::moyal(&Algebra::canonical_plane(1), 3);
        let mut s = Sampler::new(seed);
        let (a, b, c) = (random_matrix(&star, 2, &mut s), random_matrix(&star, 2, &mut s), random_matrix(&star, 2, &mut s));
        prop_assert_eq!(a.mul(&b).unwrap().mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
    }

    #[test]
    fn unipotent_matrices_are_star_invertible(seed in any::<u64>()) {
        let star = torus_star((1, 2), 4);
        let t = star.algebra().clone();
        let mut s = Sampler::new(seed);
        let mut entries = StarMatrix::identity(&star, 2).entries().to_vec();
        for e in entries.iter_mut() {
            let mut r = s.series(&t, 4);
            *r.coeff_mut(0) = Element::zero(&t);
            *e = &*e + &r;
        }
        entries[1] = &entries[1] + &FormalSeries::constant(s.sparse_element(&t), 4);
        let a = StarMatrix::new(&star, 2, 2, entries).unwrap();
        let inv = a.star_inverse(None).unwrap();
        prop_assert!(a.mul(&inv).unwrap().first_difference(&StarMatrix::identity(&star, 2)).is_none());
        prop_assert!(inv.mul(&a).unwrap().first_difference(&StarMatrix::identity(&star, 2)).is_none());
    }

    #[test]
    fn normal_form_is_idempotent(v0 in prop::collection::vec(gq(), 0..4)) {
        let e = OutEquivElement { v0, higher: vec![] };
        let once = outequiv_normal_form(&e);
        prop_assert_eq!(outequiv_normal_form(&once), once.clone());
        for (x, y) in once.v0.iter().zip(&e.v0) {
            prop_assert!((y - x).as_integer().is_some());
        }
    }

    #[test]
    fn outequiv_is_an_abelian_group(
        (d1, k, a, b, c) in (0usize..=3, 0usize..=4)
            .prop_flat_map(|(d1, k)| (Just(d1), Just(k), outequiv(d1, k), outequiv(d1, k), outequiv(d1, k)))
    ) {
        let m = model(d1);
        let id = OutEquivElement::identity(d1, k);
        let ab = outequiv_compose(&m, &a, &b).unwrap();
        prop_assert_eq!(outequiv_compose(&m, &ab, &c).unwrap(), outequiv_compose(&m, &a, &outequiv_compose(&m, &b, &c).unwrap()).unwrap());
        prop_assert_eq!(&ab, &outequiv_compose(&m, &b, &a).unwrap());
        prop_assert_eq!(outequiv_compose(&m, &a, &id).unwrap(), a.clone());
        prop_assert_eq!(outequiv_compose(&m, &a, &a.inverse()).unwrap(), id);
    }

    #[test]
    fn morita_is_reflexive_and_symmetric(
        order0 in prop::collection::vec(gq(), 2),
        higher in prop::collection::vec(gq(), 2),
        shift in prop::collection::vec(-5i64..5, 2),
        swapped in any::<bool>(),
    ) {
        let m = swap_model();
        let c = CharacteristicClass::from_model(&m, vec![order0.clone(), higher.clone()]).unwrap();
        let refl = morita_check(&c, &c, &m).unwrap();
        prop_assert_eq!(refl.witness, Some(MoritaWitness { action: "id".into(), class: vec![BigInt::from(0); 2] }));

        // c' with A2·c'₀ = c₀ + shift, so (ψ, shift) witnesses (c, c')
        let perm = |v: &[GaussianRational]| if swapped { vec![v[1].clone(), v[0].clone()] } else { v.to_vec() };
        let shifted: Vec<GaussianRational> =
            order0.iter().zip(&shift).map(|(x, &d)| x + &GaussianRational::from_ints(d, 0)).collect();
        let c2 = CharacteristicClass::new(perm(&c.leading), vec![perm(&shifted), perm(&higher)]).unwrap();
        let forward = morita_check(&c, &c2, &m).unwrap();
        prop_assert!(forward.equivalent);
        let back = morita_check(&c2, &c, &m).unwrap();
        prop_assert!(back.equivalent);
        let composed = compose_witnesses(&m, forward.witness.as_ref().unwrap(), back.witness.as_ref().unwrap(), [&c, &c2, &c]).unwrap();
        prop_assert_eq!(composed.class, vec![BigInt::from(0); 2]);
    }

    #[test]
    fn line_shifts_compose_additively(a in -6i64..6, b in -6i64..6, base in gq()) {
        let m = model(2);
        let class = |x: GaussianRational| CharacteristicClass::from_model(&m, vec![vec![x]]).unwrap();
        let c0 = class(base.clone());
        let c1 = class(&base + &GaussianRational::from_ints(a, 0));
        let c2 = class(&base + &GaussianRational::from_ints(a + b, 0));
        let w1 = morita_check(&c0, &c1, &m).unwrap().witness.unwrap();
        let w2 = morita_check(&c1, &c2, &m).unwrap().witness.unwrap();
        let w = compose_witnesses(&m, &w1, &w2, [&c0, &c1, &c2]).unwrap();
        prop_assert_eq!(w.class, vec![BigInt::from(a + b)]);
    }
}
