use tangentcat::dbundle::check_universality;
use tangentcat::polycore::rational;
use tangentcat::tangent::{lift_l, zero_0};
use tangentcat::{
    is_linear_morphism, mu_map, pullback_bundle, tangent_bundle, tangent_of_bundle, trivial_bundle,
    verify_bundle, DiffBundle, PolyMap, Polynomial, Space, Verdict,
};

fn with_lambda(b: &DiffBundle, lambda: PolyMap) -> DiffBundle {
    DiffBundle::new(
        b.total().clone(),
        b.base().clone(),
        b.base_coords().to_vec(),
        b.sigma().clone(),
        b.zeta().clone(),
        lambda,
    )
    .unwrap()
}

fn line_bundle() -> DiffBundle {
    trivial_bundle(&Space::euclidean(1), 1)
}

#[test]
fn constructors_are_bundles() {
    for n in 1..=3 {
        let r = verify_bundle(&tangent_bundle(n));
        assert!(r.passed(), "{r}");
    }
    for (n, k) in [(1, 0), (1, 1), (2, 1), (1, 2), (2, 2)] {
        let b = trivial_bundle(&Space::euclidean(n), k);
        assert!(verify_bundle(&b).passed());
        assert!(verify_bundle(&tangent_of_bundle(&b)).passed());
    }
    assert!(verify_bundle(&tangent_of_bundle(&tangent_bundle(1))).passed());
}

#[test]
fn squared_lift_breaks_axiom_2() {
    let (x, w) = (Polynomial::var(2, 0), Polynomial::var(2, 1));
    let z = Polynomial::zero(2);
    let lambda = PolyMap::new(2, vec![x, z.clone(), z, &w * &w]).unwrap();
    let r = verify_bundle(&with_lambda(&line_bundle(), lambda));
    let first = r.first_failure().unwrap();
    assert_eq!(first.anchor, "bundle axiom 2");
    assert_eq!(first.verdict, Verdict::Fail);
    assert!(first.witness.is_some());
}

#[test]
fn mu_formulas() {
    // ((x, w₁), (x, w₂)) on the fibre product (x, w₁, w₂).
    assert_eq!(
        mu_map(&line_bundle()).unwrap().to_string(),
        "(x1, x3, 0, x2)"
    );
    assert_eq!(
        mu_map(&tangent_bundle(1)).unwrap().to_string(),
        "(x1, x3, 0, x2)"
    );
}

#[test]
fn universality_survives_a_doubled_lift() {
    let b = line_bundle();
    assert!(check_universality(&b).passed());
    assert!(check_universality(&tangent_bundle(1)).passed());
    let doubled = b
        .lambda()
        .then(
            &PolyMap::new(
                4,
                (0..4)
                    .map(|i| {
                        let v = Polynomial::var(4, i);
                        if i == 3 {
                            v.scale(&rational(2))
                        } else {
                            v
                        }
                    })
                    .collect(),
            )
            .unwrap(),
        )
        .unwrap();
    let r = check_universality(&with_lambda(&b, doubled));
    assert!(r.passed(), "{r}");
}

#[test]
fn tangent_of_the_tangent_bundle() {
    let tt = tangent_of_bundle(&tangent_bundle(1));
    assert_eq!(tt.q().to_string(), "(x1, x3)");
}

#[test]
fn linear_morphisms() {
    let tm = tangent_bundle(1);
    let ttm = tangent_of_bundle(&tm);
    assert!(is_linear_morphism(&lift_l(1), &zero_0(1), &tm, &ttm));
    let id = PolyMap::identity(2);
    assert!(is_linear_morphism(&id, &PolyMap::identity(1), &tm, &tm));
    let (x, t) = (Polynomial::var(2, 0), Polynomial::var(2, 1));
    let square = PolyMap::new(2, vec![x, &t * &t]).unwrap();
    assert!(!is_linear_morphism(
        &square,
        &PolyMap::identity(1),
        &tm,
        &tm
    ));
}

#[test]
fn pullbacks() {
    let e = line_bundle();
    let (same, _) = pullback_bundle(&PolyMap::identity(1), &e).unwrap();
    assert!(same.same_structure(&e));

    let tm = tangent_bundle(1);
    let q_star = pullback_bundle(&PolyMap::selection(2, &[0]).unwrap(), &tm)
        .unwrap()
        .0;
    assert_eq!(q_star.total_dim(), 3);
    assert!(verify_bundle(&q_star).passed());

    let constant = PolyMap::new(2, vec![Polynomial::constant(2, rational(3))]).unwrap();
    let (pb, mor) = pullback_bundle(&constant, &e).unwrap();
    assert!(verify_bundle(&pb).passed());
    assert!(is_linear_morphism(&mor.top, &mor.bottom, &pb, &e));
}
