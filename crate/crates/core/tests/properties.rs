use proptest::prelude::*;
use tangentcat::dbundle::{pullback_bundle, tangent_of_bundle};
use tangentcat::json::{parse_polymap, to_json};
use tangentcat::polycore::ratio;
use tangentcat::tangent::{add_plus, fibre_power_cone, flip_c, lift_l, proj_p, zero_0};
use tangentcat::{
    check_effective, christoffel_connection, decompose_point, derive_horizontal, hom_add, hom_zero,
    is_linear_morphism, recompose_point, t_map, trivial_bundle, verify_bundle, ChristoffelTable,
    PolyMap, Polynomial, Rational, Space,
};

fn arb_rational() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=4).prop_map(|(n, d)| ratio(n, d))
}

fn arb_poly(n: usize, deg: u32) -> impl Strategy<Value = Polynomial> {
    prop::collection::vec((prop::collection::vec(0..=deg, n), arb_rational()), 0..4).prop_map(
        move |terms| {
            // Clip to total degree `deg` so composite degrees stay bounded.
            let terms = terms.into_iter().map(|(mut e, c)| {
                let mut left = deg;
                for x in &mut e {
                    *x = (*x).min(left);
                    left -= *x;
                }
                (e, c)
            });
            Polynomial::from_terms(n, terms).unwrap()
        },
    )
}

fn arb_map(dom: usize, cod: usize, deg: u32) -> impl Strategy<Value = PolyMap> {
    prop::collection::vec(arb_poly(dom, deg), cod).prop_map(move |c| PolyMap::new(dom, c).unwrap())
}

fn arb_point(n: usize) -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec(arb_rational(), n)
}

/// `T₂(f)(x, t₁, t₂) = (f(x), J t₁, J t₂)`.
fn t2_map(f: &PolyMap) -> PolyMap {
    let (n, m) = (f.dom(), f.cod());
    let tf = t_map(f);
    let leg = |k: usize| {
        let idx: Vec<usize> = (0..n).chain(k * n..(k + 1) * n).collect();
        PolyMap::selection(3 * n, &idx).unwrap().then(&tf).unwrap()
    };
    let (a, b) = (leg(1), leg(2));
    let comps = a.components()[..2 * m]
        .iter()
        .chain(&b.components()[m..])
        .cloned()
        .collect();
    PolyMap::new(3 * n, comps).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_laws(a in arb_poly(2, 2), b in arb_poly(2, 2), c in arb_poly(2, 2)) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
        prop_assert_eq!(&a * &Polynomial::one(2), a.clone());
    }

    #[test]
    fn canonical_form_is_idempotent(a in arb_poly(3, 3)) {
        let rebuilt = Polynomial::from_terms(
            3,
            a.terms().map(|(m, c)| (m.exponents().to_vec(), c.clone())),
        )
        .unwrap();
        prop_assert_eq!(&rebuilt, &a);
        let f = PolyMap::new(3, vec![a]).unwrap();
        prop_assert_eq!(parse_polymap(&to_json(&f)).unwrap(), f);
    }

    #[test]
    fn composition_commutes_with_evaluation(
        f in arb_map(2, 3, 2),
        g in arb_map(3, 2, 2),
        x in arb_point(2),
    ) {
        let fg = f.then(&g).unwrap();
        prop_assert_eq!(fg.eval(&x).unwrap(), g.eval(&f.eval(&x).unwrap()).unwrap());
    }

    #[test]
    fn chain_rule(f in arb_map(2, 2, 2), g in arb_map(2, 1, 2), x in arb_point(2)) {
        let jf = f.jacobian();
        let jg = g.jacobian();
        let jfg = f.then(&g).unwrap().jacobian();
        let fx = f.eval(&x).unwrap();
        for j in 0..2 {
            let mut want = Rational::from_integer(0.into());
            for k in 0..2 {
                want += jg[0][k].eval(&fx).unwrap() * jf[k][j].eval(&x).unwrap();
            }
            prop_assert_eq!(jfg[0][j].eval(&x).unwrap(), want);
        }
    }

    #[test]
    fn tangent_functor_laws(f in arb_map(2, 2, 2), g in arb_map(2, 1, 2)) {
        prop_assert_eq!(t_map(&f.then(&g).unwrap()), t_map(&f).then(&t_map(&g)).unwrap());
        prop_assert_eq!(t_map(&PolyMap::identity(2)), PolyMap::identity(4));
    }

    #[test]
    fn structure_maps_are_natural(f in arb_map(1, 2, 2)) {
        let (n, m) = (f.dom(), f.cod());
        let tf = t_map(&f);
        let ttf = t_map(&tf);
        prop_assert_eq!(tf.then(&proj_p(m)).unwrap(), proj_p(n).then(&f).unwrap());
        prop_assert_eq!(f.then(&zero_0(m)).unwrap(), zero_0(n).then(&tf).unwrap());
        prop_assert_eq!(t2_map(&f).then(&add_plus(m)).unwrap(), add_plus(n).then(&tf).unwrap());
        prop_assert_eq!(tf.then(&lift_l(m)).unwrap(), lift_l(n).then(&ttf).unwrap());
        prop_assert_eq!(ttf.then(&flip_c(m)).unwrap(), flip_c(n).then(&ttf).unwrap());
    }

    #[test]
    fn fibre_power_round_trip(n in 1usize..=3, k in 1usize..=3) {
        let cone = fibre_power_cone(n, k);
        let legs: Vec<PolyMap> = (0..k).map(|i| cone.leg(i)).collect();
        let refs: Vec<&PolyMap> = legs.iter().collect();
        prop_assert_eq!(cone.pair_checked(&refs).unwrap(), PolyMap::identity(n * (k + 1)));
    }

    #[test]
    fn pullbacks_are_bundles(f in arb_map(2, 1, 2), k in 1usize..=2) {
        let e = trivial_bundle(&Space::euclidean(1), k);
        let (pb, mor) = pullback_bundle(&f, &e).unwrap();
        let r = verify_bundle(&pb);
        prop_assert!(r.passed(), "{}", r);
        prop_assert!(is_linear_morphism(&mor.top, &mor.bottom, &pb, &e));
        prop_assert!(verify_bundle(&tangent_of_bundle(&pb)).passed());
    }

    #[test]
    fn hom_monoid_laws(
        fa in arb_poly(3, 2), fb in arb_poly(3, 2),
        ga in arb_poly(3, 2), gb in arb_poly(3, 2),
        ha in arb_poly(3, 2), hb in arb_poly(3, 2),
    ) {
        // Maps E → F over the identity of R^1, with F of rank 2.
        let e = trivial_bundle(&Space::euclidean(1), 2);
        let f_dst = trivial_bundle(&Space::euclidean(1), 2);
        let x = Polynomial::var(3, 0);
        let over_id = |a: Polynomial, b: Polynomial| PolyMap::new(3, vec![x.clone(), a, b]).unwrap();
        let (f, g, h) = (over_id(fa, fb), over_id(ga, gb), over_id(ha, hb));
        let add = |a: &PolyMap, b: &PolyMap| hom_add(a, b, &e, &f_dst).unwrap();
        let zero = hom_zero(&e, &f_dst).unwrap();
        prop_assert_eq!(add(&f, &g), add(&g, &f));
        prop_assert_eq!(add(&add(&f, &g), &h), add(&f, &add(&g, &h)));
        prop_assert_eq!(add(&f, &zero), f.clone());
    }

    #[test]
    fn linear_morphisms_compose(
        a in prop::collection::vec(arb_poly(1, 2), 4),
        b in prop::collection::vec(arb_poly(1, 2), 2),
    ) {
        // g(x, w) = (x, A(x) w) with polynomial matrices A.
        let fibrewise = |rows: usize, cols: usize, entries: &[Polynomial]| {
            let arity = 1 + cols;
            let mut comps = vec![Polynomial::var(arity, 0)];
            for r in 0..rows {
                let mut acc = Polynomial::zero(arity);
                for c in 0..cols {
                    let e = entries[r * cols + c].rename(arity, &[0]).unwrap();
                    acc = &acc + &(&e * &Polynomial::var(arity, 1 + c));
                }
                comps.push(acc);
            }
            PolyMap::new(arity, comps).unwrap()
        };
        let base = Space::euclidean(1);
        let (e2, e1) = (trivial_bundle(&base, 2), trivial_bundle(&base, 1));
        let g1 = fibrewise(2, 2, &a);
        let g2 = fibrewise(1, 2, &b);
        let id = PolyMap::identity(1);
        prop_assert!(is_linear_morphism(&g1, &id, &e2, &e2));
        prop_assert!(is_linear_morphism(&g2, &id, &e2, &e1));
        prop_assert!(is_linear_morphism(&g1.then(&g2).unwrap(), &id, &e2, &e1));
    }

    #[test]
    fn christoffel_decomposition_round_trips(
        g in arb_poly(1, 2),
        xi in arb_point(4),
    ) {
        let table = ChristoffelTable::new(1, vec![vec![g.clone()]]).unwrap();
        let c = christoffel_connection(&Space::euclidean(1), table).unwrap();
        let (_, d) = check_effective(&c);
        let d = d.expect("Christoffel connections are effective");
        let parts = decompose_point(&d, &xi).unwrap();
        prop_assert_eq!(recompose_point(&d, &parts).unwrap(), xi);
        // H(x, t, u) = (x, t, u, -Γ(x) t u).
        let h = derive_horizontal(&c).unwrap();
        let three = |i| Polynomial::var(3, i);
        let gamma = g.rename(3, &[0]).unwrap();
        let want = -&(&(&gamma * &three(1)) * &three(2));
        prop_assert_eq!(h.h().unwrap().component(3), &want);
    }
}
