use tangentcat::tangent::{
    add_plus, check_tangent_axioms_with, fibre_power, flip_c, lift_l, proj_p, zero_0, Standard,
    TangentStructure,
};
use tangentcat::{check_tangent_axioms, t_map, t_obj, PolyMap, Polynomial, Space};

#[test]
fn tangent_spaces() {
    let tm = t_obj(&Space::euclidean(1));
    assert_eq!(tm.dim(), 2);
    assert_eq!(tm.layout(), [("x".to_string(), 1), ("t".to_string(), 1)]);
    let t2 = t_obj(&t_obj(&Space::euclidean(2)));
    assert_eq!(t2.dim(), 8);
    let names: Vec<&str> = t2.layout().iter().map(|(n, _)| n.as_str()).collect();
    assert_eq!(names, ["x", "t", "u", "v"]);
    assert!(t2.layout().iter().all(|(_, s)| *s == 2));
    assert_eq!(t_obj(&Space::euclidean(0)).dim(), 0);
    assert_eq!(fibre_power(&Space::euclidean(1), 2).dim(), 3);
    assert_eq!(fibre_power(&Space::euclidean(2), 0).dim(), 2);
}

#[test]
fn tangent_of_maps() {
    let x = Polynomial::var(1, 0);
    assert_eq!(
        t_map(&PolyMap::new(1, vec![&x * &x]).unwrap()).to_string(),
        "(x1^2, 2*x1*x2)"
    );
    assert_eq!(t_map(&PolyMap::identity(3)), PolyMap::identity(6));
    let xy = &Polynomial::var(2, 0) * &Polynomial::var(2, 1);
    assert_eq!(
        t_map(&PolyMap::new(2, vec![xy]).unwrap()).to_string(),
        "(x1*x2, x1*x4 + x2*x3)"
    );
}

#[test]
fn structure_maps() {
    assert_eq!(proj_p(1).to_string(), "(x1)");
    assert_eq!(proj_p(2).to_string(), "(x1, x2)");
    assert_eq!(zero_0(1).to_string(), "(x1, 0)");
    assert_eq!(zero_0(2).then(&proj_p(2)).unwrap(), PolyMap::identity(2));
    assert_eq!(add_plus(1).to_string(), "(x1, x2 + x3)");
    assert_eq!(lift_l(1).to_string(), "(x1, 0, 0, x2)");
    assert_eq!(flip_c(1).to_string(), "(x1, x3, x2, x4)");
    assert_eq!(flip_c(2).then(&flip_c(2)).unwrap(), PolyMap::identity(8));
    assert_eq!(lift_l(1).then(&flip_c(1)).unwrap(), lift_l(1));
    // ℓ then p_T equals p then 0.
    assert_eq!(
        lift_l(1).then(&proj_p(2)).unwrap(),
        proj_p(1).then(&zero_0(1)).unwrap()
    );
    assert_eq!(
        flip_c(1).then(&t_map(&proj_p(1))).unwrap().to_string(),
        "(x1, x2)"
    );
}

#[test]
fn axioms_hold_in_low_dimensions() {
    for n in 1..=3 {
        let r = check_tangent_axioms(&Space::euclidean(n));
        assert!(r.passed(), "{r}");
    }
}

struct IdentityFlip;

impl TangentStructure for IdentityFlip {
    fn flip(&self, n: usize) -> PolyMap {
        PolyMap::identity(4 * n)
    }
}

#[test]
fn identity_flip_breaks_the_lift_flip_axiom() {
    let r = check_tangent_axioms_with(&IdentityFlip, 1);
    let rec = r.find("l_T T(c) c_T = c T(l)").unwrap();
    assert_ne!(rec.verdict, tangentcat::Verdict::Pass);
    assert!(check_tangent_axioms_with(&Standard, 1).passed());
}
