//! The tangent structure on Cartesian spaces with polynomial maps.
//!
//! `TM = M × M` with coordinates `(x, t)`: base point first, tangent vector
//! second. `T²M = T(TM)` has coordinates `(x, t, u, v)` where `(x, t)` is the
//! base block and `(u, v)` its tangent block, so `u = dx` and `v = dt`.
//!
//! | map | formula |
//! |-----|---------|
//! | `p : TM → M` | `(x, t) ↦ x` |
//! | `0 : M → TM` | `x ↦ (x, 0)` |
//! | `+ : T₂M → TM` | `(x, t₁, t₂) ↦ (x, t₁ + t₂)` |
//! | `ℓ : TM → T²M` | `(x, t) ↦ (x, 0, 0, t)` |
//! | `c : T²M → T²M` | `(x, t, u, v) ↦ (x, u, t, v)` |
//! | `T(f)` | `(x, t) ↦ (f(x), J_f(x)·t)` |
//!
//! All maps act blockwise, so for `M = ℝⁿ` each letter stands for `n`
//! coordinates. Functions here take `n = dim M`.

use serde::{Deserialize, Serialize};

use crate::cone::SelectionCone;
use crate::error::{Error, Result};
use crate::polycore::{PolyMap, Polynomial};
use crate::report::Report;

/// A Cartesian space `ℝ^dim` with named coordinate blocks.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "SpaceRepr", into = "SpaceRepr")]
pub struct Space {
    dim: usize,
    layout: Vec<(String, usize)>,
}

#[derive(Serialize, Deserialize)]
struct SpaceRepr {
    dim: usize,
    layout: Vec<(String, usize)>,
}

impl TryFrom<SpaceRepr> for Space {
    type Error = Error;
    fn try_from(r: SpaceRepr) -> Result<Space> {
        let s = Space::new(r.layout)?;
        crate::error::dim_check("space layout total", r.dim, s.dim)?;
        Ok(s)
    }
}

impl From<Space> for SpaceRepr {
    fn from(s: Space) -> SpaceRepr {
        SpaceRepr {
            dim: s.dim,
            layout: s.layout,
        }
    }
}

impl Space {
    pub fn new(layout: Vec<(String, usize)>) -> Result<Self> {
        if let Some((name, _)) = layout.iter().find(|(_, n)| *n == 0) {
            return Err(Error::Shape(format!("block {name:?} has size 0")));
        }
        let dim = layout.iter().map(|(_, n)| n).sum();
        Ok(Space { dim, layout })
    }

    /// `ℝⁿ` with the single block `x`.
    pub fn euclidean(n: usize) -> Self {
        let layout = if n == 0 {
            Vec::new()
        } else {
            vec![("x".to_string(), n)]
        };
        Space { dim: n, layout }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn layout(&self) -> &[(String, usize)] {
        &self.layout
    }

    /// `TS`: the layout followed by a tangent copy of every block.
    pub fn tangent(&self) -> Space {
        let names: Vec<&str> = self.layout.iter().map(|(n, _)| n.as_str()).collect();
        let fresh: Vec<String> = match names.as_slice() {
            ["x"] => vec!["t".into()],
            ["x", "t"] => vec!["u".into(), "v".into()],
            _ => names.iter().map(|n| format!("d{n}")).collect(),
        };
        let mut layout = self.layout.clone();
        layout.extend(fresh.into_iter().zip(self.layout.iter().map(|(_, k)| *k)));
        Space {
            dim: 2 * self.dim,
            layout,
        }
    }
}

pub fn t_obj(s: &Space) -> Space {
    s.tangent()
}

/// `TₖM`: the k-fold fibre power of `TM` over `M`, coordinates `(x, t₁, …, t_k)`.
pub fn fibre_power(s: &Space, k: usize) -> Space {
    let mut layout = s.layout.clone();
    if s.dim > 0 {
        for i in 1..=k {
            let name = if k == 1 {
                "t".to_string()
            } else {
                format!("t{i}")
            };
            layout.push((name, s.dim));
        }
    }
    Space {
        dim: (k + 1) * s.dim,
        layout,
    }
}

/// The projections `πᵢ : TₖM → TM`, `(x, t₁, …, t_k) ↦ (x, tᵢ)`.
pub fn fibre_power_cone(n: usize, k: usize) -> SelectionCone {
    let legs = (0..k)
        .map(|i| (0..n).chain((1 + i) * n..(2 + i) * n).collect())
        .collect();
    SelectionCone::new((k + 1) * n, legs).unwrap_or_else(|_| {
        // k = 0 with n > 0: the apex is M itself, read by the identity leg.
        SelectionCone::new(n, vec![(0..n).collect()]).expect("identity cone")
    })
}

/// `T(f)(x, t) = (f(x), J_f(x)·t)`.
pub fn t_map(f: &PolyMap) -> PolyMap {
    let m = f.dom();
    let embed: Vec<usize> = (0..m).collect();
    let lift = |p: &Polynomial| p.rename(2 * m, &embed).expect("embedding is in range");
    let t: Vec<Polynomial> = (0..m).map(|j| Polynomial::var(2 * m, m + j)).collect();
    let mut comps: Vec<Polynomial> = f.components().iter().map(lift).collect();
    for row in f.jacobian() {
        let mut acc = Polynomial::zero(2 * m);
        for (d, tj) in row.iter().zip(&t) {
            if !d.is_zero() {
                acc = &acc + &(&lift(d) * tj);
            }
        }
        comps.push(acc);
    }
    PolyMap::new(2 * m, comps).expect("components have arity 2m")
}

fn block_map(dom: usize, blocks: &[Option<usize>], n: usize) -> PolyMap {
    let comps = blocks
        .iter()
        .flat_map(|b| {
            (0..n).map(move |i| match b {
                Some(src) => Polynomial::var(dom, src * n + i),
                None => Polynomial::zero(dom),
            })
        })
        .collect();
    PolyMap::new(dom, comps).expect("block map arity")
}

/// `p_M : TM → M`.
pub fn proj_p(n: usize) -> PolyMap {
    block_map(2 * n, &[Some(0)], n)
}

/// `0_M : M → TM`.
pub fn zero_0(n: usize) -> PolyMap {
    block_map(n, &[Some(0), None], n)
}

/// `+_M : T₂M → TM`.
pub fn add_plus(n: usize) -> PolyMap {
    let mut comps: Vec<Polynomial> = (0..n).map(|i| Polynomial::var(3 * n, i)).collect();
    comps.extend(
        (0..n).map(|i| &Polynomial::var(3 * n, n + i) + &Polynomial::var(3 * n, 2 * n + i)),
    );
    PolyMap::new(3 * n, comps).expect("plus arity")
}

/// `ℓ_M : TM → T²M`.
pub fn lift_l(n: usize) -> PolyMap {
    block_map(2 * n, &[Some(0), None, None, Some(1)], n)
}

/// `c_M : T²M → T²M`.
pub fn flip_c(n: usize) -> PolyMap {
    block_map(4 * n, &[Some(0), Some(2), Some(1), Some(3)], n)
}

/// The generators of a tangent structure. The checker is written against
/// this trait so that tests can substitute a deliberately broken generator.
pub trait TangentStructure: Sync {
    fn p(&self, n: usize) -> PolyMap {
        proj_p(n)
    }
    fn zero(&self, n: usize) -> PolyMap {
        zero_0(n)
    }
    fn plus(&self, n: usize) -> PolyMap {
        add_plus(n)
    }
    fn lift(&self, n: usize) -> PolyMap {
        lift_l(n)
    }
    fn flip(&self, n: usize) -> PolyMap {
        flip_c(n)
    }
    fn t(&self, f: &PolyMap) -> PolyMap {
        t_map(f)
    }
}

/// The tangent structure of the Cartesian polynomial model.
#[derive(Clone, Copy, Debug, Default)]
pub struct Standard;

impl TangentStructure for Standard {}

pub fn check_tangent_axioms(s: &Space) -> Report {
    check_tangent_axioms_with(&Standard, s.dim())
}

/// Checks the tangent-category equations for `M = ℝⁿ` as exact identities.
pub fn check_tangent_axioms_with<S: TangentStructure>(ts: &S, n: usize) -> Report {
    let mut r = Report::new(format!("tangent structure on R^{n}"));
    let (p, z, plus, l, c) = (ts.p(n), ts.zero(n), ts.plus(n), ts.lift(n), ts.flip(n));
    let l_t = ts.lift(2 * n);
    let c_t = ts.flip(2 * n);
    let tl = ts.t(&l);
    let tc = ts.t(&c);

    r.check_eq(
        "cc = 1",
        "flip involution",
        c.then(&c),
        Ok(PolyMap::identity(4 * n)),
    );
    r.check_eq("lc = l", "lift symmetric", l.then(&c), Ok(l.clone()));
    r.check_eq(
        "l T(l) = l l_T",
        "lift coassociative",
        l.then(&tl),
        l.then(&l_t),
    );
    r.check_eq(
        "T(c) c_T T(c) = c_T T(c) c_T",
        "flip braid",
        tc.then(&c_t).and_then(|m| m.then(&tc)),
        c_t.then(&tc).and_then(|m| m.then(&c_t)),
    );
    r.check_eq(
        "l_T T(c) c_T = c T(l)",
        "lift-flip compatibility",
        l_t.then(&tc).and_then(|m| m.then(&c_t)),
        c.then(&tl),
    );

    // (l, 0) : T̲M → T(T̲M) is an additive bundle morphism.
    let tp = ts.t(&p);
    let tz = ts.t(&z);
    let tplus = ts.t(&plus);
    let anchor = "(l,0) additive morphism";
    r.check_eq("l T(p) = p 0", anchor, l.then(&tp), p.then(&z));
    r.check_eq("0 l = 0 T(0)", anchor, z.then(&l), z.then(&tz));
    let t2 = fibre_power_cone(n, 2);
    let (pi1, pi2) = (t2.leg(0), t2.leg(1));
    let rhs = pi1
        .then(&l)
        .and_then(|a| pi2.then(&l).map(|b| (a, b)))
        .and_then(|(a, b)| t2.tangent().pair_checked(&[&a, &b]))
        .and_then(|m| m.then(&tplus));
    r.check_eq("+ l = <pi1 l, pi2 l> T(+)", anchor, plus.then(&l), rhs);

    // (c, 1) : T(T̲M) → T̲(TM) is an additive bundle morphism.
    let anchor = "(c,1) additive morphism";
    r.check_eq("c p_T = T(p)", anchor, c.then(&ts.p(2 * n)), Ok(tp.clone()));
    r.check_eq("T(0) c = 0_T", anchor, tz.then(&c), Ok(ts.zero(2 * n)));
    let t2_of_t = fibre_power_cone(2 * n, 2);
    let rhs = ts
        .t(&pi1)
        .then(&c)
        .and_then(|a| ts.t(&pi2).then(&c).map(|b| (a, b)))
        .and_then(|(a, b)| t2_of_t.pair_checked(&[&a, &b]))
        .and_then(|m| m.then(&ts.plus(2 * n)));
    r.check_eq(
        "T(+) c = <T(pi1) c, T(pi2) c> +_T",
        anchor,
        tplus.then(&c),
        rhs,
    );
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polycore::rational;

    fn x(n: usize, i: usize) -> Polynomial {
        Polynomial::var(n, i)
    }

    #[test]
    fn t_obj_layouts() {
        let t1 = t_obj(&Space::euclidean(1));
        assert_eq!(t1.dim(), 2);
        assert_eq!(t1.layout(), &[("x".into(), 1), ("t".into(), 1)]);
        let t2 = t_obj(&t_obj(&Space::euclidean(2)));
        assert_eq!(t2.dim(), 8);
        let names: Vec<&str> = t2.layout().iter().map(|(n, _)| n.as_str()).collect();
        assert_eq!(names, ["x", "t", "u", "v"]);
        assert!(t2.layout().iter().all(|(_, k)| *k == 2));
        assert_eq!(t_obj(&Space::euclidean(0)).dim(), 0);
    }

    #[test]
    fn t_map_examples() {
        let sq = PolyMap::new(1, vec![&x(1, 0) * &x(1, 0)]).unwrap();
        let expected = PolyMap::new(
            2,
            vec![
                &x(2, 0) * &x(2, 0),
                (&x(2, 0) * &x(2, 1)).scale(&rational(2)),
            ],
        )
        .unwrap();
        assert_eq!(t_map(&sq), expected);
        assert_eq!(t_map(&PolyMap::identity(3)), PolyMap::identity(6));
        let xy = PolyMap::new(2, vec![&x(2, 0) * &x(2, 1)]).unwrap();
        let txy = t_map(&xy);
        assert_eq!(txy.component(0), &(&x(4, 0) * &x(4, 1)));
        assert_eq!(
            txy.component(1),
            &(&(&x(4, 1) * &x(4, 2)) + &(&x(4, 0) * &x(4, 3)))
        );
    }

    #[test]
    fn structure_map_formulas() {
        assert_eq!(proj_p(1), PolyMap::selection(2, &[0]).unwrap());
        assert_eq!(proj_p(2), PolyMap::selection(4, &[0, 1]).unwrap());
        assert_eq!(zero_0(1).then(&proj_p(1)).unwrap(), PolyMap::identity(1));
        assert_eq!(
            zero_0(1),
            PolyMap::new(1, vec![x(1, 0), Polynomial::zero(1)]).unwrap()
        );
        assert_eq!(
            add_plus(1),
            PolyMap::new(3, vec![x(3, 0), &x(3, 1) + &x(3, 2)]).unwrap()
        );
        assert_eq!(flip_c(1), PolyMap::selection(4, &[0, 2, 1, 3]).unwrap());
        assert_eq!(
            lift_l(1),
            PolyMap::new(
                2,
                vec![x(2, 0), Polynomial::zero(2), Polynomial::zero(2), x(2, 1)]
            )
            .unwrap()
        );
        // c T(p) selects (x, u)
        assert_eq!(
            flip_c(1).then(&t_map(&proj_p(1))).unwrap(),
            PolyMap::selection(4, &[0, 1]).unwrap()
        );
        assert_eq!(t_map(&proj_p(1)), PolyMap::selection(4, &[0, 2]).unwrap());
    }

    #[test]
    fn plus_unit_and_commutativity() {
        let t2 = fibre_power_cone(1, 2);
        let z = proj_p(1).then(&zero_0(1)).unwrap();
        let unit = t2.pair_checked(&[&z, &PolyMap::identity(2)]).unwrap();
        assert_eq!(unit.then(&add_plus(1)).unwrap(), PolyMap::identity(2));
        let swap = t2.pair_checked(&[&t2.leg(1), &t2.leg(0)]).unwrap();
        assert_eq!(swap.then(&add_plus(1)).unwrap(), add_plus(1));
    }

    #[test]
    fn fibre_powers() {
        let m = Space::euclidean(1);
        assert_eq!(fibre_power(&m, 2).dim(), 3);
        assert_eq!(fibre_power(&m, 0), m);
        assert_eq!(fibre_power(&m, 1), t_obj(&m));
    }

    #[test]
    fn axioms_hold_in_low_dimension() {
        for n in 0..=2 {
            let r = check_tangent_axioms(&Space::euclidean(n));
            assert!(r.passed(), "{r}");
            assert_eq!(r.records.len(), 11);
        }
    }

    struct IdentityFlip;
    impl TangentStructure for IdentityFlip {
        fn flip(&self, n: usize) -> PolyMap {
            PolyMap::identity(4 * n)
        }
    }

    #[test]
    fn identity_flip_breaks_lift_flip_compatibility() {
        let r = check_tangent_axioms_with(&IdentityFlip, 1);
        let rec = r.find("l_T T(c) c_T = c T(l)").unwrap();
        assert_eq!(rec.verdict, crate::report::Verdict::Fail);
        assert!(rec.witness.is_some());
    }
}
