//! Differential bundles in standard position.
//!
//! A [`DiffBundle`] has total space `E = ℝᴺ` and base `M = ℝᵐ`, with the
//! projection `q : E → M` given by an injective list of base coordinates
//! `B`. The remaining coordinates `F` (ascending) are the fibre. With this
//! normal form every fibre power is again a Cartesian space:
//! `E⁽ʳ⁾ = E × F × ⋯ × F`, the first factor carrying the shared base point.
//!
//! Structure maps: `σ : E⁽²⁾ → E`, `ζ : M → E`, `λ : E → TE`.

use crate::cone::SelectionCone;
use crate::error::{dim_check, Error, Result};
use crate::polycore::{PolyMap, Polynomial, Rational};
use crate::report::Report;
use crate::tangent::{add_plus, flip_c, lift_l, proj_p, t_map, zero_0, Space};
use num_traits::{One, Zero};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiffBundle {
    total: Space,
    base: Space,
    base_coords: Vec<usize>,
    sigma: PolyMap,
    zeta: PolyMap,
    lambda: PolyMap,
}

/// A morphism of bundles: `top : E → F` over `bottom : M → N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BundleMorphism {
    pub top: PolyMap,
    pub bottom: PolyMap,
}

/// Coordinates of `E` outside `base_coords`, ascending.
fn complement(n: usize, base_coords: &[usize]) -> Vec<usize> {
    (0..n).filter(|k| !base_coords.contains(k)).collect()
}

/// `E⁽ʳ⁾` as a cone over `M`: leg 0 is the first factor, leg `i` reads the
/// shared base coordinates and the `i`-th fibre block.
pub(crate) fn power_cone(n: usize, base_coords: &[usize], r: usize) -> SelectionCone {
    let fibre = complement(n, base_coords);
    let f = fibre.len();
    let legs = (0..r.max(1))
        .map(|i| {
            (0..n)
                .map(|k| match fibre.iter().position(|&c| c == k) {
                    Some(j) if i > 0 => n + (i - 1) * f + j,
                    _ => k,
                })
                .collect()
        })
        .collect();
    SelectionCone::new(n + r.saturating_sub(1) * f, legs).expect("fibre power legs cover apex")
}

impl DiffBundle {
    pub fn new(
        total: Space,
        base: Space,
        base_coords: Vec<usize>,
        sigma: PolyMap,
        zeta: PolyMap,
        lambda: PolyMap,
    ) -> Result<Self> {
        let n = total.dim();
        let m = base.dim();
        dim_check("base coordinate count", m, base_coords.len())?;
        for (i, &k) in base_coords.iter().enumerate() {
            if k >= n {
                return Err(Error::IndexOutOfRange { index: k, len: n });
            }
            if base_coords[..i].contains(&k) {
                return Err(Error::NotStandardPosition(format!(
                    "base coordinate {k} listed twice"
                )));
            }
        }
        let f = n - m;
        dim_check("sigma domain", n + f, sigma.dom())?;
        dim_check("sigma codomain", n, sigma.cod())?;
        dim_check("zeta domain", m, zeta.dom())?;
        dim_check("zeta codomain", n, zeta.cod())?;
        dim_check("lambda domain", n, lambda.dom())?;
        dim_check("lambda codomain", 2 * n, lambda.cod())?;
        Ok(DiffBundle {
            total,
            base,
            base_coords,
            sigma,
            zeta,
            lambda,
        })
    }

    pub fn total(&self) -> &Space {
        &self.total
    }
    pub fn base(&self) -> &Space {
        &self.base
    }
    pub fn base_coords(&self) -> &[usize] {
        &self.base_coords
    }
    pub fn sigma(&self) -> &PolyMap {
        &self.sigma
    }
    pub fn zeta(&self) -> &PolyMap {
        &self.zeta
    }
    pub fn lambda(&self) -> &PolyMap {
        &self.lambda
    }
    pub fn total_dim(&self) -> usize {
        self.total.dim()
    }
    pub fn base_dim(&self) -> usize {
        self.base.dim()
    }
    pub fn fibre_dim(&self) -> usize {
        self.total_dim() - self.base_dim()
    }
    pub fn fibre_coords(&self) -> Vec<usize> {
        complement(self.total_dim(), &self.base_coords)
    }

    /// `q : E → M`.
    pub fn q(&self) -> PolyMap {
        PolyMap::selection(self.total_dim(), &self.base_coords).expect("validated")
    }

    /// `E ×_M E` with its two projections.
    pub fn pair_cone(&self) -> SelectionCone {
        power_cone(self.total_dim(), &self.base_coords, 2)
    }

    /// `E⁽ʳ⁾` with its `r` projections (`r ≥ 1`).
    pub fn power_cone(&self, r: usize) -> SelectionCone {
        power_cone(self.total_dim(), &self.base_coords, r)
    }

    /// Checked pairing `⟨a, b⟩ : X → E ×_M E`.
    pub fn pair2(&self, a: &PolyMap, b: &PolyMap) -> Result<PolyMap> {
        self.pair_cone().pair_checked(&[a, b])
    }

    /// Whether two bundles have identical data, map by map.
    pub fn same_structure(&self, other: &DiffBundle) -> bool {
        self.total.dim() == other.total.dim()
            && self.base_coords == other.base_coords
            && self.sigma == other.sigma
            && self.zeta == other.zeta
            && self.lambda == other.lambda
    }

    /// Moves the bundle along an isomorphism `forward : E → E'` with inverse
    /// `backward`. The new projection `backward·q` must again be a coordinate
    /// selection.
    pub fn transport(&self, total: Space, forward: &PolyMap, backward: &PolyMap) -> Result<Self> {
        let n = self.total_dim();
        dim_check("transport domain", n, forward.dom())?;
        dim_check("transport codomain", total.dim(), forward.cod())?;
        if forward.then(backward)? != PolyMap::identity(n)
            || backward.then(forward)? != PolyMap::identity(total.dim())
        {
            return Err(Error::Precondition(
                "transport maps are not mutually inverse".into(),
            ));
        }
        let base_coords = backward.then(&self.q())?.as_selection().ok_or_else(|| {
            Error::NotStandardPosition(
                "transported projection is not a coordinate selection".into(),
            )
        })?;
        let cone = power_cone(total.dim(), &base_coords, 2);
        let a = cone.leg(0).then(backward)?;
        let b = cone.leg(1).then(backward)?;
        let sigma = self.pair2(&a, &b)?.then(&self.sigma)?.then(forward)?;
        let zeta = self.zeta.then(forward)?;
        let lambda = backward.then(&self.lambda)?.then(&t_map(forward))?;
        DiffBundle::new(total, self.base.clone(), base_coords, sigma, zeta, lambda)
    }
}

/// `T̲M = (TM, p, +, 0, ℓ)` for `M = ℝⁿ`.
pub fn tangent_bundle(n: usize) -> DiffBundle {
    let m = Space::euclidean(n);
    DiffBundle::new(
        m.tangent(),
        m,
        (0..n).collect(),
        add_plus(n),
        zero_0(n),
        lift_l(n),
    )
    .expect("tangent bundle shapes")
}

/// `M × ℝᵏ → M` with fibrewise addition and `λ(x, w) = (x, 0, 0, w)`.
pub fn trivial_bundle(base: &Space, fibre_dim: usize) -> DiffBundle {
    let m = base.dim();
    let n = m + fibre_dim;
    let mut layout = base.layout().to_vec();
    if fibre_dim > 0 {
        layout.push(("w".into(), fibre_dim));
    }
    let total = Space::new(layout).expect("positive blocks");
    let v = |a: usize, i: usize| Polynomial::var(a, i);
    let sigma = PolyMap::new(
        n + fibre_dim,
        (0..m)
            .map(|i| v(n + fibre_dim, i))
            .chain((0..fibre_dim).map(|j| &v(n + fibre_dim, m + j) + &v(n + fibre_dim, n + j)))
            .collect(),
    )
    .expect("sigma arity");
    let zeta = PolyMap::new(
        m,
        (0..m)
            .map(|i| v(m, i))
            .chain((0..fibre_dim).map(|_| Polynomial::zero(m)))
            .collect(),
    )
    .expect("zeta arity");
    let lambda = PolyMap::new(
        n,
        (0..m)
            .map(|i| v(n, i))
            .chain((0..n).map(|_| Polynomial::zero(n)))
            .chain((0..fibre_dim).map(|j| v(n, m + j)))
            .collect(),
    )
    .expect("lambda arity");
    DiffBundle::new(total, base.clone(), (0..m).collect(), sigma, zeta, lambda)
        .expect("trivial bundle shapes")
}

/// `TE̲ = (TE, T(q), T(σ), T(ζ), T(λ)c_E)` over `TM`.
pub fn tangent_of_bundle(b: &DiffBundle) -> DiffBundle {
    let n = b.total_dim();
    let base_coords: Vec<usize> = b
        .base_coords
        .iter()
        .copied()
        .chain(b.base_coords.iter().map(|k| k + n))
        .collect();
    let new_cone = power_cone(2 * n, &base_coords, 2);
    let sigma = b
        .pair_cone()
        .tangent()
        .pair_checked(&[&new_cone.leg(0), &new_cone.leg(1)])
        .and_then(|m| m.then(&t_map(&b.sigma)))
        .expect("tangent of a fibre power is a fibre power");
    let lambda = t_map(&b.lambda).then(&flip_c(n)).expect("lambda shapes");
    DiffBundle::new(
        b.total.tangent(),
        b.base.tangent(),
        base_coords,
        sigma,
        t_map(&b.zeta),
        lambda,
    )
    .expect("tangent bundle of a bundle shapes")
}

/// `μ = ⟨π₁λ, π₂0_E⟩ T(σ) : E ×_M E → TE`.
pub fn mu_map(b: &DiffBundle) -> Result<PolyMap> {
    let cone = b.pair_cone();
    let a = cone.leg(0).then(&b.lambda)?;
    let z = cone.leg(1).then(&zero_0(b.total_dim()))?;
    cone.tangent()
        .pair_checked(&[&a, &z])?
        .then(&t_map(&b.sigma))
}

fn pick_vars(dom: usize, idx: impl IntoIterator<Item = usize>) -> PolyMap {
    let idx: Vec<usize> = idx.into_iter().collect();
    PolyMap::selection(dom, &idx).expect("in range")
}

/// Runs every differential-bundle axiom check.
pub fn verify_bundle(b: &DiffBundle) -> Report {
    let n = b.total_dim();
    let m = b.base_dim();
    let mut r = Report::new(format!(
        "differential bundle R^{n} -> R^{m} (canonical fibre powers)"
    ));
    let q = b.q();
    let cone2 = b.pair_cone();
    let (p1, p2) = (cone2.leg(0), cone2.leg(1));

    // Monoid in the slice over M.
    let anchor = "additive bundle";
    r.check_eq("sigma q = pi1 q", anchor, b.sigma.then(&q), p1.then(&q));
    r.check_eq(
        "zeta q = 1",
        anchor,
        b.zeta.then(&q),
        Ok(PolyMap::identity(m)),
    );
    let cone3 = b.power_cone(3);
    let (t1, t2, t3) = (cone3.leg(0), cone3.leg(1), cone3.leg(2));
    let left = b
        .pair2(&t1, &t2)
        .and_then(|s| s.then(&b.sigma))
        .and_then(|s12| b.pair2(&s12, &t3))
        .and_then(|s| s.then(&b.sigma));
    let right = b
        .pair2(&t2, &t3)
        .and_then(|s| s.then(&b.sigma))
        .and_then(|s23| b.pair2(&t1, &s23))
        .and_then(|s| s.then(&b.sigma));
    r.check_eq("sigma associative", anchor, left, right);
    r.check_eq(
        "sigma commutative",
        anchor,
        b.pair2(&p2, &p1).and_then(|s| s.then(&b.sigma)),
        Ok(b.sigma.clone()),
    );
    r.check_eq(
        "zeta unit",
        anchor,
        q.then(&b.zeta)
            .and_then(|qz| b.pair2(&PolyMap::identity(n), &qz))
            .and_then(|s| s.then(&b.sigma)),
        Ok(PolyMap::identity(n)),
    );

    // Axiom 1: the specified fibre powers are preserved by T. Witnessed by the
    // tangent cone pairing T(πᵢ) to the identity of T(E⁽ʳ⁾).
    for k in [2, 3] {
        let cone = b.power_cone(k);
        let tcone = cone.tangent();
        let tlegs: Vec<PolyMap> = (0..k).map(|i| t_map(&cone.leg(i))).collect();
        let refs: Vec<&PolyMap> = tlegs.iter().collect();
        r.check_eq(
            &format!("T preserves fibre power r = {k}"),
            "bundle axiom 1",
            tcone.pair_checked(&refs),
            Ok(PolyMap::identity(tcone.dim())),
        );
    }

    let tq = t_map(&q);
    let tz = t_map(&b.zeta);
    let ts = t_map(&b.sigma);
    let tcone2 = cone2.tangent();
    let pl1 = p1.then(&b.lambda);
    let pl2 = p2.then(&b.lambda);

    // Axiom 2: (λ, 0_M) : E̲ → TE̲.
    let anchor = "bundle axiom 2";
    r.check_eq(
        "lambda T(q) = q 0_M",
        anchor,
        b.lambda.then(&tq),
        q.then(&zero_0(m)),
    );
    r.check_eq(
        "zeta lambda = 0_M T(zeta)",
        anchor,
        b.zeta.then(&b.lambda),
        zero_0(m).then(&tz),
    );
    r.check_eq(
        "sigma lambda = <pi1 lambda, pi2 lambda> T(sigma)",
        anchor,
        b.sigma.then(&b.lambda),
        pl1.clone()
            .and_then(|a| pl2.clone().map(|c| (a, c)))
            .and_then(|(a, c)| tcone2.pair_checked(&[&a, &c]))
            .and_then(|s| s.then(&ts)),
    );

    // Axiom 3: (λ, ζ) : E̲ → T̲E.
    let anchor = "bundle axiom 3";
    r.check_eq(
        "lambda p_E = q zeta",
        anchor,
        b.lambda.then(&proj_p(n)),
        q.then(&b.zeta),
    );
    r.check_eq(
        "zeta lambda = zeta 0_E",
        anchor,
        b.zeta.then(&b.lambda),
        b.zeta.then(&zero_0(n)),
    );
    let t2e = crate::tangent::fibre_power_cone(n, 2);
    r.check_eq(
        "sigma lambda = <pi1 lambda, pi2 lambda> +_E",
        anchor,
        b.sigma.then(&b.lambda),
        pl1.and_then(|a| pl2.map(|c| (a, c)))
            .and_then(|(a, c)| t2e.pair_checked(&[&a, &c]))
            .and_then(|s| s.then(&add_plus(n))),
    );

    check_universality_into(&mut r, b);

    r.check_eq(
        "lambda l_E = lambda T(lambda)",
        "bundle axiom 5",
        b.lambda.then(&lift_l(n)),
        b.lambda.then(&t_map(&b.lambda)),
    );
    r
}

/// Axiom 4 on its own.
pub fn check_universality(b: &DiffBundle) -> Report {
    let mut r = Report::new("universality of the lift");
    check_universality_into(&mut r, b);
    r
}

fn check_universality_into(r: &mut Report, b: &DiffBundle) {
    let anchor = "bundle axiom 4";
    let n = b.total_dim();
    let m = b.base_dim();
    let mu = match mu_map(b) {
        Ok(mu) => mu,
        Err(e) => {
            r.fail("mu is defined", anchor, e.to_string());
            return;
        }
    };
    let proj = pick_vars(n + b.fibre_dim(), b.base_coords.iter().copied());
    if !r.check_eq(
        "mu T(q) = q 0_M",
        anchor,
        mu.then(&t_map(&b.q())),
        proj.then(&zero_0(m)),
    ) {
        return;
    }
    match shear_inverse(b, &mu).or_else(|why| triangular_shear_inverse(b, &mu).ok_or(why)) {
        Err(why) => r.cannot_certify("mu invertible onto T(q)-vertical part", anchor, why),
        Ok(nu) => {
            let s = vertical_retraction(b);
            let id2 = PolyMap::identity(mu.dom());
            let ok = mu.then(&nu).ok() == Some(id2.clone())
                && s.then(&nu).and_then(|x| x.then(&mu)).ok() == Some(s.clone());
            if !ok {
                r.cannot_certify(
                    "mu invertible onto T(q)-vertical part",
                    anchor,
                    "shear candidate is not a two-sided inverse",
                );
                return;
            }
            r.pass("mu invertible onto T(q)-vertical part", anchor);
            let (tmu, tnu, tsv) = (t_map(&mu), t_map(&nu), t_map(&s));
            let ok = tmu.then(&tnu).ok() == Some(PolyMap::identity(2 * mu.dom()))
                && tsv.then(&tnu).and_then(|x| x.then(&tmu)).ok() == Some(tsv.clone());
            if ok {
                r.pass("T(mu) invertible onto T(T(q))-vertical part", anchor);
            } else {
                r.cannot_certify(
                    "T(mu) invertible onto T(T(q))-vertical part",
                    anchor,
                    "tangent of the inverse does not invert T(mu)",
                );
            }
        }
    }
}

/// `s : TE → TE` zeroing the base-tangent coordinates; its image is the
/// subvariety cut out by `T(q)(ξ) = (p_E q 0_M)(ξ)`.
fn vertical_retraction(b: &DiffBundle) -> PolyMap {
    let n = b.total_dim();
    let comps = (0..2 * n)
        .map(|k| {
            if k >= n && b.base_coords.contains(&(k - n)) {
                Polynomial::zero(2 * n)
            } else {
                Polynomial::var(2 * n, k)
            }
        })
        .collect();
    PolyMap::new(2 * n, comps).expect("arity")
}

/// Inverts `μ(e₁, w₂) = (e₂, 0, A(x, w₂)w₁ + c(x, w₂))` where `A` has constant
/// nonzero determinant.
fn shear_inverse(b: &DiffBundle, mu: &PolyMap) -> std::result::Result<PolyMap, String> {
    let n = b.total_dim();
    let fibre = b.fibre_coords();
    let f = fibre.len();
    let d2 = n + f;
    let cone = b.pair_cone();
    if mu.pick(&(0..n).collect::<Vec<_>>()).ok() != Some(cone.leg(1)) {
        return Err("p_E mu is not the second projection".into());
    }
    if b.base_coords
        .iter()
        .any(|&k| !mu.component(n + k).is_zero())
    {
        return Err("mu has nonzero base-tangent part".into());
    }
    let d: Vec<&Polynomial> = fibre.iter().map(|&k| mu.component(n + k)).collect();
    if d.iter().any(|p| p.degree_in(&fibre) > 1) {
        return Err("fibre-tangent part of mu is not affine in the first fibre".into());
    }
    let a: Vec<Vec<Polynomial>> = d
        .iter()
        .map(|p| fibre.iter().map(|&l| p.derivative(l)).collect())
        .collect();
    let kill_w1: Vec<Polynomial> = (0..d2)
        .map(|k| {
            if fibre.contains(&k) {
                Polynomial::zero(d2)
            } else {
                Polynomial::var(d2, k)
            }
        })
        .collect();
    let c: Vec<Polynomial> = d
        .iter()
        .map(|p| p.substitute(&kill_w1).expect("arity"))
        .collect();
    let det = determinant(&a, d2);
    let det = match det.constant_value() {
        Some(v) if !v.is_zero() => v,
        _ => {
            return Err(format!(
                "fibre matrix determinant {det} is not a nonzero constant"
            ))
        }
    };
    let inv_det = Rational::one() / det;
    // Evaluate A⁻¹ and c on TE: base from ξ_B, second fibre from ξ_F.
    let to_te: Vec<Polynomial> = (0..d2)
        .map(|k| {
            if k >= n {
                Polynomial::var(2 * n, fibre[k - n])
            } else if fibre.contains(&k) {
                Polynomial::zero(2 * n)
            } else {
                Polynomial::var(2 * n, k)
            }
        })
        .collect();
    let adj = adjugate(&a, d2);
    let sub = |p: &Polynomial| p.substitute(&to_te).expect("arity");
    let rhs: Vec<Polynomial> = (0..f)
        .map(|l| &Polynomial::var(2 * n, n + fibre[l]) - &sub(&c[l]))
        .collect();
    let mut comps = Vec::with_capacity(d2);
    for k in 0..n {
        match fibre.iter().position(|&c| c == k) {
            None => comps.push(Polynomial::var(2 * n, k)),
            Some(j) => {
                let mut acc = Polynomial::zero(2 * n);
                for (l, rl) in rhs.iter().enumerate() {
                    acc = &acc + &(&sub(&adj[j][l]) * rl);
                }
                comps.push(acc.scale(&inv_det));
            }
        }
    }
    for &k in &fibre {
        comps.push(Polynomial::var(2 * n, k));
    }
    PolyMap::new(2 * n, comps).map_err(|e| e.to_string())
}

/// Fallback for a fibre-tangent part `D(x, w₁, w₂)` that is not affine in
/// `w₁`: inverts `(x, w₁, w₂) ↦ (x, D, w₂)` with the triangular inverter and
/// reads `(x, D, w₂)` off `TE`.
fn triangular_shear_inverse(b: &DiffBundle, mu: &PolyMap) -> Option<PolyMap> {
    let n = b.total_dim();
    let fibre = b.fibre_coords();
    let d2 = n + fibre.len();
    let slot = |k: usize| fibre.iter().position(|&c| c == k);
    let phi = PolyMap::new(
        d2,
        (0..d2)
            .map(|k| match slot(k) {
                Some(l) if k < n => mu.component(n + fibre[l]).clone(),
                _ => Polynomial::var(d2, k),
            })
            .collect(),
    )
    .ok()?;
    let phi_inv = phi.triangular_inverse()?;
    let read = PolyMap::new(
        2 * n,
        (0..d2)
            .map(|k| match slot(k) {
                Some(l) if k < n => Polynomial::var(2 * n, n + fibre[l]),
                _ if k < n => Polynomial::var(2 * n, k),
                _ => Polynomial::var(2 * n, fibre[k - n]),
            })
            .collect(),
    )
    .ok()?;
    read.then(&phi_inv).ok()
}

fn minor(a: &[Vec<Polynomial>], row: usize, col: usize) -> Vec<Vec<Polynomial>> {
    a.iter()
        .enumerate()
        .filter(|(i, _)| *i != row)
        .map(|(_, r)| {
            r.iter()
                .enumerate()
                .filter(|(j, _)| *j != col)
                .map(|(_, p)| p.clone())
                .collect()
        })
        .collect()
}

/// Cofactor expansion along the first row. The empty matrix has determinant 1.
pub(crate) fn determinant(a: &[Vec<Polynomial>], arity: usize) -> Polynomial {
    if a.is_empty() {
        return Polynomial::one(arity);
    }
    let mut acc = Polynomial::zero(arity);
    for (j, p) in a[0].iter().enumerate() {
        if p.is_zero() {
            continue;
        }
        let term = p * &determinant(&minor(a, 0, j), arity);
        acc = if j % 2 == 0 {
            &acc + &term
        } else {
            &acc - &term
        };
    }
    acc
}

pub(crate) fn adjugate(a: &[Vec<Polynomial>], arity: usize) -> Vec<Vec<Polynomial>> {
    let k = a.len();
    (0..k)
        .map(|i| {
            (0..k)
                .map(|j| {
                    let d = determinant(&minor(a, j, i), arity);
                    if (i + j) % 2 == 0 {
                        d
                    } else {
                        -&d
                    }
                })
                .collect()
        })
        .collect()
}

/// Records the linear-morphism identities for `(g, f) : src → dst` under
/// `label`, returning whether `g` is linear.
pub fn check_linear_into(
    r: &mut Report,
    label: &str,
    anchor: &str,
    g: &PolyMap,
    f: &PolyMap,
    src: &DiffBundle,
    dst: &DiffBundle,
) -> bool {
    let square = r.check_eq(
        &format!("{label}: q f = g q'"),
        anchor,
        src.q().then(f),
        g.then(&dst.q()),
    );
    let lift = r.check_eq(
        &format!("{label}: lambda T(g) = g lambda'"),
        anchor,
        src.lambda.then(&t_map(g)),
        g.then(&dst.lambda),
    );
    let mut sub = Report::new("");
    let zero = sub.check_eq(
        &format!("{label}: zeta g = f zeta'"),
        anchor,
        src.zeta.then(g),
        f.then(&dst.zeta),
    );
    let cone = src.pair_cone();
    let add = sub.check_eq(
        &format!("{label}: sigma g = <pi1 g, pi2 g> sigma'"),
        anchor,
        src.sigma.then(g),
        cone.leg(0)
            .then(g)
            .and_then(|a| cone.leg(1).then(g).map(|c| (a, c)))
            .and_then(|(a, c)| dst.pair2(&a, &c))
            .and_then(|p| p.then(&dst.sigma)),
    );
    if square && lift && !(zero && add) {
        for rec in &mut sub.records {
            if rec.verdict != crate::report::Verdict::Pass {
                rec.note = Some("linear but not additive: engine invariant violated".into());
            }
        }
    }
    r.records.extend(sub.records);
    square && lift && zero && add
}

/// Whether `(g, f)` is a linear morphism `src → dst`.
pub fn is_linear_morphism(g: &PolyMap, f: &PolyMap, src: &DiffBundle, dst: &DiffBundle) -> bool {
    let mut r = Report::new("");
    check_linear_into(&mut r, "linear", "linear morphism", g, f, src, dst)
}

/// `f*(E̲)` over `N`, with total `(y, w)`, and the cartesian morphism
/// `(f', f) : f*(E̲) → E̲`.
pub fn pullback_bundle(f: &PolyMap, b: &DiffBundle) -> Result<(DiffBundle, BundleMorphism)> {
    dim_check("pullback map codomain", b.base_dim(), f.cod())?;
    let n = f.dom();
    let fibre = b.fibre_coords();
    let k = fibre.len();
    let big_n = b.total_dim();
    let p = n + k;
    let v = Polynomial::var;

    // (y, w) ↦ e with base ← f(y), fibre ← w.
    let embed = |arity: usize, map: &PolyMap| -> Vec<Polynomial> {
        let idx: Vec<usize> = (0..n).collect();
        map.components()
            .iter()
            .map(|c| c.rename(arity, &idx).expect("in range"))
            .collect()
    };
    let f_in = |arity: usize| embed(arity, f);
    let to_e = |arity: usize, fibre_offset: usize| -> Vec<Polynomial> {
        let fy = f_in(arity);
        (0..big_n)
            .map(|c| match b.base_coords.iter().position(|&bc| bc == c) {
                Some(i) => fy[i].clone(),
                None => {
                    let j = fibre.iter().position(|&fc| fc == c).expect("fibre coord");
                    v(arity, fibre_offset + j)
                }
            })
            .collect()
    };
    let f_prime = PolyMap::new(p, to_e(p, n))?;

    let a2 = n + 2 * k;
    let mut into_e2 = to_e(a2, n);
    into_e2.extend((0..k).map(|j| v(a2, n + k + j)));
    let s2 = PolyMap::new(a2, into_e2)?.then(&b.sigma)?;
    let sigma = PolyMap::new(
        a2,
        (0..n)
            .map(|i| v(a2, i))
            .chain(fibre.iter().map(|&c| s2.component(c).clone()))
            .collect(),
    )?;

    let fz = f.then(&b.zeta)?;
    let zeta = PolyMap::new(
        n,
        (0..n)
            .map(|i| v(n, i))
            .chain(fibre.iter().map(|&c| fz.component(c).clone()))
            .collect(),
    )?;

    let fl = f_prime.then(&b.lambda)?;
    let lambda = PolyMap::new(
        p,
        (0..n)
            .map(|i| v(p, i))
            .chain(fibre.iter().map(|&c| fl.component(c).clone()))
            .chain((0..n).map(|_| Polynomial::zero(p)))
            .chain(fibre.iter().map(|&c| fl.component(big_n + c).clone()))
            .collect(),
    )?;

    let mut layout = Vec::new();
    if n > 0 {
        layout.push(("x".to_string(), n));
    }
    if k > 0 {
        layout.push(("w".to_string(), k));
    }
    let bundle = DiffBundle::new(
        Space::new(layout)?,
        Space::euclidean(n),
        (0..n).collect(),
        sigma,
        zeta,
        lambda,
    )?;
    Ok((
        bundle,
        BundleMorphism {
            top: f_prime,
            bottom: f.clone(),
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polycore::rational;
    use crate::report::Verdict;

    fn x(n: usize, i: usize) -> Polynomial {
        Polynomial::var(n, i)
    }

    #[test]
    fn tangent_lift_needs_the_flip() {
        let b = tangent_bundle(1);
        let tb = tangent_of_bundle(&b);
        let plain = DiffBundle::new(
            tb.total.clone(),
            tb.base.clone(),
            tb.base_coords.clone(),
            tb.sigma.clone(),
            tb.zeta.clone(),
            t_map(&b.lambda),
        )
        .unwrap();
        assert!(!verify_bundle(&plain).passed());
    }

    #[test]
    fn constructors_verify() {
        for n in 1..=2 {
            assert!(verify_bundle(&tangent_bundle(n)).passed());
            for k in 0..=2 {
                let b = trivial_bundle(&Space::euclidean(n), k);
                let r = verify_bundle(&b);
                assert!(r.passed(), "{r}");
                assert!(verify_bundle(&tangent_of_bundle(&b)).passed());
            }
        }
    }

    #[test]
    fn trivial_mu_formula() {
        let b = trivial_bundle(&Space::euclidean(1), 1);
        let mu = mu_map(&b).unwrap();
        let z = Polynomial::zero(3);
        assert_eq!(
            mu,
            PolyMap::new(3, vec![x(3, 0), x(3, 2), z, x(3, 1)]).unwrap()
        );
        let tm = mu_map(&tangent_bundle(1)).unwrap();
        assert_eq!(tm, mu);
    }

    #[test]
    fn squared_lift_fails_axiom_two() {
        let b = trivial_bundle(&Space::euclidean(1), 1);
        let w = x(2, 1);
        let lambda = PolyMap::new(
            2,
            vec![x(2, 0), Polynomial::zero(2), Polynomial::zero(2), &w * &w],
        )
        .unwrap();
        let bad = DiffBundle::new(
            b.total().clone(),
            b.base().clone(),
            vec![0],
            b.sigma().clone(),
            b.zeta().clone(),
            lambda,
        )
        .unwrap();
        let r = verify_bundle(&bad);
        let rec = r
            .find("sigma lambda = <pi1 lambda, pi2 lambda> T(sigma)")
            .unwrap();
        assert_eq!(rec.verdict, Verdict::Fail);
        assert_eq!(rec.anchor, "bundle axiom 2");
    }

    #[test]
    fn doubled_lift_still_certifies_universality() {
        let b = trivial_bundle(&Space::euclidean(1), 1);
        let mut comps = b.lambda().components().to_vec();
        comps[3] = comps[3].scale(&rational(2));
        let doubled = DiffBundle::new(
            b.total().clone(),
            b.base().clone(),
            vec![0],
            b.sigma().clone(),
            b.zeta().clone(),
            PolyMap::new(2, comps).unwrap(),
        )
        .unwrap();
        let r = check_universality(&doubled);
        assert!(r.passed(), "{r}");
    }

    #[test]
    fn tangent_of_tangent_bundle_projection() {
        let tt = tangent_of_bundle(&tangent_bundle(1));
        assert_eq!(tt.q(), PolyMap::selection(4, &[0, 2]).unwrap());
    }

    #[test]
    fn linear_morphism_examples() {
        let tm = tangent_bundle(1);
        let ttm = tangent_of_bundle(&tm);
        assert!(is_linear_morphism(&lift_l(1), &zero_0(1), &tm, &ttm));
        assert!(is_linear_morphism(
            &PolyMap::identity(2),
            &PolyMap::identity(1),
            &tm,
            &tm
        ));
        let sq = PolyMap::new(2, vec![x(2, 0), &x(2, 1) * &x(2, 1)]).unwrap();
        assert!(!is_linear_morphism(&sq, &PolyMap::identity(1), &tm, &tm));
    }

    #[test]
    fn pullback_along_identity_is_identity() {
        let b = trivial_bundle(&Space::euclidean(1), 1);
        let (pb, mor) = pullback_bundle(&PolyMap::identity(1), &b).unwrap();
        assert!(pb.same_structure(&b));
        assert_eq!(mor.top, PolyMap::identity(2));
    }

    #[test]
    fn pullbacks_verify() {
        let tm = tangent_bundle(1);
        let (a, _) = pullback_bundle(&tm.q(), &tm).unwrap();
        let (b, _) = pullback_bundle(&proj_p(1), &tm).unwrap();
        assert_eq!((a.total_dim(), b.total_dim()), (3, 3));
        assert!(verify_bundle(&a).passed());
        assert!(verify_bundle(&b).passed());
        let c = PolyMap::new(2, vec![Polynomial::constant(2, rational(3))]).unwrap();
        let (pc, mor) = pullback_bundle(&c, &tm).unwrap();
        assert!(verify_bundle(&pc).passed());
        assert!(is_linear_morphism(&mor.top, &mor.bottom, &pc, &tm));
    }

    #[test]
    fn determinant_and_adjugate() {
        let a = vec![
            vec![Polynomial::constant(1, rational(2)), x(1, 0)],
            vec![Polynomial::zero(1), Polynomial::constant(1, rational(3))],
        ];
        assert_eq!(determinant(&a, 1).constant_value(), Some(rational(6)));
        let adj = adjugate(&a, 1);
        assert_eq!(adj[0][1], -&x(1, 0));
        assert_eq!(adj[1][1].constant_value(), Some(rational(2)));
    }
}
