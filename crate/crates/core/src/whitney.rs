//! Hom-monoids, Whitney sums and partial bundles over a fixed base.
//!
//! The canonical Whitney sum of `E₁, …, E_r` over `M = ℝᵐ` has total space
//! `C = (x, w₁, …, w_r)`: the shared base point followed by one fibre block
//! per summand. Its projections are coordinate selections and every structure
//! map is induced summandwise through the fibre-product pairing. A sum may
//! also be *presented* on another total space via an isomorphism to `C`; all
//! structure is then transported along it.

use crate::cone::SelectionCone;
use crate::dbundle::{power_cone, tangent_of_bundle, DiffBundle};
use crate::error::{dim_check, Error, Result};
use crate::polycore::{PolyMap, Rational};
use crate::report::Report;
use crate::tangent::{t_map, zero_0, Space};

/// `q ζ' : E → F`, the neutral element of the hom-monoid.
pub fn hom_zero(src: &DiffBundle, dst: &DiffBundle) -> Result<PolyMap> {
    dim_check("hom_zero bases", src.base_dim(), dst.base_dim())?;
    src.q().then(dst.zeta())
}

/// `f + g = ⟨f, g⟩ σ'`.
pub fn hom_add(f: &PolyMap, g: &PolyMap, src: &DiffBundle, dst: &DiffBundle) -> Result<PolyMap> {
    dim_check("hom_add domain", src.total_dim(), f.dom())?;
    dst.pair2(f, g)?.then(dst.sigma())
}

/// Verifies that `T` is additive on the pair `f, g : src → dst`.
pub fn check_t_additive(f: &PolyMap, g: &PolyMap, src: &DiffBundle, dst: &DiffBundle) -> Report {
    let mut r = Report::new("additivity of T on linear morphisms");
    let (tsrc, tdst) = (tangent_of_bundle(src), tangent_of_bundle(dst));
    let anchor = "T additive";
    r.check_eq(
        "T(f + g) = T(f) + T(g)",
        anchor,
        hom_add(f, g, src, dst).map(|s| t_map(&s)),
        hom_add(&t_map(f), &t_map(g), &tsrc, &tdst),
    );
    r.check_eq(
        "T(0) = 0",
        anchor,
        hom_zero(src, dst).map(|z| t_map(&z)),
        hom_zero(&tsrc, &tdst),
    );
    r
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Presentation {
    /// `total → C`
    to_model: PolyMap,
    /// `C → total`
    from_model: PolyMap,
}

/// A Whitney sum `E₁ ⊕ ⋯ ⊕ E_r` with its projections and injections.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BiproductBundle {
    sum: DiffBundle,
    canonical: DiffBundle,
    summands: Vec<DiffBundle>,
    /// Legs of `C` as a fibre product; `None` only for the empty sum.
    cone: Option<SelectionCone>,
    projections: Vec<PolyMap>,
    injections: Vec<PolyMap>,
    presentation: Option<Presentation>,
}

/// The `j`-th partial bundle: the sum's total space as a bundle over `E_j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialBundle {
    pub bundle: DiffBundle,
    pub index: usize,
}

/// The canonical Whitney sum over `base`.
pub fn biproduct(base: &Space, summands: &[DiffBundle]) -> Result<BiproductBundle> {
    let m = base.dim();
    for e in summands {
        dim_check("summand base", m, e.base_dim())?;
    }
    if summands.is_empty() {
        let sum = DiffBundle::new(
            base.clone(),
            base.clone(),
            (0..m).collect(),
            PolyMap::identity(m),
            PolyMap::identity(m),
            zero_0(m),
        )?;
        return Ok(BiproductBundle {
            canonical: sum.clone(),
            sum,
            summands: Vec::new(),
            cone: None,
            projections: Vec::new(),
            injections: Vec::new(),
            presentation: None,
        });
    }

    let mut layout = base.layout().to_vec();
    let mut legs = Vec::with_capacity(summands.len());
    let mut offset = m;
    for (i, e) in summands.iter().enumerate() {
        let fibre = e.fibre_coords();
        if !fibre.is_empty() {
            let name = if summands.len() == 1 {
                "w".to_string()
            } else {
                format!("w{}", i + 1)
            };
            layout.push((name, fibre.len()));
        }
        let leg: Vec<usize> = (0..e.total_dim())
            .map(|k| match e.base_coords().iter().position(|&b| b == k) {
                Some(b) => b,
                None => offset + fibre.iter().position(|&c| c == k).expect("fibre coord"),
            })
            .collect();
        offset += fibre.len();
        legs.push(leg);
    }
    let total = Space::new(layout)?;
    let c = total.dim();
    let cone = SelectionCone::new(c, legs)?;
    let proj: Vec<PolyMap> = (0..summands.len()).map(|i| cone.leg(i)).collect();

    let c2 = power_cone(c, &(0..m).collect::<Vec<_>>(), 2);
    let (p1, p2) = (c2.leg(0), c2.leg(1));
    let mut sig = Vec::new();
    let mut lam = Vec::new();
    for (e, pi) in summands.iter().zip(&proj) {
        sig.push(e.pair2(&p1.then(pi)?, &p2.then(pi)?)?.then(e.sigma())?);
        lam.push(pi.then(e.lambda())?);
    }
    let sigma = cone.pair_checked(&sig.iter().collect::<Vec<_>>())?;
    let zetas: Vec<&PolyMap> = summands.iter().map(DiffBundle::zeta).collect();
    let zeta = cone.pair_checked(&zetas)?;
    let lambda = cone
        .tangent()
        .pair_checked(&lam.iter().collect::<Vec<_>>())?;
    let sum = DiffBundle::new(total, base.clone(), (0..m).collect(), sigma, zeta, lambda)?;

    let mut injections = Vec::with_capacity(summands.len());
    for (i, ei) in summands.iter().enumerate() {
        let parts: Vec<PolyMap> = summands
            .iter()
            .enumerate()
            .map(|(j, ej)| {
                if i == j {
                    Ok(PolyMap::identity(ei.total_dim()))
                } else {
                    ei.q().then(ej.zeta())
                }
            })
            .collect::<Result<_>>()?;
        injections.push(cone.pair_checked(&parts.iter().collect::<Vec<_>>())?);
    }
    Ok(BiproductBundle {
        canonical: sum.clone(),
        sum,
        summands: summands.to_vec(),
        cone: Some(cone),
        projections: proj,
        injections,
        presentation: None,
    })
}

impl BiproductBundle {
    pub fn sum(&self) -> &DiffBundle {
        &self.sum
    }
    /// The sum on the concatenation model `C`, whatever the presentation.
    pub fn canonical_sum(&self) -> &DiffBundle {
        &self.canonical
    }
    pub fn summands(&self) -> &[DiffBundle] {
        &self.summands
    }
    pub fn projections(&self) -> &[PolyMap] {
        &self.projections
    }
    pub fn injections(&self) -> &[PolyMap] {
        &self.injections
    }
    pub fn len(&self) -> usize {
        self.summands.len()
    }
    pub fn is_empty(&self) -> bool {
        self.summands.is_empty()
    }
    /// `total → C`, identity for the canonical presentation.
    pub fn to_model(&self) -> PolyMap {
        self.presentation.as_ref().map_or_else(
            || PolyMap::identity(self.sum.total_dim()),
            |p| p.to_model.clone(),
        )
    }
    /// `C → total`.
    pub fn from_model(&self) -> PolyMap {
        self.presentation.as_ref().map_or_else(
            || PolyMap::identity(self.sum.total_dim()),
            |p| p.from_model.clone(),
        )
    }

    fn cone(&self) -> Result<&SelectionCone> {
        self.cone
            .as_ref()
            .ok_or_else(|| Error::Precondition("the empty Whitney sum has no legs".into()))
    }

    /// Pairing `⟨f₁, …, f_r⟩ : X → total` out of maps into the summands.
    pub fn pair_total(&self, maps: &[&PolyMap]) -> Result<PolyMap> {
        let p = self.cone()?.pair_checked(maps)?;
        match &self.presentation {
            None => Ok(p),
            Some(pr) => p.then(&pr.from_model),
        }
    }

    /// Pairs concrete points of the summands into a point of the total space.
    pub fn pair_points(&self, points: &[Vec<Rational>]) -> Result<Vec<Rational>> {
        let c = self.cone()?.pair_points(points)?;
        match &self.presentation {
            None => Ok(c),
            Some(pr) => pr.from_model.eval(&c),
        }
    }

    /// Pairing into `T(total)` out of maps into the `TE_i`.
    pub fn pair_total_tangent(&self, maps: &[&PolyMap]) -> Result<PolyMap> {
        let p = self.cone()?.tangent().pair_checked(maps)?;
        match &self.presentation {
            None => Ok(p),
            Some(pr) => p.then(&t_map(&pr.from_model)),
        }
    }

    /// The same sum presented on `total` through `to_model : total → C`.
    pub fn presented(
        &self,
        total: Space,
        to_model: PolyMap,
        from_model: PolyMap,
    ) -> Result<BiproductBundle> {
        if self.presentation.is_some() {
            return Err(Error::Precondition("sum is already presented".into()));
        }
        let sum = self.canonical.transport(total, &from_model, &to_model)?;
        let projections = self
            .projections
            .iter()
            .map(|p| to_model.then(p))
            .collect::<Result<_>>()?;
        let injections = self
            .injections
            .iter()
            .map(|i| i.then(&from_model))
            .collect::<Result<_>>()?;
        Ok(BiproductBundle {
            sum,
            canonical: self.canonical.clone(),
            summands: self.summands.clone(),
            cone: self.cone.clone(),
            projections,
            injections,
            presentation: Some(Presentation {
                to_model,
                from_model,
            }),
        })
    }

    /// Checks `ιᵢπᵢ = 1`, `ιᵢπⱼ = 0` and `Σ πᵢιᵢ = 1`.
    pub fn check_laws(&self) -> Report {
        let mut r = Report::new(format!("Whitney sum of {} summands", self.len()));
        let anchor = "biproduct identities";
        for (i, (ii, ei)) in self.injections.iter().zip(&self.summands).enumerate() {
            for (j, (pj, ej)) in self.projections.iter().zip(&self.summands).enumerate() {
                let rhs = if i == j {
                    Ok(PolyMap::identity(ei.total_dim()))
                } else {
                    hom_zero(ei, ej)
                };
                let name = format!(
                    "iota{} pi{} = {}",
                    i + 1,
                    j + 1,
                    if i == j { "1" } else { "0" }
                );
                r.check_eq(&name, anchor, ii.then(pj), rhs);
            }
        }
        let mut acc = hom_zero(&self.sum, &self.sum);
        for (p, i) in self.projections.iter().zip(&self.injections) {
            acc = acc.and_then(|a| {
                let pi = p.then(i)?;
                hom_add(&a, &pi, &self.sum, &self.sum)
            });
        }
        r.check_eq(
            "sum of pi_i iota_i = 1",
            anchor,
            acc,
            Ok(PolyMap::identity(self.sum.total_dim())),
        );
        r
    }

    /// For a subset `I` of summands: the canonical sum `⊕_{i∈I} Eᵢ` with
    /// `π_I : total → ⊕_I` and `ι_I : ⊕_I → total`.
    pub fn sub_sum(&self, idx: &[usize]) -> Result<(BiproductBundle, PolyMap, PolyMap)> {
        for &i in idx {
            if i >= self.len() {
                return Err(Error::IndexOutOfRange {
                    index: i,
                    len: self.len(),
                });
            }
        }
        let parts: Vec<DiffBundle> = idx.iter().map(|&i| self.summands[i].clone()).collect();
        let sub = biproduct(self.sum.base(), &parts)?;
        let pis: Vec<&PolyMap> = idx.iter().map(|&i| &self.projections[i]).collect();
        let pi = sub.pair_total(&pis)?;
        let legs: Vec<PolyMap> = (0..self.len())
            .map(|j| match idx.iter().position(|&i| i == j) {
                Some(pos) => Ok(sub.projections[pos].clone()),
                None => sub.sum.q().then(self.summands[j].zeta()),
            })
            .collect::<Result<_>>()?;
        let iota = self.pair_total(&legs.iter().collect::<Vec<_>>())?;
        Ok((sub, pi, iota))
    }
}

/// The `j`-th partial bundle of a Whitney sum.
pub fn partial_bundle(bp: &BiproductBundle, j: usize) -> Result<PartialBundle> {
    if j >= bp.len() {
        return Err(Error::IndexOutOfRange {
            index: j,
            len: bp.len(),
        });
    }
    let cone = bp.cone()?;
    let c = bp.canonical.total_dim();
    let base_coords = cone.legs()[j].clone();
    let c2 = power_cone(c, &base_coords, 2);
    let (p1, p2) = (c2.leg(0), c2.leg(1));
    let mut sig = Vec::new();
    let mut lam = Vec::new();
    for (i, e) in bp.summands.iter().enumerate() {
        let pi = cone.leg(i);
        if i == j {
            sig.push(p1.then(&pi)?);
            lam.push(pi.then(&zero_0(e.total_dim()))?);
        } else {
            sig.push(e.pair2(&p1.then(&pi)?, &p2.then(&pi)?)?.then(e.sigma())?);
            lam.push(pi.then(e.lambda())?);
        }
    }
    let sigma = cone.pair_checked(&sig.iter().collect::<Vec<_>>())?;
    let lambda = cone
        .tangent()
        .pair_checked(&lam.iter().collect::<Vec<_>>())?;
    let zeta = bp.injections_canonical(j)?;
    let canonical = DiffBundle::new(
        bp.canonical.total().clone(),
        bp.summands[j].total().clone(),
        base_coords,
        sigma,
        zeta,
        lambda,
    )?;
    let bundle = match &bp.presentation {
        None => canonical,
        Some(pr) => canonical.transport(bp.sum.total().clone(), &pr.from_model, &pr.to_model)?,
    };
    Ok(PartialBundle { bundle, index: j })
}

impl BiproductBundle {
    fn injections_canonical(&self, j: usize) -> Result<PolyMap> {
        match &self.presentation {
            None => Ok(self.injections[j].clone()),
            Some(pr) => self.injections[j].then(&pr.to_model),
        }
    }
}

/// `f +ʲ g`: adds the components other than `j` summandwise and keeps the
/// shared `j`-th component.
pub fn partial_add(f: &PolyMap, g: &PolyMap, bp: &BiproductBundle, j: usize) -> Result<PolyMap> {
    if j >= bp.len() {
        return Err(Error::IndexOutOfRange {
            index: j,
            len: bp.len(),
        });
    }
    let pj = &bp.projections[j];
    let (fj, gj) = (f.then(pj)?, g.then(pj)?);
    if let Some(d) = fj.diff(&gj)? {
        return Err(Error::Precondition(format!(
            "f and g differ on summand {}: {d}",
            j + 1
        )));
    }
    let parts: Vec<PolyMap> = bp
        .summands
        .iter()
        .zip(&bp.projections)
        .enumerate()
        .map(|(i, (e, pi))| {
            if i == j {
                Ok(fj.clone())
            } else {
                e.pair2(&f.then(pi)?, &g.then(pi)?)?.then(e.sigma())
            }
        })
        .collect::<Result<_>>()?;
    bp.pair_total(&parts.iter().collect::<Vec<_>>())
}

/// For every ordered triple of distinct summands `(i, j, k)`:
/// `πᵢιᵢ +ʲ π_kι_k = π_{ik}ι_{ik}` and `π_{ik}ι_{ik} +ⁱ π_{ij}ι_{ij} = 1` when
/// the sum has exactly three summands.
pub fn check_partial_addition_lemmas(bp: &BiproductBundle) -> Report {
    let mut r = Report::new(format!("partial addition on a sum of {}", bp.len()));
    let n = bp.len();
    let idem = |i: usize| bp.projections[i].then(&bp.injections[i]);
    let pair_idem = |a: usize, b: usize| -> Result<PolyMap> {
        let (_, pi, iota) = bp.sub_sum(&[a.min(b), a.max(b)])?;
        pi.then(&iota)
    };
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if i == j || j == k || i == k {
                    continue;
                }
                let (a, b, c) = (i + 1, j + 1, k + 1);
                r.check_eq(
                    &format!("pi{a} iota{a} +{b} pi{c} iota{c} = pi{a}{c} iota{a}{c}"),
                    "injection additivity",
                    idem(i).and_then(|f| idem(k).and_then(|g| partial_add(&f, &g, bp, j))),
                    pair_idem(i, k),
                );
                if n == 3 {
                    r.check_eq(
                        &format!("pi{a}{c} iota{a}{c} +{a} pi{a}{b} iota{a}{b} = 1"),
                        "pairwise decomposition",
                        pair_idem(i, k)
                            .and_then(|f| pair_idem(i, j).and_then(|g| partial_add(&f, &g, bp, i))),
                        Ok(PolyMap::identity(bp.sum.total_dim())),
                    );
                }
            }
        }
    }
    r
}

/// Decides whether `projections` present `total` as the Whitney sum of
/// `summands`, returning the transported sum on success.
pub fn recognize_biproduct(
    total: &Space,
    projections: &[PolyMap],
    summands: &[DiffBundle],
) -> (Report, Option<BiproductBundle>) {
    let mut r = Report::new("biproduct recognition");
    let anchor = "biproduct uniqueness";
    let Some(first) = summands.first() else {
        r.fail("summands given", anchor, "no summands");
        return (r, None);
    };
    if projections.len() != summands.len() {
        r.fail("one projection per summand", anchor, "count mismatch");
        return (r, None);
    }
    let base = first.base().clone();
    let canonical = match biproduct(&base, summands) {
        Ok(b) => b,
        Err(e) => {
            r.fail("summands share a base", anchor, e.to_string());
            return (r, None);
        }
    };
    let base_of = |i: usize| projections[i].then(&summands[i].q());
    for i in 1..summands.len() {
        if !r.check_eq(
            &format!("pi{} q{} = pi1 q1", i + 1, i + 1),
            anchor,
            base_of(i),
            base_of(0),
        ) {
            return (r, None);
        }
    }
    let c = canonical.sum.total_dim();
    if total.dim() != c {
        r.fail(
            "pairing is invertible",
            anchor,
            format!(
                "total has dimension {} but the fibre product has {c}",
                total.dim()
            ),
        );
        return (r, None);
    }
    let phi = match canonical.pair_total(&projections.iter().collect::<Vec<_>>()) {
        Ok(p) => p,
        Err(e) => {
            r.fail("pairing is defined", anchor, e.to_string());
            return (r, None);
        }
    };
    let Some(psi) = phi.triangular_inverse() else {
        r.cannot_certify(
            "pairing is invertible",
            anchor,
            "no triangular polynomial inverse found",
        );
        return (r, None);
    };
    r.pass("pairing is invertible", anchor);
    r.check_eq(
        "T(pairing) is invertible",
        "tangential fibre product",
        t_map(&phi).then(&t_map(&psi)),
        Ok(PolyMap::identity(2 * c)),
    );
    match canonical.presented(total.clone(), phi, psi) {
        Ok(bp) => (r, Some(bp)),
        Err(e) => {
            r.cannot_certify(
                "transported sum in standard position",
                anchor,
                e.to_string(),
            );
            (r, None)
        }
    }
}
