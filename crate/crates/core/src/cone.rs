//! Fibre products whose projections are coordinate selections.
//!
//! A [`SelectionCone`] describes a space `P = ℝ^dim` together with legs
//! `πᵢ : P → Aᵢ`, each a coordinate selection, such that every coordinate of
//! `P` is read by at least one leg. Pairing a compatible family `fᵢ : X → Aᵢ`
//! is then a matter of reading each coordinate of `P` from one leg. Applying
//! `T` to such a cone gives another one, which is how the engine witnesses
//! that `T` preserves these fibre products.

use crate::error::{dim_check, Error, Result};
use crate::polycore::{PolyMap, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SelectionCone {
    dim: usize,
    legs: Vec<Vec<usize>>,
    /// For each coordinate of the apex: (leg, position within that leg).
    source: Vec<(usize, usize)>,
}

impl SelectionCone {
    pub fn new(dim: usize, legs: Vec<Vec<usize>>) -> Result<Self> {
        let mut source = vec![None; dim];
        for (l, leg) in legs.iter().enumerate() {
            for (pos, &k) in leg.iter().enumerate() {
                if k >= dim {
                    return Err(Error::IndexOutOfRange { index: k, len: dim });
                }
                source[k].get_or_insert((l, pos));
            }
        }
        let source = source
            .into_iter()
            .enumerate()
            .map(|(k, s)| {
                s.ok_or_else(|| Error::Shape(format!("cone coordinate {k} is read by no leg")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SelectionCone { dim, legs, source })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn legs(&self) -> &[Vec<usize>] {
        &self.legs
    }

    /// The `i`-th projection as a polynomial map.
    pub fn leg(&self, i: usize) -> PolyMap {
        PolyMap::selection(self.dim, &self.legs[i]).expect("legs are validated")
    }

    /// The pairing `⟨f₀, …, f_r⟩ : X → P`, reading each apex coordinate from
    /// its designated leg. Does not check compatibility; see
    /// [`pair_checked`](Self::pair_checked).
    pub fn pair(&self, maps: &[&PolyMap]) -> Result<PolyMap> {
        dim_check("number of pairing legs", self.legs.len(), maps.len())?;
        let dom = maps.first().map_or(0, |m| m.dom());
        for (m, leg) in maps.iter().zip(&self.legs) {
            dim_check("pairing domain", dom, m.dom())?;
            dim_check("pairing leg codomain", leg.len(), m.cod())?;
        }
        let comps = self
            .source
            .iter()
            .map(|&(l, pos)| maps[l].component(pos).clone())
            .collect();
        PolyMap::new(dom, comps)
    }

    /// As [`pair`](Self::pair), additionally verifying `⟨…⟩πᵢ = fᵢ` for every
    /// leg, i.e. that the family agrees wherever legs overlap.
    pub fn pair_checked(&self, maps: &[&PolyMap]) -> Result<PolyMap> {
        let p = self.pair(maps)?;
        for (i, (m, leg)) in maps.iter().zip(&self.legs).enumerate() {
            if let Some(d) = p.pick(leg)?.diff(m)? {
                return Err(Error::Precondition(format!(
                    "pairing legs disagree on leg {i}: {d}"
                )));
            }
        }
        Ok(p)
    }

    /// Pairs concrete points, checking that they agree on shared coordinates.
    pub fn pair_points(&self, points: &[Vec<Rational>]) -> Result<Vec<Rational>> {
        dim_check("number of pairing legs", self.legs.len(), points.len())?;
        let mut out: Vec<Option<Rational>> = vec![None; self.dim];
        for (p, leg) in points.iter().zip(&self.legs) {
            dim_check("pairing point", leg.len(), p.len())?;
            for (v, &k) in p.iter().zip(leg) {
                match &out[k] {
                    Some(prev) if prev != v => {
                        return Err(Error::Precondition(format!(
                            "points disagree on shared coordinate {k}"
                        )))
                    }
                    _ => out[k] = Some(v.clone()),
                }
            }
        }
        Ok(out
            .into_iter()
            .map(|v| v.expect("cone covers apex"))
            .collect())
    }

    /// The cone obtained by applying `T`: apex `TP = P × P`, legs
    /// `T(πᵢ) = πᵢ ++ (πᵢ + dim)`.
    pub fn tangent(&self) -> SelectionCone {
        let legs = self
            .legs
            .iter()
            .map(|l| {
                l.iter()
                    .copied()
                    .chain(l.iter().map(|k| k + self.dim))
                    .collect()
            })
            .collect();
        SelectionCone::new(2 * self.dim, legs).expect("doubled cone covers its apex")
    }
}
