//! JSON interchange for polynomials, maps, bundles and connections.
//!
//! ```json
//! {"arity": 2, "terms": [{"coeff": "-1/2", "exps": [1, 1]}]}
//! {"dom": 2, "cod": 1, "components": [ <polynomial> ]}
//! {"total": <space>, "base": <space>, "base_coords": [0],
//!  "sigma": <map>, "zeta": <map>, "lambda": <map>}
//! {"bundle": <bundle>, "K": <map>, "H": <map>, "gamma": [[<polynomial>]]}
//! ```
//!
//! Coefficients are exact fractions written as strings; decimals are
//! rejected. Terms are written leading term first.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::connection::{christoffel_connection, ChristoffelTable, Connection, Decomposition};
use crate::dbundle::DiffBundle;
use crate::error::{Error, Result};
use crate::polycore::{format_rational, parse_rational, PolyMap, Polynomial};
use crate::tangent::Space;
use crate::whitney::BiproductBundle;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermRepr {
    coeff: String,
    exps: Vec<u32>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PolyRepr {
    arity: usize,
    terms: Vec<TermRepr>,
}

impl Serialize for Polynomial {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PolyRepr {
            arity: self.arity(),
            terms: self
                .terms()
                .rev()
                .map(|(m, c)| TermRepr {
                    coeff: format_rational(c),
                    exps: m.exponents().to_vec(),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Polynomial {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = PolyRepr::deserialize(d)?;
        let terms = r
            .terms
            .into_iter()
            .map(|t| Ok((t.exps, parse_rational(&t.coeff)?)))
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        Polynomial::from_terms(r.arity, terms).map_err(D::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MapRepr {
    dom: usize,
    cod: usize,
    components: Vec<Polynomial>,
}

impl Serialize for PolyMap {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MapRepr {
            dom: self.dom(),
            cod: self.cod(),
            components: self.components().to_vec(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PolyMap {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = MapRepr::deserialize(d)?;
        if r.components.len() != r.cod {
            return Err(D::Error::custom(format!(
                "map declares cod {} but has {} components",
                r.cod,
                r.components.len()
            )));
        }
        PolyMap::new(r.dom, r.components).map_err(D::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BundleRepr {
    total: Space,
    base: Space,
    base_coords: Vec<usize>,
    sigma: PolyMap,
    zeta: PolyMap,
    lambda: PolyMap,
}

impl Serialize for DiffBundle {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        BundleRepr {
            total: self.total().clone(),
            base: self.base().clone(),
            base_coords: self.base_coords().to_vec(),
            sigma: self.sigma().clone(),
            zeta: self.zeta().clone(),
            lambda: self.lambda().clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for DiffBundle {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = BundleRepr::deserialize(d)?;
        DiffBundle::new(r.total, r.base, r.base_coords, r.sigma, r.zeta, r.lambda)
            .map_err(D::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConnectionRepr {
    bundle: DiffBundle,
    #[serde(rename = "K")]
    k: PolyMap,
    #[serde(rename = "H", default, skip_serializing_if = "Option::is_none")]
    h: Option<PolyMap>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    gamma: Option<Vec<Vec<Polynomial>>>,
}

impl Serialize for Connection {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ConnectionRepr {
            bundle: self.bundle().clone(),
            k: self.k().clone(),
            h: self.h().cloned(),
            gamma: self.gamma().map(|g| g.entries().to_vec()),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Connection {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = ConnectionRepr::deserialize(d)?;
        connection_from_parts(r).map_err(D::Error::custom)
    }
}

fn connection_from_parts(r: ConnectionRepr) -> Result<Connection> {
    let c = Connection::new(r.bundle, r.k, r.h)?;
    let Some(rows) = r.gamma else {
        return Ok(c);
    };
    let n = c.bundle().base_dim();
    let table = ChristoffelTable::new(n, rows)?;
    // The table must describe the K it travels with.
    let expected = christoffel_connection(c.bundle().base(), table.clone())?;
    if !expected.bundle().same_structure(c.bundle()) {
        return Err(Error::Precondition(
            "gamma is only meaningful for the tangent bundle T(M)".into(),
        ));
    }
    if let Some(d) = expected.k().diff(c.k())? {
        return Err(Error::Precondition(format!("K does not match gamma: {d}")));
    }
    Ok(c.with_gamma(table))
}

fn json_error(e: serde_json::Error) -> Error {
    Error::Json(e.to_string())
}

pub fn parse_polymap(s: &str) -> Result<PolyMap> {
    serde_json::from_str(s).map_err(json_error)
}

pub fn parse_bundle(s: &str) -> Result<DiffBundle> {
    serde_json::from_str(s).map_err(json_error)
}

pub fn parse_connection(s: &str) -> Result<Connection> {
    serde_json::from_str(s).map_err(json_error)
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("engine values serialize");
    s.push('\n');
    s
}

#[derive(Serialize)]
struct BiproductView<'a> {
    sum: &'a DiffBundle,
    summands: &'a [DiffBundle],
    projections: &'a [PolyMap],
    injections: &'a [PolyMap],
}

pub fn biproduct_json(bp: &BiproductBundle) -> String {
    to_json(&BiproductView {
        sum: bp.sum(),
        summands: bp.summands(),
        projections: bp.projections(),
        injections: bp.injections(),
    })
}

#[derive(Serialize)]
struct DecompositionView<'a> {
    theta: &'a PolyMap,
    theta_inv: &'a PolyMap,
    projections: &'a [PolyMap],
    injections: &'a [PolyMap],
    total: &'a DiffBundle,
}

pub fn decomposition_json(d: &Decomposition) -> String {
    to_json(&DecompositionView {
        theta: &d.theta,
        theta_inv: &d.theta_inv,
        projections: d.biproduct.projections(),
        injections: d.biproduct.injections(),
        total: &d.total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::connection::canonical_connection;
    use crate::dbundle::tangent_bundle;

    #[test]
    fn polynomial_round_trip() {
        let s = r#"{"arity":2,"terms":[{"coeff":"-2/4","exps":[1,1]},{"coeff":"3","exps":[0,0]}]}"#;
        let p: Polynomial = serde_json::from_str(s).unwrap();
        assert_eq!(p.to_string(), "-1/2*x1*x2 + 3");
        let back: Polynomial = serde_json::from_str(&serde_json::to_string(&p).unwrap()).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn decimals_are_rejected() {
        let s = r#"{"arity":1,"terms":[{"coeff":"0.5","exps":[1]}]}"#;
        assert!(serde_json::from_str::<Polynomial>(s).is_err());
    }

    #[test]
    fn bundle_and_connection_round_trip() {
        let b = tangent_bundle(2);
        assert_eq!(parse_bundle(&to_json(&b)).unwrap(), b);
        let c = canonical_connection(1);
        assert_eq!(parse_connection(&to_json(&c)).unwrap(), c);
    }

    #[test]
    fn errors_carry_location() {
        let err = parse_bundle("{\n  \"total\": 3,\n}").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
    }

    #[test]
    fn gamma_must_match_k() {
        let c = canonical_connection(1);
        let mut v: serde_json::Value = serde_json::from_str(&to_json(&c)).unwrap();
        v["gamma"] = serde_json::json!([[{"arity": 1, "terms": [{"coeff": "1", "exps": [1]}]}]]);
        assert!(parse_connection(&v.to_string()).is_err());
    }
}
