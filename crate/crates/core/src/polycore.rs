//! Exact multivariate polynomials over ℚ and polynomial maps between
//! Cartesian spaces.
//!
//! Everything the engine verifies is an identity between composites of
//! polynomial maps, so equality must be decidable. Polynomials are kept in a
//! canonical form: a sorted map from exponent vectors to nonzero rational
//! coefficients, ordered graded-lexicographically. Two polynomials are equal as
//! functions exactly when they are structurally equal.
//!
//! Composition is written in diagrammatic order throughout the crate:
//! `g.then(&f)` is "first `g`, then `f`", i.e. `x ↦ f(g(x))`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{dim_check, Error, Result};

/// Exact rational coefficient. Always stored in lowest terms with a positive
/// denominator.
pub type Rational = BigRational;

pub fn rational(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

/// `n / d` in lowest terms. Panics if `d == 0`.
pub fn ratio(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"p"` or `"p/q"` (optional leading `-`, decimal digits only).
pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || Error::Coefficient(s.to_string());
    let body = s.strip_prefix('-').unwrap_or(s);
    let (num, den) = match body.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (body, None),
    };
    let digits = |t: &str| !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit());
    if !digits(num) || !den.is_none_or(digits) {
        return Err(bad());
    }
    if let Some(d) = den {
        if d.bytes().all(|b| b == b'0') {
            return Err(bad());
        }
    }
    BigRational::from_str(s).map_err(|_| bad())
}

pub fn format_rational(r: &Rational) -> String {
    r.to_string()
}

/// Exponent vector of a monomial. Ordered graded-lexicographically: first by
/// total degree, then lexicographically with the first variable most
/// significant.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exps: Vec<u32>) -> Self {
        Monomial(exps)
    }

    pub fn one(arity: usize) -> Self {
        Monomial(vec![0; arity])
    }

    pub fn var(arity: usize, i: usize) -> Self {
        let mut e = vec![0; arity];
        e[i] = 1;
        Monomial(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Human-readable form using 1-based variable names `x1, x2, …`.
    pub fn display(&self) -> String {
        let parts: Vec<String> = self
            .0
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| {
                if e == 1 {
                    format!("x{}", i + 1)
                } else {
                    format!("x{}^{}", i + 1, e)
                }
            })
            .collect();
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join("*")
        }
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A polynomial in `arity` variables with exact rational coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Polynomial {
    arity: usize,
    terms: BTreeMap<Monomial, Rational>,
}

impl Polynomial {
    pub fn zero(arity: usize) -> Self {
        Polynomial {
            arity,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(arity: usize) -> Self {
        Self::constant(arity, Rational::one())
    }

    pub fn constant(arity: usize, c: Rational) -> Self {
        let mut p = Self::zero(arity);
        p.add_term(Monomial::one(arity), c);
        p
    }

    /// The coordinate function `x_i`. Panics if `i >= arity`.
    pub fn var(arity: usize, i: usize) -> Self {
        assert!(
            i < arity,
            "variable index {i} out of range for arity {arity}"
        );
        let mut p = Self::zero(arity);
        p.add_term(Monomial::var(arity, i), Rational::one());
        p
    }

    /// Builds a polynomial from `(exponents, coefficient)` pairs, merging
    /// repeated monomials and dropping zeros.
    pub fn from_terms<I>(arity: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u32>, Rational)>,
    {
        let mut p = Self::zero(arity);
        for (exps, c) in terms {
            dim_check("monomial exponent vector", arity, exps.len())?;
            p.add_term(Monomial(exps), c);
        }
        Ok(p)
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get() + c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Number of stored (nonzero) terms.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending canonical order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    /// Total degree; the zero polynomial has degree 0.
    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    /// Largest combined degree in the given variables over all terms.
    pub fn degree_in(&self, vars: &[usize]) -> u32 {
        self.terms
            .keys()
            .map(|m| vars.iter().map(|&v| m.0[v]).sum())
            .max()
            .unwrap_or(0)
    }

    pub fn depends_on(&self, var: usize) -> bool {
        self.terms.keys().any(|m| m.0[var] > 0)
    }

    /// `Some(c)` if the polynomial is the constant `c` (including 0).
    pub fn constant_value(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                (m.degree() == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    /// `Some(i)` if the polynomial is exactly the coordinate `x_i`.
    pub fn as_variable(&self) -> Option<usize> {
        if self.terms.len() != 1 {
            return None;
        }
        let (m, c) = self.terms.iter().next().unwrap();
        if !c.is_one() || m.degree() != 1 {
            return None;
        }
        m.0.iter().position(|&e| e == 1)
    }

    pub fn scale(&self, k: &Rational) -> Polynomial {
        if k.is_zero() {
            return Self::zero(self.arity);
        }
        Polynomial {
            arity: self.arity,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * k)).collect(),
        }
    }

    pub fn checked_add(&self, other: &Polynomial) -> Result<Polynomial> {
        self.same_arity(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Polynomial) -> Result<Polynomial> {
        self.same_arity(other)?;
        let mut out = Self::zero(self.arity);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        Ok(out)
    }

    fn same_arity(&self, other: &Polynomial) -> Result<()> {
        if self.arity == other.arity {
            Ok(())
        } else {
            Err(Error::ArityMismatch {
                left: self.arity,
                right: other.arity,
            })
        }
    }

    pub fn pow(&self, mut e: u32) -> Polynomial {
        let mut base = self.clone();
        let mut acc = Self::one(self.arity);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Partial derivative with respect to variable `var`.
    pub fn derivative(&self, var: usize) -> Polynomial {
        let mut out = Self::zero(self.arity);
        for (m, c) in &self.terms {
            let e = m.0[var];
            if e == 0 {
                continue;
            }
            let mut exps = m.0.clone();
            exps[var] -= 1;
            out.add_term(Monomial(exps), c * rational(i64::from(e)));
        }
        out
    }

    pub fn eval(&self, point: &[Rational]) -> Result<Rational> {
        dim_check("evaluation point", self.arity, point.len())?;
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &e) in point.iter().zip(&m.0) {
                if e > 0 {
                    t *= num_traits::pow(x.clone(), e as usize);
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Substitutes `subs[i]` for variable `x_i`. All substitutes must share
    /// one arity, which becomes the arity of the result.
    pub fn substitute(&self, subs: &[Polynomial]) -> Result<Polynomial> {
        let cache = PowerCache::new(subs, self_sub_arity(subs, self.arity)?);
        cache.apply(self)
    }

    /// Re-indexes variables: `x_i` becomes `y_{map[i]}` in a ring of
    /// `new_arity` variables.
    pub fn rename(&self, new_arity: usize, map: &[usize]) -> Result<Polynomial> {
        dim_check("variable renaming", self.arity, map.len())?;
        if let Some(&bad) = map.iter().find(|&&j| j >= new_arity) {
            return Err(Error::IndexOutOfRange {
                index: bad,
                len: new_arity,
            });
        }
        let mut out = Self::zero(new_arity);
        for (m, c) in &self.terms {
            let mut exps = vec![0; new_arity];
            for (i, &e) in m.0.iter().enumerate() {
                exps[map[i]] += e;
            }
            out.add_term(Monomial(exps), c.clone());
        }
        Ok(out)
    }
}

fn self_sub_arity(subs: &[Polynomial], arity: usize) -> Result<usize> {
    dim_check("substitution", arity, subs.len())?;
    match subs.first() {
        None => Ok(0),
        Some(first) => {
            let a = first.arity;
            for s in subs {
                if s.arity != a {
                    return Err(Error::ArityMismatch {
                        left: a,
                        right: s.arity,
                    });
                }
            }
            Ok(a)
        }
    }
}

/// Caches powers of substituted polynomials so that composing a whole map
/// computes each `subs[j]^e` once.
struct PowerCache<'a> {
    subs: &'a [Polynomial],
    arity: usize,
    powers: std::cell::RefCell<Vec<Vec<Polynomial>>>,
}

impl<'a> PowerCache<'a> {
    fn new(subs: &'a [Polynomial], arity: usize) -> Self {
        PowerCache {
            subs,
            arity,
            powers: std::cell::RefCell::new(subs.iter().map(|s| vec![s.clone()]).collect()),
        }
    }

    fn power(&self, j: usize, e: u32) -> Polynomial {
        let mut powers = self.powers.borrow_mut();
        let list = &mut powers[j];
        while list.len() < e as usize {
            let next = &list[list.len() - 1] * &self.subs[j];
            list.push(next);
        }
        list[e as usize - 1].clone()
    }

    fn apply(&self, p: &Polynomial) -> Result<Polynomial> {
        dim_check("substitution", p.arity, self.subs.len())?;
        let mut out = Polynomial::zero(self.arity);
        for (m, c) in &p.terms {
            let mut t = Polynomial::constant(self.arity, c.clone());
            for (j, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    t = &t * &self.power(j, e);
                }
            }
            for (mm, cc) in t.terms {
                out.add_term(mm, cc);
            }
        }
        Ok(out)
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    /// Panics on arity mismatch; use [`Polynomial::checked_add`] for a `Result`.
    fn add(self, rhs: &Polynomial) -> Polynomial {
        self.checked_add(rhs).expect("polynomial arity mismatch")
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self + &(-rhs)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial {
            arity: self.arity,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        self.checked_mul(rhs).expect("polynomial arity mismatch")
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            if m.degree() == 0 {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{}", m.display())?;
            } else {
                write!(f, "{abs}*{}", m.display())?;
            }
        }
        Ok(())
    }
}

/// Free-function form of checked addition.
pub fn poly_add(a: &Polynomial, b: &Polynomial) -> Result<Polynomial> {
    a.checked_add(b)
}

/// A polynomial map `ℝ^dom → ℝ^cod`, one polynomial per output coordinate.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct PolyMap {
    dom: usize,
    components: Vec<Polynomial>,
}

/// First point of disagreement between two maps of equal shape.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MapDiff {
    pub component: usize,
    pub monomial: Monomial,
    pub left: Rational,
    pub right: Rational,
}

impl fmt::Display for MapDiff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "component {}: coefficient of {} is {} vs {}",
            self.component,
            self.monomial.display(),
            self.left,
            self.right
        )
    }
}

impl PolyMap {
    pub fn new(dom: usize, components: Vec<Polynomial>) -> Result<Self> {
        for p in &components {
            dim_check("map component arity", dom, p.arity)?;
        }
        Ok(PolyMap { dom, components })
    }

    pub fn identity(n: usize) -> Self {
        PolyMap {
            dom: n,
            components: (0..n).map(|i| Polynomial::var(n, i)).collect(),
        }
    }

    pub fn zero(dom: usize, cod: usize) -> Self {
        PolyMap {
            dom,
            components: vec![Polynomial::zero(dom); cod],
        }
    }

    /// Coordinate selection `x ↦ (x_{idx[0]}, x_{idx[1]}, …)`.
    pub fn selection(dom: usize, idx: &[usize]) -> Result<Self> {
        let mut components = Vec::with_capacity(idx.len());
        for &i in idx {
            if i >= dom {
                return Err(Error::IndexOutOfRange { index: i, len: dom });
            }
            components.push(Polynomial::var(dom, i));
        }
        Ok(PolyMap { dom, components })
    }

    pub fn dom(&self) -> usize {
        self.dom
    }

    pub fn cod(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[Polynomial] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &Polynomial {
        &self.components[i]
    }

    pub fn into_components(self) -> Vec<Polynomial> {
        self.components
    }

    /// Diagrammatic composite: first `self`, then `next`.
    pub fn then(&self, next: &PolyMap) -> Result<PolyMap> {
        if self.cod() != next.dom {
            return Err(Error::DimensionMismatch {
                context: "composition".into(),
                expected: next.dom,
                found: self.cod(),
            });
        }
        let cache = PowerCache::new(&self.components, self.dom);
        let components = next
            .components
            .iter()
            .map(|p| cache.apply(p))
            .collect::<Result<Vec<_>>>()?;
        Ok(PolyMap {
            dom: self.dom,
            components,
        })
    }

    /// Concatenation of components of maps sharing a domain, i.e. the
    /// pairing into a Cartesian product.
    pub fn concat(dom: usize, maps: &[&PolyMap]) -> Result<PolyMap> {
        let mut components = Vec::new();
        for m in maps {
            dim_check("pairing domain", dom, m.dom)?;
            components.extend(m.components.iter().cloned());
        }
        Ok(PolyMap { dom, components })
    }

    /// The sub-map consisting of the chosen output coordinates.
    pub fn pick(&self, outputs: &[usize]) -> Result<PolyMap> {
        let mut components = Vec::with_capacity(outputs.len());
        for &i in outputs {
            let c = self.components.get(i).ok_or(Error::IndexOutOfRange {
                index: i,
                len: self.cod(),
            })?;
            components.push(c.clone());
        }
        Ok(PolyMap {
            dom: self.dom,
            components,
        })
    }

    /// Componentwise sum of two maps of equal shape.
    pub fn add_components(&self, other: &PolyMap) -> Result<PolyMap> {
        self.same_shape(other)?;
        Ok(PolyMap {
            dom: self.dom,
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    /// Jacobian matrix: entry `(i, j)` is `∂(component i)/∂x_j`.
    pub fn jacobian(&self) -> Vec<Vec<Polynomial>> {
        self.components
            .iter()
            .map(|p| (0..self.dom).map(|j| p.derivative(j)).collect())
            .collect()
    }

    pub fn eval(&self, point: &[Rational]) -> Result<Vec<Rational>> {
        dim_check("evaluation point", self.dom, point.len())?;
        self.components.iter().map(|p| p.eval(point)).collect()
    }

    pub fn max_degree(&self) -> u32 {
        self.components
            .iter()
            .map(Polynomial::total_degree)
            .max()
            .unwrap_or(0)
    }

    /// `Some(indices)` when every component is a bare coordinate.
    pub fn as_selection(&self) -> Option<Vec<usize>> {
        self.components
            .iter()
            .map(Polynomial::as_variable)
            .collect()
    }

    fn same_shape(&self, other: &PolyMap) -> Result<()> {
        if self.dom != other.dom || self.cod() != other.cod() {
            return Err(Error::Shape(format!(
                "{}→{} vs {}→{}",
                self.dom,
                self.cod(),
                other.dom,
                other.cod()
            )));
        }
        Ok(())
    }

    /// First canonical-form disagreement, if any.
    pub fn diff(&self, other: &PolyMap) -> Result<Option<MapDiff>> {
        self.same_shape(other)?;
        for (i, (a, b)) in self.components.iter().zip(&other.components).enumerate() {
            if a == b {
                continue;
            }
            // Highest monomial (in canonical order) where the coefficients differ.
            let mut keys: Vec<&Monomial> = a.terms.keys().chain(b.terms.keys()).collect();
            keys.sort();
            keys.dedup();
            for m in keys.into_iter().rev() {
                let (ca, cb) = (a.coefficient(m), b.coefficient(m));
                if ca != cb {
                    return Ok(Some(MapDiff {
                        component: i,
                        monomial: m.clone(),
                        left: ca,
                        right: cb,
                    }));
                }
            }
        }
        Ok(None)
    }

    /// Attempts a two-sided polynomial inverse by triangular elimination.
    ///
    /// Each step picks an unused output `z_i = a·y_j + r(y)` where `a` is a
    /// nonzero constant and `r` only involves already-solved inputs, and
    /// solves `y_j = (z_i − r)/a`. Covers coordinate permutations, scalings and
    /// shears. The candidate is returned only if both composites are exactly
    /// the identity, so `None` means "no inverse of this form", not "no
    /// inverse".
    pub fn triangular_inverse(&self) -> Option<PolyMap> {
        let n = self.dom;
        if self.cod() != n {
            return None;
        }
        let mut solved: Vec<Option<Polynomial>> = vec![None; n];
        let mut used = vec![false; n];
        let mut remaining = n;
        while remaining > 0 {
            let mut progressed = false;
            for (i, comp) in self.components.iter().enumerate() {
                if used[i] {
                    continue;
                }
                let Some((j, a)) = pivot(comp, &solved) else {
                    continue;
                };
                // r = comp − a·y_j, expressed over the already-solved inputs.
                let mut rest = comp.clone();
                rest.add_term(Monomial::var(n, j), -a.clone());
                let subs: Vec<Polynomial> = solved
                    .iter()
                    .map(|s| s.clone().unwrap_or_else(|| Polynomial::zero(n)))
                    .collect();
                let r = rest.substitute(&subs).ok()?;
                let zi = Polynomial::var(n, i);
                solved[j] = Some((&zi - &r).scale(&(Rational::one() / a)));
                used[i] = true;
                remaining -= 1;
                progressed = true;
            }
            if !progressed {
                return None;
            }
        }
        let inv = PolyMap {
            dom: n,
            components: solved.into_iter().map(Option::unwrap).collect(),
        };
        let id = PolyMap::identity(n);
        let ok = self.then(&inv).ok()? == id && inv.then(self).ok()? == id;
        ok.then_some(inv)
    }
}

/// An unsolved variable occurring in `p` only as `a·y_j` (constant `a ≠ 0`)
/// while every other variable of `p` is already solved.
fn pivot(p: &Polynomial, solved: &[Option<Polynomial>]) -> Option<(usize, Rational)> {
    let unsolved: Vec<usize> = (0..p.arity)
        .filter(|&v| solved[v].is_none() && p.depends_on(v))
        .collect();
    if unsolved.len() != 1 {
        return None;
    }
    let j = unsolved[0];
    let mut coeff = None;
    for (m, c) in &p.terms {
        if m.0[j] == 0 {
            continue;
        }
        if m.0[j] != 1 || m.degree() != 1 || coeff.is_some() {
            return None;
        }
        coeff = Some(c.clone());
    }
    coeff.map(|a| (j, a))
}

/// Diagrammatic composition: first `g`, then `f`.
pub fn compose(g: &PolyMap, f: &PolyMap) -> Result<PolyMap> {
    g.then(f)
}

pub fn jacobian(f: &PolyMap) -> Vec<Vec<Polynomial>> {
    f.jacobian()
}

/// Exact equality of maps in canonical form. Errors if the shapes differ.
pub fn map_equal(f: &PolyMap, g: &PolyMap) -> Result<bool> {
    Ok(f.diff(g)?.is_none())
}

pub fn eval(f: &PolyMap, point: &[Rational]) -> Result<Vec<Rational>> {
    f.eval(point)
}

impl fmt::Display for PolyMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.components.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}
