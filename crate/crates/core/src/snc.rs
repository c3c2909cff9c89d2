//! Combinatorics of normal-crossing resolution data.
//!
//! A [`ResolutionGraph`] lists the divisor components `E_k` of a log
//! resolution, each with the vector `L_k` of multiplicities of `f_1, …, f_r`
//! along it and the Euler characteristic of its open stratum. From this
//! alone we get the slope sets, the explicit Bernstein-Sato element of a
//! monomial chart, monodromy zeta functions, and a combinatorial model of
//! the monodromy support loci.
//!
//! The support-locus model declares component `k` to lie over `f_i = 0`
//! exactly when `l_{i,k} > 0` and contributes `{λ^{L_k} = 1}`. It ignores
//! the Euler characteristics, so it can over-count (an exceptional divisor
//! with `χ = 0` still contributes).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use num_integer::Integer;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{rat, Poly};
use crate::solver::BsCertificate;
use crate::torus::{character_kernel, normalize_union, TorusCoset};
use crate::weyl::{ParamPoly, PolyFamily, WeylOperator};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    pub multiplicities: Vec<u32>,
    pub chi: i64,
    /// `{ i : l_{i,k} > 0 }`, 0-based.
    pub maps_into: BTreeSet<usize>,
}

impl Component {
    pub fn new(multiplicities: Vec<u32>, chi: i64) -> Result<Component> {
        if multiplicities.iter().all(|&l| l == 0) {
            return Err(Error::Precondition("component with L = 0".into()));
        }
        let maps_into = multiplicities
            .iter()
            .enumerate()
            .filter(|(_, &l)| l > 0)
            .map(|(i, _)| i)
            .collect();
        Ok(Component {
            multiplicities,
            chi,
            maps_into,
        })
    }

    fn dot(&self, a: &[u32]) -> u32 {
        self.multiplicities.iter().zip(a).map(|(l, x)| l * x).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResolutionGraph {
    r: usize,
    components: Vec<Component>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentJson {
    #[serde(rename = "L")]
    pub multiplicities: Vec<u32>,
    pub chi: i64,
    /// 1-based; optional on input, checked against `L` when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub maps_into: Option<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphJson {
    pub r: usize,
    pub components: Vec<ComponentJson>,
}

impl ResolutionGraph {
    pub fn new(r: usize, components: Vec<Component>) -> Result<ResolutionGraph> {
        if r == 0 {
            return Err(Error::Precondition("r must be positive".into()));
        }
        for c in &components {
            if c.multiplicities.len() != r {
                return Err(Error::Precondition(format!(
                    "component multiplicities {:?} do not have length {r}",
                    c.multiplicities
                )));
            }
        }
        Ok(ResolutionGraph { r, components })
    }

    /// From `(L_k, χ_k)` pairs.
    pub fn from_pairs(r: usize, pairs: &[(&[u32], i64)]) -> Result<ResolutionGraph> {
        let comps = pairs
            .iter()
            .map(|(l, chi)| Component::new(l.to_vec(), *chi))
            .collect::<Result<Vec<_>>>()?;
        ResolutionGraph::new(r, comps)
    }

    /// The coordinate-hyperplane graph of a monomial chart: exponent matrix
    /// rows are the `f_j`, columns the coordinates. Zero columns are skipped.
    /// `χ` of `{y_k = 0}` minus the other components is `χ(ℂ^{n-1}) = 1` when
    /// it is the only component, else `0` (a `ℂ*` factor appears).
    pub fn from_monomial_exponents(exponents: &[Vec<u32>]) -> Result<ResolutionGraph> {
        let r = exponents.len();
        let n = exponents.first().map(Vec::len).unwrap_or(0);
        if exponents.iter().any(|row| row.len() != n) {
            return Err(Error::Precondition("ragged exponent matrix".into()));
        }
        let columns: Vec<Vec<u32>> = (0..n)
            .map(|k| exponents.iter().map(|row| row[k]).collect::<Vec<u32>>())
            .filter(|c| c.iter().any(|&l| l > 0))
            .collect();
        let chi = if columns.len() == 1 { 1 } else { 0 };
        let comps = columns
            .into_iter()
            .map(|c| Component::new(c, chi))
            .collect::<Result<Vec<_>>>()?;
        ResolutionGraph::new(r, comps)
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn from_json(json: &GraphJson) -> Result<ResolutionGraph> {
        let mut comps = Vec::new();
        for (k, c) in json.components.iter().enumerate() {
            if c.multiplicities.len() != json.r {
                return Err(Error::Parse(format!("component {} has L of length {}", k + 1, c.multiplicities.len())));
            }
            let comp = Component::new(c.multiplicities.clone(), c.chi).map_err(|e| Error::Parse(e.to_string()))?;
            if let Some(given) = &c.maps_into {
                let given: BTreeSet<usize> = given.iter().map(|i| i.wrapping_sub(1)).collect();
                if given != comp.maps_into {
                    return Err(Error::Parse(format!("component {} has maps_into inconsistent with L", k + 1)));
                }
            }
            comps.push(comp);
        }
        ResolutionGraph::new(json.r, comps).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> GraphJson {
        GraphJson {
            r: self.r,
            components: self
                .components
                .iter()
                .map(|c| ComponentJson {
                    multiplicities: c.multiplicities.clone(),
                    chi: c.chi,
                    maps_into: Some(c.maps_into.iter().map(|i| i + 1).collect()),
                })
                .collect(),
        }
    }

    /// The one-variable graph of `g = ∏ f_i^{m_i}`: component `k` gets
    /// multiplicity `L_k·m`.
    pub fn reweight(&self, m: &[u32]) -> Result<ResolutionGraph> {
        check_weights(m, self.r)?;
        let comps = self
            .components
            .iter()
            .map(|c| Component::new(vec![c.dot(m)], c.chi))
            .collect::<Result<Vec<_>>>()?;
        ResolutionGraph::new(1, comps)
    }
}

pub fn check_weights(m: &[u32], r: usize) -> Result<()> {
    if m.len() != r || m.contains(&0) {
        return Err(Error::Precondition(format!("weights must be {r} positive integers, got {m:?}")));
    }
    Ok(())
}

/// `K = ⋃_{j : a_j ≠ 0} { k : l_{j,k} > 0 }` (0-based component indices).
pub fn support_k(graph: &ResolutionGraph, a: &[u32]) -> Result<BTreeSet<usize>> {
    if a.len() != graph.r {
        return Err(Error::Precondition(format!("a has length {} but r = {}", a.len(), graph.r)));
    }
    let k: BTreeSet<usize> = graph
        .components
        .iter()
        .enumerate()
        .filter(|(_, c)| c.maps_into.iter().any(|&j| a[j] != 0))
        .map(|(k, _)| k)
        .collect();
    if k.is_empty() {
        return Err(Error::EmptyK);
    }
    Ok(k)
}

/// A set of primitive nonzero slope vectors, sorted.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlopeSet(BTreeSet<Vec<u32>>);

impl SlopeSet {
    pub fn new(slopes: impl IntoIterator<Item = Vec<u32>>) -> SlopeSet {
        SlopeSet(slopes.into_iter().map(|l| primitive(&l)).collect())
    }

    pub fn iter(&self) -> impl Iterator<Item = &Vec<u32>> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_subset(&self, other: &SlopeSet) -> bool {
        self.0.is_subset(&other.0)
    }
}

/// Divide out the gcd of a nonzero vector.
pub fn primitive(l: &[u32]) -> Vec<u32> {
    let g = l.iter().fold(0u32, |acc, &x| acc.gcd(&x));
    assert!(g > 0, "zero vector has no primitive form");
    l.iter().map(|x| x / g).collect()
}

/// `{ primitive(L_k) : k ∈ K }`.
pub fn slope_set(graph: &ResolutionGraph, a: &[u32]) -> Result<SlopeSet> {
    let k = support_k(graph, a)?;
    Ok(SlopeSet::new(k.into_iter().map(|k| graph.components[k].multiplicities.clone())))
}

/// `∏_{k ∈ K} ∏_{j=1}^{L_k·a} (L_k·s + j)`.
pub fn snc_b_element(graph: &ResolutionGraph, a: &[u32]) -> Result<ParamPoly> {
    let k = support_k(graph, a)?;
    let r = graph.r;
    let mut b = Poly::one(r);
    for k in k {
        let c = &graph.components[k];
        let slope: Vec<i64> = c.multiplicities.iter().map(|&l| l as i64).collect();
        for j in 1..=c.dot(a) {
            b = &b * ParamPoly::linear_form(&slope, rat(j as i64)).as_poly();
        }
    }
    Ok(ParamPoly::new(b))
}

/// Exponent matrix (`f_j` by coordinate) of a collection of monic
/// monomials, or `None` if some `f_j` is not one.
pub fn monomial_exponents(family: &PolyFamily) -> Option<Vec<Vec<u32>>> {
    family
        .polys()
        .iter()
        .map(|f| {
            if f.len() != 1 {
                return None;
            }
            let (m, c) = f.leading()?;
            (*c == rat(1)).then(|| m.exponents().to_vec())
        })
        .collect()
}

/// The certificate `(snc_b_element, ∏_k ∂_{y_k}^{L_k·a})` for a monic
/// monomial collection.
pub fn snc_certificate_for(family: &Arc<PolyFamily>, a: &[u32]) -> Result<BsCertificate> {
    let exps = monomial_exponents(family)
        .ok_or_else(|| Error::Precondition("F is not a collection of monic monomials".into()))?;
    if a.len() != family.r() {
        return Err(Error::Precondition("a has the wrong length".into()));
    }
    let n = family.n();
    let graph = ResolutionGraph::from_monomial_exponents(&exps)?;
    let b = snc_b_element(&graph, a)?;
    let beta: Vec<u32> = (0..n)
        .map(|k| exps.iter().zip(a).map(|(row, &aj)| row[k] * aj).sum())
        .collect();
    Ok(BsCertificate {
        family: family.clone(),
        a: a.to_vec(),
        b,
        op: WeylOperator::d_monomial(family.r(), beta),
    })
}

/// [`snc_certificate_for`] on `f_j = ∏_k y_k^{l_{j,k}}` over coordinates
/// `y1, …, yn`.
pub fn snc_certificate(exponents: &[Vec<u32>], a: &[u32]) -> Result<BsCertificate> {
    let n = exponents.first().map(Vec::len).unwrap_or(0);
    if n == 0 || exponents.iter().any(|row| row.len() != n) {
        return Err(Error::Precondition("exponent matrix must be rectangular and nonempty".into()));
    }
    let names: Vec<String> = (1..=n).map(|k| format!("y{k}")).collect();
    let polys = exponents
        .iter()
        .map(|row| Poly::monomial(crate::poly::Monomial::new(row.clone()), rat(1)))
        .collect();
    let family = PolyFamily::new(names, polys)?;
    snc_certificate_for(&family, a)
}

/// `H_a(F) ⊆ H_a(G)` with `H_a(G)` read off the graph of `G`.
pub fn pullback_slope_check(slopes_f: &SlopeSet, graph_g: &ResolutionGraph, a: &[u32]) -> bool {
    match slope_set(graph_g, a) {
        Ok(g) => slopes_f.is_subset(&g),
        Err(_) => slopes_f.is_empty(),
    }
}

/// `∏_v (1 − t^v)^{e_v}` with `e_v ≠ 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MonZeta {
    r: usize,
    factors: BTreeMap<Vec<u32>, i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZetaFactorJson {
    pub v: Vec<u32>,
    pub e: i64,
}

impl MonZeta {
    pub fn one(r: usize) -> MonZeta {
        MonZeta {
            r,
            factors: BTreeMap::new(),
        }
    }

    pub fn from_factors(r: usize, factors: impl IntoIterator<Item = (Vec<u32>, i64)>) -> MonZeta {
        let mut z = MonZeta::one(r);
        for (v, e) in factors {
            z.add_factor(v, e);
        }
        z
    }

    fn add_factor(&mut self, v: Vec<u32>, e: i64) {
        assert_eq!(v.len(), self.r);
        assert!(v.iter().any(|&x| x > 0), "t^0 factor");
        let slot = self.factors.entry(v.clone()).or_insert(0);
        *slot += e;
        if slot.is_zero() {
            self.factors.remove(&v);
        }
    }

    pub fn mul(&self, other: &MonZeta) -> MonZeta {
        assert_eq!(self.r, other.r);
        let mut out = self.clone();
        for (v, e) in &other.factors {
            out.add_factor(v.clone(), *e);
        }
        out
    }

    pub fn factors(&self) -> &BTreeMap<Vec<u32>, i64> {
        &self.factors
    }

    pub fn to_json(&self) -> Vec<ZetaFactorJson> {
        self.factors
            .iter()
            .map(|(v, e)| ZetaFactorJson { v: v.clone(), e: *e })
            .collect()
    }
}

impl fmt::Display for MonZeta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return f.write_str("1");
        }
        let names: Vec<String> = if self.r == 1 {
            vec!["t".into()]
        } else {
            (1..=self.r).map(|i| format!("t{i}")).collect()
        };
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|(v, e)| {
                let mono: Vec<String> = v
                    .iter()
                    .enumerate()
                    .filter(|(_, &x)| x > 0)
                    .map(|(i, &x)| if x == 1 { names[i].clone() } else { format!("{}^{}", names[i], x) })
                    .collect();
                format!("(1 - {})^{}", mono.join("*"), e)
            })
            .collect();
        f.write_str(&parts.join(" * "))
    }
}

/// `∏_k (1 − t^{L_k})^{χ_k}`.
pub fn mon_zeta(graph: &ResolutionGraph) -> MonZeta {
    MonZeta::from_factors(
        graph.r,
        graph.components.iter().map(|c| (c.multiplicities.clone(), c.chi)),
    )
}

/// Substitute `t_i := t^{m_i}`.
pub fn sabbah_specialize(z: &MonZeta, m: &[u32]) -> Result<MonZeta> {
    check_weights(m, z.r)?;
    Ok(MonZeta::from_factors(
        1,
        z.factors.iter().map(|(v, e)| {
            let d: u32 = v.iter().zip(m).map(|(a, b)| a * b).sum();
            (vec![d], *e)
        }),
    ))
}

/// Combinatorial support loci: the union over `i` with `a_i ≠ 0` of the
/// cosets `{λ^{L_k} = 1}` for components lying over `f_i = 0`. A
/// non-primitive `L_k` contributes all `gcd(L_k)` of its coset pieces.
pub fn support_loci(graph: &ResolutionGraph, a: &[u32]) -> Result<Vec<TorusCoset>> {
    if a.len() != graph.r {
        return Err(Error::Precondition(format!("a has length {} but r = {}", a.len(), graph.r)));
    }
    let mut out = Vec::new();
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for c in graph.components.iter().filter(|c| c.maps_into.contains(&i)) {
            let l: Vec<i64> = c.multiplicities.iter().map(|&x| x as i64).collect();
            out.extend(character_kernel(&l));
        }
    }
    if out.is_empty() {
        return Err(Error::EmptyK);
    }
    Ok(normalize_union(&out))
}
