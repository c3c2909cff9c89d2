//! Bounded-degree search for Bernstein-Sato functional equations.
//!
//! Looking for `b(s)·f^s = P·f^{s+a}` with `P` of bounded order, `x`-degree
//! and `s`-degree makes the coefficients of `P` and `b` the unknowns of a
//! homogeneous linear system over ℚ: compute `∂^β f^{s+a}` once per `β` as
//! a reduced germ, clear the common denominator `∏ f_i^{D_i}`, and equate
//! coefficients of every monomial in `x` and `s`.
//!
//! The projection of the solution space onto the `b`-coordinates is the
//! part of the ideal reachable within the bounds. Every certificate the
//! solver returns is re-checked by [`verify`], which expands the functional
//! equation symbolically and shares no code with the linear system beyond
//! the germ derivative.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{rref, Echelon, SparseRow};
use crate::poly::{Monomial, Poly, Rational};
use crate::weyl::{apply, derivative_cached, GermElement, ParamPoly, PolyFamily, WeylOperator};

/// Default cap on the number of unknowns, overridable by [`MAX_UNKNOWNS_ENV`].
pub const DEFAULT_MAX_UNKNOWNS: usize = 20_000;

/// Environment variable capping solver memory via the number of unknowns.
pub const MAX_UNKNOWNS_ENV: &str = "BSIDEAL_MAX_UNKNOWNS";

/// Truncation of the search space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveBounds {
    pub max_operator_order: u32,
    pub max_x_degree: u32,
    pub max_s_degree: u32,
    pub max_b_degree: u32,
}

impl SolveBounds {
    pub fn new(max_operator_order: u32, max_x_degree: u32, max_s_degree: u32, max_b_degree: u32) -> Self {
        SolveBounds {
            max_operator_order,
            max_x_degree,
            max_s_degree,
            max_b_degree,
        }
    }

    /// Operators with constant coefficients of order at most `order`, and `b`
    /// of degree at most `order`.
    pub fn constant_coefficients(order: u32) -> Self {
        Self::new(order, 0, 0, order)
    }
}

/// A functional equation `b·f^s = P·f^{s+a}`.
#[derive(Clone, Debug)]
pub struct BsCertificate {
    pub family: Arc<PolyFamily>,
    pub a: Vec<u32>,
    pub b: ParamPoly,
    pub op: WeylOperator,
}

/// Text form of a certificate, as emitted in reports.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateJson {
    pub b: String,
    #[serde(rename = "P")]
    pub p: String,
    #[serde(rename = "F")]
    pub f: Vec<String>,
    pub a: Vec<u32>,
}

impl BsCertificate {
    pub fn to_json(&self) -> CertificateJson {
        let names = self.family.x_names();
        CertificateJson {
            b: self.b.to_text(),
            p: self.op.to_text(names),
            f: self.family.polys().iter().map(|f| f.to_text(names)).collect(),
            a: self.a.clone(),
        }
    }

    /// Rebuild from text over the given variable names.
    pub fn from_json(json: &CertificateJson, x_names: &[String]) -> Result<Self> {
        let family = PolyFamily::parse(x_names, &json.f)?;
        let r = family.r();
        if json.a.len() != r {
            return Err(Error::Parse(format!("a has length {} but F has {} entries", json.a.len(), r)));
        }
        Ok(BsCertificate {
            b: ParamPoly::parse(&json.b, r)?,
            op: WeylOperator::parse(&json.p, x_names, r)?,
            a: json.a.clone(),
            family,
        })
    }
}

/// `true` iff `P·f^{s+a} = b·f^s` holds identically.
pub fn verify(cert: &BsCertificate) -> bool {
    let a: Vec<i64> = cert.a.iter().map(|&x| x as i64).collect();
    let lhs = apply(&cert.op, &GermElement::twisted_symbol(&cert.family, &a));
    let rhs = GermElement::param_times_symbol(&cert.family, &cert.b);
    lhs.same_element(&rhs)
}

/// Which `∂`-monomials the operator may use.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Strategy {
    /// Every `∂^β` within the order bound.
    Full,
    /// Only `∂`s in the listed variables (0-based).
    Support(Vec<usize>),
}

/// The fixed strategy list: `Full`, then every nonempty proper subset of the
/// variables, by size and then lexicographically.
pub fn default_strategies(n: usize) -> Vec<Strategy> {
    let mut subsets: Vec<Vec<usize>> = (1u32..(1 << n) - 1)
        .map(|mask| (0..n).filter(|i| mask & (1 << i) != 0).collect())
        .collect();
    subsets.sort_by(|a: &Vec<usize>, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    std::iter::once(Strategy::Full)
        .chain(subsets.into_iter().map(Strategy::Support))
        .collect()
}

/// All exponent vectors in `n` variables of total degree `<= d`, in
/// increasing graded lexicographic order.
pub(crate) fn monomials_up_to(n: usize, d: u32) -> Vec<Monomial> {
    fn rec(n: usize, left: u32, prefix: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if prefix.len() == n {
            out.push(Monomial::new(prefix.clone()));
            return;
        }
        for e in 0..=left {
            prefix.push(e);
            rec(n, left - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, d, &mut Vec::new(), &mut out);
    out.sort();
    out
}

fn max_unknowns() -> usize {
    std::env::var(MAX_UNKNOWNS_ENV)
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_MAX_UNKNOWNS)
}

#[derive(Clone, Debug)]
struct OperatorColumn {
    beta: Monomial,
    alpha: Monomial,
    gamma: Monomial,
}

/// The solution space of one bounded ansatz.
#[derive(Clone, Debug)]
pub struct BSpace {
    family: Arc<PolyFamily>,
    a: Vec<u32>,
    op_cols: Vec<OperatorColumn>,
    // b-monomials in decreasing order: column op_cols.len() + k is b_monos[k].
    b_monos: Vec<Monomial>,
    system: Echelon,
    // RREF basis of the projection onto the b-coordinates.
    b_basis: Vec<(usize, Vec<Rational>)>,
}

impl BSpace {
    fn nop(&self) -> usize {
        self.op_cols.len()
    }

    pub fn dimension(&self) -> usize {
        self.b_basis.len()
    }

    fn b_from_vector(&self, v: &[Rational]) -> ParamPoly {
        let r = self.family.r();
        let mut p = Poly::zero(r);
        for (m, c) in self.b_monos.iter().zip(v) {
            p.add_term(m.clone(), c.clone());
        }
        ParamPoly::new(p)
    }

    /// Reduced basis of the reachable `b`s, ordered from the smallest leading
    /// monomial upward. Each element is monic.
    pub fn basis(&self) -> Vec<ParamPoly> {
        self.b_basis.iter().rev().map(|(_, v)| self.b_from_vector(v)).collect()
    }

    /// `true` iff `b` is reachable within this ansatz.
    pub fn contains(&self, b: &ParamPoly) -> bool {
        let index: BTreeMap<&Monomial, usize> = self.b_monos.iter().enumerate().map(|(k, m)| (m, k)).collect();
        let mut entries = Vec::new();
        for (m, c) in b.terms() {
            match index.get(m) {
                Some(&k) => entries.push((self.nop() + k, c.clone())),
                None => return false,
            }
        }
        let col = |c: usize| {
            entries
                .iter()
                .find(|(k, _)| *k == c)
                .map(|(_, v)| v.clone())
                .unwrap_or_else(Rational::zero)
        };
        self.system
            .pivot_rows()
            .filter(|(&c, _)| c >= self.nop())
            .all(|(_, row)| row.dot(&col).is_zero())
    }

    /// The operator paired with a reachable `b`: free operator unknowns are
    /// set to zero and the rest solved by back-substitution.
    pub fn certificate_for(&self, b: &ParamPoly) -> Option<BsCertificate> {
        if !self.contains(b) {
            return None;
        }
        let index: BTreeMap<&Monomial, usize> = self.b_monos.iter().enumerate().map(|(k, m)| (m, k)).collect();
        let free: BTreeMap<usize, Rational> = b
            .terms()
            .map(|(m, c)| (self.nop() + index[m], c.clone()))
            .collect();
        let x = self.system.back_substitute(&free);
        let n = self.family.n();
        let r = self.family.r();
        let mut op = WeylOperator::zero(n, r);
        for (col, value) in self.op_cols.iter().zip(&x) {
            if value.is_zero() {
                continue;
            }
            let coeff = ParamPoly::new(Poly::monomial(col.gamma.clone(), value.clone()));
            op = op.add(&WeylOperator::term(
                coeff,
                col.alpha.exponents().to_vec(),
                col.beta.exponents().to_vec(),
            ));
        }
        Some(BsCertificate {
            family: self.family.clone(),
            a: self.a.clone(),
            b: b.clone(),
            op,
        })
    }
}

fn check_twist(family: &PolyFamily, a: &[u32]) -> Result<()> {
    if a.len() != family.r() {
        return Err(Error::Precondition(format!(
            "a has length {} but F has {} entries",
            a.len(),
            family.r()
        )));
    }
    let invertible = a
        .iter()
        .zip(family.polys())
        .all(|(&ai, f)| ai == 0 || f.is_constant());
    if invertible {
        return Err(Error::InvertibleTwist);
    }
    Ok(())
}

/// Build and eliminate the linear system for one ansatz.
pub fn solve_space(
    family: &Arc<PolyFamily>,
    a: &[u32],
    bounds: &SolveBounds,
    strategy: &Strategy,
) -> Result<BSpace> {
    check_twist(family, a)?;
    let n = family.n();
    let r = family.r();
    let allowed: BTreeSet<usize> = match strategy {
        Strategy::Full => (0..n).collect(),
        Strategy::Support(v) => v.iter().copied().collect(),
    };
    let betas: Vec<Monomial> = monomials_up_to(n, bounds.max_operator_order)
        .into_iter()
        .filter(|b| b.exponents().iter().enumerate().all(|(i, &e)| e == 0 || allowed.contains(&i)))
        .collect();
    let alphas = monomials_up_to(n, bounds.max_x_degree);
    let gammas = monomials_up_to(r, bounds.max_s_degree);
    let mut b_monos = monomials_up_to(r, bounds.max_b_degree);
    b_monos.reverse();

    let mut op_cols: Vec<OperatorColumn> = Vec::new();
    for beta in &betas {
        for alpha in &alphas {
            for gamma in &gammas {
                op_cols.push(OperatorColumn {
                    beta: beta.clone(),
                    alpha: alpha.clone(),
                    gamma: gamma.clone(),
                });
            }
        }
    }
    // Simple terms first so they become pivots and the particular solution
    // prefers them.
    op_cols.sort_by(|p, q| {
        let cp = p.alpha.degree() + p.gamma.degree();
        let cq = q.alpha.degree() + q.gamma.degree();
        cp.cmp(&cq)
            .then_with(|| p.beta.cmp(&q.beta))
            .then_with(|| p.alpha.cmp(&q.alpha))
            .then_with(|| p.gamma.cmp(&q.gamma))
    });
    let unknowns = op_cols.len() + b_monos.len();
    let cap = max_unknowns();
    if unknowns > cap {
        return Err(Error::SolverCapExceeded { unknowns, cap });
    }

    // ∂^β f^{s+a} as reduced germs.
    let twist: Vec<i64> = a.iter().map(|&x| x as i64).collect();
    let symbol = GermElement::twisted_symbol(family, &twist);
    let mut cache = BTreeMap::new();
    let derivs: BTreeMap<Monomial, GermElement> = betas
        .iter()
        .map(|b| (b.clone(), derivative_cached(&mut cache, &symbol, b.exponents())))
        .collect();
    let mut clear = vec![0u32; r];
    for g in derivs.values() {
        for i in 0..r {
            let need = g.denominator()[i] as i64 - a[i] as i64;
            clear[i] = clear[i].max(need.max(0) as u32);
        }
    }
    // h_β = g_β · ∏ f_i^{a_i - m_i + D_i}
    let cleared: BTreeMap<Monomial, Poly> = derivs
        .iter()
        .map(|(beta, g)| {
            let e: Vec<u32> = (0..r)
                .map(|i| (a[i] as i64 - g.denominator()[i] as i64 + clear[i] as i64) as u32)
                .collect();
            (beta.clone(), g.numerator() * &family.power_product(&e))
        })
        .collect();
    let rhs = family.power_product(&clear);

    let nvars = n + r;
    let lift = |alpha: &Monomial, gamma: &Monomial| {
        let mut e = alpha.exponents().to_vec();
        e.extend_from_slice(gamma.exponents());
        Monomial::new(e)
    };
    let mut equations: BTreeMap<Monomial, Vec<(usize, Rational)>> = BTreeMap::new();
    for (k, col) in op_cols.iter().enumerate() {
        let shift = lift(&col.alpha, &col.gamma);
        for (m, c) in cleared[&col.beta].terms() {
            equations.entry(m.mul(&shift)).or_default().push((k, c.clone()));
        }
    }
    let zero_x = Monomial::one(n);
    for (k, gamma) in b_monos.iter().enumerate() {
        let shift = lift(&zero_x, gamma);
        for (m, c) in rhs.terms() {
            equations
                .entry(m.mul(&shift))
                .or_default()
                .push((op_cols.len() + k, -c.clone()));
        }
    }
    debug_assert!(equations.keys().all(|m| m.exponents().len() == nvars));

    let mut system = Echelon::new(unknowns);
    for (_, entries) in equations {
        system.insert(SparseRow::from_rationals(entries));
    }

    // Kernel of the b-only constraint rows, one vector per free b-column.
    let nop = op_cols.len();
    let nb = b_monos.len();
    let mut constraint = Echelon::new(nb);
    for (&c, row) in system.pivot_rows() {
        if c >= nop {
            constraint.insert(SparseRow::from_rationals(
                row.entries()
                    .iter()
                    .map(|(k, v)| (k - nop, Rational::from_integer(v.clone()))),
            ));
        }
    }
    let kernel: Vec<Vec<Rational>> = (0..nb)
        .filter(|&c| !constraint.is_pivot(c))
        .map(|c| constraint.back_substitute(&BTreeMap::from([(c, Rational::one())])))
        .collect();
    let b_basis = rref(&kernel);

    Ok(BSpace {
        family: family.clone(),
        a: a.to_vec(),
        op_cols,
        b_monos,
        system,
        b_basis,
    })
}

/// A certified `b` of minimal total degree within the bounds; among those,
/// the monic one with the smallest leading monomial, reduced against the
/// rest of the reachable space.
pub fn find_bs_pair(family: &Arc<PolyFamily>, a: &[u32], bounds: &SolveBounds) -> Result<BsCertificate> {
    let space = solve_space(family, a, bounds, &Strategy::Full)?;
    let Some(b) = space.basis().into_iter().next() else {
        return Err(Error::NoSolutionWithinBounds(format!("{bounds:?}")));
    };
    let cert = space.certificate_for(&b).expect("basis elements are reachable");
    assert!(verify(&cert), "solver produced an invalid certificate");
    Ok(cert)
}

/// Certified elements of the ideal collected over several operator
/// supports. The ideal they generate is contained in the Bernstein-Sato
/// ideal; it need not be all of it.
pub fn sample_ideal(
    family: &Arc<PolyFamily>,
    a: &[u32],
    bounds: &SolveBounds,
    strategies: &[Strategy],
) -> Result<Vec<BsCertificate>> {
    check_twist(family, a)?;
    let mut seen: BTreeSet<String> = BTreeSet::new();
    let mut out = Vec::new();
    for strategy in strategies {
        let space = solve_space(family, a, bounds, strategy)?;
        let basis = space.basis();
        let Some(min_degree) = basis.first().and_then(|b| b.degree()) else {
            continue;
        };
        for b in basis.into_iter().take_while(|b| b.degree() == Some(min_degree)) {
            if !seen.insert(b.to_text()) {
                continue;
            }
            let cert = space.certificate_for(&b).expect("basis elements are reachable");
            assert!(verify(&cert), "solver produced an invalid certificate");
            out.push(cert);
        }
    }
    if out.is_empty() {
        return Err(Error::NoSolutionWithinBounds(format!("{bounds:?}")));
    }
    Ok(out)
}

/// `b(s, s, …, s)` as a one-parameter polynomial.
pub fn restrict_diagonal(b: &ParamPoly) -> ParamPoly {
    let images = vec![Poly::var(1, 0); b.nparams()];
    ParamPoly::new(b.as_poly().compose(&images))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fam(x: &[&str], f: &[&str]) -> Arc<PolyFamily> {
        let names: Vec<String> = x.iter().map(|s| s.to_string()).collect();
        PolyFamily::parse(&names, f).unwrap()
    }

    fn pp(text: &str, r: usize) -> ParamPoly {
        ParamPoly::parse(text, r).unwrap()
    }

    fn cert(x: &[&str], f: &[&str], a: &[u32], b: &str, p: &str) -> BsCertificate {
        let family = fam(x, f);
        let r = family.r();
        BsCertificate {
            b: pp(b, r),
            op: WeylOperator::parse(p, family.x_names(), r).unwrap(),
            a: a.to_vec(),
            family,
        }
    }

    #[test]
    fn verify_examples() {
        assert!(verify(&cert(&["x"], &["x"], &[1], "s + 1", "dx")));
        assert!(verify(&cert(&["x", "y"], &["x^2 + y^2"], &[1], "(s + 1)^2", "1/4*dx^2 + 1/4*dy^2")));
        assert!(!verify(&cert(&["x"], &["x"], &[1], "s + 2", "dx")));
    }

    #[test]
    fn find_examples() {
        let c = find_bs_pair(&fam(&["x"], &["x"]), &[1], &SolveBounds::constant_coefficients(1)).unwrap();
        assert_eq!(c.b, pp("s + 1", 1));
        assert_eq!(c.op.to_text(c.family.x_names()), "dx");

        let c = find_bs_pair(&fam(&["x", "y"], &["x", "y"]), &[1, 1], &SolveBounds::constant_coefficients(2)).unwrap();
        assert_eq!(c.b, pp("(s1 + 1)*(s2 + 1)", 2));
        assert_eq!(c.op.to_text(c.family.x_names()), "dx*dy");

        let c = find_bs_pair(&fam(&["x", "y"], &["x", "x*y"]), &[1, 0], &SolveBounds::constant_coefficients(1)).unwrap();
        assert_eq!(c.b, pp("s1 + s2 + 1", 2));
        assert_eq!(c.op.to_text(c.family.x_names()), "dx");
    }

    #[test]
    fn too_small_bounds_are_signalled() {
        let err = find_bs_pair(&fam(&["x"], &["x"]), &[2], &SolveBounds::constant_coefficients(1)).unwrap_err();
        assert!(matches!(err, Error::NoSolutionWithinBounds(_)));
    }

    #[test]
    fn invertible_twist_rejected() {
        let f = fam(&["x"], &["x", "3"]);
        let bounds = SolveBounds::constant_coefficients(1);
        assert_eq!(find_bs_pair(&f, &[0, 1], &bounds).unwrap_err(), Error::InvertibleTwist);
        assert_eq!(find_bs_pair(&f, &[0, 0], &bounds).unwrap_err(), Error::InvertibleTwist);
    }

    #[test]
    fn sample_examples() {
        let bounds = SolveBounds::constant_coefficients(2);
        let got = sample_ideal(&fam(&["x"], &["x"]), &[1], &bounds, &default_strategies(1)).unwrap();
        assert_eq!(got.iter().map(|c| c.b.clone()).collect::<Vec<_>>(), vec![pp("s + 1", 1)]);

        let f = fam(&["x", "y"], &["x", "x*y"]);
        let got = sample_ideal(&f, &[0, 1], &bounds, &default_strategies(2)).unwrap();
        assert!(got.iter().any(|c| c.b == pp("(s2 + 1)*(s1 + s2 + 1)", 2)));

        let f = fam(&["x", "y"], &["x", "y"]);
        let got = sample_ideal(&f, &[1, 0], &bounds, &default_strategies(2)).unwrap();
        assert!(got.iter().any(|c| c.b == pp("s1 + 1", 2)));
    }

    #[test]
    fn diagonal_restriction() {
        assert_eq!(restrict_diagonal(&pp("(s1 + 1)*(s2 + 1)", 2)), pp("(s + 1)^2", 1));
        assert_eq!(restrict_diagonal(&pp("s1 + s2 + 1", 2)), pp("2*s + 1", 1));
        assert_eq!(restrict_diagonal(&ParamPoly::zero(2)), ParamPoly::zero(1));
    }

    #[test]
    fn strategies_are_fixed() {
        assert_eq!(
            default_strategies(2),
            vec![Strategy::Full, Strategy::Support(vec![0]), Strategy::Support(vec![1])]
        );
        assert_eq!(default_strategies(3).len(), 7);
    }

    #[test]
    fn certificate_json_round_trip() {
        let c = cert(&["x", "y"], &["x^2 + y^2"], &[1], "(s + 1)^2", "1/4*dx^2 + 1/4*dy^2");
        let json = c.to_json();
        assert_eq!(json.b, "s^2 + 2*s + 1");
        let back = BsCertificate::from_json(&json, c.family.x_names()).unwrap();
        assert_eq!(back.op, c.op);
        assert!(verify(&back));
    }
}
