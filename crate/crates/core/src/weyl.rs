//! The parametric Weyl algebra `D[s]` and its action on twisted symbols.
//!
//! A [`WeylOperator`] is a finite sum of terms `c(s)·x^α·∂^β` stored in
//! normal order (every `x` to the left of every `∂`). The `s`-parameters
//! are central. A [`GermElement`] is `g / ∏ f_i^{m_i} · f^{s+a}` with
//! `g ∈ ℚ[x, s]`, living over a fixed [`PolyFamily`] `F = (f_1, …, f_r)`.
//!
//! Applying an operator to a germ uses only the product rule and
//! `∂_j f^{s+a} = Σ_i (s_i + a_i)·(∂_j f_i / f_i)·f^{s+a}`, so it is the
//! exact oracle every functional-equation claim is checked against.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Deref, Mul, Sub};
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::parse::parse_poly;
use crate::poly::{format_monomial, rat, Monomial, Poly, Rational};

/// Names of the parameter variables: `s` when there is one, else `s1..sr`.
pub fn s_names(r: usize) -> Vec<String> {
    if r == 1 {
        vec!["s".to_string()]
    } else {
        (1..=r).map(|i| format!("s{i}")).collect()
    }
}

/// Polynomial in the parameters `s_1, …, s_r` with rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ParamPoly(Poly);

impl ParamPoly {
    pub fn new(p: Poly) -> Self {
        ParamPoly(p)
    }

    pub fn zero(r: usize) -> Self {
        ParamPoly(Poly::zero(r))
    }

    pub fn one(r: usize) -> Self {
        ParamPoly(Poly::one(r))
    }

    pub fn constant(r: usize, c: Rational) -> Self {
        ParamPoly(Poly::constant(r, c))
    }

    pub fn var(r: usize, i: usize) -> Self {
        ParamPoly(Poly::var(r, i))
    }

    /// `Σ l_i s_i + b`.
    pub fn linear_form(l: &[i64], b: Rational) -> Self {
        ParamPoly(Poly::linear(&l.iter().map(|&x| rat(x)).collect::<Vec<_>>(), b))
    }

    pub fn nparams(&self) -> usize {
        self.0.nvars()
    }

    pub fn as_poly(&self) -> &Poly {
        &self.0
    }

    pub fn into_poly(self) -> Poly {
        self.0
    }

    /// Replace each `s_i` by `s_i + k_i`.
    pub fn shift(&self, k: &[i64]) -> ParamPoly {
        shift_s(self, k)
    }

    pub fn to_text(&self) -> String {
        self.0.to_text(&s_names(self.nparams()))
    }

    pub fn parse(text: &str, r: usize) -> Result<Self> {
        parse_poly(text, &s_names(r)).map(ParamPoly)
    }
}

impl Deref for ParamPoly {
    type Target = Poly;
    fn deref(&self) -> &Poly {
        &self.0
    }
}

impl fmt::Display for ParamPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl Add for &ParamPoly {
    type Output = ParamPoly;
    fn add(self, rhs: &ParamPoly) -> ParamPoly {
        ParamPoly(&self.0 + &rhs.0)
    }
}

impl Sub for &ParamPoly {
    type Output = ParamPoly;
    fn sub(self, rhs: &ParamPoly) -> ParamPoly {
        ParamPoly(&self.0 - &rhs.0)
    }
}

impl Mul for &ParamPoly {
    type Output = ParamPoly;
    fn mul(self, rhs: &ParamPoly) -> ParamPoly {
        ParamPoly(&self.0 * &rhs.0)
    }
}

/// `p(s + k)`.
pub fn shift_s(p: &ParamPoly, k: &[i64]) -> ParamPoly {
    let r = p.nparams();
    assert_eq!(k.len(), r, "shift vector must have one entry per parameter");
    if k.iter().all(|&x| x == 0) {
        return p.clone();
    }
    let images: Vec<Poly> = (0..r)
        .map(|i| &Poly::var(r, i) + &Poly::constant(r, rat(k[i])))
        .collect();
    ParamPoly(p.0.compose(&images))
}

/// A single generator of the Weyl algebra.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Generator {
    X(usize),
    D(usize),
}

/// A coefficient times a word in the generators, in any order.
#[derive(Clone, Debug)]
pub struct RawTerm {
    pub coeff: ParamPoly,
    pub word: Vec<Generator>,
}

// Field order gives the term order: ∂-exponent first, then x-exponent, both
// graded lexicographic.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct TermKey {
    beta: Monomial,
    alpha: Monomial,
}

/// Normal-ordered element of `D[s]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WeylOperator {
    n: usize,
    r: usize,
    terms: BTreeMap<TermKey, ParamPoly>,
}

impl WeylOperator {
    pub fn zero(n: usize, r: usize) -> Self {
        WeylOperator {
            n,
            r,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(n: usize, r: usize) -> Self {
        Self::term(ParamPoly::one(r), vec![0; n], vec![0; n])
    }

    /// `c · x^alpha · ∂^beta`.
    pub fn term(c: ParamPoly, alpha: Vec<u32>, beta: Vec<u32>) -> Self {
        assert_eq!(alpha.len(), beta.len());
        let mut op = Self::zero(alpha.len(), c.nparams());
        op.add_term(c, Monomial::new(alpha), Monomial::new(beta));
        op
    }

    pub fn x(n: usize, r: usize, i: usize) -> Self {
        Self::term(ParamPoly::one(r), Monomial::var(n, i).exponents().to_vec(), vec![0; n])
    }

    pub fn d(n: usize, r: usize, i: usize) -> Self {
        Self::term(ParamPoly::one(r), vec![0; n], Monomial::var(n, i).exponents().to_vec())
    }

    /// `∂^beta` with unit coefficient.
    pub fn d_monomial(r: usize, beta: Vec<u32>) -> Self {
        let n = beta.len();
        Self::term(ParamPoly::one(r), vec![0; n], beta)
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn nparams(&self) -> usize {
        self.r
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total order in `∂`; 0 for the zero operator.
    pub fn order(&self) -> u32 {
        self.terms.keys().map(|k| k.beta.degree()).max().unwrap_or(0)
    }

    /// Terms `(alpha, beta, coefficient)` in increasing term order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Monomial, &ParamPoly)> {
        self.terms.iter().map(|(k, c)| (&k.alpha, &k.beta, c))
    }

    fn add_term(&mut self, c: ParamPoly, alpha: Monomial, beta: Monomial) {
        if c.is_zero() {
            return;
        }
        let key = TermKey { beta, alpha };
        match self.terms.get_mut(&key) {
            Some(existing) => {
                *existing = &*existing + &c;
                if existing.is_zero() {
                    self.terms.remove(&key);
                }
            }
            None => {
                self.terms.insert(key, c);
            }
        }
    }

    pub fn add(&self, other: &WeylOperator) -> WeylOperator {
        self.check_compatible(other);
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(c.clone(), k.alpha.clone(), k.beta.clone());
        }
        out
    }

    /// Multiply every coefficient by the central element `c`.
    pub fn scale(&self, c: &ParamPoly) -> WeylOperator {
        let mut out = WeylOperator::zero(self.n, self.r);
        for (k, v) in &self.terms {
            out.add_term(v * c, k.alpha.clone(), k.beta.clone());
        }
        out
    }

    fn check_compatible(&self, other: &WeylOperator) {
        assert_eq!(
            (self.n, self.r),
            (other.n, other.r),
            "operators over different rings"
        );
    }

    /// Right multiplication by one generator, keeping normal order.
    fn mul_generator(&self, g: Generator) -> WeylOperator {
        let mut out = WeylOperator::zero(self.n, self.r);
        for (k, c) in &self.terms {
            match g {
                Generator::D(i) => {
                    let mut beta = k.beta.exponents().to_vec();
                    beta[i] += 1;
                    out.add_term(c.clone(), k.alpha.clone(), Monomial::new(beta));
                }
                Generator::X(i) => {
                    // x^α ∂^β x_i = x^{α+e_i} ∂^β + β_i x^α ∂^{β-e_i}
                    let mut alpha = k.alpha.exponents().to_vec();
                    alpha[i] += 1;
                    out.add_term(c.clone(), Monomial::new(alpha), k.beta.clone());
                    let bi = k.beta.exponents()[i];
                    if bi > 0 {
                        let mut beta = k.beta.exponents().to_vec();
                        beta[i] -= 1;
                        let coeff = c.as_poly().scale(&rat(bi as i64));
                        out.add_term(ParamPoly(coeff), k.alpha.clone(), Monomial::new(beta));
                    }
                }
            }
        }
        out
    }

    /// Operator product `self · other`.
    pub fn compose(&self, other: &WeylOperator) -> WeylOperator {
        self.check_compatible(other);
        let mut out = WeylOperator::zero(self.n, self.r);
        for (k, c) in &other.terms {
            let mut acc = self.clone();
            for g in word_of(&k.alpha, &k.beta) {
                acc = acc.mul_generator(g);
            }
            out = out.add(&acc.scale(c));
        }
        out
    }

    /// Shift every coefficient: `c(s) ↦ c(s + k)`.
    pub fn shift_s(&self, k: &[i64]) -> WeylOperator {
        let mut out = WeylOperator::zero(self.n, self.r);
        for (key, c) in &self.terms {
            out.add_term(shift_s(c, k), key.alpha.clone(), key.beta.clone());
        }
        out
    }

    /// Canonical text, e.g. `(s + 1)*x*dx + 1/4*dy^2`. `∂_j` prints as
    /// `d` followed by the name of `x_j`.
    pub fn to_text(&self, x_names: &[String]) -> String {
        assert_eq!(x_names.len(), self.n);
        if self.is_zero() {
            return "0".to_string();
        }
        let d_names: Vec<String> = x_names.iter().map(|x| format!("d{x}")).collect();
        let mut out = String::new();
        for (idx, (k, c)) in self.terms.iter().rev().enumerate() {
            let a = format_monomial(&k.alpha, x_names);
            let b = format_monomial(&k.beta, &d_names);
            let mono = [a, b].into_iter().filter(|p| !p.is_empty()).collect::<Vec<_>>().join("*");
            let (negative, body) = if c.len() == 1 {
                let (sm, q) = c.terms().next().expect("one term");
                let neg = *q < Rational::zero();
                let abs = if neg { -q.clone() } else { q.clone() };
                let s_part = format_monomial(sm, &s_names(self.r));
                let mut parts = Vec::new();
                if !abs.is_one() || (s_part.is_empty() && mono.is_empty()) {
                    parts.push(crate::poly::format_rational(&abs));
                }
                parts.extend([s_part, mono].into_iter().filter(|p| !p.is_empty()));
                (neg, parts.join("*"))
            } else if mono.is_empty() {
                (false, format!("({})", c.to_text()))
            } else {
                (false, format!("({})*{}", c.to_text(), mono))
            };
            match (idx, negative) {
                (0, true) => out.push('-'),
                (0, false) => {}
                (_, true) => out.push_str(" - "),
                (_, false) => out.push_str(" + "),
            }
            out.push_str(&body);
        }
        out
    }

    /// Parse operator text. Each monomial is read in normal order: all `x`
    /// factors act after (to the left of) all `d` factors, whatever order
    /// they are written in.
    pub fn parse(text: &str, x_names: &[String], r: usize) -> Result<Self> {
        let n = x_names.len();
        let mut names: Vec<String> = x_names.to_vec();
        names.extend(x_names.iter().map(|x| format!("d{x}")));
        names.extend(s_names(r));
        let p = parse_poly(text, &names)?;
        let mut op = WeylOperator::zero(n, r);
        for (m, c) in p.terms() {
            let e = m.exponents();
            let mut s_exp = vec![0; r];
            s_exp.copy_from_slice(&e[2 * n..]);
            let coeff = ParamPoly(Poly::monomial(Monomial::new(s_exp), c.clone()));
            op.add_term(coeff, Monomial::new(e[..n].to_vec()), Monomial::new(e[n..2 * n].to_vec()));
        }
        Ok(op)
    }
}

fn word_of(alpha: &Monomial, beta: &Monomial) -> Vec<Generator> {
    let mut w = Vec::new();
    for (i, &e) in alpha.exponents().iter().enumerate() {
        w.extend(std::iter::repeat_n(Generator::X(i), e as usize));
    }
    for (i, &e) in beta.exponents().iter().enumerate() {
        w.extend(std::iter::repeat_n(Generator::D(i), e as usize));
    }
    w
}

/// Rewrite arbitrary words into normal order using `∂_j x_j = x_j ∂_j + 1`.
pub fn normal_order(n: usize, r: usize, raw: &[RawTerm]) -> WeylOperator {
    let mut out = WeylOperator::zero(n, r);
    for t in raw {
        let mut acc = WeylOperator::term(t.coeff.clone(), vec![0; n], vec![0; n]);
        for &g in &t.word {
            acc = acc.mul_generator(g);
        }
        out = out.add(&acc);
    }
    out
}

/// The collection `F = (f_1, …, f_r)` with the names of its variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyFamily {
    x_names: Vec<String>,
    f: Vec<Poly>,
    // f_i and ∂_j f_i embedded in ℚ[x, s] (x first, then s).
    f_xs: Vec<Poly>,
    df_xs: Vec<Vec<Poly>>,
}

impl PolyFamily {
    pub fn new(x_names: Vec<String>, f: Vec<Poly>) -> Result<Arc<Self>> {
        let n = x_names.len();
        if f.is_empty() {
            return Err(Error::Precondition("the collection F is empty".into()));
        }
        for (i, fi) in f.iter().enumerate() {
            if fi.nvars() != n {
                return Err(Error::Precondition(format!("f_{} has the wrong variable count", i + 1)));
            }
            if fi.is_zero() {
                return Err(Error::Precondition(format!("f_{} is zero", i + 1)));
            }
        }
        let r = f.len();
        let map: Vec<usize> = (0..n).collect();
        let f_xs: Vec<Poly> = f.iter().map(|p| p.embed(n + r, &map)).collect();
        let df_xs = (0..n)
            .map(|j| f.iter().map(|p| p.derivative(j).embed(n + r, &map)).collect())
            .collect();
        Ok(Arc::new(PolyFamily {
            x_names,
            f,
            f_xs,
            df_xs,
        }))
    }

    /// Parse each `f_i` from text over the given variable names.
    pub fn parse(x_names: &[String], f: &[impl AsRef<str>]) -> Result<Arc<Self>> {
        let polys = f
            .iter()
            .map(|t| parse_poly(t.as_ref(), x_names))
            .collect::<Result<Vec<_>>>()?;
        Self::new(x_names.to_vec(), polys)
    }

    pub fn n(&self) -> usize {
        self.x_names.len()
    }

    pub fn r(&self) -> usize {
        self.f.len()
    }

    pub fn x_names(&self) -> &[String] {
        &self.x_names
    }

    pub fn polys(&self) -> &[Poly] {
        &self.f
    }

    /// Names of the ring `ℚ[x, s]` germ numerators live in.
    pub fn xs_names(&self) -> Vec<String> {
        let mut v = self.x_names.clone();
        v.extend(s_names(self.r()));
        v
    }

    /// Embed a parameter polynomial into `ℚ[x, s]`.
    pub fn embed_param(&self, p: &ParamPoly) -> Poly {
        let n = self.n();
        let map: Vec<usize> = (0..p.nparams()).map(|i| n + i).collect();
        p.as_poly().embed(n + self.r(), &map)
    }

    /// Embed an `x`-polynomial into `ℚ[x, s]`.
    pub fn embed_x(&self, p: &Poly) -> Poly {
        let map: Vec<usize> = (0..self.n()).collect();
        p.embed(self.n() + self.r(), &map)
    }

    pub(crate) fn f_xs(&self, i: usize) -> &Poly {
        &self.f_xs[i]
    }

    /// `∏ f_i^{e_i}` in `ℚ[x, s]`.
    pub fn power_product(&self, e: &[u32]) -> Poly {
        let mut out = Poly::one(self.n() + self.r());
        for (i, &k) in e.iter().enumerate() {
            if k > 0 {
                out = &out * &self.f_xs[i].pow(k);
            }
        }
        out
    }
}

/// `num / ∏ f_i^{den_i} · f^{s + twist}`.
#[derive(Clone, Debug)]
pub struct GermElement {
    family: Arc<PolyFamily>,
    num: Poly,
    den: Vec<u32>,
    twist: Vec<i64>,
}

impl GermElement {
    pub fn new(family: Arc<PolyFamily>, num: Poly, den: Vec<u32>, twist: Vec<i64>) -> Self {
        assert_eq!(num.nvars(), family.n() + family.r());
        assert_eq!(den.len(), family.r());
        assert_eq!(twist.len(), family.r());
        GermElement {
            family,
            num,
            den,
            twist,
        }
    }

    /// The symbol `f^{s+a}` itself.
    pub fn twisted_symbol(family: &Arc<PolyFamily>, a: &[i64]) -> Self {
        let nv = family.n() + family.r();
        Self::new(family.clone(), Poly::one(nv), vec![0; family.r()], a.to_vec())
    }

    /// `b(s) · f^s`.
    pub fn param_times_symbol(family: &Arc<PolyFamily>, b: &ParamPoly) -> Self {
        Self::new(
            family.clone(),
            family.embed_param(b),
            vec![0; family.r()],
            vec![0; family.r()],
        )
    }

    pub fn family(&self) -> &Arc<PolyFamily> {
        &self.family
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &[u32] {
        &self.den
    }

    pub fn twist(&self) -> &[i64] {
        &self.twist
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Cancel factors `f_i` shared by numerator and denominator.
    pub fn reduce(&self) -> GermElement {
        let mut out = self.clone();
        if out.num.is_zero() {
            out.den.iter_mut().for_each(|m| *m = 0);
            return out;
        }
        for i in 0..out.den.len() {
            while out.den[i] > 0 {
                match out.num.exact_div(self.family.f_xs(i)) {
                    Some(q) => {
                        out.num = q;
                        out.den[i] -= 1;
                    }
                    None => break,
                }
            }
        }
        out
    }

    /// `∂_j` of the germ, unreduced.
    pub fn derivative(&self, j: usize) -> GermElement {
        let fam = &self.family;
        let n = fam.n();
        let r = fam.r();
        let nv = n + r;
        let involved: Vec<usize> = (0..r).filter(|&i| !fam.df_xs[j][i].is_zero()).collect();
        let others = |skip: Option<usize>| {
            involved
                .iter()
                .filter(|&&i| Some(i) != skip)
                .fold(Poly::one(nv), |acc, &i| &acc * fam.f_xs(i))
        };
        let mut num = &self.num.derivative(j) * &others(None);
        for &i in &involved {
            // d/dx_j of f_i^{s_i + a_i - m_i}
            let exponent = &Poly::var(nv, n + i) + &Poly::constant(nv, rat(self.twist[i] - self.den[i] as i64));
            let term = &(&self.num * &exponent) * &(&fam.df_xs[j][i] * &others(Some(i)));
            num = &num + &term;
        }
        let mut den = self.den.clone();
        for &i in &involved {
            den[i] += 1;
        }
        GermElement::new(fam.clone(), num, den, self.twist.clone())
    }

    /// Multiply the numerator by a polynomial in `ℚ[x, s]`.
    pub fn mul_poly(&self, p: &Poly) -> GermElement {
        GermElement::new(self.family.clone(), &self.num * p, self.den.clone(), self.twist.clone())
    }

    /// Rewrite over the twist `target`, moving the difference into the
    /// numerator or denominator.
    pub fn retwist(&self, target: &[i64]) -> GermElement {
        let r = self.family.r();
        let mut num = self.num.clone();
        let mut den = vec![0u32; r];
        for i in 0..r {
            let e = self.twist[i] - target[i] - self.den[i] as i64;
            if e >= 0 {
                if e > 0 {
                    num = &num * &self.family.f_xs(i).pow(e as u32);
                }
            } else {
                den[i] = (-e) as u32;
            }
        }
        GermElement::new(self.family.clone(), num, den, target.to_vec())
    }

    pub fn add(&self, other: &GermElement) -> GermElement {
        assert!(
            Arc::ptr_eq(&self.family, &other.family) || self.family == other.family,
            "germs over different collections"
        );
        let other = if other.twist == self.twist {
            other.clone()
        } else {
            other.retwist(&self.twist)
        };
        let r = self.family.r();
        let den: Vec<u32> = (0..r).map(|i| self.den[i].max(other.den[i])).collect();
        let lift = |g: &GermElement| {
            let extra: Vec<u32> = (0..r).map(|i| den[i] - g.den[i]).collect();
            &g.num * &self.family.power_product(&extra)
        };
        GermElement::new(self.family.clone(), &lift(self) + &lift(&other), den, self.twist.clone())
    }

    pub fn sub(&self, other: &GermElement) -> GermElement {
        let neg = GermElement::new(other.family.clone(), -&other.num, other.den.clone(), other.twist.clone());
        self.add(&neg)
    }

    /// Equality as elements of `ℚ[x, s, f^{-1}]·f^s`: cross-multiply to the
    /// smallest common exponent and compare numerators.
    pub fn same_element(&self, other: &GermElement) -> bool {
        let r = self.family.r();
        let e1: Vec<i64> = (0..r).map(|i| self.twist[i] - self.den[i] as i64).collect();
        let e2: Vec<i64> = (0..r).map(|i| other.twist[i] - other.den[i] as i64).collect();
        let base: Vec<i64> = (0..r).map(|i| e1[i].min(e2[i])).collect();
        let lift = |num: &Poly, e: &[i64]| {
            let extra: Vec<u32> = (0..r).map(|i| (e[i] - base[i]) as u32).collect();
            num * &self.family.power_product(&extra)
        };
        lift(&self.num, &e1) == lift(&other.num, &e2)
    }

    pub fn to_text(&self) -> String {
        let names = self.family.xs_names();
        let mut out = format!("({})", self.num.to_text(&names));
        for (i, &m) in self.den.iter().enumerate() {
            if m > 0 {
                out.push_str(&format!(" / f{}^{}", i + 1, m));
            }
        }
        let tw: Vec<String> = self.twist.iter().map(|a| a.to_string()).collect();
        out.push_str(&format!(" * f^(s + ({}))", tw.join(", ")));
        out
    }
}

impl PartialEq for GermElement {
    fn eq(&self, other: &Self) -> bool {
        self.same_element(other)
    }
}

/// Apply `op` to `target`, reducing the result.
pub fn apply(op: &WeylOperator, target: &GermElement) -> GermElement {
    let fam = target.family();
    assert_eq!(op.nvars(), fam.n(), "operator and germ use different x-variables");
    assert_eq!(op.nparams(), fam.r(), "operator and germ use different s-parameters");
    let mut cache: BTreeMap<Vec<u32>, GermElement> = BTreeMap::new();
    let mut acc = GermElement::new(
        fam.clone(),
        Poly::zero(fam.n() + fam.r()),
        vec![0; fam.r()],
        target.twist().to_vec(),
    );
    for (alpha, beta, c) in op.terms() {
        let d = derivative_cached(&mut cache, target, beta.exponents());
        let mono = fam.embed_x(&Poly::monomial(alpha.clone(), Rational::one()));
        let factor = &mono * &fam.embed_param(c);
        acc = acc.add(&d.mul_poly(&factor));
    }
    acc.reduce()
}

/// `∂^beta target`, memoized over the lattice of smaller `beta`.
pub(crate) fn derivative_cached(
    cache: &mut BTreeMap<Vec<u32>, GermElement>,
    target: &GermElement,
    beta: &[u32],
) -> GermElement {
    if let Some(g) = cache.get(beta) {
        return g.clone();
    }
    let result = match beta.iter().position(|&b| b > 0) {
        None => target.clone(),
        Some(j) => {
            let mut lower = beta.to_vec();
            lower[j] -= 1;
            derivative_cached(cache, target, &lower).derivative(j).reduce()
        }
    };
    cache.insert(beta.to_vec(), result.clone());
    result
}
