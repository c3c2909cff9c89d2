//! Hyperplane components of `b`-polynomials and the structural predicates
//! on them.
//!
//! Linear factors `L·s + b` are found without general multivariate
//! factorization. For each primitive slope `L` in a box whose linear form
//! divides the top-degree part, the polynomial is restricted to a few lines
//! parallel to a coordinate axis; the rational roots on one line propose
//! intercepts and the other lines discard those that cannot work. Each
//! survivor is confirmed by exact division, so whatever is returned
//! multiplies back to the input exactly.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{format_rational, parse_rational, rat, Poly, Rational};
use crate::weyl::ParamPoly;

/// Default box for slope enumeration.
pub const DEFAULT_SLOPE_BOUND: u32 = 8;

/// The hyperplane `L·s + b = 0` with `L` primitive and its first nonzero
/// entry positive.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Hyperplane {
    slope: Vec<i64>,
    intercept: Rational,
}

impl Hyperplane {
    /// Normalize `Σ c_i s_i + c_0 = 0`. `None` if every `c_i` is zero.
    pub fn from_linear(coeffs: &[Rational], constant: &Rational) -> Option<Hyperplane> {
        if coeffs.iter().all(Zero::is_zero) {
            return None;
        }
        let lcm = coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = coeffs.iter().map(|c| c.numer() * (&lcm / c.denom())).collect();
        let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
        let sign = if ints.iter().find(|x| !x.is_zero()).expect("nonzero").is_negative() {
            -BigInt::one()
        } else {
            BigInt::one()
        };
        let unit = &g * &sign;
        let slope = ints
            .iter()
            .map(|x| (x / &unit).to_i64().expect("slope entries fit in i64"))
            .collect();
        let intercept = constant * Rational::new(lcm, unit);
        Some(Hyperplane { slope, intercept })
    }

    /// From an integer slope (not necessarily primitive) and intercept.
    pub fn new(slope: &[i64], intercept: Rational) -> Option<Hyperplane> {
        let coeffs: Vec<Rational> = slope.iter().map(|&x| rat(x)).collect();
        Hyperplane::from_linear(&coeffs, &intercept)
    }

    pub fn slope(&self) -> &[i64] {
        &self.slope
    }

    pub fn intercept(&self) -> &Rational {
        &self.intercept
    }

    pub fn nparams(&self) -> usize {
        self.slope.len()
    }

    /// `L·s + b` as a polynomial.
    pub fn to_param_poly(&self) -> ParamPoly {
        ParamPoly::linear_form(&self.slope, self.intercept.clone())
    }

    /// The zero set of `ℓ(s + k)`, i.e. this hyperplane translated by `−k`.
    pub fn shifted(&self, k: &[i64]) -> Hyperplane {
        let dot: i64 = self.slope.iter().zip(k).map(|(l, x)| l * x).sum();
        Hyperplane {
            slope: self.slope.clone(),
            intercept: &self.intercept + rat(dot),
        }
    }

    pub fn canonical(&self) -> Hyperplane {
        Hyperplane::new(&self.slope, self.intercept.clone()).expect("nonzero slope")
    }

    pub fn to_json(&self) -> HyperplaneJson {
        HyperplaneJson {
            slope: self.slope.clone(),
            intercept: format_rational(&self.intercept),
        }
    }

    pub fn from_json(json: &HyperplaneJson) -> Result<Hyperplane> {
        let b = parse_rational(&json.intercept)
            .ok_or_else(|| Error::Parse(format!("bad intercept {:?}", json.intercept)))?;
        Hyperplane::new(&json.slope, b).ok_or_else(|| Error::Parse("zero slope".into()))
    }
}

impl std::fmt::Display for Hyperplane {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} = 0", self.to_param_poly())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HyperplaneJson {
    #[serde(rename = "L")]
    pub slope: Vec<i64>,
    #[serde(rename = "b")]
    pub intercept: String,
}

/// Linear factors with multiplicity and the unextracted rest.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub factors: Vec<(Hyperplane, u32)>,
    pub remainder: ParamPoly,
}

impl Decomposition {
    /// `remainder · ∏ (L·s + b)^mult`.
    pub fn expand(&self) -> ParamPoly {
        self.factors.iter().fold(self.remainder.clone(), |acc, (h, m)| {
            ParamPoly::new(acc.as_poly() * &h.to_param_poly().as_poly().pow(*m))
        })
    }

    pub fn hyperplanes(&self) -> Vec<Hyperplane> {
        self.factors.iter().map(|(h, _)| h.clone()).collect()
    }
}

/// Primitive vectors in `{0..=bound}^r`, lexicographically.
pub fn primitive_slopes(r: usize, bound: u32) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let mut cur = vec![0i64; r];
    loop {
        let g = cur.iter().fold(0i64, |acc, &x| acc.gcd(&x));
        if g == 1 {
            out.push(cur.clone());
        }
        let mut i = r;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] < bound as i64 {
                cur[i] += 1;
                break;
            }
            cur[i] = 0;
        }
    }
}

/// Split off every linear factor `L·s + b` with `L` primitive in
/// `{0..=slope_bound}^r`. Factors come out sorted canonically.
pub fn extract_hyperplanes(p: &ParamPoly, slope_bound: u32) -> Result<Decomposition> {
    if p.is_zero() {
        return Err(Error::Precondition("cannot decompose the zero polynomial".into()));
    }
    if slope_bound < 1 {
        return Err(Error::Precondition("slope_bound must be at least 1".into()));
    }
    let r = p.nparams();
    let mut rem = p.as_poly().clone();
    let mut top = rem.top_form();
    let mut found: BTreeMap<Hyperplane, u32> = BTreeMap::new();
    for slope in primitive_slopes(r, slope_bound) {
        if rem.degree().unwrap_or(0) == 0 {
            break;
        }
        // Leading forms multiply, so L·s must divide the top form, which
        // then vanishes on the hyperplane L·s = 0.
        if !vanishes_on_kernel(&top, &slope) {
            continue;
        }
        let form = Poly::linear(&slope.iter().map(|&x| rat(x)).collect::<Vec<_>>(), Rational::zero());
        if top.exact_div(&form).is_none() {
            continue;
        }
        for (b, max_mult) in candidate_intercepts(&rem, &slope) {
            let h = Hyperplane::new(&slope, b).expect("nonzero slope");
            let factor = h.to_param_poly().into_poly();
            let mut mult = 0;
            while mult < max_mult {
                let Some(q) = rem.exact_div(&factor) else { break };
                rem = q;
                mult += 1;
            }
            if mult > 0 {
                *found.entry(h).or_insert(0) += mult;
            }
        }
        top = rem.top_form();
    }
    Ok(Decomposition {
        factors: found.into_iter().collect(),
        remainder: ParamPoly::new(rem),
    })
}

const MODULUS: u64 = (1 << 61) - 1;

fn mod_mul(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % MODULUS as u128) as u64
}

fn mod_pow(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mod_mul(r, a);
        }
        a = mod_mul(a, a);
        e >>= 1;
    }
    r
}

fn mod_int(x: &BigInt) -> u64 {
    x.mod_floor(&BigInt::from(MODULUS)).to_u64().expect("reduced")
}

/// Whether `p` might vanish on `{L·s = 0}`: evaluated modulo a large prime
/// at the projections `(L·L)v − (L·v)L` of two fixed vectors `v`. A `false`
/// is exact; a `true` still needs confirming.
fn vanishes_on_kernel(p: &Poly, slope: &[i64]) -> bool {
    const PROBES: [[i64; 6]; 2] = [[3, -5, 7, 2, -11, 4], [-4, 9, 1, -6, 5, 13]];
    let ll: i64 = slope.iter().map(|l| l * l).sum();
    PROBES.iter().all(|v| {
        let v: Vec<i64> = (0..slope.len()).map(|j| v[j % v.len()]).collect();
        let lv: i64 = slope.iter().zip(&v).map(|(l, x)| l * x).sum();
        let point: Vec<u64> = v
            .iter()
            .zip(slope)
            .map(|(x, l)| mod_int(&BigInt::from(ll * x - lv * l)))
            .collect();
        let mut acc = 0u64;
        for (m, c) in p.terms() {
            let den = mod_int(c.denom());
            if den == 0 {
                return true;
            }
            let mut t = mod_mul(mod_int(c.numer()), mod_pow(den, MODULUS - 2));
            for (x, &e) in point.iter().zip(m.exponents()) {
                if e > 0 {
                    t = mod_mul(t, mod_pow(*x, e as u64));
                }
            }
            acc = (acc + t) % MODULUS;
        }
        acc == 0
    })
}

/// Offsets for the coordinates other than `k` defining the test lines.
const LINE_OFFSETS: [[i64; 4]; 5] = [[0, 0, 0, 0], [1, 2, 3, 5], [-2, 3, -1, 4], [3, -1, 2, -3], [5, 7, -4, 2]];

/// `p` restricted to the line where coordinate `k` is free and the others
/// are fixed by `offset` (cycled), as coefficients in `t`, low degree first.
fn restrict_to_line(p: &Poly, k: usize, offset: &[i64]) -> Vec<Rational> {
    let r = p.nvars();
    let deg = p.degree().unwrap_or(0) as usize;
    let powers: Vec<Vec<BigInt>> = (0..r)
        .map(|j| {
            let c = BigInt::from(offset[j % offset.len()]);
            std::iter::successors(Some(BigInt::one()), |x| Some(x * &c)).take(deg + 1).collect()
        })
        .collect();
    let mut out: Vec<Rational> = Vec::new();
    for (m, c) in p.terms() {
        let e = m.exponents();
        let mut f = BigInt::one();
        for (j, &ej) in e.iter().enumerate() {
            if j != k && ej > 0 {
                f *= &powers[j][ej as usize];
                if f.is_zero() {
                    break;
                }
            }
        }
        if f.is_zero() {
            continue;
        }
        let d = e[k] as usize;
        if out.len() <= d {
            out.resize(d + 1, Rational::zero());
        }
        out[d] += c * Rational::from_integer(f);
    }
    trim(out)
}

/// Intercepts `b` for which `L·s + b` might divide `p`. With `k` the first
/// nonzero slope entry, `p` is restricted to lines along coordinate `k`; a
/// factor `L·s + b` forces a root at `t = −(b + Σ_{j≠k} L_j c_j)/L_k` on the
/// line with offsets `c`. The first line proposes, the others filter. Each
/// intercept comes with a bound on its multiplicity: the least order of
/// vanishing over the lines.
fn candidate_intercepts(p: &Poly, slope: &[i64]) -> Vec<(Rational, u32)> {
    let k = slope.iter().position(|&x| x != 0).expect("nonzero slope");
    let lk = rat(slope[k]);
    let shift = |c: &[i64]| -> Rational {
        slope
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != k)
            .map(|(j, &l)| rat(l * c[j % c.len()]))
            .fold(Rational::zero(), |a, b| a + b)
    };
    let mut lines = LINE_OFFSETS
        .iter()
        .map(|c| (shift(c), restrict_to_line(p, k, c)))
        .filter(|(_, u)| !u.is_empty());
    let Some((s0, u0)) = lines.next() else {
        return candidate_intercepts_by_substitution(p, slope);
    };
    let mut candidates: Vec<(Rational, u32)> = uni_rational_roots(&u0)
        .into_iter()
        .map(|t| {
            let m = root_order(&u0, &t);
            (-(&lk * t + &s0), m)
        })
        .collect();
    for (s, u) in lines {
        if candidates.is_empty() {
            break;
        }
        candidates = candidates
            .into_iter()
            .filter_map(|(b, m)| {
                let m = m.min(root_order(&u, &(-(&b + &s) / &lk)));
                (m > 0).then_some((b, m))
            })
            .collect();
    }
    candidates
}

/// Fallback when `p` vanishes on every test line: substitute `z = L·s` for
/// coordinate `k` and take the gcd of the coefficients of the other
/// parameters.
fn candidate_intercepts_by_substitution(p: &Poly, slope: &[i64]) -> Vec<(Rational, u32)> {
    let r = slope.len();
    let k = slope.iter().position(|&x| x != 0).expect("nonzero slope");
    let lk = rat(slope[k]);
    let images: Vec<Poly> = (0..r)
        .map(|j| {
            if j == k {
                let mut c: Vec<Rational> = slope.iter().map(|&x| -rat(x) / &lk).collect();
                c[k] = lk.recip();
                Poly::linear(&c, Rational::zero())
            } else {
                Poly::var(r, j)
            }
        })
        .collect();
    let q = p.compose(&images);
    let mut groups: BTreeMap<Vec<u32>, Vec<Rational>> = BTreeMap::new();
    for (m, c) in q.terms() {
        let mut rest = m.exponents().to_vec();
        let dz = std::mem::replace(&mut rest[k], 0) as usize;
        let coeffs = groups.entry(rest).or_default();
        if coeffs.len() <= dz {
            coeffs.resize(dz + 1, Rational::zero());
        }
        coeffs[dz] = c.clone();
    }
    let g = groups
        .into_values()
        .fold(Vec::new(), |acc, c| uni_gcd(&acc, &trim(c)));
    uni_rational_roots(&g).into_iter().map(|z| (-z, u32::MAX)).collect()
}

/// Order of vanishing of `u` at `t`.
fn root_order(u: &[Rational], t: &Rational) -> u32 {
    let mut u = u.to_vec();
    let mut order = 0;
    while u.len() > 1 && uni_eval(&u, t).is_zero() {
        // Synthetic division by (x − t).
        let mut q = vec![Rational::zero(); u.len() - 1];
        let mut carry = Rational::zero();
        for i in (1..u.len()).rev() {
            carry = &u[i] + &carry * t;
            q[i - 1] = carry.clone();
        }
        u = q;
        order += 1;
    }
    order
}

fn trim(mut v: Vec<Rational>) -> Vec<Rational> {
    while v.last().map(Zero::is_zero).unwrap_or(false) {
        v.pop();
    }
    v
}

fn uni_rem(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut a = a.to_vec();
    let lb = b.last().expect("nonzero divisor").clone();
    while a.len() >= b.len() && !a.is_empty() {
        let shift = a.len() - b.len();
        let f = a.last().expect("nonempty").clone() / &lb;
        for (i, c) in b.iter().enumerate() {
            a[i + shift] -= &f * c;
        }
        a.pop();
        a = trim(a);
    }
    a
}

/// Monic gcd of univariate polynomials (coefficient vectors, low degree first).
fn uni_gcd(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let (mut a, mut b) = (trim(a.to_vec()), trim(b.to_vec()));
    while !b.is_empty() {
        let r = uni_rem(&a, &b);
        a = b;
        b = r;
    }
    if let Some(l) = a.last().cloned() {
        for c in a.iter_mut() {
            *c /= &l;
        }
    }
    a
}

fn uni_eval(p: &[Rational], x: &Rational) -> Rational {
    p.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
}

/// Positive divisors of `n != 0` by trial division. A cofactor left after
/// dividing out everything below 10^6 is treated as prime.
fn divisors(n: &BigInt) -> Vec<BigInt> {
    let mut n = n.abs();
    let mut factors: Vec<(BigInt, u32)> = Vec::new();
    let mut d = BigInt::from(2);
    let limit = BigInt::from(1_000_000);
    while &d * &d <= n && d < limit {
        let mut e = 0;
        while (&n % &d).is_zero() {
            n /= &d;
            e += 1;
        }
        if e > 0 {
            factors.push((d.clone(), e));
        }
        d += 1;
    }
    if !n.is_one() {
        factors.push((n, 1));
    }
    let mut out = vec![BigInt::one()];
    for (p, e) in factors {
        let mut next = Vec::new();
        for base in &out {
            let mut pk = BigInt::one();
            for _ in 0..=e {
                next.push(base * &pk);
                pk *= &p;
            }
        }
        out = next;
    }
    out.sort();
    out
}



/// Fujiwara's bound on the absolute values of the roots, rounded up, or
/// `None` if it does not fit in an `f64`.
fn root_bound(p: &[BigInt]) -> Option<BigInt> {
    let n = p.len() - 1;
    let lead = p[n].to_f64()?.abs();
    let mut best: f64 = 0.0;
    for i in 1..=n {
        let c = p[n - i].to_f64()?.abs() / lead;
        let c = if i == n { c / 2.0 } else { c };
        best = best.max(c.powf(1.0 / i as f64));
    }
    let b = 2.0 * best * (1.0 + 1e-9) + 1.0;
    (b.is_finite() && b < 1e15).then(|| BigInt::from(b.ceil() as i64))
}

/// Distinct rational roots, ascending. By the rational root theorem a root
/// `num/den` in lowest terms has `num | a_0` and `den | a_n`; candidates are
/// further cut by the root bound and by `(den ∓ num) | P(±1)`, and checked
/// with integer arithmetic.
fn uni_rational_roots(p: &[Rational]) -> Vec<Rational> {
    let mut p = trim(p.to_vec());
    let mut roots = BTreeSet::new();
    if p.len() <= 1 {
        return Vec::new();
    }
    if p[0].is_zero() {
        roots.insert(Rational::zero());
        while p.first().map(Zero::is_zero).unwrap_or(false) {
            p.remove(0);
        }
    }
    if p.len() <= 1 {
        return roots.into_iter().collect();
    }
    let lcm = p.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = p.iter().map(|c| c.numer() * (&lcm / c.denom())).collect();
    let n = ints.len() - 1;
    let at_one: BigInt = ints.iter().sum();
    let at_minus_one: BigInt = ints
        .iter()
        .enumerate()
        .map(|(i, c)| if i % 2 == 0 { c.clone() } else { -c })
        .sum();
    let bound = root_bound(&ints);
    let dens = divisors(&ints[n]);
    let max_den = dens.last().expect("at least 1").clone();
    let nums: Vec<BigInt> = divisors(&ints[0])
        .into_iter()
        .filter(|num| bound.as_ref().map(|b| num <= &(&max_den * b)).unwrap_or(true))
        .collect();
    let is_root = |num: &BigInt, den: &BigInt| -> bool {
        // Σ a_i num^i den^(n-i), by Horner in num with den powers folded in.
        let mut acc = ints[n].clone();
        let mut den_pow = BigInt::one();
        for c in ints[..n].iter().rev() {
            den_pow *= den;
            acc = acc * num + c * &den_pow;
        }
        acc.is_zero()
    };
    for den in &dens {
        let limit = bound.as_ref().map(|b| den * b);
        for num in &nums {
            if limit.as_ref().map(|l| num > l).unwrap_or(false) {
                break;
            }
            if !num.gcd(den).is_one() {
                continue;
            }
            for signed in [num.clone(), -num] {
                let minus = den - &signed;
                let plus = den + &signed;
                if (!at_one.is_zero() && !minus.is_zero() && !(&at_one % &minus).is_zero())
                    || (!at_minus_one.is_zero() && !plus.is_zero() && !(&at_minus_one % &plus).is_zero())
                {
                    continue;
                }
                if is_root(&signed, den) {
                    roots.insert(Rational::new(signed, den.clone()));
                }
            }
        }
    }
    roots.into_iter().collect()
}

/// Verdicts of the structural predicate for one hyperplane.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HyperplaneVerdict {
    pub hyperplane: HyperplaneJson,
    pub slopes_nonnegative: bool,
    pub intercept_positive: bool,
    pub strict_index_exists: bool,
}

impl HyperplaneVerdict {
    pub fn pass(&self) -> bool {
        self.slopes_nonnegative && self.intercept_positive && self.strict_index_exists
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureReport {
    pub verdicts: Vec<HyperplaneVerdict>,
    pub leftover: Vec<String>,
}

impl StructureReport {
    pub fn all_pass(&self) -> bool {
        self.verdicts.iter().all(HyperplaneVerdict::pass)
    }

    /// Record unextracted factors (nonconstant remainders).
    pub fn with_leftover(mut self, remainder: &ParamPoly) -> Self {
        if !remainder.is_constant() {
            self.leftover.push(remainder.to_text());
        }
        self
    }
}

/// Nonnegative slopes, positive intercept, and some `i` with `a_i != 0` and
/// `l_i > 0`, checked per hyperplane.
pub fn check_theorem_a(hyps: &[Hyperplane], a: &[u32]) -> StructureReport {
    let verdicts = hyps
        .iter()
        .map(|h| {
            assert_eq!(h.nparams(), a.len(), "hyperplane and a have different lengths");
            HyperplaneVerdict {
                hyperplane: h.to_json(),
                slopes_nonnegative: h.slope().iter().all(|&l| l >= 0),
                intercept_positive: h.intercept().is_positive(),
                strict_index_exists: h.slope().iter().zip(a).any(|(&l, &ai)| ai != 0 && l > 0),
            }
        })
        .collect();
    StructureReport {
        verdicts,
        leftover: Vec::new(),
    }
}

/// Whether `hyps_l` equals `⋃_{l'=0}^{l-1} (hyps_1 − l'·e_i)` as sets.
/// `i` is 0-based.
pub fn check_translation_union(hyps_l: &[Hyperplane], hyps_1: &[Hyperplane], i: usize, l: u32) -> bool {
    assert!(l >= 1, "l must be positive");
    let lhs: BTreeSet<Hyperplane> = hyps_l.iter().map(Hyperplane::canonical).collect();
    let mut rhs = BTreeSet::new();
    for h in hyps_1 {
        for lp in 0..l {
            let mut k = vec![0i64; h.nparams()];
            k[i] = lp as i64;
            rhs.insert(h.shifted(&k));
        }
    }
    lhs == rhs
}

/// Hyperplanes of the ideal generated by several elements: the linear
/// factors of their gcd, i.e. the common factors with minimal multiplicity.
pub fn common_hyperplanes(decomps: &[Decomposition]) -> Vec<(Hyperplane, u32)> {
    let Some(first) = decomps.first() else {
        return Vec::new();
    };
    let mut common: BTreeMap<Hyperplane, u32> = first.factors.iter().cloned().collect();
    for d in &decomps[1..] {
        let here: BTreeMap<&Hyperplane, u32> = d.factors.iter().map(|(h, m)| (h, *m)).collect();
        common = common
            .into_iter()
            .filter_map(|(h, m)| here.get(&h).map(|&m2| (h, m.min(m2))))
            .collect();
    }
    common.into_iter().collect()
}
