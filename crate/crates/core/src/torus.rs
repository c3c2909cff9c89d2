//! Torsion-translated subtori of `(ℂ*)^r`.
//!
//! A [`TorusCoset`] is `{ λ : λ^v = e^{2πiθ_v} }` for `v` ranging over the
//! rows of a binding matrix. Roots of unity are kept as rational angles
//! `θ ∈ [0, 1)`, so equality of cosets is decidable exactly.
//!
//! The canonical form is the row Hermite normal form of the binding matrix:
//! pivots positive, entries above each pivot reduced into `[0, pivot)`, zero
//! rows dropped. Every integer row operation is mirrored on the angles
//! modulo 1, so two cosets are equal as sets iff their canonical forms are
//! identical.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Hyperplane;
use crate::poly::{format_rational, parse_rational, rat, Rational};

fn frac(q: &Rational) -> Rational {
    q - Rational::from_integer(q.floor().to_integer())
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TorusCoset {
    r: usize,
    rows: Vec<(Vec<i64>, Rational)>,
}

impl TorusCoset {
    /// The coset cut out by `λ^v = e^{2πiθ}` for each `(v, θ)`; errors if the
    /// equations are inconsistent.
    pub fn new(r: usize, binding: Vec<(Vec<i64>, Rational)>) -> Result<TorusCoset> {
        for (v, _) in &binding {
            if v.len() != r {
                return Err(Error::Precondition(format!("character {v:?} is not of length {r}")));
            }
        }
        let rows = hermite_rows(binding)?;
        Ok(TorusCoset { r, rows })
    }

    /// The whole torus.
    pub fn full(r: usize) -> TorusCoset {
        TorusCoset { r, rows: Vec::new() }
    }

    pub fn nparams(&self) -> usize {
        self.r
    }

    pub fn codimension(&self) -> usize {
        self.rows.len()
    }

    pub fn binding(&self) -> &[(Vec<i64>, Rational)] {
        &self.rows
    }

    /// Membership of `Exp(alpha)` for a rational point `alpha`.
    pub fn contains_exp_of(&self, alpha: &[Rational]) -> bool {
        self.rows.iter().all(|(v, theta)| {
            let dot = v
                .iter()
                .zip(alpha)
                .fold(Rational::zero(), |acc, (&vi, ai)| acc + rat(vi) * ai);
            frac(&(dot - theta)).is_zero()
        })
    }

    /// `self ⊆ other`: the characters binding `other` lie in this coset's
    /// lattice, with matching angles.
    pub fn is_subset_of(&self, other: &TorusCoset) -> bool {
        other.rows.iter().all(|(w, theta_w)| match self.express(w) {
            Some(theta) => frac(&(theta - theta_w)).is_zero(),
            None => false,
        })
    }

    /// The angle `self` assigns to character `w`, if `w` is in its lattice.
    fn express(&self, w: &[i64]) -> Option<Rational> {
        let mut w = w.to_vec();
        let mut theta = Rational::zero();
        for (v, t) in &self.rows {
            let p = v.iter().position(|&x| x != 0).expect("rows are nonzero");
            if w[p] % v[p] != 0 {
                return None;
            }
            let c = w[p] / v[p];
            for (wi, vi) in w.iter_mut().zip(v) {
                *wi -= c * vi;
            }
            theta += rat(c) * t;
        }
        w.iter().all(|&x| x == 0).then_some(theta)
    }

    pub fn to_json(&self) -> CosetJson {
        CosetJson {
            binding: self
                .rows
                .iter()
                .map(|(v, t)| BindingJson {
                    v: v.clone(),
                    theta: format_rational(t),
                })
                .collect(),
        }
    }

    pub fn from_json(r: usize, json: &CosetJson) -> Result<TorusCoset> {
        let binding = json
            .binding
            .iter()
            .map(|b| {
                parse_rational(&b.theta)
                    .map(|t| (b.v.clone(), t))
                    .ok_or_else(|| Error::Parse(format!("bad angle {:?}", b.theta)))
            })
            .collect::<Result<Vec<_>>>()?;
        TorusCoset::new(r, binding)
    }
}

impl fmt::Display for TorusCoset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.rows.is_empty() {
            return f.write_str("(C*)^r");
        }
        let names: Vec<String> = if self.r == 1 {
            vec!["λ".into()]
        } else {
            (1..=self.r).map(|i| format!("λ{i}")).collect()
        };
        let eqs: Vec<String> = self
            .rows
            .iter()
            .map(|(v, t)| {
                let lhs: Vec<String> = v
                    .iter()
                    .enumerate()
                    .filter(|(_, &e)| e != 0)
                    .map(|(i, &e)| if e == 1 { names[i].clone() } else { format!("{}^{}", names[i], e) })
                    .collect();
                let rhs = if t.is_zero() {
                    "1".to_string()
                } else if *t == Rational::new(1.into(), 2.into()) {
                    "-1".to_string()
                } else {
                    format!("exp(2πi·{})", format_rational(t))
                };
                format!("{} = {}", lhs.join("*"), rhs)
            })
            .collect();
        write!(f, "{{{}}}", eqs.join(", "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BindingJson {
    pub v: Vec<i64>,
    pub theta: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CosetJson {
    pub binding: Vec<BindingJson>,
}

/// Row Hermite normal form with angles carried along modulo 1.
fn hermite_rows(binding: Vec<(Vec<i64>, Rational)>) -> Result<Vec<(Vec<i64>, Rational)>> {
    let mut rows: Vec<(Vec<i64>, Rational)> = binding.into_iter().map(|(v, t)| (v, frac(&t))).collect();
    let ncols = rows.first().map(|(v, _)| v.len()).unwrap_or(0);
    let sub = |rows: &mut Vec<(Vec<i64>, Rational)>, target: usize, source: usize, q: i64| {
        if q == 0 {
            return;
        }
        let (sv, st) = rows[source].clone();
        let (tv, tt) = &mut rows[target];
        for (a, b) in tv.iter_mut().zip(&sv) {
            *a -= q * b;
        }
        *tt = frac(&(&*tt - rat(q) * st));
    };
    let mut top = 0;
    for col in 0..ncols {
        // Euclid on the column below `top` until one nonzero entry remains.
        loop {
            let nonzero: Vec<usize> = (top..rows.len()).filter(|&i| rows[i].0[col] != 0).collect();
            if nonzero.is_empty() {
                break;
            }
            let min = *nonzero
                .iter()
                .min_by_key(|&&i| rows[i].0[col].abs())
                .expect("nonempty");
            rows.swap(top, min);
            let mut done = true;
            for i in (top + 1)..rows.len() {
                let q = Integer::div_floor(&rows[i].0[col], &rows[top].0[col]);
                sub(&mut rows, i, top, q);
                if rows[i].0[col] != 0 {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if top < rows.len() && rows[top].0[col] != 0 {
            if rows[top].0[col] < 0 {
                let (v, t) = &mut rows[top];
                v.iter_mut().for_each(|x| *x = -*x);
                *t = frac(&-t.clone());
            }
            let pivot = rows[top].0[col];
            for i in 0..top {
                let q = Integer::div_floor(&rows[i].0[col], &pivot);
                sub(&mut rows, i, top, q);
            }
            top += 1;
        }
    }
    for (_, t) in rows.drain(top..) {
        if !t.is_zero() {
            return Err(Error::EmptyCoset);
        }
    }
    Ok(rows)
}

/// `Exp` of the hyperplane `L·s + b = 0`: the coset `λ^L = e^{−2πib}`.
/// Primitivity of `L` makes this the whole image, not a superset.
pub fn exp_image(h: &Hyperplane) -> TorusCoset {
    let theta = frac(&-h.intercept().clone());
    TorusCoset::new(h.nparams(), vec![(h.slope().to_vec(), theta)]).expect("a single nonzero character is consistent")
}

/// Canonical union: sorted, duplicates removed, and any coset contained in
/// another absorbed.
pub fn normalize_union(cosets: &[TorusCoset]) -> Vec<TorusCoset> {
    let set: BTreeSet<TorusCoset> = cosets.iter().cloned().collect();
    let all: Vec<TorusCoset> = set.into_iter().collect();
    all.iter()
        .filter(|c| !all.iter().any(|d| d != *c && c.is_subset_of(d)))
        .cloned()
        .collect()
}

/// Set equality of two finite unions of codimension-one cosets.
pub fn union_equal(a: &[TorusCoset], b: &[TorusCoset]) -> Result<bool> {
    for c in a.iter().chain(b) {
        if c.codimension() != 1 {
            return Err(Error::UnsupportedCodimension(c.codimension()));
        }
    }
    Ok(normalize_union(a) == normalize_union(b))
}

/// `combined` against the union of the per-index images, where the keys
/// (0-based) must be indices with `a_i != 0`.
pub fn check_eq_iii(
    per_i: &BTreeMap<usize, Vec<TorusCoset>>,
    combined: &[TorusCoset],
    a: &[u32],
) -> Result<bool> {
    if let Some(bad) = per_i.keys().find(|&&i| a.get(i).copied().unwrap_or(0) == 0) {
        return Err(Error::Precondition(format!("index {} has a_i = 0", bad + 1)));
    }
    let union: Vec<TorusCoset> = per_i.values().flatten().cloned().collect();
    union_equal(combined, &union)
}

/// The coset pieces of `{λ^L = 1}` for a possibly non-primitive `L`:
/// with `d = gcd(L)`, the `d` cosets `λ^{L/d} = e^{2πij/d}`.
pub fn character_kernel(l: &[i64]) -> Vec<TorusCoset> {
    let d = l.iter().fold(0i64, |acc, &x| acc.gcd(&x));
    assert!(d > 0, "zero character");
    let prim: Vec<i64> = l.iter().map(|x| x / d).collect();
    (0..d)
        .map(|j| {
            TorusCoset::new(l.len(), vec![(prim.clone(), Rational::new(BigInt::from(j), BigInt::from(d)))])
                .expect("consistent")
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::ratio;

    fn coset(r: usize, rows: &[(&[i64], Rational)]) -> TorusCoset {
        TorusCoset::new(r, rows.iter().map(|(v, t)| (v.to_vec(), t.clone())).collect()).unwrap()
    }

    fn hp(l: &[i64], b: Rational) -> Hyperplane {
        Hyperplane::new(l, b).unwrap()
    }

    #[test]
    fn exp_image_examples() {
        assert_eq!(exp_image(&hp(&[1, 0], rat(1))), coset(2, &[(&[1, 0], rat(0))]));
        let c = exp_image(&hp(&[1, 1], rat(1)));
        assert_eq!(c, coset(2, &[(&[1, 1], rat(0))]));
        // two independent points on s1 + s2 + 1 = 0
        assert!(c.contains_exp_of(&[rat(-1), rat(0)]));
        assert!(c.contains_exp_of(&[ratio(1, 3), ratio(-4, 3)]));
        assert!(!c.contains_exp_of(&[ratio(1, 2), rat(0)]));
        assert_eq!(exp_image(&hp(&[1, 0], ratio(1, 2))).to_string(), "{λ1 = -1}");
    }

    #[test]
    fn canonical_form_is_unique() {
        let a = coset(2, &[(&[1, 1], rat(0)), (&[1, -1], ratio(1, 2))]);
        let b = coset(2, &[(&[2, 0], ratio(1, 2)), (&[1, 1], rat(0)), (&[0, 2], ratio(3, 2))]);
        assert_eq!(a, b);
        assert_eq!(a.codimension(), 2);
        let c = coset(2, &[(&[-1, -1], ratio(1, 3))]);
        assert_eq!(c.binding(), &[(vec![1, 1], ratio(2, 3))]);
        assert_eq!(TorusCoset::new(2, c.binding().to_vec()).unwrap(), c);
    }

    #[test]
    fn inconsistent_binding_is_empty() {
        let r = TorusCoset::new(1, vec![(vec![1], rat(0)), (vec![1], ratio(1, 2))]);
        assert_eq!(r, Err(Error::EmptyCoset));
    }

    #[test]
    fn containment() {
        let point = coset(2, &[(&[1, 0], rat(0)), (&[0, 1], rat(0))]);
        let line = coset(2, &[(&[1, 1], rat(0))]);
        assert!(point.is_subset_of(&line));
        assert!(!line.is_subset_of(&point));
        let other = coset(2, &[(&[1, 0], ratio(1, 2)), (&[0, 1], ratio(1, 2))]);
        assert!(other.is_subset_of(&line));
        assert!(!other.is_subset_of(&coset(2, &[(&[1, 0], rat(0))])));
    }

    #[test]
    fn union_equal_examples() {
        let l1 = coset(2, &[(&[1, 0], rat(0))]);
        let l2 = coset(2, &[(&[0, 1], rat(0))]);
        assert!(union_equal(&[l1.clone(), l2.clone()], &[l2.clone(), l1.clone()]).unwrap());
        let diag = coset(2, &[(&[1, 1], rat(0))]);
        assert!(!union_equal(std::slice::from_ref(&diag), std::slice::from_ref(&l1)).unwrap());
        let shifted = [exp_image(&hp(&[1, 1], rat(1))), exp_image(&hp(&[1, 1], rat(2)))];
        assert!(union_equal(&shifted, &[exp_image(&hp(&[1, 1], rat(1)))]).unwrap());
        let point = coset(2, &[(&[1, 0], rat(0)), (&[0, 1], rat(0))]);
        assert_eq!(union_equal(&[point], &[l1]), Err(Error::UnsupportedCodimension(2)));
    }

    #[test]
    fn eq_iii_examples() {
        let diag = coset(2, &[(&[1, 1], rat(0))]);
        let axis = coset(2, &[(&[0, 1], rat(0))]);
        let per_i = BTreeMap::from([(0, vec![diag.clone()]), (1, vec![diag.clone(), axis.clone()])]);
        assert!(check_eq_iii(&per_i, &[axis.clone(), diag.clone()], &[1, 1]).unwrap());
        let single = BTreeMap::from([(0, vec![diag.clone()])]);
        assert!(check_eq_iii(&single, std::slice::from_ref(&diag), &[1, 0]).unwrap());
        assert!(!check_eq_iii(&per_i, std::slice::from_ref(&diag), &[1, 1]).unwrap());
        assert!(check_eq_iii(&per_i, &[diag], &[1, 0]).is_err());
    }

    #[test]
    fn character_kernel_splits() {
        let pieces = character_kernel(&[0, 2]);
        assert_eq!(pieces, vec![coset(2, &[(&[0, 1], rat(0))]), coset(2, &[(&[0, 1], ratio(1, 2))])]);
    }

    #[test]
    fn json_round_trip() {
        let c = coset(3, &[(&[1, 2, 0], ratio(1, 3))]);
        assert_eq!(TorusCoset::from_json(3, &c.to_json()).unwrap(), c);
        assert_eq!(serde_json::to_string(&c.to_json()).unwrap(), r#"{"binding":[{"v":[1,2,0],"theta":"1/3"}]}"#);
    }
}
