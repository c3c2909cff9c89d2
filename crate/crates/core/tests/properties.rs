use std::sync::Arc;

use proptest::prelude::*;

use bsideal::geometry::{check_theorem_a, extract_hyperplanes, Hyperplane, DEFAULT_SLOPE_BOUND};
use bsideal::poly::{rat, ratio, Poly, Rational};
use bsideal::snc::{
    mon_zeta, sabbah_specialize, slope_set, snc_b_element, snc_certificate, support_loci, ResolutionGraph, SlopeSet,
};
use bsideal::solver::{
    default_strategies, find_bs_pair, restrict_diagonal, sample_ideal, solve_space, verify, SolveBounds,
    Strategy as Ansatz,
};
use bsideal::torus::{exp_image, normalize_union, union_equal, TorusCoset};
use bsideal::weyl::{apply, shift_s, GermElement, ParamPoly, PolyFamily, WeylOperator};

fn family(names: &[&str], f: &[&str]) -> Arc<PolyFamily> {
    let names: Vec<String> = names.iter().map(|s| s.to_string()).collect();
    PolyFamily::parse(&names, f).unwrap()
}

/// Small collections with known constant-coefficient certificates.
fn families() -> Vec<(Arc<PolyFamily>, SolveBounds)> {
    vec![
        (family(&["x"], &["x"]), SolveBounds::constant_coefficients(2)),
        (family(&["x"], &["x^2"]), SolveBounds::constant_coefficients(4)),
        (family(&["x", "y"], &["x", "x*y"]), SolveBounds::constant_coefficients(3)),
        (family(&["x", "y"], &["x", "y"]), SolveBounds::constant_coefficients(2)),
        (family(&["x", "y"], &["x^2 + y^2"]), SolveBounds::constant_coefficients(2)),
    ]
}

fn family_index() -> impl Strategy<Value = usize> {
    0..families().len()
}

fn param_poly(r: usize) -> impl Strategy<Value = ParamPoly> {
    (prop::collection::vec(-2i64..=2, r), -3i64..=3, any::<bool>()).prop_map(move |(l, c, linear)| {
        if linear {
            ParamPoly::new(ParamPoly::linear_form(&l, rat(c)).as_poly().clone())
        } else {
            ParamPoly::constant(r, rat(c))
        }
    })
}

fn operator(n: usize, r: usize) -> impl Strategy<Value = WeylOperator> {
    let term = (param_poly(r), prop::collection::vec(0u32..=1, n), prop::collection::vec(0u32..=2, n));
    prop::collection::vec(term, 1..=3).prop_map(move |terms| {
        terms
            .into_iter()
            .fold(WeylOperator::zero(n, r), |acc, (c, al, be)| acc.add(&WeylOperator::term(c, al, be)))
    })
}

/// A collection index together with an operator pair over it.
fn family_and_ops() -> impl Strategy<Value = (usize, WeylOperator, WeylOperator, Vec<i64>)> {
    family_index().prop_flat_map(|i| {
        let (fam, _) = families()[i].clone();
        let (n, r) = (fam.n(), fam.r());
        (Just(i), operator(n, r), operator(n, r), prop::collection::vec(0i64..=2, r))
    })
}

fn monomial_matrix() -> impl Strategy<Value = (Vec<Vec<u32>>, Vec<u32>)> {
    (1usize..=2, 1usize..=2).prop_flat_map(|(r, n)| {
        (
            prop::collection::vec(prop::collection::vec(0u32..=2, n), r),
            prop::collection::vec(0u32..=1, r),
        )
            .prop_filter("some f_j with a_j != 0 must be nonconstant", |(m, a)| {
                m.iter().zip(a).any(|(row, &aj)| aj > 0 && row.iter().any(|&e| e > 0))
            })
    })
}

fn graph() -> impl Strategy<Value = ResolutionGraph> {
    (1usize..=3).prop_flat_map(|r| {
        let comp = (prop::collection::vec(0u32..=3, r), -2i64..=2)
            .prop_filter("L must be nonzero", |(l, _)| l.iter().any(|&x| x > 0));
        prop::collection::vec(comp, 1..=4).prop_map(move |cs| {
            let pairs: Vec<(&[u32], i64)> = cs.iter().map(|(l, c)| (l.as_slice(), *c)).collect();
            ResolutionGraph::from_pairs(r, &pairs).unwrap()
        })
    })
}

fn compliant_hyperplane(r: usize) -> impl Strategy<Value = Hyperplane> {
    (prop::collection::vec(0i64..=3, r), 1i64..=12, 1i64..=6)
        .prop_filter("nonzero slope", |(l, _, _)| l.iter().any(|&x| x > 0))
        .prop_map(|(l, p, q)| Hyperplane::new(&l, ratio(p, q)).unwrap())
}

/// `P(s = k)` applied to `∏ f_i^{k_i + a_i}` by ordinary differentiation.
fn ordinary_apply(op: &WeylOperator, fam: &PolyFamily, e: &[u32], k: &[i64]) -> Poly {
    let n = fam.n();
    let mut q = Poly::one(n);
    for (f, &ei) in fam.polys().iter().zip(e) {
        q = &q * &f.pow(ei);
    }
    let point: Vec<Rational> = k.iter().map(|&v| rat(v)).collect();
    let mut out = Poly::zero(n);
    for (alpha, beta, c) in op.terms() {
        let mut t = q.clone();
        for (j, &b) in beta.exponents().iter().enumerate() {
            for _ in 0..b {
                t = t.derivative(j);
            }
        }
        out = &out + &(&t.mul_monomial(alpha) * &Poly::constant(n, c.as_poly().eval(&point)));
    }
    out
}

/// Substitute `s := k` in a numerator over `ℚ[x, s]`.
fn at_s(p: &Poly, n: usize, k: &[i64]) -> Poly {
    let mut images: Vec<Poly> = (0..n).map(|j| Poly::var(n, j)).collect();
    images.extend(k.iter().map(|&v| Poly::constant(n, rat(v))));
    p.compose(&images)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn composition_matches_successive_application((i, p, q, a) in family_and_ops()) {
        let fam = families()[i].0.clone();
        let v = GermElement::twisted_symbol(&fam, &a);
        prop_assert!(apply(&p.compose(&q), &v).same_element(&apply(&p, &apply(&q, &v))));
    }

    #[test]
    fn apply_is_linear_over_parameters((i, p, q, a) in family_and_ops(), l in prop::collection::vec(-2i64..=2, 2), c0 in -3i64..=3) {
        let fam = families()[i].0.clone();
        let c = ParamPoly::linear_form(&l[..fam.r()], rat(c0));
        let v = GermElement::twisted_symbol(&fam, &a);
        let lhs = apply(&p.scale(&c).add(&q), &v);
        let rhs = apply(&p, &v).mul_poly(&fam.embed_param(&c)).add(&apply(&q, &v));
        prop_assert!(lhs.same_element(&rhs));
    }

    #[test]
    fn integer_specialization_matches_calculus((i, p, _q, a) in family_and_ops(), k in prop::collection::vec(0i64..=2, 2)) {
        let fam = families()[i].0.clone();
        let (n, r) = (fam.n(), fam.r());
        let k = &k[..r];
        let g = apply(&p, &GermElement::twisted_symbol(&fam, &a));
        let e: Vec<u32> = (0..r).map(|j| (k[j] + a[j]) as u32).collect();
        let twist_e: Vec<u32> = (0..r).map(|j| (k[j] + g.twist()[j]) as u32).collect();
        let mut lhs = at_s(g.numerator(), n, k);
        for (f, &m) in fam.polys().iter().zip(&twist_e) {
            lhs = &lhs * &f.pow(m);
        }
        let mut rhs = ordinary_apply(&p, &fam, &e, k);
        for (f, &m) in fam.polys().iter().zip(g.denominator()) {
            rhs = &rhs * &f.pow(m);
        }
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn shift_round_trip(p in param_poly(3), k in prop::collection::vec(-5i64..=5, 3)) {
        let back: Vec<i64> = k.iter().map(|x| -x).collect();
        prop_assert_eq!(shift_s(&shift_s(&p, &k), &back), p);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn solver_output_is_sound((m, a) in monomial_matrix()) {
        let cert = snc_certificate(&m, &a).unwrap();
        let order = cert.op.order();
        let bounds = SolveBounds::constant_coefficients(order);
        let found = find_bs_pair(&cert.family, &a, &bounds).unwrap();
        prop_assert!(verify(&found));
        for c in sample_ideal(&cert.family, &a, &bounds, &default_strategies(cert.family.n())).unwrap() {
            prop_assert!(verify(&c));
        }
    }

    #[test]
    fn enlarging_bounds_keeps_solutions(i in family_index(), a0 in 1u32..=1) {
        let (fam, bounds) = families()[i].clone();
        let a = vec![a0; fam.r()];
        let small = find_bs_pair(&fam, &a, &bounds).unwrap();
        let big = SolveBounds::new(bounds.max_operator_order + 1, 1, 0, bounds.max_b_degree + 1);
        let space = solve_space(&fam, &a, &big, &Ansatz::Full).unwrap();
        prop_assert!(space.contains(&small.b));
    }

    #[test]
    fn shifted_certificates_verify(i in family_index(), k in prop::collection::vec(-3i64..=3, 2)) {
        let (fam, bounds) = families()[i].clone();
        let r = fam.r();
        let k = &k[..r];
        let a = vec![1; r];
        let cert = find_bs_pair(&fam, &a, &bounds).unwrap();
        let twist: Vec<i64> = (0..r).map(|j| k[j] + a[j] as i64).collect();
        let lhs = apply(&cert.op.shift_s(k), &GermElement::twisted_symbol(&fam, &twist));
        let rhs = GermElement::new(fam.clone(), fam.embed_param(&cert.b.shift(k)), vec![0; r], k.to_vec());
        prop_assert!(lhs.same_element(&rhs));
    }

    #[test]
    fn diagonal_is_divisible_by_s_plus_one(i in family_index()) {
        let (fam, bounds) = families()[i].clone();
        prop_assume!(fam.r() == 1);
        let cert = find_bs_pair(&fam, &[1], &bounds).unwrap();
        let d = restrict_diagonal(&cert.b);
        prop_assert!(d.as_poly().exact_div(ParamPoly::parse("s + 1", 1).unwrap().as_poly()).is_some());
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn extraction_reexpands_exactly(
        hs in prop::collection::vec((compliant_hyperplane(2), 1u32..=2), 0..=3),
        rest in param_poly(2),
        quad in any::<bool>(),
    ) {
        let mut p = if quad {
            ParamPoly::parse("s1^2 + s2^2 + 1", 2).unwrap()
        } else {
            ParamPoly::one(2)
        };
        prop_assume!(!rest.is_zero());
        p = ParamPoly::new(p.as_poly() * rest.as_poly());
        for (h, m) in &hs {
            p = ParamPoly::new(p.as_poly() * &h.to_param_poly().as_poly().pow(*m));
        }
        let d = extract_hyperplanes(&p, DEFAULT_SLOPE_BOUND).unwrap();
        prop_assert_eq!(d.expand(), p);
    }

    #[test]
    fn canonical_is_idempotent(l in prop::collection::vec(-4i64..=4, 3), b in -9i64..=9, q in 1i64..=5) {
        prop_assume!(l.iter().any(|&x| x != 0));
        let h = Hyperplane::new(&l, ratio(b, q)).unwrap();
        prop_assert_eq!(h.canonical().canonical(), h.canonical());
    }

    #[test]
    fn extraction_commutes_with_shift(
        hs in prop::collection::vec((compliant_hyperplane(2), 1u32..=2), 1..=3),
        k in prop::collection::vec(-4i64..=4, 2),
    ) {
        let mut p = ParamPoly::one(2);
        for (h, m) in &hs {
            p = ParamPoly::new(p.as_poly() * &h.to_param_poly().as_poly().pow(*m));
        }
        let d = extract_hyperplanes(&p, DEFAULT_SLOPE_BOUND).unwrap();
        let ds = extract_hyperplanes(&shift_s(&p, &k), DEFAULT_SLOPE_BOUND).unwrap();
        let mut expected: Vec<(Hyperplane, u32)> = d.factors.iter().map(|(h, m)| (h.shifted(&k), *m)).collect();
        expected.sort();
        let mut got = ds.factors.clone();
        got.sort();
        prop_assert_eq!(got, expected);
        prop_assert_eq!(ds.remainder, d.remainder);
    }

    #[test]
    fn snc_certificate_verifies((m, a) in monomial_matrix()) {
        prop_assert!(verify(&snc_certificate(&m, &a).unwrap()));
    }

    #[test]
    fn slope_set_ignores_multiples(g in graph(), a in prop::collection::vec(0u32..=2, 3), l in 1u32..=4) {
        let a = &a[..g.r()];
        let la: Vec<u32> = a.iter().map(|x| x * l).collect();
        prop_assert_eq!(slope_set(&g, a).ok(), slope_set(&g, &la).ok());
    }

    #[test]
    fn snc_b_element_has_predicted_hyperplanes(g in graph(), a in prop::collection::vec(0u32..=2, 3)) {
        let a = &a[..g.r()];
        let Ok(slopes) = slope_set(&g, a) else { return Ok(()); };
        let b = snc_b_element(&g, a).unwrap();
        let d = extract_hyperplanes(&b, DEFAULT_SLOPE_BOUND).unwrap();
        prop_assert!(d.remainder.is_constant());
        let got = SlopeSet::new(d.factors.iter().map(|(h, _)| h.slope().iter().map(|&x| x as u32).collect()));
        prop_assert_eq!(got, slopes);
        prop_assert!(check_theorem_a(&d.hyperplanes(), a).all_pass());
    }

    #[test]
    fn sabbah_specialization_matches_reweighting(g in graph(), m in prop::collection::vec(1u32..=4, 3)) {
        let m = &m[..g.r()];
        prop_assert_eq!(sabbah_specialize(&mon_zeta(&g), m).unwrap(), mon_zeta(&g.reweight(m).unwrap()));
    }

    #[test]
    fn support_loci_split_over_axes(g in graph(), a in prop::collection::vec(0u32..=2, 3)) {
        let a = &a[..g.r()];
        let Ok(total) = support_loci(&g, a) else { return Ok(()); };
        let mut parts = Vec::new();
        for i in (0..a.len()).filter(|&i| a[i] != 0) {
            let mut e = vec![0; a.len()];
            e[i] = 1;
            if let Ok(s) = support_loci(&g, &e) {
                parts.extend(s);
            }
        }
        prop_assert!(union_equal(&total, &parts).unwrap());
    }

    #[test]
    fn exp_ignores_integer_shifts(h in compliant_hyperplane(3), k in prop::collection::vec(-10i64..=10, 3)) {
        prop_assert_eq!(exp_image(&h.shifted(&k)), exp_image(&h));
    }

    #[test]
    fn exp_images_have_codimension_one(h in compliant_hyperplane(3)) {
        let c = exp_image(&h);
        prop_assert_eq!(c.codimension(), 1);
        let (_, theta) = &c.binding()[0];
        prop_assert!(*theta >= rat(0) && *theta < rat(1));
    }

    #[test]
    fn coset_canonical_form_is_idempotent(rows in prop::collection::vec((prop::collection::vec(-3i64..=3, 3), 0i64..=5), 1..=3)) {
        let binding: Vec<(Vec<i64>, Rational)> = rows.iter().map(|(v, t)| (v.clone(), ratio(*t, 6))).collect();
        if let Ok(c) = TorusCoset::new(3, binding) {
            prop_assert_eq!(TorusCoset::new(3, c.binding().to_vec()).unwrap(), c);
        }
    }

    #[test]
    fn union_equality_is_an_equivalence(
        hs in prop::collection::vec(compliant_hyperplane(2), 1..=4),
        k in prop::collection::vec(-3i64..=3, 2),
        seed in any::<u64>(),
    ) {
        let a: Vec<TorusCoset> = hs.iter().map(exp_image).collect();
        let mut b: Vec<TorusCoset> = hs.iter().map(|h| exp_image(&h.shifted(&k))).collect();
        let shift = (seed as usize) % b.len();
        b.rotate_left(shift);
        let mut c = a.clone();
        c.extend(a.iter().cloned());
        c.reverse();
        prop_assert!(union_equal(&a, &a).unwrap());
        prop_assert_eq!(union_equal(&a, &b).unwrap(), union_equal(&b, &a).unwrap());
        prop_assert!(union_equal(&a, &b).unwrap() && union_equal(&b, &c).unwrap() && union_equal(&a, &c).unwrap());
        prop_assert_eq!(normalize_union(&normalize_union(&c)), normalize_union(&c));
    }
}
