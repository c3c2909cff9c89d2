//! The acceptance suite: one line per criterion, nonzero exit on failure.

use std::collections::BTreeMap;
use std::process::Command;
use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use bsideal::cli;
use bsideal::geometry::{
    check_theorem_a, check_translation_union, common_hyperplanes, extract_hyperplanes, Hyperplane,
    DEFAULT_SLOPE_BOUND,
};
use bsideal::poly::{rat, ratio};
use bsideal::snc::{
    mon_zeta, sabbah_specialize, slope_set, snc_b_element, snc_certificate, support_loci, ResolutionGraph, SlopeSet,
};
use bsideal::solver::{
    default_strategies, find_bs_pair, sample_ideal, verify, BsCertificate, SolveBounds,
};
use bsideal::torus::{check_eq_iii, exp_image, normalize_union, union_equal, TorusCoset};
use bsideal::weyl::{ParamPoly, PolyFamily, WeylOperator};

const SEED: u64 = 0x05ee_db51_dea1;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

/// Everything the suite emits, so criterion 1 can re-verify it.
#[derive(Default)]
struct Emitted(Vec<BsCertificate>);

impl Emitted {
    fn keep(&mut self, c: &BsCertificate) {
        self.0.push(c.clone());
    }
}

fn family(names: &[&str], f: &[&str]) -> Arc<PolyFamily> {
    let names: Vec<String> = names.iter().map(|s| s.to_string()).collect();
    PolyFamily::parse(&names, f).unwrap()
}

fn pp(text: &str, r: usize) -> ParamPoly {
    ParamPoly::parse(text, r).unwrap()
}

/// Exp of the hyperplanes common to a sample of the ideal.
fn sampled_exp(fam: &Arc<PolyFamily>, a: &[u32], bounds: &SolveBounds, out: &mut Emitted) -> Vec<TorusCoset> {
    let hyps = sampled_hyperplanes(fam, a, bounds, out);
    normalize_union(&hyps.iter().map(exp_image).collect::<Vec<_>>())
}

fn sampled_hyperplanes(fam: &Arc<PolyFamily>, a: &[u32], bounds: &SolveBounds, out: &mut Emitted) -> Vec<Hyperplane> {
    let certs = sample_ideal(fam, a, bounds, &default_strategies(fam.n())).unwrap();
    let decomps: Vec<_> = certs
        .iter()
        .map(|c| {
            out.keep(c);
            extract_hyperplanes(&c.b, DEFAULT_SLOPE_BOUND).unwrap()
        })
        .collect();
    common_hyperplanes(&decomps).into_iter().map(|(h, _)| h).collect()
}

fn random_matrix(rng: &mut ChaCha8Rng, max_r: usize, max_n: usize, max_entry: u32) -> (Vec<Vec<u32>>, Vec<u32>) {
    loop {
        let r = rng.gen_range(1..=max_r);
        let n = rng.gen_range(1..=max_n);
        let m: Vec<Vec<u32>> = (0..r)
            .map(|_| (0..n).map(|_| rng.gen_range(0..=max_entry)).collect())
            .collect();
        let a: Vec<u32> = (0..r).map(|_| rng.gen_range(0..=1)).collect();
        if m.iter().zip(&a).any(|(row, &aj)| aj > 0 && row.iter().any(|&e| e > 0)) {
            return (m, a);
        }
    }
}

fn random_graph(rng: &mut ChaCha8Rng) -> ResolutionGraph {
    let r = rng.gen_range(1..=3);
    let k = rng.gen_range(1..=5);
    let comps: Vec<(Vec<u32>, i64)> = (0..k)
        .map(|_| loop {
            let l: Vec<u32> = (0..r).map(|_| rng.gen_range(0..=3)).collect();
            if l.iter().any(|&x| x > 0) {
                break (l, rng.gen_range(-2..=2));
            }
        })
        .collect();
    let pairs: Vec<(&[u32], i64)> = comps.iter().map(|(l, c)| (l.as_slice(), *c)).collect();
    ResolutionGraph::from_pairs(r, &pairs).unwrap()
}

fn slopes_of(hyps: &[Hyperplane]) -> SlopeSet {
    SlopeSet::new(hyps.iter().map(|h| h.slope().iter().map(|&l| l as u32).collect()))
}

/// Variables, F, a, expected b, expected P.
type Canonical<'a> = (&'a [&'a str], &'a [&'a str], &'a [u32], &'a str, Option<&'a str>);

fn criterion_2(out: &mut Emitted) -> Outcome {
    let cases: [Canonical; 4] = [
        (&["x"], &["x"], &[1], "s + 1", None),
        (&["x"], &["x"], &[2], "(s + 1)*(s + 2)", None),
        (&["x", "y"], &["x^2 + y^2"], &[1], "(s + 1)^2", Some("1/4*dx^2 + 1/4*dy^2")),
        (&["x", "y"], &["x", "y"], &[1, 1], "(s1 + 1)*(s2 + 1)", None),
    ];
    let mut bad = Vec::new();
    for (names, f, a, b, p) in cases {
        let fam = family(names, f);
        let cert = find_bs_pair(&fam, a, &SolveBounds::constant_coefficients(2)).unwrap();
        out.keep(&cert);
        let names: Vec<String> = names.iter().map(|s| s.to_string()).collect();
        let b_ok = cert.b == pp(b, fam.r());
        let p_ok = p.map(|p| cert.op == WeylOperator::parse(p, &names, fam.r()).unwrap()).unwrap_or(true);
        if !(b_ok && p_ok) {
            bad.push(format!("F = {f:?}: got b = {}, P = {}", cert.b, cert.op.to_text(&names)));
        }
    }
    outcome(bad.is_empty(), if bad.is_empty() { "4 canonical forms match".into() } else { bad.join("; ") })
}

fn criterion_3(rng: &mut ChaCha8Rng, out: &mut Emitted) -> Outcome {
    let mut checked = 0;
    let mut bad = Vec::new();
    let report = cli::run(&cli::corpus_specs(), None);
    for e in &report.entries {
        let Some(d) = &e.decompose else { continue };
        for s in &d.sampled {
            let cert = BsCertificate::from_json(&s.certificate, &e.variables).unwrap();
            out.keep(&cert);
            let hyps = extract_hyperplanes(&cert.b, DEFAULT_SLOPE_BOUND).unwrap().hyperplanes();
            checked += hyps.len();
            if !check_theorem_a(&hyps, &cert.a).all_pass() {
                bad.push(format!("corpus {}: {}", e.id, cert.b));
            }
        }
    }
    let instances = 20;
    for _ in 0..instances {
        let (m, a) = random_matrix(rng, 3, 4, 3);
        let graph = ResolutionGraph::from_monomial_exponents(&m).unwrap();
        let b = snc_b_element(&graph, &a).unwrap();
        let d = extract_hyperplanes(&b, DEFAULT_SLOPE_BOUND).unwrap();
        checked += d.factors.len();
        if !check_theorem_a(&d.hyperplanes(), &a).all_pass() || !d.remainder.is_constant() {
            bad.push(format!("matrix {m:?}, a = {a:?}"));
        }
    }
    outcome(
        bad.is_empty(),
        format!("{checked} hyperplanes from the corpus and {instances} random SNC matrices{}", failures(&bad)),
    )
}

fn criterion_4(rng: &mut ChaCha8Rng, out: &mut Emitted) -> Outcome {
    let instances = 50;
    let mut bad = Vec::new();
    for _ in 0..instances {
        let (m, a) = random_matrix(rng, 3, 3, 2);
        let cert = snc_certificate(&m, &a).unwrap();
        out.keep(&cert);
        let graph = ResolutionGraph::from_monomial_exponents(&m).unwrap();
        let d = extract_hyperplanes(&cert.b, DEFAULT_SLOPE_BOUND).unwrap();
        let hyps = d.hyperplanes();
        let ok = verify(&cert)
            && d.remainder.is_constant()
            && slopes_of(&hyps) == slope_set(&graph, &a).unwrap()
            && hyps.iter().all(|h| *h.intercept() > rat(0));
        if !ok {
            bad.push(format!("matrix {m:?}, a = {a:?}"));
        }
    }
    outcome(bad.is_empty(), format!("{instances} random monomial collections{}", failures(&bad)))
}

fn criterion_5(out: &mut Emitted) -> Outcome {
    let mut bad = Vec::new();
    let mut checked = 0;
    for (names, f) in [(&["x"][..], &["x"][..]), (&["x", "y"][..], &["x", "x*y"][..])] {
        let fam = family(names, f);
        for i in 0..fam.r() {
            let unit = |l: u32| {
                let mut a = vec![0; fam.r()];
                a[i] = l;
                a
            };
            let hyps_1 = sampled_hyperplanes(&fam, &unit(1), &SolveBounds::constant_coefficients(2), out);
            for l in 1..=3 {
                let hyps_l = sampled_hyperplanes(&fam, &unit(l), &SolveBounds::constant_coefficients(2 * l), out);
                checked += 1;
                if !check_translation_union(&hyps_l, &hyps_1, i, l) {
                    bad.push(format!("F = {f:?}, i = {}, l = {l}", i + 1));
                }
            }
        }
    }
    outcome(bad.is_empty(), format!("{checked} (F, i, l) cases{}", failures(&bad)))
}

fn graph_xxy() -> ResolutionGraph {
    ResolutionGraph::from_pairs(2, &[(&[1, 1], 0), (&[0, 1], 0)]).unwrap()
}

fn graph_xy() -> ResolutionGraph {
    ResolutionGraph::from_pairs(2, &[(&[1, 0], 0), (&[0, 1], 0)]).unwrap()
}

const A_VALUES: [[u32; 2]; 3] = [[1, 0], [0, 1], [1, 1]];

fn criterion_6(out: &mut Emitted) -> Outcome {
    let bounds = SolveBounds::constant_coefficients(3);
    let mut bad = Vec::new();
    for (f, graph) in [(&["x", "x*y"][..], graph_xxy()), (&["x", "y"][..], graph_xy())] {
        let fam = family(&["x", "y"], f);
        for a in A_VALUES {
            let combined = sampled_exp(&fam, &a, &bounds, out);
            let mut per_i = BTreeMap::new();
            let mut loci_parts = Vec::new();
            for i in (0..2).filter(|&i| a[i] != 0) {
                let mut ai = [0; 2];
                ai[i] = a[i];
                per_i.insert(i, sampled_exp(&fam, &ai, &bounds, out));
                loci_parts.extend(support_loci(&graph, &ai).unwrap());
            }
            if !check_eq_iii(&per_i, &combined, &a).unwrap() {
                bad.push(format!("eq. (III) for F = {f:?}, a = {a:?}"));
            }
            if !union_equal(&support_loci(&graph, &a).unwrap(), &loci_parts).unwrap() {
                bad.push(format!("eq. (I) for F = {f:?}, a = {a:?}"));
            }
        }
    }
    outcome(bad.is_empty(), format!("2 collections x 3 values of a{}", failures(&bad)))
}

fn criterion_7(out: &mut Emitted) -> Outcome {
    let fam = family(&["x", "y"], &["x", "x*y"]);
    let bounds = SolveBounds::constant_coefficients(3);
    let mut bad = Vec::new();
    for a in A_VALUES {
        let exp = sampled_exp(&fam, &a, &bounds, out);
        let loci = support_loci(&graph_xxy(), &a).unwrap();
        if !union_equal(&exp, &loci).unwrap() {
            let show = |c: &[TorusCoset]| c.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ∪ ");
            bad.push(format!("a = {a:?}: Exp = {}, S = {}", show(&exp), show(&loci)));
        }
    }
    outcome(bad.is_empty(), format!("F = (x, xy), a in {{e1, e2, (1,1)}}{}", failures(&bad)))
}

fn criterion_8(rng: &mut ChaCha8Rng) -> Outcome {
    let instances = 40;
    let mut bad = Vec::new();
    for _ in 0..instances {
        let g = random_graph(rng);
        let m: Vec<u32> = (0..g.r()).map(|_| rng.gen_range(1..=4)).collect();
        let lhs = sabbah_specialize(&mon_zeta(&g), &m).unwrap();
        let rhs = mon_zeta(&g.reweight(&m).unwrap());
        if lhs != rhs {
            bad.push(format!("m = {m:?}: {lhs} vs {rhs}"));
        }
    }
    outcome(bad.is_empty(), format!("{instances} random graphs{}", failures(&bad)))
}

fn criterion_9(rng: &mut ChaCha8Rng) -> Outcome {
    let instances = 200;
    let mut bad = Vec::new();
    for _ in 0..instances {
        let r = rng.gen_range(1..=3);
        let slope: Vec<i64> = loop {
            let l: Vec<i64> = (0..r).map(|_| rng.gen_range(0..=4)).collect();
            if l.iter().any(|&x| x > 0) {
                break l;
            }
        };
        let h = Hyperplane::new(&slope, ratio(rng.gen_range(1..=30), rng.gen_range(1..=7))).unwrap();
        let k: Vec<i64> = (0..r).map(|_| rng.gen_range(-10..=10)).collect();
        if exp_image(&h.shifted(&k)) != exp_image(&h) {
            bad.push(format!("{h} shifted by {k:?}"));
        }
    }
    outcome(bad.is_empty(), format!("{instances} random hyperplanes and shifts{}", failures(&bad)))
}

fn criterion_10() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_bsideal");
    let golden = concat!(env!("CARGO_MANIFEST_DIR"), "/corpus/golden");
    let run = |format: &str| {
        Command::new(bin)
            .args(["run", "--seed-corpus", format, "--check-golden", golden])
            .output()
            .expect("binary runs")
    };
    let mut bad = Vec::new();
    for format in ["--json", "--text"] {
        let (a, b) = (run(format), run(format));
        if a.stdout != b.stdout {
            bad.push(format!("{format} output differs between runs"));
        }
        if !a.status.success() {
            bad.push(format!("{format} run exited with {:?}: {}", a.status.code(), String::from_utf8_lossy(&a.stderr)));
        }
    }
    outcome(bad.is_empty(), format!("json and text reports identical across runs, golden files match{}", failures(&bad)))
}

fn criterion_1(out: &Emitted, started: Instant) -> Outcome {
    let bad = out.0.iter().filter(|c| !verify(c)).count();
    let secs = started.elapsed().as_secs_f64();
    outcome(
        bad == 0 && secs < 60.0,
        format!("{} certificates re-verified, {bad} failed, suite took {secs:.1} s", out.0.len()),
    )
}

fn failures(bad: &[String]) -> String {
    if bad.is_empty() {
        String::new()
    } else {
        format!("; failing: {}", bad.join("; "))
    }
}

fn main() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut emitted = Emitted::default();
    let mut results: Vec<(u32, &str, Outcome)> = vec![
        (2, "classical b-functions", criterion_2(&mut emitted)),
        (3, "hyperplane predicate", criterion_3(&mut rng, &mut emitted)),
        (4, "SNC formula consistency", criterion_4(&mut rng, &mut emitted)),
        (5, "translation identity", criterion_5(&mut emitted)),
        (6, "per-axis unions", criterion_6(&mut emitted)),
        (7, "Exp against support loci", criterion_7(&mut emitted)),
        (8, "Sabbah specialization", criterion_8(&mut rng)),
        (9, "Exp translation invariance", criterion_9(&mut rng)),
        (10, "determinism", criterion_10()),
    ];
    results.insert(0, (1, "oracle soundness", criterion_1(&emitted, started)));
    let mut all = true;
    for (n, name, o) in &results {
        all &= o.pass;
        println!("criterion {n:>2} {name:<28} {}  {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    if !all {
        std::process::exit(1);
    }
}
