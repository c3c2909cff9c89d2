//! Batch driver behind the `bsideal` binary.
//!
//! A problem file holds one [`ProblemSpec`] or a JSON array of them. Each
//! entry runs the requested tasks and produces an [`EntryReport`]; reports
//! are sorted by id and contain no timing or other run-dependent data, so
//! repeated runs are byte-identical.
//!
//! ```json
//! {
//!   "id": "x-a1",
//!   "variables": ["x"],
//!   "F": ["x"],
//!   "a": [1],
//!   "bounds": {"max_operator_order": 1, "max_x_degree": 0, "max_s_degree": 0, "max_b_degree": 1},
//!   "resolution_graph": {"r": 1, "components": [{"L": [1], "chi": 1}]},
//!   "tasks": ["bs-find", "bs-verify", "decompose", "snc", "zeta", "exp-compare"]
//! }
//! ```
//!
//! Optional fields: `certificate` (`{"b": …, "P": …}`, checked by
//! `bs-verify`), `slope_bound`, and `sabbah_m` (weights for the zeta check,
//! all ones by default). A missing `tasks` means all of them.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    check_theorem_a, check_translation_union, common_hyperplanes, extract_hyperplanes, Decomposition, Hyperplane,
    HyperplaneJson, StructureReport, DEFAULT_SLOPE_BOUND,
};
use crate::snc::{
    mon_zeta, monomial_exponents, pullback_slope_check, check_weights, sabbah_specialize, slope_set,
    snc_b_element, snc_certificate_for, support_k, support_loci, GraphJson, MonZeta, ResolutionGraph, SlopeSet,
    ZetaFactorJson,
};
use crate::solver::{default_strategies, find_bs_pair, sample_ideal, verify, BsCertificate, CertificateJson, SolveBounds};
use crate::torus::{exp_image, normalize_union, union_equal, CosetJson, TorusCoset};
use crate::weyl::{ParamPoly, PolyFamily, WeylOperator};

/// Bundled example problems, `(file name, contents)`.
pub const CORPUS: &[(&str, &str)] = &[
    ("x-a1.json", include_str!("../corpus/x-a1.json")),
    ("x-a2.json", include_str!("../corpus/x-a2.json")),
    ("xy-a11.json", include_str!("../corpus/xy-a11.json")),
    ("x2y2-a1.json", include_str!("../corpus/x2y2-a1.json")),
    ("xxy-a10.json", include_str!("../corpus/xxy-a10.json")),
    ("xxy-a01.json", include_str!("../corpus/xxy-a01.json")),
    ("xxy-a11.json", include_str!("../corpus/xxy-a11.json")),
    ("x2y3-a1.json", include_str!("../corpus/x2y3-a1.json")),
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    BsFind,
    BsVerify,
    Decompose,
    Snc,
    Zeta,
    ExpCompare,
}

impl Task {
    pub const ALL: [Task; 6] = [
        Task::BsFind,
        Task::BsVerify,
        Task::Decompose,
        Task::Snc,
        Task::Zeta,
        Task::ExpCompare,
    ];
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GivenCertificate {
    pub b: String,
    #[serde(rename = "P")]
    pub p: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub id: String,
    pub variables: Vec<String>,
    #[serde(rename = "F")]
    pub f: Vec<String>,
    pub a: Vec<u32>,
    #[serde(default = "default_bounds")]
    pub bounds: SolveBounds,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolution_graph: Option<GraphJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tasks: Option<BTreeSet<Task>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<GivenCertificate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slope_bound: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sabbah_m: Option<Vec<u32>>,
}

fn default_bounds() -> SolveBounds {
    SolveBounds::constant_coefficients(4)
}

#[derive(Deserialize)]
#[serde(untagged)]
enum SpecFile {
    Many(Vec<ProblemSpec>),
    One(Box<ProblemSpec>),
}

/// Parse a problem file: one spec or an array of specs.
pub fn parse_specs(text: &str) -> Result<Vec<ProblemSpec>> {
    // Try the two shapes separately so the error names the real problem.
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let parsed = if value.is_array() {
        serde_json::from_value::<Vec<ProblemSpec>>(value).map(SpecFile::Many)
    } else {
        serde_json::from_value::<ProblemSpec>(value).map(|s| SpecFile::One(Box::new(s)))
    };
    match parsed.map_err(|e| Error::Parse(e.to_string()))? {
        SpecFile::Many(v) => Ok(v),
        SpecFile::One(s) => Ok(vec![*s]),
    }
}

/// Every bundled corpus entry.
pub fn corpus_specs() -> Vec<ProblemSpec> {
    CORPUS
        .iter()
        .flat_map(|(name, text)| parse_specs(text).unwrap_or_else(|e| panic!("bundled {name}: {e}")))
        .collect()
}

/// A spec after validation.
struct Problem {
    spec: ProblemSpec,
    family: Arc<PolyFamily>,
    graph: Option<ResolutionGraph>,
    tasks: BTreeSet<Task>,
    given: Option<BsCertificate>,
    slope_bound: u32,
    sabbah_m: Vec<u32>,
}

fn validate(spec: &ProblemSpec, slope_override: Option<u32>) -> Result<Problem> {
    let family = PolyFamily::parse(&spec.variables, &spec.f)?;
    let r = family.r();
    if spec.a.len() != r {
        return Err(Error::Parse(format!("a has length {} but F has {r} entries", spec.a.len())));
    }
    let graph = spec.resolution_graph.as_ref().map(ResolutionGraph::from_json).transpose()?;
    if let Some(g) = &graph {
        if g.r() != r {
            return Err(Error::Parse(format!("resolution_graph has r = {} but F has {r} entries", g.r())));
        }
    }
    let tasks = spec.tasks.clone().unwrap_or_else(|| Task::ALL.into_iter().collect());
    for t in [Task::Snc, Task::Zeta] {
        if tasks.contains(&t) && graph.is_none() && !(t == Task::Snc && monomial_exponents(&family).is_some()) {
            return Err(Error::Parse(format!("task {} needs a resolution_graph", task_name(t))));
        }
    }
    if tasks.contains(&Task::BsVerify) && !tasks.contains(&Task::BsFind) && spec.certificate.is_none() {
        return Err(Error::Parse("bs-verify needs bs-find or a certificate".into()));
    }
    let given = spec
        .certificate
        .as_ref()
        .map(|c| -> Result<BsCertificate> {
            Ok(BsCertificate {
                family: family.clone(),
                a: spec.a.clone(),
                b: ParamPoly::parse(&c.b, r)?,
                op: WeylOperator::parse(&c.p, &spec.variables, r)?,
            })
        })
        .transpose()?;
    let sabbah_m = spec.sabbah_m.clone().unwrap_or_else(|| vec![1; r]);
    check_weights(&sabbah_m, r).map_err(|e| Error::Parse(e.to_string()))?;
    Ok(Problem {
        spec: spec.clone(),
        family,
        graph,
        tasks,
        given,
        slope_bound: slope_override.or(spec.slope_bound).unwrap_or(DEFAULT_SLOPE_BOUND),
        sabbah_m,
    })
}

fn task_name(t: Task) -> &'static str {
    match t {
        Task::BsFind => "bs-find",
        Task::BsVerify => "bs-verify",
        Task::Decompose => "decompose",
        Task::Snc => "snc",
        Task::Zeta => "zeta",
        Task::ExpCompare => "exp-compare",
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorJson {
    #[serde(flatten)]
    pub hyperplane: HyperplaneJson,
    pub multiplicity: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampledElement {
    pub certificate: CertificateJson,
    pub verified: bool,
    pub factors: Vec<FactorJson>,
    pub structure: StructureReport,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecomposeReport {
    pub sampled: Vec<SampledElement>,
    /// Linear factors common to every sampled element.
    pub hyperplanes: Vec<FactorJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub translation_union: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SncReport {
    #[serde(rename = "K")]
    pub k: Vec<usize>,
    pub slopes: Vec<Vec<u32>>,
    pub b_element: String,
    pub extracted: Vec<FactorJson>,
    pub slopes_match: bool,
    pub structure: StructureReport,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CertificateJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate_verified: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pullback_slopes: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZetaReport {
    pub zeta: Vec<ZetaFactorJson>,
    pub m: Vec<u32>,
    pub specialized: Vec<ZetaFactorJson>,
    pub reweighted: Vec<ZetaFactorJson>,
    pub sabbah: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxisReport {
    /// 1-based index.
    pub i: usize,
    pub a: Vec<u32>,
    pub exp: Vec<CosetJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub support_locus: Option<Vec<CosetJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matches_support_locus: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpReport {
    pub combined: Vec<CosetJson>,
    pub per_axis: Vec<AxisReport>,
    pub eq_iii: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub support_locus: Option<Vec<CosetJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matches_support_locus: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eq_i: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntryReport {
    pub id: String,
    pub variables: Vec<String>,
    #[serde(rename = "F")]
    pub f: Vec<String>,
    pub a: Vec<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CertificateJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decompose: Option<DecomposeReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snc: Option<SncReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zeta: Option<ZetaReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exp: Option<ExpReport>,
    pub checks: Vec<Check>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub entries: Vec<EntryReport>,
    pub pass: bool,
}

/// Process exit codes.
pub mod exit {
    pub const PASS: i32 = 0;
    pub const CHECK_FAILED: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const BOUNDS: i32 = 3;
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        let errors: Vec<&str> = self.entries.iter().filter_map(|e| e.error.as_deref()).collect();
        if errors.iter().any(|e| e.starts_with("parse-error")) {
            exit::USAGE
        } else if errors.iter().any(|e| e.starts_with("no-solution") || e.starts_with("solver cap")) {
            exit::BOUNDS
        } else if !errors.is_empty() || !self.pass {
            exit::CHECK_FAILED
        } else {
            exit::PASS
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize") + "\n"
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            out.push_str(&entry_text(e));
            out.push('\n');
        }
        let failed = self.entries.iter().filter(|e| !e.pass).count();
        let _ = writeln!(
            out,
            "{} entries, {} passed, {} failed",
            self.entries.len(),
            self.entries.len() - failed,
            failed
        );
        out
    }
}

/// Pretty JSON of one entry, as stored in golden files.
pub fn entry_json(e: &EntryReport) -> String {
    serde_json::to_string_pretty(e).expect("reports serialize") + "\n"
}

fn entry_text(e: &EntryReport) -> String {
    let mut out = String::new();
    let a: Vec<String> = e.a.iter().map(u32::to_string).collect();
    let _ = writeln!(out, "== {}: F = ({}), a = ({})", e.id, e.f.join(", "), a.join(", "));
    let facs = |fs: &[FactorJson]| -> String {
        if fs.is_empty() {
            return "none".into();
        }
        fs.iter()
            .map(|f| {
                let h = Hyperplane::from_json(&f.hyperplane).expect("own output");
                if f.multiplicity == 1 {
                    format!("{{{h}}}")
                } else {
                    format!("{{{h}}}^{}", f.multiplicity)
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    };
    let cosets = |r: usize, cs: &[CosetJson]| -> String {
        let v: Vec<String> = cs
            .iter()
            .map(|c| TorusCoset::from_json(r, c).expect("own output").to_string())
            .collect();
        if v.is_empty() {
            "none".into()
        } else {
            v.join(" ∪ ")
        }
    };
    let r = e.a.len();
    if let Some(c) = &e.certificate {
        let _ = writeln!(out, "  b = {}", c.b);
        let _ = writeln!(out, "  P = {}", c.p);
    }
    if let Some(d) = &e.decompose {
        for s in &d.sampled {
            let _ = writeln!(out, "  sampled b = {}  [{}]", s.certificate.b, facs(&s.factors));
        }
        let _ = writeln!(out, "  hyperplanes: {}", facs(&d.hyperplanes));
    }
    if let Some(s) = &e.snc {
        let k: Vec<String> = s.k.iter().map(usize::to_string).collect();
        let slopes: Vec<String> = s.slopes.iter().map(|l| format!("{l:?}")).collect();
        let _ = writeln!(out, "  snc K = {{{}}}, slopes = {{{}}}", k.join(", "), slopes.join(", "));
        let _ = writeln!(out, "  snc b = {}", s.b_element);
    }
    if let Some(z) = &e.zeta {
        let zeta = MonZeta::from_factors(r, z.zeta.iter().map(|f| (f.v.clone(), f.e)));
        let spec = MonZeta::from_factors(1, z.specialized.iter().map(|f| (f.v.clone(), f.e)));
        let _ = writeln!(out, "  zeta = {zeta}");
        let _ = writeln!(out, "  zeta at t^{:?} = {spec}", z.m);
    }
    if let Some(x) = &e.exp {
        let _ = writeln!(out, "  Exp = {}", cosets(r, &x.combined));
        for ax in &x.per_axis {
            let _ = writeln!(out, "  Exp (axis {}) = {}", ax.i, cosets(r, &ax.exp));
        }
        if let Some(s) = &x.support_locus {
            let _ = writeln!(out, "  support locus = {}", cosets(r, s));
        }
    }
    if let Some(err) = &e.error {
        let _ = writeln!(out, "  error: {err}");
    }
    for c in &e.checks {
        let _ = writeln!(out, "  {:<32} {}", c.name, if c.pass { "PASS" } else { "FAIL" });
    }
    out
}

fn factors_json(factors: &[(Hyperplane, u32)]) -> Vec<FactorJson> {
    factors
        .iter()
        .map(|(h, m)| FactorJson {
            hyperplane: h.to_json(),
            multiplicity: *m,
        })
        .collect()
}

fn cosets_json(cs: &[TorusCoset]) -> Vec<CosetJson> {
    cs.iter().map(TorusCoset::to_json).collect()
}

fn exp_of(hyps: &[(Hyperplane, u32)]) -> Vec<TorusCoset> {
    normalize_union(&hyps.iter().map(|(h, _)| exp_image(h)).collect::<Vec<_>>())
}

/// Sampled certificates and their common linear factors.
struct Sample {
    certs: Vec<BsCertificate>,
    decomps: Vec<Decomposition>,
    common: Vec<(Hyperplane, u32)>,
}

fn run_sample(p: &Problem, a: &[u32]) -> Result<Sample> {
    let certs = sample_ideal(&p.family, a, &p.spec.bounds, &default_strategies(p.family.n()))?;
    let decomps = certs
        .iter()
        .map(|c| extract_hyperplanes(&c.b, p.slope_bound))
        .collect::<Result<Vec<_>>>()?;
    let common = common_hyperplanes(&decomps);
    Ok(Sample { certs, decomps, common })
}

struct Runner<'a> {
    p: &'a Problem,
    samples: BTreeMap<Vec<u32>, Sample>,
    checks: Vec<Check>,
}

impl Runner<'_> {
    fn check(&mut self, name: &str, pass: bool) {
        self.checks.push(Check {
            name: name.to_string(),
            pass,
        });
    }

    fn sample(&mut self, a: &[u32]) -> Result<&Sample> {
        if !self.samples.contains_key(a) {
            let s = run_sample(self.p, a)?;
            self.samples.insert(a.to_vec(), s);
        }
        Ok(&self.samples[a])
    }

    /// Indices `i` (0-based) with `a_i != 0` and `f_i` nonconstant.
    fn axes(&self) -> Vec<usize> {
        let a = &self.p.spec.a;
        (0..a.len())
            .filter(|&i| a[i] != 0 && !self.p.family.polys()[i].is_constant())
            .collect()
    }

    fn axis_a(&self, i: usize) -> Vec<u32> {
        let mut v = vec![0; self.p.spec.a.len()];
        v[i] = self.p.spec.a[i];
        v
    }

    fn run(&mut self, report: &mut EntryReport) -> Result<()> {
        let p = self.p;
        let a = p.spec.a.clone();
        let tasks = &p.tasks;

        if tasks.contains(&Task::BsFind) {
            let cert = find_bs_pair(&p.family, &a, &p.spec.bounds)?;
            report.certificate = Some(cert.to_json());
            if tasks.contains(&Task::BsVerify) {
                self.check("certificate-verifies", verify(&cert));
            }
        }
        if let (true, Some(given)) = (tasks.contains(&Task::BsVerify), &p.given) {
            self.check("given-certificate-verifies", verify(given));
        }

        if tasks.contains(&Task::Decompose) {
            let a_vec = a.clone();
            let s = self.sample(&a_vec)?;
            let mut sampled = Vec::new();
            let mut all_verified = true;
            let mut all_structure = true;
            for (c, d) in s.certs.iter().zip(&s.decomps) {
                let verified = verify(c);
                let structure = check_theorem_a(&d.hyperplanes(), &a).with_leftover(&d.remainder);
                all_verified &= verified;
                all_structure &= structure.all_pass();
                sampled.push(SampledElement {
                    certificate: c.to_json(),
                    verified,
                    factors: factors_json(&d.factors),
                    structure,
                });
            }
            let hyperplanes = factors_json(&s.common);
            let common: Vec<Hyperplane> = s.common.iter().map(|(h, _)| h.clone()).collect();
            self.check("sampled-certificates-verify", all_verified);
            self.check("hyperplane-structure", all_structure);
            let nonzero: Vec<usize> = (0..a.len()).filter(|&i| a[i] != 0).collect();
            let translation_union = match nonzero[..] {
                [i] if a[i] > 1 => {
                    let mut unit = vec![0; a.len()];
                    unit[i] = 1;
                    let base: Vec<Hyperplane> = self.sample(&unit)?.common.iter().map(|(h, _)| h.clone()).collect();
                    let ok = check_translation_union(&common, &base, i, a[i]);
                    self.check("translation-union", ok);
                    Some(ok)
                }
                _ => None,
            };
            report.decompose = Some(DecomposeReport {
                sampled,
                hyperplanes,
                translation_union,
            });
        }

        if tasks.contains(&Task::Snc) {
            let graph = match &p.graph {
                Some(g) => g.clone(),
                None => ResolutionGraph::from_monomial_exponents(
                    &monomial_exponents(&p.family).expect("validated"),
                )?,
            };
            let k = support_k(&graph, &a)?;
            let slopes = slope_set(&graph, &a)?;
            let b = snc_b_element(&graph, &a)?;
            let d = extract_hyperplanes(&b, p.slope_bound)?;
            let extracted = SlopeSet::new(
                d.factors
                    .iter()
                    .map(|(h, _)| h.slope().iter().map(|&l| l.max(0) as u32).collect()),
            );
            let slopes_match = extracted == slopes && d.remainder.is_constant();
            let structure = check_theorem_a(&d.hyperplanes(), &a).with_leftover(&d.remainder);
            self.check("snc-slopes-match", slopes_match);
            self.check("snc-hyperplane-structure", structure.all_pass());
            let (certificate, certificate_verified) = match monomial_exponents(&p.family) {
                Some(_) => {
                    let c = snc_certificate_for(&p.family, &a)?;
                    let ok = verify(&c);
                    self.check("snc-certificate-verifies", ok);
                    (Some(c.to_json()), Some(ok))
                }
                None => (None, None),
            };
            let pullback_slopes = if tasks.contains(&Task::Decompose) {
                let s = self.sample(&a)?;
                let slopes_f = SlopeSet::new(
                    s.common
                        .iter()
                        .map(|(h, _)| h.slope().iter().map(|&l| l.max(0) as u32).collect()),
                );
                let ok = pullback_slope_check(&slopes_f, &graph, &a);
                self.check("pullback-slopes", ok);
                Some(ok)
            } else {
                None
            };
            report.snc = Some(SncReport {
                k: k.into_iter().map(|k| k + 1).collect(),
                slopes: slopes.iter().cloned().collect(),
                b_element: b.to_text(),
                extracted: factors_json(&d.factors),
                slopes_match,
                structure,
                certificate,
                certificate_verified,
                pullback_slopes,
            });
        }

        if tasks.contains(&Task::Zeta) {
            let graph = p.graph.as_ref().expect("validated");
            let zeta = mon_zeta(graph);
            let specialized = sabbah_specialize(&zeta, &p.sabbah_m)?;
            let reweighted = mon_zeta(&graph.reweight(&p.sabbah_m)?);
            let sabbah = specialized == reweighted;
            self.check("sabbah-specialization", sabbah);
            report.zeta = Some(ZetaReport {
                zeta: zeta.to_json(),
                m: p.sabbah_m.clone(),
                specialized: specialized.to_json(),
                reweighted: reweighted.to_json(),
                sabbah,
            });
        }

        if tasks.contains(&Task::ExpCompare) {
            let combined = exp_of(&self.sample(&a)?.common);
            let mut per_axis = Vec::new();
            let mut per_i: BTreeMap<usize, Vec<TorusCoset>> = BTreeMap::new();
            for i in self.axes() {
                let ai = self.axis_a(i);
                let exp = exp_of(&self.sample(&ai)?.common);
                let (support_locus, matches) = match &p.graph {
                    Some(g) => {
                        let s = support_loci(g, &ai)?;
                        let ok = union_equal(&exp, &s)?;
                        self.check(&format!("exp-equals-support-locus-{}", i + 1), ok);
                        (Some(cosets_json(&s)), Some(ok))
                    }
                    None => (None, None),
                };
                per_i.insert(i, exp.clone());
                per_axis.push(AxisReport {
                    i: i + 1,
                    a: ai,
                    exp: cosets_json(&exp),
                    support_locus,
                    matches_support_locus: matches,
                });
            }
            let eq_iii = crate::torus::check_eq_iii(&per_i, &combined, &a)?;
            self.check("eq-iii", eq_iii);
            let (support_locus, matches, eq_i) = match &p.graph {
                Some(g) => {
                    let s = support_loci(g, &a)?;
                    let ok = union_equal(&combined, &s)?;
                    self.check("exp-equals-support-locus", ok);
                    let mut parts = Vec::new();
                    for i in (0..a.len()).filter(|&i| a[i] != 0) {
                        parts.extend(support_loci(g, &self.axis_a(i))?);
                    }
                    let eq_i = union_equal(&s, &parts)?;
                    self.check("support-loci-eq-i", eq_i);
                    (Some(cosets_json(&s)), Some(ok), Some(eq_i))
                }
                None => (None, None, None),
            };
            report.exp = Some(ExpReport {
                combined: cosets_json(&combined),
                per_axis,
                eq_iii,
                support_locus,
                matches_support_locus: matches,
                eq_i,
            });
        }
        Ok(())
    }
}

fn run_problem(p: &Problem) -> EntryReport {
    let mut report = EntryReport {
        id: p.spec.id.clone(),
        variables: p.spec.variables.clone(),
        f: p.family.polys().iter().map(|f| f.to_text(&p.spec.variables)).collect(),
        a: p.spec.a.clone(),
        certificate: None,
        decompose: None,
        snc: None,
        zeta: None,
        exp: None,
        checks: Vec::new(),
        error: None,
        pass: false,
    };
    let mut runner = Runner {
        p,
        samples: BTreeMap::new(),
        checks: Vec::new(),
    };
    let outcome = runner.run(&mut report);
    report.checks = runner.checks;
    if let Err(e) = outcome {
        report.error = Some(e.to_string());
    }
    report.pass = report.error.is_none() && report.checks.iter().all(|c| c.pass);
    report
}

/// Run every spec. A spec that fails validation yields an entry carrying
/// the parse error.
pub fn run(specs: &[ProblemSpec], slope_override: Option<u32>) -> Report {
    let mut entries: Vec<EntryReport> = specs
        .iter()
        .map(|spec| match validate(spec, slope_override) {
            Ok(p) => run_problem(&p),
            Err(e) => EntryReport {
                id: spec.id.clone(),
                variables: spec.variables.clone(),
                f: spec.f.clone(),
                a: spec.a.clone(),
                certificate: None,
                decompose: None,
                snc: None,
                zeta: None,
                exp: None,
                checks: Vec::new(),
                error: Some(match e {
                    Error::Parse(_) => e.to_string(),
                    other => Error::Parse(other.to_string()).to_string(),
                }),
                pass: false,
            },
        })
        .collect();
    entries.sort_by(|x, y| x.id.cmp(&y.id));
    let pass = entries.iter().all(|e| e.pass);
    Report { entries, pass }
}

/// Differences between the report and `<dir>/<id>.json`, one message per
/// mismatching or missing entry.
pub fn check_golden(report: &Report, dir: &std::path::Path) -> Vec<String> {
    let mut problems = Vec::new();
    for e in &report.entries {
        let path = dir.join(format!("{}.json", e.id));
        match std::fs::read_to_string(&path) {
            Ok(expected) if expected == entry_json(e) => {}
            Ok(_) => problems.push(format!("{}: report differs from {}", e.id, path.display())),
            Err(err) => problems.push(format!("{}: cannot read {}: {err}", e.id, path.display())),
        }
    }
    problems
}

/// Write `<dir>/<id>.json` for every entry.
pub fn write_golden(report: &Report, dir: &std::path::Path) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    for e in &report.entries {
        std::fs::write(dir.join(format!("{}.json", e.id)), entry_json(e))?;
    }
    Ok(())
}
