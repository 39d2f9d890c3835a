//! Bundled construction fixtures with their expected invariants, the two
//! parameterized family generators, and the expectation-checking runner.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use num_traits::{One, Signed, Zero};

use crate::ade::{contracted_singularities, is_a_type_only};
use crate::elaborate::{elaborate, ElabError, Elaborated};
use crate::lattice::{intersect, Int, Rat};
use crate::maps::aggregate_cover_metrics;
use crate::report::{
    rat_string, BoundaryReport, CurveReport, ExpectationReport, MapSection, PairSection,
    ReportDocument, SurfaceSection,
};
use crate::script::{parse, Expectation, ScriptError, TedOp};
use crate::surface::ClassId;

/// A bundled construction script with a note on the construction it replays.
#[derive(Debug, Clone)]
pub struct Fixture {
    pub name: String,
    pub script: String,
    pub provenance: String,
}

/// Outcome of one expectation or universal assertion.
#[derive(Debug, Clone)]
pub struct ReplayEntry {
    pub label: String,
    pub expected: String,
    pub actual: String,
    pub pass: bool,
}

/// Per-fixture replay outcome; covers every expectation exactly once.
#[derive(Debug, Clone)]
pub struct ReplayReport {
    pub fixture: String,
    pub entries: Vec<ReplayEntry>,
    pub elapsed: Duration,
}

impl ReplayReport {
    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| e.pass)
    }
}

/// Failure to even evaluate a fixture (parse or elaboration error).
#[derive(Debug, Clone)]
pub enum ReplayError {
    Parse(Vec<ScriptError>),
    Elaborate(ElabError),
}

impl std::fmt::Display for ReplayError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ReplayError::Parse(errs) => {
                for e in errs {
                    writeln!(f, "{}", e)?;
                }
                Ok(())
            }
            ReplayError::Elaborate(e) => write!(f, "{}", e),
        }
    }
}

macro_rules! builtin {
    ($name:literal, $prov:literal) => {
        Fixture {
            name: $name.to_string(),
            script: include_str!(concat!("../fixtures/", $name, ".lcy")).to_string(),
            provenance: $prov.to_string(),
        }
    };
}

/// The bundled fixture catalog, in deterministic order.
pub fn builtin_fixtures() -> Vec<Fixture> {
    let mut out = vec![
        builtin!("triangle", "the standard toric pair on the plane"),
        builtin!("quadric", "toric quadric model with its four-cycle boundary"),
        builtin!("gdp-a1a2", "del Pezzo from a nodal cubic, 3-fold flex chain"),
        builtin!("gdp-a4", "del Pezzo from a nodal cubic, 4-fold flex chain"),
        builtin!("gdp-d5", "del Pezzo from a nodal cubic, 5-fold flex chain"),
        builtin!("gdp-e6", "del Pezzo from a nodal cubic, 6-fold flex chain"),
        builtin!("gdp-e7", "del Pezzo from a nodal cubic, 7-fold flex chain"),
        builtin!("gdp-e8", "del Pezzo from a nodal cubic, 8-fold flex chain"),
        builtin!("gdp-d6a1", "nodal cubic with two tangent lines, 5+2 chain"),
        builtin!("gdp-d8", "nodal cubic with two tangent lines, 5+3 chain"),
        builtin!("gdp-e7a1", "nodal cubic with two tangent lines, 6+2 chain"),
        builtin!("gdp-3a2", "nodal cubic with two flex tangents, 3+3 chain"),
        builtin!("gdp-a5a2", "nodal cubic with two flex tangents, 4+3 chain"),
        builtin!("gdp-e6a2", "nodal cubic with two flex tangents, 5+3 chain"),
        builtin!("gdp-d43a1", "nodal cubic with flex, tangency and node line"),
        builtin!("gdp-2a1d6", "nodal cubic with flex, tangency and node line, extended"),
        builtin!("gdp-a1a3a3", "nodal cubic with a chain of two tangency lines"),
        builtin!("gdp-d5a3", "nodal cubic with a chain of two tangency lines, extended"),
        builtin!("gdp-4a2", "nodal cubic with resolved node and two flex chains"),
        builtin!("gdp-a4a4", "conic and secant line with two tangent lines"),
        builtin!("gdp-a8", "three lines, 3+3 chains plus two interior points"),
        builtin!("gdp-a7a1", "three lines, 2+3+2 chains plus one interior point"),
        builtin!("gdp-a1a2a5", "three lines, 3+2+3 chains"),
        builtin!("gdp-a1a1a3", "three lines, 3+2 chains (the toric degree-4 case)"),
        builtin!("gdp-a1a5", "three lines, 3+2 chains plus an interior point"),
        builtin!("gdp-a7", "three lines, 3+2 chains plus two interior points"),
        builtin!("ted-conic", "Cremona from the triangle to a conic plus line"),
        builtin!("ted-cubic", "Cremona on a nodal cubic; exceptional degree three"),
        builtin!("ted-cubic-chain", "two-Cremona chain from a nodal cubic to a triangle model"),
        builtin!("ted-hirzebruch", "conic with two tangent lines; bound four"),
    ];
    for n in 4..=8 {
        out.push(gen_dn_family(n).expect("n >= 4"));
    }
    for n in 0..=3 {
        out.push(gen_chain_family(n));
    }
    out
}

/// Fixture family with a D_n singularity on a ruled model: a quadric with a
/// tangent fiber, blown up along the fiber and contracted back.
pub fn gen_dn_family(n: u32) -> Result<Fixture, String> {
    if n < 4 {
        return Err(format!("D_n needs n >= 4, got {}", n));
    }
    let mut s = String::new();
    s.push_str("# Quadric with a tangent fiber: blow up along the fiber chain and\n");
    s.push_str("# contract the (-2)-curves in it.\n");
    s.push_str("base P2\npoint p1\npoint p2\npoint x on Q,Fp\npoint x2 over x on Q,Fp\n");
    for i in 1..=(n - 2) {
        let parent = if i == 1 {
            "x2".to_string()
        } else {
            format!("z{}", i - 1)
        };
        writeln!(s, "point z{} over {} on Q", i, parent).unwrap();
    }
    s.push_str("curve D12 degree 1 mult p1:1 mult p2:1\n");
    s.push_str("curve Q degree 3 mult p1:1 mult p2:2\n");
    s.push_str("curve F degree 1 mult p1:1\n");
    s.push_str("curve Fp degree 1 mult p1:1\n");
    s.push_str("boundary Q:1 + F:1\n");
    s.push_str("blowup p1 p2\ncontract D12\n");
    let mut blowup = String::from("blowup x x2");
    for i in 1..=(n - 2) {
        write!(blowup, " z{}", i).unwrap();
    }
    s.push_str(&blowup);
    s.push('\n');
    let mut contract = String::from("contract Fp E3 E4");
    for i in 1..=(n - 3) {
        write!(contract, " E{}", 4 + i).unwrap();
    }
    s.push_str(&contract);
    s.push('\n');
    writeln!(s, "expect singularities D{}", n).unwrap();
    s.push_str("expect a-type-only false\nexpect index-one\nexpect complexity = 2\n");
    s.push_str("expect coregularity 0\nexpect dual-complex circle\n");
    Ok(Fixture {
        name: format!("dn-family-{}", n),
        script: s,
        provenance: format!("quadric with tangent fiber: D{} model, not of cluster type", n),
    })
}

/// Fixture family with cluster-type number n+1: the toric quadric blown up
/// n times along a boundary component, with its n+1 chart maps.
pub fn gen_chain_family(n: u32) -> Fixture {
    let mut s = String::new();
    s.push_str("# Quadric blown up along one boundary component; the reducible fiber\n");
    s.push_str("# is a chain with (-1)-curves at either end, and each chart keeps\n");
    s.push_str("# exactly one fiber component.\n");
    s.push_str("base P2\npoint p1\npoint p2\n");
    for i in 1..=n {
        if i == 1 {
            s.push_str("point y1 on S0,Fp\n");
        } else {
            writeln!(s, "point y{} over y{} on S0", i, i - 1).unwrap();
        }
    }
    s.push_str("curve D12 degree 1 mult p1:1 mult p2:1\n");
    s.push_str("curve F0 degree 1 mult p1:1\n");
    s.push_str("curve Fi degree 1 mult p1:1\n");
    s.push_str("curve S0 degree 1 mult p2:1\n");
    s.push_str("curve Si degree 1 mult p2:1\n");
    s.push_str("curve Fp degree 1 mult p1:1\n");
    s.push_str("boundary F0:1 + Fi:1 + S0:1 + Si:1\n");
    s.push_str("blowup p1 p2\ncontract D12\n");
    if n > 0 {
        let mut blowup = String::from("blowup");
        for i in 1..=n {
            write!(blowup, " y{}", i).unwrap();
        }
        s.push_str(&blowup);
        s.push('\n');
    }
    // Fiber components: Fp and E3..E(n+2). Chart k keeps component k.
    let comp_names: Vec<String> = std::iter::once("Fp".to_string())
        .chain((0..n).map(|i| format!("E{}", 3 + i)))
        .collect();
    for keep in 0..comp_names.len() {
        let others: Vec<&str> = comp_names
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != keep)
            .map(|(_, n)| n.as_str())
            .collect();
        if others.is_empty() {
            s.push_str("chart\n");
        } else {
            writeln!(s, "chart {}", others.join(" ")).unwrap();
        }
    }
    writeln!(s, "expect cover charts {}", n + 1).unwrap();
    writeln!(s, "expect complexity = {}", n).unwrap();
    s.push_str("expect index-one\nexpect a-type-only true\n");
    s.push_str("expect coregularity 0\nexpect dual-complex circle\n");
    Fixture {
        name: format!("chain-family-{}", n),
        script: s,
        provenance: format!("boundary chain of length {}: cluster type {}", n, n + 1),
    }
}

/// Parse and elaborate a fixture.
pub fn elaborate_fixture(fixture: &Fixture) -> Result<Elaborated, ReplayError> {
    let (script, source_map) = parse(&fixture.script).map_err(ReplayError::Parse)?;
    elaborate(&script, &source_map).map_err(ReplayError::Elaborate)
}

/// Evaluate every expectation of a fixture, plus the universal assertions.
pub fn run_fixture(fixture: &Fixture) -> Result<ReplayReport, ReplayError> {
    let start = Instant::now();
    let elab = elaborate_fixture(fixture)?;
    let mut entries = evaluate_expectations(&elab);
    entries.extend(universal_assertions(&elab));
    Ok(ReplayReport {
        fixture: fixture.name.clone(),
        entries,
        elapsed: start.elapsed(),
    })
}

pub fn evaluate_expectations(elab: &Elaborated) -> Vec<ReplayEntry> {
    let mut entries = Vec::new();
    for e in &elab.expectations {
        entries.push(evaluate_one(elab, e));
    }
    entries
}

fn entry(label: &str, expected: String, actual: String) -> ReplayEntry {
    let pass = expected == actual;
    ReplayEntry {
        label: label.to_string(),
        expected,
        actual,
        pass,
    }
}

fn evaluate_one(elab: &Elaborated, e: &Expectation) -> ReplayEntry {
    match e {
        Expectation::Singularities(expected) => {
            let actual = contracted_singularities(&elab.pair.surface);
            match actual {
                Ok(labels) => entry(
                    "singularities",
                    expected.to_string(),
                    labels.to_string(),
                ),
                Err(err) => ReplayEntry {
                    label: "singularities".into(),
                    expected: expected.to_string(),
                    actual: format!("error: {}", err),
                    pass: false,
                },
            }
        }
        Expectation::Ted { op, value } => {
            let actual = elab.map.torus_exceptional_degree();
            match actual {
                Ok(t) => {
                    let pass = match op {
                        TedOp::Eq => t == Int::from(*value),
                        TedOp::Le => t <= Int::from(*value),
                    };
                    ReplayEntry {
                        label: "ted".into(),
                        expected: match op {
                            TedOp::Eq => format!("= {}", value),
                            TedOp::Le => format!("<= {}", value),
                        },
                        actual: t.to_string(),
                        pass,
                    }
                }
                Err(err) => ReplayEntry {
                    label: "ted".into(),
                    expected: format!("{:?} {}", op, value),
                    actual: format!("error: {}", err),
                    pass: false,
                },
            }
        }
        Expectation::Complexity(expected) => entry(
            "complexity",
            rat_string(expected),
            rat_string(&elab.pair.complexity()),
        ),
        Expectation::Crepant => match elab.map.is_crepant() {
            Ok(v) => entry("crepant", "true".into(), v.to_string()),
            Err(err) => ReplayEntry {
                label: "crepant".into(),
                expected: "true".into(),
                actual: format!("error: {}", err),
                pass: false,
            },
        },
        Expectation::IndexOne => entry(
            "index-one",
            "true".into(),
            elab.pair.is_index_one_complement().to_string(),
        ),
        Expectation::Coregularity(expected) => match elab.pair.coregularity() {
            Ok(c) => entry("coregularity", expected.to_string(), c.to_string()),
            Err(err) => ReplayEntry {
                label: "coregularity".into(),
                expected: expected.to_string(),
                actual: format!("error: {}", err),
                pass: false,
            },
        },
        Expectation::DualComplex(expected) => match elab.pair.dual_complex_type() {
            Ok(d) => entry("dual-complex", expected.to_string(), d.to_string()),
            Err(err) => ReplayEntry {
                label: "dual-complex".into(),
                expected: expected.to_string(),
                actual: format!("error: {}", err),
                pass: false,
            },
        },
        Expectation::ATypeOnly(expected) => match is_a_type_only(&elab.pair.surface) {
            Ok(v) => entry("a-type-only", expected.to_string(), v.to_string()),
            Err(err) => ReplayEntry {
                label: "a-type-only".into(),
                expected: expected.to_string(),
                actual: format!("error: {}", err),
                pass: false,
            },
        },
        Expectation::CoverCharts(expected) => {
            match aggregate_cover_metrics(&elab.charts, &elab.pair) {
                Ok(metrics) => {
                    let actual = metrics
                        .min_cover
                        .map(|n| n.to_string())
                        .unwrap_or_else(|| "uncovered".into());
                    ReplayEntry {
                        label: "cover charts".into(),
                        expected: expected.to_string(),
                        actual: actual.clone(),
                        pass: actual == expected.to_string(),
                    }
                }
                Err(err) => ReplayEntry {
                    label: "cover charts".into(),
                    expected: expected.to_string(),
                    actual: format!("error: {}", err),
                    pass: false,
                },
            }
        }
    }
}

/// The assertions every fixture must satisfy regardless of its expectations.
fn universal_assertions(elab: &Elaborated) -> Vec<ReplayEntry> {
    let mut out = Vec::new();
    // Configuration validity.
    let violations = elab.pair.validate();
    out.push(ReplayEntry {
        label: "assert: configuration valid".into(),
        expected: "no violations".into(),
        actual: if violations.is_empty() {
            "no violations".into()
        } else {
            violations
                .iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join("; ")
        },
        pass: violations.is_empty(),
    });

    // Index-one lc pairs have nonnegative complexity.
    if elab.pair.is_index_one_complement() {
        if let Ok(pc) = elab.pair.classify() {
            if pc.lc {
                let c = elab.pair.complexity();
                out.push(ReplayEntry {
                    label: "assert: complexity >= 0".into(),
                    expected: ">= 0".into(),
                    actual: rat_string(&c),
                    pass: !c.is_negative(),
                });
            }
        }
    }

    let expects_crepant = elab
        .expectations
        .iter()
        .any(|e| matches!(e, Expectation::Crepant));
    if expects_crepant {
        // Every exceptional divisor is a log canonical or canonical place of
        // the source pair, or a source boundary member.
        if let Ok(vector) = elab.map.source_pullback_vector() {
            let mut bad = Vec::new();
            for id in elab.map.exceptional_divisor_classes() {
                if !elab.map.source.boundary_coefficient(&id).is_zero() {
                    continue;
                }
                let a = Rat::one() - vector.get(&id).cloned().unwrap_or_else(Rat::zero);
                if !a.is_zero() && a != Rat::one() {
                    bad.push(format!("{} (a = {})", id, rat_string(&a)));
                }
            }
            out.push(ReplayEntry {
                label: "assert: exceptional divisors are lc or canonical places".into(),
                expected: "all".into(),
                actual: if bad.is_empty() {
                    "all".into()
                } else {
                    bad.join("; ")
                },
                pass: bad.is_empty(),
            });
        }
    }

    // Canonical-model fixtures: the boundary avoids the contracted ADE
    // configurations (it is contained in the smooth locus of the target).
    if let Ok(table) = elab.pair.discrepancy_table() {
        let all_canonical = elab
            .pair
            .surface
            .contracted
            .iter()
            .all(|id| table.log_discrepancy(id).map(|a| a >= Rat::one()).unwrap_or(false));
        if all_canonical && !elab.pair.surface.contracted.is_empty() {
            let surface = &elab.pair.surface;
            let mut bad = Vec::new();
            let minus_two = |id: &ClassId| {
                let c = surface.class_of(id).expect("resolves");
                intersect(&c, &c).expect("same ambient") == Int::from(-2)
            };
            for id in surface.contracted.iter().filter(|id| minus_two(id)) {
                let class = surface.class_of(id).expect("resolves");
                for (bid, _) in elab.pair.surviving_boundary() {
                    let bclass = surface.class_of(&bid).expect("resolves");
                    let p = intersect(&bclass, &class).expect("same ambient");
                    if !p.is_zero() {
                        bad.push(format!("{} meets {}", bid, id));
                    }
                }
            }
            out.push(ReplayEntry {
                label: "assert: boundary avoids contracted singular points".into(),
                expected: "avoids".into(),
                actual: if bad.is_empty() {
                    "avoids".into()
                } else {
                    bad.join("; ")
                },
                pass: bad.is_empty(),
            });
        }
    }

    // Coregularity-zero pairs: a contracted curve not in the boundary meets
    // the boundary in at most one point.
    if elab.pair.coregularity() == Ok(0) {
        let surface = &elab.pair.surface;
        let mut bad = Vec::new();
        for id in &surface.contracted {
            let name = match id {
                ClassId::Curve(n) => n.clone(),
                ClassId::Exceptional(_) => continue,
            };
            if !elab
                .pair
                .boundary_coefficient(&ClassId::Curve(name.clone()))
                .is_zero()
            {
                continue;
            }
            let class = surface.class_of(id).expect("resolves");
            let mut total = Int::zero();
            for (bid, _) in elab.pair.surviving_boundary() {
                let bclass = surface.class_of(&bid).expect("resolves");
                total += intersect(&bclass, &class).expect("same ambient");
            }
            if total > Int::one() {
                bad.push(format!("{} meets the boundary {} times", name, total));
            }
        }
        out.push(ReplayEntry {
            label: "assert: contracted curves meet the boundary at most once".into(),
            expected: "at most once".into(),
            actual: if bad.is_empty() {
                "at most once".into()
            } else {
                bad.join("; ")
            },
            pass: bad.is_empty(),
        });
    }
    out
}

/// Build the machine-readable report for an elaborated script.
pub fn document(name: &str, elab: &Elaborated, entries: &[ReplayEntry]) -> ReportDocument {
    let surface = &elab.pair.surface;
    let k = surface.canonical();
    let curves = surface
        .curves
        .iter()
        .map(|rec| {
            let class = surface.curve_class(rec);
            CurveReport {
                name: rec.name.clone(),
                class: class.to_string(),
                self_intersection: intersect(&class, &class).expect("same ambient").to_string(),
                k_intersection: intersect(&class, &k).expect("same ambient").to_string(),
            }
        })
        .collect();
    let boundary = elab
        .pair
        .surviving_boundary()
        .into_iter()
        .map(|(id, c)| BoundaryReport {
            class: id.to_string(),
            coefficient: rat_string(&c),
        })
        .collect();
    let singularities = contracted_singularities(surface)
        .map(|l| l.to_string())
        .unwrap_or_else(|e| format!("error: {}", e));
    let mut maps = Vec::new();
    {
        let ted = elab
            .map
            .torus_exceptional_degree()
            .map(|t| t.to_string())
            .unwrap_or_else(|e| format!("error: {}", e));
        let crepant = elab.map.is_crepant().unwrap_or(false);
        maps.push(MapSection {
            name: "main".into(),
            ted,
            crepant,
            exceptional: elab
                .map
                .exceptional_divisor_classes()
                .iter()
                .map(|c| c.to_string())
                .collect(),
        });
    }
    for (i, chart) in elab.charts.iter().enumerate() {
        maps.push(MapSection {
            name: format!("chart-{}", i),
            ted: "0".into(),
            crepant: chart.is_crepant().unwrap_or(false),
            exceptional: chart
                .own_contracted()
                .iter()
                .map(|c| c.to_string())
                .collect(),
        });
    }
    ReportDocument {
        name: name.to_string(),
        surface: SurfaceSection {
            blowups: surface.blowup_count(),
            rank: surface.rank(),
            curves,
            contracted: surface.contracted.iter().map(|c| c.to_string()).collect(),
        },
        pair: PairSection {
            boundary,
            index_one: elab.pair.is_index_one_complement(),
            complexity: rat_string(&elab.pair.complexity()),
            coregularity: elab.pair.coregularity().ok(),
            dual_complex: elab.pair.dual_complex_type().ok().map(|d| d.to_string()),
        },
        singularities,
        maps,
        expectations: entries
            .iter()
            .map(|e| ExpectationReport {
                expectation: e.label.clone(),
                expected: e.expected.clone(),
                actual: e.actual.clone(),
                pass: e.pass,
            })
            .collect(),
        warnings: elab.warnings.clone(),
        root_search: None,
    }
}
