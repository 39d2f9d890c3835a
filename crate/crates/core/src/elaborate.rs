//! Script elaboration: resolve declarations, drive the surface operations in
//! script order, and hand back the pair, the composed map, and the charts.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;

use crate::error::MapError;
use crate::lattice::Rat;
use crate::maps::{BirationalMap, MapStep};
use crate::pairs::LogPair;
use crate::script::{ClassRef, ConstructionScript, Expectation, SourceMap, StepDecl};
use crate::surface::{CenterSpec, ClassId, CurveRecord, MarkedSurface};

/// An elaboration failure, anchored to the declaring line when known.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElabError {
    pub line: usize,
    pub message: String,
}

impl std::fmt::Display for ElabError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

/// Elaborated script: the composed map from the base-plane pair, the final
/// pair with its declared boundary, and the chart maps.
#[derive(Debug, Clone)]
pub struct Elaborated {
    /// Map from the base pair through all steps, with the declared boundary
    /// pinned on the target.
    pub map: BirationalMap,
    /// The final model with the declared boundary.
    pub pair: LogPair,
    /// Chart presentations: contraction maps from the final pair.
    pub charts: Vec<BirationalMap>,
    pub expectations: Vec<Expectation>,
    /// Declared names never used by any step or curve (candidate warnings).
    pub warnings: Vec<String>,
}

pub fn elaborate(
    script: &ConstructionScript,
    source_map: &SourceMap,
) -> Result<Elaborated, ElabError> {
    let lookup = Names::build(script, source_map)?;
    let curves = build_curves(script, &lookup)?;

    // Source pair: the base plane with the declared curves; boundary terms on
    // curves give the source boundary.
    let surface = MarkedSurface::with_curves(curves);
    let mut source_boundary: BTreeMap<ClassId, Rat> = BTreeMap::new();
    for (class, coeff) in &script.boundary {
        if let ClassRef::Curve(name) = class {
            if lookup.curve_lines.get(name).is_none() {
                return Err(ElabError {
                    line: source_map.boundary,
                    message: format!("unknown boundary curve `{}`", name),
                });
            }
            source_boundary.insert(ClassId::Curve(name.clone()), coeff.clone());
        }
    }
    let source = LogPair::new(surface, source_boundary);

    // Steps.
    let mut steps = Vec::new();
    for (k, step) in script.steps.iter().enumerate() {
        let line = source_map.steps.get(k).copied().unwrap_or(0);
        steps.push(resolve_step(step, &lookup, line)?);
    }
    let map = BirationalMap::compose(source, steps).map_err(|e| ElabError {
        line: step_line_for(&e, script, source_map),
        message: e.to_string(),
    })?;

    // Final boundary: every declared term interpreted on the resolution.
    let mut final_boundary: BTreeMap<ClassId, Rat> = BTreeMap::new();
    for (class, coeff) in &script.boundary {
        let id = resolve_class_ref(class, &map.resolution, source_map.boundary)?;
        final_boundary.insert(id, coeff.clone());
    }
    let pair = LogPair::new(map.resolution.clone(), final_boundary.clone());
    let surviving_target: BTreeMap<ClassId, Rat> = final_boundary
        .iter()
        .filter(|(id, c)| !map.resolution.contracted.contains(*id) && !c.is_zero())
        .map(|(id, c)| (id.clone(), c.clone()))
        .collect();
    let map = map.with_target_boundary(surviving_target);

    // Charts: contraction presentations from the final pair.
    let mut charts = Vec::new();
    for (k, chart) in script.charts.iter().enumerate() {
        let line = source_map.charts.get(k).copied().unwrap_or(0);
        let ids: Vec<ClassId> = chart
            .iter()
            .map(|c| resolve_class_ref(c, &map.resolution, line))
            .collect::<Result<_, _>>()?;
        let chart_map = BirationalMap::compose(pair.clone(), vec![MapStep::Contract(ids)])
            .map_err(|e| ElabError {
                line,
                message: format!("chart is invalid: {}", e),
            })?;
        charts.push(chart_map);
    }

    let warnings = lookup.unused_warnings(script);

    Ok(Elaborated {
        map,
        pair,
        charts,
        expectations: script.expectations.clone(),
        warnings,
    })
}

fn step_line_for(
    _err: &MapError,
    script: &ConstructionScript,
    source_map: &SourceMap,
) -> usize {
    // Composition applies steps in order; report the last step line as the
    // closest anchor available once composition has failed.
    source_map
        .steps
        .last()
        .copied()
        .unwrap_or_else(|| script.steps.len().max(1))
}

struct Names {
    point_lines: BTreeMap<String, usize>,
    curve_lines: BTreeMap<String, usize>,
    points: BTreeMap<String, crate::script::PointDecl>,
}

impl Names {
    fn build(script: &ConstructionScript, map: &SourceMap) -> Result<Names, ElabError> {
        let mut point_lines = BTreeMap::new();
        let mut curve_lines = BTreeMap::new();
        let mut points = BTreeMap::new();
        for (k, p) in script.points.iter().enumerate() {
            let line = map.points.get(k).copied().unwrap_or(0);
            if point_lines.insert(p.name.clone(), line).is_some() {
                return Err(ElabError {
                    line,
                    message: format!("duplicate point `{}`", p.name),
                });
            }
            points.insert(p.name.clone(), p.clone());
        }
        for (k, c) in script.curves.iter().enumerate() {
            let line = map.curves.get(k).copied().unwrap_or(0);
            if curve_lines.insert(c.name.clone(), line).is_some()
                || point_lines.contains_key(&c.name)
            {
                return Err(ElabError {
                    line,
                    message: format!("duplicate name `{}`", c.name),
                });
            }
        }
        // Cross-reference checks with declaring positions.
        for (k, p) in script.points.iter().enumerate() {
            let line = map.points.get(k).copied().unwrap_or(0);
            if let Some(over) = &p.over {
                if !point_lines.contains_key(over) {
                    return Err(ElabError {
                        line,
                        message: format!("unknown parent point `{}`", over),
                    });
                }
            }
            for c in &p.on {
                if !curve_lines.contains_key(c) {
                    return Err(ElabError {
                        line,
                        message: format!("unknown curve `{}`", c),
                    });
                }
            }
            for s in &p.proximate {
                if !point_lines.contains_key(s) {
                    return Err(ElabError {
                        line,
                        message: format!("unknown point `{}`", s),
                    });
                }
            }
        }
        for (k, c) in script.curves.iter().enumerate() {
            let line = map.curves.get(k).copied().unwrap_or(0);
            for (pt, _) in &c.mults {
                if !point_lines.contains_key(pt) {
                    return Err(ElabError {
                        line,
                        message: format!("unknown point `{}`", pt),
                    });
                }
            }
            for n in &c.nodes {
                if !point_lines.contains_key(n) {
                    return Err(ElabError {
                        line,
                        message: format!("unknown point `{}`", n),
                    });
                }
            }
        }
        Ok(Names {
            point_lines,
            curve_lines,
            points,
        })
    }

    fn center_spec(&self, name: &str, line: usize) -> Result<CenterSpec, ElabError> {
        let decl = self.points.get(name).ok_or_else(|| ElabError {
            line,
            message: format!("unknown point `{}`", name),
        })?;
        Ok(CenterSpec {
            name: decl.name.clone(),
            parent: decl.over.clone(),
            on_curves: decl.on.iter().cloned().collect(),
            satellite_of: decl.proximate.iter().cloned().collect(),
        })
    }

    fn unused_warnings(&self, script: &ConstructionScript) -> Vec<String> {
        let mut used: BTreeSet<&str> = BTreeSet::new();
        for step in &script.steps {
            match step {
                StepDecl::BlowUp(p) => {
                    used.insert(p);
                }
                StepDecl::Cremona(cs) => {
                    for c in cs {
                        used.insert(c);
                    }
                }
                StepDecl::Contract(_) => {}
            }
        }
        for c in &script.curves {
            for (p, _) in &c.mults {
                used.insert(p);
            }
            for n in &c.nodes {
                used.insert(n);
            }
        }
        for p in &script.points {
            if let Some(o) = &p.over {
                used.insert(o);
            }
            for s in &p.proximate {
                used.insert(s);
            }
        }
        self.point_lines
            .keys()
            .filter(|name| {
                !used.contains(name.as_str())
                    && !script.points.iter().any(|p| {
                        p.name == **name && !p.on.is_empty()
                    })
            })
            .map(|name| format!("point `{}` is declared but never used", name))
            .collect()
    }
}

fn build_curves(script: &ConstructionScript, names: &Names) -> Result<Vec<CurveRecord>, ElabError> {
    let mut out = Vec::new();
    for decl in &script.curves {
        let line = names.curve_lines[&decl.name];
        let mut rec = CurveRecord::new(&decl.name, decl.degree as i64);
        for n in &decl.nodes {
            rec.nodes.insert(n.clone());
        }
        // Explicit multiplicities win; nodes imply 2; `on` incidences imply 1.
        let mut explicit: BTreeMap<&str, u32> = BTreeMap::new();
        for (pt, m) in &decl.mults {
            if explicit.insert(pt, *m).is_some() {
                return Err(ElabError {
                    line,
                    message: format!("repeated multiplicity for point `{}`", pt),
                });
            }
        }
        for (pt, m) in &explicit {
            if rec.nodes.contains(*pt) && *m != 2 {
                return Err(ElabError {
                    line,
                    message: format!(
                        "point `{}` is a node of `{}`; its multiplicity must be 2",
                        pt, decl.name
                    ),
                });
            }
        }
        for (name, point) in &names.points {
            let incident = point.on.contains(&decl.name);
            let node = rec.nodes.contains(name);
            let m: u32 = if let Some(&m) = explicit.get(name.as_str()) {
                if incident && m == 0 {
                    return Err(ElabError {
                        line,
                        message: format!(
                            "point `{}` is declared on `{}` but has multiplicity 0",
                            name, decl.name
                        ),
                    });
                }
                m
            } else if node {
                2
            } else if incident {
                1
            } else {
                0
            };
            if m > 0 {
                rec.mults.insert(name.clone(), crate::lattice::Int::from(m));
            }
        }
        out.push(rec);
    }
    Ok(out)
}

fn resolve_step(step: &StepDecl, names: &Names, line: usize) -> Result<MapStep, ElabError> {
    match step {
        StepDecl::BlowUp(p) => Ok(MapStep::BlowUp(names.center_spec(p, line)?)),
        StepDecl::Contract(ids) => {
            let resolved = ids
                .iter()
                .map(|c| match c {
                    ClassRef::Curve(name) => {
                        if names.curve_lines.contains_key(name) {
                            Ok(ClassId::Curve(name.clone()))
                        } else {
                            Err(ElabError {
                                line,
                                message: format!("unknown class `{}`", name),
                            })
                        }
                    }
                    ClassRef::Exceptional(i) => Ok(ClassId::Exceptional(*i)),
                })
                .collect::<Result<Vec<_>, _>>()?;
            Ok(MapStep::Contract(resolved))
        }
        StepDecl::Cremona([a, b, c]) => Ok(MapStep::Cremona([
            names.center_spec(a, line)?,
            names.center_spec(b, line)?,
            names.center_spec(c, line)?,
        ])),
    }
}

fn resolve_class_ref(
    class: &ClassRef,
    surface: &MarkedSurface,
    line: usize,
) -> Result<ClassId, ElabError> {
    match class {
        ClassRef::Curve(name) => {
            if surface.curve(name).is_some() {
                Ok(ClassId::Curve(name.clone()))
            } else {
                Err(ElabError {
                    line,
                    message: format!("unknown class `{}`", name),
                })
            }
        }
        ClassRef::Exceptional(i) => {
            if *i < surface.blowup_count() {
                Ok(ClassId::Exceptional(*i))
            } else {
                Err(ElabError {
                    line,
                    message: format!(
                        "E{} does not exist (only {} blow-ups)",
                        i + 1,
                        surface.blowup_count()
                    ),
                })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::script::parse;
    use num_traits::One;

    fn run(text: &str) -> Result<Elaborated, ElabError> {
        let (script, map) = parse(text).expect("parses");
        elaborate(&script, &map)
    }

    #[test]
    fn triangle_script_elaborates() {
        let e = run("base P2\ncurve L1 degree 1\ncurve L2 degree 1\ncurve L3 degree 1\nboundary L1:1 + L2:1 + L3:1\n").unwrap();
        assert_eq!(e.pair.complexity(), Rat::zero());
        assert!(e.pair.is_index_one_complement());
        assert!(e.pair.validate().is_empty());
    }

    #[test]
    fn unknown_blowup_point_errors() {
        let err = run("base P2\nblowup Q\n").unwrap_err();
        assert!(err.message.contains("unknown point `Q`"));
        assert_eq!(err.line, 2);
    }

    #[test]
    fn proximity_violation_reported() {
        // Curve with mult 1 at a point carrying two proximate mult-1 points.
        let e = run(
            "base P2\npoint p on C\npoint q over p on C\npoint r over p on C\ncurve C degree 2 mult p:1\nboundary C:1\nblowup p q r\n",
        )
        .unwrap();
        // Elaborates; the violation shows up in validation.
        assert!(!e.pair.validate().is_empty());
    }

    #[test]
    fn node_implies_multiplicity_two() {
        let e = run("base P2\npoint N\ncurve C degree 3 node N\nboundary C:1\nblowup N\n").unwrap();
        let class = e.pair.surface.strict_transform_class("C").unwrap();
        assert_eq!(class, crate::lattice::DivisorClass::new(3, vec![2]));
    }

    #[test]
    fn boundary_on_exceptional_class() {
        let e = run("base P2\npoint p\nboundary E1:1\nblowup p\n").unwrap();
        assert_eq!(
            e.pair.boundary_coefficient(&ClassId::Exceptional(0)),
            Rat::one()
        );
    }

    #[test]
    fn chart_contract_presentations() {
        let e = run(
            "base P2\npoint p1\npoint p2\ncurve D12 degree 1 mult p1:1 mult p2:1\n\
             curve F0 degree 1 mult p1:1\ncurve Fi degree 1 mult p1:1\n\
             curve S0 degree 1 mult p2:1\ncurve Si degree 1 mult p2:1\n\
             boundary F0:1 + Fi:1 + S0:1 + Si:1\nblowup p1 p2\ncontract D12\nchart\n",
        )
        .unwrap();
        assert_eq!(e.charts.len(), 1);
        assert!(e.charts[0].is_crepant().unwrap());
    }
}
