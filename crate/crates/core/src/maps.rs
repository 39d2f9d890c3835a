//! Birational maps as step sequences between log pairs, with tracked
//! exceptional sets, crepancy testing, torus exceptional degree, and cover
//! aggregates.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::error::MapError;
use crate::lattice::{Int, Rat};
use crate::pairs::LogPair;
use crate::surface::{CenterSpec, ClassId, CurveRecord, MarkedSurface};

/// One step of a map. `Cremona` is sugar for three blow-ups at proper centers
/// followed by the contraction of the three lines between center pairs.
#[derive(Debug, Clone)]
pub enum MapStep {
    BlowUp(CenterSpec),
    Contract(Vec<ClassId>),
    Cremona([CenterSpec; 3]),
}

/// A composed birational map. The source pair is the model the steps started
/// from; the resolution is the common model through which all steps factor;
/// the target pair is the final model with its boundary.
#[derive(Debug, Clone)]
pub struct BirationalMap {
    pub source: LogPair,
    pub resolution: MarkedSurface,
    pub steps: Vec<MapStep>,
    pub target_boundary: BTreeMap<ClassId, Rat>,
}

/// Per-map torus exceptional degrees of a chart family plus the divisorial
/// cover verdict. All values are upper bounds derived from the supplied maps.
#[derive(Debug, Clone)]
pub struct CoverMetrics {
    pub per_map_ted: Vec<Int>,
    pub sum: Int,
    pub max: Int,
    pub covered: bool,
    /// Size of the smallest covering subfamily, if any subfamily covers.
    pub min_cover: Option<usize>,
}

impl BirationalMap {
    /// Compose a map from a source pair by applying steps in order. The target
    /// boundary defaults to the crepant pushforward of the source boundary.
    pub fn compose(source: LogPair, steps: Vec<MapStep>) -> Result<BirationalMap, MapError> {
        let mut surface = source.surface.clone();
        for step in &steps {
            surface = apply_step(&surface, step)?;
        }
        let mut map = BirationalMap {
            source,
            resolution: surface,
            steps,
            target_boundary: BTreeMap::new(),
        };
        map.target_boundary = map.pushforward_boundary()?;
        Ok(map)
    }

    /// Replace the target boundary (used by fixtures that pin it explicitly
    /// and by tests that exercise crepancy failures).
    pub fn with_target_boundary(mut self, boundary: BTreeMap<ClassId, Rat>) -> Self {
        self.target_boundary = boundary;
        self
    }

    fn source_blowups(&self) -> usize {
        self.source.surface.blowup_count()
    }

    fn source_contracted(&self) -> usize {
        self.source.surface.contracted.len()
    }

    /// Contractions performed by this map (beyond those of the source model).
    pub fn own_contracted(&self) -> &[ClassId] {
        &self.resolution.contracted[self.source_contracted()..]
    }

    /// Pullback coefficients of the source `K + B` over every divisor of the
    /// resolution: declared coefficients on source divisors, solved values on
    /// everything exceptional over the source.
    pub fn source_pullback_vector(&self) -> Result<BTreeMap<ClassId, Rat>, MapError> {
        // Exceptional over the source: the source's own contracted classes and
        // every exceptional class extracted by this map's blow-ups.
        let mut over_source: Vec<ClassId> = self.source.surface.contracted.clone();
        for i in self.source_blowups()..self.resolution.blowup_count() {
            over_source.push(ClassId::Exceptional(i));
        }
        let mut plain = self.resolution.clone();
        plain.contracted.clear();
        let pair = LogPair::new(plain, self.source.boundary.clone());
        let table = pair.pullback_coefficients(&over_source)?;
        let mut out = BTreeMap::new();
        for rec in &self.resolution.curves {
            let id = ClassId::Curve(rec.name.clone());
            let v = table
                .coefficient(&id)
                .cloned()
                .unwrap_or_else(|| pair.boundary_coefficient(&id));
            out.insert(id, v);
        }
        for i in 0..self.resolution.blowup_count() {
            let id = ClassId::Exceptional(i);
            let v = table
                .coefficient(&id)
                .cloned()
                .unwrap_or_else(|| pair.boundary_coefficient(&id));
            out.insert(id, v);
        }
        Ok(out)
    }

    /// Crepant pushforward of the source boundary: coefficients of the source
    /// pullback on divisors surviving to the target.
    pub fn pushforward_boundary(&self) -> Result<BTreeMap<ClassId, Rat>, MapError> {
        let vector = self.source_pullback_vector()?;
        Ok(vector
            .into_iter()
            .filter(|(id, c)| !self.resolution.contracted.contains(id) && !c.is_zero())
            .collect())
    }

    /// The target pair: the final model with the (declared or pushed-forward)
    /// target boundary.
    pub fn target_pair(&self) -> LogPair {
        LogPair::new(self.resolution.clone(), self.target_boundary.clone())
    }

    pub fn target_pullback_vector(&self) -> Result<BTreeMap<ClassId, Rat>, MapError> {
        Ok(self.target_pair().pullback_vector()?)
    }

    /// Source-side prime divisors contracted by the map: tracked curves and
    /// exceptional classes that were divisors on the source model. Divisors
    /// extracted at indeterminacy points do not appear.
    pub fn exceptional_divisor_classes(&self) -> Vec<ClassId> {
        let n_source = self.source_blowups();
        self.own_contracted()
            .iter()
            .filter(|id| match id {
                ClassId::Curve(_) => true,
                ClassId::Exceptional(i) => *i < n_source,
            })
            .cloned()
            .collect()
    }

    /// Torus exceptional degree read on the source model: total plane degree
    /// of the exceptional divisor classes not contained in the source
    /// boundary. For a plane source this is the paper's degree count.
    pub fn torus_exceptional_degree(&self) -> Result<Int, MapError> {
        let mut total = Int::zero();
        for id in self.exceptional_divisor_classes() {
            if !self.source.boundary_coefficient(&id).is_zero() {
                continue;
            }
            // Auto-declared Cremona lines live on the resolution only; their
            // plane degree is the degree field either way.
            let class = self.resolution.class_of(&id).map_err(MapError::Surface)?;
            total += class.degree;
        }
        Ok(total)
    }

    /// Exceptional divisors of the inverse map that survive on the target and
    /// are not target boundary components; used for cover aggregation, where
    /// each chart's inverse is the map from the standard pair.
    pub fn inverse_exceptional_on_target(&self) -> Vec<ClassId> {
        let n_source = self.source_blowups();
        (n_source..self.resolution.blowup_count())
            .map(ClassId::Exceptional)
            .filter(|id| !self.resolution.contracted.contains(id))
            .filter(|id| {
                self.target_boundary
                    .get(id)
                    .map(|c| c.is_zero())
                    .unwrap_or(true)
            })
            .collect()
    }

    /// True iff the pullbacks of `K + B` from source and target agree on every
    /// divisor of the common resolution, as exact rationals.
    pub fn is_crepant(&self) -> Result<bool, MapError> {
        let source = self.source_pullback_vector()?;
        let target = self.target_pullback_vector()?;
        Ok(source == target)
    }

    /// Cluster type map: crepant with torus exceptional degree zero.
    pub fn is_cluster_type_map(&self) -> Result<bool, MapError> {
        Ok(self.is_crepant()? && self.torus_exceptional_degree()?.is_zero())
    }
}

fn apply_step(surface: &MarkedSurface, step: &MapStep) -> Result<MarkedSurface, MapError> {
    match step {
        MapStep::BlowUp(center) => Ok(surface.blow_up(center.clone())?),
        MapStep::Contract(ids) => Ok(surface.contract(ids)?),
        MapStep::Cremona(centers) => apply_cremona(surface, centers),
    }
}

fn apply_cremona(
    surface: &MarkedSurface,
    centers: &[CenterSpec; 3],
) -> Result<MarkedSurface, MapError> {
    for c in centers {
        if c.parent.is_some() {
            return Err(MapError::BadCremonaCenters(format!(
                "`{}` is infinitely near",
                c.name
            )));
        }
        if surface.ledger_index(&c.name).is_some() {
            return Err(MapError::BadCremonaCenters(format!(
                "`{}` is already blown up",
                c.name
            )));
        }
    }
    let names = [
        centers[0].name.clone(),
        centers[1].name.clone(),
        centers[2].name.clone(),
    ];
    if names[0] == names[1] || names[1] == names[2] || names[0] == names[2] {
        return Err(MapError::BadCremonaCenters("centers repeat".into()));
    }
    // A center lies on a curve if the record carries a multiplicity there or
    // the center declares the incidence.
    let incident = |rec: &CurveRecord, center: &CenterSpec| {
        rec.mult_at(&center.name) >= Int::one() || center.on_curves.contains(&rec.name)
    };
    // Reject a declared line through all three centers.
    for rec in &surface.curves {
        if rec.degree == Int::one() && centers.iter().all(|c| incident(rec, c)) {
            return Err(MapError::CollinearCenters(rec.name.clone()));
        }
    }
    let mut next = surface.clone();
    // Resolve or declare the three lines between center pairs.
    let mut lines = Vec::new();
    for (i, j) in [(0usize, 1usize), (0, 2), (1, 2)] {
        let a = &names[i];
        let b = &names[j];
        let declared: Vec<&CurveRecord> = next
            .curves
            .iter()
            .filter(|rec| {
                rec.degree == Int::one()
                    && incident(rec, &centers[i])
                    && incident(rec, &centers[j])
            })
            .collect();
        match declared.len() {
            0 => {
                let name = format!("l_{}_{}", a, b);
                if next.curves.iter().any(|c| c.name == name)
                    || next.ledger.iter().any(|c| c.name == name)
                {
                    return Err(MapError::AutoLineNameTaken(name));
                }
                let rec = CurveRecord::new(&name, 1).mult(a, 1).mult(b, 1);
                next.curves.push(rec);
                lines.push(name);
            }
            1 => lines.push(declared[0].name.clone()),
            _ => {
                return Err(MapError::BadCremonaCenters(format!(
                    "two declared lines through `{}` and `{}`",
                    a, b
                )))
            }
        }
    }
    for c in centers {
        next = next.blow_up(c.clone())?;
    }
    let ids: Vec<ClassId> = lines.into_iter().map(ClassId::Curve).collect();
    Ok(next.contract(&ids)?)
}

/// Aggregate torus-exceptional metrics over a family of maps presented from a
/// common source pair (the charts are their inverses). Every map must be
/// crepant and start from the given pair; the verdict reports whether every
/// tracked prime divisor of the pair outside the boundary is non-exceptional
/// for at least one map, and the smallest covering subfamily size.
pub fn aggregate_cover_metrics(
    maps: &[BirationalMap],
    pair: &LogPair,
) -> Result<CoverMetrics, MapError> {
    for (k, m) in maps.iter().enumerate() {
        if !same_pair(&m.source, pair) {
            return Err(MapError::BadCoverInput(format!(
                "map {} does not start from the common pair",
                k
            )));
        }
        if !m.is_crepant()? {
            return Err(MapError::BadCoverInput(format!("map {} is not crepant", k)));
        }
    }
    // Inverse-direction torus exceptional degree of each chart.
    let mut per_map_ted = Vec::new();
    for m in maps {
        let mut total = Int::zero();
        let leftover = m.inverse_exceptional_on_target();
        if !leftover.is_empty() {
            // Charts used for covers extract nothing new; degree bookkeeping
            // for genuinely extracting charts measures on the target model.
            for id in &leftover {
                let class = m.resolution.class_of(id).map_err(MapError::Surface)?;
                total += degree_on_rank_one_target(m, &class)?;
            }
        }
        per_map_ted.push(total);
    }
    let sum: Int = per_map_ted.iter().cloned().sum();
    let max: Int = per_map_ted.iter().cloned().max().unwrap_or_else(Int::zero);

    // Divisors needing coverage: tracked prime divisors of the pair's model
    // that are not boundary components.
    let needed: Vec<ClassId> = pair
        .surface
        .surviving_classes()
        .into_iter()
        .filter(|id| pair.boundary_coefficient(id).is_zero())
        .collect();
    let covers_of = |subset: &[usize]| -> bool {
        needed.iter().all(|d| {
            subset
                .iter()
                .any(|&k| !maps[k].own_contracted().contains(d))
        })
    };
    let all: Vec<usize> = (0..maps.len()).collect();
    let covered = covers_of(&all);
    let mut min_cover = None;
    if covered {
        'outer: for size in 0..=maps.len() {
            for subset in subsets_of_size(maps.len(), size) {
                if covers_of(&subset) {
                    min_cover = Some(size);
                    break 'outer;
                }
            }
        }
    }
    Ok(CoverMetrics {
        per_map_ted,
        sum,
        max,
        covered,
        min_cover,
    })
}

fn degree_on_rank_one_target(
    map: &BirationalMap,
    class: &crate::lattice::DivisorClass,
) -> Result<Int, MapError> {
    // Degree against the hyperplane class h of a rank-one target model. The
    // projection of the plane class H onto the contracted complement is
    // (H.h) h, so class.h = model_pairing(class, H) / sqrt(model_pairing(H, H)).
    if map.resolution.rank() != 1 {
        return Err(MapError::BadCoverInput(
            "chart extracts divisors on a target of rank > 1".into(),
        ));
    }
    let h = crate::lattice::DivisorClass::new(1, vec![0i64; map.resolution.blowup_count()]);
    let hh = map.resolution.model_pairing(&h, &h);
    let d = map.resolution.model_pairing(class, &h);
    if !hh.is_integer() {
        return Err(MapError::BadCoverInput(
            "non-integral self-pairing on target model".into(),
        ));
    }
    let lambda = hh.to_integer().sqrt();
    if &lambda * &lambda != hh.to_integer() || lambda.is_zero() {
        return Err(MapError::BadCoverInput(
            "target model is not a plane".into(),
        ));
    }
    let deg = d / Rat::from_integer(lambda);
    if !deg.is_integer() {
        return Err(MapError::BadCoverInput(
            "non-integral degree on target model".into(),
        ));
    }
    Ok(deg.to_integer())
}

fn same_pair(a: &LogPair, b: &LogPair) -> bool {
    a.surface.ledger == b.surface.ledger
        && a.surface.curves == b.surface.curves
        && a.surface.contracted == b.surface.contracted
        && a.boundary == b.boundary
}

fn subsets_of_size(n: usize, size: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, size: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, size, cur, out);
            cur.pop();
        }
    }
    rec(0, n, size, &mut cur, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn q(x: i64) -> Rat {
        Rat::from_integer(Int::from(x))
    }

    fn triangle_source() -> LogPair {
        let curves = vec![
            CurveRecord::new("L1", 1).mult("v12", 1).mult("v13", 1),
            CurveRecord::new("L2", 1).mult("v12", 1).mult("v23", 1),
            CurveRecord::new("L3", 1).mult("v13", 1).mult("v23", 1),
        ];
        let surface = MarkedSurface::with_curves(curves);
        let mut boundary = BTreeMap::new();
        for n in ["L1", "L2", "L3"] {
            boundary.insert(ClassId::Curve(n.into()), q(1));
        }
        LogPair::new(surface, boundary)
    }

    #[test]
    fn identity_map() {
        let map = BirationalMap::compose(triangle_source(), vec![]).unwrap();
        assert!(map.exceptional_divisor_classes().is_empty());
        assert_eq!(map.torus_exceptional_degree().unwrap(), Int::zero());
        assert!(map.is_crepant().unwrap());
        assert!(map.is_cluster_type_map().unwrap());
    }

    #[test]
    fn toric_cremona_at_triangle_vertices() {
        let source = triangle_source();
        let steps = vec![MapStep::Cremona([
            CenterSpec::proper("v12").on("L1").on("L2"),
            CenterSpec::proper("v13").on("L1").on("L3"),
            CenterSpec::proper("v23").on("L2").on("L3"),
        ])];
        let map = BirationalMap::compose(source, steps).unwrap();
        // The three auto lines are the boundary lines themselves.
        let exc = map.exceptional_divisor_classes();
        assert_eq!(exc.len(), 3);
        assert_eq!(map.torus_exceptional_degree().unwrap(), Int::zero());
        assert!(map.is_crepant().unwrap());
        assert!(map.is_cluster_type_map().unwrap());
        // The pushed-forward boundary consists of the three new exceptionals.
        let survivors: Vec<_> = map.target_boundary.keys().cloned().collect();
        assert_eq!(
            survivors,
            vec![
                ClassId::Exceptional(0),
                ClassId::Exceptional(1),
                ClassId::Exceptional(2)
            ]
        );
        assert_eq!(map.target_pair().complexity(), q(0));
    }

    #[test]
    fn single_cremona_on_nodal_cubic() {
        // Cremona at the node and two smooth points of a nodal cubic:
        // exceptional set is the three fresh lines, total degree 3.
        let curves = vec![CurveRecord::new("C", 3).node("N")];
        let surface = MarkedSurface::with_curves(curves);
        let mut boundary = BTreeMap::new();
        boundary.insert(ClassId::Curve("C".into()), q(1));
        let source = LogPair::new(surface, boundary);
        let steps = vec![MapStep::Cremona([
            CenterSpec::proper("N").on("C"),
            CenterSpec::proper("P1").on("C"),
            CenterSpec::proper("P2").on("C"),
        ])];
        let map = BirationalMap::compose(source, steps).unwrap();
        assert_eq!(map.exceptional_divisor_classes().len(), 3);
        assert_eq!(map.torus_exceptional_degree().unwrap(), Int::from(3));
        assert!(map.is_crepant().unwrap());
        assert!(!map.is_cluster_type_map().unwrap());
        // Target boundary: the conic image of C and the node exceptional.
        assert_eq!(map.target_boundary.len(), 2);
        assert_eq!(
            map.target_boundary.get(&ClassId::Curve("C".into())),
            Some(&q(1))
        );
        assert_eq!(
            map.target_boundary.get(&ClassId::Exceptional(0)),
            Some(&q(1))
        );
        assert_eq!(map.target_pair().complexity(), q(1));
        assert!(map.target_pair().is_index_one_complement());
    }

    #[test]
    fn crepancy_detects_mismatched_target() {
        // Blow up a triangle vertex; crepant iff the exceptional coefficient
        // on the target is 1.
        let source = triangle_source();
        let steps = vec![MapStep::BlowUp(
            CenterSpec::proper("v12").on("L1").on("L2"),
        )];
        let map = BirationalMap::compose(source, steps).unwrap();
        assert!(map.is_crepant().unwrap());
        assert_eq!(
            map.target_boundary.get(&ClassId::Exceptional(0)),
            Some(&Rat::one())
        );
        let mut wrong = map.target_boundary.clone();
        wrong.remove(&ClassId::Exceptional(0));
        let map = map.with_target_boundary(wrong);
        assert!(!map.is_crepant().unwrap());
    }

    #[test]
    fn cremona_rejects_bad_centers() {
        let source = triangle_source();
        let steps = vec![MapStep::Cremona([
            CenterSpec::proper("v12").on("L1").on("L2"),
            CenterSpec::proper("x").on("L1"),
            CenterSpec::proper("y").on("L1"),
        ])];
        // v12, x, y all lie on L1: collinear.
        match BirationalMap::compose(source, steps) {
            Err(MapError::CollinearCenters(name)) => assert_eq!(name, "L1"),
            other => panic!("expected collinear rejection, got {other:?}"),
        }

        let steps = vec![MapStep::Cremona([
            CenterSpec::proper("a"),
            CenterSpec::proper("a"),
            CenterSpec::proper("b"),
        ])];
        assert!(BirationalMap::compose(triangle_source(), steps).is_err());

        let steps = vec![MapStep::Cremona([
            CenterSpec::over("a", "missing"),
            CenterSpec::proper("b"),
            CenterSpec::proper("c"),
        ])];
        assert!(BirationalMap::compose(triangle_source(), steps).is_err());
    }
}
