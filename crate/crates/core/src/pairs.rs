//! Boundary data, the discrepancy solver, and pair-level invariants:
//! complexity, index-one check, coregularity, dual-complex type, and the
//! local D/E one-complement obstruction.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use crate::error::PairError;
use crate::lattice::{intersect, is_negative_definite, solve_symmetric, DivisorClass, Int, Rat};
use crate::surface::{ClassId, Graph, MarkedSurface, Violation};

/// A marked surface with a rational-coefficient boundary.
///
/// Boundary coefficients are attached to divisors of the full resolution
/// (curve strict transforms and exceptional stricts). Coefficients on
/// contracted classes describe the expected pullback and are cross-checked by
/// the solver; coefficients on surviving classes are the boundary B of the
/// current model.
#[derive(Debug, Clone)]
pub struct LogPair {
    pub surface: MarkedSurface,
    pub boundary: BTreeMap<ClassId, Rat>,
}

/// Pullback coefficients `b` (and log discrepancies `1 - b`) of the contracted
/// classes, the unique solution of the negative definite Gram system.
#[derive(Debug, Clone)]
pub struct DiscrepancyTable {
    pub coefficients: BTreeMap<ClassId, Rat>,
}

impl DiscrepancyTable {
    pub fn coefficient(&self, id: &ClassId) -> Option<&Rat> {
        self.coefficients.get(id)
    }

    pub fn log_discrepancy(&self, id: &ClassId) -> Option<Rat> {
        self.coefficients.get(id).map(|b| Rat::one() - b)
    }
}

/// Sign-pattern flags of the log discrepancies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairClass {
    pub klt: bool,
    pub lc: bool,
    pub all_contracted_canonical: bool,
}

/// PL type of the boundary dual complex of a surface pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DualComplexType {
    Circle,
    Interval,
    Point,
    Empty,
    Disconnected,
}

impl std::fmt::Display for DualComplexType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            DualComplexType::Circle => "circle",
            DualComplexType::Interval => "interval",
            DualComplexType::Point => "point",
            DualComplexType::Empty => "empty",
            DualComplexType::Disconnected => "disconnected",
        };
        write!(f, "{}", s)
    }
}

impl LogPair {
    pub fn new(surface: MarkedSurface, boundary: BTreeMap<ClassId, Rat>) -> Self {
        LogPair { surface, boundary }
    }

    pub fn boundary_coefficient(&self, id: &ClassId) -> Rat {
        self.boundary.get(id).cloned().unwrap_or_else(Rat::zero)
    }

    /// Boundary components on the current model: surviving classes with a
    /// nonzero declared coefficient.
    pub fn surviving_boundary(&self) -> Vec<(ClassId, Rat)> {
        self.boundary
            .iter()
            .filter(|(id, c)| !self.surface.contracted.contains(id) && !c.is_zero())
            .map(|(id, c)| (id.clone(), c.clone()))
            .collect()
    }

    /// Validate boundary coefficient ranges on top of the surface report.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = self.surface.validate_configuration().violations;
        for (id, c) in &self.boundary {
            if c.is_negative() || *c > Rat::one() {
                out.push(Violation::BoundaryCoefficientRange {
                    class: id.clone(),
                    coefficient: c.clone(),
                });
            }
        }
        out
    }

    /// Solve, for each contracted class `E_i`, the exact rational system
    /// `(K + B_strict + sum_j b_j E_j) . E_i = 0`; returns the `b_j`.
    pub fn pullback_coefficients(
        &self,
        contracted: &[ClassId],
    ) -> Result<DiscrepancyTable, PairError> {
        let classes: Vec<DivisorClass> = contracted
            .iter()
            .map(|id| self.surface.class_of(id).map_err(PairError::from))
            .collect::<Result<_, _>>()?;
        let gram = self.surface.gram(&classes);
        if !classes.is_empty() && !is_negative_definite(&gram) {
            return Err(PairError::NotNegativeDefinite);
        }
        // Right-hand side: -(K + sum coeff * surviving boundary) . E_i.
        let k = self.surface.canonical();
        let rhs: Vec<Rat> = classes
            .iter()
            .map(|e| {
                let mut acc = Rat::from_integer(intersect(&k, e).expect("same ambient"));
                for (id, coeff) in self.surviving_boundary() {
                    if contracted.contains(&id) {
                        continue;
                    }
                    let class = self.surface.class_of(&id).expect("resolves");
                    acc += coeff * Rat::from_integer(intersect(&class, e).expect("same ambient"));
                }
                -acc
            })
            .collect();
        let b = if classes.is_empty() {
            Vec::new()
        } else {
            solve_symmetric(&gram, &rhs).ok_or(PairError::SingularSystem)?
        };
        Ok(DiscrepancyTable {
            coefficients: contracted.iter().cloned().zip(b).collect(),
        })
    }

    /// Discrepancy table for the classes contracted on the current model.
    pub fn discrepancy_table(&self) -> Result<DiscrepancyTable, PairError> {
        self.pullback_coefficients(&self.surface.contracted.clone())
    }

    /// Full pullback coefficient vector of `K + B` over every tracked divisor
    /// of the resolution: declared coefficients on surviving classes, solved
    /// coefficients on contracted ones.
    pub fn pullback_vector(&self) -> Result<BTreeMap<ClassId, Rat>, PairError> {
        let table = self.discrepancy_table()?;
        let mut out = BTreeMap::new();
        for rec in &self.surface.curves {
            let id = ClassId::Curve(rec.name.clone());
            let v = table
                .coefficient(&id)
                .cloned()
                .unwrap_or_else(|| self.boundary_coefficient(&id));
            out.insert(id, v);
        }
        for i in 0..self.surface.blowup_count() {
            let id = ClassId::Exceptional(i);
            let v = table
                .coefficient(&id)
                .cloned()
                .unwrap_or_else(|| self.boundary_coefficient(&id));
            out.insert(id, v);
        }
        Ok(out)
    }

    /// Log discrepancy of a contracted class (from the table) or a boundary
    /// component (1 - coefficient).
    pub fn log_discrepancy(&self, id: &ClassId) -> Result<Rat, PairError> {
        if self.surface.contracted.contains(id) {
            let table = self.discrepancy_table()?;
            return table
                .log_discrepancy(id)
                .ok_or_else(|| PairError::UnknownClass(id.to_string()));
        }
        // Must resolve on the surface.
        self.surface.class_of(id)?;
        Ok(Rat::one() - self.boundary_coefficient(id))
    }

    /// Sign-pattern classification over all tracked divisors.
    pub fn classify(&self) -> Result<PairClass, PairError> {
        let table = self.discrepancy_table()?;
        let mut klt = true;
        let mut lc = true;
        let mut all_canonical = true;
        for id in &self.surface.contracted {
            let a = table.log_discrepancy(id).expect("solved");
            if a.is_negative() {
                lc = false;
            }
            if !a.is_positive() {
                klt = false;
            }
            if a < Rat::one() {
                all_canonical = false;
            }
        }
        for (id, coeff) in self.surviving_boundary() {
            let a = Rat::one() - coeff;
            let _ = id;
            if a.is_negative() {
                lc = false;
            }
            if !a.is_positive() {
                klt = false;
            }
        }
        Ok(PairClass {
            klt,
            lc,
            all_contracted_canonical: all_canonical,
        })
    }

    /// Complexity `2 + rank - |B|`, exact.
    pub fn complexity(&self) -> Rat {
        let rank = Rat::from_integer(Int::from(self.surface.rank() as i64));
        let two = Rat::from_integer(Int::from(2));
        let sum: Rat = self
            .surviving_boundary()
            .into_iter()
            .map(|(_, c)| c)
            .fold(Rat::zero(), |a, b| a + b);
        two + rank - sum
    }

    /// True iff all surviving boundary coefficients are 1 and the class of
    /// `K + B` is numerically trivial on the current model.
    pub fn is_index_one_complement(&self) -> bool {
        let surviving = self.surviving_boundary();
        if surviving.iter().any(|(_, c)| *c != Rat::one()) {
            return false;
        }
        let mut acc = self.surface.canonical();
        for (id, _) in &surviving {
            let class = self.surface.class_of(id).expect("resolves");
            acc = acc.add(&class).expect("same ambient");
        }
        self.surface.is_trivial_on_model(&acc)
    }

    /// Vertices of the log canonical locus on the resolution: surviving
    /// boundary components with coefficient one together with contracted
    /// classes of pullback coefficient one.
    pub fn lc_places(&self) -> Result<Vec<ClassId>, PairError> {
        let vector = self.pullback_vector()?;
        let mut out: Vec<ClassId> = vector
            .into_iter()
            .filter(|(_, c)| *c == Rat::one())
            .map(|(id, _)| id)
            .collect();
        out.sort();
        Ok(out)
    }

    /// Dual graph of the log canonical places (loops from unresolved nodes).
    pub fn lc_graph(&self) -> Result<Graph, PairError> {
        self.require_reduced()?;
        let places = self.lc_places()?;
        Ok(self.surface.dual_graph(&places)?)
    }

    fn require_reduced(&self) -> Result<(), PairError> {
        for (_, c) in self.surviving_boundary() {
            if c != Rat::one() {
                return Err(PairError::NonReducedBoundary);
            }
        }
        Ok(())
    }

    /// Coregularity of the pair on the supplied resolved model: 0 if the lc
    /// graph has an edge or loop, 1 if nonempty without edges, 2 if empty.
    pub fn coregularity(&self) -> Result<u8, PairError> {
        let g = self.lc_graph()?;
        if g.vertices.is_empty() {
            return Ok(2);
        }
        if g.edge_count() > 0 {
            Ok(0)
        } else {
            Ok(1)
        }
    }

    /// PL type of the lc dual graph.
    pub fn dual_complex_type(&self) -> Result<DualComplexType, PairError> {
        let g = self.lc_graph()?;
        let v = g.vertices.len();
        if v == 0 {
            return Ok(DualComplexType::Empty);
        }
        if g.components().len() > 1 {
            return Ok(DualComplexType::Disconnected);
        }
        let e = g.edge_count();
        let all_deg_two = (0..v).all(|i| g.degree(i) == 2);
        if e as usize == v && all_deg_two {
            return Ok(DualComplexType::Circle);
        }
        let max_deg_ok = (0..v).all(|i| g.degree(i) <= 2);
        if e as usize + 1 == v && max_deg_ok {
            return Ok(if v == 1 {
                DualComplexType::Point
            } else {
                DualComplexType::Interval
            });
        }
        Err(PairError::UnrecognizedShape)
    }
}

/// Local one-complement obstruction for a connected negative definite
/// (-2)-configuration: true iff no index-one complement through the point
/// exists. Decided by the fork criterion (some vertex of degree >= 3) and
/// cross-checked by the linear feasibility of `(K + E_total + s) . E_i = 0`
/// with integral `s >= 0`, which forces `s_i = 2 - deg(i)`.
pub fn local_one_complement_obstruction(graph: &Graph) -> Result<bool, PairError> {
    let n = gram_check_ade_input(graph)?;
    let fork = (0..n).any(|v| graph.degree(v) >= 3);
    let infeasible = (0..n).any(|v| graph.degree(v) > 2);
    debug_assert_eq!(fork, infeasible);
    Ok(fork)
}

fn gram_check_ade_input(graph: &Graph) -> Result<usize, PairError> {
    let n = graph.vertices.len();
    if n == 0 {
        return Err(PairError::NotAde("empty graph".into()));
    }
    if graph.components().len() != 1 {
        return Err(PairError::NotAde("graph is disconnected".into()));
    }
    if graph.loops.iter().any(|&l| l > 0) {
        return Err(PairError::NotAde("graph has a loop".into()));
    }
    if graph.edges.values().any(|&m| m > 1) {
        return Err(PairError::NotAde("graph has a multiple edge".into()));
    }
    // Negative definiteness of the (-2)-Gram matrix.
    let gram: Vec<Vec<Rat>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        Rat::from_integer(Int::from(-2))
                    } else {
                        let key = if i < j { (i, j) } else { (j, i) };
                        Rat::from_integer(Int::from(
                            graph.edges.get(&key).copied().unwrap_or(0) as i64
                        ))
                    }
                })
                .collect()
        })
        .collect();
    if !is_negative_definite(&gram) {
        return Err(PairError::NotAde("Gram matrix not negative definite".into()));
    }
    Ok(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{CenterSpec, CurveRecord};

    fn q(x: i64) -> Rat {
        Rat::from_integer(Int::from(x))
    }

    fn triangle_pair() -> LogPair {
        let lines = vec![
            CurveRecord::new("L1", 1),
            CurveRecord::new("L2", 1),
            CurveRecord::new("L3", 1),
        ];
        let surface = MarkedSurface::with_curves(lines);
        let mut boundary = BTreeMap::new();
        for name in ["L1", "L2", "L3"] {
            boundary.insert(ClassId::Curve(name.into()), q(1));
        }
        LogPair::new(surface, boundary)
    }

    #[test]
    fn pullback_triangle_node_blowup() {
        // Blow up an (undeclared-made-declared) node of the triangle.
        let l1 = CurveRecord::new("L1", 1).mult("v", 1);
        let l2 = CurveRecord::new("L2", 1).mult("v", 1);
        let l3 = CurveRecord::new("L3", 1);
        let s = MarkedSurface::with_curves(vec![l1, l2, l3])
            .blow_up(CenterSpec::proper("v"))
            .unwrap();
        let mut boundary = BTreeMap::new();
        for name in ["L1", "L2", "L3"] {
            boundary.insert(ClassId::Curve(name.into()), q(1));
        }
        let pair = LogPair::new(s, boundary);
        let t = pair
            .pullback_coefficients(&[ClassId::Exceptional(0)])
            .unwrap();
        assert_eq!(t.coefficient(&ClassId::Exceptional(0)), Some(&q(1)));
        assert_eq!(t.log_discrepancy(&ClassId::Exceptional(0)), Some(q(0)));
    }

    #[test]
    fn pullback_half_triangle_is_klt() {
        let l1 = CurveRecord::new("L1", 1).mult("v", 1);
        let l2 = CurveRecord::new("L2", 1).mult("v", 1);
        let s = MarkedSurface::with_curves(vec![l1, l2])
            .blow_up(CenterSpec::proper("v"))
            .unwrap()
            .contract(&[ClassId::Exceptional(0)])
            .unwrap();
        let mut boundary = BTreeMap::new();
        boundary.insert(ClassId::Curve("L1".into()), Rat::new(Int::from(1), Int::from(2)));
        boundary.insert(ClassId::Curve("L2".into()), Rat::new(Int::from(1), Int::from(2)));
        let pair = LogPair::new(s, boundary);
        let t = pair.discrepancy_table().unwrap();
        assert_eq!(t.coefficient(&ClassId::Exceptional(0)), Some(&q(0)));
        let class = pair.classify().unwrap();
        assert!(class.klt && class.lc);
    }

    #[test]
    fn pullback_canonical_a1_and_a2() {
        // Single (-2)-class, empty boundary: b = 0, a = 1.
        let s = MarkedSurface::plane()
            .blow_up(CenterSpec::proper("p"))
            .unwrap()
            .blow_up(CenterSpec::over("p2", "p"))
            .unwrap();
        let pair = LogPair::new(s, BTreeMap::new());
        let t = pair
            .pullback_coefficients(&[ClassId::Exceptional(0)])
            .unwrap();
        assert_eq!(t.coefficient(&ClassId::Exceptional(0)), Some(&q(0)));

        // A_2 chain of two (-2)-classes, empty boundary: b = (0, 0).
        let s = MarkedSurface::plane()
            .blow_up(CenterSpec::proper("p"))
            .unwrap()
            .blow_up(CenterSpec::over("p2", "p"))
            .unwrap()
            .blow_up(CenterSpec::over("p3", "p2"))
            .unwrap();
        let pair = LogPair::new(s, BTreeMap::new());
        let t = pair
            .pullback_coefficients(&[ClassId::Exceptional(0), ClassId::Exceptional(1)])
            .unwrap();
        assert_eq!(t.coefficient(&ClassId::Exceptional(0)), Some(&q(0)));
        assert_eq!(t.coefficient(&ClassId::Exceptional(1)), Some(&q(0)));
    }

    #[test]
    fn log_discrepancy_free_point_is_two() {
        let s = MarkedSurface::plane()
            .blow_up(CenterSpec::proper("p"))
            .unwrap();
        let s = s.contract(&[ClassId::Exceptional(0)]).unwrap();
        let pair = LogPair::new(s, BTreeMap::new());
        assert_eq!(pair.log_discrepancy(&ClassId::Exceptional(0)).unwrap(), q(2));
    }

    #[test]
    fn complexity_examples() {
        let pair = triangle_pair();
        assert_eq!(pair.complexity(), q(0));

        let cubic = CurveRecord::new("C", 3).node("N");
        let s = MarkedSurface::with_curves(vec![cubic]);
        let mut boundary = BTreeMap::new();
        boundary.insert(ClassId::Curve("C".into()), q(1));
        let pair = LogPair::new(s, boundary);
        assert_eq!(pair.complexity(), q(2));
    }

    #[test]
    fn index_one_examples() {
        assert!(triangle_pair().is_index_one_complement());

        let q2 = CurveRecord::new("Q", 2);
        let l = CurveRecord::new("L", 1);
        let s = MarkedSurface::with_curves(vec![q2, l]);
        let mut boundary = BTreeMap::new();
        boundary.insert(ClassId::Curve("Q".into()), q(1));
        boundary.insert(ClassId::Curve("L".into()), q(1));
        let pair = LogPair::new(s.clone(), boundary);
        assert!(pair.is_index_one_complement());

        let mut boundary = BTreeMap::new();
        boundary.insert(ClassId::Curve("Q".into()), q(1));
        let pair = LogPair::new(s, boundary);
        assert!(!pair.is_index_one_complement());
    }

    #[test]
    fn coregularity_examples() {
        assert_eq!(triangle_pair().coregularity().unwrap(), 0);
        assert_eq!(
            triangle_pair().dual_complex_type().unwrap(),
            DualComplexType::Circle
        );

        let cubic = CurveRecord::new("C", 3).node("N");
        let s = MarkedSurface::with_curves(vec![cubic]);
        let mut boundary = BTreeMap::new();
        boundary.insert(ClassId::Curve("C".into()), q(1));
        let pair = LogPair::new(s, boundary);
        assert_eq!(pair.coregularity().unwrap(), 0);
        assert_eq!(pair.dual_complex_type().unwrap(), DualComplexType::Circle);

        let smooth_cubic = CurveRecord::new("C", 3);
        let s = MarkedSurface::with_curves(vec![smooth_cubic]);
        let mut boundary = BTreeMap::new();
        boundary.insert(ClassId::Curve("C".into()), q(1));
        let pair = LogPair::new(s, boundary);
        assert_eq!(pair.coregularity().unwrap(), 1);
        assert_eq!(pair.dual_complex_type().unwrap(), DualComplexType::Point);

        let empty = LogPair::new(MarkedSurface::plane(), BTreeMap::new());
        assert_eq!(empty.coregularity().unwrap(), 2);
        assert_eq!(empty.dual_complex_type().unwrap(), DualComplexType::Empty);
    }

    #[test]
    fn dual_complex_conic_plus_line() {
        let q2 = CurveRecord::new("Q", 2);
        let l = CurveRecord::new("L", 1);
        let s = MarkedSurface::with_curves(vec![q2, l]);
        let mut boundary = BTreeMap::new();
        boundary.insert(ClassId::Curve("Q".into()), q(1));
        boundary.insert(ClassId::Curve("L".into()), q(1));
        let pair = LogPair::new(s, boundary);
        // Two vertices joined by two edges: a circle.
        assert_eq!(pair.dual_complex_type().unwrap(), DualComplexType::Circle);
        assert_eq!(pair.coregularity().unwrap(), 0);
    }

    #[test]
    fn obstruction_on_small_dynkin_graphs() {
        use std::collections::BTreeMap as M;
        let path = |n: usize| {
            let mut edges = M::new();
            for i in 0..n - 1 {
                edges.insert((i, i + 1), 1u32);
            }
            Graph {
                vertices: (0..n).map(ClassId::Exceptional).collect(),
                edges,
                loops: vec![0; n],
            }
        };
        for n in 1..=8 {
            assert!(!local_one_complement_obstruction(&path(n)).unwrap());
        }
        // D_4: a star.
        let mut edges = M::new();
        edges.insert((0, 1), 1);
        edges.insert((0, 2), 1);
        edges.insert((0, 3), 1);
        let d4 = Graph {
            vertices: (0..4).map(ClassId::Exceptional).collect(),
            edges,
            loops: vec![0; 4],
        };
        assert!(local_one_complement_obstruction(&d4).unwrap());
        // E_8: path of 7 with a branch at the third vertex.
        let mut edges = M::new();
        for i in 0..6 {
            edges.insert((i, i + 1), 1);
        }
        edges.insert((2, 7), 1);
        let e8 = Graph {
            vertices: (0..8).map(ClassId::Exceptional).collect(),
            edges,
            loops: vec![0; 8],
        };
        assert!(local_one_complement_obstruction(&e8).unwrap());
        // A cycle is rejected as non-ADE.
        let mut edges = M::new();
        edges.insert((0, 1), 1);
        edges.insert((1, 2), 1);
        edges.insert((0, 2), 1);
        let cycle = Graph {
            vertices: (0..3).map(ClassId::Exceptional).collect(),
            edges,
            loops: vec![0; 3],
        };
        assert!(local_one_complement_obstruction(&cycle).is_err());
    }
}
