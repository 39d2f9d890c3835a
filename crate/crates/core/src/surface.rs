//! The combinatorial surface model: an ordered ledger of (possibly infinitely
//! near) blow-up centers over the plane, declared curves with multiplicity
//! vectors, and an optional list of contracted classes.
//!
//! No coordinates anywhere. Incidences, tangency orders and nodes are declared
//! and validated for numerical consistency (proximity inequalities, genus,
//! Bezout nonnegativity), never computed from equations.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Signed, Zero};

use crate::error::SurfaceError;
use crate::lattice::{
    arithmetic_genus, canonical_class, intersect, is_negative_definite, solve_symmetric,
    DivisorClass, Int, Rat,
};

/// A blow-up center. `parent` is the earlier center this one is infinitely
/// near to (absent for proper points of the plane); `satellite_of` lists the
/// extra earlier centers it is proximate to beyond the parent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CenterSpec {
    pub name: String,
    pub parent: Option<String>,
    pub on_curves: BTreeSet<String>,
    pub satellite_of: BTreeSet<String>,
}

impl CenterSpec {
    pub fn proper(name: &str) -> Self {
        CenterSpec {
            name: name.to_string(),
            parent: None,
            on_curves: BTreeSet::new(),
            satellite_of: BTreeSet::new(),
        }
    }

    pub fn over(name: &str, parent: &str) -> Self {
        CenterSpec {
            name: name.to_string(),
            parent: Some(parent.to_string()),
            on_curves: BTreeSet::new(),
            satellite_of: BTreeSet::new(),
        }
    }

    pub fn on(mut self, curve: &str) -> Self {
        self.on_curves.insert(curve.to_string());
        self
    }
}

/// A declared plane curve with its total multiplicities at declared centers.
/// `nodes` lists centers where the curve has an ordinary node (multiplicity 2,
/// contributing a loop to the dual complex while unresolved).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveRecord {
    pub name: String,
    pub degree: Int,
    pub mults: BTreeMap<String, Int>,
    pub nodes: BTreeSet<String>,
}

impl CurveRecord {
    pub fn new(name: &str, degree: i64) -> Self {
        CurveRecord {
            name: name.to_string(),
            degree: Int::from(degree),
            mults: BTreeMap::new(),
            nodes: BTreeSet::new(),
        }
    }

    pub fn mult(mut self, center: &str, m: i64) -> Self {
        self.mults.insert(center.to_string(), Int::from(m));
        self
    }

    pub fn node(mut self, center: &str) -> Self {
        self.nodes.insert(center.to_string());
        self
    }

    /// Effective multiplicity at a center: explicit entry, else 2 at a node.
    pub fn mult_at(&self, center: &str) -> Int {
        if let Some(m) = self.mults.get(center) {
            return m.clone();
        }
        if self.nodes.contains(center) {
            return Int::from(2);
        }
        Int::zero()
    }
}

/// Identifier for a class on the surface: a named curve or the i-th
/// exceptional class (0-based ledger index).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ClassId {
    Curve(String),
    Exceptional(usize),
}

impl std::fmt::Display for ClassId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ClassId::Curve(name) => write!(f, "{}", name),
            ClassId::Exceptional(i) => write!(f, "E{}", i + 1),
        }
    }
}

/// One violation found by [`MarkedSurface::validate_configuration`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    ProximityInequality {
        curve: String,
        center: String,
        have: Int,
        need: Int,
    },
    NegativeGenus {
        curve: String,
        genus: Rat,
    },
    NegativePairing {
        left: String,
        right: String,
        pairing: Int,
    },
    BoundaryCoefficientRange {
        class: ClassId,
        coefficient: Rat,
    },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::ProximityInequality {
                curve,
                center,
                have,
                need,
            } => write!(
                f,
                "curve `{}` violates proximity at `{}`: multiplicity {} < {}",
                curve, center, have, need
            ),
            Violation::NegativeGenus { curve, genus } => {
                write!(f, "curve `{}` has negative genus {}", curve, genus)
            }
            Violation::NegativePairing {
                left,
                right,
                pairing,
            } => write!(
                f,
                "distinct curves `{}` and `{}` have negative pairing {}",
                left, right, pairing
            ),
            Violation::BoundaryCoefficientRange { class, coefficient } => {
                write!(f, "boundary coefficient {} on `{}` outside [0,1]", coefficient, class)
            }
        }
    }
}

/// Validation outcome; empty `violations` means the configuration is sound.
#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Dual graph of a selection of classes: parallel edge counts between distinct
/// vertices, and loop counts (from unresolved nodes of curve vertices).
#[derive(Debug, Clone)]
pub struct Graph {
    pub vertices: Vec<ClassId>,
    /// Edge multiplicity keyed by vertex index pairs (i < j).
    pub edges: BTreeMap<(usize, usize), u32>,
    pub loops: Vec<u32>,
}

impl Graph {
    pub fn degree(&self, v: usize) -> u32 {
        let mut d = 0;
        for (&(a, b), &m) in &self.edges {
            if a == v || b == v {
                d += m;
            }
        }
        d + 2 * self.loops[v]
    }

    pub fn edge_count(&self) -> u32 {
        self.edges.values().sum::<u32>() + self.loops.iter().sum::<u32>()
    }

    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.vertices.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut stack = vec![start];
            let mut comp = Vec::new();
            seen[start] = true;
            while let Some(v) = stack.pop() {
                comp.push(v);
                for (&(a, b), &m) in &self.edges {
                    if m == 0 {
                        continue;
                    }
                    let other = if a == v {
                        Some(b)
                    } else if b == v {
                        Some(a)
                    } else {
                        None
                    };
                    if let Some(o) = other {
                        if !seen[o] {
                            seen[o] = true;
                            stack.push(o);
                        }
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }
}

/// The ordered blow-up ledger over the plane with tracked curves and an
/// ordered list of contracted classes. Immutable: operations return new values.
#[derive(Debug, Clone, Default)]
pub struct MarkedSurface {
    pub ledger: Vec<CenterSpec>,
    pub curves: Vec<CurveRecord>,
    pub contracted: Vec<ClassId>,
}

impl MarkedSurface {
    /// The plane with no blow-ups and no tracked curves.
    pub fn plane() -> Self {
        MarkedSurface::default()
    }

    pub fn with_curves(curves: Vec<CurveRecord>) -> Self {
        MarkedSurface {
            ledger: Vec::new(),
            curves,
            contracted: Vec::new(),
        }
    }

    pub fn blowup_count(&self) -> usize {
        self.ledger.len()
    }

    /// Rank of the class group of the current model.
    pub fn rank(&self) -> usize {
        1 + self.ledger.len() - self.contracted.len()
    }

    pub fn ledger_index(&self, name: &str) -> Option<usize> {
        self.ledger.iter().position(|c| c.name == name)
    }

    pub fn curve(&self, name: &str) -> Option<&CurveRecord> {
        self.curves.iter().find(|c| c.name == name)
    }

    fn name_taken(&self, name: &str) -> bool {
        self.ledger.iter().any(|c| c.name == name) || self.curves.iter().any(|c| c.name == name)
    }

    /// Centers proximate to ledger entry `i`: children plus declared satellites.
    pub fn proximate_to(&self, i: usize) -> Vec<usize> {
        let name = &self.ledger[i].name;
        self.ledger
            .iter()
            .enumerate()
            .filter(|(j, c)| {
                *j != i
                    && (c.parent.as_deref() == Some(name.as_str())
                        || c.satellite_of.contains(name.as_str()))
            })
            .map(|(j, _)| j)
            .collect()
    }

    /// Append a blow-up center. Every reference must resolve to an earlier
    /// ledger entry or a declared curve, and the name must be fresh.
    pub fn blow_up(&self, center: CenterSpec) -> Result<MarkedSurface, SurfaceError> {
        if self.name_taken(&center.name) {
            return Err(SurfaceError::DuplicateName(center.name));
        }
        if let Some(parent) = &center.parent {
            if self.ledger_index(parent).is_none() {
                return Err(SurfaceError::DanglingReference {
                    center: center.name.clone(),
                    what: parent.clone(),
                });
            }
        }
        for s in &center.satellite_of {
            if self.ledger_index(s).is_none() {
                return Err(SurfaceError::DanglingReference {
                    center: center.name.clone(),
                    what: s.clone(),
                });
            }
        }
        for c in &center.on_curves {
            if self.curve(c).is_none() {
                return Err(SurfaceError::DanglingReference {
                    center: center.name.clone(),
                    what: c.clone(),
                });
            }
        }
        let mut next = self.clone();
        // Materialize declared incidences: curves listed on the center gain
        // the multiplicity stated in their record (node = 2, plain = 1)
        // unless an explicit entry already exists.
        for rec in &mut next.curves {
            if center.on_curves.contains(&rec.name) && !rec.mults.contains_key(&center.name) {
                let m = if rec.nodes.contains(&center.name) {
                    Int::from(2)
                } else {
                    Int::one()
                };
                rec.mults.insert(center.name.clone(), m);
            }
        }
        next.ledger.push(center);
        Ok(next)
    }

    /// Class of the strict transform of the exceptional divisor over ledger
    /// entry `i`: `E_i - sum of proximate E_j`.
    pub fn exceptional_strict(&self, i: usize) -> DivisorClass {
        let n = self.ledger.len();
        let mut c = DivisorClass::exceptional(n, i);
        for j in self.proximate_to(i) {
            c.mults[j] = Int::one();
        }
        c
    }

    /// Class of the strict transform of a declared curve, on the full
    /// resolution lattice.
    pub fn curve_class(&self, record: &CurveRecord) -> DivisorClass {
        let mults = self
            .ledger
            .iter()
            .map(|c| record.mult_at(&c.name))
            .collect();
        DivisorClass::from_ints(record.degree.clone(), mults)
    }

    /// Resolve a class identifier to its strict-transform class on the full
    /// resolution lattice.
    pub fn class_of(&self, id: &ClassId) -> Result<DivisorClass, SurfaceError> {
        match id {
            ClassId::Curve(name) => {
                let rec = self
                    .curve(name)
                    .ok_or_else(|| SurfaceError::UnknownCurve(name.clone()))?;
                Ok(self.curve_class(rec))
            }
            ClassId::Exceptional(i) => {
                if *i >= self.ledger.len() {
                    return Err(SurfaceError::UnknownName(format!("E{}", i + 1)));
                }
                Ok(self.exceptional_strict(*i))
            }
        }
    }

    /// Spec-facing strict transform class of a curve. On a contracted model the
    /// class is the same vector; pairings on the model go through
    /// [`MarkedSurface::model_pairing`], which projects out the contracted span.
    pub fn strict_transform_class(&self, curve: &str) -> Result<DivisorClass, SurfaceError> {
        let rec = self
            .curve(curve)
            .ok_or_else(|| SurfaceError::UnknownCurve(curve.to_string()))?;
        Ok(self.curve_class(rec))
    }

    pub fn canonical(&self) -> DivisorClass {
        canonical_class(self.ledger.len())
    }

    fn contracted_classes(&self) -> Vec<DivisorClass> {
        self.contracted
            .iter()
            .map(|id| self.class_of(id).expect("contracted ids resolve"))
            .collect()
    }

    /// Gram matrix of a set of classes under the full-resolution pairing.
    pub fn gram(&self, classes: &[DivisorClass]) -> Vec<Vec<Rat>> {
        classes
            .iter()
            .map(|a| {
                classes
                    .iter()
                    .map(|b| Rat::from_integer(intersect(a, b).expect("same ambient")))
                    .collect()
            })
            .collect()
    }

    /// Pairing of two classes on the current model: full-resolution pairing
    /// corrected by the orthogonal projection away from the contracted span.
    pub fn model_pairing(&self, a: &DivisorClass, b: &DivisorClass) -> Rat {
        let contracted = self.contracted_classes();
        let raw = Rat::from_integer(intersect(a, b).expect("same ambient"));
        if contracted.is_empty() {
            return raw;
        }
        let g = self.gram(&contracted);
        let rhs: Vec<Rat> = contracted
            .iter()
            .map(|c| Rat::from_integer(intersect(b, c).expect("same ambient")))
            .collect();
        let x = solve_symmetric(&g, &rhs).expect("contracted Gram invertible");
        let mut corr = Rat::zero();
        for (xi, c) in x.iter().zip(&contracted) {
            corr += xi * Rat::from_integer(intersect(a, c).expect("same ambient"));
        }
        raw - corr
    }

    /// Whether a class lies in the rational span of the contracted classes,
    /// i.e. is numerically trivial on the current model.
    pub fn is_trivial_on_model(&self, v: &DivisorClass) -> bool {
        let contracted = self.contracted_classes();
        if contracted.is_empty() {
            return v.is_zero();
        }
        let g = self.gram(&contracted);
        let rhs: Vec<Rat> = contracted
            .iter()
            .map(|c| Rat::from_integer(intersect(v, c).expect("same ambient")))
            .collect();
        let x = solve_symmetric(&g, &rhs).expect("contracted Gram invertible");
        // v - sum x_i C_i must vanish coordinatewise.
        let n = self.ledger.len();
        let mut deg = Rat::from_integer(v.degree.clone());
        let mut mults: Vec<Rat> = v.mults.iter().cloned().map(Rat::from_integer).collect();
        for (xi, c) in x.iter().zip(&contracted) {
            deg -= xi * Rat::from_integer(c.degree.clone());
            for k in 0..n {
                let t = xi * Rat::from_integer(c.mults[k].clone());
                mults[k] -= t;
            }
        }
        deg.is_zero() && mults.iter().all(|m| m.is_zero())
    }

    /// Move the named classes to the contracted list. The Gram matrix of the
    /// new classes, projected to the current model, must be negative definite.
    pub fn contract(&self, ids: &[ClassId]) -> Result<MarkedSurface, SurfaceError> {
        for id in ids {
            if self.contracted.contains(id) {
                return Err(SurfaceError::AlreadyContracted(id.to_string()));
            }
            self.class_of(id)?;
        }
        let mut set = BTreeSet::new();
        for id in ids {
            if !set.insert(id.clone()) {
                return Err(SurfaceError::AlreadyContracted(id.to_string()));
            }
        }
        let classes: Vec<DivisorClass> = ids
            .iter()
            .map(|id| self.class_of(id))
            .collect::<Result<_, _>>()?;
        let gram: Vec<Vec<Rat>> = classes
            .iter()
            .map(|a| classes.iter().map(|b| self.model_pairing(a, b)).collect())
            .collect();
        if !is_negative_definite(&gram) {
            return Err(SurfaceError::NotContractible(format!(
                "Gram matrix of {{{}}} is not negative definite on the current model",
                ids.iter()
                    .map(|i| i.to_string())
                    .collect::<Vec<_>>()
                    .join(", ")
            )));
        }
        let mut next = self.clone();
        next.contracted.extend(ids.iter().cloned());
        Ok(next)
    }

    /// Count of declared nodes of a curve not resolved by a blow-up.
    pub fn unresolved_nodes(&self, record: &CurveRecord) -> u32 {
        record
            .nodes
            .iter()
            .filter(|n| self.ledger_index(n).is_none())
            .count() as u32
    }

    /// Report every numerical inconsistency in the declared configuration.
    pub fn validate_configuration(&self) -> ValidationReport {
        let mut violations = Vec::new();
        // Proximity inequalities.
        for rec in &self.curves {
            for (i, center) in self.ledger.iter().enumerate() {
                let have = rec.mult_at(&center.name);
                let need: Int = self
                    .proximate_to(i)
                    .into_iter()
                    .map(|j| rec.mult_at(&self.ledger[j].name))
                    .sum();
                if have < need {
                    violations.push(Violation::ProximityInequality {
                        curve: rec.name.clone(),
                        center: center.name.clone(),
                        have,
                        need,
                    });
                }
            }
        }
        // Genus: the class genus minus unresolved nodes must stay nonnegative.
        for rec in &self.curves {
            let class = self.curve_class(rec);
            let pa = arithmetic_genus(&class);
            let geometric = pa.clone() - Rat::from_integer(Int::from(self.unresolved_nodes(rec)));
            if geometric.is_negative() {
                violations.push(Violation::NegativeGenus {
                    curve: rec.name.clone(),
                    genus: geometric,
                });
            }
        }
        // Distinct declared curves must have nonnegative strict pairing.
        for (i, a) in self.curves.iter().enumerate() {
            for b in &self.curves[i + 1..] {
                let pa = intersect(&self.curve_class(a), &self.curve_class(b))
                    .expect("same ambient");
                if pa.is_negative() {
                    violations.push(Violation::NegativePairing {
                        left: a.name.clone(),
                        right: b.name.clone(),
                        pairing: pa,
                    });
                }
            }
        }
        ValidationReport { violations }
    }

    /// Dual graph of a class selection: edge multiplicities are the pairwise
    /// strict-transform pairings (negative pairings are an error), loops count
    /// the unresolved declared nodes of curve vertices.
    pub fn dual_graph(&self, selection: &[ClassId]) -> Result<Graph, SurfaceError> {
        let classes: Vec<DivisorClass> = selection
            .iter()
            .map(|id| self.class_of(id))
            .collect::<Result<_, _>>()?;
        let mut edges = BTreeMap::new();
        for i in 0..selection.len() {
            for j in i + 1..selection.len() {
                let p = intersect(&classes[i], &classes[j]).expect("same ambient");
                if p.is_negative() {
                    return Err(SurfaceError::NegativeEdge {
                        left: selection[i].to_string(),
                        right: selection[j].to_string(),
                        pairing: p.to_string(),
                    });
                }
                if !p.is_zero() {
                    let m = u32::try_from(&p).expect("small edge multiplicity");
                    edges.insert((i, j), m);
                }
            }
        }
        let loops = selection
            .iter()
            .map(|id| match id {
                ClassId::Curve(name) => self
                    .curve(name)
                    .map(|rec| self.unresolved_nodes(rec))
                    .unwrap_or(0),
                ClassId::Exceptional(_) => 0,
            })
            .collect();
        Ok(Graph {
            vertices: selection.to_vec(),
            edges,
            loops,
        })
    }

    /// All class identifiers that are divisors on the current model.
    pub fn surviving_classes(&self) -> Vec<ClassId> {
        let mut out = Vec::new();
        for rec in &self.curves {
            let id = ClassId::Curve(rec.name.clone());
            if !self.contracted.contains(&id) {
                out.push(id);
            }
        }
        for i in 0..self.ledger.len() {
            let id = ClassId::Exceptional(i);
            if !self.contracted.contains(&id) {
                out.push(id);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(x: i64) -> Rat {
        Rat::from_integer(Int::from(x))
    }

    #[test]
    fn single_blowup_rank_and_exceptional() {
        let s = MarkedSurface::plane()
            .blow_up(CenterSpec::proper("p"))
            .unwrap();
        assert_eq!(s.rank(), 2);
        let e = s.exceptional_strict(0);
        assert_eq!(intersect(&e, &e).unwrap(), Int::from(-1));
    }

    #[test]
    fn nodal_cubic_node_blowup() {
        let c = CurveRecord::new("C", 3).node("N");
        let s = MarkedSurface::with_curves(vec![c])
            .blow_up(CenterSpec::proper("N").on("C"))
            .unwrap();
        let class = s.strict_transform_class("C").unwrap();
        assert_eq!(class, DivisorClass::new(3, vec![2]));
        assert_eq!(intersect(&class, &class).unwrap(), Int::from(5));
    }

    #[test]
    fn flex_chain_three_centers() {
        // Three successive centers over a flex P along C: E_1, E_2 become
        // (-2)-classes, E_3 a (-1)-class, C-transform (3;1,1,1) of self-int 6.
        let c = CurveRecord::new("C", 3).node("N");
        let mut s = MarkedSurface::with_curves(vec![c]);
        s = s.blow_up(CenterSpec::proper("P").on("C")).unwrap();
        s = s.blow_up(CenterSpec::over("x2", "P").on("C")).unwrap();
        s = s.blow_up(CenterSpec::over("x3", "x2").on("C")).unwrap();
        let e1 = s.exceptional_strict(0);
        let e2 = s.exceptional_strict(1);
        let e3 = s.exceptional_strict(2);
        assert_eq!(intersect(&e1, &e1).unwrap(), Int::from(-2));
        assert_eq!(intersect(&e2, &e2).unwrap(), Int::from(-2));
        assert_eq!(intersect(&e3, &e3).unwrap(), Int::from(-1));
        let ct = s.strict_transform_class("C").unwrap();
        assert_eq!(ct, DivisorClass::new(3, vec![1, 1, 1]));
        assert_eq!(intersect(&ct, &ct).unwrap(), Int::from(6));
    }

    #[test]
    fn contract_examples() {
        // A single (-1)-class drops the rank by one.
        let s = MarkedSurface::plane()
            .blow_up(CenterSpec::proper("p"))
            .unwrap();
        let s2 = s.contract(&[ClassId::Exceptional(0)]).unwrap();
        assert_eq!(s2.rank(), 1);

        // An A_2 chain from a 2-step infinitely near ledger is contractible.
        let s = MarkedSurface::plane()
            .blow_up(CenterSpec::proper("p"))
            .unwrap()
            .blow_up(CenterSpec::over("q", "p"))
            .unwrap();
        let e1 = s.exceptional_strict(0);
        assert_eq!(intersect(&e1, &e1).unwrap(), Int::from(-2));
        assert!(s
            .contract(&[ClassId::Exceptional(0), ClassId::Exceptional(1)])
            .is_ok());
    }

    #[test]
    fn contract_cremona_lines_is_valid() {
        // The three lines between three blown-up points are disjoint
        // (-1)-classes, the standard Cremona contraction.
        let l1 = CurveRecord::new("L1", 1).mult("a", 1).mult("b", 1);
        let l2 = CurveRecord::new("L2", 1).mult("b", 1).mult("c", 1);
        let l3 = CurveRecord::new("L3", 1).mult("a", 1).mult("c", 1);
        let mut s = MarkedSurface::with_curves(vec![l1, l2, l3]);
        for p in ["a", "b", "c"] {
            s = s.blow_up(CenterSpec::proper(p)).unwrap();
        }
        let s = s
            .contract(&[
                ClassId::Curve("L1".into()),
                ClassId::Curve("L2".into()),
                ClassId::Curve("L3".into()),
            ])
            .unwrap();
        assert_eq!(s.rank(), 1);
    }

    #[test]
    fn contract_rejects_cycle() {
        // Three (-2)-lines pairwise meeting transversally at undeclared
        // points form an affine A_2 cycle: singular Gram, not contractible.
        let l1 = CurveRecord::new("L1", 1).mult("a1", 1).mult("a2", 1).mult("a3", 1);
        let l2 = CurveRecord::new("L2", 1).mult("b1", 1).mult("b2", 1).mult("b3", 1);
        let l3 = CurveRecord::new("L3", 1).mult("c1", 1).mult("c2", 1).mult("c3", 1);
        let mut s = MarkedSurface::with_curves(vec![l1, l2, l3]);
        for p in ["a1", "a2", "a3", "b1", "b2", "b3", "c1", "c2", "c3"] {
            s = s.blow_up(CenterSpec::proper(p)).unwrap();
        }
        let err = s
            .contract(&[
                ClassId::Curve("L1".into()),
                ClassId::Curve("L2".into()),
                ClassId::Curve("L3".into()),
            ])
            .unwrap_err();
        match err {
            SurfaceError::NotContractible(_) => {}
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn validate_flags_bad_genus() {
        let l = CurveRecord::new("L", 1).mult("p", 2);
        let s = MarkedSurface::with_curves(vec![l])
            .blow_up(CenterSpec::proper("p"))
            .unwrap();
        let report = s.validate_configuration();
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::NegativeGenus { .. })));
    }

    #[test]
    fn validate_flags_negative_pairing() {
        let l1 = CurveRecord::new("L1", 1).mult("p", 1).mult("q", 1);
        let l2 = CurveRecord::new("L2", 1).mult("p", 1).mult("q", 1);
        let mut s = MarkedSurface::with_curves(vec![l1, l2]);
        s = s.blow_up(CenterSpec::proper("p")).unwrap();
        s = s.blow_up(CenterSpec::proper("q")).unwrap();
        let report = s.validate_configuration();
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::NegativePairing { .. })));
    }

    #[test]
    fn validate_flags_proximity() {
        // Curve with multiplicity 1 at p but two proximate points of mult 1.
        let c = CurveRecord::new("C", 2).mult("p", 1).mult("q", 1).mult("r", 1);
        let mut s = MarkedSurface::with_curves(vec![c]);
        s = s.blow_up(CenterSpec::proper("p")).unwrap();
        s = s.blow_up(CenterSpec::over("q", "p")).unwrap();
        s = s.blow_up(CenterSpec::over("r", "p")).unwrap();
        let report = s.validate_configuration();
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::ProximityInequality { .. })));
    }

    #[test]
    fn dual_graph_examples() {
        // Chain of two exceptionals over an infinitely near pair.
        let s = MarkedSurface::plane()
            .blow_up(CenterSpec::proper("p"))
            .unwrap()
            .blow_up(CenterSpec::over("q", "p"))
            .unwrap();
        let g = s
            .dual_graph(&[ClassId::Exceptional(0), ClassId::Exceptional(1)])
            .unwrap();
        assert_eq!(g.vertices.len(), 2);
        assert_eq!(g.edge_count(), 1);

        // Boundary triangle of three general lines: a 3-cycle.
        let lines = vec![
            CurveRecord::new("L1", 1),
            CurveRecord::new("L2", 1),
            CurveRecord::new("L3", 1),
        ];
        let s = MarkedSurface::with_curves(lines);
        let g = s
            .dual_graph(&[
                ClassId::Curve("L1".into()),
                ClassId::Curve("L2".into()),
                ClassId::Curve("L3".into()),
            ])
            .unwrap();
        assert_eq!(g.edge_count(), 3);
        assert!(g.components().len() == 1);

        // Nodal cubic alone: one vertex with one loop.
        let s = MarkedSurface::with_curves(vec![CurveRecord::new("C", 3).node("N")]);
        let g = s.dual_graph(&[ClassId::Curve("C".into())]).unwrap();
        assert_eq!(g.loops, vec![1]);
    }

    #[test]
    fn unimodular_generators_after_blowups() {
        let mut s = MarkedSurface::plane();
        for name in ["a", "b", "c"] {
            s = s.blow_up(CenterSpec::proper(name)).unwrap();
        }
        let n = s.blowup_count();
        let h = DivisorClass::new(1, vec![0; n]);
        assert_eq!(intersect(&h, &h).unwrap(), Int::from(1));
        for i in 0..n {
            let ei = DivisorClass::exceptional(n, i);
            assert_eq!(intersect(&ei, &ei).unwrap(), Int::from(-1));
            assert_eq!(intersect(&h, &ei).unwrap(), Int::zero());
            for j in 0..i {
                let ej = DivisorClass::exceptional(n, j);
                assert_eq!(intersect(&ei, &ej).unwrap(), Int::zero());
            }
        }
    }

    #[test]
    fn model_pairing_projects_contracted() {
        // Quadric model: blow up two points, contract the connecting line.
        let d12 = CurveRecord::new("D12", 1).mult("p1", 1).mult("p2", 1);
        let mut s = MarkedSurface::with_curves(vec![d12]);
        s = s.blow_up(CenterSpec::proper("p1")).unwrap();
        s = s.blow_up(CenterSpec::proper("p2")).unwrap();
        s = s.contract(&[ClassId::Curve("D12".into())]).unwrap();
        // E_{p1} becomes a ruling fiber: self-intersection 0 on the model.
        let e1 = s.exceptional_strict(0);
        assert_eq!(s.model_pairing(&e1, &e1), q(0));
        assert_eq!(s.rank(), 2);
    }

    #[test]
    fn validation_is_idempotent() {
        let l = CurveRecord::new("L", 1).mult("p", 2);
        let s = MarkedSurface::with_curves(vec![l])
            .blow_up(CenterSpec::proper("p"))
            .unwrap();
        let a = s.validate_configuration();
        let b = s.validate_configuration();
        assert_eq!(a.violations, b.violations);
    }
}
