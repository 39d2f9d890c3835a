//! Classification of contracted (-2)-configurations into ADE Dynkin labels.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::PairError;
use crate::surface::{ClassId, Graph, MarkedSurface};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AdeKind {
    A,
    D,
    E,
}

/// One Dynkin label: A_n (n >= 1), D_n (n >= 4), E_n (n in {6,7,8}).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SingularityLabel {
    pub kind: AdeKind,
    pub rank: u32,
}

impl SingularityLabel {
    pub fn new(kind: AdeKind, rank: u32) -> Result<Self, PairError> {
        let ok = match kind {
            AdeKind::A => rank >= 1,
            AdeKind::D => rank >= 4,
            AdeKind::E => (6..=8).contains(&rank),
        };
        if !ok {
            return Err(PairError::NotAde(format!(
                "invalid label {:?}{}",
                kind, rank
            )));
        }
        Ok(SingularityLabel { kind, rank })
    }
}

impl fmt::Display for SingularityLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let k = match self.kind {
            AdeKind::A => "A",
            AdeKind::D => "D",
            AdeKind::E => "E",
        };
        write!(f, "{}{}", k, self.rank)
    }
}

/// A multiset of Dynkin labels with the paper's ordering: E before D before A,
/// descending rank, multiplicity prefix for repeats (`2A4`, `D4+3A1`).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LabelSet {
    counts: BTreeMap<(u8, u32), u32>,
}

fn sort_key(l: &SingularityLabel) -> (u8, u32) {
    // Smaller key prints first: E < D < A, then descending rank.
    let kind = match l.kind {
        AdeKind::E => 0u8,
        AdeKind::D => 1,
        AdeKind::A => 2,
    };
    (kind, u32::MAX - l.rank)
}

fn key_label(key: (u8, u32)) -> SingularityLabel {
    let kind = match key.0 {
        0 => AdeKind::E,
        1 => AdeKind::D,
        _ => AdeKind::A,
    };
    SingularityLabel {
        kind,
        rank: u32::MAX - key.1,
    }
}

impl LabelSet {
    pub fn from_labels(labels: impl IntoIterator<Item = SingularityLabel>) -> Self {
        let mut counts = BTreeMap::new();
        for l in labels {
            *counts.entry(sort_key(&l)).or_insert(0) += 1;
        }
        LabelSet { counts }
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn labels(&self) -> Vec<SingularityLabel> {
        let mut out = Vec::new();
        for (&key, &count) in &self.counts {
            for _ in 0..count {
                out.push(key_label(key));
            }
        }
        out
    }

    pub fn total_rank(&self) -> u32 {
        self.labels().iter().map(|l| l.rank).sum()
    }

    pub fn all_a_type(&self) -> bool {
        self.labels().iter().all(|l| l.kind == AdeKind::A)
    }
}

impl fmt::Display for LabelSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.counts.is_empty() {
            return write!(f, "none");
        }
        let mut first = true;
        for (&key, &count) in &self.counts {
            if !first {
                write!(f, "+")?;
            }
            first = false;
            if count > 1 {
                write!(f, "{}{}", count, key_label(key))?;
            } else {
                write!(f, "{}", key_label(key))?;
            }
        }
        Ok(())
    }
}

impl FromStr for LabelSet {
    type Err = String;

    /// Parses `E8`, `A4+A4`, `D4+3A1`, `none`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() || s == "none" {
            return Ok(LabelSet::default());
        }
        let mut labels = Vec::new();
        for part in s.split('+') {
            let part = part.trim();
            let bytes = part.as_bytes();
            let mut i = 0;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let (mult, rest) = if i > 0 {
                (
                    part[..i].parse::<u32>().map_err(|e| e.to_string())?,
                    &part[i..],
                )
            } else {
                (1, part)
            };
            if rest.is_empty() {
                return Err(format!("bad singularity label `{}`", part));
            }
            let kind = match &rest[..1] {
                "A" => AdeKind::A,
                "D" => AdeKind::D,
                "E" => AdeKind::E,
                other => return Err(format!("bad singularity kind `{}`", other)),
            };
            let rank: u32 = rest[1..]
                .parse()
                .map_err(|_| format!("bad rank in `{}`", part))?;
            let label = SingularityLabel::new(kind, rank).map_err(|e| e.to_string())?;
            for _ in 0..mult {
                labels.push(label);
            }
        }
        Ok(LabelSet::from_labels(labels))
    }
}

/// Classify each connected component of a (-2)-dual-graph into its Dynkin
/// label. Components that are not of ADE shape (cycles, loops, multiple
/// edges, degree >= 4, bad arm patterns) are rejected.
pub fn classify_ade(graph: &Graph) -> Result<LabelSet, PairError> {
    let mut labels = Vec::new();
    for comp in graph.components() {
        labels.push(classify_component(graph, &comp)?);
    }
    Ok(LabelSet::from_labels(labels))
}

fn classify_component(graph: &Graph, comp: &[usize]) -> Result<SingularityLabel, PairError> {
    let n = comp.len() as u32;
    for &v in comp {
        if graph.loops[v] > 0 {
            return Err(PairError::NotAde(format!(
                "vertex `{}` has a loop",
                graph.vertices[v]
            )));
        }
    }
    for (&(a, b), &m) in &graph.edges {
        if m > 1 && comp.contains(&a) && comp.contains(&b) {
            return Err(PairError::NotAde(format!(
                "multiple edge between `{}` and `{}`",
                graph.vertices[a], graph.vertices[b]
            )));
        }
    }
    let edge_count: u32 = graph
        .edges
        .iter()
        .filter(|(&(a, b), _)| comp.contains(&a) && comp.contains(&b))
        .map(|(_, &m)| m)
        .sum();
    if edge_count != n - 1 {
        return Err(PairError::NotAde(
            "component contains a cycle (not negative definite)".into(),
        ));
    }
    let degrees: Vec<u32> = comp.iter().map(|&v| graph.degree(v)).collect();
    if degrees.iter().any(|&d| d >= 4) {
        return Err(PairError::NotAde("vertex of degree >= 4".into()));
    }
    let forks: Vec<usize> = comp
        .iter()
        .zip(&degrees)
        .filter(|(_, &d)| d == 3)
        .map(|(&v, _)| v)
        .collect();
    match forks.len() {
        0 => SingularityLabel::new(AdeKind::A, n),
        1 => {
            let fork = forks[0];
            let mut arms = arm_lengths(graph, comp, fork);
            arms.sort_unstable();
            match (arms[0], arms[1], arms[2]) {
                (1, 1, _) => SingularityLabel::new(AdeKind::D, n),
                (1, 2, 2) => SingularityLabel::new(AdeKind::E, 6),
                (1, 2, 3) => SingularityLabel::new(AdeKind::E, 7),
                (1, 2, 4) => SingularityLabel::new(AdeKind::E, 8),
                _ => Err(PairError::NotAde(format!(
                    "fork with arm lengths {:?} is not ADE",
                    arms
                ))),
            }
        }
        _ => Err(PairError::NotAde("more than one fork vertex".into())),
    }
}

fn arm_lengths(graph: &Graph, comp: &[usize], fork: usize) -> Vec<u32> {
    let neighbors = |v: usize| -> Vec<usize> {
        graph
            .edges
            .iter()
            .filter(|(_, &m)| m > 0)
            .filter_map(|(&(a, b), _)| {
                if a == v {
                    Some(b)
                } else if b == v {
                    Some(a)
                } else {
                    None
                }
            })
            .filter(|x| comp.contains(x))
            .collect()
    };
    neighbors(fork)
        .into_iter()
        .map(|start| {
            let mut len = 1u32;
            let mut prev = fork;
            let mut cur = start;
            loop {
                let next: Vec<usize> = neighbors(cur).into_iter().filter(|&x| x != prev).collect();
                match next.as_slice() {
                    [] => break,
                    [only] => {
                        prev = cur;
                        cur = *only;
                        len += 1;
                    }
                    _ => break, // second fork; caught by caller's fork count
                }
            }
            len
        })
        .collect()
}

/// True iff every contracted ADE component of the surface is of A type.
/// Contracted components whose Gram determinant is a unit contract to smooth
/// points and are skipped; everything else must classify as ADE.
pub fn is_a_type_only(surface: &MarkedSurface) -> Result<bool, PairError> {
    Ok(contracted_singularities(surface)?.all_a_type())
}

/// ADE labels of the contracted configuration of a surface, skipping
/// components that contract to smooth points (unimodular Gram).
pub fn contracted_singularities(surface: &MarkedSurface) -> Result<LabelSet, PairError> {
    use crate::lattice::{intersect, Int, Rat};
    use num_traits::{One, Signed};

    let ids: Vec<ClassId> = surface.contracted.clone();
    if ids.is_empty() {
        return Ok(LabelSet::default());
    }
    let classes: Vec<_> = ids
        .iter()
        .map(|id| surface.class_of(id).expect("contracted resolve"))
        .collect();
    // Build the full dual graph without the negative-edge restriction: the
    // contraction precondition already guarantees nonnegative off-diagonals.
    let graph = surface.dual_graph(&ids).map_err(PairError::from)?;
    let mut labels = Vec::new();
    for comp in graph.components() {
        let all_minus_two = comp.iter().all(|&v| {
            intersect(&classes[v], &classes[v]).expect("same ambient") == Int::from(-2)
        });
        if all_minus_two {
            labels.push(classify_component(&graph, &comp)?);
            continue;
        }
        // Determinant of the component Gram: |det| = 1 means a smooth point.
        let sub: Vec<Vec<Rat>> = comp
            .iter()
            .map(|&i| {
                comp.iter()
                    .map(|&j| {
                        Rat::from_integer(
                            intersect(&classes[i], &classes[j]).expect("same ambient"),
                        )
                    })
                    .collect()
            })
            .collect();
        let det = det_rat(&sub);
        if det.abs() == Rat::one() {
            continue;
        }
        return Err(PairError::NotAde(format!(
            "contracted component {{{}}} is neither a smooth point nor a (-2)-configuration",
            comp.iter()
                .map(|&i| ids[i].to_string())
                .collect::<Vec<_>>()
                .join(", ")
        )));
    }
    Ok(LabelSet::from_labels(labels))
}

fn det_rat(m: &[Vec<crate::lattice::Rat>]) -> crate::lattice::Rat {
    use crate::lattice::Rat;
    use num_traits::{One, Zero};
    let n = m.len();
    let mut a = m.to_vec();
    let mut det = Rat::one();
    for col in 0..n {
        let pivot = match (col..n).find(|&r| !a[r][col].is_zero()) {
            Some(p) => p,
            None => return Rat::zero(),
        };
        if pivot != col {
            a.swap(col, pivot);
            det = -det;
        }
        det *= a[col][col].clone();
        for r in col + 1..n {
            if !a[r][col].is_zero() {
                let f = &a[r][col] / &a[col][col];
                for j in col..n {
                    let t = &a[col][j] * &f;
                    a[r][j] = &a[r][j] - &t;
                }
            }
        }
    }
    det
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap as M;

    fn graph(n: usize, edges: &[(usize, usize)]) -> Graph {
        let mut e = M::new();
        for &(a, b) in edges {
            let key = if a < b { (a, b) } else { (b, a) };
            *e.entry(key).or_insert(0) += 1;
        }
        Graph {
            vertices: (0..n).map(ClassId::Exceptional).collect(),
            edges: e,
            loops: vec![0; n],
        }
    }

    #[test]
    fn classify_paths_and_forks() {
        let a4 = classify_ade(&graph(4, &[(0, 1), (1, 2), (2, 3)])).unwrap();
        assert_eq!(a4.to_string(), "A4");

        // E8: path of 7 with the branch at the third vertex from one end.
        let e8 = classify_ade(&graph(
            8,
            &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (2, 7)],
        ))
        .unwrap();
        assert_eq!(e8.to_string(), "E8");

        let two_a4 = classify_ade(&graph(8, &[(0, 1), (1, 2), (2, 3), (4, 5), (5, 6), (6, 7)]))
            .unwrap();
        assert_eq!(two_a4.to_string(), "2A4");
        assert_eq!(two_a4, "A4+A4".parse().unwrap());
    }

    #[test]
    fn classify_d_and_e_shapes() {
        assert_eq!(
            classify_ade(&graph(4, &[(0, 1), (0, 2), (0, 3)]))
                .unwrap()
                .to_string(),
            "D4"
        );
        assert_eq!(
            classify_ade(&graph(5, &[(0, 1), (0, 2), (0, 3), (3, 4)]))
                .unwrap()
                .to_string(),
            "D5"
        );
        assert_eq!(
            classify_ade(&graph(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (2, 5)]))
                .unwrap()
                .to_string(),
            "E6"
        );
        assert_eq!(
            classify_ade(&graph(7, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (2, 6)]))
                .unwrap()
                .to_string(),
            "E7"
        );
    }

    #[test]
    fn rejects_non_ade() {
        assert!(classify_ade(&graph(3, &[(0, 1), (1, 2), (0, 2)])).is_err());
        assert!(classify_ade(&graph(2, &[(0, 1), (0, 1)])).is_err());
        // Degree four star.
        assert!(classify_ade(&graph(5, &[(0, 1), (0, 2), (0, 3), (0, 4)])).is_err());
        // Two forks.
        assert!(classify_ade(&graph(
            8,
            &[(0, 1), (1, 2), (2, 3), (3, 4), (1, 5), (3, 6), (4, 7)]
        ))
        .is_err());
        // Arms (2,2,2) = affine E6.
        assert!(classify_ade(&graph(
            7,
            &[(0, 1), (1, 2), (0, 3), (3, 4), (0, 5), (5, 6)]
        ))
        .is_err());
    }

    #[test]
    fn label_parsing_and_printing() {
        let s: LabelSet = "D4+3A1".parse().unwrap();
        assert_eq!(s.to_string(), "D4+3A1");
        assert_eq!(s.total_rank(), 7);
        let s: LabelSet = "A2+A2+A2+A2".parse().unwrap();
        assert_eq!(s.to_string(), "4A2");
        let s: LabelSet = "E7+A1".parse().unwrap();
        assert_eq!(s.to_string(), "E7+A1");
        assert!("Z4".parse::<LabelSet>().is_err());
        assert!("E5".parse::<LabelSet>().is_err());
        assert_eq!("none".parse::<LabelSet>().unwrap(), LabelSet::default());
    }

    #[test]
    fn ranks_sum_to_vertices() {
        let g = graph(7, &[(0, 1), (1, 2), (3, 4), (4, 5), (5, 6), (3, 5)]);
        // Last component has a cycle and is rejected entirely.
        assert!(classify_ade(&g).is_err());
        let g = graph(7, &[(0, 1), (1, 2), (3, 4), (4, 5), (5, 6)]);
        let labels = classify_ade(&g).unwrap();
        assert_eq!(labels.total_rank(), 7);
    }
}
