use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{IncidenceScalar, Weight};

/// Equalizer type, by which cell subsets it joins.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EdgeKind {
    /// cell to cell
    #[serde(rename = "CC")]
    Cc,
    /// module to module
    #[serde(rename = "MM")]
    Mm,
    /// cell to pack to cell
    #[serde(rename = "CPC")]
    Cpc,
    /// cell to module to cell
    #[serde(rename = "CMC")]
    Cmc,
}

impl EdgeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EdgeKind::Cc => "CC",
            EdgeKind::Mm => "MM",
            EdgeKind::Cpc => "CPC",
            EdgeKind::Cmc => "CMC",
        }
    }
}

impl fmt::Display for EdgeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EdgeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "CC" => Ok(EdgeKind::Cc),
            "MM" => Ok(EdgeKind::Mm),
            "CPC" => Ok(EdgeKind::Cpc),
            "CMC" => Ok(EdgeKind::Cmc),
            other => Err(Error::InvalidEdge(format!("unknown edge kind {other:?}"))),
        }
    }
}

/// One equalizer as a directed hyperedge: a head and a tail set of cells
/// (1-based, sorted) with kind-determined weights.
#[derive(Clone, Debug, PartialEq)]
pub struct Hyperedge {
    kind: EdgeKind,
    head: Vec<usize>,
    tail: Vec<usize>,
    current_limit: f64,
}

impl Hyperedge {
    pub fn new(kind: EdgeKind, head: Vec<usize>, tail: Vec<usize>, current_limit: f64) -> Result<Self> {
        let head = normalize(head, "head")?;
        let tail = normalize(tail, "tail")?;
        if let Some(c) = head.iter().find(|c| tail.binary_search(c).is_ok()) {
            return Err(Error::InvalidEdge(format!("cell {c} is in both head and tail")));
        }
        if !(current_limit.is_finite() && current_limit >= 0.0) {
            return Err(Error::InvalidEdge(format!("current limit {current_limit} must be finite and >= 0")));
        }
        let (h, t) = (head.len(), tail.len());
        let ok = match kind {
            EdgeKind::Cc => h == 1 && t == 1,
            EdgeKind::Mm => h == t,
            EdgeKind::Cpc | EdgeKind::Cmc => h == 1,
        };
        if !ok {
            return Err(Error::InvalidEdge(format!("{kind} edge cannot have |head| = {h}, |tail| = {t}")));
        }
        Ok(Self { kind, head, tail, current_limit })
    }

    pub fn cc(i: usize, j: usize, current_limit: f64) -> Result<Self> {
        Self::new(EdgeKind::Cc, vec![i], vec![j], current_limit)
    }

    pub fn mm(
        head: impl IntoIterator<Item = usize>,
        tail: impl IntoIterator<Item = usize>,
        current_limit: f64,
    ) -> Result<Self> {
        Self::new(EdgeKind::Mm, head.into_iter().collect(), tail.into_iter().collect(), current_limit)
    }

    /// Cell `cell` against every other cell of `group` (the pack for CPC,
    /// its module for CMC).
    pub fn star(
        kind: EdgeKind,
        cell: usize,
        group: impl IntoIterator<Item = usize>,
        current_limit: f64,
    ) -> Result<Self> {
        let tail = group.into_iter().filter(|&c| c != cell).collect();
        Self::new(kind, vec![cell], tail, current_limit)
    }

    pub fn kind(&self) -> EdgeKind {
        self.kind
    }

    pub fn head(&self) -> &[usize] {
        &self.head
    }

    pub fn tail(&self) -> &[usize] {
        &self.tail
    }

    pub fn current_limit(&self) -> f64 {
        self.current_limit
    }

    /// Number of cells the edge touches (`b` for CMC, `n` for CPC).
    pub fn span(&self) -> usize {
        self.head.len() + self.tail.len()
    }

    pub fn head_weight(&self) -> Weight {
        match self.kind {
            EdgeKind::Cc | EdgeKind::Mm => Weight::from_integer(1),
            EdgeKind::Cpc | EdgeKind::Cmc => {
                let b = self.span() as i64;
                Weight::new(b - 1, b)
            }
        }
    }

    pub fn tail_weight(&self) -> Weight {
        match self.kind {
            EdgeKind::Cc | EdgeKind::Mm => Weight::from_integer(-1),
            EdgeKind::Cpc | EdgeKind::Cmc => Weight::new(-1, self.span() as i64),
        }
    }

    /// Checks the edge against a pack of `n` cells.
    pub fn validate_for(&self, n: usize) -> Result<()> {
        if let Some(&index) = self.head.iter().chain(&self.tail).find(|&&c| c > n) {
            return Err(Error::IndexOutOfRange { index, n });
        }
        if self.kind == EdgeKind::Cpc && self.span() != n {
            return Err(Error::InvalidEdge(format!("CPC edge must touch all {n} cells, touches {}", self.span())));
        }
        Ok(())
    }

    pub fn with_head(&self, cell: usize) -> Result<Self> {
        let group = self.head.iter().chain(&self.tail).copied().collect::<Vec<_>>();
        if !group.contains(&cell) {
            return Err(Error::InvalidEdge(format!("cell {cell} is not covered by the edge")));
        }
        Self::star(self.kind, cell, group, self.current_limit)
    }

    /// Exact incidence column: head weight on head cells, tail weight on
    /// tail cells, zero elsewhere.
    pub fn incidence_weights(&self, n: usize) -> Result<Vec<Weight>> {
        self.validate_for(n)?;
        let mut c = vec![Weight::from_integer(0); n];
        for &p in &self.head {
            c[p - 1] = self.head_weight();
        }
        for &p in &self.tail {
            c[p - 1] = self.tail_weight();
        }
        Ok(c)
    }
}

fn normalize(mut cells: Vec<usize>, what: &str) -> Result<Vec<usize>> {
    if cells.is_empty() {
        return Err(Error::InvalidEdge(format!("{what} is empty")));
    }
    if cells.contains(&0) {
        return Err(Error::InvalidEdge(format!("{what} contains index 0; cells are numbered from 1")));
    }
    cells.sort_unstable();
    let len = cells.len();
    cells.dedup();
    if cells.len() != len {
        return Err(Error::InvalidEdge(format!("{what} lists a cell twice")));
    }
    Ok(cells)
}

/// Incidence vector of `edge` in a pack of `n` cells.
pub fn incidence_vector<T: IncidenceScalar>(edge: &Hyperedge, n: usize) -> Result<Vec<T>> {
    Ok(edge.incidence_weights(n)?.into_iter().map(T::from_weight).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cc_vector() {
        let e = Hyperedge::cc(1, 2, 0.5).unwrap();
        assert_eq!(incidence_vector::<f64>(&e, 4).unwrap(), vec![1.0, -1.0, 0.0, 0.0]);
    }

    #[test]
    fn cpc_vector() {
        let e = Hyperedge::star(EdgeKind::Cpc, 1, 1..=4, 0.5).unwrap();
        assert_eq!(incidence_vector::<f64>(&e, 4).unwrap(), vec![0.75, -0.25, -0.25, -0.25]);
    }

    #[test]
    fn mm_vector() {
        let e = Hyperedge::mm([1, 2], [3, 4], 0.5).unwrap();
        assert_eq!(incidence_vector::<f64>(&e, 4).unwrap(), vec![1.0, 1.0, -1.0, -1.0]);
    }

    #[test]
    fn cmc_vector_inside_module() {
        let e = Hyperedge::star(EdgeKind::Cmc, 1, 1..=4, 0.5).unwrap();
        assert_eq!(incidence_vector::<f64>(&e, 8).unwrap(), vec![0.75, -0.25, -0.25, -0.25, 0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn exact_columns_sum_to_zero() {
        for e in [
            Hyperedge::cc(3, 1, 1.0).unwrap(),
            Hyperedge::mm([1, 2, 3], [4, 5, 6], 1.0).unwrap(),
            Hyperedge::star(EdgeKind::Cpc, 2, 1..=7, 1.0).unwrap(),
            Hyperedge::star(EdgeKind::Cmc, 5, 4..=6, 1.0).unwrap(),
        ] {
            let s: Weight = e.incidence_weights(7).unwrap().into_iter().sum();
            assert_eq!(s, Weight::from_integer(0));
        }
    }

    #[test]
    fn rejects_bad_edges() {
        assert!(Hyperedge::cc(1, 1, 0.5).is_err());
        assert!(Hyperedge::new(EdgeKind::Cc, vec![], vec![2], 0.5).is_err());
        assert!(Hyperedge::new(EdgeKind::Cc, vec![0], vec![2], 0.5).is_err());
        assert!(Hyperedge::mm([1, 2], [3], 0.5).is_err());
        assert!(Hyperedge::new(EdgeKind::Cpc, vec![1, 2], vec![3], 0.5).is_err());
        assert!(Hyperedge::cc(1, 2, -0.1).is_err());
        assert!(Hyperedge::new(EdgeKind::Mm, vec![1, 1], vec![2, 3], 0.5).is_err());
        let e = Hyperedge::cc(1, 5, 0.5).unwrap();
        assert_eq!(incidence_vector::<f64>(&e, 4), Err(Error::IndexOutOfRange { index: 5, n: 4 }));
        let partial_cpc = Hyperedge::star(EdgeKind::Cpc, 1, 1..=3, 0.5).unwrap();
        assert!(incidence_vector::<f64>(&partial_cpc, 4).is_err());
    }
}
