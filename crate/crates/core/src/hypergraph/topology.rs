use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::hypergraph::edge::{incidence_vector, EdgeKind, Hyperedge};
use crate::linalg::Matrix;
use crate::scalar::{IncidenceScalar, Real};

/// The six canonical equalization structures.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TopologyKind {
    SeriesCc,
    ModuleCc,
    LayerCc,
    Cpc,
    ModuleCpc,
    SwitchCpc,
}

impl TopologyKind {
    pub const ALL: [TopologyKind; 6] = [
        TopologyKind::SeriesCc,
        TopologyKind::ModuleCc,
        TopologyKind::LayerCc,
        TopologyKind::Cpc,
        TopologyKind::ModuleCpc,
        TopologyKind::SwitchCpc,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TopologyKind::SeriesCc => "series-cc",
            TopologyKind::ModuleCc => "module-cc",
            TopologyKind::LayerCc => "layer-cc",
            TopologyKind::Cpc => "cpc",
            TopologyKind::ModuleCpc => "module-cpc",
            TopologyKind::SwitchCpc => "switch-cpc",
        }
    }

    /// Stable numeric id, used to derive random substreams.
    pub fn id(self) -> u64 {
        self as u64
    }

    pub fn uses_modules(self) -> bool {
        matches!(self, TopologyKind::ModuleCc | TopologyKind::ModuleCpc)
    }
}

impl fmt::Display for TopologyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TopologyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('_', "-");
        TopologyKind::ALL
            .into_iter()
            .find(|k| k.as_str() == key)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown topology kind {s:?}")))
    }
}

impl serde::Serialize for TopologyKind {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> serde::Deserialize<'de> for TopologyKind {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// An equalization system: `n` cells and an ordered list of equalizers.
///
/// A switched topology holds a single CPC template whose head is relocated to
/// the highest-SOC cell at every step.
#[derive(Clone, Debug, PartialEq)]
pub struct Topology {
    n: usize,
    modules: Option<usize>,
    switched: bool,
    edges: Vec<Hyperedge>,
}

impl Topology {
    pub fn new(n: usize, modules: Option<usize>, switched: bool, edges: Vec<Hyperedge>) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidTopology(format!("need at least 2 cells, got {n}")));
        }
        if edges.is_empty() {
            return Err(Error::InvalidTopology("no equalizers".into()));
        }
        if let Some(m) = modules {
            if m == 0 || !n.is_multiple_of(m) {
                return Err(Error::InvalidTopology(format!("module count {m} does not divide {n} cells")));
            }
        }
        for e in &edges {
            e.validate_for(n)?;
        }
        if switched && (edges.len() != 1 || edges[0].kind() != EdgeKind::Cpc) {
            return Err(Error::InvalidTopology("a switched topology holds exactly one CPC equalizer".into()));
        }
        Ok(Self { n, modules, switched, edges })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn modules(&self) -> Option<usize> {
        self.modules
    }

    pub fn is_switched(&self) -> bool {
        self.switched
    }

    pub fn edges(&self) -> &[Hyperedge] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn current_limits(&self) -> Vec<f64> {
        self.edges.iter().map(Hyperedge::current_limit).collect()
    }

    /// Copy without the listed equalizers (1-based `e_l` labels).
    pub fn without_edges(&self, labels: &[usize]) -> Result<Self> {
        if self.switched {
            return Err(Error::SwitchedTopology);
        }
        if let Some(&l) = labels.iter().find(|&&l| l == 0 || l > self.edges.len()) {
            return Err(Error::InvalidArgument(format!(
                "equalizer e_{l} does not exist (have e_1..e_{})",
                self.edges.len()
            )));
        }
        let edges =
            self.edges.iter().enumerate().filter(|(i, _)| !labels.contains(&(i + 1))).map(|(_, e)| e.clone()).collect();
        Self::new(self.n, self.modules, false, edges)
    }

    /// `n x n_e` incidence matrix. Fails for switched topologies.
    pub fn incidence_matrix<T: IncidenceScalar>(&self) -> Result<Matrix<T>> {
        if self.switched {
            return Err(Error::SwitchedTopology);
        }
        self.columns()
    }

    /// Incidence matrix of whatever edges are stored, ignoring the switched
    /// flag (for a switched topology: the template column, head at its
    /// stored cell).
    pub fn template_matrix<T: IncidenceScalar>(&self) -> Result<Matrix<T>> {
        self.columns()
    }

    fn columns<T: IncidenceScalar>(&self) -> Result<Matrix<T>> {
        let cols = self.edges.iter().map(|e| incidence_vector::<T>(e, self.n)).collect::<Result<Vec<_>>>()?;
        Matrix::from_columns(self.n, &cols)
    }

    /// Head cell (1-based) the switch selects for `soc`: the highest SOC,
    /// lowest index on ties.
    pub fn switch_target<T: Real>(&self, soc: &[T]) -> Result<usize> {
        if !self.switched {
            return Err(Error::InvalidTopology("topology is not switch-based".into()));
        }
        if soc.is_empty() {
            return Err(Error::Dimension("empty SOC vector".into()));
        }
        if soc.len() != self.n {
            return Err(Error::Dimension(format!("{} SOC values for {} cells", soc.len(), self.n)));
        }
        if soc.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("SOC".into()));
        }
        let mut best = 0;
        for (i, &v) in soc.iter().enumerate() {
            if v > soc[best] {
                best = i;
            }
        }
        Ok(best + 1)
    }

    /// The realized `n x 1` incidence matrix of a switched topology.
    pub fn incidence_switched<T: Real>(&self, soc: &[T]) -> Result<Matrix<T>> {
        let head = self.switch_target(soc)?;
        let edge = self.edges[0].with_head(head)?;
        Matrix::from_columns(self.n, &[incidence_vector::<T>(&edge, self.n)?])
    }
}

/// Builds one of the canonical topologies.
///
/// Modules are contiguous blocks of `b = n/m` cells. `m` is only read by the
/// module-based kinds. Edge order follows the usual labeling: CC, then MM,
/// then CPC, then CMC equalizers.
pub fn make_topology(kind: TopologyKind, n: usize, m: usize, current_limit: f64) -> Result<Topology> {
    if n < 2 {
        return Err(Error::InvalidTopology(format!("need at least 2 cells, got {n}")));
    }
    let module_count = kind.uses_modules().then_some(m);
    if kind.uses_modules() && (m == 0 || !n.is_multiple_of(m)) {
        return Err(Error::InvalidTopology(format!("module count m = {m} must divide n = {n}")));
    }
    let b = if kind.uses_modules() { n / m } else { n };
    let module = |k: usize| (k * b + 1)..=((k + 1) * b);
    let mut edges = Vec::new();
    let mut switched = false;
    match kind {
        TopologyKind::SeriesCc => {
            for i in 1..n {
                edges.push(Hyperedge::cc(i, i + 1, current_limit)?);
            }
        }
        TopologyKind::ModuleCc => {
            for k in 0..m {
                for i in module(k).take(b - 1) {
                    edges.push(Hyperedge::cc(i, i + 1, current_limit)?);
                }
            }
            for k in 1..m {
                edges.push(Hyperedge::mm(module(k - 1), module(k), current_limit)?);
            }
        }
        TopologyKind::LayerCc => {
            if !n.is_power_of_two() {
                return Err(Error::InvalidTopology(format!("layer-based requires power-of-2 n, got {n}")));
            }
            for i in (1..n).step_by(2) {
                edges.push(Hyperedge::cc(i, i + 1, current_limit)?);
            }
            let mut block = 2;
            while block < n {
                for start in (1..=n).step_by(2 * block) {
                    edges.push(Hyperedge::mm(start..start + block, start + block..start + 2 * block, current_limit)?);
                }
                block *= 2;
            }
        }
        TopologyKind::Cpc => {
            for i in 1..=n {
                edges.push(Hyperedge::star(EdgeKind::Cpc, i, 1..=n, current_limit)?);
            }
        }
        TopologyKind::ModuleCpc => {
            if b < 2 {
                return Err(Error::InvalidTopology("module-based CPC needs at least 2 cells per module".into()));
            }
            for k in 1..m {
                edges.push(Hyperedge::mm(module(k - 1), module(k), current_limit)?);
            }
            for i in 1..=n {
                edges.push(Hyperedge::star(EdgeKind::Cmc, i, module((i - 1) / b), current_limit)?);
            }
        }
        TopologyKind::SwitchCpc => {
            edges.push(Hyperedge::star(EdgeKind::Cpc, 1, 1..=n, current_limit)?);
            switched = true;
        }
    }
    Topology::new(n, module_count, switched, edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Weight;

    fn topo(kind: TopologyKind, n: usize, m: usize) -> Topology {
        make_topology(kind, n, m, 0.5).unwrap()
    }

    #[test]
    fn equalizer_counts() {
        for (n, m) in [(8, 2), (16, 4), (32, 4), (64, 8)] {
            assert_eq!(topo(TopologyKind::SeriesCc, n, m).edge_count(), n - 1);
            assert_eq!(topo(TopologyKind::ModuleCc, n, m).edge_count(), (n - m) + (m - 1));
            assert_eq!(topo(TopologyKind::LayerCc, n, m).edge_count(), n - 1);
            assert_eq!(topo(TopologyKind::Cpc, n, m).edge_count(), n);
            assert_eq!(topo(TopologyKind::ModuleCpc, n, m).edge_count(), n + m - 1);
            assert_eq!(topo(TopologyKind::SwitchCpc, n, m).edge_count(), 1);
        }
    }

    #[test]
    fn series_cc_is_bidiagonal() {
        let c = topo(TopologyKind::SeriesCc, 8, 1).incidence_matrix::<f64>().unwrap();
        assert_eq!(c.shape(), (8, 7));
        for j in 0..7 {
            for i in 0..8 {
                let expect = if i == j {
                    1.0
                } else if i == j + 1 {
                    -1.0
                } else {
                    0.0
                };
                assert_eq!(c[(i, j)], expect);
            }
        }
    }

    #[test]
    fn single_cc_pack() {
        let c = topo(TopologyKind::SeriesCc, 2, 1).incidence_matrix::<f64>().unwrap();
        assert_eq!(c, Matrix::from_rows(&[vec![1.0], vec![-1.0]]).unwrap());
    }

    #[test]
    fn cpc_matrix_structure() {
        let c = topo(TopologyKind::Cpc, 8, 1).incidence_matrix::<Weight>().unwrap();
        for i in 0..8 {
            for j in 0..8 {
                let expect = if i == j { Weight::new(7, 8) } else { Weight::new(-1, 8) };
                assert_eq!(c[(i, j)], expect);
            }
        }
    }

    #[test]
    fn module_cc_layout() {
        let t = topo(TopologyKind::ModuleCc, 8, 2);
        let kinds: Vec<_> = t.edges().iter().map(|e| e.kind()).collect();
        assert_eq!(&kinds[..6], &[EdgeKind::Cc; 6]);
        assert_eq!(kinds[6], EdgeKind::Mm);
        assert_eq!(t.edges()[6].head(), &[1, 2, 3, 4]);
        assert_eq!(t.edges()[6].tail(), &[5, 6, 7, 8]);
        assert_eq!(t.edges()[3].head(), &[5]);
    }

    #[test]
    fn module_cpc_layout() {
        let t = topo(TopologyKind::ModuleCpc, 8, 2);
        assert_eq!(t.edge_count(), 9);
        assert_eq!(t.edges()[0].kind(), EdgeKind::Mm);
        assert_eq!(t.edges()[1].head(), &[1]);
        assert_eq!(t.edges()[1].tail(), &[2, 3, 4]);
        assert_eq!(t.edges()[5].head(), &[5]);
        assert_eq!(t.edges()[5].tail(), &[6, 7, 8]);
    }

    #[test]
    fn layer_cc_layout() {
        let t = topo(TopologyKind::LayerCc, 8, 1);
        let heads: Vec<_> = t.edges().iter().map(|e| e.head().to_vec()).collect();
        assert_eq!(heads, vec![vec![1], vec![3], vec![5], vec![7], vec![1, 2], vec![5, 6], vec![1, 2, 3, 4]]);
        assert_eq!(t.edges()[5].tail(), &[7, 8]);
    }

    #[test]
    fn invalid_combinations() {
        assert!(make_topology(TopologyKind::LayerCc, 6, 1, 0.5).is_err());
        assert!(make_topology(TopologyKind::ModuleCc, 8, 3, 0.5).is_err());
        assert!(make_topology(TopologyKind::ModuleCpc, 8, 0, 0.5).is_err());
        assert!(make_topology(TopologyKind::ModuleCpc, 8, 8, 0.5).is_err());
        assert!(make_topology(TopologyKind::SeriesCc, 1, 1, 0.5).is_err());
        // m is ignored where it does not apply
        assert!(make_topology(TopologyKind::SeriesCc, 8, 3, 0.5).is_ok());
    }

    #[test]
    fn switched_column_follows_max_soc() {
        let t = topo(TopologyKind::SwitchCpc, 3, 1);
        assert!(t.incidence_matrix::<f64>().is_err());
        let c = t.incidence_switched(&[0.5, 0.7, 0.6]).unwrap();
        assert_eq!(c.column(0), vec![-1.0 / 3.0, 2.0 / 3.0, -1.0 / 3.0]);
        assert_eq!(t.switch_target(&[0.7, 0.7, 0.6]).unwrap(), 1);
        assert_eq!(t.switch_target(&[0.5, 0.5, 0.5]).unwrap(), 1);
        assert!(t.incidence_switched::<f64>(&[]).is_err());
        assert!(t.incidence_switched(&[0.5, 0.5]).is_err());
        assert!(t.incidence_switched(&[0.5, f64::NAN, 0.1]).is_err());
    }

    #[test]
    fn removing_edges() {
        let t = topo(TopologyKind::Cpc, 8, 1);
        let r = t.without_edges(&[7, 8]).unwrap();
        assert_eq!(r.edge_count(), 6);
        assert_eq!(r.edges()[5].head(), &[6]);
        assert!(t.without_edges(&[9]).is_err());
        assert!(t.without_edges(&[0]).is_err());
    }

    #[test]
    fn kind_parsing() {
        for k in TopologyKind::ALL {
            assert_eq!(k.as_str().parse::<TopologyKind>().unwrap(), k);
        }
        assert_eq!("MODULE_CPC".parse::<TopologyKind>().unwrap(), TopologyKind::ModuleCpc);
        assert!("ring".parse::<TopologyKind>().is_err());
    }
}
