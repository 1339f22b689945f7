//! Simulation scenario files.
//!
//! ```json
//! {
//!   "topology": { "kind": "cpc", "n": 8, "current_a": 0.5, "without": [7, 8] },
//!   "pack": { "capacity_ah": 3.1, "sample_period_s": 1.0 },
//!   "policy": { "mode": "sign-constant" },
//!   "x0": ["33.37%", "65.73%", 0.621, ...],
//!   "epsilon": "0.1%"
//! }
//! ```
//!
//! `topology` may also be an inline topology document or a path to one,
//! resolved relative to the scenario file.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use eqhs::dynamics::{ControlPolicy, ExternalCurrent, PackConfig};
use eqhs::hypergraph::{make_topology, Topology, TopologyDoc, TopologyKind};
use serde::Deserialize;

use crate::soc::Fraction;

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum TopologySource {
    Generate(Generate),
    Inline(TopologyDoc),
    File(PathBuf),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Generate {
    pub kind: TopologyKind,
    pub n: usize,
    #[serde(default = "one")]
    pub m: usize,
    #[serde(default = "half_amp")]
    pub current_a: f64,
    #[serde(default)]
    pub without: Vec<usize>,
}

fn one() -> usize {
    1
}
fn half_amp() -> f64 {
    0.5
}
fn default_capacity() -> f64 {
    3.1
}
fn one_f() -> f64 {
    1.0
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PackSpec {
    #[serde(default = "default_capacity")]
    pub capacity_ah: f64,
    /// Overrides `capacity_ah` per cell.
    #[serde(default)]
    pub capacities_ah: Option<Vec<f64>>,
    #[serde(default = "one_f")]
    pub efficiency: f64,
    #[serde(default = "one_f")]
    pub sample_period_s: f64,
}

impl Default for PackSpec {
    fn default() -> Self {
        Self { capacity_ah: default_capacity(), capacities_ah: None, efficiency: 1.0, sample_period_s: 1.0 }
    }
}

impl PackSpec {
    pub fn build(&self, n: usize) -> Result<PackConfig<f64>> {
        let caps = match &self.capacities_ah {
            Some(c) if c.len() != n => bail!("{} capacities given for {n} cells", c.len()),
            Some(c) => c.clone(),
            None => vec![self.capacity_ah; n],
        };
        Ok(PackConfig::new(caps, self.efficiency, self.sample_period_s)?)
    }
}

#[derive(Debug, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PolicySpec {
    /// Currents default to each equalizer's limit.
    SignConstant {
        #[serde(default)]
        currents_a: Option<Vec<f64>>,
    },
    Proportional {
        #[serde(default)]
        gain: Option<f64>,
        #[serde(default)]
        gains: Option<Vec<f64>>,
    },
}

impl Default for PolicySpec {
    fn default() -> Self {
        PolicySpec::SignConstant { currents_a: None }
    }
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum ExternalSpec {
    Constant(f64),
    Table(Vec<f64>),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub topology: TopologySource,
    #[serde(default)]
    pub pack: PackSpec,
    #[serde(default)]
    pub policy: PolicySpec,
    pub x0: Vec<Fraction>,
    pub epsilon: Fraction,
    #[serde(default)]
    pub max_steps: Option<u64>,
    /// Pack current in amperes (positive discharges).
    #[serde(default)]
    pub external_current_a: Option<ExternalSpec>,
}

pub struct Resolved {
    pub topology: Topology,
    pub pack: PackConfig<f64>,
    pub policy: ControlPolicy<f64>,
    pub x0: Vec<f64>,
    pub epsilon: f64,
    pub max_steps: Option<u64>,
    pub external: ExternalCurrent<f64>,
}

pub fn read_topology_file(path: &Path) -> Result<Topology> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let doc: TopologyDoc =
        serde_json::from_str(&text).with_context(|| format!("parsing topology {}", path.display()))?;
    Topology::try_from(doc).with_context(|| format!("invalid topology in {}", path.display()))
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Resolved> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let s: Scenario =
            serde_json::from_str(&text).with_context(|| format!("parsing scenario {}", path.display()))?;
        s.resolve(path.parent().unwrap_or(Path::new(".")))
    }

    pub fn resolve(self, base: &Path) -> Result<Resolved> {
        let topology = match self.topology {
            TopologySource::Generate(g) => {
                let t = make_topology(g.kind, g.n, g.m, g.current_a)?;
                if g.without.is_empty() {
                    t
                } else {
                    t.without_edges(&g.without)?
                }
            }
            TopologySource::Inline(doc) => Topology::try_from(doc)?,
            TopologySource::File(p) => read_topology_file(&base.join(p))?,
        };
        let n = topology.n();
        let pack = self.pack.build(n)?;
        let policy = match self.policy {
            PolicySpec::SignConstant { currents_a: None } => ControlPolicy::sign_constant_from(&topology),
            PolicySpec::SignConstant { currents_a: Some(c) } => ControlPolicy::sign_constant(c)?,
            PolicySpec::Proportional { gain: Some(k), gains: None } => {
                ControlPolicy::uniform_proportional(k, &pack, &topology)?
            }
            PolicySpec::Proportional { gain: None, gains: Some(k) } => {
                ControlPolicy::proportional(k, &pack, &topology)?
            }
            PolicySpec::Proportional { .. } => bail!("proportional policy needs exactly one of `gain`, `gains`"),
        };
        let x0: Vec<f64> = self.x0.iter().map(|f| f.0).collect();
        if let Some(bad) = x0.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            bail!("initial SOC {bad} outside [0, 1]");
        }
        if x0.len() != n {
            bail!("x0 has {} entries for {n} cells", x0.len());
        }
        let external = match self.external_current_a {
            None => ExternalCurrent::Zero,
            Some(ExternalSpec::Constant(i)) => ExternalCurrent::Constant(i),
            Some(ExternalSpec::Table(t)) => ExternalCurrent::Table(t),
        };
        Ok(Resolved { topology, pack, policy, x0, epsilon: self.epsilon.0, max_steps: self.max_steps, external })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generated_topology_with_removed_edges() {
        let s: Scenario = serde_json::from_str(
            r#"{"topology":{"kind":"cpc","n":8,"without":[7,8]},
                "x0":["33.37%","65.73%","62.10%","69.78%","29.75%","74.87%","64.10%","53.95%"],
                "epsilon":"0.1%"}"#,
        )
        .unwrap();
        let r = s.resolve(Path::new(".")).unwrap();
        assert_eq!(r.topology.edge_count(), 6);
        assert!((r.epsilon - 1e-3).abs() < 1e-18);
        assert_eq!(r.policy.gains(), &[0.5; 6]);
    }

    #[test]
    fn inline_document_and_proportional() {
        let s: Scenario = serde_json::from_str(
            r#"{"topology":{"n":2,"edges":[{"kind":"CC","head":[1],"tail":[2],"current_limit_a":0.5}]},
                "policy":{"mode":"proportional","gain":100},
                "x0":[0.6,0.4],"epsilon":0.001}"#,
        )
        .unwrap();
        let r = s.resolve(Path::new(".")).unwrap();
        assert_eq!(r.topology.n(), 2);
        assert_eq!(r.policy.gains(), &[100.0]);
    }

    #[test]
    fn rejects_bad_inputs() {
        let bad = [
            r#"{"topology":{"kind":"cpc","n":4},"x0":[0.5,0.5,0.5],"epsilon":0.001}"#,
            r#"{"topology":{"kind":"cpc","n":2},"x0":["150%",0.5],"epsilon":0.001}"#,
            r#"{"topology":{"kind":"cpc","n":2},"policy":{"mode":"proportional"},"x0":[0.5,0.5],"epsilon":0.001}"#,
        ];
        for b in bad {
            let s: Scenario = serde_json::from_str(b).unwrap();
            assert!(s.resolve(Path::new(".")).is_err(), "{b}");
        }
    }
}
