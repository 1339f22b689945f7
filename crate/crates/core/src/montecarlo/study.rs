use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{algebraic_connectivity, run, SimOptions};
use crate::dynamics::{ClosedLoop, ControlPolicy, PackConfig};
use crate::error::{Error, Result};
use crate::hypergraph::{make_topology, TopologyKind};
use crate::montecarlo::histogram::{histogram, Histogram};

fn default_capacity() -> f64 {
    3.1
}
fn default_sample_period() -> f64 {
    1.0
}
fn default_bins() -> usize {
    50
}
fn default_max_steps() -> u64 {
    10_000_000
}
fn default_switch_max_steps() -> u64 {
    2_000_000
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PackSize {
    pub n: usize,
    /// Module count; ignored by kinds without modules.
    #[serde(default = "one")]
    pub m: usize,
}

fn one() -> usize {
    1
}

/// Monte Carlo study description. Every cell of every sample is drawn
/// i.i.d. from `U(soc_low, soc_high)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McStudy {
    pub pack_sizes: Vec<PackSize>,
    pub topologies: Vec<TopologyKind>,
    pub samples: usize,
    #[serde(default)]
    pub seed: u64,
    pub soc_low: f64,
    pub soc_high: f64,
    /// Equalizer current limit, amperes.
    pub current: f64,
    pub epsilon: f64,
    #[serde(default = "default_sample_period")]
    pub sample_period: f64,
    #[serde(default = "default_capacity")]
    pub capacity_ah: f64,
    #[serde(default = "default_bins")]
    pub bins: usize,
    #[serde(default = "default_max_steps")]
    pub max_steps: u64,
    /// Step cap for the switch-based structure, which is roughly an order of
    /// magnitude slower than the others.
    #[serde(default = "default_switch_max_steps")]
    pub switch_max_steps: u64,
}

impl McStudy {
    /// 0.5 A, 0.1 % tolerance, `U(40 %, 80 %)`, 3.1 Ah cells, `T_0 = 1 s`.
    pub fn standard(pack_sizes: Vec<PackSize>, topologies: Vec<TopologyKind>, samples: usize, seed: u64) -> Self {
        Self {
            pack_sizes,
            topologies,
            samples,
            seed,
            soc_low: 0.4,
            soc_high: 0.8,
            current: 0.5,
            epsilon: 1e-3,
            sample_period: default_sample_period(),
            capacity_ah: default_capacity(),
            bins: default_bins(),
            max_steps: default_max_steps(),
            switch_max_steps: default_switch_max_steps(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidStudy(m));
        if self.samples == 0 {
            return bad("samples must be >= 1".into());
        }
        if self.pack_sizes.is_empty() || self.topologies.is_empty() {
            return bad("need at least one pack size and one topology".into());
        }
        if !(0.0 <= self.soc_low && self.soc_low <= self.soc_high && self.soc_high <= 1.0) {
            return bad(format!("SOC bounds must satisfy 0 <= {} <= {} <= 1", self.soc_low, self.soc_high));
        }
        if !(self.current > 0.0 && self.current.is_finite()) {
            return bad(format!("current {} must be positive", self.current));
        }
        if self.epsilon.is_nan() || self.epsilon <= 0.0 {
            return bad(format!("tolerance {} must be positive", self.epsilon));
        }
        if self.bins == 0 || self.max_steps == 0 || self.switch_max_steps == 0 {
            return bad("bins and step caps must be >= 1".into());
        }
        for ps in &self.pack_sizes {
            for &kind in &self.topologies {
                make_topology(kind, ps.n, ps.m, self.current)?;
            }
        }
        PackConfig::uniform(1, self.capacity_ah, self.sample_period)?;
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SampleOutcome {
    pub te_seconds: Option<f64>,
    pub steps: u64,
    pub final_imbalance: f64,
}

/// One (topology, pack size) cell of the study.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct McRow {
    pub topology: TopologyKind,
    pub n: usize,
    pub m: usize,
    pub lambda2: f64,
    /// Over converged samples only; `None` if none converged.
    pub mean_te_s: Option<f64>,
    /// Sample (n - 1) standard deviation; `None` below two converged samples.
    pub std_te_s: Option<f64>,
    pub converged: usize,
    pub samples: usize,
    pub histogram: Option<Histogram>,
    pub outcomes: Vec<SampleOutcome>,
}

impl McRow {
    pub fn te_samples(&self) -> Vec<f64> {
        self.outcomes.iter().filter_map(|o| o.te_seconds).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct McReport {
    pub rows: Vec<McRow>,
}

impl McReport {
    pub fn row(&self, topology: TopologyKind, n: usize, m: usize) -> Option<&McRow> {
        self.rows.iter().find(|r| r.topology == topology && r.n == n && r.m == m)
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of the substream for one sample. Depends only on its coordinates,
/// never on scheduling.
pub fn substream_seed(seed: u64, topology: TopologyKind, n: usize, index: u64) -> u64 {
    [topology.id(), n as u64, index].into_iter().fold(splitmix64(seed), |h, v| splitmix64(h ^ v))
}

/// Initial SOC vector for one sample.
pub fn draw_initial_soc(study: &McStudy, topology: TopologyKind, n: usize, index: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(substream_seed(study.seed, topology, n, index));
    let span = study.soc_high - study.soc_low;
    (0..n).map(|_| study.soc_low + span * rng.random::<f64>()).collect()
}

struct Combo {
    topology: TopologyKind,
    size: PackSize,
    plant: ClosedLoop<f64>,
    lambda2: f64,
    max_steps: u64,
}

/// Runs every (pack size, topology) combination with the sign-constant law.
///
/// `workers = 0` uses all available cores. The report is bit-identical for
/// any worker count: samples are seeded by coordinates and reduced in
/// index order.
pub fn run_study(study: &McStudy, workers: usize) -> Result<McReport> {
    study.validate()?;
    let mut combos = Vec::new();
    for &size in &study.pack_sizes {
        let pack = PackConfig::uniform(size.n, study.capacity_ah, study.sample_period)?;
        for &topology in &study.topologies {
            let t = make_topology(topology, size.n, size.m, study.current)?;
            let policy = ControlPolicy::sign_constant_from(&t);
            combos.push(Combo {
                topology,
                size,
                plant: ClosedLoop::new(&pack, &t, &policy)?,
                lambda2: algebraic_connectivity(&t)?,
                max_steps: if t.is_switched() { study.switch_max_steps } else { study.max_steps },
            });
        }
    }

    let jobs: Vec<(usize, u64)> =
        (0..combos.len()).flat_map(|c| (0..study.samples as u64).map(move |i| (c, i))).collect();
    let opts = SimOptions::default();
    let simulate = |&(c, i): &(usize, u64)| {
        let combo = &combos[c];
        let x0 = draw_initial_soc(study, combo.topology, combo.size.n, i);
        let r = run(&combo.plant, study.sample_period, &x0, study.epsilon, combo.max_steps, &opts);
        SampleOutcome { te_seconds: r.te_seconds, steps: r.steps, final_imbalance: r.final_imbalance }
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("worker pool: {e}")))?;
    let outcomes: Vec<SampleOutcome> = pool.install(|| jobs.par_iter().map(simulate).collect());

    let rows = combos
        .iter()
        .zip(outcomes.chunks(study.samples))
        .map(|(combo, chunk)| aggregate(combo, chunk.to_vec(), study.bins))
        .collect::<Result<Vec<_>>>()?;
    Ok(McReport { rows })
}

fn aggregate(combo: &Combo, outcomes: Vec<SampleOutcome>, bins: usize) -> Result<McRow> {
    let te: Vec<f64> = outcomes.iter().filter_map(|o| o.te_seconds).collect();
    let k = te.len();
    let mean = (k > 0).then(|| te.iter().sum::<f64>() / k as f64);
    let std = mean.filter(|_| k > 1).map(|mu| {
        let ss: f64 = te.iter().map(|t| (t - mu) * (t - mu)).sum();
        (ss / (k - 1) as f64).sqrt()
    });
    if k == 0 {
        log::warn!("{} n={}: no sample converged", combo.topology, combo.size.n);
    }
    Ok(McRow {
        topology: combo.topology,
        n: combo.size.n,
        m: combo.size.m,
        lambda2: combo.lambda2,
        mean_te_s: mean,
        std_te_s: std,
        converged: k,
        samples: outcomes.len(),
        histogram: if k > 0 { Some(histogram(&te, bins)?) } else { None },
        outcomes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny(samples: usize) -> McStudy {
        McStudy::standard(
            vec![PackSize { n: 4, m: 2 }],
            vec![TopologyKind::SeriesCc, TopologyKind::ModuleCc, TopologyKind::Cpc],
            samples,
            7,
        )
    }

    #[test]
    fn degenerate_bounds_give_zero_time() {
        let mut s = tiny(1);
        s.soc_low = 0.55;
        s.soc_high = 0.55;
        let r = run_study(&s, 1).unwrap();
        for row in &r.rows {
            assert_eq!(row.converged, 1);
            assert_eq!(row.mean_te_s, Some(0.0));
            assert_eq!(row.std_te_s, None);
        }
    }

    #[test]
    fn worker_count_does_not_change_report() {
        let s = tiny(6);
        let a = run_study(&s, 1).unwrap();
        let b = run_study(&s, 3).unwrap();
        assert_eq!(a, b);
        for row in &a.rows {
            assert_eq!(row.histogram.as_ref().unwrap().total(), row.converged as u64);
            assert!(row.converged <= row.samples);
        }
    }

    #[test]
    fn substreams_are_distinct() {
        let s = tiny(1);
        let a = draw_initial_soc(&s, TopologyKind::Cpc, 8, 0);
        assert_eq!(a, draw_initial_soc(&s, TopologyKind::Cpc, 8, 0));
        assert_ne!(a, draw_initial_soc(&s, TopologyKind::Cpc, 8, 1));
        assert_ne!(a, draw_initial_soc(&s, TopologyKind::SeriesCc, 8, 0));
        assert!(a.iter().all(|&v| (0.4..0.8).contains(&v)));
    }

    #[test]
    fn validation() {
        let mut s = tiny(1);
        s.soc_low = 0.9;
        assert!(matches!(run_study(&s, 1), Err(Error::InvalidStudy(_))));
        let mut s = tiny(1);
        s.pack_sizes = vec![PackSize { n: 6, m: 2 }];
        s.topologies = vec![TopologyKind::LayerCc];
        assert!(run_study(&s, 1).is_err());
        let mut s = tiny(1);
        s.samples = 0;
        assert!(run_study(&s, 1).is_err());
    }

    #[test]
    fn study_json_defaults() {
        let s: McStudy = serde_json::from_str(
            r#"{"pack_sizes":[{"n":8,"m":2}],"topologies":["series-cc","switch_cpc"],
                "samples":10,"soc_low":0.4,"soc_high":0.8,"current":0.5,"epsilon":0.001}"#,
        )
        .unwrap();
        assert_eq!(s.capacity_ah, 3.1);
        assert_eq!(s.sample_period, 1.0);
        assert_eq!(s.topologies[1], TopologyKind::SwitchCpc);
        assert_eq!(s.switch_max_steps, 2_000_000);
    }
}
