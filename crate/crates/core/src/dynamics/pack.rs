use crate::error::{Error, Result};
use crate::scalar::Real;

const SECONDS_PER_HOUR: f64 = 3600.0;

/// Electrical parameters of a series pack.
#[derive(Clone, Debug, PartialEq)]
pub struct PackConfig<T> {
    capacities: Vec<T>,
    modules: usize,
    coulombic_efficiency: T,
    sample_period: T,
}

impl<T: Real> PackConfig<T> {
    /// `capacities` in ampere-hours, `sample_period` in seconds.
    pub fn new(capacities: Vec<T>, coulombic_efficiency: T, sample_period: T) -> Result<Self> {
        if capacities.is_empty() {
            return Err(Error::InvalidPack("no cells".into()));
        }
        if let Some((i, q)) = capacities.iter().enumerate().find(|(_, q)| !(q.is_finite() && **q > T::zero())) {
            return Err(Error::InvalidPack(format!("capacity of cell {} is {q}; must be > 0", i + 1)));
        }
        if !(coulombic_efficiency > T::zero() && coulombic_efficiency <= T::one()) {
            return Err(Error::InvalidPack(format!("coulombic efficiency {coulombic_efficiency} outside (0, 1]")));
        }
        if !(sample_period.is_finite() && sample_period > T::zero()) {
            return Err(Error::InvalidPack(format!("sample period {sample_period} must be > 0")));
        }
        Ok(Self { capacities, modules: 1, coulombic_efficiency, sample_period })
    }

    /// `n` identical cells, efficiency 1.
    pub fn uniform(n: usize, capacity_ah: T, sample_period: T) -> Result<Self> {
        Self::new(vec![capacity_ah; n], T::one(), sample_period)
    }

    pub fn with_modules(mut self, m: usize) -> Result<Self> {
        if m == 0 || !self.n().is_multiple_of(m) {
            return Err(Error::InvalidPack(format!("module count {m} does not divide {} cells", self.n())));
        }
        self.modules = m;
        Ok(self)
    }

    pub fn with_efficiency(self, eta: T) -> Result<Self> {
        Self::new(self.capacities, eta, self.sample_period).map(|p| Self { modules: self.modules, ..p })
    }

    pub fn n(&self) -> usize {
        self.capacities.len()
    }

    pub fn modules(&self) -> usize {
        self.modules
    }

    pub fn cells_per_module(&self) -> usize {
        self.n() / self.modules
    }

    pub fn capacities(&self) -> &[T] {
        &self.capacities
    }

    pub fn coulombic_efficiency(&self) -> T {
        self.coulombic_efficiency
    }

    pub fn sample_period(&self) -> T {
        self.sample_period
    }

    /// Diagonal of `D`: `η T0 / (3600 Q_i)`, SOC change per ampere per step.
    pub fn d_diag(&self) -> Vec<T> {
        self.capacities.iter().map(|&q| self.d_for(q)).collect()
    }

    /// Smallest diagonal entry of `D`, i.e. the one for the largest capacity.
    pub fn d_min(&self) -> T {
        let qmax = self.capacities.iter().copied().fold(T::zero(), T::max);
        self.d_for(qmax)
    }

    fn d_for(&self, q: T) -> T {
        self.coulombic_efficiency * self.sample_period / (T::lit(SECONDS_PER_HOUR) * q)
    }

    pub fn has_equal_capacities(&self) -> bool {
        self.capacities.iter().all(|&q| q == self.capacities[0])
    }
}

/// SOC vector at step `k`.
#[derive(Clone, Debug, PartialEq)]
pub struct SocState<T> {
    pub step: u64,
    pub soc: Vec<T>,
}

impl<T: Real> SocState<T> {
    pub fn new(soc: Vec<T>) -> Result<Self> {
        if soc.is_empty() {
            return Err(Error::Dimension("empty SOC vector".into()));
        }
        if soc.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("SOC".into()));
        }
        Ok(Self { step: 0, soc })
    }
}
