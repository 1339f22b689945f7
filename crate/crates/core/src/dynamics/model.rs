//! The closed loop `x(k+1) = x(k) - D C u(k) - D 1 I_s(k)`.

use crate::dynamics::{ControlMode, ControlPolicy, PackConfig};
use crate::error::{Error, Result};
use crate::hypergraph::{incidence_vector, Topology};
use crate::linalg::{largest_eigenvalue, weighted_laplacian};
use crate::scalar::Real;

#[derive(Clone, Debug)]
struct SparseColumn<T> {
    rows: Vec<usize>,
    weights: Vec<T>,
}

impl<T: Real> SparseColumn<T> {
    fn from_dense(c: &[T]) -> Self {
        let (rows, weights) = c.iter().enumerate().filter(|(_, w)| **w != T::zero()).map(|(i, &w)| (i, w)).unzip();
        Self { rows, weights }
    }

    fn dot(&self, x: &[T]) -> T {
        self.rows.iter().zip(&self.weights).map(|(&r, &w)| w * x[r]).sum()
    }
}

#[derive(Clone, Debug)]
enum Wiring<T> {
    Fixed(Vec<SparseColumn<T>>),
    /// Relocatable CPC equalizer; head weight, tail weight.
    Switched {
        head_weight: T,
        tail_weight: T,
    },
}

/// Equalizer currents chosen for one step, plus the column layout they act on.
#[derive(Clone, Debug, PartialEq)]
pub struct Actuation<T> {
    pub currents: Vec<T>,
    /// 0-based head cell of the switched equalizer, if any.
    pub switch_head: Option<usize>,
}

/// Largest eigenvalue of `D^½ C K Cᵀ D^½` (unit `K` when `gains` is `None`).
///
/// For a switched topology the maximum is taken over every head position.
pub(crate) fn excitation_peak<T: Real>(pack: &PackConfig<T>, topology: &Topology, gains: Option<&[T]>) -> Result<T> {
    check_dims(pack, topology)?;
    let d = pack.d_diag();
    if topology.is_switched() {
        let k = gains.map_or(T::one(), |g| g[0]);
        let (hw, tw) = template_weights::<T>(topology);
        let total: T = d.iter().copied().sum();
        let peak = d.iter().map(|&dh| k * (dh * hw * hw + (total - dh) * tw * tw)).fold(T::zero(), T::max);
        return Ok(peak);
    }
    let sqrt_d: Vec<T> = d.iter().map(|v| v.sqrt()).collect();
    let scaled = topology.incidence_matrix::<T>()?.scale_rows(&sqrt_d)?;
    largest_eigenvalue(&weighted_laplacian(&scaled, gains)?)
}

fn template_weights<T: Real>(topology: &Topology) -> (T, T) {
    let e = &topology.edges()[0];
    (T::from_weight(e.head_weight()), T::from_weight(e.tail_weight()))
}

fn check_dims<T: Real>(pack: &PackConfig<T>, topology: &Topology) -> Result<()> {
    if pack.n() != topology.n() {
        return Err(Error::Dimension(format!("pack has {} cells, topology {}", pack.n(), topology.n())));
    }
    Ok(())
}

/// A pack, its equalizers and a control law, prepared for repeated stepping.
///
/// The sign-constant law is softened near balance: each current is capped at
/// `g |c_lᵀx|` with `g = 1 / λ_max(D^½ C Cᵀ D^½)`. Far from balance the cap
/// is inactive and every equalizer runs at its rated current; near balance
/// the loop behaves like a proportional law whose closed-loop matrix has
/// eigenvalues in `[0, 1]`, so the imbalance cannot grow and the constant
/// current does not limit-cycle around the balance point.
#[derive(Clone, Debug)]
pub struct ClosedLoop<T> {
    n: usize,
    d: Vec<T>,
    wiring: Wiring<T>,
    mode: ControlMode,
    gains: Vec<T>,
    /// Anti-chatter gain; per head position for switched wiring.
    chatter_gain: Vec<T>,
}

impl<T: Real> ClosedLoop<T> {
    pub fn new(pack: &PackConfig<T>, topology: &Topology, policy: &ControlPolicy<T>) -> Result<Self> {
        check_dims(pack, topology)?;
        if policy.gains().len() != topology.edge_count() {
            return Err(Error::Dimension(format!(
                "policy has {} entries for {} equalizers",
                policy.gains().len(),
                topology.edge_count()
            )));
        }
        let n = topology.n();
        let d = pack.d_diag();
        let (wiring, chatter_gain) = if topology.is_switched() {
            let (hw, tw) = template_weights::<T>(topology);
            let total: T = d.iter().copied().sum();
            let per_head = d.iter().map(|&dh| T::one() / (dh * hw * hw + (total - dh) * tw * tw)).collect();
            (Wiring::Switched { head_weight: hw, tail_weight: tw }, per_head)
        } else {
            let cols = topology
                .edges()
                .iter()
                .map(|e| incidence_vector::<T>(e, n).map(|c| SparseColumn::from_dense(&c)))
                .collect::<Result<Vec<_>>>()?;
            let gain = match policy.mode() {
                ControlMode::SignConstant => T::one() / excitation_peak(pack, topology, None)?,
                ControlMode::Proportional => T::infinity(),
            };
            (Wiring::Fixed(cols), vec![gain])
        };
        Ok(Self { n, d, wiring, mode: policy.mode(), gains: policy.gains().to_vec(), chatter_gain })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Equalizer currents for state `x`.
    pub fn control(&self, x: &[T]) -> Result<Actuation<T>> {
        if x.len() != self.n {
            return Err(Error::Dimension(format!("{} SOC values for {} cells", x.len(), self.n)));
        }
        if x.iter().any(|v| v.is_nan()) {
            return Err(Error::NonFinite("SOC is NaN".into()));
        }
        let mut currents = Vec::new();
        let switch_head = self.control_into(x, &mut currents);
        Ok(Actuation { currents, switch_head })
    }

    /// Unchecked hot-path variant of [`control`](Self::control).
    pub(crate) fn control_into(&self, x: &[T], u: &mut Vec<T>) -> Option<usize> {
        u.clear();
        match &self.wiring {
            Wiring::Fixed(cols) => {
                let cap = self.chatter_gain[0];
                u.extend(cols.iter().zip(&self.gains).map(|(c, &g)| self.law(c.dot(x), g, cap)));
                None
            }
            Wiring::Switched { head_weight, tail_weight } => {
                let mut h = 0;
                for i in 1..x.len() {
                    if x[i] > x[h] {
                        h = i;
                    }
                }
                let sum: T = x.iter().copied().sum();
                let sigma = *head_weight * x[h] + *tail_weight * (sum - x[h]);
                u.push(self.law(sigma, self.gains[0], self.chatter_gain[h]));
                Some(h)
            }
        }
    }

    fn law(&self, sigma: T, gain: T, cap: T) -> T {
        match self.mode {
            ControlMode::Proportional => gain * sigma,
            ControlMode::SignConstant => {
                if sigma == T::zero() {
                    T::zero()
                } else {
                    sigma.signum() * gain.min(cap * sigma.abs())
                }
            }
        }
    }

    /// Applies one step in place; returns whether any SOC had to be clamped
    /// into `[0, 1]`.
    pub fn apply(&self, x: &mut [T], act: &Actuation<T>, external: T) -> bool {
        let mut scratch = Vec::with_capacity(self.n);
        self.apply_raw(x, &act.currents, act.switch_head, external, &mut scratch)
    }

    pub(crate) fn apply_raw(
        &self,
        x: &mut [T],
        u: &[T],
        switch_head: Option<usize>,
        external: T,
        cell_current: &mut Vec<T>,
    ) -> bool {
        cell_current.clear();
        cell_current.resize(self.n, external);
        match &self.wiring {
            Wiring::Fixed(cols) => {
                for (c, &ul) in cols.iter().zip(u) {
                    if ul == T::zero() {
                        continue;
                    }
                    for (&r, &w) in c.rows.iter().zip(&c.weights) {
                        cell_current[r] += w * ul;
                    }
                }
            }
            Wiring::Switched { head_weight, tail_weight } => {
                let h = switch_head.expect("switched actuation carries its head");
                for (i, ci) in cell_current.iter_mut().enumerate() {
                    let w = if i == h { *head_weight } else { *tail_weight };
                    *ci += w * u[0];
                }
            }
        }
        let mut clamped = false;
        for ((xi, &di), &ci) in x.iter_mut().zip(&self.d).zip(cell_current.iter()) {
            *xi -= di * ci;
            if *xi < T::zero() {
                *xi = T::zero();
                clamped = true;
            } else if *xi > T::one() {
                *xi = T::one();
                clamped = true;
            }
        }
        clamped
    }
}
