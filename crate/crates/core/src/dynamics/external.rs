use crate::scalar::Real;

/// Pack current `I_s(k)` drawn by an external load (positive) or supplied by
/// a charger (negative).
#[derive(Clone, Debug, Default, PartialEq)]
pub enum ExternalCurrent<T> {
    #[default]
    Zero,
    Constant(T),
    /// One value per step; zero once the table is exhausted.
    Table(Vec<T>),
}

impl<T: Real> ExternalCurrent<T> {
    pub fn at(&self, step: u64) -> T {
        match self {
            ExternalCurrent::Zero => T::zero(),
            ExternalCurrent::Constant(i) => *i,
            ExternalCurrent::Table(v) => {
                usize::try_from(step).ok().and_then(|k| v.get(k)).copied().unwrap_or_else(T::zero)
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, ExternalCurrent::Zero)
    }
}
