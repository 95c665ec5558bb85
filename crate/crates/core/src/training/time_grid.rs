use crate::error::{ensure, Result};

/// Partition `0 = t^0 < t^1 < ... < t^N = T` with steps `k_n = t^n - t^{n-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    nodes: Vec<f64>,
}

impl TimeGrid {
    pub fn from_nodes(nodes: Vec<f64>) -> Result<Self> {
        ensure!(nodes.len() >= 2, "a time grid needs at least one step");
        ensure!(nodes[0] == 0.0, "time grid must start at 0");
        ensure!(
            nodes.windows(2).all(|w| w[1] > w[0]),
            "time grid nodes must be strictly increasing"
        );
        Ok(Self { nodes })
    }

    /// Uniform grid with `k = T / N`. The last node is exactly `T`.
    pub fn uniform(horizon: f64, steps: usize) -> Result<Self> {
        ensure!(steps >= 1, "time grid needs N >= 1");
        ensure!(
            horizon > 0.0 && horizon.is_finite(),
            "horizon must be positive, got {horizon}"
        );
        let k = horizon / steps as f64;
        let mut nodes: Vec<f64> = (0..steps).map(|n| n as f64 * k).collect();
        nodes.push(horizon);
        Self::from_nodes(nodes)
    }

    /// Uniform grid with step `k` on `[0, T]`; `T / k` must be an integer up
    /// to roundoff.
    pub fn with_step(horizon: f64, step: f64) -> Result<Self> {
        ensure!(step > 0.0, "time step must be positive");
        let n = (horizon / step).round();
        ensure!(
            n >= 1.0 && ((n * step) - horizon).abs() <= 1e-9 * horizon,
            "horizon {horizon} is not a multiple of the step {step}"
        );
        Self::uniform(horizon, n as usize)
    }

    /// Number of steps `N`.
    pub fn len(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn horizon(&self) -> f64 {
        *self.nodes.last().unwrap()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn node(&self, n: usize) -> f64 {
        self.nodes[n]
    }

    /// `k_n` for `1 <= n <= N`.
    pub fn step(&self, n: usize) -> f64 {
        self.nodes[n] - self.nodes[n - 1]
    }

    pub fn steps(&self) -> impl Iterator<Item = f64> + '_ {
        self.nodes.windows(2).map(|w| w[1] - w[0])
    }

    /// Index `n` with `t ∈ I_n = (t^{n-1}, t^n]`.
    pub fn interval_of(&self, t: f64) -> Option<usize> {
        if t <= 0.0 || t > self.horizon() {
            return None;
        }
        Some(self.nodes.partition_point(|&s| s < t).max(1))
    }

    /// `Σ_n k_n g(t^n)`.
    pub fn right_endpoint_quadrature(&self, g: impl Fn(f64) -> f64) -> f64 {
        (1..=self.len()).map(|n| self.step(n) * g(self.nodes[n])).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_step() {
        let g = TimeGrid::uniform(1.0, 1).unwrap();
        assert_eq!(g.nodes(), &[0.0, 1.0]);
        assert_eq!(g.step(1), 1.0);
    }

    #[test]
    fn five_steps_of_point_four() {
        let g = TimeGrid::uniform(2.0, 5).unwrap();
        for n in 1..=5 {
            assert!((g.step(n) - 0.4).abs() < 1e-15);
        }
        assert_eq!(g.horizon(), 2.0);
    }

    #[test]
    fn quadrature_of_one_is_horizon() {
        for (t, n) in [(1.0, 3), (2.0, 5), (0.7, 13)] {
            let g = TimeGrid::uniform(t, n).unwrap();
            assert!((g.right_endpoint_quadrature(|_| 1.0) - t).abs() < 1e-14);
        }
    }

    #[test]
    fn interval_lookup() {
        let g = TimeGrid::uniform(1.0, 4).unwrap();
        assert_eq!(g.interval_of(0.25), Some(1));
        assert_eq!(g.interval_of(0.26), Some(2));
        assert_eq!(g.interval_of(1.0), Some(4));
        assert_eq!(g.interval_of(0.0), None);
        assert_eq!(g.interval_of(1.1), None);
    }

    #[test]
    fn invalid_grids() {
        assert!(TimeGrid::uniform(1.0, 0).is_err());
        assert!(TimeGrid::from_nodes(vec![0.0, 0.5, 0.5]).is_err());
        assert!(TimeGrid::with_step(1.0, 0.3).is_err());
        assert_eq!(TimeGrid::with_step(2.0, 0.4).unwrap().len(), 5);
    }
}
