//! Fixed-step integration plumbing shared by the Riccati, Bloch and fiber solvers.

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64};

/// Uniform time grid `t₀ + k·step`, `k = 0..=steps`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub t0: f64,
    pub step: f64,
    pub steps: usize,
}

impl Grid {
    pub fn new(t0: f64, t_end: f64, steps: usize) -> Result<Self> {
        if steps == 0 {
            return Err(Error::Contract("a grid needs at least one step".into()));
        }
        if !(t_end > t0) || !t_end.is_finite() || !t0.is_finite() {
            return Err(Error::Contract(format!("invalid time interval [{t0}, {t_end}]")));
        }
        Ok(Self { t0, step: (t_end - t0) / steps as f64, steps })
    }

    pub fn time(&self, k: usize) -> f64 {
        self.t0 + k as f64 * self.step
    }

    pub fn t_end(&self) -> f64 {
        self.time(self.steps)
    }

    pub fn times(&self) -> Vec<f64> {
        (0..=self.steps).map(|k| self.time(k)).collect()
    }

    /// The sub-grid covering indices `start..=end`.
    pub fn slice(&self, start: usize, end: usize) -> Self {
        assert!(start < end && end <= self.steps);
        Self { t0: self.time(start), step: self.step, steps: end - start }
    }
}

pub trait OdeState: Clone {
    /// `self + a·other`
    fn add_scaled(&self, a: f64, other: &Self) -> Self;

    fn distance(&self, other: &Self) -> f64;
}

impl OdeState for CMatrix {
    fn add_scaled(&self, a: f64, other: &Self) -> Self {
        self.axpy(C64::new(a, 0.0), other)
    }

    fn distance(&self, other: &Self) -> f64 {
        (self - other).norm_fro()
    }
}

impl<const D: usize> OdeState for [f64; D] {
    fn add_scaled(&self, a: f64, other: &Self) -> Self {
        std::array::from_fn(|i| self[i] + a * other[i])
    }

    fn distance(&self, other: &Self) -> f64 {
        self.iter().zip(other).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
    }
}

/// One classical fourth-order Runge–Kutta step.
pub fn rk4_step<S, F>(f: &mut F, t: f64, y: &S, h: f64) -> Result<S>
where
    S: OdeState,
    F: FnMut(f64, &S) -> Result<S>,
{
    let k1 = f(t, y)?;
    let k2 = f(t + 0.5 * h, &y.add_scaled(0.5 * h, &k1))?;
    let k3 = f(t + 0.5 * h, &y.add_scaled(0.5 * h, &k2))?;
    let k4 = f(t + h, &y.add_scaled(h, &k3))?;
    Ok(y.add_scaled(h / 6.0, &k1)
        .add_scaled(h / 3.0, &k2)
        .add_scaled(h / 3.0, &k3)
        .add_scaled(h / 6.0, &k4))
}

/// Cubic Hermite interpolant at fraction `theta ∈ [0, 1]` of a step of length `h`.
pub fn hermite(y0: &CMatrix, d0: &CMatrix, y1: &CMatrix, d1: &CMatrix, h: f64, theta: f64) -> CMatrix {
    let t2 = theta * theta;
    let t3 = t2 * theta;
    let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    let h10 = t3 - 2.0 * t2 + theta;
    let h01 = -2.0 * t3 + 3.0 * t2;
    let h11 = t3 - t2;
    y0.scale_real(h00)
        .add_scaled(h * h10, d0)
        .add_scaled(h01, y1)
        .add_scaled(h * h11, d1)
}

/// Composite Simpson rule over a grid, given integrand values at the grid
/// points and at the step midpoints. Returns the running integral at every
/// grid point, starting from zero.
pub fn simpson_cumulative(nodes: &[f64], mids: &[f64], h: f64) -> Vec<f64> {
    assert_eq!(nodes.len(), mids.len() + 1);
    let mut acc = Vec::with_capacity(nodes.len());
    let mut total = 0.0;
    acc.push(0.0);
    for k in 0..mids.len() {
        total += h / 6.0 * (nodes[k] + 4.0 * mids[k] + nodes[k + 1]);
        acc.push(total);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rk4_is_fourth_order_on_exponential() {
        let mut f = |_t: f64, y: &[f64; 1]| Ok([y[0]]);
        let mut errs = Vec::new();
        for steps in [10, 20] {
            let h = 1.0 / steps as f64;
            let mut y = [1.0];
            for k in 0..steps {
                y = rk4_step(&mut f, k as f64 * h, &y, h).unwrap();
            }
            errs.push((y[0] - 1f64.exp()).abs());
        }
        let ratio = errs[0] / errs[1];
        assert!((14.0..18.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn hermite_is_exact_for_cubics() {
        let p = |t: f64| t * t * t - 2.0 * t + 0.5;
        let dp = |t: f64| 3.0 * t * t - 2.0;
        let m = |x: f64| CMatrix::from_vec(1, 1, vec![C64::new(x, 0.0)]);
        let (a, b) = (0.3, 0.8);
        for theta in [0.0, 0.25, 0.5, 1.0] {
            let v = hermite(&m(p(a)), &m(dp(a)), &m(p(b)), &m(dp(b)), b - a, theta);
            assert!((v[(0, 0)].re - p(a + theta * (b - a))).abs() < 1e-15);
        }
    }

    #[test]
    fn simpson_integrates_cubics_exactly() {
        let g = Grid::new(0.0, 2.0, 4).unwrap();
        let f = |t: f64| t * t * t;
        let nodes: Vec<f64> = g.times().iter().map(|&t| f(t)).collect();
        let mids: Vec<f64> = (0..4).map(|k| f(g.time(k) + 0.5 * g.step)).collect();
        let acc = simpson_cumulative(&nodes, &mids, g.step);
        assert!((acc[4] - 4.0).abs() < 1e-14);
        assert!((acc[2] - 0.25).abs() < 1e-14);
    }

    #[test]
    fn grid_validation() {
        assert!(Grid::new(0.0, 1.0, 0).is_err());
        assert!(Grid::new(1.0, 1.0, 3).is_err());
        let g = Grid::new(0.0, 1.0, 4).unwrap();
        assert_eq!(g.t_end(), 1.0);
        let s = g.slice(1, 3);
        assert_eq!(s.steps, 2);
        assert_eq!(s.t0, 0.25);
    }
}
