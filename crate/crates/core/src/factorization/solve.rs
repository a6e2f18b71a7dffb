//! Full evolution from the Riccati trajectory and per-segment fiber factors.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::hamiltonian::{BlockedHamiltonian, SampledHamiltonian};
use crate::linalg::{expm, CMatrix, C64, I};
use crate::ode::{hermite, Grid};
use crate::riccati::{integrate_riccati, riccati_rhs, RiccatiForm, RiccatiOptions, RiccatiSegment, RiccatiTrajectory};

use super::effective::{effective_hamiltonian_hermitian, recursion_hamiltonian};
use super::phase::{segment_phases, PhaseSeries, PhaseTotals, SegmentSamples};
use super::unitarity::gauge_from_z;

/// How the block-diagonal fiber factor `U₂` is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FiberStrategy {
    /// `n = 1` only: peel one dimension at a time, recursing on the traceless
    /// part of the `(N−1)`-dimensional effective Hamiltonian.
    Hierarchical,
    /// Propagate the Hermitian effective blocks directly with a
    /// fourth-order Magnus step.
    Direct,
}

#[derive(Clone)]
pub struct SolveOptions {
    pub riccati: RiccatiOptions,
    pub strategy: FiberStrategy,
}

impl SolveOptions {
    pub fn new(grid: Grid, strategy: FiberStrategy) -> Self {
        Self { riccati: RiccatiOptions::new(grid), strategy }
    }

    pub fn z_max(mut self, z_max: f64) -> Self {
        self.riccati.z_max = z_max;
        self
    }

    pub fn form(mut self, form: RiccatiForm) -> Self {
        self.riccati.form = form;
        self
    }

    pub fn estimate_error(mut self, on: bool) -> Self {
        self.riccati.estimate_error = on;
        self
    }
}

/// Fiber factor over one Riccati segment.
#[derive(Debug, Clone)]
pub struct SegmentFiber {
    /// `U₂` at every grid point of the segment, starting from the identity.
    pub u2: Vec<CMatrix>,
    /// Phases over the segment (`n = 1`).
    pub phases: Option<PhaseSeries>,
    /// The `(N−1)`-dimensional solution this segment recursed into.
    pub sublevel: Option<Box<FactoredSolution>>,
}

/// All factors at one grid point.
#[derive(Debug, Clone)]
pub struct FactoredEvolution {
    pub z: CMatrix,
    pub w: CMatrix,
    pub gamma1: CMatrix,
    pub gamma2: CMatrix,
    pub b: CMatrix,
    pub u1: CMatrix,
    pub u2: CMatrix,
    /// Evolution accumulated up to the current segment's start.
    pub accumulated: CMatrix,
    /// `U₁U₂` times the accumulated evolution.
    pub u: CMatrix,
    /// `(μ_total, geometric, dynamical)` when `n = 1`.
    pub phases: Option<(f64, f64, f64)>,
}

#[derive(Debug, Clone)]
pub struct FactoredSolution {
    pub trajectory: RiccatiTrajectory,
    pub fibers: Vec<SegmentFiber>,
    pub strategy: FiberStrategy,
    /// Phases across all segments, continuous through restarts (`n = 1`).
    pub phases: Option<PhaseSeries>,
}

impl FactoredSolution {
    pub fn dim(&self) -> usize {
        self.trajectory.dim
    }

    pub fn times(&self) -> Vec<f64> {
        self.trajectory.times()
    }

    pub fn final_u(&self) -> &CMatrix {
        &self.trajectory.final_evolution
    }

    pub fn evolution_at(&self, k: usize) -> Result<FactoredEvolution> {
        let (s, j) = self.trajectory.locate(k);
        let z = self.trajectory.segments[s].z[j].clone();
        let (closure, gauge) = gauge_from_z(&z)?;
        let u2 = self.fibers[s].u2[j].clone();
        let accumulated = self.trajectory.accumulated_before(s);
        let u = &(&gauge.u1 * &u2) * &accumulated;
        let phases = self
            .phases
            .as_ref()
            .map(|p| (p.mu_total[k], p.geometric[k], p.dynamical[k]));
        Ok(FactoredEvolution {
            z,
            w: closure.w,
            gamma1: closure.gamma1,
            gamma2: closure.gamma2,
            b: gauge.b,
            u1: gauge.u1,
            u2,
            accumulated,
            u,
            phases,
        })
    }

    pub fn u_at(&self, k: usize) -> Result<CMatrix> {
        Ok(self.evolution_at(k)?.u)
    }

    pub fn u_samples(&self) -> Result<Vec<CMatrix>> {
        (0..=self.trajectory.grid.steps).map(|k| self.u_at(k)).collect()
    }

    /// End-of-run phase totals for this level and every level below it,
    /// summed over segments.
    pub fn level_totals(&self) -> Vec<PhaseTotals> {
        let mut out = Vec::new();
        if let Some((mu_total, geometric, dynamical)) = self.phases.as_ref().and_then(|p| p.last()) {
            out.push(PhaseTotals { level: self.dim(), mu_total, geometric, dynamical });
        }
        for fiber in &self.fibers {
            let Some(sub) = &fiber.sublevel else { continue };
            for t in sub.level_totals() {
                match out.iter_mut().find(|o| o.level == t.level) {
                    Some(o) => {
                        o.mu_total += t.mu_total;
                        o.geometric += t.geometric;
                        o.dynamical += t.dynamical;
                    }
                    None => out.push(t),
                }
            }
        }
        out
    }
}

struct FiberBuilder<'a> {
    h: &'a BlockedHamiltonian,
    opts: &'a SolveOptions,
    fibers: Vec<SegmentFiber>,
}

impl crate::riccati::SegmentClosure for FiberBuilder<'_> {
    fn close(&mut self, grid: &Grid, seg: &RiccatiSegment) -> Result<CMatrix> {
        let fiber = match self.opts.strategy {
            FiberStrategy::Hierarchical => hierarchical_fiber(self.h, self.opts, grid, seg)?,
            FiberStrategy::Direct => direct_fiber(self.h, grid, seg)?,
        };
        let (_, gauge) = gauge_from_z(seg.z.last().expect("non-empty segment"))?;
        let end = &gauge.u1 * fiber.u2.last().expect("non-empty fiber");
        self.fibers.push(fiber);
        Ok(end)
    }
}

fn hierarchical_fiber(h: &BlockedHamiltonian, opts: &SolveOptions, grid: &Grid, seg: &RiccatiSegment) -> Result<SegmentFiber> {
    let dim = h.dim();
    let samples = SegmentSamples::collect(h, grid, seg)?;
    let phases = segment_phases(&samples, grid.step)?;
    let local = Grid { t0: grid.time(seg.start), step: grid.step, steps: seg.steps() };

    let (upper, sublevel): (Vec<CMatrix>, _) = if dim == 2 {
        (vec![CMatrix::identity(1); seg.z.len()], None)
    } else {
        let traceless = |m: CMatrix| {
            let shift = m.trace().re / m.rows() as f64;
            crate::hamiltonian::shift_identity(&m, -shift)
        };
        let mut nodes = Vec::with_capacity(2 * seg.steps() + 1);
        for j in 0..=seg.steps() {
            nodes.push(traceless(recursion_hamiltonian(&samples.node_blocks[j], &samples.z_nodes[j])?));
            if j < seg.steps() {
                nodes.push(traceless(recursion_hamiltonian(&samples.mid_blocks[j], &samples.z_mids[j])?));
            }
        }
        let sampled = SampledHamiltonian::new(local.t0, 0.5 * grid.step, nodes);
        let sub_h = BlockedHamiltonian::from_arc(Arc::new(sampled), 1)?;
        let sub_opts = SolveOptions {
            riccati: RiccatiOptions::new(local).z_max(opts.riccati.z_max),
            strategy: FiberStrategy::Hierarchical,
        };
        let sub = solve_factored(&sub_h, &sub_opts)?;
        (sub.u_samples()?, Some(Box::new(sub)))
    };

    let lower = (dim - 1) as f64;
    let u2 = upper
        .iter()
        .zip(&phases.mu_total)
        .map(|(u, &mu)| {
            let up = u.scale(C64::from_polar(1.0, -mu / lower));
            CMatrix::block_diag(&up, &CMatrix::scalar(1, C64::from_polar(1.0, mu)))
        })
        .collect();
    Ok(SegmentFiber { u2, phases: Some(phases), sublevel })
}

const GAUSS_OFFSET: f64 = 0.288_675_134_594_812_9; // √3/6

fn direct_fiber(h: &BlockedHamiltonian, grid: &Grid, seg: &RiccatiSegment) -> Result<SegmentFiber> {
    let n = h.block_size();
    let m = h.dim() - n;
    let step = grid.step;
    let mut upper = CMatrix::identity(m);
    let mut lower = CMatrix::identity(n);
    let mut u2 = Vec::with_capacity(seg.z.len());
    u2.push(CMatrix::identity(m + n));

    for j in 0..seg.steps() {
        let t = grid.time(seg.start + j);
        let mut generators = Vec::with_capacity(2);
        for c in [0.5 - GAUSS_OFFSET, 0.5 + GAUSS_OFFSET] {
            let z = hermite(&seg.z[j], &seg.zdot[j], &seg.z[j + 1], &seg.zdot[j + 1], step, c);
            let blocks = h.blocks_at(t + c * step)?;
            let zdot = riccati_rhs(&blocks, &z)?;
            generators.push(effective_hamiltonian_hermitian(&blocks, &z, &zdot)?);
        }
        let magnus = |h1: &CMatrix, h2: &CMatrix| -> CMatrix {
            let first = (h1 + h2).scale(-I * (0.5 * step));
            let second = h2.commutator(h1).scale_real(-(3f64.sqrt()) * step * step / 12.0);
            expm(&(&first + &second))
        };
        upper = &magnus(&generators[0].0, &generators[1].0) * &upper;
        lower = &magnus(&generators[0].1, &generators[1].1) * &lower;
        u2.push(CMatrix::block_diag(&upper, &lower));
    }

    let phases = if n == 1 {
        let samples = SegmentSamples::collect(h, grid, seg)?;
        Some(segment_phases(&samples, step)?)
    } else {
        None
    };
    Ok(SegmentFiber { u2, phases, sublevel: None })
}

/// Pairs a Riccati trajectory with its per-segment fibers.
pub fn reconstruct_full(
    trajectory: RiccatiTrajectory,
    fibers: Vec<SegmentFiber>,
    strategy: FiberStrategy,
) -> Result<FactoredSolution> {
    if fibers.len() != trajectory.segments.len() {
        return Err(Error::Contract(format!(
            "{} fibers for {} Riccati segments",
            fibers.len(),
            trajectory.segments.len()
        )));
    }
    for (f, s) in fibers.iter().zip(&trajectory.segments) {
        if f.u2.len() != s.z.len() {
            return Err(Error::Contract(format!(
                "fiber has {} samples, segment starting at {} has {}",
                f.u2.len(),
                s.start,
                s.z.len()
            )));
        }
    }
    let phases = if fibers.iter().all(|f| f.phases.is_some()) {
        let mut all = PhaseSeries::default();
        for f in &fibers {
            all.extend_continuous(f.phases.as_ref().expect("checked"));
        }
        Some(all)
    } else {
        None
    };
    Ok(FactoredSolution { trajectory, fibers, strategy, phases })
}

pub fn solve_factored(h: &BlockedHamiltonian, opts: &SolveOptions) -> Result<FactoredSolution> {
    if opts.strategy == FiberStrategy::Hierarchical && h.block_size() != 1 {
        return Err(Error::Unsupported(format!(
            "hierarchical peeling needs n = 1, got n = {}",
            h.block_size()
        )));
    }
    let mut builder = FiberBuilder { h, opts, fibers: Vec::new() };
    let trajectory = integrate_riccati(h, &opts.riccati, &mut builder)?;
    reconstruct_full(trajectory, builder.fibers, opts.strategy)
}

/// Hierarchical `n = 1` solve over `[0, t_end]`.
pub fn hierarchical_solve(h: &BlockedHamiltonian, t_end: f64, steps: usize) -> Result<FactoredSolution> {
    let grid = Grid::new(0.0, t_end, steps)?;
    solve_factored(h, &SolveOptions::new(grid, FiberStrategy::Hierarchical))
}
