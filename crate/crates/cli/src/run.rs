//! Executes one scenario along its requested paths and assembles the
//! report and trajectory table.

use serde::Serialize;
use unitint::bloch::{crosscheck_pictures, CrosscheckReport, PictureScenario};
use unitint::factorization::{solve_factored, FactoredSolution, FiberStrategy, SolveOptions};
use unitint::hamiltonian::BlockedHamiltonian;
use unitint::linalg::{CMatrix, I};
use unitint::ode::Grid;
use unitint::oracle::{compare, propagate, PropagationResult};
use unitint::riccati::RiccatiForm;

use crate::scenario::{matrix_to_json, JsonMatrix, Path, Scenario};

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct PathReport {
    pub path: String,
    pub endpoint: JsonMatrix,
    /// Largest `‖U†U − I‖_F` over all samples.
    pub unitarity_residual: f64,
    /// Step-doubling error estimate of the path's own integrator.
    pub est_error: f64,
    /// Largest centered-difference `‖iU̇ − HU‖_F / max(‖H‖_F, 1)`.
    pub schroedinger_residual: Option<f64>,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct DistanceEntry {
    pub a: String,
    pub b: String,
    pub plain: f64,
    pub phase_insensitive: f64,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct PhaseEntry {
    pub path: String,
    pub level: usize,
    pub mu_total: f64,
    pub geometric: f64,
    pub dynamical: f64,
    /// Largest `|geometric + dynamical − μ_total|` along the run, with the
    /// dynamical part integrated independently (top level only).
    pub split_residual: Option<f64>,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct RestartEntry {
    pub path: String,
    pub time: f64,
    pub index: usize,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct BlochEntry {
    pub max_deviation: f64,
    pub norm_drift: f64,
    pub fd_residual: f64,
    pub restarts: usize,
    pub kappa: Option<f64>,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Verdict {
    pub name: String,
    pub tolerance: f64,
    pub measured: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct RunReport {
    pub id: String,
    #[serde(rename = "N")]
    pub dim: usize,
    pub n: usize,
    pub t_end: f64,
    pub steps: usize,
    #[serde(rename = "Z_max")]
    pub z_max: f64,
    pub paths: Vec<PathReport>,
    pub distances: Vec<DistanceEntry>,
    pub phases: Vec<PhaseEntry>,
    pub restarts: Vec<RestartEntry>,
    pub bloch: Option<BlochEntry>,
    pub verdicts: Vec<Verdict>,
    pub pass: bool,
}

pub struct RunOutcome {
    pub report: RunReport,
    pub csv: String,
}

fn factorized(s: &Scenario, h: &BlockedHamiltonian, strategy: FiberStrategy) -> unitint::Result<FactoredSolution> {
    let grid = Grid::new(0.0, s.t_end, s.steps)?;
    let mut opts = SolveOptions::new(grid, strategy).z_max(s.z_max).estimate_error(true);
    if let (Some(coeffs), FiberStrategy::Direct) = (s.so5_coefficients(), strategy) {
        opts = opts.form(RiccatiForm::So5(coeffs));
    }
    solve_factored(h, &opts)
}

fn schroedinger_residual(h: &BlockedHamiltonian, times: &[f64], us: &[CMatrix]) -> unitint::Result<f64> {
    let mut worst: f64 = 0.0;
    for k in 1..us.len().saturating_sub(1) {
        let hm = h.eval(times[k])?;
        let du = (&us[k + 1] - &us[k - 1]).scale_real(1.0 / (times[k + 1] - times[k - 1]));
        let resid = (&du.scale(I) - &(&hm * &us[k])).norm_fro();
        worst = worst.max(resid / hm.norm_fro().max(1.0));
    }
    Ok(worst)
}

fn max_unitarity(us: &[CMatrix]) -> f64 {
    us.iter().map(|u| u.unitarity_residual().unwrap_or(f64::INFINITY)).fold(0.0, f64::max)
}

enum Evolution {
    Factored(FactoredSolution, Vec<CMatrix>),
    Oracle(PropagationResult),
}

impl Evolution {
    fn final_u(&self) -> &CMatrix {
        match self {
            Evolution::Factored(sol, _) => sol.final_u(),
            Evolution::Oracle(r) => r.final_u(),
        }
    }
}

fn fmt_header_matrix(prefix: &str, rows: usize, cols: usize, out: &mut Vec<String>) {
    for i in 0..rows {
        for j in 0..cols {
            out.push(format!("{prefix}_{i}_{j}_re"));
            out.push(format!("{prefix}_{i}_{j}_im"));
        }
    }
}

fn push_matrix(m: &CMatrix, out: &mut Vec<String>) {
    for c in m.as_slice() {
        out.push(c.re.to_string());
        out.push(c.im.to_string());
    }
}

pub fn run_scenario(s: &Scenario) -> unitint::Result<RunOutcome> {
    let h = s.hamiltonian()?;
    let mut evolutions: Vec<(Path, Evolution)> = Vec::new();
    let mut crosscheck: Option<CrosscheckReport> = None;

    let mut paths = s.paths.clone();
    paths.sort();
    paths.dedup();
    for &path in &paths {
        match path {
            Path::Factorized | Path::Hierarchical => {
                let strategy =
                    if path == Path::Factorized { FiberStrategy::Direct } else { FiberStrategy::Hierarchical };
                let sol = factorized(s, &h, strategy)?;
                let us = sol.u_samples()?;
                evolutions.push((path, Evolution::Factored(sol, us)));
            }
            Path::Oracle => {
                let r = propagate(h.hamiltonian().as_ref(), s.t_end, s.oracle_steps())?;
                evolutions.push((path, Evolution::Oracle(r)));
            }
            Path::Bloch => {
                let grid = Grid::new(0.0, s.t_end, s.steps)?;
                let scenario = match (s.spin_half_field(), s.so5_coefficients()) {
                    (Some(field), _) => PictureScenario::SpinHalf(field),
                    (_, Some(coeffs)) => PictureScenario::So5(coeffs),
                    _ => unreachable!("validated"),
                };
                crosscheck = Some(crosscheck_pictures(&scenario, grid, s.z_max)?);
            }
        }
    }

    let mut path_reports = Vec::new();
    let mut phases = Vec::new();
    let mut restarts = Vec::new();
    for (path, ev) in &evolutions {
        let report = match ev {
            Evolution::Factored(sol, us) => {
                for r in &sol.trajectory.restarts {
                    restarts.push(RestartEntry { path: path.to_string(), time: r.time, index: r.index });
                }
                let split = sol.phases.as_ref().map(|p| {
                    (0..p.len())
                        .map(|k| (p.geometric[k] + p.dynamical_integrated[k] - p.mu_total[k]).abs())
                        .fold(0.0, f64::max)
                });
                for (i, t) in sol.level_totals().into_iter().enumerate() {
                    phases.push(PhaseEntry {
                        path: path.to_string(),
                        level: t.level,
                        mu_total: t.mu_total,
                        geometric: t.geometric,
                        dynamical: t.dynamical,
                        split_residual: if i == 0 { split } else { None },
                    });
                }
                PathReport {
                    path: path.to_string(),
                    endpoint: matrix_to_json(sol.final_u()),
                    unitarity_residual: max_unitarity(us),
                    est_error: sol.trajectory.est_error,
                    schroedinger_residual: Some(schroedinger_residual(&h, &sol.times(), us)?),
                }
            }
            Evolution::Oracle(r) => PathReport {
                path: path.to_string(),
                endpoint: matrix_to_json(r.final_u()),
                unitarity_residual: max_unitarity(&r.u_samples),
                est_error: r.est_error,
                schroedinger_residual: None,
            },
        };
        path_reports.push(report);
    }

    let mut distances = Vec::new();
    for (i, (pa, a)) in evolutions.iter().enumerate() {
        for (pb, b) in &evolutions[i + 1..] {
            let d = compare(a.final_u(), b.final_u())?;
            distances.push(DistanceEntry {
                a: pa.to_string(),
                b: pb.to_string(),
                plain: d.plain,
                phase_insensitive: d.phase_insensitive,
            });
        }
    }

    let bloch = crosscheck.as_ref().map(|c| BlochEntry {
        max_deviation: c.max_deviation,
        norm_drift: c.norm_drift,
        fd_residual: c.fd_residual,
        restarts: c.restart_times.len(),
        kappa: c.kappa,
    });

    let riccati_reports = || path_reports.iter().filter(|p| p.schroedinger_residual.is_some());
    let mut verdicts = Vec::new();
    for (name, &tolerance) in &s.tolerances {
        let measured = match name.as_str() {
            "distance" => distances.iter().map(|d| d.phase_insensitive).fold(0.0, f64::max),
            "unitarity" => path_reports.iter().map(|p| p.unitarity_residual).fold(0.0, f64::max),
            "schroedinger" => riccati_reports().filter_map(|p| p.schroedinger_residual).fold(0.0, f64::max),
            "phase_split" => phases.iter().filter_map(|p| p.split_residual).fold(0.0, f64::max),
            "riccati_error" => riccati_reports().map(|p| p.est_error).fold(0.0, f64::max),
            "oracle_error" => path_reports.iter().filter(|p| p.path == "oracle").map(|p| p.est_error).fold(0.0, f64::max),
            "bloch_deviation" => bloch.as_ref().map_or(f64::NAN, |b| b.max_deviation),
            "bloch_norm_drift" => bloch.as_ref().map_or(f64::NAN, |b| b.norm_drift),
            "bloch_fd" => bloch.as_ref().map_or(f64::NAN, |b| b.fd_residual),
            _ => unreachable!("validated"),
        };
        verdicts.push(Verdict { name: name.clone(), tolerance, measured, pass: measured <= tolerance });
    }
    let pass = verdicts.iter().all(|v| v.pass);

    let csv = trajectory_csv(s, &evolutions, crosscheck.as_ref());
    let report = RunReport {
        id: s.id.clone(),
        dim: s.dim,
        n: s.n,
        t_end: s.t_end,
        steps: s.steps,
        z_max: s.z_max,
        paths: path_reports,
        distances,
        phases,
        restarts,
        bloch,
        verdicts,
        pass,
    };
    Ok(RunOutcome { report, csv })
}

/// `t`, then `z` of the first Riccati path (or the oracle `U` when there is
/// none), the Riccati-mapped Bloch vector, and the top-level phases.
fn trajectory_csv(s: &Scenario, evolutions: &[(Path, Evolution)], crosscheck: Option<&CrosscheckReport>) -> String {
    let riccati = evolutions.iter().find_map(|(_, e)| match e {
        Evolution::Factored(sol, _) => Some(sol),
        _ => None,
    });
    let oracle = evolutions.iter().find_map(|(_, e)| match e {
        Evolution::Oracle(r) => Some(r),
        _ => None,
    });
    let bloch_dim = if s.is_so5() { 5 } else { 3 };

    let mut header = vec!["t".to_string()];
    let times: Vec<f64> = match (riccati, oracle, crosscheck) {
        (Some(sol), _, _) => {
            fmt_header_matrix("z", s.dim - s.n, s.n, &mut header);
            sol.times()
        }
        (None, Some(r), _) => {
            fmt_header_matrix("u", s.dim, s.dim, &mut header);
            r.times.clone()
        }
        (None, None, Some(c)) => c.times.clone(),
        (None, None, None) => Vec::new(),
    };
    if crosscheck.is_some() {
        header.extend((1..=bloch_dim).map(|i| format!("m{i}")));
    }
    let phases = riccati.and_then(|sol| sol.phases.as_ref());
    if phases.is_some() {
        header.extend(["mu_total", "geometric", "dynamical"].map(String::from));
    }

    let mut out = header.join(",");
    out.push('\n');
    for (k, t) in times.iter().enumerate() {
        let mut row = vec![t.to_string()];
        match (riccati, oracle) {
            (Some(sol), _) => push_matrix(sol.trajectory.z_at(k), &mut row),
            (None, Some(r)) => push_matrix(&r.u_samples[k], &mut row),
            _ => {}
        }
        if let Some(c) = crosscheck {
            row.extend(c.riccati[k][..bloch_dim].iter().map(|x| x.to_string()));
        }
        if let Some(p) = phases {
            row.extend([p.mu_total[k], p.geometric[k], p.dynamical[k]].map(|x| x.to_string()));
        }
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}
