//! Deterministically seeded ensemble campaigns.
//!
//! Every task is a pure function of the config and a seed derived from
//! (realization, amplitude index, trajectory index), and results are
//! merged in index order, so campaign output is byte-identical for any
//! worker count. Noise averaging follows the density-matrix convention:
//! records are averaged over trajectories and the efficiency is taken
//! from the averaged record; by linearity that equals the mean of the
//! per-trajectory efficiencies, which is asserted on every run.

mod classify;

pub use classify::*;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bath::{tabulate_kernels, BathKernels, SpectralParams};
use crate::dynamics::{efficiency, evolve, EnvironmentModel, SimParams};
use crate::exec;
use crate::graphs::{
    parse_edge_list, random_removal_graph, select_sink, watts_strogatz_graph, Graph, SinkChoice,
};
use crate::noise::{sample_trajectory, RtnParams};
use crate::util::{fmt_g17, splitmix64, trapezoid_uniform, TimeGrid};
use crate::{Error, Result};

/// Network family of a campaign.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum NetworkFamily {
    RandomRemoval {
        n: usize,
        n_removed: usize,
    },
    WattsStrogatz {
        n: usize,
        k: usize,
        #[serde(default = "default_p")]
        p: f64,
    },
    /// A stored edge list; the same graph backs every realization.
    GraphFile { path: String },
}

fn default_p() -> f64 {
    0.75
}

/// Full campaign description. JSON documents mirror the field names;
/// unknown keys are rejected and missing keys take the standard values
/// (V=2, kappa=0.5, t_up=pi, nu=1, k_BT=1, x_f=2, f=0.5, n_traj=100).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignConfig {
    #[serde(default = "default_family")]
    pub family: NetworkFamily,
    #[serde(default = "default_environment")]
    pub environment: EnvironmentModel,
    #[serde(default = "default_v")]
    pub v: f64,
    #[serde(default = "default_kappa")]
    pub kappa: f64,
    #[serde(default = "default_t_up")]
    pub t_up: f64,
    /// Integration step; defaults to t_up/800.
    #[serde(default)]
    pub dt: Option<f64>,
    #[serde(default = "default_nu")]
    pub nu: f64,
    /// Single noise amplitude, used when no grid is given.
    #[serde(default)]
    pub omega: Option<f64>,
    #[serde(default)]
    pub omega_grid: Option<Vec<f64>>,
    /// Polaron displacement fraction.
    #[serde(default = "default_f")]
    pub f: f64,
    #[serde(default = "default_x_f")]
    pub x_f: f64,
    #[serde(default = "default_k_bt")]
    pub k_bt: f64,
    #[serde(default = "default_n_realizations")]
    pub n_realizations: usize,
    #[serde(default = "default_n_traj")]
    pub n_traj: usize,
    #[serde(default)]
    pub master_seed: u64,
    /// Significance threshold for curve classification.
    #[serde(default = "default_theta")]
    pub classify_theta: f64,
    /// Optional neighbor-range sweep for Watts-Strogatz campaigns.
    #[serde(default)]
    pub k_grid: Option<Vec<usize>>,
    /// Optional rewiring-probability sweep for Watts-Strogatz campaigns.
    #[serde(default)]
    pub p_grid: Option<Vec<f64>>,
}

fn default_family() -> NetworkFamily {
    NetworkFamily::RandomRemoval {
        n: 10,
        n_removed: 0,
    }
}
fn default_environment() -> EnvironmentModel {
    EnvironmentModel::Noiseless
}
fn default_v() -> f64 {
    2.0
}
fn default_kappa() -> f64 {
    0.5
}
fn default_t_up() -> f64 {
    std::f64::consts::PI
}
fn default_nu() -> f64 {
    1.0
}
fn default_f() -> f64 {
    0.5
}
fn default_x_f() -> f64 {
    2.0
}
fn default_k_bt() -> f64 {
    1.0
}
fn default_n_realizations() -> usize {
    1
}
fn default_n_traj() -> usize {
    100
}
fn default_theta() -> f64 {
    DEFAULT_CLASS_THETA
}

impl Default for CampaignConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("empty config is valid")
    }
}

/// Reserved amplitude-index lane for graph-generation seeds.
const GRAPH_LANE: u32 = 0xFFFF;
const MAX_REALIZATIONS: usize = 1 << 24;
const MAX_TRAJECTORIES: usize = 1 << 24;

impl CampaignConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: CampaignConfig = serde_json::from_str(text)
            .map_err(|e| Error::parse("config", e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialization cannot fail")
    }

    pub fn validate(&self) -> Result<()> {
        if !self.v.is_finite() {
            return Err(Error::parse("v", "must be finite"));
        }
        if !(self.kappa >= 0.0) || !self.kappa.is_finite() {
            return Err(Error::parse("kappa", "must be >= 0"));
        }
        if !(self.t_up > 0.0) || !self.t_up.is_finite() {
            return Err(Error::parse("t_up", "must be positive"));
        }
        if let Some(dt) = self.dt {
            if !(dt > 0.0) || dt > self.t_up {
                return Err(Error::parse("dt", "must be in (0, t_up]"));
            }
        }
        if !(self.nu > 0.0) || !self.nu.is_finite() {
            return Err(Error::parse("nu", "must be positive"));
        }
        if let Some(omega) = self.omega {
            if !(omega >= 0.0) || !omega.is_finite() {
                return Err(Error::parse("omega", "must be >= 0"));
            }
        }
        if let Some(grid) = &self.omega_grid {
            if grid.is_empty() {
                return Err(Error::parse("omega_grid", "must not be empty"));
            }
            if grid.len() >= GRAPH_LANE as usize {
                return Err(Error::parse("omega_grid", "too many amplitudes"));
            }
            for w in grid.windows(2) {
                if !(w[1] > w[0]) {
                    return Err(Error::parse("omega_grid", "must be strictly increasing"));
                }
            }
            if !(grid[0] >= 0.0) {
                return Err(Error::parse("omega_grid", "amplitudes must be >= 0"));
            }
        }
        if !(0.0..=1.0).contains(&self.f) {
            return Err(Error::parse("f", "must be in [0, 1]"));
        }
        if !(self.x_f >= 0.0) || !self.x_f.is_finite() {
            return Err(Error::parse("x_f", "must be >= 0"));
        }
        if !(self.k_bt > 0.0) || !self.k_bt.is_finite() {
            return Err(Error::parse("k_bt", "must be positive"));
        }
        if self.n_realizations == 0 || self.n_realizations >= MAX_REALIZATIONS {
            return Err(Error::parse("n_realizations", "must be in 1..2^24"));
        }
        if self.n_traj == 0 || self.n_traj >= MAX_TRAJECTORIES {
            return Err(Error::parse("n_traj", "must be in 1..2^24"));
        }
        if !(self.classify_theta > 0.0) {
            return Err(Error::parse("classify_theta", "must be positive"));
        }
        if (self.k_grid.is_some() || self.p_grid.is_some())
            && !matches!(self.family, NetworkFamily::WattsStrogatz { .. })
        {
            return Err(Error::parse(
                "k_grid",
                "k/p grids apply to the watts_strogatz family only",
            ));
        }
        Ok(())
    }

    pub fn sim_params(&self) -> Result<SimParams> {
        let grid = match self.dt {
            Some(dt) => TimeGrid::from_step(self.t_up, dt)?,
            None => TimeGrid::new(self.t_up, 800)?,
        };
        Ok(SimParams {
            v: self.v,
            kappa: self.kappa,
            t_up: grid.t_up,
            n_steps: grid.n_steps,
            eps0: None,
            environment: self.environment,
        })
    }

    /// Amplitude grid of the campaign: the configured grid for RTN
    /// models, a single point otherwise.
    pub fn effective_omegas(&self) -> Vec<f64> {
        if !self.environment.needs_rtn() {
            return vec![0.0];
        }
        match (&self.omega_grid, self.omega) {
            (Some(grid), _) => grid.clone(),
            (None, Some(omega)) => vec![omega],
            (None, None) => vec![10.0],
        }
    }

    /// Curves are classified when they start at the noiseless point and
    /// carry enough samples.
    pub fn wants_classification(&self) -> bool {
        let omegas = self.effective_omegas();
        self.environment.needs_rtn() && omegas.len() >= 5 && omegas[0] == 0.0
    }

    /// Tabulate bath kernels on the campaign grid, if the model needs a
    /// bath.
    pub fn kernels(&self) -> Result<Option<BathKernels>> {
        self.kernels_with(self.x_f, self.k_bt)
    }

    fn kernels_with(&self, x_f: f64, k_bt: f64) -> Result<Option<BathKernels>> {
        if !self.environment.needs_bath() {
            return Ok(None);
        }
        let sim = self.sim_params()?;
        let spectral = SpectralParams::from_coupling(x_f, k_bt)?;
        Ok(Some(tabulate_kernels(
            sim.grid()?,
            self.f,
            self.v,
            &spectral,
        )?))
    }
}

/// Strong 64-bit mix of the master seed with the packed task indices;
/// injective over the campaign index space for a fixed master seed.
pub fn derive_seed(master: u64, realization: u32, omega_idx: u32, trajectory: u32) -> u64 {
    debug_assert!(realization < (1 << 24) && trajectory < (1 << 24) && omega_idx <= GRAPH_LANE);
    let packed =
        ((realization as u64) << 40) | ((omega_idx as u64) << 24) | trajectory as u64;
    splitmix64(master ^ splitmix64(packed))
}

/// Seed for the graph of one realization (reserved amplitude lane).
pub fn graph_seed(master: u64, realization: usize) -> u64 {
    derive_seed(master, realization as u32, GRAPH_LANE, 0)
}

/// Build the graph of one realization.
pub fn realize_graph(config: &CampaignConfig, realization: usize) -> Result<Graph> {
    realize_graph_cell(config, &config.family, realization)
}

fn realize_graph_cell(
    config: &CampaignConfig,
    family: &NetworkFamily,
    realization: usize,
) -> Result<Graph> {
    let mut rng = ChaCha8Rng::seed_from_u64(graph_seed(config.master_seed, realization));
    match family {
        NetworkFamily::RandomRemoval { n, n_removed } => {
            random_removal_graph(*n, *n_removed, &mut rng)
        }
        NetworkFamily::WattsStrogatz { n, k, p } => watts_strogatz_graph(*n, *k, *p, &mut rng),
        NetworkFamily::GraphFile { path } => {
            let text = std::fs::read_to_string(path)?;
            parse_edge_list(&text)
        }
    }
}

/// Outcome of one (graph, amplitude) cell.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub eta: f64,
    pub final_trace: f64,
    pub grid: TimeGrid,
    /// Noise-averaged sink population on the grid.
    pub mean_rho_ss: Vec<f64>,
    /// Noise-averaged trace on the grid.
    pub mean_trace: Vec<f64>,
}

impl RunSummary {
    fn degenerate(grid: TimeGrid) -> Self {
        RunSummary {
            eta: 0.0,
            final_trace: 1.0,
            mean_rho_ss: vec![0.0; grid.len()],
            mean_trace: vec![1.0; grid.len()],
            grid,
        }
    }

    /// CSV with columns t, rho_ss, trace for the averaged record.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,rho_ss,trace\n");
        for (i, t) in self.grid.points().enumerate() {
            out.push_str(&format!(
                "{},{},{}\n",
                fmt_g17(t),
                fmt_g17(self.mean_rho_ss[i]),
                fmt_g17(self.mean_trace[i])
            ));
        }
        out
    }
}

/// Run one realization graph at one amplitude: a single propagation for
/// deterministic models, a trajectory-averaged record for RTN models.
///
/// `kernels` may be precomputed by the caller; when `None` and the model
/// needs a bath they are tabulated here.
pub fn run_single(
    config: &CampaignConfig,
    graph: &Graph,
    omega: f64,
    realization: usize,
    omega_idx: usize,
    kernels: Option<&BathKernels>,
) -> Result<RunSummary> {
    config.validate()?;
    let sim = config.sim_params()?;
    let owned = if kernels.is_none() && config.environment.needs_bath() {
        config.kernels()?
    } else {
        None
    };
    let kernels = kernels.or(owned.as_ref());
    run_single_inner(config, graph, omega, realization, omega_idx, kernels, &sim)
}

fn run_single_inner(
    config: &CampaignConfig,
    graph: &Graph,
    omega: f64,
    realization: usize,
    omega_idx: usize,
    kernels: Option<&BathKernels>,
    sim: &SimParams,
) -> Result<RunSummary> {
    let grid = sim.grid()?;
    let sink = match select_sink(graph, 0)? {
        SinkChoice::Node(s) => s,
        SinkChoice::Degenerate => return Ok(RunSummary::degenerate(grid)),
    };

    if !config.environment.needs_rtn() {
        let rec = evolve(graph, sink, sim, None, kernels, None)?;
        let eta = efficiency(&rec, sim.kappa)?;
        return Ok(RunSummary {
            eta,
            final_trace: rec.final_trace(),
            grid,
            mean_rho_ss: rec.rho_ss,
            mean_trace: rec.trace,
        });
    }

    let rtn = RtnParams::new(omega, config.nu)?;
    let n_traj = config.n_traj;
    let runs: Vec<Result<(Vec<f64>, Vec<f64>, f64)>> = exec::map_indexed(n_traj, |t| {
        let seed = derive_seed(
            config.master_seed,
            realization as u32,
            omega_idx as u32,
            t as u32,
        );
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let traj = sample_trajectory(config.nu, sim.t_up, &mut rng)?;
        let rec = evolve(graph, sink, sim, Some(&traj), kernels, Some(&rtn))?;
        let eta_raw = 2.0 * sim.kappa * trapezoid_uniform(&rec.rho_ss, grid.step());
        Ok((rec.rho_ss, rec.trace, eta_raw))
    });

    let mut mean_rho_ss = vec![0.0; grid.len()];
    let mut mean_trace = vec![0.0; grid.len()];
    let mut eta_mean_of_traj = 0.0;
    for run in runs {
        let (rho_ss, trace, eta_raw) = run?;
        for (acc, v) in mean_rho_ss.iter_mut().zip(&rho_ss) {
            *acc += v;
        }
        for (acc, v) in mean_trace.iter_mut().zip(&trace) {
            *acc += v;
        }
        eta_mean_of_traj += eta_raw;
    }
    let norm = n_traj as f64;
    mean_rho_ss.iter_mut().for_each(|v| *v /= norm);
    mean_trace.iter_mut().for_each(|v| *v /= norm);
    eta_mean_of_traj /= norm;

    let eta_of_mean = 2.0 * sim.kappa * trapezoid_uniform(&mean_rho_ss, grid.step());
    if (eta_of_mean - eta_mean_of_traj).abs() > 1e-10 {
        return Err(Error::Consistency(format!(
            "averaging-order mismatch: eta of mean record {eta_of_mean} vs mean of per-trajectory eta {eta_mean_of_traj}"
        )));
    }
    if eta_of_mean > 1.0 + 1e-6 {
        return Err(Error::Consistency(format!(
            "efficiency {eta_of_mean} exceeds 1 beyond tolerance"
        )));
    }

    Ok(RunSummary {
        eta: eta_of_mean.clamp(0.0, 1.0),
        final_trace: *mean_trace.last().expect("non-empty grid"),
        grid,
        mean_rho_ss,
        mean_trace,
    })
}

/// Efficiency at every amplitude of the campaign grid for one
/// realization graph, with per-amplitude derived seeds.
pub fn sweep_omega(
    config: &CampaignConfig,
    graph: &Graph,
    realization: usize,
) -> Result<EfficiencyCurve> {
    config.validate()?;
    let kernels = config.kernels()?;
    let sim = config.sim_params()?;
    sweep_omega_inner(config, graph, realization, kernels.as_ref(), &sim)
}

fn sweep_omega_inner(
    config: &CampaignConfig,
    graph: &Graph,
    realization: usize,
    kernels: Option<&BathKernels>,
    sim: &SimParams,
) -> Result<EfficiencyCurve> {
    let omegas = config.effective_omegas();
    let mut etas = Vec::with_capacity(omegas.len());
    for (omega_idx, &omega) in omegas.iter().enumerate() {
        let summary =
            run_single_inner(config, graph, omega, realization, omega_idx, kernels, sim)?;
        etas.push(summary.eta);
    }
    let mut curve = EfficiencyCurve {
        omegas,
        etas,
        realization,
        class: None,
    };
    if config.wants_classification() {
        curve.class = Some(classify_curve(&curve, config.classify_theta)?);
    }
    Ok(curve)
}

/// Family parameters of one campaign cell, echoed into the results CSV.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CellParams {
    RandomRemoval { n_removed: usize },
    WattsStrogatz { k: usize, p: f64 },
    File,
}

/// One results row: a (cell, realization, amplitude) triple.
#[derive(Debug, Clone, PartialEq)]
pub struct CampaignRow {
    pub realization: usize,
    pub cell: CellParams,
    pub omega: f64,
    pub eta: f64,
    /// Set on the last amplitude row of a classified realization.
    pub class: Option<CurveClass>,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct CampaignResult {
    pub rows: Vec<CampaignRow>,
    pub class_distribution: Option<ClassDistribution>,
    pub curves: Vec<EfficiencyCurve>,
}

impl CampaignResult {
    /// Results CSV: realization_id, family params, omega, eta, class on
    /// the last amplitude row, seed.
    pub fn results_csv(&self) -> String {
        let header = match self.rows.first().map(|r| r.cell) {
            Some(CellParams::WattsStrogatz { .. }) => {
                "realization_id,k,p,omega,eta,class,seed\n"
            }
            Some(CellParams::RandomRemoval { .. }) | None => {
                "realization_id,n_r,omega,eta,class,seed\n"
            }
            Some(CellParams::File) => "realization_id,omega,eta,class,seed\n",
        };
        let mut out = String::from(header);
        for row in &self.rows {
            let family = match row.cell {
                CellParams::RandomRemoval { n_removed } => format!("{n_removed},"),
                CellParams::WattsStrogatz { k, p } => format!("{k},{},", fmt_g17(p)),
                CellParams::File => String::new(),
            };
            let class = row.class.map(|c| c.to_string()).unwrap_or_default();
            out.push_str(&format!(
                "{},{}{},{},{},{}\n",
                row.realization,
                family,
                fmt_g17(row.omega),
                fmt_g17(row.eta),
                class,
                row.seed
            ));
        }
        out
    }
}

/// Run a full campaign: every (cell, realization) sweeps the amplitude
/// grid; Watts-Strogatz campaigns may span k and p grids, in which case
/// classified curves aggregate into a per-k class distribution.
pub fn campaign(config: &CampaignConfig) -> Result<CampaignResult> {
    config.validate()?;
    let sim = config.sim_params()?;
    let kernels = config.kernels()?;

    let cells: Vec<NetworkFamily> = match &config.family {
        NetworkFamily::WattsStrogatz { n, k, p } => {
            let ks = config.k_grid.clone().unwrap_or_else(|| vec![*k]);
            let ps = config.p_grid.clone().unwrap_or_else(|| vec![*p]);
            ks.iter()
                .flat_map(|&k| {
                    ps.iter().map(move |&p| NetworkFamily::WattsStrogatz { n: *n, k, p })
                })
                .collect()
        }
        other => vec![other.clone()],
    };

    let n_real = config.n_realizations;
    let tasks = cells.len() * n_real;
    let outcomes: Vec<Result<(Vec<CampaignRow>, EfficiencyCurve)>> =
        exec::map_indexed(tasks, |idx| {
            let cell = &cells[idx / n_real];
            let realization = idx % n_real;
            let graph = realize_graph_cell(config, cell, realization)?;
            let curve =
                sweep_omega_inner(config, &graph, realization, kernels.as_ref(), &sim)?;
            let cell_params = match cell {
                NetworkFamily::RandomRemoval { n_removed, .. } => CellParams::RandomRemoval {
                    n_removed: *n_removed,
                },
                NetworkFamily::WattsStrogatz { k, p, .. } => {
                    CellParams::WattsStrogatz { k: *k, p: *p }
                }
                NetworkFamily::GraphFile { .. } => CellParams::File,
            };
            let seed = graph_seed(config.master_seed, realization);
            let last = curve.omegas.len() - 1;
            let rows = curve
                .omegas
                .iter()
                .zip(&curve.etas)
                .enumerate()
                .map(|(i, (&omega, &eta))| CampaignRow {
                    realization,
                    cell: cell_params,
                    omega,
                    eta,
                    class: if i == last { curve.class } else { None },
                    seed,
                })
                .collect();
            Ok((rows, curve))
        });

    let mut rows = Vec::new();
    let mut curves = Vec::new();
    let mut class_items = Vec::new();
    for outcome in outcomes {
        let (mut cell_rows, curve) = outcome?;
        if let (Some(class), CellParams::WattsStrogatz { k, .. }) =
            (curve.class, cell_rows[0].cell)
        {
            class_items.push((k, class));
        }
        rows.append(&mut cell_rows);
        curves.push(curve);
    }
    let class_distribution = if class_items.is_empty() {
        None
    } else {
        Some(class_distribution(class_items))
    };

    Ok(CampaignResult {
        rows,
        class_distribution,
        curves,
    })
}

/// Axis of a bath-only parameter sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    Temperature,
    Coupling,
    NeighborRange,
}

impl SweepAxis {
    pub fn label(self) -> &'static str {
        match self {
            SweepAxis::Temperature => "k_bt",
            SweepAxis::Coupling => "x_f",
            SweepAxis::NeighborRange => "k",
        }
    }
}

/// Efficiency table of a bath-only sweep: one row per grid value, one
/// column per realization.
#[derive(Debug, Clone)]
pub struct SweepTable {
    pub axis: SweepAxis,
    pub grid: Vec<f64>,
    pub etas: Vec<Vec<f64>>,
}

impl SweepTable {
    pub fn to_csv(&self) -> String {
        let mut out = format!("{},realization_id,eta\n", self.axis.label());
        for (value, row) in self.grid.iter().zip(&self.etas) {
            for (realization, eta) in row.iter().enumerate() {
                out.push_str(&format!(
                    "{},{realization},{}\n",
                    fmt_g17(*value),
                    fmt_g17(*eta)
                ));
            }
        }
        out
    }

    pub fn max_per_value(&self) -> Vec<f64> {
        self.etas
            .iter()
            .map(|row| row.iter().cloned().fold(f64::NEG_INFINITY, f64::max))
            .collect()
    }
}

/// Sweep one bath parameter (or the Watts-Strogatz neighbor range) at
/// fixed everything else; the environment model must be bath-only.
pub fn parameter_sweep(
    config: &CampaignConfig,
    axis: SweepAxis,
    grid: &[f64],
) -> Result<SweepTable> {
    config.validate()?;
    if config.environment != EnvironmentModel::BathOnly {
        return Err(Error::invalid("parameter sweeps use the bath_only model"));
    }
    if grid.is_empty() {
        return Err(Error::invalid("sweep grid must not be empty"));
    }
    let sim = config.sim_params()?;
    let n_real = config.n_realizations;

    let mut etas = Vec::with_capacity(grid.len());
    for &value in grid {
        let (cell_config, kernels, family) = match axis {
            SweepAxis::Temperature => {
                let kernels = config.kernels_with(config.x_f, value)?;
                (config.clone(), kernels, config.family.clone())
            }
            SweepAxis::Coupling => {
                let kernels = config.kernels_with(value, config.k_bt)?;
                (config.clone(), kernels, config.family.clone())
            }
            SweepAxis::NeighborRange => {
                let k = value as usize;
                if (k as f64 - value).abs() > 1e-9 {
                    return Err(Error::invalid("neighbor-range grid must be integral"));
                }
                let family = match &config.family {
                    NetworkFamily::WattsStrogatz { n, p, .. } => NetworkFamily::WattsStrogatz {
                        n: *n,
                        k,
                        p: *p,
                    },
                    _ => {
                        return Err(Error::invalid(
                            "neighbor-range sweeps need the watts_strogatz family",
                        ))
                    }
                };
                (config.clone(), config.kernels()?, family)
            }
        };
        let results: Vec<Result<f64>> = exec::map_indexed(n_real, |realization| {
            let graph = realize_graph_cell(&cell_config, &family, realization)?;
            let summary = run_single_inner(
                &cell_config,
                &graph,
                0.0,
                realization,
                0,
                kernels.as_ref(),
                &sim,
            )?;
            Ok(summary.eta)
        });
        etas.push(results.into_iter().collect::<Result<Vec<f64>>>()?);
    }
    Ok(SweepTable {
        axis,
        grid: grid.to_vec(),
        etas,
    })
}
