//! Command implementations behind the CLI: each parses its config, runs the
//! experiment, writes CSV/JSON artifacts plus a run manifest into the output
//! directory, and returns a machine-readable outcome.
//!
//! All CSV columns use densities in km⁻² and lengths in meters; everything
//! internal stays in m⁻²/m. Output bytes are deterministic for a fixed
//! config and seed regardless of thread count: parallel work is collected in
//! realization order and reduced sequentially.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{self, DegreeKernel, PercolationConstants};
use crate::config::{
    degree_config, power_design_config, simulate_config, sweep_config, validate_geometry_config,
    ConfigError, DegreeConfig, PowerDesignConfig, SimulateConfig, SweepConfig,
    ValidateGeometryConfig,
};
use crate::geometry::{
    disks_bbox, lens_area, mc_area, pair_cover_area, triple_overlap_area, union_area, Disk, Point,
    TwoDiskConfig,
};
use crate::oppgraph::{
    build_graph, detect_crossings, evaluate_opportunities, label_components, write_flags_csv,
};
use crate::percolation::{
    sweep_region, BoundaryCurve, BoundarySample, CurveMethod, ExperimentConfig,
};
use crate::pointprocess::{Realization, Window};
use crate::Error;

const KM2: f64 = 1e6; // m⁻² → km⁻²

/// Failure modes with distinct process exit codes: config errors exit 2,
/// everything else exits 1.
#[derive(Debug)]
pub enum RunError {
    Config(ConfigError),
    Runtime(Error),
    Io(std::io::Error),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Config(e) => write!(f, "{e}"),
            RunError::Runtime(e) => write!(f, "{e}"),
            RunError::Io(e) => write!(f, "io error: {e}"),
        }
    }
}

impl std::error::Error for RunError {}

impl From<ConfigError> for RunError {
    fn from(e: ConfigError) -> Self {
        RunError::Config(e)
    }
}
impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        RunError::Runtime(e)
    }
}
impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Io(e)
    }
}

type RunResult<T> = std::result::Result<T, RunError>;

/// Reproducibility record written next to every command's outputs.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub master_seed: Option<u64>,
    pub threads: usize,
    pub config: BTreeMap<String, String>,
    pub outputs: Vec<String>,
    pub wall_clock_seconds: f64,
}

impl RunManifest {
    fn new(command: &str, master_seed: Option<u64>, config: BTreeMap<String, String>) -> Self {
        Self {
            tool: "percolab".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            master_seed,
            threads: rayon::current_num_threads(),
            config,
            outputs: Vec::new(),
            wall_clock_seconds: 0.0,
        }
    }
}

struct OutputDir {
    dir: PathBuf,
    written: Vec<String>,
}

impl OutputDir {
    fn new(dir: &Path) -> RunResult<Self> {
        fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            written: Vec::new(),
        })
    }

    fn write(&mut self, name: &str, bytes: &[u8]) -> RunResult<PathBuf> {
        let path = self.dir.join(name);
        fs::write(&path, bytes)?;
        self.written.push(name.to_string());
        Ok(path)
    }

    fn finish(mut self, mut manifest: RunManifest, started: Instant) -> RunResult<()> {
        manifest.outputs = self.written.clone();
        manifest.wall_clock_seconds = started.elapsed().as_secs_f64();
        let json = serde_json::to_vec_pretty(&manifest).expect("manifest serializes");
        self.write("manifest.json", &json)?;
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct SimulateOutcome {
    pub realizations: u64,
    pub left_right_fraction: f64,
    pub top_bottom_fraction: f64,
    pub flagged_fraction_mean: f64,
    pub largest_component_fraction_mean: f64,
    pub second_largest_component_fraction_mean: f64,
    /// Mean degree over flagged users, pooled across realizations; absent
    /// when no user ever sees an opportunity.
    pub empirical_conditional_degree: Option<f64>,
    /// Flagged users per component of the first realization, descending.
    pub first_realization_component_sizes: Vec<u32>,
}

struct SimRow {
    lr: bool,
    tb: bool,
    users: usize,
    flagged: usize,
    degree_sum: usize,
    largest: usize,
    second: usize,
}

pub fn run_simulate(
    config_text: &str,
    seed: Option<u64>,
    out_dir: &Path,
) -> RunResult<SimulateOutcome> {
    let started = Instant::now();
    let cfg: SimulateConfig = simulate_config(config_text, seed)?;
    let mut out = OutputDir::new(out_dir)?;
    let experiment = &cfg.experiment;

    let rows: Vec<SimRow> = (0..experiment.realizations)
        .into_par_iter()
        .map(|index| -> crate::Result<SimRow> {
            let r = Realization::generate(
                &experiment.params,
                &cfg.density,
                &experiment.window,
                experiment.master_seed,
                index,
            )?;
            let flags = evaluate_opportunities(&r, &experiment.params);
            let graph = build_graph(&r, &flags, &experiment.params);
            let labeling = label_components(&graph);
            let crossings = detect_crossings(&labeling, &r, &flags, experiment.margin);
            let mut per_comp = vec![0usize; labeling.component_count()];
            let mut degree_sum = 0usize;
            for (u, &f) in flags.sees_opportunity.iter().enumerate() {
                if f {
                    per_comp[labeling.component[u] as usize] += 1;
                    degree_sum += graph.degree(u);
                }
            }
            let mut largest = 0;
            let mut second = 0;
            for &c in &per_comp {
                if c > largest {
                    second = largest;
                    largest = c;
                } else if c > second {
                    second = c;
                }
            }
            Ok(SimRow {
                lr: crossings.left_right,
                tb: crossings.top_bottom,
                users: r.secondary.len(),
                flagged: flags.flagged_count(),
                degree_sum,
                largest,
                second,
            })
        })
        .collect::<crate::Result<_>>()?;

    // First realization gets full node/edge/flag exports.
    let first = Realization::generate(
        &experiment.params,
        &cfg.density,
        &experiment.window,
        experiment.master_seed,
        0,
    )?;
    let first_flags = evaluate_opportunities(&first, &experiment.params);
    let first_graph = build_graph(&first, &first_flags, &experiment.params);
    let first_labeling = label_components(&first_graph);

    let mut nodes = Vec::new();
    first.write_nodes_csv(&mut nodes)?;
    out.write("nodes.csv", &nodes)?;

    let mut edges = Vec::new();
    first_graph.write_edges_csv(&mut edges)?;
    out.write("edges.csv", &edges)?;

    let mut flags_csv = Vec::new();
    write_flags_csv(&first, &first_flags, &mut flags_csv)?;
    out.write("flags.csv", &flags_csv)?;

    let n = rows.len() as f64;
    let mut comp_sizes = vec![0u32; first_labeling.component_count()];
    for (u, &f) in first_flags.sees_opportunity.iter().enumerate() {
        if f {
            comp_sizes[first_labeling.component[u] as usize] += 1;
        }
    }
    comp_sizes.retain(|&c| c > 0);
    comp_sizes.sort_unstable_by(|a, b| b.cmp(a));

    let total_flagged: usize = rows.iter().map(|r| r.flagged).sum();
    let total_degree: usize = rows.iter().map(|r| r.degree_sum).sum();
    let frac = |num: usize, den: usize| {
        if den == 0 {
            0.0
        } else {
            num as f64 / den as f64
        }
    };
    let outcome = SimulateOutcome {
        realizations: experiment.realizations,
        left_right_fraction: rows.iter().filter(|r| r.lr).count() as f64 / n,
        top_bottom_fraction: rows.iter().filter(|r| r.tb).count() as f64 / n,
        flagged_fraction_mean: rows.iter().map(|r| frac(r.flagged, r.users)).sum::<f64>() / n,
        largest_component_fraction_mean: rows
            .iter()
            .map(|r| frac(r.largest, r.flagged))
            .sum::<f64>()
            / n,
        second_largest_component_fraction_mean: rows
            .iter()
            .map(|r| frac(r.second, r.flagged))
            .sum::<f64>()
            / n,
        empirical_conditional_degree: (total_flagged > 0)
            .then(|| total_degree as f64 / total_flagged as f64),
        first_realization_component_sizes: comp_sizes,
    };

    out.write(
        "summary.json",
        &serde_json::to_vec_pretty(&outcome).expect("summary serializes"),
    )?;
    out.finish(
        RunManifest::new("simulate", Some(experiment.master_seed), cfg.raw.clone()),
        started,
    )?;
    Ok(outcome)
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub curves: Vec<BoundaryCurve>,
}

pub fn run_sweep(config_text: &str, seed: Option<u64>, out_dir: &Path) -> RunResult<SweepOutcome> {
    let started = Instant::now();
    let cfg: SweepConfig = sweep_config(config_text, seed)?;
    let mut out = OutputDir::new(out_dir)?;
    let curves = sweep_curves(&cfg.experiment, &cfg.lambda_s_grid, &cfg.constants)?;

    let mut csv = Vec::new();
    writeln!(csv, "{}", BoundaryCurve::CSV_HEADER)?;
    for curve in &curves {
        curve.write_csv_rows(&mut csv)?;
    }
    out.write("region.csv", &csv)?;
    out.finish(
        RunManifest::new("sweep", Some(cfg.experiment.master_seed), cfg.raw.clone()),
        started,
    )?;
    Ok(SweepOutcome { curves })
}

/// Empirical boundary plus the three analytic curves on the same grid.
pub fn sweep_curves(
    experiment: &ExperimentConfig,
    lambda_s_grid: &[f64],
    constants: &PercolationConstants,
) -> RunResult<Vec<BoundaryCurve>> {
    let empirical = sweep_region(experiment, lambda_s_grid)?;
    let outer = bounds::outer_bound_curve(&experiment.params, lambda_s_grid)?;
    let inner = bounds::inner_bound_curve(&experiment.params, lambda_s_grid)?;
    let cap = bounds::primary_density_cap(&experiment.params, constants)?;
    let cap_curve = BoundaryCurve {
        method: CurveMethod::T22,
        samples: lambda_s_grid
            .iter()
            .map(|&lambda_s| BoundarySample {
                lambda_s,
                lambda_pt_star: cap,
                ci_low: cap,
                ci_high: cap,
            })
            .collect(),
    };
    Ok(vec![empirical, outer, inner, cap_curve])
}

// ---------------------------------------------------------------------------
// degree
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct DegreePoint {
    pub r_p: f64,
    pub mu_quadrature: f64,
    /// Mean of per-realization interior degree means; absent when no
    /// realization had a flagged interior user.
    pub mu_empirical: Option<f64>,
    pub stderr: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DegreeOutcome {
    pub points: Vec<DegreePoint>,
}

pub fn run_degree(
    config_text: &str,
    seed: Option<u64>,
    out_dir: &Path,
) -> RunResult<DegreeOutcome> {
    let started = Instant::now();
    let cfg: DegreeConfig = degree_config(config_text, seed)?;
    let mut out = OutputDir::new(out_dir)?;
    let outcome = degree_table(&cfg)?;

    let mut csv = Vec::new();
    writeln!(csv, "r_p_m,mu_quadrature,mu_empirical,stderr")?;
    for p in &outcome.points {
        match (p.mu_empirical, p.stderr) {
            (Some(mu), Some(se)) => writeln!(csv, "{},{},{},{}", p.r_p, p.mu_quadrature, mu, se)?,
            _ => writeln!(csv, "{},{},,", p.r_p, p.mu_quadrature)?,
        }
    }
    out.write("degree.csv", &csv)?;
    out.finish(
        RunManifest::new("degree", Some(cfg.master_seed), cfg.raw.clone()),
        started,
    )?;
    Ok(outcome)
}

/// Quadrature and simulation degree columns for a radio-range sweep.
///
/// The simulation column pools degrees over all realizations (sum of degrees
/// over sum of flagged interior users): flagged counts vary strongly between
/// realizations, and averaging per-realization means would down-weight users
/// in opportunity-rich realizations and bias the estimate low. The standard
/// error is the usual ratio-estimator linearization.
pub fn degree_table(cfg: &DegreeConfig) -> RunResult<DegreeOutcome> {
    let points: Vec<DegreePoint> = cfg
        .r_p_grid
        .par_iter()
        .map(|&r_p| -> RunResult<DegreePoint> {
            let params = cfg.params_at(r_p)?;
            let kernel = DegreeKernel::new(&params)?;
            let mu_quadrature = kernel.cond_avg_degree(&cfg.density)?;

            let window = Window::padded_for(cfg.window_width, cfg.window_height, &params)?;
            let per_realization: Vec<(f64, f64)> = (0..cfg.realizations)
                .into_par_iter()
                .map(|index| -> crate::Result<(f64, f64)> {
                    let r = Realization::generate(
                        &params,
                        &cfg.density,
                        &window,
                        cfg.master_seed,
                        index,
                    )?;
                    let flags = evaluate_opportunities(&r, &params);
                    let graph = build_graph(&r, &flags, &params);
                    Ok(interior_degree_totals(
                        &graph,
                        &flags,
                        &r,
                        params.secondary_tx_range,
                    ))
                })
                .collect::<crate::Result<Vec<_>>>()?;

            let total_count: f64 = per_realization.iter().map(|(_, n)| n).sum();
            let (mu_empirical, stderr) = if total_count == 0.0 {
                (None, None)
            } else {
                let total_degree: f64 = per_realization.iter().map(|(y, _)| y).sum();
                let ratio = total_degree / total_count;
                let m = per_realization.len() as f64;
                let resid_sq: f64 = per_realization
                    .iter()
                    .map(|(y, n)| {
                        let e = y - ratio * n;
                        e * e
                    })
                    .sum();
                let se = if per_realization.len() > 1 {
                    (resid_sq * m / (m - 1.0)).sqrt() / total_count
                } else {
                    0.0
                };
                (Some(ratio), Some(se))
            };
            Ok(DegreePoint {
                r_p,
                mu_quadrature,
                mu_empirical,
                stderr,
            })
        })
        .collect::<RunResult<_>>()?;
    Ok(DegreeOutcome { points })
}

/// (sum of degrees, flagged count) over flagged users at least `margin` from
/// every window edge.
fn interior_degree_totals(
    graph: &crate::oppgraph::SecondaryGraph,
    flags: &crate::oppgraph::OpportunityFlags,
    realization: &Realization,
    margin: f64,
) -> (f64, f64) {
    let w = realization.window.width;
    let h = realization.window.height;
    let mut sum = 0.0;
    let mut count = 0.0;
    for (u, p) in realization.secondary.iter().enumerate() {
        if !flags.sees_opportunity[u] {
            continue;
        }
        if p.x < margin || p.x > w - margin || p.y < margin || p.y > h - margin {
            continue;
        }
        sum += graph.degree(u) as f64;
        count += 1.0;
    }
    (sum, count)
}

// ---------------------------------------------------------------------------
// power-design
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct PowerDesignOutcome {
    pub argmax_r_i: f64,
    pub peak_lambda_pt: f64,
    pub table: Vec<(f64, f64)>,
}

pub fn run_power_design(config_text: &str, out_dir: &Path) -> RunResult<PowerDesignOutcome> {
    let started = Instant::now();
    let cfg: PowerDesignConfig = power_design_config(config_text)?;
    let mut out = OutputDir::new(out_dir)?;

    let mut table = Vec::with_capacity(cfg.r_i_grid.len());
    let mut best = (f64::NAN, f64::NEG_INFINITY);
    for &r_i in &cfg.r_i_grid {
        let v = bounds::power_design_bound(
            r_i,
            cfg.primary_interference_range,
            cfg.beta,
            &cfg.constants,
        )?;
        if v > best.1 {
            best = (r_i, v);
        }
        table.push((r_i, v));
    }

    let mut csv = Vec::new();
    writeln!(csv, "r_i_m,lambda_pt_cap_per_km2")?;
    for (r_i, v) in &table {
        writeln!(csv, "{},{}", r_i, v * KM2)?;
    }
    out.write("power_design.csv", &csv)?;

    let outcome = PowerDesignOutcome {
        argmax_r_i: best.0,
        peak_lambda_pt: best.1,
        table,
    };
    let report = serde_json::json!({
        "argmax_r_i_m": outcome.argmax_r_i,
        "peak_lambda_pt_per_km2": outcome.peak_lambda_pt * KM2,
        "matches_primary_interference_range":
            outcome.argmax_r_i == cfg.primary_interference_range,
        "primary_interference_range_m": cfg.primary_interference_range,
        "beta": cfg.beta,
    });
    out.write(
        "report.json",
        &serde_json::to_vec_pretty(&report).expect("report serializes"),
    )?;
    out.finish(
        RunManifest::new("power-design", None, cfg.raw.clone()),
        started,
    )?;
    Ok(outcome)
}

// ---------------------------------------------------------------------------
// validate-geometry
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct GeometryCheck {
    pub kind: String,
    pub separation: f64,
    pub radius_a: f64,
    pub radius_b: f64,
    pub probe: Option<(f64, f64, f64)>,
    pub analytic: f64,
    pub mc_estimate: f64,
    pub mc_stderr: f64,
    pub z_score: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct GeometryValidationOutcome {
    pub checks: Vec<GeometryCheck>,
    pub max_abs_z: f64,
    pub all_within_3se: bool,
}

/// Randomized analytic-vs-Monte-Carlo comparisons, including forced
/// near-tangent configurations (every fifth case).
pub fn validate_geometry_checks(cfg: &ValidateGeometryConfig) -> crate::Result<Vec<GeometryCheck>> {
    (0..cfg.cases)
        .into_par_iter()
        .map(|i| -> crate::Result<Vec<GeometryCheck>> {
            use rand::Rng;
            let mut rng = ChaCha8Rng::seed_from_u64(
                cfg.master_seed.wrapping_add(i.wrapping_mul(0x9E37_79B9)),
            );
            let r1 = 0.3 + 1.7 * rng.random::<f64>();
            let r2 = 0.3 + 1.7 * rng.random::<f64>();
            let mut t = (r1 + r2 + 0.4) * rng.random::<f64>();
            // Force near-tangency on every fifth case, alternating between
            // external and internal contact.
            if i % 5 == 4 {
                let eps = 1e-8 * (1.0 + rng.random::<f64>());
                t = if i % 2 == 0 {
                    (r1 + r2) * (1.0 - eps)
                } else {
                    ((r1 - r2).abs() + eps).min(r1 + r2)
                };
            }
            let pair = TwoDiskConfig::new(t, r1, r2)?;
            let (d1, d2) = pair.place();
            let mut checks = Vec::new();
            let push = |kind: &str,
                        probe: Option<&Disk>,
                        analytic: f64,
                        mc: crate::geometry::McArea,
                        checks: &mut Vec<GeometryCheck>| {
                checks.push(GeometryCheck {
                    kind: kind.into(),
                    separation: t,
                    radius_a: if probe.is_some() { 0.5 * (r1 + r2) } else { r1 },
                    radius_b: if probe.is_some() { 0.5 * (r1 + r2) } else { r2 },
                    probe: probe.map(|p| (p.center.x, p.center.y, p.radius)),
                    analytic,
                    mc_estimate: mc.estimate,
                    mc_stderr: mc.stderr,
                    z_score: (mc.estimate - analytic) / mc.stderr,
                });
            };

            let (lo, hi) = disks_bbox(&[d1, d2]);
            let lens = lens_area(pair)?;
            let mc = mc_area(
                |p| d1.contains(p) && d2.contains(p),
                lo,
                hi,
                cfg.samples,
                &mut rng,
            );
            push("lens", None, lens, mc, &mut checks);

            let union = union_area(pair)?;
            let mc = mc_area(
                |p| d1.contains(p) || d2.contains(p),
                lo,
                hi,
                cfg.samples,
                &mut rng,
            );
            push("union", None, union, mc, &mut checks);

            // Probe cases use equal pair radii, matching the cover geometry
            // of the degree model.
            let rr = 0.5 * (r1 + r2);
            let pair_eq = TwoDiskConfig::new(t, rr, rr)?;
            let (e1, e2) = pair_eq.place();
            let probe = Disk::new(
                Point::new(
                    (t / 2.0 + rr) * (2.0 * rng.random::<f64>() - 1.0),
                    rr * (2.0 * rng.random::<f64>() - 1.0),
                ),
                0.3 + 1.2 * rng.random::<f64>(),
            )?;
            let (lo, hi) = disks_bbox(&[probe, e1, e2]);

            let triple = triple_overlap_area(&probe, &e1, &e2)?;
            let mc = mc_area(
                |p| probe.contains(p) && e1.contains(p) && e2.contains(p),
                lo,
                hi,
                cfg.samples,
                &mut rng,
            );
            push("triple", Some(&probe), triple, mc, &mut checks);

            let cover = pair_cover_area(&probe, pair_eq)?;
            let mc = mc_area(
                |p| probe.contains(p) && (e1.contains(p) || e2.contains(p)),
                lo,
                hi,
                cfg.samples,
                &mut rng,
            );
            push("cover", Some(&probe), cover, mc, &mut checks);

            Ok(checks)
        })
        .collect::<crate::Result<Vec<Vec<_>>>>()
        .map(|vv| vv.into_iter().flatten().collect())
}

pub fn run_validate_geometry(
    config_text: &str,
    seed: Option<u64>,
    out_dir: &Path,
) -> RunResult<GeometryValidationOutcome> {
    let started = Instant::now();
    let cfg = validate_geometry_config(config_text, seed)?;
    let mut out = OutputDir::new(out_dir)?;
    let checks = validate_geometry_checks(&cfg)?;

    let mut csv = Vec::new();
    writeln!(
        csv,
        "kind,separation_m,radius_a_m,radius_b_m,probe_x_m,probe_y_m,probe_radius_m,\
         analytic_m2,mc_estimate_m2,mc_stderr_m2,z_score"
    )?;
    for c in &checks {
        let (px, py, pr) = match c.probe {
            Some((x, y, r)) => (x.to_string(), y.to_string(), r.to_string()),
            None => (String::new(), String::new(), String::new()),
        };
        writeln!(
            csv,
            "{},{},{},{},{},{},{},{},{},{},{}",
            c.kind,
            c.separation,
            c.radius_a,
            c.radius_b,
            px,
            py,
            pr,
            c.analytic,
            c.mc_estimate,
            c.mc_stderr,
            c.z_score
        )?;
    }
    out.write("geometry_validation.csv", &csv)?;

    let max_abs_z = checks.iter().map(|c| c.z_score.abs()).fold(0.0, f64::max);
    let outcome = GeometryValidationOutcome {
        max_abs_z,
        all_within_3se: max_abs_z <= 3.0,
        checks,
    };
    out.write(
        "validation_summary.json",
        &serde_json::to_vec_pretty(&serde_json::json!({
            "cases": cfg.cases,
            "samples_per_case": cfg.samples,
            "comparisons": outcome.checks.len(),
            "max_abs_z": outcome.max_abs_z,
            "all_within_3se": outcome.all_within_3se,
        }))
        .expect("summary serializes"),
    )?;
    out.finish(
        RunManifest::new("validate-geometry", Some(cfg.master_seed), cfg.raw.clone()),
        started,
    )?;
    if !outcome.all_within_3se {
        return Err(RunError::Runtime(Error::InvalidInput(format!(
            "geometry validation failed: max |z| = {:.3} exceeds 3",
            outcome.max_abs_z
        ))));
    }
    Ok(outcome)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degree_table_zero_primary_density_matches_mean_neighbors() {
        let text = "\
primary_tx_range_m = 50
primary_interference_range_m = 60
lambda_s_per_km2 = 200
lambda_pt_per_km2 = 0
r_p_grid_m = 60
window_width_m = 800
window_height_m = 800
realizations = 60
master_seed = 5
";
        let cfg = degree_config(text, None).unwrap();
        let outcome = degree_table(&cfg).unwrap();
        let p = &outcome.points[0];
        let expected = 200e-6 * std::f64::consts::PI * 60.0 * 60.0;
        assert!(
            (p.mu_quadrature - expected).abs() < 1e-8 * expected,
            "quadrature {} vs {}",
            p.mu_quadrature,
            expected
        );
        let mu = p.mu_empirical.unwrap();
        let se = p.stderr.unwrap();
        assert!(
            (mu - expected).abs() < 4.0 * se + 0.05 * expected,
            "empirical {mu} ± {se} vs {expected}"
        );
    }

    #[test]
    fn geometry_validation_covers_all_kinds() {
        let cfg =
            validate_geometry_config("cases = 6\nmc_samples = 300000\nmaster_seed = 11\n", None)
                .unwrap();
        let checks = validate_geometry_checks(&cfg).unwrap();
        assert_eq!(checks.len(), 24);
        for c in &checks {
            assert!(
                c.z_score.abs() < 4.5,
                "{} case at t = {} off by z = {}",
                c.kind,
                c.separation,
                c.z_score
            );
        }
    }
}
