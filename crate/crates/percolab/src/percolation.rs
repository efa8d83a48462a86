//! Monte-Carlo crossing experiments and connectivity-region boundary sweeps.
//!
//! The finite-window surrogate for percolation is the existence of a
//! component linking opposite window edges. Crossing probabilities are
//! estimated over independent realizations; the boundary density for a given
//! secondary density is located by bisection on the primary density against a
//! threshold (default 50%, the criterion used for the simulated regions).
//!
//! Determinism: realizations are keyed by (master seed, index), all
//! floating-point aggregation runs sequentially over index-ordered results,
//! and every estimate inside one experiment reuses the same realization
//! indices. The last point also gives realization-level coupling: raising
//! the primary density can only remove points' opportunities, so crossing
//! estimates are monotone in each density coordinate on shared seeds.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::io::Write;

use crate::oppgraph::{build_graph, detect_crossings, evaluate_opportunities, label_components};
use crate::pointprocess::{DensityPair, RadioParams, Realization, Window};
use crate::{Error, Result};

/// Which window crossings count as "connected".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CrossingRule {
    #[default]
    LeftRight,
    TopBottom,
    Either,
    Both,
}

/// Everything a crossing experiment needs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub params: RadioParams,
    pub window: Window,
    pub realizations: u64,
    pub master_seed: u64,
    /// Crossing-fraction threshold defining the empirical boundary.
    pub crossing_threshold: f64,
    /// Band width for edge contact in crossing detection.
    pub margin: f64,
    pub rule: CrossingRule,
    /// Bisection depth for boundary location.
    pub bisection_steps: u32,
}

impl ExperimentConfig {
    /// Config with the documented defaults: threshold 0.5, margin equal to
    /// the link range, left-right rule, 12 bisection steps.
    pub fn new(
        params: RadioParams,
        window: Window,
        realizations: u64,
        master_seed: u64,
    ) -> Result<Self> {
        let cfg = Self {
            params,
            window,
            realizations,
            master_seed,
            crossing_threshold: 0.5,
            margin: params.secondary_tx_range,
            rule: CrossingRule::LeftRight,
            bisection_steps: 12,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.realizations < 1 {
            return Err(Error::InvalidInput("realizations must be >= 1".into()));
        }
        if !(self.crossing_threshold > 0.0 && self.crossing_threshold < 1.0) {
            return Err(Error::InvalidInput(format!(
                "crossing threshold must lie in (0, 1), got {}",
                self.crossing_threshold
            )));
        }
        if !(self.margin >= 0.0) {
            return Err(Error::InvalidInput("margin must be non-negative".into()));
        }
        if self.bisection_steps == 0 {
            return Err(Error::InvalidInput("bisection_steps must be >= 1".into()));
        }
        let required = self.params.required_padding();
        if self.window.padding < required - 1e-9 {
            return Err(Error::InvalidInput(format!(
                "window padding {} below required {}",
                self.window.padding, required
            )));
        }
        Ok(())
    }
}

/// Per-realization outcome shared by the estimators.
#[derive(Debug, Clone, Copy)]
struct RealizationSummary {
    crossed_lr: bool,
    crossed_tb: bool,
    flagged: usize,
    largest: usize,
    second_largest: usize,
}

fn summarize_one(
    config: &ExperimentConfig,
    density: &DensityPair,
    index: u64,
) -> Result<RealizationSummary> {
    let realization = Realization::generate(
        &config.params,
        density,
        &config.window,
        config.master_seed,
        index,
    )?;
    let flags = evaluate_opportunities(&realization, &config.params);
    let graph = build_graph(&realization, &flags, &config.params);
    let labeling = label_components(&graph);
    let crossings = detect_crossings(&labeling, &realization, &flags, config.margin);

    let mut flagged_per_component = vec![0usize; labeling.component_count()];
    for (u, &f) in flags.sees_opportunity.iter().enumerate() {
        if f {
            flagged_per_component[labeling.component[u] as usize] += 1;
        }
    }
    let mut largest = 0usize;
    let mut second = 0usize;
    for &c in &flagged_per_component {
        if c > largest {
            second = largest;
            largest = c;
        } else if c > second {
            second = c;
        }
    }
    Ok(RealizationSummary {
        crossed_lr: crossings.left_right,
        crossed_tb: crossings.top_bottom,
        flagged: flags.flagged_count(),
        largest,
        second_largest: second,
    })
}

fn summarize_all(
    config: &ExperimentConfig,
    density: &DensityPair,
) -> Result<Vec<RealizationSummary>> {
    (0..config.realizations)
        .into_par_iter()
        .map(|i| summarize_one(config, density, i))
        .collect()
}

/// A crossing-probability estimate with its binomial uncertainty.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossingEstimate {
    pub estimate: f64,
    pub stderr: f64,
    /// 95% Wilson interval for the crossing probability.
    pub wilson_low: f64,
    pub wilson_high: f64,
    pub successes: u64,
    pub realizations: u64,
}

/// Wilson score interval for a binomial proportion.
pub fn wilson_interval(successes: u64, n: u64, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let nf = n as f64;
    let p = successes as f64 / nf;
    let z2 = z * z;
    let denom = 1.0 + z2 / nf;
    let center = (p + z2 / (2.0 * nf)) / denom;
    let half = z * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

fn crossed(summary: &RealizationSummary, rule: CrossingRule) -> bool {
    match rule {
        CrossingRule::LeftRight => summary.crossed_lr,
        CrossingRule::TopBottom => summary.crossed_tb,
        CrossingRule::Either => summary.crossed_lr || summary.crossed_tb,
        CrossingRule::Both => summary.crossed_lr && summary.crossed_tb,
    }
}

/// Fraction of realizations with a window crossing under the config's rule.
pub fn crossing_probability(
    config: &ExperimentConfig,
    density: &DensityPair,
) -> Result<CrossingEstimate> {
    config.validate()?;
    let summaries = summarize_all(config, density)?;
    let successes = summaries.iter().filter(|s| crossed(s, config.rule)).count() as u64;
    let n = config.realizations;
    let p = successes as f64 / n as f64;
    let (lo, hi) = wilson_interval(successes, n, 1.96);
    Ok(CrossingEstimate {
        estimate: p,
        stderr: (p * (1.0 - p) / n as f64).sqrt(),
        wilson_low: lo,
        wilson_high: hi,
        successes,
        realizations: n,
    })
}

/// One point of a boundary curve, densities in m⁻².
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundarySample {
    pub lambda_s: f64,
    pub lambda_pt_star: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

/// How a curve was produced; the string forms are the CSV method tags.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CurveMethod {
    Empirical,
    OuterBound,
    InnerBound,
    T22,
}

impl CurveMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            CurveMethod::Empirical => "empirical",
            CurveMethod::OuterBound => "outer-bound",
            CurveMethod::InnerBound => "inner-bound",
            CurveMethod::T22 => "t22",
        }
    }
}

/// Sampled boundary (or bound) curve over increasing secondary densities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryCurve {
    pub method: CurveMethod,
    pub samples: Vec<BoundarySample>,
}

impl BoundaryCurve {
    pub fn validate(&self) -> Result<()> {
        for w in self.samples.windows(2) {
            if w[1].lambda_s <= w[0].lambda_s {
                return Err(Error::InvalidInput(
                    "boundary curve secondary densities must be strictly increasing".into(),
                ));
            }
        }
        for s in &self.samples {
            if !(s.ci_low <= s.lambda_pt_star && s.lambda_pt_star <= s.ci_high) {
                return Err(Error::InvalidInput(format!(
                    "confidence bracket [{}, {}] does not contain {}",
                    s.ci_low, s.ci_high, s.lambda_pt_star
                )));
            }
        }
        Ok(())
    }

    /// Rows in the shared schema
    /// `lambda_S_per_km2,lambda_PT_star_per_km2,ci_low,ci_high,method`
    /// (densities converted to km⁻² at this boundary).
    pub fn write_csv_rows<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        const M2_PER_KM2: f64 = 1e6;
        for s in &self.samples {
            writeln!(
                out,
                "{},{},{},{},{}",
                s.lambda_s * M2_PER_KM2,
                s.lambda_pt_star * M2_PER_KM2,
                s.ci_low * M2_PER_KM2,
                s.ci_high * M2_PER_KM2,
                self.method.as_str()
            )?;
        }
        Ok(())
    }

    pub const CSV_HEADER: &'static str =
        "lambda_S_per_km2,lambda_PT_star_per_km2,ci_low,ci_high,method";
}

/// Estimate the boundary primary density at a fixed secondary density by
/// bisection; the confidence bracket re-runs the bisection with the crossing
/// estimate shifted by ±1 standard error.
pub fn boundary_at(config: &ExperimentConfig, lambda_s: f64) -> Result<BoundarySample> {
    config.validate()?;
    let mut cache: HashMap<u64, CrossingEstimate> = HashMap::new();

    let estimate =
        |lambda_pt: f64, cache: &mut HashMap<u64, CrossingEstimate>| -> Result<CrossingEstimate> {
            if let Some(e) = cache.get(&lambda_pt.to_bits()) {
                return Ok(*e);
            }
            let density = DensityPair::new(lambda_s, lambda_pt)?;
            let e = crossing_probability(config, &density)?;
            cache.insert(lambda_pt.to_bits(), e);
            Ok(e)
        };

    let at_zero = estimate(0.0, &mut cache)?;
    if at_zero.estimate < config.crossing_threshold {
        return Err(Error::BelowTakeoff {
            lambda_s,
            crossing_at_zero: at_zero.estimate,
            threshold: config.crossing_threshold,
        });
    }

    // Expand the bracket until the crossing fraction drops below threshold.
    // Start at the scale where one exclusion region covers ~1/π of the plane.
    let p = &config.params;
    let scale = 1.0
        / (std::f64::consts::PI
            * (p.secondary_interference_range.powi(2) + p.primary_interference_range.powi(2)));
    let mut hi = scale;
    let mut expansions = 0;
    while estimate(hi, &mut cache)?.estimate >= config.crossing_threshold {
        hi *= 2.0;
        expansions += 1;
        if expansions > 60 {
            return Err(Error::InvalidInput(format!(
                "no upper bracket found for the boundary at lambda_s = {lambda_s:.6e}"
            )));
        }
    }

    // shift = -1: estimate must clear the threshold by one stderr (lower
    // end); shift = +1: it may undershoot by one stderr (upper end).
    let locate =
        |shift: f64, hi0: f64, cache: &mut HashMap<u64, CrossingEstimate>| -> Result<f64> {
            let at_zero = estimate(0.0, cache)?;
            if at_zero.estimate + shift * at_zero.stderr < config.crossing_threshold {
                return Ok(0.0);
            }
            let mut lo = 0.0;
            let mut hi = hi0;
            let mut expansions = 0;
            loop {
                let e = estimate(hi, cache)?;
                if e.estimate + shift * e.stderr < config.crossing_threshold {
                    break;
                }
                hi *= 2.0;
                expansions += 1;
                if expansions > 60 {
                    return Err(Error::InvalidInput(format!(
                    "no upper bracket found for the shifted boundary at lambda_s = {lambda_s:.6e}"
                )));
                }
            }
            for _ in 0..config.bisection_steps {
                let mid = 0.5 * (lo + hi);
                let e = estimate(mid, cache)?;
                if e.estimate + shift * e.stderr >= config.crossing_threshold {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            Ok(0.5 * (lo + hi))
        };

    let center = locate(0.0, hi, &mut cache)?;
    let ci_low = locate(-1.0, hi, &mut cache)?;
    let ci_high = locate(1.0, hi, &mut cache)?;

    Ok(BoundarySample {
        lambda_s,
        lambda_pt_star: center,
        ci_low: ci_low.min(center),
        ci_high: ci_high.max(center),
    })
}

/// Boundary samples over a strictly increasing secondary-density grid.
/// Grid points below takeoff are skipped (absent samples).
pub fn sweep_region(config: &ExperimentConfig, lambda_s_grid: &[f64]) -> Result<BoundaryCurve> {
    for w in lambda_s_grid.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::InvalidInput(
                "secondary density grid must be strictly increasing".into(),
            ));
        }
    }
    let mut samples = Vec::new();
    for &lambda_s in lambda_s_grid {
        match boundary_at(config, lambda_s) {
            Ok(sample) => samples.push(sample),
            Err(Error::BelowTakeoff { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    let curve = BoundaryCurve {
        method: CurveMethod::Empirical,
        samples,
    };
    curve.validate()?;
    Ok(curve)
}

/// Mean fractions of flagged users in the largest and second-largest
/// components, averaged over realizations. Realizations with no flagged user
/// contribute (0, 0).
pub fn giant_component_stats(
    config: &ExperimentConfig,
    density: &DensityPair,
) -> Result<(f64, f64)> {
    config.validate()?;
    let summaries = summarize_all(config, density)?;
    let n = summaries.len() as f64;
    let mut largest = 0.0;
    let mut second = 0.0;
    for s in &summaries {
        if s.flagged > 0 {
            largest += s.largest as f64 / s.flagged as f64;
            second += s.second_largest as f64 / s.flagged as f64;
        }
    }
    Ok((largest / n, second / n))
}
