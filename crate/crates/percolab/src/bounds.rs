//! Analytical quantities for the connectivity region.
//!
//! The central object is the conditional average degree of a secondary user
//! that sees a spectrum opportunity,
//!
//! ```text
//! μ(λ_S, λ_PT) = λ_S π r_p² · g(λ_PT)
//! g(λ_PT)      = ∫₀^{r_p} (2t/r_p²) · exp(−λ_PT · B(t)) dt
//! ```
//!
//! where `B(t)` is the area of the region in which a primary pair placed
//! there would destroy the bidirectional opportunity between two users `t`
//! apart, minus the single-user exclusion area already conditioned on:
//!
//! ```text
//! B(t) = π(r_I² + R_I² + I) − lens(t, r_I, r_I) − lens(t, R_I, R_I) − J(t)
//! J(t) = ∬_{union of the two R_I disks} cover(p) / (π R_p²) dA(p)
//! ```
//!
//! with `cover(p)` the area of the `R_p` disk at `p` intersected with the
//! union of the two `r_I` disks, and `I` the radial overlap integral. `J` is
//! evaluated by nested adaptive quadrature in polar coordinates: the union is
//! covered by the two (mirror-symmetric) disk patches minus their lens, and
//! every radial line is pre-split at the analytically known radii where the
//! probe-disk overlap changes configuration, so the quadrature only ever sees
//! smooth segments.
//!
//! `B(t)` does not depend on either density, so a [`DegreeKernel`] tabulates
//! it once per parameter set (piecewise Chebyshev interpolation, refined
//! until the requested accuracy is met) and then evaluates `g`, `μ`, and
//! `g⁻¹` essentially for free. Everything downstream — the necessary-degree
//! outer bound, the sufficient-condition inner bound, the primary-density
//! cap, critical-density scaling, and the transmit-power design rule — is
//! closed-form on top of that.

use std::cell::RefCell;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::geometry::{lens_area_raw, overlap_integral, Disk, Point, TwoDiskConfig};
use crate::percolation::{BoundaryCurve, BoundarySample, CurveMethod};
use crate::pointprocess::{DensityPair, RadioParams};
use crate::quad::{integrate, QuadOptions};
use crate::{Error, Result};

/// Critical-density constant for unit transmission range, with an optional
/// rigorous bracket.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PercolationConstants {
    /// λ_c(1): critical density of a homogeneous network with unit range.
    pub lambda_c_unit: f64,
    /// Rigorous (low, high) bracket for λ_c(1), when supplied.
    pub rigorous_bracket: Option<(f64, f64)>,
}

impl Default for PercolationConstants {
    fn default() -> Self {
        // Simulation constant 1.44 = 4 × 0.36; rigorous bracket 4 × (0.192, 0.843).
        Self {
            lambda_c_unit: 1.44,
            rigorous_bracket: Some((0.768, 3.372)),
        }
    }
}

impl PercolationConstants {
    pub fn new(lambda_c_unit: f64, rigorous_bracket: Option<(f64, f64)>) -> Result<Self> {
        if !(lambda_c_unit > 0.0) {
            return Err(Error::InvalidInput("lambda_c_unit must be positive".into()));
        }
        if let Some((lo, hi)) = rigorous_bracket {
            if !(lo < lambda_c_unit && lambda_c_unit < hi) {
                return Err(Error::InvalidInput(format!(
                    "bracket ({lo}, {hi}) must contain lambda_c_unit = {lambda_c_unit}"
                )));
            }
        }
        Ok(Self {
            lambda_c_unit,
            rigorous_bracket,
        })
    }
}

/// Parameters plus densities for degree computations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DegreeModelInputs {
    pub params: RadioParams,
    pub density: DensityPair,
}

/// Probability that a single secondary user sees a spectrum opportunity:
/// `exp[−λ_PT π (r_I² + R_I² − I(R_I, R_p, r_I))]`.
pub fn opportunity_probability(params: &RadioParams, lambda_primary_tx: f64) -> Result<f64> {
    if !(lambda_primary_tx >= 0.0) {
        return Err(Error::InvalidInput(
            "primary density must be non-negative".into(),
        ));
    }
    let overlap = overlap_integral(
        params.primary_interference_range,
        params.primary_tx_range,
        params.secondary_interference_range,
    )?;
    let area = PI
        * (params.secondary_interference_range.powi(2) + params.primary_interference_range.powi(2)
            - overlap);
    Ok((-lambda_primary_tx * area).exp())
}

// ---------------------------------------------------------------------------
// The pair-cover integral J(t) and the exclusion area B(t).
// ---------------------------------------------------------------------------

thread_local! {
    static NESTED_ERROR: RefCell<Option<Error>> = const { RefCell::new(None) };
}

fn guard(r: Result<f64>) -> f64 {
    match r {
        Ok(v) => v,
        Err(e) => {
            NESTED_ERROR.with(|slot| {
                let mut slot = slot.borrow_mut();
                if slot.is_none() {
                    *slot = Some(e);
                }
            });
            0.0
        }
    }
}

fn take_nested_error() -> Option<Error> {
    NESTED_ERROR.with(|slot| slot.borrow_mut().take())
}

/// Radii along a ray from `origin` in direction `angle` at which the distance
/// to `center` equals `threshold`; used to pre-split radial integrals at the
/// probe-overlap configuration changes.
fn ray_circle_radii(origin: Point, angle: f64, center: Point, threshold: f64, hits: &mut Vec<f64>) {
    let ex = angle.cos();
    let ey = angle.sin();
    let qx = center.x - origin.x;
    let qy = center.y - origin.y;
    let proj = ex * qx + ey * qy;
    let disc = proj * proj - (qx * qx + qy * qy - threshold * threshold);
    if disc <= 0.0 {
        return;
    }
    let root = disc.sqrt();
    hits.push(proj - root);
    hits.push(proj + root);
}

struct PairCoverField {
    d1: Disk,
    d2: Disk,
    probe_radius: f64,
    norm: f64,
    /// (center, radius) pairs where `cover` changes configuration.
    break_circles: [(Point, f64); 4],
}

impl PairCoverField {
    fn new(separation: f64, secondary_interference_range: f64, probe_radius: f64) -> Self {
        let (d1, d2) = TwoDiskConfig {
            separation,
            radius_a: secondary_interference_range,
            radius_b: secondary_interference_range,
        }
        .place();
        let inner = (secondary_interference_range - probe_radius).abs();
        let outer = secondary_interference_range + probe_radius;
        Self {
            d1,
            d2,
            probe_radius,
            norm: PI * probe_radius * probe_radius,
            break_circles: [
                (d1.center, inner),
                (d1.center, outer),
                (d2.center, inner),
                (d2.center, outer),
            ],
        }
    }

    /// Normalized covered fraction at probe center `p`, in [0, 1].
    fn cover(&self, p: Point) -> Result<f64> {
        let probe = Disk {
            center: p,
            radius: self.probe_radius,
        };
        let lens1 = lens_area_raw(p.dist(self.d1.center), self.probe_radius, self.d1.radius);
        let lens2 = lens_area_raw(p.dist(self.d2.center), self.probe_radius, self.d2.radius);
        if lens1 == 0.0 && lens2 == 0.0 {
            return Ok(0.0);
        }
        let triple = crate::geometry::triple_overlap_area(&probe, &self.d1, &self.d2)?;
        Ok(((lens1 + lens2 - triple) / self.norm).clamp(0.0, 1.0))
    }

    /// ∫₀^{s_hi} cover(origin + s·e(angle)) · s ds, split at configuration
    /// changes so each piece is smooth.
    fn radial_integral(
        &self,
        origin: Point,
        angle: f64,
        s_hi: f64,
        opts: QuadOptions,
    ) -> Result<f64> {
        let mut cuts = vec![0.0, s_hi];
        let mut hits = Vec::with_capacity(8);
        for (c, r) in &self.break_circles {
            ray_circle_radii(origin, angle, *c, *r, &mut hits);
        }
        for h in hits {
            if h > 0.0 && h < s_hi {
                cuts.push(h);
            }
        }
        cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let ex = angle.cos();
        let ey = angle.sin();
        let mut total = 0.0;
        for pair in cuts.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            if b - a <= 1e-14 * s_hi.max(1.0) {
                continue;
            }
            let r = integrate(
                |s| {
                    let p = Point::new(origin.x + s * ex, origin.y + s * ey);
                    guard(self.cover(p)) * s
                },
                a,
                b,
                opts,
            )?;
            total += r.value;
        }
        Ok(total)
    }
}

/// `J(t)`: integral of the normalized pair-cover fraction over the union of
/// the two primary-interference disks of radius `R_I` centered (±t/2, 0).
pub fn pair_cover_integral(params: &RadioParams, separation: f64) -> Result<f64> {
    pair_cover_integral_with(params, separation, 1e-7)
}

fn pair_cover_integral_with(params: &RadioParams, separation: f64, rel_tol: f64) -> Result<f64> {
    if !(separation >= 0.0) {
        return Err(Error::InvalidInput(
            "separation must be non-negative".into(),
        ));
    }
    let big_r = params.primary_interference_range;
    let field = PairCoverField::new(
        separation,
        params.secondary_interference_range,
        params.primary_tx_range,
    );
    let scale = PI * big_r * big_r * 2.0;
    let abs_j = rel_tol * scale;

    let inner_opts = QuadOptions {
        abs_tol: abs_j / (8.0 * PI),
        rel_tol: rel_tol / 4.0,
        max_intervals: 2048,
    };
    let outer_opts = QuadOptions {
        abs_tol: abs_j / 4.0,
        rel_tol: rel_tol / 2.0,
        max_intervals: 2048,
    };

    // Clear any stale slot left by an aborted call on this worker thread.
    let _ = take_nested_error();

    // Disk patch about the first center, doubled by mirror symmetry in y.
    let c1 = field.d1.center;
    let patch = integrate(
        |phi| guard(field.radial_integral(c1, phi, big_r, inner_opts)),
        0.0,
        PI,
        outer_opts,
    );
    if let Some(e) = take_nested_error() {
        return Err(e);
    }
    let patch = 2.0 * patch?.value;

    // Lens of the two patches (counted twice above), star-shaped about the
    // midpoint; present only while the disks overlap.
    let mut lens = 0.0;
    if separation < 2.0 * big_r {
        let origin = Point::new(0.0, 0.0);
        let half = 0.5 * separation;
        let quadrant = integrate(
            |theta| {
                let rho = -half * theta.cos()
                    + (big_r * big_r - half * half * theta.sin().powi(2))
                        .max(0.0)
                        .sqrt();
                guard(field.radial_integral(origin, theta, rho, inner_opts))
            },
            0.0,
            PI / 2.0,
            outer_opts,
        );
        if let Some(e) = take_nested_error() {
            return Err(e);
        }
        lens = 4.0 * quadrant?.value;
    }

    Ok(2.0 * patch - lens)
}

/// `B(t)`: the bidirectional-exclusion area entering the degree integrand,
/// computed directly (no interpolation). Zero at `t = 0`.
pub fn pair_exclusion_area(params: &RadioParams, separation: f64) -> Result<f64> {
    pair_exclusion_area_with(params, separation, 1e-7)
}

fn pair_exclusion_area_with(params: &RadioParams, separation: f64, rel_tol: f64) -> Result<f64> {
    let overlap = overlap_integral(
        params.primary_interference_range,
        params.primary_tx_range,
        params.secondary_interference_range,
    )?;
    exclusion_from_parts(
        params,
        separation,
        overlap,
        pair_cover_integral_with(params, separation, rel_tol)?,
    )
}

fn exclusion_from_parts(
    params: &RadioParams,
    separation: f64,
    overlap: f64,
    cover_integral: f64,
) -> Result<f64> {
    let ri = params.secondary_interference_range;
    let big_ri = params.primary_interference_range;
    let base = PI * (ri * ri + big_ri * big_ri + overlap);
    Ok(base
        - lens_area_raw(separation, ri, ri)
        - lens_area_raw(separation, big_ri, big_ri)
        - cover_integral)
}

// ---------------------------------------------------------------------------
// Piecewise-Chebyshev tabulation of B(t) and the degree kernel.
// ---------------------------------------------------------------------------

/// Accuracy controls for [`DegreeKernel`] construction.
#[derive(Debug, Clone, Copy)]
pub struct KernelOptions {
    /// Target accuracy of the tabulated exclusion area, relative to its
    /// natural scale π(r_I² + R_I² + I).
    pub rel_tol: f64,
    /// Chebyshev–Lobatto points per panel (degree + 1).
    pub nodes_per_panel: usize,
    /// Maximum panel bisection depth.
    pub max_depth: u32,
}

impl Default for KernelOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-7,
            nodes_per_panel: 13,
            max_depth: 10,
        }
    }
}

struct ChebPanel {
    a: f64,
    b: f64,
    /// Lobatto nodes and values, ordered from `a` to `b`.
    nodes: Vec<f64>,
    values: Vec<f64>,
}

impl ChebPanel {
    fn nodes(a: f64, b: f64, n: usize) -> Vec<f64> {
        // x_j = midpoint + half·cos(jπ/n), reversed to ascend from a to b.
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        (0..=n)
            .map(|j| mid - half * (j as f64 * PI / n as f64).cos())
            .collect()
    }

    /// Barycentric interpolation at the Lobatto nodes.
    fn eval(&self, t: f64) -> f64 {
        let n = self.values.len() - 1;
        let mut num = 0.0;
        let mut den = 0.0;
        for (j, (&x, &v)) in self.nodes.iter().zip(&self.values).enumerate() {
            let dt = t - x;
            if dt.abs() < 1e-300 {
                return v;
            }
            let mut w = if j % 2 == 0 { 1.0 } else { -1.0 };
            if j == 0 || j == n {
                w *= 0.5;
            }
            num += w / dt * v;
            den += w / dt;
        }
        num / den
    }
}

/// Precomputed degree model for one parameter set: evaluates the link
/// opportunity probability `g`, its inverse, and the conditional average
/// degree at any densities. Construction is the expensive step; hold on to
/// the kernel when sweeping densities.
pub struct DegreeKernel {
    params: RadioParams,
    /// I(R_I, R_p, r_I), reused by the exclusion-area expression.
    overlap: f64,
    panels: Vec<ChebPanel>,
}

impl DegreeKernel {
    pub fn new(params: &RadioParams) -> Result<Self> {
        Self::with_options(params, KernelOptions::default())
    }

    pub fn with_options(params: &RadioParams, opts: KernelOptions) -> Result<Self> {
        RadioParams::new(
            params.primary_tx_range,
            params.primary_interference_range,
            params.secondary_tx_range,
            params.secondary_interference_range,
        )?;
        if !(opts.rel_tol > 0.0) || opts.nodes_per_panel < 4 {
            return Err(Error::InvalidInput("invalid kernel options".into()));
        }
        let overlap = overlap_integral(
            params.primary_interference_range,
            params.primary_tx_range,
            params.secondary_interference_range,
        )?;
        let ri = params.secondary_interference_range;
        let big_ri = params.primary_interference_range;
        let scale = PI * (ri * ri + big_ri * big_ri + overlap);
        let tol_abs = opts.rel_tol * scale;

        let rp = params.secondary_tx_range;
        // The lens terms vanish at t = 2R_I and t = 2r_I; keep those kinks at
        // panel edges.
        let mut edges = vec![0.0, rp];
        for kink in [2.0 * big_ri, 2.0 * ri] {
            if kink > 0.0 && kink < rp {
                edges.push(kink);
            }
        }
        edges.sort_by(|a, b| a.partial_cmp(b).unwrap());
        edges.dedup();

        let mut direct = |t: f64| -> Result<f64> {
            exclusion_from_parts(
                params,
                t,
                overlap,
                pair_cover_integral_with(params, t, opts.rel_tol * 0.25)?,
            )
        };

        let mut panels = Vec::new();
        for pair in edges.windows(2) {
            build_panels(
                &mut direct,
                pair[0],
                pair[1],
                opts.nodes_per_panel - 1,
                tol_abs,
                opts.max_depth,
                &mut panels,
            )?;
        }
        panels.sort_by(|p, q| p.a.partial_cmp(&q.a).unwrap());
        Ok(Self {
            params: *params,
            overlap,
            panels,
        })
    }

    pub fn params(&self) -> &RadioParams {
        &self.params
    }

    /// The radial overlap integral I(R_I, R_p, r_I) for these parameters.
    pub fn overlap_integral_value(&self) -> f64 {
        self.overlap
    }

    /// Interpolated exclusion area B(t) for `t` in `[0, r_p]`.
    pub fn exclusion_area(&self, t: f64) -> f64 {
        let t = t.clamp(0.0, self.params.secondary_tx_range);
        let panel = self
            .panels
            .iter()
            .find(|p| t <= p.b)
            .unwrap_or_else(|| self.panels.last().expect("kernel has panels"));
        panel.eval(t)
    }

    /// Conditional probability of a bidirectional opportunity to a uniformly
    /// placed neighbor, given the first user sees one. Decreasing in the
    /// primary density; equals 1 at zero density.
    pub fn link_opportunity_probability(&self, lambda_primary_tx: f64) -> Result<f64> {
        if !(lambda_primary_tx >= 0.0) || !lambda_primary_tx.is_finite() {
            return Err(Error::InvalidInput(
                "primary density must be non-negative".into(),
            ));
        }
        let rp = self.params.secondary_tx_range;
        let opts = QuadOptions {
            abs_tol: 1e-13,
            rel_tol: 1e-10,
            max_intervals: 4096,
        };
        let r = integrate(
            |t| 2.0 * t / (rp * rp) * (-lambda_primary_tx * self.exclusion_area(t)).exp(),
            0.0,
            rp,
            opts,
        )?;
        Ok(r.value.clamp(0.0, 1.0))
    }

    /// Inverse of the link opportunity probability with respect to the
    /// primary density; round-trips within 1e-9.
    pub fn link_opportunity_inverse(&self, target: f64) -> Result<f64> {
        if !(target > 0.0 && target <= 1.0) {
            return Err(Error::InvalidInput(format!(
                "target probability must lie in (0, 1], got {target}"
            )));
        }
        if target == 1.0 {
            return Ok(0.0);
        }
        let ri = self.params.secondary_interference_range;
        let big_ri = self.params.primary_interference_range;
        let mut hi = 1.0 / (PI * (ri * ri + big_ri * big_ri));
        let mut expansions = 0;
        while self.link_opportunity_probability(hi)? > target {
            hi *= 2.0;
            expansions += 1;
            if expansions > 200 {
                return Err(Error::InvalidInput(format!(
                    "no primary density reaches link probability {target}"
                )));
            }
        }
        let mut lo = 0.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            let g = self.link_opportunity_probability(mid)?;
            if (g - target).abs() <= 1e-10 {
                return Ok(mid);
            }
            if g > target {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= f64::EPSILON * hi {
                break;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// Conditional average degree μ = λ_S π r_p² · g(λ_PT).
    pub fn cond_avg_degree(&self, density: &DensityPair) -> Result<f64> {
        let rp = self.params.secondary_tx_range;
        Ok(density.secondary
            * PI
            * rp
            * rp
            * self.link_opportunity_probability(density.primary_tx)?)
    }
}

fn build_panels(
    direct: &mut impl FnMut(f64) -> Result<f64>,
    a: f64,
    b: f64,
    degree: usize,
    tol_abs: f64,
    depth_left: u32,
    out: &mut Vec<ChebPanel>,
) -> Result<()> {
    let xs = ChebPanel::nodes(a, b, degree);
    let mut values = Vec::with_capacity(xs.len());
    for &x in &xs {
        values.push(direct(x)?);
    }
    let panel = ChebPanel {
        a,
        b,
        nodes: xs.clone(),
        values,
    };
    // Probe interpolation error between nodes.
    let mut worst = 0.0f64;
    for j in (0..degree).step_by(3.max(degree / 4)) {
        let t = 0.5 * (xs[j] + xs[j + 1]);
        worst = worst.max((panel.eval(t) - direct(t)?).abs());
    }
    if worst <= tol_abs || depth_left == 0 {
        out.push(panel);
        return Ok(());
    }
    let mid = 0.5 * (a + b);
    build_panels(direct, a, mid, degree, tol_abs, depth_left - 1, out)?;
    build_panels(direct, mid, b, degree, tol_abs, depth_left - 1, out)
}

// ---------------------------------------------------------------------------
// Free functions on top of the kernel.
// ---------------------------------------------------------------------------

/// One-shot `g(λ_PT)`; builds a throwaway kernel, so prefer [`DegreeKernel`]
/// for sweeps.
pub fn link_opportunity_probability(params: &RadioParams, lambda_primary_tx: f64) -> Result<f64> {
    DegreeKernel::new(params)?.link_opportunity_probability(lambda_primary_tx)
}

/// One-shot inverse of `g`.
pub fn link_opportunity_inverse(params: &RadioParams, target: f64) -> Result<f64> {
    DegreeKernel::new(params)?.link_opportunity_inverse(target)
}

/// One-shot conditional average degree.
pub fn cond_avg_degree(inputs: &DegreeModelInputs) -> Result<f64> {
    DegreeKernel::new(&inputs.params)?.cond_avg_degree(&inputs.density)
}

/// Simplified degree integral valid when `r_I ≥ R_p + R_I` (the probe disk
/// never leaves the union): `λ_S π r_p² ∫ (2t/r_p²) exp[−λ_PT(π r_I² −
/// lens(t, r_I, r_I))] dt`.
pub fn cond_avg_degree_simplified(inputs: &DegreeModelInputs) -> Result<f64> {
    let p = &inputs.params;
    let ri = p.secondary_interference_range;
    if ri < p.primary_tx_range + p.primary_interference_range {
        return Err(Error::InvalidInput(format!(
            "simplified degree form needs r_I >= R_p + R_I, got {} < {}",
            ri,
            p.primary_tx_range + p.primary_interference_range
        )));
    }
    let rp = p.secondary_tx_range;
    let lambda_pt = inputs.density.primary_tx;
    let opts = QuadOptions {
        abs_tol: 1e-14,
        rel_tol: 1e-10,
        max_intervals: 4096,
    };
    let g = integrate(
        |t| 2.0 * t / (rp * rp) * (-lambda_pt * (PI * ri * ri - lens_area_raw(t, ri, ri))).exp(),
        0.0,
        rp,
        opts,
    )?;
    Ok(inputs.density.secondary * PI * rp * rp * g.value)
}

/// Outer bound on the connectivity region from the necessary condition
/// μ > 1: `λ_PT = g⁻¹(1 / (λ_S π r_p²))`. Grid points with `λ_S π r_p² < 1`
/// are below the bound's reach and are skipped.
pub fn outer_bound_curve(params: &RadioParams, lambda_s_grid: &[f64]) -> Result<BoundaryCurve> {
    for w in lambda_s_grid.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::InvalidInput(
                "secondary density grid must be strictly increasing".into(),
            ));
        }
    }
    let kernel = DegreeKernel::new(params)?;
    let rp = params.secondary_tx_range;
    let mut samples = Vec::new();
    for &lambda_s in lambda_s_grid {
        let neighbors = lambda_s * PI * rp * rp;
        if neighbors < 1.0 {
            continue;
        }
        let lambda_pt = kernel.link_opportunity_inverse(1.0 / neighbors)?;
        samples.push(BoundarySample {
            lambda_s,
            lambda_pt_star: lambda_pt,
            ci_low: lambda_pt,
            ci_high: lambda_pt,
        });
    }
    Ok(BoundaryCurve {
        method: CurveMethod::OuterBound,
        samples,
    })
}

/// Dependence range of the discretized site model with cell side r_p/(2√2):
/// `⌈8·max(R_I + r_p/4, r_I + r_p/4) / r_p⌉ − 1`.
pub fn dependence_range(params: &RadioParams) -> u64 {
    let rp = params.secondary_tx_range;
    let reach = params
        .primary_interference_range
        .max(params.secondary_interference_range)
        + rp / 4.0;
    ((8.0 * reach / rp).ceil() as u64).saturating_sub(1)
}

/// Inner-bound value with an exact log-scale representation: the closed form
/// involves `(1/3)^{(2k+1)²}`, which underflows any float format for
/// realistic dependence ranges, so the sign and magnitude are tracked in
/// base-10 logarithms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InnerBound {
    /// The bound in m⁻²; ±0.0 when the magnitude underflows f64.
    pub lambda_pt: f64,
    /// Whether the bound is positive (false means vacuous at this λ_S).
    pub positive: bool,
    /// log10 of the bound's absolute value, valid even when `lambda_pt`
    /// underflows; −∞ for an exactly zero bound.
    pub log10_abs: f64,
}

/// Signed values represented as (sign, log10 |value|).
fn signed_log10_add(s1: f64, l1: f64, s2: f64, l2: f64) -> (f64, f64) {
    if s1 == 0.0 || l1 == f64::NEG_INFINITY {
        return (s2, l2);
    }
    if s2 == 0.0 || l2 == f64::NEG_INFINITY {
        return (s1, l1);
    }
    let (sb, lb, ss, ls) = if l1 >= l2 {
        (s1, l1, s2, l2)
    } else {
        (s2, l2, s1, l1)
    };
    let diff = lb - ls;
    if diff > 30.0 {
        return (sb, lb);
    }
    let ratio = 10f64.powf(-diff);
    if sb == ss {
        (sb, lb + (1.0 + ratio).log10())
    } else if ratio == 1.0 {
        (0.0, f64::NEG_INFINITY)
    } else {
        (sb, lb + (1.0 - ratio).log10())
    }
}

/// Sufficient-condition inner bound on the primary density at a fixed
/// secondary density:
/// `λ_PT < ln[(1 − e^{−λ_S r_p²/8}) / (1 − 3^{−(2k+1)²})] / (π [R_I² + r_I² − I])`.
pub fn inner_bound_lambda_pt(params: &RadioParams, lambda_s: f64) -> Result<InnerBound> {
    if !(lambda_s > 0.0) {
        return Err(Error::InvalidInput(
            "secondary density must be positive".into(),
        ));
    }
    let overlap = overlap_integral(
        params.primary_interference_range,
        params.primary_tx_range,
        params.secondary_interference_range,
    )?;
    let area = PI
        * (params.primary_interference_range.powi(2) + params.secondary_interference_range.powi(2)
            - overlap);
    let k = dependence_range(params) as f64;
    let m = (2.0 * k + 1.0) * (2.0 * k + 1.0);

    // ln(1 − e^{−x}) as (sign, log10 |·|); for large x the value is −e^{−x}.
    let x = lambda_s * params.secondary_tx_range.powi(2) / 8.0;
    let (num_sign, num_log10) = if x > 700.0 {
        (-1.0, -x * std::f64::consts::LOG10_E)
    } else {
        let v = if x > std::f64::consts::LN_2 {
            (-(-x).exp()).ln_1p()
        } else {
            (-(-x).exp_m1()).ln()
        };
        (-1.0, v.abs().log10())
    };

    // −ln(1 − 3^{−m}) = 3^{−m}(1 + O(3^{−m})); exact for small m, log-tracked
    // beyond that (the correction is below 1e-28 relative once m > 30).
    let (den_sign, den_log10) = if m <= 30.0 {
        let term = 3f64.powf(-m);
        (1.0, (-(-term).ln_1p()).log10())
    } else {
        (1.0, -m * 3f64.log10())
    };

    let (sign, log10_sum) = signed_log10_add(num_sign, num_log10, den_sign, den_log10);
    let log10_abs = log10_sum - area.log10();
    let lambda_pt = sign * 10f64.powf(log10_abs);
    Ok(InnerBound {
        lambda_pt,
        positive: sign > 0.0,
        log10_abs,
    })
}

/// Inner-bound curve over a density grid. Non-positive (vacuous) values are
/// emitted as-is so the method tag always appears in sweep outputs.
pub fn inner_bound_curve(params: &RadioParams, lambda_s_grid: &[f64]) -> Result<BoundaryCurve> {
    let mut samples = Vec::new();
    for &lambda_s in lambda_s_grid {
        let b = inner_bound_lambda_pt(params, lambda_s)?;
        samples.push(BoundarySample {
            lambda_s,
            lambda_pt_star: b.lambda_pt,
            ci_low: b.lambda_pt,
            ci_high: b.lambda_pt,
        });
    }
    Ok(BoundaryCurve {
        method: CurveMethod::InnerBound,
        samples,
    })
}

/// Probability that a site of the discretized model (cell side r_p/(2√2)) is
/// occupied: a secondary user present and seeing an opportunity.
pub fn site_occupation_probability(params: &RadioParams, density: &DensityPair) -> Result<f64> {
    let cell_term = -(-density.secondary * params.secondary_tx_range.powi(2) / 8.0).exp_m1();
    Ok(cell_term * opportunity_probability(params, density.primary_tx)?)
}

/// Cap on the primary-transmitter density above which no secondary density
/// percolates: `λ_c(1) / (4 max(R_I², r_I²) − r_p²)`.
pub fn primary_density_cap(params: &RadioParams, constants: &PercolationConstants) -> Result<f64> {
    let rmax = params
        .primary_interference_range
        .max(params.secondary_interference_range);
    let rp = params.secondary_tx_range;
    if rp >= 2.0 * rmax {
        return Err(Error::InvalidInput(format!(
            "cap needs r_p < 2·max(R_I, r_I), got r_p = {rp}, max = {rmax}"
        )));
    }
    Ok(constants.lambda_c_unit / (4.0 * rmax * rmax - rp * rp))
}

/// Critical density at transmission range `r`: `λ_c(1) / r²`.
pub fn lambda_c_scaled(tx_range: f64, constants: &PercolationConstants) -> Result<f64> {
    if !(tx_range > 0.0) {
        return Err(Error::InvalidInput("range must be positive".into()));
    }
    Ok(constants.lambda_c_unit / (tx_range * tx_range))
}

/// Primary-density cap as a function of the secondary interference range
/// under the proportional-power model `r_p = β r_I`:
/// `λ_c(1)/(4R_I² − β²r_I²)` for `r_I ≤ R_I`, `λ_c(1)/((4−β²)r_I²)` beyond.
/// Maximized at matching interference ranges `r_I = R_I`.
pub fn power_design_bound(
    secondary_interference_range: f64,
    primary_interference_range: f64,
    beta: f64,
    constants: &PercolationConstants,
) -> Result<f64> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::InvalidInput(format!(
            "beta must lie in (0, 1), got {beta}"
        )));
    }
    let ri = secondary_interference_range;
    let big_ri = primary_interference_range;
    if !(ri > 0.0 && big_ri > 0.0) {
        return Err(Error::InvalidInput("ranges must be positive".into()));
    }
    let lc = constants.lambda_c_unit;
    if ri <= big_ri {
        Ok(lc / (4.0 * big_ri * big_ri - beta * beta * ri * ri))
    } else {
        Ok(lc / ((4.0 - beta * beta) * ri * ri))
    }
}

/// Reference point for the power-to-range map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerReference {
    pub power: f64,
    pub range: f64,
}

/// Range under isotropic path loss: `r = r₀ (p/p₀)^(1/α)`.
pub fn range_from_power(p_tx: f64, alpha: f64, reference: PowerReference) -> Result<f64> {
    if !(p_tx > 0.0 && alpha > 0.0 && reference.power > 0.0 && reference.range > 0.0) {
        return Err(Error::InvalidInput(
            "power, alpha, and reference must be positive".into(),
        ));
    }
    Ok(reference.range * (p_tx / reference.power).powf(1.0 / alpha))
}

/// Large-power upper bound on the conditional average degree, valid in the
/// `r_I ≥ R_p + R_I` regime with `r_p = β r_I`, β ∈ (0,1):
/// `2 λ_S π / (λ_PT² r_I²)`.
pub fn mu_asymptotic_bound(inputs: &DegreeModelInputs) -> Result<f64> {
    let p = &inputs.params;
    let ri = p.secondary_interference_range;
    if ri < p.primary_tx_range + p.primary_interference_range {
        return Err(Error::InvalidInput(format!(
            "asymptotic bound needs r_I >= R_p + R_I, got {} < {}",
            ri,
            p.primary_tx_range + p.primary_interference_range
        )));
    }
    if p.secondary_tx_range >= ri {
        return Err(Error::InvalidInput(
            "asymptotic bound needs r_p < r_I".into(),
        ));
    }
    let lambda_pt = inputs.density.primary_tx;
    if !(lambda_pt > 0.0) {
        return Err(Error::InvalidInput(
            "asymptotic bound needs a positive primary density".into(),
        ));
    }
    Ok(2.0 * inputs.density.secondary * PI / (lambda_pt * lambda_pt * ri * ri))
}
