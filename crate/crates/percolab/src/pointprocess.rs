//! Reproducible sampling of the primary and secondary Poisson point processes
//! in a rectangular window with boundary padding.
//!
//! Primary transmitters are sampled on the window enlarged by the padding so
//! that opportunity evaluation inside the unpadded window is unbiased; each
//! transmitter gets a receiver uniform in its transmission disk. Secondary
//! users are sampled on the unpadded window.
//!
//! Poisson counts are drawn by accumulating unit-rate exponential arrivals
//! and positions come from a separate substream, so for a fixed stream key a
//! higher density always yields a superset of the points drawn at a lower
//! density. Monotone-coupling arguments therefore hold realization by
//! realization, not just in distribution.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::io::Write;

use crate::geometry::Point;
use crate::{Error, Result};

/// The four ranges (meters) that define link and opportunity geometry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadioParams {
    /// Primary transmission range R_p: each primary receiver lies within this
    /// distance of its transmitter.
    pub primary_tx_range: f64,
    /// Primary interference range R_I: a primary transmitter closer than this
    /// blocks a secondary user's reception.
    pub primary_interference_range: f64,
    /// Secondary transmission range r_p: maximum link length.
    pub secondary_tx_range: f64,
    /// Secondary interference range r_I: a secondary transmitter closer than
    /// this to a primary receiver would interfere with it.
    pub secondary_interference_range: f64,
}

impl RadioParams {
    pub fn new(
        primary_tx_range: f64,
        primary_interference_range: f64,
        secondary_tx_range: f64,
        secondary_interference_range: f64,
    ) -> Result<Self> {
        let p = Self {
            primary_tx_range,
            primary_interference_range,
            secondary_tx_range,
            secondary_interference_range,
        };
        for (name, v) in [
            ("primary_tx_range", primary_tx_range),
            ("primary_interference_range", primary_interference_range),
            ("secondary_tx_range", secondary_tx_range),
            ("secondary_interference_range", secondary_interference_range),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "{name} must be strictly positive, got {v}"
                )));
            }
        }
        Ok(p)
    }

    /// Advisory notes that do not reject the configuration. The general model
    /// allows a transmission range at or above the interference range, but
    /// the critical-density cap on the primary side assumes it is smaller.
    pub fn warnings(&self) -> Vec<String> {
        let mut w = Vec::new();
        if self.secondary_tx_range >= self.secondary_interference_range {
            w.push(format!(
                "secondary_tx_range ({}) >= secondary_interference_range ({}); \
                 the primary-density cap bound assumes a smaller transmission range",
                self.secondary_tx_range, self.secondary_interference_range
            ));
        }
        w
    }

    /// Padding needed so that primary nodes outside the padded window cannot
    /// change any opportunity flag inside the unpadded window.
    pub fn required_padding(&self) -> f64 {
        self.primary_interference_range
            .max(self.secondary_interference_range)
            + self.primary_tx_range
    }
}

/// A point in the (λ_S, λ_PT) density plane, in m⁻².
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityPair {
    /// Secondary-user density λ_S.
    pub secondary: f64,
    /// Primary-transmitter density λ_PT.
    pub primary_tx: f64,
}

impl DensityPair {
    pub fn new(secondary: f64, primary_tx: f64) -> Result<Self> {
        if !(secondary >= 0.0) || !(primary_tx >= 0.0) {
            return Err(Error::InvalidInput(format!(
                "densities must be non-negative, got ({secondary}, {primary_tx})"
            )));
        }
        Ok(Self {
            secondary,
            primary_tx,
        })
    }
}

/// Rectangular observation window `[0, width] × [0, height]` with padding for
/// the primary processes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub width: f64,
    pub height: f64,
    pub padding: f64,
}

impl Window {
    pub fn new(width: f64, height: f64, padding: f64) -> Result<Self> {
        if !(width > 0.0 && height > 0.0) {
            return Err(Error::InvalidInput(format!(
                "window dimensions must be positive, got {width} x {height}"
            )));
        }
        if !(padding >= 0.0) {
            return Err(Error::InvalidInput(format!(
                "padding must be non-negative, got {padding}"
            )));
        }
        Ok(Self {
            width,
            height,
            padding,
        })
    }

    /// Window with exactly the padding the parameters require.
    pub fn padded_for(width: f64, height: f64, params: &RadioParams) -> Result<Self> {
        Self::new(width, height, params.required_padding())
    }

    pub fn area(&self) -> f64 {
        self.width * self.height
    }

    pub fn padded_area(&self) -> f64 {
        (self.width + 2.0 * self.padding) * (self.height + 2.0 * self.padding)
    }
}

/// Which process a stream drives; distinct roles get independent streams.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StreamRole {
    Primary,
    Secondary,
}

/// Seed bookkeeping stored inside every realization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedRecord {
    pub master_seed: u64,
    pub realization_index: u64,
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn derive_rng(master_seed: u64, realization_index: u64, role: u64, lane: u64) -> ChaCha8Rng {
    let mut state = master_seed;
    let _ = splitmix64(&mut state);
    state ^= realization_index.wrapping_mul(0xD134_2543_DE82_EF95);
    let _ = splitmix64(&mut state);
    state ^= role.wrapping_mul(0x8CB9_2BA7_2F3D_8DD7);
    let _ = splitmix64(&mut state);
    state ^= lane.wrapping_mul(0x2545_F491_4F6C_DD1D);
    let mut seed = [0u8; 32];
    for chunk in seed.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    ChaCha8Rng::from_seed(seed)
}

/// A deterministic stream keyed by (master seed, realization index, role).
///
/// Counts and positions come from separate substreams so that the points
/// drawn at one density are a prefix of the points drawn at a higher density
/// under the same key.
pub struct RngStream {
    arrivals: ChaCha8Rng,
    positions: ChaCha8Rng,
}

impl RngStream {
    /// Poisson count with the given mean, by unit-rate exponential arrivals.
    pub fn poisson_count(&mut self, mean: f64) -> usize {
        assert!(
            mean >= 0.0 && mean.is_finite(),
            "invalid Poisson mean {mean}"
        );
        if mean == 0.0 {
            return 0;
        }
        let mut acc = 0.0;
        let mut n = 0usize;
        loop {
            let u: f64 = self.arrivals.random();
            acc += -(1.0 - u).ln();
            if acc > mean {
                return n;
            }
            n += 1;
        }
    }

    /// Next position-lane uniform in [0, 1).
    pub fn position_uniform(&mut self) -> f64 {
        self.positions.random()
    }
}

/// Build the stream for (master seed, realization index, role). Identical
/// inputs produce identical streams.
pub fn make_rng_stream(master_seed: u64, realization_index: u64, role: StreamRole) -> RngStream {
    let role_id = match role {
        StreamRole::Primary => 1,
        StreamRole::Secondary => 2,
    };
    RngStream {
        arrivals: derive_rng(master_seed, realization_index, role_id, 0),
        positions: derive_rng(master_seed, realization_index, role_id, 1),
    }
}

/// A primary transmitter and its receiver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrimaryPair {
    pub tx: Point,
    pub rx: Point,
}

/// Sample the primary transmitter process (density per m²) on the padded
/// window; each transmitter's receiver is uniform in its transmission disk.
pub fn sample_primary(
    params: &RadioParams,
    lambda_primary_tx: f64,
    window: &Window,
    stream: &mut RngStream,
) -> Result<Vec<PrimaryPair>> {
    if !(lambda_primary_tx >= 0.0) || !lambda_primary_tx.is_finite() {
        return Err(Error::InvalidInput(format!(
            "primary density must be non-negative, got {lambda_primary_tx}"
        )));
    }
    let required = params.required_padding();
    if window.padding < required - 1e-9 {
        return Err(Error::InvalidInput(format!(
            "window padding {} is below the required {} = max(R_I, r_I) + R_p",
            window.padding, required
        )));
    }
    let n = stream.poisson_count(lambda_primary_tx * window.padded_area());
    let w = window.width + 2.0 * window.padding;
    let h = window.height + 2.0 * window.padding;
    let mut pairs = Vec::with_capacity(n);
    for _ in 0..n {
        let tx = Point::new(
            -window.padding + w * stream.position_uniform(),
            -window.padding + h * stream.position_uniform(),
        );
        // Uniform in the disk: radius by inverse CDF, angle uniform.
        let radius = params.primary_tx_range * stream.position_uniform().sqrt();
        let angle = 2.0 * std::f64::consts::PI * stream.position_uniform();
        let rx = Point::new(tx.x + radius * angle.cos(), tx.y + radius * angle.sin());
        pairs.push(PrimaryPair { tx, rx });
    }
    Ok(pairs)
}

/// Sample the secondary process (density per m²) on the unpadded window.
pub fn sample_secondary(
    lambda_secondary: f64,
    window: &Window,
    stream: &mut RngStream,
) -> Result<Vec<Point>> {
    if !(lambda_secondary >= 0.0) || !lambda_secondary.is_finite() {
        return Err(Error::InvalidInput(format!(
            "secondary density must be non-negative, got {lambda_secondary}"
        )));
    }
    let n = stream.poisson_count(lambda_secondary * window.area());
    let mut points = Vec::with_capacity(n);
    for _ in 0..n {
        points.push(Point::new(
            window.width * stream.position_uniform(),
            window.height * stream.position_uniform(),
        ));
    }
    Ok(points)
}

/// One sampled heterogeneous network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Realization {
    pub primary_pairs: Vec<PrimaryPair>,
    pub secondary: Vec<Point>,
    pub window: Window,
    pub seed: SeedRecord,
}

impl Realization {
    /// Deterministically generate realization `index` of the experiment with
    /// the given master seed.
    pub fn generate(
        params: &RadioParams,
        density: &DensityPair,
        window: &Window,
        master_seed: u64,
        realization_index: u64,
    ) -> Result<Self> {
        let mut primary_stream =
            make_rng_stream(master_seed, realization_index, StreamRole::Primary);
        let mut secondary_stream =
            make_rng_stream(master_seed, realization_index, StreamRole::Secondary);
        Ok(Self {
            primary_pairs: sample_primary(params, density.primary_tx, window, &mut primary_stream)?,
            secondary: sample_secondary(density.secondary, window, &mut secondary_stream)?,
            window: *window,
            seed: SeedRecord {
                master_seed,
                realization_index,
            },
        })
    }

    /// Node table for replay and debugging: `role,x_m,y_m,pair_id` with roles
    /// `ptx`, `prx`, `su`; `pair_id` is empty for secondary users.
    pub fn write_nodes_csv<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        writeln!(out, "role,x_m,y_m,pair_id")?;
        for (i, pair) in self.primary_pairs.iter().enumerate() {
            writeln!(out, "ptx,{},{},{}", pair.tx.x, pair.tx.y, i)?;
            writeln!(out, "prx,{},{},{}", pair.rx.x, pair.rx.y, i)?;
        }
        for p in &self.secondary {
            writeln!(out, "su,{},{},", p.x, p.y)?;
        }
        Ok(())
    }
}
