//! Von Neumann pointer model for rank-one projectors and the strong–weak–strong protocol.
//!
//! Units: `ħ = 1`. The initial pointer is `φ0(x) = (2πσ²)^{-1/4} exp(−x²/(4σ²))`, so
//! `Var x = σ²` and `Var p = 1/(4σ²)`. The coupling `exp(−i g Π ⊗ p̂)` shifts the
//! pointer by `g` on the range of `Π`; after post-selection on `|post⟩` the pointer is
//! `c0 φ0(x) + c1 φ0(x − g)` with `c1 = ⟨post|Π|pre⟩` and `c0 = ⟨post|pre⟩ − c1`.
//!
//! To first order in `g` the pointer moves by `⟨x⟩ = g Re A_w` and
//! `⟨p⟩ = g Im A_w / (2σ²)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::angle::wrap_two_pi;
use crate::linalg::inner;
use crate::sic::SicSet;
use crate::{Complex, Error, Ket, Projector, Result, DEFAULT_OVERLAP_FLOOR};

/// Half-width of the default grid in units of `σ`.
pub const GRID_HALF_WIDTH: f64 = 8.0;
/// Default number of grid points (position and momentum).
pub const GRID_POINTS: usize = 4096;
/// Largest coupling accepted by the weak-limit estimators, in units of `σ`.
pub const MAX_WEAK_COUPLING: f64 = 0.05;

/// Uniform grid `x_min, …, x_max` with `n` points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub x_min: f64,
    pub x_max: f64,
    pub n: usize,
}

impl Grid {
    pub fn new(x_min: f64, x_max: f64, n: usize) -> Result<Self> {
        let g = Grid { x_min, x_max, n };
        g.validate()?;
        Ok(g)
    }

    /// `[−8σ, 8σ + g]` with 4096 points.
    pub fn default_for(sigma: f64, g: f64) -> Self {
        Grid {
            x_min: -GRID_HALF_WIDTH * sigma,
            x_max: GRID_HALF_WIDTH * sigma + g,
            n: GRID_POINTS,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.x_min.is_finite() && self.x_max.is_finite()) || self.x_max <= self.x_min {
            return Err(Error::InvalidParameter(format!(
                "grid bounds must satisfy x_min < x_max, got [{}, {}]",
                self.x_min, self.x_max
            )));
        }
        if self.n < 3 {
            return Err(Error::InvalidParameter(format!(
                "grid needs at least 3 points, got {}",
                self.n
            )));
        }
        Ok(())
    }

    pub fn step(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n - 1) as f64
    }

    pub fn point(&self, k: usize) -> f64 {
        self.x_min + k as f64 * self.step()
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(|k| self.point(k))
    }
}

/// Trapezoid rule for samples on `grid`.
pub fn trapezoid(values: &[f64], grid: &Grid) -> f64 {
    let n = values.len();
    let interior: f64 = values[1..n - 1].iter().sum();
    grid.step() * (interior + 0.5 * (values[0] + values[n - 1]))
}

fn gaussian(x: f64, sigma: f64) -> f64 {
    (2.0 * std::f64::consts::PI * sigma * sigma).powf(-0.25)
        * (-x * x / (4.0 * sigma * sigma)).exp()
}

/// Discretized pointer wavefunction after coupling and post-selection.
#[derive(Debug, Clone, PartialEq)]
pub struct PointerState {
    pub sigma: f64,
    pub grid: Grid,
    /// Renormalized amplitudes (trapezoid norm 1).
    pub amplitudes: Vec<Complex>,
    /// Squared norm before renormalization: the post-selection success probability.
    pub norm_sq: f64,
    /// Coupling strength; zero for states built from raw amplitudes.
    pub g: f64,
    /// Weights of the undisplaced and displaced Gaussians (`c0`, `c1`).
    pub weights: (Complex, Complex),
}

impl PointerState {
    /// Wraps arbitrary amplitudes, renormalizing them on the grid.
    pub fn from_amplitudes(sigma: f64, grid: Grid, amplitudes: Vec<Complex>) -> Result<Self> {
        grid.validate()?;
        if amplitudes.len() != grid.n {
            return Err(Error::DimensionMismatch {
                expected: grid.n,
                found: amplitudes.len(),
            });
        }
        let dens: Vec<f64> = amplitudes.iter().map(|z| z.norm_sqr()).collect();
        let norm_sq = trapezoid(&dens, &grid);
        if norm_sq <= 0.0 || !norm_sq.is_finite() {
            return Err(Error::DegenerateState {
                norm: norm_sq.sqrt(),
            });
        }
        let s = norm_sq.sqrt();
        Ok(PointerState {
            sigma,
            grid,
            amplitudes: amplitudes.into_iter().map(|z| z / s).collect(),
            norm_sq,
            g: 0.0,
            weights: (Complex::new(0.0, 0.0), Complex::new(0.0, 0.0)),
        })
    }

    pub fn density(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|z| z.norm_sqr()).collect()
    }

    /// Unnormalized momentum density `|c0 + c1 e^{−igp}|² |φ̃0(p)|²` of a coupled state.
    pub fn momentum_density(&self, p: f64) -> f64 {
        let (c0, c1) = self.weights;
        let amp = c0 + c1 * Complex::from_polar(1.0, -self.g * p);
        amp.norm_sqr() * (-2.0 * self.sigma * self.sigma * p * p).exp()
    }
}

fn check_pointer_params(g: f64, sigma: f64) -> Result<()> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "sigma must be positive, got {sigma}"
        )));
    }
    if !(g >= 0.0 && g.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "g must be non-negative, got {g}"
        )));
    }
    Ok(())
}

/// Couples `Π = |pi_axis⟩⟨pi_axis|` to the pointer with strength `g` and post-selects `post`.
pub fn couple_and_postselect(
    pi_axis: &Ket,
    pre: &Ket,
    post: &Ket,
    g: f64,
    sigma: f64,
    grid: &Grid,
) -> Result<PointerState> {
    check_pointer_params(g, sigma)?;
    grid.validate()?;
    let margin = GRID_HALF_WIDTH * sigma;
    if grid.x_min > -margin * (1.0 - 1e-12) || grid.x_max < (g + margin) * (1.0 - 1e-12) {
        return Err(Error::InvalidParameter(format!(
            "grid too small for displacement g = {g}: need [{}, {}] to contain [{}, {}]",
            grid.x_min,
            grid.x_max,
            -margin,
            g + margin
        )));
    }
    let overlap = inner(post, pre)?;
    if overlap.norm_sqr() <= DEFAULT_OVERLAP_FLOOR {
        return Err(Error::OrthogonalSelection {
            prob: overlap.norm_sqr(),
            floor: DEFAULT_OVERLAP_FLOOR,
        });
    }
    let c1 = Projector::new(pi_axis.clone()).matrix_element(post, pre)?;
    let c0 = overlap - c1;
    let raw: Vec<Complex> = grid
        .points()
        .map(|x| c0 * gaussian(x, sigma) + c1 * gaussian(x - g, sigma))
        .collect();
    let mut state = PointerState::from_amplitudes(sigma, *grid, raw)?;
    state.g = g;
    state.weights = (c0, c1);
    Ok(state)
}

/// `(⟨x⟩, ⟨p⟩)` by trapezoid quadrature; `dφ/dx` by central differences.
pub fn pointer_means(state: &PointerState) -> (f64, f64) {
    let grid = &state.grid;
    let phi = &state.amplitudes;
    let n = phi.len();
    let h = grid.step();
    let xs: Vec<f64> = grid
        .points()
        .zip(phi)
        .map(|(x, z)| x * z.norm_sqr())
        .collect();
    let current: Vec<f64> = (0..n)
        .map(|k| {
            let deriv = if k == 0 {
                (phi[1] - phi[0]) / h
            } else if k == n - 1 {
                (phi[n - 1] - phi[n - 2]) / h
            } else {
                (phi[k + 1] - phi[k - 1]) / (2.0 * h)
            };
            (phi[k].conj() * deriv).im
        })
        .collect();
    (trapezoid(&xs, grid), trapezoid(&current, grid))
}

fn check_weak(g: f64, sigma: f64) -> Result<()> {
    check_pointer_params(g, sigma)?;
    if g <= 0.0 || g > MAX_WEAK_COUPLING * sigma * (1.0 + 1e-12) {
        return Err(Error::InvalidParameter(format!(
            "weak coupling requires 0 < g <= {MAX_WEAK_COUPLING}·sigma, got g = {g}, sigma = {sigma}"
        )));
    }
    Ok(())
}

/// First-order estimates `(⟨x⟩/g, 2σ²⟨p⟩/g)` of `(Re A_w, Im A_w)` from the exact pointer.
pub fn weak_limit_estimate(
    pi_axis: &Ket,
    pre: &Ket,
    post: &Ket,
    sigma: f64,
    g: f64,
) -> Result<(f64, f64)> {
    check_weak(g, sigma)?;
    let state = couple_and_postselect(pi_axis, pre, post, g, sigma, &Grid::default_for(sigma, g))?;
    let (mx, mp) = pointer_means(&state);
    Ok((mx / g, 2.0 * sigma * sigma * mp / g))
}

/// Inverse-CDF sampler for a density tabulated on a uniform grid, exact for its
/// piecewise-linear interpolant.
#[derive(Debug, Clone)]
pub struct GridSampler {
    grid: Grid,
    density: Vec<f64>,
    /// Cumulative trapezoid mass at each node, `cdf[0] = 0`.
    cdf: Vec<f64>,
}

impl GridSampler {
    pub fn new(grid: Grid, density: Vec<f64>) -> Result<Self> {
        grid.validate()?;
        if density.len() != grid.n
            || density
                .iter()
                .any(|d| d.is_nan() || *d < 0.0 || d.is_infinite())
        {
            return Err(Error::InvalidParameter(
                "density must be finite and non-negative".into(),
            ));
        }
        let h = grid.step();
        let mut cdf = Vec::with_capacity(grid.n);
        let mut acc = 0.0;
        cdf.push(0.0);
        for w in density.windows(2) {
            acc += 0.5 * h * (w[0] + w[1]);
            cdf.push(acc);
        }
        if acc <= 0.0 {
            return Err(Error::InvalidParameter("density has zero mass".into()));
        }
        Ok(GridSampler { grid, density, cdf })
    }

    /// Maps `u ∈ [0, 1)` to a sample.
    pub fn sample(&self, u: f64) -> f64 {
        let total = *self.cdf.last().expect("non-empty");
        let target = u * total;
        // first node whose cumulative mass exceeds the target
        let hi = self
            .cdf
            .partition_point(|&c| c <= target)
            .clamp(1, self.cdf.len() - 1);
        let lo = hi - 1;
        let h = self.grid.step();
        let m = target - self.cdf[lo];
        let (f0, f1) = (self.density[lo], self.density[hi]);
        let slope = (f1 - f0) / h;
        // solve f0·t + slope·t²/2 = m for t in [0, h]; rationalized root
        let denom = f0 + (f0 * f0 + 2.0 * slope * m).max(0.0).sqrt();
        let t = if denom > 0.0 { 2.0 * m / denom } else { 0.0 };
        self.grid.point(lo) + t.clamp(0.0, h)
    }

    /// Mean of the piecewise-linear density.
    pub fn mean(&self) -> f64 {
        let xs: Vec<f64> = self
            .grid
            .points()
            .zip(&self.density)
            .map(|(x, d)| x * d)
            .collect();
        trapezoid(&xs, &self.grid) / self.cdf.last().expect("non-empty")
    }
}

/// Protocol parameters; the JSON config file has exactly these fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolConfig {
    pub dim: usize,
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub g: f64,
    pub sigma: f64,
    pub shots_x: u64,
    pub shots_p: u64,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<Grid>,
}

impl ProtocolConfig {
    pub fn position_grid(&self) -> Grid {
        self.grid
            .unwrap_or_else(|| Grid::default_for(self.sigma, self.g))
    }

    /// `[−8σ_p, 8σ_p]` with `σ_p = 1/(2σ)` and the position grid's point count.
    pub fn momentum_grid(&self) -> Grid {
        let half = GRID_HALF_WIDTH / (2.0 * self.sigma);
        Grid {
            x_min: -half,
            x_max: half,
            n: self.position_grid().n,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolEstimate {
    pub re_hat: f64,
    pub im_hat: f64,
    /// `atan2(im_hat, re_hat)` in `[0, 2π)`.
    pub theta_hat: f64,
    pub modulus_hat: f64,
    pub shots_position: u64,
    pub shots_momentum: u64,
    pub accepted_position: u64,
    pub accepted_momentum: u64,
    pub accepted_fraction: f64,
    pub stderr_re: f64,
    pub stderr_im: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Channel {
    Position,
    Momentum,
}

/// One simulated shot; `value` is `None` when post-selection rejected it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShotRecord {
    pub index: u64,
    pub channel: Channel,
    pub value: Option<f64>,
}

/// Worker threads for shot simulation. Results do not depend on this setting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Parallelism {
    Sequential,
    #[default]
    Global,
    Threads(usize),
}

/// Random source for one shot: a ChaCha stream keyed by `(seed, shot_index)`.
fn shot_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn simulate_shot(
    seed: u64,
    index: u64,
    accept_prob: f64,
    sampler: &GridSampler,
    channel: Channel,
) -> ShotRecord {
    let mut rng = shot_rng(seed, index);
    let u: f64 = rng.random();
    let value = (u < accept_prob).then(|| sampler.sample(rng.random::<f64>()));
    ShotRecord {
        index,
        channel,
        value,
    }
}

/// Simulates every shot of the protocol in shot-index order.
pub fn protocol_shots(
    set: &SicSet,
    config: &ProtocolConfig,
    parallelism: Parallelism,
) -> Result<Vec<ShotRecord>> {
    let n = set.len();
    let (i, j, k) = (config.i, config.j, config.k);
    if i == j || j == k || i == k || i >= n || j >= n || k >= n {
        return Err(Error::InvalidIndices {
            indices: vec![i, j, k],
            len: n,
        });
    }
    if set.dim() != config.dim {
        return Err(Error::DimensionMismatch {
            expected: config.dim,
            found: set.dim(),
        });
    }
    check_weak(config.g, config.sigma)?;
    if config.shots_x == 0 || config.shots_p == 0 {
        return Err(Error::InvalidParameter(
            "shot counts must be at least 1".into(),
        ));
    }
    let s = set.states();
    let state = couple_and_postselect(
        &s[j],
        &s[i],
        &s[k],
        config.g,
        config.sigma,
        &config.position_grid(),
    )?;
    let accept_prob = state.norm_sq;
    let x_sampler = GridSampler::new(state.grid, state.density())?;
    let p_grid = config.momentum_grid();
    let p_sampler = GridSampler::new(
        p_grid,
        p_grid.points().map(|p| state.momentum_density(p)).collect(),
    )?;

    let total = config.shots_x + config.shots_p;
    let seed = config.seed;
    let run = |idx: u64| {
        if idx < config.shots_x {
            simulate_shot(seed, idx, accept_prob, &x_sampler, Channel::Position)
        } else {
            simulate_shot(seed, idx, accept_prob, &p_sampler, Channel::Momentum)
        }
    };
    let records = match parallelism {
        Parallelism::Sequential => (0..total).map(run).collect(),
        Parallelism::Global => (0..total).into_par_iter().map(run).collect(),
        Parallelism::Threads(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t.max(1))
            .build()
            .map_err(|e| Error::InvalidParameter(e.to_string()))?
            .install(|| (0..total).into_par_iter().map(run).collect()),
    };
    Ok(records)
}

/// `(count, mean, standard error)` accumulated in shot order.
fn summarize(values: impl Iterator<Item = f64>) -> (u64, f64, f64) {
    let (mut n, mut mean, mut m2) = (0u64, 0.0, 0.0);
    for v in values {
        n += 1;
        let delta = v - mean;
        mean += delta / n as f64;
        m2 += delta * (v - mean);
    }
    let stderr = if n > 1 {
        (m2 / (n - 1) as f64 / n as f64).sqrt()
    } else {
        f64::NAN
    };
    (n, mean, stderr)
}

/// Aggregates shot records into the weak-value estimate.
pub fn estimate_from_shots(
    config: &ProtocolConfig,
    shots: &[ShotRecord],
) -> Result<ProtocolEstimate> {
    let pick = |ch: Channel| {
        shots
            .iter()
            .filter(move |r| r.channel == ch)
            .filter_map(|r| r.value)
    };
    let (nx, mean_x, se_x) = summarize(pick(Channel::Position));
    let (np, mean_p, se_p) = summarize(pick(Channel::Momentum));
    if nx == 0 || np == 0 {
        return Err(Error::PostSelectionStarved);
    }
    let g = config.g;
    let scale_p = 2.0 * config.sigma * config.sigma / g;
    let re_hat = mean_x / g;
    let im_hat = scale_p * mean_p;
    Ok(ProtocolEstimate {
        re_hat,
        im_hat,
        theta_hat: wrap_two_pi(im_hat.atan2(re_hat)),
        modulus_hat: re_hat.hypot(im_hat),
        shots_position: config.shots_x,
        shots_momentum: config.shots_p,
        accepted_position: nx,
        accepted_momentum: np,
        accepted_fraction: (nx + np) as f64 / (config.shots_x + config.shots_p) as f64,
        stderr_re: se_x / g,
        stderr_im: scale_p * se_p,
    })
}

/// Strong–weak–strong run: prepare `ψ_i`, couple `Π_j`, post-select `ψ_k`.
pub fn protocol_run(
    set: &SicSet,
    config: &ProtocolConfig,
    parallelism: Parallelism,
) -> Result<ProtocolEstimate> {
    let shots = protocol_shots(set, config, parallelism)?;
    estimate_from_shots(config, &shots)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::haar_random_ket;
    use crate::weak::projector_weak_value;

    fn grid() -> Grid {
        Grid::default_for(1.0, 0.0)
    }

    #[test]
    fn no_coupling() {
        let pre = haar_random_ket(2, 1).unwrap();
        let post = haar_random_ket(2, 2).unwrap();
        let om = haar_random_ket(2, 3).unwrap();
        let s = couple_and_postselect(&om, &pre, &post, 0.0, 1.0, &grid()).unwrap();
        let p = inner(&post, &pre).unwrap().norm_sqr();
        assert!((s.norm_sq - p).abs() < 1e-10);
        let (mx, mp) = pointer_means(&s);
        assert!(mx.abs() < 1e-10 && mp.abs() < 1e-10);
        assert!((trapezoid(&s.density(), &s.grid) - 1.0).abs() < 1e-8);
    }

    #[test]
    fn eigenstate_shift_is_strong_value() {
        let g = 0.3;
        let z = Ket::z_plus();
        let s = couple_and_postselect(&z, &z, &z, g, 1.0, &Grid::default_for(1.0, g)).unwrap();
        let (mx, mp) = pointer_means(&s);
        assert!((mx - g).abs() < 1e-8);
        assert!(mp.abs() < 1e-10);
    }

    #[test]
    fn means_of_reference_states() {
        let gr = grid();
        let sigma = 1.0;
        let centered = PointerState::from_amplitudes(
            sigma,
            gr,
            gr.points()
                .map(|x| Complex::new(gaussian(x, sigma), 0.0))
                .collect(),
        )
        .unwrap();
        let (mx, mp) = pointer_means(&centered);
        assert!(mx.abs() < 1e-10 && mp.abs() < 1e-10);

        let g = 0.2;
        let gs = Grid::default_for(sigma, g);
        let shifted = PointerState::from_amplitudes(
            sigma,
            gs,
            gs.points()
                .map(|x| Complex::new(gaussian(x - g, sigma), 0.0))
                .collect(),
        )
        .unwrap();
        let (mx, mp) = pointer_means(&shifted);
        assert!((mx - g).abs() < 1e-8 && mp.abs() < 1e-10);

        // plane-wave phase oracle: <p> = k; central differences err by ~k·h²(k²/6 + 1/(8σ²))
        for k in [0.3, -0.2, 0.1] {
            let wave = PointerState::from_amplitudes(
                sigma,
                gr,
                gr.points()
                    .map(|x| Complex::from_polar(gaussian(x, sigma), k * x))
                    .collect(),
            )
            .unwrap();
            let (mx, mp) = pointer_means(&wave);
            assert!(mx.abs() < 1e-10);
            assert!((mp - k).abs() < 1e-6, "k={k}: {mp}");
        }
    }

    #[test]
    fn coupling_errors() {
        let z = Ket::z_plus();
        let tight = Grid::new(-8.0, 8.0, 256).unwrap();
        assert!(couple_and_postselect(&z, &z, &z, 0.5, 1.0, &tight).is_err());
        assert!(matches!(
            couple_and_postselect(
                &z,
                &z,
                &Ket::z_minus(),
                0.01,
                1.0,
                &Grid::default_for(1.0, 0.01)
            ),
            Err(Error::OrthogonalSelection { .. })
        ));
        assert!(couple_and_postselect(&z, &z, &z, -0.1, 1.0, &grid()).is_err());
        assert!(couple_and_postselect(&z, &z, &z, 0.0, 0.0, &grid()).is_err());
        assert!(Grid::new(1.0, 0.0, 10).is_err());
        assert!(Grid::new(0.0, 1.0, 2).is_err());
    }

    #[test]
    fn weakness_is_enforced() {
        let z = Ket::z_plus();
        assert!(weak_limit_estimate(&z, &z, &z, 1.0, 0.06).is_err());
        assert!(weak_limit_estimate(&z, &z, &z, 1.0, 0.0).is_err());
        assert!(weak_limit_estimate(&z, &z, &z, 2.0, 0.1).is_ok());
    }

    #[test]
    fn eigenprojector_estimates() {
        let xp = Ket::x_plus();
        let (re, im) = weak_limit_estimate(&xp, &xp, &xp, 1.0, 0.01).unwrap();
        assert!((re - 1.0).abs() < 1e-6 && im.abs() < 1e-6);
        let xm = Ket::x_minus();
        let (re, im) = weak_limit_estimate(&xp, &xm, &xm, 1.0, 0.01).unwrap();
        assert!(re.abs() < 1e-6 && im.abs() < 1e-6);
    }

    #[test]
    fn sic_triple_reads_imaginary() {
        let set = crate::sic::builtin_sic(2).unwrap();
        let s = set.states();
        let (re, im) = weak_limit_estimate(&s[1], &s[0], &s[2], 1.0, 0.01).unwrap();
        assert!(re.abs() < 1e-4, "re = {re}");
        assert!((im.abs() - 3f64.sqrt().recip()).abs() < 1e-4, "im = {im}");
        let st = couple_and_postselect(
            &s[1],
            &s[0],
            &s[2],
            0.001,
            1.0,
            &Grid::default_for(1.0, 0.001),
        )
        .unwrap();
        assert!(pointer_means(&st).0.abs() < 1e-8);
    }

    #[test]
    fn octant_weak_value_from_pointer() {
        let w = projector_weak_value(&Ket::x_plus(), &Ket::z_plus(), &Ket::y_plus()).unwrap();
        let mut prev = f64::INFINITY;
        for g in [0.04, 0.02, 0.01, 0.005] {
            let (re, im) =
                weak_limit_estimate(&Ket::x_plus(), &Ket::z_plus(), &Ket::y_plus(), 1.0, g)
                    .unwrap();
            let err = (Complex::new(re, im) - w.value).norm();
            assert!(err < prev);
            assert!(err <= 2.0 * g, "g={g}: err={err}");
            prev = err;
        }
    }

    #[test]
    fn sampler_inverts_linear_cells() {
        let gr = Grid::new(0.0, 1.0, 3).unwrap();
        let s = GridSampler::new(gr, vec![0.0, 1.0, 1.0]).unwrap();
        // mass 1/4 in the first cell (density t/h), 1/2 in the second
        assert!((s.sample(0.0) - 0.0).abs() < 1e-12);
        // target mass 1/8 inside the first cell, where the cdf is t²
        let half_first = s.sample(1.0 / 6.0);
        assert!((half_first - (0.5f64).sqrt() * 0.5).abs() < 1e-12);
        assert!((s.sample(2.0 / 3.0) - 0.75).abs() < 1e-12);
        assert!(GridSampler::new(gr, vec![0.0, 0.0, 0.0]).is_err());
        assert!(GridSampler::new(gr, vec![0.0, -1.0, 0.0]).is_err());
    }

    #[test]
    fn sampler_mean_matches_quadrature() {
        let gr = Grid::default_for(1.0, 0.0);
        let dens: Vec<f64> = gr
            .points()
            .map(|x| gaussian(x - 0.3, 1.0).powi(2))
            .collect();
        let s = GridSampler::new(gr, dens).unwrap();
        let n = 200_000;
        let mean = (0..n)
            .map(|k| s.sample((k as f64 + 0.5) / n as f64))
            .sum::<f64>()
            / n as f64;
        assert!((mean - 0.3).abs() < 1e-4);
        assert!((s.mean() - 0.3).abs() < 1e-10);
    }

    fn small_config() -> ProtocolConfig {
        ProtocolConfig {
            dim: 2,
            i: 0,
            j: 1,
            k: 2,
            g: 0.05,
            sigma: 1.0,
            shots_x: 2000,
            shots_p: 2000,
            seed: 7,
            grid: None,
        }
    }

    #[test]
    fn protocol_is_deterministic_across_parallelism() {
        let set = crate::sic::builtin_sic(2).unwrap();
        let cfg = small_config();
        let a = protocol_run(&set, &cfg, Parallelism::Sequential).unwrap();
        let b = protocol_run(&set, &cfg, Parallelism::Threads(3)).unwrap();
        let c = protocol_run(&set, &cfg, Parallelism::Global).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, c);
        let other = protocol_run(
            &set,
            &ProtocolConfig { seed: 8, ..cfg },
            Parallelism::Global,
        )
        .unwrap();
        assert_ne!(a, other);
    }

    #[test]
    fn protocol_validation() {
        let set = crate::sic::builtin_sic(2).unwrap();
        let bad = ProtocolConfig {
            j: 0,
            ..small_config()
        };
        assert!(matches!(
            protocol_run(&set, &bad, Parallelism::Sequential),
            Err(Error::InvalidIndices { .. })
        ));
        let strong = ProtocolConfig {
            g: 0.5,
            ..small_config()
        };
        assert!(protocol_run(&set, &strong, Parallelism::Sequential).is_err());
        let none = ProtocolConfig {
            shots_x: 0,
            ..small_config()
        };
        assert!(protocol_run(&set, &none, Parallelism::Sequential).is_err());
        let wrong_dim = ProtocolConfig {
            dim: 3,
            ..small_config()
        };
        assert!(protocol_run(&set, &wrong_dim, Parallelism::Sequential).is_err());
    }

    #[test]
    fn starved_post_selection() {
        let cfg = small_config();
        let shots = vec![ShotRecord {
            index: 0,
            channel: Channel::Position,
            value: None,
        }];
        assert_eq!(
            estimate_from_shots(&cfg, &shots).unwrap_err(),
            Error::PostSelectionStarved
        );
    }

    #[test]
    fn config_json_rejects_unknown_fields() {
        let ok = r#"{"dim":2,"i":0,"j":1,"k":2,"g":0.01,"sigma":1,"shots_x":10,"shots_p":10,"seed":1,
                    "grid":{"x_min":-8,"x_max":8.01,"n":4096}}"#;
        let cfg: ProtocolConfig = serde_json::from_str(ok).unwrap();
        assert_eq!(cfg.position_grid().n, 4096);
        let typo =
            r#"{"dim":2,"i":0,"j":1,"k":2,"g":0.01,"sigma":1,"shots_x":10,"shots_q":10,"seed":1}"#;
        assert!(serde_json::from_str::<ProtocolConfig>(typo).is_err());
    }
}
