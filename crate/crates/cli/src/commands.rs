use std::fs::File;
use std::path::PathBuf;

use clap::Args;
use serde::Serialize;

use weakphase_core::angle::circular_distance;
use weakphase_core::geometry::{
    bargmann as bargmann_invariant, bargmann3, constant_phase_membership, geodesic_triangle_phase,
    is_null_phase, polyline_phase,
};
use weakphase_core::linalg::{expectation, haar_random_ket};
use weakphase_core::pointer::{
    couple_and_postselect, estimate_from_shots, pointer_means, protocol_shots, weak_limit_estimate,
    Channel, Parallelism,
};
use weakphase_core::sic::{
    expansion_coefficients, phase_composition_check, purity_identity_residual,
    triple_phase_census_with_tol, triple_phase_table, ExpansionCoefficients,
};
use weakphase_core::weak::{
    decompose_action, decomposition_ratio, expectation_from_weak_values_with_floor,
    projector_weak_value_with_floor, weak_value_via_decomposition, weak_value_with_floor,
    WeakValueRecord,
};
use weakphase_core::{Complex, Grid, ProtocolConfig, CENSUS_TOL, DEFAULT_OVERLAP_FLOOR};

use crate::{inputs, CliError, Format, SicSelect};

type Out = Result<String, CliError>;

fn json<T: Serialize>(value: &T) -> Out {
    let mut s = serde_json::to_string(value).map_err(|e| CliError::Usage(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn csv_rows<T: Serialize>(rows: impl IntoIterator<Item = T>) -> Out {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Usage(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Usage(e.to_string()))
}

fn pair(z: Complex) -> [f64; 2] {
    [z.re, z.im]
}

fn grid_from(
    x_min: Option<f64>,
    x_max: Option<f64>,
    n: Option<usize>,
) -> Result<Option<Grid>, CliError> {
    match (x_min, x_max, n) {
        (None, None, None) => Ok(None),
        (Some(a), Some(b), Some(n)) => Ok(Some(Grid::new(a, b, n)?)),
        _ => Err(CliError::Usage(
            "--x-min, --x-max and --n must be given together".into(),
        )),
    }
}

// ---------------------------------------------------------------- weak-value

#[derive(Debug, Args)]
pub struct WeakValueArgs {
    /// Pre-selected state: built-in name or JSON ket file.
    #[arg(long)]
    pre: String,
    /// Post-selected state: built-in name or JSON ket file.
    #[arg(long)]
    post: String,
    /// Observable: built-in name (sigmax, sigmay, sigmaz) or JSON operator file.
    #[arg(
        long,
        required_unless_present = "projector",
        conflicts_with = "projector"
    )]
    observable: Option<String>,
    /// Axis of a rank-one projector |ω⟩⟨ω| (name or file); reports Δ3 as well.
    #[arg(long)]
    projector: Option<String>,
    /// Selection probabilities at or below this are treated as orthogonal.
    #[arg(long, default_value_t = DEFAULT_OVERLAP_FLOOR)]
    overlap_floor: f64,
    /// Orthonormal basis (repeat once per state) for the ⟨A⟩ reconstruction from weak values.
    #[arg(long = "basis", requires = "observable")]
    basis: Vec<String>,
    /// Also report the mean/spread decomposition A|pre⟩ = ⟨A⟩|pre⟩ + ΔA|pre⊥⟩.
    #[arg(long, requires = "observable")]
    decompose: bool,
    /// With --projector: test whether arg Δ3 lies within --target-tol of this angle (rad).
    #[arg(long, requires = "projector")]
    target: Option<f64>,
    #[arg(long, default_value_t = 1e-9, requires = "target")]
    target_tol: f64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Serialize)]
struct Decomposition {
    mean: f64,
    spread: f64,
    residual: Option<Vec<[f64; 2]>>,
    ratio: [f64; 2],
    weak_value: [f64; 2],
}

#[derive(Serialize)]
struct Reconstruction {
    expectation: f64,
    from_weak_values: f64,
}

#[derive(Serialize)]
struct WeakValueOut {
    #[serde(flatten)]
    record: WeakValueRecord,
    #[serde(skip_serializing_if = "Option::is_none")]
    reconstruction: Option<Reconstruction>,
    #[serde(skip_serializing_if = "Option::is_none")]
    decomposition: Option<Decomposition>,
    #[serde(skip_serializing_if = "Option::is_none")]
    on_constant_phase_curve: Option<bool>,
}

#[derive(Serialize)]
struct WeakValueRow {
    re: f64,
    im: f64,
    modulus: f64,
    argument: f64,
    postselect_prob: f64,
}

pub fn weak_value(a: WeakValueArgs) -> Out {
    let pre = inputs::ket(&a.pre)?;
    let post = inputs::ket(&a.post)?;
    let mut out = WeakValueOut {
        record: WeakValueRecord {
            re: 0.0,
            im: 0.0,
            modulus: 0.0,
            argument: 0.0,
            postselect_prob: 0.0,
            bargmann3: None,
        },
        reconstruction: None,
        decomposition: None,
        on_constant_phase_curve: None,
    };
    if let Some(name) = &a.projector {
        let omega = inputs::ket(name)?;
        out.record =
            projector_weak_value_with_floor(&omega, &pre, &post, a.overlap_floor)?.to_record();
        if let Some(target) = a.target {
            out.on_constant_phase_curve = Some(constant_phase_membership(
                &pre,
                &post,
                &omega,
                target,
                a.target_tol,
            )?);
        }
    } else if let Some(name) = &a.observable {
        let op = inputs::observable(name)?;
        out.record = weak_value_with_floor(&op, &pre, &post, a.overlap_floor)?.to_record();
        if !a.basis.is_empty() {
            let basis = a
                .basis
                .iter()
                .map(|b| inputs::ket(b))
                .collect::<Result<Vec<_>, _>>()?;
            out.reconstruction = Some(Reconstruction {
                expectation: expectation(&op, &pre)?,
                from_weak_values: expectation_from_weak_values_with_floor(
                    &op,
                    &pre,
                    &basis,
                    a.overlap_floor,
                )?,
            });
        }
        if a.decompose {
            let dec = decompose_action(&op, &pre)?;
            out.decomposition = Some(Decomposition {
                mean: dec.mean,
                spread: dec.spread,
                residual: dec
                    .residual
                    .as_ref()
                    .map(|r| r.amplitudes().iter().copied().map(pair).collect()),
                ratio: pair(decomposition_ratio(&op, &pre, &post)?),
                weak_value: pair(weak_value_via_decomposition(&op, &pre, &post)?),
            });
        }
    }
    match a.format {
        Format::Json => json(&out),
        Format::Csv => {
            let r = &out.record;
            csv_rows([WeakValueRow {
                re: r.re,
                im: r.im,
                modulus: r.modulus,
                argument: r.argument,
                postselect_prob: r.postselect_prob,
            }])
        }
    }
}

// ---------------------------------------------------------------- bargmann

#[derive(Debug, Args)]
pub struct BargmannArgs {
    /// States in cyclic order (repeat the flag, at least two).
    #[arg(long = "state", required = true, num_args = 1)]
    states: Vec<String>,
    /// For three states: report whether |arg Δ3| is within this tolerance of 0.
    #[arg(long)]
    null_tol: Option<f64>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Serialize)]
struct BargmannOut {
    order: usize,
    re: f64,
    im: f64,
    modulus: f64,
    argument: f64,
    degenerate: bool,
    polyline_phase: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    null_phase: Option<bool>,
}

pub fn bargmann(a: BargmannArgs) -> Out {
    let states = a
        .states
        .iter()
        .map(|s| inputs::ket(s))
        .collect::<Result<Vec<_>, _>>()?;
    let b = bargmann_invariant(&states)?;
    let null_phase = match a.null_tol {
        Some(tol) if states.len() == 3 => {
            Some(is_null_phase(&states[0], &states[1], &states[2], tol)?)
        }
        Some(_) => {
            return Err(CliError::Usage(
                "--null-tol needs exactly three states".into(),
            ))
        }
        None => None,
    };
    let out = BargmannOut {
        order: b.order,
        re: b.value.re,
        im: b.value.im,
        modulus: b.value.norm(),
        argument: b.argument,
        degenerate: b.degenerate,
        polyline_phase: if b.degenerate {
            None
        } else {
            Some(polyline_phase(&states)?)
        },
        null_phase,
    };
    match a.format {
        Format::Json => json(&out),
        Format::Csv => csv_rows([(
            out.order,
            out.re,
            out.im,
            out.modulus,
            out.argument,
            out.degenerate,
        )])
        .map(|body| format!("order,re,im,modulus,argument,degenerate\n{body}")),
    }
}

// ---------------------------------------------------------------- triangle-phase

#[derive(Debug, Args)]
pub struct TriangleArgs {
    #[arg(long)]
    a: String,
    #[arg(long)]
    b: String,
    #[arg(long)]
    c: String,
    /// Geodesic samples per side.
    #[arg(long, default_value_t = 4096)]
    n: usize,
    /// Report every n on the doubling ladder 8, 16, …, up to --n.
    #[arg(long)]
    ladder: bool,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Serialize)]
struct LadderRow {
    n: usize,
    geodesic_phase: f64,
    deviation: f64,
}

#[derive(Serialize)]
struct TriangleOut {
    n: usize,
    geodesic_phase: f64,
    arg_delta3: f64,
    deviation: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    ladder: Option<Vec<LadderRow>>,
}

pub fn triangle_phase(a: TriangleArgs) -> Out {
    let (ka, kb, kc) = (inputs::ket(&a.a)?, inputs::ket(&a.b)?, inputs::ket(&a.c)?);
    let arg_delta3 = bargmann3(&ka, &kb, &kc)?.arg();
    let row = |n: usize| -> Result<LadderRow, CliError> {
        let phase = geodesic_triangle_phase(&ka, &kb, &kc, n)?;
        Ok(LadderRow {
            n,
            geodesic_phase: phase,
            deviation: circular_distance(phase, -arg_delta3),
        })
    };
    let top = row(a.n)?;
    let ladder = if a.ladder {
        let mut rows = Vec::new();
        let mut n = 8;
        while n < a.n {
            rows.push(row(n)?);
            n *= 2;
        }
        rows.push(row(a.n)?);
        Some(rows)
    } else {
        None
    };
    match a.format {
        Format::Json => json(&TriangleOut {
            n: top.n,
            geodesic_phase: top.geodesic_phase,
            arg_delta3,
            deviation: top.deviation,
            ladder,
        }),
        Format::Csv => csv_rows(ladder.unwrap_or_else(|| vec![top])),
    }
}

// ---------------------------------------------------------------- sic-generate

#[derive(Debug, Args)]
pub struct SicGenerateArgs {
    #[command(flatten)]
    sic: SicSelect,
    /// json: the states and checks; csv: the triple-phase table.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Serialize)]
struct SicOut {
    dim: usize,
    source: &'static str,
    count: usize,
    equiangularity_deviation: f64,
    identity_deviation: f64,
    composition_quadruples: usize,
    composition_max_deviation: f64,
    states: Vec<Vec<[f64; 2]>>,
}

#[derive(Serialize)]
struct TripleRow {
    i: usize,
    j: usize,
    k: usize,
    re: f64,
    im: f64,
    modulus: f64,
    arg_rad: f64,
    arg_deg: f64,
}

pub fn sic_generate(a: SicGenerateArgs) -> Out {
    let set = inputs::sic(&a.sic)?;
    match a.format {
        Format::Json => {
            let comp = phase_composition_check(&set);
            json(&SicOut {
                dim: set.dim(),
                source: set.source().as_str(),
                count: set.len(),
                equiangularity_deviation: set.equiangularity_deviation(),
                identity_deviation: set.identity_deviation(),
                composition_quadruples: comp.quadruples,
                composition_max_deviation: comp.max_deviation,
                states: set
                    .states()
                    .iter()
                    .map(|s| s.amplitudes().iter().copied().map(pair).collect())
                    .collect(),
            })
        }
        Format::Csv => {
            // weak value of Π_j between ψ_i and ψ_k: modulus 1/√(d+1), argument θ_ijk
            let table = triple_phase_table(&set);
            let modulus = (set.dim() as f64 + 1.0).sqrt().recip();
            csv_rows(table.canonical().iter().map(|&(i, j, k, theta)| {
                let z = Complex::from_polar(modulus, theta);
                TripleRow {
                    i,
                    j,
                    k,
                    re: z.re,
                    im: z.im,
                    modulus,
                    arg_rad: theta,
                    arg_deg: theta.to_degrees(),
                }
            }))
        }
    }
}

// ---------------------------------------------------------------- sic-census

#[derive(Debug, Args)]
pub struct SicCensusArgs {
    #[command(flatten)]
    sic: SicSelect,
    /// Clustering tolerance on cos θ.
    #[arg(long, default_value_t = CENSUS_TOL)]
    census_tol: f64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Serialize)]
struct CensusRow {
    theta_rad: f64,
    cos_theta: f64,
    multiplicity: usize,
}

#[derive(Serialize)]
struct CensusOut {
    dim: usize,
    triples: usize,
    tolerance: f64,
    clusters: Vec<CensusRow>,
}

pub fn sic_census(a: SicCensusArgs) -> Out {
    if !(a.census_tol > 0.0 && a.census_tol.is_finite()) {
        return Err(CliError::Usage(format!(
            "--census-tol must be positive, got {}",
            a.census_tol
        )));
    }
    let set = inputs::sic(&a.sic)?;
    let rows: Vec<CensusRow> = triple_phase_census_with_tol(&set, a.census_tol)
        .into_iter()
        .map(|e| CensusRow {
            theta_rad: e.theta,
            cos_theta: e.cos_theta,
            multiplicity: e.multiplicity,
        })
        .collect();
    match a.format {
        Format::Csv => csv_rows(rows),
        Format::Json => json(&CensusOut {
            dim: set.dim(),
            triples: rows.iter().map(|r| r.multiplicity).sum(),
            tolerance: a.census_tol,
            clusters: rows,
        }),
    }
}

// ---------------------------------------------------------------- sic-purity

#[derive(Debug, Args)]
pub struct SicPurityArgs {
    #[command(flatten)]
    sic: SicSelect,
    /// State to expand (name or file); a Haar-random state from --seed otherwise.
    #[arg(long, conflicts_with = "seed")]
    state: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Mix the state with the maximally mixed state: ρ = (1−w)|ψ⟩⟨ψ| + w·I/d.
    #[arg(long, default_value_t = 0.0)]
    mix: f64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Serialize)]
struct PurityOut {
    dim: usize,
    mix: f64,
    residual: f64,
    probabilities: Vec<f64>,
    lambdas: Vec<f64>,
}

#[derive(Serialize)]
struct PurityRow {
    index: usize,
    probability: f64,
    lambda: f64,
}

pub fn sic_purity(a: SicPurityArgs) -> Out {
    if !(0.0..=1.0).contains(&a.mix) {
        return Err(CliError::Usage(format!(
            "--mix must lie in [0, 1], got {}",
            a.mix
        )));
    }
    let set = inputs::sic(&a.sic)?;
    let d = set.dim();
    let psi = match &a.state {
        Some(s) => inputs::ket(s)?,
        None => haar_random_ket(d, a.seed)?,
    };
    let pure = expansion_coefficients(&psi, &set)?;
    let df = d as f64;
    let probs = pure
        .probabilities
        .iter()
        .map(|p| (1.0 - a.mix) * p + a.mix / (df * df))
        .collect();
    let coeffs = ExpansionCoefficients::from_probabilities(probs, d);
    let residual = purity_identity_residual(&coeffs, &triple_phase_table(&set), d)?;
    match a.format {
        Format::Json => json(&PurityOut {
            dim: d,
            mix: a.mix,
            residual,
            probabilities: coeffs.probabilities,
            lambdas: coeffs.lambdas,
        }),
        Format::Csv => csv_rows(
            coeffs
                .probabilities
                .iter()
                .zip(&coeffs.lambdas)
                .enumerate()
                .map(|(index, (p, l))| PurityRow {
                    index,
                    probability: *p,
                    lambda: *l,
                }),
        ),
    }
}

// ---------------------------------------------------------------- pointer

#[derive(Debug, Args)]
pub struct PointerArgs {
    /// Axis of the coupled projector (name or file).
    #[arg(long)]
    projector: String,
    #[arg(long)]
    pre: String,
    #[arg(long)]
    post: String,
    /// Coupling strength (pointer displacement).
    #[arg(long)]
    g: f64,
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    #[arg(long, allow_hyphen_values = true)]
    x_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    x_max: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
    /// Use the first-order estimator, which requires 0 < g ≤ 0.05σ.
    #[arg(long)]
    weak_limit: bool,
    /// json: summary; csv: x and |φ_f(x)|² on the grid.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Serialize)]
struct PointerOut {
    g: f64,
    sigma: f64,
    grid: Grid,
    norm_sq: f64,
    c0: [f64; 2],
    c1: [f64; 2],
    mean_x: f64,
    mean_p: f64,
    re_estimate: Option<f64>,
    im_estimate: Option<f64>,
}

#[derive(Serialize)]
struct DensityRow {
    x: f64,
    density: f64,
}

pub fn pointer(a: PointerArgs) -> Out {
    let (om, pre, post) = (
        inputs::ket(&a.projector)?,
        inputs::ket(&a.pre)?,
        inputs::ket(&a.post)?,
    );
    let grid = grid_from(a.x_min, a.x_max, a.n)?.unwrap_or_else(|| Grid::default_for(a.sigma, a.g));
    let state = couple_and_postselect(&om, &pre, &post, a.g, a.sigma, &grid)?;
    let (mean_x, mean_p) = pointer_means(&state);
    let (re_estimate, im_estimate) = if a.weak_limit {
        let (re, im) = weak_limit_estimate(&om, &pre, &post, a.sigma, a.g)?;
        (Some(re), Some(im))
    } else if a.g > 0.0 {
        (
            Some(mean_x / a.g),
            Some(2.0 * a.sigma * a.sigma * mean_p / a.g),
        )
    } else {
        (None, None)
    };
    match a.format {
        Format::Json => json(&PointerOut {
            g: a.g,
            sigma: a.sigma,
            grid,
            norm_sq: state.norm_sq,
            c0: pair(state.weights.0),
            c1: pair(state.weights.1),
            mean_x,
            mean_p,
            re_estimate,
            im_estimate,
        }),
        Format::Csv => csv_rows(
            grid.points()
                .zip(state.density())
                .map(|(x, density)| DensityRow { x, density }),
        ),
    }
}

// ---------------------------------------------------------------- protocol

#[derive(Debug, Args)]
pub struct ProtocolArgs {
    /// JSON config {dim, i, j, k, g, sigma, shots_x, shots_p, seed, grid?}; excludes the flags below.
    #[arg(long, conflicts_with_all = ["dim", "i", "j", "k", "g", "sigma", "shots_x", "shots_p", "seed", "x_min", "x_max", "n"])]
    config: Option<PathBuf>,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    i: Option<usize>,
    #[arg(long)]
    j: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    g: Option<f64>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    shots_x: Option<u64>,
    #[arg(long)]
    shots_p: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, allow_hyphen_values = true)]
    x_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    x_max: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
    /// Build the SIC set from this fiducial instead of the built-in one.
    #[arg(long)]
    fiducial: Option<PathBuf>,
    /// Worker threads (1 = sequential). Output does not depend on this.
    #[arg(long)]
    threads: Option<usize>,
    /// Write every shot to this CSV file (index, channel, accepted, value).
    #[arg(long)]
    dump_shots: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Serialize)]
struct ShotRow {
    index: u64,
    channel: &'static str,
    accepted: bool,
    value: Option<f64>,
}

fn protocol_config(a: &ProtocolArgs) -> Result<ProtocolConfig, CliError> {
    if let Some(path) = &a.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
        return serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())));
    }
    let mut missing = Vec::new();
    macro_rules! need {
        ($field:ident, $flag:literal) => {
            a.$field.unwrap_or_else(|| {
                missing.push($flag);
                Default::default()
            })
        };
    }
    let cfg = ProtocolConfig {
        dim: need!(dim, "--dim"),
        i: need!(i, "--i"),
        j: need!(j, "--j"),
        k: need!(k, "--k"),
        g: need!(g, "--g"),
        sigma: need!(sigma, "--sigma"),
        shots_x: need!(shots_x, "--shots-x"),
        shots_p: need!(shots_p, "--shots-p"),
        seed: need!(seed, "--seed"),
        grid: grid_from(a.x_min, a.x_max, a.n)?,
    };
    if !missing.is_empty() {
        return Err(CliError::Usage(format!(
            "missing {} (or pass --config)",
            missing.join(", ")
        )));
    }
    Ok(cfg)
}

pub fn protocol(a: ProtocolArgs) -> Out {
    let cfg = protocol_config(&a)?;
    let set = inputs::sic(&SicSelect {
        dim: if a.fiducial.is_some() {
            None
        } else {
            Some(cfg.dim)
        },
        fiducial: a.fiducial.clone(),
    })?;
    let parallelism = match a.threads {
        None => Parallelism::Global,
        Some(0) => return Err(CliError::Usage("--threads must be at least 1".into())),
        Some(1) => Parallelism::Sequential,
        Some(n) => Parallelism::Threads(n),
    };
    let shots = protocol_shots(&set, &cfg, parallelism)?;
    if let Some(path) = &a.dump_shots {
        let file = File::create(path)
            .map_err(|e| CliError::Usage(format!("cannot create {}: {e}", path.display())))?;
        let mut w = csv::Writer::from_writer(file);
        for s in &shots {
            w.serialize(ShotRow {
                index: s.index,
                channel: match s.channel {
                    Channel::Position => "position",
                    Channel::Momentum => "momentum",
                },
                accepted: s.value.is_some(),
                value: s.value,
            })
            .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        }
        w.flush()
            .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    }
    let est = estimate_from_shots(&cfg, &shots)?;
    match a.format {
        Format::Json => json(&est),
        Format::Csv => csv_rows([est]),
    }
}
