//! Command-line front end: parse channel/distribution files, dispatch the
//! region, bound, inclusion, identity, and covering computations, and emit
//! reproducible CSV/JSON artifacts.

pub mod artifacts;
pub mod files;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use rrlab_core::bounds::{
    default_input_search, dirichlet_inputs, grid_product_inputs, verify_theorem3,
};
use rrlab_core::channel::ChannelSpec;
use rrlab_core::corollaries::{check_inclusion, identity_suite, sample_pcrbc_feasible};
use rrlab_core::covering::{covering_experiment, CoveringMode, CoveringOptions};
use rrlab_core::error::{Error, Result};
use rrlab_core::factored::{sample_factored, Scheme};
use rrlab_core::fme::InequalitySystem;
use rrlab_core::geometry::{union_hull, RatePolytope, TOL_GEO};
use rrlab_core::region::{mode_polytope, project_single, Mode, RegionOptions};

use artifacts::{write_covering_csv, write_json, write_vertices_csv, Meta};
use files::{read_json, ChannelFile, DistributionFile, SystemFile};

#[derive(Parser, Debug)]
#[command(name = "rrlab", version, about = "Rate-region computations for cooperative cognitive interference channels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute a mode's rate region over sampled or supplied distributions.
    Region(RegionArgs),
    /// Evaluate the outer bound over an input-distribution search.
    Outer(OuterArgs),
    /// Verify the capacity result on a degraded Z channel.
    CapacityZ(CapacityArgs),
    /// Run a corollary's inclusion harness.
    CheckInclusion(InclusionArgs),
    /// Run the identity suite behind the inclusion proofs.
    Identities(IdentityArgs),
    /// Monte Carlo covering-lemma experiment.
    SimulateCovering(CoveringArgs),
    /// Project a standalone inequality system.
    Fme(FmeArgs),
}

#[derive(Args, Debug, Serialize)]
struct RegionArgs {
    /// theorem1 | pre_elim | outer | corollary1 | rsub | rsub_rewritten | chu | pcrbc | bross
    #[arg(long)]
    mode: String,
    #[arg(long)]
    channel: PathBuf,
    /// Explicit distribution file (mutually exclusive with --sample).
    #[arg(long)]
    dist: Option<PathBuf>,
    /// Number of sampled distributions.
    #[arg(long, default_value_t = 100)]
    sample: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Cardinality override for every auxiliary variable.
    #[arg(long)]
    aux_cards: Option<usize>,
    /// Per-variable cardinality override, e.g. --card Yh2=1 (repeatable).
    #[arg(long = "card")]
    cards: Vec<String>,
    /// Keep the relay codebook exponent distinct from the quantization rate.
    #[arg(long, default_value_t = false)]
    separate_x3_rate: bool,
    #[serde(skip)]
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
struct OuterArgs {
    #[arg(long)]
    channel: PathBuf,
    /// Product-form grid resolution (steps per axis).
    #[arg(long, default_value_t = 8)]
    grid: usize,
    /// Number of Dirichlet-sampled full input joints.
    #[arg(long, default_value_t = 200)]
    joints: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[serde(skip)]
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
struct CapacityArgs {
    /// Z-channel file (w2 + w1 form).
    #[arg(long)]
    channel: PathBuf,
    #[arg(long, default_value_t = 16)]
    grid: usize,
    #[arg(long, default_value_t = 100)]
    joints: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Coincidence tolerance in bits.
    #[arg(long, default_value_t = TOL_GEO)]
    tol: f64,
    #[serde(skip)]
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
struct InclusionArgs {
    #[arg(long)]
    corollary: u8,
    #[arg(long)]
    channel: PathBuf,
    #[arg(long, default_value_t = 20)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[serde(skip)]
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
struct IdentityArgs {
    /// rsub | pcrbc
    #[arg(long)]
    scheme: String,
    #[arg(long)]
    channel: PathBuf,
    #[arg(long, default_value_t = 100)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// For the pcrbc scheme, restrict to quantizers satisfying the shrink
    /// chain's feasibility precondition.
    #[arg(long, default_value_t = false)]
    feasible_only: bool,
    #[serde(skip)]
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
struct CoveringArgs {
    /// gp | marton
    #[arg(long)]
    mode: String,
    #[arg(long)]
    channel: PathBuf,
    /// Distribution file; omitted means one sampled distribution.
    #[arg(long)]
    dist: Option<PathBuf>,
    #[arg(long)]
    n: usize,
    /// Comma-separated rate offsets in bits relative to the threshold.
    #[arg(long, value_delimiter = ',', default_values_t = vec![-0.15, 0.15])]
    offsets: Vec<f64>,
    #[arg(long, default_value_t = 200)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,
    /// Rate of the first pair dimension (marton mode only).
    #[arg(long, default_value_t = 0.0)]
    marton_r1b: f64,
    #[serde(skip)]
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
struct FmeArgs {
    /// System file with vars, rows, and either an eliminate list or rate
    /// definitions r1/r2 for projection.
    #[arg(long)]
    system: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[serde(skip)]
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

fn configure_threads() {
    if let Ok(v) = std::env::var("RRLAB_THREADS") {
        if let Ok(n) = v.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
        }
    }
}

/// Parses `argv` and runs the requested computation created artifacts are
/// written under the subcommand's `--out` directory. Returns the process
/// exit code: 0 on success, 2 on validation failure.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    configure_threads();
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // Help/version requests are not errors.
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            println!(
                "{}",
                serde_json::json!({"error": {"kind": "UnknownSubcommand", "message": e.to_string()}})
            );
            return 2;
        }
    };
    let outcome = match cli.command {
        Command::Region(args) => cmd_region(args),
        Command::Outer(args) => cmd_outer(args),
        Command::CapacityZ(args) => cmd_capacity(args),
        Command::CheckInclusion(args) => cmd_inclusion(args),
        Command::Identities(args) => cmd_identities(args),
        Command::SimulateCovering(args) => cmd_covering(args),
        Command::Fme(args) => cmd_fme(args),
    };
    match outcome {
        Ok(()) => 0,
        Err(e) => {
            println!(
                "{}",
                serde_json::json!({"error": {"kind": e.kind(), "message": e.to_string()}})
            );
            2
        }
    }
}

fn load_channel(path: &Path) -> Result<ChannelSpec> {
    read_json::<ChannelFile>(path)?.into_channel()
}

fn ensure_out(dir: &PathBuf) -> Result<()> {
    std::fs::create_dir_all(dir)
        .map_err(|e| Error::InvalidInput(format!("cannot create {}: {e}", dir.display())))
}

fn apply_card_overrides(
    cards: &mut BTreeMap<String, usize>,
    aux_cards: Option<usize>,
    overrides: &[String],
    scheme: Scheme,
) -> Result<()> {
    if let Some(a) = aux_cards {
        for v in scheme.aux_vars() {
            cards.insert(v.to_string(), a);
        }
    }
    for spec in overrides {
        let (var, value) = spec
            .split_once('=')
            .ok_or_else(|| Error::InvalidInput(format!("expected VAR=N, got `{spec}`")))?;
        let value: usize = value
            .parse()
            .map_err(|_| Error::InvalidInput(format!("bad cardinality in `{spec}`")))?;
        if !cards.contains_key(var) {
            return Err(Error::UnknownVariable(var.to_string()));
        }
        cards.insert(var.to_string(), value);
    }
    Ok(())
}

#[derive(Serialize)]
struct RegionReport {
    mode: Mode,
    hull: RatePolytope,
    samples: Vec<RegionSample>,
}

#[derive(Serialize)]
struct RegionSample {
    index: usize,
    seed: u64,
    polytope: RatePolytope,
}

fn cmd_region(args: RegionArgs) -> Result<()> {
    ensure_out(&args.out)?;
    let meta = Meta::new(&args, args.seed);
    let mode = Mode::parse(&args.mode)?;
    let ch = load_channel(&args.channel)?;
    let opts = RegionOptions { separate_x3_rate: args.separate_x3_rate };

    let (hull, samples) = if let Some(dist_path) = &args.dist {
        let fd = read_json::<DistributionFile>(dist_path)?.into_distribution()?;
        if fd.scheme != mode.scheme() {
            return Err(Error::ModeSchemeMismatch {
                expected: mode.scheme().name().to_string(),
                got: fd.scheme.name().to_string(),
            });
        }
        let joint = fd.assemble_joint(&ch)?;
        let poly = mode_polytope(&joint, mode, &opts)?;
        (poly.clone(), vec![RegionSample { index: 0, seed: args.seed, polytope: poly }])
    } else {
        let mut cards = mode.scheme().default_cards(&ch);
        apply_card_overrides(&mut cards, args.aux_cards, &args.cards, mode.scheme())?;
        let fds = sample_factored(mode.scheme(), &cards, args.sample, args.seed);
        let mut per = Vec::with_capacity(fds.len());
        for (index, fd) in fds.iter().enumerate() {
            let joint = fd.assemble_joint(&ch)?;
            let polytope = mode_polytope(&joint, mode, &opts)?;
            per.push(RegionSample { index, seed: args.seed, polytope });
        }
        let nonempty: Vec<RatePolytope> = per
            .iter()
            .map(|s| s.polytope.clone())
            .filter(|p| !p.is_empty())
            .collect();
        let hull =
            if nonempty.is_empty() { RatePolytope::empty() } else { union_hull(&nonempty) };
        (hull, per)
    };

    write_vertices_csv(&args.out, "region_vertices.csv", &meta, &hull)?;
    write_json(&args.out, "region.json", &meta, &RegionReport { mode, hull, samples })?;
    Ok(())
}

#[derive(Serialize)]
struct OuterReport {
    hull: RatePolytope,
    inputs_evaluated: usize,
}

fn cmd_outer(args: OuterArgs) -> Result<()> {
    ensure_out(&args.out)?;
    let meta = Meta::new(&args, args.seed);
    let ch = load_channel(&args.channel)?;
    let inputs = default_input_search(&ch, args.grid, args.joints, args.seed);
    let hull = rrlab_core::bounds::outer_bound_region(&ch, &inputs)?;
    write_vertices_csv(&args.out, "outer_vertices.csv", &meta, &hull)?;
    write_json(
        &args.out,
        "outer.json",
        &meta,
        &OuterReport { hull, inputs_evaluated: inputs.len() },
    )?;
    Ok(())
}

fn cmd_capacity(args: CapacityArgs) -> Result<()> {
    ensure_out(&args.out)?;
    let meta = Meta::new(&args, args.seed);
    let z = read_json::<ChannelFile>(&args.channel)?.into_z_channel()?;
    let ch = z.lift_z_channel()?;
    let mut inputs = grid_product_inputs(&ch, args.grid);
    inputs.extend(dirichlet_inputs(&ch, args.joints, args.seed));
    let report = verify_theorem3(&z, &inputs, args.tol)?;
    write_vertices_csv(&args.out, "inner.csv", &meta, &report.overall_inner)?;
    write_vertices_csv(&args.out, "outer.csv", &meta, &report.overall_outer)?;
    write_json(&args.out, "capacity_report.json", &meta, &report)?;
    Ok(())
}

fn cmd_inclusion(args: InclusionArgs) -> Result<()> {
    ensure_out(&args.out)?;
    let meta = Meta::new(&args, args.seed);
    let ch = load_channel(&args.channel)?;
    let report = check_inclusion(args.corollary, &ch, args.samples, args.seed)?;
    write_json(&args.out, "inclusion_report.json", &meta, &report)?;
    Ok(())
}

#[derive(Serialize)]
struct IdentitiesReport {
    scheme: Scheme,
    samples: usize,
    reports: Vec<rrlab_core::corollaries::IdentityReport>,
    pass: bool,
}

fn cmd_identities(args: IdentityArgs) -> Result<()> {
    ensure_out(&args.out)?;
    let meta = Meta::new(&args, args.seed);
    let ch = load_channel(&args.channel)?;
    let scheme = Scheme::parse(&args.scheme)?;
    let cards = scheme.default_cards(&ch);
    let fds = if args.feasible_only && scheme == Scheme::Pcrbc {
        sample_pcrbc_feasible(&ch, &cards, args.samples, args.seed)?
    } else {
        sample_factored(scheme, &cards, args.samples, args.seed)
    };
    let mut reports = Vec::with_capacity(fds.len());
    for fd in &fds {
        let joint = fd.assemble_joint(&ch)?;
        reports.push(identity_suite(&joint, scheme)?);
    }
    let pass = reports.iter().all(|r| r.pass);
    write_json(
        &args.out,
        "identities.json",
        &meta,
        &IdentitiesReport { scheme, samples: fds.len(), reports, pass },
    )?;
    Ok(())
}

fn cmd_covering(args: CoveringArgs) -> Result<()> {
    ensure_out(&args.out)?;
    let meta = Meta::new(&args, args.seed);
    let ch = load_channel(&args.channel)?;
    let mode = CoveringMode::parse(&args.mode)?;
    let fd = if let Some(path) = &args.dist {
        read_json::<DistributionFile>(path)?.into_distribution()?
    } else {
        let cards = Scheme::Theorem1.default_cards(&ch);
        sample_factored(Scheme::Theorem1, &cards, 1, args.seed).pop().expect("one sample")
    };
    let opts = CoveringOptions {
        epsilon: args.epsilon,
        marton_r1b: args.marton_r1b,
        ..Default::default()
    };
    let results =
        covering_experiment(mode, &fd, &ch, args.n, &args.offsets, args.trials, args.seed, &opts)?;
    write_covering_csv(&args.out, "covering.csv", &meta, &results)?;
    #[derive(Serialize)]
    struct CoveringReport {
        results: Vec<rrlab_core::covering::CoveringResult>,
    }
    write_json(&args.out, "covering.json", &meta, &CoveringReport { results })?;
    Ok(())
}

#[derive(Serialize)]
struct FmeReport {
    eliminated: Vec<String>,
    system: InequalitySystem,
    projected: Option<RatePolytope>,
}

fn cmd_fme(args: FmeArgs) -> Result<()> {
    ensure_out(&args.out)?;
    let meta = Meta::new(&args, args.seed);
    let file: SystemFile = read_json(&args.system)?;
    let mut sys = file.into_system()?;
    let mut eliminated = Vec::new();
    for var in &file.eliminate {
        sys = sys.fme_eliminate(var)?;
        eliminated.push(var.clone());
    }
    let projected = if !file.r1.is_empty() && !file.r2.is_empty() {
        let r1: Vec<&str> = file.r1.iter().map(String::as_str).collect();
        let r2: Vec<&str> = file.r2.iter().map(String::as_str).collect();
        let poly = project_single(&sys, &r1, &r2)?;
        write_vertices_csv(&args.out, "fme_vertices.csv", &meta, &poly)?;
        Some(poly)
    } else {
        None
    };
    write_json(&args.out, "fme.json", &meta, &FmeReport { eliminated, system: sys, projected })?;
    Ok(())
}
