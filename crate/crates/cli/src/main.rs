//! `spotlights` command-line tool. Data goes to stdout or `--out` files, logs
//! to stderr. Exit codes: 2 I/O, 3 geometry or validation, 4 empty cloud.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use log::{info, warn};

use spotlights_core::density::{density_profile, QuadratureResolution};
use spotlights_core::io;
use spotlights_core::metrics::{self, MetricKind, Norm};
use spotlights_core::scan::{scan, ScanParams};
use spotlights_core::sweep::{self, SweepConfig};
use spotlights_core::{build_model, decode, decode_world, encode, encode_object, hit_ratio, Error, Vec3};

#[derive(Parser)]
#[command(name = "spotlights", version, about = "Encode meshes as Spotlights depth arrays and evaluate point clouds")]
struct Cli {
    /// Only log warnings and errors.
    #[arg(short, long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Cast the ray arrangement against a mesh and write an SPL file.
    Encode(EncodeArgs),
    /// Turn an SPL file back into an ordered point cloud.
    Decode(DecodeArgs),
    /// Compare a predicted cloud against a ground-truth cloud.
    Eval(EvalArgs),
    /// Mean pairwise Chamfer distance over a set of clouds.
    Consistency(ConsistencyArgs),
    /// Completeness and hit ratio over ray budgets and opening angles.
    Sweep(SweepArgs),
    /// Tabulate the free-space ray density inside the sphere.
    Density(DensityArgs),
    /// Render a partial cloud from a single pinhole viewpoint.
    Scan(ScanArgs),
}

#[derive(Args)]
struct EncodeArgs {
    #[arg(long)]
    mesh: PathBuf,
    #[arg(long, default_value_t = 32)]
    primary: u32,
    #[arg(long, default_value_t = 64)]
    secondary: u32,
    /// Opening angle in degrees.
    #[arg(long, default_value_t = 60.0)]
    angle: f64,
    #[arg(long)]
    out: PathBuf,
    /// The mesh is already inside the unit ball; skip the bounding-sphere fit.
    #[arg(long)]
    no_normalize: bool,
}

#[derive(Args)]
struct DecodeArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = spotlights_core::DEFAULT_CLIP)]
    clip: f32,
    /// Emit points in the mesh's original coordinates instead of the unit frame.
    #[arg(long)]
    world_frame: bool,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    pred: PathBuf,
    #[arg(long)]
    gt: PathBuf,
    #[arg(long, default_value = "chamfer")]
    metric: MetricKind,
    /// Defaults to l1 for accuracy and l2 otherwise.
    #[arg(long)]
    norm: Option<Norm>,
    /// Print a JSON object instead of a CSV row.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct ConsistencyArgs {
    /// Pattern such as 'obj_*.ply'.
    #[arg(long)]
    glob: String,
    #[arg(long, default_value = "l2")]
    norm: Norm,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    mesh_dir: PathBuf,
    #[arg(long, value_delimiter = ',', default_values_t = vec![2048u32, 4096, 8192])]
    rays: Vec<u32>,
    #[arg(long, value_delimiter = ',', default_values_t = vec![30.0, 60.0, 83.0])]
    angles: Vec<f64>,
    #[arg(long, default_value_t = 64)]
    secondary: u32,
    #[arg(long, default_value_t = 16384)]
    gt_points: usize,
    #[arg(long, default_value_t = 2022)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct DensityArgs {
    /// r steps x alpha steps.
    #[arg(long, default_value = "41x41")]
    grid: Pair<usize>,
    #[arg(long, default_value_t = 0.8)]
    rmax: f64,
    /// Quadrature cells, theta x phi.
    #[arg(long, default_value = "512x1024")]
    resolution: Pair<usize>,
    /// Monte-Carlo column as N,M,SEED; cells with r above 0.6 are left empty.
    #[arg(long)]
    monte_carlo: Option<String>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ScanArgs {
    #[arg(long)]
    mesh: PathBuf,
    /// Camera position as X,Y,Z.
    #[arg(long, allow_hyphen_values = true)]
    viewpoint: String,
    /// Vertical field of view in degrees.
    #[arg(long, default_value_t = 45.0)]
    fov: f64,
    #[arg(long, default_value = "128x128")]
    res: Pair<u32>,
    #[arg(long)]
    out: PathBuf,
}

/// `AxB` pairs such as grid sizes and resolutions.
#[derive(Debug, Clone, Copy)]
struct Pair<T>(T, T);

impl<T: FromStr> FromStr for Pair<T> {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (a, b) = s.split_once(['x', 'X']).ok_or_else(|| format!("expected AxB, got {s:?}"))?;
        let parse = |v: &str| v.trim().parse().map_err(|_| format!("bad number {v:?} in {s:?}"));
        Ok(Pair(parse(a)?, parse(b)?))
    }
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn io(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }

    fn invalid(message: impl Into<String>) -> Self {
        Failure {
            code: 3,
            message: message.into(),
        }
    }

    fn empty(message: impl Into<String>) -> Self {
        Failure {
            code: 4,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            _ if e.is_io() => 2,
            Error::UndefinedMetric(_) => 4,
            _ => 3,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::io(e.to_string())
    }
}

type CmdResult = Result<(), Failure>;

/// Names the file in bare I/O errors; parse errors already carry it.
fn at<T>(path: &Path, r: Result<T, Error>) -> Result<T, Failure> {
    r.map_err(|e| match e {
        Error::Io(io) => Failure::io(format!("{}: {io}", path.display())),
        other => other.into(),
    })
}

fn create(path: &Path) -> Result<BufWriter<fs::File>, Failure> {
    fs::File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Failure::io(format!("{}: {e}", path.display())))
}

fn cmd_encode(a: EncodeArgs) -> CmdResult {
    let mesh = at(&a.mesh, io::load_mesh(&a.mesh))?;
    if mesh.dropped_degenerate() > 0 {
        warn!("dropped {} degenerate triangles", mesh.dropped_degenerate());
    }
    let model = build_model(a.primary, a.secondary, a.angle.to_radians())?;
    let start = Instant::now();
    let depths = if a.no_normalize {
        encode(&model, &mesh)?
    } else {
        encode_object(&model, &mesh)?
    };
    let elapsed = start.elapsed();
    at(&a.out, io::write_spl(&a.out, &model.descriptor(), &depths))?;
    info!(
        "{} rays, hit ratio {:.4}, encoded in {:.1} ms, model {}",
        depths.len(),
        hit_ratio(&depths),
        elapsed.as_secs_f64() * 1e3,
        model.id()
    );
    Ok(())
}

fn cmd_decode(a: DecodeArgs) -> CmdResult {
    if !(0.0..=1.0).contains(&a.clip) {
        return Err(Failure::invalid(format!("clip must be in [0, 1], got {}", a.clip)));
    }
    let file = at(&a.input, io::read_spl(&a.input))?;
    let model = spotlights_core::SpotlightsModel::from_descriptor(file.descriptor)?;
    let cloud = if a.world_frame {
        decode_world(&model, &file.depths, a.clip)?
    } else {
        decode(&model, &file.depths, a.clip)?
    };
    if cloud.is_empty() {
        warn!("no depths survive clip {}; writing an empty cloud", a.clip);
    }
    at(&a.out, io::save_cloud(&a.out, &cloud))?;
    info!("{} of {} rays decoded", cloud.len(), file.depths.len());
    Ok(())
}

fn load_nonempty(path: &Path) -> Result<spotlights_core::PointCloud, Failure> {
    let cloud = at(path, io::load_cloud(path))?;
    if cloud.is_empty() {
        return Err(Failure::empty(format!("{}: point cloud is empty", path.display())));
    }
    Ok(cloud)
}

fn cmd_eval(a: EvalArgs) -> CmdResult {
    if matches!(a.metric, MetricKind::Consistency | MetricKind::HitRatio) {
        return Err(Failure::invalid(format!(
            "eval supports accuracy, chamfer and completeness, not {}",
            a.metric
        )));
    }
    let norm = a.norm.unwrap_or(match a.metric {
        MetricKind::Accuracy => Norm::L1,
        _ => Norm::L2,
    });
    let pred = load_nonempty(&a.pred)?;
    let gt = load_nonempty(&a.gt)?;
    let report = metrics::report(a.metric, &pred, &gt, norm)?;
    let mut out = std::io::stdout().lock();
    if a.json {
        let json = serde_json::json!({
            "metric": report.metric.to_string(),
            "norm": report.norm.to_string(),
            "value": report.value,
            "n_pred": report.size_a,
            "n_gt": report.size_b,
        });
        writeln!(out, "{json}")?;
    } else {
        writeln!(out, "{}", metrics::MetricReport::CSV_HEADER)?;
        writeln!(out, "{}", report.csv_row())?;
    }
    Ok(())
}

fn cmd_consistency(a: ConsistencyArgs) -> CmdResult {
    let paths: Vec<PathBuf> = glob::glob(&a.glob)
        .map_err(|e| Failure::invalid(format!("bad pattern {:?}: {e}", a.glob)))?
        .collect::<Result<_, _>>()
        .map_err(|e| Failure::io(e.to_string()))?;
    if paths.len() < 2 {
        return Err(Failure::invalid(format!(
            "pattern {:?} matched {} file(s); consistency needs at least 2",
            a.glob,
            paths.len()
        )));
    }
    let clouds = paths.iter().map(|p| load_nonempty(p)).collect::<Result<Vec<_>, _>>()?;
    let value = metrics::consistency(&clouds, a.norm)?;
    info!("{} clouds", clouds.len());
    let mut out = std::io::stdout().lock();
    writeln!(out, "metric,norm,value,n_clouds")?;
    writeln!(out, "consistency,{},{value},{}", a.norm, clouds.len())?;
    Ok(())
}

fn cmd_sweep(a: SweepArgs) -> CmdResult {
    let mut entries: Vec<PathBuf> = fs::read_dir(&a.mesh_dir)
        .map_err(|e| Failure::io(format!("{}: {e}", a.mesh_dir.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.extension()
                .and_then(|e| e.to_str())
                .is_some_and(|e| e.eq_ignore_ascii_case("obj") || e.eq_ignore_ascii_case("ply"))
        })
        .collect();
    entries.sort();
    let config = SweepConfig {
        rays: a.rays,
        angles_deg: a.angles,
        secondary: a.secondary,
        gt_points: a.gt_points,
        seed: a.seed,
    };
    let mut rows = Vec::new();
    for path in &entries {
        let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("mesh");
        let result = io::load_mesh(path).and_then(|mesh| sweep::sweep_mesh(name, &mesh, &config));
        match result {
            Ok(r) => {
                info!("{name}: {} rows", r.len());
                rows.extend(r);
            }
            Err(e @ Error::InvalidParameter(_)) | Err(e @ Error::InvalidOpeningAngle(_)) => return Err(e.into()),
            Err(e) => warn!("skipping {}: {e}", path.display()),
        }
    }
    if rows.is_empty() {
        return Err(Failure::io(format!("no usable meshes in {}", a.mesh_dir.display())));
    }
    let mut w = create(&a.out)?;
    sweep::write_csv(&rows, &config, &mut w)?;
    w.flush()?;
    Ok(())
}

fn cmd_density(a: DensityArgs) -> CmdResult {
    let res = QuadratureResolution {
        theta: a.resolution.0,
        phi: a.resolution.1,
    };
    let start = Instant::now();
    let mut profile = density_profile(a.grid.0, a.grid.1, a.rmax, res)?;
    if let Some(spec) = &a.monte_carlo {
        let parts: Vec<u64> = spec
            .split(',')
            .map(|v| v.trim().parse())
            .collect::<Result<_, _>>()
            .map_err(|_| Failure::invalid(format!("--monte-carlo expects N,M,SEED, got {spec:?}")))?;
        let [n, m, seed] = parts[..] else {
            return Err(Failure::invalid(format!("--monte-carlo expects N,M,SEED, got {spec:?}")));
        };
        profile = profile.with_monte_carlo(n as usize, m as usize, seed, 0.6)?;
    }
    let mut w = create(&a.out)?;
    profile.write_csv(&mut w)?;
    w.flush()?;
    info!("profile computed in {:.1} s", start.elapsed().as_secs_f64());
    println!("min,max");
    println!("{:.6},{:.6}", profile.min(), profile.max());
    Ok(())
}

fn parse_vec3(s: &str) -> Result<Vec3, Failure> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|v| v.trim().parse())
        .collect::<Result<_, _>>()
        .map_err(|_| Failure::invalid(format!("expected X,Y,Z, got {s:?}")))?;
    match parts[..] {
        [x, y, z] => Ok(Vec3::new(x, y, z)),
        _ => Err(Failure::invalid(format!("expected X,Y,Z, got {s:?}"))),
    }
}

fn cmd_scan(a: ScanArgs) -> CmdResult {
    let mesh = at(&a.mesh, io::load_mesh(&a.mesh))?;
    let params = ScanParams {
        viewpoint: parse_vec3(&a.viewpoint)?,
        fov: a.fov.to_radians(),
        width: a.res.0,
        height: a.res.1,
    };
    let cloud = scan(&mesh, &params)?;
    if cloud.is_empty() {
        warn!("no pixel hit the mesh; writing an empty cloud");
    }
    at(&a.out, io::save_cloud(&a.out, &cloud))?;
    info!("{} points from {}x{} pixels", cloud.len(), a.res.0, a.res.1);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    env_logger::Builder::new()
        .filter_level(if cli.quiet { log::LevelFilter::Warn } else { log::LevelFilter::Info })
        .parse_default_env()
        .format_timestamp(None)
        .init();
    let result = match cli.command {
        Command::Encode(a) => cmd_encode(a),
        Command::Decode(a) => cmd_decode(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Consistency(a) => cmd_consistency(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Density(a) => cmd_density(a),
        Command::Scan(a) => cmd_scan(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
