use std::fmt;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64 as C64;
use serde_json::{json, Value};

use rrg_core::experiments::{num, run_experiment, ExperimentConfig, EXPERIMENTS};
use rrg_core::graph::io::{read_graph, to_edge_list, to_json};
use rrg_core::graph::generate_regular;
use rrg_core::green::{q_spectral, spectral_decompose, write_eigenvalues_bin};
use rrg_core::resample::{apply_resampling, sample_resampling_data_seeded, ResamplingData};
use rrg_core::scalar::ParameterSet;
use rrg_core::SpectralParam;

use crate::manifest::{manifest_for_file, write_atomic, RunManifest};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "RRG_OUT_DIR";

const EXIT_CODES: &str = "Exit codes: 0 success, 1 usage error, 2 invalid input, 3 numerical failure.";

#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

#[derive(Debug, Parser)]
#[command(name = "rrg", version, about = "Random regular graphs: spectra, Green's functions, resampling", after_help = EXIT_CODES)]
pub struct Cli {
    /// Worker threads; outputs do not depend on this.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a uniform simple d-regular graph.
    Generate(GenerateArgs),
    /// Eigenvalues of H = A/√(d-1), descending, as CSV.
    Spectrum(SpectrumArgs),
    /// m_N, Q and Green's function entries at one spectral parameter.
    Green(GreenArgs),
    /// One local resampling around a vertex.
    Resample(ResampleArgs),
    /// Run a named experiment sweep.
    Experiment(ExperimentArgs),
    /// Re-run the command recorded in a manifest.
    Replay(ReplayArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GraphFormat {
    Json,
    Edges,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub d: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = GraphFormat::Json)]
    pub format: GraphFormat,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write the eigenvalues as little-endian f64 with a u64 count.
    #[arg(long)]
    pub bin: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GreenArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Spectral parameter as `a+bi` with b > 0.
    #[arg(long, allow_hyphen_values = true)]
    pub z: String,
    /// Comma-separated: `mN`, `Q`, `diag`, `G:i:j`.
    #[arg(long, default_value = "mN,Q")]
    pub ops: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ResampleArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Center vertex.
    #[arg(long)]
    pub o: usize,
    #[arg(long)]
    pub ell: usize,
    /// Tree-like radius; defaults to the parameter schedule at this size.
    #[arg(long = "R")]
    pub big_r: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Use this resampling data instead of sampling it.
    #[arg(long)]
    pub replay: Option<PathBuf>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    /// One of rigidity, extremal, delocalization, local-law,
    /// self-consistent, improved-local-law, km-fit, omega-membership.
    pub name: String,
    /// JSON config; fields left out take their defaults.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    pub manifest: PathBuf,
}

fn default_out_dir() -> PathBuf {
    std::env::var_os(OUT_DIR_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("."))
}

/// The command line without the program name and `--jobs`.
fn recorded_args(argv: &[String]) -> Vec<String> {
    let mut out = Vec::new();
    let mut skip = false;
    for a in argv {
        if skip {
            skip = false;
        } else if a == "--jobs" {
            skip = true;
        } else if !a.starts_with("--jobs=") {
            out.push(a.clone());
        }
    }
    out
}

pub fn run(cli: Cli) -> Result<()> {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    run_with_args(cli, recorded_args(&argv))
}

fn run_with_args(cli: Cli, args: Vec<String>) -> Result<()> {
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(j) = cli.jobs {
        if j == 0 {
            return Err(UsageError("--jobs must be positive".into()).into());
        }
        pool = pool.num_threads(j);
    }
    let pool = pool.build().context("building thread pool")?;
    pool.install(|| dispatch(cli.command, cli.jobs, args))
}

fn dispatch(command: Command, jobs: Option<usize>, args: Vec<String>) -> Result<()> {
    match command {
        Command::Generate(a) => generate(a, args),
        Command::Spectrum(a) => spectrum(a, args),
        Command::Green(a) => green(a, args),
        Command::Resample(a) => resample(a, args),
        Command::Experiment(a) => experiment(a, args),
        Command::Replay(a) => replay(a, jobs),
    }
}

fn report(paths: &[PathBuf]) {
    for p in paths {
        println!("{}", p.display());
    }
}

fn generate(a: GenerateArgs, args: Vec<String>) -> Result<()> {
    let g = generate_regular(a.n, a.d, a.seed)?;
    let ext = match a.format {
        GraphFormat::Json => "json",
        GraphFormat::Edges => "txt",
    };
    let out = a
        .out
        .unwrap_or_else(|| default_out_dir().join(format!("graph_n{}_d{}_s{}.{ext}", a.n, a.d, a.seed)));
    let body = match a.format {
        GraphFormat::Json => {
            let mut s = to_json(&g);
            s.push('\n');
            s
        }
        GraphFormat::Edges => to_edge_list(&g),
    };
    write_atomic(&out, body.as_bytes())?;
    let config = json!({"n": a.n, "d": a.d, "format": ext});
    RunManifest::new("generate", args, config, Some(a.seed), vec![out.clone()]).write(&manifest_for_file(&out))?;
    report(&[out]);
    Ok(())
}

fn with_suffix(input: &Path, suffix: &str) -> PathBuf {
    let stem = input.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "graph".into());
    default_out_dir().join(format!("{stem}{suffix}"))
}

fn spectrum(a: SpectrumArgs, args: Vec<String>) -> Result<()> {
    let g = read_graph(&a.input)?;
    let sd = rrg_core::green::eigenvalues(&g, g.d())?;
    let out = a.out.unwrap_or_else(|| with_suffix(&a.input, "_spectrum.csv"));
    let mut csv = String::from("index,eigenvalue\n");
    for (k, l) in sd.iter().enumerate() {
        csv.push_str(&format!("{},{}\n", k + 1, num(*l)));
    }
    write_atomic(&out, csv.as_bytes())?;
    let mut outputs = vec![out.clone()];
    if let Some(bin) = &a.bin {
        let mut bytes = Vec::new();
        write_eigenvalues_bin(&mut bytes, &sd)?;
        write_atomic(bin, &bytes)?;
        outputs.push(bin.clone());
    }
    let config = json!({"input": a.input, "n": g.n(), "d": g.d()});
    RunManifest::new("spectrum", args, config, None, outputs.clone()).write(&manifest_for_file(&out))?;
    report(&outputs);
    Ok(())
}

enum Op {
    MN,
    Q,
    Diag,
    Entry(usize, usize),
}

fn parse_ops(s: &str, n: usize) -> Result<Vec<Op>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| match t {
            "mN" | "m_N" => Ok(Op::MN),
            "Q" => Ok(Op::Q),
            "diag" => Ok(Op::Diag),
            _ => {
                let parts: Vec<&str> = t.split(':').collect();
                let idx = |p: &str| -> Result<usize> {
                    let v: usize = p
                        .parse()
                        .map_err(|_| rrg_core::Error::Parse(format!("bad vertex {p:?} in op {t:?}")))?;
                    if v >= n {
                        return Err(rrg_core::Error::VertexOutOfRange { vertex: v, n }.into());
                    }
                    Ok(v)
                };
                match parts.as_slice() {
                    ["G", i, j] => Ok(Op::Entry(idx(i)?, idx(j)?)),
                    _ => Err(rrg_core::Error::Parse(format!("unknown op {t:?}; expected mN, Q, diag or G:i:j")).into()),
                }
            }
        })
        .collect()
}

fn cjson(x: C64) -> Value {
    json!({"re": x.re, "im": x.im})
}

fn green(a: GreenArgs, args: Vec<String>) -> Result<()> {
    let z: SpectralParam = a.z.parse()?;
    let g = read_graph(&a.input)?;
    let ops = parse_ops(&a.ops, g.n())?;
    let sd = spectral_decompose(&g, g.d())?;
    let mut out = serde_json::Map::new();
    out.insert("z".into(), cjson(z.z()));
    out.insert("n".into(), json!(g.n()));
    out.insert("d".into(), json!(g.d()));
    let mut entries = Vec::new();
    for op in &ops {
        match *op {
            Op::MN => {
                out.insert("mN".into(), cjson(sd.m_n(z)));
            }
            Op::Q => {
                out.insert("Q".into(), cjson(q_spectral(&g, &sd, z)?));
            }
            Op::Diag => {
                out.insert("diag".into(), Value::Array(sd.green_diagonal(z).into_iter().map(cjson).collect()));
            }
            Op::Entry(i, j) => entries.push(json!({"i": i, "j": j, "value": cjson(sd.green_entry(i, j, z))})),
        }
    }
    if !entries.is_empty() {
        out.insert("entries".into(), Value::Array(entries));
    }
    let mut text = serde_json::to_string_pretty(&Value::Object(out))?;
    text.push('\n');
    let path = a.out.unwrap_or_else(|| with_suffix(&a.input, "_green.json"));
    write_atomic(&path, text.as_bytes())?;
    let config = json!({"input": a.input, "z": z.to_string(), "ops": a.ops});
    RunManifest::new("green", args, config, None, vec![path.clone()]).write(&manifest_for_file(&path))?;
    print!("{text}");
    Ok(())
}

fn resample(a: ResampleArgs, args: Vec<String>) -> Result<()> {
    let g = read_graph(&a.input)?;
    let big_r = match a.big_r {
        Some(r) => r,
        None => ParameterSet::default().schedule(g.n(), g.d())?.big_r,
    };
    let data = match &a.replay {
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            let data = ResamplingData::from_json(&text)?;
            if data.o != a.o || data.ell != a.ell {
                return Err(rrg_core::Error::InconsistentData(format!(
                    "replay data is for o = {}, ell = {}",
                    data.o, data.ell
                ))
                .into());
            }
            data.validate(&g)?;
            data
        }
        None => sample_resampling_data_seeded(&g, a.o, a.ell, a.seed)?,
    };
    let res = apply_resampling(&g, &data, big_r)?;
    let dir = a.out_dir.unwrap_or_else(default_out_dir);
    let graph_path = dir.join("switched.json");
    let data_path = dir.join("data.json");
    let result_path = dir.join("result.json");
    let mut graph_text = to_json(&res.graph);
    graph_text.push('\n');
    write_atomic(&graph_path, graph_text.as_bytes())?;
    let mut data_text = data.to_json();
    data_text.push('\n');
    write_atomic(&data_path, data_text.as_bytes())?;
    let result = json!({
        "R": big_r,
        "admissible": res.admissible,
        "new_boundary": res.new_boundary,
        "switched_data": serde_json::to_value(&res.switched_data)?,
    });
    let mut result_text = serde_json::to_string_pretty(&result)?;
    result_text.push('\n');
    write_atomic(&result_path, result_text.as_bytes())?;
    let outputs = vec![graph_path, data_path, result_path];
    let config = json!({"input": a.input, "o": a.o, "ell": a.ell, "R": big_r, "replay": a.replay});
    let seed = if a.replay.is_some() { None } else { Some(a.seed) };
    RunManifest::new("resample", args, config, seed, outputs.clone()).write(&dir.join("manifest.json"))?;
    report(&outputs);
    Ok(())
}

fn experiment(a: ExperimentArgs, args: Vec<String>) -> Result<()> {
    if !EXPERIMENTS.contains(&a.name.as_str()) {
        return Err(UsageError(format!("unknown experiment {:?}; expected one of {}", a.name, EXPERIMENTS.join(", "))).into());
    }
    let cfg = match &a.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            ExperimentConfig::from_json(&text)?
        }
        None => ExperimentConfig::default(),
    };
    let dir = a
        .out_dir
        .or_else(|| cfg.output.clone())
        .unwrap_or_else(|| default_out_dir().join(&a.name));
    let out = run_experiment(&a.name, &cfg)?;
    let outputs = out.write(&dir)?;
    RunManifest::new("experiment", args, serde_json::to_value(&cfg)?, Some(cfg.seed), outputs.clone())
        .write(&dir.join("manifest.json"))?;
    report(&outputs);
    Ok(())
}

fn replay(a: ReplayArgs, jobs: Option<usize>) -> Result<()> {
    let m = RunManifest::read(&a.manifest)?;
    let mut argv = vec!["rrg".to_string()];
    argv.extend(m.args.iter().cloned());
    let cli = Cli::try_parse_from(&argv).map_err(|e| UsageError(format!("manifest arguments do not parse: {e}")))?;
    if matches!(cli.command, Command::Replay(_)) {
        return Err(UsageError("a manifest cannot record a replay".into()).into());
    }
    dispatch(cli.command, jobs, m.args)
}
