use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Subcommand};
use relugeo::{
    cone, erm, geometry, smooth, Activation, FitConfig, NetworkSpec, NumericConfig, ResponseMatrix,
};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::data::{self, InputDigest};
use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    /// ReLU cone of a sample: dimension, membership, faces.
    #[command(subcommand)]
    Cone(ConeCommand),
    /// Image of two-layer ReLU networks: membership, distance, dimension.
    #[command(subcommand)]
    Image(ImageCommand),
    /// Multi-restart least-squares fit with an attainment diagnosis.
    Fit(FitArgs),
    /// Built-in examples of infima that are not attained.
    #[command(subcommand)]
    Replicate(ReplicateCommand),
    /// Repeat the analysis stored in a JSON run record.
    Rerun {
        #[arg(long)]
        record: PathBuf,
    },
}

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConeCommand {
    /// Dimension of the cone (rank of the sample with a ones column).
    Dim {
        #[arg(long)]
        sample: String,
    },
    /// Whether a vector lies in the cone.
    Member {
        #[arg(long)]
        sample: String,
        #[arg(long)]
        vector: String,
        /// Support threshold (default scales with the vector).
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Supports of all faces.
    Faces {
        #[arg(long)]
        sample: String,
        #[arg(long, default_value_t = cone::DEFAULT_FACE_CAP)]
        cap: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct SearchArgs {
    #[arg(long, default_value_t = 8)]
    pub restarts: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 2000)]
    pub max_iters: usize,
}

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ImageCommand {
    /// Is the response realized by some width-d network?
    Member {
        #[arg(long)]
        sample: String,
        #[arg(long)]
        response: String,
        #[arg(long)]
        width: usize,
        /// Residual tolerance (max abs).
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        /// Use the numeric search when exact enumeration is too large.
        #[arg(long)]
        numeric: bool,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Distance from a single-output response to the image.
    Distance {
        #[arg(long)]
        sample: String,
        #[arg(long)]
        response: String,
        #[arg(long)]
        width: usize,
    },
    /// Numerical rank of the weight-map Jacobian at random weights.
    Dim {
        #[arg(long)]
        sample: String,
        #[arg(long)]
        width: usize,
        #[arg(long, default_value_t = 1)]
        outputs: usize,
        #[arg(long, default_value = "relu")]
        activation: Activation,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Relative singular-value cutoff.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Dimension bounds from the sample (or from the input width alone).
    Bound {
        #[arg(long, conflicts_with = "inputs")]
        sample: Option<String>,
        /// Input width, when no sample is given.
        #[arg(long, required_unless_present = "sample")]
        inputs: Option<usize>,
        #[arg(long)]
        width: usize,
        #[arg(long, default_value_t = 1)]
        outputs: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct FitArgs {
    #[arg(long)]
    pub sample: String,
    #[arg(long)]
    pub response: String,
    /// Layer widths from input to output, e.g. 2,2,2.
    #[arg(long, value_delimiter = ',', required = true)]
    pub widths: Vec<usize>,
    #[arg(long, default_value = "relu")]
    pub activation: Activation,
    /// JSON file with fit settings; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub restarts: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub max_iters: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReplicateCommand {
    /// Divergent weight sequence for the built-in 6 x 2 instance, plus a
    /// fit diagnosis.
    Nonclosed {
        #[arg(long, value_delimiter = ',', default_value = "1,10,100,1000,1000000")]
        k: Vec<f64>,
        /// Also write the built-in sample and response as CSV into this
        /// directory.
        #[arg(long)]
        dump: Option<PathBuf>,
        /// Skip the fit diagnosis.
        #[arg(long)]
        skip_fit: bool,
        #[arg(long, default_value_t = 20)]
        restarts: usize,
        #[arg(long, default_value_t = 50_000)]
        max_iters: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Three-point tanh chain over a grid of targets around a center.
    Tanh {
        #[arg(long, value_delimiter = ',', default_value = "0,2,1")]
        center: Vec<f64>,
        #[arg(long, default_value_t = 0.05)]
        epsilon: f64,
        #[arg(long, default_value_t = 5)]
        grid: usize,
        #[arg(long)]
        restarts: Option<usize>,
        #[arg(long)]
        max_iters: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// What a command produced, before it is wrapped into a run record.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub results: Value,
    pub summary: String,
    pub digests: BTreeMap<String, InputDigest>,
    pub seed: Option<u64>,
}

impl Command {
    pub fn name(&self) -> String {
        match self {
            Command::Cone(c) => format!(
                "cone {}",
                match c {
                    ConeCommand::Dim { .. } => "dim",
                    ConeCommand::Member { .. } => "member",
                    ConeCommand::Faces { .. } => "faces",
                }
            ),
            Command::Image(c) => format!(
                "image {}",
                match c {
                    ImageCommand::Member { .. } => "member",
                    ImageCommand::Distance { .. } => "distance",
                    ImageCommand::Dim { .. } => "dim",
                    ImageCommand::Bound { .. } => "bound",
                }
            ),
            Command::Fit(_) => "fit".into(),
            Command::Replicate(ReplicateCommand::Nonclosed { .. }) => "replicate nonclosed".into(),
            Command::Replicate(ReplicateCommand::Tanh { .. }) => "replicate tanh".into(),
            Command::Rerun { .. } => "rerun".into(),
        }
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("results serialize")
}

fn one_based(set: relugeo::IndexSet) -> Vec<usize> {
    set.indices().into_iter().map(|i| i + 1).collect()
}

fn single_column(t: &ResponseMatrix) -> Result<Vec<f64>, CliError> {
    if t.q() != 1 {
        return Err(CliError::Shape(format!(
            "expected a single-column response, got {} columns",
            t.q()
        )));
    }
    Ok(t.column(0))
}

pub fn execute(cmd: &Command) -> Result<Outcome, CliError> {
    match cmd {
        Command::Cone(c) => cone_command(c),
        Command::Image(c) => image_command(c),
        Command::Fit(args) => fit_command(args),
        Command::Replicate(c) => replicate_command(c),
        Command::Rerun { .. } => Err(CliError::Parse("a rerun cannot be nested".into())),
    }
}

fn cone_command(c: &ConeCommand) -> Result<Outcome, CliError> {
    let mut digests = BTreeMap::new();
    let mut summary = String::new();
    let results = match c {
        ConeCommand::Dim { sample } => {
            let (s, d) = data::load_sample(sample)?;
            digests.insert("sample".into(), d);
            let dim = cone::cone_dim(&s);
            writeln!(summary, "cone dimension: {dim}").unwrap();
            json!({ "dimension": dim })
        }
        ConeCommand::Member {
            sample,
            vector,
            tol,
        } => {
            let (s, d) = data::load_sample(sample)?;
            digests.insert("sample".into(), d);
            let (x, d) = data::load_vector(vector)?;
            digests.insert("vector".into(), d);
            let m = cone::cone_membership(&s, &x, *tol)?;
            match &m {
                cone::ConeMembership::Member { a, b, residual } => writeln!(
                    summary,
                    "MEMBER: a = {a:?}, b = {b}, residual = {residual:e}"
                )
                .unwrap(),
                cone::ConeMembership::NonMember => writeln!(summary, "NON_MEMBER").unwrap(),
            }
            json!({ "verdict": if m.is_member() { "MEMBER" } else { "NON_MEMBER" }, "membership": to_value(&m) })
        }
        ConeCommand::Faces { sample, cap } => {
            let (s, d) = data::load_sample(sample)?;
            digests.insert("sample".into(), d);
            let faces = cone::enumerate_faces_with_cap(&s, *cap)?;
            writeln!(summary, "{} faces (1-based supports):", faces.len()).unwrap();
            let listed: Vec<Value> = faces
                .faces
                .iter()
                .map(|f| {
                    writeln!(summary, "  {:?}  dim {}", one_based(f.indices), f.dimension).unwrap();
                    json!({ "support": one_based(f.indices), "dimension": f.dimension,
                            "witness_a": f.witness_a, "witness_b": f.witness_b })
                })
                .collect();
            json!({ "count": faces.len(), "faces": listed })
        }
    };
    Ok(Outcome {
        results,
        summary,
        digests,
        seed: None,
    })
}

fn image_command(c: &ImageCommand) -> Result<Outcome, CliError> {
    let mut digests = BTreeMap::new();
    let mut summary = String::new();
    let mut seed = None;
    let results = match c {
        ImageCommand::Member {
            sample,
            response,
            width,
            tol,
            numeric,
            search,
        } => {
            let (s, d) = data::load_sample(sample)?;
            digests.insert("sample".into(), d);
            let (t, d) = data::load_response(response)?;
            digests.insert("response".into(), d);
            t.check_paired(&s)?;
            let numeric_config = NumericConfig {
                restarts: search.restarts,
                max_iters: search.max_iters,
                seed: search.seed,
                tol: *tol,
                ..NumericConfig::default()
            };
            let (path, cert) = if t.q() == 1 {
                match geometry::membership_2layer_q1(&s, &t.column(0), *width, *tol) {
                    Ok(cert) => ("exact", cert),
                    Err(relugeo::Error::CapExceeded { .. }) if *numeric => (
                        "numeric",
                        geometry::membership_2layer_general(&s, &t, *width, &numeric_config)?,
                    ),
                    Err(e) => return Err(e.into()),
                }
            } else {
                (
                    "numeric",
                    geometry::membership_2layer_general(&s, &t, *width, &numeric_config)?,
                )
            };
            if path == "numeric" {
                seed = Some(search.seed);
            }
            writeln!(summary, "{} ({path} path)", cert.verdict.label()).unwrap();
            if let Some(r) = cert.residual {
                writeln!(summary, "residual (max abs): {r:e}").unwrap();
            }
            if let Some(p) = &cert.pattern {
                writeln!(summary, "pattern: {p}").unwrap();
            }
            json!({ "path": path, "verdict": cert.verdict.label(), "certificate": to_value(&cert) })
        }
        ImageCommand::Distance {
            sample,
            response,
            width,
        } => {
            let (s, d) = data::load_sample(sample)?;
            digests.insert("sample".into(), d);
            let (t, d) = data::load_response(response)?;
            digests.insert("response".into(), d);
            t.check_paired(&s)?;
            let r = geometry::fit_distance_2layer_q1(&s, &single_column(&t)?, *width)?;
            writeln!(
                summary,
                "distance: {:e} (squared {:e})",
                r.distance,
                r.distance * r.distance
            )
            .unwrap();
            writeln!(summary, "nearest point: {:?}", r.nearest).unwrap();
            json!({ "distance": r.distance, "distance_squared": r.distance * r.distance, "result": to_value(&r) })
        }
        ImageCommand::Dim {
            sample,
            width,
            outputs,
            activation,
            trials,
            seed: s_seed,
            tol,
        } => {
            let (s, d) = data::load_sample(sample)?;
            digests.insert("sample".into(), d);
            let spec = NetworkSpec::two_layer(s.p(), *width, *outputs, *activation)?;
            let report = geometry::numerical_image_dim(&spec, &s, *trials, *s_seed, *tol)?;
            seed = Some(*s_seed);
            writeln!(summary, "max numerical rank: {}", report.numerical_rank_max).unwrap();
            writeln!(
                summary,
                "theoretical upper bound: {}",
                report.theoretical_upper
            )
            .unwrap();
            if let Some(g) = report.generic_formula {
                let tag = if g.heuristic { " (heuristic)" } else { "" };
                writeln!(summary, "generic formula: {}{tag}", g.value).unwrap();
            }
            to_value(&report)
        }
        ImageCommand::Bound {
            sample,
            inputs,
            width,
            outputs,
        } => {
            let mut out = serde_json::Map::new();
            let p = match sample {
                Some(name) => {
                    let (s, d) = data::load_sample(name)?;
                    digests.insert("sample".into(), d);
                    let upper = geometry::dim_upper_bound(&s, *width, *outputs);
                    writeln!(summary, "upper bound from sample: {upper}").unwrap();
                    out.insert("upper_bound".into(), json!(upper));
                    out.insert("cone_dimension".into(), json!(cone::cone_dim(&s)));
                    out.insert("n".into(), json!(s.n()));
                    s.p()
                }
                None => inputs.expect("clap requires --inputs without --sample"),
            };
            // Without a sample the generic count applies once n is large.
            let g = geometry::generic_dim_2layer(p, *width, *outputs, usize::MAX);
            if let Some(g) = g {
                let tag = if g.heuristic { " (heuristic)" } else { "" };
                writeln!(summary, "generic dimension: {}{tag}", g.value).unwrap();
            }
            out.insert("generic".into(), to_value(&g));
            Value::Object(out)
        }
    };
    Ok(Outcome {
        results,
        summary,
        digests,
        seed,
    })
}

fn fit_command(args: &FitArgs) -> Result<Outcome, CliError> {
    let mut digests = BTreeMap::new();
    let (s, d) = data::load_sample(&args.sample)?;
    digests.insert("sample".into(), d);
    let (t, d) = data::load_response(&args.response)?;
    digests.insert("response".into(), d);
    t.check_paired(&s)?;
    let mut config = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
            serde_json::from_str::<FitConfig>(&text)
                .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?
        }
        None => FitConfig::default(),
    };
    if let Some(v) = args.restarts {
        config.restarts = v;
    }
    if let Some(v) = args.seed {
        config.seed = v;
    }
    if let Some(v) = args.max_iters {
        config.max_iters = v;
    }
    let spec = NetworkSpec::new(args.widths.clone(), args.activation)?;
    if spec.input_dim() != s.p() || spec.output_dim() != t.q() {
        return Err(CliError::Shape(format!(
            "widths {:?} do not match a {}-column sample and {}-column response",
            args.widths,
            s.p(),
            t.q()
        )));
    }
    let report = erm::fit(&spec, &s, &t, &config)?;
    let mut summary = String::new();
    writeln!(summary, "best squared loss: {:e}", report.best_loss).unwrap();
    writeln!(summary, "weight norm: {:.6e}", report.best_norm).unwrap();
    writeln!(
        summary,
        "classification (heuristic): {}",
        report.classification
    )
    .unwrap();
    let results = json!({
        "fit_config": to_value(&config),
        "baseline_loss": erm::baseline_loss(&t),
        "report": to_value(&report),
    });
    Ok(Outcome {
        results,
        summary,
        digests,
        seed: Some(config.seed),
    })
}

fn replicate_command(c: &ReplicateCommand) -> Result<Outcome, CliError> {
    let mut summary = String::new();
    match c {
        ReplicateCommand::Nonclosed {
            k,
            dump,
            skip_fit,
            restarts,
            max_iters,
            seed,
        } => {
            let mut results = serde_json::Map::new();
            if let Some(dir) = dump {
                let written = data::dump_builtins(dir)?;
                writeln!(summary, "wrote {}", written.join(", ")).unwrap();
                results.insert("dumped".into(), json!(written));
            }
            let points = erm::replicate_nonclosed_sequence(k)?;
            writeln!(
                summary,
                "{:>12}  {:>24}  {:>24}  {:>16}",
                "k", "distance", "sqrt(5)/k", "norm"
            )
            .unwrap();
            let rows: Vec<Value> = points
                .iter()
                .map(|p| {
                    let closed = 5f64.sqrt() / p.k;
                    writeln!(summary, "{:>12}  {:>24.17e}  {:>24.17e}  {:>16.6e}", p.k, p.distance, closed, p.norm)
                        .unwrap();
                    json!({ "k": p.k, "distance": p.distance, "closed_form": closed,
                            "relative_error": (p.distance - closed).abs() / closed, "norm": p.norm })
                })
                .collect();
            results.insert("sequence".into(), Value::Array(rows));
            let mut used_seed = None;
            if !skip_fit {
                let config = FitConfig {
                    restarts: *restarts,
                    max_iters: *max_iters,
                    seed: *seed,
                    ..FitConfig::default()
                };
                let spec = relugeo::datasets::nonclosed_spec();
                let t = relugeo::datasets::paper_response();
                let report = erm::fit(&spec, &relugeo::datasets::paper_sample(), &t, &config)?;
                writeln!(
                    summary,
                    "fit: loss {:e} at norm {:.6e}, classification (heuristic): {}",
                    report.best_loss, report.best_norm, report.classification
                )
                .unwrap();
                results.insert("fit_config".into(), to_value(&config));
                results.insert("fit".into(), to_value(&report));
                used_seed = Some(*seed);
            }
            let digests = [
                ("sample", data::BUILTIN_SAMPLE),
                ("response", data::BUILTIN_RESPONSE),
            ]
            .into_iter()
            .map(|(role, name)| data::load_matrix(name).map(|(_, d)| (role.to_string(), d)))
            .collect::<Result<_, _>>()?;
            Ok(Outcome {
                results: Value::Object(results),
                summary,
                digests,
                seed: used_seed,
            })
        }
        ReplicateCommand::Tanh {
            center,
            epsilon,
            grid,
            restarts,
            max_iters,
            seed,
        } => {
            let mut config = smooth::chain_config();
            config.seed = *seed;
            if let Some(v) = restarts {
                config.restarts = *v;
            }
            if let Some(v) = max_iters {
                config.max_iters = *v;
            }
            let g = smooth::epsilon_grid_analysis(center, *epsilon, *grid, &config)?;
            let at_center = smooth::tanh_example_analysis(center, &config)?;
            let max_gap = g
                .points
                .iter()
                .map(|p| p.gap)
                .fold(f64::NEG_INFINITY, f64::max);
            let min_gap = g.points.iter().map(|p| p.gap).fold(f64::INFINITY, f64::min);
            let min_norm = g
                .points
                .iter()
                .map(|p| p.best_norm)
                .fold(f64::INFINITY, f64::min);
            writeln!(
                summary,
                "center {:?}: best squared loss {:.12}, monotone bound {:.12}, norm {:.3e}, {}",
                center,
                at_center.best_loss,
                at_center.bound.distance_sq,
                at_center.best_norm,
                at_center.classification
            )
            .unwrap();
            writeln!(
                summary,
                "grid {}^3 over epsilon {}: {:.1}% suspected non-attained (heuristic); gap range [{:e}, {:e}]; min norm {:.3e}",
                g.grid_points,
                epsilon,
                100.0 * g.suspected_fraction,
                min_gap,
                max_gap,
                min_norm
            )
            .unwrap();
            let results = json!({
                "chain_config": to_value(&config),
                "center": to_value(&at_center),
                "grid": to_value(&g),
                "max_gap": max_gap,
                "min_gap": min_gap,
                "min_norm": min_norm,
            });
            Ok(Outcome {
                results,
                summary,
                digests: BTreeMap::new(),
                seed: Some(*seed),
            })
        }
    }
}
