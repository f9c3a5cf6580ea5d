//! The `dimlab` command line. Exit codes: 0 success, 1 a verdict failed,
//! 2 usage error or malformed input. Results are written only once complete.

use std::io::Write;
use std::path::{Path as FsPath, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_integer::Integer;
use serde::Serialize;
use serde_json::json;

use crate::constructions::ClassRecipe;
use crate::error::{Error, Result};
use crate::games::{default_grid, minimax_online_seq, minimax_transductive, GameConfig, GameOrder};
use crate::harness::{self, Corpus};
use crate::io::{self, CertificateFile, ClassFile, TreeCertificateFile, TreeFile};
use crate::model::{fmt_rat, parse_rat, FunctionClass, Metric, Rat, SampleDesign};
use crate::nonseq_cover::{cover_greedy, cover_min_exact, packing_max_exact};
use crate::nonseq_dims::dimension;
use crate::rademacher::{offset_rad_mc, offset_rad_nonseq_exact, offset_rad_seq_exact, OffsetInstance};
use crate::rule::DimKind;
use crate::sequential::{
    is_seq_cover, seq_cover_construct, seq_cover_min_bruteforce, seq_gapped_dim_integer, seq_gapped_dim_real,
    sfat_dim,
};

#[derive(Parser, Debug)]
#[command(name = "dimlab", version, about = "Exact dimensions, covers, offset complexities and regret games on finite classes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct ClassArgs {
    /// Class file (JSON).
    #[arg(long = "in")]
    input: PathBuf,
    /// Metric file (JSON); absolute difference when omitted.
    #[arg(long)]
    metric: Option<PathBuf>,
    /// Result file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Non-sequential dimension with a shattering certificate.
    Dims {
        #[command(flatten)]
        class: ClassArgs,
        /// gapped-integer, gapped-real, fat or fixed.
        #[arg(long)]
        kind: String,
        /// Scale as p/q; real grids are refined to fit it.
        #[arg(long)]
        alpha: String,
        /// Closeness slack (gapped-real only).
        #[arg(long)]
        beta: Option<String>,
    },
    /// Covering or packing number on a design.
    Cover {
        #[command(flatten)]
        class: ClassArgs,
        /// Cover radius or packing separation, as p/q.
        #[arg(long)]
        alpha: String,
        /// Comma-separated point indices; all points when omitted.
        #[arg(long)]
        design: Option<String>,
        #[arg(long, value_enum, default_value_t = CoverMethod::Exact)]
        method: CoverMethod,
    },
    /// Sequential dimension, or a sequential cover of a point tree.
    Seq {
        #[command(flatten)]
        class: ClassArgs,
        #[arg(long, value_enum, default_value_t = SeqTask::Dim)]
        task: SeqTask,
        /// gapped-integer, gapped-real or fat (the dim task).
        #[arg(long)]
        kind: Option<String>,
        /// Scale as p/q.
        #[arg(long)]
        alpha: String,
        /// Closeness slack (gapped-real only).
        #[arg(long)]
        beta: Option<String>,
        /// Point tree file, for the cover tasks.
        #[arg(long)]
        tree: Option<PathBuf>,
    },
    /// Offset Rademacher complexity, exact or sampled.
    Rademacher {
        #[command(flatten)]
        class: ClassArgs,
        /// Comma-separated point indices (sequence instance).
        #[arg(long, conflicts_with = "tree")]
        design: Option<String>,
        /// Comma-separated rationals, one per round.
        #[arg(long, conflicts_with = "mu_tree")]
        mu: Option<String>,
        /// Point tree file (tree instance).
        #[arg(long, requires = "mu_tree")]
        tree: Option<PathBuf>,
        /// Rational-labelled tree file.
        #[arg(long)]
        mu_tree: Option<PathBuf>,
        /// Offset constant C.
        #[arg(long, default_value = "2")]
        c: String,
        /// Monte Carlo samples; exact enumeration when omitted.
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Sample every path once (the mean is then exact).
        #[arg(long)]
        exhaustive: bool,
    },
    /// Minimax value of the grid-restricted regression game.
    Game {
        #[command(flatten)]
        class: ClassArgs,
        /// Number of rounds.
        #[arg(long)]
        horizon: usize,
        /// Transductive game on this comma-separated design.
        #[arg(long, conflicts_with = "contexts")]
        design: Option<String>,
        /// Online game with these comma-separated context indices.
        #[arg(long)]
        contexts: Option<String>,
        /// Learner's predictions, comma-separated; step 1/2 on [-2, 2] when omitted.
        #[arg(long)]
        yhat_grid: Option<String>,
        /// Adversary's outcomes, same format and default.
        #[arg(long)]
        y_grid: Option<String>,
    },
    /// Builds a class from a recipe (inline JSON or a file).
    Construct {
        /// Recipe as JSON text, or a path to a JSON file.
        #[arg(long)]
        recipe: String,
        /// Class file to write; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Runs registered inequality checks.
    Verify {
        /// Every registered check.
        #[arg(long, conflicts_with_all = ["theorem", "list"])]
        all: bool,
        /// One check by id.
        #[arg(long, conflicts_with = "list")]
        theorem: Option<String>,
        /// Print the registered ids and statements.
        #[arg(long)]
        list: bool,
        /// Corpus file; the shipped corpus when omitted.
        #[arg(long)]
        corpus: Option<PathBuf>,
        /// Report file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Record wall time per report (output is then not reproducible).
        #[arg(long)]
        timings: bool,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CoverMethod {
    Exact,
    Greedy,
    Packing,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SeqTask {
    Dim,
    Cover,
    CoverMin,
}

/// Outcome of a command before it is written.
struct Output {
    text: String,
    failed: bool,
}

fn ok<T: Serialize>(v: &T) -> Result<Output> {
    Ok(Output {
        text: io::to_pretty(v)?,
        failed: false,
    })
}

fn rat_arg(name: &str, s: &str) -> Result<Rat> {
    parse_rat(s).map_err(|e| Error::InvalidParameter(format!("--{name}: {e}")))
}

fn rat_list(s: &str) -> Result<Vec<Rat>> {
    s.split(',').map(|t| parse_rat(t.trim())).collect()
}

fn index_list(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| Error::InvalidParameter(format!("bad index `{t}`")))
        })
        .collect()
}

fn design_arg(class: &FunctionClass, s: Option<&str>) -> Result<SampleDesign> {
    match s {
        None => Ok(SampleDesign::all_points(class)),
        Some(s) => SampleDesign::new(index_list(s)?, class.n_points()),
    }
}

fn beta_arg(beta: Option<&str>) -> Result<Option<Rat>> {
    beta.map(|b| rat_arg("beta", b)).transpose()
}

/// Refines a real grid under |a - b| until every scale in `rs` is a grid
/// value; values are unchanged, only the denominator grows.
fn fit_grid(class: FunctionClass, metric: &Metric, rs: &[Rat]) -> Result<FunctionClass> {
    if class.grid().is_integer() || !metric.is_absolute() {
        return Ok(class);
    }
    let k = rs.iter().fold(1i64, |acc, r| acc.lcm(&class.grid().refinement_for(r)));
    if k == 1 {
        Ok(class)
    } else {
        class.refine(k)
    }
}

fn dim_scales(kind: DimKind, alpha: &Rat, beta: Option<&Rat>) -> Vec<Rat> {
    let mut rs = vec![*alpha];
    if kind.uses_scalar_witness() {
        rs.push(alpha / Rat::from_integer(2));
    }
    rs.extend(beta.copied());
    rs
}

fn run(cmd: Command) -> Result<(Output, Option<PathBuf>)> {
    match cmd {
        Command::Dims {
            class: ca,
            kind,
            alpha,
            beta,
        } => {
            let class = io::read_class(&ca.input)?;
            let metric = io::read_metric(ca.metric.as_deref())?;
            let kind = DimKind::parse(&kind)?;
            let alpha = rat_arg("alpha", &alpha)?;
            let beta = beta_arg(beta.as_deref())?;
            let class = fit_grid(class, &metric, &dim_scales(kind, &alpha, beta.as_ref()))?;
            let r = dimension(kind, &class, &metric, &alpha, beta.as_ref())?;
            let out = json!({
                "kind": kind,
                "Q": class.grid().q(),
                "alpha": fmt_rat(&alpha),
                "beta": beta.as_ref().map(fmt_rat),
                "dim": r.dim,
                "certificate": CertificateFile::from_certificate(&r.certificate, class.grid()),
            });
            Ok((ok(&out)?, ca.out))
        }
        Command::Cover {
            class: ca,
            alpha,
            design,
            method,
        } => {
            let class = io::read_class(&ca.input)?;
            let metric = io::read_metric(ca.metric.as_deref())?;
            let alpha = rat_arg("alpha", &alpha)?;
            let design = design_arg(&class, design.as_deref())?;
            let grid = class.grid();
            let out = match method {
                CoverMethod::Packing => {
                    let members = packing_max_exact(&class, &design, &metric, &alpha)?;
                    json!({ "method": "packing", "alpha": fmt_rat(&alpha), "size": members.len(), "members": members })
                }
                CoverMethod::Exact | CoverMethod::Greedy => {
                    let cover = if matches!(method, CoverMethod::Exact) {
                        cover_min_exact(&class, &design, &metric, &alpha)?
                    } else {
                        cover_greedy(&class, &design, &metric, &alpha)?
                    };
                    let centers: Vec<Vec<String>> = cover
                        .centers
                        .iter()
                        .map(|c| c.iter().map(|&v| fmt_rat(&grid.to_rat(v))).collect())
                        .collect();
                    json!({
                        "method": if matches!(method, CoverMethod::Exact) { "exact" } else { "greedy" },
                        "alpha": fmt_rat(&alpha),
                        "design": design.indices(),
                        "size": cover.len(),
                        "centers": centers,
                        "assignment": cover.assignment,
                    })
                }
            };
            Ok((ok(&out)?, ca.out))
        }
        Command::Seq {
            class: ca,
            task,
            kind,
            alpha,
            beta,
            tree,
        } => {
            let class = io::read_class(&ca.input)?;
            let metric = io::read_metric(ca.metric.as_deref())?;
            let alpha = rat_arg("alpha", &alpha)?;
            let out = match task {
                SeqTask::Dim => {
                    let kind = DimKind::parse(
                        kind.as_deref()
                            .ok_or_else(|| Error::InvalidParameter("--kind is required".into()))?,
                    )?;
                    let beta = beta_arg(beta.as_deref())?;
                    let class = fit_grid(class.clone(), &metric, &dim_scales(kind, &alpha, beta.as_ref()))?;
                    let r = match kind {
                        DimKind::GappedInteger => seq_gapped_dim_integer(&class, &metric, &alpha)?,
                        DimKind::GappedReal => seq_gapped_dim_real(
                            &class,
                            &metric,
                            &alpha,
                            beta.as_ref()
                                .ok_or_else(|| Error::InvalidParameter("--beta is required".into()))?,
                        )?,
                        DimKind::Fat => sfat_dim(&class, &alpha)?,
                        DimKind::Fixed => {
                            return Err(Error::InvalidParameter("no sequential fixed-scale dimension".into()))
                        }
                    };
                    json!({
                        "kind": kind,
                        "Q": class.grid().q(),
                        "alpha": fmt_rat(&alpha),
                        "beta": beta.as_ref().map(fmt_rat),
                        "dim": r.dim,
                        "certificate": TreeCertificateFile::from_certificate(&r.certificate, class.grid()),
                    })
                }
                SeqTask::Cover | SeqTask::CoverMin => {
                    let path = tree.ok_or_else(|| Error::InvalidParameter("--tree is required".into()))?;
                    let x_tree = io::read_json::<TreeFile>(&path)?.to_points(class.n_points())?;
                    let trees = if matches!(task, SeqTask::Cover) {
                        seq_cover_construct(&class, &metric, &x_tree, &alpha)?
                    } else {
                        seq_cover_min_bruteforce(&class, &metric, &x_tree, &alpha)?.1
                    };
                    let valid = is_seq_cover(&class, &metric, &x_tree, &alpha, &trees)?;
                    json!({
                        "alpha": fmt_rat(&alpha),
                        "size": trees.len(),
                        "valid": valid,
                        "trees": trees.iter().map(|t| TreeFile::from_values(t, class.grid())).collect::<Vec<_>>(),
                    })
                }
            };
            Ok((ok(&out)?, ca.out))
        }
        Command::Rademacher {
            class: ca,
            design,
            mu,
            tree,
            mu_tree,
            c,
            samples,
            seed,
            exhaustive,
        } => {
            let class = io::read_class(&ca.input)?;
            let c = rat_arg("c", &c)?;
            let inst = match (tree, mu_tree) {
                (Some(t), Some(m)) => {
                    let x_tree = io::read_json::<TreeFile>(&t)?.to_points(class.n_points())?;
                    let mu_tree = io::read_json::<TreeFile>(&m)?.to_rationals()?;
                    OffsetInstance::tree(class, x_tree, mu_tree, c)?
                }
                (None, None) => {
                    let design = design_arg(&class, design.as_deref())?;
                    let mu = match mu {
                        Some(m) => rat_list(&m)?,
                        None => vec![Rat::from_integer(0); design.len()],
                    };
                    OffsetInstance::sequence(class, design, mu, c)?
                }
                _ => return Err(Error::InvalidParameter("--tree and --mu-tree go together".into())),
            };
            let out = if samples.is_some() || exhaustive {
                let est = offset_rad_mc(&inst, samples.unwrap_or(0), seed, exhaustive)?;
                json!({
                    "mean": fmt_rat(&est.mean),
                    "std_error": est.std_error,
                    "samples": est.samples,
                    "seed": seed,
                })
            } else {
                let v = match inst.design {
                    crate::rademacher::OffsetDesign::Sequence { .. } => offset_rad_nonseq_exact(&inst)?,
                    crate::rademacher::OffsetDesign::Tree { .. } => offset_rad_seq_exact(&inst)?,
                };
                json!({ "value": fmt_rat(&v), "c": fmt_rat(&inst.c), "n": inst.n() })
            };
            Ok((ok(&out)?, ca.out))
        }
        Command::Game {
            class: ca,
            horizon,
            design,
            contexts,
            yhat_grid,
            y_grid,
        } => {
            let class = io::read_class(&ca.input)?;
            let yhat = yhat_grid.as_deref().map(rat_list).transpose()?.unwrap_or_else(default_grid);
            let ys = y_grid.as_deref().map(rat_list).transpose()?.unwrap_or_else(default_grid);
            let (order, online) = match contexts {
                Some(ctx) => (GameOrder::Online(index_list(&ctx)?), true),
                None => {
                    let d = match design {
                        Some(d) => SampleDesign::new(index_list(&d)?, class.n_points())?,
                        None => SampleDesign::new(
                            (0..horizon).map(|t| t % class.n_points()).collect(),
                            class.n_points(),
                        )?,
                    };
                    (GameOrder::Transductive(d), false)
                }
            };
            let cfg = GameConfig::new(class, horizon, yhat, ys, order)?;
            let v = if online {
                minimax_online_seq(&cfg)?
            } else {
                minimax_transductive(&cfg)?
            };
            let out = json!({
                "game": if online { "online" } else { "transductive" },
                "horizon": horizon,
                "value": fmt_rat(&v),
            });
            Ok((ok(&out)?, ca.out))
        }
        Command::Construct { recipe, out } => {
            let text = if FsPath::new(&recipe).is_file() {
                std::fs::read_to_string(&recipe)?
            } else {
                recipe
            };
            let recipe: ClassRecipe = serde_json::from_str(&text)?;
            let class = recipe.build()?;
            Ok((ok(&ClassFile::from_class(&class))?, out))
        }
        Command::Verify {
            all,
            theorem,
            list,
            corpus,
            out,
            timings,
        } => {
            if list {
                let ids: Vec<_> = harness::registry()
                    .iter()
                    .map(|t| json!({ "id": t.id, "statement": t.statement }))
                    .collect();
                return Ok((ok(&ids)?, out));
            }
            let corpus = match &corpus {
                Some(p) => Corpus::load(p)?,
                None => Corpus::shipped(),
            };
            let reports = match (all, theorem) {
                (true, _) => harness::verify_all(&corpus, timings),
                (false, Some(id)) => harness::verify(&id, &corpus, timings)?,
                (false, None) => {
                    return Err(Error::InvalidParameter("give --all, --theorem <id> or --list".into()))
                }
            };
            let summary = harness::summarize(&reports);
            eprintln!("{} pass, {} fail, {} skipped", summary.pass, summary.fail, summary.skipped);
            Ok((
                Output {
                    text: io::to_pretty(&reports)?,
                    failed: summary.fail > 0,
                },
                out,
            ))
        }
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var("DIMLAB_THREADS").ok().and_then(|s| s.parse::<usize>().ok()) {
        crate::par::init_global_threads(n);
    }
}

/// Parses `args` (program name first) and runs the command, writing results
/// to stdout or `--out`, messages to stderr. Returns the process exit code.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    configure_threads();
    match run(cli.command) {
        Ok((output, path)) => {
            let written = match path {
                Some(p) => io::write_atomic(&p, &output.text),
                None => std::io::stdout().write_all(output.text.as_bytes()).map_err(Error::from),
            };
            if let Err(e) = written {
                eprintln!("dimlab: {e}");
                return 2;
            }
            if output.failed {
                eprintln!("dimlab: at least one check failed");
                1
            } else {
                0
            }
        }
        Err(e) => {
            eprintln!("dimlab: {e}");
            2
        }
    }
}
