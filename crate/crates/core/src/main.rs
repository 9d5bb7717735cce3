use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use pointdec::beta::{beta_elimination_order, build_beta_pd};
use pointdec::cover::{
    build_spd_from_order, coverwidth_of_order, exhaustive_coverwidth, CoverOrder,
};
use pointdec::csp::{brute_force_opt, format_rational, MaxCspInstance};
use pointdec::decomposition::{
    validate_pd, validate_spd, width_of_bags, width_of_pd, PointDecomposition,
    SimplifiedPointDecomposition, ValidationMode,
};
use pointdec::exec::Exec;
use pointdec::generate;
use pointdec::hypergraph::Hypergraph;
use pointdec::mim::{
    build_simplified_from_branch, flatten, gen_hn, mim_width_of_branch, BranchDecomposition,
};
use pointdec::solver::{solve, SolveOptions};
use pointdec::Error;

/// Max-CSP over point decompositions of hypergraphs.
///
/// Every command prints JSON on stdout. Exit status: 0 on success, 1 when a
/// validation fails, 2 on malformed input, 3 when a size limit is hit.
#[derive(Parser)]
#[command(name = "pointdec", version)]
struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Run data-parallel loops sequentially.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the optimum of an instance.
    ///
    /// With `--decomp` the dynamic program runs over the given point
    /// decomposition. Only cheap structural checks are made, so run
    /// `validate pd` first on decompositions from untrusted sources.
    Solve(SolveArgs),
    /// Build a decomposition.
    #[command(subcommand)]
    Decomp(DecompCommand),
    /// Check a decomposition against the definition.
    Validate {
        kind: Kind,
        #[arg(long)]
        hypergraph: PathBuf,
        #[arg(long)]
        decomp: PathBuf,
        /// Sweep every subhypergraph and realisation instead of sampling.
        #[arg(long)]
        exhaustive: bool,
    },
    /// Width of a point or simplified point decomposition.
    Width {
        #[arg(long)]
        hypergraph: PathBuf,
        #[arg(long)]
        decomp: PathBuf,
    },
    /// MIM-width of a branch decomposition of the incidence graph.
    Mimw {
        #[arg(long)]
        hypergraph: PathBuf,
        #[arg(long)]
        branch: PathBuf,
    },
    /// Coverwidth of one ordering, or the least over all orderings.
    Coverwidth {
        #[arg(long)]
        hypergraph: PathBuf,
        #[arg(long, value_delimiter = ',', conflicts_with = "exhaustive")]
        order: Option<Vec<String>>,
        #[arg(long)]
        exhaustive: bool,
    },
    /// Generate hypergraphs, instances and branch decompositions.
    #[command(subcommand)]
    Gen(GenCommand),
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, required_unless_present = "method")]
    decomp: Option<PathBuf>,
    #[arg(long, value_enum)]
    method: Option<Method>,
    /// Bound on guard size; defaults to the width of the decomposition.
    #[arg(long)]
    width: Option<usize>,
    /// Also print an optimal assignment.
    #[arg(long)]
    witness: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Dp,
    Brute,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Pd,
    Spd,
}

#[derive(Subcommand)]
enum DecompCommand {
    /// Width-1 point decomposition of a β-acyclic hypergraph.
    Beta {
        #[arg(long)]
        hypergraph: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Point decomposition from a branch decomposition.
    Mim {
        #[arg(long)]
        hypergraph: PathBuf,
        #[arg(long)]
        branch: PathBuf,
        /// Emit the simplified decomposition instead of flattening it.
        #[arg(long)]
        simplified: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Point decomposition from a vertex ordering.
    Cover {
        #[arg(long)]
        hypergraph: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        order: Vec<String>,
        #[arg(long)]
        simplified: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum GenCommand {
    /// The family H_n with its branch decomposition.
    Hn {
        #[arg(long)]
        n: usize,
    },
    /// A random hypergraph.
    Hypergraph {
        #[arg(long, default_value_t = 6)]
        vertices: usize,
        #[arg(long, default_value_t = 5)]
        edges: usize,
        /// Resample until β-acyclic.
        #[arg(long)]
        beta: bool,
    },
    /// A random instance on a given hypergraph.
    Instance {
        #[arg(long)]
        hypergraph: PathBuf,
        #[arg(long, default_value_t = 3)]
        domain: usize,
        #[arg(long, default_value_t = 8)]
        rows: usize,
    },
    /// A random branch decomposition of a hypergraph.
    Branch {
        #[arg(long)]
        hypergraph: PathBuf,
    },
}

enum Failure {
    Lib(Error),
    Report(Value),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type Outcome = std::result::Result<Value, Failure>;

fn read(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn load_hypergraph(path: &Path) -> Result<Hypergraph, Error> {
    Hypergraph::from_json(&read(path)?)
}

fn has_arcs(text: &str) -> Result<bool, Error> {
    let v: Value = serde_json::from_str(text)?;
    Ok(v.get("arcs").is_some())
}

fn emit(text: String, output: Option<&Path>) -> Outcome {
    match output {
        Some(p) => {
            fs::write(p, &text).map_err(Error::from)?;
            Ok(json!({ "written": p.display().to_string() }))
        }
        None => Ok(serde_json::from_str(&text).map_err(Error::from)?),
    }
}

fn run(cli: Cli) -> Outcome {
    let exec = if cli.sequential {
        Exec::Sequential
    } else {
        Exec::default()
    };
    let seed = cli.seed;
    match cli.command {
        Command::Solve(args) => {
            let inst = MaxCspInstance::from_json(&read(&args.instance)?)?;
            let brute = matches!(args.method, Some(Method::Brute));
            if brute {
                let (opt, witness) = brute_force_opt(&inst, exec)?;
                let mut out = json!({ "opt": format_rational(&opt) });
                if args.witness {
                    out["witness"] = json!(witness.named(&inst));
                }
                return Ok(out);
            }
            let decomp = args
                .decomp
                .as_deref()
                .ok_or_else(|| Error::Parse("--decomp is required".into()))?;
            let pd = PointDecomposition::from_json(inst.hypergraph(), &read(decomp)?)?;
            let width = match args.width {
                Some(k) => k,
                None => width_of_pd(inst.hypergraph(), &pd)?,
            };
            let opts = SolveOptions {
                width: Some(width),
                witness: args.witness,
                exec,
            };
            let sol = solve(&inst, &pd, &opts).map_err(|e| match e {
                Error::InvalidDecomposition(m) | Error::InvalidPeo(m) => {
                    Failure::Report(json!({ "error": "invalid decomposition", "detail": m }))
                }
                other => Failure::Lib(other),
            })?;
            let mut out = json!({ "opt": format_rational(&sol.opt) });
            if let Some(w) = sol.witness {
                out["witness"] = json!(w.named(&inst));
            }
            Ok(out)
        }
        Command::Decomp(DecompCommand::Beta { hypergraph, output }) => {
            let h = load_hypergraph(&hypergraph)?;
            let Some(order) = beta_elimination_order(&h) else {
                return Err(Failure::Report(
                    json!({ "error": "hypergraph is not beta-acyclic" }),
                ));
            };
            emit(build_beta_pd(&h, &order)?.to_json(&h), output.as_deref())
        }
        Command::Decomp(DecompCommand::Mim {
            hypergraph,
            branch,
            simplified,
            output,
        }) => {
            let h = load_hypergraph(&hypergraph)?;
            let bd = BranchDecomposition::from_json(&h, &read(&branch)?)?;
            let spd = build_simplified_from_branch(&h, &bd);
            finish_spd(&h, spd, simplified, exec, output.as_deref())
        }
        Command::Decomp(DecompCommand::Cover {
            hypergraph,
            order,
            simplified,
            output,
        }) => {
            let h = load_hypergraph(&hypergraph)?;
            let order = CoverOrder::from_names(&h, &order)?;
            let spd = build_spd_from_order(&h, &order)?;
            finish_spd(&h, spd, simplified, exec, output.as_deref())
        }
        Command::Validate {
            kind,
            hypergraph,
            decomp,
            exhaustive,
        } => {
            let h = load_hypergraph(&hypergraph)?;
            let text = read(&decomp)?;
            let report = match kind {
                Kind::Pd => {
                    let pd = PointDecomposition::from_json(&h, &text)?;
                    let mode = if exhaustive {
                        ValidationMode::Exhaustive
                    } else {
                        ValidationMode::Fast
                    };
                    validate_pd(&h, &pd, mode, exec, seed)?
                }
                Kind::Spd => {
                    validate_spd(&h, &SimplifiedPointDecomposition::from_json(&h, &text)?)?
                }
            };
            let value = serde_json::to_value(&report).map_err(Error::from)?;
            if report.valid {
                Ok(value)
            } else {
                Err(Failure::Report(value))
            }
        }
        Command::Width { hypergraph, decomp } => {
            let h = load_hypergraph(&hypergraph)?;
            let text = read(&decomp)?;
            let width = if has_arcs(&text)? {
                width_of_pd(&h, &PointDecomposition::from_json(&h, &text)?)?
            } else {
                width_of_bags(
                    &h,
                    &SimplifiedPointDecomposition::from_json(&h, &text)?.bags,
                )?
            };
            Ok(json!({ "width": width }))
        }
        Command::Mimw { hypergraph, branch } => {
            let h = load_hypergraph(&hypergraph)?;
            let bd = BranchDecomposition::from_json(&h, &read(&branch)?)?;
            Ok(json!({ "mimw": mim_width_of_branch(&h, &bd, exec)? }))
        }
        Command::Coverwidth {
            hypergraph,
            order,
            exhaustive: _,
        } => {
            let h = load_hypergraph(&hypergraph)?;
            let (width, order) = match order {
                Some(names) => {
                    let order = CoverOrder::from_names(&h, &names)?;
                    (coverwidth_of_order(&h, &order)?, order)
                }
                None => exhaustive_coverwidth(&h, exec)?,
            };
            Ok(json!({ "coverwidth": width, "order": order.names(&h) }))
        }
        Command::Gen(GenCommand::Hn { n }) => {
            let fam = gen_hn(n)?;
            let h: Value = serde_json::from_str(&fam.hypergraph.to_json()).map_err(Error::from)?;
            let b: Value =
                serde_json::from_str(&fam.branch.to_json(&fam.hypergraph)).map_err(Error::from)?;
            Ok(json!({ "hypergraph": h, "branch": b }))
        }
        Command::Gen(GenCommand::Hypergraph {
            vertices,
            edges,
            beta,
        }) => {
            if vertices == 0 || edges == 0 || vertices > 16 {
                return Err(
                    Error::Parse("need 1..=16 vertices and at least one edge".into()).into(),
                );
            }
            let mut rng = generate::rng(seed);
            let h = if beta {
                generate::random_beta_acyclic(&mut rng, vertices, edges)
            } else {
                generate::random_hypergraph(&mut rng, vertices, edges)
            };
            emit(h.to_json(), None)
        }
        Command::Gen(GenCommand::Instance {
            hypergraph,
            domain,
            rows,
        }) => {
            if domain == 0 || rows == 0 {
                return Err(Error::Parse("domain and rows must be positive".into()).into());
            }
            let h = load_hypergraph(&hypergraph)?;
            emit(
                generate::random_instance(&mut generate::rng(seed), &h, domain, rows).to_json(),
                None,
            )
        }
        Command::Gen(GenCommand::Branch { hypergraph }) => {
            let h = load_hypergraph(&hypergraph)?;
            emit(
                generate::random_branch(&mut generate::rng(seed), &h)?.to_json(&h),
                None,
            )
        }
    }
}

fn finish_spd(
    h: &Hypergraph,
    spd: SimplifiedPointDecomposition,
    simplified: bool,
    exec: Exec,
    output: Option<&Path>,
) -> Outcome {
    if simplified {
        return emit(spd.to_json(h), output);
    }
    let k = width_of_bags(h, &spd.bags)?;
    emit(flatten(&spd, h, k, exec)?.to_json(h), output)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(v) => {
            println!("{}", serde_json::to_string(&v).expect("json value"));
            ExitCode::SUCCESS
        }
        Err(Failure::Report(v)) => {
            println!("{}", serde_json::to_string(&v).expect("json value"));
            eprintln!("failed; see the report on stdout");
            ExitCode::from(1)
        }
        Err(Failure::Lib(e)) => {
            let code = match e {
                Error::SizeLimit { .. } => 3,
                Error::InvalidPeo(_) | Error::InvalidDecomposition(_) => 1,
                _ => 2,
            };
            println!("{}", json!({ "error": e.to_string() }));
            eprintln!("error: {e}");
            ExitCode::from(code)
        }
    }
}
