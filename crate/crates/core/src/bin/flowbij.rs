//! Command-line surface: solve, orient, underlying, count, verify, paths.
//!
//! Exit codes: 0 success, 1 input error, 2 infeasible, 3 verification
//! failure or count mismatch.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use flowbij::connectivity::{k_disjoint_paths, st_demand, vertex_split, PathError, PathSet};
use flowbij::enumeration::{
    enumerate_feasible, verify_bijection, EnumConfig, MaskKind, VerifyMode,
};
use flowbij::graph::{
    decode_orientation_mask, decode_subgraph_mask, encode_orientation_mask, encode_subgraph_mask,
};
use flowbij::{bijection, mcf, Demand, DirectedSubgraph, VertexId, WeightedGraph};

#[derive(Parser)]
#[command(name = "flowbij", version, about = "Flow-preserving bijection between subgraphs and orientations", disable_help_subcommand = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct DemandArgs {
    /// Demand file with lines `d <u> <value>`.
    #[arg(long, value_name = "FILE", conflicts_with = "st")]
    demand: Option<PathBuf>,
    /// Route K units from S to T.
    #[arg(long, num_args = 3, value_names = ["S", "T", "K"])]
    st: Option<Vec<u32>>,
}

#[derive(Args)]
struct RestrictArgs {
    /// Restrict to the subgraph with this m-bit mask.
    #[arg(long, value_name = "MASK", conflicts_with = "orientation")]
    subgraph: Option<String>,
    /// Restrict to the orientation with this m-bit mask.
    #[arg(long, value_name = "MASK")]
    orientation: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Print the min-cost flow A(D) for a demand.
    Solve {
        graph: PathBuf,
        #[command(flatten)]
        demand: DemandArgs,
        #[command(flatten)]
        restrict: RestrictArgs,
        #[arg(long)]
        json: bool,
    },
    /// Map a subgraph mask to its orientation mask.
    Orient {
        graph: PathBuf,
        #[command(flatten)]
        demand: DemandArgs,
        #[arg(long, value_name = "MASK")]
        subgraph: String,
        /// Print the rule fired at each step.
        #[arg(long)]
        trace: bool,
        #[arg(long)]
        json: bool,
    },
    /// Map an orientation mask back to its subgraph mask.
    Underlying {
        graph: PathBuf,
        #[command(flatten)]
        demand: DemandArgs,
        #[arg(long, value_name = "MASK")]
        orientation: String,
        #[arg(long)]
        trace: bool,
        #[arg(long)]
        json: bool,
    },
    /// Exhaustively count feasible subgraphs and orientations.
    Count {
        graph: PathBuf,
        #[command(flatten)]
        demand: DemandArgs,
        #[arg(long)]
        json: bool,
    },
    /// Run the verification claims and print the report.
    Verify {
        graph: PathBuf,
        #[command(flatten)]
        demand: DemandArgs,
        /// Sampled mode instead of exhaustive: a seed and a trial count.
        #[arg(long, num_args = 2, value_names = ["SEED", "TRIALS"])]
        sampled: Option<Vec<u64>>,
        /// Append the wall time to the report.
        #[arg(long)]
        timing: bool,
        #[arg(long)]
        json: bool,
    },
    /// Print the minimal k arc-disjoint (or vertex-disjoint) paths.
    Paths {
        graph: PathBuf,
        #[arg(long, num_args = 3, value_names = ["S", "T", "K"], required = true)]
        st: Vec<u32>,
        #[command(flatten)]
        restrict: RestrictArgs,
        /// Split interior vertices so the paths are vertex-disjoint.
        #[arg(long)]
        vertex_disjoint: bool,
        #[arg(long)]
        json: bool,
    },
}

enum CliError {
    Input(String),
    Infeasible,
    VerificationFailed,
}

impl From<PathError> for CliError {
    fn from(e: PathError) -> Self {
        match e {
            PathError::Infeasible => CliError::Infeasible,
            other => CliError::Input(other.to_string()),
        }
    }
}

fn input_err(e: impl std::fmt::Display) -> CliError {
    CliError::Input(e.to_string())
}

fn load_graph(path: &PathBuf) -> Result<WeightedGraph, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    WeightedGraph::parse(&text).map_err(input_err)
}

fn load_demand(g: &WeightedGraph, args: &DemandArgs) -> Result<Demand, CliError> {
    match (&args.demand, &args.st) {
        (Some(path), None) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
            Demand::parse(g.vertex_count(), &text).map_err(input_err)
        }
        (None, Some(st)) => {
            st_demand(g.vertex_count(), VertexId(st[0]), VertexId(st[1]), st[2])
                .map_err(|e| CliError::Input(e.to_string()))
        }
        _ => Err(CliError::Input(
            "exactly one of --demand and --st is required".to_string(),
        )),
    }
}

fn load_restriction(
    g: &WeightedGraph,
    restrict: &RestrictArgs,
) -> Result<DirectedSubgraph, CliError> {
    match (&restrict.subgraph, &restrict.orientation) {
        (Some(mask), None) => decode_subgraph_mask(g, mask).map_err(input_err),
        (None, Some(mask)) => decode_orientation_mask(g, mask).map_err(input_err),
        (None, None) => Ok(DirectedSubgraph::all(g)),
        _ => unreachable!("clap enforces the conflict"),
    }
}

fn render_paths(ps: &PathSet) -> String {
    let mut out = String::new();
    for path in &ps.paths {
        let line: Vec<String> = path.iter().map(|v| v.to_string()).collect();
        let _ = writeln!(out, "{}", line.join(">"));
    }
    let _ = writeln!(out, "total {}", ps.total_weight);
    out
}

fn paths_json(ps: &PathSet) -> serde_json::Value {
    json!({
        "paths": ps.paths.iter()
            .map(|p| p.iter().map(|v| v.0).collect::<Vec<_>>())
            .collect::<Vec<_>>(),
        "total_weight": ps.total_weight,
    })
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Solve {
            graph,
            demand,
            restrict,
            json,
        } => {
            let g = load_graph(&graph)?;
            let d = load_demand(&g, &demand)?;
            let restriction = load_restriction(&g, &restrict)?;
            let flow = mcf::min_cost_flow(&g, &restriction, &d).ok_or(CliError::Infeasible)?;
            if json {
                let arcs: Vec<String> = flow
                    .support
                    .arcs(&g)
                    .iter()
                    .map(|a| a.to_string())
                    .collect();
                println!(
                    "{}",
                    json!({ "arcs": arcs, "base_cost": flow.cost.base })
                );
            } else {
                for arc in flow.support.arcs(&g) {
                    println!("{arc}");
                }
                println!("cost {}", flow.cost.base);
            }
            Ok(())
        }
        Command::Orient {
            graph,
            demand,
            subgraph,
            trace,
            json,
        } => {
            let g = load_graph(&graph)?;
            let d = load_demand(&g, &demand)?;
            let k = decode_subgraph_mask(&g, &subgraph).map_err(input_err)?;
            let run = bijection::phi_run(&g, &d, &k).map_err(map_bijection_err)?;
            let mask = encode_orientation_mask(&run.image).expect("phi image is an orientation");
            emit_map_result(&run, mask, trace, json);
            Ok(())
        }
        Command::Underlying {
            graph,
            demand,
            orientation,
            trace,
            json,
        } => {
            let g = load_graph(&graph)?;
            let d = load_demand(&g, &demand)?;
            let l = decode_orientation_mask(&g, &orientation).map_err(input_err)?;
            let run = bijection::psi_run(&g, &d, &l).map_err(map_bijection_err)?;
            let mask = encode_subgraph_mask(&run.image).expect("psi image is a subgraph");
            emit_map_result(&run, mask, trace, json);
            Ok(())
        }
        Command::Count { graph, demand, json } => {
            let g = load_graph(&graph)?;
            let d = load_demand(&g, &demand)?;
            let cfg = EnumConfig::default();
            let subs = enumerate_feasible(&g, &d, MaskKind::Subgraph, &cfg).map_err(input_err)?;
            let oris =
                enumerate_feasible(&g, &d, MaskKind::Orientation, &cfg).map_err(input_err)?;
            if json {
                println!(
                    "{}",
                    json!({ "subgraphs": subs.len(), "orientations": oris.len() })
                );
            } else {
                println!("S_f {}", subs.len());
                println!("O_f {}", oris.len());
            }
            if subs.len() == oris.len() {
                Ok(())
            } else {
                Err(CliError::VerificationFailed)
            }
        }
        Command::Verify {
            graph,
            demand,
            sampled,
            timing,
            json,
        } => {
            let g = load_graph(&graph)?;
            let d = load_demand(&g, &demand)?;
            let mode = match sampled {
                Some(v) => VerifyMode::Sampled {
                    seed: v[0],
                    trials: v[1] as usize,
                },
                None => VerifyMode::Exhaustive,
            };
            let report =
                verify_bijection(&g, &d, mode, &EnumConfig::default()).map_err(input_err)?;
            if json {
                println!("{}", serde_json::to_string(&report).expect("serializable"));
            } else {
                print!("{}", report.render(timing));
            }
            if report.all_pass() {
                Ok(())
            } else {
                Err(CliError::VerificationFailed)
            }
        }
        Command::Paths {
            graph,
            st,
            restrict,
            vertex_disjoint,
            json,
        } => {
            let g = load_graph(&graph)?;
            let (s, t, k) = (VertexId(st[0]), VertexId(st[1]), st[2]);
            let restriction = load_restriction(&g, &restrict)?;
            let ps = if vertex_disjoint {
                let interior: Vec<VertexId> =
                    g.vertices().filter(|&v| v != s && v != t).collect();
                let split = vertex_split(&g, &interior);
                let lifted = split.lift(&g, &restriction);
                let raw =
                    k_disjoint_paths(&split.graph, &lifted, split.source(s), split.target(t), k)?;
                split.project_paths(&raw)
            } else {
                k_disjoint_paths(&g, &restriction, s, t, k)?
            };
            if json {
                println!("{}", paths_json(&ps));
            } else {
                print!("{}", render_paths(&ps));
            }
            Ok(())
        }
    }
}

fn map_bijection_err(e: bijection::BijectionError) -> CliError {
    match e {
        bijection::BijectionError::Infeasible => CliError::Infeasible,
        other => CliError::Input(other.to_string()),
    }
}

fn emit_map_result(run: &bijection::MapRun, mask: String, trace: bool, json: bool) {
    if json {
        let steps: Vec<serde_json::Value> = run
            .steps
            .iter()
            .map(|s| json!({ "step": s.slot, "rule": s.rule, "arc": s.arc.to_string() }))
            .collect();
        if trace {
            println!("{}", json!({ "mask": mask, "steps": steps }));
        } else {
            println!("{}", json!({ "mask": mask }));
        }
    } else {
        if trace {
            for s in &run.steps {
                println!("step {} rule {} arc {}", s.slot, s.rule, s.arc);
            }
        }
        println!("{mask}");
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version requests are not errors
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Infeasible) => {
            println!("infeasible");
            ExitCode::from(2)
        }
        Err(CliError::VerificationFailed) => ExitCode::from(3),
    }
}
