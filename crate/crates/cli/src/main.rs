//! Command-line front end: construct or load periodic graphs, print
//! spectral reports, emit band CSVs, and run the closed-form analyses.
//!
//! Exit codes: 0 success, 1 domain error (bad graph, failed computation),
//! 2 usage error (clap's default).

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use lapgraph::graph_model::{self, FundamentalGraph};
use lapgraph::{analysis, oracle, spectrum};
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "lapgraph", version, about)]
struct Cli {
    /// Cap the number of worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct GraphArg {
    /// Path to a graph file (JSON: name, nu, edges as [tail,head,t1,t2]).
    #[arg(long)]
    graph: PathBuf,
}

#[derive(Subcommand)]
enum Cmd {
    /// Write a catalog lattice to a graph file.
    Lattice {
        /// Family name: square, triangular, graphene, kagome,
        /// decorated_square, subdivided_square, perturbed_square,
        /// graphene_edge, graphene_loop, product_two_vertex.
        name: String,
        /// Family parameter as key=value (repeatable), e.g. --param nu=5.
        #[arg(long = "param")]
        params: Vec<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Modify a graph file: add an indexed edge or subdivide all edges.
    Perturb {
        #[command(flatten)]
        graph: GraphArg,
        /// Add one edge: tail head t1 t2.
        #[arg(long = "add-edge", num_args = 4, value_names = ["J", "K", "T1", "T2"])]
        add_edge: Option<Vec<i64>>,
        /// Put this many fresh vertices on every edge.
        #[arg(long)]
        subdivide: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Sample fiber eigenvalues on the torus grid and write a CSV.
    Bands {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long, default_value_t = spectrum::DEFAULT_GRID_N)]
        grid: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the spectral report document.
    Report {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long, default_value_t = spectrum::DEFAULT_GRID_N)]
        grid: usize,
        /// Polish band endpoints beyond the grid resolution.
        #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
        refine: bool,
    },
    /// Print detected flat bands.
    Flatbands {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long, default_value_t = spectrum::DEFAULT_GRID_N)]
        grid: usize,
        #[arg(long, default_value_t = spectrum::DEFAULT_FLAT_TOL)]
        tol: f64,
    },
    /// Print the bridge-count measure bound next to the computed measure.
    Estimate {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long, default_value_t = spectrum::DEFAULT_GRID_N)]
        grid: usize,
    },
    /// Compare fiber-union eigenvalues against the finite quotient graph.
    OracleCheck {
        #[command(flatten)]
        graph: GraphArg,
        /// Torus size of the quotient.
        #[arg(long = "N", default_value_t = 4)]
        n: usize,
    },
    /// Closed-form analyses for specific families.
    Analyze {
        #[command(subcommand)]
        what: AnalyzeCmd,
    },
}

#[derive(Subcommand)]
enum AnalyzeCmd {
    /// Square lattice with one extra loop of index tau.
    PerturbedSquare {
        #[arg(long, num_args = 2, value_names = ["T1", "T2"], allow_negative_numbers = true)]
        tau: Vec<i64>,
    },
    /// Hexagonal lattice with an extra edge or loop of index tau.
    Graphene {
        #[arg(long, num_args = 2, value_names = ["T1", "T2"], allow_negative_numbers = true)]
        tau: Vec<i64>,
        #[arg(long, value_parser = ["loop", "edge"])]
        attach: String,
    },
    /// Exact kagome report.
    Kagome,
    /// Two-vertex graph with edge indices d1 x d2.
    TwoVertex {
        /// Comma-separated integers, e.g. --d1 -1,0,2
        #[arg(long, allow_negative_numbers = true)]
        d1: String,
        #[arg(long, allow_negative_numbers = true)]
        d2: String,
    },
}

fn load_graph(path: &PathBuf) -> Result<FundamentalGraph> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read graph file {}", path.display()))?;
    FundamentalGraph::from_json(&text)
        .with_context(|| format!("invalid graph file {}", path.display()))
}

fn parse_int_list(s: &str) -> Result<Vec<i64>> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<i64>()
                .with_context(|| format!("bad integer `{p}`"))
        })
        .collect()
}

fn run(cli: Cli) -> Result<()> {
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .context("thread pool setup")?;
    }
    match cli.cmd {
        Cmd::Lattice { name, params, out } => {
            let params: Vec<(String, String)> = params
                .iter()
                .map(|p| {
                    p.split_once('=')
                        .map(|(k, v)| (k.to_string(), v.to_string()))
                        .with_context(|| format!("--param `{p}` is not key=value"))
                })
                .collect::<Result<_>>()?;
            let g = graph_model::catalog(&name, &params)?;
            fs::write(&out, g.to_json())
                .with_context(|| format!("cannot write {}", out.display()))?;
            println!("wrote {} (nu = {})", out.display(), g.nu());
        }
        Cmd::Perturb {
            graph,
            add_edge,
            subdivide,
            out,
        } => {
            let g = load_graph(&graph.graph)?;
            let g2 = match (add_edge, subdivide) {
                (Some(e), None) => g.add_edge(e[0] as usize, e[1] as usize, [e[2], e[3]])?,
                (None, Some(n)) => g.subdivide_all_edges(n)?,
                _ => bail!("use exactly one of --add-edge and --subdivide"),
            };
            fs::write(&out, g2.to_json())
                .with_context(|| format!("cannot write {}", out.display()))?;
            println!("wrote {} (nu = {})", out.display(), g2.nu());
        }
        Cmd::Bands { graph, grid, out } => {
            let g = load_graph(&graph.graph)?;
            let samples = spectrum::sample_grid(&g, grid)?;
            let mut file = fs::File::create(&out)
                .with_context(|| format!("cannot write {}", out.display()))?;
            spectrum::write_band_csv(&samples, &mut file)?;
            println!("wrote {} ({} rows)", out.display(), grid * grid);
        }
        Cmd::Report {
            graph,
            grid,
            refine,
        } => {
            let g = load_graph(&graph.graph)?;
            let rep = spectrum::report_with_options(&g, grid, refine)?;
            print!("{}", rep.render());
        }
        Cmd::Flatbands { graph, grid, tol } => {
            let g = load_graph(&graph.graph)?;
            let flats = spectrum::flat_bands(&g, grid, tol)?;
            if flats.is_empty() {
                println!("no flat bands");
            }
            for f in flats {
                println!(
                    "flat band: value={} multiplicity={} excess_points={}",
                    f.value, f.multiplicity, f.excess_points
                );
            }
        }
        Cmd::Estimate { graph, grid } => {
            let g = load_graph(&graph.graph)?;
            let bound = spectrum::measure_estimate(&g);
            let rep = spectrum::report(&g, grid)?;
            println!("bridge bound: {bound}");
            println!("computed measure: {}", rep.measure);
        }
        Cmd::OracleCheck { graph, n } => {
            let g = load_graph(&graph.graph)?;
            let d = oracle::max_discrepancy(&g, n)?;
            println!("max discrepancy: {d:e}");
        }
        Cmd::Analyze { what } => run_analyze(what)?,
    }
    Ok(())
}

fn run_analyze(what: AnalyzeCmd) -> Result<()> {
    match what {
        AnalyzeCmd::PerturbedSquare { tau } => {
            let r = analysis::perturbed_square([tau[0], tau[1]]);
            println!("tau: ({}, {})", r.tau[0], r.tau[1]);
            println!("lambda_minus: {}", r.lambda_minus);
            println!("method: {:?}", r.method);
            if let Some(ratio) = r.asymptotic_ratio {
                println!("asymptotic_ratio: {ratio}");
            }
        }
        AnalyzeCmd::Graphene { tau, attach } => {
            let attach = if attach == "loop" {
                analysis::GrapheneAttach::Loop
            } else {
                analysis::GrapheneAttach::V1V2Edge
            };
            let r = analysis::perturbed_graphene([tau[0], tau[1]], attach);
            println!("tau: ({}, {})", r.tau[0], r.tau[1]);
            println!("case: {:?}", r.case);
            for (lo, hi) in &r.intervals {
                println!("interval: [{lo}, {hi}]");
            }
            if let Some((lo, hi)) = r.gap {
                println!("gap: ({lo}, {hi})");
            }
            println!("measure: {}", r.measure);
        }
        AnalyzeCmd::Kagome => {
            print!("{}", analysis::kagome_closed_form().render());
        }
        AnalyzeCmd::TwoVertex { d1, d2 } => {
            let (d1, d2) = (parse_int_list(&d1)?, parse_int_list(&d2)?);
            let (lambda0, theta) = analysis::two_vertex_gap(&d1, &d2)?;
            println!("lambda0: {lambda0}");
            println!("extremizer: ({}, {})", theta[0], theta[1]);
            println!("spectrum: [-1, {}] U [{}, 1]", -lambda0, lambda0);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
