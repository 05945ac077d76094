//! Batch front door for the rectangle-graph engine.
//!
//! Exit codes: 0 success, 2 a genericity constraint is violated, 3 a
//! structure-theorem counterexample was found (which would indicate a bug),
//! 4 a budget or sampling limit was exhausted, 1 any other error.

use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use rectgraph::comb::{enumerate_graphs, lift_component, CombGraph, LiftOutcome};
use rectgraph::constraints::{
    check_all, default_relation_bound, describe_violation, sample_generic,
};
use rectgraph::degeneracy::{
    find_relations, is_allowable, is_degenerate_resonant, verify_structure_theorem,
};
use rectgraph::error::Error;
use rectgraph::export;
use rectgraph::geometry::{components_in_box, BoxSpec};
use rectgraph::realization::{
    affine_independence, build_system, generic_realization, rank_info, solve_numeric,
};
use rectgraph::SiteSet;

#[derive(Parser)]
#[command(name = "rectgraph", version, about = "exact rectangle-graph engine")]
struct Cli {
    /// Worker threads for parallel enumeration (falls back to RGE_WORKERS,
    /// then to the available parallelism).
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// Output file (stdout when omitted).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Dot,
}

#[derive(Subcommand)]
enum Cmd {
    /// Rejection-sample an integral site set passing all genericity checks.
    SampleSites {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        /// Coordinate range as LO:HI.
        #[arg(long, value_name = "LO:HI", default_value = "-20:20", allow_hyphen_values = true)]
        r#box: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1_000_000)]
        tries: u64,
    },
    /// Check the five genericity constraints for a sites file.
    CheckGeneric {
        #[arg(long)]
        sites: PathBuf,
        /// ℓ1 bound for the relation and sphere constraints (default 4(n+1)).
        #[arg(long)]
        bound: Option<i64>,
    },
    /// Find the rectangle-graph components inside a lattice window.
    Components {
        #[arg(long)]
        sites: PathBuf,
        #[arg(long, value_name = "LO:HI", allow_hyphen_values = true)]
        r#box: String,
        /// Lattice denominator: points have coordinates in (1/denom) Z.
        #[arg(long, default_value_t = 1)]
        denom: u32,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Lift every non-special component of the window to the Cayley side.
    Lift {
        #[arg(long)]
        sites: PathBuf,
        #[arg(long, value_name = "LO:HI", allow_hyphen_values = true)]
        r#box: String,
        #[arg(long, default_value_t = 1)]
        denom: u32,
        /// Vertex budget for each lift (default 2n+2).
        #[arg(long)]
        budget: Option<usize>,
    },
    /// Solve the realization system of a combinatorial graph at given sites.
    Realize {
        #[arg(long)]
        sites: PathBuf,
        #[arg(long)]
        graph: PathBuf,
    },
    /// Enumerate combinatorial graphs up to equivalence.
    Enumerate {
        #[arg(long)]
        m: usize,
        /// Maximum vertex count including the root.
        #[arg(long)]
        budget: usize,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Rank, degeneracy, resonance, allowability and generic realizability
    /// of one combinatorial graph.
    Classify {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Exhaustively verify that degenerate-resonant graphs are never
    /// allowable, up to the vertex budget.
    VerifyMm {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        budget: usize,
    },
}

fn read_sites(path: &PathBuf) -> anyhow::Result<SiteSet> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {path:?}"))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {path:?}"))
}

fn read_graph(path: &PathBuf) -> anyhow::Result<CombGraph> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {path:?}"))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {path:?}"))
}

fn emit(out: &Option<PathBuf>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {path:?}"))?,
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
        }
    }
    Ok(())
}

fn emit_json<T: Serialize>(out: &Option<PathBuf>, value: &T) -> anyhow::Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    emit(out, &text)
}

fn exit_code_for(err: &anyhow::Error) -> u8 {
    if let Some(Error::SamplingExhausted { .. } | Error::BudgetExceeded(_)) =
        err.downcast_ref::<Error>()
    {
        return 4;
    }
    1
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let workers = cli
        .workers
        .or_else(|| std::env::var("RGE_WORKERS").ok().and_then(|s| s.parse().ok()));
    if let Some(w) = workers {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(w).build_global();
    }
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.cmd {
        Cmd::SampleSites {
            n,
            m,
            r#box,
            seed,
            tries,
        } => {
            let window = BoxSpec::parse_cube(&r#box, n, 1)?;
            let sites = sample_generic(n, m, window.lo[0], window.hi[0], seed, tries)?;
            emit_json(&cli.out, &sites)?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::CheckGeneric { sites, bound } => {
            let s = read_sites(&sites)?;
            let bound = bound.unwrap_or_else(|| default_relation_bound(s.n()));
            let report = check_all(&s, bound);
            #[derive(Serialize)]
            struct Out<'a> {
                passed: bool,
                bound: i64,
                violations: &'a [rectgraph::constraints::Violation],
                descriptions: Vec<String>,
            }
            let descriptions = report
                .violations
                .iter()
                .map(|v| describe_violation(&s, v))
                .collect();
            emit_json(
                &cli.out,
                &Out {
                    passed: report.passed,
                    bound,
                    violations: &report.violations,
                    descriptions,
                },
            )?;
            Ok(if report.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            })
        }
        Cmd::Components {
            sites,
            r#box,
            denom,
            format,
        } => {
            let s = read_sites(&sites)?;
            let window = BoxSpec::parse_cube(&r#box, s.n(), denom)?;
            let comps = components_in_box(&s, &window)?;
            match format {
                Format::Dot => {
                    let text: String = comps.iter().map(export::component_dot).collect();
                    emit(&cli.out, &text)?;
                }
                Format::Json => {
                    #[derive(Serialize)]
                    struct Annotated<'a> {
                        #[serde(flatten)]
                        component: &'a rectgraph::geometry::Component,
                        affinely_independent: bool,
                    }
                    #[derive(Serialize)]
                    struct Out<'a> {
                        total: usize,
                        components: Vec<Annotated<'a>>,
                    }
                    let components = comps
                        .iter()
                        .map(|c| Annotated {
                            component: c,
                            affinely_independent: affine_independence(&c.vertices).0,
                        })
                        .collect();
                    emit_json(
                        &cli.out,
                        &Out {
                            total: comps.len(),
                            components,
                        },
                    )?;
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Lift {
            sites,
            r#box,
            denom,
            budget,
        } => {
            let s = read_sites(&sites)?;
            let window = BoxSpec::parse_cube(&r#box, s.n(), denom)?;
            let budget = budget.unwrap_or(2 * s.n() + 2);
            let comps = components_in_box(&s, &window)?;
            #[derive(Serialize)]
            struct Entry {
                root: Vec<String>,
                vertices: usize,
                touches_boundary: bool,
                lift: LiftOutcome,
            }
            let mut entries = Vec::new();
            let mut exhausted = false;
            for c in comps.iter().filter(|c| !c.is_special) {
                let root = &c.vertices[0];
                let lift = lift_component(&s, root, budget)?;
                if matches!(lift, LiftOutcome::BudgetExceeded { .. }) {
                    exhausted = true;
                }
                entries.push(Entry {
                    root: root.iter().map(rectgraph::scalar::format_scalar).collect(),
                    vertices: c.vertices.len(),
                    touches_boundary: c.touches_boundary,
                    lift,
                });
            }
            emit_json(&cli.out, &entries)?;
            Ok(if exhausted {
                ExitCode::from(4)
            } else {
                ExitCode::SUCCESS
            })
        }
        Cmd::Realize { sites, graph } => {
            let s = read_sites(&sites)?;
            let g = read_graph(&graph)?;
            let sys = build_system(&g)?;
            let result = solve_numeric(&s, &sys)?;
            #[derive(Serialize)]
            struct Out {
                connected: bool,
                rows: usize,
                result: rectgraph::realization::RealizationResult,
            }
            emit_json(
                &cli.out,
                &Out {
                    connected: g.is_connected(),
                    rows: sys.rows.len(),
                    result,
                },
            )?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Enumerate { m, budget, format } => {
            let graphs = enumerate_graphs(m, budget, 2 * (budget as i64 - 1).max(1));
            match format {
                Format::Dot => {
                    let text: String = graphs.iter().map(export::comb_graph_dot).collect();
                    emit(&cli.out, &text)?;
                }
                Format::Json => {
                    #[derive(Serialize)]
                    struct Out {
                        m: usize,
                        max_vertices: usize,
                        count: usize,
                        graphs: Vec<CombGraph>,
                    }
                    emit_json(
                        &cli.out,
                        &Out {
                            m,
                            max_vertices: budget,
                            count: graphs.len(),
                            graphs,
                        },
                    )?;
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Classify {
            graph,
            n,
            samples,
            seed,
        } => {
            let g = read_graph(&graph)?;
            let info = rank_info(&g);
            let relations = find_relations(&g);
            let (allowable, witness) = is_allowable(&g);
            let outcome = generic_realization(&g, n, samples, seed)?;
            #[derive(Serialize)]
            struct Out {
                rank_info: rectgraph::realization::RankInfo,
                connected: bool,
                relations: Vec<Vec<i64>>,
                degenerate: bool,
                degenerate_resonant: bool,
                allowable: bool,
                witness: Option<rectgraph::degeneracy::AllowabilityWitness>,
                generic_outcome: rectgraph::realization::GenericOutcome,
            }
            emit_json(
                &cli.out,
                &Out {
                    rank_info: info,
                    connected: g.is_connected(),
                    degenerate: !relations.basis.is_empty(),
                    degenerate_resonant: is_degenerate_resonant(&g),
                    relations: relations.basis,
                    allowable,
                    witness,
                    generic_outcome: outcome,
                },
            )?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::VerifyMm { m, budget } => {
            let report = verify_structure_theorem(m, budget);
            let failed = !report.counterexamples.is_empty();
            emit_json(&cli.out, &report)?;
            Ok(if failed {
                ExitCode::from(3)
            } else {
                ExitCode::SUCCESS
            })
        }
    }
}
