use std::collections::BTreeSet;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;

use favoid::driver::{solve, SolveOptions, Status};
use favoid::experiment::{run_experiment, ExperimentConfig, ExperimentError};
use favoid::generators::{
    gen_2degenerate, gen_bipartite, gen_clique, gen_k6_minus_matching, gen_multigraph, gen_regular,
    k222_decomposition, GenError,
};
use favoid::io::{
    emit_instance, parse_decomposition, parse_instance, report_json, InstanceFile, ParseError,
};
use favoid::lists::{
    check_end_holes, check_lasso_lists, check_lasso_lists_strict, check_strict_half,
    check_weak_half, interval_profile, ListError,
};
use favoid::oracle::{oracle_decide, verify, OracleError, OracleStatus, DEFAULT_BUDGET};
use favoid::{ForbiddenLists, MultiGraph};

const EXIT_SAT: u8 = 0;
const EXIT_UNSAT: u8 = 1;
const EXIT_GIVEUP: u8 = 2;
const EXIT_INPUT: u8 = 3;

#[derive(Debug, Error)]
enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: ParseError },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Generator(#[from] GenError),
    #[error(transparent)]
    Lists(#[from] ListError),
    #[error(transparent)]
    Experiment(#[from] ExperimentError),
    #[error("output: {0}")]
    Output(String),
}

#[derive(Parser)]
#[command(
    name = "favoid",
    version,
    about = "Orientations avoiding forbidden out-degrees"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Find an F-avoiding orientation or prove there is none.
    Solve {
        instance: PathBuf,
        /// Bipartite + H edge decomposition (two lines of edge indices).
        #[arg(long)]
        decomp: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        oracle_budget: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Print the versioned JSON report instead of an instance file.
        #[arg(long)]
        json: bool,
    },
    /// Check the orientation section of an instance file.
    Verify { instance: PathBuf },
    /// Exhaustive enumeration of all 2^m orientations.
    Oracle {
        instance: PathBuf,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: usize,
    },
    /// Hole/home tables and hypothesis checks.
    Profile { instance: PathBuf },
    /// Print a generated instance.
    Gen {
        #[command(subcommand)]
        family: GenFamily,
        /// Common forbidden set for every vertex, e.g. `2,3`; values above a
        /// vertex's degree are dropped.
        #[arg(long, global = true, value_delimiter = ',')]
        forbid: Vec<usize>,
    },
    /// Run a JSON-configured sweep and print the success table.
    Experiment {
        config: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
}

#[derive(Subcommand)]
enum GenFamily {
    /// Configuration-model d-regular multigraph.
    Regular {
        n: usize,
        d: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    Clique {
        n: usize,
    },
    TwoDegenerate {
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// K6 minus a matching; size 3 also emits the K2,4 + C4 decomposition.
    K6MinusMatching {
        size: usize,
    },
    Bipartite {
        a: usize,
        b: usize,
        p: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    Multigraph {
        n: usize,
        m: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn load(path: &Path) -> Result<InstanceFile, CliError> {
    parse_instance(&read(path)?).map_err(|source| CliError::Parse {
        path: path.to_path_buf(),
        source,
    })
}

fn out(text: &str) -> Result<(), CliError> {
    io::stdout()
        .write_all(text.as_bytes())
        .map_err(|e| CliError::Output(e.to_string()))
}

fn status_code(s: Status) -> u8 {
    match s {
        Status::Sat => EXIT_SAT,
        Status::Unsat => EXIT_UNSAT,
        Status::GiveUp => EXIT_GIVEUP,
    }
}

fn run(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::Solve {
            instance,
            decomp,
            oracle_budget,
            seed,
            json,
        } => {
            let mut file = load(&instance)?;
            let decomposition = match decomp {
                Some(p) => Some(
                    parse_decomposition(&read(&p)?, file.graph.edge_count())
                        .map_err(|source| CliError::Parse { path: p, source })?,
                ),
                None => file.decomposition.clone(),
            };
            let options = SolveOptions {
                oracle_budget,
                seed,
                decomposition,
                ..SolveOptions::default()
            };
            let report = solve(&file.graph, &file.lists, &options);
            if json {
                out(&report_json(&file.graph, &report))?;
                out("\n")?;
            } else {
                let guarantee = report
                    .guarantee
                    .map_or("none".to_string(), |g| format!("{g:?}").to_uppercase());
                out(&format!(
                    "# status {} via {} ({guarantee})\n",
                    report.status,
                    report.methods.join(" > ")
                ))?;
                if let Some(cert) = &report.certificate {
                    out(&format!(
                        "# certificate {}\n",
                        serde_json::to_string(cert).map_err(|e| CliError::Output(e.to_string()))?
                    ))?;
                }
                file.orientation = report.orientation.clone();
                out(&emit_instance(&file))?;
            }
            Ok(status_code(report.status))
        }
        Command::Verify { instance } => {
            let file = load(&instance)?;
            let d = file.orientation.as_ref().ok_or_else(|| {
                CliError::Usage(format!("{}: no orientation section", instance.display()))
            })?;
            let v = verify(&file.graph, d, &file.lists);
            if v.ok {
                out("ok\n")?;
                Ok(EXIT_SAT)
            } else {
                for (vertex, k) in &v.violations {
                    out(&format!(
                        "violation: vertex {vertex} has forbidden out-degree {k}\n"
                    ))?;
                }
                Ok(EXIT_UNSAT)
            }
        }
        Command::Oracle { instance, budget } => {
            let file = load(&instance)?;
            match oracle_decide(&file.graph, &file.lists, budget) {
                Ok(r) => {
                    let sat = r.status == OracleStatus::Sat;
                    out(&format!(
                        "status {}\nsolutions {}\nenumerated {}\n",
                        if sat { "SAT" } else { "UNSAT" },
                        r.solution_count,
                        r.enumerated_count
                    ))?;
                    if let Some(w) = &r.witness {
                        out("orientation\n")?;
                        out(&favoid::io::emit_orientation(&file.graph, w))?;
                    }
                    Ok(if sat { EXIT_SAT } else { EXIT_UNSAT })
                }
                Err(e @ OracleError::BudgetExceeded { .. }) => {
                    eprintln!("{e}");
                    out("status GIVEUP\n")?;
                    Ok(EXIT_GIVEUP)
                }
                Err(e) => Err(CliError::Usage(e.to_string())),
            }
        }
        Command::Profile { instance } => {
            let file = load(&instance)?;
            out(&profile(&file.graph, &file.lists)?)?;
            Ok(EXIT_SAT)
        }
        Command::Gen { family, forbid } => {
            let (graph, decomposition) = match family {
                GenFamily::Regular { n, d, seed } => (gen_regular(n, d, seed)?, None),
                GenFamily::Clique { n } => (gen_clique(n), None),
                GenFamily::TwoDegenerate { n, seed } => (gen_2degenerate(n, seed), None),
                GenFamily::K6MinusMatching { size } => {
                    let g = gen_k6_minus_matching(size)?;
                    let dec = (size == 3).then(|| k222_decomposition(&g));
                    (g, dec)
                }
                GenFamily::Bipartite { a, b, p, seed } => (gen_bipartite(a, b, p, seed)?, None),
                GenFamily::Multigraph { n, m, seed } => (gen_multigraph(n, m, seed)?, None),
            };
            let set: BTreeSet<usize> = forbid.into_iter().collect();
            let lists = ForbiddenLists::clipped(&graph, vec![set; graph.vertex_count()])?;
            let mut file = InstanceFile::new(graph, lists);
            file.decomposition = decomposition;
            out(&emit_instance(&file))?;
            Ok(EXIT_SAT)
        }
        Command::Experiment { config, format } => {
            let cfg = ExperimentConfig::from_json(&read(&config)?)?;
            let rows = run_experiment(&cfg)?;
            match format {
                Format::Json => {
                    let text = serde_json::to_string_pretty(&rows)
                        .map_err(|e| CliError::Output(e.to_string()))?;
                    out(&text)?;
                    out("\n")?;
                }
                Format::Csv => {
                    let mut w = csv::Writer::from_writer(io::stdout());
                    for row in &rows {
                        w.serialize(row)
                            .map_err(|e| CliError::Output(e.to_string()))?;
                    }
                    w.flush().map_err(|e| CliError::Output(e.to_string()))?;
                }
            }
            Ok(EXIT_SAT)
        }
    }
}

fn join(xs: &[usize]) -> String {
    if xs.is_empty() {
        "-".into()
    } else {
        xs.iter()
            .map(usize::to_string)
            .collect::<Vec<_>>()
            .join(",")
    }
}

fn profile(g: &MultiGraph, f: &ForbiddenLists) -> Result<String, CliError> {
    let p = interval_profile(f, g)?;
    let mut s = String::from("vertex\tdegree\tforbidden\tintervals\tA\tB\tX\n");
    for (v, vp) in p.vertices().iter().enumerate() {
        let forbidden: Vec<usize> = f.get(v).iter().copied().collect();
        let intervals: Vec<String> = vp.intervals.iter().map(|i| i.to_string()).collect();
        s.push_str(&format!(
            "{v}\t{}\t{}\t{}\t{}\t{}\t{}\n",
            vp.degree,
            join(&forbidden),
            intervals.join(" "),
            join(&vp.above()),
            join(&vp.below()),
            join(&vp.far()),
        ));
    }
    let (k, _) = g.degeneracy();
    let regular = g
        .regular_degree()
        .map_or("no".to_string(), |d| format!("yes (d={d})"));
    s.push_str(&format!(
        "strict-half: {}\nweak-half: {}\nlasso-lists: {}\nlasso-lists-strict-ends: {}\n\
         end-holes: {}\ntwo-degenerate: {} (degeneracy {k})\nregular: {regular}\n",
        check_strict_half(f, g),
        check_weak_half(f, g),
        check_lasso_lists(&p),
        check_lasso_lists_strict(&p),
        check_end_holes(&p),
        k <= 2,
    ));
    Ok(s)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_SAT };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}
