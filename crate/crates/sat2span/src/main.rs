use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use sat2span::budget::{Budget, DEFAULT_BUDGET};
use sat2span::channel::{span_of, solve_exact, ChannelError, SolveOutcome};
use sat2span::cnf::CnfFormula;
use sat2span::formats::{read_ca, write_ca, write_cmw, write_family, CaFile, HandleRole};
use sat2span::pipeline::{build_artifacts, stats, verify};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const EXIT_OK: u8 = 0;
const EXIT_DISAGREEMENT: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_BUDGET: u8 = 3;

#[derive(Parser)]
#[command(name = "sat2span", about = "Staged reductions from CNF satisfiability to channel assignment")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Stage {
    Family,
    Cmw,
    Ca,
}

#[derive(Subcommand)]
enum Command {
    /// Reduce a DIMACS formula to a later stage and write the artifact.
    Reduce {
        input: PathBuf,
        /// Clause width of the input formula.
        #[arg(long, default_value_t = 3)]
        width: usize,
        /// Target stage.
        #[arg(long, value_enum)]
        to: Stage,
        /// Output path prefix; defaults to the input path without extension.
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Run every stage oracle and cross-check the verdicts.
    Verify {
        input: PathBuf,
        #[arg(long, default_value_t = 3)]
        width: usize,
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Solve a channel assignment file exactly up to a span cap.
    Solve {
        input: PathBuf,
        /// Span cap; defaults to the file's span bound.
        #[arg(long)]
        cap: Option<BigUint>,
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Print the size identities of every stage.
    Stats {
        input: PathBuf,
        #[arg(long, default_value_t = 3)]
        width: usize,
        #[arg(long)]
        budget: Option<u64>,
    },
}

fn effective_budget(flag: Option<u64>) -> Budget {
    if let Some(nodes) = flag {
        return Budget(nodes);
    }
    std::env::var("SAT2SPAN_BUDGET")
        .ok()
        .and_then(|v| v.parse().ok())
        .map(Budget)
        .unwrap_or(Budget(DEFAULT_BUDGET))
}

fn read_formula(path: &Path, width: usize) -> Result<CnfFormula, u8> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        eprintln!("error: cannot read {}: {e}", path.display());
        EXIT_INPUT
    })?;
    CnfFormula::parse_dimacs(&text, width).map_err(|e| {
        eprintln!("error: {}: {e}", path.display());
        EXIT_INPUT
    })
}

fn write_file(path: &Path, contents: &str) -> anyhow::Result<()> {
    std::fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn run_reduce(
    input: PathBuf,
    width: usize,
    to: Stage,
    output: Option<PathBuf>,
    budget: Budget,
) -> Result<u8, u8> {
    let formula = read_formula(&input, width)?;
    let prefix = output.unwrap_or_else(|| input.with_extension(""));
    let artifacts = build_artifacts(&formula, budget).map_err(|e| {
        eprintln!("error: {e}");
        if e.is_budget() { EXIT_BUDGET } else { EXIT_INPUT }
    })?;
    let write = |path: &Path, contents: &str| {
        write_file(path, contents).map_err(|e| {
            eprintln!("error: {e}");
            EXIT_INPUT
        })
    };
    match to {
        Stage::Family => {
            let f_path = prefix.with_extension("f.family");
            let g_path = prefix.with_extension("g.family");
            write(&f_path, &write_family(&artifacts.consistency_family))?;
            write(&g_path, &write_family(&artifacts.satisfaction_family))?;
            println!(
                "wrote {} ({}x{}) and {} ({}x{})",
                f_path.display(),
                artifacts.consistency_family.rows(),
                artifacts.consistency_family.columns(),
                g_path.display(),
                artifacts.satisfaction_family.rows(),
                artifacts.satisfaction_family.columns()
            );
        }
        Stage::Cmw => {
            let path = prefix.with_extension("cmw");
            write(&path, &write_cmw(&artifacts.cmw.consistency_graph, &artifacts.cmw.satisfaction_graph))?;
            println!(
                "wrote {} (sides {} and {})",
                path.display(),
                artifacts.cmw.consistency_graph.side(),
                artifacts.cmw.satisfaction_graph.side()
            );
        }
        Stage::Ca => {
            let path = prefix.with_extension("ca");
            let merged = &artifacts.merged;
            let mut handles = std::collections::BTreeMap::new();
            handles.insert(HandleRole::WLeft1, merged.w_left_1.clone());
            handles.insert(HandleRole::WRight1, merged.w_right_1.clone());
            handles.insert(HandleRole::WLeft2, merged.w_left_2.clone());
            handles.insert(HandleRole::WRight2, merged.w_right_2.clone());
            handles.insert(HandleRole::VMid, merged.v_mid.clone());
            let file = CaFile { instance: merged.instance.clone(), handles };
            write(&path, &write_ca(&file))?;
            println!(
                "wrote {} ({} vertices, span bound {})",
                path.display(),
                merged.instance.vertex_count(),
                merged.span
            );
        }
    }
    Ok(EXIT_OK)
}

fn run_verify(input: PathBuf, width: usize, budget: Budget) -> Result<u8, u8> {
    let formula = read_formula(&input, width)?;
    let report = verify(&formula, budget).map_err(|e| {
        eprintln!("error: {e}");
        if e.is_budget() { EXIT_BUDGET } else { EXIT_INPUT }
    })?;
    print!("{report}");
    if !report.agreed() {
        return Ok(EXIT_DISAGREEMENT);
    }
    if report.mandatory_skipped {
        eprintln!("error: a mandatory stage was skipped for budget reasons");
        return Ok(EXIT_BUDGET);
    }
    Ok(EXIT_OK)
}

fn run_solve(input: PathBuf, cap: Option<BigUint>, budget: Budget) -> Result<u8, u8> {
    let text = std::fs::read_to_string(&input).map_err(|e| {
        eprintln!("error: cannot read {}: {e}", input.display());
        EXIT_INPUT
    })?;
    let file = read_ca(&text).map_err(|e| {
        eprintln!("error: {}: {e}", input.display());
        EXIT_INPUT
    })?;
    let cap = cap.unwrap_or_else(|| file.instance.span_bound().clone());
    match solve_exact(&file.instance, &cap, budget) {
        Ok(SolveOutcome::Solved { span, ordering, coloring, nodes }) => {
            println!("minimal span {span} (cap {cap}, {nodes} nodes)");
            println!("ordering: {}", ordering.join(" "));
            let mut parts = Vec::new();
            for (vertex, color) in coloring.iter() {
                parts.push(format!("{vertex}={color}"));
            }
            println!("coloring: {}", parts.join(" "));
            println!("span check: {}", span_of(&coloring).expect("nonempty"));
            Ok(EXIT_OK)
        }
        Ok(SolveOutcome::ExceedsCap { nodes }) => {
            println!("exceeds cap {cap} ({nodes} nodes)");
            Ok(EXIT_OK)
        }
        Err(ChannelError::Budget(b)) => {
            eprintln!("error: {b}");
            Ok(EXIT_BUDGET)
        }
        Err(e) => {
            eprintln!("error: {e}");
            Ok(EXIT_INPUT)
        }
    }
}

fn run_stats(input: PathBuf, width: usize, budget: Budget) -> Result<u8, u8> {
    let formula = read_formula(&input, width)?;
    let report = stats(&formula, budget).map_err(|e| {
        eprintln!("error: {e}");
        if e.is_budget() { EXIT_BUDGET } else { EXIT_INPUT }
    })?;
    print!("{report}");
    Ok(EXIT_OK)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Reduce { input, width, to, output, budget } => {
            run_reduce(input, width, to, output, effective_budget(budget))
        }
        Command::Verify { input, width, budget } => run_verify(input, width, effective_budget(budget)),
        Command::Solve { input, cap, budget } => run_solve(input, cap, effective_budget(budget)),
        Command::Stats { input, width, budget } => run_stats(input, width, effective_budget(budget)),
    };
    ExitCode::from(code.unwrap_or_else(|code| code))
}
