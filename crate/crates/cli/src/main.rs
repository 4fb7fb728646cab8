use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use gravity_core::circle::delta_contract;
use gravity_core::combinatorics::TreeInsertion;
use gravity_core::expr::parse_expression;
use gravity_core::gk::{grav_gk_composition_matrix, grav_gk_presentation, residue};
use gravity_core::operad::{CompositionKey, StructureConstants, SCHEMA};
use gravity_core::westerland::{grav_w_composition_matrix, grav_w_presentation, grav_w_space};
use serde_json::json;

mod suites;

const MAX_ARITY: usize = 7;

#[derive(Parser)]
#[command(name = "gravity", version, about = "Exact computations with the gravity operad")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Model {
    W,
    Gk,
}

#[derive(Clone, Copy, ValueEnum)]
enum Export {
    StructureConstants,
}

#[derive(Subcommand)]
enum Command {
    /// Dimension table of Grav(n) by degree.
    Dims {
        #[arg(long, default_value_t = 6)]
        max_arity: usize,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Parse and straighten an expression in the Arnold algebra.
    Straighten {
        expr: String,
        #[arg(long)]
        n: Option<usize>,
    },
    /// Apply the circle contraction Δ*.
    Delta {
        expr: String,
        #[arg(long)]
        n: Option<usize>,
    },
    /// Residue of a Δ*-closed element along the divisor of a tree.
    Residue {
        /// The tree as r,s,i.
        #[arg(long, value_parser = parse_tree)]
        tree: TreeInsertion,
        expr: String,
    },
    /// Structure constants of one composition as JSON.
    Compose {
        #[arg(long, value_enum, default_value = "w")]
        model: Model,
        #[arg(long, value_parser = parse_tree)]
        tree: TreeInsertion,
        #[arg(long)]
        deg_x: usize,
        #[arg(long)]
        deg_y: usize,
    },
    /// Run verification suites; exits 1 if any check fails.
    Verify {
        #[arg(long, value_enum, default_value = "all")]
        suite: suites::Suite,
        #[arg(long, default_value_t = 5)]
        max_arity: usize,
        #[arg(long, default_value_t = 1729)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Export machine-readable data.
    Export {
        #[arg(long, value_enum)]
        what: Export,
        #[arg(long, default_value_t = 5)]
        max_arity: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_tree(s: &str) -> Result<TreeInsertion, String> {
    let parts: Vec<usize> = s
        .split(',')
        .map(|p| p.trim().parse::<usize>().map_err(|e| format!("`{p}`: {e}")))
        .collect::<Result<_, _>>()?;
    match parts[..] {
        [r, s, i] => TreeInsertion::new(r, s, i).map_err(|e| e.to_string()),
        _ => Err("expected r,s,i".into()),
    }
}

#[derive(Debug)]
enum Failure {
    Verification,
    Input(String),
    Io(String),
}

impl From<gravity_core::Error> for Failure {
    fn from(e: gravity_core::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

fn check_arity(max: usize) -> Result<(), Failure> {
    if (1..=MAX_ARITY).contains(&max) {
        Ok(())
    } else {
        Err(Failure::Input(format!("--max-arity must lie in 1..={MAX_ARITY}")))
    }
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, format!("{text}\n")).map_err(|e| Failure::Io(format!("{}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            writeln!(stdout, "{text}").map_err(|e| Failure::Io(e.to_string()))
        }
    }
}

fn dims(max: usize, format: Format) -> Result<String, Failure> {
    check_arity(max)?;
    let mut rows = Vec::new();
    for n in 1..=max {
        for c in grav_w_space(n)? {
            rows.push((n, c.degree, c.dim, c.weight));
        }
    }
    Ok(match format {
        Format::Text => {
            let mut s = format!("{:>2}  {:>6}  {:>5}  {:>6}", "n", "degree", "dim", "weight");
            for (n, k, d, w) in rows {
                s.push_str(&format!("\n{n:>2}  {k:>6}  {d:>5}  {w:>6}"));
            }
            s
        }
        Format::Csv => {
            let mut s = String::from("n,degree,dim,weight");
            for (n, k, d, w) in rows {
                s.push_str(&format!("\n{n},{k},{d},{w}"));
            }
            s
        }
        Format::Json => {
            let rows: Vec<_> = rows.iter().map(|(n, k, d, w)| json!({"n": n, "degree": k, "dim": d, "weight": w})).collect();
            serde_json::to_string_pretty(&json!({"schema": SCHEMA, "dims": rows})).unwrap()
        }
    })
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Dims { max_arity, format } => emit(&dims(max_arity, format)?, None),
        Command::Straighten { expr, n } => emit(&parse_expression(&expr, n)?.to_string(), None),
        Command::Delta { expr, n } => emit(&delta_contract(&parse_expression(&expr, n)?).to_string(), None),
        Command::Residue { tree, expr } => {
            let x = parse_expression(&expr, Some(tree.n()))?;
            emit(&residue(&tree, &x)?.to_string(), None)
        }
        Command::Compose { model, tree, deg_x, deg_y } => {
            check_arity(tree.n())?;
            let m = match model {
                Model::W => (*grav_w_composition_matrix(&tree, deg_x, deg_y)?).clone(),
                Model::Gk => grav_gk_composition_matrix(&tree, deg_x, deg_y)?,
            };
            let doc = StructureConstants::new(&CompositionKey::new(tree, deg_x, deg_y), &m);
            let mut v = serde_json::to_value(&doc).unwrap();
            v["schema"] = json!(SCHEMA);
            emit(&serde_json::to_string_pretty(&v).unwrap(), None)
        }
        Command::Verify { suite, max_arity, seed, out } => {
            check_arity(max_arity)?;
            let output = suites::run(suite, max_arity, seed)?;
            emit(&serde_json::to_string_pretty(&output).unwrap(), out.as_ref())?;
            if output.passed {
                Ok(())
            } else {
                Err(Failure::Verification)
            }
        }
        Command::Export { what: Export::StructureConstants, max_arity, out } => {
            check_arity(max_arity)?;
            let docs = vec![grav_w_presentation(max_arity)?.to_document(), grav_gk_presentation(max_arity)?.to_document()];
            emit(&serde_json::to_string_pretty(&docs).unwrap(), out.as_ref())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(1),
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tree_flag() {
        let t = parse_tree("6, 3,3").unwrap();
        assert_eq!((t.r(), t.s(), t.i(), t.n()), (6, 3, 3, 8));
        assert!(parse_tree("2,2").is_err());
        assert!(parse_tree("2,2,3").is_err());
        assert!(parse_tree("a,2,1").is_err());
    }

    #[test]
    fn dims_rejects_large_arity() {
        assert!(matches!(dims(8, Format::Text), Err(Failure::Input(_))));
        assert!(dims(2, Format::Text).unwrap().starts_with(" n"));
    }
}
