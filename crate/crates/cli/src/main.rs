//! `darkcool` command-line interface.
//!
//! Exit codes: 0 ok, 1 comparison fail, 2 config error, 3 solver error.

use std::process::ExitCode;

use darkcool_cli::compare::compare_tables;
use darkcool_cli::table::Table;
use darkcool_cli::{load_run_config, presets, run_to_files};
use darkcool_core::CoolError;

const USAGE: &str = "\
darkcool — dark-state laser cooling simulator

USAGE:
  darkcool run <preset-or-config>      execute a scenario, write CSV/SVG/meta
  darkcool compare <a.csv> <b.csv> --tol <rel> [--from <x0>] [--interp]
  darkcool presets list                list shipped presets
  darkcool presets show <name>         print a preset's resolved config
  darkcool modes validate <file>       check a crystal mode file

Environment:
  DARKCOOL_THREADS                     cap the sweep worker pool
";

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    match dispatch(&args) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            let code = match err {
                CoolError::SolverFailure { .. }
                | CoolError::StiffnessFailure { .. }
                | CoolError::IntegrationFailure { .. }
                | CoolError::MultipleSteadyStates { .. } => 3,
                _ => 2,
            };
            ExitCode::from(code)
        }
    }
}

fn dispatch(args: &[String]) -> darkcool_core::Result<ExitCode> {
    match args.first().map(|s| s.as_str()) {
        Some("run") => {
            let target = args
                .get(1)
                .ok_or_else(|| CoolError::invalid("run needs a preset name or config path"))?;
            let cfg = load_run_config(target)?;
            for w in cfg.params.warnings() {
                eprintln!("warning: {w}");
            }
            let paths = run_to_files(&cfg)?;
            println!("wrote {}", paths.csv.display());
            println!("wrote {}", paths.svg.display());
            println!("wrote {}", paths.meta.display());
            Ok(ExitCode::SUCCESS)
        }
        Some("compare") => {
            let a = args.get(1).ok_or_else(|| CoolError::invalid("compare needs two CSV paths"))?;
            let b = args.get(2).ok_or_else(|| CoolError::invalid("compare needs two CSV paths"))?;
            let mut tol = None;
            let mut from = None;
            let mut interp = false;
            let mut k = 3;
            while k < args.len() {
                match args[k].as_str() {
                    "--tol" => {
                        k += 1;
                        tol = Some(
                            args.get(k)
                                .ok_or_else(|| CoolError::invalid("--tol needs a value"))?
                                .parse::<f64>()
                                .map_err(|_| CoolError::invalid("--tol: bad number"))?,
                        );
                    }
                    "--from" => {
                        k += 1;
                        from = Some(
                            args.get(k)
                                .ok_or_else(|| CoolError::invalid("--from needs a value"))?
                                .parse::<f64>()
                                .map_err(|_| CoolError::invalid("--from: bad number"))?,
                        );
                    }
                    "--interp" => interp = true,
                    other => return Err(CoolError::invalid(format!("unknown flag `{other}`"))),
                }
                k += 1;
            }
            let tol = tol.ok_or_else(|| CoolError::invalid("compare requires --tol <rel>"))?;
            let ta = Table::from_csv(&std::fs::read_to_string(a)?)?;
            let tb = Table::from_csv(&std::fs::read_to_string(b)?)?;
            let report = compare_tables(&ta, &tb, tol, from, interp)?;
            print!("{}", report.render());
            Ok(if report.pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Some("presets") => match args.get(1).map(|s| s.as_str()) {
            Some("list") => {
                for (name, desc) in presets::catalogue() {
                    println!("{name:8} {desc}");
                }
                Ok(ExitCode::SUCCESS)
            }
            Some("show") => {
                let name = args
                    .get(2)
                    .ok_or_else(|| CoolError::invalid("presets show needs a name"))?;
                let cfg = presets::preset(name)?;
                print!("{}", darkcool_cli::config::render_config(&cfg));
                Ok(ExitCode::SUCCESS)
            }
            _ => Err(CoolError::invalid("usage: darkcool presets list|show <name>")),
        },
        Some("modes") => match (args.get(1).map(|s| s.as_str()), args.get(2)) {
            (Some("validate"), Some(path)) => {
                let spec = darkcool_core::modes::load_modes(std::path::Path::new(path))?;
                println!(
                    "ok: {} modes, COM at 2pi x {} MHz, profiles {}",
                    spec.n_ions(),
                    spec.freq_2pi_mhz(0),
                    if spec.has_profiles() { "present" } else { "none" }
                );
                for w in spec.warnings() {
                    println!("warning: {w}");
                }
                Ok(ExitCode::SUCCESS)
            }
            _ => Err(CoolError::invalid("usage: darkcool modes validate <file>")),
        },
        _ => {
            print!("{USAGE}");
            Ok(ExitCode::from(2))
        }
    }
}
