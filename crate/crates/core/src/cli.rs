//! The `delplan` command line.
//!
//! Exit codes: 0 success or "true", 1 "false" or no plan/protocol, 2 usage
//! or validation error, 3 resource budget exceeded.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::automata::DEFAULT_MAX_STATES;
use crate::del::{self, EpistemicModel, IterateBudget};
use crate::error::{Error, Result};
use crate::planner::{self, render_plan};
use crate::protocol::{self, SynthesisOptions};
use crate::regular::{self, RegularRepresentation};
use crate::sat::{self, SatCompiler};
use crate::scenario::Scenario;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FALSE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "delplan",
    version,
    about = "Regular automata for dynamic epistemic logic"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Switch {
    On,
    Off,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a formula on the explicit model.
    Check {
        file: PathBuf,
        #[arg(long)]
        formula: String,
        /// World to evaluate at; defaults to the point, else every world.
        #[arg(long)]
        world: Option<String>,
    },
    /// Print the n-fold iterated product.
    Product {
        file: PathBuf,
        #[arg(short = 'n', long = "times", default_value_t = 1)]
        n: usize,
        #[arg(long, default_value_t = 1_000_000)]
        max_worlds: usize,
        #[arg(long, default_value_t = 64)]
        max_depth: usize,
    },
    /// Build the automata of the regular representation.
    Compile {
        file: PathBuf,
        /// Write every component as a DOT file into this directory.
        #[arg(long)]
        dot: Option<PathBuf>,
        /// Also compile this formula.
        #[arg(long)]
        formula: Option<String>,
        /// Write the memoized sat automata as DOT files into this directory.
        #[arg(long, requires = "formula")]
        emit_sat_dot: Option<PathBuf>,
        /// Print state counts per knowledge level.
        #[arg(long, requires = "formula")]
        blowup: bool,
        #[arg(long, default_value_t = DEFAULT_MAX_STATES)]
        max_states: usize,
    },
    /// Decide plan existence and print the shortest plan.
    Plan {
        file: PathBuf,
        #[arg(long)]
        goal: Option<String>,
        #[arg(long)]
        enumerate: bool,
        #[arg(long, default_value_t = 4)]
        max_len: usize,
        #[arg(long, default_value_t = 100)]
        max_plans: usize,
        #[arg(long, default_value_t = DEFAULT_MAX_STATES)]
        max_states: usize,
        /// Write the plan automaton as DOT.
        #[arg(long)]
        dot: Option<PathBuf>,
        /// Write the plan automaton as a JSON transition table.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Synthesize an epistemic protocol for a temporal goal.
    Synth {
        file: PathBuf,
        #[arg(long)]
        goal: Option<String>,
        #[arg(long, value_enum)]
        serial: Option<Switch>,
        /// Depth of the printed protocol tree and of the self-check.
        #[arg(long, default_value_t = 3)]
        depth: usize,
        #[arg(long, default_value_t = DEFAULT_MAX_STATES)]
        max_states: usize,
        #[arg(long)]
        dot: Option<PathBuf>,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Per-level sizes of the iterated products.
    Explore {
        file: PathBuf,
        #[arg(long, default_value_t = 3)]
        depth: usize,
        /// Compare the automata with the explicit products.
        #[arg(long)]
        verify: bool,
        #[arg(long, default_value_t = 1_000_000)]
        max_worlds: usize,
        #[arg(long, default_value_t = 64)]
        max_depth: usize,
    },
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                EXIT_USAGE
            } else {
                let _ = write!(out, "{}", e.render());
                EXIT_OK
            };
            return code;
        }
    };
    match execute(&cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if e.is_budget() {
                EXIT_BUDGET
            } else {
                EXIT_USAGE
            }
        }
    }
}

fn verdict(b: bool) -> i32 {
    if b {
        EXIT_OK
    } else {
        EXIT_FALSE
    }
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn write_dir(dir: &Path, files: &[(String, String)]) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    for (name, body) in files {
        write_file(&dir.join(name), body)?;
    }
    Ok(())
}

fn print_model(m: &EpistemicModel, out: &mut dyn Write) -> Result<()> {
    let sig = m.signature();
    for w in 0..m.num_worlds() {
        let val: Vec<&str> = m
            .valuation(w)
            .iter()
            .map(|&p| sig.props()[p].as_str())
            .collect();
        writeln!(out, "world {} [{}]", m.worlds()[w], val.join(", "))?;
        for (i, agent) in sig.agents().iter().enumerate() {
            let succ: Vec<&str> = m
                .successors(i, w)
                .iter()
                .map(|&v| m.worlds()[v].as_str())
                .collect();
            writeln!(out, "  {agent}: {}", succ.join(" "))?;
        }
    }
    Ok(())
}

fn execute(cmd: &Command, out: &mut dyn Write) -> Result<i32> {
    match cmd {
        Command::Check {
            file,
            formula,
            world,
        } => {
            let sc = Scenario::load(file)?;
            let f = sc.parse_formula(formula)?;
            let worlds: Vec<String> = match (world, &sc.file.model.point) {
                (Some(w), _) | (None, Some(w)) => vec![w.clone()],
                (None, None) => sc.model.worlds().to_vec(),
            };
            let mut all = true;
            for w in &worlds {
                let b = sc.model.check(w, &f)?;
                all &= b;
                writeln!(out, "{w}: {b}")?;
            }
            Ok(verdict(all))
        }
        Command::Product {
            file,
            n,
            max_worlds,
            max_depth,
        } => {
            let sc = Scenario::load(file)?;
            let budget = IterateBudget {
                max_worlds: *max_worlds,
                max_level: *max_depth,
            };
            let m = del::iterate(&sc.model, &sc.events, *n, budget)?;
            writeln!(
                out,
                "level {n}: {} worlds, {} edges",
                m.num_worlds(),
                m.size()
            )?;
            print_model(&m, out)?;
            Ok(EXIT_OK)
        }
        Command::Compile {
            file,
            dot,
            formula,
            emit_sat_dot,
            blowup,
            max_states,
        } => {
            let sc = Scenario::load(file)?;
            let rep = RegularRepresentation::build(&sc.model, &sc.events)?;
            write!(out, "{}", rep.size_report())?;
            if let Some(dir) = dot {
                write_dir(dir, &rep.dot_files())?;
            }
            if let Some(text) = formula {
                let f = sc.parse_formula(text)?;
                let mut c = SatCompiler::with_budget(&rep, *max_states);
                let d = c.compile(&f)?;
                writeln!(
                    out,
                    "sat {f}: {} states, {} transitions",
                    d.num_states(),
                    d.num_transitions()
                )?;
                if let Some(dir) = emit_sat_dot {
                    write_dir(dir, &c.memo_dot_files())?;
                }
                if *blowup {
                    write!(out, "{}", sat::blowup_report(&f, &rep)?)?;
                }
            }
            Ok(EXIT_OK)
        }
        Command::Plan {
            file,
            goal,
            enumerate,
            max_len,
            max_plans,
            max_states,
            dot,
            json,
        } => {
            let sc = Scenario::load(file)?;
            let goal = sc.parse_formula(sc.goal_text(goal.as_deref())?)?;
            let inst = sc.planning_instance(&goal)?;
            let pa = planner::synthesize_plans(&inst, *max_states)?;
            writeln!(out, "goal: {goal}")?;
            writeln!(
                out,
                "plan automaton: {} states, {} transitions",
                pa.dfa.num_states(),
                pa.dfa.num_transitions()
            )?;
            match pa.shortest_plan() {
                Some(p) => writeln!(out, "shortest plan: {}", render_plan(&p))?,
                None => writeln!(out, "no plan")?,
            }
            if *enumerate {
                let list = pa.enumerate(*max_len, *max_plans);
                writeln!(out, "plans up to length {max_len}:")?;
                for p in &list.plans {
                    writeln!(out, "  {}", render_plan(p))?;
                }
                if list.truncated {
                    writeln!(out, "  (truncated at {max_plans})")?;
                }
            }
            if let Some(path) = dot {
                write_file(path, &pa.dfa.to_dot("plans"))?;
            }
            if let Some(path) = json {
                let table = pa.table(sc.events.events());
                let mut s = serde_json::to_string_pretty(&table).expect("table serializes");
                s.push('\n');
                write_file(path, &s)?;
            }
            Ok(verdict(!pa.is_empty()))
        }
        Command::Synth {
            file,
            goal,
            serial,
            depth,
            max_states,
            dot,
            json,
        } => {
            let sc = Scenario::load(file)?;
            let goal = sc.parse_goal(sc.goal_text(goal.as_deref())?)?;
            let root = sc.point_name()?;
            let rep = RegularRepresentation::build(&sc.model, &sc.events)?;
            let opts = SynthesisOptions {
                serial: serial.map(|s| s == Switch::On),
                max_states: *max_states,
            };
            writeln!(out, "goal: {goal}")?;
            writeln!(
                out,
                "serial: {}",
                if opts.serial_for(goal.head) {
                    "on"
                } else {
                    "off"
                }
            )?;
            let Some(pa) = protocol::synthesize_protocol(&rep, root, &goal, opts)? else {
                writeln!(out, "no protocol")?;
                return Ok(EXIT_FALSE);
            };
            let words = pa.words(*depth);
            writeln!(out, "protocol: {} states", pa.dfa.num_states())?;
            writeln!(out, "histories up to {depth} events:")?;
            for w in &words {
                writeln!(out, "  {w}")?;
            }
            let ok = protocol::check_protocol(&pa, &goal, &rep, *depth)?;
            writeln!(out, "check: {}", if ok { "pass" } else { "fail" })?;
            if let Some(path) = dot {
                write_file(path, &pa.dfa.to_dot("protocol"))?;
            }
            if let Some(path) = json {
                let v = serde_json::json!({
                    "goal": goal.to_string(),
                    "root": pa.root,
                    "serial": pa.serial,
                    "depth": depth,
                    "histories": words,
                });
                let mut s = serde_json::to_string_pretty(&v).expect("json serializes");
                s.push('\n');
                write_file(path, &s)?;
            }
            Ok(verdict(ok))
        }
        Command::Explore {
            file,
            depth,
            verify,
            max_worlds,
            max_depth,
        } => {
            let sc = Scenario::load(file)?;
            let budget = IterateBudget {
                max_worlds: *max_worlds,
                max_level: *max_depth,
            };
            let levels = del::iterate_levels(&sc.model, &sc.events, *depth, budget)?;
            writeln!(out, "level\tworlds\tedges")?;
            for (n, m) in levels.iter().enumerate() {
                writeln!(out, "{n}\t{}\t{}", m.num_worlds(), m.size())?;
            }
            if *verify {
                let rep = RegularRepresentation::build(&sc.model, &sc.events)?;
                let report =
                    regular::verify_against_oracle(&rep, &sc.model, &sc.events, *depth, budget)?;
                writeln!(out, "oracle: {report}")?;
                return Ok(verdict(report.is_ok()));
            }
            Ok(EXIT_OK)
        }
    }
}
