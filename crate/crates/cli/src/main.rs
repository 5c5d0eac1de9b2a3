mod exit;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use episteme::checker::check;
use episteme::decision::{decide, fl_closure, SatResult};
use episteme::dynamics::{
    load_event_model, product_update, semi_public_update, EventRegistry, ReadingEventModel,
    ReadingMap,
};
use episteme::models::{load_model, EpistemicModel};
use episteme::reducer::reduce;
use episteme::syntax::parser::Action;
use episteme::syntax::{parse_action, parse_agent_list, parse_formula, AgentSet, Formula};

use exit::{Failure, PARSE};

#[derive(Parser)]
#[command(name = "episteme", version, about = "Model checking, updates, reduction and satisfiability for epistemic logic with comparative and common distributed knowledge")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a formula at one state of a model.
    Check {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        state: String,
        #[arg(long)]
        formula: String,
        #[command(flatten)]
        events: EventArgs,
    },
    /// Apply a semi-public action or an event model and print the new model.
    Update {
        #[arg(long)]
        model: PathBuf,
        /// `!readmap` or `model.event` (the latter needs --events).
        #[arg(long, conflicts_with = "event", required_unless_present = "event")]
        action: Option<String>,
        /// `PATH[:EVENT]`; the full product with that event model is built.
        #[arg(long)]
        event: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        events: EventArgs,
    },
    /// Rewrite a formula into an equivalent static one.
    Reduce {
        #[arg(long)]
        formula: String,
        #[command(flatten)]
        events: EventArgs,
    },
    /// Decide satisfiability.
    Sat(DecideArgs),
    /// Decide validity.
    Valid(DecideArgs),
    /// List the closure of a formula, smallest members first.
    Closure {
        #[arg(long)]
        formula: String,
        /// Comma-separated agents; defaults to those in the formula.
        #[arg(long)]
        agents: Option<String>,
    },
}

#[derive(Args)]
struct EventArgs {
    /// Event-model document; its file stem is the id used in formulas.
    #[arg(long = "events", value_name = "PATH")]
    paths: Vec<PathBuf>,
    /// Reject event documents whose read sets omit their reader.
    #[arg(long)]
    strict: bool,
}

#[derive(Args)]
struct DecideArgs {
    #[arg(long)]
    formula: String,
    /// Comma-separated agents; defaults to those in the formula.
    #[arg(long)]
    agents: Option<String>,
    /// Where to write a witness (for `valid`, a countermodel): the state and
    /// the pseudo-model it lives in.
    #[arg(long)]
    witness: Option<PathBuf>,
    #[command(flatten)]
    events: EventArgs,
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::new(PARSE, format!("{}: {e}", path.display())))
}

fn stem(path: &Path) -> Result<String, Failure> {
    path.file_stem()
        .and_then(|s| s.to_str())
        .map(str::to_string)
        .ok_or_else(|| Failure::new(PARSE, format!("{}: no file stem", path.display())))
}

fn load_events_file(path: &Path, strict: bool) -> Result<ReadingEventModel, Failure> {
    let (em, warnings) = load_event_model(&read(path)?, strict)
        .map_err(|e| Failure::from(e).context(path))?;
    for w in warnings {
        eprintln!("warning: {}: {w}", path.display());
    }
    Ok(em)
}

fn registry(args: &EventArgs) -> Result<EventRegistry, Failure> {
    let mut reg = EventRegistry::new();
    for path in &args.paths {
        let em = load_events_file(path, args.strict)?;
        reg.insert(&stem(path)?, em)?;
    }
    Ok(reg)
}

fn model(path: &Path) -> Result<EpistemicModel, Failure> {
    load_model(&read(path)?).map_err(|e| Failure::from(e).context(path))
}

fn agents_for(f: &Formula, given: Option<&str>) -> Result<AgentSet, Failure> {
    match given {
        Some(list) => Ok(parse_agent_list(list)?),
        None => Ok(f.agents()),
    }
}

fn parse_with(text: &str, agents: Option<&str>, reg: &EventRegistry) -> Result<(Formula, AgentSet), Failure> {
    let universe = agents.map(parse_agent_list).transpose()?;
    let f = parse_formula(text, universe.as_ref(), Some(reg))?;
    let agents = agents_for(&f, agents)?;
    Ok((f, agents))
}

fn product(m: &EpistemicModel, em: &ReadingEventModel, event: &str) -> Result<EpistemicModel, Failure> {
    em.event_index(event)?;
    Ok(product_update(m, em)?.model)
}

fn run(cli: Cli) -> Result<String, Failure> {
    match cli.command {
        Command::Check { model: path, state, formula, events } => {
            let m = model(&path)?;
            let reg = registry(&events)?;
            m.state_index(&state)?;
            let f = parse_formula(&formula, Some(m.agents()), Some(&reg))?;
            Ok(check(&m, &state, &f, Some(&reg))?.to_string())
        }
        Command::Update { model: path, action, event, out, events } => {
            let m = model(&path)?;
            let updated = match (action, event) {
                (Some(text), _) => {
                    let reg = registry(&events)?;
                    match parse_action(&text, Some(m.agents()), Some(&reg))? {
                        Action::SemiPub(expr) => {
                            let alpha = ReadingMap::from_expr(&expr, m.agents())?;
                            semi_public_update(&m, &alpha)?
                        }
                        Action::Event(r) => {
                            let em = reg.get(&r.model)?;
                            product(&m, em, &r.event)?
                        }
                    }
                }
                (None, Some(target)) => {
                    let (file, name) = match target.rsplit_once(':') {
                        Some((file, name)) if !file.is_empty() => (file, Some(name)),
                        _ => (target.as_str(), None),
                    };
                    let em = load_events_file(Path::new(file), events.strict)?;
                    let name = name.unwrap_or_else(|| em.event_name(0)).to_string();
                    product(&m, &em, &name)?
                }
                (None, None) => unreachable!("clap requires one of --action and --event"),
            };
            let json = updated.to_json();
            match out {
                Some(out) => {
                    fs::write(&out, format!("{json}\n"))
                        .map_err(|e| Failure::new(exit::INTERNAL, format!("{}: {e}", out.display())))?;
                    Ok(String::new())
                }
                None => Ok(json),
            }
        }
        Command::Reduce { formula, events } => {
            let reg = registry(&events)?;
            let f = parse_formula(&formula, None, Some(&reg))?;
            Ok(reduce(&f, Some(&reg))?.to_string())
        }
        Command::Sat(args) => decide_cmd(args, false),
        Command::Valid(args) => decide_cmd(args, true),
        Command::Closure { formula, agents } => {
            let reg = EventRegistry::new();
            let (f, agents) = parse_with(&formula, agents.as_deref(), &reg)?;
            let target = reduce(&f, None)?.desugar();
            let cl = fl_closure(&target, &agents)?;
            let mut lines = vec![format!("{} formulas", cl.len())];
            lines.extend(cl.members.iter().map(Formula::to_string));
            Ok(lines.join("\n"))
        }
    }
}

fn decide_cmd(args: DecideArgs, validity: bool) -> Result<String, Failure> {
    let reg = registry(&args.events)?;
    let (f, agents) = parse_with(&args.formula, args.agents.as_deref(), &reg)?;
    let target = if validity { Formula::not(f) } else { f };
    let decision = decide(&target, &agents, Some(&reg))?;
    if let (SatResult::Sat(w), Some(path)) = (&decision.result, &args.witness) {
        let doc = serde_json::json!({
            "state": w.model.state_name(w.state),
            "model": w.model.to_doc(),
        });
        let text = serde_json::to_string_pretty(&doc).expect("witness documents serialize");
        fs::write(path, format!("{text}\n"))
            .map_err(|e| Failure::new(exit::INTERNAL, format!("{}: {e}", path.display())))?;
    }
    let word = match (validity, decision.result.is_sat()) {
        (false, true) => "sat",
        (false, false) => "unsat",
        (true, true) => "invalid",
        (true, false) => "valid",
    };
    Ok(word.to_string())
}

impl Failure {
    fn context(self, path: &Path) -> Failure {
        Failure::new(self.code, format!("{}: {}", path.display(), self.message))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(out) => {
            if !out.is_empty() {
                println!("{out}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn event_specs_split_on_the_last_colon() {
        let cli = Cli::try_parse_from(["episteme", "update", "--model", "m.json", "--event", "dir/hack.json:hack"]);
        assert!(cli.is_ok());
        let both = Cli::try_parse_from([
            "episteme", "update", "--model", "m.json", "--action", "!pub{a}", "--event", "h.json",
        ]);
        assert!(both.is_err());
        let neither = Cli::try_parse_from(["episteme", "update", "--model", "m.json"]);
        assert!(neither.is_err());
    }

    #[test]
    fn closure_of_an_atom_over_two_agents() {
        let out = run(Cli::try_parse_from(["episteme", "closure", "--formula", "p", "--agents", "a,b"]).unwrap()).unwrap();
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines[0], "20 formulas");
        assert_eq!(lines.len(), 21);
    }
}
