use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use badcycle_core::balanced::{
    balanced_coloring, check_two_balanced_equivalence, default_counter_cap, is_alpha_balanced,
    parse_alpha,
};
use badcycle_core::corpus::{self, DEFAULT_SEED};
use badcycle_core::generators::{Generated, GeneratorSpec};
use badcycle_core::goodness::default_oracle_len;
use badcycle_core::order::{
    check_paths_good, decide_cycling_2machine, default_path_cap, find_compatible_order,
    find_order_system, verify_compatible_order, verify_order_system, CompatibleOrder,
    OrderSystemFile, PathsVerdict, SearchMode,
};
use badcycle_core::reductions::{sat_to_machine, truth_table_solve, CnfInstance};
use badcycle_core::relations::{
    alternating_relation, alternating_s_set, is_pq_compatible, loop_lemma_exponent,
    semigroup_closure, Relation, RelationFile,
};
use badcycle_core::{
    brute_force_is_good, chromatic_number_exact, chromatic_upper_greedy, is_good, Budget, Error,
    Hypergraph, Machine, OrderSystem, Verdict,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(
    name = "badcycle",
    version,
    about = "Bad cycles in directed hypergraphs"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    #[arg(long, global = true, value_enum, default_value = "text")]
    format: Format,
    /// Node expansions allowed for exact searches.
    #[arg(long, global = true, env = "BADCYCLE_BUDGET")]
    budget: Option<u64>,
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Worker threads for corpus checks.
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether a hypergraph avoids the machine's bad cycles.
    CheckGood {
        #[arg(short, long)]
        machine: PathBuf,
        #[arg(short, long)]
        graph: PathBuf,
        /// Use the bounded brute-force search instead.
        #[arg(long)]
        oracle: bool,
        /// Write the witness here when the answer is no.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Search for a compatible order of a cycling machine.
    FindOrder {
        #[arg(short, long)]
        machine: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Search for compatible order systems of a general machine.
    FindOrderSystem {
        #[arg(short, long)]
        machine: PathBuf,
        #[arg(long)]
        all: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    VerifyOrder {
        #[arg(short, long)]
        machine: PathBuf,
        #[arg(short, long)]
        order: PathBuf,
    },
    VerifyOrderSystem {
        #[arg(short, long)]
        machine: PathBuf,
        #[arg(short, long)]
        system: PathBuf,
    },
    /// Polynomial decision for cycling 2-machines.
    Decide2 {
        #[arg(short, long)]
        machine: PathBuf,
    },
    /// Check goodness of the directed paths P_1 .. P_n.
    PathsGood {
        #[arg(short, long)]
        machine: PathBuf,
        #[arg(long)]
        n_max: Option<usize>,
    },
    Chromatic {
        #[arg(short, long)]
        graph: PathBuf,
        /// Exact search instead of the greedy upper bound.
        #[arg(long)]
        exact: bool,
    },
    /// Color an alpha-balanced digraph with ceil(alpha) + 1 colors.
    ColorBalanced {
        #[arg(short, long)]
        graph: PathBuf,
        #[arg(long)]
        alpha: String,
    },
    BalanceCheck {
        #[arg(short, long)]
        graph: PathBuf,
        #[arg(long)]
        alpha: String,
    },
    /// Write a generated machine or hypergraph.
    Gen {
        #[command(subcommand)]
        kind: GenKind,
        #[arg(short, long, global = true)]
        output: Option<PathBuf>,
    },
    /// Translate a 3-CNF instance into a cycling machine.
    #[command(name = "reduce-3sat")]
    Reduce3sat {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Also search for a compatible order; exit 0 iff one exists.
        #[arg(long)]
        decide: bool,
    },
    Rel {
        #[command(subcommand)]
        op: RelOp,
    },
    /// Cross-check fast decisions against brute force on a seeded corpus.
    Oracle {
        #[command(subcommand)]
        mode: OracleMode,
    },
}

#[derive(Subcommand)]
enum GenKind {
    HasseMachine,
    CounterMachine {
        #[arg(long)]
        n: usize,
    },
    Example3Machine,
    UnbalancedMachine {
        #[arg(long)]
        k: usize,
    },
    Path {
        #[arg(long)]
        n: usize,
    },
    ExplicitHasse {
        #[arg(long)]
        n: usize,
    },
    IncomparablePairs {
        #[arg(long)]
        m: usize,
    },
    Shift {
        #[arg(long)]
        m: usize,
    },
    CounterConstruction {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
    },
    /// Seeded random digraph.
    RandomDigraph {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.3)]
        p: f64,
    },
    /// Seeded random machine.
    RandomMachine {
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long)]
        states: usize,
        #[arg(long, default_value_t = 0.2)]
        density: f64,
        #[arg(long)]
        cycling: bool,
    },
}

#[derive(Subcommand)]
enum RelOp {
    Compose {
        left: PathBuf,
        right: PathBuf,
    },
    Reverse {
        relation: PathBuf,
    },
    /// Closure of the given relations under composition and reversal.
    Closure {
        #[arg(required = true)]
        relations: Vec<PathBuf>,
    },
    /// Check a set of relations (a JSON array), or the word-defined set of the alternating 4-ary relation.
    PqCheck {
        #[arg(required_unless_present = "alternating")]
        set: Option<PathBuf>,
        #[arg(long)]
        alternating: bool,
    },
    LoopK {
        relation: PathBuf,
        #[arg(long, default_value_t = 24)]
        k_max: usize,
    },
}

#[derive(Subcommand)]
enum OracleMode {
    /// Product-graph goodness against bounded brute force.
    Goodness {
        #[arg(long, default_value_t = 300)]
        count: usize,
    },
    /// decide2 against exhaustive order search on random 3-state machines.
    Decide2 {
        #[arg(long, default_value_t = 200)]
        count: usize,
    },
    /// Truth tables against order search on reduced 3-CNF instances.
    Sat {
        #[arg(long, default_value_t = 50)]
        count: usize,
    },
    /// 2-balance against goodness for the counter machines.
    Balance {
        #[arg(long, default_value_t = 200)]
        count: usize,
    },
}

struct Report {
    code: u8,
    text: String,
    json: Value,
}

impl Report {
    fn new(code: u8, text: impl Into<String>, json: Value) -> Self {
        Report {
            code,
            text: text.into(),
            json,
        }
    }

    fn verdict(yes: bool, text: impl Into<String>, json: Value) -> Self {
        Report::new(if yes { 0 } else { 1 }, text, json)
    }
}

fn read(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Error> {
    fs::write(path, text).map_err(|e| Error::Input(format!("{}: {e}", path.display())))
}

fn load_machine(path: &Path) -> Result<Machine, Error> {
    Machine::from_json(&read(path)?)
}

fn load_graph(path: &Path) -> Result<Hypergraph, Error> {
    Hypergraph::from_json(&read(path)?)
}

fn load_relation(path: &Path) -> Result<Relation, Error> {
    Relation::from_json(&read(path)?)
}

fn pretty(v: &impl serde::Serialize) -> String {
    serde_json::to_string_pretty(v).expect("serializes")
}

fn carrier(m: &Machine) -> Vec<(String, usize)> {
    (1..=m.k())
        .flat_map(|i| m.states().iter().map(move |s| (s.clone(), i)))
        .collect()
}

fn system_file(m: &Machine, os: &OrderSystem) -> OrderSystemFile<(String, usize)> {
    let names = carrier(m);
    os.to_file(|x| names[x].clone())
}

fn budget(g: &Global) -> Budget {
    g.budget.map_or_else(Budget::default, Budget::new)
}

fn run(cli: Cli) -> Result<Report, Error> {
    let g = &cli.global;
    match cli.command {
        Command::CheckGood {
            machine,
            graph,
            oracle,
            output,
        } => {
            let m = load_machine(&machine)?;
            let h = load_graph(&graph)?;
            let verdict = if oracle {
                brute_force_is_good(&h, &m, default_oracle_len(&h, &m), &mut budget(g))?
            } else {
                is_good(&h, &m)?
            };
            match verdict {
                Verdict::Good => Ok(Report::verdict(true, "good", json!({"good": true}))),
                Verdict::Bad(w) => {
                    let file = w.to_file(&h, &m);
                    if let Some(out) = output {
                        write(&out, &pretty(&file))?;
                    }
                    let walk = file.vertices.join(" -> ");
                    let (s, t) = w.bad_pair();
                    let text = format!(
                        "bad: {walk} with states ({}, {})",
                        m.state_name(s),
                        m.state_name(t)
                    );
                    Ok(Report::verdict(
                        false,
                        text,
                        json!({"good": false, "witness": file}),
                    ))
                }
            }
        }
        Command::FindOrder { machine, output } => {
            let m = load_machine(&machine)?;
            match find_compatible_order(&m, &mut budget(g))? {
                Some(order) => {
                    let file = order.to_file(&m);
                    if let Some(out) = output {
                        write(&out, &pretty(&file))?;
                    }
                    let text = file
                        .iter()
                        .map(|(s, i)| format!("({s},{i})"))
                        .collect::<Vec<_>>();
                    Ok(Report::verdict(
                        true,
                        text.join(" < "),
                        json!({"order": file}),
                    ))
                }
                None => Ok(Report::verdict(
                    false,
                    "no compatible order",
                    json!({"order": null}),
                )),
            }
        }
        Command::FindOrderSystem {
            machine,
            all,
            output,
        } => {
            let m = load_machine(&machine)?;
            let mode = if all {
                SearchMode::All
            } else {
                SearchMode::First
            };
            let systems = find_order_system(&m, mode, &mut budget(g))?;
            let files: Vec<_> = systems.iter().map(|os| system_file(&m, os)).collect();
            if let Some(out) = output {
                write(&out, &pretty(&files))?;
            }
            let mut text = format!("{} order system(s)", files.len());
            for f in &files {
                text.push_str(&format!(
                    "\n{}",
                    serde_json::to_string(f).expect("serializes")
                ));
            }
            Ok(Report::verdict(
                !files.is_empty(),
                text,
                json!({"count": files.len(), "systems": files}),
            ))
        }
        Command::VerifyOrder { machine, order } => {
            let m = load_machine(&machine)?;
            let pairs: Vec<(String, usize)> = serde_json::from_str(&read(&order)?)?;
            let order = CompatibleOrder::from_file(&m, &pairs)?;
            let check = verify_compatible_order(&m, &order)?;
            let violations: Vec<String> =
                check.violations.iter().map(|v| format!("{v:?}")).collect();
            let text = if violations.is_empty() {
                "compatible".to_string()
            } else {
                violations.join("\n")
            };
            Ok(Report::verdict(
                check.is_compatible(),
                text,
                json!({"compatible": check.is_compatible(), "violations": violations}),
            ))
        }
        Command::VerifyOrderSystem { machine, system } => {
            let m = load_machine(&machine)?;
            let file: OrderSystemFile<(String, usize)> = serde_json::from_str(&read(&system)?)?;
            let os = OrderSystem::from_file(&file, &carrier(&m))?;
            let check = verify_order_system(&m, &os)?;
            let violations: Vec<String> =
                check.violations.iter().map(|v| format!("{v:?}")).collect();
            let text = if violations.is_empty() {
                "compatible".to_string()
            } else {
                violations.join("\n")
            };
            Ok(Report::verdict(
                check.is_compatible(),
                text,
                json!({"compatible": check.is_compatible(), "violations": violations}),
            ))
        }
        Command::Decide2 { machine } => {
            let m = load_machine(&machine)?;
            let d = decide_cycling_2machine(&m)?;
            let text = match &d.obstruction {
                None => "compatible order exists".to_string(),
                Some(o) => {
                    let names: Vec<&str> = o.component.iter().map(|&s| m.state_name(s)).collect();
                    format!(
                        "no compatible order: component {{{}}} has cycle means {} and {}",
                        names.join(","),
                        o.min_cycle.mean,
                        o.max_cycle.mean
                    )
                }
            };
            Ok(Report::verdict(
                d.has_order,
                text,
                json!({"has_order": d.has_order}),
            ))
        }
        Command::PathsGood { machine, n_max } => {
            let m = load_machine(&machine)?;
            let n_max = n_max.unwrap_or_else(|| default_path_cap(&m));
            match check_paths_good(&m, n_max)? {
                PathsVerdict::AllGood { n_max } => Ok(Report::verdict(
                    true,
                    format!("P_1 .. P_{n_max} are good"),
                    json!({"all_good": true, "n_max": n_max}),
                )),
                PathsVerdict::FirstBad { n, .. } => Ok(Report::verdict(
                    false,
                    format!("P_{n} is bad"),
                    json!({"all_good": false, "first_bad": n}),
                )),
            }
        }
        Command::Chromatic { graph, exact } => {
            let h = load_graph(&graph)?;
            let (chi, coloring) = if exact {
                let r = chromatic_number_exact(&h, &mut budget(g))?;
                (r.chromatic_number, r.coloring)
            } else {
                let order: Vec<usize> = (0..h.num_vertices()).collect();
                let c = chromatic_upper_greedy(&h, &order);
                (c.num_colors(), c)
            };
            Ok(Report::new(
                0,
                chi.to_string(),
                json!({"chromatic_number": chi, "exact": exact, "colors": coloring.colors}),
            ))
        }
        Command::ColorBalanced { graph, alpha } => {
            let h = load_graph(&graph)?;
            let alpha = parse_alpha(&alpha)?;
            match balanced_coloring(&h, alpha) {
                Ok(bc) => {
                    let lines: Vec<String> = (0..h.num_vertices())
                        .map(|v| {
                            format!(
                                "{} {} {}",
                                h.vertex_name(v),
                                bc.coloring.colors[v],
                                bc.potentials[v]
                            )
                        })
                        .collect();
                    Ok(Report::new(
                        0,
                        lines.join("\n"),
                        json!({"colors": bc.coloring.colors, "potentials": bc.potentials, "num_colors": bc.coloring.num_colors()}),
                    ))
                }
                Err(Error::Unbalanced(w)) => Ok(Report::verdict(
                    false,
                    format!(
                        "not {alpha}-balanced: {} forward, {} backward steps",
                        w.forward, w.backward
                    ),
                    json!({"balanced": false, "witness": w}),
                )),
                Err(e) => Err(e),
            }
        }
        Command::BalanceCheck { graph, alpha } => {
            let h = load_graph(&graph)?;
            let alpha = parse_alpha(&alpha)?;
            let v = is_alpha_balanced(&h, alpha)?;
            let text = if v.balanced {
                format!("{alpha}-balanced")
            } else {
                format!("not {alpha}-balanced")
            };
            Ok(Report::verdict(
                v.balanced,
                text,
                json!({"balanced": v.balanced, "witness": v.witness}),
            ))
        }
        Command::Gen { kind, output } => {
            let mut rng = corpus::rng(g.seed);
            let (value, warnings) = match kind {
                GenKind::RandomDigraph { n, p } => (
                    Generated::Hypergraph(corpus::random_digraph(&mut rng, n, p)),
                    Vec::new(),
                ),
                GenKind::RandomMachine {
                    k,
                    states,
                    density,
                    cycling,
                } => {
                    let m = if cycling {
                        corpus::random_cycling_machine(&mut rng, k, states, density)
                    } else {
                        corpus::random_general_machine(&mut rng, k, states, density, 0.4)
                    };
                    (Generated::Machine(m), Vec::new())
                }
                other => {
                    let spec = match other {
                        GenKind::HasseMachine => GeneratorSpec::HasseMachine,
                        GenKind::CounterMachine { n } => GeneratorSpec::CounterMachine { n },
                        GenKind::Example3Machine => GeneratorSpec::Example3Machine,
                        GenKind::UnbalancedMachine { k } => GeneratorSpec::UnbalancedMachine { k },
                        GenKind::Path { n } => GeneratorSpec::Path { n },
                        GenKind::ExplicitHasse { n } => GeneratorSpec::ExplicitHasse { n },
                        GenKind::IncomparablePairs { m } => GeneratorSpec::IncomparablePairs { m },
                        GenKind::Shift { m } => GeneratorSpec::Shift { m },
                        GenKind::CounterConstruction { n, m } => {
                            GeneratorSpec::CounterConstruction { n, m }
                        }
                        GenKind::RandomDigraph { .. } | GenKind::RandomMachine { .. } => {
                            unreachable!()
                        }
                    };
                    let out = spec.generate()?;
                    (out.value, out.warnings)
                }
            };
            for w in &warnings {
                eprintln!("warning: {w}");
            }
            let text = match &value {
                Generated::Machine(m) => m.to_json(),
                Generated::Hypergraph(h) => h.to_json(),
            };
            match output {
                Some(out) => {
                    write(&out, &text)?;
                    Ok(Report::new(
                        0,
                        format!("wrote {}", out.display()),
                        json!({"written": out}),
                    ))
                }
                None => {
                    let parsed: Value = serde_json::from_str(&text)?;
                    Ok(Report::new(0, text, parsed))
                }
            }
        }
        Command::Reduce3sat {
            input,
            output,
            decide,
        } => {
            let phi = CnfInstance::parse(&read(&input)?)?;
            let m = sat_to_machine(&phi)?;
            let summary = format!(
                "{} states, k = {}, {} transitions",
                m.num_states(),
                m.k(),
                m.num_transitions()
            );
            if let Some(out) = &output {
                write(out, &m.to_json())?;
            }
            if !decide {
                let text = if output.is_some() {
                    summary
                } else {
                    m.to_json()
                };
                return Ok(Report::new(
                    0,
                    text,
                    json!({"machine": serde_json::from_str::<Value>(&m.to_json())?}),
                ));
            }
            let found = find_compatible_order(&m, &mut budget(g))?.is_some();
            let text = format!(
                "{summary}\n{}",
                if found {
                    "satisfiable: compatible order found"
                } else {
                    "unsatisfiable: no compatible order"
                }
            );
            Ok(Report::verdict(found, text, json!({"satisfiable": found})))
        }
        Command::Rel { op } => run_rel(op),
        Command::Oracle { mode } => run_oracle(g, mode),
    }
}

fn relation_report(r: &Relation) -> Report {
    Report::new(0, r.to_string(), json!(r.to_file()))
}

fn run_rel(op: RelOp) -> Result<Report, Error> {
    match op {
        RelOp::Compose { left, right } => Ok(relation_report(
            &load_relation(&left)?.compose(&load_relation(&right)?)?,
        )),
        RelOp::Reverse { relation } => Ok(relation_report(&load_relation(&relation)?.reverse())),
        RelOp::Closure { relations } => {
            let gens = relations
                .iter()
                .map(|p| load_relation(p))
                .collect::<Result<Vec<_>, _>>()?;
            let closure = semigroup_closure(&gens)?;
            let text: Vec<String> = closure.iter().map(Relation::to_string).collect();
            let files: Vec<RelationFile> = closure.iter().map(Relation::to_file).collect();
            Ok(Report::new(
                0,
                format!("{} relations\n{}", closure.len(), text.join("\n")),
                json!(files),
            ))
        }
        RelOp::PqCheck { set, alternating } => {
            let set: BTreeSet<Relation> = if alternating {
                alternating_s_set(&alternating_relation())
            } else {
                let path = set.expect("required unless --alternating");
                let files: Vec<RelationFile> = serde_json::from_str(&read(&path)?)?;
                files
                    .iter()
                    .map(Relation::from_file)
                    .collect::<Result<_, _>>()?
            };
            let report = is_pq_compatible(&set)?;
            let mut text = format!(
                "{} relations: {}",
                set.len(),
                if report.is_compatible() {
                    "pq-compatible"
                } else {
                    "not pq-compatible"
                }
            );
            for v in &report.violations {
                text.push_str(&format!("\n{v:?}"));
            }
            for w in report.witnesses.iter().filter(|w| w.j.is_none()) {
                text.push_str(&format!("\nno j for P = {}, Q = {}", w.p, w.q));
            }
            Ok(Report::verdict(report.is_compatible(), text, json!(report)))
        }
        RelOp::LoopK { relation, k_max } => {
            let r = load_relation(&relation)?;
            let out = loop_lemma_exponent(&r, k_max)?;
            let text =
                match out.k {
                    Some(k) => {
                        format!(
                    "k = {k} (window up to {k_max}, powers repeat from {} with period {}, {})",
                    out.preperiod,
                    out.period,
                    if out.conclusive { "conclusive" } else { "inconclusive" }
                )
                    }
                    None => format!("no k <= {k_max}"),
                };
            Ok(Report::verdict(out.k.is_some(), text, json!(out)))
        }
    }
}

fn agreement(name: &str, results: Vec<Result<bool, Error>>) -> Result<Report, Error> {
    let total = results.len();
    let mut disagreements = Vec::new();
    for (i, r) in results.into_iter().enumerate() {
        if !r? {
            disagreements.push(i);
        }
    }
    let text = format!("{name}: {} of {total} agree", total - disagreements.len());
    Ok(Report::verdict(
        disagreements.is_empty(),
        text,
        json!({"total": total, "disagreements": disagreements}),
    ))
}

fn run_oracle(g: &Global, mode: OracleMode) -> Result<Report, Error> {
    let seed = g.seed;
    // instance i draws from its own stream so results do not depend on scheduling
    let stream = move |i: usize| corpus::rng(seed.wrapping_add(i as u64));
    match mode {
        OracleMode::Goodness { count } => {
            let results = (0..count)
                .into_par_iter()
                .map(|i| {
                    let mut r = stream(i);
                    let k = 2 + i % 2;
                    let h = corpus::random_hypergraph(&mut r, k + i % (6 - k), k, 1 + i % 5);
                    let m = corpus::random_machine(&mut r, k, 1 + i % 3, 0.2);
                    let fast = is_good(&h, &m)?;
                    let slow = brute_force_is_good(
                        &h,
                        &m,
                        default_oracle_len(&h, &m),
                        &mut Budget::unlimited(),
                    )?;
                    Ok(fast.is_good() == slow.is_good())
                })
                .collect();
            agreement("goodness", results)
        }
        OracleMode::Decide2 { count } => {
            let results = (0..count)
                .into_par_iter()
                .map(|i| {
                    let m = corpus::random_cycling_machine(&mut stream(i), 2, 3, 0.15);
                    let fast = decide_cycling_2machine(&m)?.has_order;
                    Ok(fast == find_compatible_order(&m, &mut Budget::unlimited())?.is_some())
                })
                .collect();
            agreement("decide2", results)
        }
        OracleMode::Sat { count } => {
            let results = (0..count)
                .into_par_iter()
                .map(|i| {
                    let phi = corpus::random_3cnf(&mut stream(i), 3 + i % 4, 1 + (i * 7) % 8);
                    let sat = truth_table_solve(&phi)?.is_some();
                    let m = sat_to_machine(&phi)?;
                    Ok(sat == find_compatible_order(&m, &mut Budget::unlimited())?.is_some())
                })
                .collect();
            agreement("3-SAT reduction", results)
        }
        OracleMode::Balance { count } => {
            let results = (0..count)
                .into_par_iter()
                .map(|i| {
                    let h = corpus::random_digraph(&mut stream(i), 2 + i % 5, 0.3);
                    Ok(check_two_balanced_equivalence(&h, default_counter_cap(&h))?.agree())
                })
                .collect();
            agreement("2-balanced vs counter machines", results)
        }
    }
}

/// Ignores a closed stdout, as when piped into `head`.
fn emit(text: &str) {
    let _ = writeln!(std::io::stdout(), "{text}");
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::BudgetExhausted { .. } => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = cli.global.format;
    if let Some(jobs) = cli.global.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok(report) => {
            match format {
                Format::Text => emit(&report.text),
                Format::Json => emit(&pretty(&report.json)),
            }
            ExitCode::from(report.code)
        }
        Err(e) => {
            let code = exit_code(&e);
            match (&e, format) {
                (Error::BudgetExhausted { budget, bounds }, Format::Json) => {
                    emit(&pretty(
                        &json!({"error": e.to_string(), "budget": budget, "bounds": bounds}),
                    ));
                }
                (
                    Error::BudgetExhausted {
                        bounds: Some((lo, hi)),
                        ..
                    },
                    Format::Text,
                ) => {
                    eprintln!("error: {e}");
                    emit(&format!("bounds: {lo} <= answer <= {hi}"));
                }
                _ => eprintln!("error: {e}"),
            }
            ExitCode::from(code)
        }
    }
}
