use std::f64::consts::FRAC_PI_4;
use std::fs;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use bellbox_core::functional::{by_name, FAMILIES};
use bellbox_core::polytope::{
    census_json, census_table, enumerate_ns_vertices_n3, facets_n3, ns_vertices_n2, sample_lemma1,
    verify_facet, violation_census, StrategyClass,
};
use bellbox_core::strategy::enumerate_local_with_cap;
use bellbox_core::{
    machine_behavior, make_prn_wiring, pr3_formula_check, recipe, seesaw_maximize, theta_sweep,
    wire_pr_boxes, AnyBehavior, BellFunctional, BlochDomain, MachineSpec, Scenario, SeesawOptions,
    TwoQubitState, WiringTable,
};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

const EXIT_REJECTED: u8 = 2;

#[derive(Parser)]
#[command(
    name = "bellbox",
    version,
    about = "Bell inequalities, non-local machines and wirings"
)]
struct Cli {
    /// Worker threads for parallel searches (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Clone, Copy, ValueEnum)]
enum CurveFormat {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Domain {
    Sphere,
    Xz,
}

#[derive(Subcommand)]
enum Command {
    /// Print a named functional (families: chsh, I, M, C1, C2).
    Gen {
        #[arg(long)]
        family: String,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// Evaluate a functional on a behavior.
    Eval {
        /// JSON file, family:N, or a name such as CHSH, I3322, M4422.
        #[arg(long)]
        functional: String,
        /// JSON file, pr, or prn:N.
        #[arg(long)]
        behavior: String,
    },
    /// Machine construction and checks.
    Machine {
        #[command(subcommand)]
        action: MachineAction,
    },
    /// List the local deterministic behaviors.
    EnumLocal {
        #[arg(long)]
        n: usize,
        /// Largest N accepted.
        #[arg(long, default_value_t = 6)]
        cap: usize,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// List no-signaling vertices (N = 2 or 3).
    EnumNs {
        #[arg(long)]
        n: usize,
        /// Attach the class label to each non-local vertex (N = 3).
        #[arg(long)]
        classify: bool,
    },
    /// Three-setting vertex classes and their facet violation counts.
    Census {
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// Certify a facet of a strategy class; exits 2 if rejected.
    VerifyFacet {
        #[arg(long)]
        ineq: String,
        /// local, box:pr, or box:pr:N.
        #[arg(long, default_value = "local")]
        class: String,
    },
    /// Sample M-violating behaviors and check they violate C1 and C2.
    Lemma1 {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Qubit see-saw optimization.
    Quantum {
        #[command(subcommand)]
        action: QuantumAction,
    },
}

#[derive(Subcommand)]
enum MachineAction {
    /// Machine given by the joint coefficients of a functional.
    Recipe {
        #[arg(long)]
        functional: String,
    },
    /// Machine obtained by wiring PR-boxes (JSON file or prn:N).
    Wire {
        #[arg(long)]
        wiring: String,
    },
    /// Wiring table building PR_N from N-1 PR-boxes.
    Prn {
        #[arg(long)]
        n: usize,
    },
    /// Validate a machine; with --functional, exit 2 unless it equals the recipe.
    Check {
        /// JSON file, pr, or prn:N.
        #[arg(long)]
        machine: String,
        #[arg(long)]
        functional: Option<String>,
    },
}

#[derive(clap::Args)]
struct SeesawArgs {
    #[arg(long)]
    functional: String,
    #[arg(long, default_value_t = 20)]
    restarts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1000)]
    max_iterations: usize,
    #[arg(long, default_value_t = 1e-10)]
    tolerance: f64,
    #[arg(long, value_enum, default_value = "sphere")]
    domain: Domain,
}

impl SeesawArgs {
    fn options(&self) -> SeesawOptions {
        SeesawOptions {
            restarts: self.restarts,
            seed: self.seed,
            max_iterations: self.max_iterations,
            tolerance: self.tolerance,
            domain: match self.domain {
                Domain::Sphere => BlochDomain::Sphere,
                Domain::Xz => BlochDomain::XzPlane,
            },
        }
    }
}

#[derive(Subcommand)]
enum QuantumAction {
    /// Best see-saw value for cos(t)|00> + sin(t)|11>.
    Seesaw {
        #[command(flatten)]
        args: SeesawArgs,
        /// Schmidt angle in radians (default pi/4).
        #[arg(long)]
        theta: Option<f64>,
    },
    /// See-saw maximum on an even grid of angles in [0, pi/4].
    Sweep {
        #[command(flatten)]
        args: SeesawArgs,
        #[arg(long, default_value_t = 100)]
        grid: usize,
        #[arg(long, value_enum, default_value = "csv")]
        format: CurveFormat,
    },
}

fn read_json(path: &str) -> Result<Value> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {path}"))
}

fn parse_n(s: &str, what: &str) -> Result<usize> {
    s.parse().map_err(|_| anyhow!("bad {what} size {s:?}"))
}

/// `I3322` style names: family letter(s), the setting count twice, then 22.
fn named_functional(name: &str) -> Option<BellFunctional> {
    if name.eq_ignore_ascii_case("chsh") {
        return by_name("chsh", 2).ok();
    }
    let body = name.strip_suffix("22")?;
    let split = body.find(|c: char| c.is_ascii_digit())?;
    let (family, digits) = body.split_at(split);
    let half = digits.len() / 2;
    if digits.len() % 2 != 0 || digits[..half] != digits[half..] {
        return None;
    }
    let n: usize = digits[..half].parse().ok()?;
    by_name(family, n).ok()
}

fn load_functional(spec: &str) -> Result<BellFunctional> {
    if let Some((family, n)) = spec.split_once(':') {
        return Ok(by_name(family, parse_n(n, "functional")?)?);
    }
    if let Some(f) = named_functional(spec) {
        return Ok(f);
    }
    if std::path::Path::new(spec).exists() {
        return Ok(BellFunctional::from_json(&read_json(spec)?)?);
    }
    bail!(
        "unknown functional {spec:?}; use a JSON file, family:N with family in {{{}}}, or a name like I3322",
        FAMILIES.join(", ")
    )
}

fn load_machine(spec: &str) -> Result<MachineSpec> {
    match spec.split_once(':') {
        _ if spec == "pr" => Ok(MachineSpec::pr_box()),
        Some(("prn", n)) => Ok(MachineSpec::pr_n(parse_n(n, "machine")?)?),
        _ => Ok(MachineSpec::from_json(&read_json(spec)?)?),
    }
}

fn load_behavior(spec: &str) -> Result<AnyBehavior> {
    if spec == "pr" || spec.starts_with("prn:") {
        return Ok(AnyBehavior::Exact(machine_behavior(&load_machine(spec)?)?));
    }
    Ok(AnyBehavior::from_json(&read_json(spec)?)?)
}

fn load_class(spec: &str) -> Result<StrategyClass> {
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        ["local"] => Ok(StrategyClass::Local),
        ["box", "pr"] => Ok(StrategyClass::OneMachine(MachineSpec::pr_box())),
        ["box", "pr", n] => Ok(StrategyClass::OneMachine(MachineSpec::pr_n(parse_n(
            n, "machine",
        )?)?)),
        _ => bail!("unknown class {spec:?}; use local, box:pr or box:pr:N"),
    }
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

fn run(cli: Cli, out: &mut String) -> Result<u8> {
    match cli.command {
        Command::Gen { family, n, format } => {
            let f = by_name(&family, n)?;
            out.push_str(&match format {
                Format::Json => pretty(&f.to_json()),
                Format::Table => f.to_table(),
            });
        }
        Command::Eval {
            functional,
            behavior,
        } => {
            let f = load_functional(&functional)?;
            let value = match load_behavior(&behavior)? {
                AnyBehavior::Exact(p) => f.evaluate(&p)?.to_string(),
                AnyBehavior::Float(p) => bellbox_core::scalar::format_float(f.evaluate(&p)?),
            };
            out.push_str(&value);
            out.push('\n');
        }
        Command::Machine { action } => return machine(action, out),
        Command::EnumLocal { n, cap, format } => {
            let pts = enumerate_local_with_cap(Scenario::new(n)?, cap)?;
            match format {
                Format::Json => out.push_str(&pretty(&Value::Array(
                    pts.iter().map(|p| p.to_json()).collect(),
                ))),
                Format::Table => {
                    let tables: Vec<String> = pts.iter().map(|p| p.to_table()).collect();
                    out.push_str(&tables.join("\n"));
                }
            }
        }
        Command::EnumNs { n, classify } => {
            let v = match n {
                2 => {
                    let c = ns_vertices_n2()?;
                    json!({
                        "local": c.local.iter().map(|p| p.to_json()).collect::<Vec<_>>(),
                        "nonlocal": c.nonlocal.iter().map(|p| p.to_json()).collect::<Vec<_>>(),
                    })
                }
                3 => {
                    let verts = enumerate_ns_vertices_n3()?;
                    Value::Array(
                        verts
                            .iter()
                            .map(|(p, label)| {
                                if classify {
                                    json!({"class": label.to_string(), "point": p.to_json()})
                                } else {
                                    p.to_json()
                                }
                            })
                            .collect(),
                    )
                }
                _ => bail!("no-signaling vertex enumeration is available for N = 2 and 3, got {n}"),
            };
            out.push_str(&pretty(&v));
        }
        Command::Census { format } => {
            let (c, i) = facets_n3();
            let classes = violation_census(&enumerate_ns_vertices_n3()?, &c, &i)?;
            out.push_str(&match format {
                Format::Json => pretty(&census_json(&classes)),
                Format::Table => census_table(&classes),
            });
        }
        Command::VerifyFacet { ineq, class } => {
            let f = load_functional(&ineq)?;
            let cert = verify_facet(&f, &load_class(&class)?)?;
            out.push_str(&pretty(&cert.to_json()));
            if !cert.accepted() {
                return Ok(EXIT_REJECTED);
            }
        }
        Command::Lemma1 { n, samples, seed } => {
            let rep = sample_lemma1(n, samples, seed)?;
            out.push_str(&pretty(&rep.to_json()));
            if !rep.counterexamples.is_empty() {
                return Ok(EXIT_REJECTED);
            }
        }
        Command::Quantum { action } => match action {
            QuantumAction::Seesaw { args, theta } => {
                let f = load_functional(&args.functional)?;
                let theta = theta.unwrap_or(FRAC_PI_4);
                let r = seesaw_maximize(&f, &TwoQubitState::schmidt(theta), &args.options())?;
                let mut v = r.to_json();
                v["theta"] = json!(theta);
                v["restarts"] = json!(args.restarts);
                v["seed"] = json!(args.seed);
                out.push_str(&pretty(&v));
            }
            QuantumAction::Sweep { args, grid, format } => {
                let f = load_functional(&args.functional)?;
                let curve = theta_sweep(&f, grid, &args.options())?;
                out.push_str(&match format {
                    CurveFormat::Csv => curve.to_csv(),
                    CurveFormat::Json => pretty(&curve.to_json()),
                });
            }
        },
    }
    Ok(0)
}

fn machine(action: MachineAction, out: &mut String) -> Result<u8> {
    match action {
        MachineAction::Recipe { functional } => {
            out.push_str(&pretty(&recipe(&load_functional(&functional)?)?.to_json()));
        }
        MachineAction::Wire { wiring } => {
            let w = match wiring.strip_prefix("prn:") {
                Some(n) => make_prn_wiring(parse_n(n, "wiring")?)?,
                None => WiringTable::from_json(&read_json(&wiring)?)?,
            };
            out.push_str(&pretty(&wire_pr_boxes(&w)?.to_json()));
        }
        MachineAction::Prn { n } => {
            out.push_str(&pretty(&make_prn_wiring(n)?.to_json()));
        }
        MachineAction::Check {
            machine,
            functional,
        } => {
            let m = load_machine(&machine)?;
            let mut v = json!({
                "machine": m.to_json(),
                "behavior": machine_behavior(&m)?.to_json(),
                "parity_matrix": m.parity_matrix(),
            });
            if m.n_inputs == 3 {
                v["pr3_formula"] = json!(pr3_formula_check(&m)?);
            }
            let mut code = 0;
            if let Some(f) = functional {
                let matches = recipe(&load_functional(&f)?)? == m;
                v["matches_recipe"] = json!(matches);
                if !matches {
                    code = EXIT_REJECTED;
                }
            }
            out.push_str(&pretty(&v));
            return Ok(code);
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    let mut out = String::new();
    match run(cli, &mut out) {
        Ok(code) => {
            print!("{out}");
            ExitCode::from(code)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
