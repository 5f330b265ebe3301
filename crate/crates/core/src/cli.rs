//! Command-line surface: argument definitions, suite dispatch and rendering.

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::calculus::{
    d_times, phi, suite_calculus, suite_cartan_maurer, suite_complex, suite_omega, theta,
};
use crate::dual::{check_iso, suite_duality, Pairing};
use crate::error::{Error, Result};
use crate::freealg::{graded_commutator, Element, Family, Gen, TensorElement, TensorRule};
use crate::hopf::{
    costructure_coordinate, costructure_dual, costructure_omega, costructure_operator_relations,
    covariance_suite, suite_hopf, suite_solve, BCoproduct, Coaction, Side, UNKNOWNS,
};
use crate::lie::{act, suite_d_decomposition, suite_lie, suite_operator_hopf, OpExpr};
use crate::parse::{parse, parse_element, parse_scalar, Parsed};
use crate::report::{Report, RunConfig};
use crate::rewrite::{all_systems, build_main_system, system_by_name, RewriteSystem, Strategy};
use crate::scalars::QMode;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Twist {
    /// Graded rule for the form algebra, plain elsewhere.
    Auto,
    On,
    Off,
}

impl Twist {
    pub fn name(self) -> &'static str {
        match self {
            Twist::Auto => "auto",
            Twist::On => "on",
            Twist::Off => "off",
        }
    }

    /// Tensor rule for the form algebra.
    pub fn omega_rule(self) -> TensorRule {
        match self {
            Twist::Auto | Twist::On => TensorRule::Twisted,
            Twist::Off => TensorRule::Untwisted,
        }
    }

    pub fn from_name(s: &str) -> Option<Twist> {
        match s {
            "auto" => Some(Twist::Auto),
            "on" => Some(Twist::On),
            "off" => Some(Twist::Off),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CoproductMap {
    /// Coordinate algebra.
    A,
    /// Form algebra in θ, φ.
    Omega,
    /// Right coaction on the differential algebra.
    R,
    /// Left coaction on the differential algebra.
    L,
    /// Quantum Lie algebra in H, X, q^±N.
    Op,
    /// Dual algebra with Δ(B) = B ⊗ q^A + 1 ⊗ B.
    Dual,
    /// Dual algebra with Δ(B) = B ⊗ q^-A + 1 ⊗ B, the form dual to the pairing.
    DualPairing,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    Leftmost,
    Rightmost,
}

#[derive(Parser, Debug)]
#[command(
    name = "qplane",
    version,
    about = "Exact engine for the Z3-graded differential calculus on the quantum plane"
)]
pub struct Cli {
    /// `symbolic` keeps q free; `specialized` sets q = j.
    #[arg(long, global = true, default_value = "specialized")]
    pub q_mode: QMode,
    #[arg(long, global = true, default_value_t = 8)]
    pub max_degree: usize,
    /// Word-length window for Hopf axiom checks.
    #[arg(long, global = true, default_value_t = 4)]
    pub window: usize,
    #[arg(long, global = true, value_enum, default_value_t = Twist::Auto)]
    pub tensor_twist: Twist,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Normal form of an element or tensor.
    Normalize {
        expr: String,
        /// Rewrite system; inferred from the alphabet when omitted.
        #[arg(long)]
        system: Option<String>,
        #[arg(long, value_enum, default_value_t = StrategyArg::Leftmost)]
        strategy: StrategyArg,
    },
    /// Exterior derivative, applied `--times` times.
    D {
        expr: String,
        #[arg(long, default_value_t = 1)]
        times: usize,
    },
    /// Z3 degree of a homogeneous element.
    Grade { expr: String },
    /// Graded commutator [a, b] = ab - j^(|a||b|) ba.
    Commutator { a: String, b: String },
    /// Coproduct or coaction of an element.
    Coproduct {
        expr: String,
        #[arg(long, value_enum, default_value_t = CoproductMap::A)]
        map: CoproductMap,
    },
    /// Action of an operator on a coordinate polynomial.
    Act {
        expr: String,
        /// Composition such as `H`, `X*H`, `x*dax`, `q^-N`.
        #[arg(long)]
        op: String,
    },
    /// Pairing <u, f> of a dual-algebra element with a coordinate polynomial.
    Pair { u: String, f: String },
    /// Derive the commutation coefficients from covariance.
    SolveCoefficients {
        /// Pin an unknown, e.g. `--set F=1`.
        #[arg(long = "set", value_name = "NAME=VALUE")]
        set: Vec<String>,
    },
    /// Run a verification suite.
    Verify {
        suite: String,
        /// Rule table (JSON) replacing the built-in systems in `confluence`.
        #[arg(long)]
        rules: Option<PathBuf>,
    },
    /// Print a rewrite system as JSON.
    DumpRules {
        #[arg(long, default_value = "main")]
        system: String,
    },
}

pub const SUITES: [&str; 14] = [
    "calculus",
    "confluence",
    "covariance",
    "hopf",
    "omega",
    "cartan-maurer",
    "complex",
    "lie",
    "d-decomposition",
    "operator-hopf",
    "duality",
    "iso",
    "coefficients",
    "all",
];

/// What a command produced.
#[derive(Debug)]
pub enum Output {
    Text(String),
    Report(Report),
}

/// Picks the rewrite system matching an element's alphabet.
pub fn infer_system(e: &Element, mode: QMode) -> RewriteSystem {
    let fam = [
        Family::Main,
        Family::Omega,
        Family::Operator,
        Family::Partial,
        Family::Dual,
    ]
    .into_iter()
    .find(|f| e.in_family(*f))
    .unwrap_or(Family::Main);
    let name = match fam {
        Family::Main => "main",
        Family::Omega => "omega",
        Family::Operator => "operator-relations",
        Family::Partial => "partial",
        Family::Dual => "dual",
    };
    system_by_name(name, mode).expect("built-in system")
}

pub fn tensor_as_element(t: &TensorElement) -> Element {
    let mut e = Element::zero();
    for (legs, c) in t.terms() {
        for w in legs {
            e.add_term(w.clone(), c);
        }
    }
    e
}

pub fn expand_forms(e: &Element, sys: &RewriteSystem) -> Result<Element> {
    let (th, ph) = (theta(sys)?, phi(sys)?);
    Ok(e.substitute(|g| match g {
        Gen::Theta => Some(th.clone()),
        Gen::Phi => Some(ph.clone()),
        _ => None,
    }))
}

/// Runs one named suite.
pub fn run_suite(name: &str, cfg: &RunConfig, rules: Option<&str>) -> Result<Report> {
    let mode = cfg.q_mode;
    let twist = Twist::from_name(&cfg.tensor_twist).ok_or_else(|| {
        Error::Unsupported(format!("unknown tensor twist `{}`", cfg.tensor_twist))
    })?;
    let main = || build_main_system(mode);
    let conf_len = cfg.max_degree.min(6);
    Ok(match name {
        "calculus" => suite_calculus(&main(), cfg.max_degree, 200, cfg.seed)?,
        "confluence" => {
            let systems = match rules {
                Some(text) => vec![RewriteSystem::from_json(text)?],
                None => all_systems(mode),
            };
            let mut r = Report::new("confluence");
            for sys in systems {
                let c = sys.check_local_confluence(conf_len)?;
                let first = |v: &[crate::rewrite::Unjoinable]| {
                    v.first()
                        .map(|u| {
                            format!(
                                "{} unjoinable; {}: {} vs {}",
                                v.len(),
                                u.word,
                                u.left,
                                u.right
                            )
                        })
                        .unwrap_or_else(|| "0".into())
                };
                r.record(
                    format!("{}/critical-pairs", c.system),
                    format!("all {} critical pairs join", c.critical_pairs),
                    c.unjoinable.is_empty(),
                    first(&c.unjoinable),
                );
                r.record(
                    format!("{}/strategies", c.system),
                    format!("leftmost and rightmost normal forms agree on {} words of length <= {conf_len}", c.words_checked),
                    c.strategy_mismatches.is_empty(),
                    first(&c.strategy_mismatches),
                );
                r.record(
                    format!("{}/ordering", c.system),
                    "every out-of-order letter pair has a rule",
                    c.missing_rules.is_empty(),
                    format!("{:?}", c.missing_rules),
                );
            }
            r
        }
        "covariance" => covariance_suite(mode, 3)?,
        "hopf" => suite_hopf(mode, cfg.window, twist.omega_rule())?,
        "omega" => suite_omega(&main(), cfg.max_degree.min(6))?,
        "cartan-maurer" => suite_cartan_maurer(&main())?,
        "complex" => suite_complex(&main())?,
        "lie" => suite_lie(mode, cfg.max_degree.max(12), cfg.seed)?,
        "d-decomposition" => suite_d_decomposition(mode, cfg.max_degree)?,
        "operator-hopf" => suite_operator_hopf(mode, cfg.window)?,
        "duality" => suite_duality(mode, cfg.seed)?,
        "iso" => check_iso(mode)?,
        "coefficients" => suite_solve(&[])?.0,
        "all" => {
            let mut r = Report::new("all");
            for s in SUITES.iter().filter(|s| **s != "all") {
                r.absorb(run_suite(s, cfg, None)?);
            }
            r
        }
        other => {
            return Err(Error::Unsupported(format!(
                "unknown suite `{other}`; expected one of {}",
                SUITES.join(", ")
            )))
        }
    })
}

fn parse_override(s: &str, mode: QMode) -> Result<(String, crate::scalars::Scalar)> {
    let (name, value) = s
        .split_once('=')
        .ok_or_else(|| Error::Unsupported(format!("`--set {s}` must look like NAME=VALUE")))?;
    let name = name.trim();
    if !UNKNOWNS.contains(&name) {
        return Err(Error::Unsupported(format!(
            "unknown coefficient `{name}`; expected one of {}",
            UNKNOWNS.join(", ")
        )));
    }
    Ok((name.to_string(), parse_scalar(value, mode)?))
}

pub fn config_of(cli: &Cli) -> RunConfig {
    RunConfig {
        q_mode: cli.q_mode,
        max_degree: cli.max_degree,
        window: cli.window,
        tensor_twist: cli.tensor_twist.name().into(),
        seed: cli.seed,
    }
}

/// Executes a parsed command line.
pub fn run(cli: &Cli) -> Result<Output> {
    let mode = cli.q_mode;
    let text = |s: String| Ok(Output::Text(s));
    match &cli.command {
        Command::Normalize {
            expr,
            system,
            strategy,
        } => {
            let strategy = match strategy {
                StrategyArg::Leftmost => Strategy::Leftmost,
                StrategyArg::Rightmost => Strategy::Rightmost,
            };
            match parse(expr, mode)? {
                Parsed::Element(e) => {
                    let sys = match system {
                        Some(name) => system_by_name(name, mode)?,
                        None => infer_system(&e, mode),
                    };
                    text(sys.normalize_with(&e, strategy)?.to_string())
                }
                Parsed::Tensor(t) => {
                    let sys = match system {
                        Some(name) => system_by_name(name, mode)?,
                        None => infer_system(&tensor_as_element(&t), mode),
                    };
                    text(sys.normalize_tensor_uniform(&t)?.to_string())
                }
            }
        }
        Command::D { expr, times } => {
            let sys = build_main_system(mode);
            let e = expand_forms(&parse_element(expr, mode)?, &sys)?;
            text(d_times(&sys, &e, *times)?.to_string())
        }
        Command::Grade { expr } => {
            let e = parse_element(expr, mode)?;
            text(e.grade_of()?.to_string())
        }
        Command::Commutator { a, b } => {
            let (a, b) = (parse_element(a, mode)?, parse_element(b, mode)?);
            let c = graded_commutator(&a, &b)?;
            text(infer_system(&c, mode).normalize(&c)?.to_string())
        }
        Command::Coproduct { expr, map } => {
            let e = parse_element(expr, mode)?;
            let t = match map {
                CoproductMap::A => {
                    let c = costructure_coordinate(mode);
                    c.delta(&c.system.normalize(&e)?)?
                }
                CoproductMap::Omega => {
                    costructure_omega(mode, cli.tensor_twist.omega_rule()).delta(&e)?
                }
                CoproductMap::R => Coaction::new(Side::R, mode).apply(&e)?,
                CoproductMap::L => Coaction::new(Side::L, mode).apply(&e)?,
                CoproductMap::Op => costructure_operator_relations(mode).delta(&e)?,
                CoproductMap::Dual => costructure_dual(mode, BCoproduct::L).delta(&e)?,
                CoproductMap::DualPairing => costructure_dual(mode, BCoproduct::LInv).delta(&e)?,
            };
            text(t.to_string())
        }
        Command::Act { expr, op } => {
            let f = parse_element(expr, mode)?;
            text(act(&OpExpr::parse(op)?, &f, mode)?.to_string())
        }
        Command::Pair { u, f } => {
            let p = Pairing::new(mode, 1);
            text(
                p.pair(&parse_element(u, mode)?, &parse_element(f, mode)?)?
                    .to_string(),
            )
        }
        Command::SolveCoefficients { set } => {
            let overrides = set
                .iter()
                .map(|s| parse_override(s, QMode::Symbolic))
                .collect::<Result<Vec<_>>>()?;
            Ok(Output::Report(suite_solve(&overrides)?.0))
        }
        Command::Verify { suite, rules } => {
            let table = match rules {
                Some(path) => Some(
                    std::fs::read_to_string(path)
                        .map_err(|e| Error::RuleTable(format!("{}: {e}", path.display())))?,
                ),
                None => None,
            };
            if table.is_some() && suite != "confluence" {
                return Err(Error::Unsupported(
                    "`--rules` applies to the confluence suite only".into(),
                ));
            }
            Ok(Output::Report(run_suite(
                suite,
                &config_of(cli),
                table.as_deref(),
            )?))
        }
        Command::DumpRules { system } => text(system_by_name(system, mode)?.to_json()),
    }
}

/// Renders the outcome and returns the process exit code: 0 when everything
/// passed, 1 when a report has failures, 2 on errors.
pub fn render(cli: &Cli, outcome: Result<Output>) -> (String, i32) {
    let json = cli.format == Format::Json;
    match outcome {
        Ok(Output::Text(s)) => {
            let s = if json && !matches!(cli.command, Command::DumpRules { .. }) {
                serde_json::to_string_pretty(&json!({ "result": s })).expect("json")
            } else {
                s
            };
            (s, 0)
        }
        Ok(Output::Report(r)) => {
            let code = if r.all_pass() { 0 } else { 1 };
            let s = if json {
                r.to_json(&config_of(cli))
            } else {
                r.to_string()
            };
            (s, code)
        }
        Err(e) => {
            let s = if json {
                serde_json::to_string_pretty(&json!({ "error": e.to_string() })).expect("json")
            } else {
                format!("error: {e}")
            };
            (s, 2)
        }
    }
}
