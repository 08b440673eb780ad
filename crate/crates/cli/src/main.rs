//! `forestmat`: forest matrices of weighted digraphs from the command line.
//!
//! Every command reads an edge list and writes one JSON document to stdout.
//! Exit status is 0 on success, 1 on a domain error (the document then
//! carries an `error` object) and 2 on a usage error.

mod json;

use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use forestmat::markov::{DEFAULT_CESARO_TOL, DEFAULT_T_MAX};
use forestmat::oracle::DEFAULT_VERTEX_LIMIT;
use forestmat::{
    approx_top_reachability, cesaro_limit, check_addition_to_monotonicity, check_condition,
    daniels_scores_strong, dissemination_estimate, dissemination_target, exact_forest_recurrence,
    forest_dimension, forest_stack, generalized_borda, inverse_corresponding_chain, jbar,
    load_digraph, max_alpha, mean_score, rank_order, reachability_from_jtau,
    reachability_from_top_layers, source_knots, top_reachability, uniform_start_distribution,
    uniform_start_from_cesaro, verify_digraph, verify_tree_theorem, BordaDegrees, Condition,
    ConditionReport, Digraph, Direction, Error, MeasureSpec, Mode, ScoreMethod, Tau, Variant,
};
use serde_json::{json, Map, Value};

use crate::json::{
    binary, document, error_kind, label, label_groups, labels, matrix, number, numbers, rational,
    render,
};

const EXACT_ENV: &str = "FOREST_CALC_EXACT";

#[derive(Parser, Debug)]
#[command(name = "forestmat", version, about = "Spanning-forest matrices of weighted digraphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Input {
    /// Edge list: vertex count, then `tail head [weight]` per line.
    #[arg(long)]
    input: String,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Forest counts, normalized forest matrices and the maximum-forest matrix.
    Forests(Input),
    /// Reachability from J(tau) and top reachability from the maximum-forest matrix.
    Reach {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 1.0)]
        tau: f64,
    },
    /// Source knots and their exclusive reach.
    Knots(Input),
    /// Accessibility matrix, or a check of one condition on it.
    Access {
        #[command(flatten)]
        input: Input,
        /// Positive real or `inf`.
        #[arg(long, default_value = "1")]
        tau: Tau,
        /// `out` or `in`.
        #[arg(long, default_value = "out")]
        direction: Direction,
        /// `condition[:variant]`, e.g. `transit:A` or `monotonicity:unpartitioned`.
        #[arg(long)]
        check: Option<CheckArg>,
        #[arg(long, default_value = "strict")]
        mode: Mode,
    },
    /// Vertex scores and the induced ranking.
    Rank {
        #[command(flatten)]
        input: Input,
        /// `mean-jbar`, `borda` or `daniels`.
        #[arg(long, default_value = "mean-jbar")]
        method: ScoreMethod,
        /// Used by `borda` only.
        #[arg(long, default_value_t = 1.0)]
        tau: f64,
        /// Degree vector of `borda`: `weighted` or `count`.
        #[arg(long, default_value = "weighted")]
        degrees: BordaDegrees,
    },
    /// Cesàro limit of the inversely corresponding Markov chain.
    Markov {
        #[command(flatten)]
        input: Input,
        /// Defaults to `1 / (1 + max l_ii)`.
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_CESARO_TOL)]
        tol: f64,
        #[arg(long, default_value_t = DEFAULT_T_MAX)]
        tmax: u64,
    },
    /// Monte-Carlo dissemination along random plans; weights are probabilities.
    Simulate {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Every identity cross-check on one digraph with at most 8 vertices.
    Verify(Input),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Forests(_) => "forests",
            Command::Reach { .. } => "reach",
            Command::Knots(_) => "knots",
            Command::Access { .. } => "access",
            Command::Rank { .. } => "rank",
            Command::Markov { .. } => "markov",
            Command::Simulate { .. } => "simulate",
            Command::Verify(_) => "verify",
        }
    }

    fn input(&self) -> &str {
        match self {
            Command::Forests(i) | Command::Knots(i) | Command::Verify(i) => &i.input,
            Command::Reach { input, .. }
            | Command::Access { input, .. }
            | Command::Rank { input, .. }
            | Command::Markov { input, .. }
            | Command::Simulate { input, .. } => &input.input,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum CheckTarget {
    Condition(Condition),
    AdditionToMonotonicity,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct CheckArg {
    target: CheckTarget,
    variant: Option<Variant>,
}

impl FromStr for CheckArg {
    type Err = Error;

    fn from_str(s: &str) -> forestmat::Result<Self> {
        let (name, variant) = match s.split_once(':') {
            Some((name, v)) => (name, Some(v.parse::<Variant>()?)),
            None => (s, None),
        };
        let target = if name.trim().eq_ignore_ascii_case("addition-to-monotonicity") {
            CheckTarget::AdditionToMonotonicity
        } else {
            CheckTarget::Condition(name.parse()?)
        };
        Ok(CheckArg { target, variant })
    }
}

/// A failure after argument parsing: either the input could not be read or
/// a library call rejected it.
enum Failure {
    Io(String),
    Domain(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

type Outcome = Result<(Value, Map<String, Value>), Failure>;

fn exact_requested() -> bool {
    std::env::var(EXACT_ENV).is_ok_and(|v| v == "1")
}

fn read_digraph(path: &str) -> Result<Digraph, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{path}: {e}")))?;
    Ok(load_digraph(&text)?)
}

fn forests(g: &Digraph) -> Outcome {
    let exact = exact_requested();
    let mut body = Map::new();
    if exact {
        let stack = exact_forest_recurrence(g)?;
        body.insert("d_prime".into(), json!(stack.forest_dimension()));
        body.insert(
            "sigmas".into(),
            json!(stack.sigmas.iter().map(|s| s.to_string()).collect::<Vec<_>>()),
        );
        body.insert(
            "q_matrices".into(),
            Value::Array(stack.q_matrices.iter().map(rational).collect()),
        );
        body.insert("jbar".into(), rational(&stack.jbar()));
    } else {
        let stack = forest_stack(g)?;
        let d_prime = forest_dimension(&stack, g)?;
        let (q, sigma) = stack.total();
        body.insert("d_prime".into(), json!(d_prime));
        body.insert("sigmas".into(), numbers(&stack.sigmas()));
        body.insert("sigma".into(), number(sigma));
        body.insert("q_matrices".into(), Value::Array(stack.q_matrices().iter().map(matrix).collect()));
        body.insert("q_total".into(), matrix(&q));
        body.insert("jbar".into(), matrix(&jbar(&stack).jbar));
    }
    Ok((json!({ "exact": exact }), body))
}

/// Top reachability from the floating-point `J_bar`, or from one exact
/// inverse when exact mode is on and the weights are all 1.
fn top_reachability_json(g: &Digraph, exact: bool) -> Result<Value, Failure> {
    if exact && g.is_unit_weighted() {
        return Ok(binary(&approx_top_reachability(g)?.entries));
    }
    Ok(binary(&top_reachability(&jbar(&forest_stack(g)?)).entries))
}

fn reach(g: &Digraph, tau: f64) -> Outcome {
    let exact = exact_requested();
    let knots = source_knots(g);
    let mut body = Map::new();
    body.insert("d_prime".into(), json!(knots.d_prime()));
    body.insert("knots".into(), label_groups(&knots.knots));
    body.insert("reachability".into(), binary(&reachability_from_jtau(g, tau)?));
    body.insert("top_reachability".into(), top_reachability_json(g, exact)?);
    Ok((json!({ "tau": number(tau), "exact": exact }), body))
}

fn knots(g: &Digraph) -> Outcome {
    let exact = exact_requested();
    let stack = forest_stack(g)?;
    let knots = source_knots(g);
    let mut body = Map::new();
    body.insert("d_prime".into(), json!(forest_dimension(&stack, g)?));
    body.insert("knots".into(), label_groups(&knots.knots));
    body.insert("exclusive_reach".into(), label_groups(&knots.exclusive_reach));
    body.insert("reachability".into(), binary(&reachability_from_top_layers(&stack)));
    body.insert("top_reachability".into(), top_reachability_json(g, exact)?);
    Ok((json!({ "exact": exact }), body))
}

fn report_json(r: &ConditionReport) -> Value {
    let witness = r.witness.as_ref().map_or(Value::Null, |w| {
        let perturbation = w.perturbation.as_ref().map_or(Value::Null, |p| {
            json!({
                "tail": label(p.tail),
                "head": label(p.head),
                "old_weight": number(p.old_weight),
                "new_weight": number(p.new_weight),
            })
        });
        json!({
            "vertices": labels(&w.vertices),
            "values": numbers(&w.values),
            "perturbation": perturbation,
            "description": w.description,
        })
    });
    json!({
        "condition": r.condition,
        "variant": r.variant.name(),
        "mode": r.mode.name(),
        "verdict": if r.passed() { "pass" } else { "fail" },
        "witness": witness,
    })
}

fn access(g: &Digraph, tau: Tau, direction: Direction, check: Option<CheckArg>, mode: Mode) -> Outcome {
    let spec = MeasureSpec {
        direction,
        tau: tau.validate()?,
    };
    let mut params = json!({
        "tau": tau.to_string(),
        "direction": direction.name(),
        "mode": mode.name(),
        "check": Value::Null,
    });
    let mut body = Map::new();
    match check {
        None => {
            body.insert("matrix".into(), matrix(&spec.evaluate(g)?.entries));
        }
        Some(CheckArg { target, variant }) => {
            let report = match target {
                CheckTarget::Condition(c) => {
                    let variant = variant.unwrap_or_else(|| c.default_variant());
                    params["check"] = json!(format!("{}:{}", c.name(), variant.name()));
                    check_condition(g, spec, c, variant, mode)?
                }
                CheckTarget::AdditionToMonotonicity => {
                    let Tau::Finite(t) = tau else {
                        return Err(Error::Precondition(
                            "addition-to-monotonicity needs a finite tau".into(),
                        )
                        .into());
                    };
                    params["check"] = json!("addition-to-monotonicity");
                    check_addition_to_monotonicity(g, direction, t)?
                }
            };
            body.insert("report".into(), report_json(&report));
        }
    }
    Ok((params, body))
}

fn rank(g: &Digraph, method: ScoreMethod, tau: f64, degrees: BordaDegrees) -> Outcome {
    let scores = match method {
        ScoreMethod::MeanJbar => mean_score(g)?,
        ScoreMethod::GeneralizedBorda => generalized_borda(g, tau, degrees)?,
        ScoreMethod::Daniels => daniels_scores_strong(g)?,
    };
    let params = match method {
        ScoreMethod::GeneralizedBorda => {
            json!({ "method": method.name(), "tau": number(tau), "degrees": degrees.name() })
        }
        _ => json!({ "method": method.name() }),
    };
    let mut body = Map::new();
    body.insert("d_prime".into(), json!(source_knots(g).d_prime()));
    body.insert("scores".into(), numbers(&scores.values));
    body.insert("ranking".into(), label_groups(&rank_order(&scores.values)));
    Ok((params, body))
}

fn markov(g: &Digraph, alpha: Option<f64>, tol: f64, tmax: u64) -> Outcome {
    let chain = inverse_corresponding_chain(g, alpha)?;
    let cesaro = cesaro_limit(&chain, tol, tmax)?;
    let check = verify_tree_theorem(g, &cesaro)?;
    let mut body = Map::new();
    body.insert("alpha_max".into(), number(max_alpha(g)));
    body.insert("transition".into(), matrix(&chain.transition));
    body.insert("cesaro".into(), matrix(&cesaro.matrix));
    body.insert("horizon".into(), json!(cesaro.iterations));
    body.insert("residual".into(), number(cesaro.residual));
    body.insert("jbar_transpose_deviation".into(), number(check.max_deviation));
    body.insert("equals_jbar_transpose".into(), json!(check.holds));
    body.insert("uniform_start".into(), numbers(&uniform_start_distribution(g)?));
    body.insert("uniform_start_from_cesaro".into(), numbers(&uniform_start_from_cesaro(&cesaro)));
    let params = json!({ "alpha": number(chain.alpha), "tol": number(tol), "tmax": tmax });
    Ok((params, body))
}

fn simulate(g: &Digraph, trials: u64, seed: u64) -> Outcome {
    let est = dissemination_estimate(g, trials, seed)?;
    let target = dissemination_target(g)?;
    let (z_max, degenerate) = est.standardized_deviation(&target);
    let mut body = Map::new();
    body.insert("successes".into(), json!(est.successes));
    body.insert("estimate".into(), matrix(&est.estimate));
    body.insert("target".into(), matrix(&target));
    body.insert("max_standard_errors".into(), number(z_max));
    body.insert("max_degenerate_deviation".into(), number(degenerate));
    Ok((json!({ "trials": trials, "seed": seed }), body))
}

fn verify(g: &Digraph) -> Result<(Value, Map<String, Value>, bool), Failure> {
    if g.n() > DEFAULT_VERTEX_LIMIT {
        return Err(Error::Precondition(format!(
            "verify needs at most {DEFAULT_VERTEX_LIMIT} vertices, got {}",
            g.n()
        ))
        .into());
    }
    let report = verify_digraph(g)?;
    let checks: Vec<Value> = report
        .checks
        .iter()
        .map(|c| {
            json!({
                "name": c.name,
                "status": c.status.name(),
                "deviation": number(c.deviation),
                "tolerance": number(c.tolerance),
                "detail": c.detail,
            })
        })
        .collect();
    let passed = report.all_passed();
    let mut body = Map::new();
    body.insert("n".into(), json!(report.n));
    body.insert("all_passed".into(), json!(passed));
    body.insert("checks".into(), Value::Array(checks));
    Ok((json!({}), body, passed))
}

fn run(command: &Command) -> (Value, ExitCode) {
    let name = command.name();
    let input = command.input();
    let outcome = read_digraph(input).and_then(|g| match command {
        Command::Forests(_) => forests(&g).map(|(p, b)| (p, b, true)),
        Command::Reach { tau, .. } => reach(&g, *tau).map(|(p, b)| (p, b, true)),
        Command::Knots(_) => knots(&g).map(|(p, b)| (p, b, true)),
        Command::Access {
            tau,
            direction,
            check,
            mode,
            ..
        } => access(&g, *tau, *direction, *check, *mode).map(|(p, b)| (p, b, true)),
        Command::Rank {
            method,
            tau,
            degrees,
            ..
        } => rank(&g, *method, *tau, *degrees).map(|(p, b)| (p, b, true)),
        Command::Markov {
            alpha, tol, tmax, ..
        } => markov(&g, *alpha, *tol, *tmax).map(|(p, b)| (p, b, true)),
        Command::Simulate { trials, seed, .. } => {
            simulate(&g, *trials, *seed).map(|(p, b)| (p, b, true))
        }
        Command::Verify(_) => verify(&g),
    });
    match outcome {
        Ok((params, body, ok)) => {
            let code = if ok { ExitCode::SUCCESS } else { ExitCode::from(1) };
            (document(name, input, params, body), code)
        }
        Err(failure) => {
            let (kind, message) = match failure {
                Failure::Io(m) => ("io", m),
                Failure::Domain(e) => (error_kind(&e), e.to_string()),
            };
            let mut body = Map::new();
            body.insert("error".into(), json!({ "kind": kind, "message": message }));
            (document(name, input, Value::Null, body), ExitCode::from(1))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (doc, code) = run(&cli.command);
    print!("{}", render(&doc));
    code
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn check_argument_parsing() {
        let c: CheckArg = "transit:A".parse().unwrap();
        assert_eq!(c.target, CheckTarget::Condition(Condition::TransitProperty));
        assert_eq!(c.variant, Some(Variant::A));
        let c: CheckArg = "monotonicity".parse().unwrap();
        assert_eq!(c.variant, None);
        let c: CheckArg = "addition-to-monotonicity".parse().unwrap();
        assert_eq!(c.target, CheckTarget::AdditionToMonotonicity);
        assert!("no-such".parse::<CheckArg>().is_err());
        assert!("transit:Q".parse::<CheckArg>().is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn usage_errors_are_rejected_by_the_parser() {
        assert!(Cli::try_parse_from(["forestmat", "access", "--input", "x", "--tau", "-1x"]).is_err());
        assert!(Cli::try_parse_from(["forestmat", "rank", "--input", "x", "--method", "elo"]).is_err());
        assert!(Cli::try_parse_from(["forestmat", "frobnicate"]).is_err());
        let ok = Cli::try_parse_from(["forestmat", "access", "--input", "x", "--tau", "inf"]).unwrap();
        assert!(matches!(ok.command, Command::Access { tau: Tau::Infinite, .. }));
    }

    #[test]
    fn p3_forests_document() {
        let g = load_digraph("3\n1 2\n2 3").unwrap();
        let (_, body) = forests(&g).ok().unwrap();
        assert_eq!(body["sigmas"], json!([1.0, 2.0, 1.0]));
        assert_eq!(body["d_prime"], json!(1));
        assert_eq!(body["jbar"], json!([[1.0, 1.0, 1.0], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0]]));
    }

    #[test]
    fn two_sources_mean_scores() {
        let g = load_digraph("3\n1 3\n2 3").unwrap();
        let (_, body) = rank(&g, ScoreMethod::MeanJbar, 1.0, BordaDegrees::Weighted).ok().unwrap();
        assert_eq!(body["scores"], json!([0.5, 0.5, 0.0]));
        assert_eq!(body["ranking"], json!([[1, 2], [3]]));
        assert_eq!(body["d_prime"], json!(2));
    }
}
