//! Command-line front end.  Every command prints exactly one JSON document on
//! standard output; failures produce an error document and a nonzero exit
//! code (2 input, 3 violated precondition, 4 budget exhausted, 1 other).

use std::io::Read;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::blowup::{atlas_json, graph_atlas_check, incidence_check, transitions_check, UnionClosedFamily};
use crate::canon::canonical_key;
use crate::checks::all_suites;
use crate::convergence::{power_count, Integrand};
use crate::corpus::{named_graph, named_graphs};
use crate::cubature::Budget;
use crate::error::{Error, Result};
use crate::graph::{EdgeSet, FeynmanGraph};
use crate::hopf::{antipode, coproduct, coradical_degree, reduced_coproduct_power};
use crate::integrate::integrate;
use crate::io::{parse_graph, parse_point};
use crate::polyparse::parse_poly;
use crate::reconstruct::reconstruct_polynomials;
use crate::strata::{descendants_by_degree, face_map_targets, strata_json};
use crate::symanzik::{factorization_remainder_cached, phi, psi, xi, FactorKind, KinPoint, PolyCache};

/// Identifier of the report schema; bumped on incompatible changes.
pub const SCHEMA: &str = "feynmotic-report/1";

#[derive(Parser, Debug)]
#[command(name = "feynmotic", version, about = "Graph polynomials, motic subgraphs, blow-up atlases and parametric integrals")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GraphArg {
    /// Graph file (text or JSON), `-` for standard input, or `builtin:NAME`.
    pub graph: String,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Ψ, Φ and Ξ of a graph.
    Poly {
        #[command(flatten)]
        input: GraphArg,
        /// Also rebuild (Ψ, Ξ) from the uniqueness axioms and compare.
        #[arg(long)]
        reconstruct: bool,
    },
    /// Motic subgraphs with their loop numbers and spanning properties.
    Motic {
        #[command(flatten)]
        input: GraphArg,
    },
    /// Coproduct, coradical degree and optionally the antipode.
    Coproduct {
        #[command(flatten)]
        input: GraphArg,
        /// Print (Δ′)ⁿ instead of Δ.
        #[arg(long, value_name = "N")]
        reduced_power: Option<usize>,
        /// Include the antipode.
        #[arg(long)]
        antipode: bool,
    },
    /// Factorisation identities for one or all edge subsets.
    FactorCheck {
        #[command(flatten)]
        input: GraphArg,
        /// Edge subset, e.g. `1,2`; all subsets when omitted.
        #[arg(long)]
        gamma: Option<String>,
        /// One of PsiUV, PhiUV, PhiIR, XiUV, XiIR; all applicable when omitted.
        #[arg(long)]
        kind: Option<String>,
    },
    /// Chart atlas of the iterated blow-up along the motic subgraphs.
    Atlas {
        #[command(flatten)]
        input: GraphArg,
    },
    /// Power counting and the convergence criterion.
    Converge {
        #[command(flatten)]
        input: GraphArg,
        /// Space-time dimension (even).
        #[arg(short, long, default_value_t = 4)]
        dimension: u32,
    },
    /// Sector-decomposed numerical integration.
    Integrate {
        #[command(flatten)]
        input: GraphArg,
        /// Space-time dimension (even).
        #[arg(short, long, default_value_t = 4)]
        dimension: u32,
        /// Kinematic point, e.g. `s1_1=1, msq1=1`.
        #[arg(long, default_value = "")]
        point: String,
        /// Numerator polynomial in the α (requires --psi-power and --xi-power).
        #[arg(long)]
        numerator: Option<String>,
        /// Power of Ψ in the denominator for a custom numerator.
        #[arg(long, allow_negative_numbers = true)]
        psi_power: Option<i64>,
        /// Power of Ξ in the denominator for a custom numerator.
        #[arg(long, allow_negative_numbers = true)]
        xi_power: Option<i64>,
        #[arg(long, default_value_t = 2_000_000)]
        max_evals: usize,
        #[arg(long, default_value_t = 1e-8)]
        rel_tol: f64,
        #[arg(long, default_value_t = 1e-10)]
        abs_tol: f64,
        #[arg(long, default_value_t = 0x5eed)]
        seed: u64,
    },
    /// Boundary strata, face maps and descendants.
    Strata {
        #[command(flatten)]
        input: GraphArg,
        /// Maximal descendant degree listed.
        #[arg(long, default_value_t = 1)]
        max_degree: i64,
    },
    /// Runs every invariant suite on the built-in example graphs.
    Selfcheck,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Poly { .. } => "poly",
            Command::Motic { .. } => "motic",
            Command::Coproduct { .. } => "coproduct",
            Command::FactorCheck { .. } => "factor-check",
            Command::Atlas { .. } => "atlas",
            Command::Converge { .. } => "converge",
            Command::Integrate { .. } => "integrate",
            Command::Strata { .. } => "strata",
            Command::Selfcheck => "selfcheck",
        }
    }
}

/// Exit code and report of one invocation.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub code: i32,
    /// The JSON report, or plain text for `--help` and `--version`.
    pub output: String,
}

/// Loads a graph argument.
pub fn load_graph(source: &str) -> Result<FeynmanGraph> {
    if let Some(name) = source.strip_prefix("builtin:") {
        return named_graph(name).ok_or_else(|| {
            let names: Vec<&str> = named_graphs().iter().map(|n| n.name).collect();
            Error::InvalidInput(format!("unknown built-in graph '{name}'; available: {}", names.join(", ")))
        });
    }
    let text = if source == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Error::InvalidInput(format!("cannot read standard input: {e}")))?;
        s
    } else {
        std::fs::read_to_string(source).map_err(|e| Error::InvalidInput(format!("cannot read {source}: {e}")))?
    };
    parse_graph(&text)
}

fn parse_edge_set(g: &FeynmanGraph, text: &str) -> Result<EdgeSet> {
    let mut s = EdgeSet::empty();
    for (i, part) in text.split(',').enumerate() {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let col = text.split(',').take(i).map(|p| p.len() + 1).sum::<usize>() + 1;
        let e: u32 = part.parse().map_err(|_| Error::Parse {
            line: 1,
            column: col,
            message: format!("expected an edge label, found '{part}'"),
        })?;
        if g.edge(e).is_none() {
            return Err(Error::InvalidInput(format!("graph has no edge {e}")));
        }
        s = s.with(e);
    }
    Ok(s)
}

fn graph_summary(g: &FeynmanGraph) -> Value {
    json!({
        "key": canonical_key(g),
        "vertices": g.n_vertices(),
        "edges": g.n_edges(),
        "loops": g.loop_number(),
        "momenta": g.n_momenta(),
        "masses": g.n_masses(),
    })
}

fn report(command: &str, body: Value) -> Value {
    let mut doc = json!({"schema": SCHEMA, "command": command});
    if let (Value::Object(d), Value::Object(b)) = (&mut doc, body) {
        d.extend(b);
    }
    doc
}

/// Error document for a failed command.
pub fn error_report(command: &str, e: &Error) -> Value {
    let mut err = json!({"kind": e.kind(), "message": e.to_string(), "exit_code": e.exit_code()});
    match e {
        Error::Parse { line, column, .. } => {
            err["line"] = json!(line);
            err["column"] = json!(column);
        }
        Error::DivergentIntegrand { witness } => err["witness"] = json!(witness),
        Error::BudgetExceeded { value, error } => {
            err["value"] = json!(value);
            err["error"] = json!(error);
        }
        Error::NotMotic(s) | Error::NotMassMomentumSpanning(s) => err["subgraph"] = json!(s),
        _ => {}
    }
    json!({"schema": SCHEMA, "command": command, "error": err})
}

fn cmd_poly(g: &FeynmanGraph, reconstruct: bool) -> Result<Value> {
    let (p, f, x) = (psi(g), phi(g), xi(g));
    let mut body = json!({
        "graph": graph_summary(g),
        "psi": p.to_canonical_string(),
        "phi": f.to_canonical_string(),
        "xi": x.to_canonical_string(),
    });
    if reconstruct {
        let r = reconstruct_polynomials(g)?;
        body["reconstruction"] = json!({"p_equals_psi": r.p == p, "c_equals_xi": r.c == x});
    }
    Ok(body)
}

fn cmd_motic(g: &FeynmanGraph) -> Value {
    let subgraphs: Vec<Value> = g
        .motic_subgraphs(true)
        .into_iter()
        .map(|s| {
            json!({
                "edges": s.to_vec(),
                "loops": g.loop_number_of(s),
                "momentum_spanning": g.is_momentum_spanning(s),
                "mass_momentum_spanning": g.is_mm(s),
            })
        })
        .collect();
    json!({
        "graph": graph_summary(g),
        "graph_is_motic": g.is_motic(g.all_edges()),
        "motic_subgraphs": subgraphs,
    })
}

fn cmd_coproduct(g: &FeynmanGraph, power: Option<usize>, with_antipode: bool) -> Value {
    let mut body = json!({
        "graph": graph_summary(g),
        "coradical_degree": coradical_degree(g),
    });
    match power {
        Some(n) => body["reduced_power"] = json!({"n": n, "terms": reduced_coproduct_power(g, n).to_json()}),
        None => body["coproduct"] = coproduct(g).to_json(),
    }
    if with_antipode {
        body["antipode"] = antipode(g).to_json();
    }
    body
}

fn cmd_factor_check(g: &FeynmanGraph, gamma: Option<&str>, kind: Option<&str>) -> Result<Value> {
    let kinds: Vec<FactorKind> = match kind {
        Some(k) => vec![k.parse()?],
        None => FactorKind::ALL.to_vec(),
    };
    let gammas: Vec<EdgeSet> = match gamma {
        Some(t) => vec![parse_edge_set(g, t)?],
        None => g.all_edges().subsets().collect(),
    };
    let detailed = gamma.is_some();
    let mut cache = PolyCache::new();
    let mut checks = Vec::new();
    let mut all_hold = true;
    for &s in &gammas {
        for &k in &kinds {
            let applicable = match k {
                FactorKind::PhiIR => g.is_momentum_spanning(s),
                FactorKind::XiIR => g.is_mm(s),
                _ => true,
            };
            // An explicitly requested IR identity on a non-spanning subgraph
            // is a precondition violation; otherwise it is skipped.
            if !applicable && (kind.is_none() || !detailed) {
                continue;
            }
            let f = factorization_remainder_cached(g, s, k, &mut cache)?;
            all_hold &= f.holds();
            let mut c = json!({
                "gamma": s.to_vec(),
                "kind": k.name(),
                "remainder_min_degree": f.remainder_min_degree,
                "bound": f.bound,
                "holds": f.holds(),
            });
            if detailed {
                c["product"] = json!(f.product.to_canonical_string());
                c["remainder"] = json!(f.remainder.to_canonical_string());
            }
            checks.push(c);
        }
    }
    Ok(json!({"graph": graph_summary(g), "all_hold": all_hold, "checks": checks}))
}

fn cmd_atlas(g: &FeynmanGraph) -> Result<Value> {
    let b = UnionClosedFamily::of_graph(g)?;
    let summary = |r: crate::blowup::CheckReport| json!({"checked": r.checked, "failures": r.failures});
    Ok(json!({
        "graph": graph_summary(g),
        "atlas": atlas_json(&b),
        "checks": {
            "transitions": summary(transitions_check(&b)),
            "incidence": summary(incidence_check(&b)),
            "exponents_and_products": summary(graph_atlas_check(g)?),
        },
    }))
}

fn cmd_converge(g: &FeynmanGraph, d: u32) -> Result<Value> {
    let r = power_count(g, d)?;
    Ok(json!({"graph": graph_summary(g), "power_counting": r.to_json(), "convergent": r.convergent,
              "witness": r.witness.map(|w| w.to_vec())}))
}

#[allow(clippy::too_many_arguments)]
fn cmd_integrate(
    g: &FeynmanGraph,
    d: u32,
    point: &str,
    numerator: Option<&str>,
    a: Option<i64>,
    b: Option<i64>,
    budget: Budget,
) -> Result<Value> {
    let point: KinPoint = parse_point(point, g.n_momenta())?;
    let it = match (numerator, a, b) {
        (None, None, None) => Integrand::feynman(g, d)?,
        (Some(n), Some(a), Some(b)) => Integrand { numerator: parse_poly(n, g.n_momenta())?, a, b },
        _ => {
            return Err(Error::InvalidInput(
                "--numerator, --psi-power and --xi-power must be given together".into(),
            ))
        }
    };
    let r = integrate(g, &it, &point, &budget)?;
    Ok(json!({
        "graph": graph_summary(g),
        "dimension": d,
        "integrand": {"numerator": it.numerator.to_canonical_string(), "psi_power": it.a, "xi_power": it.b},
        "budget": {"max_evals": budget.max_evals, "rel_tol": budget.rel_tol, "abs_tol": budget.abs_tol, "seed": budget.seed},
        "result": r.to_json(),
    }))
}

fn cmd_strata(g: &FeynmanGraph, max_degree: i64) -> Value {
    let maps: Vec<Value> = face_map_targets(g)
        .into_iter()
        .map(|m| json!({"kind": m.kind, "along": m.along.to_vec(), "source": m.source, "target": m.target}))
        .collect();
    let desc: Vec<Value> = descendants_by_degree(g, max_degree)
        .into_iter()
        .map(|d| json!({"word": d.word, "degree": d.degree}))
        .collect();
    json!({"graph": graph_summary(g), "strata": strata_json(g), "face_maps": maps, "descendants": desc})
}

fn cmd_selfcheck() -> Result<(bool, Value)> {
    let mut ok = true;
    let mut graphs = Vec::new();
    for n in named_graphs() {
        let mut suites = serde_json::Map::new();
        for (name, r) in all_suites(&n.graph)? {
            ok &= r.ok();
            suites.insert(name.into(), json!({"checked": r.checked, "failures": r.failures}));
        }
        graphs.push(json!({"name": n.name, "key": canonical_key(&n.graph), "suites": suites}));
    }
    Ok((ok, json!({"ok": ok, "graphs": graphs})))
}

fn execute(cmd: &Command) -> Result<(i32, Value)> {
    let g = |i: &GraphArg| load_graph(&i.graph);
    let body = match cmd {
        Command::Poly { input, reconstruct } => cmd_poly(&g(input)?, *reconstruct)?,
        Command::Motic { input } => cmd_motic(&g(input)?),
        Command::Coproduct { input, reduced_power, antipode } => cmd_coproduct(&g(input)?, *reduced_power, *antipode),
        Command::FactorCheck { input, gamma, kind } => cmd_factor_check(&g(input)?, gamma.as_deref(), kind.as_deref())?,
        Command::Atlas { input } => cmd_atlas(&g(input)?)?,
        Command::Converge { input, dimension } => cmd_converge(&g(input)?, *dimension)?,
        Command::Integrate { input, dimension, point, numerator, psi_power, xi_power, max_evals, rel_tol, abs_tol, seed } => {
            let budget = Budget { max_evals: *max_evals, rel_tol: *rel_tol, abs_tol: *abs_tol, seed: *seed };
            cmd_integrate(&g(input)?, *dimension, point, numerator.as_deref(), *psi_power, *xi_power, budget)?
        }
        Command::Strata { input, max_degree } => cmd_strata(&g(input)?, *max_degree),
        Command::Selfcheck => {
            let (ok, body) = cmd_selfcheck()?;
            return Ok((if ok { 0 } else { 1 }, body));
        }
    };
    Ok((0, body))
}

fn render(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialise");
    s.push('\n');
    s
}

/// Runs the command line `args` (including the program name).
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                return Outcome { code: 0, output: e.to_string() };
            }
            let doc = json!({"schema": SCHEMA, "command": null,
                             "error": {"kind": "UsageError", "message": e.to_string(), "exit_code": 2}});
            return Outcome { code: 2, output: render(&doc) };
        }
    };
    let name = cli.command.name();
    match execute(&cli.command) {
        Ok((code, body)) => Outcome { code, output: render(&report(name, body)) },
        Err(e) => Outcome { code: e.exit_code(), output: render(&error_report(name, &e)) },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_ok(args: &[&str]) -> Value {
        let mut full = vec!["feynmotic"];
        full.extend_from_slice(args);
        let o = run(full);
        assert_eq!(o.code, 0, "{}", o.output);
        serde_json::from_str(&o.output).unwrap()
    }

    #[test]
    fn poly_and_converge_on_builtins() {
        let v = run_ok(&["poly", "builtin:banana3"]);
        assert_eq!(v["schema"], SCHEMA);
        assert_eq!(v["psi"], "a1*a2 + a1*a3 + a2*a3");
        let v = run_ok(&["converge", "builtin:dunce", "-d", "4"]);
        assert_eq!(v["convergent"], false);
        assert_eq!(v["witness"], json!([3, 4]));
    }

    #[test]
    fn error_codes() {
        let o = run(["feynmotic", "poly", "builtin:nope"]);
        assert_eq!(o.code, 1);
        let o = run(["feynmotic", "frobnicate"]);
        assert_eq!(o.code, 2);
        let o = run(["feynmotic", "factor-check", "builtin:dunce", "--gamma", "2", "--kind", "XiIR"]);
        assert_eq!(o.code, 3);
        let v: Value = serde_json::from_str(&o.output).unwrap();
        assert_eq!(v["error"]["kind"], "NotMassMomentumSpanning");
        let o = run(["feynmotic", "integrate", "builtin:dunce", "-d", "4", "--point", "s1_1=1,msq1=1"]);
        assert_eq!(o.code, 3);
    }
}
