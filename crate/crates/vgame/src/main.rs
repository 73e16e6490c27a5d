//! `vgame` — command-line front end for the facility-placement engines.
//!
//! Every subcommand is a thin shell: parse files, call one library
//! operation, serialize the answer. No solver logic lives here, and nothing
//! here is randomized, so identical invocations produce byte-identical
//! output — JSON results embed a manifest (command, input digest, options)
//! that makes a run reproducible from the result file alone.
//!
//! Exit codes are part of the contract, for scripts:
//!   0  success (for `verify`: every check passed)
//!   1  `verify` ran but at least one check failed
//!   2  malformed or invalid input
//!   3  the exhaustive search would exceed its evaluation cap
//!   4  `plot` needs vertex coordinates the instance does not carry

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use voronoi_game::approx::approx_best_response;
use voronoi_game::balance::p1_safe_placement;
use voronoi_game::hardness::{
    brute_force_dominating_set, extract_dominating_set, reduce_dominating_set, DecisionInstance,
    SimpleGraph,
};
use voronoi_game::network::{EdgeId, NetworkPoint, VertexId, WeightedNetwork};
use voronoi_game::oracle::{best_response_exact, continuous_probe, OracleOptions};
use voronoi_game::scalar::Rational;
use voronoi_game::tree::solve_tree;
use voronoi_game::zones::{candidate_set, compute_zones, render_svg};
use voronoi_game::Error;

// ---------------------------------------------------------------------------
// Command line surface

#[derive(Parser)]
#[command(
    name = "vgame",
    version,
    about = "One-round competitive facility placement on weighted networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Mode {
    /// Tree solver on trees with a uniform metric, greedy coverage otherwise.
    Auto,
    /// Exact divide-and-conquer solver (trees only).
    Tree,
    /// Greedy weighted-coverage approximation.
    Approx,
    /// Exhaustive candidate-set search.
    Oracle,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the follower's best response to the instance's placement.
    Solve {
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::Auto)]
        mode: Mode,
        /// Follower budget; overrides the instance's `k`.
        #[arg(long)]
        k: Option<u32>,
        /// Evaluation cap for the exhaustive search.
        #[arg(long)]
        cap: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exhaustive search over the finite candidate pool, with statistics.
    Oracle {
        instance: PathBuf,
        #[arg(long)]
        k: Option<u32>,
        #[arg(long)]
        cap: Option<u64>,
        /// Also score a dense real-offset grid with this denominator and
        /// report it next to the pool optimum (the grid can never win).
        #[arg(long)]
        grid_denominator: Option<u32>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Dump the finite candidate pool for the instance's placement.
    Candidates {
        instance: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact service zones and payoffs for the placements in the instance.
    Zones {
        instance: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build a facility-placement decision instance from a graph edge list.
    ReduceDs {
        /// Text file: vertex count on the first line, then one `u v` edge
        /// per line (`#` comments and blank lines ignored).
        graph: PathBuf,
        /// Follower budget of the decision question.
        #[arg(long)]
        k: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// A leader placement with a guaranteed payoff floor (trees only).
    P1Place {
        instance: PathBuf,
        /// Number of leader facilities.
        #[arg(long)]
        m: usize,
        /// Follower budget the floor is stated against.
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run consistency checks against the instance (engines vs. each other).
    Verify {
        instance: PathBuf,
        #[arg(long)]
        cap: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render the service zones as an SVG (needs vertex coordinates).
    Plot {
        instance: PathBuf,
        /// JSON array of follower points; defaults to the instance's `p2`.
        placement: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

// ---------------------------------------------------------------------------
// Failures and exit codes

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn parse(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::TooLarge { .. } => 3,
            _ => 2,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::parse(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::parse(e.to_string())
    }
}

// ---------------------------------------------------------------------------
// Instance files

/// A game position on disk: the network, the leader's placement, and
/// optionally a follower placement and budget.
#[derive(Serialize, Deserialize)]
struct Instance {
    network: WeightedNetwork,
    #[serde(default)]
    p1: Vec<NetworkPoint>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    p2: Option<Vec<NetworkPoint>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    k: Option<u32>,
}

/// Reproducibility record embedded in every JSON result. There is no seed
/// field: nothing in the pipeline is randomized, so command + input digest +
/// options determine the output bytes completely.
#[derive(Serialize)]
struct RunManifest {
    command: &'static str,
    input_sha256: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    placement_sha256: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    mode: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    k: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    m: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    cap: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    grid_denominator: Option<u32>,
    output: String,
}

impl RunManifest {
    fn new(command: &'static str, input: &[u8], out: &Option<PathBuf>) -> Self {
        let mut hasher = Sha256::new();
        hasher.update(input);
        RunManifest {
            command,
            input_sha256: format!("{:x}", hasher.finalize()),
            placement_sha256: None,
            mode: None,
            k: None,
            m: None,
            cap: None,
            grid_denominator: None,
            output: out
                .as_ref()
                .map(|p| p.display().to_string())
                .unwrap_or_else(|| "-".into()),
        }
    }
}

fn read_input(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| Failure::parse(format!("{}: {e}", path.display())))
}

fn parse_instance(bytes: &[u8]) -> Result<Instance, Failure> {
    serde_json::from_slice(bytes).map_err(|e| Failure::parse(format!("bad instance: {e}")))
}

/// Serialize `payload`, splice in the manifest, and write the result with a
/// trailing newline. Keys come out sorted, so the bytes are canonical.
fn emit(payload: Value, manifest: RunManifest, out: Option<PathBuf>) -> Result<(), Failure> {
    let mut obj: Map<String, Value> = match payload {
        Value::Object(m) => m,
        other => {
            let mut m = Map::new();
            m.insert("result".into(), other);
            m
        }
    };
    obj.insert("manifest".into(), serde_json::to_value(&manifest)?);
    let text = serde_json::to_string_pretty(&Value::Object(obj))? + "\n";
    emit_text(&text, out)
}

fn emit_text(text: &str, out: Option<PathBuf>) -> Result<(), Failure> {
    match out {
        Some(path) => {
            fs::write(&path, text).map_err(|e| Failure::parse(format!("{}: {e}", path.display())))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn require_k(flag: Option<u32>, instance: &Instance) -> Result<u32, Failure> {
    flag.or(instance.k)
        .ok_or_else(|| Failure::parse("no follower budget: pass --k or put \"k\" in the instance"))
}

fn oracle_options(cap: Option<u64>) -> OracleOptions {
    let mut opts = OracleOptions::default();
    if let Some(cap) = cap {
        opts.cap = cap;
    }
    opts
}

/// The exact tree solver is stated for instances whose edge weights equal
/// their lengths; the CLI enforces that published precondition even though
/// the engine underneath is more general.
fn uniform_metric(net: &WeightedNetwork) -> bool {
    (0..net.edge_count()).all(|e| {
        let edge = net.edge(e as EdgeId);
        edge.length == edge.weight
    })
}

// ---------------------------------------------------------------------------
// Subcommands

fn cmd_solve(
    path: PathBuf,
    mode: Mode,
    k: Option<u32>,
    cap: Option<u64>,
    out: Option<PathBuf>,
) -> Result<(), Failure> {
    let bytes = read_input(&path)?;
    let instance = parse_instance(&bytes)?;
    let k = require_k(k, &instance)?;
    let net = &instance.network;

    let mode = match mode {
        Mode::Auto => {
            if net.is_tree() && uniform_metric(net) {
                Mode::Tree
            } else {
                Mode::Approx
            }
        }
        m => m,
    };
    let (solver, s, q2) = match mode {
        Mode::Tree => {
            if !uniform_metric(net) {
                return Err(Failure::parse(
                    "the tree solver requires every edge weight to equal its length; \
                     use --mode approx or --mode oracle for this instance",
                ));
            }
            let (s, q2) = solve_tree(net, &instance.p1, k)?;
            ("tree", s, q2)
        }
        Mode::Approx => {
            let (s, q2) = approx_best_response(net, &instance.p1, k)?;
            ("approx", s, q2)
        }
        Mode::Oracle => {
            let r = best_response_exact(net, &instance.p1, k, &oracle_options(cap))?;
            ("oracle", r.best_s, r.best_q2)
        }
        Mode::Auto => unreachable!("auto resolved above"),
    };
    let q1 = &net.total_weight() - &q2;

    let mut manifest = RunManifest::new("solve", &bytes, &out);
    manifest.mode = Some(solver);
    manifest.k = Some(k as u64);
    manifest.cap = cap;
    emit(
        json!({ "solver": solver, "k": k, "s": s, "q1": q1, "q2": q2 }),
        manifest,
        out,
    )
}

fn cmd_oracle(
    path: PathBuf,
    k: Option<u32>,
    cap: Option<u64>,
    grid_denominator: Option<u32>,
    out: Option<PathBuf>,
) -> Result<(), Failure> {
    let bytes = read_input(&path)?;
    let instance = parse_instance(&bytes)?;
    let k = require_k(k, &instance)?;
    let net = &instance.network;
    let opts = oracle_options(cap);

    let r = best_response_exact(net, &instance.p1, k, &opts)?;
    let q1 = &net.total_weight() - &r.best_q2;
    let mut payload = json!({
        "k": k,
        "s": r.best_s,
        "q1": q1,
        "q2": r.best_q2,
        "evaluated": r.evaluated,
    });
    if let Some(d) = grid_denominator {
        let probe = continuous_probe(net, &instance.p1, k, d, &opts)?;
        let obj = payload.as_object_mut().expect("payload is an object");
        obj.insert("probe".into(), serde_json::to_value(&probe)?);
        obj.insert("probe_denominator".into(), json!(d));
    }

    let mut manifest = RunManifest::new("oracle", &bytes, &out);
    manifest.k = Some(k as u64);
    manifest.cap = cap;
    manifest.grid_denominator = grid_denominator;
    emit(payload, manifest, out)
}

fn cmd_candidates(path: PathBuf, out: Option<PathBuf>) -> Result<(), Failure> {
    let bytes = read_input(&path)?;
    let instance = parse_instance(&bytes)?;
    let pool = candidate_set(&instance.network, &instance.p1)?;
    let manifest = RunManifest::new("candidates", &bytes, &out);
    emit(
        json!({ "count": pool.len(), "points": pool.points, "kinds": pool.kinds }),
        manifest,
        out,
    )
}

fn cmd_zones(path: PathBuf, out: Option<PathBuf>) -> Result<(), Failure> {
    let bytes = read_input(&path)?;
    let instance = parse_instance(&bytes)?;
    let s = instance.p2.clone().unwrap_or_default();
    let report = compute_zones(&instance.network, &instance.p1, &s)?;
    let manifest = RunManifest::new("zones", &bytes, &out);
    emit(serde_json::to_value(&report)?, manifest, out)
}

fn parse_edge_list(text: &str) -> Result<SimpleGraph, Failure> {
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let n: usize = lines
        .next()
        .ok_or_else(|| Failure::parse("empty graph file: expected a vertex count"))?
        .parse()
        .map_err(|e| Failure::parse(format!("bad vertex count: {e}")))?;
    let mut edges = Vec::new();
    for line in lines {
        let mut it = line.split_whitespace();
        let (Some(u), Some(v), None) = (it.next(), it.next(), it.next()) else {
            return Err(Failure::parse(format!("expected `u v`, got `{line}`")));
        };
        let u: VertexId = u
            .parse()
            .map_err(|e| Failure::parse(format!("bad vertex `{u}`: {e}")))?;
        let v: VertexId = v
            .parse()
            .map_err(|e| Failure::parse(format!("bad vertex `{v}`: {e}")))?;
        edges.push((u, v));
    }
    Ok(SimpleGraph::new(n, edges)?)
}

fn cmd_reduce_ds(path: PathBuf, k: u32, out: Option<PathBuf>) -> Result<(), Failure> {
    let bytes = read_input(&path)?;
    let text =
        String::from_utf8(bytes.clone()).map_err(|_| Failure::parse("graph file is not UTF-8"))?;
    let graph = parse_edge_list(&text)?;
    let reduced = reduce_dominating_set(&graph, k)?;
    let mut manifest = RunManifest::new("reduce-ds", &bytes, &out);
    manifest.k = Some(k as u64);
    // Emitted flat, so the result file *is* a decision instance (the extra
    // manifest key is ignored on load).
    emit(serde_json::to_value(&reduced)?, manifest, out)
}

fn cmd_p1_place(path: PathBuf, m: usize, k: usize, out: Option<PathBuf>) -> Result<(), Failure> {
    let bytes = read_input(&path)?;
    let instance = parse_instance(&bytes)?;
    let (f, bound) = p1_safe_placement(&instance.network, m, k)?;
    let mut manifest = RunManifest::new("p1-place", &bytes, &out);
    manifest.m = Some(m as u64);
    manifest.k = Some(k as u64);
    emit(
        json!({ "m": m, "k": k, "f": f, "bound": bound }),
        manifest,
        out,
    )
}

fn cmd_plot(
    path: PathBuf,
    placement: Option<PathBuf>,
    out: Option<PathBuf>,
) -> Result<(), Failure> {
    let bytes = read_input(&path)?;
    let instance = parse_instance(&bytes)?;
    let net = &instance.network;
    for v in 0..net.vertex_count() as VertexId {
        if net.position(v).is_none() {
            return Err(Failure {
                code: 4,
                message: format!("vertex {v} has no plot coordinates (x/y in the instance)"),
            });
        }
    }
    let s: Vec<NetworkPoint> = match &placement {
        Some(p) => {
            let pb = read_input(p)?;
            serde_json::from_slice(&pb)
                .map_err(|e| Failure::parse(format!("bad placement file: {e}")))?
        }
        None => instance.p2.clone().unwrap_or_default(),
    };
    let report = compute_zones(net, &instance.p1, &s)?;
    let svg = render_svg(net, &report)?;
    emit_text(&svg, out)
}

// ---------------------------------------------------------------------------
// verify

#[derive(Serialize)]
struct Check {
    name: &'static str,
    status: &'static str,
    detail: String,
}

impl Check {
    fn pass(name: &'static str, detail: impl Into<String>) -> Self {
        Check {
            name,
            status: "pass",
            detail: detail.into(),
        }
    }
    fn fail(name: &'static str, detail: impl Into<String>) -> Self {
        Check {
            name,
            status: "fail",
            detail: detail.into(),
        }
    }
    fn skipped(name: &'static str, detail: impl Into<String>) -> Self {
        Check {
            name,
            status: "skipped",
            detail: detail.into(),
        }
    }
}

/// Checks for an ordinary game instance: payoff conservation, the
/// ties-to-the-follower rule on vertices, solver-vs-oracle agreement on
/// trees, and the greedy approximation floor.
fn verify_instance(instance: &Instance, opts: &OracleOptions) -> Result<Vec<Check>, Failure> {
    let net = &instance.network;
    let s = instance.p2.clone().unwrap_or_default();
    let mut checks = Vec::new();

    let report = compute_zones(net, &instance.p1, &s)?;
    let total = net.total_weight();
    let sum = &report.q1 + &report.q2;
    checks.push(if sum == total {
        Check::pass("conservation", format!("q1 + q2 = {sum} = total weight"))
    } else {
        Check::fail(
            "conservation",
            format!("q1 + q2 = {sum}, total weight {total}"),
        )
    });

    if s.is_empty() {
        checks.push(Check::skipped(
            "tie-rule",
            "no follower placement in the instance",
        ));
    } else {
        let apsp = net.apsp();
        let mut bad = None;
        for v in 0..net.vertex_count() as VertexId {
            let pv = NetworkPoint::vertex(v);
            let d1 = instance
                .p1
                .iter()
                .map(|f| net.point_distance(&apsp, f, &pv))
                .min();
            let d2 = s.iter().map(|q| net.point_distance(&apsp, q, &pv)).min();
            let expect_p2 = match (&d1, &d2) {
                (Some(a), Some(b)) => b <= a,
                (None, Some(_)) => true,
                _ => false,
            };
            if report.vertex_owner[v as usize].is_p2() != expect_p2 {
                bad = Some(v);
                break;
            }
        }
        checks.push(match bad {
            None => Check::pass(
                "tie-rule",
                "every vertex goes to the nearer player, ties to the follower",
            ),
            Some(v) => Check::fail(
                "tie-rule",
                format!("vertex {v} is owned against the distance rule"),
            ),
        });
    }

    match instance.k {
        None => {
            checks.push(Check::skipped(
                "tree-vs-oracle",
                "no follower budget in the instance",
            ));
            checks.push(Check::skipped(
                "greedy-floor",
                "no follower budget in the instance",
            ));
        }
        Some(k) => {
            let oracle = match best_response_exact(net, &instance.p1, k, opts) {
                Ok(r) => Some(r),
                Err(Error::TooLarge { evaluated, cap }) => {
                    let why = format!("search needs {evaluated} evaluations, cap {cap}");
                    checks.push(Check::skipped("tree-vs-oracle", why.clone()));
                    checks.push(Check::skipped("greedy-floor", why));
                    None
                }
                Err(e) => return Err(e.into()),
            };
            if let Some(oracle) = oracle {
                if net.is_tree() {
                    let (_, q2) = solve_tree(net, &instance.p1, k)?;
                    checks.push(if q2 == oracle.best_q2 {
                        Check::pass("tree-vs-oracle", format!("both report q2 = {q2}"))
                    } else {
                        Check::fail(
                            "tree-vs-oracle",
                            format!("tree solver {q2}, oracle {}", oracle.best_q2),
                        )
                    });
                } else {
                    checks.push(Check::skipped("tree-vs-oracle", "the network has cycles"));
                }
                let (_, greedy) = approx_best_response(net, &instance.p1, k)?;
                // greedy >= (1 - 1/e) * optimum, checked as a rational
                // inequality against 63212/100000 < 1 - 1/e.
                let lhs = &greedy * &Rational::from(100_000i64);
                let rhs = &oracle.best_q2 * &Rational::from(63_212i64);
                checks.push(if lhs >= rhs {
                    Check::pass(
                        "greedy-floor",
                        format!("greedy {greedy} vs optimum {}", oracle.best_q2),
                    )
                } else {
                    Check::fail(
                        "greedy-floor",
                        format!("greedy {greedy} below floor of optimum {}", oracle.best_q2),
                    )
                });
            }
        }
    }
    Ok(checks)
}

/// Checks for a reduced decision instance: payoff conservation, agreement
/// between the game decision and a direct search on the source graph, and
/// validity of the extracted dominating set.
fn verify_decision(di: &DecisionInstance, opts: &OracleOptions) -> Result<Vec<Check>, Failure> {
    let mut checks = Vec::new();

    let oracle = match best_response_exact(&di.net, &di.facilities, di.k, opts) {
        Ok(r) => Some(r),
        Err(Error::TooLarge { evaluated, cap }) => {
            let why = format!("search needs {evaluated} evaluations, cap {cap}");
            checks.push(Check::skipped("conservation", why.clone()));
            checks.push(Check::skipped("ds-round-trip", why.clone()));
            checks.push(Check::skipped("ds-extraction", why));
            None
        }
        Err(e) => return Err(e.into()),
    };
    let Some(oracle) = oracle else {
        return Ok(checks);
    };

    let report = compute_zones(&di.net, &di.facilities, &oracle.best_s)?;
    let total = di.net.total_weight();
    let sum = &report.q1 + &report.q2;
    checks.push(if sum == total {
        Check::pass("conservation", format!("q1 + q2 = {sum} = total weight"))
    } else {
        Check::fail(
            "conservation",
            format!("q1 + q2 = {sum}, total weight {total}"),
        )
    });

    let game_says = oracle.best_q2 >= di.threshold;
    match brute_force_dominating_set(&di.source, di.k) {
        Err(Error::TooLarge { evaluated, cap }) => {
            checks.push(Check::skipped(
                "ds-round-trip",
                format!("source graph needs {evaluated} subsets, cap {cap}"),
            ));
        }
        Err(e) => return Err(e.into()),
        Ok(graph_says) => {
            checks.push(if game_says == graph_says {
                Check::pass(
                    "ds-round-trip",
                    format!(
                        "payoff {} vs threshold {}: both say {game_says}",
                        oracle.best_q2, di.threshold
                    ),
                )
            } else {
                Check::fail(
                    "ds-round-trip",
                    format!("game decision {game_says}, direct search {graph_says}"),
                )
            });
        }
    }

    if game_says {
        let set = extract_dominating_set(di, &oracle.best_s)?;
        checks.push(if di.source.dominates(&set) && set.len() <= di.k as usize {
            Check::pass(
                "ds-extraction",
                format!("extracted a dominating set of size {}", set.len()),
            )
        } else {
            Check::fail(
                "ds-extraction",
                format!("extracted set {set:?} does not dominate"),
            )
        });
    } else {
        checks.push(Check::skipped(
            "ds-extraction",
            "payoff below threshold; nothing to extract",
        ));
    }
    Ok(checks)
}

fn cmd_verify(path: PathBuf, cap: Option<u64>, out: Option<PathBuf>) -> Result<u8, Failure> {
    let bytes = read_input(&path)?;
    let value: Value =
        serde_json::from_slice(&bytes).map_err(|e| Failure::parse(format!("bad JSON: {e}")))?;
    let opts = oracle_options(cap);

    // A decision instance is recognizable by its payoff threshold.
    let checks = if value.get("threshold").is_some() {
        let di: DecisionInstance = serde_json::from_value(value)
            .map_err(|e| Failure::parse(format!("bad decision instance: {e}")))?;
        verify_decision(&di, &opts)?
    } else {
        let instance: Instance = serde_json::from_value(value)
            .map_err(|e| Failure::parse(format!("bad instance: {e}")))?;
        verify_instance(&instance, &opts)?
    };

    let ok = checks.iter().all(|c| c.status != "fail");
    let mut manifest = RunManifest::new("verify", &bytes, &out);
    manifest.cap = cap;
    emit(json!({ "ok": ok, "checks": checks }), manifest, out)?;
    Ok(if ok { 0 } else { 1 })
}

// ---------------------------------------------------------------------------

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Solve {
            instance,
            mode,
            k,
            cap,
            out,
        } => {
            cmd_solve(instance, mode, k, cap, out)?;
        }
        Command::Oracle {
            instance,
            k,
            cap,
            grid_denominator,
            out,
        } => {
            cmd_oracle(instance, k, cap, grid_denominator, out)?;
        }
        Command::Candidates { instance, out } => cmd_candidates(instance, out)?,
        Command::Zones { instance, out } => cmd_zones(instance, out)?,
        Command::ReduceDs { graph, k, out } => cmd_reduce_ds(graph, k, out)?,
        Command::P1Place {
            instance,
            m,
            k,
            out,
        } => cmd_p1_place(instance, m, k, out)?,
        Command::Verify { instance, cap, out } => return cmd_verify(instance, cap, out),
        Command::Plot {
            instance,
            placement,
            out,
        } => cmd_plot(instance, placement, out)?,
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
