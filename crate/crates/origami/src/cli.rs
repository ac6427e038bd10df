//! The `origami` command line.
//!
//! Subcommands: `generate`, `plan`, `replay`, `verify`, `stats`. Option
//! precedence is flags over an optional `--config` key=value file over
//! built-in defaults, except that the `ORIGAMI_MAX_POINTS` environment
//! variable, when set, overrides the point budget from any source.
//!
//! Exit codes: 0 success; 1 verification found a counterexample; 2 invalid
//! configuration or malformed input; 3 point budget exceeded (partial TSV
//! still written, flagged with a `#` trailer line); 4 plan target is not an
//! algebraic integer; 5 replay integrity failure (hint mismatch, reported
//! with its step index on stderr).
//!
//! Element syntax everywhere: `a/b+c/d*sqrt(m)` with either part omissible,
//! e.g. `3+2*sqrt(-5)`, `1/2`, `-sqrt(-1)`.

use std::collections::HashMap;
use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;

use crate::approx::{normalize_angle, run_approx, ApproxConfig, ApproxError, ApproxRun};
use crate::closure::{run_closure, ClosureError, OrigamiConfig, PointSet, DEFAULT_MAX_POINTS};
use crate::intersect::intersect;
use crate::planner::{plan, replay, Trace, TraceError};
use crate::quadfield::{FieldTag, QuadElem};
use crate::render::{render_svg, RenderSpec};
use crate::targets::{case_formula, direction_set, is_integer, random_integer};

pub const EXIT_OK: i32 = 0;
pub const EXIT_COUNTEREXAMPLE: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;
pub const EXIT_NOT_INTEGER: i32 = 4;
pub const EXIT_HINT_MISMATCH: i32 = 5;

pub const MAX_POINTS_ENV: &str = "ORIGAMI_MAX_POINTS";

#[derive(Parser)]
#[command(name = "origami", version, about = "Exact origami constructions over imaginary quadratic fields")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the closure engine and write TSV and/or SVG point sets.
    Generate(GenerateArgs),
    /// Plan a constructive trace for a target algebraic integer.
    Plan(PlanArgs),
    /// Replay and audit a trace file.
    Replay(ReplayArgs),
    /// Check the per-direction-pair formulas and ring closure on random inputs.
    Verify(VerifyArgs),
    /// Print per-generation counts and modulus ranges.
    Stats(StatsArgs),
}

#[derive(Args, Default)]
struct GenerateArgs {
    /// Squarefree negative integer selecting Q(sqrt(m)).
    #[arg(long)]
    m: Option<i64>,
    /// exact | approx
    #[arg(long)]
    mode: Option<String>,
    /// Comma-separated fold angles in radians (approx mode).
    #[arg(long)]
    angles: Option<String>,
    #[arg(long)]
    generations: Option<u32>,
    #[arg(long)]
    max_points: Option<usize>,
    #[arg(long)]
    out_tsv: Option<PathBuf>,
    #[arg(long)]
    out_svg: Option<PathBuf>,
    /// Render window "xmin,xmax,ymin,ymax" (defaults to the padded bounding box).
    #[arg(long)]
    window: Option<String>,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct PlanArgs {
    #[arg(long)]
    m: Option<i64>,
    /// Target element, e.g. "3+2*sqrt(-5)".
    target: String,
    /// Trace output path (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct ReplayArgs {
    /// Trace file produced by `plan`.
    trace: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    m: Option<i64>,
    #[arg(long)]
    trials: Option<u64>,
    /// RNG seed for the random trials.
    #[arg(long)]
    seed_rng: Option<u64>,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct StatsArgs {
    #[arg(long)]
    m: Option<i64>,
    #[arg(long)]
    generations: Option<u32>,
    #[arg(long)]
    max_points: Option<usize>,
    #[arg(long)]
    config: Option<PathBuf>,
}

/// Entry point over explicit arguments; returns the process exit code.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // help/version are not errors
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_INVALID,
            };
            let _ = e.print();
            return code;
        }
    };
    match cli.cmd {
        Cmd::Generate(a) => cmd_generate(a),
        Cmd::Plan(a) => cmd_plan(a),
        Cmd::Replay(a) => cmd_replay(a),
        Cmd::Verify(a) => cmd_verify(a),
        Cmd::Stats(a) => cmd_stats(a),
    }
}

/// Entry point over `std::env::args_os`.
pub fn run() -> i32 {
    run_from(std::env::args_os())
}

// ---- config file -------------------------------------------------------

fn load_config(path: Option<&Path>) -> Result<HashMap<String, String>, String> {
    let mut map = HashMap::new();
    let Some(path) = path else {
        return Ok(map);
    };
    let text = fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| format!("{}:{}: expected key=value", path.display(), no + 1))?;
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(map)
}

fn conf_parse<T: std::str::FromStr>(map: &HashMap<String, String>, key: &str) -> Result<Option<T>, String> {
    match map.get(key) {
        None => Ok(None),
        Some(v) => v
            .parse::<T>()
            .map(Some)
            .map_err(|_| format!("config key {key}: invalid value {v:?}")),
    }
}

fn resolve_max_points(flag: Option<usize>, conf: Option<usize>) -> Result<usize, String> {
    // The environment variable, when present, wins over every other source.
    if let Ok(v) = std::env::var(MAX_POINTS_ENV) {
        return v
            .parse::<usize>()
            .map_err(|_| format!("{MAX_POINTS_ENV}: invalid value {v:?}"));
    }
    Ok(flag.or(conf).unwrap_or(DEFAULT_MAX_POINTS))
}

fn parse_window(s: &str) -> Result<(f64, f64, f64, f64), String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 4 {
        return Err(format!("window {s:?}: expected xmin,xmax,ymin,ymax"));
    }
    let mut vals = [0.0f64; 4];
    for (i, p) in parts.iter().enumerate() {
        vals[i] = p
            .trim()
            .parse()
            .map_err(|_| format!("window {s:?}: invalid number {p:?}"))?;
    }
    Ok((vals[0], vals[1], vals[2], vals[3]))
}

fn parse_angles(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map(normalize_angle)
                .map_err(|_| format!("angles: invalid number {p:?}"))
        })
        .collect()
}

fn invalid(msg: impl std::fmt::Display) -> i32 {
    eprintln!("error: {msg}");
    EXIT_INVALID
}

fn field_tag(m: Option<i64>) -> Result<FieldTag, i32> {
    let Some(m) = m else {
        return Err(invalid("--m is required"));
    };
    FieldTag::new(m).map_err(|e| invalid(e))
}

// ---- generate ----------------------------------------------------------

fn cmd_generate(a: GenerateArgs) -> i32 {
    let conf = match load_config(a.config.as_deref()) {
        Ok(c) => c,
        Err(e) => return invalid(e),
    };
    let merge = |flag: Option<String>, key: &str| flag.or_else(|| conf.get(key).cloned());

    let mode = merge(a.mode, "mode").unwrap_or_else(|| "exact".into());
    let m = match a.m.or(match conf_parse::<i64>(&conf, "m") {
        Ok(v) => v,
        Err(e) => return invalid(e),
    }) {
        Some(m) => Some(m),
        None => None,
    };
    let generations = a
        .generations
        .or(match conf_parse::<u32>(&conf, "generations") {
            Ok(v) => v,
            Err(e) => return invalid(e),
        })
        .unwrap_or(5);
    let max_points = match resolve_max_points(a.max_points, match conf_parse(&conf, "max_points") {
        Ok(v) => v,
        Err(e) => return invalid(e),
    }) {
        Ok(v) => v,
        Err(e) => return invalid(e),
    };
    let window = match merge(a.window, "window").map(|w| parse_window(&w)).transpose() {
        Ok(w) => w,
        Err(e) => return invalid(e),
    };
    let angles_str = merge(a.angles, "angles");

    match mode.as_str() {
        "exact" => {
            let tag = match field_tag(m) {
                Ok(t) => t,
                Err(code) => return code,
            };
            let mut cfg = OrigamiConfig::new(tag, direction_set(tag));
            cfg.max_generations = generations;
            cfg.max_points = max_points;
            let (ps, truncated) = match run_closure(&cfg) {
                Ok(ps) => (ps, false),
                Err(ClosureError::BudgetExceeded { partial }) => (partial, true),
                Err(e) => return invalid(e),
            };
            if let Some(path) = &a.out_tsv {
                if let Err(e) = write_exact_tsv(path, &ps, truncated) {
                    return invalid(e);
                }
            }
            if let Some(path) = &a.out_svg {
                let pts: Vec<(f64, f64, u32)> = ps
                    .iter()
                    .map(|(p, g)| {
                        let (x, y) = p.to_xy();
                        (x, y, g)
                    })
                    .collect();
                if let Err(e) = write_svg(path, &pts, window) {
                    return invalid(e);
                }
            }
            println!(
                "generated {} points over {} generations (m={})",
                ps.len(),
                ps.max_generation(),
                tag.m()
            );
            if truncated {
                eprintln!("point budget exceeded; outputs are truncated");
                return EXIT_BUDGET;
            }
            EXIT_OK
        }
        "approx" => {
            let angles = match angles_str {
                Some(s) => match parse_angles(&s) {
                    Ok(v) => v,
                    Err(e) => return invalid(e),
                },
                None => match field_tag(m) {
                    Ok(tag) => crate::approx::theorem_angles(tag),
                    Err(code) => return code,
                },
            };
            let mut cfg = ApproxConfig::new(angles);
            cfg.generations = generations;
            cfg.max_points = max_points;
            let (run, truncated) = match run_approx(&cfg) {
                Ok(r) => (r, false),
                Err(ApproxError::BudgetExceeded { partial }) => (partial, true),
                Err(e) => return invalid(e),
            };
            if let Some(path) = &a.out_tsv {
                if let Err(e) = write_approx_tsv(path, &run, truncated) {
                    return invalid(e);
                }
            }
            if let Some(path) = &a.out_svg {
                let pts: Vec<(f64, f64, u32)> =
                    run.iter().map(|(p, g)| (p.x, p.y, g)).collect();
                if let Err(e) = write_svg(path, &pts, window) {
                    return invalid(e);
                }
            }
            println!(
                "generated {} points over {} generations (approx)",
                run.len(),
                run.max_generation()
            );
            if truncated {
                eprintln!("point budget exceeded; outputs are truncated");
                return EXIT_BUDGET;
            }
            EXIT_OK
        }
        other => invalid(format!("unknown mode {other:?} (expected exact or approx)")),
    }
}

fn write_exact_tsv(path: &Path, ps: &PointSet, truncated: bool) -> Result<(), String> {
    let mut buf = Vec::new();
    ps.write_tsv(&mut buf).map_err(|e| e.to_string())?;
    if truncated {
        buf.extend_from_slice(b"# truncated: point budget exceeded\n");
    }
    fs::write(path, buf).map_err(|e| format!("cannot write {}: {e}", path.display()))
}

fn write_approx_tsv(path: &Path, run: &ApproxRun, truncated: bool) -> Result<(), String> {
    let mut buf = Vec::new();
    run.write_tsv(&mut buf).map_err(|e| e.to_string())?;
    if truncated {
        buf.extend_from_slice(b"# truncated: point budget exceeded\n");
    }
    fs::write(path, buf).map_err(|e| format!("cannot write {}: {e}", path.display()))
}

fn write_svg(
    path: &Path,
    pts: &[(f64, f64, u32)],
    window: Option<(f64, f64, f64, f64)>,
) -> Result<(), String> {
    let spec = RenderSpec {
        window,
        ..Default::default()
    };
    let svg = render_svg(pts, &spec).map_err(|e| e.to_string())?;
    fs::write(path, svg).map_err(|e| format!("cannot write {}: {e}", path.display()))
}

// ---- plan / replay -----------------------------------------------------

fn cmd_plan(a: PlanArgs) -> i32 {
    let conf = match load_config(a.config.as_deref()) {
        Ok(c) => c,
        Err(e) => return invalid(e),
    };
    let m = a.m.or(match conf_parse::<i64>(&conf, "m") {
        Ok(v) => v,
        Err(e) => return invalid(e),
    });
    let tag = match field_tag(m) {
        Ok(t) => t,
        Err(code) => return code,
    };
    let target = match QuadElem::parse(&a.target, tag) {
        Ok(t) => t,
        Err(e) => return invalid(e),
    };
    match plan(tag, &target) {
        Ok(trace) => {
            let text = trace.to_text();
            match &a.out {
                Some(path) => {
                    if let Err(e) = fs::write(path, &text) {
                        return invalid(format!("cannot write {}: {e}", path.display()));
                    }
                    println!("planned {} steps to {}", trace.steps.len(), trace.target);
                }
                None => print!("{text}"),
            }
            EXIT_OK
        }
        Err(TraceError::NotAnInteger(t)) => {
            eprintln!("error: {t} is not an algebraic integer of Q(sqrt({}))", tag.m());
            EXIT_NOT_INTEGER
        }
        Err(e) => invalid(e),
    }
}

fn cmd_replay(a: ReplayArgs) -> i32 {
    let text = match fs::read_to_string(&a.trace) {
        Ok(t) => t,
        Err(e) => return invalid(format!("cannot read {}: {e}", a.trace.display())),
    };
    let trace = match Trace::parse_text(&text) {
        Ok(t) => t,
        Err(e) => return invalid(e),
    };
    match replay(&trace) {
        Ok(final_point) => {
            if final_point == trace.target {
                println!("{final_point}");
                EXIT_OK
            } else {
                eprintln!(
                    "error: replay finished at {final_point}, but the trace claims {}",
                    trace.target
                );
                EXIT_HINT_MISMATCH
            }
        }
        Err(TraceError::HintMismatch { step, expected, actual }) => {
            eprintln!("error: hint mismatch at step {step}: expected {expected}, got {actual}");
            EXIT_HINT_MISMATCH
        }
        Err(e @ TraceError::Parallel(_)) => {
            eprintln!("error: {e}");
            EXIT_HINT_MISMATCH
        }
        Err(e) => invalid(e),
    }
}

// ---- verify ------------------------------------------------------------

fn cmd_verify(a: VerifyArgs) -> i32 {
    let conf = match load_config(a.config.as_deref()) {
        Ok(c) => c,
        Err(e) => return invalid(e),
    };
    let m = a.m.or(match conf_parse::<i64>(&conf, "m") {
        Ok(v) => v,
        Err(e) => return invalid(e),
    });
    let trials = a
        .trials
        .or(match conf_parse::<u64>(&conf, "trials") {
            Ok(v) => v,
            Err(e) => return invalid(e),
        })
        .unwrap_or(1000);
    if trials == 0 {
        return invalid("--trials must be at least 1");
    }
    let seed = a
        .seed_rng
        .or(match conf_parse::<u64>(&conf, "seed_rng") {
            Ok(v) => v,
            Err(e) => return invalid(e),
        })
        .unwrap_or(0);
    let tag = match field_tag(m) {
        Ok(t) => t,
        Err(code) => return code,
    };

    let dirs = direction_set(tag);
    let pairs: [(usize, usize); 6] = [(0, 1), (0, 2), (1, 0), (1, 2), (2, 0), (2, 1)];
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut all_ok = true;

    for (case_no, &(u, v)) in pairs.iter().enumerate() {
        let mut failure: Option<String> = None;
        for _ in 0..trials {
            let p = random_integer(&mut rng, tag, 100);
            let q = random_integer(&mut rng, tag, 100);
            let table = case_formula(tag, u, v, &p, &q).expect("u != v");
            let generic = intersect(&dirs[u], &dirs[v], &p, &q).expect("distinct directions");
            if table != generic {
                failure = Some(format!(
                    "u={} v={} p={p} q={q}: formula {table}, operator {generic}",
                    dirs[u], dirs[v]
                ));
                break;
            }
            if !is_integer(&generic) {
                failure = Some(format!(
                    "u={} v={} p={p} q={q}: {generic} left the ring of integers",
                    dirs[u], dirs[v]
                ));
                break;
            }
        }
        match failure {
            None => println!(
                "case {} I[{},{}]: formula PASS, ring closure PASS ({trials} trials)",
                case_no + 1,
                dirs[u],
                dirs[v]
            ),
            Some(msg) => {
                println!("case {} I[{},{}]: FAIL", case_no + 1, dirs[u], dirs[v]);
                eprintln!("counterexample: {msg}");
                all_ok = false;
                break;
            }
        }
    }
    if all_ok {
        EXIT_OK
    } else {
        EXIT_COUNTEREXAMPLE
    }
}

// ---- stats -------------------------------------------------------------

fn cmd_stats(a: StatsArgs) -> i32 {
    let conf = match load_config(a.config.as_deref()) {
        Ok(c) => c,
        Err(e) => return invalid(e),
    };
    let m = a.m.or(match conf_parse::<i64>(&conf, "m") {
        Ok(v) => v,
        Err(e) => return invalid(e),
    });
    let generations = a
        .generations
        .or(match conf_parse::<u32>(&conf, "generations") {
            Ok(v) => v,
            Err(e) => return invalid(e),
        })
        .unwrap_or(5);
    let max_points = match resolve_max_points(a.max_points, match conf_parse(&conf, "max_points") {
        Ok(v) => v,
        Err(e) => return invalid(e),
    }) {
        Ok(v) => v,
        Err(e) => return invalid(e),
    };
    let tag = match field_tag(m) {
        Ok(t) => t,
        Err(code) => return code,
    };
    let mut cfg = OrigamiConfig::new(tag, direction_set(tag));
    cfg.max_generations = generations;
    cfg.max_points = max_points;
    let (ps, truncated) = match run_closure(&cfg) {
        Ok(ps) => (ps, false),
        Err(ClosureError::BudgetExceeded { partial }) => (partial, true),
        Err(e) => return invalid(e),
    };
    // per generation: count and the exact |z|^2 range, showing that
    // construction distance and modulus are unrelated
    println!("generation\tcount\tmin_norm_sq\tmax_norm_sq");
    for (gen, count) in ps.distance_histogram() {
        let norms: Vec<_> = ps
            .iter()
            .filter(|(_, g)| *g == gen)
            .map(|(p, _)| p.norm_sq())
            .collect();
        let min = norms.iter().min().unwrap();
        let max = norms.iter().max().unwrap();
        println!("{gen}\t{count}\t{min}\t{max}");
    }
    if truncated {
        println!("# truncated: point budget exceeded");
        return EXIT_BUDGET;
    }
    EXIT_OK
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_parsing() {
        assert_eq!(parse_window("-1,2,-3,4").unwrap(), (-1.0, 2.0, -3.0, 4.0));
        assert!(parse_window("1,2,3").is_err());
        assert!(parse_window("a,b,c,d").is_err());
    }

    #[test]
    fn angle_list_parsing() {
        let v = parse_angles("0, 0.7853981633974483, 1.5707963267948966").unwrap();
        assert_eq!(v.len(), 3);
        assert!((v[1] - std::f64::consts::FRAC_PI_4).abs() < 1e-15);
    }

    #[test]
    fn config_file_parsing() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("origami.conf");
        fs::write(&path, "# comment\nm=-5\ngenerations = 3\n\nmode=exact\n").unwrap();
        let map = load_config(Some(&path)).unwrap();
        assert_eq!(map.get("m").map(String::as_str), Some("-5"));
        assert_eq!(map.get("generations").map(String::as_str), Some("3"));
        assert_eq!(conf_parse::<u32>(&map, "generations").unwrap(), Some(3));
        assert!(conf_parse::<u32>(&map, "mode").is_err());
        let missing = dir.path().join("nope.conf");
        assert!(load_config(Some(&missing)).is_err());
    }
}
