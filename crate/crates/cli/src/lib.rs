//! The `bredon` command line: builds spaces and pages, runs the solver, and
//! renders charts as text, SVG or JSON.

pub mod render;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use bredon_core::charts::ModulePresentation;
use bredon_core::checks::run_suite;
use bredon_core::ground::{Bidegree, GroundElement};
use bredon_core::mackey::{MackeyShape, NamedFunctor};
use bredon_core::serre::{
    e2_identity, e2_serre, identity_family_page, pathloop, pathloop_pinned, point_abutment, projective_bundle, SerreError,
};
use bredon_core::spaces::{
    loops_presentation, point_presentation, projective_presentation, sphere_presentation, SpacesError,
};
use bredon_core::spectra::{
    action_pins, e_infinity, force_differentials, injection_check, les_two_row, Abutment, ForceReport, Page,
    PageDocument, PageFamily, Pins, SolvedPage, SolverOutcome,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_UNSUPPORTED: i32 = 2;
pub const EXIT_USAGE: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "bredon", version, about = "Z/2-equivariant cohomology charts and Serre spectral sequences over F2")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Ascii,
    Svg,
    Json,
}

#[derive(clap::Args, Debug)]
struct Output {
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Ascii)]
    format: Format,
    /// Write to this file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Cone chart of the cohomology of a point
    Point {
        /// Square window `lo:hi` in both p and w
        #[arg(long, default_value = "-5:5", allow_hyphen_values = true)]
        window: String,
        #[command(flatten)]
        output: Output,
    },
    /// Cohomology of the free orbit, F2[t, 1/t]
    Orbit {
        #[arg(long, default_value = "-5:5", allow_hyphen_values = true)]
        window: String,
        #[command(flatten)]
        output: Output,
    },
    /// Coefficient Mackey functor of a space, or a check of a given functor
    Mackey {
        /// Space designator: point, sphere:p,q, projective:p,q, loops:p,q or @file.json
        #[arg(long, conflicts_with = "functor")]
        space: Option<String>,
        /// Topological degree q of the coefficient functor
        #[arg(short = 'q', long, default_value_t = 0, allow_hyphen_values = true)]
        degree: i64,
        /// Weight
        #[arg(short = 'r', long, default_value_t = 0, allow_hyphen_values = true)]
        weight: i64,
        /// A functor: constant, bracket, dual-constant, free-only, zero, or @file.json
        #[arg(long)]
        functor: Option<String>,
        /// Generator cutoff for loop spaces
        #[arg(long, default_value_t = 24)]
        cutoff: i64,
        #[command(flatten)]
        output: Output,
    },
    /// Free-module presentation of a space
    Space {
        designator: String,
        #[arg(long, default_value_t = 24)]
        cutoff: i64,
        /// Also tabulate fixed-level dimensions for weights 0..=N
        #[arg(long, default_value_t = 4)]
        weights: i64,
        #[command(flatten)]
        output: Output,
    },
    /// Spectral sequence of the identity fibration of a space
    Identity {
        #[arg(long)]
        space: String,
        #[arg(short = 'r', long, allow_hyphen_values = true)]
        weight: i64,
        #[arg(long, default_value_t = 6)]
        window: i64,
        /// Check exactness of the two-row long exact sequence
        #[arg(long)]
        les: bool,
        /// Force differentials against the cohomology of the space
        #[arg(long)]
        solve: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Serre spectral sequence for a constant coefficient system
    Serre {
        #[arg(long, required_unless_present = "page")]
        base: Option<String>,
        #[arg(long, required_unless_present = "page")]
        fiber: Option<String>,
        #[arg(short = 'r', long, allow_hyphen_values = true, required_unless_present = "page")]
        weight: Option<i64>,
        #[arg(long, default_value_t = 6)]
        window: i64,
        /// Force differentials against the abutment
        #[arg(long)]
        solve: bool,
        /// Total space whose cohomology is the abutment (default: the point)
        #[arg(long)]
        abutment: Option<String>,
        /// tau-action pins, e.g. `tau2:from-r2`
        #[arg(long)]
        pins: Option<String>,
        /// Render a saved page document instead of building one
        #[arg(long, conflicts_with_all = ["base", "fiber"])]
        page: Option<String>,
        #[command(flatten)]
        output: Output,
    },
    /// Spectral sequence of a bundle with fiber P(R^{n,m})
    ProjectiveBundle {
        #[arg(long)]
        base: String,
        /// Fiber `n,m`
        #[arg(long)]
        fiber: String,
        #[arg(short = 'r', long, allow_hyphen_values = true)]
        weight: i64,
        #[arg(long, default_value_t = 6)]
        window: i64,
        /// Compare with the identity spectral sequence of the base
        #[arg(long)]
        check_injection: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Path-loop fibration of the sphere S^{p,q}
    Pathloop {
        p: i64,
        q: i64,
        #[arg(short = 'r', long, allow_hyphen_values = true)]
        weight: i64,
        #[arg(long, default_value_t = 6)]
        window: i64,
        #[arg(long)]
        solve: bool,
        /// tau-action pins, e.g. `tau2:from-r2`
        #[arg(long)]
        pins: Option<String>,
        #[command(flatten)]
        output: Output,
    },
    /// Run the reproduction suite
    Verify {
        /// Run every check (the default)
        #[arg(long, alias = "paper")]
        all: bool,
        /// Run only checks whose name contains this text
        #[arg(long)]
        only: Option<String>,
        #[arg(long, value_enum, default_value_t = Format::Ascii)]
        format: Format,
    },
}

/// Exit code and captured streams of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<SerreError> for Failure {
    fn from(e: SerreError) -> Self {
        let code = match &e {
            e if e.is_unsupported() => EXIT_UNSUPPORTED,
            SerreError::Spaces(_) => EXIT_USAGE,
            _ => EXIT_MISMATCH,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<SpacesError> for Failure {
    fn from(e: SpacesError) -> Self {
        Failure::usage(e.to_string())
    }
}

/// Text to print plus the exit status it carries.
struct Rendered {
    text: String,
    code: i32,
}

impl Rendered {
    fn ok(text: String) -> Self {
        Rendered { text, code: EXIT_OK }
    }
}

type Result<T> = std::result::Result<T, Failure>;

pub fn run<I, T>(argv: I) -> RunOutput
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            return if e.use_stderr() {
                RunOutput { code, stdout: String::new(), stderr: text }
            } else {
                RunOutput { code, stdout: text, stderr: String::new() }
            };
        }
    };
    let out_path = match &cli.command {
        Command::Point { output, .. }
        | Command::Orbit { output, .. }
        | Command::Mackey { output, .. }
        | Command::Space { output, .. }
        | Command::Identity { output, .. }
        | Command::Serre { output, .. }
        | Command::ProjectiveBundle { output, .. }
        | Command::Pathloop { output, .. } => output.out.clone(),
        Command::Verify { .. } => None,
    };
    match dispatch(cli.command) {
        Ok(r) => match out_path {
            Some(path) => match std::fs::write(&path, &r.text) {
                Ok(()) => RunOutput {
                    code: r.code,
                    stdout: String::new(),
                    stderr: String::new(),
                },
                Err(e) => RunOutput {
                    code: EXIT_USAGE,
                    stdout: String::new(),
                    stderr: format!("cannot write {}: {e}\n", path.display()),
                },
            },
            None => RunOutput {
                code: r.code,
                stdout: r.text,
                stderr: String::new(),
            },
        },
        Err(f) => RunOutput {
            code: f.code,
            stdout: String::new(),
            stderr: format!("error: {}\n", f.message),
        },
    }
}

fn dispatch(command: Command) -> Result<Rendered> {
    match command {
        Command::Point { window, output } => {
            let (lo, hi) = parse_window(&window)?;
            Ok(Rendered::ok(match output.format {
                Format::Ascii => render::render_ground_ascii(lo, hi),
                Format::Svg => render::render_ground_svg(lo, hi),
                Format::Json => pretty(&ground_json(lo, hi)),
            }))
        }
        Command::Orbit { window, output } => {
            let (lo, hi) = parse_window(&window)?;
            Ok(Rendered::ok(match output.format {
                Format::Json => {
                    let classes: Vec<Value> = (lo..=hi)
                        .filter(|_| (lo..=hi).contains(&0))
                        .map(|w| json!({"p": 0, "w": w, "class": format!("t^{w}")}))
                        .collect();
                    pretty(&json!({"window": [lo, hi], "classes": classes}))
                }
                Format::Ascii => render::render_orbit_ascii(lo, hi),
                Format::Svg => return Err(Failure::usage("orbit charts are available as ascii or json")),
            }))
        }
        Command::Mackey {
            space,
            degree,
            weight,
            functor,
            cutoff,
            output,
        } => mackey_command(space, degree, weight, functor, cutoff, output.format),
        Command::Space {
            designator,
            cutoff,
            weights,
            output,
        } => {
            let m = resolve_space(&designator, cutoff)?;
            Ok(Rendered::ok(match output.format {
                Format::Json => m.to_json() + "\n",
                Format::Ascii => space_text(&m, weights),
                Format::Svg => return Err(Failure::usage("space charts are available as ascii or json")),
            }))
        }
        Command::Identity {
            space,
            weight,
            window,
            les,
            solve,
            output,
        } => identity_command(&space, weight, window, les, solve, output.format),
        Command::Serre {
            base,
            fiber,
            weight,
            window,
            solve,
            abutment,
            pins,
            page,
            output,
        } => {
            if let Some(page) = page {
                return page_command(&page, output.format);
            }
            let (base, fiber, weight) = (base.unwrap(), fiber.unwrap(), weight.unwrap());
            serre_command(&base, &fiber, weight, window, solve, abutment, pins, output.format)
        }
        Command::ProjectiveBundle {
            base,
            fiber,
            weight,
            window,
            check_injection,
            output,
        } => bundle_command(&base, &fiber, weight, window, check_injection, output.format),
        Command::Pathloop {
            p,
            q,
            weight,
            window,
            solve,
            pins,
            output,
        } => pathloop_command(p, q, weight, window, solve, pins, output.format),
        Command::Verify { all: _, only, format } => verify_command(only, format),
    }
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("json value serializes") + "\n"
}

/// `lo:hi`, or a single `n` for `-n:n`.
fn parse_window(s: &str) -> Result<(i64, i64)> {
    let bad = || Failure::usage(format!("window must look like lo:hi, got {s:?}"));
    let (lo, hi) = match s.split_once(':') {
        Some((a, b)) => (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?),
        None => {
            let n: i64 = s.trim().parse().map_err(|_| bad())?;
            (-n.abs(), n.abs())
        }
    };
    if lo > hi {
        return Err(bad());
    }
    Ok((lo, hi))
}

fn parse_pair(s: &str) -> Result<(i64, i64)> {
    let bad = || Failure::usage(format!("expected p,q, got {s:?}"));
    let (a, b) = s.split_once(',').ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

fn read_file(arg: &str) -> Result<String> {
    let path = arg.strip_prefix('@').unwrap_or(arg);
    std::fs::read_to_string(path).map_err(|e| Failure::usage(format!("cannot read {path}: {e}")))
}

/// Resolve a space designator. Loop spaces keep generators up to `cutoff`.
pub fn resolve_space_designator(s: &str, cutoff: i64) -> std::result::Result<ModulePresentation, String> {
    resolve_space(s, cutoff).map_err(|f| f.message)
}

fn resolve_space(s: &str, cutoff: i64) -> Result<ModulePresentation> {
    if s.starts_with('@') {
        let text = read_file(s)?;
        return ModulePresentation::from_json(&text).map_err(|e| Failure::usage(e.to_string()));
    }
    if s == "point" {
        return Ok(point_presentation());
    }
    let (kind, args) = s
        .split_once(':')
        .ok_or_else(|| Failure::usage(format!("unknown space {s:?}")))?;
    let (p, q) = parse_pair(args)?;
    Ok(match kind {
        "sphere" => sphere_presentation(p, q)?,
        "projective" => projective_presentation(p, q)?,
        "loops" => loops_presentation(p, q, cutoff)?,
        _ => return Err(Failure::usage(format!("unknown space kind {kind:?}"))),
    })
}

/// `tau<k>:from-r<r0>`.
fn parse_pins(s: &str, weight: i64) -> Result<i64> {
    let bad = || Failure::usage(format!("pins must look like tau2:from-r2, got {s:?}"));
    let (factor, source) = s.split_once(':').ok_or_else(bad)?;
    let k: i64 = factor.strip_prefix("tau").ok_or_else(bad)?.parse().map_err(|_| bad())?;
    let from: i64 = source.strip_prefix("from-r").ok_or_else(bad)?.parse().map_err(|_| bad())?;
    if from + k != weight {
        return Err(Failure::usage(format!("tau^{k} carries weight {from} to {}, not {weight}", from + k)));
    }
    Ok(from)
}

fn ground_json(lo: i64, hi: i64) -> Value {
    let mut classes = Vec::new();
    for p in lo..=hi {
        for w in lo..=hi {
            let x = GroundElement::basis_at(Bidegree::new(p, w));
            if !x.is_zero() {
                classes.push(json!({"p": p, "w": w, "class": x.to_string()}));
            }
        }
    }
    json!({"window": [lo, hi], "classes": classes})
}

fn mackey_command(
    space: Option<String>,
    degree: i64,
    weight: i64,
    functor: Option<String>,
    cutoff: i64,
    format: Format,
) -> Result<Rendered> {
    let shape: MackeyShape = match (space, functor) {
        (Some(space), None) => {
            let m = resolve_space(&space, cutoff)?;
            let rank = m.mackey_eval(degree, weight);
            let named = rank.to_named();
            let shape = rank.assemble().ok();
            return Ok(match format {
                Format::Json => Rendered::ok(pretty(&json!({
                    "space": m.name,
                    "q": degree,
                    "r": weight,
                    "rank": rank,
                    "decomposition": named.as_ref().map(|d| d.to_multiset()).ok(),
                    "functor": shape,
                }))),
                Format::Ascii => {
                    let mut text = format!(
                        "H^{{{degree},{weight}}}({}): fixed {}, free {}, restriction rank {}, negative-cone classes {}\n",
                        m.name, rank.dim_fixed, rank.dim_free, rank.res_rank, rank.neg_cone_fixed
                    );
                    match named {
                        Ok(d) => writeln!(text, "decomposition: {d}").unwrap(),
                        Err(_) => writeln!(text, "decomposition: unrecognized").unwrap(),
                    }
                    Rendered::ok(text)
                }
                Format::Svg => return Err(Failure::usage("Mackey functors are available as ascii or json")),
            });
        }
        (None, Some(f)) if f.starts_with('@') => {
            serde_json::from_str(&read_file(&f)?).map_err(|e| Failure::usage(e.to_string()))?
        }
        (None, Some(f)) => {
            let named: NamedFunctor =
                serde_json::from_value(Value::String(f.clone())).map_err(|_| Failure::usage(format!("unknown functor {f:?}")))?;
            named.shape()
        }
        _ => return Err(Failure::usage("give either --space or --functor")),
    };
    let violated = shape.violated_axioms();
    let decomposition = shape.decompose().ok();
    let code = if violated.is_empty() { EXIT_OK } else { EXIT_MISMATCH };
    let text = match format {
        Format::Json => pretty(&json!({
            "functor": shape,
            "violated_axioms": violated.iter().map(|a| a.index()).collect::<Vec<_>>(),
            "decomposition": decomposition.map(|d| d.to_multiset()),
        })),
        Format::Ascii => {
            let mut t = format!("levels: fixed {}, free {}\n", shape.dim_fixed(), shape.dim_free());
            if violated.is_empty() {
                t.push_str("axioms: all four hold\n");
            } else {
                let list: Vec<String> = violated.iter().map(|a| format!("{} ({a:?})", a.index())).collect();
                writeln!(t, "axioms violated: {}", list.join(", ")).unwrap();
            }
            match decomposition {
                Some(d) => writeln!(t, "decomposition: {d}").unwrap(),
                None => t.push_str("decomposition: unrecognized\n"),
            }
            t
        }
        Format::Svg => return Err(Failure::usage("Mackey functors are available as ascii or json")),
    };
    Ok(Rendered { text, code })
}

fn space_text(m: &ModulePresentation, weights: i64) -> String {
    let mut t = format!("{}\n", m.name);
    let gens: Vec<String> = m.generators.iter().map(|g| format!("{} {}", g.label, g.degree)).collect();
    writeln!(t, "generators: {}", gens.join(", ")).unwrap();
    writeln!(t, "fixed-set Betti numbers: {:?}", m.fixed_betti).unwrap();
    writeln!(t, "1-connected: {}, fixed set connected: {}", m.one_connected, m.fixed_connected).unwrap();
    let top = m.max_p() + 2;
    for r in 0..=weights.max(0) {
        let dims: Vec<String> = (0..=top).map(|n| m.fixed_dim(Bidegree::new(n, r)).to_string()).collect();
        writeln!(t, "dim H^{{n,{r}}}, n = 0..{top}: {}", dims.join(" ")).unwrap();
    }
    t
}

fn render_page(page: &Page, format: Format) -> String {
    match format {
        Format::Ascii => render::render_ascii(page),
        Format::Svg => render::render_svg(page),
        Format::Json => PageDocument {
            page: page.clone(),
            diffs: vec![],
        }
        .to_json()
            + "\n",
    }
}

fn solutions_json(report: &ForceReport) -> Value {
    let sols: Vec<Value> = report
        .outcome
        .solutions()
        .iter()
        .map(|s| {
            let arrows: Vec<Value> = s
                .diffs
                .iter()
                .flat_map(|d| {
                    d.arrows.iter().map(move |(&(p, q), &rank)| {
                        json!({"page": d.page, "from": [p, q], "to": d.target((p, q)), "rank": rank})
                    })
                })
                .collect();
            Value::Array(arrows)
        })
        .collect();
    json!({
        "outcome": report.outcome.kind(),
        "solutions": sols,
        "checked": report.checked,
        "quarantined": report.quarantined,
    })
}

fn report_text(report: &ForceReport, pins: &Pins) -> String {
    let mut t = String::new();
    if !pins.is_empty() {
        let list: Vec<String> = pins.iter().map(|(&(n, (p, q)), r)| format!("d{n}({p},{q}) = {r}")).collect();
        writeln!(t, "pins: {}", list.join(", ")).unwrap();
    }
    writeln!(t, "checked degrees: {:?}", report.checked).unwrap();
    if !report.quarantined.is_empty() {
        writeln!(t, "quarantined degrees: {:?}", report.quarantined).unwrap();
    }
    match &report.outcome {
        SolverOutcome::Unique(s) => writeln!(t, "solver: unique\n  {s}").unwrap(),
        SolverOutcome::Ambiguous(v) => {
            writeln!(t, "solver: ambiguous, {} solutions", v.len()).unwrap();
            for (i, s) in v.iter().enumerate() {
                writeln!(t, "  [{}] {s}", i + 1).unwrap();
            }
        }
        SolverOutcome::Infeasible => writeln!(t, "solver: infeasible").unwrap(),
    }
    t
}

fn outcome_code(report: &ForceReport) -> i32 {
    match report.outcome {
        SolverOutcome::Infeasible => EXIT_MISMATCH,
        _ => EXIT_OK,
    }
}

/// Page output with an optional solver report.
fn solved_output(e2: &Page, report: Option<&ForceReport>, pins: &Pins, format: Format) -> Result<Rendered> {
    let Some(report) = report else {
        return Ok(Rendered::ok(render_page(e2, format)));
    };
    let code = outcome_code(report);
    let diffs = report.outcome.unique().map(|s| s.diffs.clone()).unwrap_or_default();
    let text = match format {
        Format::Json => {
            let doc = PageDocument {
                page: e2.clone(),
                diffs: diffs.clone(),
            };
            let page: Value = serde_json::from_str(&doc.to_json()).expect("page json");
            pretty(&json!({"page": page, "solver": solutions_json(report)}))
        }
        Format::Ascii => {
            let mut t = render::render_ascii(e2);
            t.push_str(&report_text(report, pins));
            if let Some(sol) = report.outcome.unique() {
                let einf = e_infinity(e2, &sol.diffs).map_err(|e| Failure::usage(e.to_string()))?;
                t.push_str(&render::render_ascii_titled(&einf, &format!("E_infinity page, weight r = {}", einf.weight())));
            }
            t
        }
        Format::Svg => match report.outcome.unique() {
            Some(sol) => {
                let einf = e_infinity(e2, &sol.diffs).map_err(|e| Failure::usage(e.to_string()))?;
                render::render_svg_titled(&einf, &format!("E_infinity page, weight r = {}", einf.weight()))
            }
            None => render::render_svg(e2),
        },
    };
    Ok(Rendered { text, code })
}

fn identity_command(space: &str, weight: i64, window: i64, les: bool, solve: bool, format: Format) -> Result<Rendered> {
    let x = resolve_space(space, 24)?;
    let e2 = e2_identity(&x, weight, window)?;
    if les {
        let report = les_two_row(&x, window);
        let code = if report.feasible() { EXIT_OK } else { EXIT_MISMATCH };
        let text = match format {
            Format::Json => pretty(&json!({
                "entries": report.entries.iter().map(|e| json!({"label": e.label, "dim": e.dim})).collect::<Vec<_>>(),
                "ranks": report.ranks,
                "feasible": report.feasible(),
                "first_failure": report.first_failure,
            })),
            _ => {
                let mut t = render::render_ascii(&e2);
                let dims: Vec<String> = report.entries.iter().map(|e| format!("{}={}", e.label, e.dim)).collect();
                writeln!(t, "long exact sequence: {}", dims.join(" -> ")).unwrap();
                match report.first_failure {
                    None => t.push_str("exactness: feasible\n"),
                    Some(i) => writeln!(t, "exactness: infeasible at {}", report.entries[i].label).unwrap(),
                }
                t
            }
        };
        return Ok(Rendered { text, code });
    }
    if solve {
        let family = identity_family_page(&x, weight, window)?;
        let target = Abutment::of_presentation(&x, weight, window);
        let report = force_differentials(&family.e2, &target, &identity_pins(&x, weight, window)?);
        return solved_output(&e2, Some(&report), &Pins::new(), format);
    }
    solved_output(&e2, None, &Pins::new(), format)
}

/// Pins carried from the solved identity page one weight down.
fn identity_pins(x: &ModulePresentation, weight: i64, window: i64) -> Result<Pins> {
    if weight < 1 {
        return Ok(Pins::new());
    }
    let lower = identity_family_page(x, weight - 1, window)?;
    let solved = SolvedPage {
        e2: lower.e2,
        solution: bredon_core::spectra::Solution { diffs: lower.diffs },
        window,
    };
    let target = e2_identity(x, weight, window)?;
    action_pins(&solved, GroundElement::TAU, &target).map_err(|e| Failure::usage(e.to_string()))
}

fn fiber_cutoff(fiber: &str, window: i64) -> i64 {
    // Loop spaces need generators up to the window.
    let p = fiber
        .strip_prefix("loops:")
        .and_then(|a| a.split(',').next())
        .and_then(|p| p.trim().parse::<i64>().ok())
        .unwrap_or(2);
    window.max(1) * (p - 1).max(1)
}

#[allow(clippy::too_many_arguments)]
fn serre_command(
    base: &str,
    fiber: &str,
    weight: i64,
    window: i64,
    solve: bool,
    abutment: Option<String>,
    pins: Option<String>,
    format: Format,
) -> Result<Rendered> {
    let b = resolve_space(base, 24)?;
    let f = resolve_space(fiber, fiber_cutoff(fiber, window))?;
    let e2 = e2_serre(&b, &f, weight, window)?;
    if !solve {
        if pins.is_some() {
            return Err(Failure::usage("--pins needs --solve"));
        }
        return solved_output(&e2, None, &Pins::new(), format);
    }
    let target = match abutment.as_deref() {
        None | Some("point") => point_abutment(weight, window),
        Some(space) => Abutment::of_presentation(&resolve_space(space, 24)?, weight, window),
    };
    let pins = match pins {
        None => Pins::new(),
        Some(pin_arg) => {
            let from = parse_pins(&pin_arg, weight)?;
            let lower = e2_serre(&b, &f, from, window)?;
            let lower_target = match abutment.as_deref() {
                None | Some("point") => point_abutment(from, window),
                Some(space) => Abutment::of_presentation(&resolve_space(space, 24)?, from, window),
            };
            let lower_report = force_differentials(&lower, &lower_target, &Pins::new());
            let Some(sol) = lower_report.outcome.unique() else {
                return Err(Failure {
                    code: EXIT_MISMATCH,
                    message: format!("weight {from} is {}, nothing to pin from", lower_report.outcome.kind()),
                });
            };
            let solved = SolvedPage {
                e2: lower,
                solution: sol.clone(),
                window,
            };
            action_pins(&solved, GroundElement::tau_pow((weight - from) as u32), &e2)
                .map_err(|e| Failure::usage(e.to_string()))?
        }
    };
    let report = force_differentials(&e2, &target, &pins);
    solved_output(&e2, Some(&report), &pins, format)
}

fn pathloop_command(p: i64, q: i64, weight: i64, window: i64, solve: bool, pins: Option<String>, format: Format) -> Result<Rendered> {
    if !solve {
        if pins.is_some() {
            return Err(Failure::usage("--pins needs --solve"));
        }
        let e2 = bredon_core::serre::pathloop_page(p, q, weight, window)?;
        return solved_output(&e2, None, &Pins::new(), format);
    }
    let run = match pins {
        None => pathloop(p, q, weight, window, &Pins::new())?,
        Some(pin_arg) => pathloop_pinned(p, q, weight, window, parse_pins(&pin_arg, weight)?)?,
    };
    solved_output(&run.e2, Some(&run.report), &run.pins, format)
}

fn bundle_command(base: &str, fiber: &str, weight: i64, window: i64, check_injection: bool, format: Format) -> Result<Rendered> {
    let b = resolve_space(base, 24)?;
    let (n, m) = parse_pair(fiber)?;
    let bundle = projective_bundle(&b, n, m, weight, window)?;
    let page = bundle.family.get(weight).map_err(|e| Failure::usage(e.to_string()))?;
    let einf = page.e_infinity().map_err(|e| Failure::usage(e.to_string()))?;
    let injection = if check_injection {
        let mut sub = PageFamily::default();
        sub.insert(bundle.base_family.get(weight).map_err(|e| Failure::usage(e.to_string()))?.clone());
        Some(injection_check(&sub, &bundle.family).map_err(|e| Failure::usage(e.to_string()))?)
    } else {
        None
    };
    let code = match &injection {
        Some(i) if !i.passed() => EXIT_MISMATCH,
        _ => EXIT_OK,
    };
    let totals: Vec<u32> = (0..=window).map(|n| einf.total(n)).collect();
    let text = match format {
        Format::Json => {
            let doc = PageDocument {
                page: page.e2.clone(),
                diffs: page.diffs.clone(),
            };
            let doc: Value = serde_json::from_str(&doc.to_json()).expect("page json");
            pretty(&json!({
                "page": doc,
                "fiber": bundle.fiber.name,
                "e_infinity_totals": totals,
                "injection": injection.as_ref().map(|i| format!("{i:?}")),
            }))
        }
        Format::Ascii => {
            let mut t = render::render_ascii(&page.e2);
            let diffs: Vec<String> = page.diffs.iter().map(|d| d.to_string()).collect();
            writeln!(t, "fiber: {}", bundle.fiber.name).unwrap();
            writeln!(
                t,
                "differentials from the base: {}",
                if diffs.is_empty() { "none".to_string() } else { diffs.join("; ") }
            )
            .unwrap();
            writeln!(t, "E_infinity totals, n = 0..{window}: {totals:?}").unwrap();
            if let Some(i) = &injection {
                writeln!(t, "injection: {}", if i.passed() { "pass".to_string() } else { format!("{i:?}") }).unwrap();
            }
            t
        }
        Format::Svg => render::render_svg_titled(&einf, &format!("E_infinity page, weight r = {weight}")),
    };
    Ok(Rendered { text, code })
}

fn page_command(arg: &str, format: Format) -> Result<Rendered> {
    let text = read_file(arg)?;
    let value: Value = serde_json::from_str(&text).map_err(|e| Failure::usage(e.to_string()))?;
    let doc_value = match value.get("page") {
        Some(inner) if inner.is_object() => inner.clone(),
        _ => value,
    };
    let doc = PageDocument::from_json(&doc_value.to_string()).map_err(|e| Failure::usage(e.to_string()))?;
    let rendered = match format {
        Format::Json => doc.to_json() + "\n",
        Format::Ascii | Format::Svg => {
            let einf = e_infinity(&doc.page, &doc.diffs).map_err(|e| Failure::usage(e.to_string()))?;
            let mut t = if format == Format::Ascii {
                render::render_ascii(&doc.page)
            } else {
                render::render_svg(&doc.page)
            };
            if format == Format::Ascii && !doc.diffs.is_empty() {
                t.push_str(&render::render_ascii_titled(&einf, &format!("E_infinity page, weight r = {}", einf.weight())));
            }
            t
        }
    };
    Ok(Rendered::ok(rendered))
}

fn verify_command(only: Option<String>, format: Format) -> Result<Rendered> {
    let results: Vec<_> = run_suite()
        .into_iter()
        .filter(|r| only.as_ref().is_none_or(|o| r.name.contains(o.as_str())))
        .collect();
    if results.is_empty() {
        return Err(Failure::usage("no check matches"));
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    let text = match format {
        Format::Json => pretty(&json!({
            "checks": results.iter().map(|r| json!({"name": r.name, "passed": r.passed, "detail": r.detail})).collect::<Vec<_>>(),
            "failed": failed,
        })),
        _ => {
            let mut t = String::new();
            for r in &results {
                writeln!(t, "{} {}: {}", if r.passed { "PASS" } else { "FAIL" }, r.name, r.detail).unwrap();
            }
            writeln!(t, "{} of {} checks passed", results.len() - failed, results.len()).unwrap();
            t
        }
    };
    Ok(Rendered {
        text,
        code: if failed == 0 { EXIT_OK } else { EXIT_MISMATCH },
    })
}
