//! Command-line front end: runs the extended Wigner's-friend scenarios,
//! verifies the no-go arguments, and evaluates standalone checks on
//! serialized inputs.
//!
//! Exit codes: 0 = expected verdict / feasible / within bound,
//! 2 = completed with a different verdict or a violated bound,
//! 1 = operational error (bad flags, unreadable input, schema violations).

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use friendliness_core::behavior::Behavior;
use friendliness_core::jsonfmt::fmt_f64;
use friendliness_core::lp::{lp_feasibility, FeasibilityResult, MarginalConstraintSet, FEAS_TOL};
use friendliness_core::polytope::{chsh_value, membership, OutcomeSignMap, ScenarioShape};
use friendliness_core::quantum::{BlochAngle, PureState};
use friendliness_core::scenario::{
    check_preparation_equivalence, run_extended_of_scenario, run_lf_scenario, run_of_scenario,
    ExtendedOFConfig, LFConfig, OFConfig,
};
use friendliness_core::verify::{
    verify_appendix_b, verify_lf_theorem, verify_of_theorem, ContradictionReport, SeparationReport,
    SeparationVerdict, Verdict,
};
use num_complex::Complex64;

#[derive(Parser)]
#[command(name = "friendliness", version)]
#[command(about = "Simulate and verify extended Wigner's-friend no-go arguments")]
struct Cli {
    #[command(subcommand)]
    command: Commands,
}

#[derive(Subcommand)]
enum Commands {
    /// Run a scenario and emit its behavior table
    Simulate {
        #[arg(long, value_enum)]
        scenario: Scenario,
        /// JSON config file; command-line overrides take precedence
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        overrides: Overrides,
        /// Write to this path (atomic) instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Verify a no-go argument and report the verdict
    Verify {
        #[arg(value_enum)]
        scenario: VerifyScenario,
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        overrides: Overrides,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Evaluate a standalone check on serialized inputs
    Check {
        #[arg(value_enum)]
        kind: CheckKind,
        /// Marginal constraint set JSON (for `fine`)
        #[arg(long)]
        marginals: Option<PathBuf>,
        /// Behavior JSON (for `chsh` and `membership`)
        #[arg(long)]
        behavior: Option<PathBuf>,
        /// Left ensemble JSON (for `prep-equivalence`)
        #[arg(long)]
        lhs: Option<PathBuf>,
        /// Right ensemble JSON (for `prep-equivalence`)
        #[arg(long)]
        rhs: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Scenario {
    Of,
    Lf,
    Ofx,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum VerifyScenario {
    Of,
    Lf,
    AppendixB,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum CheckKind {
    Fine,
    Chsh,
    Membership,
    PrepEquivalence,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Pretty,
}

/// Angle overrides; all angles are strings like "3pi/4", "-pi/4", or plain
/// radians like "0.7853981633974483".
#[derive(Args)]
struct Overrides {
    /// Preparation pair, comma separated: "pi/4,5pi/4" (of/ofx only)
    #[arg(long, value_name = "A0,A1")]
    prep_angles: Option<String>,
    /// Charlie's measurement basis
    #[arg(long, value_name = "ANGLE")]
    charlie_angle: Option<String>,
    /// Debbie's measurement basis
    #[arg(long, value_name = "ANGLE")]
    debbie_angle: Option<String>,
    /// Bob's measurement basis (lf: his post-undo basis)
    #[arg(long, value_name = "ANGLE")]
    bob_angle: Option<String>,
    /// Bloch rotation applied at x=2 (ofx only)
    #[arg(long, value_name = "ANGLE")]
    x2_rotation: Option<String>,
    /// Bob's y=2 measurement basis (ofx only)
    #[arg(long, value_name = "ANGLE")]
    y2_angle: Option<String>,
}

fn main() {
    std::process::exit(run());
}

fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            eprint!("{e}");
            return 1;
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            1
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32> {
    match cli.command {
        Commands::Simulate {
            scenario,
            config,
            overrides,
            out,
            format,
        } => cmd_simulate(
            scenario,
            config.as_deref(),
            &overrides,
            out.as_deref(),
            format,
        ),
        Commands::Verify {
            scenario,
            config,
            overrides,
            out,
            format,
        } => cmd_verify(
            scenario,
            config.as_deref(),
            &overrides,
            out.as_deref(),
            format,
        ),
        Commands::Check {
            kind,
            marginals,
            behavior,
            lhs,
            rhs,
            out,
            format,
        } => cmd_check(
            kind,
            marginals.as_deref(),
            behavior.as_deref(),
            lhs.as_deref(),
            rhs.as_deref(),
            out.as_deref(),
            format,
        ),
    }
}

fn cmd_simulate(
    scenario: Scenario,
    config: Option<&Path>,
    overrides: &Overrides,
    out: Option<&Path>,
    format: Format,
) -> Result<i32> {
    let behavior = match scenario {
        Scenario::Of => run_of_scenario(&load_of_config(config, overrides)?)?,
        Scenario::Lf => run_lf_scenario(&load_lf_config(config, overrides)?)?,
        Scenario::Ofx => run_extended_of_scenario(&load_ofx_config(config, overrides)?)?,
    };
    let text = match format {
        Format::Json => behavior.to_json(),
        Format::Csv => behavior.to_csv(),
        Format::Pretty => behavior.to_pretty(),
    };
    write_output(out, &text)?;
    Ok(0)
}

fn cmd_verify(
    scenario: VerifyScenario,
    config: Option<&Path>,
    overrides: &Overrides,
    out: Option<&Path>,
    format: Format,
) -> Result<i32> {
    if format == Format::Csv {
        bail!("csv output is only available for `simulate`");
    }
    let (text, expected_reached) = match scenario {
        VerifyScenario::Of => {
            let report = verify_of_theorem(&load_of_config(config, overrides)?)?;
            render_contradiction(&report, format, Verdict::ContradictionEstablished)
        }
        VerifyScenario::Lf => {
            let report = verify_lf_theorem(&load_lf_config(config, overrides)?)?;
            render_contradiction(&report, format, Verdict::ContradictionEstablished)
        }
        VerifyScenario::AppendixB => {
            let report = verify_appendix_b(&load_ofx_config(config, overrides)?)?;
            let text = match format {
                Format::Pretty => pretty_separation(&report),
                _ => report.to_json(),
            };
            (
                text,
                report.verdict == SeparationVerdict::SeparationEstablished,
            )
        }
    };
    write_output(out, &text)?;
    Ok(if expected_reached { 0 } else { 2 })
}

fn render_contradiction(
    report: &ContradictionReport,
    format: Format,
    expected: Verdict,
) -> (String, bool) {
    let text = match format {
        Format::Pretty => pretty_contradiction(report),
        _ => report.to_json(),
    };
    (text, report.verdict == expected)
}

fn cmd_check(
    kind: CheckKind,
    marginals: Option<&Path>,
    behavior: Option<&Path>,
    lhs: Option<&Path>,
    rhs: Option<&Path>,
    out: Option<&Path>,
    format: Format,
) -> Result<i32> {
    if format == Format::Csv {
        bail!("csv output is only available for `simulate`");
    }
    let (text, positive) = match kind {
        CheckKind::Fine => {
            let path = marginals.context("`check fine` requires --marginals <path>")?;
            let set = MarginalConstraintSet::from_json(&read_input(path)?)
                .with_context(|| format!("{}", path.display()))?;
            let result = lp_feasibility(&set)?;
            let text = match format {
                Format::Pretty => pretty_feasibility(&result),
                _ => result.to_json(),
            };
            (text, result.feasible)
        }
        CheckKind::Chsh => {
            let path = behavior.context("`check chsh` requires --behavior <path>")?;
            let b = Behavior::from_json(&read_input(path)?)
                .with_context(|| format!("{}", path.display()))?;
            let signs = OutcomeSignMap::identity(b.settings()[0].1, b.settings()[1].1);
            let value = chsh_value(&b, &signs)?;
            let within = value <= 2.0 + FEAS_TOL;
            let text = match format {
                Format::Pretty => format!(
                    "chsh: {}\nwithin local bound (2): {}\n",
                    fmt_f64(value),
                    yes_no(within)
                ),
                _ => format!("{{\"chsh\": {}}}\n", fmt_f64(value)),
            };
            (text, within)
        }
        CheckKind::Membership => {
            let path = behavior.context("`check membership` requires --behavior <path>")?;
            let b = Behavior::from_json(&read_input(path)?)
                .with_context(|| format!("{}", path.display()))?;
            let shape = ScenarioShape::new(
                b.settings()[0].1,
                b.settings()[1].1,
                b.outcomes()[0].1,
                b.outcomes()[1].1,
            )?;
            let result = membership(&b, &shape)?;
            let text = match format {
                Format::Pretty => pretty_feasibility(&result),
                _ => result.to_json(),
            };
            (text, result.feasible)
        }
        CheckKind::PrepEquivalence => {
            let lhs_path = lhs.context("`check prep-equivalence` requires --lhs <path>")?;
            let rhs_path = rhs.context("`check prep-equivalence` requires --rhs <path>")?;
            let lhs_ens = read_ensemble(lhs_path)?;
            let rhs_ens = read_ensemble(rhs_path)?;
            let (equivalent, dist) = check_preparation_equivalence(&lhs_ens, &rhs_ens)?;
            let text = match format {
                Format::Pretty => format!(
                    "trace distance: {}\nequivalent: {}\n",
                    fmt_f64(dist),
                    yes_no(equivalent)
                ),
                _ => format!(
                    "{{\"equivalent\": {}, \"trace_distance\": {}}}\n",
                    equivalent,
                    fmt_f64(dist)
                ),
            };
            (text, equivalent)
        }
    };
    write_output(out, &text)?;
    Ok(if positive { 0 } else { 2 })
}

// ---------------------------------------------------------------------------
// Config loading

/// Parses "3pi/4", "-pi/4", "pi", "0.5pi", or plain radians like "1.25".
fn parse_angle(text: &str) -> Result<f64> {
    let s = text.trim().to_ascii_lowercase();
    let (sign, rest) = match s.strip_prefix('-') {
        Some(r) => (-1.0, r),
        None => (1.0, s.strip_prefix('+').unwrap_or(s.as_str())),
    };
    let value = if let Some(idx) = rest.find("pi") {
        let coef_text = &rest[..idx];
        let tail = &rest[idx + 2..];
        let coef: f64 = if coef_text.is_empty() {
            1.0
        } else {
            coef_text
                .parse()
                .with_context(|| format!("bad coefficient in angle `{text}`"))?
        };
        let denom: f64 = match tail.strip_prefix('/') {
            Some(d) => d
                .parse()
                .with_context(|| format!("bad denominator in angle `{text}`"))?,
            None if tail.is_empty() => 1.0,
            None => bail!("unexpected `{tail}` after pi in angle `{text}`"),
        };
        if denom == 0.0 {
            bail!("zero denominator in angle `{text}`");
        }
        coef * std::f64::consts::PI / denom
    } else {
        rest.parse()
            .with_context(|| format!("`{text}` is not an angle"))?
    };
    Ok(sign * value)
}

fn parse_bloch(text: &str) -> Result<BlochAngle> {
    Ok(BlochAngle::new(parse_angle(text)?))
}

/// Generic JSON config reader: returns the key/value map, rejecting
/// anything that is not an object.
fn read_config_map(path: &Path) -> Result<serde_json::Map<String, serde_json::Value>> {
    let text = read_input(path)?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .with_context(|| format!("{} is not valid JSON", path.display()))?;
    match value {
        serde_json::Value::Object(map) => Ok(map),
        _ => bail!("{}: config must be a JSON object", path.display()),
    }
}

/// An angle config value: either a string like "3pi/4" or a raw number in
/// radians.
fn angle_value(key: &str, value: &serde_json::Value) -> Result<BlochAngle> {
    match value {
        serde_json::Value::String(s) => {
            parse_bloch(s).with_context(|| format!("config field `{key}`"))
        }
        serde_json::Value::Number(n) => {
            Ok(BlochAngle::new(n.as_f64().with_context(|| {
                format!("config field `{key}` is not finite")
            })?))
        }
        _ => bail!("config field `{key}` must be an angle string or number"),
    }
}

fn angle_pair_value(key: &str, value: &serde_json::Value) -> Result<(BlochAngle, BlochAngle)> {
    let arr = value
        .as_array()
        .filter(|a| a.len() == 2)
        .with_context(|| format!("config field `{key}` must be a two-element array"))?;
    Ok((angle_value(key, &arr[0])?, angle_value(key, &arr[1])?))
}

fn prior_value(key: &str, value: &serde_json::Value) -> Result<[f64; 2]> {
    let arr = value
        .as_array()
        .filter(|a| a.len() == 2)
        .with_context(|| format!("config field `{key}` must be a two-element array"))?;
    let mut prior = [0.0; 2];
    for (slot, v) in prior.iter_mut().zip(arr) {
        *slot = v
            .as_f64()
            .with_context(|| format!("config field `{key}` must hold numbers"))?;
    }
    Ok(prior)
}

fn state_value(key: &str, value: &serde_json::Value) -> Result<PureState> {
    let arr = value
        .as_array()
        .with_context(|| format!("config field `{key}` must be an array of [re, im] pairs"))?;
    let mut amps = Vec::with_capacity(arr.len());
    for entry in arr {
        let pair = entry
            .as_array()
            .filter(|p| p.len() == 2)
            .with_context(|| format!("config field `{key}`: each amplitude is [re, im]"))?;
        let re = pair[0]
            .as_f64()
            .with_context(|| format!("config field `{key}` must hold numbers"))?;
        let im = pair[1]
            .as_f64()
            .with_context(|| format!("config field `{key}` must hold numbers"))?;
        amps.push(Complex64::new(re, im));
    }
    PureState::new(amps).with_context(|| format!("config field `{key}`"))
}

fn parse_prep_pair(text: &str) -> Result<(BlochAngle, BlochAngle)> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 2 {
        bail!("--prep-angles expects two comma-separated angles, got `{text}`");
    }
    Ok((parse_bloch(parts[0])?, parse_bloch(parts[1])?))
}

fn reject_extension_flags(overrides: &Overrides, scenario: &str) -> Result<()> {
    if overrides.x2_rotation.is_some() || overrides.y2_angle.is_some() {
        bail!("--x2-rotation and --y2-angle apply only to the ofx scenario, not `{scenario}`");
    }
    Ok(())
}

fn apply_of_fields(
    cfg: &mut OFConfig,
    map: &serde_json::Map<String, serde_json::Value>,
    scenario: &str,
    allow_extension_keys: bool,
) -> Result<()> {
    for (key, value) in map {
        match key.as_str() {
            "preparation_angles" => cfg.preparation_angles = angle_pair_value(key, value)?,
            "charlie_angle" => cfg.charlie_basis_angle = angle_value(key, value)?,
            "debbie_angle" => cfg.debbie_basis_angle = angle_value(key, value)?,
            "bob_angle" => cfg.bob_basis_angle = angle_value(key, value)?,
            "preparation_prior" => cfg.preparation_prior = prior_value(key, value)?,
            "x2_rotation" | "y2_angle" if allow_extension_keys => {}
            _ => bail!("config field `{key}` is not recognized for scenario `{scenario}`"),
        }
    }
    Ok(())
}

fn load_of_config(config: Option<&Path>, overrides: &Overrides) -> Result<OFConfig> {
    reject_extension_flags(overrides, "of")?;
    let mut cfg = OFConfig::default();
    if let Some(path) = config {
        apply_of_fields(&mut cfg, &read_config_map(path)?, "of", false)?;
    }
    if let Some(text) = &overrides.prep_angles {
        cfg.preparation_angles = parse_prep_pair(text)?;
    }
    if let Some(text) = &overrides.charlie_angle {
        cfg.charlie_basis_angle = parse_bloch(text)?;
    }
    if let Some(text) = &overrides.debbie_angle {
        cfg.debbie_basis_angle = parse_bloch(text)?;
    }
    if let Some(text) = &overrides.bob_angle {
        cfg.bob_basis_angle = parse_bloch(text)?;
    }
    Ok(cfg)
}

fn load_lf_config(config: Option<&Path>, overrides: &Overrides) -> Result<LFConfig> {
    reject_extension_flags(overrides, "lf")?;
    if overrides.prep_angles.is_some() {
        bail!("--prep-angles applies only to the of/ofx scenarios, not `lf`");
    }
    let mut cfg = LFConfig::default();
    if let Some(path) = config {
        for (key, value) in &read_config_map(path)? {
            match key.as_str() {
                "shared_state" => cfg.shared_state = state_value(key, value)?,
                "charlie_angle" => cfg.charlie_angle = angle_value(key, value)?,
                "debbie_angle" => cfg.debbie_angle = angle_value(key, value)?,
                "alice_undo_angle" => cfg.alice_undo_angle = angle_value(key, value)?,
                "bob_undo_angle" => cfg.bob_undo_angle = angle_value(key, value)?,
                _ => bail!("config field `{key}` is not recognized for scenario `lf`"),
            }
        }
    }
    if let Some(text) = &overrides.charlie_angle {
        cfg.charlie_angle = parse_bloch(text)?;
    }
    if let Some(text) = &overrides.debbie_angle {
        cfg.debbie_angle = parse_bloch(text)?;
    }
    if let Some(text) = &overrides.bob_angle {
        cfg.bob_undo_angle = parse_bloch(text)?;
    }
    Ok(cfg)
}

fn load_ofx_config(config: Option<&Path>, overrides: &Overrides) -> Result<ExtendedOFConfig> {
    let mut cfg = ExtendedOFConfig::default();
    if let Some(path) = config {
        let map = read_config_map(path)?;
        apply_of_fields(&mut cfg.base, &map, "ofx", true)?;
        if let Some(value) = map.get("x2_rotation") {
            cfg.alice_x2_rotation_angle = angle_value("x2_rotation", value)?.radians();
        }
        if let Some(value) = map.get("y2_angle") {
            cfg.bob_y2_basis_angle = angle_value("y2_angle", value)?;
        }
    }
    if let Some(text) = &overrides.prep_angles {
        cfg.base.preparation_angles = parse_prep_pair(text)?;
    }
    if let Some(text) = &overrides.charlie_angle {
        cfg.base.charlie_basis_angle = parse_bloch(text)?;
    }
    if let Some(text) = &overrides.debbie_angle {
        cfg.base.debbie_basis_angle = parse_bloch(text)?;
    }
    if let Some(text) = &overrides.bob_angle {
        cfg.base.bob_basis_angle = parse_bloch(text)?;
    }
    if let Some(text) = &overrides.x2_rotation {
        cfg.alice_x2_rotation_angle = parse_angle(text)?;
    }
    if let Some(text) = &overrides.y2_angle {
        cfg.bob_y2_basis_angle = parse_bloch(text)?;
    }
    Ok(cfg)
}

/// Ensemble file: JSON array of {"weight": w, "angle": "pi/4"} entries.
fn read_ensemble(path: &Path) -> Result<Vec<(f64, PureState)>> {
    let text = read_input(path)?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .with_context(|| format!("{} is not valid JSON", path.display()))?;
    let arr = value
        .as_array()
        .with_context(|| format!("{}: ensemble must be a JSON array", path.display()))?;
    let mut ensemble = Vec::with_capacity(arr.len());
    for (i, entry) in arr.iter().enumerate() {
        let obj = entry
            .as_object()
            .with_context(|| format!("{}: entry {i} must be an object", path.display()))?;
        for key in obj.keys() {
            if key != "weight" && key != "angle" {
                bail!(
                    "{}: entry {i} field `{key}` is not recognized",
                    path.display()
                );
            }
        }
        let weight = obj
            .get("weight")
            .and_then(|v| v.as_f64())
            .with_context(|| format!("{}: entry {i} field `weight`", path.display()))?;
        let angle = obj
            .get("angle")
            .with_context(|| format!("{}: entry {i} field `angle`", path.display()))?;
        let angle = angle_value("angle", angle)
            .with_context(|| format!("{}: entry {i}", path.display()))?;
        ensemble.push((weight, friendliness_core::quantum::make_bloch_state(angle)));
    }
    Ok(ensemble)
}

// ---------------------------------------------------------------------------
// Output

fn read_input(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

/// Writes to stdout, or atomically (temp file + rename) to `out`.
fn write_output(out: Option<&Path>, text: &str) -> Result<()> {
    let mut owned;
    let text = if text.ends_with('\n') {
        text
    } else {
        owned = String::with_capacity(text.len() + 1);
        owned.push_str(text);
        owned.push('\n');
        &owned
    };
    match out {
        None => {
            print!("{text}");
            Ok(())
        }
        Some(path) => {
            let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
            let file_name = path
                .file_name()
                .with_context(|| format!("{} has no file name", path.display()))?;
            let mut tmp_name = std::ffi::OsString::from(".");
            tmp_name.push(file_name);
            tmp_name.push(format!(".tmp.{}", std::process::id()));
            let tmp = dir.unwrap_or(Path::new(".")).join(tmp_name);
            fs::write(&tmp, text).with_context(|| format!("cannot write {}", tmp.display()))?;
            fs::rename(&tmp, path)
                .map_err(|e| {
                    let _ = fs::remove_file(&tmp);
                    e
                })
                .with_context(|| format!("cannot move output into place at {}", path.display()))
        }
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn pretty_feasibility(result: &FeasibilityResult) -> String {
    let mut s = format!("feasible: {}\n", yes_no(result.feasible));
    s.push_str(&format!("slack: {}\n", fmt_f64(result.slack)));
    if result.witness.is_some() {
        s.push_str("witness: present\n");
    }
    if result.certificate.is_some() {
        s.push_str("certificate: present\n");
    }
    s
}

fn pretty_contradiction(report: &ContradictionReport) -> String {
    let mut s = format!("scenario: {}\n", report.scenario);
    s.push_str("premise checks:\n");
    for check in &report.premise_checks {
        s.push_str(&format!(
            "  {}  {}  max|diff| {}\n",
            if check.passed { "pass" } else { "FAIL" },
            check.description,
            fmt_f64(check.max_abs_diff)
        ));
    }
    if let Some(chsh) = report.chsh {
        s.push_str(&format!("chsh: {}\n", fmt_f64(chsh)));
    }
    if let Some(fine) = &report.fine_result {
        s.push_str(&format!(
            "joint distribution exists: {}\n",
            yes_no(fine.feasible)
        ));
    }
    s.push_str(&format!("verdict: {}\n", report.verdict.as_str()));
    s
}

fn pretty_separation(report: &SeparationReport) -> String {
    let mut s = format!("scenario: {}\n", report.scenario);
    let ne = &report.newoe_check;
    s.push_str(&format!(
        "new operational equivalence: {}  {}  max|diff| {}\n",
        if ne.passed { "pass" } else { "FAIL" },
        ne.description,
        fmt_f64(ne.max_abs_diff)
    ));
    s.push_str("x=2 gaps:\n");
    for gap in &report.x2_gaps {
        s.push_str(&format!(
            "  {}  gap {}\n",
            gap.description,
            fmt_f64(gap.gap)
        ));
    }
    s.push_str(&format!(
        "restricted chsh (x,y in {{1,2}}): {}\n",
        fmt_f64(report.restricted_chsh)
    ));
    s.push_str(&format!(
        "restricted block in local polytope: {}\n",
        yes_no(report.restricted_membership.feasible)
    ));
    s.push_str(&format!(
        "of-block joint distribution exists: {}\n",
        yes_no(report.fine_result.feasible)
    ));
    s.push_str("witness checks:\n");
    for check in &report.witness.checks {
        s.push_str(&format!(
            "  {}  {}  max|diff| {}\n",
            if check.passed { "pass" } else { "FAIL" },
            check.description,
            fmt_f64(check.max_abs_diff)
        ));
    }
    s.push_str(&format!("verdict: {}\n", report.verdict.as_str()));
    s
}
