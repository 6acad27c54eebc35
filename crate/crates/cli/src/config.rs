//! `key = value` run configuration.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use ghostsim::{DetectorModel, Geometry, NormalizationMode};

use crate::error::CliError;

pub const DEFAULT_Z2_POINTS: usize = 2048;
pub const MIN_Z2_POINTS: usize = 16;

const GEOMETRY_KEYS: [&str; 7] = ["sigma", "omega", "epsilon", "z0", "lambda", "L1", "L2"];

const OPTIONAL_KEYS: [&str; 11] = [
    "overlap_magnitude",
    "overlap_phase",
    "z1_fixed",
    "z2_min",
    "z2_max",
    "z2_points",
    "mode",
    "normalization",
    "sweep_param",
    "sweep_values",
    "out",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Pattern,
    EraserPlus,
    EraserMinus,
    Sweep,
    Validate,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Pattern => "pattern",
            Mode::EraserPlus => "eraser_plus",
            Mode::EraserMinus => "eraser_minus",
            Mode::Sweep => "sweep",
            Mode::Validate => "validate",
        }
    }

    fn parse(s: &str) -> Option<Mode> {
        [Mode::Pattern, Mode::EraserPlus, Mode::EraserMinus, Mode::Sweep, Mode::Validate]
            .into_iter()
            .find(|m| m.name() == s)
    }
}

/// Quantity varied by a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    Geometry(usize),
    OverlapMagnitude,
    OverlapPhase,
    Z1Fixed,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::Geometry(k) => GEOMETRY_KEYS[k],
            SweepParam::OverlapMagnitude => "overlap_magnitude",
            SweepParam::OverlapPhase => "overlap_phase",
            SweepParam::Z1Fixed => "z1_fixed",
        }
    }

    fn parse(s: &str) -> Option<SweepParam> {
        if let Some(k) = GEOMETRY_KEYS.iter().position(|k| *k == s) {
            return Some(SweepParam::Geometry(k));
        }
        match s {
            "overlap_magnitude" => Some(SweepParam::OverlapMagnitude),
            "overlap_phase" => Some(SweepParam::OverlapPhase),
            "z1_fixed" => Some(SweepParam::Z1Fixed),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub param: SweepParam,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub geometry: Geometry,
    pub overlap_magnitude: f64,
    pub overlap_phase: f64,
    pub z1_fixed: f64,
    /// Explicit scan range; `None` picks one from the geometry.
    pub z2_range: Option<(f64, f64)>,
    pub z2_points: usize,
    pub mode: Option<Mode>,
    pub normalization: NormalizationMode,
    pub sweep: Option<SweepSpec>,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn detector(&self) -> Result<DetectorModel, CliError> {
        Ok(DetectorModel::from_polar(self.overlap_magnitude, self.overlap_phase)?)
    }

    /// Copy with one parameter replaced, validated like a parsed value.
    pub fn with_param(&self, param: SweepParam, value: f64) -> Result<RunConfig, CliError> {
        let mut cfg = self.clone();
        let at = format!("sweep value for {}", param.name());
        match param {
            SweepParam::Geometry(k) => {
                let mut g = [0.0; 7];
                for (slot, (_, v)) in g.iter_mut().zip(self.geometry.named_fields()) {
                    *slot = v;
                }
                g[k] = check_positive(&at, GEOMETRY_KEYS[k], value)?;
                cfg.geometry = Geometry::new(g[0], g[1], g[2], g[3], g[4], g[5], g[6])?;
            }
            SweepParam::OverlapMagnitude => cfg.overlap_magnitude = check_magnitude(&at, value)?,
            SweepParam::OverlapPhase => cfg.overlap_phase = value,
            SweepParam::Z1Fixed => cfg.z1_fixed = value,
        }
        Ok(cfg)
    }
}

struct Entry {
    value: String,
    at: String,
}

fn parse_error(at: &str, message: impl Into<String>) -> CliError {
    CliError::Parse {
        at: at.to_string(),
        message: message.into(),
    }
}

fn domain_error(at: &str, message: impl Into<String>) -> CliError {
    CliError::Domain(format!("{at}: {}", message.into()))
}

fn check_positive(at: &str, key: &str, v: f64) -> Result<f64, CliError> {
    if v > 0.0 {
        Ok(v)
    } else {
        Err(domain_error(at, format!("{key} must be positive, got {v}")))
    }
}

fn check_magnitude(at: &str, v: f64) -> Result<f64, CliError> {
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(domain_error(at, format!("overlap_magnitude must lie in [0, 1], got {v}")))
    }
}

fn number(key: &str, e: &Entry) -> Result<f64, CliError> {
    match e.value.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(parse_error(&e.at, format!("{key}: '{}' is not a finite number", e.value))),
    }
}

fn insert(map: &mut BTreeMap<String, Entry>, line: &str, at: String, allow_replace: bool) -> Result<(), CliError> {
    let Some((key, value)) = line.split_once('=') else {
        return Err(parse_error(&at, format!("expected 'key = value', got '{line}'")));
    };
    let key = key.trim();
    let value = value.trim();
    if !GEOMETRY_KEYS.contains(&key) && !OPTIONAL_KEYS.contains(&key) {
        return Err(parse_error(&at, format!("unknown key '{key}'")));
    }
    if value.is_empty() {
        return Err(parse_error(&at, format!("{key} has no value")));
    }
    if !allow_replace {
        if let Some(prev) = map.get(key) {
            return Err(parse_error(&at, format!("{key} already set at {}", prev.at)));
        }
    }
    map.insert(
        key.to_string(),
        Entry {
            value: value.to_string(),
            at,
        },
    );
    Ok(())
}

pub fn parse_config(text: &str) -> Result<RunConfig, CliError> {
    parse_config_with(text, &[])
}

/// Parses `text`, then applies `overrides` (`key=value`), which win over the file.
pub fn parse_config_with(text: &str, overrides: &[String]) -> Result<RunConfig, CliError> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        insert(&mut map, line, format!("line {}", i + 1), false)?;
    }
    for o in overrides {
        insert(&mut map, o.trim(), format!("--set {o}"), true)?;
    }

    let mut geometry = [0.0; 7];
    for (slot, key) in geometry.iter_mut().zip(GEOMETRY_KEYS) {
        let e = map
            .get(key)
            .ok_or_else(|| parse_error("config", format!("missing required key '{key}'")))?;
        *slot = check_positive(&e.at, key, number(key, e)?)?;
    }
    let geometry = Geometry::new(
        geometry[0], geometry[1], geometry[2], geometry[3], geometry[4], geometry[5], geometry[6],
    )?;

    let num_or = |key: &str, default: f64| -> Result<f64, CliError> {
        map.get(key).map_or(Ok(default), |e| number(key, e))
    };
    let overlap_magnitude = match map.get("overlap_magnitude") {
        Some(e) => check_magnitude(&e.at, number("overlap_magnitude", e)?)?,
        None => 0.0,
    };
    let overlap_phase = num_or("overlap_phase", 0.0)?;
    let z1_fixed = num_or("z1_fixed", 0.0)?;

    let z2_range = match (map.get("z2_min"), map.get("z2_max")) {
        (None, None) => None,
        (Some(lo), Some(hi)) => {
            let (a, b) = (number("z2_min", lo)?, number("z2_max", hi)?);
            if a >= b {
                return Err(domain_error(&hi.at, format!("z2_max ({b}) must exceed z2_min ({a})")));
            }
            Some((a, b))
        }
        (Some(e), None) | (None, Some(e)) => {
            return Err(parse_error(&e.at, "z2_min and z2_max must be given together"));
        }
    };

    let z2_points = match map.get("z2_points") {
        Some(e) => {
            let n: usize = e
                .value
                .parse()
                .map_err(|_| parse_error(&e.at, format!("z2_points: '{}' is not an integer", e.value)))?;
            if n < MIN_Z2_POINTS {
                return Err(domain_error(&e.at, format!("z2_points must be at least {MIN_Z2_POINTS}, got {n}")));
            }
            n
        }
        None => DEFAULT_Z2_POINTS,
    };

    let mode = match map.get("mode") {
        Some(e) => Some(Mode::parse(&e.value).ok_or_else(|| {
            parse_error(
                &e.at,
                format!("mode must be pattern, eraser_plus, eraser_minus, sweep or validate, got '{}'", e.value),
            )
        })?),
        None => None,
    };

    let normalization = match map.get("normalization").map(|e| (e.value.as_str(), e)) {
        None | Some(("raw", _)) => NormalizationMode::Raw,
        Some(("unit_peak", _)) => NormalizationMode::UnitPeak,
        Some((other, e)) => {
            return Err(parse_error(&e.at, format!("normalization must be raw or unit_peak, got '{other}'")));
        }
    };

    let sweep = match (map.get("sweep_param"), map.get("sweep_values")) {
        (None, None) => None,
        (Some(p), Some(v)) => {
            let param = SweepParam::parse(&p.value)
                .ok_or_else(|| parse_error(&p.at, format!("'{}' cannot be swept", p.value)))?;
            let values = v
                .value
                .split(',')
                .map(|s| match s.trim().parse::<f64>() {
                    Ok(x) if x.is_finite() => Ok(x),
                    _ => Err(parse_error(&v.at, format!("sweep_values: '{}' is not a finite number", s.trim()))),
                })
                .collect::<Result<Vec<_>, _>>()?;
            Some(SweepSpec { param, values })
        }
        (Some(e), None) | (None, Some(e)) => {
            return Err(parse_error(&e.at, "sweep_param and sweep_values must be given together"));
        }
    };

    let out = map.get("out").map(|e| PathBuf::from(&e.value));

    Ok(RunConfig {
        geometry,
        overlap_magnitude,
        overlap_phase,
        z1_fixed,
        z2_range,
        z2_points,
        mode,
        normalization,
        sweep,
        out,
    })
}

/// Config text that parses back to `cfg`.
pub fn emit_config(cfg: &RunConfig) -> String {
    let mut s = String::new();
    for (key, v) in cfg.geometry.named_fields() {
        let _ = writeln!(s, "{key} = {v:?}");
    }
    let _ = writeln!(s, "overlap_magnitude = {:?}", cfg.overlap_magnitude);
    let _ = writeln!(s, "overlap_phase = {:?}", cfg.overlap_phase);
    let _ = writeln!(s, "z1_fixed = {:?}", cfg.z1_fixed);
    if let Some((lo, hi)) = cfg.z2_range {
        let _ = writeln!(s, "z2_min = {lo:?}");
        let _ = writeln!(s, "z2_max = {hi:?}");
    }
    let _ = writeln!(s, "z2_points = {}", cfg.z2_points);
    if let Some(m) = cfg.mode {
        let _ = writeln!(s, "mode = {}", m.name());
    }
    let norm = match cfg.normalization {
        NormalizationMode::Raw => "raw",
        NormalizationMode::UnitPeak => "unit_peak",
    };
    let _ = writeln!(s, "normalization = {norm}");
    if let Some(sw) = &cfg.sweep {
        let values: Vec<String> = sw.values.iter().map(|v| format!("{v:?}")).collect();
        let _ = writeln!(s, "sweep_param = {}", sw.param.name());
        let _ = writeln!(s, "sweep_values = {}", values.join(", "));
    }
    if let Some(out) = &cfg.out {
        let _ = writeln!(s, "out = {}", out.display());
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "\
# far-field reference
sigma = 10
omega = 1000
epsilon = 0.1
z0 = 2
lambda = 0.01
L1 = 100
L2 = 50   # source to slits
";

    #[test]
    fn minimal_file_gets_grid_defaults() {
        let cfg = parse_config(MINIMAL).unwrap();
        assert_eq!(cfg.geometry.sigma, 10.0);
        assert_eq!(cfg.geometry.l2, 50.0);
        assert_eq!(cfg.z2_points, DEFAULT_Z2_POINTS);
        assert_eq!(cfg.z2_range, None);
        assert_eq!(cfg.overlap_magnitude, 0.0);
        assert_eq!(cfg.normalization, NormalizationMode::Raw);
        assert_eq!(cfg.mode, None);
    }

    #[test]
    fn negative_sigma_is_a_domain_error_naming_the_key() {
        let text = MINIMAL.replace("sigma = 10", "sigma = -1");
        match parse_config(&text) {
            Err(CliError::Domain(msg)) => assert!(msg.contains("sigma") && msg.contains("line 2"), "{msg}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn parse_errors_name_the_line() {
        let unknown = format!("{MINIMAL}colour = blue\n");
        match parse_config(&unknown) {
            Err(CliError::Parse { at, message }) => {
                assert_eq!(at, "line 9");
                assert!(message.contains("colour"));
            }
            other => panic!("{other:?}"),
        }
        let text = MINIMAL.replace("z0 = 2", "z0 = two");
        assert!(matches!(parse_config(&text), Err(CliError::Parse { at, .. }) if at == "line 5"));
        let missing = MINIMAL.replace("lambda = 0.01", "");
        assert!(matches!(parse_config(&missing), Err(CliError::Parse { message, .. }) if message.contains("lambda")));
        let dup = format!("{MINIMAL}sigma = 3\n");
        assert!(matches!(parse_config(&dup), Err(CliError::Parse { .. })));
        let few = format!("{MINIMAL}z2_points = 8\n");
        assert!(matches!(parse_config(&few), Err(CliError::Domain(_))));
    }

    #[test]
    fn overrides_win_over_the_file() {
        let cfg = parse_config_with(MINIMAL, &["sigma=4".into(), "overlap_magnitude = 0.5".into()]).unwrap();
        assert_eq!(cfg.geometry.sigma, 4.0);
        assert_eq!(cfg.overlap_magnitude, 0.5);
        assert!(parse_config_with(MINIMAL, &["bogus=1".into()]).is_err());
    }

    #[test]
    fn emitted_config_round_trips() {
        let text = format!(
            "{MINIMAL}overlap_magnitude = 0.3\noverlap_phase = -1.25\nz1_fixed = 1e-7\nz2_min = -12.5\nz2_max = 12.5\n\
             z2_points = 513\nmode = eraser_minus\nnormalization = unit_peak\nsweep_param = L1\n\
             sweep_values = 10, 20.5, 3e-3\nout = runs/a b\n"
        );
        let cfg = parse_config(&text).unwrap();
        assert_eq!(parse_config(&emit_config(&cfg)).unwrap(), cfg);
        let minimal = parse_config(MINIMAL).unwrap();
        assert_eq!(parse_config(&emit_config(&minimal)).unwrap(), minimal);
    }

    #[test]
    fn sweep_values_are_validated_per_parameter() {
        let cfg = parse_config(MINIMAL).unwrap();
        assert!(cfg.with_param(SweepParam::Geometry(0), -2.0).is_err());
        assert!(cfg.with_param(SweepParam::OverlapMagnitude, 1.5).is_err());
        let moved = cfg.with_param(SweepParam::Geometry(5), 40.0).unwrap();
        assert_eq!(moved.geometry.l1, 40.0);
    }
}
