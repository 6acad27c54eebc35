use std::path::PathBuf;

use ghostsim::experiment::{
    coincidence_pattern, default_z2_range, detector_plane_state, duality_margin_from, eraser_pattern,
    exact_local_visibility, fringe_spacing, large_omega_pattern, measured_visibility, state_at_slit,
    uniform_grid,
};
use ghostsim::oracle::numeric_branches;
use ghostsim::{compare_patterns, make_epr, DetectorModel, EraserBasis, EvolutionParam, NormalizationMode, Pattern};
use rayon::prelude::*;

use crate::config::{Mode, RunConfig};
use crate::error::CliError;
use crate::output::{manifest, number, pattern_csv, write_file, Summary, SUMMARY_KEYS};

pub const DEFAULT_OUT_DIR: &str = "ghostsim-out";

#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    pub out_dir: PathBuf,
    /// Worker threads for sweeps; 0 lets rayon decide.
    pub workers: usize,
    pub seed: u64,
}

impl RunOptions {
    /// `--out` wins over the config's `out` key.
    pub fn resolve(cfg: &RunConfig, out: Option<PathBuf>, workers: usize, seed: u64) -> Self {
        let out_dir = out
            .or_else(|| cfg.out.clone())
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR));
        RunOptions { out_dir, workers, seed }
    }
}

pub fn z2_grid(cfg: &RunConfig) -> Result<Vec<f64>, CliError> {
    let (lo, hi) = match cfg.z2_range {
        Some(r) => r,
        None => default_z2_range(&cfg.geometry)?,
    };
    Ok(uniform_grid(lo, hi, cfg.z2_points)?)
}

fn check_mode(cfg: &RunConfig, allowed: &[Mode], command: &str) -> Result<(), CliError> {
    match cfg.mode {
        Some(m) if !allowed.contains(&m) => Err(CliError::Usage(format!(
            "config sets mode = {} but the command is '{command}'",
            m.name()
        ))),
        _ => Ok(()),
    }
}

/// Analytic coincidence pattern of `cfg` and its summary figures.
pub fn run_pattern(cfg: &RunConfig) -> Result<(Pattern, Summary), CliError> {
    let det = cfg.detector()?;
    let grid = z2_grid(cfg)?;
    let bs = detector_plane_state(&cfg.geometry, &det)?;
    let pattern = coincidence_pattern(&bs, &det, cfg.z1_fixed, &grid, cfg.normalization)?;
    let around = 0.0f64.clamp(grid[0], grid[grid.len() - 1]);
    let peak_visibility = grid
        .iter()
        .chain([&around])
        .map(|&z| exact_local_visibility(&bs, &det, cfg.z1_fixed, z))
        .fold(0.0, f64::max);
    let measured = measured_visibility(&pattern, around)?.visibility;
    let distinguishability = det.distinguishability();
    let duality_margin = duality_margin_from(distinguishability, measured.clamp(0.0, 1.0))?;
    let fringe_spacing = if cfg.geometry.approx_valid() {
        Some(fringe_spacing(&cfg.geometry)?)
    } else {
        None
    };
    let summary = Summary {
        distinguishability,
        peak_visibility,
        measured_visibility: measured,
        duality_margin,
        fringe_spacing,
        pass_probability: bs.pass_probability(),
    };
    Ok((pattern, summary))
}

pub fn cmd_pattern(cfg: &RunConfig, opts: &RunOptions) -> Result<Vec<PathBuf>, CliError> {
    check_mode(cfg, &[Mode::Pattern], "pattern")?;
    let (pattern, summary) = run_pattern(cfg)?;
    Ok(vec![
        write_file(&opts.out_dir, "pattern.csv", &pattern_csv(&pattern))?,
        write_file(&opts.out_dir, "summary.json", &summary.to_json())?,
        write_file(&opts.out_dir, "manifest.txt", &manifest("pattern", opts.seed, cfg))?,
    ])
}

/// Writes both eraser patterns unless the config's mode picks one.
pub fn cmd_eraser(cfg: &RunConfig, opts: &RunOptions) -> Result<Vec<PathBuf>, CliError> {
    check_mode(cfg, &[Mode::EraserPlus, Mode::EraserMinus], "eraser")?;
    let det = cfg.detector()?;
    let grid = z2_grid(cfg)?;
    let bs = detector_plane_state(&cfg.geometry, &det)?;
    let bases: &[(EraserBasis, &str)] = match cfg.mode {
        Some(Mode::EraserPlus) => &[(EraserBasis::Plus, "eraser_plus.csv")],
        Some(Mode::EraserMinus) => &[(EraserBasis::Minus, "eraser_minus.csv")],
        _ => &[(EraserBasis::Plus, "eraser_plus.csv"), (EraserBasis::Minus, "eraser_minus.csv")],
    };
    let mut files = Vec::new();
    for &(basis, name) in bases {
        let p = eraser_pattern(&bs, basis, cfg.z1_fixed, &grid, cfg.normalization)?;
        files.push(write_file(&opts.out_dir, name, &pattern_csv(&p))?);
    }
    files.push(write_file(&opts.out_dir, "manifest.txt", &manifest("eraser", opts.seed, cfg))?);
    Ok(files)
}

fn with_pool<T: Send>(workers: usize, job: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start {workers} workers: {e}")))?;
    Ok(pool.install(job))
}

/// One summary row per sweep value, in the order the values were given.
pub fn run_sweep(cfg: &RunConfig, workers: usize) -> Result<Vec<(f64, Summary)>, CliError> {
    let sweep = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| CliError::Usage("sweep needs sweep_param and sweep_values".into()))?;
    let configs = sweep
        .values
        .iter()
        .map(|&v| cfg.with_param(sweep.param, v).map(|c| (v, c)))
        .collect::<Result<Vec<_>, _>>()?;
    let rows = with_pool(workers, || {
        configs
            .par_iter()
            .map(|(v, c)| run_pattern(c).map(|(_, s)| (*v, s)))
            .collect::<Result<Vec<_>, _>>()
    })?;
    rows
}

pub fn cmd_sweep(cfg: &RunConfig, opts: &RunOptions) -> Result<Vec<PathBuf>, CliError> {
    check_mode(cfg, &[Mode::Sweep], "sweep")?;
    let rows = run_sweep(cfg, opts.workers)?;
    let param = cfg.sweep.as_ref().map(|s| s.param.name()).unwrap_or_default();
    let mut csv = format!("index,{param},{}\n", SUMMARY_KEYS.join(","));
    for (i, (v, s)) in rows.iter().enumerate() {
        csv.push_str(&format!("{i},{},{}\n", number(*v), s.csv_fields()));
    }
    Ok(vec![
        write_file(&opts.out_dir, "sweep.csv", &csv)?,
        write_file(&opts.out_dir, "manifest.txt", &manifest("sweep", opts.seed, cfg))?,
    ])
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    /// `None` when the check does not apply to this configuration.
    pub passed: Option<bool>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed != Some(false))
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            let tag = match c.passed {
                Some(true) => "PASS",
                Some(false) => "FAIL",
                None => "SKIP",
            };
            s.push_str(&format!("[{tag}] {}: {}\n", c.name, c.detail));
        }
        let failed = self.checks.iter().filter(|c| c.passed == Some(false)).count();
        s.push_str(&format!("validate: {failed} of {} checks failed\n", self.checks.len()));
        s
    }
}

fn check(name: &'static str, outcome: Result<(bool, String), CliError>) -> Check {
    match outcome {
        Ok((ok, detail)) => Check {
            name,
            passed: Some(ok),
            detail,
        },
        Err(e) => Check {
            name,
            passed: Some(false),
            detail: format!("could not run: {e}"),
        },
    }
}

const ORACLE_TOL: f64 = 1e-6;
const NORM_TOL: f64 = 1e-12;
const PASS_TOL: f64 = 1e-8;
const DUALITY_TOL: f64 = 1e-9;
const CEILING_TOL: f64 = 1e-2;
const SUM_RULE_TOL: f64 = 1e-12;
const LARGE_OMEGA_TOL: f64 = 1e-2;

/// Runs the closed-form pipeline against the grid oracle and the
/// structural identities for one configuration.
pub fn run_validate(cfg: &RunConfig) -> Result<ValidationReport, CliError> {
    let g = &cfg.geometry;
    let det = cfg.detector()?;
    let grid = z2_grid(cfg)?;
    let bs = detector_plane_state(g, &det)?;
    let exact = coincidence_pattern(&bs, &det, cfg.z1_fixed, &grid, NormalizationMode::Raw)?;
    let mut checks = Vec::new();

    let numeric = numeric_branches(g, cfg.z1_fixed, &grid);
    checks.push(check("oracle pattern", {
        numeric
            .as_ref()
            .map_err(|e| CliError::from(e.clone()))
            .and_then(|nb| Ok(compare_patterns(&nb.pattern(&det, NormalizationMode::Raw)?, &exact)?))
            .map(|r| {
                (
                    r.max_rel_error <= ORACLE_TOL,
                    format!("max rel error {:.2e} at z2 = {:.4} (tol {ORACLE_TOL:.0e})", r.max_rel_error, r.location_of_max),
                )
            })
    }));
    checks.push(check("pass probability", {
        numeric.as_ref().map_err(|e| CliError::from(e.clone())).map(|nb| {
            let rel = (nb.pass_probability() / bs.pass_probability() - 1.0).abs();
            (rel <= PASS_TOL, format!("grid vs closed form rel {rel:.2e} (tol {PASS_TOL:.0e})"))
        })
    }));
    checks.push(check("unitarity", {
        (|| -> Result<(bool, String), CliError> {
            let source = make_epr(g.sigma, g.omega)?;
            let at_slit = state_at_slit(g)?;
            let at_detector = source.free_evolve(EvolutionParam::new(
                g.tau_to_slit().value() + g.tau_after_slit().value(),
            )?);
            let drift = [source.norm_sq(), at_slit.norm_sq(), at_detector.norm_sq()]
                .iter()
                .map(|n| (n - 1.0).abs())
                .fold(0.0, f64::max);
            Ok((drift <= NORM_TOL, format!("pair norm drift {drift:.2e} (tol {NORM_TOL:.0e})")))
        })()
    }));
    checks.push(check("duality", {
        (|| -> Result<(bool, String), CliError> {
            let around = 0.0f64.clamp(grid[0], grid[grid.len() - 1]);
            let v = measured_visibility(&exact, around)?.visibility;
            let d = det.distinguishability();
            let margin = 1.0 - (d * d + v * v);
            let c = det.overlap().norm();
            Ok((
                margin >= -DUALITY_TOL && v <= c + CEILING_TOL,
                format!("D = {d:.6}, V = {v:.6}, 1-(D^2+V^2) = {margin:.2e}, V-|c| = {:.2e}", v - c),
            ))
        })()
    }));
    checks.push(check("eraser sum rule", {
        (|| -> Result<(bool, String), CliError> {
            let ortho = DetectorModel::orthogonal_states();
            let marked = detector_plane_state(g, &ortho)?;
            let raw = NormalizationMode::Raw;
            let plus = eraser_pattern(&marked, EraserBasis::Plus, cfg.z1_fixed, &grid, raw)?;
            let minus = eraser_pattern(&marked, EraserBasis::Minus, cfg.z1_fixed, &grid, raw)?;
            let whole = coincidence_pattern(&marked, &ortho, cfg.z1_fixed, &grid, raw)?;
            let worst = (0..grid.len())
                .map(|k| (plus.intensity()[k] + minus.intensity()[k] - whole.intensity()[k]).abs())
                .fold(0.0, f64::max)
                / whole.peak();
            Ok((worst <= SUM_RULE_TOL, format!("rel error {worst:.2e} (tol {SUM_RULE_TOL:.0e})")))
        })()
    }));
    if g.approx_valid() && cfg.z1_fixed == 0.0 {
        checks.push(check("large-Omega pattern", {
            (|| -> Result<(bool, String), CliError> {
                let approx = large_omega_pattern(g, &det, &grid, NormalizationMode::Raw)?;
                let r = compare_patterns(&approx, &exact)?;
                Ok((
                    r.max_rel_error <= LARGE_OMEGA_TOL,
                    format!("max rel error {:.2e} (tol {LARGE_OMEGA_TOL:.0e})", r.max_rel_error),
                ))
            })()
        }));
    } else {
        checks.push(Check {
            name: "large-Omega pattern",
            passed: None,
            detail: "needs Omega >= 100 max(epsilon, 1/sigma) and z1_fixed = 0".into(),
        });
    }
    Ok(ValidationReport { checks })
}

/// Writes `validate.txt`; a failed check becomes [`CliError::Validation`].
pub fn cmd_validate(cfg: &RunConfig, opts: &RunOptions) -> Result<(ValidationReport, Vec<PathBuf>), CliError> {
    check_mode(cfg, &[Mode::Validate], "validate")?;
    let report = run_validate(cfg)?;
    let files = vec![
        write_file(&opts.out_dir, "validate.txt", &report.render())?,
        write_file(&opts.out_dir, "manifest.txt", &manifest("validate", opts.seed, cfg))?,
    ];
    Ok((report, files))
}
