//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use ghostsim::experiment::{
    coincidence_pattern, default_z2_range, detector_plane_state, eraser_pattern, find_extrema,
    fringe_spacing, gamma_param, large_omega_pattern, local_visibility, measured_visibility,
    peak_separation, slit_image_center, slit_probes, state_at_slit, uniform_grid, DetectorModel,
    EraserBasis, Geometry, NormalizationMode, Pattern,
};
use ghostsim::oracle::{compare_patterns, momentum_space_propagate, numeric_branches, quadrature_project, sample_packet, Grid2D};
use ghostsim::{make_epr, EvolutionParam, GaussianPacket, Result};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const RAW: NormalizationMode = NormalizationMode::Raw;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn geom(v: [f64; 7]) -> Geometry {
    Geometry::new(v[0], v[1], v[2], v[3], v[4], v[5], v[6]).expect("valid geometry")
}

fn exact_pattern(g: &Geometry, det: &DetectorModel, grid: &[f64]) -> Result<Pattern> {
    let bs = detector_plane_state(g, det)?;
    coincidence_pattern(&bs, det, 0.0, grid, RAW)
}

fn max_rel_diff(a: &Pattern, b: &Pattern) -> f64 {
    compare_patterns(a, b).map(|r| r.max_rel_error).unwrap_or(f64::INFINITY)
}

/// Grid over the default range with at least `per_fringe` samples per fringe.
fn fringe_grid(g: &Geometry, per_fringe: f64) -> Result<Vec<f64>> {
    let (lo, hi) = default_z2_range(g)?;
    let spacing = fringe_spacing(g)?;
    let n = ((hi - lo) / spacing * per_fringe).ceil().max(2048.0) as usize;
    uniform_grid(lo, hi, n.next_power_of_two())
}

fn oracle_equivalence() -> Result<Outcome> {
    let geometries = [
        [10.0, 20.0, 0.1, 2.0, 0.01, 100.0, 50.0],
        [2.0, 50.0, 0.25, 1.0, 0.01, 100.0, 100.0 * PI],
        [1.0, 10.0, 0.3, 1.5, 0.02, 50.0, 20.0],
        [5.0, 5.0, 0.2, 0.8, 0.01, 200.0, 10.0],
        [1.0, 1.0, 0.5, 1.0, 0.05, 10.0, 5.0],
        [20.0, 100.0, 0.05, 0.5, 0.005, 100.0, 20.0],
        [3.0, 30.0, 0.15, 3.0, 0.01, 80.0, 40.0],
        [0.5, 4.0, 0.4, 2.0, 0.01, 30.0, 30.0],
        [8.0, 200.0, 0.1, 1.0, 0.002, 500.0, 250.0],
        [4.0, 12.0, 0.2, 0.6, 0.03, 40.0, 15.0],
    ];
    let overlaps = [(0.0, 0.0), (0.25, 0.0), (0.5, 1.0), (0.75, -2.0), (1.0, 0.5)];
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for v in geometries {
        let g = geom(v);
        let (lo, hi) = default_z2_range(&g)?;
        let grid = uniform_grid(lo, hi, 2048)?;
        let numeric = numeric_branches(&g, 0.0, &grid)?;
        for (mag, phase) in overlaps {
            let det = DetectorModel::from_polar(mag, phase)?;
            let analytic = exact_pattern(&g, &det, &grid)?;
            let rebuilt = numeric.pattern(&det, RAW)?;
            worst = worst.max(max_rel_diff(&rebuilt, &analytic));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    Ok(outcome(
        worst <= 1e-6 && secs <= 60.0,
        format!("max rel error {worst:.2e} (tol 1e-6) over 10 x 5 cases, {secs:.1} s (budget 60 s)"),
    ))
}

fn regime_convergence() -> Result<Outcome> {
    let base = geom([10.0, 1.0, 0.1, 2.0, 0.01, 100.0, 50.0]);
    let scale = base.epsilon.max(1.0 / base.sigma);
    let mut errors = Vec::new();
    for decade in [1e3, 1e4, 1e5, 1e6] {
        let g = Geometry { omega: decade * scale, ..base };
        let det = DetectorModel::from_polar(0.8, 0.0)?;
        let (lo, hi) = default_z2_range(&g)?;
        let grid = uniform_grid(lo, hi, 2048)?;
        let exact = exact_pattern(&g, &det, &grid)?;
        let approx = large_omega_pattern(&g, &det, &grid, RAW)?;
        errors.push(max_rel_diff(&approx, &exact));
    }
    let monotone = errors.windows(2).all(|w| w[1] < w[0]);
    let list: Vec<String> = errors.iter().map(|e| format!("{e:.2e}")).collect();
    Ok(outcome(
        errors[0] <= 1e-2 && monotone,
        format!("max rel error at Omega = 1e3..1e6 x max(eps, 1/sigma): [{}] (tol 1e-2, decreasing)", list.join(", ")),
    ))
}

fn random_far_field(rng: &mut ChaCha8Rng) -> Geometry {
    let sigma = 10f64.powf(rng.gen_range(0.7..1.6));
    let epsilon = rng.gen_range(0.03..0.2);
    let gamma_sq = epsilon * epsilon + 1.0 / (sigma * sigma);
    let gamma = gamma_sq.sqrt();
    let omega = rng.gen_range(100.0..1000.0) * epsilon.max(1.0 / sigma);
    let z0 = rng.gen_range(8.0..30.0) * gamma;
    // envelope scale sqrt(W) a few times z0, so both slit images overlap
    let envelope = rng.gen_range(3.0..6.0) * z0;
    let wavelength = rng.gen_range(0.005..0.02);
    let total = PI * gamma * (envelope * envelope - gamma_sq).sqrt() / wavelength;
    let l1 = rng.gen_range(0.3..0.9) * total;
    let l2 = 0.5 * (total - l1);
    Geometry::new(sigma, omega, epsilon, z0, wavelength, l1, l2).expect("valid random geometry")
}

fn duality() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(20_250_917);
    let configs = 1000;
    let mut min_margin = f64::INFINITY;
    let mut worst_ceiling = f64::NEG_INFINITY;
    let mut extrema_min_margin = f64::INFINITY;
    for _ in 0..configs {
        let g = random_far_field(&mut rng);
        let det = DetectorModel::from_polar(rng.gen_range(0.0..=1.0), rng.gen_range(0.0..2.0 * PI))?;
        let grid = fringe_grid(&g, 16.0)?;
        let p = exact_pattern(&g, &det, &grid)?;
        let m = measured_visibility(&p, 0.0)?;
        let d = det.distinguishability();
        min_margin = min_margin.min(1.0 - (d * d + m.visibility * m.visibility));
        worst_ceiling = worst_ceiling.max(m.visibility - det.overlap().norm());
        extrema_min_margin = extrema_min_margin.min(1.0 - (d * d + m.extrema_visibility.powi(2)));
    }
    Ok(outcome(
        min_margin >= -1e-9 && worst_ceiling <= 1e-2,
        format!(
            "{configs} configs: min 1-(D^2+V^2) = {min_margin:.2e} (tol -1e-9), max V-|c| = {worst_ceiling:.2e} (tol 1e-2); adjacent-extrema estimate min margin {extrema_min_margin:.2e}"
        ),
    ))
}

fn visibility_formula() -> Result<Outcome> {
    let g = geom([10.0, 1000.0, 0.1, 2.0, 0.01, 100.0, 50.0]);
    let spacing = fringe_spacing(&g)?;
    let grid = fringe_grid(&g, 32.0)?;
    let mut worst: f64 = 0.0;
    for c in [0.25, 0.5, 1.0] {
        let det = DetectorModel::from_polar(c, 0.0)?;
        let p = exact_pattern(&g, &det, &grid)?;
        for station in [0.0, spacing, 2.0 * spacing] {
            let measured = measured_visibility(&p, station)?.visibility;
            worst = worst.max((measured - local_visibility(&g, &det, station)?).abs());
        }
    }
    Ok(outcome(
        worst <= 1e-2,
        format!("max |V_measured - |c|/cosh| = {worst:.2e} over |c| in {{0.25, 0.5, 1}} at 0, 1, 2 fringes (tol 1e-2)"),
    ))
}

fn eraser() -> Result<Outcome> {
    let g = geom([10.0, 200.0, 0.1, 2.0, 0.01, 100.0, 50.0]);
    let det = DetectorModel::orthogonal_states();
    let bs = detector_plane_state(&g, &det)?;
    let grid = fringe_grid(&g, 32.0)?;
    let h = grid[1] - grid[0];
    let plus = eraser_pattern(&bs, EraserBasis::Plus, 0.0, &grid, RAW)?;
    let minus = eraser_pattern(&bs, EraserBasis::Minus, 0.0, &grid, RAW)?;
    let none = coincidence_pattern(&bs, &det, 0.0, &grid, RAW)?;
    let sum_err = (0..grid.len())
        .filter(|&i| none.intensity()[i] > 0.0)
        .map(|i| ((plus.intensity()[i] + minus.intensity()[i]) / none.intensity()[i] - 1.0).abs())
        .fold(0.0, f64::max);

    // the anti-fringes fade as 1/cosh(4 z z0 / W); compare where they are clear
    let reach = g.envelope_scale_sq() / (4.0 * g.z0) * 2f64.acosh();
    let plus_minima = find_extrema(plus.z2(), plus.intensity()).minima;
    let minus_maxima: Vec<f64> = find_extrema(minus.z2(), minus.intensity())
        .maxima
        .into_iter()
        .map(|m| m.0)
        .filter(|x| x.abs() < reach)
        .collect();
    let worst_offset = minus_maxima
        .iter()
        .map(|x| plus_minima.iter().map(|m| (m.0 - x).abs()).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max);
    let v_plus = measured_visibility(&plus, 0.0)?.visibility;
    Ok(outcome(
        sum_err <= 1e-12 && worst_offset <= h && !minus_maxima.is_empty() && v_plus >= 0.99 && det.distinguishability() == 1.0,
        format!(
            "sum rule rel err {sum_err:.1e} (tol 1e-12); {} anti-fringe maxima within {worst_offset:.2e} of dark fringes (step {h:.2e}); plus visibility {v_plus:.6} at D = 1 (tol 0.99)",
            minus_maxima.len()
        ),
    ))
}

fn fringe_spacing_check() -> Result<Outcome> {
    let g = geom([20.0, 1000.0, 0.05, 2.0, 0.01, 100.0, 50.0]);
    let det = DetectorModel::from_polar(1.0, 0.0)?;
    let formula = fringe_spacing(&g)?;
    let p = exact_pattern(&g, &det, &fringe_grid(&g, 64.0)?)?;
    let measured = peak_separation(&p, 0.0)?;
    let rel = (measured / formula - 1.0).abs();

    // lambda D / (pi gamma^2) grows by 10 per step
    let mut limit = Vec::new();
    for ratio in [1.0, 10.0, 100.0, 1000.0] {
        let base = geom([20.0, 1000.0, 0.05, 0.5, 0.01, 100.0, 1e-9]);
        let target_d = ratio * PI * base.gamma_sq() / base.wavelength;
        let g = Geometry { l1: target_d, ..base };
        let classic = g.wavelength * g.total_path() / g.slit_separation();
        limit.push((fringe_spacing(&g)? / classic - 1.0).abs());
    }
    let approaching = limit.windows(2).all(|w| w[1] < w[0]) && *limit.last().unwrap() < 1e-5;
    let list: Vec<String> = limit.iter().map(|e| format!("{e:.1e}")).collect();
    Ok(outcome(
        rel <= 5e-3 && approaching,
        format!(
            "measured {measured:.6} vs formula {formula:.6}: rel {rel:.2e} (tol 5e-3); |formula/(lambda D/d) - 1| = [{}] for lambda D/(pi gamma^2) = 1..1e3",
            list.join(", ")
        ),
    ))
}

fn unitarity_and_structure() -> Result<Outcome> {
    let taus = [0.0, 0.01, 0.3, 1.0, 7.5, 40.0];
    let packet = GaussianPacket::normalized(0.4, C64::new(0.6, -0.2))?;
    let pair = make_epr(1.5, 12.0)?;
    let mut analytic: f64 = 0.0;
    for &t in &taus {
        let tau = EvolutionParam::new(t)?;
        analytic = analytic.max((packet.free_evolve(tau).norm_sq() - 1.0).abs());
        analytic = analytic.max((pair.free_evolve(tau).norm_sq() - 1.0).abs());
    }
    let sampled = sample_packet(&packet, 400.0, 1 << 15)?;
    let mut discrete: f64 = 0.0;
    for &t in &taus {
        let moved = momentum_space_propagate(&sampled, EvolutionParam::new(t)?)?;
        discrete = discrete.max((moved.norm_sq() / sampled.norm_sq() - 1.0).abs());
    }

    let g = geom([2.0, 50.0, 0.25, 1.0, 0.01, 100.0, 100.0 * PI]);
    let (phi_a, _) = slit_probes(&g)?;
    let at_slit = state_at_slit(&g)?;
    let source = Grid2D::from_fn([4.0, 40.0], [256, 4096], |z1, z2| at_slit.evaluate(z1, z2))?;
    let projected = quadrature_project(&source, &phi_a)?;
    let (fit_gamma, fit_center) = fit_gaussian(&projected.points(), projected.samples());
    let gamma = gamma_param(&g, true)?;
    let center = slit_image_center(&g, true)?;
    let structure = ((fit_gamma - gamma).norm() / gamma.norm()).max((fit_center - center).abs() / center.abs());
    Ok(outcome(
        analytic <= 1e-12 && discrete <= 1e-12 && structure <= 1e-8,
        format!(
            "analytic norm drift {analytic:.1e}, discrete {discrete:.1e} (tol 1e-12); Gamma and z0' vs quadrature {structure:.1e} (tol 1e-8)"
        ),
    ))
}

/// Width parameter and centre of a sampled Gaussian from the exact quadratic
/// through `log psi` at three points around its peak.
fn fit_gaussian(z: &[f64], psi: &[C64]) -> (C64, f64) {
    let peak = (0..psi.len()).max_by(|&a, &b| psi[a].norm().total_cmp(&psi[b].norm())).unwrap();
    let step = psi.len() / 64;
    let (i0, i1, i2) = (peak - step, peak, peak + step);
    let h = z[i1] - z[i0];
    let (l0, l1, l2) = (psi[i0].ln(), psi[i1].ln(), psi[i2].ln());
    // unwrap the phase of the outer points relative to the centre
    let unwrap = |l: C64| {
        let turns = ((l.im - l1.im) / (2.0 * PI)).round();
        C64::new(l.re, l.im - 2.0 * PI * turns)
    };
    let (l0, l2) = (unwrap(l0), unwrap(l2));
    let a = -(l0 - 2.0 * l1 + l2) / (2.0 * h * h);
    let b = (l2 - l0) / (2.0 * h) + 2.0 * a * z[i1];
    (1.0 / a, b.re / (2.0 * a.re))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Result<Outcome>); 7] = [
        ("1 oracle equivalence", oracle_equivalence),
        ("2 regime convergence", regime_convergence),
        ("3 nonlocal duality", duality),
        ("4 visibility formula", visibility_formula),
        ("5 quantum eraser", eraser),
        ("6 fringe spacing", fringe_spacing_check),
        ("7 unitarity and structure", unitarity_and_structure),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let start = Instant::now();
        let result = run().unwrap_or_else(|e| outcome(false, format!("error: {e}")));
        let secs = start.elapsed().as_secs_f64();
        if !result.pass {
            failed += 1;
        }
        println!(
            "[{}] {name}: {} [{secs:.1} s]",
            if result.pass { "PASS" } else { "FAIL" },
            result.detail
        );
    }
    println!("acceptance: {} of 7 criteria passed", 7 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
