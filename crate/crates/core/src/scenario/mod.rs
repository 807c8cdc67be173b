//! Scenario orchestration: the canonical experiments, their artifacts and plots.
//!
//! A run writes into one directory:
//! `config.resolved`, `snap_<index>.csv`, `diagnostics.csv`, `events.json`,
//! `rt_report.json`, `summary.json`, `strip_<index>.csv` (strip scenarios)
//! and the plots `curves.svg`, `min_slope.svg`, `sigma_min.svg`.

pub mod config;
pub mod io;
pub mod svg;

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

pub use config::{ScenarioConfig, ScenarioKind};

use crate::closures::{Amplitude, PhysicalConstants, WaterWaveSettings};
use crate::continuation::{ck_solve, complex_arc_chord, CkOptions, CkTrajectory};
use crate::curve::{Curve, Grid};
use crate::diagnostics::{
    linear_waterwave_energy, negative_runs, sigma10_checklist, sigma_muskat, verify_weighted_rt, ChecklistTolerances,
    Sigma10Checklist, Sigma10Field, WeightedRtReport,
};
use crate::driver::{diag_row, run, DiagRow, Event, EventKind, EventLog, RunOptions, StopConditions, Trajectory};
use crate::error::{Result, TurnwaveError};
use crate::initial_data::{
    certify_open, certify_periodic, muskat_turning_datum, perturb_h4, turning_candidate_open,
    turning_candidate_periodic, waterwave_datum, TurningCertificate,
};
use crate::singular::birkhoff_rott;
use crate::spectral;
use crate::stepping::{advance, SimState};
use crate::strip::{extend_to_strip_with_tol, StripCurve};

/// Contents of `rt_report.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RtReportFile {
    pub min_sigma: f64,
    pub negative_intervals: Vec<(f64, f64)>,
    pub sigma10_checklist: Option<Sigma10Checklist>,
    pub weighted_rt: Option<WeightedRtReport>,
}

#[derive(Debug)]
pub struct ScenarioOutcome {
    pub dir: PathBuf,
    pub events: EventLog,
    pub summary: Value,
}

#[derive(Debug, Default)]
struct Artifacts {
    snapshots: Vec<(f64, Curve, Option<Vec<f64>>)>,
    diagnostics: Vec<DiagRow>,
    events: EventLog,
    strips: Vec<StripCurve>,
    rt_report: Option<RtReportFile>,
    summary: Map<String, Value>,
}

impl Artifacts {
    fn note(&mut self, key: &str, v: impl Serialize) {
        self.summary.insert(key.to_string(), serde_json::to_value(v).unwrap_or(Value::Null));
    }

    fn absorb(&mut self, traj: &Trajectory, events: EventLog) {
        for s in &traj.snapshots {
            self.snapshots.push((s.t, s.curve.clone(), s.omega.clone()));
        }
        self.diagnostics.extend(traj.diagnostics.iter().copied());
        self.events.extend(events);
    }

    /// Run the driver, keeping whatever it produced even on failure.
    fn drive(&mut self, state: SimState, opts: &RunOptions) -> Result<Trajectory> {
        match run(state, opts) {
            Ok(out) => {
                self.absorb(&out.trajectory, out.events);
                Ok(out.trajectory)
            }
            Err(f) => {
                let f = *f;
                self.absorb(&f.partial.trajectory, f.partial.events);
                Err(f.error)
            }
        }
    }

    /// Drop real-space output past `t`, where the strip solver takes over.
    fn truncate_after(&mut self, t: f64) {
        self.snapshots.retain(|s| s.0 <= t);
        self.diagnostics.retain(|r| r.t <= t);
    }
}

fn run_options(cfg: &ScenarioConfig) -> RunOptions {
    let n = &cfg.numerics;
    RunOptions {
        t_end: n.t_end,
        dt: n.dt,
        snapshot_every: n.snapshot_cadence,
        stop: StopConditions {
            stop_on_turning: n.stop_on_turning,
            stop_on_rt_sign_change: n.stop_on_rt_sign_change,
            rt_min_nodes: 3,
            blowup_threshold: n.blowup_threshold,
            check_arc_chord: true,
        },
        mode_probe: None,
    }
}

fn waterwave_settings(cfg: &ScenarioConfig) -> WaterWaveSettings {
    WaterWaveSettings { solver: cfg.numerics.solver, gravity: cfg.numerics.gravity, ..Default::default() }
}

fn ck_options(cfg: &ScenarioConfig) -> CkOptions {
    let s = &cfg.strip;
    CkOptions {
        r0: s.r0,
        t_final: s.t,
        schedule: s.shrink,
        panels: s.m,
        tol: s.tol,
        max_iter: s.max_iter,
        prefactor: cfg.physics.periodic_prefactor(),
        filter_threshold: s.filter,
        k: s.k,
        ..Default::default()
    }
}

fn perturbed(cfg: &ScenarioConfig, curve: Curve) -> Result<Curve> {
    if cfg.turning.perturb_eps > 0.0 {
        perturb_h4(&curve, cfg.turning.perturb_eps, cfg.seed)
    } else {
        Ok(curve)
    }
}

/// Execute the configured pipeline and write every artifact into `cfg.output_dir`.
///
/// On failure the artifacts gathered so far are still written, and the error is
/// returned with the scenario name attached.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<ScenarioOutcome> {
    cfg.validate()?;
    let dir = cfg.output_dir.clone();
    fs::create_dir_all(&dir)?;
    clear_artifacts(&dir)?;
    fs::write(dir.join("config.resolved"), cfg.to_text())?;

    let mut art = Artifacts::default();
    art.note("scenario", cfg.scenario.name());
    let res = match cfg.scenario {
        ScenarioKind::MuskatLinear => muskat_linear(cfg, &mut art),
        ScenarioKind::MuskatTurning => muskat_turning(cfg, &mut art),
        ScenarioKind::MuskatBreakdown => muskat_breakdown(cfg, &mut art),
        ScenarioKind::WaterwaveLinear => waterwave_linear(cfg, &mut art),
        ScenarioKind::WaterwaveTurning => waterwave_turning(cfg, &mut art),
        ScenarioKind::CkCompare => ck_compare(cfg, &mut art),
        ScenarioKind::RtVerify => rt_verify(cfg, &mut art),
    };
    let res = res.and_then(|_| {
        if art.rt_report.is_none() {
            art.rt_report = Some(rt_report(&art.snapshots, cfg, false)?);
        }
        Ok(())
    });
    match &res {
        Ok(()) => art.note("status", "ok"),
        Err(e) => art.note("status", format!("error: {e}")),
    }
    write_artifacts(&dir, &art)?;
    if !art.snapshots.is_empty() {
        render(&dir)?;
    }
    match res {
        Ok(()) => Ok(ScenarioOutcome { dir, events: art.events, summary: Value::Object(art.summary) }),
        Err(e) => Err(TurnwaveError::Scenario { scenario: cfg.scenario.name().into(), source: Box::new(e) }),
    }
}

fn clear_artifacts(dir: &Path) -> Result<()> {
    for entry in fs::read_dir(dir)? {
        let path = entry?.path();
        let name = path.file_name().and_then(|s| s.to_str()).unwrap_or("");
        let stale = (name.starts_with("snap_") || name.starts_with("strip_")) && name.ends_with(".csv");
        if stale {
            fs::remove_file(&path)?;
        }
    }
    Ok(())
}

fn write_artifacts(dir: &Path, art: &Artifacts) -> Result<()> {
    let mut snaps: Vec<&(f64, Curve, Option<Vec<f64>>)> = art.snapshots.iter().collect();
    snaps.sort_by(|a, b| a.0.total_cmp(&b.0));
    for (i, (t, c, w)) in snaps.into_iter().enumerate() {
        io::write_snapshot(dir, i, *t, c, w.as_deref())?;
    }
    fs::write(dir.join("diagnostics.csv"), io::diagnostics_csv(&art.diagnostics))?;
    fs::write(dir.join("events.json"), io::events_json(&art.events)?)?;
    if let Some(r) = &art.rt_report {
        fs::write(dir.join("rt_report.json"), io::json_string(r)?)?;
    }
    for (i, s) in art.strips.iter().enumerate() {
        fs::write(dir.join(format!("strip_{i:05}.csv")), s.to_csv())?;
    }
    fs::write(dir.join("summary.json"), io::json_string(&art.summary)?)?;
    Ok(())
}

/// `rt_report.json` contents from a trajectory; the checklist needs a run starting at the turning point.
fn rt_report(snaps: &[(f64, Curve, Option<Vec<f64>>)], cfg: &ScenarioConfig, checklist: bool) -> Result<RtReportFile> {
    let last = snaps.last().ok_or_else(|| TurnwaveError::Missing("no snapshots".into()))?;
    let rep = sigma_muskat(&last.1, &cfg.physics)?;
    let mut out =
        RtReportFile { min_sigma: rep.min_sigma, negative_intervals: rep.negative_intervals, sigma10_checklist: None, weighted_rt: None };
    if checklist {
        let curves: Vec<(f64, Curve)> = snaps.iter().map(|s| (s.0, s.1.clone())).collect();
        out.sigma10_checklist = Some(sigma10_checklist(&curves, &ChecklistTolerances::default())?);
        let field = Sigma10Field::from_curves(&curves)?;
        out.weighted_rt = Some(verify_weighted_rt(&field, &cfg.weights)?);
    }
    Ok(out)
}

/// Least-squares slope of `-ln |a(t)|`.
fn fit_decay_rate(rows: &[DiagRow]) -> Option<f64> {
    let pts: Vec<(f64, f64)> =
        rows.iter().filter_map(|r| r.mode_amp.filter(|a| *a > 0.0).map(|a| (r.t, -a.ln()))).collect();
    if pts.len() < 2 {
        return None;
    }
    let m = pts.len() as f64;
    let (mt, my) = (pts.iter().map(|p| p.0).sum::<f64>() / m, pts.iter().map(|p| p.1).sum::<f64>() / m);
    let sxy: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mt).powi(2)).sum();
    Some(sxy / sxx)
}

/// Angular frequency from the spacing of zero crossings of a standing-wave amplitude.
fn frequency_from_crossings(rows: &[DiagRow]) -> Option<f64> {
    let mut crossings = Vec::new();
    for w in rows.windows(2) {
        if let (Some(a), Some(b)) = (w[0].mode_amp, w[1].mode_amp) {
            if a > 0.0 && b <= 0.0 || a < 0.0 && b >= 0.0 {
                crossings.push(w[0].t + (w[1].t - w[0].t) * a / (a - b));
            }
        }
    }
    match crossings.len() {
        0 => None,
        1 => Some(0.5 * PI / (crossings[0] - rows[0].t)),
        n => Some(PI * (n - 1) as f64 / (crossings[n - 1] - crossings[0])),
    }
}

fn muskat_linear(cfg: &ScenarioConfig, art: &mut Artifacts) -> Result<()> {
    let (k, a) = (cfg.linear.mode, cfg.linear.amplitude);
    let c = Curve::periodic_from_fn(cfg.grid.n, |x| (x, a * (k as f64 * x).cos()))?;
    let state = SimState::muskat_periodic(c, cfg.physics, cfg.numerics.filter_threshold);
    let mut opts = run_options(cfg);
    opts.mode_probe = Some(k);
    let traj = art.drive(state, &opts)?;

    let theory = cfg.physics.muskat_strength() * k as f64 / 2.0;
    let measured = fit_decay_rate(&traj.diagnostics).ok_or_else(|| TurnwaveError::NoEvent("no decay samples".into()))?;
    let m0 = traj.diagnostics[0].mean_f;
    let span = (traj.final_state.t - traj.diagnostics[0].t).max(f64::MIN_POSITIVE);
    let mean_drift = traj.diagnostics.iter().map(|r| (r.mean_f - m0).abs()).fold(0.0, f64::max) / span;
    let sup: Vec<f64> = traj.snapshots.iter().map(|s| s.curve.z2.iter().fold(0.0_f64, |m, v| m.max(v.abs()))).collect();
    art.note("mode", k);
    art.note("rate_theory", theory);
    art.note("rate_measured", measured);
    art.note("rate_rel_error", ((measured - theory) / theory).abs());
    art.note("mean_drift_per_time", mean_drift);
    art.note("linf_nonincreasing", sup.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12)));
    Ok(())
}

fn muskat_turning(cfg: &ScenarioConfig, art: &mut Artifacts) -> Result<()> {
    let grid = Grid::open(cfg.grid.n, cfg.grid.l, cfg.grid.kappa)?;
    let star = turning_candidate_open(&cfg.turning.open, grid)?;
    let cert = certify_open(&star)?;
    art.note("certificate", cert);
    cert.require()?;
    let mut datum = muskat_turning_datum(&SimState::muskat_open(star, cfg.physics), cfg.turning.delta)?;
    datum.curve = perturbed(cfg, datum.curve)?;
    art.drive(datum, &run_options(cfg))?;
    let t_star = art.events.first(EventKind::Turning).map(|e| e.t);
    art.note("t_star", t_star);
    t_star.ok_or_else(|| TurnwaveError::NoEvent(format!("no turning before t_end = {}", cfg.numerics.t_end)))?;
    Ok(())
}

/// Largest run of at least three negative sigma nodes on a periodic curve.
fn negative_run_payload(curve: &Curve, consts: &PhysicalConstants) -> Result<Option<Value>> {
    let rep = sigma_muskat(curve, consts)?;
    let alpha = curve.alpha();
    let n = alpha.len();
    Ok(negative_runs(&rep.sigma, curve.is_periodic()).into_iter().filter(|r| r.1 >= 3).max_by_key(|r| r.1).map(
        |(start, len)| {
            let min = (0..len).map(|j| rep.sigma[(start + j) % n]).fold(f64::INFINITY, f64::min);
            json!({"nodes": len, "alpha_lo": alpha[start], "alpha_hi": alpha[(start + len - 1) % n], "min_sigma": min})
        },
    ))
}

fn ck_summary(art: &mut Artifacts, ck: &CkTrajectory) {
    art.note("ck_iterations", ck.iterations());
    art.note("ck_history", &ck.history);
    art.note("ck_ratios", ck.ratios());
    art.note("ck_noise_floor", ck.noise_floor);
    art.note("ck_final_radius", ck.radii.last().copied());
}

fn muskat_breakdown(cfg: &ScenarioConfig, art: &mut Artifacts) -> Result<()> {
    let star = turning_candidate_periodic(&cfg.turning.periodic, cfg.grid.n)?;
    let cert = certify_periodic(&star, cfg.physics.periodic_prefactor())?;
    art.note("certificate", cert);
    cert.require()?;
    let state = SimState::muskat_periodic(star, cfg.physics, cfg.numerics.filter_threshold);
    let mut datum = muskat_turning_datum(&state, cfg.turning.delta)?;
    datum.curve = perturbed(cfg, datum.curve)?;
    let mut opts = run_options(cfg);
    opts.stop.stop_on_turning = true;
    let traj = art.drive(datum, &opts)?;
    let ts = traj
        .turning_state
        .ok_or_else(|| TurnwaveError::NoEvent(format!("no turning before t_end = {}", cfg.numerics.t_end)))?;
    art.note("t_star", ts.t);
    art.truncate_after(ts.t);

    // hand off to the strip solver at the turning time
    let mut z0 = extend_to_strip_with_tol(&ts.curve, cfg.strip.r0, cfg.strip.tail_tol)?;
    z0.t = ts.t;
    let ck = ck_solve(&z0, &ck_options(cfg))?;
    ck_summary(art, &ck);
    let margin = complex_arc_chord(ck.last(), cfg.strip.arc_chord_floor);
    art.note("strip_arc_chord", margin);

    let every = (cfg.strip.m / 8).max(1);
    let mut found = false;
    for (j, s) in ck.curves.iter().enumerate().skip(1) {
        let real = s.real_curve()?;
        let st = SimState::muskat_periodic(real.clone(), cfg.physics, cfg.numerics.filter_threshold).with_time(s.t);
        art.diagnostics.push(diag_row(&st, Some(ts.t), &opts)?);
        if j % every == 0 || j == ck.curves.len() - 1 {
            art.snapshots.push((s.t, real.clone(), None));
            art.strips.push(s.clone());
        }
        if !found {
            if let Some(mut p) = negative_run_payload(&real, &cfg.physics)? {
                p["source"] = json!("strip");
                p["strip_half_width"] = json!(ck.radii[j]);
                art.events.push(Event { t: s.t, kind: EventKind::RTSignChange, payload: p });
                found = true;
            }
        }
    }
    art.note("rt_sign_change", found);
    if !found {
        return Err(TurnwaveError::NoEvent(format!("sigma stayed nonnegative up to t* + {}", cfg.strip.t)));
    }
    Ok(())
}

fn waterwave_linear(cfg: &ScenarioConfig, art: &mut Artifacts) -> Result<()> {
    let (k, a, n) = (cfg.linear.mode, cfg.linear.amplitude, cfg.grid.n);
    let c = Curve::periodic_from_fn(n, |x| (x, a * (k as f64 * x).cos()))?;
    let state = SimState::water_waves(
        c,
        Amplitude::new(vec![0.0; n]),
        cfg.physics,
        cfg.numerics.filter_threshold,
        waterwave_settings(cfg),
    );
    let mut opts = run_options(cfg);
    opts.mode_probe = Some(k);
    let traj = art.drive(state, &opts)?;

    let theory = (cfg.physics.g * k as f64).sqrt();
    let measured = frequency_from_crossings(&traj.diagnostics);
    art.note("mode", k);
    art.note("omega_theory", theory);
    art.note("omega_measured", measured);
    art.note("omega_rel_error", measured.map(|m| ((m - theory) / theory).abs()));
    let energies: Vec<f64> = traj
        .snapshots
        .iter()
        .filter_map(|s| s.omega.as_ref().map(|w| linear_waterwave_energy(&s.curve, w, cfg.physics.g)))
        .collect::<Result<_>>()?;
    if let Some(e0) = energies.first() {
        let drift = energies.iter().map(|e| (e - e0).abs()).fold(0.0, f64::max) / e0;
        let periods = (traj.final_state.t * theory / (2.0 * PI)).max(1e-300);
        art.note("energy_rel_drift", drift);
        art.note("energy_rel_drift_per_period", drift / periods.max(1.0));
    }
    Ok(())
}

/// `d/dalpha v1(0)` for the water-wave velocity with `omega = dz1/dalpha`.
fn waterwave_dv1(curve: &Curve) -> Result<f64> {
    let (d1, _) = curve.derivative(1)?;
    let v = birkhoff_rott(curve, &d1)?;
    Ok(spectral::derivative(&v.v1, 1)[curve.grid().origin_index()])
}

fn waterwave_turning(cfg: &ScenarioConfig, art: &mut Artifacts) -> Result<()> {
    let star = turning_candidate_periodic(&cfg.turning.periodic, cfg.grid.n)?;
    let cert = TurningCertificate::new(&star, waterwave_dv1(&star)?)?;
    art.note("certificate", cert);
    cert.require()?;
    let settings = waterwave_settings(cfg);
    let (dt, filter, delta) = (cfg.numerics.dt, cfg.numerics.filter_threshold, cfg.turning.delta);
    let (curve, omega) = waterwave_datum(&star, delta, &cfg.physics, &settings, dt, filter)?;
    let curve = perturbed(cfg, curve)?;
    let state = SimState::water_waves(curve, omega, cfg.physics, filter, settings);

    // forward over the same steps the datum was built with
    let steps = (delta / dt).ceil() as usize;
    let mut fwd = state.clone();
    for _ in 0..steps {
        fwd = advance(&fwd, delta / steps as f64, None)?.0;
    }
    let roundtrip = (0..star.len())
        .map(|j| (fwd.curve.z1[j] - star.z1[j]).hypot(fwd.curve.z2[j] - star.z2[j]))
        .fold(0.0, f64::max);
    art.note("roundtrip_error", roundtrip);
    art.note("datum_min_slope", state.curve.min_slope()?.min_slope);

    let traj = art.drive(state, &run_options(cfg))?;
    let turning = art.events.first(EventKind::Turning).cloned();
    let blowup = art.events.first(EventKind::GraphBlowup).map(|e| e.t);
    art.note("t_star", turning.as_ref().map(|e| e.t));
    art.note("graph_blowup_t", blowup);
    art.note("graph_slope_before_turning", turning.as_ref().map(|e| e.payload["graph_slope_just_before"].clone()));
    art.note("as_graph_fails_at_turning", traj.turning_state.as_ref().map(|s| s.curve.as_graph().is_err()));
    turning.ok_or_else(|| TurnwaveError::NoEvent(format!("no turning before t_end = {}", cfg.numerics.t_end)))?;
    Ok(())
}

fn ck_compare(cfg: &ScenarioConfig, art: &mut Artifacts) -> Result<()> {
    let (k, a) = (cfg.linear.mode as f64, cfg.linear.amplitude);
    let c = Curve::periodic_from_fn(cfg.grid.n, |x| (x, a * (k * x).cos() + 0.5 * a * ((k + 1.0) * x).sin()))?;
    let z0 = extend_to_strip_with_tol(&c, cfg.strip.r0, cfg.strip.tail_tol)?;
    let ck = ck_solve(&z0, &ck_options(cfg))?;
    ck_summary(art, &ck);

    // real-space reference landing exactly on the CK time nodes
    let node = cfg.strip.t / cfg.strip.m as f64;
    let sub = (node / cfg.numerics.dt).ceil().max(1.0) as usize;
    let mut opts = run_options(cfg);
    opts.dt = node / sub as f64;
    opts.t_end = cfg.strip.t;
    opts.snapshot_every = sub;
    let traj = art.drive(SimState::muskat_periodic(c, cfg.physics, cfg.numerics.filter_threshold), &opts)?;
    if traj.snapshots.len() != ck.curves.len() {
        return Err(TurnwaveError::Precondition(format!(
            "{} real-space snapshots for {} CK nodes",
            traj.snapshots.len(),
            ck.curves.len()
        )));
    }
    let mut dist: f64 = 0.0;
    let every = (cfg.strip.m / 8).max(1);
    for (j, (s, rk)) in ck.curves.iter().zip(&traj.snapshots).enumerate() {
        let real = s.real_curve()?;
        for i in 0..real.len() {
            dist = dist.max((real.z1[i] - rk.curve.z1[i]).hypot(real.z2[i] - rk.curve.z2[i]));
        }
        if j % every == 0 {
            art.strips.push(s.clone());
        }
    }
    art.note("max_node_distance", dist);
    let late = ck.ratios().iter().skip(2).cloned().fold(0.0, f64::max);
    art.note("max_ratio_after_iteration_3", late);
    Ok(())
}

fn rt_verify(cfg: &ScenarioConfig, art: &mut Artifacts) -> Result<()> {
    let star = turning_candidate_periodic(&cfg.turning.periodic, cfg.grid.n)?;
    let cert = certify_periodic(&star, cfg.physics.periodic_prefactor())?;
    art.note("certificate", cert);
    cert.require()?;
    let star = perturbed(cfg, star)?;
    art.note("weight_warnings", cfg.weights.warnings());
    art.note("h_nonnegative", cfg.weights.h_nonnegative());
    // time is measured from the turning point, which is the initial state here
    art.drive(SimState::muskat_periodic(star, cfg.physics, cfg.numerics.filter_threshold), &run_options(cfg))?;
    art.rt_report = Some(rt_report(&art.snapshots, cfg, true)?);
    Ok(())
}

fn load_config(dir: &Path) -> Result<Option<ScenarioConfig>> {
    let p = dir.join("config.resolved");
    if !p.exists() {
        return Ok(None);
    }
    ScenarioConfig::parse(&fs::read_to_string(p)?, &[]).map(Some)
}

/// Regenerate the SVG plots of a trajectory directory; returns the written paths.
pub fn render(dir: &Path) -> Result<Vec<PathBuf>> {
    let snaps = io::read_snapshots(dir)?;
    let consts = load_config(dir)?.map(|c| c.physics).unwrap_or_default();
    // at most twelve evenly spaced snapshots, always including the last
    let m = snaps.len();
    let pick: Vec<io::SnapshotFile> = if m <= 12 {
        snaps
    } else {
        let mut idx: Vec<usize> = (0..12).map(|i| i * (m - 1) / 11).collect();
        idx.dedup();
        idx.into_iter().map(|i| snaps[i].clone()).collect()
    };
    let mut out = Vec::new();
    let p = dir.join("curves.svg");
    fs::write(&p, svg::render_curves(&pick, &consts, "interface snapshots (red: sigma < 0)")?)?;
    out.push(p);
    let dpath = dir.join("diagnostics.csv");
    if dpath.exists() {
        let rows = io::parse_diagnostics_csv(&fs::read_to_string(&dpath)?)?;
        let t: Vec<f64> = rows.iter().map(|r| r.t).collect();
        let series: [(&str, Vec<f64>); 2] = [
            ("min_slope", rows.iter().map(|r| r.min_slope).collect()),
            ("sigma_min", rows.iter().map(|r| r.sigma_min).collect()),
        ];
        for (name, ys) in series {
            let p = dir.join(format!("{name}.svg"));
            fs::write(&p, svg::render_series(&format!("{name}(t)"), &t, &ys))?;
            out.push(p);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyCheck {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub checks: Vec<VerifyCheck>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    fn add(&mut self, name: &str, pass: bool, detail: String) {
        self.checks.push(VerifyCheck { name: name.into(), pass, detail });
    }
}

fn nondecreasing(ts: &[f64]) -> bool {
    ts.windows(2).all(|w| w[0] <= w[1])
}

/// Re-read a trajectory directory and check its internal consistency.
///
/// Recomputes the RT report from the snapshots and compares it with `rt_report.json`.
pub fn verify(dir: &Path) -> Result<VerifyReport> {
    let cfg = load_config(dir)?;
    let snaps = io::read_snapshots(dir)?;
    let events = io::parse_events_json(&fs::read_to_string(dir.join("events.json")).map_err(|e| {
        TurnwaveError::Missing(format!("{}/events.json: {e}", dir.display()))
    })?)?;
    let rows = io::parse_diagnostics_csv(&fs::read_to_string(dir.join("diagnostics.csv")).map_err(|e| {
        TurnwaveError::Missing(format!("{}/diagnostics.csv: {e}", dir.display()))
    })?)?;
    let mut rep = VerifyReport { checks: Vec::new() };

    let st: Vec<f64> = snaps.iter().map(|s| s.t).collect();
    rep.add("snapshot times nondecreasing", nondecreasing(&st), format!("{} snapshots", st.len()));
    let dt: Vec<f64> = rows.iter().map(|r| r.t).collect();
    rep.add("diagnostic times nondecreasing", nondecreasing(&dt), format!("{} rows", dt.len()));
    let et: Vec<f64> = events.events.iter().map(|e| e.t).collect();
    rep.add("event times nondecreasing", nondecreasing(&et), format!("{} events", et.len()));
    if let (Some(a), Some(b)) = (events.first(EventKind::Turning), events.first(EventKind::RTSignChange)) {
        rep.add("turning precedes RT sign change", a.t <= b.t, format!("t* = {}, t_rt = {}", a.t, b.t));
    }
    if let Some(e) = events.first(EventKind::Turning) {
        if let Some(s) = snaps.iter().find(|s| s.t == e.t) {
            let fails = s.curve.as_graph().is_err();
            rep.add("not a graph at the turning state", fails, format!("t* = {}", e.t));
        }
    }

    let cfg = cfg.unwrap_or_else(|| ScenarioConfig::defaults(ScenarioKind::MuskatBreakdown));
    let tuples: Vec<(f64, Curve, Option<Vec<f64>>)> = snaps.into_iter().map(|s| (s.t, s.curve, s.omega)).collect();
    let report_path = dir.join("rt_report.json");
    if report_path.exists() {
        let stored: RtReportFile = serde_json::from_str(&fs::read_to_string(&report_path)?)?;
        let checklist = stored.sigma10_checklist.is_some();
        match rt_report(&tuples, &cfg, checklist) {
            Ok(fresh) => {
                let same = fresh.negative_intervals == stored.negative_intervals
                    && close(fresh.min_sigma, stored.min_sigma)
                    && fresh.weighted_rt.map(|w| (w.hi_margin, w.hbari_margin))
                        == stored.weighted_rt.map(|w| (w.hi_margin, w.hbari_margin));
                rep.add("rt_report reproduces", same, format!("min_sigma {} vs {}", fresh.min_sigma, stored.min_sigma));
            }
            Err(e) => rep.add("rt_report reproduces", false, e.to_string()),
        }
    }
    Ok(rep)
}

fn close(a: f64, b: f64) -> bool {
    a == b || (a - b).abs() <= 1e-12 * a.abs().max(b.abs())
}

/// Read, apply overrides, and run a config file; `out` replaces `output_dir`.
pub fn run_config_file(path: &Path, overrides: &[String], out: Option<&Path>) -> Result<ScenarioOutcome> {
    let text = fs::read_to_string(path)
        .map_err(|e| TurnwaveError::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut cfg = ScenarioConfig::parse(&text, overrides)?;
    if let Some(o) = out {
        cfg.output_dir = o.to_path_buf();
    }
    run_scenario(&cfg)
}
