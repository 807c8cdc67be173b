//! Simulation driver: stepping loop, event detection, snapshots and time series.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::closures::Amplitude;
use crate::curve::{Curve, SLOPE_TOL};
use crate::diagnostics::{negative_runs, sobolev_norm, sobolev_norm_open};
use crate::error::{Result, TurnwaveError};
use crate::spectral;
use crate::stepping::{advance, rates, Problem, Rates, SimState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EventKind {
    Turning,
    RTSignChange,
    ArcChordFailure,
    GraphBlowup,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub t: f64,
    pub kind: EventKind,
    pub payload: Value,
}

/// Events in nondecreasing time order.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EventLog {
    pub events: Vec<Event>,
}

impl EventLog {
    pub fn push(&mut self, e: Event) {
        let pos = self.events.partition_point(|x| x.t <= e.t);
        self.events.insert(pos, e);
    }

    pub fn first(&self, kind: EventKind) -> Option<&Event> {
        self.events.iter().find(|e| e.kind == kind)
    }

    pub fn extend(&mut self, other: EventLog) {
        for e in other.events {
            self.push(e);
        }
    }
}

/// One row of `diagnostics.csv`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagRow {
    pub t: f64,
    pub min_slope: f64,
    pub sup_f: f64,
    pub sigma_min: f64,
    pub h4_norm: f64,
    pub mean_f: f64,
    pub t_star: Option<f64>,
    pub graph_slope: f64,
    /// Cosine amplitude `2 Re c_k / N` of a probed Fourier mode of `z2`, if requested.
    pub mode_amp: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct Snapshot {
    pub index: usize,
    pub t: f64,
    pub curve: Curve,
    pub omega: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StopConditions {
    pub stop_on_turning: bool,
    /// Real-space Muskat is untrusted past the sign change; stop by default.
    pub stop_on_rt_sign_change: bool,
    pub rt_min_nodes: usize,
    /// Threshold on `sup |f_x|` recorded as a graph blow-up event.
    pub blowup_threshold: f64,
    pub check_arc_chord: bool,
}

impl Default for StopConditions {
    fn default() -> Self {
        Self {
            stop_on_turning: false,
            stop_on_rt_sign_change: true,
            rt_min_nodes: 3,
            blowup_threshold: 1e3,
            check_arc_chord: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunOptions {
    pub t_end: f64,
    pub dt: f64,
    /// Snapshot every this many accepted steps (0 disables periodic snapshots).
    pub snapshot_every: usize,
    pub stop: StopConditions,
    /// Fourier mode of `z2` to log in the `mode_amp` column.
    pub mode_probe: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub snapshots: Vec<Snapshot>,
    pub diagnostics: Vec<DiagRow>,
    pub final_state: SimState,
    /// State interpolated to the turning time, when a turning event fired.
    pub turning_state: Option<SimState>,
}

#[derive(Debug)]
pub struct RunOutput {
    pub trajectory: Trajectory,
    pub events: EventLog,
}

/// Error with the partial trajectory up to the last valid state.
#[derive(Debug)]
pub struct RunFailure {
    pub error: TurnwaveError,
    pub partial: RunOutput,
}

/// Cubic Hermite interpolation of the state between two accepted steps.
struct Hermite<'a> {
    s0: &'a SimState,
    s1: &'a SimState,
    k0: &'a Rates,
    k1: &'a Rates,
}

impl Hermite<'_> {
    fn at(&self, t: f64) -> Result<SimState> {
        let dt = self.s1.t - self.s0.t;
        let th = (t - self.s0.t) / dt;
        let h00 = 2.0 * th.powi(3) - 3.0 * th.powi(2) + 1.0;
        let h10 = th.powi(3) - 2.0 * th.powi(2) + th;
        let h01 = -2.0 * th.powi(3) + 3.0 * th.powi(2);
        let h11 = th.powi(3) - th.powi(2);
        let mix = |a: &[f64], b: &[f64], fa: &[f64], fb: &[f64]| -> Vec<f64> {
            (0..a.len()).map(|i| h00 * a[i] + h10 * dt * fa[i] + h01 * b[i] + h11 * dt * fb[i]).collect()
        };
        let c0 = &self.s0.curve;
        let c1 = &self.s1.curve;
        let curve = c0.with_values(mix(&c0.z1, &c1.z1, &self.k0.z1, &self.k1.z1), mix(&c0.z2, &c1.z2, &self.k0.z2, &self.k1.z2))?;
        let omega = match (&self.s0.omega, &self.s1.omega, &self.k0.omega, &self.k1.omega) {
            (Some(a), Some(b), Some(fa), Some(fb)) => Some(Amplitude::new(mix(&a.omega, &b.omega, fa, fb))),
            _ => None,
        };
        Ok(SimState { curve, omega, t, ..self.s0.clone() })
    }

    /// Bisection for the first time `g` becomes nonpositive, given `g(s0) > 0 >= g(s1)`.
    fn bisect(&self, g: impl Fn(&SimState) -> Result<f64>) -> Result<SimState> {
        let mut lo = self.s0.t;
        let mut hi = self.s1.t;
        let mut hi_state = self.s1.clone();
        for _ in 0..80 {
            if hi - lo <= 1e-14 * hi.abs().max(1.0) {
                break;
            }
            let mid = 0.5 * (lo + hi);
            let s = self.at(mid)?;
            if g(&s)? > 0.0 {
                lo = mid;
            } else {
                hi = mid;
                hi_state = s;
            }
        }
        Ok(hi_state)
    }
}

fn sigma_sign_factor(state: &SimState) -> f64 {
    let d = state.consts.rho2 - state.consts.rho1;
    if d == 0.0 {
        1.0
    } else {
        d
    }
}

pub(crate) fn diag_row(state: &SimState, t_star: Option<f64>, opts: &RunOptions) -> Result<DiagRow> {
    let c = &state.curve;
    let slope = c.min_slope()?;
    if opts.stop.check_arc_chord {
        // errors with SelfIntersection, which the driver turns into an event
        c.arc_chord()?;
    }
    let sup_f = c.z2.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let (d1, _) = c.derivative(1)?;
    let mean_f;
    let h4;
    if c.is_periodic() {
        let n = c.len() as f64;
        mean_f = c.z2.iter().zip(&d1).map(|(a, b)| a * b).sum::<f64>() / n;
        h4 = sobolev_norm(&c.z2, 4)?;
    } else {
        let g = c.open_grid().expect("open grid");
        mean_f = c.z2.iter().zip(&d1).zip(&g.weights).map(|((a, b), w)| a * b * w).sum();
        h4 = sobolev_norm_open(g, &c.z2, 4)?;
    }
    let mode_amp = match opts.mode_probe {
        Some(k) if c.is_periodic() => {
            let coef = spectral::fft_real(&c.z2);
            Some(2.0 * coef[k].re / c.len() as f64)
        }
        _ => None,
    };
    Ok(DiagRow {
        t: state.t,
        min_slope: slope.min_slope,
        sup_f,
        sigma_min: sigma_sign_factor(state) * slope.min_slope,
        h4_norm: h4,
        mean_f,
        t_star,
        graph_slope: c.graph_slope_sup()?,
        mode_amp,
    })
}

fn rt_run(state: &SimState, min_nodes: usize) -> Result<Option<(usize, f64, f64, f64)>> {
    let (d1, _) = state.curve.derivative(1)?;
    let f = sigma_sign_factor(state);
    let sigma: Vec<f64> = d1.iter().map(|v| f * v).collect();
    let runs = negative_runs(&sigma, state.curve.is_periodic());
    let alpha = state.curve.alpha();
    Ok(runs
        .into_iter()
        .filter(|(_, len)| *len >= min_nodes)
        .max_by_key(|(_, len)| *len)
        .map(|(start, len)| {
            let n = alpha.len();
            let end = (start + len - 1) % n;
            let min = (0..len).map(|k| sigma[(start + k) % n]).fold(f64::INFINITY, f64::min);
            (len, alpha[start], alpha[end], min)
        }))
}

/// Advance until `t_end` or a stop condition, detecting events along the way.
pub fn run(initial: SimState, opts: &RunOptions) -> std::result::Result<RunOutput, Box<RunFailure>> {
    let mut events = EventLog::default();
    let mut snapshots = Vec::new();
    let mut diagnostics = Vec::new();
    let mut turning_state = None;
    let mut t_star: Option<f64> = None;

    let fail = |error: TurnwaveError,
                state: SimState,
                snapshots: Vec<Snapshot>,
                diagnostics: Vec<DiagRow>,
                turning_state: Option<SimState>,
                mut events: EventLog| {
        if let TurnwaveError::SelfIntersection { i, j } = &error {
            events.push(Event {
                t: state.t,
                kind: EventKind::ArcChordFailure,
                payload: json!({"node_i": i, "node_j": j}),
            });
        }
        Box::new(RunFailure {
            error,
            partial: RunOutput {
                trajectory: Trajectory { snapshots, diagnostics, final_state: state, turning_state },
                events,
            },
        })
    };

    if !(opts.dt > 0.0) || !(opts.t_end >= initial.t) {
        let e = TurnwaveError::InvalidArgument(format!("bad run window dt={} t_end={}", opts.dt, opts.t_end));
        return Err(fail(e, initial, snapshots, diagnostics, None, events));
    }

    let mut state = initial;
    let push_snapshot = |snapshots: &mut Vec<Snapshot>, s: &SimState| {
        let index = snapshots.len();
        snapshots.push(Snapshot {
            index,
            t: s.t,
            curve: s.curve.clone(),
            omega: s.omega.as_ref().map(|w| w.omega.clone()),
        });
    };
    push_snapshot(&mut snapshots, &state);
    match diag_row(&state, None, opts) {
        Ok(r) => diagnostics.push(r),
        Err(e) => return Err(fail(e, state, snapshots, diagnostics, None, events)),
    }
    let mut prev_slope = diagnostics[0].min_slope;
    let mut prev_graph = diagnostics[0].graph_slope;
    let mut k_curr = match rates(&state) {
        Ok(k) => k,
        Err(e) => return Err(fail(e, state, snapshots, diagnostics, None, events)),
    };
    let is_muskat = !matches!(state.problem, Problem::WaterWaves);
    let mut step = 0usize;
    let mut rt_seen = false;
    let mut blowup_seen = prev_graph > opts.stop.blowup_threshold;

    while state.t < opts.t_end - 1e-12 * opts.dt {
        let dt = opts.dt.min(opts.t_end - state.t);
        let (next, k0) = match advance(&state, dt, Some(k_curr.clone())) {
            Ok(v) => v,
            Err(e) => return Err(fail(e, state, snapshots, diagnostics, turning_state, events)),
        };
        let k_next = match rates(&next) {
            Ok(k) => k,
            Err(e) => return Err(fail(e, next, snapshots, diagnostics, turning_state, events)),
        };
        step += 1;
        let row = match diag_row(&next, t_star, opts) {
            Ok(r) => r,
            Err(e) => return Err(fail(e, next, snapshots, diagnostics, turning_state, events)),
        };
        let herm = Hermite { s0: &state, s1: &next, k0: &k0, k1: &k_next };

        if !blowup_seen && row.graph_slope > opts.stop.blowup_threshold {
            blowup_seen = true;
            let thr = opts.stop.blowup_threshold;
            let located = if prev_graph.is_finite() && prev_graph <= thr {
                herm.bisect(|s| Ok(thr - s.curve.graph_slope_sup()?))
            } else {
                Ok(next.clone())
            };
            match located {
                Ok(s) => events.push(Event {
                    t: s.t,
                    kind: EventKind::GraphBlowup,
                    payload: json!({"threshold": thr, "graph_slope_before": prev_graph}),
                }),
                Err(e) => return Err(fail(e, next, snapshots, diagnostics, turning_state, events)),
            }
        }

        let mut stop = false;
        if t_star.is_none() && prev_slope > SLOPE_TOL && row.min_slope <= SLOPE_TOL {
            let located = herm.bisect(|s| Ok(s.curve.min_slope()?.min_slope - SLOPE_TOL));
            let ts = match located {
                Ok(s) => s,
                Err(e) => return Err(fail(e, next, snapshots, diagnostics, turning_state, events)),
            };
            let rep = ts.curve.min_slope().expect("slope at turning");
            let before = herm.at(ts.t - 1e-6 * dt).and_then(|s| s.curve.graph_slope_sup()).unwrap_or(f64::NAN);
            t_star = Some(ts.t);
            events.push(Event {
                t: ts.t,
                kind: EventKind::Turning,
                payload: json!({
                    "min_slope": rep.min_slope,
                    "argmin_alpha": rep.argmin_alpha,
                    "graph_slope_just_before": before,
                    "step": step,
                }),
            });
            push_snapshot(&mut snapshots, &ts);
            turning_state = Some(ts);
            if opts.stop.stop_on_turning {
                stop = true;
            }
        }
        let mut row = row;
        row.t_star = t_star;

        if is_muskat && !rt_seen {
            match rt_run(&next, opts.stop.rt_min_nodes) {
                Ok(Some((len, lo, hi, min))) => {
                    rt_seen = true;
                    events.push(Event {
                        t: next.t,
                        kind: EventKind::RTSignChange,
                        payload: json!({"nodes": len, "alpha_lo": lo, "alpha_hi": hi, "min_sigma": min, "source": "real"}),
                    });
                    if opts.stop.stop_on_rt_sign_change {
                        stop = true;
                    }
                }
                Ok(None) => {}
                Err(e) => return Err(fail(e, next, snapshots, diagnostics, turning_state, events)),
            }
        }

        prev_slope = row.min_slope;
        prev_graph = row.graph_slope;
        diagnostics.push(row);
        state = next;
        k_curr = k_next;
        let last = stop || state.t >= opts.t_end - 1e-12 * opts.dt;
        if (opts.snapshot_every > 0 && step % opts.snapshot_every == 0) || last {
            push_snapshot(&mut snapshots, &state);
        }
        if stop {
            break;
        }
    }
    snapshots.sort_by(|a, b| a.t.total_cmp(&b.t));
    snapshots.dedup_by(|a, b| a.t == b.t);
    for (i, s) in snapshots.iter_mut().enumerate() {
        s.index = i;
    }
    Ok(RunOutput {
        trajectory: Trajectory { snapshots, diagnostics, final_state: state, turning_state },
        events,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closures::PhysicalConstants;

    #[test]
    fn stable_graph_has_no_events() {
        let c = Curve::periodic_from_fn(64, |a| (a, 0.1 * a.cos() + 0.05 * (3.0 * a).sin())).unwrap();
        let s = SimState::muskat_periodic(c, PhysicalConstants::default(), 1e-12);
        let opts = RunOptions { t_end: 0.1, dt: 1e-2, snapshot_every: 5, stop: Default::default(), mode_probe: Some(1) };
        let out = run(s, &opts).unwrap();
        assert!(out.events.events.is_empty());
        assert_eq!(out.trajectory.snapshots.len(), 3);
        assert!((out.trajectory.final_state.t - 0.1).abs() < 1e-14);
    }

    #[test]
    fn event_log_stays_ordered() {
        let mut log = EventLog::default();
        for t in [0.3, 0.1, 0.2] {
            log.push(Event { t, kind: EventKind::Turning, payload: Value::Null });
        }
        let ts: Vec<f64> = log.events.iter().map(|e| e.t).collect();
        assert_eq!(ts, vec![0.1, 0.2, 0.3]);
    }
}
