//! Flat `section.key = value` configuration with per-scenario defaults.

use std::fmt::{self, Write as _};
use std::path::PathBuf;
use std::str::FromStr;

use serde::Serialize;

use crate::closures::{ClosureSolver, GravityConvention, PhysicalConstants};
use crate::continuation::ShrinkSchedule;
use crate::diagnostics::{HbarForm, WeightParams};
use crate::error::{Result, TurnwaveError};
use crate::initial_data::{PeriodicTurningParams, TurningParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    MuskatLinear,
    MuskatTurning,
    MuskatBreakdown,
    WaterwaveLinear,
    WaterwaveTurning,
    CkCompare,
    RtVerify,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 7] = [
        ScenarioKind::MuskatLinear,
        ScenarioKind::MuskatTurning,
        ScenarioKind::MuskatBreakdown,
        ScenarioKind::WaterwaveLinear,
        ScenarioKind::WaterwaveTurning,
        ScenarioKind::CkCompare,
        ScenarioKind::RtVerify,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::MuskatLinear => "muskat-linear",
            ScenarioKind::MuskatTurning => "muskat-turning",
            ScenarioKind::MuskatBreakdown => "muskat-breakdown",
            ScenarioKind::WaterwaveLinear => "waterwave-linear",
            ScenarioKind::WaterwaveTurning => "waterwave-turning",
            ScenarioKind::CkCompare => "ck-compare",
            ScenarioKind::RtVerify => "rt-verify",
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScenarioKind {
    type Err = TurnwaveError;

    fn from_str(s: &str) -> Result<Self> {
        ScenarioKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| TurnwaveError::Config(format!("unknown scenario '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridConfig {
    /// Node count (periodic) or interval count (open).
    pub n: usize,
    pub periodic: bool,
    pub l: f64,
    pub kappa: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NumericsConfig {
    pub dt: f64,
    pub t_end: f64,
    pub filter_threshold: f64,
    pub snapshot_cadence: usize,
    pub blowup_threshold: f64,
    pub stop_on_turning: bool,
    pub stop_on_rt_sign_change: bool,
    pub solver: ClosureSolver,
    pub gravity: GravityConvention,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TurningConfig {
    pub open: TurningParams,
    pub periodic: PeriodicTurningParams,
    /// Backward offset of the graph datum from the turning curve.
    pub delta: f64,
    /// `H^4` size of the seeded perturbation (0 disables it).
    pub perturb_eps: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinearConfig {
    pub mode: usize,
    pub amplitude: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StripConfig {
    pub r0: f64,
    /// Time panels of the successive approximations.
    pub m: usize,
    /// Horizon of the successive approximations.
    pub t: f64,
    pub shrink: ShrinkSchedule,
    pub tol: f64,
    pub max_iter: usize,
    pub k: u32,
    pub arc_chord_floor: f64,
    pub tail_tol: f64,
    pub filter: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RtConfig {
    pub k_const: f64,
}

/// Everything a scenario run needs. Every key has a default.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioConfig {
    pub scenario: ScenarioKind,
    pub grid: GridConfig,
    pub physics: PhysicalConstants,
    pub turning: TurningConfig,
    pub numerics: NumericsConfig,
    pub linear: LinearConfig,
    pub strip: StripConfig,
    pub weights: WeightParams,
    pub rt: RtConfig,
    pub seed: u64,
    pub output_dir: PathBuf,
}

impl ScenarioConfig {
    /// Defaults tuned so each scenario finishes in well under five minutes.
    pub fn defaults(scenario: ScenarioKind) -> Self {
        let mut c = ScenarioConfig {
            scenario,
            grid: GridConfig { n: 256, periodic: true, l: 40.0, kappa: 5.0 },
            physics: PhysicalConstants::default(),
            turning: TurningConfig {
                open: TurningParams::default(),
                periodic: PeriodicTurningParams::default(),
                delta: 0.05,
                perturb_eps: 0.0,
            },
            numerics: NumericsConfig {
                dt: 1e-3,
                t_end: 0.1,
                filter_threshold: 1e-12,
                snapshot_cadence: 10,
                blowup_threshold: 1e3,
                stop_on_turning: false,
                stop_on_rt_sign_change: true,
                solver: ClosureSolver::Auto,
                gravity: GravityConvention::Dispersive,
            },
            linear: LinearConfig { mode: 2, amplitude: 1e-4 },
            strip: StripConfig {
                r0: 0.1,
                m: 64,
                t: 0.01,
                shrink: ShrinkSchedule::Linear,
                tol: 1e-10,
                max_iter: 50,
                k: 4,
                arc_chord_floor: 0.05,
                tail_tol: crate::strip::TAIL_TOL,
                filter: 1e-12,
            },
            weights: WeightParams::default(),
            rt: RtConfig { k_const: 1.0 },
            seed: 0,
            output_dir: PathBuf::from(format!("out/{scenario}")),
        };
        match scenario {
            ScenarioKind::MuskatLinear => {
                c.grid.n = 128;
                c.numerics.dt = 1e-2;
                c.numerics.t_end = 1.0;
            }
            ScenarioKind::MuskatTurning => {
                c.grid.n = 512;
                c.grid.periodic = false;
            }
            ScenarioKind::MuskatBreakdown => {
                c.numerics.stop_on_turning = true;
            }
            ScenarioKind::WaterwaveLinear => {
                c.grid.n = 64;
                c.numerics.dt = 1e-2;
                c.numerics.t_end = 6.0;
            }
            ScenarioKind::WaterwaveTurning => {
                c.turning.periodic.b = 2.0;
                c.numerics.t_end = 0.08;
                c.numerics.stop_on_turning = true;
                c.numerics.snapshot_cadence = 5;
            }
            ScenarioKind::CkCompare => {
                c.linear = LinearConfig { mode: 1, amplitude: 0.05 };
                c.strip.t = 0.05;
                c.numerics.t_end = 0.05;
            }
            ScenarioKind::RtVerify => {
                c.numerics.t_end = c.weights.tau;
                c.numerics.snapshot_cadence = 1;
                c.numerics.stop_on_rt_sign_change = false;
            }
        }
        c
    }

    /// Parse a config file; `overrides` are applied after the file, in order.
    pub fn parse(text: &str, overrides: &[String]) -> Result<Self> {
        let mut pairs = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| TurnwaveError::Config(format!("line {}: expected 'key = value'", lineno + 1)))?;
            pairs.push((k.trim().to_string(), v.trim().to_string()));
        }
        for o in overrides {
            let (k, v) =
                o.split_once('=').ok_or_else(|| TurnwaveError::Config(format!("override '{o}' is not key=value")))?;
            pairs.push((k.trim().to_string(), v.trim().to_string()));
        }
        let kind = match pairs.iter().rev().find(|(k, _)| k == "scenario") {
            Some((_, v)) => v.parse()?,
            None => return Err(TurnwaveError::Config("missing key 'scenario'".into())),
        };
        let mut c = ScenarioConfig::defaults(kind);
        let mut t_end_set = false;
        for (k, v) in &pairs {
            c.set(k, v)?;
            t_end_set |= k == "numerics.t_end";
        }
        if kind == ScenarioKind::RtVerify && !t_end_set {
            c.numerics.t_end = c.weights.tau;
        }
        c.validate()?;
        Ok(c)
    }

    /// Apply one `key = value` assignment.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let bad = |what: &str| TurnwaveError::Config(format!("key '{key}': cannot parse '{value}' as {what}"));
        let f = || value.parse::<f64>().map_err(|_| bad("a number"));
        let u = || value.parse::<usize>().map_err(|_| bad("a nonnegative integer"));
        let b = || value.parse::<bool>().map_err(|_| bad("true/false"));
        match key {
            "scenario" => self.scenario = value.parse()?,
            "seed" => self.seed = value.parse().map_err(|_| bad("an integer"))?,
            "output_dir" => self.output_dir = PathBuf::from(value),

            "grid.n" => self.grid.n = u()?,
            "grid.periodic" => self.grid.periodic = b()?,
            "grid.l" => self.grid.l = f()?,
            "grid.kappa" => self.grid.kappa = f()?,

            "physics.rho1" => self.physics.rho1 = f()?,
            "physics.rho2" => self.physics.rho2 = f()?,
            "physics.g" => self.physics.g = f()?,
            "physics.mu" => self.physics.mu = f()?,
            "physics.kappa" => self.physics.kappa = f()?,

            "turning.beta1" => self.turning.open.beta1 = f()?,
            "turning.beta2" => self.turning.open.beta2 = f()?,
            "turning.beta3" => self.turning.open.beta3 = f()?,
            "turning.b" => self.turning.open.b = f()?,
            "turning.cbar" => self.turning.open.cbar = f()?,
            "turning.mollify_tau" => self.turning.open.mollify_tau = f()?,
            "turning.periodic_beta1" => self.turning.periodic.beta1 = f()?,
            "turning.periodic_b" => self.turning.periodic.b = f()?,
            "turning.delta" => self.turning.delta = f()?,
            "turning.perturb_eps" => self.turning.perturb_eps = f()?,

            "numerics.dt" => self.numerics.dt = f()?,
            "numerics.t_end" => self.numerics.t_end = f()?,
            "numerics.filter_threshold" => self.numerics.filter_threshold = f()?,
            "numerics.snapshot_cadence" => self.numerics.snapshot_cadence = u()?,
            "numerics.blowup_threshold" => self.numerics.blowup_threshold = f()?,
            "numerics.stop_on_turning" => self.numerics.stop_on_turning = b()?,
            "numerics.stop_on_rt_sign_change" => self.numerics.stop_on_rt_sign_change = b()?,
            "numerics.solver" => {
                self.numerics.solver = match value {
                    "picard" => ClosureSolver::Picard,
                    "dense" => ClosureSolver::Dense,
                    "auto" => ClosureSolver::Auto,
                    _ => return Err(bad("picard|dense|auto")),
                }
            }
            "numerics.gravity" => {
                self.numerics.gravity = match value {
                    "dispersive" => GravityConvention::Dispersive,
                    "printed" => GravityConvention::Printed,
                    _ => return Err(bad("dispersive|printed")),
                }
            }

            "linear.mode" => self.linear.mode = u()?,
            "linear.amplitude" => self.linear.amplitude = f()?,

            "strip.r0" => self.strip.r0 = f()?,
            "strip.m" => self.strip.m = u()?,
            "strip.t" => self.strip.t = f()?,
            "strip.shrink" => {
                self.strip.shrink = match value {
                    "linear" => ShrinkSchedule::Linear,
                    "exponential" => match self.strip.shrink {
                        ShrinkSchedule::Exponential { .. } => self.strip.shrink,
                        ShrinkSchedule::Linear => ShrinkSchedule::Exponential { gamma: 1.0, power: 4.0 },
                    },
                    _ => return Err(bad("linear|exponential")),
                }
            }
            "strip.gamma" | "strip.power" => {
                let v = f()?;
                let (mut gamma, mut power) = match self.strip.shrink {
                    ShrinkSchedule::Exponential { gamma, power } => (gamma, power),
                    ShrinkSchedule::Linear => (1.0, 4.0),
                };
                if key == "strip.gamma" {
                    gamma = v;
                } else {
                    power = v;
                }
                self.strip.shrink = ShrinkSchedule::Exponential { gamma, power };
            }
            "strip.tol" => self.strip.tol = f()?,
            "strip.max_iter" => self.strip.max_iter = u()?,
            "strip.k" => self.strip.k = value.parse().map_err(|_| bad("a nonnegative integer"))?,
            "strip.arc_chord_floor" => self.strip.arc_chord_floor = f()?,
            "strip.tail_tol" => self.strip.tail_tol = f()?,
            "strip.filter" => self.strip.filter = f()?,

            "weights.a" => self.weights.a = f()?,
            "weights.tau" => self.weights.tau = f()?,
            "weights.hbar_literal" => {
                self.weights.hbar = if b()? { HbarForm::Literal } else { HbarForm::Squared };
            }

            "rt.k_const" => self.rt.k_const = f()?,

            _ => return Err(TurnwaveError::Config(format!("unknown key '{key}'"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let err = |m: String| Err(TurnwaveError::Config(m));
        self.physics.validate()?;
        if self.grid.n < 8 || self.grid.n % 2 == 1 {
            return err(format!("grid.n = {} must be even and at least 8", self.grid.n));
        }
        if !(self.numerics.dt > 0.0) || !(self.numerics.t_end >= 0.0) {
            return err("numerics.dt must be positive and numerics.t_end nonnegative".into());
        }
        if !(self.numerics.filter_threshold >= 0.0) || !(self.strip.filter >= 0.0) {
            return err("filter thresholds must be nonnegative".into());
        }
        if !(self.grid.l > 0.0 && self.grid.kappa > 0.0) {
            return err("grid.l and grid.kappa must be positive".into());
        }
        if !(self.strip.r0 > 0.0 && self.strip.t > 0.0) || self.strip.m == 0 || self.strip.m % 2 == 1 {
            return err("strip.r0, strip.t must be positive and strip.m even".into());
        }
        if !(self.weights.a > 0.0 && self.weights.tau > 0.0) {
            return err("weights.a and weights.tau must be positive".into());
        }
        if self.turning.open.validate().is_err() {
            return err(format!("turning parameters rejected: {:?}", self.turning.open));
        }
        let needs_periodic = !matches!(self.scenario, ScenarioKind::MuskatTurning);
        if needs_periodic && !self.grid.periodic {
            return err(format!("scenario {} needs grid.periodic = true", self.scenario));
        }
        if matches!(self.scenario, ScenarioKind::MuskatLinear | ScenarioKind::WaterwaveLinear | ScenarioKind::CkCompare)
            && (self.linear.mode == 0 || self.linear.mode >= self.grid.n / 2)
        {
            return err(format!("linear.mode = {} must lie in 1..N/2", self.linear.mode));
        }
        Ok(())
    }

    /// Resolved configuration in the same flat syntax, one key per line.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        kv("scenario", self.scenario.to_string());
        kv("seed", self.seed.to_string());
        kv("output_dir", self.output_dir.display().to_string());
        kv("grid.n", self.grid.n.to_string());
        kv("grid.periodic", self.grid.periodic.to_string());
        kv("grid.l", self.grid.l.to_string());
        kv("grid.kappa", self.grid.kappa.to_string());
        kv("physics.rho1", self.physics.rho1.to_string());
        kv("physics.rho2", self.physics.rho2.to_string());
        kv("physics.g", self.physics.g.to_string());
        kv("physics.mu", self.physics.mu.to_string());
        kv("physics.kappa", self.physics.kappa.to_string());
        let t = &self.turning;
        kv("turning.beta1", t.open.beta1.to_string());
        kv("turning.beta2", t.open.beta2.to_string());
        kv("turning.beta3", t.open.beta3.to_string());
        kv("turning.b", t.open.b.to_string());
        kv("turning.cbar", t.open.cbar.to_string());
        kv("turning.mollify_tau", t.open.mollify_tau.to_string());
        kv("turning.periodic_beta1", t.periodic.beta1.to_string());
        kv("turning.periodic_b", t.periodic.b.to_string());
        kv("turning.delta", t.delta.to_string());
        kv("turning.perturb_eps", t.perturb_eps.to_string());
        let n = &self.numerics;
        kv("numerics.dt", n.dt.to_string());
        kv("numerics.t_end", n.t_end.to_string());
        kv("numerics.filter_threshold", n.filter_threshold.to_string());
        kv("numerics.snapshot_cadence", n.snapshot_cadence.to_string());
        kv("numerics.blowup_threshold", n.blowup_threshold.to_string());
        kv("numerics.stop_on_turning", n.stop_on_turning.to_string());
        kv("numerics.stop_on_rt_sign_change", n.stop_on_rt_sign_change.to_string());
        let solver = match n.solver {
            ClosureSolver::Picard => "picard",
            ClosureSolver::Dense => "dense",
            ClosureSolver::Auto => "auto",
        };
        kv("numerics.solver", solver.into());
        let gravity = match n.gravity {
            GravityConvention::Dispersive => "dispersive",
            GravityConvention::Printed => "printed",
        };
        kv("numerics.gravity", gravity.into());
        kv("linear.mode", self.linear.mode.to_string());
        kv("linear.amplitude", self.linear.amplitude.to_string());
        let st = &self.strip;
        kv("strip.r0", st.r0.to_string());
        kv("strip.m", st.m.to_string());
        kv("strip.t", st.t.to_string());
        match st.shrink {
            ShrinkSchedule::Linear => kv("strip.shrink", "linear".into()),
            ShrinkSchedule::Exponential { gamma, power } => {
                kv("strip.shrink", "exponential".into());
                kv("strip.gamma", gamma.to_string());
                kv("strip.power", power.to_string());
            }
        }
        kv("strip.tol", st.tol.to_string());
        kv("strip.max_iter", st.max_iter.to_string());
        kv("strip.k", st.k.to_string());
        kv("strip.arc_chord_floor", st.arc_chord_floor.to_string());
        kv("strip.tail_tol", st.tail_tol.to_string());
        kv("strip.filter", st.filter.to_string());
        kv("weights.a", self.weights.a.to_string());
        kv("weights.tau", self.weights.tau.to_string());
        kv("weights.hbar_literal", (self.weights.hbar == HbarForm::Literal).to_string());
        kv("rt.k_const", self.rt.k_const.to_string());
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_key_is_named() {
        let e = ScenarioConfig::parse("scenario = muskat-linear\nnumerics.dT = 0.1\n", &[]).unwrap_err();
        assert_eq!(e.exit_code(), 2);
        assert!(e.to_string().contains("numerics.dT"), "{e}");
        let e = ScenarioConfig::parse("scenario = muskat-linear\ndT = 0.1\n", &[]).unwrap_err();
        assert!(e.to_string().contains("'dT'"), "{e}");
    }

    #[test]
    fn overrides_win_and_roundtrip() {
        let c = ScenarioConfig::parse(
            "# comment\nscenario = muskat-turning\ngrid.n = 256  # trailing\n",
            &["grid.n=1024".into(), "strip.gamma=2".into()],
        )
        .unwrap();
        assert_eq!(c.grid.n, 1024);
        assert!(!c.grid.periodic);
        assert_eq!(c.strip.shrink, ShrinkSchedule::Exponential { gamma: 2.0, power: 4.0 });
        let again = ScenarioConfig::parse(&c.to_text(), &[]).unwrap();
        assert_eq!(again, c);
    }

    #[test]
    fn every_scenario_has_valid_defaults() {
        for k in ScenarioKind::ALL {
            ScenarioConfig::defaults(k).validate().unwrap();
            let text = ScenarioConfig::defaults(k).to_text();
            assert_eq!(ScenarioConfig::parse(&text, &[]).unwrap(), ScenarioConfig::defaults(k));
        }
    }

    #[test]
    fn bad_values_are_config_errors() {
        for bad in ["grid.n = many", "grid.n = 7", "numerics.solver = lu", "scenario = nope"] {
            let text = format!("scenario = muskat-linear\n{bad}\n");
            assert_eq!(ScenarioConfig::parse(&text, &[]).unwrap_err().exit_code(), 2, "{bad}");
        }
    }
}
