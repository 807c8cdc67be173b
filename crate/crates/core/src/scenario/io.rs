//! Artifact formats: curve snapshots, diagnostics table, events and reports.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::curve::{Curve, Grid};
use crate::driver::{DiagRow, EventLog};
use crate::error::{Result, TurnwaveError};

/// A curve snapshot as stored on disk.
#[derive(Debug, Clone)]
pub struct SnapshotFile {
    pub index: usize,
    pub t: f64,
    pub curve: Curve,
    pub omega: Option<Vec<f64>>,
}

pub fn snapshot_name(index: usize) -> String {
    format!("snap_{index:05}.csv")
}

/// `# topology=... t=... n=...` comment, then `alpha,z1,z2[,omega]` rows.
pub fn curve_csv(curve: &Curve, t: f64, omega: Option<&[f64]>) -> String {
    let mut s = String::with_capacity(80 * curve.len());
    match curve.open_grid() {
        Some(g) => {
            let _ = writeln!(s, "# topology=open t={t:?} n={} l={:?} kappa={:?}", g.n_intervals, g.l, g.kappa);
        }
        None => {
            let _ = writeln!(s, "# topology=periodic t={t:?} n={}", curve.len());
        }
    }
    s.push_str(if omega.is_some() { "alpha,z1,z2,omega\n" } else { "alpha,z1,z2\n" });
    for (i, a) in curve.alpha().iter().enumerate() {
        let _ = write!(s, "{a:?},{:?},{:?}", curve.z1[i], curve.z2[i]);
        if let Some(w) = omega {
            let _ = write!(s, ",{:?}", w[i]);
        }
        s.push('\n');
    }
    s
}

fn header_field<'a>(header: &'a str, key: &str) -> Option<&'a str> {
    header.split_whitespace().find_map(|tok| tok.strip_prefix(key).and_then(|r| r.strip_prefix('=')))
}

fn parse_f64(s: &str, what: &str) -> Result<f64> {
    s.trim().parse().map_err(|_| TurnwaveError::Missing(format!("cannot parse {what} '{s}'")))
}

/// Inverse of [`curve_csv`]; the grid is rebuilt from the header and checked against the `alpha` column.
pub fn parse_curve_csv(text: &str) -> Result<(f64, Curve, Option<Vec<f64>>)> {
    let mut lines = text.lines();
    let header = lines.next().filter(|l| l.starts_with('#')).ok_or_else(|| TurnwaveError::Missing("snapshot header".into()))?;
    let cols = lines.next().ok_or_else(|| TurnwaveError::Missing("snapshot column line".into()))?;
    let has_omega = match cols.trim() {
        "alpha,z1,z2" => false,
        "alpha,z1,z2,omega" => true,
        other => return Err(TurnwaveError::Missing(format!("unexpected snapshot columns '{other}'"))),
    };
    let field = |k: &str| header_field(header, k).ok_or_else(|| TurnwaveError::Missing(format!("header field '{k}'")));
    let t = parse_f64(field("t")?, "time")?;
    let n: usize = field("n")?.parse().map_err(|_| TurnwaveError::Missing("header n".into()))?;
    let grid = match field("topology")? {
        "periodic" => Grid::periodic(n),
        "open" => Grid::open(n, parse_f64(field("l")?, "l")?, parse_f64(field("kappa")?, "kappa")?)?,
        other => return Err(TurnwaveError::Missing(format!("unknown topology '{other}'"))),
    };
    let (mut z1, mut z2, mut om) = (Vec::new(), Vec::new(), Vec::new());
    for (i, line) in lines.enumerate() {
        let v: Vec<&str> = line.split(',').collect();
        if v.len() != if has_omega { 4 } else { 3 } {
            return Err(TurnwaveError::Missing(format!("malformed snapshot row {i}")));
        }
        let a = parse_f64(v[0], "alpha")?;
        let expect = grid.alpha().get(i).copied().unwrap_or(f64::NAN);
        if (a - expect).abs() > 1e-12 * (1.0 + expect.abs()) {
            return Err(TurnwaveError::Missing(format!("row {i}: alpha {a} does not match the grid")));
        }
        z1.push(parse_f64(v[1], "z1")?);
        z2.push(parse_f64(v[2], "z2")?);
        if has_omega {
            om.push(parse_f64(v[3], "omega")?);
        }
    }
    let curve = Curve::new(grid, z1, z2)?;
    Ok((t, curve, has_omega.then_some(om)))
}

pub fn write_snapshot(dir: &Path, index: usize, t: f64, curve: &Curve, omega: Option<&[f64]>) -> Result<PathBuf> {
    let path = dir.join(snapshot_name(index));
    fs::write(&path, curve_csv(curve, t, omega))?;
    Ok(path)
}

/// All `snap_*.csv` files of a directory, in index order.
pub fn read_snapshots(dir: &Path) -> Result<Vec<SnapshotFile>> {
    let mut names: Vec<(usize, PathBuf)> = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| TurnwaveError::Missing(format!("{}: {e}", dir.display())))? {
        let path = entry?.path();
        let Some(name) = path.file_name().and_then(|s| s.to_str()) else { continue };
        if let Some(idx) = name.strip_prefix("snap_").and_then(|r| r.strip_suffix(".csv")) {
            if let Ok(i) = idx.parse::<usize>() {
                names.push((i, path.clone()));
            }
        }
    }
    names.sort();
    if names.is_empty() {
        return Err(TurnwaveError::Missing(format!("no snapshots in {}", dir.display())));
    }
    names
        .into_iter()
        .map(|(index, p)| {
            let (t, curve, omega) = parse_curve_csv(&fs::read_to_string(&p)?)
                .map_err(|e| TurnwaveError::Missing(format!("{}: {e}", p.display())))?;
            Ok(SnapshotFile { index, t, curve, omega })
        })
        .collect()
}

pub const DIAG_HEADER: &str = "t,min_slope,sup_f,sigma_min,h4_norm,mean_f,t_star,graph_slope,mode_amp";

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:?}")).unwrap_or_default()
}

pub fn diagnostics_csv(rows: &[DiagRow]) -> String {
    let mut s = String::new();
    s.push_str(DIAG_HEADER);
    s.push('\n');
    for r in rows {
        let _ = writeln!(
            s,
            "{:?},{:?},{:?},{:?},{:?},{:?},{},{:?},{}",
            r.t,
            r.min_slope,
            r.sup_f,
            r.sigma_min,
            r.h4_norm,
            r.mean_f,
            opt(r.t_star),
            r.graph_slope,
            opt(r.mode_amp)
        );
    }
    s
}

pub fn parse_diagnostics_csv(text: &str) -> Result<Vec<DiagRow>> {
    let mut lines = text.lines();
    if lines.next().map(str::trim) != Some(DIAG_HEADER) {
        return Err(TurnwaveError::Missing("diagnostics.csv header".into()));
    }
    let num = |s: &str| -> Result<f64> {
        match s {
            "inf" => Ok(f64::INFINITY),
            "-inf" => Ok(f64::NEG_INFINITY),
            "NaN" => Ok(f64::NAN),
            _ => parse_f64(s, "diagnostic"),
        }
    };
    let optn = |s: &str| -> Result<Option<f64>> { if s.is_empty() { Ok(None) } else { num(s).map(Some) } };
    lines
        .map(|line| {
            let v: Vec<&str> = line.split(',').collect();
            if v.len() != 9 {
                return Err(TurnwaveError::Missing(format!("malformed diagnostics row '{line}'")));
            }
            Ok(DiagRow {
                t: num(v[0])?,
                min_slope: num(v[1])?,
                sup_f: num(v[2])?,
                sigma_min: num(v[3])?,
                h4_norm: num(v[4])?,
                mean_f: num(v[5])?,
                t_star: optn(v[6])?,
                graph_slope: num(v[7])?,
                mode_amp: optn(v[8])?,
            })
        })
        .collect()
}

/// `events.json`: a JSON array of `{t, kind, payload}`.
pub fn events_json(log: &EventLog) -> Result<String> {
    Ok(serde_json::to_string_pretty(&log.events)? + "\n")
}

pub fn parse_events_json(text: &str) -> Result<EventLog> {
    Ok(EventLog { events: serde_json::from_str(text)? })
}

/// Pretty JSON with NaN and infinities mapped to `null`.
pub fn json_string<T: serde::Serialize>(v: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::driver::{Event, EventKind};

    #[test]
    fn periodic_snapshot_roundtrips_exactly() {
        let c = Curve::periodic_from_fn(32, |a| (a + 0.1 * a.sin(), (2.0 * a).cos() / 3.0)).unwrap();
        let w: Vec<f64> = (0..32).map(|i| i as f64 * 0.1).collect();
        let text = curve_csv(&c, 0.125, Some(&w));
        assert!(text.starts_with("# topology=periodic"));
        let (t, back, om) = parse_curve_csv(&text).unwrap();
        assert_eq!(t, 0.125);
        assert_eq!(back.z1, c.z1);
        assert_eq!(back.z2, c.z2);
        assert_eq!(om.unwrap(), w);
    }

    #[test]
    fn open_snapshot_roundtrips() {
        let g = Grid::open(64, 40.0, 5.0).unwrap();
        let c = Curve::open_from_fn(g, |a| (a, (-a * a).exp())).unwrap();
        let (_, back, om) = parse_curve_csv(&curve_csv(&c, 0.0, None)).unwrap();
        assert!(om.is_none());
        assert_eq!(back.z2, c.z2);
        assert!(back.open_grid().is_some());
    }

    #[test]
    fn diagnostics_roundtrip_with_gaps() {
        let r = DiagRow {
            t: 0.5,
            min_slope: 0.25,
            sup_f: f64::NAN,
            sigma_min: -1.0,
            h4_norm: 3.0,
            mean_f: 1e-17,
            t_star: None,
            graph_slope: f64::INFINITY,
            mode_amp: Some(1e-4),
        };
        let back = parse_diagnostics_csv(&diagnostics_csv(&[r])).unwrap();
        assert_eq!(back[0].t_star, None);
        assert!(back[0].sup_f.is_nan());
        assert_eq!(back[0].graph_slope, f64::INFINITY);
        assert_eq!(back[0].mode_amp, Some(1e-4));
    }

    #[test]
    fn events_are_a_json_array() {
        let mut log = EventLog::default();
        log.push(Event { t: 0.1, kind: EventKind::Turning, payload: serde_json::json!({"a": 1}) });
        let text = events_json(&log).unwrap();
        assert!(text.trim_start().starts_with('['));
        assert_eq!(parse_events_json(&text).unwrap(), log);
    }
}
