//! Artifact formatting: fixed number rendering, CSV tables and atomic writes.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::equilibrium::{Equilibrium, TatonnementResult};
use crate::scenarios::{HalvingReport, SweepResult};
use crate::var_lab::ImpulseResponse;

/// Shortest round-trip decimal rendering (at most 17 significant digits).
pub fn fmt_num(x: f64) -> String {
    if x.is_finite() {
        let mut buf = ryu::Buffer::new();
        let s = buf.format_finite(x);
        s.strip_suffix(".0").unwrap_or(s).to_string()
    } else if x.is_nan() {
        "NaN".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

fn csv_table(header: &[String], rows: &[Vec<String>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

fn names(cols: &[&str]) -> Vec<String> {
    cols.iter().map(|s| s.to_string()).collect()
}

pub fn equilibria_csv(equilibria: &[Equilibrium]) -> String {
    let header = names(&[
        "P_star", "H_star", "sigma_star", "residual", "slope_direct", "slope_indirect", "slope_total", "stability",
    ]);
    let rows: Vec<Vec<String>> = equilibria
        .iter()
        .map(|e| {
            vec![
                fmt_num(e.p_star),
                fmt_num(e.h_star),
                fmt_num(e.sigma_star),
                fmt_num(e.excess_residual),
                fmt_num(e.slope.direct),
                fmt_num(e.slope.indirect),
                fmt_num(e.slope.total),
                e.stability.as_str().to_string(),
            ]
        })
        .collect();
    csv_table(&header, &rows)
}

/// Flattened sweep table: `axis_value,n_equilibria,P_star_1,H_star_1,stability_1,...`
/// padded to the widest row. Invalid rows report `n_equilibria` as `invalid`.
pub fn sweep_csv(sweep: &SweepResult) -> String {
    let width = sweep.rows.iter().map(|r| r.equilibria.len()).max().unwrap_or(0);
    let mut header = names(&["axis_value", "n_equilibria"]);
    for i in 1..=width {
        header.push(format!("P_star_{i}"));
        header.push(format!("H_star_{i}"));
        header.push(format!("stability_{i}"));
    }
    let rows: Vec<Vec<String>> = sweep
        .rows
        .iter()
        .map(|r| {
            let mut row = vec![
                fmt_num(r.axis_value),
                if r.valid { r.equilibria.len().to_string() } else { "invalid".into() },
            ];
            for i in 0..width {
                match r.equilibria.get(i) {
                    Some(e) => {
                        row.push(fmt_num(e.p_star));
                        row.push(fmt_num(e.h_star));
                        row.push(e.stability.as_str().into());
                    }
                    None => row.extend([String::new(), String::new(), String::new()]),
                }
            }
            row
        })
        .collect();
    csv_table(&header, &rows)
}

pub fn halving_csv(r: &HalvingReport) -> String {
    let header = names(&["which", "P_star", "H_star", "sigma_star", "stability"]);
    let row = |label: &str, e: &Equilibrium| {
        vec![
            label.to_string(),
            fmt_num(e.p_star),
            fmt_num(e.h_star),
            fmt_num(e.sigma_star),
            e.stability.as_str().to_string(),
        ]
    };
    let delta = vec![
        "delta".to_string(),
        fmt_num(r.delta_p),
        fmt_num(r.delta_h),
        fmt_num(r.delta_sigma),
        String::new(),
    ];
    csv_table(&header, &[row("pre", &r.pre), row("post", &r.post), delta])
}

pub fn tatonnement_csv(r: &TatonnementResult) -> String {
    let rows: Vec<Vec<String>> = r
        .trajectory
        .iter()
        .map(|s| vec![s.iteration.to_string(), fmt_num(s.p), fmt_num(s.z)])
        .collect();
    csv_table(&names(&["iteration", "P", "Z"]), &rows)
}

pub fn irf_csv(irf: &ImpulseResponse) -> String {
    let rows: Vec<Vec<String>> = irf
        .horizons
        .iter()
        .zip(&irf.responses)
        .map(|(h, r)| vec![h.to_string(), fmt_num(r[0]), fmt_num(r[1]), fmt_num(r[2])])
        .collect();
    csv_table(&names(&["horizon", "resp_log_P", "resp_log_H", "resp_log_Phi"]), &rows)
}

/// Pretty JSON with the same number rendering as the CSV writers.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("artifact serializes");
    s.push('\n');
    s
}

/// Writes `contents` to `dir/name` through a temporary file in the same
/// directory, then renames it into place.
pub fn write_atomic(dir: &Path, name: &str, contents: &[u8]) -> std::io::Result<PathBuf> {
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.as_file().sync_all()?;
    let target = dir.join(name);
    tmp.persist(&target).map_err(|e| e.error)?;
    Ok(target)
}
