//! Curve CSV reader.
//!
//! ```text
//! # provenance: where the numbers came from
//! d_mm,pressure_mpa,force_n
//! 2.5,0.5,0
//! 2.5,1.0,35
//! ```
//!
//! The value column is `force_n` (pressing force) or `mmax_nm` (moment
//! capacity). A column named `value` needs a `value_kind` column holding
//! `force_n` or `mmax_nm` on every row; one plate gap cannot mix kinds.
//! Comment lines start with `#`. Rows may come in any order.

use std::path::Path;

use twistlock_core::curves::CurveSample;
use twistlock_core::units::{mm_to_m, mpa_to_pa};
use twistlock_core::{CurveError, CurveSet, ForceCurve, ValueKind};

/// The reconstructed plate-gap fixture shipped with the tool.
pub const BUNDLED_CURVES: &str = include_str!("../data/plate_gap_curves.csv");
pub const BUNDLED_LABEL: &str = "<bundled plate_gap_curves.csv>";

#[derive(Debug, thiserror::Error)]
pub enum CurveFileError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: no data rows")]
    Empty { path: String },
    #[error("{path}: header: {message}")]
    Header { path: String, message: String },
    #[error("{path}:{line}: {message}")]
    Row {
        path: String,
        line: u64,
        message: String,
    },
    #[error("{path}: {source}")]
    Curve {
        path: String,
        #[source]
        source: CurveError,
    },
}

fn parse_kind(s: &str) -> Option<ValueKind> {
    match s {
        "force_n" => Some(ValueKind::Force),
        "mmax_nm" => Some(ValueKind::MaxMoment),
        _ => None,
    }
}

struct Columns {
    d: usize,
    pressure: usize,
    value: usize,
    /// Kind fixed by the value column name.
    named_kind: Option<ValueKind>,
    kind: Option<usize>,
}

fn columns(header: &csv::StringRecord) -> Result<Columns, String> {
    let find = |name: &str| header.iter().position(|h| h == name);
    let d = find("d_mm").ok_or("missing column d_mm")?;
    let pressure = find("pressure_mpa").ok_or("missing column pressure_mpa")?;
    let value_cols: Vec<(usize, Option<ValueKind>)> = header
        .iter()
        .enumerate()
        .filter_map(|(i, h)| match h {
            "value" => Some((i, None)),
            _ => parse_kind(h).map(|k| (i, Some(k))),
        })
        .collect();
    let (value, named_kind) = match value_cols.as_slice() {
        [one] => *one,
        [] => return Err("missing value column (force_n, mmax_nm or value)".into()),
        _ => return Err("more than one value column".into()),
    };
    let kind = find("value_kind");
    if named_kind.is_none() && kind.is_none() {
        return Err("column value needs a value_kind column".into());
    }
    Ok(Columns {
        d,
        pressure,
        value,
        named_kind,
        kind,
    })
}

struct Row {
    line: u64,
    pressure_mpa: f64,
    value: f64,
}

struct Group {
    d_mm: f64,
    kind: ValueKind,
    first_line: u64,
    rows: Vec<Row>,
}

/// Provenance text from the leading comment block: every comment line,
/// stripped of `#` and a leading `provenance:` tag, joined by spaces.
fn provenance(text: &str) -> Option<String> {
    let parts: Vec<&str> = text
        .lines()
        .map(str::trim_start)
        .take_while(|l| l.starts_with('#') || l.is_empty())
        .filter_map(|l| l.strip_prefix('#'))
        .map(|l| {
            let l = l.trim();
            l.strip_prefix("provenance:").map_or(l, str::trim)
        })
        .filter(|l| !l.is_empty())
        .collect();
    (!parts.is_empty()).then(|| parts.join(" "))
}

/// Parses curve CSV text. `label` names the source in diagnostics and is the
/// provenance when the file has no comment block.
pub fn parse_curve_set(text: &str, label: &str) -> Result<CurveSet, CurveFileError> {
    let path = label.to_owned();
    let row_err = |line: u64, message: String| CurveFileError::Row {
        path: path.clone(),
        line,
        message,
    };
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header = reader
        .headers()
        .map_err(|e| CurveFileError::Header {
            path: path.clone(),
            message: e.to_string(),
        })?
        .clone();
    if header.is_empty() {
        return Err(CurveFileError::Empty { path });
    }
    let cols = columns(&header).map_err(|message| CurveFileError::Header {
        path: path.clone(),
        message,
    })?;

    let mut groups: Vec<Group> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            row_err(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let number = |i: usize, name: &str| -> Result<f64, CurveFileError> {
            let raw = record.get(i).unwrap_or("");
            let x: f64 = raw
                .parse()
                .map_err(|_| row_err(line, format!("{name} = {raw:?} is not a number")))?;
            if x.is_finite() {
                Ok(x)
            } else {
                Err(row_err(line, format!("{name} = {raw} is not finite")))
            }
        };
        let d_mm = number(cols.d, "d_mm")?;
        let pressure_mpa = number(cols.pressure, "pressure_mpa")?;
        let value = number(cols.value, &header[cols.value])?;
        if d_mm <= 0.0 {
            return Err(row_err(line, format!("d_mm = {d_mm} must be positive")));
        }
        if pressure_mpa < 0.0 {
            return Err(row_err(
                line,
                format!("pressure_mpa = {pressure_mpa} is negative"),
            ));
        }
        if value < 0.0 {
            return Err(row_err(
                line,
                format!("{} = {value} is negative", &header[cols.value]),
            ));
        }
        let kind = match cols.kind {
            Some(k) => {
                let raw = record.get(k).unwrap_or("");
                let kind = parse_kind(raw)
                    .ok_or_else(|| row_err(line, format!("value_kind {raw:?} is not force_n or mmax_nm")))?;
                if cols.named_kind.is_some_and(|n| n != kind) {
                    return Err(row_err(
                        line,
                        format!("value_kind {raw} contradicts column {}", &header[cols.value]),
                    ));
                }
                kind
            }
            // columns() guarantees one of the two.
            None => cols.named_kind.unwrap_or(ValueKind::Force),
        };
        let row = Row {
            line,
            pressure_mpa,
            value,
        };
        match groups.iter_mut().find(|g| g.d_mm == d_mm) {
            Some(g) if g.kind != kind => {
                return Err(row_err(
                    line,
                    format!(
                        "d_mm = {d_mm} mixes value kinds ({} from line {}, {} here)",
                        g.kind.as_str(),
                        g.first_line,
                        kind.as_str()
                    ),
                ))
            }
            Some(g) => g.rows.push(row),
            None => groups.push(Group {
                d_mm,
                kind,
                first_line: line,
                rows: vec![row],
            }),
        }
    }
    if groups.is_empty() {
        return Err(CurveFileError::Empty { path });
    }

    let mut curves = Vec::with_capacity(groups.len());
    for mut g in groups {
        g.rows.sort_by(|a, b| {
            a.pressure_mpa
                .total_cmp(&b.pressure_mpa)
                .then(a.line.cmp(&b.line))
        });
        if let Some(w) = g.rows.windows(2).find(|w| w[0].pressure_mpa == w[1].pressure_mpa) {
            return Err(row_err(
                w[1].line,
                format!(
                    "duplicate pressure {} MPa for d_mm = {} (also on line {})",
                    w[1].pressure_mpa, g.d_mm, w[0].line
                ),
            ));
        }
        let samples = g
            .rows
            .iter()
            .map(|r| CurveSample {
                pressure: mpa_to_pa(r.pressure_mpa),
                value: r.value,
            })
            .collect();
        let curve =
            ForceCurve::new(mm_to_m(g.d_mm), g.kind, samples).map_err(|source| CurveFileError::Curve {
                path: path.clone(),
                source,
            })?;
        curves.push(curve);
    }
    let origin = provenance(text).unwrap_or_else(|| label.to_owned());
    CurveSet::new(curves, origin).map_err(|source| CurveFileError::Curve { path, source })
}

pub fn load_curve_set(path: &Path) -> Result<CurveSet, CurveFileError> {
    let shown = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|source| CurveFileError::Io {
        path: shown.clone(),
        source,
    })?;
    parse_curve_set(&text, &shown)
}

pub fn bundled_curve_set() -> CurveSet {
    parse_curve_set(BUNDLED_CURVES, BUNDLED_LABEL).expect("bundled curve file is valid")
}
