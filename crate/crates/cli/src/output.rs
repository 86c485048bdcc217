//! CSV/JSON rendering of results.

use std::io::Write;

use serde::Serialize;

use robe_stability::curves::{CurveName, DiagramRow, TracedCurves};
use robe_stability::model::UnitCirclePoint;
use robe_stability::monodromy::{
    DegeneratePoint, JordanHint, StabilityClass, StabilityKind, SymplecticMatrix4,
};

/// Shortest round-trip form of `x` rounded to 12 significant digits.
pub fn fmt12(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    if rounded == 0.0 {
        "0".to_string()
    } else {
        rounded.to_string()
    }
}

#[derive(Serialize)]
pub struct IndexRecord {
    pub mu: f64,
    pub e: f64,
    pub omega_angle: f64,
    pub index: usize,
    pub nullity: usize,
    #[serde(rename = "N_used")]
    pub n_used: usize,
}

#[derive(Serialize)]
struct PointRecord {
    omega_angle: f64,
    multiplicity: usize,
    nullity: usize,
    hint: JordanHint,
    confident: bool,
}

impl From<&DegeneratePoint> for PointRecord {
    fn from(p: &DegeneratePoint) -> Self {
        Self {
            omega_angle: p.omega.angle(),
            multiplicity: p.multiplicity,
            nullity: p.nullity,
            hint: p.hint,
            confident: p.confident,
        }
    }
}

#[derive(Serialize)]
pub struct MonodromyRecord {
    mu: f64,
    e: f64,
    matrix: [[f64; 4]; 4],
    eigenvalues: [[f64; 2]; 4],
    residual: f64,
    steps: usize,
    tag: &'static str,
    strong: Option<bool>,
    elliptic_angles: Vec<f64>,
    /// Angles of the degenerate points.
    omega: Vec<f64>,
    degenerate_points: Vec<PointRecord>,
}

fn strong_flag(class: &StabilityClass) -> Option<bool> {
    match class.kind {
        StabilityKind::EllipticElliptic { strong } => Some(strong),
        _ => None,
    }
}

impl MonodromyRecord {
    pub fn new(mu: f64, e: f64, m: &SymplecticMatrix4, class: &StabilityClass) -> Self {
        let entries = m.entries();
        let points = class.degenerate_points();
        Self {
            mu,
            e,
            matrix: std::array::from_fn(|i| std::array::from_fn(|j| entries[(i, j)])),
            eigenvalues: class.eigenvalues.map(|z| [z.re, z.im]),
            residual: m.symplectic_residual(),
            steps: m.steps(),
            tag: class.tag(),
            strong: strong_flag(class),
            elliptic_angles: class.elliptic_angles.clone(),
            omega: points.iter().map(|p| p.omega.angle()).collect(),
            degenerate_points: points.iter().map(PointRecord::from).collect(),
        }
    }
}

#[derive(Serialize)]
struct TraceRecord {
    curve: &'static str,
    e: f64,
    mu: f64,
}

fn trace_rows(traced: &TracedCurves, curves: &[CurveName]) -> Vec<TraceRecord> {
    let mut names = curves.to_vec();
    names.sort();
    names.dedup();
    traced
        .curves()
        .into_iter()
        .filter(|c| names.contains(&c.name))
        .flat_map(|c| {
            c.samples.iter().map(|&(e, mu)| TraceRecord {
                curve: c.name.as_str(),
                e,
                mu,
            })
        })
        .collect()
}

pub fn trace_csv<W: Write>(out: W, traced: &TracedCurves, curves: &[CurveName]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["curve", "e", "mu"])?;
    for r in trace_rows(traced, curves) {
        w.write_record([r.curve.to_string(), fmt12(r.e), fmt12(r.mu)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn trace_json<W: Write>(
    mut out: W,
    traced: &TracedCurves,
    curves: &[CurveName],
) -> std::io::Result<()> {
    serde_json::to_writer_pretty(&mut out, &trace_rows(traced, curves))?;
    writeln!(out)
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn diagram_csv<W: Write>(out: W, rows: &[DiagramRow], angles: &[f64]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = ["mu", "e", "stability", "i1", "nu1", "im1", "num1"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    for k in 1..=4 {
        header.push(format!("lam{k}_re"));
        header.push(format!("lam{k}_im"));
    }
    header.push("strong".into());
    header.push("degenerate_omegas".into());
    for &a in angles {
        let a = fmt12(UnitCirclePoint::new(a).angle());
        header.push(format!("i@{a}"));
        header.push(format!("nu@{a}"));
    }
    header.push("error".into());
    w.write_record(&header)?;

    for row in rows {
        let mut rec = vec![
            fmt12(row.mu),
            fmt12(row.e),
            row.stability
                .as_ref()
                .map(|s| s.tag().to_string())
                .unwrap_or_default(),
            opt(row.index_one.map(|p| p.index)),
            opt(row.index_one.map(|p| p.nullity)),
            opt(row.index_minus_one.map(|p| p.index)),
            opt(row.index_minus_one.map(|p| p.nullity)),
        ];
        match row.eigenvalues() {
            Some(ev) => rec.extend(ev.iter().flat_map(|z| [fmt12(z.re), fmt12(z.im)])),
            None => rec.extend(std::iter::repeat_n(String::new(), 8)),
        }
        rec.push(opt(row.stability.as_ref().and_then(strong_flag)));
        rec.push(
            row.stability
                .as_ref()
                .map(|s| {
                    s.degenerate_points()
                        .iter()
                        .map(|p| fmt12(p.omega.angle()))
                        .collect::<Vec<_>>()
                        .join(";")
                })
                .unwrap_or_default(),
        );
        for s in &row.sampled {
            rec.push(opt(s.pair.map(|p| p.index)));
            rec.push(opt(s.pair.map(|p| p.nullity)));
        }
        rec.push(row.errors.join("; "));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn diagram_json<W: Write>(mut out: W, rows: &[DiagramRow]) -> std::io::Result<()> {
    serde_json::to_writer_pretty(&mut out, rows)?;
    writeln!(out)
}
