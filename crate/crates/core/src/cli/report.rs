use std::io;

use serde::Serialize;
use serde_json::ser::{Formatter, Serializer};

use crate::verify::ResidualReport;

/// Writes every float with 17 significant digits.
struct FixedDigits;

impl Formatter for FixedDigits {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

pub fn to_json<T: Serialize>(value: &T) -> serde_json::Result<String> {
    let mut out = Vec::new();
    let mut ser = Serializer::with_formatter(&mut out, FixedDigits);
    value.serialize(&mut ser)?;
    Ok(String::from_utf8(out).expect("serde_json emits UTF-8"))
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckRow {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SkipRow {
    pub name: String,
    pub reason: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct PointResult {
    pub point: Vec<f64>,
    pub checks: Vec<CheckRow>,
    pub skipped: Vec<SkipRow>,
}

impl From<ResidualReport> for PointResult {
    fn from(r: ResidualReport) -> Self {
        PointResult {
            point: r.point,
            checks: r
                .entries
                .into_iter()
                .map(|(name, e)| CheckRow {
                    name,
                    residual: e.residual,
                    tolerance: e.tolerance,
                    pass: e.pass,
                })
                .collect(),
            skipped: r
                .skipped
                .into_iter()
                .map(|(name, reason)| SkipRow { name, reason })
                .collect(),
        }
    }
}

impl PointResult {
    /// A point whose evaluation failed outright.
    pub fn failed(point: Vec<f64>, message: String) -> Self {
        PointResult {
            point,
            checks: vec![CheckRow {
                name: "evaluation".into(),
                residual: f64::NAN,
                tolerance: 0.0,
                pass: false,
            }],
            skipped: vec![SkipRow {
                name: "all".into(),
                reason: message,
            }],
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    pub points: usize,
    pub checks: usize,
    pub failures: usize,
    pub pass: bool,
    /// Largest residual of each check over all points.
    pub worst: Vec<CheckRow>,
}

pub fn summarize(results: &[PointResult]) -> Summary {
    let mut worst: Vec<CheckRow> = Vec::new();
    let mut checks = 0;
    let mut failures = 0;
    for r in results {
        for c in &r.checks {
            checks += 1;
            if !c.pass {
                failures += 1;
            }
            match worst.iter_mut().find(|w| w.name == c.name) {
                Some(w) => {
                    if !(c.residual <= w.residual) || (!c.pass && w.pass) {
                        *w = c.clone();
                    }
                }
                None => worst.push(c.clone()),
            }
        }
    }
    worst.sort_by(|a, b| a.name.cmp(&b.name));
    Summary {
        points: results.len(),
        checks,
        failures,
        pass: failures == 0,
        worst,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_have_seventeen_digits() {
        let s = to_json(&vec![0.1_f64, 1.0, f64::NAN]).unwrap();
        assert_eq!(s, "[1.0000000000000001e-1,1.0000000000000000e0,null]");
        let back: Vec<Option<f64>> = serde_json::from_str(&s).unwrap();
        assert_eq!(back[0], Some(0.1));
    }

    #[test]
    fn summary_counts_failures() {
        let mut r = ResidualReport::new("x", &[0.0]);
        r.record("a", 1.0, 2.0);
        r.record("b", 3.0, 2.0);
        let s = summarize(&[r.into()]);
        assert_eq!((s.points, s.checks, s.failures, s.pass), (1, 2, 1, false));
    }
}
