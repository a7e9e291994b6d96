//! Versioned JSON documents and CSV sample dumps.
//!
//! JSON numbers are rounded to 12 significant digits before serialization,
//! so identical inputs give byte-identical files. CSV files use `,` as the
//! separator, `.` as the decimal mark, a header row, and `{:.11e}` numbers.

use std::fmt::Write as _;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

pub use crate::analysis::StateAnalysis;
use crate::analysis::DensityProfile;
use crate::darboux::Manifest;
use crate::error::{Error, Result};
use crate::potentials::PotentialSpec;
use crate::solver::transfer::KPlaneScan;
use crate::solver::{BoundStateResult, WaveFunction};

pub const SCHEMA: &str = "v1";

/// `solve` and `darboux` output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultDocument {
    pub schema: String,
    pub spec: PotentialSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub manifest: Option<Manifest>,
    #[serde(flatten)]
    pub result: BoundStateResult,
}

impl ResultDocument {
    pub fn new(spec: PotentialSpec, result: BoundStateResult) -> Self {
        ResultDocument { schema: SCHEMA.into(), spec, manifest: None, result }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisDocument {
    pub schema: String,
    pub spec: PotentialSpec,
    pub states: Vec<StateAnalysis>,
}

/// Rounds every float in `v` to 12 significant digits.
pub fn round_value(v: &mut Value) {
    match v {
        Value::Number(n) => {
            if n.is_f64() {
                if let Some(x) = n.as_f64() {
                    if let Some(r) = serde_json::Number::from_f64(round12(x)) {
                        *n = r;
                    }
                }
            }
        }
        Value::Array(a) => a.iter_mut().for_each(round_value),
        Value::Object(o) => o.values_mut().for_each(round_value),
        _ => {}
    }
}

pub fn round12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let mut v = serde_json::to_value(value)?;
    round_value(&mut v);
    let mut s = serde_json::to_string_pretty(&v)?;
    s.push('\n');
    Ok(s)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    std::fs::write(path, to_json_string(value)?)?;
    Ok(())
}

/// Reads a document and checks its `schema` field when present.
pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)?;
    let v: Value = serde_json::from_str(&text)?;
    if let Some(s) = v.get("schema") {
        if s != SCHEMA {
            return Err(Error::Schema(format!("unsupported schema {s}, expected \"{SCHEMA}\"")));
        }
    }
    Ok(serde_json::from_value(v)?)
}

fn e11(x: f64) -> String {
    format!("{x:.11e}")
}

/// `x,re_psi,im_psi,abs_psi_sq` per grid point.
pub fn state_csv(wf: &WaveFunction) -> String {
    let mut s = String::from("x,re_psi,im_psi,abs_psi_sq\n");
    for (x, p) in wf.grid.points().zip(&wf.psi) {
        let _ = writeln!(s, "{},{},{},{}", e11(x), e11(p.re), e11(p.im), e11(p.norm_sqr()));
    }
    s
}

/// `x,re_psi,im_psi,rho,wronskian` per grid point.
pub fn analysis_csv(wf: &WaveFunction, density: &DensityProfile, w: &[f64]) -> String {
    let mut s = String::from("x,re_psi,im_psi,rho,wronskian\n");
    for (i, x) in wf.grid.points().enumerate() {
        let p = wf.psi[i];
        let _ = writeln!(s, "{},{},{},{},{}", e11(x), e11(p.re), e11(p.im), e11(density.rho[i]), e11(w[i]));
    }
    s
}

/// `x,re_v,im_v` per grid point.
pub fn potential_csv(spec: &PotentialSpec, grid: &crate::grid::Grid) -> String {
    let mut s = String::from("x,re_v,im_v\n");
    for x in grid.points() {
        let v = spec.value(x);
        let _ = writeln!(s, "{},{},{}", e11(x), e11(v.re), e11(v.im));
    }
    s
}

/// `re_k,im_k,abs_m11` per mesh point.
pub fn kplane_csv(scan: &KPlaneScan) -> String {
    let mut s = String::from("re_k,im_k,abs_m11\n");
    for (j, y) in scan.im.iter().enumerate() {
        for (i, x) in scan.re.iter().enumerate() {
            let _ = writeln!(s, "{},{},{}", e11(*x), e11(*y), e11(scan.abs_m11[j][i]));
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use num_complex::Complex64 as C64;

    #[test]
    fn rounding_keeps_twelve_digits() {
        assert_eq!(round12(1.0 / 7.0), 0.142857142857);
        assert_eq!(round12(-1.0e-300 / 3.0), -3.33333333333e-301);
        assert_eq!(round12(0.0), 0.0);
    }

    #[test]
    fn json_is_deterministic_and_round_trips() {
        let g = Grid::new(-1.0, 1.0, 5).unwrap();
        let wf = WaveFunction::from_fn(g, 0.1 + 0.2, |x| (C64::new(x / 3.0, x * x), C64::new(1.0 / 3.0, 2.0 * x)));
        let mut res = BoundStateResult::empty(crate::solver::Method::Shooting);
        res.energies.push(wf.energy);
        res.residuals.push(1.0 / 7.0);
        res.states.push(wf);
        let doc = ResultDocument::new(PotentialSpec::CubicOscillator, res);
        let a = to_json_string(&doc).unwrap();
        let back: ResultDocument = serde_json::from_str(&a).unwrap();
        assert_eq!(to_json_string(&back).unwrap(), a);
        let again: ResultDocument = serde_json::from_str(&to_json_string(&back).unwrap()).unwrap();
        assert_eq!(again, back);
        assert!(a.contains("\"schema\": \"v1\""));
        assert!(a.contains("\"psi_re\""));
    }

    #[test]
    fn csv_layout() {
        let g = Grid::new(0.0, 1.0, 3).unwrap();
        let wf = WaveFunction::from_fn(g, 0.0, |x| (C64::new(x, -x), C64::new(1.0, -1.0)));
        let csv = state_csv(&wf);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "x,re_psi,im_psi,abs_psi_sq");
        assert_eq!(lines[2], "5.00000000000e-1,5.00000000000e-1,-5.00000000000e-1,5.00000000000e-1");
        assert_eq!(lines.len(), 4);
    }

    #[test]
    fn schema_mismatch_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("x.json");
        std::fs::write(&p, r#"{"schema":"v0","family":"cubic_oscillator"}"#).unwrap();
        assert!(matches!(read_json::<Value>(&p), Err(Error::Schema(_))));
    }
}
