//! The potential catalog, sampled potentials, and their classification.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::darboux::{CoefficientForm, DarbouxParams, OscillatorAlpha};
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::quad::simpson;

/// A complex potential `V(x) = V_R(x) + i V_I(x)`, in units where
/// `H = -d²/dx² + V`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpecDocument", into = "SpecDocument")]
pub enum PotentialSpec {
    /// `-(κ sech κx)² (1 + i sinh κx)`
    PoschlTeller { kappa: f64 },
    /// `W₀(cos²x + i V₀ sin 2x)` on `[0, π]`, `W₀` outside.
    SinusoidalWell { w0: f64, v0: f64 },
    /// `x² + 2i x³`
    CubicOscillator,
    /// Lévai's potential with hyperbolics of `κx + iε`.
    Levai { nu: C64, mu: C64, epsilon: f64, kappa: f64 },
    /// `V₀` on `[-a, b)`, imaginary part `V_i1` on `[-a, 0)` and `V_i2` on
    /// `[0, b)`, zero elsewhere.
    SquareWell { a: f64, b: f64, v0: f64, vi1: f64, vi2: f64 },
    /// Complex Darboux partner of the oscillator `x²`.
    DarbouxOscillator(OscillatorAlpha),
    Sampled(SampledPotential),
}

/// Linear interpolation of complex samples on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledPotential {
    grid: Grid,
    values: Vec<C64>,
}

impl SampledPotential {
    pub fn new(grid: Grid, values: Vec<C64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::param(format!(
                "sampled potential has {} values for a {}-point grid",
                values.len(),
                grid.len()
            )));
        }
        if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::param("sampled potential contains non-finite values"));
        }
        Ok(SampledPotential { grid, values })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    fn interpolate(&self, x: f64) -> C64 {
        let g = &self.grid;
        let t = ((x - g.x_min()) / g.h()).clamp(0.0, (g.len() - 1) as f64);
        let i = (t.floor() as usize).min(g.len() - 2);
        let f = t - i as f64;
        self.values[i] * (1.0 - f) + self.values[i + 1] * f
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum ClassLabel {
    ContinuousClass { x0: f64 },
    ShortRangeClass { x0: f64 },
    Neither,
}

impl ClassLabel {
    pub fn sign_change_point(&self) -> Option<f64> {
        match *self {
            ClassLabel::ContinuousClass { x0 } | ClassLabel::ShortRangeClass { x0 } => Some(x0),
            ClassLabel::Neither => None,
        }
    }
}

/// `∫ V_I dx` together with whether the integrand had decayed at the grid
/// ends (or is compactly supported).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AreaIntegral {
    pub value: f64,
    pub converged: bool,
}

#[inline]
fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

impl PotentialSpec {
    pub fn poschl_teller(kappa: f64) -> Result<Self> {
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(Error::param(format!("Pöschl-Teller needs kappa > 0, got {kappa}")));
        }
        Ok(PotentialSpec::PoschlTeller { kappa })
    }

    pub fn sinusoidal_well(w0: f64, v0: f64) -> Result<Self> {
        if !w0.is_finite() || !v0.is_finite() {
            return Err(Error::param("sinusoidal well parameters must be finite"));
        }
        if v0.abs() > 0.5 {
            return Err(Error::param(format!("sinusoidal well needs |V0| <= 1/2 for a real spectrum, got {v0}")));
        }
        Ok(PotentialSpec::SinusoidalWell { w0, v0 })
    }

    pub fn levai(nu: C64, mu: C64, epsilon: f64, kappa: f64) -> Result<Self> {
        if !(kappa > 0.0) || !epsilon.is_finite() {
            return Err(Error::param("Lévai potential needs kappa > 0 and finite epsilon"));
        }
        Ok(PotentialSpec::Levai { nu, mu, epsilon, kappa })
    }

    pub fn square_well(a: f64, b: f64, v0: f64, vi1: f64, vi2: f64) -> Result<Self> {
        if !(a >= 0.0 && b >= 0.0) {
            return Err(Error::param(format!("square well needs a >= 0 and b >= 0, got a={a}, b={b}")));
        }
        if ![v0, vi1, vi2].iter().all(|v| v.is_finite()) {
            return Err(Error::param("square well depths must be finite"));
        }
        Ok(PotentialSpec::SquareWell { a, b, v0, vi1, vi2 })
    }

    pub fn free() -> Self {
        PotentialSpec::SquareWell { a: 0.0, b: 0.0, v0: 0.0, vi1: 0.0, vi2: 0.0 }
    }

    pub fn darboux_oscillator(params: DarbouxParams) -> Result<Self> {
        Ok(PotentialSpec::DarbouxOscillator(OscillatorAlpha::new(params)?))
    }

    pub fn sampled(grid: Grid, values: Vec<C64>) -> Result<Self> {
        Ok(PotentialSpec::Sampled(SampledPotential::new(grid, values)?))
    }

    pub fn family_name(&self) -> &'static str {
        match self {
            PotentialSpec::PoschlTeller { .. } => "poschl_teller",
            PotentialSpec::SinusoidalWell { .. } => "sinusoidal_well",
            PotentialSpec::CubicOscillator => "cubic_oscillator",
            PotentialSpec::Levai { .. } => "levai",
            PotentialSpec::SquareWell { .. } => "square_well",
            PotentialSpec::DarbouxOscillator(_) => "darboux_oscillator",
            PotentialSpec::Sampled(_) => "sampled",
        }
    }

    /// `V(x)`; sampled potentials reject points outside their grid.
    pub fn eval(&self, x: f64) -> Result<C64> {
        if !x.is_finite() {
            return Err(Error::param("x must be finite"));
        }
        if let PotentialSpec::Sampled(s) = self {
            let g = s.grid();
            if !g.contains(x) {
                return Err(Error::OutsideDomain { x, lo: g.x_min(), hi: g.x_max() });
            }
        }
        Ok(self.value(x))
    }

    /// `V(x)` without domain checks; sampled potentials clamp to the end
    /// samples.
    pub fn value(&self, x: f64) -> C64 {
        match *self {
            PotentialSpec::PoschlTeller { kappa } => {
                let kx = kappa * x;
                let sech = 1.0 / kx.cosh();
                let s2 = -kappa * kappa * sech * sech;
                c(s2, s2 * kx.sinh())
            }
            PotentialSpec::SinusoidalWell { w0, v0 } => {
                if (0.0..=PI).contains(&x) {
                    let cx = x.cos();
                    c(w0 * cx * cx, w0 * v0 * (2.0 * x).sin())
                } else {
                    c(w0, 0.0)
                }
            }
            PotentialSpec::CubicOscillator => c(x * x, 2.0 * x * x * x),
            PotentialSpec::Levai { nu, mu, epsilon, kappa } => {
                let kx = kappa * x;
                // cosh and sinh of kx + iε split into real and imaginary parts
                let ch = c(kx.cosh() * epsilon.cos(), kx.sinh() * epsilon.sin());
                let sh = c(kx.sinh() * epsilon.cos(), kx.cosh() * epsilon.sin());
                let inv_ch2 = (ch * ch).inv();
                let g1 = (nu * nu + mu * mu) / 2.0 - 0.25;
                let g2 = (nu * nu - mu * mu) / 2.0;
                -kappa * kappa * (g1 * inv_ch2 + C64::i() * g2 * sh * inv_ch2)
            }
            PotentialSpec::SquareWell { a, b, v0, vi1, vi2 } => {
                if x >= -a && x < 0.0 {
                    c(v0, vi1)
                } else if x >= 0.0 && x < b {
                    c(v0, vi2)
                } else {
                    c(0.0, 0.0)
                }
            }
            PotentialSpec::DarbouxOscillator(ref alpha) => alpha.potential(x),
            PotentialSpec::Sampled(ref s) => s.interpolate(x),
        }
    }

    /// Points where V jumps or its derivative does.
    pub fn breakpoints(&self) -> Vec<f64> {
        match *self {
            PotentialSpec::SinusoidalWell { .. } => vec![0.0, PI],
            PotentialSpec::SquareWell { a, b, .. } => {
                let mut v = vec![-a, 0.0, b];
                v.dedup();
                v
            }
            _ => Vec::new(),
        }
    }

    /// `[x_L, x_R]` outside which V equals [`PotentialSpec::exterior_value`].
    pub fn interaction_zone(&self) -> Option<(f64, f64)> {
        match *self {
            PotentialSpec::SinusoidalWell { .. } => Some((0.0, PI)),
            PotentialSpec::SquareWell { a, b, .. } => Some((-a, b)),
            _ => None,
        }
    }

    pub fn exterior_value(&self) -> Option<f64> {
        match *self {
            PotentialSpec::SinusoidalWell { w0, .. } => Some(w0),
            PotentialSpec::SquareWell { .. } => Some(0.0),
            _ => None,
        }
    }

    pub fn is_short_range(&self) -> bool {
        self.interaction_zone().is_some()
    }

    /// True for the families the two-sided shooting method is meant for.
    pub fn is_confining(&self) -> bool {
        matches!(
            self,
            PotentialSpec::PoschlTeller { .. }
                | PotentialSpec::CubicOscillator
                | PotentialSpec::Levai { .. }
                | PotentialSpec::DarbouxOscillator(_)
                | PotentialSpec::Sampled(_)
        )
    }

    pub fn classify(&self, grid: &Grid, tol: f64) -> ClassLabel {
        let vi: Vec<f64> = grid.points().map(|x| self.value(x).im).collect();
        let scale = vi.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if scale == 0.0 {
            return ClassLabel::Neither;
        }
        let zero_tol = tol.max(1e-12) * scale;
        let Some(x0) = single_sign_change(grid, &vi, zero_tol, &self.breakpoints()) else {
            return ClassLabel::Neither;
        };
        let compact = match self.interaction_zone() {
            Some(_) => true,
            None => {
                matches!(self, PotentialSpec::Sampled(_))
                    && vi[0].abs() <= zero_tol
                    && vi[vi.len() - 1].abs() <= zero_tol
                    && !is_continuous(&vi, zero_tol)
            }
        };
        if compact {
            ClassLabel::ShortRangeClass { x0 }
        } else if is_continuous(&vi, zero_tol) {
            ClassLabel::ContinuousClass { x0 }
        } else {
            ClassLabel::Neither
        }
    }

    /// `max_x |V(x) − conj V(−x)| ≤ tol` over the grid points.
    pub fn pt_check(&self, grid: &Grid, tol: f64) -> bool {
        grid.points().all(|x| match (self.eval(x), self.eval(-x)) {
            (Ok(a), Ok(b)) => (a - b.conj()).norm() <= tol,
            _ => false,
        })
    }

    pub fn zero_total_area(&self, grid: &Grid) -> AreaIntegral {
        match *self {
            PotentialSpec::SquareWell { a, b, vi1, vi2, .. } => {
                return AreaIntegral { value: vi1 * a + vi2 * b, converged: true };
            }
            PotentialSpec::SinusoidalWell { w0, v0 } => {
                let g = Grid::with_spacing(0.0, PI, grid.h().min(1e-2)).expect("fixed interval");
                let f: Vec<f64> = g.points().map(|x| w0 * v0 * (2.0 * x).sin()).collect();
                return AreaIntegral { value: simpson(g.h(), &f), converged: true };
            }
            _ => {}
        }
        let f: Vec<f64> = grid.points().map(|x| self.value(x).im).collect();
        let max = f.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let ends = f[0].abs().max(f[f.len() - 1].abs());
        AreaIntegral { value: simpson(grid.h(), &f), converged: ends <= 1e-8 * max }
    }
}

/// Location of the only sign change of `f`, if there is exactly one.
fn single_sign_change(grid: &Grid, f: &[f64], zero_tol: f64, breaks: &[f64]) -> Option<f64> {
    let mut last: Option<(usize, f64)> = None;
    let mut found = None;
    for (i, &v) in f.iter().enumerate() {
        if v.abs() <= zero_tol {
            continue;
        }
        if let Some((j, s)) = last {
            if s * v < 0.0 {
                if found.is_some() {
                    return None;
                }
                let (xa, xb) = (grid.x(j), grid.x(i));
                found = Some(
                    breaks
                        .iter()
                        .copied()
                        .find(|&b| b > xa && b <= xb)
                        .unwrap_or_else(|| {
                            if i == j + 1 {
                                xa - f[j] * (xb - xa) / (v - f[j])
                            } else {
                                0.5 * (grid.x(j + 1) + grid.x(i - 1))
                            }
                        }),
                );
            }
        }
        last = Some((i, v));
    }
    found
}

/// No adjacent jump exceeds ten times the neighbouring increments (a local
/// slope scale) plus `tol`.
fn is_continuous(f: &[f64], tol: f64) -> bool {
    let n = f.len();
    (0..n - 1).all(|i| {
        let jump = (f[i + 1] - f[i]).abs();
        let left = if i > 0 { (f[i] - f[i - 1]).abs() } else { 0.0 };
        let right = if i + 2 < n { (f[i + 2] - f[i + 1]).abs() } else { 0.0 };
        jump <= 10.0 * left.max(right) + tol
    })
}

/// Parameter value in a spec document: a real number or `[re, im]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Real(f64),
    Complex([f64; 2]),
}

/// On-disk form of a [`PotentialSpec`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpecDocument {
    pub family: String,
    #[serde(default)]
    pub params: BTreeMap<String, ParamValue>,
    /// Darboux oscillators only: `"oscillator"` or `"general"`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub form: Option<CoefficientForm>,
    /// Sampled potentials only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<Grid>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values_re: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values_im: Option<Vec<f64>>,
}

impl SpecDocument {
    fn bare(family: &str) -> Self {
        SpecDocument { family: family.into(), params: BTreeMap::new(), form: None, grid: None, values_re: None, values_im: None }
    }

    fn with(mut self, name: &str, v: f64) -> Self {
        self.params.insert(name.into(), ParamValue::Real(v));
        self
    }

    fn with_c(mut self, name: &str, v: C64) -> Self {
        self.params.insert(name.into(), ParamValue::Complex([v.re, v.im]));
        self
    }

    fn real(&self, name: &str) -> Result<f64> {
        match self.params.get(name) {
            Some(ParamValue::Real(v)) => Ok(*v),
            Some(ParamValue::Complex([re, im])) if *im == 0.0 => Ok(*re),
            Some(_) => Err(Error::Schema(format!("parameter `{name}` of `{}` must be real", self.family))),
            None => Err(Error::Schema(format!("missing parameter `{name}` for `{}`", self.family))),
        }
    }

    fn complex(&self, name: &str) -> Result<C64> {
        match self.params.get(name) {
            Some(ParamValue::Real(v)) => Ok(C64::new(*v, 0.0)),
            Some(ParamValue::Complex([re, im])) => Ok(C64::new(*re, *im)),
            None => Err(Error::Schema(format!("missing parameter `{name}` for `{}`", self.family))),
        }
    }

    fn check_names(&self, allowed: &[&str]) -> Result<()> {
        match self.params.keys().find(|k| !allowed.contains(&k.as_str())) {
            Some(k) => Err(Error::Schema(format!("unknown parameter `{k}` for `{}`", self.family))),
            None => Ok(()),
        }
    }
}

impl From<PotentialSpec> for SpecDocument {
    fn from(spec: PotentialSpec) -> Self {
        let doc = SpecDocument::bare(spec.family_name());
        match spec {
            PotentialSpec::PoschlTeller { kappa } => doc.with("kappa", kappa),
            PotentialSpec::SinusoidalWell { w0, v0 } => doc.with("w0", w0).with("v0", v0),
            PotentialSpec::CubicOscillator => doc,
            PotentialSpec::Levai { nu, mu, epsilon, kappa } => {
                doc.with_c("nu", nu).with_c("mu", mu).with("epsilon", epsilon).with("kappa", kappa)
            }
            PotentialSpec::SquareWell { a, b, v0, vi1, vi2 } => {
                doc.with("a", a).with("b", b).with("v0", v0).with("vi1", vi1).with("vi2", vi2)
            }
            PotentialSpec::DarbouxOscillator(alpha) => {
                let p = alpha.params();
                let mut d = doc.with("c0", p.c0).with("c1", p.c1).with("lambda", p.lambda);
                d.form = Some(p.form);
                d
            }
            PotentialSpec::Sampled(s) => {
                let mut d = doc;
                d.grid = Some(s.grid);
                d.values_re = Some(s.values.iter().map(|v| v.re).collect());
                d.values_im = Some(s.values.iter().map(|v| v.im).collect());
                d
            }
        }
    }
}

impl TryFrom<SpecDocument> for PotentialSpec {
    type Error = Error;

    fn try_from(d: SpecDocument) -> Result<Self> {
        match d.family.as_str() {
            "poschl_teller" => {
                d.check_names(&["kappa"])?;
                PotentialSpec::poschl_teller(d.real("kappa")?)
            }
            "sinusoidal_well" => {
                d.check_names(&["w0", "v0"])?;
                PotentialSpec::sinusoidal_well(d.real("w0")?, d.real("v0")?)
            }
            "cubic_oscillator" => {
                d.check_names(&[])?;
                Ok(PotentialSpec::CubicOscillator)
            }
            "levai" => {
                d.check_names(&["nu", "mu", "epsilon", "kappa"])?;
                PotentialSpec::levai(d.complex("nu")?, d.complex("mu")?, d.real("epsilon")?, d.real("kappa")?)
            }
            "square_well" => {
                d.check_names(&["a", "b", "v0", "vi1", "vi2"])?;
                PotentialSpec::square_well(d.real("a")?, d.real("b")?, d.real("v0")?, d.real("vi1")?, d.real("vi2")?)
            }
            "darboux_oscillator" => {
                d.check_names(&["c0", "c1", "lambda"])?;
                let p = DarbouxParams::new(d.real("c0")?, d.real("c1")?, d.real("lambda")?).with_form(d.form.unwrap_or_default());
                PotentialSpec::darboux_oscillator(p)
            }
            "sampled" => {
                d.check_names(&[])?;
                let grid = d.grid.ok_or_else(|| Error::Schema("sampled potential needs `grid`".into()))?;
                let re = d.values_re.ok_or_else(|| Error::Schema("sampled potential needs `values_re`".into()))?;
                let im = d.values_im.unwrap_or_else(|| vec![0.0; re.len()]);
                if im.len() != re.len() {
                    return Err(Error::Schema("`values_re` and `values_im` differ in length".into()));
                }
                let values = re.into_iter().zip(im).map(|(r, i)| C64::new(r, i)).collect();
                PotentialSpec::sampled(grid, values)
            }
            other => Err(Error::Schema(format!("unknown potential family `{other}`"))),
        }
    }
}

/// Parameter names per family, in the order the catalog lists them.
pub const FAMILIES: &[(&str, &[&str])] = &[
    ("poschl_teller", &["kappa"]),
    ("sinusoidal_well", &["w0", "v0"]),
    ("cubic_oscillator", &[]),
    ("levai", &["nu", "mu", "epsilon", "kappa"]),
    ("square_well", &["a", "b", "v0", "vi1", "vi2"]),
    ("darboux_oscillator", &["c0", "c1", "lambda"]),
];

#[derive(Debug, Clone)]
pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    pub spec: PotentialSpec,
}

/// Parameter sets used in the reference figures and tables.
pub fn presets() -> Vec<Preset> {
    let sq = |b| PotentialSpec::square_well(3.0, b, -1.0, -0.2, 0.1).expect("valid preset");
    vec![
        Preset { name: "poschl-teller", description: "Pöschl-Teller-like well, kappa = 2", spec: PotentialSpec::PoschlTeller { kappa: 2.0 } },
        Preset { name: "sinusoidal-paper", description: "sinusoidal complex well, W0 = 30, V0 = 0.49", spec: PotentialSpec::SinusoidalWell { w0: 30.0, v0: 0.49 } },
        Preset { name: "cubic-oscillator", description: "x^2 + 2i x^3", spec: PotentialSpec::CubicOscillator },
        Preset {
            name: "levai-paper",
            description: "Lévai potential, nu = -7+i, mu = -3-i, epsilon = 0.1, kappa = 1",
            spec: PotentialSpec::Levai { nu: C64::new(-7.0, 1.0), mu: C64::new(-3.0, -1.0), epsilon: 0.1, kappa: 1.0 },
        },
        Preset { name: "fig5-upper", description: "square well a = 3, b = 4.2762, V0 = -1, Vi1 = -0.2, Vi2 = 0.1", spec: sq(4.2762) },
        Preset { name: "fig5-middle", description: "square well a = 3, b = 4.4691, V0 = -1, Vi1 = -0.2, Vi2 = 0.1", spec: sq(4.4691) },
        Preset { name: "fig5-lower", description: "square well a = 3, b = 8.9158, V0 = -1, Vi1 = -0.2, Vi2 = 0.1", spec: sq(8.9158) },
        Preset {
            name: "darboux-pt",
            description: "PT-symmetric oscillator partner, c0 = 2, c1 = 0, lambda = 1.7",
            spec: PotentialSpec::darboux_oscillator(DarbouxParams::new(2.0, 0.0, 1.7)).expect("valid preset"),
        },
        Preset {
            name: "darboux-nonpt",
            description: "non-PT oscillator partner, c0 = 1.2, c1 = 1, lambda = 0.02",
            spec: PotentialSpec::darboux_oscillator(DarbouxParams::new(1.2, 1.0, 0.02)).expect("valid preset"),
        },
    ]
}

pub fn preset(name: &str) -> Option<Preset> {
    presets().into_iter().find(|p| p.name == name)
}
