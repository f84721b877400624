//! Problem statements: configuration schema, built-in presets and validation.

use std::fmt;

use dashu_ratio::RBig;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly;
use crate::series::{Mode, Scalar, TruncatedSeries};

pub const DEFAULT_K: usize = 40;
pub const DEFAULT_BITS: usize = 256;

/// Quantum-correction term of the radial equation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Correction {
    /// Plain one-dimensional problem, `n = 1` only.
    None,
    /// Radial equation of an O(n)-symmetric system, `u = 1`.
    RadialU1,
    /// Particle on the n-sphere, `u = Q cot Q`.
    Sphere,
}

impl fmt::Display for Correction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Correction::None => "none",
            Correction::RadialU1 => "radial_u1",
            Correction::Sphere => "sphere",
        })
    }
}

/// Classification of the singular point that controls the large orders.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TurningPointClass {
    Simple,
    Degenerate,
    SphereSingular,
    None,
}

/// How the potential is specified.
#[derive(Clone, Debug, PartialEq)]
pub enum Potential {
    /// Polynomial with the given ascending rational coefficients.
    Polynomial(Vec<RBig>),
    /// `1 - cos Q`, expanded to whatever order is requested.
    OneMinusCos,
}

impl Potential {
    /// Taylor coefficients up to `order` (inclusive).
    pub fn coefficients(&self, order: usize) -> Vec<RBig> {
        match self {
            Potential::Polynomial(c) => (0..=order)
                .map(|m| c.get(m).cloned().unwrap_or(RBig::ZERO))
                .collect(),
            Potential::OneMinusCos => {
                let cos = cos_coefficients(order);
                cos.into_iter()
                    .enumerate()
                    .map(|(m, c)| if m == 0 { RBig::ZERO } else { -c })
                    .collect()
            }
        }
    }

    pub fn is_polynomial(&self) -> bool {
        matches!(self, Potential::Polynomial(_))
    }
}

fn factorial_ratio(sign: i64, m: usize) -> RBig {
    let mut f = dashu_int::UBig::ONE;
    for i in 2..=m as u64 {
        f *= dashu_int::UBig::from(i);
    }
    RBig::from_parts(dashu_int::IBig::from(sign), f)
}

fn cos_coefficients(order: usize) -> Vec<RBig> {
    (0..=order)
        .map(|m| {
            if m % 2 == 1 {
                RBig::ZERO
            } else {
                factorial_ratio(if (m / 2) % 2 == 0 { 1 } else { -1 }, m)
            }
        })
        .collect()
}

fn sin_over_q_coefficients(order: usize) -> Vec<RBig> {
    (0..=order)
        .map(|m| {
            if m % 2 == 1 {
                RBig::ZERO
            } else {
                factorial_ratio(if (m / 2) % 2 == 0 { 1 } else { -1 }, m + 1)
            }
        })
        .collect()
}

/// Taylor series of `Q cot Q = cos Q / (sin Q / Q)` to `order`.
pub fn q_cot_q(order: usize, mode: Mode) -> TruncatedSeries {
    let c = TruncatedSeries::from_rationals(&cos_coefficients(order), order, Mode::Exact, "cosQ");
    let s = TruncatedSeries::from_rationals(
        &sin_over_q_coefficients(order),
        order,
        Mode::Exact,
        "sinQ/Q",
    );
    c.div(&s)
        .expect("sin Q / Q has unit constant term")
        .with_label("u")
        .to_mode(mode)
}

/// A problem instance. Truncation orders and precision are part of it.
#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub label: String,
    pub preset: Option<String>,
    pub n: u32,
    pub correction: Correction,
    pub potential: Potential,
    pub k_max: usize,
    pub m_trunc: usize,
    pub precision_bits: usize,
    /// Points for pointwise evaluation of the coefficient functions.
    pub eval_points: Vec<RBig>,
    /// Truncation used for pointwise evaluation (float mode).
    pub eval_m: Option<usize>,
}

impl Scenario {
    /// `V` as an exact series truncated at `M`.
    pub fn potential_series(&self) -> TruncatedSeries {
        self.potential_series_to(self.m_trunc, Mode::Exact)
    }

    pub fn potential_series_to(&self, order: usize, mode: Mode) -> TruncatedSeries {
        TruncatedSeries::from_rationals(&self.potential.coefficients(order), order, mode, "V")
    }

    /// Correction series `u`; constant 1 for the plain and radial cases.
    pub fn correction_series_to(&self, order: usize, mode: Mode) -> TruncatedSeries {
        match self.correction {
            Correction::None | Correction::RadialU1 => {
                TruncatedSeries::constant(Scalar::one(mode), order, "u")
            }
            Correction::Sphere => q_cot_q(order, mode),
        }
    }

    /// Truncation used for pointwise evaluation: configured or `2K + 400`.
    pub fn pointwise_m(&self) -> usize {
        self.eval_m.unwrap_or(2 * self.k_max + 400)
    }

    /// Float-mode descriptor at this scenario's precision.
    pub fn float_mode(&self) -> Mode {
        Mode::Float {
            bits: self.precision_bits,
        }
    }

    /// Renders the `[scenario]` and `[eval]` tables of a config document.
    pub fn to_config_text(&self) -> String {
        let table = ScenarioTable {
            label: Some(self.label.clone()),
            preset: self.preset.clone(),
            n: Some(self.n),
            correction: Some(self.correction),
            potential: match (&self.preset, &self.potential) {
                (None, Potential::Polynomial(c)) => Some(
                    c.iter()
                        .map(|r| RationalValue::Text(r.to_string()))
                        .collect(),
                ),
                _ => None,
            },
            k: Some(self.k_max),
            m: Some(self.m_trunc),
            precision_bits: Some(self.precision_bits),
        };
        let eval = EvalTable {
            points: self
                .eval_points
                .iter()
                .map(|r| RationalValue::Text(r.to_string()))
                .collect(),
            m: self.eval_m,
        };
        #[derive(Serialize)]
        struct Doc<'a> {
            scenario: &'a ScenarioTable,
            eval: &'a EvalTable,
        }
        toml::to_string(&Doc {
            scenario: &table,
            eval: &eval,
        })
        .expect("scenario tables serialize")
    }
}

/// Rational given either as text ("p/q", decimal) or as a TOML integer.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RationalValue {
    Int(i64),
    Text(String),
    Float(f64),
}

impl RationalValue {
    pub fn to_rational(&self, path: &str) -> Result<RBig> {
        match self {
            RationalValue::Int(i) => Ok(RBig::from(*i)),
            RationalValue::Text(t) => Scalar::parse_rational(t).ok_or_else(|| {
                Error::config(
                    path,
                    format!("`{t}` is not a rational number (use \"p/q\")"),
                )
            }),
            RationalValue::Float(x) => Err(Error::config(
                path,
                format!("{x} is a binary float; give it as a string such as \"3/10\""),
            )),
        }
    }
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioTable {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub correction: Option<Correction>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub potential: Option<Vec<RationalValue>>,
    #[serde(rename = "K", skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(rename = "M", skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub precision_bits: Option<usize>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalTable {
    #[serde(default)]
    pub points: Vec<RationalValue>,
    #[serde(rename = "M", skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExpandTable {
    /// Re-run at `M + 10` and require identical energies.
    pub check_truncation: bool,
}

impl Default for ExpandTable {
    fn default() -> Self {
        ExpandTable {
            check_truncation: true,
        }
    }
}

/// Which sequence the fitting stage works on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitTarget {
    Energy,
    Pointwise,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FitTable {
    pub target: FitTarget,
    /// First order used; defaults to the top half of the computed range.
    pub k_min: Option<usize>,
    pub richardson_order: usize,
    pub exponent_hint: Option<f64>,
}

impl Default for FitTable {
    fn default() -> Self {
        FitTable {
            target: FitTarget::Energy,
            k_min: None,
            richardson_order: 4,
            exponent_hint: None,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifyTable {
    pub a0_rel: f64,
    pub exponent_abs: f64,
    pub prefactor_rel: f64,
    /// A zero predicted prefactor passes if the fit is below this fraction
    /// of the reference magnitude.
    pub null_level: f64,
    /// Dimension of the reference run for the null rule (same preset).
    pub null_reference_n: Option<u32>,
    pub boundary_layer: bool,
    pub oracle: bool,
    pub pointwise: bool,
}

impl Default for VerifyTable {
    fn default() -> Self {
        VerifyTable {
            a0_rel: 1e-3,
            exponent_abs: 0.05,
            prefactor_rel: 0.02,
            null_level: 0.05,
            null_reference_n: None,
            boundary_layer: true,
            oracle: false,
            pointwise: false,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OracleTable {
    /// Highest energy order compared with the coupling recursion.
    pub orders: usize,
    /// Values of hbar for the direct eigenvalue comparison.
    pub hbar: Vec<RationalValue>,
    pub rel_tol: f64,
}

impl Default for OracleTable {
    fn default() -> Self {
        OracleTable {
            orders: 6,
            hbar: Vec::new(),
            rel_tol: 1e-6,
        }
    }
}

/// The whole configuration document.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigDoc {
    pub scenario: ScenarioTable,
    #[serde(default)]
    pub eval: EvalTable,
    #[serde(default)]
    pub expand: ExpandTable,
    #[serde(default)]
    pub fit: FitTable,
    #[serde(default)]
    pub verify: VerifyTable,
    #[serde(default)]
    pub oracle: OracleTable,
}

/// Parses a config document; errors carry the offending key path.
pub fn parse_config(text: &str) -> Result<ConfigDoc> {
    let de = toml::Deserializer::new(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        Error::config(path, inner.message().trim().to_string())
    })
}

/// Builds the scenario part of a config document (defaults applied).
pub fn load_scenario(text: &str) -> Result<Scenario> {
    scenario_from_doc(&parse_config(text)?)
}

pub fn scenario_from_doc(doc: &ConfigDoc) -> Result<Scenario> {
    let t = &doc.scenario;
    let k_max = t.k.unwrap_or(DEFAULT_K);
    if k_max == 0 {
        return Err(Error::config("scenario.K", "K must be at least 1"));
    }
    let m_trunc = t.m.unwrap_or(2 * k_max + 2);
    if m_trunc < 2 * k_max + 2 {
        return Err(Error::config(
            "scenario.M",
            format!(
                "M = {m_trunc} violates the rule M >= 2K + 2 = {}",
                2 * k_max + 2
            ),
        ));
    }
    let precision_bits = t.precision_bits.unwrap_or(DEFAULT_BITS);
    Mode::float(precision_bits)
        .map_err(|e| Error::config("scenario.precision_bits", e.to_string()))?;

    let (n, correction, potential) = match (&t.preset, &t.potential) {
        (Some(_), Some(_)) => {
            return Err(Error::config(
                "scenario.potential",
                "give either a preset or a potential, not both",
            ))
        }
        (Some(name), None) => {
            let p = preset(name, t.n)?;
            if let Some(c) = t.correction {
                if c != p.correction {
                    return Err(Error::config(
                        "scenario.correction",
                        format!("preset `{name}` uses correction {}", p.correction),
                    ));
                }
            }
            (p.n, p.correction, p.potential)
        }
        (None, Some(list)) => {
            let coeffs = list
                .iter()
                .enumerate()
                .map(|(i, v)| v.to_rational(&format!("scenario.potential[{i}]")))
                .collect::<Result<Vec<_>>>()?;
            (
                t.n.unwrap_or(1),
                t.correction.unwrap_or(Correction::None),
                Potential::Polynomial(coeffs),
            )
        }
        (None, None) => {
            return Err(Error::config(
                "scenario.potential",
                "missing potential: set scenario.preset or scenario.potential",
            ))
        }
    };
    let eval_points = doc
        .eval
        .points
        .iter()
        .enumerate()
        .map(|(i, v)| v.to_rational(&format!("eval.points[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    if let Some(em) = doc.eval.m {
        if em < 2 * k_max + 2 {
            return Err(Error::config(
                "eval.M",
                format!("eval.M = {em} violates the rule M >= 2K + 2"),
            ));
        }
    }
    let label = t
        .label
        .clone()
        .or_else(|| t.preset.clone())
        .unwrap_or_else(|| "custom".to_string());
    Ok(Scenario {
        label,
        preset: t.preset.clone(),
        n,
        correction,
        potential,
        k_max,
        m_trunc,
        precision_bits,
        eval_points,
        eval_m: doc.eval.m,
    })
}

/// Built-in problem instance with default truncation and precision.
pub fn preset(name: &str, n: Option<u32>) -> Result<Scenario> {
    let r = |p: i64, q: i64| RBig::from_parts_signed(p.into(), q.into());
    let one_d = |coeffs: Vec<RBig>| -> Result<(u32, Correction, Potential)> {
        match n {
            Some(m) if m != 1 => Err(Error::config(
                "scenario.n",
                format!("preset `{name}` is one-dimensional"),
            )),
            _ => Ok((1, Correction::None, Potential::Polynomial(coeffs))),
        }
    };
    let need_n = || {
        n.filter(|&m| m >= 1)
            .ok_or_else(|| Error::config("scenario.n", format!("preset `{name}` needs n >= 1")))
    };
    let (n, correction, potential) = match name {
        "harmonic" => one_d(vec![r(0, 1), r(0, 1), r(1, 2)])?,
        "cubic" => one_d(vec![r(0, 1), r(0, 1), r(1, 2), r(-1, 1)])?,
        "neg_quartic" => one_d(vec![r(0, 1), r(0, 1), r(1, 2), r(0, 1), r(-1, 1)])?,
        "double_well" => one_d(vec![r(0, 1), r(0, 1), r(1, 2), r(-1, 1), r(1, 2)])?,
        "sphere" => (need_n()?, Correction::Sphere, Potential::OneMinusCos),
        "radial_on" => (
            need_n()?,
            Correction::RadialU1,
            Potential::Polynomial(vec![r(0, 1), r(0, 1), r(1, 2), r(0, 1), r(-1, 1)]),
        ),
        other => {
            return Err(Error::config(
                "scenario.preset",
                format!(
                    "unknown preset `{other}` (known: harmonic, cubic, neg_quartic, \
                     double_well, sphere, radial_on)"
                ),
            ))
        }
    };
    Ok(Scenario {
        label: name.to_string(),
        preset: Some(name.to_string()),
        n,
        correction,
        potential,
        k_max: DEFAULT_K,
        m_trunc: 2 * DEFAULT_K + 2,
        precision_bits: DEFAULT_BITS,
        eval_points: Vec::new(),
        eval_m: None,
    })
}

/// A scenario whose invariants have been checked.
#[derive(Clone, Debug)]
pub struct ValidatedScenario {
    pub scenario: Scenario,
    /// Convergence radius of the Q-series (float estimate).
    pub radius: f64,
}

impl std::ops::Deref for ValidatedScenario {
    type Target = Scenario;
    fn deref(&self) -> &Scenario {
        &self.scenario
    }
}

/// Exact evenness of the potential (n = 1 symmetric-potential rule).
pub fn potential_is_even(s: &Scenario) -> bool {
    match &s.potential {
        Potential::Polynomial(c) => c.iter().skip(1).step_by(2).all(|x| *x == RBig::ZERO),
        Potential::OneMinusCos => true,
    }
}

pub fn validate_scenario(s: Scenario) -> Result<ValidatedScenario> {
    if s.n == 0 {
        return Err(Error::config("scenario.n", "dimension must be positive"));
    }
    if s.correction == Correction::None && s.n != 1 {
        return Err(Error::config(
            "scenario.correction",
            "correction `none` is the one-dimensional problem and requires n = 1",
        ));
    }
    if s.m_trunc < 2 * s.k_max + 2 {
        return Err(Error::config(
            "scenario.M",
            format!("M = {} violates the rule M >= 2K + 2", s.m_trunc),
        ));
    }
    let v = s.potential.coefficients(2.max(s.m_trunc));
    let half = RBig::from_parts(1.into(), 2u8.into());
    if v[0] != RBig::ZERO || v[1] != RBig::ZERO {
        return Err(Error::Normalization(format!(
            "V must vanish to second order at Q = 0, got V(0) = {}, V'(0) = {}",
            v[0], v[1]
        )));
    }
    if v[2] != half {
        return Err(Error::Normalization(format!(
            "V''(0) must be 1 (coefficient of Q^2 equal to 1/2), got coefficient {}",
            v[2]
        )));
    }
    if s.n > 1 {
        if let Some(m) = (1..v.len()).step_by(2).find(|&m| v[m] != RBig::ZERO) {
            return Err(Error::HalfIntegerPower(format!(
                "n = {} with an odd term Q^{m} in V; the order-Q^0 condition (n-1) Phi'_(k-1)(0) = 0 fails",
                s.n
            )));
        }
    }
    let radius = convergence_radius(&s);
    Ok(ValidatedScenario {
        scenario: s,
        radius,
    })
}

/// Distance from 0 to the nearest singularity of the Q-series.
fn convergence_radius(s: &Scenario) -> f64 {
    let poly_radius = match &s.potential {
        Potential::Polynomial(c) => {
            let reduced: Vec<f64> = c
                .iter()
                .skip(2)
                .map(|x| Scalar::Exact(x.clone()).to_f64())
                .collect();
            poly::min_root_modulus(&reduced)
        }
        Potential::OneMinusCos => 2.0 * std::f64::consts::PI,
    };
    match s.correction {
        Correction::Sphere => poly_radius.min(std::f64::consts::PI),
        _ => poly_radius,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(t: &str) -> RBig {
        Scalar::parse_rational(t).unwrap()
    }

    #[test]
    fn harmonic_preset() {
        let s = load_scenario("[scenario]\npreset = \"harmonic\"\n").unwrap();
        assert_eq!(s.n, 1);
        assert_eq!(s.correction, Correction::None);
        assert_eq!(s.k_max, 40);
        assert_eq!(s.m_trunc, 82);
        assert_eq!(s.precision_bits, 256);
        let v = validate_scenario(s).unwrap();
        assert_eq!(v.radius, f64::INFINITY);
    }

    #[test]
    fn cubic_and_double_well_potentials() {
        let c = preset("cubic", None).unwrap();
        assert_eq!(
            c.potential.coefficients(3),
            vec![rat("0"), rat("0"), rat("1/2"), rat("-1")]
        );
        let v = validate_scenario(c).unwrap();
        assert!((v.radius - 0.5).abs() < 1e-12);
        let d = preset("double_well", None).unwrap();
        assert_eq!(
            d.potential.coefficients(4),
            vec![rat("0"), rat("0"), rat("1/2"), rat("-1"), rat("1/2")]
        );
    }

    #[test]
    fn neg_quartic_coefficients() {
        let s = preset("neg_quartic", None).unwrap();
        assert_eq!(
            s.potential.coefficients(4),
            vec![rat("0"), rat("0"), rat("1/2"), rat("0"), rat("-1")]
        );
    }

    #[test]
    fn sphere_preset_series() {
        let s = preset("sphere", Some(2)).unwrap();
        let u = s.correction_series_to(6, Mode::Exact);
        let got: Vec<String> = u.coeffs().iter().map(|c| c.to_string()).collect();
        assert_eq!(got, ["1", "0", "-1/3", "0", "-1/45", "0", "-2/945"]);
        let v = s.potential.coefficients(4);
        assert_eq!(v[2], rat("1/2"));
        assert_eq!(v[4], rat("-1/24"));
        let vs = validate_scenario(s).unwrap();
        assert!((vs.radius - std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn sphere_correction_times_sine_is_q_cosine() {
        let m = 30;
        let u = q_cot_q(m, Mode::Exact);
        let sin = TruncatedSeries::from_rationals(&sin_over_q_coefficients(m), m, Mode::Exact, "s")
            .shift_up(1);
        let qcos =
            TruncatedSeries::from_rationals(&cos_coefficients(m), m, Mode::Exact, "c").shift_up(1);
        assert_eq!(u.mul(&sin).unwrap().coeffs(), qcos.coeffs());
    }

    #[test]
    fn every_preset_validates() {
        for (name, n) in [
            ("harmonic", None),
            ("cubic", None),
            ("neg_quartic", None),
            ("double_well", None),
            ("sphere", Some(2)),
            ("sphere", Some(3)),
            ("radial_on", Some(3)),
        ] {
            validate_scenario(preset(name, n).unwrap()).unwrap();
        }
    }

    #[test]
    fn odd_potential_in_three_dimensions_is_refused() {
        let text = r#"
            [scenario]
            n = 3
            correction = "radial_u1"
            potential = ["0", "0", "1/2", "-1"]
        "#;
        let s = load_scenario(text).unwrap();
        assert!(matches!(
            validate_scenario(s),
            Err(Error::HalfIntegerPower(_))
        ));
    }

    #[test]
    fn normalization_is_enforced() {
        let s = load_scenario("[scenario]\npotential = [\"0\", \"0\", \"1\"]\n").unwrap();
        assert!(matches!(validate_scenario(s), Err(Error::Normalization(_))));
    }

    #[test]
    fn config_errors_name_the_key() {
        let e = load_scenario("[scenario]\npreset = \"cubic\"\nbogus = 1\n").unwrap_err();
        assert!(e.is_config());
        assert!(e.to_string().contains("bogus"), "{e}");
        let e = load_scenario("[scenario]\npreset = \"cubic\"\nK = 10\nM = 20\n").unwrap_err();
        assert!(e.to_string().contains("scenario.M") && e.to_string().contains("2K + 2"));
        let e = load_scenario("[scenario]\npotential = [\"0\", \"x\"]\n").unwrap_err();
        assert!(e.to_string().contains("scenario.potential[1]"), "{e}");
        let e = load_scenario("[scenario]\nlabel = \"x\"\n").unwrap_err();
        assert!(e.to_string().contains("missing potential"));
        let e = load_scenario("[scenario]\npreset = \"wobble\"\n").unwrap_err();
        assert!(e.to_string().contains("unknown preset"));
        let e = load_scenario("[scenario]\npotential = [0, 0, 0.5]\n").unwrap_err();
        assert!(e.to_string().contains("binary float"));
    }

    #[test]
    fn serialize_round_trip() {
        let texts = [
            "[scenario]\npreset = \"sphere\"\nn = 3\nK = 12\n[eval]\npoints = [\"1/4\"]\n",
            "[scenario]\nlabel = \"q\"\npotential = [\"0\", 0, \"1/2\", \"0\", \"1\"]\nM = 90\nprecision_bits = 300\n",
        ];
        for t in texts {
            let s = load_scenario(t).unwrap();
            let again = load_scenario(&s.to_config_text()).unwrap();
            assert_eq!(s, again);
        }
    }
}
