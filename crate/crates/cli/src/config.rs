//! Run configuration: defaults per command, overlaid by flags and then by an
//! optional JSON file, then validated.

use std::f64::consts::PI;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use qmacro::macroscopicity::{make_weight, ConcaveFn, GSpec, WeightFamily, WeightFunction};
use qmacro::states::MAX_FULL_TENSOR;

use crate::parse::{parse_count_grid, parse_grid, parse_scalar, parse_sites, ConfigError};

/// Largest particle number accepted in the Dicke representation.
pub const MAX_DICKE: usize = 5000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Measure,
    Modes,
    SweepN,
    SweepAxis,
    Evolve,
    Verify,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StateKind {
    Coherent,
    Ghz,
    Product,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeasureKind {
    /// Trace-norm weighted measure.
    Tr,
    /// HS-norm weighted measure.
    Hs,
    /// Scaled measure.
    Sigma,
    Skew,
    Total,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Repr {
    Dicke,
    Full,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Channel {
    Dephasing,
    Dissipation,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    Json,
}

/// `long`: one row per value. `wide`: one row per grid point, one column per
/// series, for direct plotting.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Layout {
    Long,
    Wide,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SigmaRule {
    Fixed(f64),
    /// `sqrt(N ln N)`.
    SqrtNLogN,
}

impl SigmaRule {
    pub fn value(self, n: usize) -> f64 {
        match self {
            SigmaRule::Fixed(s) => s,
            SigmaRule::SqrtNLogN => (n as f64 * (n as f64).ln()).sqrt(),
        }
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        if text.trim().eq_ignore_ascii_case("sqrt-nlogn") {
            return Ok(SigmaRule::SqrtNLogN);
        }
        let s = parse_scalar(text)?;
        if s <= 0.0 {
            return Err(format!("sigma must be positive, got {s}"));
        }
        Ok(SigmaRule::Fixed(s))
    }
}

/// Textual weight: `power:P`, `scaled:S`, `g-delta`, `g-gaussian:S`,
/// `g-grid:x,g;x,g;...`, or `concave:F:S` with `F` one of `exp-cutoff`,
/// `sqrt`, `log1p`, `saturating`.
pub fn parse_weight(text: &str) -> Result<WeightFamily, String> {
    let t = text.trim();
    let (head, rest) = match t.split_once(':') {
        Some((h, r)) => (h, Some(r)),
        None => (t, None),
    };
    let arg = |name: &str| rest.ok_or_else(|| format!("weight `{name}` needs a parameter"));
    match head {
        "power" => Ok(WeightFamily::Power(parse_scalar(arg("power")?)?)),
        "scaled" => Ok(WeightFamily::Scaled(parse_scalar(arg("scaled")?)?)),
        "g-delta" if rest.is_none() => Ok(WeightFamily::FromG(GSpec::Delta)),
        "g-gaussian" => Ok(WeightFamily::FromG(GSpec::Gaussian { sigma: parse_scalar(arg("g-gaussian")?)? })),
        "g-grid" => {
            let pairs = parse_sites(arg("g-grid")?)?;
            let (x, g) = pairs.into_iter().unzip();
            Ok(WeightFamily::FromG(GSpec::Grid { x, g }))
        }
        "concave" => {
            let (f, s) = arg("concave")?.split_once(':').ok_or("weight `concave` needs F:SIGMA")?;
            let f = match f.trim() {
                "exp-cutoff" => ConcaveFn::ExpCutoff,
                "sqrt" => ConcaveFn::Sqrt,
                "log1p" => ConcaveFn::Log1p,
                "saturating" => ConcaveFn::Saturating,
                other => return Err(format!("unknown concave function `{other}`")),
            };
            Ok(WeightFamily::ConcaveScaled { sigma: parse_scalar(s)?, f })
        }
        other => Err(format!("unknown weight `{other}`")),
    }
}

/// The textual form accepted by [`parse_weight`].
pub fn weight_text(w: &WeightFamily) -> String {
    match w {
        WeightFamily::Power(p) => format!("power:{p}"),
        WeightFamily::Scaled(s) => format!("scaled:{s}"),
        WeightFamily::FromG(GSpec::Delta) => "g-delta".into(),
        WeightFamily::FromG(GSpec::Gaussian { sigma }) => format!("g-gaussian:{sigma}"),
        WeightFamily::FromG(GSpec::Grid { x, g }) => {
            let pairs: Vec<String> = x.iter().zip(g).map(|(a, b)| format!("{a},{b}")).collect();
            format!("g-grid:{}", pairs.join(";"))
        }
        WeightFamily::ConcaveScaled { sigma, f } => format!("concave:{}:{sigma}", f.name()),
    }
}

fn serialize_sigma<S: serde::Serializer>(rule: &SigmaRule, s: S) -> Result<S::Ok, S::Error> {
    match rule {
        SigmaRule::Fixed(x) => s.serialize_f64(*x),
        SigmaRule::SqrtNLogN => s.serialize_str("sqrt-NlogN"),
    }
}

fn serialize_weight<S: serde::Serializer>(w: &WeightFamily, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&weight_text(w))
}

fn parse_list<T, F: Fn(&str) -> Option<T>>(text: &str, what: &str, f: F) -> Result<Vec<T>, String> {
    let items: Result<Vec<T>, String> =
        text.split(',').map(|s| f(s.trim()).ok_or_else(|| format!("unknown {what} `{}`", s.trim()))).collect();
    let items = items?;
    if items.is_empty() {
        return Err(format!("no {what} given"));
    }
    Ok(items)
}

pub fn parse_states(text: &str) -> Result<Vec<StateKind>, String> {
    parse_list(text, "state", |s| match s {
        "coherent" => Some(StateKind::Coherent),
        "ghz" => Some(StateKind::Ghz),
        "product" => Some(StateKind::Product),
        _ => None,
    })
}

pub fn parse_measures(text: &str) -> Result<Vec<MeasureKind>, String> {
    parse_list(text, "measure", |s| match s {
        "tr" => Some(MeasureKind::Tr),
        "hs" => Some(MeasureKind::Hs),
        "sigma" => Some(MeasureKind::Sigma),
        "skew" => Some(MeasureKind::Skew),
        "total" => Some(MeasureKind::Total),
        _ => None,
    })
}

/// Everything a run needs. Serialized into the sidecar under the JSON file's
/// key names, so a sidecar's `config` can be fed back through `--config`.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct RunConfig {
    pub command: Command,
    #[serde(rename = "state")]
    pub states: Vec<StateKind>,
    pub n: Vec<usize>,
    pub theta: Vec<f64>,
    pub phi: f64,
    pub axis_theta: Vec<f64>,
    pub axis_phi: Vec<f64>,
    pub sites: Option<Vec<(f64, f64)>>,
    #[serde(rename = "measure")]
    pub measures: Vec<MeasureKind>,
    #[serde(serialize_with = "serialize_weight")]
    pub weight: WeightFamily,
    #[serde(serialize_with = "serialize_sigma")]
    pub sigma: SigmaRule,
    pub repr: Repr,
    pub channel: Channel,
    pub t_max: Option<f64>,
    pub points: usize,
    pub format: Format,
    pub layout: Layout,
    pub out: Option<PathBuf>,
    pub seed: u64,
    /// Acceptance criteria to run (`verify` only); empty means all.
    pub criteria: Vec<u32>,
}

impl RunConfig {
    /// Defaults for each command: the standard sweeps.
    pub fn defaults_for(command: Command) -> Self {
        let mut c = Self {
            command,
            states: vec![StateKind::Coherent, StateKind::Ghz],
            n: vec![10],
            theta: vec![PI / 2.0],
            phi: 0.0,
            axis_theta: vec![0.0],
            axis_phi: vec![0.0],
            sites: None,
            measures: vec![MeasureKind::Tr, MeasureKind::Hs, MeasureKind::Sigma],
            weight: WeightFamily::Power(2.0),
            sigma: SigmaRule::SqrtNLogN,
            repr: Repr::Dicke,
            channel: Channel::Dephasing,
            t_max: None,
            points: 200,
            format: Format::Csv,
            layout: Layout::Long,
            out: None,
            seed: 20160501,
            criteria: Vec::new(),
        };
        match command {
            Command::SweepN => {
                c.n = (2..=500).collect();
                c.theta = vec![PI / 2.0, PI / 4.0];
            }
            Command::SweepAxis => {
                c.n = vec![500];
                c.theta = vec![0.0, PI / 2.0];
                c.axis_theta = (0..181).map(|i| if i == 180 { PI } else { PI * i as f64 / 180.0 }).collect();
                c.measures = vec![MeasureKind::Tr, MeasureKind::Hs, MeasureKind::Sigma];
            }
            Command::Evolve => {
                c.n = vec![50];
                c.states = vec![StateKind::Ghz];
                c.theta = vec![PI / 2.0, PI / 4.0, PI / 8.0];
                c.measures = vec![MeasureKind::Sigma];
            }
            Command::Measure | Command::Modes | Command::Verify => {}
        }
        c
    }

    /// Default integration window for `evolve`.
    pub fn t_max_for(&self, n: usize) -> f64 {
        self.t_max.unwrap_or(match self.channel {
            Channel::Dephasing => 6.0 / (n * n) as f64,
            Channel::Dissipation => 3.0 / n as f64,
        })
    }

    pub fn weight_function(&self) -> Result<WeightFunction, ConfigError> {
        make_weight(self.weight.clone()).map_err(|e| ConfigError::new("weight", e.to_string()))
    }

    /// Checks every field; errors name the offending one.
    pub fn validate(&self) -> Result<(), ConfigError> {
        fn err(field: &str, message: impl Into<String>) -> ConfigError { ConfigError::new(field, message) }
        if self.states.is_empty() {
            return Err(err("state", "no states given"));
        }
        if self.measures.is_empty() {
            return Err(err("measure", "no measures given"));
        }
        if self.n.is_empty() {
            return Err(err("n", "empty grid"));
        }
        let max_n = match self.repr {
            Repr::Dicke => MAX_DICKE,
            Repr::Full => MAX_FULL_TENSOR,
        };
        if let Some(&bad) = self.n.iter().find(|&&n| n == 0 || n > max_n) {
            return Err(err("n", format!("{bad} is outside 1..={max_n} for the {:?} representation", self.repr)));
        }
        for (field, grid) in [("theta", &self.theta), ("axis-theta", &self.axis_theta), ("axis-phi", &self.axis_phi)] {
            if grid.is_empty() {
                return Err(err(field, "empty grid"));
            }
            if grid.iter().any(|x| !x.is_finite()) {
                return Err(err(field, "angles must be finite"));
            }
        }
        if !self.phi.is_finite() {
            return Err(err("phi", "angle must be finite"));
        }
        if let SigmaRule::Fixed(s) = self.sigma {
            if !(s > 0.0 && s.is_finite()) {
                return Err(err("sigma", format!("sigma must be positive, got {s}")));
            }
        }
        if self.sigma == SigmaRule::SqrtNLogN && self.measures.contains(&MeasureKind::Sigma) && self.n.contains(&1) {
            return Err(err("sigma", "sqrt-NlogN vanishes at N = 1; give a fixed sigma"));
        }
        let weight = self.weight_function()?;
        if self.measures.contains(&MeasureKind::Hs) && !weight.valid_for_hs() {
            return Err(err("weight", format!("{} is not admissible for the HS measure", weight.label())));
        }
        if self.states.contains(&StateKind::Product) {
            let sites = self.sites.as_ref().ok_or_else(|| err("sites", "product states need --sites"))?;
            if sites.is_empty() || sites.len() > MAX_FULL_TENSOR {
                return Err(err("sites", format!("between 1 and {MAX_FULL_TENSOR} sites are supported")));
            }
            if sites.iter().any(|(t, p)| !t.is_finite() || !p.is_finite()) {
                return Err(err("sites", "angles must be finite"));
            }
            if !self.n.contains(&sites.len()) {
                return Err(err("sites", format!("{} sites, but that N is not in the n grid", sites.len())));
            }
            if self.command == Command::Evolve {
                return Err(err("state", "evolve supports coherent and ghz states"));
            }
        }
        if self.command == Command::Evolve {
            if self.points < 2 {
                return Err(err("points", "need at least two time points"));
            }
            if let Some(t) = self.t_max {
                if !(t > 0.0 && t.is_finite()) {
                    return Err(err("t-max", "must be positive"));
                }
            }
            if self.axis_theta.len() != 1 || self.axis_phi.len() != 1 {
                return Err(err("axis-theta", "evolve takes a single axis"));
            }
            if self.repr == Repr::Dicke && self.n.iter().any(|&n| n > 400) {
                return Err(err("n", "evolve is limited to N <= 400"));
            }
        }
        if self.points == 0 {
            return Err(err("points", "must be positive"));
        }
        Ok(())
    }

    /// Applies a JSON overlay; parse errors name the key.
    pub fn overlay(&mut self, file: ConfigFile) -> Result<(), ConfigError> {
        fn fail(field: &'static str) -> impl Fn(String) -> ConfigError { move |m| ConfigError::new(field, m) }
        if let Some(c) = file.command {
            self.command = c;
        }
        if let Some(v) = file.state {
            self.states = parse_states(&v.joined()).map_err(fail("state"))?;
        }
        if let Some(v) = file.n {
            self.n = v.counts().map_err(fail("n"))?;
        }
        if let Some(v) = file.theta {
            self.theta = v.values().map_err(fail("theta"))?;
        }
        if let Some(v) = file.phi {
            self.phi = v.value().map_err(fail("phi"))?;
        }
        if let Some(v) = file.axis_theta {
            self.axis_theta = v.values().map_err(fail("axis-theta"))?;
        }
        if let Some(v) = file.axis_phi {
            self.axis_phi = v.values().map_err(fail("axis-phi"))?;
        }
        if let Some(v) = file.sites {
            self.sites = Some(v.pairs().map_err(fail("sites"))?);
        }
        if let Some(v) = file.measure {
            self.measures = parse_measures(&v.joined()).map_err(fail("measure"))?;
        }
        if let Some(w) = file.weight {
            self.weight = parse_weight(&w).map_err(fail("weight"))?;
        }
        if let Some(s) = file.sigma {
            self.sigma = match s {
                Scalar::Number(x) if x > 0.0 && x.is_finite() => SigmaRule::Fixed(x),
                Scalar::Number(x) => return Err(ConfigError::new("sigma", format!("sigma must be positive, got {x}"))),
                Scalar::Text(t) => SigmaRule::parse(&t).map_err(fail("sigma"))?,
            };
        }
        if let Some(r) = file.repr {
            self.repr = r;
        }
        if let Some(c) = file.channel {
            self.channel = c;
        }
        if let Some(t) = file.t_max {
            self.t_max = Some(t.value().map_err(fail("t-max"))?);
        }
        if let Some(p) = file.points {
            self.points = p;
        }
        if let Some(f) = file.format {
            self.format = f;
        }
        if let Some(l) = file.layout {
            self.layout = l;
        }
        if let Some(o) = file.out {
            self.out = Some(o);
        }
        if let Some(s) = file.seed {
            self.seed = s;
        }
        if let Some(c) = file.criteria {
            self.criteria = c;
        }
        Ok(())
    }
}

/// A number, or text in the scalar syntax.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Number(f64),
    Text(String),
}

impl Scalar {
    fn value(&self) -> Result<f64, String> {
        match self {
            Scalar::Number(x) if x.is_finite() => Ok(*x),
            Scalar::Number(x) => Err(format!("{x} is not finite")),
            Scalar::Text(t) => parse_scalar(t),
        }
    }
}

/// A grid given as a JSON array of scalars or as text in the grid syntax.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum GridValue {
    Number(f64),
    Items(Vec<Scalar>),
    Text(String),
}

impl GridValue {
    fn values(&self) -> Result<Vec<f64>, String> {
        let v = match self {
            GridValue::Number(x) => vec![*x],
            GridValue::Items(xs) => xs.iter().map(Scalar::value).collect::<Result<_, _>>()?,
            GridValue::Text(t) => return parse_grid(t),
        };
        if v.is_empty() {
            return Err("empty grid".into());
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err("grid values must be finite".into());
        }
        Ok(v)
    }

    fn counts(&self) -> Result<Vec<usize>, String> {
        match self {
            GridValue::Text(t) => parse_count_grid(t),
            _ => self
                .values()?
                .into_iter()
                .map(|x| {
                    if x >= 1.0 && x.fract() == 0.0 && x <= crate::parse::MAX_GRID as f64 {
                        Ok(x as usize)
                    } else {
                        Err(format!("{x} is not a positive integer"))
                    }
                })
                .collect(),
        }
    }
}

/// A comma list given as text or as a JSON array of strings.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum ListValue {
    One(String),
    Many(Vec<String>),
}

impl ListValue {
    fn joined(&self) -> String {
        match self {
            ListValue::One(s) => s.clone(),
            ListValue::Many(v) => v.join(","),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum SitesValue {
    Text(String),
    Pairs(Vec<(f64, f64)>),
}

impl SitesValue {
    fn pairs(&self) -> Result<Vec<(f64, f64)>, String> {
        match self {
            SitesValue::Text(t) => parse_sites(t),
            SitesValue::Pairs(p) if p.is_empty() => Err("no sites given".into()),
            SitesValue::Pairs(p) => Ok(p.clone()),
        }
    }
}

/// The JSON configuration file: any subset of the flags, by flag name.
#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct ConfigFile {
    pub command: Option<Command>,
    pub state: Option<ListValue>,
    pub n: Option<GridValue>,
    pub theta: Option<GridValue>,
    pub phi: Option<Scalar>,
    pub axis_theta: Option<GridValue>,
    pub axis_phi: Option<GridValue>,
    pub sites: Option<SitesValue>,
    pub measure: Option<ListValue>,
    pub weight: Option<String>,
    pub sigma: Option<Scalar>,
    pub repr: Option<Repr>,
    pub channel: Option<Channel>,
    pub t_max: Option<Scalar>,
    pub points: Option<usize>,
    pub format: Option<Format>,
    pub layout: Option<Layout>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub criteria: Option<Vec<u32>>,
}

/// Parses the JSON configuration text.
pub fn parse_config_json(text: &str) -> Result<ConfigFile, ConfigError> {
    serde_json::from_str(text).map_err(|e| {
        let msg = e.to_string();
        // serde names unknown and mistyped keys in backticks
        let field = msg
            .split('`')
            .nth(1)
            .filter(|_| msg.starts_with("unknown field") || msg.contains("field `"))
            .unwrap_or("config")
            .to_string();
        ConfigError::new(field, msg)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_parse() {
        assert_eq!(parse_weight("power:2").unwrap(), WeightFamily::Power(2.0));
        assert_eq!(parse_weight("g-delta").unwrap(), WeightFamily::FromG(GSpec::Delta));
        assert_eq!(
            parse_weight("concave:sqrt:2").unwrap(),
            WeightFamily::ConcaveScaled { sigma: 2.0, f: ConcaveFn::Sqrt }
        );
        assert!(matches!(parse_weight("g-grid:0,1;1,1").unwrap(), WeightFamily::FromG(GSpec::Grid { .. })));
        for w in ["power:1.5", "scaled:0.5", "g-gaussian:2", "g-grid:0,1;1,0.5", "concave:log1p:3"] {
            assert_eq!(weight_text(&parse_weight(w).unwrap()), w);
        }
        for bad in ["", "power", "g-delta:1", "concave:cube:1", "nope:1"] {
            assert!(parse_weight(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn overlay_names_fields() {
        let mut c = RunConfig::defaults_for(Command::Measure);
        let f = parse_config_json(r#"{"n": "2..4", "theta": [0.5, 1.0], "sigma": "sqrt-NlogN"}"#).unwrap();
        c.overlay(f).unwrap();
        assert_eq!(c.n, vec![2, 3, 4]);
        assert_eq!(c.theta, vec![0.5, 1.0]);
        let f = parse_config_json(r#"{"theta": [0, "pi/4"]}"#).unwrap();
        c.overlay(f).unwrap();
        assert_eq!(c.theta, vec![0.0, PI / 4.0]);
        let f = parse_config_json(r#"{"theta": "x"}"#).unwrap();
        assert_eq!(c.overlay(f).unwrap_err().field, "theta");
        let f = parse_config_json(r#"{"theta": [1, "x"]}"#).unwrap();
        assert_eq!(c.overlay(f).unwrap_err().field, "theta");
        let e = parse_config_json(r#"{"bogus": 1}"#).unwrap_err();
        assert_eq!(e.field, "bogus");
    }

    #[test]
    fn serialized_config_reloads() {
        let mut c = RunConfig::defaults_for(Command::SweepAxis);
        c.states = vec![StateKind::Product, StateKind::Ghz];
        c.sites = Some(vec![(0.5, 0.25), (1.0, -2.0)]);
        c.weight = WeightFamily::FromG(GSpec::Gaussian { sigma: 0.75 });
        c.t_max = Some(0.125);
        c.out = Some(PathBuf::from("x.csv"));
        for sigma in [SigmaRule::Fixed(1.5), SigmaRule::SqrtNLogN] {
            c.sigma = sigma;
            let text = serde_json::to_string(&c).unwrap();
            let mut back = RunConfig::defaults_for(Command::SweepAxis);
            back.overlay(parse_config_json(&text).unwrap()).unwrap();
            assert_eq!(back, c);
        }
    }

    #[test]
    fn validation_errors() {
        let mut c = RunConfig::defaults_for(Command::Measure);
        c.validate().unwrap();
        c.n = vec![0];
        assert_eq!(c.validate().unwrap_err().field, "n");
        let mut c = RunConfig::defaults_for(Command::Measure);
        c.weight = WeightFamily::Power(3.0);
        assert_eq!(c.validate().unwrap_err().field, "weight");
        c.measures = vec![MeasureKind::Tr];
        c.validate().unwrap();
        let mut c = RunConfig::defaults_for(Command::Measure);
        c.states = vec![StateKind::Product];
        assert_eq!(c.validate().unwrap_err().field, "sites");
        c.sigma = SigmaRule::Fixed(-1.0);
        assert_eq!(c.validate().unwrap_err().field, "sigma");
    }
}
