//! Scenario files: TOML or JSON, checked into typed economies.
//!
//! Every problem is reported as a [`Diagnostic`] carrying the field path
//! (`agents[2].gamma`) and, for syntax and type errors, the line.

use std::fmt;

use credeq::econ::{validate_economy, Param, Rule, StaticAgent, StaticEconomy, Technology, Violation};
use credeq::ramsey::{validate_dynamic, DynamicAgent, DynamicEconomy, ProductivityPath};
use serde::{Deserialize, Serialize};

pub const DEFAULT_HORIZON: usize = 100;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Static,
    Ramsey,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TechKind {
    #[default]
    Linear,
    CobbDouglas,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentRecord {
    pub id: usize,
    #[serde(default)]
    pub tech: TechKind,
    #[serde(rename = "A", default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(rename = "A_path", default, skip_serializing_if = "Option::is_none")]
    pub a_path: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    pub gamma: f64,
    /// Static wealth, or initial savings in a dynamic scenario.
    #[serde(rename = "S", default, skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepParam {
    A,
    #[serde(rename = "gamma")]
    Gamma,
    S,
}

impl From<SweepParam> for Param {
    fn from(p: SweepParam) -> Param {
        match p {
            SweepParam::A => Param::A,
            SweepParam::Gamma => Param::Gamma,
            SweepParam::S => Param::S,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub agent: usize,
    pub param: SweepParam,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub model: Model,
    pub agents: Vec<AgentRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    /// Field path such as `agents[0].gamma`; empty for document-level errors.
    pub path: String,
    pub line: Option<usize>,
    pub message: String,
}

impl Diagnostic {
    fn at(path: impl Into<String>, message: impl Into<String>) -> Self {
        Diagnostic { path: path.into(), line: None, message: message.into() }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(line) = self.line {
            write!(f, "line {line}: ")?;
        }
        if !self.path.is_empty() {
            write!(f, "{}: ", self.path)?;
        }
        f.write_str(&self.message)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Toml,
    Json,
}

impl Format {
    /// `.json` files are JSON, `.toml` files TOML; otherwise a leading `{`
    /// selects JSON.
    pub fn detect(name: &str, text: &str) -> Format {
        if name.ends_with(".json") {
            Format::Json
        } else if name.ends_with(".toml") || !text.trim_start().starts_with('{') {
            Format::Toml
        } else {
            Format::Json
        }
    }
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].bytes().filter(|&b| b == b'\n').count() + 1
}

fn path_of(path: &serde_path_to_error::Path) -> String {
    let p = path.to_string();
    if p == "." {
        String::new()
    } else {
        p
    }
}

/// Parse and check a scenario. Syntax, type and cross-field problems are
/// all collected before returning.
pub fn parse_scenario(bytes: &[u8], format: Format) -> Result<ScenarioFile, Vec<Diagnostic>> {
    let text = std::str::from_utf8(bytes).map_err(|e| vec![Diagnostic::at("", format!("not UTF-8: {e}"))])?;
    let file: ScenarioFile = match format {
        Format::Json => {
            let mut de = serde_json::Deserializer::from_str(text);
            serde_path_to_error::deserialize(&mut de).map_err(|e| {
                let inner = e.inner();
                vec![Diagnostic { path: path_of(e.path()), line: Some(inner.line()), message: inner.to_string() }]
            })?
        }
        Format::Toml => {
            let de = toml::de::Deserializer::parse(text).map_err(|e| {
                vec![Diagnostic { path: String::new(), line: e.span().map(|s| line_of(text, s.start)), message: e.message().into() }]
            })?;
            serde_path_to_error::deserialize(de).map_err(|e| {
                let inner = e.inner();
                let line = inner.span().map(|s| line_of(text, s.start));
                vec![Diagnostic { path: path_of(e.path()), line, message: inner.message().into() }]
            })?
        }
    };
    let problems = check_fields(&file);
    if problems.is_empty() {
        Ok(file)
    } else {
        Err(problems)
    }
}

fn check_fields(file: &ScenarioFile) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    if file.agents.is_empty() {
        out.push(Diagnostic::at("agents", "at least one agent is required"));
    }
    let horizon = file.horizon.unwrap_or(DEFAULT_HORIZON);
    for (i, ag) in file.agents.iter().enumerate() {
        let at = |field: &str| format!("agents[{i}].{field}");
        match (ag.a, &ag.a_path) {
            (None, None) => out.push(Diagnostic::at(at("A"), "missing required key A (or A_path)")),
            (Some(_), Some(_)) => out.push(Diagnostic::at(at("A_path"), "give either A or A_path, not both")),
            _ => {}
        }
        if ag.tech == TechKind::CobbDouglas && ag.alpha.is_none() {
            out.push(Diagnostic::at(at("alpha"), "missing required key alpha for cobb_douglas"));
        }
        if ag.tech == TechKind::Linear && ag.alpha.is_some() {
            out.push(Diagnostic::at(at("alpha"), "alpha applies only to cobb_douglas"));
        }
        match file.model {
            Model::Static => {
                if ag.s.is_none() {
                    out.push(Diagnostic::at(at("S"), "missing required key S"));
                }
                for (field, given) in [("A_path", ag.a_path.is_some()), ("w0", ag.w0.is_some()), ("beta", ag.beta.is_some())] {
                    if given {
                        out.push(Diagnostic::at(at(field), "only valid in a ramsey scenario"));
                    }
                }
            }
            Model::Ramsey => {
                if ag.beta.is_none() {
                    out.push(Diagnostic::at(at("beta"), "missing required key beta"));
                }
                match (ag.s, ag.w0) {
                    (None, None) => out.push(Diagnostic::at(at("w0"), "missing required key w0 (or S)")),
                    (Some(_), Some(_)) => out.push(Diagnostic::at(at("w0"), "give either S or w0, not both")),
                    _ => {}
                }
                if ag.tech != TechKind::Linear {
                    out.push(Diagnostic::at(at("tech"), "ramsey scenarios need linear technologies"));
                }
                if let Some(p) = &ag.a_path {
                    if p.len() < horizon {
                        out.push(Diagnostic::at(
                            at("A_path"),
                            format!("A_path shorter than horizon ({} < {horizon})", p.len()),
                        ));
                    }
                }
            }
        }
    }
    if file.model == Model::Static && file.horizon.is_some() {
        out.push(Diagnostic::at("horizon", "only valid in a ramsey scenario"));
    }
    if let Some(sw) = &file.sweep {
        if !file.agents.iter().any(|a| a.id == sw.agent) {
            out.push(Diagnostic::at("sweep.agent", format!("no agent with id {}", sw.agent)));
        }
        if !(sw.from < sw.to) {
            out.push(Diagnostic::at("sweep.to", "sweep needs from < to"));
        }
        if sw.steps == 0 {
            out.push(Diagnostic::at("sweep.steps", "steps must be positive"));
        }
    }
    out
}

/// Map library violations to the scenario fields that caused them.
fn locate(file: &ScenarioFile, violations: Vec<Violation>) -> Vec<Diagnostic> {
    violations
        .into_iter()
        .map(|v| {
            let index = v.agent.and_then(|id| file.agents.iter().position(|a| a.id == id));
            let path = match (index, v.rule) {
                (None, Rule::EmptyHorizon) => "horizon".to_string(),
                (None, _) => "agents".to_string(),
                (Some(i), rule) => {
                    let ag = &file.agents[i];
                    let field = match rule {
                        Rule::GammaRange => "gamma",
                        Rule::WealthNonPositive if ag.w0.is_some() => "w0",
                        Rule::WealthNonPositive => "S",
                        Rule::TfpNonPositive | Rule::NonStrictOrdering if ag.a_path.is_some() => "A_path",
                        Rule::TfpNonPositive | Rule::NonStrictOrdering => "A",
                        Rule::AlphaRange => "alpha",
                        Rule::BetaRange => "beta",
                        Rule::DuplicateId => "id",
                        _ => "",
                    };
                    if field.is_empty() {
                        format!("agents[{i}]")
                    } else {
                        format!("agents[{i}].{field}")
                    }
                }
            };
            let mut message = v.rule.to_string();
            if !v.detail.is_empty() {
                message = format!("{message} ({})", v.detail);
            }
            Diagnostic::at(path, message)
        })
        .collect()
}

impl ScenarioFile {
    pub fn to_static(&self) -> Result<StaticEconomy, Vec<Diagnostic>> {
        if self.model != Model::Static {
            return Err(vec![Diagnostic::at("model", "expected a static scenario")]);
        }
        let agents = self
            .agents
            .iter()
            .map(|ag| {
                let a = ag.a.unwrap_or(f64::NAN);
                let tech = match ag.tech {
                    TechKind::Linear => Technology::linear(a),
                    TechKind::CobbDouglas => Technology::cobb_douglas(a, ag.alpha.unwrap_or(f64::NAN)),
                };
                StaticAgent::new(ag.id, tech, ag.gamma, ag.s.unwrap_or(f64::NAN))
            })
            .collect();
        let econ = StaticEconomy::new(agents);
        let bad = validate_economy(&econ);
        if bad.is_empty() {
            Ok(econ)
        } else {
            Err(locate(self, bad))
        }
    }

    /// `horizon` overrides the file's horizon.
    pub fn to_dynamic(&self, horizon: Option<usize>) -> Result<DynamicEconomy, Vec<Diagnostic>> {
        if self.model != Model::Ramsey {
            return Err(vec![Diagnostic::at("model", "expected a ramsey scenario")]);
        }
        let horizon = horizon.or(self.horizon).unwrap_or(DEFAULT_HORIZON);
        let mut short = Vec::new();
        let agents = self
            .agents
            .iter()
            .enumerate()
            .map(|(i, ag)| {
                let beta = ag.beta.unwrap_or(f64::NAN);
                let a = match &ag.a_path {
                    Some(p) => {
                        if p.len() < horizon {
                            short.push(Diagnostic::at(
                                format!("agents[{i}].A_path"),
                                format!("A_path shorter than horizon ({} < {horizon})", p.len()),
                            ));
                        }
                        ProductivityPath::Path(p.clone())
                    }
                    None => ProductivityPath::Constant(ag.a.unwrap_or(f64::NAN)),
                };
                let w0 = ag.w0.unwrap_or_else(|| ag.s.unwrap_or(f64::NAN) / beta);
                DynamicAgent::new(ag.id, beta, ag.gamma, w0, a)
            })
            .collect();
        if !short.is_empty() {
            return Err(short);
        }
        let econ = DynamicEconomy::new(agents, horizon);
        let bad = validate_dynamic(&econ);
        if bad.is_empty() {
            Ok(econ)
        } else {
            Err(locate(self, bad))
        }
    }
}
