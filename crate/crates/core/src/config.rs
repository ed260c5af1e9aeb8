//! Study configuration: JSON schema, validation and content digest.

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::model::{parse, ModelAst, DEFAULT_VERTEX_LIMIT};
use crate::possibility::{Interval, PossibilityDist};
use crate::probability::{ProbabilityDist, RankCorrelationSpec, SamplingDesign};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("config parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("invalid config: {}", .0.join("; "))]
    Semantic(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DistSpec {
    Uniform { lo: f64, hi: f64 },
    Normal { mean: f64, sd: f64 },
    Lognormal { log_mean: f64, log_sd: f64 },
    Triangular { a: f64, mode: f64, b: f64 },
    Empirical { values: Vec<f64> },
}

impl DistSpec {
    pub fn build(&self) -> Result<ProbabilityDist, String> {
        let r = match self {
            DistSpec::Uniform { lo, hi } => ProbabilityDist::uniform(*lo, *hi),
            DistSpec::Normal { mean, sd } => ProbabilityDist::normal(*mean, *sd),
            DistSpec::Lognormal { log_mean, log_sd } => ProbabilityDist::lognormal(*log_mean, *log_sd),
            DistSpec::Triangular { a, mode, b } => ProbabilityDist::triangular(*a, *mode, *b),
            DistSpec::Empirical { values } => ProbabilityDist::empirical(values.clone()),
        };
        r.map_err(|e| e.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NestedPair {
    pub lo: f64,
    pub hi: f64,
    pub confidence: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PossibilitySpec {
    Triangular { a: f64, core: f64, b: f64 },
    Trapezoidal { a: f64, core_lo: f64, core_hi: f64, b: f64 },
    NestedIntervals { pairs: Vec<NestedPair> },
}

impl PossibilitySpec {
    pub fn build(&self) -> Result<PossibilityDist, String> {
        let r = match self {
            PossibilitySpec::Triangular { a, core, b } => PossibilityDist::triangular(*a, *core, *b),
            PossibilitySpec::Trapezoidal { a, core_lo, core_hi, b } => {
                PossibilityDist::trapezoidal(*a, *core_lo, *core_hi, *b)
            }
            PossibilitySpec::NestedIntervals { pairs } => {
                let mut built = Vec::with_capacity(pairs.len());
                for p in pairs {
                    built.push((Interval::new(p.lo, p.hi).map_err(|e| e.to_string())?, p.confidence));
                }
                PossibilityDist::from_nested_intervals(&built)
            }
        };
        r.map_err(|e| e.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LawSpec {
    Aleatory(DistSpec),
    Epistemic(PossibilitySpec),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterSpec {
    pub name: String,
    #[serde(flatten)]
    pub law: LawSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorrelationSpec {
    pub spearman: Vec<Vec<f64>>,
}

/// A number, or a keyword such as `"cdf"` / `"none"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NumberOrWord {
    Number(f64),
    Word(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GammaESpec {
    Alpha(f64),
    Tagged(GammaETagged),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GammaETagged {
    Fixed { alpha: f64 },
    RandomAlpha,
    Dual,
    Grid { levels: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TripletSpec {
    pub gamma_s: NumberOrWord,
    pub gamma_e: GammaESpec,
    pub gamma_a: NumberOrWord,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EpistemicEval {
    Interval,
    #[default]
    Vertex,
}

/// The config file exactly as written (after parsing).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub parameters: Vec<ParameterSpec>,
    pub model: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub correlation: Option<CorrelationSpec>,
    pub triplet: TripletSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample_size: Option<usize>,
    #[serde(default)]
    pub epistemic_eval: EpistemicEval,
    #[serde(default = "default_vertex_limit")]
    pub vertex_limit: usize,
    #[serde(default)]
    pub sampling: SamplingDesign,
    #[serde(default)]
    pub seed: u64,
    /// Lets the percentile bound count failed evaluations as +∞ instead of refusing.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub failures_as_infinite: bool,
}

fn default_vertex_limit() -> usize {
    DEFAULT_VERTEX_LIMIT
}

/// Statistical target γS.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GammaS {
    Quantile(f64),
    Cdf,
}

/// Epistemic summary γE, which fixes the α levels evaluated per sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GammaE {
    Fixed { alpha: f64 },
    RandomAlpha,
    Dual,
    Grid { levels: usize },
}

impl GammaE {
    pub fn name(&self) -> &'static str {
        match self {
            GammaE::Fixed { .. } => "fixed",
            GammaE::RandomAlpha => "random_alpha",
            GammaE::Dual => "dual",
            GammaE::Grid { .. } => "grid",
        }
    }
}

/// Decision maker's choice made before propagation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DmTriplet {
    pub gamma_s: GammaS,
    pub gamma_e: GammaE,
    /// Required confidence, or `None` for no accuracy statement.
    pub gamma_a: Option<f64>,
}

impl DmTriplet {
    pub fn new(gamma_s: GammaS, gamma_e: GammaE, gamma_a: Option<f64>) -> Result<Self, String> {
        if let GammaS::Quantile(q) = gamma_s {
            if !(q > 0.0 && q < 1.0) {
                return Err(format!("gamma_s quantile level {q} must lie in (0, 1)"));
            }
        }
        if let Some(a) = gamma_a {
            if !(a > 0.0 && a < 1.0) {
                return Err(format!("gamma_a {a} must lie in (0, 1)"));
            }
        }
        match gamma_e {
            GammaE::Fixed { alpha } if !(0.0..=1.0).contains(&alpha) => {
                Err(format!("fixed alpha {alpha} must lie in [0, 1]"))
            }
            GammaE::Grid { levels } if levels < 2 => Err(format!("grid needs at least 2 levels, got {levels}")),
            _ => Ok(Self { gamma_s, gamma_e, gamma_a }),
        }
    }
}

#[derive(Debug, Clone)]
pub enum ParameterLaw {
    Aleatory(ProbabilityDist),
    Epistemic(PossibilityDist),
}

#[derive(Debug, Clone)]
pub struct Parameter {
    pub name: String,
    pub law: ParameterLaw,
}

/// Validated study: K aleatory and L epistemic parameters bound to a model.
#[derive(Debug, Clone)]
pub struct StudyConfig {
    pub parameters: Vec<Parameter>,
    pub model: ModelAst,
    pub correlation: Option<RankCorrelationSpec>,
    pub triplet: DmTriplet,
    pub sample_size: Option<usize>,
    pub epistemic_eval: EpistemicEval,
    pub vertex_limit: usize,
    pub sampling: SamplingDesign,
    pub seed: u64,
    pub failures_as_infinite: bool,
    file: ConfigFile,
    digest: String,
}

impl fmt::Display for StudyConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "model '{}' with K={} aleatory and L={} epistemic parameters",
            self.model.source(),
            self.aleatory_count(),
            self.epistemic_count()
        )
    }
}

fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_alphabetic() || c == '_')
        && chars.all(|c| c.is_alphanumeric() || c == '_')
}

fn parse_triplet(t: &TripletSpec) -> Result<DmTriplet, String> {
    let gamma_s = match &t.gamma_s {
        NumberOrWord::Number(q) => GammaS::Quantile(*q),
        NumberOrWord::Word(w) if w == "cdf" => GammaS::Cdf,
        NumberOrWord::Word(w) => return Err(format!("gamma_s must be a quantile level or \"cdf\", got \"{w}\"")),
    };
    let gamma_a = match &t.gamma_a {
        NumberOrWord::Number(a) => Some(*a),
        NumberOrWord::Word(w) if w == "none" => None,
        NumberOrWord::Word(w) => return Err(format!("gamma_a must be a confidence or \"none\", got \"{w}\"")),
    };
    let gamma_e = match &t.gamma_e {
        GammaESpec::Alpha(alpha) => GammaE::Fixed { alpha: *alpha },
        GammaESpec::Tagged(GammaETagged::Fixed { alpha }) => GammaE::Fixed { alpha: *alpha },
        GammaESpec::Tagged(GammaETagged::RandomAlpha) => GammaE::RandomAlpha,
        GammaESpec::Tagged(GammaETagged::Dual) => GammaE::Dual,
        GammaESpec::Tagged(GammaETagged::Grid { levels }) => GammaE::Grid { levels: *levels },
    };
    DmTriplet::new(gamma_s, gamma_e, gamma_a)
}

impl StudyConfig {
    /// Validates a parsed config file, collecting every problem found.
    pub fn from_file(file: ConfigFile) -> Result<Self, ConfigError> {
        let mut errors = Vec::new();
        if file.parameters.is_empty() {
            errors.push("at least one parameter must be declared".to_string());
        }
        let mut seen = BTreeSet::new();
        let mut parameters = Vec::with_capacity(file.parameters.len());
        for p in &file.parameters {
            if !is_identifier(&p.name) {
                errors.push(format!("parameter name '{}' is not an identifier", p.name));
            }
            if !seen.insert(p.name.as_str()) {
                errors.push(format!("parameter '{}' is declared twice", p.name));
            }
            let law = match &p.law {
                LawSpec::Aleatory(d) => d.build().map(ParameterLaw::Aleatory),
                LawSpec::Epistemic(d) => d.build().map(ParameterLaw::Epistemic),
            };
            match law {
                Ok(law) => parameters.push(Parameter { name: p.name.clone(), law }),
                Err(e) => errors.push(format!("parameter '{}': {e}", p.name)),
            }
        }

        let model = match parse(&file.model) {
            Ok(ast) => {
                for v in ast.variables() {
                    if !seen.contains(v.as_str()) {
                        errors.push(format!("model variable '{v}' is not a declared parameter"));
                    }
                }
                Some(ast)
            }
            Err(e) => {
                errors.push(format!("model: {e}"));
                None
            }
        };

        let k = file.parameters.iter().filter(|p| matches!(p.law, LawSpec::Aleatory(_))).count();
        let correlation = match &file.correlation {
            None => None,
            Some(c) => {
                if c.spearman.len() != k {
                    errors.push(format!(
                        "correlation matrix has dimension {} but there are {k} aleatory parameters",
                        c.spearman.len()
                    ));
                    None
                } else {
                    match RankCorrelationSpec::new(c.spearman.clone()) {
                        Ok(s) => Some(s),
                        Err(e) => {
                            errors.push(format!("correlation: {e}"));
                            None
                        }
                    }
                }
            }
        };

        let triplet = parse_triplet(&file.triplet).map_err(|e| errors.push(format!("triplet: {e}"))).ok();
        if file.sample_size == Some(0) {
            errors.push("sample_size must be at least 1".into());
        }
        if file.vertex_limit == 0 || file.vertex_limit > 30 {
            errors.push(format!("vertex_limit {} must lie in 1..=30", file.vertex_limit));
        }

        if !errors.is_empty() {
            return Err(ConfigError::Semantic(errors));
        }
        let (Some(model), Some(triplet)) = (model, triplet) else {
            unreachable!("errors recorded above");
        };
        let digest = digest_of(&file);
        Ok(Self {
            parameters,
            model,
            correlation,
            triplet,
            sample_size: file.sample_size,
            epistemic_eval: file.epistemic_eval,
            vertex_limit: file.vertex_limit,
            sampling: file.sampling,
            seed: file.seed,
            failures_as_infinite: file.failures_as_infinite,
            file,
            digest,
        })
    }

    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let file: ConfigFile = serde_json::from_str(text).map_err(|e| ConfigError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        Self::from_file(file)
    }

    /// Replaces the seed, updating the digest.
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self.file.seed = seed;
        self.digest = digest_of(&self.file);
        self
    }

    pub fn file(&self) -> &ConfigFile {
        &self.file
    }

    /// SHA-256 of the canonical serialisation, effective seed included.
    pub fn digest(&self) -> &str {
        &self.digest
    }

    pub fn aleatory_count(&self) -> usize {
        self.parameters.iter().filter(|p| matches!(p.law, ParameterLaw::Aleatory(_))).count()
    }

    pub fn epistemic_count(&self) -> usize {
        self.parameters.len() - self.aleatory_count()
    }

    pub fn parameter(&self, name: &str) -> Option<&Parameter> {
        self.parameters.iter().find(|p| p.name == name)
    }
}

fn digest_of(file: &ConfigFile) -> String {
    let bytes = serde_json::to_vec(file).expect("config serialises");
    hex::encode(Sha256::digest(&bytes))
}

/// Reads and validates a JSON config file.
pub fn load_config(path: &Path) -> Result<StudyConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    StudyConfig::from_json(&text)
}
