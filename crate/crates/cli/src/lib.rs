//! Front end for `valuata`: field descriptors, requests, JSON reports and the
//! built-in example corpus.

pub mod corpus;
pub mod field;
pub mod report;
pub mod sampling;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use thiserror::Error;

use valuata::best_f::{self, BestError};
use valuata::extension::ExtError;
use valuata::kummer::{self, KummerError};
use valuata::norm_ideal::NormIdealError;
use valuata::{parse_expr, ASExtension, ExtElt};

pub use field::{FieldFlags, FieldKind, FieldSpec};

pub const SCHEMA: u64 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    /// A check that holds by theorem failed.
    #[error("mathematical check failed: {0}")]
    Math(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Math(_) => 2,
        }
    }
}

impl From<BestError> for CliError {
    fn from(e: BestError) -> Self {
        match e {
            BestError::NoImprovement { .. }
            | BestError::Mismatch { .. }
            | BestError::Extension(ExtError::ResidualAlphaComponent { .. }) => {
                CliError::Math(e.to_string())
            }
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<KummerError> for CliError {
    fn from(e: KummerError) -> Self {
        match e {
            KummerError::NoImprovement { .. } => CliError::Math(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<NormIdealError> for CliError {
    fn from(e: NormIdealError) -> Self {
        match e {
            NormIdealError::ConstructionAssertFailed(_)
            | NormIdealError::IdentityViolated { .. }
            | NormIdealError::Extension(ExtError::ResidualAlphaComponent { .. }) => {
                CliError::Math(e.to_string())
            }
            NormIdealError::Swan(b) => b.into(),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<ExtError> for CliError {
    fn from(e: ExtError) -> Self {
        match e {
            ExtError::ResidualAlphaComponent { .. } => CliError::Math(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    AnalyzeAs,
    NormalizeAs,
    ClassifyKummer,
    NormalizeKummer,
    VerifyNormIdeal,
    RunCorpus,
}

impl Command {
    pub const ALL: [Command; 6] = [
        Command::AnalyzeAs,
        Command::NormalizeAs,
        Command::ClassifyKummer,
        Command::NormalizeKummer,
        Command::VerifyNormIdeal,
        Command::RunCorpus,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::AnalyzeAs => "analyze-as",
            Command::NormalizeAs => "normalize-as",
            Command::ClassifyKummer => "classify-kummer",
            Command::NormalizeKummer => "normalize-kummer",
            Command::VerifyNormIdeal => "verify-norm-ideal",
            Command::RunCorpus => "run-corpus",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.name() == name)
    }

    pub fn default_field(self) -> FieldKind {
        match self {
            Command::ClassifyKummer | Command::NormalizeKummer => FieldKind::Cyclo,
            _ => FieldKind::Series,
        }
    }
}

/// A fully specified invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Request {
    pub command: Command,
    pub field: Option<FieldSpec>,
    pub expr: Option<String>,
    pub budget: usize,
    pub seed: u64,
    pub samples: usize,
    /// Explicit generators for `verify-norm-ideal`, one DSL expression per
    /// coefficient, separated by `;`.
    pub b: Vec<String>,
}

pub const DEFAULT_BUDGET: usize = 32;
pub const DEFAULT_SAMPLES: usize = 20;

impl Request {
    pub fn new(command: Command) -> Self {
        Request {
            command,
            field: None,
            expr: None,
            budget: DEFAULT_BUDGET,
            seed: 0,
            samples: DEFAULT_SAMPLES,
            b: Vec::new(),
        }
    }

    pub fn with_field(mut self, field: FieldSpec) -> Self {
        self.field = Some(field);
        self
    }

    pub fn with_expr(mut self, expr: &str) -> Self {
        self.expr = Some(expr.to_string());
        self
    }

    pub fn with_budget(mut self, budget: usize) -> Self {
        self.budget = budget;
        self
    }

    pub fn with_samples(mut self, samples: usize, seed: u64) -> Self {
        self.samples = samples;
        self.seed = seed;
        self
    }

    pub fn to_json(&self) -> Value {
        json!({
            "command": self.command.name(),
            "field": self.field.as_ref().map(FieldSpec::to_json),
            "expr": self.expr,
            "budget": self.budget,
            "seed": self.seed,
            "samples": self.samples,
            "b": self.b,
        })
    }

    pub fn from_json(v: &Value) -> Result<Self, CliError> {
        let bad = |what: &str| CliError::Usage(format!("request: missing or bad `{what}`"));
        let command = v["command"]
            .as_str()
            .and_then(Command::from_name)
            .ok_or_else(|| bad("command"))?;
        let field = match &v["field"] {
            Value::Null => None,
            f => Some(FieldSpec::from_json(f)?),
        };
        let expr = match &v["expr"] {
            Value::Null => None,
            Value::String(s) => Some(s.clone()),
            _ => return Err(bad("expr")),
        };
        let uint = |key: &str| v[key].as_u64().ok_or_else(|| bad(key));
        let b = v["b"]
            .as_array()
            .ok_or_else(|| bad("b"))?
            .iter()
            .map(|x| x.as_str().map(str::to_string).ok_or_else(|| bad("b")))
            .collect::<Result<_, _>>()?;
        Ok(Request {
            command,
            field,
            expr,
            budget: uint("budget")? as usize,
            seed: uint("seed")?,
            samples: uint("samples")? as usize,
            b,
        })
    }

    fn field_spec(&self) -> Result<FieldSpec, CliError> {
        match &self.field {
            Some(f) => Ok(f.clone()),
            None => FieldSpec::from_flags(&FieldFlags::default(), self.command.default_field()),
        }
    }

    fn expr(&self) -> Result<&str, CliError> {
        self.expr
            .as_deref()
            .ok_or_else(|| CliError::Usage(format!("{} needs an expression", self.command.name())))
    }
}

/// A report plus the number of failed theorem-level checks it contains.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub report: Value,
    pub violations: usize,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.violations == 0 {
            0
        } else {
            2
        }
    }

    /// Pretty JSON with a trailing newline.
    pub fn render(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.report).expect("reports serialize");
        s.push('\n');
        s
    }
}

fn parse_err(e: valuata::ParseError) -> CliError {
    CliError::Usage(e.to_string())
}

pub fn run(req: &Request) -> Result<Outcome, CliError> {
    let (mut report, violations) = match req.command {
        Command::AnalyzeAs => {
            let k = req.field_spec()?.build_series()?;
            let f = parse_expr(req.expr()?, &k).map_err(parse_err)?;
            (report::analyze_as(&k, &f)?, 0)
        }
        Command::NormalizeAs => {
            let k = req.field_spec()?.build_series()?;
            let f = parse_expr(req.expr()?, &k).map_err(parse_err)?;
            let outcome = best_f::normalize(&k, &f, req.budget)?;
            (report::normalize_as(&k, &f, &outcome, false)?, 0)
        }
        Command::ClassifyKummer => {
            let k = req.field_spec()?.build_cyclo()?;
            let h = parse_expr(req.expr()?, &k).map_err(parse_err)?;
            (report::classify_kummer(&k, &h)?, 0)
        }
        Command::NormalizeKummer => {
            let k = req.field_spec()?.build_cyclo()?;
            let h = parse_expr(req.expr()?, &k).map_err(parse_err)?;
            let outcome = kummer::normalize_h(&k, &h, req.budget)?;
            (report::normalize_kummer(&k, &h, &outcome)?, 0)
        }
        Command::VerifyNormIdeal => {
            let k = req.field_spec()?.build_series()?;
            let f = parse_expr(req.expr()?, &k).map_err(parse_err)?;
            let ext = ASExtension::new(k, f)?;
            let given = req
                .b
                .iter()
                .map(|text| parse_generator(&ext, text))
                .collect::<Result<Vec<_>, _>>()?;
            let mut rng = ChaCha8Rng::seed_from_u64(req.seed);
            let random = sampling::generators(&ext, &mut rng, req.samples);
            let r = report::verify_norm_ideal(&ext, &given, &random, req.budget)?;
            let failed = r["total"].as_u64().unwrap_or(0) - r["passed"].as_u64().unwrap_or(0);
            (r, failed as usize)
        }
        Command::RunCorpus => {
            let r = corpus::run_corpus(req.seed)?;
            let failed = r["total"].as_u64().unwrap_or(0) - r["passed"].as_u64().unwrap_or(0);
            (r, failed as usize)
        }
    };
    report["schema"] = json!(SCHEMA);
    report["request"] = req.to_json();
    Ok(Outcome { report, violations })
}

/// Parses `c0; c1; ...; c(p-1)`, the coefficients of `1, a, ..., a^(p-1)`.
/// Missing trailing coefficients are zero.
pub fn parse_generator(ext: &ASExtension, text: &str) -> Result<ExtElt, CliError> {
    let k = ext.base();
    let parts: Vec<&str> = text.split(';').collect();
    if parts.len() > ext.p() {
        return Err(CliError::Usage(format!(
            "generator `{text}` has {} coefficients, at most {} allowed",
            parts.len(),
            ext.p()
        )));
    }
    let mut coeffs = Vec::with_capacity(ext.p());
    for part in &parts {
        coeffs.push(parse_expr(part.trim(), k).map_err(parse_err)?);
    }
    coeffs.resize(ext.p(), k.zero());
    Ok(ext.from_coeffs(coeffs)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn request_round_trips_through_json() {
        let mut req = Request::new(Command::VerifyNormIdeal)
            .with_field(FieldSpec::laurent("gf:2"))
            .with_expr("X^(-3)")
            .with_samples(5, 9);
        req.b.push("1; X".into());
        assert_eq!(Request::from_json(&req.to_json()), Ok(req));
        let k = Request::new(Command::ClassifyKummer).with_field(FieldSpec::cyclo(3, 2, true));
        assert_eq!(Request::from_json(&k.to_json()), Ok(k));
    }

    #[test]
    fn command_names_round_trip() {
        for c in Command::ALL {
            assert_eq!(Command::from_name(c.name()), Some(c));
        }
        assert_eq!(Command::from_name("nope"), None);
    }

    #[test]
    fn missing_expression_is_a_usage_error() {
        let err = run(&Request::new(Command::AnalyzeAs)).unwrap_err();
        assert_eq!(err.exit_code(), 1);
    }

    #[test]
    fn generator_text_fills_missing_coefficients() {
        let k = FieldSpec::laurent("gf:3").build_series().unwrap();
        let f = parse_expr("X^(-1)", &k).unwrap();
        let ext = ASExtension::new(k, f).unwrap();
        let b = parse_generator(&ext, "1; X").unwrap();
        assert!(b.coeff(2).has_no_terms());
        assert!(parse_generator(&ext, "1;2;3;4").is_err());
    }
}
