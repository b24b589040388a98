//! File formats.
//!
//! Scenarios, traces, predictions and verification reports are JSON; sweep
//! tables are CSV with the header
//! `param_value,n_star_exact,n_star_approx,regime,empirical_tip`.
//!
//! JSON numbers use the shortest representation that round-trips exactly.
//! Non-finite values (the `+inf` sentinel for marginal scenarios) are written
//! as the strings `"inf"`, `"-inf"` or `"nan"`. CSV reals are written with
//! 17 significant digits in exponent form, non-finite values as `inf`,
//! `-inf`, `nan`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::attention::{CandidateSet, GenerationTrace, Scenario, StepRecord, TokenClass, VocabEntry};
use crate::error::{Error, Result};
use crate::experiments::{SweepParameter, SweepPoint, SweepRow, SweepSpec, VerificationReport};
use crate::geometry::{Embedding, GramMatrix};
use crate::tipping::{Regime, TippingPrediction};

pub const FORMAT_VERSION: u32 = 1;
pub const SWEEP_CSV_HEADER: &str = "param_value,n_star_exact,n_star_approx,regime,empirical_tip";

fn format_version() -> u32 {
    FORMAT_VERSION
}

/// f64 that may be non-finite: a JSON number when finite, otherwise a string.
mod lossy_float {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            s.serialize_f64(*x)
        } else {
            s.serialize_str(&super::render_non_finite(*x))
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Str(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(x) => Ok(x),
            Repr::Str(s) => match s.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                other => Err(serde::de::Error::custom(format!("invalid number {other:?}"))),
            },
        }
    }
}

fn render_non_finite(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

fn parse_error(e: serde_json::Error) -> Error {
    Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    }
}

fn from_json<'a, T: Deserialize<'a>>(bytes: &'a [u8]) -> Result<T> {
    let text = std::str::from_utf8(bytes).map_err(|e| Error::Parse {
        line: 0,
        column: 0,
        message: format!("input is not UTF-8: {e}"),
    })?;
    serde_json::from_str(text).map_err(parse_error)
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("documents always serialize");
    s.push('\n');
    s
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TokenDocument {
    pub label: String,
    pub class: TokenClass,
    pub vector: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioDocument {
    #[serde(default = "format_version")]
    pub version: u32,
    pub dimension: usize,
    pub tokens: Vec<TokenDocument>,
    pub prompt: Vec<String>,
    pub good: String,
    pub bad: String,
    pub max_iterations: usize,
    /// `substantive` (default): only the Good and Bad tokens may be emitted.
    /// `full`: any vocabulary entry may be emitted.
    #[serde(default)]
    pub candidates: CandidateSet,
}

impl ScenarioDocument {
    pub fn from_scenario(s: &Scenario) -> Self {
        let label = |i: usize| s.vocab()[i].label.clone();
        ScenarioDocument {
            version: FORMAT_VERSION,
            dimension: s.dim(),
            tokens: s
                .vocab()
                .iter()
                .map(|e| TokenDocument {
                    label: e.label.clone(),
                    class: e.class,
                    vector: e.embedding.as_slice().to_vec(),
                })
                .collect(),
            prompt: s.prompt().iter().map(|&t| label(t)).collect(),
            good: label(s.good_index()),
            bad: label(s.bad_index()),
            max_iterations: s.max_iterations(),
            candidates: s.candidates(),
        }
    }

    pub fn into_scenario(self) -> Result<Scenario> {
        if self.version != FORMAT_VERSION {
            return Err(Error::validation(
                "version",
                format!("unsupported version {}, expected {FORMAT_VERSION}", self.version),
            ));
        }
        if self.dimension == 0 {
            return Err(Error::validation("dimension", "must be at least 1"));
        }
        let mut vocab = Vec::with_capacity(self.tokens.len());
        for (i, t) in self.tokens.into_iter().enumerate() {
            if t.vector.len() != self.dimension {
                return Err(Error::validation(
                    format!("tokens[{i}].vector"),
                    format!("length {} differs from dimension {}", t.vector.len(), self.dimension),
                ));
            }
            if vocab.iter().any(|e: &VocabEntry| e.label == t.label) {
                return Err(Error::validation(
                    format!("tokens[{i}].label"),
                    format!("duplicate label {:?}", t.label),
                ));
            }
            let embedding = Embedding::new(t.vector)
                .map_err(|e| Error::validation(format!("tokens[{i}].vector"), e.to_string()))?;
            vocab.push(VocabEntry::new(t.label, embedding, t.class));
        }
        let find = |label: &str| vocab.iter().position(|e| e.label == label);

        for (field, label, class) in [
            ("good", &self.good, TokenClass::Good),
            ("bad", &self.bad, TokenClass::Bad),
        ] {
            let i = find(label).ok_or_else(|| {
                Error::validation(field, format!("label {label:?} is not among the tokens"))
            })?;
            if vocab[i].class != class {
                return Err(Error::validation(
                    field,
                    format!("token {label:?} has class {:?}, expected {class:?}", vocab[i].class),
                ));
            }
            if let Some(j) = (0..vocab.len()).find(|&j| j != i && vocab[j].class == class) {
                return Err(Error::validation(
                    format!("tokens[{j}].class"),
                    format!("only the designated token {label:?} may have class {class:?}"),
                ));
            }
        }

        if self.prompt.is_empty() {
            return Err(Error::validation("prompt", "prompt is empty"));
        }
        let prompt = self
            .prompt
            .iter()
            .enumerate()
            .map(|(i, label)| {
                find(label).ok_or_else(|| {
                    Error::validation(format!("prompt[{i}]"), format!("unknown label {label:?}"))
                })
            })
            .collect::<Result<Vec<_>>>()?;

        Ok(Scenario::new(vocab, prompt, self.max_iterations)?.with_candidates(self.candidates))
    }
}

pub fn parse_scenario(bytes: &[u8]) -> Result<Scenario> {
    from_json::<ScenarioDocument>(bytes)?.into_scenario()
}

pub fn scenario_to_json(scenario: &Scenario) -> String {
    to_json(&ScenarioDocument::from_scenario(scenario))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionDocument {
    #[serde(with = "lossy_float")]
    pub n_star_exact: f64,
    #[serde(with = "lossy_float")]
    pub n_star_approx: f64,
    pub regime: Regime,
    pub predicted_tip_index: Option<usize>,
    #[serde(with = "lossy_float")]
    pub numerator: f64,
    #[serde(with = "lossy_float")]
    pub denominator: f64,
    pub g: usize,
}

impl From<&TippingPrediction> for PredictionDocument {
    fn from(p: &TippingPrediction) -> Self {
        PredictionDocument {
            n_star_exact: p.n_star_exact,
            n_star_approx: p.n_star_approx,
            regime: p.regime,
            predicted_tip_index: p.predicted_tip_index,
            numerator: p.numerator,
            denominator: p.denominator,
            g: p.g,
        }
    }
}

impl From<PredictionDocument> for TippingPrediction {
    fn from(d: PredictionDocument) -> Self {
        TippingPrediction {
            n_star_exact: d.n_star_exact,
            n_star_approx: d.n_star_approx,
            numerator: d.numerator,
            denominator: d.denominator,
            g: d.g,
            regime: d.regime,
            predicted_tip_index: d.predicted_tip_index,
        }
    }
}

pub fn prediction_to_json(prediction: &TippingPrediction) -> String {
    to_json(&PredictionDocument::from(prediction))
}

pub fn parse_prediction(bytes: &[u8]) -> Result<TippingPrediction> {
    Ok(from_json::<PredictionDocument>(bytes)?.into())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub scenario: ScenarioDocument,
    pub prediction: PredictionDocument,
    pub empirical_tip: Option<usize>,
    pub agree: bool,
    pub caveats: Vec<String>,
}

pub fn report_to_json(report: &VerificationReport) -> String {
    to_json(&ReportDocument {
        scenario: ScenarioDocument::from_scenario(&report.scenario),
        prediction: (&report.prediction).into(),
        empirical_tip: report.empirical_tip,
        agree: report.agree,
        caveats: report.caveats.clone(),
    })
}

pub fn parse_report(bytes: &[u8]) -> Result<VerificationReport> {
    let doc: ReportDocument = from_json(bytes)?;
    Ok(VerificationReport {
        scenario: doc.scenario.into_scenario()?,
        prediction: doc.prediction.into(),
        empirical_tip: doc.empirical_tip,
        agree: doc.agree,
        caveats: doc.caveats,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepDocument {
    pub iteration: usize,
    pub attention_weights: Vec<f64>,
    pub context: Vec<f64>,
    pub vocab_scores: Vec<f64>,
    /// Label of the chosen vocabulary entry.
    pub chosen: String,
}

/// Keys: `version`, `scenario`, `steps`, `tip_index`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceDocument {
    #[serde(default = "format_version")]
    pub version: u32,
    pub scenario: ScenarioDocument,
    pub steps: Vec<StepDocument>,
    pub tip_index: Option<usize>,
}

pub fn emit_trace_json(trace: &GenerationTrace) -> String {
    let vocab = trace.scenario.vocab();
    to_json(&TraceDocument {
        version: FORMAT_VERSION,
        scenario: ScenarioDocument::from_scenario(&trace.scenario),
        steps: trace
            .steps
            .iter()
            .map(|s| StepDocument {
                iteration: s.iteration,
                attention_weights: s.attention_weights.clone(),
                context: s.context.as_slice().to_vec(),
                vocab_scores: s.vocab_scores.clone(),
                chosen: vocab[s.chosen].label.clone(),
            })
            .collect(),
        tip_index: trace.tip_index,
    })
}

pub fn parse_trace(bytes: &[u8]) -> Result<GenerationTrace> {
    let doc: TraceDocument = from_json(bytes)?;
    let scenario = doc.scenario.into_scenario()?;
    let steps = doc
        .steps
        .into_iter()
        .enumerate()
        .map(|(i, s)| {
            let chosen = scenario
                .vocab()
                .iter()
                .position(|e| e.label == s.chosen)
                .ok_or_else(|| {
                    Error::validation(format!("steps[{i}].chosen"), format!("unknown label {:?}", s.chosen))
                })?;
            let context = Embedding::new(s.context)
                .map_err(|e| Error::validation(format!("steps[{i}].context"), e.to_string()))?;
            Ok(StepRecord {
                iteration: s.iteration,
                attention_weights: s.attention_weights,
                context,
                vocab_scores: s.vocab_scores,
                chosen,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GenerationTrace {
        scenario,
        steps,
        tip_index: doc.tip_index,
    })
}

/// 17 significant digits, exponent form; `inf`/`-inf`/`nan` otherwise.
pub fn format_real(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        render_non_finite(x)
    }
}

/// Rows in order, LF line endings. Rows whose parameter value could not be
/// realized carry `error` in the regime column and empty numeric fields.
pub fn emit_sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_CSV_HEADER);
    out.push('\n');
    for row in rows {
        let _ = match &row.result {
            Ok(p) => writeln!(
                out,
                "{},{},{},{},{}",
                format_real(row.param_value),
                format_real(p.n_star_exact),
                format_real(p.n_star_approx),
                p.regime,
                p.empirical_tip.map(|t| t.to_string()).unwrap_or_default()
            ),
            Err(_) => writeln!(out, "{},,,error,", format_real(row.param_value)),
        };
    }
    out
}

/// Inverse of [`emit_sweep_csv`]. Error rows come back with the message `error`.
pub fn parse_sweep_csv(text: &str) -> Result<Vec<SweepRow>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header == SWEEP_CSV_HEADER => {}
        _ => {
            return Err(Error::Parse {
                line: 1,
                column: 1,
                message: format!("expected header {SWEEP_CSV_HEADER:?}"),
            })
        }
    }
    let mut rows = Vec::new();
    for (i, line) in lines {
        let bad = |message: String| Error::Parse {
            line: i + 1,
            column: 1,
            message,
        };
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            return Err(bad(format!("expected 5 fields, found {}", fields.len())));
        }
        let real = |s: &str| s.parse::<f64>().map_err(|e| bad(format!("{s:?}: {e}")));
        let param_value = real(fields[0])?;
        let result = if fields[3] == "error" {
            Err("error".to_string())
        } else {
            Ok(SweepPoint {
                n_star_exact: real(fields[1])?,
                n_star_approx: real(fields[2])?,
                regime: fields[3].parse().map_err(bad)?,
                empirical_tip: match fields[4] {
                    "" => None,
                    t => Some(t.parse().map_err(|e| bad(format!("{t:?}: {e}")))?),
                },
            })
        };
        rows.push(SweepRow { param_value, result });
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRowDocument {
    #[serde(with = "lossy_float")]
    pub param_value: f64,
    #[serde(with = "lossy_float")]
    pub n_star_exact: f64,
    #[serde(with = "lossy_float")]
    pub n_star_approx: f64,
    pub regime: Option<Regime>,
    pub empirical_tip: Option<usize>,
    pub error: Option<String>,
}

pub fn sweep_rows_to_json(rows: &[SweepRow]) -> String {
    let docs: Vec<SweepRowDocument> = rows
        .iter()
        .map(|r| match &r.result {
            Ok(p) => SweepRowDocument {
                param_value: r.param_value,
                n_star_exact: p.n_star_exact,
                n_star_approx: p.n_star_approx,
                regime: Some(p.regime),
                empirical_tip: p.empirical_tip,
                error: None,
            },
            Err(e) => SweepRowDocument {
                param_value: r.param_value,
                n_star_exact: f64::NAN,
                n_star_approx: f64::NAN,
                regime: None,
                empirical_tip: None,
                error: Some(e.clone()),
            },
        })
        .collect();
    to_json(&docs)
}

/// Either an explicit list of values or `num` evenly spaced values from
/// `start` to `stop` inclusive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GridDocument {
    Values(Vec<f64>),
    Linspace { start: f64, stop: f64, num: usize },
}

impl GridDocument {
    pub fn values(&self) -> Vec<f64> {
        match *self {
            GridDocument::Values(ref v) => v.clone(),
            GridDocument::Linspace { start, stop, num } => match num {
                0 => Vec::new(),
                1 => vec![start],
                _ => (0..num)
                    .map(|i| start + (stop - start) * i as f64 / (num - 1) as f64)
                    .collect(),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpecDocument {
    #[serde(default = "format_version")]
    pub version: u32,
    /// Base scenario; may be omitted when one is supplied separately.
    #[serde(default)]
    pub scenario: Option<ScenarioDocument>,
    pub parameter: SweepParameter,
    pub grid: GridDocument,
    #[serde(default)]
    pub simulate: bool,
    #[serde(default)]
    pub max_iterations: Option<usize>,
}

/// Parses a sweep spec. `fallback` is used when the document has no
/// embedded scenario.
pub fn parse_sweep_spec(bytes: &[u8], fallback: Option<Scenario>) -> Result<SweepSpec> {
    let doc: SweepSpecDocument = from_json(bytes)?;
    let base = match (doc.scenario, fallback) {
        (Some(d), _) => d.into_scenario()?,
        (None, Some(s)) => s,
        (None, None) => return Err(Error::validation("scenario", "no base scenario given")),
    };
    SweepSpec::new(base, doc.parameter, doc.grid.values(), doc.simulate, doc.max_iterations)
}

#[derive(Deserialize)]
#[serde(untagged)]
enum GramInput {
    Wrapped { gram: Vec<Vec<f64>> },
    Bare(Vec<Vec<f64>>),
}

/// Accepts `{"gram": [[...], ...]}` or a bare array of rows.
pub fn parse_gram(bytes: &[u8]) -> Result<GramMatrix> {
    let rows = match from_json::<GramInput>(bytes)? {
        GramInput::Wrapped { gram } | GramInput::Bare(gram) => gram,
    };
    GramMatrix::new(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VectorsDocument {
    pub vectors: Vec<Vec<f64>>,
}

pub fn vectors_to_json(vectors: &[Embedding]) -> String {
    to_json(&VectorsDocument {
        vectors: vectors.iter().map(|v| v.as_slice().to_vec()).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attention::generate;
    use crate::tipping::n_star_exact;

    const MINIMAL: &str = r#"{
        "dimension": 2,
        "tokens": [
            {"label": "G", "class": "good", "vector": [1.0, 0.0]},
            {"label": "B", "class": "bad", "vector": [0.5, 0.5]}
        ],
        "prompt": ["G"],
        "good": "G",
        "bad": "B",
        "max_iterations": 5
    }"#;

    const WORKED: &str = r#"{
        "version": 1,
        "dimension": 2,
        "tokens": [
            {"label": "G", "class": "good", "vector": [1.0, 0.0]},
            {"label": "B", "class": "bad", "vector": [1.2, -1.0]},
            {"label": "P", "class": "neutral", "vector": [0.5, 3.0]}
        ],
        "prompt": ["P", "G"],
        "good": "G",
        "bad": "B",
        "max_iterations": 50
    }"#;

    fn field_of(err: Error) -> String {
        match err {
            Error::Validation { field, .. } => field,
            other => panic!("expected a validation error, got {other:?}"),
        }
    }

    #[test]
    fn minimal_document() {
        let s = parse_scenario(MINIMAL.as_bytes()).unwrap();
        assert_eq!(s.good_count(), 1);
        assert_eq!(s.max_iterations(), 5);
        assert_eq!(s.candidates(), CandidateSet::Substantive);
    }

    #[test]
    fn worked_document() {
        let s = parse_scenario(WORKED.as_bytes()).unwrap();
        assert!((n_star_exact(&s).n_star_exact - 7.7947).abs() < 1e-4);
    }

    #[test]
    fn unknown_prompt_label_names_the_position() {
        let text = MINIMAL.replace(r#""prompt": ["G"]"#, r#""prompt": ["X"]"#);
        assert_eq!(field_of(parse_scenario(text.as_bytes()).unwrap_err()), "prompt[0]");
    }

    #[test]
    fn validation_errors_name_fields() {
        let text = MINIMAL.replace("[0.5, 0.5]", "[0.5]");
        assert_eq!(field_of(parse_scenario(text.as_bytes()).unwrap_err()), "tokens[1].vector");
        let text = MINIMAL.replace(r#""bad": "B""#, r#""bad": "G""#);
        assert_eq!(field_of(parse_scenario(text.as_bytes()).unwrap_err()), "bad");
        let text = MINIMAL.replace(r#""class": "bad""#, r#""class": "good""#);
        assert!(parse_scenario(text.as_bytes()).is_err());
        let text = MINIMAL.replace(r#""max_iterations": 5"#, r#""max_iterations": 5, "version": 2"#);
        assert_eq!(field_of(parse_scenario(text.as_bytes()).unwrap_err()), "version");
    }

    #[test]
    fn malformed_json_reports_position() {
        match parse_scenario(b"{\n  \"dimension\": 2,,\n}") {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (2, 18)),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn scenario_round_trip() {
        let s = parse_scenario(WORKED.as_bytes()).unwrap();
        assert_eq!(parse_scenario(scenario_to_json(&s).as_bytes()).unwrap(), s);
    }

    #[test]
    fn empty_sweep_is_header_only() {
        assert_eq!(emit_sweep_csv(&[]), format!("{SWEEP_CSV_HEADER}\n"));
    }

    #[test]
    fn sweep_csv_round_trip() {
        let rows = vec![
            SweepRow {
                param_value: 1.0,
                result: Ok(SweepPoint {
                    n_star_exact: 7.794_692_990_382_983,
                    n_star_approx: 7.794_692_990_382_984,
                    regime: Regime::TipsToB,
                    empirical_tip: Some(8),
                }),
            },
            SweepRow {
                param_value: 1.0 / 3.0,
                result: Ok(SweepPoint {
                    n_star_exact: f64::INFINITY,
                    n_star_approx: f64::INFINITY,
                    regime: Regime::Marginal,
                    empirical_tip: None,
                }),
            },
            SweepRow {
                param_value: 2.0,
                result: Err("not realizable".into()),
            },
        ];
        let csv = emit_sweep_csv(&rows);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 4);
        assert!(lines.iter().all(|l| l.split(',').count() == 5));
        assert_eq!(lines[2], "3.3333333333333331e-1,inf,inf,Marginal,");
        assert_eq!(lines[3], "2.0000000000000000e0,,,error,");
        let back = parse_sweep_csv(&csv).unwrap();
        assert_eq!(back[..2], rows[..2]);
        assert_eq!(back[2].result, Err("error".to_string()));
    }

    #[test]
    fn empty_trace_serializes_empty_steps() {
        let s = parse_scenario(MINIMAL.as_bytes()).unwrap().with_max_iterations(0);
        let json = emit_trace_json(&generate(&s).unwrap());
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["steps"], serde_json::json!([]));
        assert_eq!(v["tip_index"], serde_json::Value::Null);
    }

    #[test]
    fn trace_round_trip_is_lossless() {
        let s = parse_scenario(WORKED.as_bytes()).unwrap();
        let trace = generate(&s).unwrap();
        let json = emit_trace_json(&trace);
        let back = parse_trace(json.as_bytes()).unwrap();
        assert_eq!(back, trace);
        assert_eq!(back.tip_index, Some(8));
        let single = generate(&s.with_max_iterations(1)).unwrap();
        let back = parse_trace(emit_trace_json(&single).as_bytes()).unwrap();
        let total: f64 = back.steps[0].attention_weights.iter().sum();
        assert!((total - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn marginal_prediction_round_trips_through_sentinel() {
        let text = WORKED.replace("[1.2, -1.0]", "[1.0, -1.0]");
        let p = n_star_exact(&parse_scenario(text.as_bytes()).unwrap());
        assert_eq!(p.regime, Regime::Marginal);
        let json = prediction_to_json(&p);
        assert!(json.contains(r#""n_star_exact": "inf""#));
        assert_eq!(parse_prediction(json.as_bytes()).unwrap(), p);
    }

    #[test]
    fn gram_inputs() {
        let a = parse_gram(br#"{"gram": [[1, 0], [0, 1]]}"#).unwrap();
        let b = parse_gram(b"[[1, 0], [0, 1]]").unwrap();
        assert_eq!(a, b);
        assert!(parse_gram(b"[[1, 2], [3, 1]]").is_err());
    }

    #[test]
    fn linspace_grid() {
        let g = GridDocument::Linspace { start: 0.0, stop: 1.0, num: 5 };
        assert_eq!(g.values(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    }
}
