//! A single self-attention head run as a greedy text generator.
//!
//! Key, Query and Value maps are the identity, scores are raw dot products
//! (no `1/sqrt(d)` scaling), and the query at every step is the embedding of
//! the most recent token in the sequence.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{dot, Embedding};

/// Score differences at or below this are treated as ties in the argmax.
pub const TIE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TokenClass {
    Good,
    Bad,
    Neutral,
}

/// Which vocabulary entries the decoder may emit.
///
/// Every entry is always scored; this only restricts the argmax.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CandidateSet {
    /// Only the designated Good and Bad tokens compete for the next slot.
    #[default]
    Substantive,
    /// Every vocabulary entry, Neutral ones included.
    Full,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VocabEntry {
    pub label: String,
    pub embedding: Embedding,
    pub class: TokenClass,
}

impl VocabEntry {
    pub fn new(label: impl Into<String>, embedding: Embedding, class: TokenClass) -> Self {
        VocabEntry {
            label: label.into(),
            embedding,
            class,
        }
    }
}

/// Vocabulary, prompt and decoding budget for one generation run.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    vocab: Vec<VocabEntry>,
    prompt: Vec<usize>,
    good: usize,
    bad: usize,
    max_iterations: usize,
    candidates: CandidateSet,
}

impl Scenario {
    /// Validates the vocabulary and prompt. The vocabulary must hold exactly
    /// one Good and one Bad entry; all other entries are Neutral.
    pub fn new(vocab: Vec<VocabEntry>, prompt: Vec<usize>, max_iterations: usize) -> Result<Self> {
        let dim = vocab
            .first()
            .map(|e| e.embedding.dim())
            .ok_or_else(|| Error::validation("vocab", "vocabulary is empty"))?;

        let mut good = None;
        let mut bad = None;
        for (i, entry) in vocab.iter().enumerate() {
            if entry.embedding.dim() != dim {
                return Err(Error::validation(
                    format!("vocab[{i}].embedding"),
                    format!("dimension {} differs from {dim}", entry.embedding.dim()),
                ));
            }
            if vocab[..i].iter().any(|e| e.label == entry.label) {
                return Err(Error::validation(
                    format!("vocab[{i}].label"),
                    format!("duplicate label {:?}", entry.label),
                ));
            }
            let slot = match entry.class {
                TokenClass::Good => &mut good,
                TokenClass::Bad => &mut bad,
                TokenClass::Neutral => continue,
            };
            if slot.replace(i).is_some() {
                return Err(Error::validation(
                    format!("vocab[{i}].class"),
                    format!("more than one {:?} token", entry.class),
                ));
            }
        }
        let good = good.ok_or_else(|| Error::validation("vocab", "no Good token"))?;
        let bad = bad.ok_or_else(|| Error::validation("vocab", "no Bad token"))?;

        if prompt.is_empty() {
            return Err(Error::validation("prompt", "prompt is empty"));
        }
        if let Some(p) = prompt.iter().position(|&t| t >= vocab.len()) {
            return Err(Error::validation(
                format!("prompt[{p}]"),
                format!("index {} out of range for {} vocabulary entries", prompt[p], vocab.len()),
            ));
        }

        Ok(Scenario {
            vocab,
            prompt,
            good,
            bad,
            max_iterations,
            candidates: CandidateSet::default(),
        })
    }

    pub fn with_candidates(mut self, candidates: CandidateSet) -> Self {
        self.candidates = candidates;
        self
    }

    pub fn with_max_iterations(mut self, max_iterations: usize) -> Self {
        self.max_iterations = max_iterations;
        self
    }

    pub fn vocab(&self) -> &[VocabEntry] {
        &self.vocab
    }

    pub fn prompt(&self) -> &[usize] {
        &self.prompt
    }

    pub fn good_index(&self) -> usize {
        self.good
    }

    pub fn bad_index(&self) -> usize {
        self.bad
    }

    pub fn max_iterations(&self) -> usize {
        self.max_iterations
    }

    pub fn candidates(&self) -> CandidateSet {
        self.candidates
    }

    pub fn dim(&self) -> usize {
        self.vocab[0].embedding.dim()
    }

    pub fn good(&self) -> &Embedding {
        &self.vocab[self.good].embedding
    }

    pub fn bad(&self) -> &Embedding {
        &self.vocab[self.bad].embedding
    }

    pub fn class_of(&self, index: usize) -> TokenClass {
        self.vocab[index].class
    }

    /// Number of prompt positions holding the Good token.
    pub fn good_count(&self) -> usize {
        self.prompt.iter().filter(|&&t| t == self.good).count()
    }

    pub fn prompt_ends_in_good(&self) -> bool {
        self.prompt.last() == Some(&self.good)
    }

    fn is_candidate(&self, index: usize) -> bool {
        match self.candidates {
            CandidateSet::Full => true,
            CandidateSet::Substantive => index == self.good || index == self.bad,
        }
    }
}

/// Everything the head computed while choosing one token.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub iteration: usize,
    /// Softmax weights over the sequence positions at this step.
    pub attention_weights: Vec<f64>,
    pub context: Embedding,
    /// `context . e_t` for every vocabulary entry, in vocabulary order.
    pub vocab_scores: Vec<f64>,
    pub chosen: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenerationTrace {
    pub scenario: Scenario,
    pub steps: Vec<StepRecord>,
    /// Number of tokens generated before the first Bad one.
    pub tip_index: Option<usize>,
}

impl GenerationTrace {
    pub fn chosen_classes(&self) -> impl Iterator<Item = TokenClass> + '_ {
        self.steps.iter().map(|s| self.scenario.class_of(s.chosen))
    }
}

/// Numerically stable softmax of one score row.
pub fn softmax_row(scores: &[f64]) -> Result<Vec<f64>> {
    if scores.is_empty() {
        return Err(Error::invalid("softmax of an empty row"));
    }
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(Error::invalid("softmax row contains a non-finite score"));
    }
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = scores.iter().map(|s| (s - max).exp()).collect();
    let total: f64 = exps.iter().sum();
    Ok(exps.into_iter().map(|e| e / total).collect())
}

/// Attention-weighted sum of `sequence` for the given query.
pub fn context_vector(sequence: &[&Embedding], query: &Embedding) -> Result<Embedding> {
    attend(sequence, query).map(|(_, c)| c)
}

/// Returns the attention weights together with the context vector.
pub fn attend(sequence: &[&Embedding], query: &Embedding) -> Result<(Vec<f64>, Embedding)> {
    if sequence.is_empty() {
        return Err(Error::invalid("attention over an empty sequence"));
    }
    let scores = sequence
        .iter()
        .map(|e| dot(query, e))
        .collect::<Result<Vec<_>>>()?;
    let weights = softmax_row(&scores)?;
    let mut context = vec![0.0; query.dim()];
    for (w, e) in weights.iter().zip(sequence) {
        for (c, x) in context.iter_mut().zip(e.as_slice()) {
            *c += w * x;
        }
    }
    Ok((weights, Embedding::new(context)?))
}

/// Picks the next token for `sequence` (vocabulary indices).
///
/// Ties within [`TIE_TOL`] of the best candidate score go to the Bad token,
/// then to the lowest vocabulary index.
pub fn decode_step(scenario: &Scenario, sequence: &[usize], iteration: usize) -> Result<StepRecord> {
    let last = *sequence
        .last()
        .ok_or_else(|| Error::invalid("decode step on an empty sequence"))?;
    let vocab = scenario.vocab();
    if let Some(&t) = sequence.iter().find(|&&t| t >= vocab.len()) {
        return Err(Error::invalid(format!("sequence token {t} is not in the vocabulary")));
    }

    let embeddings: Vec<&Embedding> = sequence.iter().map(|&t| &vocab[t].embedding).collect();
    let (attention_weights, context) = attend(&embeddings, &vocab[last].embedding)?;
    let vocab_scores = vocab
        .iter()
        .map(|e| dot(&context, &e.embedding))
        .collect::<Result<Vec<_>>>()?;

    let best = (0..vocab.len())
        .filter(|&t| scenario.is_candidate(t))
        .map(|t| vocab_scores[t])
        .fold(f64::NEG_INFINITY, f64::max);
    let tied = |t: &usize| scenario.is_candidate(*t) && vocab_scores[*t] >= best - TIE_TOL;
    let chosen = (0..vocab.len())
        .filter(tied)
        .find(|&t| vocab[t].class == TokenClass::Bad)
        .or_else(|| (0..vocab.len()).find(tied))
        .expect("candidate set contains at least the Good and Bad tokens");

    Ok(StepRecord {
        iteration,
        attention_weights,
        context,
        vocab_scores,
        chosen,
    })
}

/// Runs the head autoregressively from the prompt for `max_iterations` steps.
pub fn generate(scenario: &Scenario) -> Result<GenerationTrace> {
    let mut sequence = scenario.prompt().to_vec();
    let mut steps = Vec::with_capacity(scenario.max_iterations());
    let mut tip_index = None;
    for n in 0..scenario.max_iterations() {
        let step = decode_step(scenario, &sequence, n)?;
        if tip_index.is_none() && scenario.class_of(step.chosen) == TokenClass::Bad {
            tip_index = Some(n);
        }
        sequence.push(step.chosen);
        steps.push(step);
    }
    Ok(GenerationTrace {
        scenario: scenario.clone(),
        steps,
        tip_index,
    })
}
