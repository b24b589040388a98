use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::attention::{decode_step, Scenario, TokenClass, VocabEntry, TIE_TOL};
use crate::error::{Error, Result};
use crate::geometry::Embedding;
use crate::tipping::{n_star_exact, Regime};

/// Knobs for [`random_scenario`]. Ranges are inclusive.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConstraints {
    pub dim_range: (usize, usize),
    /// Required range for `n*`; `None` accepts any value.
    pub n_star_window: Option<(f64, f64)>,
    /// Components are drawn uniformly from `[-component_range, component_range]`.
    pub component_range: f64,
    /// Number of distinct Neutral tokens, each placed once in the prompt.
    pub neutral_count: (usize, usize),
    /// Number of Good tokens in the prompt.
    pub good_count: (usize, usize),
    pub regime: Regime,
    pub max_iterations: usize,
    pub max_attempts: usize,
}

impl Default for ScenarioConstraints {
    fn default() -> Self {
        ScenarioConstraints {
            dim_range: (2, 8),
            n_star_window: Some((0.5, 50.0)),
            component_range: 1.5,
            neutral_count: (1, 3),
            good_count: (1, 3),
            regime: Regime::TipsToB,
            max_iterations: 200,
            max_attempts: 10_000,
        }
    }
}

impl ScenarioConstraints {
    fn validate(&self) -> Result<()> {
        let ranges = [
            ("dim_range", self.dim_range),
            ("neutral_count", self.neutral_count),
            ("good_count", self.good_count),
        ];
        for (name, (lo, hi)) in ranges {
            if lo > hi {
                return Err(Error::validation(name, format!("empty range {lo}..={hi}")));
            }
        }
        if self.dim_range.0 == 0 {
            return Err(Error::validation("dim_range", "dimension must be at least 1"));
        }
        if self.good_count.1 + self.neutral_count.1 == 0 {
            return Err(Error::validation("good_count", "prompt would be empty"));
        }
        if !(self.component_range > 0.0 && self.component_range.is_finite()) {
            return Err(Error::validation("component_range", "must be positive and finite"));
        }
        Ok(())
    }
}

/// Rejection-samples a scenario satisfying `constraints`.
///
/// Accepted scenarios have a prompt ending in the Good token, the requested
/// regime, `n*` inside the window, and a simulation in which no Neutral token
/// ever reaches the top score (even though Neutral tokens are not emitted by
/// default). For `StableG` the first generated token must also be Good.
pub fn random_scenario(seed: u64, constraints: &ScenarioConstraints) -> Result<Scenario> {
    constraints.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rejections: BTreeMap<&'static str, usize> = BTreeMap::new();

    for _ in 0..constraints.max_attempts {
        let candidate = sample(&mut rng, constraints)?;
        match check(&candidate, constraints)? {
            None => return Ok(candidate),
            Some(reason) => *rejections.entry(reason).or_default() += 1,
        }
    }

    let binding = rejections
        .into_iter()
        .max_by_key(|&(_, n)| n)
        .map_or("none", |(reason, _)| reason);
    Err(Error::GenerationFailed {
        attempts: constraints.max_attempts,
        constraint: binding.to_string(),
    })
}

fn sample(rng: &mut ChaCha8Rng, c: &ScenarioConstraints) -> Result<Scenario> {
    let dim = rng.random_range(c.dim_range.0..=c.dim_range.1);
    let neutrals = rng.random_range(c.neutral_count.0..=c.neutral_count.1);
    let goods = rng.random_range(c.good_count.0..=c.good_count.1);
    let r = c.component_range;
    let vector = |rng: &mut ChaCha8Rng| {
        Embedding::new((0..dim).map(|_| rng.random_range(-r..=r)).collect())
    };

    let mut vocab = vec![
        VocabEntry::new("G", vector(rng)?, TokenClass::Good),
        VocabEntry::new("B", vector(rng)?, TokenClass::Bad),
    ];
    for i in 0..neutrals {
        vocab.push(VocabEntry::new(format!("P{}", i + 1), vector(rng)?, TokenClass::Neutral));
    }

    // Neutrals and all but one G in random order, then a final G.
    let mut prompt: Vec<usize> = (2..2 + neutrals).collect();
    prompt.extend(std::iter::repeat_n(0, goods.saturating_sub(1)));
    prompt.shuffle(rng);
    if goods > 0 {
        prompt.push(0);
    }
    if prompt.is_empty() {
        prompt.push(0);
    }
    Scenario::new(vocab, prompt, c.max_iterations)
}

fn check(s: &Scenario, c: &ScenarioConstraints) -> Result<Option<&'static str>> {
    if !s.prompt_ends_in_good() {
        return Ok(Some("prompt must end in the Good token"));
    }
    let p = n_star_exact(s);
    if p.regime != c.regime {
        return Ok(Some(match c.regime {
            Regime::TipsToB | Regime::BadFromOutset => "B.G > G.G with the requested sign of n*",
            Regime::StableG => "B.G < G.G",
            Regime::Marginal => "B.G = G.G",
        }));
    }
    if c.regime == Regime::TipsToB && p.numerator <= 0.0 {
        return Ok(Some("positive numerator"));
    }
    if let Some((lo, hi)) = c.n_star_window {
        if !(lo..=hi).contains(&p.n_star_exact) {
            return Ok(Some("n* window"));
        }
    }

    // Same loop as `generate`, stopping at the first rejection.
    let mut sequence = s.prompt().to_vec();
    for n in 0..s.max_iterations() {
        let step = decode_step(s, &sequence, n)?;
        let best = step.vocab_scores[s.good_index()].max(step.vocab_scores[s.bad_index()]);
        let neutral_wins = step
            .vocab_scores
            .iter()
            .enumerate()
            .any(|(t, &score)| s.class_of(t) == TokenClass::Neutral && score >= best - TIE_TOL);
        if neutral_wins {
            return Ok(Some("no Neutral token may win an argmax"));
        }
        if n == 0 && c.regime == Regime::StableG && step.chosen != s.good_index() {
            return Ok(Some("first generated token must be Good"));
        }
        sequence.push(step.chosen);
    }
    Ok(None)
}
