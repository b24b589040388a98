use crate::attention::{generate, GenerationTrace, Scenario, TokenClass, VocabEntry};
use crate::error::Result;
use crate::geometry::orthogonal_pad;
use crate::tipping::{n_star_exact, Regime, TippingPrediction, INTEGER_SNAP_TOL};

use super::random::{random_scenario, ScenarioConstraints};
use super::sweep::{SweepPoint, SweepRow};

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub scenario: Scenario,
    pub prediction: TippingPrediction,
    pub empirical_tip: Option<usize>,
    pub agree: bool,
    /// Violated assumptions of the closed form, or reasons the comparison
    /// could not be completed. Never a failure on their own.
    pub caveats: Vec<String>,
}

/// Runs the closed form and the simulator on `scenario` and compares the
/// first Bad iteration from each.
pub fn verify_prediction(scenario: &Scenario) -> Result<VerificationReport> {
    verify_with_trace(scenario).map(|(report, _)| report)
}

/// Like [`verify_prediction`], also returning the simulated trace.
pub fn verify_with_trace(scenario: &Scenario) -> Result<(VerificationReport, GenerationTrace)> {
    let prediction = n_star_exact(scenario);
    let trace = generate(scenario)?;
    let empirical_tip = trace.tip_index;
    let max = scenario.max_iterations();
    let mut caveats = Vec::new();

    if !scenario.prompt_ends_in_good() {
        caveats.push("prompt does not end in the Good token, so the first query is not G".into());
    }
    if let Some(step) = trace
        .steps
        .iter()
        .find(|s| scenario.class_of(s.chosen) == TokenClass::Neutral)
    {
        caveats.push(format!(
            "Neutral token {:?} won the argmax at iteration {}",
            scenario.vocab()[step.chosen].label,
            step.iteration
        ));
    }
    match prediction.regime {
        Regime::Marginal => caveats.push("B.G equals G.G: no crossover is predicted".into()),
        Regime::StableG if prediction.n_star_exact > 0.0 => caveats.push(
            "B.G < G.G but the prompt already favors B; the closed form does not cover this".into(),
        ),
        _ => {}
    }
    let (exact, approx) = (prediction.n_star_exact, prediction.n_star_approx);
    if exact.is_finite() && (approx - exact).abs() > 1e-9 * exact.abs().max(1.0) {
        caveats.push(format!("approximate n* = {approx:e} differs from exact n* = {exact:e}"));
    }
    if prediction.regime == Regime::TipsToB {
        let n = prediction.n_star_exact;
        if (n - n.round()).abs() <= INTEGER_SNAP_TOL && n != n.round() {
            caveats.push(format!("n* = {n:e} is within rounding of an integer"));
        }
    }

    let agree = match (prediction.predicted_tip_index, empirical_tip) {
        (Some(p), Some(e)) => p == e,
        (None, None) => true,
        (Some(p), None) if p >= max => {
            caveats.push(format!(
                "predicted tip {p} is beyond max_iterations {max}; unverified"
            ));
            true
        }
        _ => false,
    };

    Ok((
        VerificationReport {
            scenario: scenario.clone(),
            prediction,
            empirical_tip,
            agree,
            caveats,
        },
        trace,
    ))
}

/// Inserts `count` Neutral tokens orthogonal to both G and B before the final
/// prompt token. The pads are also added to the vocabulary.
pub fn politeness_pad(scenario: &Scenario, count: usize, norm: f64) -> Result<Scenario> {
    if count == 0 {
        return Ok(scenario.clone());
    }
    let pads = orthogonal_pad(&[scenario.good().clone(), scenario.bad().clone()], count, norm)?;

    let mut vocab = scenario.vocab().to_vec();
    let first_pad = vocab.len();
    for (i, pad) in pads.into_iter().enumerate() {
        let mut label = format!("pad{}", i + 1);
        while vocab.iter().any(|e| e.label == label) {
            label.push('\'');
        }
        vocab.push(VocabEntry::new(label, pad, TokenClass::Neutral));
    }

    let mut prompt = scenario.prompt().to_vec();
    let last = prompt.pop().expect("prompt is non-empty");
    prompt.extend(first_pad..first_pad + count);
    prompt.push(last);

    Ok(Scenario::new(vocab, prompt, scenario.max_iterations())?.with_candidates(scenario.candidates()))
}

/// Zero-extends every embedding to `dim` dimensions. Dot products, and so
/// every prediction and trace, are unchanged.
pub fn lift_dimension(scenario: &Scenario, dim: usize) -> Result<Scenario> {
    let vocab = scenario
        .vocab()
        .iter()
        .map(|e| Ok(VocabEntry::new(e.label.clone(), e.embedding.lifted(dim)?, e.class)))
        .collect::<Result<Vec<_>>>()?;
    Ok(Scenario::new(vocab, scenario.prompt().to_vec(), scenario.max_iterations())?
        .with_candidates(scenario.candidates()))
}

/// One seed of a verification batch.
#[derive(Debug, Clone)]
pub struct BatchItem {
    pub seed: u64,
    pub outcome: Result<(VerificationReport, GenerationTrace)>,
}

impl BatchItem {
    /// Sweep-table row keyed by seed, for CSV output.
    pub fn to_row(&self) -> SweepRow {
        SweepRow {
            param_value: self.seed as f64,
            result: match &self.outcome {
                Ok((report, _)) => Ok(SweepPoint {
                    n_star_exact: report.prediction.n_star_exact,
                    n_star_approx: report.prediction.n_star_approx,
                    regime: report.prediction.regime,
                    empirical_tip: report.empirical_tip,
                }),
                Err(e) => Err(e.to_string()),
            },
        }
    }
}

/// Generates one scenario per seed and verifies each.
pub fn verify_batch(seeds: &[u64], constraints: &ScenarioConstraints, parallel: bool) -> Vec<BatchItem> {
    super::ordered_map(seeds, parallel, |&seed| BatchItem {
        seed,
        outcome: random_scenario(seed, constraints).and_then(|s| verify_with_trace(&s)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::geometry::Embedding;

    fn emb(v: &[f64]) -> Embedding {
        Embedding::new(v.to_vec()).unwrap()
    }

    fn worked(dim: usize) -> Scenario {
        let vocab = vec![
            VocabEntry::new("G", emb(&[1.0, 0.0]).lifted(dim).unwrap(), TokenClass::Good),
            VocabEntry::new("B", emb(&[1.2, -1.0]).lifted(dim).unwrap(), TokenClass::Bad),
            VocabEntry::new("P", emb(&[0.5, 3.0]).lifted(dim).unwrap(), TokenClass::Neutral),
        ];
        Scenario::new(vocab, vec![2, 0], 50).unwrap()
    }

    #[test]
    fn worked_scenario_agrees() {
        let report = verify_prediction(&worked(2)).unwrap();
        assert_eq!(report.prediction.predicted_tip_index, Some(8));
        assert_eq!(report.empirical_tip, Some(8));
        assert!(report.agree);
        assert!(report.caveats.is_empty(), "{:?}", report.caveats);
    }

    #[test]
    fn all_good_prompt_agrees_at_zero() {
        let vocab = vec![
            VocabEntry::new("G", emb(&[1.0, 0.0]), TokenClass::Good),
            VocabEntry::new("B", emb(&[1.2, -1.0]), TokenClass::Bad),
        ];
        let s = Scenario::new(vocab, vec![0, 0], 10).unwrap();
        let report = verify_prediction(&s).unwrap();
        assert_eq!((report.prediction.predicted_tip_index, report.empirical_tip), (Some(0), Some(0)));
        assert!(report.agree);
    }

    #[test]
    fn stable_scenario_agrees_with_no_tip() {
        let vocab = vec![
            VocabEntry::new("G", emb(&[1.0, 0.0]), TokenClass::Good),
            VocabEntry::new("B", emb(&[0.5, 0.5]), TokenClass::Bad),
        ];
        let s = Scenario::new(vocab, vec![0], 50).unwrap();
        let report = verify_prediction(&s).unwrap();
        assert_eq!((report.prediction.predicted_tip_index, report.empirical_tip), (None, None));
        assert!(report.agree);
    }

    #[test]
    fn tip_beyond_horizon_is_unverified_not_disagreement() {
        let s = worked(2).with_max_iterations(5);
        let report = verify_prediction(&s).unwrap();
        assert!(report.agree);
        assert_eq!(report.empirical_tip, None);
        assert!(report.caveats.iter().any(|c| c.contains("unverified")));
    }

    #[test]
    fn prompt_not_ending_in_good_is_flagged() {
        let base = worked(2);
        let s = Scenario::new(base.vocab().to_vec(), vec![0, 2], 20).unwrap();
        let report = verify_prediction(&s).unwrap();
        assert!(report.caveats.iter().any(|c| c.contains("does not end")));
    }

    #[test]
    fn padding_leaves_prediction_unchanged() {
        let base = worked(3);
        let padded = politeness_pad(&base, 1, 1.0).unwrap();
        assert_eq!(padded.prompt(), &[2, 3, 0]);
        let (a, b) = (n_star_exact(&base), n_star_exact(&padded));
        assert!((a.n_star_exact - b.n_star_exact).abs() <= 1e-12);
        assert!((b.n_star_exact - 7.7947).abs() < 1e-4);
        assert_eq!(a.g, b.g);
        assert_eq!(
            generate(&base).unwrap().tip_index,
            generate(&padded).unwrap().tip_index
        );
    }

    #[test]
    fn repeated_neutral_token_flags_approximation_error() {
        let base = worked(2);
        let s = Scenario::new(base.vocab().to_vec(), vec![2, 2, 0], 50).unwrap();
        let report = verify_prediction(&s).unwrap();
        assert!(report.agree);
        assert!(report.caveats.iter().any(|c| c.contains("differs from exact")), "{:?}", report.caveats);
    }

    #[test]
    fn zero_pads_is_identity() {
        let base = worked(3);
        assert_eq!(politeness_pad(&base, 0, 1.0).unwrap(), base);
    }

    #[test]
    fn padding_in_two_dimensions_has_no_room() {
        assert!(matches!(
            politeness_pad(&worked(2), 1, 1.0),
            Err(Error::Capacity { .. })
        ));
    }
}
