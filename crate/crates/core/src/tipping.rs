//! Closed-form tipping-point law.
//!
//! While the head keeps emitting the Good token `G` (so the query stays `G`),
//! the gap between Bad and Good scores after `n` generated tokens is
//! proportional to
//!
//! ```text
//!   sum_{P_i != G} exp(P_i.G) P_i.(B - G)  +  (g + n) exp(G.G) G.(B - G)
//! ```
//!
//! where `g` counts the `G`s in the prompt. Setting it to zero gives
//!
//! ```text
//!   n* = [sum_{P_i != G} exp(P_i.G) P_i] . (G - B) / ([exp(G.G) G] . (B - G))  -  g
//! ```
//!
//! and the first Bad token appears at iteration `ceil(n*)`.

use serde::{Deserialize, Serialize};

use crate::attention::Scenario;
use crate::geometry::{dot, Embedding};

/// `|B.G - G.G|` at or below this is treated as no crossover at all.
pub const MARGINAL_TOL: f64 = 1e-12;
/// `n*` values this close to an integer are snapped to it before taking the ceiling.
pub const INTEGER_SNAP_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regime {
    /// Good output first, then Bad from iteration `ceil(n*)` on.
    TipsToB,
    /// `n* <= 0`: the first generated token is already Bad.
    BadFromOutset,
    /// `B.G < G.G`: each new `G` pulls the context further from `B`.
    StableG,
    /// `B.G == G.G`: new `G`s do not move the score gap.
    Marginal,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::TipsToB => "TipsToB",
            Regime::BadFromOutset => "BadFromOutset",
            Regime::StableG => "StableG",
            Regime::Marginal => "Marginal",
        }
    }
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Regime {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "TipsToB" => Ok(Regime::TipsToB),
            "BadFromOutset" => Ok(Regime::BadFromOutset),
            "StableG" => Ok(Regime::StableG),
            "Marginal" => Ok(Regime::Marginal),
            other => Err(format!("unknown regime {other:?}")),
        }
    }
}

/// How the non-Good prompt tokens are merged into one net vector for the
/// approximate law.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NetMode {
    #[default]
    Sum,
    Mean,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TippingPrediction {
    /// `+inf` when the regime is Marginal.
    pub n_star_exact: f64,
    pub n_star_approx: f64,
    pub numerator: f64,
    pub denominator: f64,
    pub g: usize,
    pub regime: Regime,
    pub predicted_tip_index: Option<usize>,
}

struct LawTerms {
    numerator: f64,
    denominator: f64,
    crossover_slope: f64,
    g: usize,
}

fn law_terms(scenario: &Scenario) -> LawTerms {
    let good = scenario.good();
    let bad = scenario.bad();
    let g_minus_b = good.sub(bad).expect("scenario embeddings share one dimension");
    let gg = dot(good, good).expect("same dimension");

    let numerator = scenario
        .prompt()
        .iter()
        .filter(|&&t| t != scenario.good_index())
        .map(|&t| {
            let p = &scenario.vocab()[t].embedding;
            dot(p, good).unwrap().exp() * dot(p, &g_minus_b).unwrap()
        })
        .sum();
    let denominator = -gg.exp() * dot(good, &g_minus_b).unwrap();
    let crossover_slope = dot(bad, good).unwrap() - gg;

    LawTerms {
        numerator,
        denominator,
        crossover_slope,
        g: scenario.good_count(),
    }
}

fn regime_of(crossover_slope: f64, n_star: f64) -> Regime {
    if crossover_slope.abs() <= MARGINAL_TOL {
        Regime::Marginal
    } else if crossover_slope < 0.0 {
        Regime::StableG
    } else if n_star > 0.0 {
        Regime::TipsToB
    } else {
        Regime::BadFromOutset
    }
}

/// Evaluates the exact law. Bad and Neutral prompt tokens both enter the
/// numerator sum; only occurrences of the Good token itself are excluded.
pub fn n_star_exact(scenario: &Scenario) -> TippingPrediction {
    let t = law_terms(scenario);
    let n_star = if t.crossover_slope.abs() <= MARGINAL_TOL {
        f64::INFINITY
    } else {
        t.numerator / t.denominator - t.g as f64
    };
    let mut prediction = TippingPrediction {
        n_star_exact: n_star,
        n_star_approx: n_star_approx(scenario, NetMode::Sum),
        numerator: t.numerator,
        denominator: t.denominator,
        g: t.g,
        regime: regime_of(t.crossover_slope, n_star),
        predicted_tip_index: None,
    };
    prediction.predicted_tip_index = predicted_tip_index(&prediction);
    prediction
}

/// Net-vector approximation
/// `exp[(P - G).G] * P.(G - B) / G.(B - G) - g`.
pub fn n_star_approx(scenario: &Scenario, mode: NetMode) -> f64 {
    let good = scenario.good();
    let bad = scenario.bad();
    let g = scenario.good_count() as f64;

    let others: Vec<&Embedding> = scenario
        .prompt()
        .iter()
        .filter(|&&t| t != scenario.good_index())
        .map(|&t| &scenario.vocab()[t].embedding)
        .collect();
    if others.is_empty() {
        return -g;
    }

    let mut net = Embedding::zeros(scenario.dim()).unwrap();
    for p in &others {
        net = net.add_scaled(1.0, p).unwrap();
    }
    if mode == NetMode::Mean {
        net = net.scaled(1.0 / others.len() as f64).unwrap();
    }

    let gg = dot(good, good).unwrap();
    let slope = dot(good, bad).unwrap() - gg;
    if slope.abs() <= MARGINAL_TOL {
        return f64::INFINITY;
    }
    let g_minus_b = good.sub(bad).unwrap();
    let value = (dot(&net, good).unwrap() - gg).exp() * dot(&net, &g_minus_b).unwrap()
        / -dot(good, &g_minus_b).unwrap()
        - g;
    if value.is_finite() {
        value
    } else {
        f64::INFINITY
    }
}

pub fn classify_regime(scenario: &Scenario) -> Regime {
    n_star_exact(scenario).regime
}

/// Maps a prediction to the iteration of the first Bad token.
///
/// An exactly integral `n*` maps to itself because score ties go to Bad.
pub fn predicted_tip_index(prediction: &TippingPrediction) -> Option<usize> {
    match prediction.regime {
        Regime::TipsToB => {
            let n = prediction.n_star_exact;
            let nearest = n.round();
            let tip = if (n - nearest).abs() <= INTEGER_SNAP_TOL {
                nearest
            } else {
                n.ceil()
            };
            Some(tip.max(0.0) as usize)
        }
        Regime::BadFromOutset => Some(0),
        Regime::StableG | Regime::Marginal => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attention::{TokenClass, VocabEntry};

    fn emb(v: &[f64]) -> Embedding {
        Embedding::new(v.to_vec()).unwrap()
    }

    fn scenario(bad: &[f64], neutrals: &[&[f64]], prompt: Vec<usize>) -> Scenario {
        let mut vocab = vec![
            VocabEntry::new("G", emb(&[1.0, 0.0]), TokenClass::Good),
            VocabEntry::new("B", emb(bad), TokenClass::Bad),
        ];
        for (i, p) in neutrals.iter().enumerate() {
            vocab.push(VocabEntry::new(format!("P{i}"), emb(p), TokenClass::Neutral));
        }
        Scenario::new(vocab, prompt, 50).unwrap()
    }

    fn worked() -> Scenario {
        scenario(&[1.2, -1.0], &[&[0.5, 3.0]], vec![2, 0])
    }

    /// Hand evaluation: e^0.5 * 2.9 / (e * 0.2) - 1.
    fn worked_n_star() -> f64 {
        0.5f64.exp() * 2.9 / (1f64.exp() * 0.2) - 1.0
    }

    #[test]
    fn worked_scenario_matches_hand_arithmetic() {
        let p = n_star_exact(&worked());
        assert!((p.n_star_exact - worked_n_star()).abs() < 1e-12);
        assert!((p.n_star_exact - 7.7947).abs() < 1e-4);
        assert!((p.numerator - 0.5f64.exp() * 2.9).abs() < 1e-12);
        assert!((p.denominator - 1f64.exp() * 0.2).abs() < 1e-12);
        assert_eq!(p.g, 1);
        assert_eq!(p.regime, Regime::TipsToB);
        assert_eq!(p.predicted_tip_index, Some(8));
        assert!((p.n_star_exact - (p.numerator / p.denominator - p.g as f64)).abs() < 1e-12);
    }

    #[test]
    fn all_good_prompt_is_bad_from_outset() {
        let p = n_star_exact(&scenario(&[1.2, -1.0], &[], vec![0, 0, 0]));
        assert_eq!(p.numerator, 0.0);
        assert_eq!(p.n_star_exact, -3.0);
        assert_eq!(p.regime, Regime::BadFromOutset);
        assert_eq!(p.predicted_tip_index, Some(0));
    }

    #[test]
    fn weak_bad_is_stable_good() {
        let s = scenario(&[0.5, 0.5], &[], vec![0]);
        assert_eq!(classify_regime(&s), Regime::StableG);
        assert_eq!(n_star_exact(&s).predicted_tip_index, None);
    }

    #[test]
    fn equal_overlap_is_marginal() {
        let s = scenario(&[1.0, 2.0], &[&[0.5, 3.0]], vec![2, 0]);
        let p = n_star_exact(&s);
        assert_eq!(p.regime, Regime::Marginal);
        assert_eq!(p.n_star_exact, f64::INFINITY);
        assert_eq!(p.n_star_approx, f64::INFINITY);
        assert_eq!(p.predicted_tip_index, None);
    }

    #[test]
    fn single_p_approximation_is_exact() {
        let s = worked();
        let exact = n_star_exact(&s).n_star_exact;
        for mode in [NetMode::Sum, NetMode::Mean] {
            let approx = n_star_approx(&s, mode);
            assert!((approx - exact).abs() <= 1e-12 * exact.abs());
        }
    }

    #[test]
    fn repeated_neutral_mean_mode_differs_from_exact() {
        // Two copies of P: exact sum counts both; Mean collapses to one copy.
        let s = scenario(&[1.2, -1.0], &[&[0.5, 3.0]], vec![2, 2, 0]);
        let exact = n_star_exact(&s).n_star_exact;
        let oracle = 2.0 * 0.5f64.exp() * 2.9 / (1f64.exp() * 0.2) - 1.0;
        assert!((exact - oracle).abs() < 1e-12);
        let mean = n_star_approx(&s, NetMode::Mean);
        assert!((mean - worked_n_star()).abs() < 1e-12);
        assert!((mean - exact).abs() > 1.0);
    }

    #[test]
    fn approx_without_other_tokens_is_minus_g() {
        let s = scenario(&[1.2, -1.0], &[], vec![0, 0]);
        assert_eq!(n_star_approx(&s, NetMode::Sum), -2.0);
    }

    #[test]
    fn bad_prompt_tokens_enter_the_sum() {
        let s = scenario(&[1.2, -1.0], &[], vec![1, 0]);
        let p = n_star_exact(&s);
        // B.(G - B) with G - B = (-0.2, 1)
        let b_dot_gmb = 1.2 * -0.2 + -1.0 * 1.0;
        assert!((p.numerator - 1.2f64.exp() * b_dot_gmb).abs() < 1e-12);
    }

    #[test]
    fn tip_index_mapping() {
        let mk = |n: f64, regime| TippingPrediction {
            n_star_exact: n,
            n_star_approx: n,
            numerator: 0.0,
            denominator: 1.0,
            g: 0,
            regime,
            predicted_tip_index: None,
        };
        assert_eq!(predicted_tip_index(&mk(7.7947, Regime::TipsToB)), Some(8));
        assert_eq!(predicted_tip_index(&mk(-1.0, Regime::BadFromOutset)), Some(0));
        assert_eq!(predicted_tip_index(&mk(10.0, Regime::TipsToB)), Some(10));
        assert_eq!(predicted_tip_index(&mk(10.0 + 1e-13, Regime::TipsToB)), Some(10));
        assert_eq!(predicted_tip_index(&mk(3.0, Regime::StableG)), None);
        assert_eq!(predicted_tip_index(&mk(f64::INFINITY, Regime::Marginal)), None);
    }
}
