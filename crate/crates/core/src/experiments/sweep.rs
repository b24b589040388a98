use serde::{Deserialize, Serialize};

use crate::attention::{generate, Scenario, TokenClass, VocabEntry};
use crate::error::{Error, Result};
use crate::geometry::{dot, vectors_from_gram, GramMatrix};
use crate::tipping::{n_star_exact, Regime};

use super::verify::politeness_pad;

/// The quantity varied across a sweep grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SweepParameter {
    /// Grid value `s` sets each Neutral prompt token's `P.G` to `s` times its
    /// base value, holding `P.(G - B)` fixed.
    PScaleAlongG,
    /// Grid value is the target `B.G`; every other pairwise dot product in
    /// the vocabulary is held fixed and the vectors are re-realized.
    BDotG,
    /// Grid value is the number of Good tokens at the end of the prompt.
    GoodCount,
    /// Grid value is the number of orthogonal Neutral pads inserted.
    NeutralPadCount {
        #[serde(default = "default_pad_norm")]
        norm: f64,
    },
}

fn default_pad_norm() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub base: Scenario,
    pub parameter: SweepParameter,
    pub grid: Vec<f64>,
    pub simulate: bool,
    pub max_iterations: Option<usize>,
}

impl SweepSpec {
    pub fn new(
        base: Scenario,
        parameter: SweepParameter,
        grid: Vec<f64>,
        simulate: bool,
        max_iterations: Option<usize>,
    ) -> Result<Self> {
        if grid.is_empty() {
            return Err(Error::validation("grid", "grid is empty"));
        }
        if let Some(i) = grid.iter().position(|v| !v.is_finite()) {
            return Err(Error::validation(format!("grid[{i}]"), "value is not finite"));
        }
        let increasing = grid.windows(2).all(|w| w[0] < w[1]);
        let decreasing = grid.windows(2).all(|w| w[0] > w[1]);
        if !(increasing || decreasing) {
            return Err(Error::validation("grid", "grid must be strictly monotone"));
        }
        Ok(SweepSpec {
            base,
            parameter,
            grid,
            simulate,
            max_iterations,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub n_star_exact: f64,
    pub n_star_approx: f64,
    pub regime: Regime,
    pub empirical_tip: Option<usize>,
}

/// One grid point. `result` holds an error message when the parameter value
/// could not be realized.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub param_value: f64,
    pub result: std::result::Result<SweepPoint, String>,
}

/// Builds the scenario for one grid value.
pub fn realize(spec: &SweepSpec, value: f64) -> Result<Scenario> {
    let base = &spec.base;
    let scenario = match spec.parameter {
        SweepParameter::PScaleAlongG => scale_p_along_g(base, value)?,
        SweepParameter::BDotG => set_bad_good_overlap(base, value)?,
        SweepParameter::GoodCount => {
            let g = as_count(value)?;
            let mut prompt: Vec<usize> = base
                .prompt()
                .iter()
                .copied()
                .filter(|&t| t != base.good_index())
                .collect();
            prompt.extend(std::iter::repeat_n(base.good_index(), g));
            Scenario::new(base.vocab().to_vec(), prompt, base.max_iterations())?
                .with_candidates(base.candidates())
        }
        SweepParameter::NeutralPadCount { norm } => politeness_pad(base, as_count(value)?, norm)?,
    };
    Ok(match spec.max_iterations {
        Some(m) => scenario.with_max_iterations(m),
        None => scenario,
    })
}

fn as_count(value: f64) -> Result<usize> {
    if value < 0.0 || value.fract() != 0.0 || value > u32::MAX as f64 {
        return Err(Error::invalid(format!("{value} is not a non-negative integer count")));
    }
    Ok(value as usize)
}

fn scale_p_along_g(base: &Scenario, scale: f64) -> Result<Scenario> {
    let good = base.good();
    let g_minus_b = good.sub(base.bad())?;
    let gmb_sq = g_minus_b.norm_squared();
    // Direction that changes P.G but not P.(G - B).
    let dir = if gmb_sq == 0.0 {
        good.clone()
    } else {
        good.add_scaled(-dot(good, &g_minus_b)? / gmb_sq, &g_minus_b)?
    };
    let leverage = dot(&dir, good)?;
    if leverage.abs() < 1e-12 {
        return Err(Error::invalid(
            "B is parallel to G, so P.G cannot change while P.(G - B) is held fixed",
        ));
    }

    let mut vocab = base.vocab().to_vec();
    for (i, entry) in vocab.iter_mut().enumerate() {
        if entry.class != TokenClass::Neutral || !base.prompt().contains(&i) {
            continue;
        }
        let pg = dot(&entry.embedding, good)?;
        let shift = (scale * pg - pg) / leverage;
        entry.embedding = entry.embedding.add_scaled(shift, &dir)?;
    }
    Ok(Scenario::new(vocab, base.prompt().to_vec(), base.max_iterations())?
        .with_candidates(base.candidates()))
}

fn set_bad_good_overlap(base: &Scenario, target: f64) -> Result<Scenario> {
    let embeddings: Vec<_> = base.vocab().iter().map(|e| e.embedding.clone()).collect();
    let mut gram = GramMatrix::of(&embeddings)?;
    gram.set_symmetric(base.good_index(), base.bad_index(), target);
    let realized = vectors_from_gram(&gram)?;
    let vocab = base
        .vocab()
        .iter()
        .zip(realized)
        .map(|(e, v)| VocabEntry::new(e.label.clone(), v, e.class))
        .collect();
    Ok(Scenario::new(vocab, base.prompt().to_vec(), base.max_iterations())?
        .with_candidates(base.candidates()))
}

fn evaluate(spec: &SweepSpec, value: f64) -> SweepRow {
    let result = realize(spec, value).and_then(|scenario| {
        let prediction = n_star_exact(&scenario);
        let empirical_tip = if spec.simulate {
            generate(&scenario)?.tip_index
        } else {
            None
        };
        Ok(SweepPoint {
            n_star_exact: prediction.n_star_exact,
            n_star_approx: prediction.n_star_approx,
            regime: prediction.regime,
            empirical_tip,
        })
    });
    SweepRow {
        param_value: value,
        result: result.map_err(|e| e.to_string()),
    }
}

/// Evaluates every grid point. Rows come back in grid order whether or not
/// `parallel` is set.
pub fn run_sweep(spec: &SweepSpec, parallel: bool) -> Vec<SweepRow> {
    super::ordered_map(&spec.grid, parallel, |&v| evaluate(spec, v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Embedding;

    fn emb(v: &[f64]) -> Embedding {
        Embedding::new(v.to_vec()).unwrap()
    }

    fn worked() -> Scenario {
        let vocab = vec![
            VocabEntry::new("G", emb(&[1.0, 0.0]), TokenClass::Good),
            VocabEntry::new("B", emb(&[1.2, -1.0]), TokenClass::Bad),
            VocabEntry::new("P", emb(&[0.5, 3.0]), TokenClass::Neutral),
        ];
        Scenario::new(vocab, vec![2, 0], 200).unwrap()
    }

    /// Closed form for the worked geometry with P.G = 0.5 s and P.(G-B) = 2.9.
    fn p_scale_oracle(s: f64) -> f64 {
        (0.5 * s - 1.0).exp() * 2.9 / 0.2 - 1.0
    }

    fn points(rows: &[SweepRow]) -> Vec<SweepPoint> {
        rows.iter().map(|r| r.result.clone().unwrap()).collect()
    }

    #[test]
    fn p_scale_sweep_delays_the_tip() {
        let spec = SweepSpec::new(worked(), SweepParameter::PScaleAlongG, vec![0.5, 1.0, 2.0], true, None)
            .unwrap();
        let pts = points(&run_sweep(&spec, false));
        for (p, s) in pts.iter().zip([0.5, 1.0, 2.0]) {
            assert!((p.n_star_exact - p_scale_oracle(s)).abs() < 1e-12);
            assert_eq!(p.empirical_tip, Some(p.n_star_exact.ceil() as usize));
        }
        assert!(pts.windows(2).all(|w| w[0].n_star_exact < w[1].n_star_exact));
    }

    #[test]
    fn good_count_sweep_has_unit_slope() {
        let grid: Vec<f64> = (0..6).map(f64::from).collect();
        let spec = SweepSpec::new(worked(), SweepParameter::GoodCount, grid, false, None).unwrap();
        let pts = points(&run_sweep(&spec, false));
        for w in pts.windows(2) {
            assert!((w[1].n_star_exact - w[0].n_star_exact + 1.0).abs() <= 1e-12);
        }
    }

    /// Worked geometry with P given a third component, so the Gram matrix has
    /// full rank and B.G can move without leaving the PSD cone.
    fn worked_full_rank() -> Scenario {
        let vocab = vec![
            VocabEntry::new("G", emb(&[1.0, 0.0, 0.0]), TokenClass::Good),
            VocabEntry::new("B", emb(&[1.2, -1.0, 0.0]), TokenClass::Bad),
            VocabEntry::new("P", emb(&[0.5, 3.0, 2.0]), TokenClass::Neutral),
        ];
        Scenario::new(vocab, vec![2, 0], 200).unwrap()
    }

    #[test]
    fn bad_overlap_sweep_crosses_regimes() {
        // G.G = 1; B.G below, at, and above it
        let grid = vec![0.8, 1.0, 1.2, 1.25];
        let spec = SweepSpec::new(worked_full_rank(), SweepParameter::BDotG, grid, true, None).unwrap();
        let pts = points(&run_sweep(&spec, false));
        assert_eq!(pts[0].regime, Regime::StableG);
        assert_eq!(pts[1].regime, Regime::Marginal);
        assert_eq!(pts[1].n_star_exact, f64::INFINITY);
        assert!(matches!(pts[2].regime, Regime::TipsToB | Regime::BadFromOutset));
        // B.G = 1.2 reproduces the worked geometry up to rotation
        assert!((pts[2].n_star_exact - p_scale_oracle(1.0)).abs() < 1e-9);
        assert_eq!(pts[2].empirical_tip, Some(8));
    }

    #[test]
    fn unrealizable_overlap_is_a_row_error() {
        // |B.G| may not exceed |B||G| = sqrt(2.44)
        let spec =
            SweepSpec::new(worked_full_rank(), SweepParameter::BDotG, vec![1.2, 5.0], false, None)
                .unwrap();
        let rows = run_sweep(&spec, false);
        assert!(rows[0].result.is_ok());
        assert!(rows[1].result.as_ref().unwrap_err().contains("not realizable"));
    }

    #[test]
    fn fractional_counts_are_row_errors() {
        let spec = SweepSpec::new(worked(), SweepParameter::GoodCount, vec![1.0, 1.5], false, None).unwrap();
        let rows = run_sweep(&spec, false);
        assert!(rows[0].result.is_ok() && rows[1].result.is_err());
    }

    #[test]
    fn grid_must_be_monotone_and_non_empty() {
        assert!(SweepSpec::new(worked(), SweepParameter::GoodCount, vec![], false, None).is_err());
        assert!(SweepSpec::new(worked(), SweepParameter::GoodCount, vec![1.0, 1.0], false, None).is_err());
        assert!(SweepSpec::new(worked(), SweepParameter::GoodCount, vec![3.0, 2.0], false, None).is_ok());
    }

    #[test]
    fn parallel_and_serial_sweeps_match() {
        let grid: Vec<f64> = (1..=40).map(|i| f64::from(i) * 0.05).collect();
        let spec = SweepSpec::new(worked(), SweepParameter::PScaleAlongG, grid, true, None).unwrap();
        assert_eq!(run_sweep(&spec, true), run_sweep(&spec, false));
    }
}
