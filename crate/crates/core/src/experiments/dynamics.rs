use serde::{Deserialize, Serialize};

use crate::attention::{GenerationTrace, TokenClass};

/// Qualitative shape of a recorded trace's output classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DynamicsLabel {
    AllGood,
    TipsToBAbsorbed,
    BadFromStart,
    /// The class sequence ends in at least two repeats of a pattern of
    /// period two or more that mixes classes.
    Oscillatory,
    Other,
}

/// Classifies the chosen-token classes of `trace`. Only the recorded horizon
/// is inspected.
pub fn classify_dynamics(trace: &GenerationTrace) -> DynamicsLabel {
    let classes: Vec<TokenClass> = trace.chosen_classes().collect();
    classify_classes(&classes)
}

pub(crate) fn classify_classes(classes: &[TokenClass]) -> DynamicsLabel {
    use TokenClass::{Bad, Good};
    if classes.is_empty() {
        return DynamicsLabel::Other;
    }
    if classes.iter().all(|&c| c == Good) {
        return DynamicsLabel::AllGood;
    }
    let prefix = classes.iter().take_while(|&&c| c == Good).count();
    if classes[prefix..].iter().all(|&c| c == Bad) {
        return if prefix == 0 {
            DynamicsLabel::BadFromStart
        } else {
            DynamicsLabel::TipsToBAbsorbed
        };
    }
    if is_eventually_periodic(classes) {
        return DynamicsLabel::Oscillatory;
    }
    DynamicsLabel::Other
}

fn is_eventually_periodic(classes: &[TokenClass]) -> bool {
    let n = classes.len();
    (2..=n / 2).any(|period| {
        // length of the longest suffix with classes[i] == classes[i + period]
        let mut len = period;
        while len < n && classes[n - 1 - len] == classes[n - 1 - len + period] {
            len += 1;
        }
        let pattern = &classes[n - period..];
        len >= 2 * period && pattern.iter().any(|&c| c != pattern[0])
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use TokenClass::{Bad as B, Good as G, Neutral as N};

    #[test]
    fn labels() {
        assert_eq!(classify_classes(&[G, G, G]), DynamicsLabel::AllGood);
        assert_eq!(classify_classes(&[B, B]), DynamicsLabel::BadFromStart);
        let mut tip = vec![G; 8];
        tip.extend([B; 5]);
        assert_eq!(classify_classes(&tip), DynamicsLabel::TipsToBAbsorbed);
        assert_eq!(classify_classes(&[G, G, B, G, B, G, B]), DynamicsLabel::Oscillatory);
        assert_eq!(classify_classes(&[G, B, N, G, B, N]), DynamicsLabel::Oscillatory);
        assert_eq!(classify_classes(&[G, B, G, G, G]), DynamicsLabel::Other);
        assert_eq!(classify_classes(&[]), DynamicsLabel::Other);
    }

    #[test]
    fn single_repeat_is_not_oscillation() {
        // one G,B period preceded by noise is not enough evidence
        assert_eq!(classify_classes(&[G, G, N, G, B]), DynamicsLabel::Other);
    }
}
