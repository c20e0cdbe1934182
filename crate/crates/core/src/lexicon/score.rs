use serde::{Deserialize, Serialize};

use super::Lexicon;
use crate::preprocess::Token;

/// Scores below this magnitude are treated as neutral by [`score_log`].
const LOG_DEAD_ZONE: f64 = 0.1;

/// Average and logarithmic document scores.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScorePair {
    pub avg: f64,
    pub log: f64,
}

impl ScorePair {
    pub fn from_avg(avg: f64) -> Self {
        ScorePair {
            avg,
            log: score_log(avg),
        }
    }

    pub fn of_tokens(tokens: &[Token], lex: &Lexicon) -> Self {
        ScorePair::from_avg(score_avg(tokens, lex))
    }
}

/// Lexicon polarity of a token with its negation and but-clause flips
/// applied.
pub fn token_polarity(token: &Token, lex: &Lexicon) -> f64 {
    let mut p = lex.polarity(&token.lexicon_key());
    if token.negated {
        p = -p;
    }
    if token.flipped {
        p = -p;
    }
    p
}

/// Sum of token polarities divided by the number of tokens that carry a
/// non-zero lexicon polarity. Zero when no token does.
pub fn score_avg(tokens: &[Token], lex: &Lexicon) -> f64 {
    let mut sum = 0.0;
    let mut bearing = 0usize;
    for t in tokens {
        let p = token_polarity(t, lex);
        if p != 0.0 {
            sum += p;
            bearing += 1;
        }
    }
    if bearing == 0 {
        0.0
    } else {
        (sum / bearing as f64).clamp(-1.0, 1.0)
    }
}

/// `sign(avg) * log10(|10 avg|)` outside the dead zone `|avg| <= 0.1`,
/// zero inside it. Maps `[-1, 1]` onto `[-1, 1]`.
pub fn score_log(avg: f64) -> f64 {
    if avg.abs() <= LOG_DEAD_ZONE {
        0.0
    } else {
        avg.signum() * (10.0 * avg.abs()).log10()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::preprocess::{tokenize, PosTag};
    use proptest::prelude::*;

    fn masterful_lexicon() -> Lexicon {
        Lexicon::from_entries(
            "worked",
            0,
            [
                ("masterful", 0.92),
                ("master", 1.0),
                ("unique", 1.0),
                ("compelling", 1.0),
                ("fatalist", -0.84),
            ],
        )
        .unwrap()
    }

    #[test]
    fn masterful_sentence() {
        let text = "a masterful film from a master filmmaker , unique in its deceptive grimness , \
                    compelling in its fatalist world view .";
        let tokens = tokenize(text, &Lexicon::empty("none"));
        let score = score_avg(&tokens, &masterful_lexicon());
        assert!((score - 0.616).abs() < 1e-9, "{score}");
    }

    #[test]
    fn unknown_tokens_score_zero() {
        let tokens = tokenize("nothing here", &Lexicon::empty("none"));
        assert_eq!(score_avg(&tokens, &masterful_lexicon()), 0.0);
        assert_eq!(score_avg(&[], &masterful_lexicon()), 0.0);
    }

    #[test]
    fn single_negative_token() {
        let lex = Lexicon::from_entries("x", 0, [("awful", -1.0)]).unwrap();
        let tokens = tokenize("awful", &Lexicon::empty("none"));
        assert_eq!(score_avg(&tokens, &lex), -1.0);
    }

    #[test]
    fn negation_and_flip_each_reverse() {
        let lex = Lexicon::from_entries("x", 0, [("good", 0.5)]).unwrap();
        let mut t = Token::new("good", PosTag::Other, 0);
        assert_eq!(token_polarity(&t, &lex), 0.5);
        t.negated = true;
        assert_eq!(token_polarity(&t, &lex), -0.5);
        t.flipped = true;
        assert_eq!(token_polarity(&t, &lex), 0.5);
    }

    #[test]
    fn replaced_emoticons_use_glyph_polarity() {
        let lex = Lexicon::from_entries("emo", 0, [(":-(", -1.0)]).unwrap();
        let tokens = tokenize("meh :-(", &lex);
        assert_eq!(tokens[1].normalized, "neg_emo");
        assert_eq!(score_avg(&tokens, &lex), -1.0);
    }

    #[test]
    fn log_score_examples() {
        assert_eq!(score_log(1.0), 1.0);
        assert_eq!(score_log(-1.0), -1.0);
        assert_eq!(score_log(0.05), 0.0);
        assert_eq!(score_log(0.1), 0.0);
        assert_eq!(score_log(-0.1), 0.0);
        // -log10(5) to 15 significant digits.
        assert!((score_log(-0.5) + 0.698_970_004_336_019).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn avg_in_range_and_odd_under_full_flip(
            polarities in prop::collection::vec(-1.0f64..=1.0, 0..12),
            negated in prop::collection::vec(any::<bool>(), 12),
        ) {
            let entries: Vec<(String, f64)> = polarities
                .iter()
                .enumerate()
                .map(|(i, &p)| (format!("w{i}"), p))
                .collect();
            let lex = Lexicon::from_entries("p", 0, entries).unwrap();
            let mut tokens: Vec<Token> = (0..polarities.len())
                .map(|i| {
                    let mut t = Token::new(format!("w{i}"), PosTag::Other, i);
                    t.negated = negated[i];
                    t
                })
                .collect();
            let s = score_avg(&tokens, &lex);
            prop_assert!((-1.0..=1.0).contains(&s));
            for t in &mut tokens {
                t.flipped = !t.flipped;
            }
            prop_assert_eq!(score_avg(&tokens, &lex), -s);
        }

        #[test]
        fn log_sign_matches_avg(avg in -1.0f64..=1.0) {
            let log = score_log(avg);
            prop_assert!(log.abs() <= 1.0);
            prop_assert!(log == 0.0 || log.signum() == avg.signum());
            prop_assert_eq!(score_log(-avg), -log);
        }
    }
}
