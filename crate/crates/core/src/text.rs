//! Text normalization shared by keyword matching and gazetteer lookup.

use unicode_normalization::char::is_combining_mark;
use unicode_normalization::UnicodeNormalization;

/// Compatibility-decomposes, strips combining marks, lowercases and collapses
/// whitespace runs to a single space (trimmed at both ends).
///
/// ```
/// use infodemic_core::normalize_text;
/// assert_eq!(normalize_text("  FORLÌ  "), "forli");
/// assert_eq!(normalize_text("Vaccinerò"), "vaccinero");
/// ```
pub fn normalize_text(s: &str) -> String {
    let mut current = fold(s);
    // Lowercasing can expose new decompositions ('İ' -> "i\u{307}") and NFKD can
    // expose new uppercase ('ℌ' -> 'H'), so iterate to a fixpoint.
    for _ in 0..8 {
        let next = fold(&current);
        if next == current {
            break;
        }
        current = next;
    }
    current.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn fold(s: &str) -> String {
    s.nfkd()
        .filter(|c| !is_combining_mark(*c))
        .flat_map(char::to_lowercase)
        .collect()
}

/// Splits already-normalized text into maximal alphanumeric runs.
pub fn tokens(normalized: &str) -> impl Iterator<Item = &str> {
    normalized
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
}

/// Normalizes and tokenizes in one step.
pub fn tokenize(s: &str) -> Vec<String> {
    tokens(&normalize_text(s)).map(str::to_owned).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn strips_accents() {
        assert_eq!(normalize_text("Vaccinerò"), "vaccinero");
        assert_eq!(normalize_text("perché è così"), "perche e cosi");
    }

    #[test]
    fn empty_input() {
        assert_eq!(normalize_text(""), "");
        assert_eq!(normalize_text(" \t\n "), "");
    }

    #[test]
    fn trims_and_collapses() {
        assert_eq!(normalize_text("  FORLÌ  "), "forli");
        assert_eq!(normalize_text("Sesto \u{a0}  San\tGiovanni"), "sesto san giovanni");
    }

    #[test]
    fn compatibility_forms() {
        assert_eq!(normalize_text("ﬁ"), "fi");
        assert_eq!(normalize_text("ℌello"), "hello");
        assert_eq!(normalize_text("İstanbul"), "istanbul");
    }

    #[test]
    fn tokens_split_on_punctuation_and_hashtags() {
        let t = tokenize("#IoNonMiVaccino, mai!! vaccinare-h24");
        assert_eq!(t, ["iononmivaccino", "mai", "vaccinare", "h24"]);
        assert_eq!(tokenize("Reggio nell'Emilia"), ["reggio", "nell", "emilia"]);
        assert!(tokenize("  ...  ").is_empty());
    }

    proptest! {
        #[test]
        fn normalization_is_idempotent(s in "\\PC{0,40}") {
            let once = normalize_text(&s);
            prop_assert_eq!(normalize_text(&once), once.clone());
        }

        #[test]
        fn normalization_is_idempotent_on_any_chars(s in any::<String>()) {
            let once = normalize_text(&s);
            prop_assert_eq!(normalize_text(&once), once.clone());
        }

        #[test]
        fn case_does_not_change_tokens(s in "[a-zA-Zàèéìòù#!,. ]{0,40}") {
            prop_assert_eq!(tokenize(&s), tokenize(&s.to_uppercase()));
        }
    }
}
