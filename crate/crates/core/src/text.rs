//! Small text utilities shared by tokenization, name normalization and
//! gazetteer matching.

use unicode_normalization::char::is_combining_mark;
use unicode_normalization::UnicodeNormalization;

/// Decompose and drop combining marks, so "Côte" becomes "Cote".
///
/// Characters without a canonical decomposition (e.g. "œ", "ø") pass
/// through unchanged.
pub fn fold_diacritics(s: &str) -> String {
    s.nfd().filter(|c| !is_combining_mark(*c)).collect()
}

/// Collapse every run of Unicode whitespace into one ASCII space and trim.
pub fn collapse_whitespace(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for word in s.split_whitespace() {
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(word);
    }
    out
}

/// Uppercase, fold diacritics and turn every non-alphanumeric char into a
/// separator. Returns the space-joined words.
pub fn match_key(s: &str) -> String {
    let folded = fold_diacritics(&s.to_uppercase());
    let spaced: String = folded
        .chars()
        .map(|c| if c.is_alphanumeric() { c } else { ' ' })
        .collect();
    collapse_whitespace(&spaced)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn folds_french_accents() {
        assert_eq!(fold_diacritics("Provence-Alpes-Côte-d'Azur"), "Provence-Alpes-Cote-d'Azur");
        assert_eq!(fold_diacritics("Île-de-France Ételles"), "Ile-de-France Etelles");
    }

    #[test]
    fn collapse_handles_nbsp_and_newlines() {
        assert_eq!(collapse_whitespace("  a\u{a0}\u{a0}b \n\t c "), "a b c");
        assert_eq!(collapse_whitespace(""), "");
    }

    #[test]
    fn match_key_is_upper_and_separated() {
        assert_eq!(match_key("Provence-Alpes-Côte d'Azur"), "PROVENCE ALPES COTE D AZUR");
    }
}
