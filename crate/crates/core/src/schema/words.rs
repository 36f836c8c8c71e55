/// Upper bound on `incident_summary`, inclusive.
pub const MAX_SUMMARY_WORDS: usize = 250;

/// Number of maximal runs of non-whitespace characters.
pub fn count_words(text: &str) -> usize {
    text.split_whitespace().count()
}

/// Cuts `text` after its `max`-th word, keeping the original spacing of the
/// retained prefix. Returns `None` when nothing needs cutting.
pub fn truncate_words(text: &str, max: usize) -> Option<&str> {
    let mut words = 0;
    let mut in_word = false;
    for (i, c) in text.char_indices() {
        if c.is_whitespace() {
            if in_word && words == max {
                let rest = &text[i..];
                return (count_words(rest) > 0).then_some(&text[..i]);
            }
            in_word = false;
        } else if !in_word {
            in_word = true;
            words += 1;
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert_eq!(count_words(""), 0);
        assert_eq!(count_words("a  b\tc"), 3);
        assert_eq!(count_words("   \n\t "), 0);
        assert_eq!(count_words("x\u{00a0}y"), 2);
    }

    #[test]
    fn truncation_keeps_prefix() {
        assert_eq!(truncate_words("a  b c d", 2), Some("a  b"));
        assert_eq!(truncate_words("a b", 2), None);
        assert_eq!(truncate_words("a b   ", 2), None);
        assert_eq!(truncate_words("", 0), None);
        let long: String = (0..300).map(|i| format!("w{i} ")).collect();
        let cut = truncate_words(&long, MAX_SUMMARY_WORDS).unwrap();
        assert_eq!(count_words(cut), MAX_SUMMARY_WORDS);
        assert!(cut.ends_with("w249"));
    }
}
