//! Text preprocessing for journal vectors.

/// English function words dropped by [`tokenize`]. Sorted for binary search.
pub const STOPWORDS: &[&str] = &[
    "about", "above", "after", "again", "against", "all", "also", "although", "among", "and",
    "another", "any", "are", "because", "been", "before", "being", "below", "between", "both",
    "but", "can", "cannot", "could", "did", "does", "doing", "down", "during", "each", "either",
    "else", "ever", "every", "few", "for", "from", "further", "had", "has", "have", "having",
    "her", "here", "hers", "herself", "him", "himself", "his", "how", "however", "into", "its",
    "itself", "just", "less", "may", "might", "more", "most", "much", "must", "neither", "nor",
    "not", "now", "off", "once", "one", "only", "other", "ought", "our", "ours", "ourselves",
    "out", "over", "own", "same", "shall", "she", "should", "since", "some", "such", "than",
    "that", "the", "their", "theirs", "them", "themselves", "then", "there", "these", "they",
    "this", "those", "through", "thus", "too", "under", "until", "upon", "very", "was", "were",
    "what", "when", "where", "whether", "which", "while", "who", "whom", "whose", "why", "will",
    "with", "within", "without", "would", "yet", "you", "your", "yours", "yourself",
];

pub fn is_stopword(token: &str) -> bool {
    STOPWORDS.binary_search(&token).is_ok()
}

/// Lowercases, splits on non-alphanumeric characters, and drops tokens
/// shorter than three characters or in [`STOPWORDS`].
pub fn tokenize(text: &str) -> Vec<String> {
    text.to_lowercase()
        .split(|c: char| !c.is_alphanumeric())
        .filter(|token| token.chars().count() >= 3 && !is_stopword(token))
        .map(str::to_string)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stopwords_are_sorted_and_sized() {
        assert!(STOPWORDS.windows(2).all(|w| w[0] < w[1]));
        assert!((110..=130).contains(&STOPWORDS.len()), "{}", STOPWORDS.len());
    }

    #[test]
    fn examples() {
        assert_eq!(tokenize("Coronary artery disease."), ["coronary", "artery", "disease"]);
        assert!(tokenize("").is_empty());
        assert!(tokenize("the of and").is_empty());
        assert_eq!(tokenize("Angio-plasty, in 2009: a β-blocker"), ["angio", "plasty", "2009", "blocker"]);
    }
}
