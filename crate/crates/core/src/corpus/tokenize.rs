use std::collections::HashSet;

use super::Language;

const STOP_EN: &[&str] = &[
    "a", "about", "after", "all", "also", "an", "and", "any", "are", "as", "at", "be", "been", "but", "by", "can",
    "could", "did", "do", "does", "for", "from", "had", "has", "have", "he", "her", "his", "if", "in", "into", "is",
    "it", "its", "more", "most", "not", "of", "on", "one", "or", "other", "our", "out", "over", "she", "so", "some",
    "such", "than", "that", "the", "their", "them", "then", "there", "these", "they", "this", "those", "to", "up",
    "was", "we", "were", "what", "when", "which", "who", "will", "with", "would", "you",
];
const STOP_ES: &[&str] = &[
    "al", "algo", "como", "con", "de", "del", "el", "ella", "ellos", "en", "entre", "es", "esta", "este", "fue", "ha",
    "hay", "la", "las", "le", "les", "lo", "los", "más", "me", "mi", "muy", "no", "nos", "para", "pero", "por", "que",
    "se", "ser", "si", "sin", "sobre", "son", "su", "sus", "también", "un", "una", "uno", "unos", "y", "ya",
];
const STOP_FR: &[&str] = &[
    "au", "aux", "avec", "ce", "ces", "dans", "de", "des", "du", "elle", "en", "est", "et", "il", "ils", "la", "le",
    "les", "leur", "lui", "mais", "même", "ne", "nous", "on", "ou", "par", "pas", "plus", "pour", "qu'il", "que",
    "qui", "sa", "se", "ses", "son", "sont", "sur", "un", "une", "vous",
];

/// Built-in stopword list for a language (empty for [`Language::Other`]).
pub fn default_stopwords(language: Language) -> HashSet<String> {
    let list: &[&str] = match language {
        Language::En => STOP_EN,
        Language::Es => STOP_ES,
        Language::Fr => STOP_FR,
        Language::Other => &[],
    };
    list.iter().map(|w| w.to_string()).collect()
}

/// Word tokenizer. Stopword removal is off unless a list is configured.
#[derive(Debug, Clone, Default)]
pub struct Tokenizer {
    stopwords: Option<HashSet<String>>,
}

impl Tokenizer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_stopwords(stopwords: HashSet<String>) -> Self {
        Self {
            stopwords: Some(stopwords),
        }
    }

    pub fn with_default_stopwords(language: Language) -> Self {
        Self::with_stopwords(default_stopwords(language))
    }

    /// Lowercases and splits on anything that is not alphanumeric, keeping
    /// apostrophes and hyphens only between two alphanumeric characters.
    /// Tokens shorter than two characters or without a letter are dropped.
    pub fn tokenize(&self, text: &str) -> Vec<String> {
        let lowered: Vec<char> = text.chars().flat_map(char::to_lowercase).collect();
        let mut tokens = Vec::new();
        let mut current = String::new();
        for (i, &c) in lowered.iter().enumerate() {
            if c.is_alphanumeric() {
                current.push(c);
                continue;
            }
            let joiner = match c {
                '\'' | '’' => Some('\''),
                '-' | '‐' => Some('-'),
                _ => None,
            };
            let next_is_alnum = lowered.get(i + 1).is_some_and(|n| n.is_alphanumeric());
            match joiner {
                Some(j) if !current.is_empty() && next_is_alnum => current.push(j),
                _ => self.finish(&mut current, &mut tokens),
            }
        }
        self.finish(&mut current, &mut tokens);
        tokens
    }

    fn finish(&self, current: &mut String, tokens: &mut Vec<String>) {
        if current.is_empty() {
            return;
        }
        let token = std::mem::take(current);
        if token.chars().count() < 2 || !token.chars().any(char::is_alphabetic) {
            return;
        }
        if self.stopwords.as_ref().is_some_and(|s| s.contains(&token)) {
            return;
        }
        tokens.push(token);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn case_folding_and_punctuation() {
        assert_eq!(
            Tokenizer::new().tokenize("The CAT, the cat!"),
            ["the", "cat", "the", "cat"]
        );
    }

    #[test]
    fn stopwords_when_configured() {
        let t = Tokenizer::with_stopwords(["the".to_string()].into_iter().collect());
        assert_eq!(t.tokenize("The CAT, the cat!"), ["cat", "cat"]);
        let en = Tokenizer::with_default_stopwords(Language::En);
        assert_eq!(en.tokenize("The CAT, the cat!"), ["cat", "cat"]);
    }

    #[test]
    fn internal_apostrophes_and_hyphens() {
        let t = Tokenizer::new();
        assert_eq!(t.tokenize("l'éléphant marche"), ["l'éléphant", "marche"]);
        assert_eq!(
            t.tokenize("l’Été well-known -- 'quoted' dogs'"),
            ["l'été", "well-known", "quoted", "dogs"]
        );
        assert_eq!(t.tokenize("a--b"), Vec::<String>::new());
    }

    #[test]
    fn digits_and_short_tokens_dropped() {
        let t = Tokenizer::new();
        assert_eq!(
            t.tokenize("In 1999 a 3d x-ray cost 12-15 euros"),
            ["in", "3d", "x-ray", "cost", "euros"]
        );
    }

    proptest! {
        #[test]
        fn idempotent_on_own_output(text in "\\PC{0,80}") {
            let t = Tokenizer::new();
            let first = t.tokenize(&text);
            let again = t.tokenize(&first.join(" "));
            prop_assert_eq!(first, again);
        }
    }
}
