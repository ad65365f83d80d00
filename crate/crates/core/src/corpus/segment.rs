use crate::{Error, Result};

use super::Language;

const TERMINALS: [char; 4] = ['.', '!', '?', '…'];
const CLOSERS: [char; 9] = ['"', '\'', '”', '’', ')', ']', '»', '›', '}'];
const OPENERS: [char; 9] = ['"', '\'', '“', '‘', '(', '[', '«', '¿', '¡'];

const ABBREV_EN: &[&str] = &[
    "mr", "mrs", "ms", "dr", "prof", "sr", "jr", "st", "mt", "vs", "fig", "no", "vol", "inc", "ltd", "co", "corp",
    "jan", "feb", "mar", "apr", "jun", "jul", "aug", "sep", "sept", "oct", "nov", "dec", "gen", "col", "capt", "lt",
    "sgt", "rev", "hon", "gov", "sen", "rep", "approx", "dept", "est", "al", "pp", "ch",
];
const ABBREV_ES: &[&str] = &[
    "sr", "sra", "srta", "dr", "dra", "ud", "uds", "lic", "ing", "prof", "pág", "núm", "av", "avda", "sto", "sta",
    "dña", "vol", "cap", "aprox", "admón",
];
const ABBREV_FR: &[&str] = &[
    "m", "mm", "mme", "mmes", "mlle", "mlles", "dr", "pr", "st", "ste", "me", "mgr", "cf", "vol", "av", "bd", "chap",
    "env", "fig", "éd",
];

fn abbreviations(language: Language) -> &'static [&'static str] {
    match language {
        Language::Es => ABBREV_ES,
        Language::Fr => ABBREV_FR,
        Language::En | Language::Other => ABBREV_EN,
    }
}

/// Splits plain text into sentences.
///
/// A boundary is a run of terminal punctuation (`. ! ? …`), optionally
/// followed by closing quotes or brackets, then whitespace, then an
/// uppercase letter, a digit or an opening quote/bracket. A single period
/// after a known abbreviation, an uppercase initial (`J.`) or a dotted token (`U.S.`)
/// is not a boundary. Blank lines always end a sentence. Whitespace inside
/// a sentence is collapsed to single spaces.
pub fn segment_sentences(text: &str, language: Language) -> Result<Vec<String>> {
    if text.trim().is_empty() {
        return Err(Error::EmptyDocument);
    }
    let abbrevs = abbreviations(language);
    let mut sentences = Vec::new();
    for paragraph in paragraphs(text) {
        split_paragraph(&paragraph, abbrevs, &mut sentences);
    }
    Ok(sentences)
}

fn paragraphs(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut current: Vec<&str> = Vec::new();
    for line in text.lines() {
        if line.trim().is_empty() {
            if !current.is_empty() {
                out.push(current.join(" "));
                current.clear();
            }
        } else {
            current.push(line);
        }
    }
    if !current.is_empty() {
        out.push(current.join(" "));
    }
    out
}

fn split_paragraph(paragraph: &str, abbrevs: &[&str], out: &mut Vec<String>) {
    // Collapse whitespace first so every gap is exactly one space.
    let words: Vec<&str> = paragraph.split_whitespace().collect();
    let mut current: Vec<&str> = Vec::new();
    for (i, word) in words.iter().enumerate() {
        current.push(word);
        let Some(next) = words.get(i + 1) else { break };
        if ends_sentence(word, abbrevs) && starts_sentence(next) {
            out.push(current.join(" "));
            current.clear();
        }
    }
    if !current.is_empty() {
        out.push(current.join(" "));
    }
}

fn ends_sentence(word: &str, abbrevs: &[&str]) -> bool {
    let body = word.trim_end_matches(CLOSERS);
    let stem = body.trim_end_matches(TERMINALS);
    let run = &body[stem.len()..];
    if run.is_empty() {
        return false;
    }
    if run != "." {
        return true;
    }
    let stem = stem.trim_start_matches(OPENERS);
    if stem.is_empty() {
        return true;
    }
    let mut chars = stem.chars();
    let single_letter = matches!((chars.next(), chars.next()), (Some(c), None) if c.is_uppercase());
    if single_letter || stem.contains('.') {
        return false;
    }
    let lower = stem.to_lowercase();
    !abbrevs.contains(&lower.as_str())
}

fn starts_sentence(word: &str) -> bool {
    let mut chars = word.chars().skip_while(|c| OPENERS.contains(c));
    match chars.next() {
        Some(c) => c.is_uppercase() || c.is_ascii_digit(),
        None => word.chars().next().is_some_and(|c| OPENERS.contains(&c)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seg(text: &str) -> Vec<String> {
        segment_sentences(text, Language::En).unwrap()
    }

    #[test]
    fn two_periods() {
        assert_eq!(seg("A b. C d."), vec!["A b.", "C d."]);
    }

    #[test]
    fn no_terminator() {
        assert_eq!(seg("One sentence only"), vec!["One sentence only"]);
    }

    #[test]
    fn abbreviation_guard() {
        assert_eq!(seg("Dr. Smith runs. He wins."), vec!["Dr. Smith runs.", "He wins."]);
        assert_eq!(
            seg("J. R. Tolkien wrote it. Fine."),
            vec!["J. R. Tolkien wrote it.", "Fine."]
        );
        assert_eq!(seg("The U.S. Army left. Then."), vec!["The U.S. Army left.", "Then."]);
    }

    #[test]
    fn lowercase_continuation_does_not_split() {
        assert_eq!(seg("It cost 5 dollars. and more"), vec!["It cost 5 dollars. and more"]);
    }

    #[test]
    fn question_exclamation_ellipsis_and_quotes() {
        assert_eq!(
            seg("Really?! Yes. \"Go now.\" She left… 42 people stayed."),
            vec!["Really?!", "Yes.", "\"Go now.\"", "She left…", "42 people stayed."]
        );
    }

    #[test]
    fn paragraph_break_always_splits() {
        assert_eq!(seg("first part\n\nsecond part"), vec!["first part", "second part"]);
        assert_eq!(seg("a line\nwrapped here. Next"), vec!["a line wrapped here.", "Next"]);
    }

    #[test]
    fn language_specific_abbreviations() {
        let es = segment_sentences("La Sra. García llegó. ¿Qué pasó?", Language::Es).unwrap();
        assert_eq!(es, vec!["La Sra. García llegó.", "¿Qué pasó?"]);
        let fr = segment_sentences("Mme. Curie arrive. Elle part.", Language::Fr).unwrap();
        assert_eq!(fr, vec!["Mme. Curie arrive.", "Elle part."]);
    }

    #[test]
    fn empty_input_is_an_error() {
        assert!(matches!(
            segment_sentences("  \n\t ", Language::En),
            Err(Error::EmptyDocument)
        ));
    }
}
