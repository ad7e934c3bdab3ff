use serde::Serialize;

use super::Lexicon;

/// Largest edit distance at which a dictionary word is offered.
pub const MAX_EDIT_DISTANCE: usize = 2;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Candidate {
    pub word: String,
    pub distance: usize,
    pub frequency: u64,
}

/// Unit-cost Levenshtein distance over chars.
pub fn levenshtein(a: &str, b: &str) -> usize {
    strsim::levenshtein(a, b)
}

/// Ranked corrections for `token`.
///
/// A dictionary word corrects to itself alone, and so does a token with no
/// letters. Otherwise every dictionary word within [`MAX_EDIT_DISTANCE`] is
/// returned, ordered by distance, then descending frequency, then
/// lexicographically. An empty list marks the token as unknown.
pub fn spell_correct(token: &str, lexicon: &Lexicon) -> Vec<Candidate> {
    let token = token.to_lowercase();
    if let Some(frequency) = lexicon.frequency(&token) {
        return vec![Candidate { word: token, distance: 0, frequency }];
    }
    if !token.chars().any(char::is_alphabetic) {
        return vec![Candidate { word: token, distance: 0, frequency: 0 }];
    }
    let len = token.chars().count();
    let mut out: Vec<Candidate> = (len.saturating_sub(MAX_EDIT_DISTANCE)..=len + MAX_EDIT_DISTANCE)
        .flat_map(|l| lexicon.words_of_length(l))
        .filter_map(|word| {
            let distance = levenshtein(&token, word);
            (distance <= MAX_EDIT_DISTANCE).then(|| Candidate {
                word: word.clone(),
                distance,
                frequency: lexicon.frequency(word).unwrap_or(0),
            })
        })
        .collect();
    out.sort_by(|a, b| a.distance.cmp(&b.distance).then(b.frequency.cmp(&a.frequency)).then(a.word.cmp(&b.word)));
    out
}

/// Up to `limit` names closest to `name`, compared case-insensitively.
/// Names further than a third of `name`'s length (and at least 2) are left
/// out.
pub fn nearest_names<'a>(name: &str, names: impl IntoIterator<Item = &'a str>, limit: usize) -> Vec<&'a str> {
    let target = name.to_lowercase();
    let cutoff = (target.chars().count() / 3).max(2);
    let mut scored: Vec<(usize, &str)> =
        names.into_iter().map(|n| (levenshtein(&target, &n.to_lowercase()), n)).filter(|(d, _)| *d <= cutoff).collect();
    scored.sort();
    scored.dedup();
    scored.into_iter().take(limit).map(|(_, n)| n).collect()
}
