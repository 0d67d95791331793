/// Lowercases `text` and splits it into tokens: maximal runs of two or more word
/// characters (Unicode letters, digits, underscore). Shorter runs are
/// dropped. No stop-word filtering happens here.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut current = String::new();
    let mut run_chars = 0usize;
    let mut flush = |current: &mut String, run_chars: &mut usize| {
        if *run_chars >= 2 {
            tokens.push(std::mem::take(current));
        } else {
            current.clear();
        }
        *run_chars = 0;
    };
    for c in text.to_lowercase().chars() {
        if is_word_char(c) {
            current.push(c);
            run_chars += 1;
        } else {
            flush(&mut current, &mut run_chars);
        }
    }
    flush(&mut current, &mut run_chars);
    tokens
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn drops_single_characters() {
        assert_eq!(tokenize("No, it's not true!"), ["no", "it", "not", "true"]);
    }

    #[test]
    fn empty_and_case() {
        assert!(tokenize("").is_empty());
        assert_eq!(tokenize("AB ab Ab"), ["ab", "ab", "ab"]);
    }

    #[test]
    fn underscores_digits_and_unicode() {
        assert_eq!(tokenize("snake_case 42 x9 é Ünïcödé-word"), ["snake_case", "42", "x9", "ünïcödé", "word"]);
    }

    proptest! {
        #[test]
        fn rejoin_is_idempotent(text in "\\PC{0,60}") {
            let once = tokenize(&text);
            prop_assert_eq!(tokenize(&once.join(" ")), once);
        }
    }
}
