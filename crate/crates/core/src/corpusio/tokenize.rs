use unicode_normalization::UnicodeNormalization;

/// How raw lines are split into tokens.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Tokenizer {
    /// NFC-normalize, split on whitespace, detach every punctuation or symbol
    /// character as its own token.
    #[default]
    Default,
    /// Plain whitespace split with no normalization.
    Whitespace,
}

impl Tokenizer {
    pub fn tokenize(&self, text: &str) -> Vec<String> {
        match self {
            Tokenizer::Whitespace => text.split_whitespace().map(str::to_owned).collect(),
            Tokenizer::Default => {
                let normalized: String = text.nfc().collect();
                let mut tokens = Vec::new();
                for chunk in normalized.split_whitespace() {
                    let mut current = String::new();
                    for c in chunk.chars() {
                        if is_detached(c) {
                            if !current.is_empty() {
                                tokens.push(std::mem::take(&mut current));
                            }
                            tokens.push(c.to_string());
                        } else {
                            current.push(c);
                        }
                    }
                    if !current.is_empty() {
                        tokens.push(current);
                    }
                }
                tokens
            }
        }
    }
}

impl std::str::FromStr for Tokenizer {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "default" => Ok(Tokenizer::Default),
            "whitespace" => Ok(Tokenizer::Whitespace),
            other => Err(crate::Error::arg(format!("unknown tokenizer {other:?}"))),
        }
    }
}

// Combining marks stay attached to their base character.
fn is_detached(c: char) -> bool {
    !c.is_alphanumeric() && !c.is_whitespace() && !is_mark(c)
}

fn is_mark(c: char) -> bool {
    matches!(c as u32,
        0x0300..=0x036F | 0x0483..=0x0489 | 0x0591..=0x05BD | 0x0610..=0x061A
        | 0x064B..=0x065F | 0x0900..=0x0903 | 0x093A..=0x094F | 0x0E31 | 0x0E34..=0x0E3A
        | 0x1AB0..=0x1AFF | 0x1DC0..=0x1DFF | 0x20D0..=0x20FF | 0xFE20..=0xFE2F)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn punctuation_is_detached() {
        let t = Tokenizer::Default.tokenize("Hello, world!  Bye.");
        assert_eq!(t, ["Hello", ",", "world", "!", "Bye", "."]);
    }

    #[test]
    fn nfc_composes() {
        // "e" + combining acute == precomposed é
        let a = Tokenizer::Default.tokenize("cafe\u{301}");
        let b = Tokenizer::Default.tokenize("caf\u{e9}");
        assert_eq!(a, b);
        assert_eq!(a.len(), 1);
    }

    #[test]
    fn whitespace_mode_keeps_punctuation() {
        assert_eq!(Tokenizer::Whitespace.tokenize("a, b"), ["a,", "b"]);
    }

    proptest! {
        #[test]
        fn retokenizing_joined_tokens_is_idempotent(s in "\\PC{0,40}") {
            let tok = Tokenizer::Default;
            let once = tok.tokenize(&s);
            let twice = tok.tokenize(&once.join(" "));
            prop_assert_eq!(once, twice);
        }

        #[test]
        fn tokenization_is_deterministic(s in "\\PC{0,40}") {
            prop_assert_eq!(Tokenizer::Default.tokenize(&s), Tokenizer::Default.tokenize(&s));
        }
    }
}
