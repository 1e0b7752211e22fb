//! Surface-form predicates and string transforms for single tokens.
//!
//! Character classes are ASCII: letters are `[A-Za-z]`, digits `[0-9]`,
//! punctuation is the ASCII punctuation set, and everything else (emoji,
//! Bengali/Devanagari/Telugu script, whitespace) is "other".

use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum CharClass {
    Letter,
    Digit,
    Punct,
    Other,
}

fn class(c: char) -> CharClass {
    if c.is_ascii_alphabetic() {
        CharClass::Letter
    } else if c.is_ascii_digit() {
        CharClass::Digit
    } else if c.is_ascii_punctuation() {
        CharClass::Punct
    } else {
        CharClass::Other
    }
}

pub fn is_vowel(c: char) -> bool {
    matches!(c.to_ascii_lowercase(), 'a' | 'e' | 'i' | 'o' | 'u')
}

macro_rules! ortho_flags {
    ($($variant:ident),* $(,)?) => {
        /// Binary orthographic, punctuation and shape flags.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub enum OrthoFlag {
            $($variant),*
        }

        impl OrthoFlag {
            /// Every flag, in emission order.
            pub const ALL: &'static [OrthoFlag] = &[$(OrthoFlag::$variant),*];

            pub fn name(self) -> &'static str {
                match self {
                    $(OrthoFlag::$variant => stringify!($variant)),*
                }
            }
        }
    };
}

ortho_flags! {
    ContainsDigit,
    ContainsMoreDots,
    ContainsSlash,
    ContainsMoreSlash,
    ContainsAtTheRateBeg,
    ContainsAtTheRate,
    ContainsHash,
    ContainsHttp,
    ContainsHyphen,
    ContainsColon,
    ContainsHyphenatedNumber,
    ContainsDigitAndAlphabetBoth,
    ContainsPureDigitSeq,
    ContainsAllCaps,
    ContainsSeqOfSameChar,
    ContainsPuncSeq,
    ContainsCharsOtherThanAlphDigitPunc,
    LongRepeatedCharSeqAtEnd,
    ContainsLongVowelSeqInside,
    ThereExistsAsuffixDigitFollowsAlph,
    ThereExistsAsuffixDigit6FollowsAlphabets,
    ContainsFirstPartAlphabetSecondPartContainsOtherThanAlphDigitPunc,
}

impl OrthoFlag {
    fn bit(self) -> u32 {
        1 << (self as u32)
    }
}

impl fmt::Display for OrthoFlag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OrthoFlag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        OrthoFlag::ALL
            .iter()
            .copied()
            .find(|f| f.name() == s)
            .ok_or_else(|| format!("unknown orthographic flag {s:?}"))
    }
}

/// The set of flags firing on one token.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct OrthoFlags(u32);

impl OrthoFlags {
    pub fn get(self, flag: OrthoFlag) -> bool {
        self.0 & flag.bit() != 0
    }

    fn set(&mut self, flag: OrthoFlag, on: bool) {
        if on {
            self.0 |= flag.bit();
        }
    }

    /// Firing flags in [`OrthoFlag::ALL`] order.
    pub fn iter(self) -> impl Iterator<Item = OrthoFlag> {
        OrthoFlag::ALL.iter().copied().filter(move |f| self.get(*f))
    }
}

/// `true` if `chars` is `[0-9]+ '-' [0-9]+`.
fn is_hyphenated_number(chars: &[char]) -> bool {
    let Some(dash) = chars.iter().position(|&c| c == '-') else {
        return false;
    };
    let (head, tail) = (&chars[..dash], &chars[dash + 1..]);
    !head.is_empty()
        && !tail.is_empty()
        && head.iter().all(char::is_ascii_digit)
        && tail.iter().all(char::is_ascii_digit)
}

/// Character preceding the trailing run of letters, if that run is nonempty.
fn char_before_letter_suffix(chars: &[char]) -> Option<char> {
    let letters = chars
        .iter()
        .rev()
        .take_while(|c| c.is_ascii_alphabetic())
        .count();
    if letters == 0 || letters == chars.len() {
        return None;
    }
    Some(chars[chars.len() - letters - 1])
}

/// Longest run of consecutive vowel characters.
fn longest_vowel_run(chars: &[char]) -> usize {
    let mut best = 0;
    let mut run = 0;
    for &c in chars {
        run = if is_vowel(c) { run + 1 } else { 0 };
        best = best.max(run);
    }
    best
}

pub fn ortho_flags(surface: &str) -> OrthoFlags {
    use OrthoFlag::*;

    let chars: Vec<char> = surface.chars().collect();
    let classes: Vec<CharClass> = chars.iter().map(|&c| class(c)).collect();
    let count = |target: &[char]| chars.iter().filter(|c| target.contains(c)).count();
    let has_digit = classes.contains(&CharClass::Digit);
    let has_letter = classes.contains(&CharClass::Letter);
    let nonempty = !chars.is_empty();

    let mut flags = OrthoFlags::default();
    flags.set(ContainsDigit, has_digit);
    flags.set(ContainsMoreDots, count(&['.']) >= 2);
    flags.set(ContainsSlash, count(&['/', '\\']) >= 1);
    flags.set(ContainsMoreSlash, count(&['/', '\\']) >= 2);
    flags.set(ContainsAtTheRateBeg, chars.first() == Some(&'@'));
    flags.set(ContainsAtTheRate, chars.contains(&'@'));
    flags.set(ContainsHash, chars.contains(&'#'));
    flags.set(ContainsHttp, surface.to_ascii_lowercase().contains("http"));
    flags.set(ContainsHyphen, chars.contains(&'-'));
    flags.set(ContainsColon, chars.contains(&':'));
    flags.set(ContainsHyphenatedNumber, is_hyphenated_number(&chars));
    flags.set(ContainsDigitAndAlphabetBoth, has_digit && has_letter);
    flags.set(
        ContainsPureDigitSeq,
        nonempty && classes.iter().all(|&c| c == CharClass::Digit),
    );
    flags.set(
        ContainsAllCaps,
        nonempty && chars.iter().all(char::is_ascii_uppercase),
    );
    flags.set(
        ContainsSeqOfSameChar,
        chars.len() >= 2 && chars.iter().all(|&c| c == chars[0]),
    );
    flags.set(
        ContainsPuncSeq,
        nonempty && classes.iter().all(|&c| c == CharClass::Punct),
    );
    flags.set(
        ContainsCharsOtherThanAlphDigitPunc,
        classes.contains(&CharClass::Other),
    );
    flags.set(
        LongRepeatedCharSeqAtEnd,
        chars.len() >= 3 && {
            let n = chars.len();
            chars[n - 1] == chars[n - 2] && chars[n - 2] == chars[n - 3]
        },
    );
    flags.set(ContainsLongVowelSeqInside, longest_vowel_run(&chars) >= 3);
    let before_suffix = char_before_letter_suffix(&chars);
    flags.set(
        ThereExistsAsuffixDigitFollowsAlph,
        before_suffix.is_some_and(|c| c.is_ascii_digit()),
    );
    flags.set(
        ThereExistsAsuffixDigit6FollowsAlphabets,
        before_suffix == Some('6'),
    );
    flags.set(
        ContainsFirstPartAlphabetSecondPartContainsOtherThanAlphDigitPunc,
        {
            let head = classes
                .iter()
                .take_while(|&&c| c == CharClass::Letter)
                .count();
            head > 0 && classes[head..].contains(&CharClass::Other)
        },
    );
    flags
}

pub fn vowel_count(surface: &str) -> usize {
    surface.chars().filter(|&c| is_vowel(c)).count()
}

/// Replaces every run of two or more identical vowels with a single vowel.
///
/// ```
/// use mixtag::features::collapse_vowel_runs;
/// assert_eq!(collapse_vowel_runs("Khuuuuuub"), "Khub");
/// assert_eq!(collapse_vowel_runs("seeeela"), "sela");
/// ```
pub fn collapse_vowel_runs(surface: &str) -> String {
    let mut out = String::with_capacity(surface.len());
    let mut prev: Option<char> = None;
    for c in surface.chars() {
        if prev == Some(c) && is_vowel(c) {
            continue;
        }
        out.push(c);
        prev = Some(c);
    }
    out
}

/// `L_1`, `L_2`, `L_3` for short tokens, `L_4` for anything longer.
pub fn length_bucket(surface: &str) -> String {
    let len = surface.chars().count();
    format!("L_{}", len.min(4))
}

/// Prefixes `P1..P4` and suffixes `S1..S4` of a token.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Affixes {
    pub prefixes: [String; 4],
    pub suffixes: [String; 4],
}

/// `Pk` drops the last `k` characters and `Sk` keeps the last `k`, each only
/// when the word has more than `k` characters; otherwise both are the word.
pub fn affixes(surface: &str) -> Affixes {
    let chars: Vec<char> = surface.chars().collect();
    let n = chars.len();
    let prefix = |k: usize| -> String {
        if n > k {
            chars[..n - k].iter().collect()
        } else {
            surface.to_string()
        }
    };
    let suffix = |k: usize| -> String {
        if n > k {
            chars[n - k..].iter().collect()
        } else {
            surface.to_string()
        }
    };
    Affixes {
        prefixes: [prefix(1), prefix(2), prefix(3), prefix(4)],
        suffixes: [suffix(1), suffix(2), suffix(3), suffix(4)],
    }
}
