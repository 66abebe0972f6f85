//! Two-token fixed-point codec for four-decimal scalars.
//!
//! A value `v` with `|round4(v)| ≤ 99.9999` is written as an integer-prefix
//! token carrying the sign, the two integer digits and the first decimal
//! digit, followed by a fractional-suffix token carrying decimals two to four:
//!
//! ```text
//! -1.2345  ->  <s1i012><d345>
//! ```
//!
//! Zero is always written with sign `0`; `<s1i000><d000>` is rejected.
//! Rounding is half away from zero on the shortest decimal representation of
//! the `f64`, so `1.23455` rounds to `1.2346` even though its binary value is
//! slightly below the midpoint.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Largest representable magnitude.
pub const MAX_ABS: f64 = 99.9999;
/// Largest magnitude in units of `1e-4`.
pub const MAX_TICKS: i64 = 999_999;
/// Grid spacing.
pub const DELTA: f64 = 1e-4;

/// Rounds to `decimals` places, half away from zero, returning the signed
/// integer count of `10^-decimals` units. Works on the shortest round-trip
/// decimal form so that decimal midpoints round the way they read.
pub fn round_to_units(v: f64, decimals: u32) -> Option<i128> {
    if !v.is_finite() || decimals > 12 {
        return None;
    }
    let text = format!("{}", v.abs());
    let (int_digits, frac_digits) = match text.split_once('.') {
        Some((i, f)) => (i, f),
        None => (text.as_str(), ""),
    };
    if int_digits.len() > 24 {
        return None;
    }
    let mut units: i128 = 0;
    for b in int_digits.bytes() {
        units = units * 10 + (b - b'0') as i128;
    }
    let frac = frac_digits.as_bytes();
    for k in 0..decimals as usize {
        let d = frac.get(k).map_or(0, |b| (b - b'0') as i128);
        units = units * 10 + d;
    }
    if frac.get(decimals as usize).is_some_and(|b| *b >= b'5') {
        units += 1;
    }
    Some(if v.is_sign_negative() { -units } else { units })
}

/// Rounds to `decimals` places, half away from zero. Negative zero is
/// normalized to `0.0`.
pub fn round_decimals(v: f64, decimals: u32) -> f64 {
    match round_to_units(v, decimals) {
        Some(0) => 0.0,
        Some(u) => u as f64 / 10f64.powi(decimals as i32),
        None => v,
    }
}

/// Four-decimal rounding used everywhere a value is committed to the grid.
pub fn round4(v: f64) -> f64 {
    round_decimals(v, 4)
}

pub fn round4_vec(v: &[f64]) -> Vec<f64> {
    v.iter().map(|x| round4(*x)).collect()
}

/// One scalar in two-token form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TokenizedScalar {
    pub negative: bool,
    /// Integer part, `0..=99`.
    pub int_part: u8,
    /// First decimal digit, `0..=9`.
    pub first_dec: u8,
    /// Decimals two to four, `0..=999`.
    pub tail_dec: u16,
}

impl TokenizedScalar {
    /// Builds from a signed count of `1e-4` units.
    pub fn from_ticks(ticks: i64) -> Result<Self> {
        let mag = ticks.unsigned_abs();
        if mag > MAX_TICKS as u64 {
            return Err(Error::Range { value: ticks as f64 * DELTA, path: String::new() });
        }
        Ok(TokenizedScalar {
            negative: ticks < 0,
            int_part: (mag / 10_000) as u8,
            first_dec: ((mag / 1000) % 10) as u8,
            tail_dec: (mag % 1000) as u16,
        })
    }

    pub fn ticks(&self) -> i64 {
        let mag = self.int_part as i64 * 10_000 + self.first_dec as i64 * 1000 + self.tail_dec as i64;
        if self.negative {
            -mag
        } else {
            mag
        }
    }

    pub fn value(&self) -> f64 {
        self.ticks() as f64 / 10_000.0
    }

    /// The three digits after `i` in the integer-prefix token.
    pub fn prefix_digits(&self) -> u16 {
        self.int_part as u16 * 10 + self.first_dec as u16
    }

    pub fn int_token(&self) -> String {
        format!("<s{}i{:02}{}>", self.negative as u8, self.int_part, self.first_dec)
    }

    pub fn frac_token(&self) -> String {
        format!("<d{:03}>", self.tail_dec)
    }

    fn check_canonical(&self) -> Result<()> {
        if self.negative && self.ticks() == 0 {
            return Err(Error::Parse { pos: 0, msg: "negative zero is not canonical".into() });
        }
        Ok(())
    }
}

impl fmt::Display for TokenizedScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "<s{}i{:02}{}><d{:03}>",
            self.negative as u8, self.int_part, self.first_dec, self.tail_dec
        )
    }
}

impl FromStr for TokenizedScalar {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let tokens = scan_tokens(s)?;
        let mut pairs = pair_tokens(&tokens)?;
        if pairs.len() != 1 {
            return Err(Error::TokenCount { expected: 2, found: tokens.len() });
        }
        Ok(pairs.remove(0))
    }
}

/// Encodes a scalar at four-decimal precision.
pub fn encode(value: f64) -> Result<TokenizedScalar> {
    if !value.is_finite() {
        return Err(Error::NonFinite("codec input".into()));
    }
    let ticks = round_to_units(value, 4).ok_or_else(|| Error::NonFinite("codec input".into()))?;
    if ticks.unsigned_abs() > MAX_TICKS as u128 {
        return Err(Error::Range { value, path: String::new() });
    }
    TokenizedScalar::from_ticks(ticks as i64)
}

/// Decodes one rendered token pair.
pub fn decode(text: &str) -> Result<f64> {
    Ok(text.parse::<TokenizedScalar>()?.value())
}

/// Renders a vector as concatenated token pairs.
pub fn encode_sequence(values: &[f64]) -> Result<String> {
    let mut out = String::with_capacity(values.len() * 14);
    for (i, v) in values.iter().enumerate() {
        let t = encode(*v).map_err(|e| with_path(e, &format!("[{i}]")))?;
        out.push_str(&t.to_string());
    }
    Ok(out)
}

/// Decodes exactly `expected_len` scalars; whitespace between tokens is allowed.
pub fn decode_sequence(text: &str, expected_len: usize) -> Result<Vec<f64>> {
    let tokens = scan_tokens(text)?;
    if tokens.len() != 2 * expected_len {
        return Err(Error::TokenCount { expected: 2 * expected_len, found: tokens.len() });
    }
    Ok(pair_tokens(&tokens)?.iter().map(|t| t.value()).collect())
}

pub(crate) fn with_path(e: Error, path: &str) -> Error {
    match e {
        Error::Range { value, path: p } => Error::Range { value, path: format!("{path}{p}") },
        other => other,
    }
}

/// A single lexed token.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum RawToken {
    Prefix { negative: bool, digits: u16, pos: usize },
    Suffix { digits: u16, pos: usize },
}

/// Lexes `<sXiXXX>` and `<dXXX>` tokens separated by optional whitespace.
pub(crate) fn scan_tokens(text: &str) -> Result<Vec<RawToken>> {
    let b = text.as_bytes();
    let mut i = 0;
    let mut out = Vec::new();
    let digits = |at: usize, count: usize| -> Option<u16> {
        let s = b.get(at..at + count)?;
        s.iter().try_fold(0u16, |acc, c| c.is_ascii_digit().then(|| acc * 10 + (c - b'0') as u16))
    };
    while i < b.len() {
        if b[i].is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let err = |msg: &str| Error::Parse { pos: i, msg: msg.into() };
        if b[i] != b'<' {
            return Err(err("expected '<'"));
        }
        match b.get(i + 1) {
            Some(b's') => {
                let sign = match b.get(i + 2) {
                    Some(b'0') => false,
                    Some(b'1') => true,
                    _ => return Err(err("sign must be 0 or 1")),
                };
                if b.get(i + 3) != Some(&b'i') {
                    return Err(err("expected 'i' after sign"));
                }
                let d = digits(i + 4, 3).ok_or_else(|| err("expected three digits in integer-prefix token"))?;
                if b.get(i + 7) != Some(&b'>') {
                    return Err(err("unterminated integer-prefix token"));
                }
                out.push(RawToken::Prefix { negative: sign, digits: d, pos: i });
                i += 8;
            }
            Some(b'd') => {
                let d = digits(i + 2, 3).ok_or_else(|| err("expected three digits in fractional-suffix token"))?;
                if b.get(i + 5) != Some(&b'>') {
                    return Err(err("unterminated fractional-suffix token"));
                }
                out.push(RawToken::Suffix { digits: d, pos: i });
                i += 6;
            }
            _ => return Err(err("unknown token kind")),
        }
    }
    Ok(out)
}

pub(crate) fn pair_tokens(tokens: &[RawToken]) -> Result<Vec<TokenizedScalar>> {
    let mut out = Vec::with_capacity(tokens.len() / 2);
    for pair in tokens.chunks(2) {
        match *pair {
            [RawToken::Prefix { negative, digits, pos }, RawToken::Suffix { digits: tail, .. }] => {
                let t = TokenizedScalar {
                    negative,
                    int_part: (digits / 10) as u8,
                    first_dec: (digits % 10) as u8,
                    tail_dec: tail,
                };
                t.check_canonical().map_err(|_| Error::Parse {
                    pos,
                    msg: "negative zero is not canonical".into(),
                })?;
                out.push(t);
            }
            [RawToken::Suffix { pos, .. }, ..] => {
                return Err(Error::Parse { pos, msg: "fractional-suffix token without prefix".into() })
            }
            [RawToken::Prefix { pos, .. }, RawToken::Prefix { .. }] | [RawToken::Prefix { pos, .. }] => {
                return Err(Error::Parse { pos, msg: "integer-prefix token without suffix".into() })
            }
            _ => unreachable!(),
        }
    }
    Ok(out)
}

/// The numerical token vocabularies and their coarse and fine values.
///
/// The standard vocabulary has 2000 integer-prefix tokens (sign × 000..999)
/// and 1000 fractional-suffix tokens. The coarse value of a prefix token is
/// the signed centre of the interval it covers, `±(iii/10 + 0.05)`, which
/// keeps `<s0i000>` and `<s1i000>` apart. The fine value of `<dXXX>` is its
/// contribution `XXX · 1e-4`.
#[derive(Clone, Debug, PartialEq)]
pub struct Vocabulary {
    pub int_tokens: Vec<String>,
    pub frac_tokens: Vec<String>,
    pub coarse: Vec<f64>,
    pub fine: Vec<f64>,
}

impl Vocabulary {
    pub fn standard() -> Self {
        let mut int_tokens = Vec::with_capacity(2000);
        let mut coarse = Vec::with_capacity(2000);
        for neg in [false, true] {
            for d in 0..1000u16 {
                int_tokens.push(format!("<s{}i{:03}>", neg as u8, d));
                let c = d as f64 / 10.0 + 0.05;
                coarse.push(if neg { -c } else { c });
            }
        }
        let frac_tokens = (0..1000u16).map(|d| format!("<d{d:03}>")).collect();
        let fine = (0..1000u16).map(|d| d as f64 * DELTA).collect();
        Vocabulary { int_tokens, frac_tokens, coarse, fine }
    }

    /// A vocabulary defined only by its value maps; token names are synthetic.
    pub fn from_values(coarse: Vec<f64>, fine: Vec<f64>) -> Self {
        Vocabulary {
            int_tokens: (0..coarse.len()).map(|i| format!("<int{i}>")).collect(),
            frac_tokens: (0..fine.len()).map(|i| format!("<frac{i}>")).collect(),
            coarse,
            fine,
        }
    }

    /// Index of a scalar's prefix token in the standard vocabulary.
    pub fn int_index(t: &TokenizedScalar) -> usize {
        t.negative as usize * 1000 + t.prefix_digits() as usize
    }

    /// Index of a scalar's suffix token in the standard vocabulary.
    pub fn frac_index(t: &TokenizedScalar) -> usize {
        t.tail_dec as usize
    }
}

/// Ratio of codec tokens to a one-token-per-character rendering of the same
/// values as space-separated four-decimal strings.
pub fn compression_ratio(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::InvalidArgument("no values".into()));
    }
    let mut chars = values.len() - 1;
    for v in values {
        encode(*v)?;
        chars += format!("{:.4}", round4(*v)).len();
    }
    Ok((2 * values.len()) as f64 / chars as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn worked_examples() {
        assert_eq!(encode(99.9999).unwrap().to_string(), "<s0i999><d999>");
        assert_eq!(encode(-1.2345).unwrap().to_string(), "<s1i012><d345>");
        assert_eq!(encode(0.0).unwrap().to_string(), "<s0i000><d000>");
        assert_eq!(decode("<s1i005><d678>").unwrap(), -0.5678);
        assert_eq!(decode("<s0i012><d345>").unwrap(), 1.2345);
    }

    #[test]
    fn negative_zero_is_canonicalized() {
        assert_eq!(encode(-0.0).unwrap().to_string(), "<s0i000><d000>");
        assert_eq!(encode(-0.00004).unwrap().to_string(), "<s0i000><d000>");
        assert!(decode("<s1i000><d000>").is_err());
        assert_eq!(decode("<s1i000><d001>").unwrap(), -0.0001);
    }

    #[test]
    fn half_away_from_zero() {
        assert_eq!(round4(1.23455), 1.2346);
        assert_eq!(round4(-1.23455), -1.2346);
        assert_eq!(round4(0.00005), 0.0001);
        assert_eq!(round4(0.000049999), 0.0);
        assert_eq!(round4(2.5e-5), 0.0);
        assert_eq!(round_decimals(12.5, 0), 13.0);
    }

    #[test]
    fn range_errors() {
        assert!(matches!(encode(100.0), Err(Error::Range { .. })));
        assert!(matches!(encode(99.99995), Err(Error::Range { .. })));
        assert_eq!(encode(99.99994).unwrap().to_string(), "<s0i999><d999>");
        assert_eq!(encode(-99.9999).unwrap().to_string(), "<s1i999><d999>");
        assert!(matches!(encode(f64::NAN), Err(Error::NonFinite(_))));
        assert!(matches!(encode(f64::INFINITY), Err(Error::NonFinite(_))));
    }

    #[test]
    fn sequences() {
        assert_eq!(encode_sequence(&[0.0, -1.2345]).unwrap(), "<s0i000><d000><s1i012><d345>");
        assert_eq!(encode_sequence(&[]).unwrap(), "");
        assert_eq!(decode_sequence("", 0).unwrap(), Vec::<f64>::new());
        assert_eq!(
            decode_sequence("<s0i000><d000> <s1i012>\n<d345>", 2).unwrap(),
            vec![0.0, -1.2345]
        );
        assert_eq!(
            decode_sequence("<s0i000><d000><s1i012>", 2),
            Err(Error::TokenCount { expected: 4, found: 3 })
        );
    }

    #[test]
    fn range_error_names_position() {
        match encode_sequence(&[1.0, 250.0]) {
            Err(Error::Range { path, .. }) => assert_eq!(path, "[1]"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn parse_errors_carry_position() {
        match decode("<s0i012><dx45>") {
            Err(Error::Parse { pos, .. }) => assert_eq!(pos, 8),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(decode("<s2i012><d345>"), Err(Error::Parse { pos: 0, .. })));
        assert!(matches!(decode("<d345><s0i012>"), Err(Error::Parse { .. })));
        assert!(matches!(decode_sequence("<s0i012><s0i012>", 1), Err(Error::Parse { pos: 0, .. })));
        assert!(decode("garbage").is_err());
    }

    #[test]
    fn vocabulary_shape() {
        let v = Vocabulary::standard();
        assert_eq!(v.int_tokens.len(), 2000);
        assert_eq!(v.frac_tokens.len(), 1000);
        let t = encode(-1.2345).unwrap();
        assert_eq!(v.int_tokens[Vocabulary::int_index(&t)], t.int_token());
        assert_eq!(v.frac_tokens[Vocabulary::frac_index(&t)], t.frac_token());
        let mut c = v.coarse.clone();
        c.sort_by(f64::total_cmp);
        assert!(c.windows(2).all(|w| w[0] < w[1]), "coarse values must be injective");
        assert!(v.fine.windows(2).all(|w| w[0] < w[1]));
    }

    proptest! {
        #[test]
        fn grid_round_trip(ticks in -MAX_TICKS..=MAX_TICKS) {
            let v = ticks as f64 / 1e4;
            let t = encode(v).unwrap();
            prop_assert_eq!(t.ticks(), ticks);
            prop_assert_eq!(decode(&t.to_string()).unwrap(), v);
        }

        #[test]
        fn rounding_projection_bound(v in -99.9999f64..99.9999) {
            prop_assert!((round4(v) - v).abs() <= 5e-5 * (1.0 + 1e-9));
            prop_assert_eq!(decode(&encode(v).unwrap().to_string()).unwrap(), round4(v));
        }
    }
}
