//! Embedding initialization for the numerical tokens, composed from the
//! embeddings of the digit, sign and point symbols.

use std::collections::HashMap;
use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::codec::Vocabulary;
use crate::error::{Error, Result};

pub const SYMBOLS: [char; 13] = ['0', '1', '2', '3', '4', '5', '6', '7', '8', '9', '+', '-', '.'];

#[derive(Clone, Debug, PartialEq)]
pub struct BaseSymbolTable {
    embedding: HashMap<char, Vec<f64>>,
    dim: usize,
    sigma: f64,
}

impl BaseSymbolTable {
    pub fn new(embedding: HashMap<char, Vec<f64>>, sigma: f64) -> Result<Self> {
        let missing: Vec<char> = SYMBOLS.iter().copied().filter(|c| !embedding.contains_key(c)).collect();
        if !missing.is_empty() {
            return Err(Error::InvalidArgument(format!("missing base symbols {missing:?}")));
        }
        let dim = embedding[&'0'].len();
        if dim == 0 || embedding.values().any(|v| v.len() != dim || v.iter().any(|x| !x.is_finite())) {
            return Err(Error::InvalidArgument("base embeddings must share one positive length and be finite".into()));
        }
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidArgument(format!("sigma must be positive, got {sigma}")));
        }
        Ok(BaseSymbolTable { embedding, dim, sigma })
    }

    /// Symbol `i` of [`SYMBOLS`] maps to the `i`-th unit vector.
    pub fn one_hot(sigma: f64) -> Self {
        let embedding = SYMBOLS
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let mut v = vec![0.0; SYMBOLS.len()];
                v[i] = 1.0;
                (*c, v)
            })
            .collect();
        BaseSymbolTable::new(embedding, sigma).expect("complete table")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    fn mean_norm(&self) -> f64 {
        SYMBOLS.iter().map(|c| norm(&self.embedding[c])).sum::<f64>() / SYMBOLS.len() as f64
    }
}

/// Position weights: `int` for (sign, tens, ones, point, first decimal),
/// `frac` for (point, second, third, fourth decimal).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeightScheme {
    pub int: [f64; 5],
    pub frac: [f64; 4],
}

impl Default for WeightScheme {
    fn default() -> Self {
        WeightScheme { int: [0.15, 0.30, 0.25, 0.05, 0.25], frac: [0.10, 0.40, 0.30, 0.20] }
    }
}

impl WeightScheme {
    pub fn uniform() -> Self {
        WeightScheme { int: [0.2; 5], frac: [0.25; 4] }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InitOptions {
    pub weights: WeightScheme,
    pub eps: f64,
    /// Rescale each composed vector to the mean norm of the base symbols.
    pub normalize: bool,
}

impl Default for InitOptions {
    fn default() -> Self {
        InitOptions { weights: WeightScheme::default(), eps: 0.02, normalize: true }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NumericEmbeddingTable {
    pub dim: usize,
    pub seed: u64,
    pub tokens: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Symbols making up a token plus a key identifying its value: `<sXiDDD>`
/// gives sign, two integer digits, point, first decimal; `<dDDD>` gives
/// point and three decimals.
fn token_symbols(token: &str) -> Option<(Vec<char>, u64)> {
    let b = token.as_bytes();
    let digits = |s: &[u8]| s.iter().all(u8::is_ascii_digit).then(|| s.iter().map(|c| *c as char).collect::<Vec<_>>());
    let number = |d: &[char]| d.iter().fold(0u64, |acc, c| acc * 10 + c.to_digit(10).unwrap_or(0) as u64);
    match b {
        [b'<', b's', sign @ (b'0' | b'1'), b'i', rest @ .., b'>'] if rest.len() == 3 => {
            let d = digits(rest)?;
            let negative = *sign == b'1';
            let key = (negative as u64) * 1000 + number(&d);
            Some((vec![if negative { '-' } else { '+' }, d[0], d[1], '.', d[2]], key))
        }
        [b'<', b'd', rest @ .., b'>'] if rest.len() == 3 => {
            let d = digits(rest)?;
            Some((vec!['.', d[0], d[1], d[2]], (1 << 32) | number(&d)))
        }
        _ => None,
    }
}

/// Unit direction drawn from the stream `key` of the seeded generator.
fn perturbation(seed: u64, key: u64, dim: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(key);
    loop {
        let v: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect();
        let n = norm(&v);
        if n > 1e-12 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

/// Prefix tokens come first, then suffix tokens.
pub fn init_embeddings(base: &BaseSymbolTable, vocab: &Vocabulary, seed: u64, options: &InitOptions) -> Result<NumericEmbeddingTable> {
    if !(options.eps >= 0.0 && options.eps.is_finite()) {
        return Err(Error::InvalidArgument(format!("eps must be non-negative, got {}", options.eps)));
    }
    let target_norm = base.mean_norm();
    let mut tokens = Vec::with_capacity(vocab.int_tokens.len() + vocab.frac_tokens.len());
    let mut rows = Vec::with_capacity(tokens.capacity());
    let lists = [(&vocab.int_tokens, &options.weights.int[..]), (&vocab.frac_tokens, &options.weights.frac[..])];
    for (list, weights) in lists {
        for tok in list {
            let (symbols, key) = token_symbols(tok).ok_or_else(|| Error::InvalidArgument(format!("cannot decompose token {tok}")))?;
            let mut v = vec![0.0; base.dim];
            for (s, w) in symbols.iter().zip(weights) {
                for (a, e) in v.iter_mut().zip(&base.embedding[s]) {
                    *a += w * e;
                }
            }
            let n = norm(&v);
            if options.normalize && n > 0.0 {
                v.iter_mut().for_each(|a| *a *= target_norm / n);
            }
            let g = perturbation(seed, key, base.dim);
            for (a, gi) in v.iter_mut().zip(&g) {
                *a += options.eps * base.sigma * gi;
            }
            tokens.push(tok.clone());
            rows.push(v);
        }
    }
    Ok(NumericEmbeddingTable { dim: base.dim, seed, tokens, rows })
}

impl NumericEmbeddingTable {
    /// Rows for an untied output head, initialized like the input embeddings.
    pub fn output_head(&self) -> Vec<Vec<f64>> {
        self.rows.clone()
    }

    pub fn row(&self, token: &str) -> Option<&[f64]> {
        self.tokens.iter().position(|t| t == token).map(|i| self.rows[i].as_slice())
    }

    /// Header line `dim count seed`, then one `token v1 … vd` line per row.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {} {}\n", self.dim, self.rows.len(), self.seed);
        for (t, r) in self.tokens.iter().zip(&self.rows) {
            out.push_str(t);
            for v in r {
                let _ = write!(out, " {v:e}");
            }
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let bad = |line: usize, msg: &str| Error::Parse { pos: line, msg: msg.into() };
        let mut lines = text.lines();
        let header: Vec<&str> = lines.next().ok_or_else(|| bad(0, "empty table"))?.split_whitespace().collect();
        let [dim, count, seed] = header[..] else {
            return Err(bad(0, "header must be `dim count seed`"));
        };
        let dim: usize = dim.parse().map_err(|_| bad(0, "bad dim"))?;
        let count: usize = count.parse().map_err(|_| bad(0, "bad count"))?;
        let seed: u64 = seed.parse().map_err(|_| bad(0, "bad seed"))?;
        let mut tokens = Vec::with_capacity(count);
        let mut rows = Vec::with_capacity(count);
        for (i, line) in lines.enumerate() {
            let mut parts = line.split_whitespace();
            let Some(tok) = parts.next() else { continue };
            let row: Vec<f64> = parts.map(str::parse).collect::<std::result::Result<_, _>>().map_err(|_| bad(i + 1, "bad number"))?;
            if row.len() != dim {
                return Err(bad(i + 1, "row length differs from dim"));
            }
            tokens.push(tok.to_string());
            rows.push(row);
        }
        if rows.len() != count {
            return Err(bad(0, "row count differs from header"));
        }
        Ok(NumericEmbeddingTable { dim, seed, tokens, rows })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zero_base() -> BaseSymbolTable {
        BaseSymbolTable::new(SYMBOLS.iter().map(|c| (*c, vec![0.0; 8])).collect(), 0.7).unwrap()
    }

    #[test]
    fn zero_base_gives_pure_perturbation() {
        let t = init_embeddings(&zero_base(), &Vocabulary::standard(), 3, &InitOptions::default()).unwrap();
        assert_eq!(t.rows.len(), 3000);
        for r in &t.rows {
            assert!(norm(r) <= 0.02 * 0.7 * (1.0 + 1e-9));
        }
    }

    #[test]
    fn one_hot_support() {
        let base = BaseSymbolTable::one_hot(1.0);
        let opts = InitOptions { weights: WeightScheme::uniform(), eps: 0.0, normalize: true };
        let t = init_embeddings(&base, &Vocabulary::standard(), 0, &opts).unwrap();
        let row = t.row("<s0i012>").unwrap();
        let support: Vec<char> = SYMBOLS.iter().zip(row).filter(|(_, v)| **v != 0.0).map(|(c, _)| *c).collect();
        let mut want = vec!['0', '1', '2', '+', '.'];
        want.sort();
        let mut got = support.clone();
        got.sort();
        assert_eq!(got, want);
    }

    #[test]
    fn deterministic_and_text_round_trip() {
        let base = BaseSymbolTable::one_hot(0.5);
        let v = Vocabulary::standard();
        let a = init_embeddings(&base, &v, 11, &InitOptions::default()).unwrap();
        assert_eq!(a, init_embeddings(&base, &v, 11, &InitOptions::default()).unwrap());
        assert_ne!(a, init_embeddings(&base, &v, 12, &InitOptions::default()).unwrap());
        assert_eq!(NumericEmbeddingTable::from_text(&a.to_text()).unwrap(), a);
        assert_eq!(a.output_head(), a.rows);
    }

    #[test]
    fn missing_symbol() {
        let mut m: HashMap<char, Vec<f64>> = SYMBOLS.iter().map(|c| (*c, vec![1.0])).collect();
        m.remove(&'.');
        assert!(BaseSymbolTable::new(m, 1.0).is_err());
        let custom = Vocabulary::from_values(vec![0.0], vec![0.0]);
        assert!(init_embeddings(&BaseSymbolTable::one_hot(1.0), &custom, 0, &InitOptions::default()).is_err());
    }
}
