//! Symbolic dynamics of boundary words: the pair-insertion substitution, the
//! four-letter recoding that turns it into an ordinary substitution, and the
//! abelianization matrix with its exact spectral radius `2 + √3`.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::complex::Color;

#[derive(Debug, Error, PartialEq)]
pub enum DynError {
    #[error("word of length {0} is too short")]
    TooShort(usize),
    #[error("invalid letter {0:?}")]
    BadLetter(char),
    #[error("invalid recoded token {0:?}")]
    BadToken(String),
    #[error("recoded letters at {0} and {next} do not overlap", next = .0 + 1)]
    NotOverlapping(usize),
    #[error("word length {needed} exceeds the cap {cap}")]
    LengthCap { cap: usize, needed: usize },
}

pub type Result<T> = std::result::Result<T, DynError>;

/// Word over `{b, w}`. Cyclic words have a pair joining the last letter to
/// the first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Word {
    pub letters: Vec<Color>,
    pub cyclic: bool,
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.letters {
            write!(f, "{}", c.letter())?;
        }
        Ok(())
    }
}

impl Word {
    pub fn new(letters: Vec<Color>, cyclic: bool) -> Self {
        Self { letters, cyclic }
    }

    pub fn parse(s: &str, cyclic: bool) -> Result<Self> {
        let letters = s
            .chars()
            .map(|ch| match ch {
                'b' | 'B' => Ok(Color::Black),
                'w' | 'W' => Ok(Color::White),
                other => Err(DynError::BadLetter(other)),
            })
            .collect::<Result<Vec<_>>>()?;
        if letters.is_empty() {
            return Err(DynError::TooShort(0));
        }
        Ok(Self { letters, cyclic })
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn count(&self, c: Color) -> usize {
        self.letters.iter().filter(|&&x| x == c).count()
    }

    /// Adjacent pairs, including the wrap-around pair for cyclic words.
    pub fn pairs(&self) -> Vec<(Color, Color)> {
        let n = self.letters.len();
        let m = if self.cyclic { n } else { n.saturating_sub(1) };
        (0..m).map(|i| (self.letters[i], self.letters[(i + 1) % n])).collect()
    }

    /// `(alternating, repeated)` pair counts.
    pub fn pair_census(&self) -> (usize, usize) {
        let alt = self.pairs().iter().filter(|(a, b)| a != b).count();
        (alt, self.pairs().len() - alt)
    }

    pub fn swapped(&self) -> Self {
        Self { letters: self.letters.iter().map(|c| c.opposite()).collect(), cyclic: self.cyclic }
    }

    pub fn rotated(&self, k: usize) -> Self {
        let mut letters = self.letters.clone();
        if !letters.is_empty() {
            letters.rotate_left(k % self.letters.len());
        }
        Self { letters, cyclic: self.cyclic }
    }

    /// Offset `k` with `self.rotated(k) == other`, if any.
    pub fn rotation_to(&self, other: &Word) -> Option<usize> {
        if self.len() != other.len() {
            return None;
        }
        let n = self.len();
        (0..n).find(|&k| (0..n).all(|i| self.letters[(i + k) % n] == other.letters[i]))
    }

    /// Equality of cyclic words up to rotation; plain equality otherwise.
    pub fn equivalent(&self, other: &Word) -> bool {
        if self.cyclic && other.cyclic {
            self.rotation_to(other).is_some()
        } else {
            self == other
        }
    }
}

fn block(a: Color, b: Color) -> Vec<Color> {
    if a != b {
        vec![a, b, a, b]
    } else {
        vec![a, b.opposite(), a]
    }
}

/// Inserts a block between every pair of neighbouring letters and deletes
/// the old letters: `bw → bwbw`, `wb → wbwb`, `bb → bwb`, `ww → wbw`.
/// Linear words have no wrap-around pair.
pub fn substitute(word: &Word) -> Result<Word> {
    if word.len() < 2 {
        return Err(DynError::TooShort(word.len()));
    }
    let letters = word.pairs().into_iter().flat_map(|(a, b)| block(a, b)).collect();
    Ok(Word { letters, cyclic: word.cyclic })
}

/// Length of `substitute(word)` from the pair census alone.
pub fn substituted_length(word: &Word) -> usize {
    let (alt, rep) = word.pair_census();
    4 * alt + 3 * rep
}

/// Letters of the recoded alphabet; each names an adjacent pair of the
/// underlying word as `second_first`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Symbol {
    /// pair `bw`
    Wb,
    /// pair `wb`
    Bw,
    /// pair `ww`
    Ww,
    /// pair `bb`
    Bb,
}

impl Symbol {
    /// Alphabet order used by the matrix.
    pub const ALL: [Symbol; 4] = [Symbol::Wb, Symbol::Bw, Symbol::Ww, Symbol::Bb];

    pub fn from_pair(a: Color, b: Color) -> Self {
        match (a, b) {
            (Color::Black, Color::White) => Symbol::Wb,
            (Color::White, Color::Black) => Symbol::Bw,
            (Color::White, Color::White) => Symbol::Ww,
            (Color::Black, Color::Black) => Symbol::Bb,
        }
    }

    pub fn pair(self) -> (Color, Color) {
        match self {
            Symbol::Wb => (Color::Black, Color::White),
            Symbol::Bw => (Color::White, Color::Black),
            Symbol::Ww => (Color::White, Color::White),
            Symbol::Bb => (Color::Black, Color::Black),
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn token(self) -> &'static str {
        match self {
            Symbol::Wb => "w_b",
            Symbol::Bw => "b_w",
            Symbol::Ww => "w_w",
            Symbol::Bb => "b_b",
        }
    }

    pub fn from_token(s: &str) -> Result<Self> {
        Symbol::ALL.into_iter().find(|x| x.token() == s.trim()).ok_or_else(|| DynError::BadToken(s.to_string()))
    }

    /// Image under the recoded substitution.
    pub fn image(self) -> Vec<Symbol> {
        use Symbol::*;
        match self {
            Wb => vec![Wb, Bw, Wb, Ww],
            Ww => vec![Bw, Wb, Ww],
            Bw => vec![Bw, Wb, Bw, Bb],
            Bb => vec![Wb, Bw, Bb],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecodedWord {
    pub symbols: Vec<Symbol>,
    pub cyclic: bool,
}

impl fmt::Display for RecodedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tokens: Vec<&str> = self.symbols.iter().map(|s| s.token()).collect();
        write!(f, "{}", tokens.join(","))
    }
}

impl RecodedWord {
    pub fn parse(s: &str, cyclic: bool) -> Result<Self> {
        let symbols = s.split(',').map(Symbol::from_token).collect::<Result<Vec<_>>>()?;
        Ok(Self { symbols, cyclic })
    }

    /// Letter counts in alphabet order.
    pub fn counts(&self) -> [u64; 4] {
        let mut c = [0u64; 4];
        for s in &self.symbols {
            c[s.index()] += 1;
        }
        c
    }

    pub fn substitute(&self) -> Self {
        Self { symbols: self.symbols.iter().flat_map(|s| s.image()).collect(), cyclic: self.cyclic }
    }
}

pub fn recode(word: &Word) -> Result<RecodedWord> {
    if word.len() < 2 {
        return Err(DynError::TooShort(word.len()));
    }
    Ok(RecodedWord {
        symbols: word.pairs().into_iter().map(|(a, b)| Symbol::from_pair(a, b)).collect(),
        cyclic: word.cyclic,
    })
}

pub fn decode(rec: &RecodedWord) -> Result<Word> {
    let n = rec.symbols.len();
    if n == 0 {
        return Err(DynError::TooShort(0));
    }
    let m = if rec.cyclic { n } else { n - 1 };
    for i in 0..m {
        if rec.symbols[i].pair().1 != rec.symbols[(i + 1) % n].pair().0 {
            return Err(DynError::NotOverlapping(i));
        }
    }
    let mut letters: Vec<Color> = rec.symbols.iter().map(|s| s.pair().0).collect();
    if !rec.cyclic {
        letters.push(rec.symbols[n - 1].pair().1);
    }
    Ok(Word { letters, cyclic: rec.cyclic })
}

/// `A[i][j]` counts symbol `i` in the image of symbol `j`.
pub fn abelianization_matrix() -> [[i64; 4]; 4] {
    let mut a = [[0i64; 4]; 4];
    for s in Symbol::ALL {
        for t in s.image() {
            a[t.index()][s.index()] += 1;
        }
    }
    a
}

/// Characteristic polynomial `det(λI − A)` by Faddeev–LeVerrier, highest
/// degree first. Exact over the integers for integer matrices.
pub fn characteristic_polynomial(a: &[[i64; 4]; 4]) -> Vec<i64> {
    let n = 4;
    let mul = |x: &[[i64; 4]; 4], y: &[[i64; 4]; 4]| {
        let mut z = [[0i64; 4]; 4];
        for i in 0..n {
            for j in 0..n {
                z[i][j] = (0..n).map(|k| x[i][k] * y[k][j]).sum();
            }
        }
        z
    };
    let mut coeffs = vec![1i64];
    let mut m = [[0i64; 4]; 4];
    let mut c = 1i64;
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{k-1} I ; c_k = −tr(A M_k)/k
        let mut next = mul(a, &m);
        for (i, row) in next.iter_mut().enumerate() {
            row[i] += c;
        }
        m = next;
        let am = mul(a, &m);
        let tr: i64 = (0..n).map(|i| am[i][i]).sum();
        c = -tr / k as i64;
        coeffs.push(c);
    }
    coeffs
}

/// Long division of integer polynomials with monic divisor, highest degree
/// first. Returns `(quotient, remainder)`.
pub fn poly_divmod(num: &[i64], den: &[i64]) -> (Vec<i64>, Vec<i64>) {
    assert_eq!(den[0], 1, "divisor must be monic");
    let mut rem = num.to_vec();
    let qlen = num.len() + 1 - den.len();
    let mut quo = vec![0i64; qlen];
    for i in 0..qlen {
        let f = rem[i];
        quo[i] = f;
        for (j, d) in den.iter().enumerate() {
            rem[i + j] -= f * d;
        }
    }
    (quo, rem[qlen..].to_vec())
}

#[derive(Debug, Clone, Serialize)]
pub struct PerronCertificate {
    pub alphabet: Vec<&'static str>,
    pub matrix: [[i64; 4]; 4],
    pub column_sums: [i64; 4],
    pub characteristic_polynomial: Vec<i64>,
    pub quadratic_factor: Vec<i64>,
    pub cofactor: Vec<i64>,
    pub remainder_is_zero: bool,
    /// Matrix collapsed along the `b ↔ w` symmetry.
    pub quotient: [[i64; 2]; 2],
    pub quotient_trace: i64,
    pub quotient_determinant: i64,
    /// Smallest power of `A` with all entries positive.
    pub primitive_power: Option<usize>,
    pub eigenvalue: String,
    pub eigenvalue_f64: f64,
    pub pass: bool,
}

/// Exact certificate that the spectral radius is `2 + √3`: the
/// characteristic polynomial factors as `(λ² − 4λ + 1)·c(λ)` with every root
/// of `c` equal to 1, the quotient by the symmetry has the same quadratic
/// characteristic polynomial, and `A` is primitive.
pub fn perron_certificate() -> PerronCertificate {
    let a = abelianization_matrix();
    let column_sums = [0, 1, 2, 3].map(|j| (0..4).map(|i| a[i][j]).sum());
    let chi = characteristic_polynomial(&a);
    let factor = vec![1, -4, 1];
    let (cofactor, rem) = poly_divmod(&chi, &factor);
    let remainder_is_zero = rem.iter().all(|&r| r == 0);
    // representatives w_b and w_w; partners b_w and b_b
    let quotient = [[a[0][0] + a[1][0], a[0][2] + a[1][2]], [a[2][0] + a[3][0], a[2][2] + a[3][2]]];
    let quotient_trace = quotient[0][0] + quotient[1][1];
    let quotient_determinant = quotient[0][0] * quotient[1][1] - quotient[0][1] * quotient[1][0];
    let mut power = a;
    let mut primitive_power = None;
    for k in 1..=10 {
        if power.iter().all(|row| row.iter().all(|&x| x > 0)) {
            primitive_power = Some(k);
            break;
        }
        let mut next = [[0i64; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                next[i][j] = (0..4).map(|l| power[i][l] * a[l][j]).sum();
            }
        }
        power = next;
    }
    // the cofactor must be (λ − 1)², whose roots lie below 2 + √3
    let cofactor_ok = cofactor == vec![1, -2, 1];
    let pass = remainder_is_zero
        && cofactor_ok
        && quotient_trace == 4
        && quotient_determinant == 1
        && primitive_power.is_some();
    PerronCertificate {
        alphabet: Symbol::ALL.iter().map(|s| s.token()).collect(),
        matrix: a,
        column_sums,
        characteristic_polynomial: chi,
        quadratic_factor: factor,
        cofactor,
        remainder_is_zero,
        quotient,
        quotient_trace,
        quotient_determinant,
        primitive_power,
        eigenvalue: "2+sqrt(3)".to_string(),
        eigenvalue_f64: 2.0 + 3f64.sqrt(),
        pass,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GrowthSeries {
    pub lengths: Vec<usize>,
    pub ratios: Vec<f64>,
    /// `|ratio − (2 + √3)|` for each step.
    pub deviations: Vec<f64>,
    #[serde(skip)]
    pub words: Vec<Word>,
}

/// Iterates the substitution `steps` times, refusing to build a word longer
/// than `cap`.
pub fn growth_series(word: &Word, steps: usize, cap: usize) -> Result<GrowthSeries> {
    let lambda = 2.0 + 3f64.sqrt();
    let mut words = vec![word.clone()];
    for _ in 0..steps {
        let last = words.last().unwrap();
        let needed = substituted_length(last);
        if needed > cap {
            return Err(DynError::LengthCap { cap, needed });
        }
        words.push(substitute(last)?);
    }
    let lengths: Vec<usize> = words.iter().map(Word::len).collect();
    let ratios: Vec<f64> = lengths.windows(2).map(|w| w[1] as f64 / w[0] as f64).collect();
    let deviations = ratios.iter().map(|r| (r - lambda).abs()).collect();
    Ok(GrowthSeries { lengths, ratios, deviations, words })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        Word::parse(s, true).unwrap()
    }

    #[test]
    fn first_substitution_of_alternating_word() {
        let t = substitute(&w("bwbwbwbw")).unwrap();
        assert_eq!(t.len(), 32);
        assert!(t.equivalent(&w(&"bwbwwbwb".repeat(4))));
        assert_eq!(substitute(&t).unwrap().len(), 120);
    }

    #[test]
    fn short_words() {
        assert_eq!(substitute(&w("bb")).unwrap().to_string(), "bwbbwb");
        assert_eq!(substitute(&w("b")), Err(DynError::TooShort(1)));
        assert_eq!(substitute(&Word::parse("bw", false).unwrap()).unwrap().to_string(), "bwbw");
    }

    #[test]
    fn recoding_round_trip_and_commutation() {
        let u = w("bwbwbwbw");
        let r = recode(&u).unwrap();
        assert_eq!(r.to_string(), "w_b,b_w,w_b,b_w,w_b,b_w,w_b,b_w");
        assert_eq!(decode(&r).unwrap(), u);
        let t = substitute(&u).unwrap();
        assert_eq!(decode(&r.substitute()).unwrap(), t);
        let lin = Word::parse("bbwwb", false).unwrap();
        assert_eq!(decode(&recode(&lin).unwrap()).unwrap(), lin);
    }

    #[test]
    fn matrix_and_certificate() {
        let c = perron_certificate();
        assert_eq!(c.matrix, [[2, 1, 1, 1], [1, 2, 1, 1], [1, 0, 1, 0], [0, 1, 0, 1]]);
        assert_eq!(c.column_sums, [4, 4, 3, 3]);
        assert_eq!(c.characteristic_polynomial, vec![1, -6, 10, -6, 1]);
        assert_eq!(c.quotient, [[3, 2], [1, 1]]);
        assert!(c.pass);
    }

    #[test]
    fn growth_from_alternating_and_cap() {
        let g = growth_series(&w("bwbwbwbw"), 4, 10_000).unwrap();
        assert_eq!(g.lengths, vec![8, 32, 120, 448, 1672]);
        assert!(g.deviations[3] < 2e-4);
        assert!(matches!(growth_series(&w("bwbwbwbw"), 4, 500), Err(DynError::LengthCap { needed: 1672, .. })));
        assert_eq!(growth_series(&w("ww"), 2, 100).unwrap().lengths, vec![2, 6, 22]);
    }
}
