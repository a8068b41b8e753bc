//! Bi-infinite binary words: mechanical, periodic, skew and block words,
//! heights, windowed balance checks, Christoffel words and Markoff classes.

use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qfield::QuadReal;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mode {
    Lower,
    Upper,
}

/// Which Markoff skew form: `∞(0c1)0c0(1c0)∞` or `∞(1c0)1c1(0c1)∞`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SkewVariant {
    A,
    B,
}

/// A finite word over {0,1}; `marks` lists dotted positions.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FiniteWord {
    pub letters: Vec<u8>,
    pub marks: Vec<usize>,
}

impl FiniteWord {
    pub fn new(letters: Vec<u8>) -> Self {
        FiniteWord { letters, marks: Vec::new() }
    }

    pub fn parse(s: &str) -> Result<Self> {
        let mut letters = Vec::new();
        let mut marks = Vec::new();
        for (pos, ch) in s.chars().enumerate() {
            match ch {
                '0' => letters.push(0),
                '1' => letters.push(1),
                '\u{307}' if !letters.is_empty() => marks.push(letters.len() - 1),
                _ => return Err(Error::Parse { pos, msg: format!("unexpected '{ch}'") }),
            }
        }
        Ok(FiniteWord { letters, marks })
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// `|w|₁`.
    pub fn height(&self) -> usize {
        self.letters.iter().filter(|&&x| x == 1).count()
    }

    pub fn count(&self, letter: u8) -> usize {
        self.letters.iter().filter(|&&x| x == letter).count()
    }

    /// Mirror image `w̃`.
    pub fn mirror(&self) -> Self {
        let n = self.letters.len();
        let mut letters = self.letters.clone();
        letters.reverse();
        let mut marks: Vec<usize> = self.marks.iter().map(|&m| n - 1 - m).collect();
        marks.sort_unstable();
        FiniteWord { letters, marks }
    }

    pub fn is_palindrome(&self) -> bool {
        let m = self.mirror();
        m.letters == self.letters
    }

    pub fn concat(&self, other: &FiniteWord) -> FiniteWord {
        let n = self.letters.len();
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        let mut marks = self.marks.clone();
        marks.extend(other.marks.iter().map(|m| m + n));
        FiniteWord { letters, marks }
    }

    pub fn is_marked(&self, i: usize) -> bool {
        self.marks.contains(&i)
    }
}

impl fmt::Display for FiniteWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.letters.iter().enumerate() {
            write!(f, "{l}")?;
            if self.is_marked(i) {
                write!(f, "\u{307}")?;
            }
        }
        Ok(())
    }
}

fn word_of(s: &str) -> Vec<u8> {
    s.bytes().map(|b| b - b'0').collect()
}

/// Finite description of a bi-infinite word.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Rule {
    /// `⌊(n+1)α+ρ⌋ − ⌊nα+ρ⌋` (lower) or the ceiling version (upper).
    Mechanical { alpha: QuadReal, rho: QuadReal, mode: Mode },
    /// `w_n = u[(n + phase) mod |u|]`.
    Periodic { u: Vec<u8>, phase: i64 },
    /// `∞(left) mid (right)∞` with `mid` starting at index `origin`.
    Skew { left: Vec<u8>, mid: Vec<u8>, right: Vec<u8>, origin: i64 },
    /// `⋯ c w₋₁ c w₀ c w₁ c ⋯` with `w₀ = f₋₁f₀`; `choices[s mod len]` picks `01` (true) or `10`.
    Blocks { c: Vec<u8>, choices: Vec<bool> },
    /// Blocks whose choice is `below` for `s < threshold` and `above` for `s ≥ threshold`.
    BlockStep { c: Vec<u8>, threshold: i64, below: bool, above: bool },
    /// Letters known on `[start, start + len)` only.
    Explicit { start: i64, letters: Vec<u8> },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BiWord {
    pub rule: Rule,
}

/// `⌊nα + ρ⌋` or `⌈nα + ρ⌉`.
fn mech_round(alpha: &QuadReal, rho: &QuadReal, n: i64, mode: Mode) -> i64 {
    let x = &(alpha * &QuadReal::int(n)) + rho;
    match mode {
        Mode::Lower => x.floor_i64(),
        Mode::Upper => x.ceil_i64(),
    }
}

impl BiWord {
    pub fn zeros() -> Self {
        BiWord { rule: Rule::Periodic { u: vec![0], phase: 0 } }
    }

    pub fn ones() -> Self {
        BiWord { rule: Rule::Periodic { u: vec![1], phase: 0 } }
    }

    pub fn periodic(u: &[u8], phase: i64) -> Self {
        assert!(!u.is_empty(), "periodic word needs a nonempty block");
        BiWord { rule: Rule::Periodic { u: u.to_vec(), phase } }
    }

    pub fn periodic_str(u: &str) -> Self {
        Self::periodic(&word_of(u), 0)
    }

    /// Markoff-type skew word for central word `c`; `mid` (0c0 or 1c1) starts at `origin`.
    pub fn skew(c: &FiniteWord, variant: SkewVariant, origin: i64) -> Self {
        let cc = &c.letters;
        let wrap = |a: u8, b: u8| {
            let mut v = vec![a];
            v.extend_from_slice(cc);
            v.push(b);
            v
        };
        let (left, mid, right) = match variant {
            SkewVariant::A => (wrap(0, 1), wrap(0, 0), wrap(1, 0)),
            SkewVariant::B => (wrap(1, 0), wrap(1, 1), wrap(0, 1)),
        };
        BiWord { rule: Rule::Skew { left, mid, right, origin } }
    }

    /// `∞0 1 0∞` (slope 0) or `∞1 0 1∞` (slope 1) with the odd letter at `origin`.
    pub fn skew_extreme(odd: u8, origin: i64) -> Self {
        let bg = 1 - odd;
        BiWord { rule: Rule::Skew { left: vec![bg], mid: vec![odd], right: vec![bg], origin } }
    }

    pub fn blocks(c: &FiniteWord, choices: &[bool]) -> Self {
        assert!(!choices.is_empty());
        BiWord { rule: Rule::Blocks { c: c.letters.clone(), choices: choices.to_vec() } }
    }

    pub fn block_step(c: &FiniteWord, threshold: i64, below: bool, above: bool) -> Self {
        BiWord { rule: Rule::BlockStep { c: c.letters.clone(), threshold, below, above } }
    }

    /// Central word and choice of block `s` for block-structured rules.
    pub fn block_choice(&self, s: i64) -> Option<bool> {
        match &self.rule {
            Rule::Blocks { choices, .. } => Some(choices[s.rem_euclid(choices.len() as i64) as usize]),
            Rule::BlockStep { threshold, below, above, .. } => Some(if s < *threshold { *below } else { *above }),
            _ => None,
        }
    }

    pub fn block_core(&self) -> Option<&[u8]> {
        match &self.rule {
            Rule::Blocks { c, .. } | Rule::BlockStep { c, .. } => Some(c),
            _ => None,
        }
    }

    pub fn explicit(start: i64, letters: Vec<u8>) -> Self {
        BiWord { rule: Rule::Explicit { start, letters } }
    }

    /// Letter at index `n`. Panics outside the window of an explicit word.
    pub fn at(&self, n: i64) -> u8 {
        match &self.rule {
            Rule::Mechanical { alpha, rho, mode } => {
                (mech_round(alpha, rho, n + 1, *mode) - mech_round(alpha, rho, n, *mode)) as u8
            }
            Rule::Periodic { u, phase } => u[(n + phase).rem_euclid(u.len() as i64) as usize],
            Rule::Skew { left, mid, right, origin } => {
                let m = n - origin;
                if m < 0 {
                    left[m.rem_euclid(left.len() as i64) as usize]
                } else if (m as usize) < mid.len() {
                    mid[m as usize]
                } else {
                    let r = m - mid.len() as i64;
                    right[r.rem_euclid(right.len() as i64) as usize]
                }
            }
            Rule::Blocks { c, .. } | Rule::BlockStep { c, .. } => {
                let l = c.len() as i64 + 2;
                let m = n + 1;
                let s = m.div_euclid(l);
                let r = m.rem_euclid(l) as usize;
                if r < 2 {
                    let up = self.block_choice(s).expect("block rule");
                    let w = if up { [0, 1] } else { [1, 0] };
                    w[r]
                } else {
                    c[r - 2]
                }
            }
            Rule::Explicit { start, letters } => {
                let idx = n - start;
                assert!(idx >= 0 && (idx as usize) < letters.len(), "index {n} outside explicit window");
                letters[idx as usize]
            }
        }
    }

    /// Factor `w_[a,b)`.
    pub fn factor(&self, a: i64, b: i64) -> FiniteWord {
        FiniteWord::new((a..b).map(|n| self.at(n)).collect())
    }

    /// Letters on `[a, b)` as a plain vector.
    pub fn window(&self, a: i64, b: i64) -> Vec<u8> {
        (a..b).map(|n| self.at(n)).collect()
    }

    /// Signed height `|w_[a,b)|₁`, negated when `a > b`.
    pub fn height(&self, a: i64, b: i64) -> i64 {
        if a > b {
            return -self.height(b, a);
        }
        match &self.rule {
            Rule::Mechanical { alpha, rho, mode } => {
                mech_round(alpha, rho, b, *mode) - mech_round(alpha, rho, a, *mode)
            }
            Rule::Periodic { u, phase } => {
                let len = u.len() as i64;
                let h: i64 = u.iter().map(|&x| x as i64).sum();
                let prefix = |n: i64| {
                    let m = n + phase;
                    let q = m.div_euclid(len);
                    let r = m.rem_euclid(len) as usize;
                    q * h + u[..r].iter().map(|&x| x as i64).sum::<i64>()
                };
                prefix(b) - prefix(a)
            }
            _ => (a..b).map(|n| self.at(n) as i64).sum(),
        }
    }

    /// Render `w_[a,b)` with a '.' before index 0 when it falls inside.
    pub fn render(&self, a: i64, b: i64) -> String {
        let mut s = String::new();
        for n in a..b {
            if n == 0 && a < 0 {
                s.push('.');
            }
            s.push(char::from(b'0' + self.at(n)));
        }
        s
    }
}

/// Lower or upper mechanical word of slope `α ∈ [0,1]`.
pub fn mechanical_word(alpha: &QuadReal, rho: &QuadReal, mode: Mode) -> Result<BiWord> {
    if alpha.signum() < 0 || *alpha > QuadReal::one() {
        return Err(Error::SlopeOutOfRange);
    }
    Ok(BiWord { rule: Rule::Mechanical { alpha: alpha.clone(), rho: rho.clone(), mode } })
}

/// Lower (`0c1`) or upper (`1c0`) Christoffel word of slope `p/q`.
pub fn christoffel(p: i64, q: i64, mode: Mode) -> Result<FiniteWord> {
    if !(0 < p && p < q) {
        return Err(Error::DegenerateSlope);
    }
    if p.gcd(&q) != 1 {
        return Err(Error::NotCoprime(p, q));
    }
    let letters = (0..q)
        .map(|n| match mode {
            Mode::Lower => ((n + 1) * p).div_euclid(q) - (n * p).div_euclid(q),
            Mode::Upper => -(-(n + 1) * p).div_euclid(q) + (-n * p).div_euclid(q),
        } as u8)
        .collect();
    Ok(FiniteWord::new(letters))
}

/// Central word of slope `p/q` (length `q − 2`).
pub fn central_word(p: i64, q: i64) -> Result<FiniteWord> {
    let w = christoffel(p, q, Mode::Lower)?;
    Ok(FiniteWord::new(w.letters[1..w.len() - 1].to_vec()))
}

/// Result of a windowed balance test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Balance {
    Holds,
    Counterexample(FiniteWord, FiniteWord),
}

impl Balance {
    pub fn holds(&self) -> bool {
        matches!(self, Balance::Holds)
    }
}

/// Extremal windows per length: (min height, start of min, max height, start of max).
fn extremes(letters: &[u8], len: usize) -> (i64, usize, i64, usize) {
    let mut h: i64 = letters[..len].iter().map(|&x| x as i64).sum();
    let (mut lo, mut lo_at, mut hi, mut hi_at) = (h, 0, h, 0);
    for s in 1..=letters.len() - len {
        h += letters[s + len - 1] as i64 - letters[s - 1] as i64;
        if h < lo {
            lo = h;
            lo_at = s;
        }
        if h > hi {
            hi = h;
            hi_at = s;
        }
    }
    (lo, lo_at, hi, hi_at)
}

/// Is `w` C-balanced on factors inside `[−window, window)`? A window check, not a proof.
pub fn is_c_balanced(w: &BiWord, c: i64, window: i64) -> Balance {
    let letters = w.window(-window, window);
    c_balanced_letters(&letters, c)
}

pub fn c_balanced_letters(letters: &[u8], c: i64) -> Balance {
    for len in 1..=letters.len() {
        let (lo, lo_at, hi, hi_at) = extremes(letters, len);
        if hi - lo > c {
            return Balance::Counterexample(
                FiniteWord::new(letters[lo_at..lo_at + len].to_vec()),
                FiniteWord::new(letters[hi_at..hi_at + len].to_vec()),
            );
        }
    }
    Balance::Holds
}

/// Are `w1` and `w2` mutually balanced on `[−window, window)`?
pub fn mutually_balanced(w1: &BiWord, w2: &BiWord, window: i64) -> Balance {
    let x = w1.window(-window, window);
    let y = w2.window(-window, window);
    for len in 1..=x.len() {
        let (xlo, xlo_at, xhi, xhi_at) = extremes(&x, len);
        let (ylo, ylo_at, yhi, yhi_at) = extremes(&y, len);
        if xhi - ylo > 1 {
            return Balance::Counterexample(
                FiniteWord::new(x[xhi_at..xhi_at + len].to_vec()),
                FiniteWord::new(y[ylo_at..ylo_at + len].to_vec()),
            );
        }
        if yhi - xlo > 1 {
            return Balance::Counterexample(
                FiniteWord::new(x[xlo_at..xlo_at + len].to_vec()),
                FiniteWord::new(y[yhi_at..yhi_at + len].to_vec()),
            );
        }
    }
    Balance::Holds
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Markoff {
    MH1,
    MH2,
    MH3,
    MH4,
    NotOneBalanced,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MarkoffVerdict {
    pub class: Markoff,
    /// True when the verdict rests on a finite-window inspection.
    pub window_limited: bool,
}

/// Is `ρ ∈ Z + αZ`? Exact for quadratic `α`; `None` when `α` is rational and `ρ` is not.
pub fn in_z_plus_alpha_z(alpha: &QuadReal, rho: &QuadReal) -> Option<bool> {
    if alpha.is_rational() {
        if !rho.is_rational() {
            return None;
        }
        // Z + (p/q)Z = (1/q)Z
        let q = alpha.a().denom().clone();
        let r = rho.a() * num_rational::BigRational::from_integer(q);
        return Some(r.is_integer());
    }
    if !rho.is_rational() && rho.d() != alpha.d() {
        return Some(false);
    }
    // ρ = m + nα ⇒ n = b_ρ / b_α
    let n = rho.b() / alpha.b();
    if !n.is_integer() {
        return Some(false);
    }
    let m = rho.a() - &n * alpha.a();
    Some(m.is_integer())
}

/// Markoff class of a rule-backed word.
pub fn classify_markoff(w: &BiWord, window: i64) -> Result<MarkoffVerdict> {
    let exact = |class| Ok(MarkoffVerdict { class, window_limited: false });
    match &w.rule {
        Rule::Mechanical { alpha, rho, .. } => {
            if alpha.is_rational() {
                if !rho.is_rational() {
                    return Err(Error::Domain(
                        "rational slope with irrational intercept is not classified".into(),
                    ));
                }
                return exact(Markoff::MH1);
            }
            match in_z_plus_alpha_z(alpha, rho) {
                Some(true) => exact(Markoff::MH3),
                _ => exact(Markoff::MH2),
            }
        }
        Rule::Periodic { u, .. } => {
            let n = (u.len() as i64) * 2 + 2;
            if is_c_balanced(w, 1, n).holds() {
                exact(Markoff::MH1)
            } else {
                exact(Markoff::NotOneBalanced)
            }
        }
        Rule::Skew { left, right, mid, .. } => {
            let n = (left.len() + right.len() + mid.len()) as i64 * 2 + 4;
            let class = if is_c_balanced(w, 1, n).holds() { Markoff::MH4 } else { Markoff::NotOneBalanced };
            Ok(MarkoffVerdict { class, window_limited: false })
        }
        Rule::Blocks { c, choices } => {
            let l = (c.len() + 2) as i64;
            let n = l * (choices.len() as i64 + 2);
            // constant choices give a periodic Christoffel word; no window scan needed
            if choices.iter().all(|&x| x == choices[0]) || is_c_balanced(w, 1, n).holds() {
                exact(Markoff::MH1)
            } else {
                exact(Markoff::NotOneBalanced)
            }
        }
        Rule::BlockStep { c, below, above, .. } => {
            let n = (c.len() as i64 + 2) * 6;
            let class = if below == above {
                Markoff::MH1
            } else if is_c_balanced(w, 1, n).holds() {
                Markoff::MH4
            } else {
                Markoff::NotOneBalanced
            };
            exact(class)
        }
        Rule::Explicit { start, letters } => {
            let lo = (*start).max(-window);
            let hi = (start + letters.len() as i64).min(window);
            let seg: Vec<u8> = (lo..hi).map(|n| w.at(n)).collect();
            let class = if seg.is_empty() || !c_balanced_letters(&seg, 1).holds() {
                Markoff::NotOneBalanced
            } else if seg.iter().all(|&x| x == seg[0]) {
                Markoff::MH1
            } else {
                Markoff::MH2
            };
            Ok(MarkoffVerdict { class, window_limited: true })
        }
    }
}

/// Exact slope of a rule-backed word.
pub fn slope(w: &BiWord) -> Option<QuadReal> {
    match &w.rule {
        Rule::Mechanical { alpha, .. } => Some(alpha.clone()),
        Rule::Periodic { u, .. } => {
            let h = u.iter().filter(|&&x| x == 1).count() as i64;
            Some(QuadReal::frac(h, u.len() as i64))
        }
        Rule::Skew { right, .. } => {
            let h = right.iter().filter(|&&x| x == 1).count() as i64;
            Some(QuadReal::frac(h, right.len() as i64))
        }
        Rule::Blocks { c, .. } | Rule::BlockStep { c, .. } => {
            let h = c.iter().filter(|&&x| x == 1).count() as i64 + 1;
            Some(QuadReal::frac(h, c.len() as i64 + 2))
        }
        Rule::Explicit { .. } => None,
    }
}

/// Checks `|height(0,N) − Nα| ≤ 1` exactly for `N ∈ [1, n]`.
pub fn slope_deviation_ok(w: &BiWord, alpha: &QuadReal, n: i64) -> bool {
    let one = QuadReal::one();
    (1..=n).all(|k| {
        let dev = &QuadReal::int(w.height(0, k)) - &(alpha * &QuadReal::int(k));
        dev.abs() <= one
    })
}

/// Count of 1s as i64 convenience.
pub fn height_of(letters: &[u8]) -> i64 {
    letters.iter().map(|&x| x as i64).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn blocks_layout_puts_w0_at_minus_one_zero() {
        let c = central_word(2, 5).unwrap();
        let w = BiWord::blocks(&c, &[true, false]);
        assert_eq!(w.factor(-1, 1).letters, vec![0, 1]);
        assert_eq!(w.factor(1, 4), c);
        assert_eq!(w.factor(4, 6).letters, vec![1, 0]);
    }

    #[test]
    fn skew_word_shape() {
        let c = central_word(1, 3).unwrap();
        let w = BiWord::skew(&c, SkewVariant::A, 0);
        assert_eq!(w.render(-3, 6), "001.000100");
    }
}
