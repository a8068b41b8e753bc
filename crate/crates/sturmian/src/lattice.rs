//! Sturmian lattices SL(κ, α | ρ): line coordinates, the ±1/2 axiom,
//! corridor words, classification, triangles and planar realizations.
//!
//! Every direction is stored as `f(n) = nκ + offset(n)` with a rational
//! offset, so sums over `i + j + k = 0` are decided in Q.

use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::qfield::{rat, rat_int, QuadReal, Rat};
use crate::words::{
    central_word, classify_markoff, in_z_plus_alpha_z, BiWord, Markoff, Mode, Rule,
    SkewVariant,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Dir {
    A,
    B,
    C,
}

impl Dir {
    pub const ALL: [Dir; 3] = [Dir::A, Dir::B, Dir::C];

    pub fn index(self) -> usize {
        match self {
            Dir::A => 0,
            Dir::B => 1,
            Dir::C => 2,
        }
    }
}

/// `ε(n) ∈ {−1/2, +1/2}` stored as `±1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum EpsMap {
    Const(i8),
    /// `below` for `n < threshold`, `above` for `n ≥ threshold`.
    Step { threshold: i64, below: i8, above: i8 },
    /// Explicit values on `[start, start + len)`, `default` elsewhere.
    Window { start: i64, values: Vec<i8>, default: i8 },
    /// `values[n mod len]`.
    Periodic(Vec<i8>),
}

impl EpsMap {
    pub fn at(&self, n: i64) -> i8 {
        match self {
            EpsMap::Const(e) => *e,
            EpsMap::Step { threshold, below, above } => {
                if n < *threshold {
                    *below
                } else {
                    *above
                }
            }
            EpsMap::Window { start, values, default } => {
                let i = n - start;
                if i >= 0 && (i as usize) < values.len() {
                    values[i as usize]
                } else {
                    *default
                }
            }
            EpsMap::Periodic(values) => values[n.rem_euclid(values.len() as i64) as usize],
        }
    }
}

/// How `offset(n) = f(n) − nκ` is produced for one direction.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Offset {
    /// `f0 + shift·n + |w_[0,n)|₁`; corridor widths are `κ + shift + w_n`.
    Word { word: BiWord, f0: Rat, shift: i64 },
    /// `ε(n)/2`.
    Eps(EpsMap),
    /// `inner(step·n) + shift·n`: sub-lattices and re-based passages.
    Affine { inner: Box<Offset>, step: i64, shift: i64 },
}

impl Offset {
    pub fn at(&self, n: i64) -> Rat {
        match self {
            Offset::Word { word, f0, shift } => f0 + rat_int(shift * n + word.height(0, n)),
            Offset::Eps(e) => rat(e.at(n) as i64, 2),
            Offset::Affine { inner, step, shift } => inner.at(step * n) + rat_int(shift * n),
        }
    }

    /// Corridor word and passage shift relative to κ, when rule-backed.
    fn corridor(&self) -> Result<(BiWord, i64)> {
        match self {
            Offset::Word { word, shift, .. } => Ok((word.clone(), *shift)),
            Offset::Eps(e) => {
                // ε steps change widths by −1, 0 or +1 around κ
                let (lo, hi, sample) = eps_steps(e);
                match (lo, hi) {
                    (true, true) => Err(Error::ThreeColorDirection),
                    (false, false) => Ok((BiWord::zeros(), 0)),
                    _ => {
                        let letter = |n: i64| {
                            let d = e.at(n + 1) - e.at(n);
                            if lo {
                                (d == 0) as u8
                            } else {
                                (d > 0) as u8
                            }
                        };
                        let word = match e {
                            EpsMap::Periodic(v) => {
                                let u: Vec<u8> = (0..v.len() as i64).map(letter).collect();
                                BiWord::periodic(&u, 0)
                            }
                            _ => {
                                let mid: Vec<u8> = (sample.0..sample.1).map(letter).collect();
                                let bg = vec![letter(sample.1 + 1)];
                                BiWord { rule: Rule::Skew { left: bg.clone(), mid, right: bg, origin: sample.0 } }
                            }
                        };
                        Ok((word, -(lo as i64)))
                    }
                }
            }
            Offset::Affine { inner, step: 1, shift } => {
                let (w, s) = inner.corridor()?;
                Ok((w, s + shift))
            }
            Offset::Affine { .. } => Err(Error::Domain("sub-lattice corridor word is not rule-backed".into())),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    /// Mechanical lattice with intercepts ρ and per-direction rounding.
    Irrational,
    /// `a = ⋯c w c w⋯`, `b = (1c0)^Z`, `c = (0c1)^Z`.
    RationalPeriodic { p: i64, q: i64 },
    /// Three equal skew words.
    RationalSkew { p: i64, q: i64, variant: SkewVariant },
    /// `a(i) = iκ + ε(i)`, `b`, `c` equidistant.
    ThreeColor,
    /// Slope-0/1 skew family; `plus = true` is the second displayed system.
    SkewExtreme { plus: bool },
    /// User-supplied offsets.
    Explicit,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeParams {
    pub kappa: QuadReal,
    pub alpha: QuadReal,
    pub rho: [QuadReal; 3],
    pub modes: [Mode; 3],
    pub family: Family,
    pub lines: [Offset; 3],
}

/// Default rounding of the mechanical lattice: `a` upper, `b` and `c` lower (sign pattern −,+,+).
pub const DEFAULT_MODES: [Mode; 3] = [Mode::Upper, Mode::Lower, Mode::Lower];

fn mech_offset(alpha: &QuadReal, rho: &QuadReal, mode: Mode) -> Offset {
    let word = BiWord { rule: Rule::Mechanical { alpha: alpha.clone(), rho: rho.clone(), mode } };
    let f0 = match mode {
        Mode::Lower => Rat::from_integer(rho.floor()) + rat(1, 2),
        Mode::Upper => Rat::from_integer(rho.ceil()) - rat(1, 2),
    };
    Offset::Word { word, f0, shift: 0 }
}

impl LatticeParams {
    /// SL(κ, α | ρ) of irrational slope; requires `ρ₀ + ρ₁ + ρ₂ = 0`.
    pub fn irrational(kappa: QuadReal, alpha: QuadReal, rho: [QuadReal; 3]) -> Result<Self> {
        Self::irrational_with_modes(kappa, alpha, rho, DEFAULT_MODES)
    }

    pub fn irrational_with_modes(
        kappa: QuadReal,
        alpha: QuadReal,
        rho: [QuadReal; 3],
        modes: [Mode; 3],
    ) -> Result<Self> {
        let sum = &(&rho[0] + &rho[1]) + &rho[2];
        if !sum.is_zero() {
            return Err(Error::Domain("intercepts must sum to zero".into()));
        }
        Self::mechanical_unchecked(kappa, alpha, rho, modes)
    }

    /// Mechanical lattice without the zero-sum check (used to exhibit violations).
    pub fn mechanical_unchecked(
        kappa: QuadReal,
        alpha: QuadReal,
        rho: [QuadReal; 3],
        modes: [Mode; 3],
    ) -> Result<Self> {
        if alpha.signum() < 0 || alpha > QuadReal::one() {
            return Err(Error::SlopeOutOfRange);
        }
        if alpha.is_rational() {
            return Err(Error::RationalSlopeNeedsVariant);
        }
        let lines = [
            mech_offset(&alpha, &rho[0], modes[0]),
            mech_offset(&alpha, &rho[1], modes[1]),
            mech_offset(&alpha, &rho[2], modes[2]),
        ];
        Ok(LatticeParams { kappa, alpha, rho, modes, family: Family::Irrational, lines })
    }

    /// First family of the rational classification; `choices[s]` picks `w_s = 01` (true) or `10`.
    ///
    /// All three words are written as `⋯c w₋₁ c w₀ c w₁ c⋯` with `w₀ = f₋₁f₀` and
    /// `f(0) = ∓1/2` for `w₀ = 01 / 10`.
    pub fn rational_periodic(p: i64, q: i64, kappa: QuadReal, choices: &[bool]) -> Result<Self> {
        let c = central_word(p, q)?;
        let wa = BiWord::blocks(&c, choices);
        let window = 2 * q * (choices.len() as i64 + 2);
        for (x, y) in [(true, false), (false, true), (true, true), (false, false)] {
            let lines = block_lines([wa.clone(), BiWord::blocks(&c, &[x]), BiWord::blocks(&c, &[y])]);
            if axiom_on_lines(&lines, window) {
                return Ok(Self::rational(kappa, p, q, Family::RationalPeriodic { p, q }, lines));
            }
        }
        Err(Error::Domain("no block normalization satisfies the axiom".into()))
    }

    /// Second family of the rational classification: three equal skew words
    /// `∞(0c1).0c0(1c0)∞` (variant A) or `∞(1c0).1c1(0c1)∞` (variant B) in
    /// direction a, and the same word shifted by one block in b and c.
    pub fn rational_skew(p: i64, q: i64, kappa: QuadReal, variant: SkewVariant) -> Result<Self> {
        let c = central_word(p, q)?;
        let v = matches!(variant, SkewVariant::B);
        let wa = BiWord::block_step(&c, 1, v, !v);
        let wb = BiWord::block_step(&c, 0, v, !v);
        let lines = block_lines([wa, wb.clone(), wb]);
        if axiom_on_lines(&lines, 4 * q + 4) {
            return Ok(Self::rational(kappa, p, q, Family::RationalSkew { p, q, variant }, lines));
        }
        Err(Error::Domain("no block normalization satisfies the axiom".into()))
    }

    fn rational(kappa: QuadReal, p: i64, q: i64, family: Family, lines: [Offset; 3]) -> Self {
        let zero = QuadReal::zero();
        LatticeParams {
            kappa,
            alpha: QuadReal::frac(p, q),
            rho: [zero.clone(), zero.clone(), zero],
            modes: DEFAULT_MODES,
            family,
            lines,
        }
    }

    /// `a(i) = iκ + ε(i)`, `b(j) = jκ − 1/2`, `c(k) = kκ + 1/2`.
    pub fn three_color(kappa: QuadReal, eps: EpsMap) -> Self {
        let zero = QuadReal::zero();
        LatticeParams {
            kappa,
            alpha: zero.clone(),
            rho: [zero.clone(), zero.clone(), zero],
            modes: DEFAULT_MODES,
            family: Family::ThreeColor,
            lines: [Offset::Eps(eps), Offset::Eps(EpsMap::Const(-1)), Offset::Eps(EpsMap::Const(1))],
        }
    }

    /// The 2-colour slope-0/1 family with a sign flip at the origin.
    pub fn skew_extreme(kappa: QuadReal, plus: bool) -> Self {
        let s: i8 = if plus { 1 } else { -1 };
        let zero = QuadReal::zero();
        let a = EpsMap::Step { threshold: 1, below: -s, above: s };
        let bc = EpsMap::Step { threshold: 0, below: -s, above: s };
        LatticeParams {
            kappa,
            alpha: zero.clone(),
            rho: [zero.clone(), zero.clone(), zero],
            modes: DEFAULT_MODES,
            family: Family::SkewExtreme { plus },
            lines: [Offset::Eps(a), Offset::Eps(bc.clone()), Offset::Eps(bc)],
        }
    }

    /// The Kagome lattice: κ = 1, a(i) = 1/2 + i, b(j) = j, c(k) = k.
    pub fn kagome() -> Self {
        Self::explicit(
            QuadReal::one(),
            QuadReal::zero(),
            [
                (BiWord::zeros(), rat(1, 2)),
                (BiWord::zeros(), Rat::zero()),
                (BiWord::zeros(), Rat::zero()),
            ],
        )
    }

    /// Three corridor words with starting offsets `f(0)`.
    pub fn explicit(kappa: QuadReal, alpha: QuadReal, dirs: [(BiWord, Rat); 3]) -> Self {
        let zero = QuadReal::zero();
        let [(wa, fa), (wb, fb), (wc, fc)] = dirs;
        LatticeParams {
            kappa,
            alpha,
            rho: [zero.clone(), zero.clone(), zero],
            modes: DEFAULT_MODES,
            family: Family::Explicit,
            lines: [
                Offset::Word { word: wa, f0: fa, shift: 0 },
                Offset::Word { word: wb, f0: fb, shift: 0 },
                Offset::Word { word: wc, f0: fc, shift: 0 },
            ],
        }
    }

    /// The periodic example: a(3r−i) = 1/2 + 7r − 2i, b(3r+j) = c(3r+j) = 7r + 2j.
    pub fn periodic_example() -> Self {
        Self::explicit(
            QuadReal::int(2),
            QuadReal::frac(1, 3),
            [
                (BiWord::periodic_str("100"), rat(1, 2)),
                (BiWord::periodic_str("001"), Rat::zero()),
                (BiWord::periodic_str("001"), Rat::zero()),
            ],
        )
    }

    pub fn offset(&self, dir: Dir, n: i64) -> Rat {
        self.lines[dir.index()].at(n)
    }

    /// Exact coordinate of the `n`-th line in direction `dir`.
    pub fn line_coord(&self, dir: Dir, n: i64) -> QuadReal {
        &(&self.kappa * &QuadReal::int(n)) + &QuadReal::from_rat(self.offset(dir, n))
    }

    /// Width `f(n+1) − f(n)`.
    pub fn width(&self, dir: Dir, n: i64) -> QuadReal {
        &self.kappa + &QuadReal::from_rat(self.offset(dir, n + 1) - self.offset(dir, n))
    }

    /// Binary corridor word: 0 for the narrower width, 1 for the wider.
    pub fn corridor_word(&self, dir: Dir) -> Result<BiWord> {
        self.lines[dir.index()].corridor().map(|(w, _)| w)
    }

    /// Passage (narrower corridor width) of direction `dir`.
    pub fn passage(&self, dir: Dir) -> Result<QuadReal> {
        let (_, s) = self.lines[dir.index()].corridor()?;
        Ok(&self.kappa + &QuadReal::int(s))
    }
}

/// Which width changes an ε map produces, plus a window covering all its features.
fn eps_steps(e: &EpsMap) -> (bool, bool, (i64, i64)) {
    let range = match e {
        EpsMap::Const(_) => (0, 1),
        EpsMap::Step { threshold, .. } => (threshold - 2, threshold + 2),
        EpsMap::Window { start, values, .. } => (start - 2, start + values.len() as i64 + 2),
        EpsMap::Periodic(values) => (0, values.len() as i64 + 1),
    };
    let mut lo = false;
    let mut hi = false;
    for n in range.0..range.1 {
        let d = e.at(n + 1) - e.at(n);
        lo |= d < 0;
        hi |= d > 0;
    }
    (lo, hi, range)
}

/// `f(0) = −1/2` when `f₋₁f₀ = 01`, `+1/2` when `10`.
pub fn block_offset(word: BiWord) -> Offset {
    let f0 = if word.block_choice(0).unwrap_or(true) { rat(-1, 2) } else { rat(1, 2) };
    Offset::Word { word, f0, shift: 0 }
}

fn block_lines(words: [BiWord; 3]) -> [Offset; 3] {
    words.map(block_offset)
}

fn axiom_on_lines(lines: &[Offset; 3], window: i64) -> bool {
    let half = rat(1, 2);
    let off = |d: usize, n: i64| lines[d].at(n);
    for i in -window..=window {
        let ai = off(0, i);
        for j in -window..=window {
            let s = &ai + off(1, j) + off(2, -i - j);
            if s.abs() != half {
                return false;
            }
        }
    }
    true
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AxiomCheck {
    Ok,
    Violation { i: i64, j: i64, k: i64, value: QuadReal },
}

impl AxiomCheck {
    pub fn is_ok(&self) -> bool {
        matches!(self, AxiomCheck::Ok)
    }
}

/// Check `|a(i) + b(j) + c(k)| = 1/2` for all `|i|, |j| ≤ window`, `k = −i−j`.
///
/// The κ-parts cancel identically on `i + j + k = 0`, so the sum equals the
/// exact rational sum of offsets.
pub fn verify_axiom(p: &LatticeParams, window: i64) -> AxiomCheck {
    let half = rat(1, 2);
    let cache = |d: Dir, lo: i64, hi: i64| -> Vec<Rat> { (lo..=hi).map(|n| p.offset(d, n)).collect() };
    let a = cache(Dir::A, -window, window);
    let b = cache(Dir::B, -window, window);
    let c = cache(Dir::C, -2 * window, 2 * window);
    for (ii, ai) in a.iter().enumerate() {
        let i = ii as i64 - window;
        for (jj, bj) in b.iter().enumerate() {
            let j = jj as i64 - window;
            let k = -i - j;
            let s = ai + bj + &c[(k + 2 * window) as usize];
            if s.abs() != half {
                let value = &(&p.line_coord(Dir::A, i) + &p.line_coord(Dir::B, j)) + &p.line_coord(Dir::C, k);
                return AxiomCheck::Violation { i, j, k, value };
            }
        }
    }
    AxiomCheck::Ok
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DirTag {
    MH1,
    MH2,
    MH3,
    MH4,
    TwoBal,
    OneCol,
    ThreeCol,
}

impl fmt::Display for DirTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            DirTag::MH1 => "MH1",
            DirTag::MH2 => "MH2",
            DirTag::MH3 => "MH3",
            DirTag::MH4 => "MH4",
            DirTag::TwoBal => "2-bal",
            DirTag::OneCol => "1-col",
            DirTag::ThreeCol => "3-col",
        };
        f.write_str(s)
    }
}

/// Node of the transition graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Node {
    /// (MH2, MH2, MH2)
    Irrational0,
    /// (MH3, MH2, MH2)
    Irrational1,
    /// (MH3, MH3, MH3)
    Irrational3,
    /// (MH1, MH1, 2-bal)
    RationalPeriodic,
    /// (MH4, MH4, MH4)
    RationalSkew,
    /// (1-col, 1-col, 3-col)
    ThreeColor,
    /// 2-colour slope 0/1 skew
    SkewExtreme,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Class {
    pub node: Node,
    pub tags: [DirTag; 3],
}

impl fmt::Display for Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c] = self.tags;
        let name = match self.node {
            Node::Irrational0 | Node::Irrational1 | Node::Irrational3 => "irrational",
            Node::RationalPeriodic => "rational-periodic",
            Node::RationalSkew => "rational-skew",
            Node::ThreeColor => "three-color",
            Node::SkewExtreme => "skew-0/1",
        };
        write!(f, "{name} ({a},{b},{c})")
    }
}

fn tag_of_word(w: &BiWord) -> DirTag {
    if let Rule::Periodic { u, .. } = &w.rule {
        if u.iter().all(|&x| x == u[0]) {
            return DirTag::OneCol;
        }
    }
    match classify_markoff(w, 64).map(|v| v.class) {
        Ok(Markoff::MH1) => DirTag::MH1,
        Ok(Markoff::MH2) => DirTag::MH2,
        Ok(Markoff::MH3) => DirTag::MH3,
        Ok(Markoff::MH4) => DirTag::MH4,
        _ => DirTag::TwoBal,
    }
}

/// Classify a rule-backed lattice into its transition-graph node.
pub fn classify(p: &LatticeParams) -> Class {
    let mut tags = [DirTag::OneCol; 3];
    for d in Dir::ALL {
        tags[d.index()] = match p.corridor_word(d) {
            Ok(w) => tag_of_word(&w),
            Err(_) => DirTag::ThreeCol,
        };
    }
    let node = match &p.family {
        Family::Irrational => {
            let n = p
                .rho
                .iter()
                .filter(|r| in_z_plus_alpha_z(&p.alpha, r) == Some(true))
                .count();
            match n {
                0 => Node::Irrational0,
                1 => Node::Irrational1,
                _ => Node::Irrational3,
            }
        }
        Family::RationalPeriodic { .. } => Node::RationalPeriodic,
        Family::RationalSkew { .. } => Node::RationalSkew,
        Family::ThreeColor => {
            tags[0] = DirTag::ThreeCol;
            Node::ThreeColor
        }
        Family::SkewExtreme { .. } => Node::SkewExtreme,
        Family::Explicit => {
            if tags.iter().all(|t| matches!(t, DirTag::OneCol)) {
                tags[0] = DirTag::ThreeCol;
                Node::ThreeColor
            } else if tags.iter().all(|t| matches!(t, DirTag::MH1 | DirTag::TwoBal | DirTag::OneCol)) {
                Node::RationalPeriodic
            } else if tags.iter().all(|t| matches!(t, DirTag::MH4)) {
                Node::RationalSkew
            } else {
                let n = tags.iter().filter(|t| matches!(t, DirTag::MH3)).count();
                match n {
                    0 => Node::Irrational0,
                    1 => Node::Irrational1,
                    _ => Node::Irrational3,
                }
            }
        }
    };
    if node == Node::RationalPeriodic {
        // the free direction may be strictly 2-balanced
        tags[0] = DirTag::TwoBal;
    }
    Class { node, tags }
}

/// Passage, slope and frequency `q = 1/(κ + α)`.
pub fn invariants_of(p: &LatticeParams) -> (QuadReal, QuadReal, QuadReal) {
    let q = (&p.kappa + &p.alpha).recip().expect("κ + α > 0");
    (p.kappa.clone(), p.alpha.clone(), q)
}

/// Slope from frequency and passage: `α = 1/q − κ`.
pub fn slope_from_frequency(q: &QuadReal, kappa: &QuadReal) -> QuadReal {
    &q.recip().expect("q ≠ 0") - kappa
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SizeClass {
    Tiny,
    Small,
    Medium,
    Large,
    Other,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Triangle {
    pub i: i64,
    pub j: i64,
    pub k: i64,
    pub order: i64,
    pub size: QuadReal,
    /// +1 for ∇ (positive sum), −1 for Δ, 0 when the lines are concurrent.
    pub orientation: i32,
    pub size_class: SizeClass,
}

/// Sturmian triangle `G(i, j, k)`.
pub fn triangle(p: &LatticeParams, i: i64, j: i64, k: i64) -> Triangle {
    let sum = &(&p.line_coord(Dir::A, i) + &p.line_coord(Dir::B, j)) + &p.line_coord(Dir::C, k);
    let size = sum.abs();
    let order = (i + j + k).abs();
    let half = QuadReal::frac(1, 2);
    let size_class = if order == 0 && size == half {
        SizeClass::Tiny
    } else if order == 1 {
        if size == &p.kappa - &half {
            SizeClass::Small
        } else if size == &p.kappa + &half {
            SizeClass::Medium
        } else if size == &p.kappa + &QuadReal::frac(3, 2) {
            SizeClass::Large
        } else {
            SizeClass::Other
        }
    } else {
        SizeClass::Other
    };
    Triangle { i, j, k, order, size, orientation: sum.signum(), size_class }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Form {
    Isometric,
    Cabinet,
}

/// A point `(x, y)`; in the isometric form the stored `y` is `y/√3`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Point {
    pub x: QuadReal,
    pub y: QuadReal,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Line {
    pub form: Form,
    pub point: Point,
    pub direction: Point,
}

/// `v₀, v₁, v₂` of the form (isometric `y` components divided by √3).
pub fn basis(form: Form) -> [Point; 3] {
    let q = QuadReal::frac;
    match form {
        Form::Isometric => [
            Point { x: q(1, 1), y: q(0, 1) },
            Point { x: q(-1, 2), y: q(1, 2) },
            Point { x: q(-1, 2), y: q(-1, 2) },
        ],
        Form::Cabinet => [
            Point { x: q(-1, 1), y: q(1, 1) },
            Point { x: q(0, 1), y: q(-1, 1) },
            Point { x: q(1, 1), y: q(0, 1) },
        ],
    }
}

fn lin(s: &QuadReal, u: &Point, t: &QuadReal, v: &Point) -> Point {
    Point { x: &(s * &u.x) + &(t * &v.x), y: &(s * &u.y) + &(t * &v.y) }
}

/// The line `{dir = f(n)}`: `{a = a(i)} = Rv₀ + a(i)v₁`, cyclically.
pub fn to_cartesian(p: &LatticeParams, form: Form, dir: Dir, n: i64) -> Line {
    let v = basis(form);
    let f = p.line_coord(dir, n);
    let (d, o) = match dir {
        Dir::A => (0, 1),
        Dir::B => (1, 2),
        Dir::C => (2, 0),
    };
    let zero = QuadReal::zero();
    Line { form, point: lin(&f, &v[o], &zero, &v[d]), direction: v[d].clone() }
}

/// Intersection of `{a = a}` and `{b = b}`-type lines given their coordinates.
pub fn intersect(form: Form, d1: Dir, f1: &QuadReal, d2: Dir, f2: &QuadReal) -> Point {
    let v = basis(form);
    // a∩b = −b v₀ + a v₁, b∩c = −c v₁ + b v₂, c∩a = −a v₂ + c v₀
    match (d1, d2) {
        (Dir::A, Dir::B) => lin(&-f2, &v[0], f1, &v[1]),
        (Dir::B, Dir::A) => lin(&-f1, &v[0], f2, &v[1]),
        (Dir::B, Dir::C) => lin(&-f2, &v[1], f1, &v[2]),
        (Dir::C, Dir::B) => lin(&-f1, &v[1], f2, &v[2]),
        (Dir::C, Dir::A) => lin(&-f2, &v[2], f1, &v[0]),
        (Dir::A, Dir::C) => lin(&-f1, &v[2], f2, &v[0]),
        _ => panic!("parallel lines"),
    }
}

/// Squared Euclidean distance (isometric `y` carries the √3 factor).
pub fn dist2(form: Form, p: &Point, q: &Point) -> QuadReal {
    let dx = &p.x - &q.x;
    let dy = &p.y - &q.y;
    let w = match form {
        Form::Isometric => QuadReal::int(3),
        Form::Cabinet => QuadReal::one(),
    };
    &(&dx * &dx) + &(&w * &(&dy * &dy))
}

/// JSON description `{kappa, alpha, rho, modes, class}` with exact strings.
pub fn to_json(p: &LatticeParams) -> serde_json::Value {
    let class = classify(p);
    json!({
        "kappa": p.kappa.to_string(),
        "alpha": p.alpha.to_string(),
        "rho": p.rho.iter().map(|r| r.to_string()).collect::<Vec<_>>(),
        "modes": p.modes.iter().map(|m| format!("{m:?}").to_lowercase()).collect::<Vec<_>>(),
        "class": class.to_string(),
    })
}

/// Exact coordinates `f(lo..hi)` as strings.
pub fn coords_json(p: &LatticeParams, dir: Dir, lo: i64, hi: i64) -> serde_json::Value {
    json!((lo..hi).map(|n| p.line_coord(dir, n).to_string()).collect::<Vec<_>>())
}

/// `|f(n) − (n(κ+α) + ρ)|` as exact value, for the trigonal approximation bound.
pub fn trigonal_error(p: &LatticeParams, dir: Dir, n: i64) -> QuadReal {
    let fbar = &(&(&p.kappa + &p.alpha) * &QuadReal::int(n)) + &p.rho[dir.index()];
    (&p.line_coord(dir, n) - &fbar).abs()
}

