//! SL substitutions Ψ, Ψ*, Ψ⁻¹, expansion constants, fundamental lattices
//! and sub-lattices.

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{
    block_offset, Dir, EpsMap, Family, LatticeParams, Offset, DEFAULT_MODES,
};
use crate::qfield::{cf_expand, convergent_matrix, rat, CfKind, QuadReal};
use crate::words::{central_word, BiWord, Rule, SkewVariant};

/// Which degenerate outcome a substitution step produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Tag {
    Regular,
    /// `α₁ = 0`: equidistant or 3-color with width `κ₁`.
    SlopeZero,
    /// The same lattice read as `SL(κ₁ − 1, 1)`.
    SlopeOne,
}

/// `scale · SL(params)`; a negative scale includes the point reflection.
#[derive(Clone, Debug, PartialEq)]
pub struct ScaledLattice {
    pub scale: QuadReal,
    pub params: LatticeParams,
    pub tag: Tag,
}

impl ScaledLattice {
    /// Actual coordinate of the `n`-th line: `scale · F(n)`.
    pub fn coord(&self, dir: Dir, n: i64) -> QuadReal {
        &self.scale * &self.params.line_coord(dir, n)
    }
}

/// Branch for `α = 1/(d+2)`, whose continued fraction is not unique.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum RationalBranch {
    #[default]
    SlopeZero,
    SlopeOne,
}

/// `Ψ(κ, α) = (κ⁻¹ + ⌊α⁻¹⌋, α⁻¹ − ⌊α⁻¹⌋)`.
pub fn psi_params(kappa: &QuadReal, alpha: &QuadReal) -> Result<(QuadReal, QuadReal)> {
    if alpha.is_zero() {
        return Err(Error::SlopeZero);
    }
    let inv = alpha.recip()?;
    let d = QuadReal::from_bigint(inv.floor());
    Ok((&kappa.recip()? + &d, &inv - &d))
}

/// `Ψ⁻¹(κ, α) = (1/(κ − ⌊κ⌋), 1/(⌊κ⌋ + α))`; `None` for integer κ (trigonal limit).
pub fn psi_inverse_params(kappa: &QuadReal, alpha: &QuadReal) -> Result<Option<(QuadReal, QuadReal)>> {
    let d = QuadReal::from_bigint(kappa.floor());
    let frac = kappa - &d;
    if frac.is_zero() {
        return Ok(None);
    }
    Ok(Some((frac.recip()?, (&d + alpha).recip()?)))
}

/// `Ψ*(κ*, α*) = (⌈1/α*⌉ − 1/κ*, ⌈1/α*⌉ − 1/α*)`.
pub fn psi_star_params(kappa: &QuadReal, alpha: &QuadReal) -> Result<(QuadReal, QuadReal)> {
    let inv = alpha.recip()?;
    let c = QuadReal::from_bigint(inv.ceil());
    Ok((&c - &kappa.recip()?, &c - &inv))
}

/// Parameters of the positive (starred) form `SL*(κ*, α* | ρ*)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StarParams {
    pub kappa: QuadReal,
    pub alpha: QuadReal,
    pub rho: [QuadReal; 3],
}

impl StarParams {
    /// Dual of the standard form: `κ* = κ + 1`, `α* = 1 − α`, `ρ* = −ρ`.
    pub fn from_params(p: &LatticeParams) -> Self {
        StarParams {
            kappa: &p.kappa + &QuadReal::one(),
            alpha: &QuadReal::one() - &p.alpha,
            rho: [-&p.rho[0], -&p.rho[1], -&p.rho[2]],
        }
    }

    /// The same lattice in standard form.
    pub fn to_params(&self) -> Result<LatticeParams> {
        LatticeParams::irrational(
            &self.kappa - &QuadReal::one(),
            &QuadReal::one() - &self.alpha,
            [-&self.rho[0], -&self.rho[1], -&self.rho[2]],
        )
    }

    /// `a*(i) = iκ* − ⌊iα* + ρ*₀⌋ − 1/2`, `b*`, `c*` with ceilings and `+1/2`.
    pub fn line_coord(&self, dir: Dir, n: i64) -> QuadReal {
        let x = &(&self.alpha * &QuadReal::int(n)) + &self.rho[dir.index()];
        let nk = &self.kappa * &QuadReal::int(n);
        match dir {
            Dir::A => &(&nk - &QuadReal::from_bigint(x.floor())) - &QuadReal::frac(1, 2),
            _ => &(&nk - &QuadReal::from_bigint(x.ceil())) + &QuadReal::frac(1, 2),
        }
    }
}

/// Positive super lattice: `κ* SL*(Ψ*(κ*, α*) | ρ*/α*)`.
pub fn psi_star(p: &StarParams) -> Result<(QuadReal, StarParams)> {
    if p.alpha.is_rational() {
        return Err(Error::RationalInput);
    }
    if p.kappa <= QuadReal::one() || p.alpha.signum() <= 0 || p.alpha >= QuadReal::one() {
        return Err(Error::Domain("starred parameters need κ* > 1 and α* ∈ (0,1)".into()));
    }
    let (k1, a1) = psi_star_params(&p.kappa, &p.alpha)?;
    let inv = p.alpha.recip()?;
    let rho = [&p.rho[0] * &inv, &p.rho[1] * &inv, &p.rho[2] * &inv];
    Ok((p.kappa.clone(), StarParams { kappa: k1, alpha: a1, rho }))
}

/// Negative super lattice (middle lines of wider corridors) with the default branch.
pub fn psi(p: &LatticeParams) -> Result<ScaledLattice> {
    psi_with_branch(p, RationalBranch::SlopeZero)
}

pub fn psi_with_branch(p: &LatticeParams, branch: RationalBranch) -> Result<ScaledLattice> {
    if p.alpha.is_zero() {
        return Err(Error::SlopeZero);
    }
    let scale = -&p.kappa;
    if !p.alpha.is_rational() {
        let (k1, a1) = psi_params(&p.kappa, &p.alpha)?;
        let inv = p.alpha.recip()?;
        let rho = [&p.rho[0] * &inv, &p.rho[1] * &inv, &p.rho[2] * &inv];
        let params = match p.family {
            Family::Irrational => LatticeParams::mechanical_unchecked(k1, a1, rho, p.modes)?,
            _ => return Err(Error::UnhandledShape),
        };
        return Ok(ScaledLattice { scale, params, tag: Tag::Regular });
    }
    let alpha = p.alpha.as_rat().expect("rational").clone();
    let (num, den) = (alpha.numer().to_i64().unwrap_or(0), alpha.denom().to_i64().unwrap_or(0));
    if num == den {
        return Err(Error::UnhandledShape);
    }
    let mut lines = Vec::with_capacity(3);
    for d in Dir::ALL {
        let Offset::Word { word, .. } = &p.lines[d.index()] else {
            return Err(Error::UnhandledShape);
        };
        if word.block_core().is_none() || block_offset(word.clone()) != p.lines[d.index()] {
            return Err(Error::UnhandledShape);
        }
        lines.push(word.clone());
    }
    if num == 1 {
        // F(n) = −κ(nκ₁ + ε(−n)) with ε(s) = −1/2 for w_s = 01
        let k1 = &p.kappa.recip()? + &QuadReal::int(den);
        let eps = |w: &BiWord| -> EpsMap {
            let sign = |b: bool| if b { -1i8 } else { 1 };
            match &w.rule {
                Rule::Blocks { choices, .. } => {
                    let l = choices.len() as i64;
                    EpsMap::Periodic((0..l).map(|t| sign(choices[(-t).rem_euclid(l) as usize])).collect())
                }
                Rule::BlockStep { threshold, below, above, .. } => {
                    // ε(−n) is `below` exactly when n ≥ 1 − threshold
                    EpsMap::Step { threshold: 1 - threshold, below: sign(*above), above: sign(*below) }
                }
                _ => unreachable!("checked block rule"),
            }
        };
        let offs: Vec<Offset> = lines.iter().map(|w| Offset::Eps(eps(w))).collect();
        let zero = QuadReal::zero();
        let (kappa, alpha, offs, tag) = match branch {
            RationalBranch::SlopeZero => (k1, zero.clone(), offs, Tag::SlopeZero),
            RationalBranch::SlopeOne => {
                let offs = offs
                    .into_iter()
                    .map(|o| Offset::Affine { inner: Box::new(o), step: 1, shift: 1 })
                    .collect();
                (&k1 - &QuadReal::one(), QuadReal::one(), offs, Tag::SlopeOne)
            }
        };
        let offs: [Offset; 3] = offs.try_into().expect("three directions");
        let family = match lines[0].rule {
            Rule::BlockStep { .. } => Family::SkewExtreme { plus: false },
            _ => Family::Explicit,
        };
        let params = LatticeParams {
            kappa,
            alpha,
            rho: [zero.clone(), zero.clone(), zero],
            modes: DEFAULT_MODES,
            family,
            lines: offs,
        };
        return Ok(ScaledLattice { scale, params, tag });
    }
    // α = p/q ↦ α₁ = (q mod p)/p, blocks reversed around the origin
    let (k1, a1) = psi_params(&p.kappa, &p.alpha)?;
    let (p1, q1) = (den.rem_euclid(num), num);
    let big_c = central_word(p1, q1)?;
    let map = |w: &BiWord| -> BiWord {
        match &w.rule {
            Rule::Blocks { choices, .. } => {
                let l = choices.len() as i64;
                let rev: Vec<bool> = (0..l).map(|t| choices[(-t).rem_euclid(l) as usize]).collect();
                BiWord::blocks(&big_c, &rev)
            }
            Rule::BlockStep { threshold, below, above, .. } => {
                BiWord::block_step(&big_c, 1 - threshold, *above, *below)
            }
            _ => unreachable!("checked block rule"),
        }
    };
    let words: Vec<BiWord> = lines.iter().map(map).collect();
    let offs: [Offset; 3] = [block_offset(words[0].clone()), block_offset(words[1].clone()), block_offset(words[2].clone())];
    let family = match (&p.family, &words[0].rule) {
        (_, Rule::BlockStep { below, .. }) => {
            Family::RationalSkew { p: p1, q: q1, variant: if *below { SkewVariant::B } else { SkewVariant::A } }
        }
        _ => Family::RationalPeriodic { p: p1, q: q1 },
    };
    let zero = QuadReal::zero();
    let params = LatticeParams {
        kappa: k1,
        alpha: a1,
        rho: [zero.clone(), zero.clone(), zero],
        modes: DEFAULT_MODES,
        family,
        lines: offs,
    };
    Ok(ScaledLattice { scale, params, tag: Tag::Regular })
}

/// Result of Ψ⁻¹.
#[derive(Clone, Debug, PartialEq)]
pub enum InverseStep {
    /// `κ₋₁⁻¹ SL(κ₋₁, α₋₁ | α₋₁ρ)`.
    Lattice(ScaledLattice),
    /// Integer κ: the lattice degenerates into a trigonal lattice.
    Trigonal,
}

/// Ψ⁻¹: split every corridor into unit strips; the result is the lattice one level down.
pub fn psi_inverse(p: &LatticeParams) -> Result<InverseStep> {
    let Some((k, a)) = psi_inverse_params(&p.kappa, &p.alpha)? else {
        return Ok(InverseStep::Trigonal);
    };
    let rho = [&p.rho[0] * &a, &p.rho[1] * &a, &p.rho[2] * &a];
    let scale = k.recip()?;
    let params = match p.family {
        Family::Irrational => LatticeParams::mechanical_unchecked(k, a, rho, p.modes)?,
        _ => return Err(Error::UnhandledShape),
    };
    Ok(InverseStep::Lattice(ScaledLattice { scale, params, tag: Tag::Regular }))
}

/// Insertion points `(κ − ⌊κ⌋ − 1)/2 + n`, `n = 1..⌊κ⌋`, of a corridor `[0, κ]`.
pub fn insertion_points(width: &QuadReal) -> Vec<QuadReal> {
    let fl = width.floor();
    let base = (&(width - &QuadReal::from_bigint(fl.clone())) - &QuadReal::one()).scale(&rat(1, 2));
    let m = fl.to_i64().unwrap_or(0);
    (1..=m).map(|n| &base + &QuadReal::int(n)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expansion {
    pub lambda: QuadReal,
    pub matrix: [[BigInt; 2]; 2],
    pub norm: i32,
}

/// Dominant eigenvalue of `M(α) = ∏ [[0,1],[1,d_j]]` for a purely periodic α.
pub fn expansion_constant(alpha: &QuadReal) -> Result<Expansion> {
    if alpha.is_rational() || alpha.signum() <= 0 || *alpha >= QuadReal::one() {
        return Err(Error::NotPurelyPeriodic);
    }
    let cf = cf_expand(alpha, CfKind::Regular)?;
    if cf.preperiod != [0] || cf.period.is_empty() {
        return Err(Error::NotPurelyPeriodic);
    }
    let m = convergent_matrix(CfKind::Regular, &cf.period);
    let tr = &m[0][0] + &m[1][1];
    let det = &m[0][0] * &m[1][1] - &m[0][1] * &m[1][0];
    let disc = &tr * &tr - BigInt::from(4) * &det;
    let disc = disc.to_u64().ok_or(Error::Domain("discriminant too large".into()))?;
    let tr = tr.to_i64().ok_or(Error::Domain("trace too large".into()))?;
    let lambda = (&QuadReal::int(tr) + &QuadReal::sqrt(disc)).scale(&rat(1, 2));
    let norm = if det == BigInt::one() { 1 } else { -1 };
    Ok(Expansion { lambda, matrix: m, norm })
}

/// Fundamental lattice of an expansion constant `λ > 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct Fundamental {
    pub h: i64,
    pub norm: i32,
    /// Standard parameters of the lattice.
    pub params: LatticeParams,
    /// Starred parameters `(λ, 1/λ)` when `N(λ) = +1`.
    pub star: Option<StarParams>,
}

/// `λ² − hλ − 1 = 0` ↦ `(λ, 1/λ)`; `λ² − hλ + 1 = 0` ↦ starred `(λ, 1/λ)`.
pub fn fundamental_lattice(lambda: &QuadReal) -> Result<Fundamental> {
    if lambda.is_rational() || *lambda <= QuadReal::one() {
        return Err(Error::NotAUnit);
    }
    let tr = lambda.trace();
    let n = lambda.norm();
    if !tr.is_integer() || !(n == rat(1, 1) || n == rat(-1, 1)) {
        return Err(Error::NotAUnit);
    }
    let h = tr.to_integer().to_i64().ok_or(Error::NotAUnit)?;
    let inv = lambda.recip()?;
    let zero = || [QuadReal::zero(), QuadReal::zero(), QuadReal::zero()];
    if n == rat(-1, 1) {
        let params = LatticeParams::irrational(lambda.clone(), inv, zero())?;
        Ok(Fundamental { h, norm: -1, params, star: None })
    } else {
        let star = StarParams { kappa: lambda.clone(), alpha: inv, rho: zero() };
        Ok(Fundamental { h, norm: 1, params: star.to_params()?, star: Some(star) })
    }
}

/// Lines `f(n·i)`: `SL(nκ + ⌊nα⌋, nα − ⌊nα⌋)`.
pub fn sublattice(p: &LatticeParams, n: i64) -> Result<LatticeParams> {
    if n < 1 {
        return Err(Error::Domain("sub-lattice step must be positive".into()));
    }
    if n == 1 {
        return Ok(p.clone());
    }
    let na = &p.alpha * &QuadReal::int(n);
    let fl = na.floor();
    let k = &(&p.kappa * &QuadReal::int(n)) + &QuadReal::from_bigint(fl.clone());
    let a = &na - &QuadReal::from_bigint(fl.clone());
    if let (Family::Irrational, false) = (&p.family, a.is_zero()) {
        // ⌊i·nα + ρ⌋ = i⌊nα⌋ + ⌊i·α' + ρ⌋, so the sub-lattice is mechanical again
        return LatticeParams::mechanical_unchecked(k, a, p.rho.clone(), p.modes);
    }
    let shift = -fl.to_i64().ok_or(Error::Domain("slope too large".into()))?;
    let lines = p.lines.clone().map(|o| Offset::Affine { inner: Box::new(o), step: n, shift });
    Ok(LatticeParams { kappa: k, alpha: a, rho: p.rho.clone(), modes: p.modes, family: Family::Explicit, lines })
}

/// Outcome of comparing midpoints with a super lattice.
#[derive(Clone, Debug, PartialEq)]
pub enum PsiCheck {
    Ok,
    Mismatch { dir: Dir, expected: Vec<QuadReal>, found: Vec<QuadReal> },
}

impl PsiCheck {
    pub fn is_ok(&self) -> bool {
        matches!(self, PsiCheck::Ok)
    }
}

/// Middle lines `(f(m) + f(m+1))/2` of corridors whose letter is `letter`, `m ∈ [−W, W)`.
pub fn midpoints(p: &LatticeParams, dir: Dir, window: i64, letter: u8) -> Result<Vec<QuadReal>> {
    let passage = p.passage(dir)?;
    let mut out = Vec::new();
    for m in -window..window {
        let w = p.width(dir, m);
        let l = &w - &passage;
        if l == QuadReal::int(letter as i64) {
            out.push((&p.line_coord(dir, m) + &p.line_coord(dir, m + 1)).scale(&rat(1, 2)));
        }
    }
    Ok(out)
}

fn compare_sets(
    dir: Dir,
    lo: &QuadReal,
    hi: &QuadReal,
    mut found: Vec<QuadReal>,
    coord: impl Fn(i64) -> QuadReal,
    span: i64,
) -> PsiCheck {
    let mut expected: Vec<QuadReal> = (-span..=span).map(coord).filter(|x| x > lo && x < hi).collect();
    let key = |x: &QuadReal, y: &QuadReal| x.partial_cmp(y).expect("same field");
    expected.sort_by(key);
    found.sort_by(key);
    if expected == found {
        PsiCheck::Ok
    } else {
        PsiCheck::Mismatch { dir, expected, found }
    }
}

/// Check that `Ψ(p)` reproduces the middle lines of wider corridors, exactly.
pub fn verify_psi(p: &LatticeParams, window: i64) -> Result<PsiCheck> {
    verify_psi_with_branch(p, window, RationalBranch::SlopeZero)
}

pub fn verify_psi_with_branch(p: &LatticeParams, window: i64, branch: RationalBranch) -> Result<PsiCheck> {
    let s = psi_with_branch(p, branch)?;
    for d in Dir::ALL {
        let found = midpoints(p, d, window, 1)?;
        let lo = p.line_coord(d, -window);
        let hi = p.line_coord(d, window);
        let r = compare_sets(d, &lo, &hi, found, |n| s.coord(d, n), window + 2);
        if !r.is_ok() {
            return Ok(r);
        }
    }
    Ok(PsiCheck::Ok)
}

/// Check that `Ψ*` reproduces the middle lines of narrower corridors.
pub fn verify_psi_star(p: &StarParams, window: i64) -> Result<PsiCheck> {
    let lat = p.to_params()?;
    let (scale, next) = psi_star(p)?;
    for d in Dir::ALL {
        let found = midpoints(&lat, d, window, 0)?;
        let lo = lat.line_coord(d, -window);
        let hi = lat.line_coord(d, window);
        let r = compare_sets(d, &lo, &hi, found, |n| &scale * &next.line_coord(d, n), window + 2);
        if !r.is_ok() {
            return Ok(r);
        }
    }
    Ok(PsiCheck::Ok)
}

/// `|f̄₁(n) − F(n)|` for the n-th wider-corridor midpoint, `f̄₁(n) = −(κ+α)(n+ρ)/α + ρ`.
pub fn cutting_error(p: &LatticeParams, dir: Dir, n: i64) -> Result<QuadReal> {
    let s = psi(p)?;
    let rho = &p.rho[dir.index()];
    let kpa = &p.kappa + &p.alpha;
    let fbar = &(&-&(&kpa * &(&QuadReal::int(n) + rho)) / &p.alpha) + rho;
    Ok((&fbar - &s.coord(dir, n)).abs())
}

/// Parameter orbit `(κ_i, α_i, scale_i)` for `i = 0..=level` (accumulated scale).
pub fn orbit(p: &LatticeParams, level: usize) -> Result<Vec<(QuadReal, QuadReal, QuadReal)>> {
    let mut out = vec![(p.kappa.clone(), p.alpha.clone(), QuadReal::one())];
    let mut cur = p.clone();
    let mut scale = QuadReal::one();
    for _ in 0..level {
        let s = psi(&cur)?;
        scale = &scale * &s.scale;
        cur = s.params;
        out.push((cur.kappa.clone(), cur.alpha.clone(), scale.clone()));
    }
    Ok(out)
}

/// Parameters `(κ, α)` fixed by `Ψᵏ`: `α = [d₁…d_k]`, `κ = [d_k; d_{k−1}, …, d₁, d_k, …]`.
pub fn self_similar_params(period: &[i64]) -> Result<(QuadReal, QuadReal)> {
    use crate::qfield::{cf_eval, ContinuedFraction};
    let alpha = cf_eval(&ContinuedFraction {
        kind: CfKind::Regular,
        preperiod: vec![0],
        period: period.to_vec(),
        radicand: None,
    })?
    .value;
    // κ = d_k + [0; d_{k−1}, …, d₁, d_k, …]
    let k = period.len();
    let rotated: Vec<i64> = (0..k).map(|j| period[(2 * k - 2 - j) % k]).collect();
    let tail = cf_eval(&ContinuedFraction {
        kind: CfKind::Regular,
        preperiod: vec![0],
        period: rotated,
        radicand: None,
    })?
    .value;
    let kappa = &QuadReal::int(period[k - 1]) + &tail;
    Ok((kappa, alpha))
}

