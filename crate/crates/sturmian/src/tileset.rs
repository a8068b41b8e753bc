//! Aperiodic tile sets from cabinet cells: tile classes, upper bound rectangles,
//! rectangular patches, patch-tile catalogs and window tilings.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::bd::Ubr;
use crate::error::{Error, Result};
use crate::qfield::{rat, rat_int, QuadReal, Rat};
use crate::words::FiniteWord;

/// `(u, v)` with `α² + uα + v = 0`.
pub fn minimal_poly(alpha: &QuadReal) -> Result<(Rat, Rat)> {
    if alpha.is_rational() {
        return Err(Error::RationalInput);
    }
    let a = alpha.a().clone();
    let b = alpha.b().clone();
    let u = -(&a + &a);
    let v = &a * &a - &b * &b * rat_int(alpha.d() as i64);
    debug_assert!({
        let f = &(&(alpha * alpha) + &(alpha * &QuadReal::from_rat(u.clone()))) + &QuadReal::from_rat(v.clone());
        f.is_zero()
    });
    Ok((u, v))
}

/// `xS + yM + zL`, i.e. the class `[x : 2y : z]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TileClass {
    pub x: i64,
    pub y: i64,
    pub z: i64,
}

impl TileClass {
    pub const S: TileClass = TileClass { x: 1, y: 0, z: 0 };
    pub const M: TileClass = TileClass { x: 0, y: 1, z: 0 };
    pub const L: TileClass = TileClass { x: 0, y: 0, z: 1 };

    pub fn new(x: i64, y: i64, z: i64) -> Result<Self> {
        if x < 0 || y < 0 || z < 0 || (x, y, z) == (0, 0, 0) {
            return Err(Error::Domain("tile class needs nonnegative, nonzero counts".into()));
        }
        Ok(TileClass { x, y, z })
    }

    /// Divide out the common factor.
    pub fn reduced(self) -> Self {
        let g = self.x.gcd(&self.y).gcd(&self.z).max(1);
        TileClass { x: self.x / g, y: self.y / g, z: self.z / g }
    }

    pub fn add(self, o: TileClass) -> TileClass {
        TileClass { x: self.x + o.x, y: self.y + o.y, z: self.z + o.z }
    }

    pub fn scaled(self, k: i64) -> TileClass {
        TileClass { x: self.x * k, y: self.y * k, z: self.z * k }
    }

    /// Projective coordinates `[x : 2y : z]`.
    pub fn coords(&self) -> [i64; 3] {
        [self.x, 2 * self.y, self.z]
    }

    /// Normalized so that `x + 2y + z = 1`.
    pub fn normalized(&self) -> [Rat; 3] {
        let s = self.x + 2 * self.y + self.z;
        [rat(self.x, s), rat(2 * self.y, s), rat(self.z, s)]
    }
}

impl fmt::Display for TileClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (n, s) in [(self.x, "S"), (self.y, "M"), (self.z, "L")] {
            match n {
                0 => {}
                1 => parts.push(s.to_string()),
                _ => parts.push(format!("{n}{s}")),
            }
        }
        write!(f, "{}", parts.join(" + "))
    }
}

/// `n(α) = (v, u/2 + v, u + v + 1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalVec {
    pub n1: Rat,
    pub n2: Rat,
    pub n3: Rat,
}

impl NormalVec {
    pub fn new(u: &Rat, v: &Rat) -> Self {
        NormalVec { n1: v.clone(), n2: u / rat_int(2) + v, n3: u + v + rat_int(1) }
    }

    pub fn dot(&self, t: &TileClass) -> Rat {
        let c = t.coords();
        &self.n1 * rat_int(c[0]) + &self.n2 * rat_int(c[1]) + &self.n3 * rat_int(c[2])
    }
}

/// `φ(xS + yM + zL) = xv + y(u + 2v) + z(u + v + 1)`.
pub fn phi(u: &Rat, v: &Rat, t: &TileClass) -> Rat {
    NormalVec::new(u, v).dot(t)
}

/// `(φ(S), φ(M), φ(L))`.
pub fn phi_cells(u: &Rat, v: &Rat) -> [Rat; 3] {
    [phi(u, v, &TileClass::S), phi(u, v, &TileClass::M), phi(u, v, &TileClass::L)]
}

fn rat_to_i64(r: &Rat) -> Result<i64> {
    if !r.is_integer() {
        return Err(Error::NotQuadratic);
    }
    r.to_integer().to_i64().ok_or(Error::NotQuadratic)
}

fn int_ratio(a: &Rat, b: &Rat) -> Result<(i64, i64)> {
    // smallest positive integers (m, n) with m·a = n·b
    let q = a / b;
    Ok((rat_to_i64(&Rat::from_integer(q.denom().clone()))?, rat_to_i64(&Rat::from_integer(q.numer().clone()))?))
}

/// Two proper classes `{T₁, T₂}` spanning a segment through `𝒯_C(α)`.
pub fn choose_tile_classes(u: &Rat, v: &Rat) -> Result<(TileClass, TileClass)> {
    let ph = phi_cells(u, v);
    if ph[0].is_zero() || ph[2].is_zero() {
        return Err(Error::NotQuadratic);
    }
    let cells = [TileClass::S, TileClass::M, TileClass::L];
    // A positive, B negative; prefer the pair {S, L}
    let (ia, ib, ic) = if ph[0].is_positive() != ph[2].is_positive() {
        if ph[2].is_positive() {
            (2, 0, 1)
        } else {
            (0, 2, 1)
        }
    } else if ph[1].is_positive() != ph[0].is_positive() && !ph[1].is_zero() {
        if ph[1].is_positive() {
            (1, 0, 2)
        } else {
            (0, 1, 2)
        }
    } else {
        return Err(Error::NotQuadratic);
    };
    let a = ph[ia].clone();
    let b = -ph[ib].clone();
    // T₁ = bA + aB, scaled to integers
    // (b, a) ∝ (m, n)
    let (m, n) = int_ratio(&a, &b)?;
    let t1 = cells[ia].scaled(m).add(cells[ib].scaled(n)).reduced();
    let c = ph[ic].clone();
    let t2 = if c.is_zero() {
        cells[ic]
    } else if c.is_positive() {
        // cB + bC
        let (m2, n2) = int_ratio(&c, &b)?;
        cells[ib].scaled(n2).add(cells[ic].scaled(m2)).reduced()
    } else {
        // cA + aC with c = −φ(C)
        let (m2, n2) = int_ratio(&-c, &a)?;
        cells[ia].scaled(n2).add(cells[ic].scaled(m2)).reduced()
    };
    debug_assert!(phi(u, v, &t1).is_zero() && phi(u, v, &t2).is_zero());
    Ok((t1, t2))
}

/// `𝒯_C(α) = ((1−α)², 2α(1−α), α²)`.
pub fn cabinet_point(alpha: &QuadReal) -> [QuadReal; 3] {
    let one = QuadReal::one();
    let b = &one - alpha;
    [&b * &b, &(&QuadReal::int(2) * alpha) * &b, alpha * alpha]
}

/// Densities `(δ₁, δ₂)` with `δ₁T₁ + δ₂T₂ = 𝒯_C(α)` componentwise in `[x : 2y : z]`.
pub fn density_solve(t1: &TileClass, t2: &TileClass, alpha: &QuadReal) -> Result<(QuadReal, QuadReal)> {
    let a = t1.coords();
    let b = t2.coords();
    let rhs = cabinet_point(alpha);
    // pick two rows with nonzero determinant
    for (r, s) in [(0usize, 2usize), (0, 1), (1, 2)] {
        let det = a[r] * b[s] - a[s] * b[r];
        if det == 0 {
            continue;
        }
        let det = QuadReal::int(det);
        let d1 = &(&(&rhs[r] * &QuadReal::int(b[s])) - &(&rhs[s] * &QuadReal::int(b[r]))) / &det;
        let d2 = &(&(&rhs[s] * &QuadReal::int(a[r])) - &(&rhs[r] * &QuadReal::int(a[s]))) / &det;
        for row in 0..3 {
            let lhs = &(&d1 * &QuadReal::int(a[row])) + &(&d2 * &QuadReal::int(b[row]));
            if lhs != rhs[row] {
                return Err(Error::DegenerateSystem);
            }
        }
        return Ok((d1, d2));
    }
    Err(Error::DegenerateSystem)
}

/// The four tile-set shapes of the construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Shape {
    /// `{xS + zL, M}`
    SL { x: i64, z: i64 },
    /// `{x'S + yM, x''S + zL}`
    SplitS { x1: i64, y: i64, x2: i64, z: i64 },
    /// `{xS + y'M, y''M + zL}`
    SplitM { x: i64, y1: i64, y2: i64, z: i64 },
    /// `{xS + z'L, yM + z''L}`
    SplitL { x: i64, z1: i64, y: i64, z2: i64 },
}

fn shape_of(t1: &TileClass, t2: &TileClass) -> Result<(Shape, bool)> {
    let f = |a: &TileClass, b: &TileClass| -> Option<Shape> {
        match (a, b) {
            (TileClass { x, y: 0, z }, TileClass { x: 0, y: 1, z: 0 }) if *x > 0 && *z > 0 => Some(Shape::SL { x: *x, z: *z }),
            (TileClass { x: x1, y, z: 0 }, TileClass { x: x2, y: 0, z }) if *x1 > 0 && *y > 0 && *x2 > 0 && *z > 0 => {
                Some(Shape::SplitS { x1: *x1, y: *y, x2: *x2, z: *z })
            }
            (TileClass { x, y: y1, z: 0 }, TileClass { x: 0, y: y2, z }) if *x > 0 && *y1 > 0 && *y2 > 0 && *z > 0 => {
                Some(Shape::SplitM { x: *x, y1: *y1, y2: *y2, z: *z })
            }
            (TileClass { x, y: 0, z: z1 }, TileClass { x: 0, y, z: z2 }) if *x > 0 && *z1 > 0 && *y > 0 && *z2 > 0 => {
                Some(Shape::SplitL { x: *x, z1: *z1, y: *y, z2: *z2 })
            }
            _ => None,
        }
    };
    if let Some(s) = f(t1, t2) {
        return Ok((s, false));
    }
    if let Some(s) = f(t2, t1) {
        return Ok((s, true));
    }
    Err(Error::UnhandledShape)
}

fn q(n: i64) -> QuadReal {
    QuadReal::int(n)
}

fn inv(x: &QuadReal) -> QuadReal {
    x.recip().expect("nonzero")
}

/// Upper bound rectangles per tile class, in the order `(T₁, T₂)`.
pub fn compute_ubr(t1: &TileClass, t2: &TileClass, alpha: &QuadReal) -> Result<[(TileClass, Ubr); 2]> {
    let (shape, swapped) = shape_of(t1, t2)?;
    let one = QuadReal::one();
    let ia = inv(alpha);
    let ib = inv(&(&one - alpha));
    let half = QuadReal::frac(1, 2);
    let zero = QuadReal::zero();
    let (h1, h2) = match shape {
        Shape::SL { x, z } => (Ubr::new(&q(x) * &ib, &q(z) * &ia), Ubr::new(zero.clone(), zero)),
        Shape::SplitS { y, x2, z, .. } => {
            if *alpha >= half {
                return Err(Error::UnhandledShape);
            }
            (
                Ubr::new(&ib + &(&q(y) * &ia), zero),
                Ubr::new(&ib + &(&q(z) * &ia), &q(x2) * &ib),
            )
        }
        Shape::SplitM { x, z, .. } => {
            if *alpha >= half {
                return Err(Error::UnhandledShape);
            }
            let a2 = alpha * alpha;
            (
                Ubr::new(&ia + &(&q(x) * &ib), zero),
                Ubr::new(&ia + &(&(&q(z) * &(&one - alpha)) / &a2), &q(z) * &ia),
            )
        }
        Shape::SplitL { x, z1, y, z2 } => {
            // L = L' ∨ L'' row by row, UBR □(0, 1/α); S against L' by a cross correspondence
            let hl = Ubr::new(zero.clone(), ia.clone());
            let (_, d2) = density_solve(&TileClass { x, y: 0, z: z1 }, &TileClass { x: 0, y, z: z2 }, alpha)?;
            let h1 = crate::bd::ubr_add(&hl, &Ubr::new(&q(z1) * &ia, &q(x) * &ib));
            // M and L'' coincide as lattices exactly when y = z'' = 1 and α/δ'' = 1/(1−α)
            if !(y == 1 && z2 == 1 && &(alpha / &d2) == &ib) {
                return Err(Error::UnhandledShape);
            }
            (h1, hl)
        }
    };
    Ok(if swapped { [(*t1, h2), (*t2, h1)] } else { [(*t1, h1), (*t2, h2)] })
}

/// `R₁ × R₂ = ⌈r₁ + 1⌉ × ⌈r₂ + 1⌉`.
pub fn patch_size(h: &Ubr) -> (i64, i64) {
    ((&h.w + &QuadReal::one()).ceil_i64(), (&h.h + &QuadReal::one()).ceil_i64())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    /// Some class has `φ ≠ 0`.
    NotOrthogonal { class: TileClass, phi: Rat },
    /// The span meets the cabinet curve at these slopes (none of them `α`, or a rational one).
    Slopes(Vec<QuadReal>),
    /// Three or more independent classes cut out an arc.
    Arc,
    Degenerate,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Properness {
    pub proper: bool,
    /// Slopes `β ∈ [0,1]` where the segment meets `𝒯_C`.
    pub slopes: Vec<QuadReal>,
    pub witness: Option<Witness>,
}

fn cross3(a: [i64; 3], b: [i64; 3]) -> [i64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

/// Roots in `[0,1]` of `n·((1−β)², 2β(1−β), β²) = 0`.
fn curve_roots(n: [i64; 3]) -> Vec<QuadReal> {
    // (n1 − 2n2 + n3)β² + 2(n2 − n1)β + n1
    let a = n[0] - 2 * n[1] + n[2];
    let b = 2 * (n[1] - n[0]);
    let c = n[0];
    let mut out = Vec::new();
    if a == 0 {
        if b != 0 {
            out.push(QuadReal::frac(-c, b));
        }
    } else {
        let disc = b * b - 4 * a * c;
        if disc >= 0 {
            let s = QuadReal::sqrt(disc as u64);
            for sg in [-1, 1] {
                let r = &(&QuadReal::int(-b) + &(&QuadReal::int(sg) * &s)) / &QuadReal::int(2 * a);
                if !out.contains(&r) {
                    out.push(r);
                }
            }
        }
    }
    out.retain(|r| r.signum() >= 0 && *r <= QuadReal::one());
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    out
}

fn on_segment(t1: &TileClass, t2: &TileClass, beta: &QuadReal) -> bool {
    // 𝒯_C(β) = (1−s)·T̂₁ + s·T̂₂ with s ∈ [0,1], using normalized coordinates
    let p = cabinet_point(beta);
    let a = t1.normalized();
    let b = t2.normalized();
    for i in 0..3 {
        let di = &b[i] - &a[i];
        if !di.is_zero() {
            let s = &(&p[i] - &QuadReal::from_rat(a[i].clone())) / &QuadReal::from_rat(di);
            return s.signum() >= 0 && s <= QuadReal::one();
        }
    }
    false
}

fn rank3(v: &[[i64; 3]]) -> usize {
    if v.iter().all(|r| *r == [0, 0, 0]) {
        return 0;
    }
    for a in v {
        for b in v {
            let n = cross3(*a, *b);
            if n != [0, 0, 0] {
                if v.iter().any(|c| n[0] * c[0] + n[1] * c[1] + n[2] * c[2] != 0) {
                    return 3;
                }
                return 2;
            }
        }
    }
    1
}

/// Certify `φ(T₁) = φ(T₂) = 0` and that the segment meets `𝒯_C` only at `α` (and its conjugate).
pub fn verify_properness(tiles: &[TileClass], u: &Rat, v: &Rat) -> Properness {
    let coords: Vec<[i64; 3]> = tiles.iter().map(|t| t.coords()).collect();
    if rank3(&coords) >= 3 {
        // the span is a 2-dimensional region of Δ: it contains an arc of 𝒯_C
        return Properness { proper: false, slopes: vec![], witness: Some(Witness::Arc) };
    }
    for t in tiles {
        let f = phi(u, v, t);
        if !f.is_zero() {
            return Properness { proper: false, slopes: vec![], witness: Some(Witness::NotOrthogonal { class: *t, phi: f }) };
        }
    }
    // extreme classes of the segment, ordered by the first non-constant coordinate
    let norm: Vec<[Rat; 3]> = tiles.iter().map(|t| t.normalized()).collect();
    let best = (0..3).find(|&i| norm.iter().any(|n| n[i] != norm[0][i])).map(|i| {
        let lo = (0..tiles.len()).min_by(|&p, &q| norm[p][i].cmp(&norm[q][i])).unwrap();
        let hi = (0..tiles.len()).max_by(|&p, &q| norm[p][i].cmp(&norm[q][i])).unwrap();
        (tiles[lo], tiles[hi])
    });
    let Some((t1, t2)) = best else {
        return Properness { proper: false, slopes: vec![], witness: Some(Witness::Degenerate) };
    };
    let n = cross3(t1.coords(), t2.coords());
    let slopes: Vec<QuadReal> = curve_roots(n).into_iter().filter(|b| on_segment(&t1, &t2, b)).collect();
    let bad = slopes.is_empty() || slopes.iter().any(|s| s.is_rational());
    Properness { proper: !bad, witness: if bad { Some(Witness::Slopes(slopes.clone())) } else { None }, slopes }
}

// ---------------------------------------------------------------------------
// Cabinet cells

/// Rectangular cell type from the pair `(b_j, c_k)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Kind {
    S,
    M,
    L,
}

impl Kind {
    pub fn of(b: u8, c: u8) -> Kind {
        match (b, c) {
            (0, 0) => Kind::S,
            (1, 1) => Kind::L,
            _ => Kind::M,
        }
    }
}

/// Whole cell, or the half below (`Lo`) / above (`Hi`) its main diagonal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Part {
    Full,
    Lo,
    Hi,
}

impl Part {
    fn swap(self) -> Part {
        match self {
            Part::Full => Part::Full,
            Part::Lo => Part::Hi,
            Part::Hi => Part::Lo,
        }
    }
}

fn frac_of(x: &QuadReal) -> QuadReal {
    x.fract()
}

/// Exact cabinet data for a square index range `[lo, hi)²`.
///
/// Columns carry `b_j = ⌊(j+1)α+ρ₁⌋ − ⌊jα+ρ₁⌋`, rows `c_k` likewise with `ρ₂`,
/// and the SAB of cell `(j,k)` is the line `a(−j−k−1)` with `ρ₀ = −ρ₁−ρ₂`.
#[derive(Clone, Debug)]
pub struct Cabinet {
    pub alpha: QuadReal,
    pub rho: (QuadReal, QuadReal),
    pub lo: i64,
    pub hi: i64,
    fx: Vec<i64>,
    fy: Vec<i64>,
    fd: Vec<i64>,
}

impl Cabinet {
    pub fn new(alpha: &QuadReal, rho: (QuadReal, QuadReal), lo: i64, hi: i64) -> Result<Self> {
        if alpha.is_rational() {
            return Err(Error::RationalSlope);
        }
        if hi <= lo {
            return Err(Error::Domain("empty cabinet range".into()));
        }
        let fl = |n: i64, r: &QuadReal| (&(alpha * &QuadReal::int(n)) + r).floor_i64();
        // one extra index on each side for the words
        let fx = (lo - 1..=hi + 1).map(|j| fl(j, &rho.0)).collect();
        let fy = (lo - 1..=hi + 1).map(|k| fl(k, &rho.1)).collect();
        let s = &rho.0 + &rho.1;
        let fd = (2 * lo - 2..=2 * hi + 2).map(|d| fl(d, &s)).collect();
        Ok(Cabinet { alpha: alpha.clone(), rho, lo, hi, fx, fy, fd })
    }

    fn in_range(&self, n: i64) -> bool {
        n >= self.lo - 1 && n <= self.hi
    }

    /// `⌊nα + ρ₁⌋`
    fn flx(&self, n: i64) -> i64 {
        self.fx[(n - self.lo + 1) as usize]
    }

    fn fly(&self, n: i64) -> i64 {
        self.fy[(n - self.lo + 1) as usize]
    }

    pub fn b(&self, j: i64) -> u8 {
        debug_assert!(self.in_range(j));
        (self.flx(j + 1) - self.flx(j)) as u8
    }

    pub fn c(&self, k: i64) -> u8 {
        debug_assert!(self.in_range(k));
        (self.fly(k + 1) - self.fly(k)) as u8
    }

    pub fn kind(&self, j: i64, k: i64) -> Kind {
        Kind::of(self.b(j), self.c(k))
    }

    /// `2τ ∈ {−1, 0, 1}`: offset of the SAB from the cell's anti-diagonal, in cell units.
    pub fn tau2(&self, j: i64, k: i64) -> i8 {
        let d = self.fd[(j + k + 1 - 2 * self.lo + 2) as usize];
        let sum2: i8 = if d == self.flx(j + 1) + self.fly(k) { 1 } else { -1 };
        -sum2 - (self.c(k) as i8 - self.b(j) as i8)
    }

    /// Exact SAB value `x + y` of cell `(j,k)` (with κ = 1) from the recorded offset.
    pub fn sab_from_tau(&self, j: i64, k: i64, tau2: i8) -> QuadReal {
        let mid = QuadReal::from_rat(
            rat_int(2 * (j + k + 1)) / rat_int(2)
                + Rat::new((self.flx(j) + self.flx(j + 1) + self.fly(k) + self.fly(k + 1)).into(), 2.into())
                + rat_int(1),
        );
        &mid + &QuadReal::frac(tau2 as i64, 2)
    }
}

/// Exact line values of the lattice SL(1, α | −ρ₁−ρ₂, ρ₁, ρ₂): the SAB through cell `(j,k)` is `x + y = −a(−j−k−1)`.
pub fn sab_line(alpha: &QuadReal, rho: &(QuadReal, QuadReal), j: i64, k: i64) -> Result<QuadReal> {
    let r0 = -(&rho.0 + &rho.1);
    let p = crate::lattice::LatticeParams::irrational(QuadReal::one(), alpha.clone(), [r0, rho.0.clone(), rho.1.clone()])?;
    Ok(-p.line_coord(crate::lattice::Dir::A, -j - k - 1))
}

// ---------------------------------------------------------------------------
// Rectangular patches

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct RectPatch {
    /// `b_{−R₁}, …, b_{−1}`
    pub b: Vec<u8>,
    /// `c_{−R₂}, …, c_{−1}`
    pub c: Vec<u8>,
    /// `2τ` of each cell, row-major from `(−R₁, −R₂)`.
    pub sab: Vec<i8>,
}

#[derive(Clone, Debug)]
pub struct PatchRep {
    pub rho: (QuadReal, QuadReal),
    pub patch: RectPatch,
}

fn unit_breaks(alpha: &QuadReal, idx: impl Iterator<Item = i64>) -> Vec<QuadReal> {
    let mut v: Vec<QuadReal> = idx.map(|j| frac_of(&(alpha * &QuadReal::int(j)))).collect();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v
}

/// One exact interior point per 2-cell of the torus arrangement, with its patch.
pub fn enumerate_rect_patches(alpha: &QuadReal, r1: i64, r2: i64) -> Result<Vec<PatchRep>> {
    if alpha.is_rational() {
        return Err(Error::RationalSlope);
    }
    if r1 < 1 || r2 < 1 {
        return Err(Error::Domain("patch sizes must be positive".into()));
    }
    let xs = unit_breaks(alpha, 0..=r1);
    let ys = unit_breaks(alpha, 0..=r2);
    let obl = unit_breaks(alpha, 1..r1 + r2);
    for w in [&xs, &ys] {
        if w.windows(2).any(|p| p[0] == p[1]) {
            return Err(Error::RationalSlope);
        }
    }
    let one = QuadReal::one();
    let intervals = |v: &Vec<QuadReal>| -> Vec<(QuadReal, QuadReal)> {
        let mut out: Vec<(QuadReal, QuadReal)> = v.windows(2).map(|p| (p[0].clone(), p[1].clone())).collect();
        out.push((v[v.len() - 1].clone(), &v[0] + &one));
        out
    };
    let mut reps = Vec::new();
    for (x0, x1) in intervals(&xs) {
        for (y0, y1) in intervals(&ys) {
            let s0 = &x0 + &y0;
            let s1 = &x1 + &y1;
            let mut cuts = vec![s0.clone()];
            let lo_n = s0.floor_i64() - 1;
            let hi_n = s1.ceil_i64() + 1;
            let mut inner = Vec::new();
            for o in &obl {
                for n in lo_n..=hi_n {
                    let t = o + &QuadReal::int(n);
                    if t > s0 && t < s1 {
                        inner.push(t);
                    }
                }
            }
            inner.sort_by(|a, b| a.partial_cmp(b).unwrap());
            inner.dedup();
            cuts.extend(inner);
            cuts.push(s1.clone());
            let span = &s1 - &s0;
            for w in cuts.windows(2) {
                let s = &(&w[0] + &w[1]) / &QuadReal::int(2);
                let lam = &(&s - &s0) / &span;
                let r1v = &x0 + &(&(&x1 - &x0) * &lam);
                let r2v = &y0 + &(&(&y1 - &y0) * &lam);
                let rho = (r1v, r2v);
                let cab = Cabinet::new(alpha, rho.clone(), -r1.max(r2) - 1, 1)?;
                let patch = RectPatch {
                    b: (-r1..0).map(|j| cab.b(j)).collect(),
                    c: (-r2..0).map(|k| cab.c(k)).collect(),
                    sab: (-r2..0).flat_map(|k| (-r1..0).map(move |j| (j, k))).map(|(j, k)| cab.tau2(j, k)).collect(),
                };
                reps.push(PatchRep { rho, patch });
            }
        }
    }
    Ok(reps)
}

/// `(R₁ + R₂)(R₁ + R₂ + 1)`
pub fn rect_patch_count(r1: i64, r2: i64) -> i64 {
    (r1 + r2) * (r1 + r2 + 1)
}

// ---------------------------------------------------------------------------
// Factor language and support words

/// All factors of length `n` of the lower mechanical words of slope `α`.
pub fn factors(alpha: &QuadReal, n: usize) -> BTreeSet<Vec<u8>> {
    let br = unit_breaks(alpha, -(n as i64)..=0);
    let one = QuadReal::one();
    let mut out = BTreeSet::new();
    for i in 0..br.len() {
        let a = &br[i];
        let b = if i + 1 < br.len() { br[i + 1].clone() } else { &br[0] + &one };
        let rho = &(a + &b) / &QuadReal::int(2);
        let w: Vec<u8> = (0..n as i64)
            .map(|j| {
                let f = |m: i64| (&(alpha * &QuadReal::int(m)) + &rho).floor_i64();
                (f(j + 1) - f(j)) as u8
            })
            .collect();
        out.insert(w);
    }
    out
}

/// Marked pairs `(u, v)` for `xS + zL`: `|u|₀ = x` with one `1̇` and no unmarked 1 at either end,
/// `|v|₁ = z` with one `0̇` and no unmarked 0 at either end, both factors of slope `α`,
/// `|u| ≤ ⌈w+1⌉` and `|v| ≤ ⌈h+1⌉`.
pub fn support_words(alpha: &QuadReal, class: &TileClass, ubr: &Ubr) -> Vec<(FiniteWord, FiniteWord)> {
    let (lu, lv) = patch_size(ubr);
    let us = marked_words(alpha, class.x as usize, 0, 1, lu as usize);
    let vs = marked_words(alpha, class.z as usize, 1, 0, lv as usize);
    let mut out = Vec::new();
    for u in &us {
        for v in &vs {
            out.push((u.clone(), v.clone()));
        }
    }
    out
}

fn marked_words(alpha: &QuadReal, count: usize, letter: u8, mark: u8, max_len: usize) -> Vec<FiniteWord> {
    let mut out = Vec::new();
    for n in 1..=max_len {
        for w in factors(alpha, n) {
            if w.iter().filter(|&&l| l == letter).count() != count {
                continue;
            }
            for m in 0..n {
                if w[m] != mark {
                    continue;
                }
                let end_ok = |i: usize| w[i] == letter || i == m;
                if !end_ok(0) || !end_ok(n - 1) {
                    continue;
                }
                out.push(FiniteWord { letters: w.clone(), marks: vec![m] });
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Layouts: which cells form which patch-tile

/// How cells are grouped into patch-tiles.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Layout {
    /// `{xS + zL, M}` on whole cells: rows of `x` S's crossed with columns of `z` L's.
    Whole { x: i64, z: i64 },
    /// `{xS + zL, M + L}` on halves (`α > 1/2`): each M takes the L next to it, the remaining
    /// L rows are crossed with columns of S.
    PairedL { x: i64, z: i64 },
    /// `{gS + M, pS + L}` on halves: every L takes the `g×g` block before it, M's in leftover rows
    /// take `g` S's, and leftover S columns are crossed with rows of L.
    Block { g: i64, p: i64 },
}

impl Layout {
    pub fn halves(&self) -> bool {
        !matches!(self, Layout::Whole { .. })
    }

    /// Number of cells (or halves) per tile, per class index.
    pub fn tile_sizes(&self) -> [usize; 2] {
        match *self {
            Layout::Whole { x, z } => [(x + z) as usize, 1],
            Layout::PairedL { x, z } => [(x + z) as usize, 2],
            Layout::Block { g, p } => [(g + 1) as usize, (g * g + g + 1 + p) as usize],
        }
    }

    /// Crossing ratio `θ` between the two line families.
    pub fn theta(&self, alpha: &QuadReal) -> QuadReal {
        let one = QuadReal::one();
        match *self {
            Layout::Whole { z, .. } => alpha / &(&QuadReal::int(z) * &(&one - alpha)),
            Layout::PairedL { z, .. } => alpha / &(&QuadReal::int(z) * &(&one - alpha)),
            Layout::Block { g, .. } => alpha / &(&one - &(&QuadReal::int(g + 1) * alpha)),
        }
    }

    pub fn pad(&self) -> i64 {
        match *self {
            Layout::Block { g, .. } => g + 3,
            _ => 3,
        }
    }
}

/// Tile classes, UBRs and layout for a quadratic slope.
#[derive(Clone, Debug)]
pub struct TilePlan {
    pub alpha: QuadReal,
    pub u: Rat,
    pub v: Rat,
    /// Tile classes of the catalog, indexed by `color`.
    pub classes: [TileClass; 2],
    pub ubrs: [(TileClass, Ubr); 2],
    pub layout: Layout,
}

fn check_in_unit(alpha: &QuadReal) -> Result<()> {
    if alpha.is_rational() {
        return Err(Error::RationalSlope);
    }
    if alpha.signum() <= 0 || *alpha >= QuadReal::one() {
        return Err(Error::SlopeOutOfRange);
    }
    Ok(())
}

/// Choose tile classes, compute UBRs and pick the matching layout.
pub fn plan(alpha: &QuadReal) -> Result<TilePlan> {
    check_in_unit(alpha)?;
    let (u, v) = minimal_poly(alpha)?;
    let (t1, t2) = choose_tile_classes(&u, &v)?;
    let ubrs = compute_ubr(&t1, &t2, alpha)?;
    let (shape, swapped) = shape_of(&t1, &t2)?;
    let one = QuadReal::one();
    let b = &one - alpha;
    let (layout, classes) = match shape {
        Shape::SL { x, z } => {
            if &QuadReal::int(x) * &(alpha * alpha) != &QuadReal::int(z) * &(&b * &b) {
                return Err(Error::DensityMismatch);
            }
            (Layout::Whole { x, z }, [TileClass { x, y: 0, z }, TileClass::M])
        }
        Shape::SplitL { x, z1, y: 1, z2: 1 } if *alpha > QuadReal::frac(1, 2) => {
            let lhs = &QuadReal::int(x) * &(alpha * &(&(&QuadReal::int(2) * alpha) - &one));
            if lhs != &QuadReal::int(z1) * &(&b * &b) {
                return Err(Error::DensityMismatch);
            }
            (Layout::PairedL { x, z: z1 }, [TileClass { x, y: 0, z: z1 }, TileClass { x: 0, y: 1, z: 1 }])
        }
        Shape::SplitS { x1: g, y: 1, x2: p, z: 1 } => {
            let e = &one - &(&QuadReal::int(g + 1) * alpha);
            if e.signum() <= 0 || &e * &b != &QuadReal::int(p) * &(alpha * alpha) {
                return Err(Error::DensityMismatch);
            }
            let tp = TileClass { x: g, y: 1, z: 0 };
            let tpp = tp.scaled(g).add(TileClass { x: p, y: 0, z: 1 });
            (Layout::Block { g, p }, [tp, tpp])
        }
        _ => return Err(Error::UnhandledShape),
    };
    let _ = swapped;
    Ok(TilePlan { alpha: alpha.clone(), u, v, classes, ubrs, layout })
}

/// Patch size `R₁ × R₂` used for sampling: the largest over the plan's UBRs.
pub fn plan_patch_size(plan: &TilePlan) -> (i64, i64) {
    let (a, b) = patch_size(&plan.ubrs[0].1);
    let (c, d) = patch_size(&plan.ubrs[1].1);
    (a.max(c).max(1), b.max(d).max(1))
}

/// Index classes of a row or column word that carry their own lattice.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Sel {
    Zero,
    One,
    /// A 1 preceded by a 1.
    OneOne,
    /// A 0 with no 1 among the next `g` letters.
    Extra(i64),
}

impl Sel {
    fn test(self, f: &dyn Fn(i64) -> u8, n: i64) -> bool {
        match self {
            Sel::Zero => f(n) == 0,
            Sel::One => f(n) == 1,
            Sel::OneOne => f(n) == 1 && f(n - 1) == 1,
            Sel::Extra(g) => f(n) == 0 && (n + 1..=n + g).all(|m| f(m) == 0),
        }
    }
}

const CENTER_SPAN: i64 = 2048;

/// Real coordinates of the indices of one class: the rank counted from index 0, shifted so that
/// the deviation from the ideal lattice is centered for every intercept.
struct Coords {
    lo: i64,
    rank: Vec<i64>,
    phase: f64,
}

impl Coords {
    /// `word(n)` is exact on `[lo − 1, hi + pad]`; `approx(n)` is a floating-point copy used only to
    /// center the phase over a fixed range around the origin.
    fn new(lo: i64, hi: i64, sel: Sel, word: &dyn Fn(i64) -> u8, approx: &dyn Fn(i64) -> u8) -> Self {
        assert!(lo <= 0 && hi > 0);
        let count = |f: &dyn Fn(i64) -> u8, a: i64, b: i64| -> Vec<i64> {
            let mut rank = vec![0; (b - a) as usize];
            let mut r = 0;
            for n in 0..b {
                rank[(n - a) as usize] = r;
                if sel.test(f, n) {
                    r += 1;
                }
            }
            let mut r = 0;
            for n in (a..0).rev() {
                if sel.test(f, n) {
                    r -= 1;
                }
                rank[(n - a) as usize] = r;
            }
            rank
        };
        let far = count(approx, -CENTER_SPAN, CENTER_SPAN);
        let members: Vec<(i64, i64)> = (-CENTER_SPAN..CENTER_SPAN)
            .filter(|&n| sel.test(approx, n))
            .map(|n| (n, far[(n + CENTER_SPAN) as usize]))
            .collect();
        let w = members.len() as f64 / (2 * CENTER_SPAN) as f64;
        let phase = members.iter().map(|&(n, r)| w * n as f64 - r as f64).sum::<f64>() / members.len().max(1) as f64;
        Coords { lo, rank: count(word, lo, hi), phase }
    }

    fn int(&self, n: i64) -> i64 {
        self.rank[(n - self.lo) as usize]
    }

    fn real(&self, n: i64) -> f64 {
        self.int(n) as f64 + self.phase
    }
}

/// Strip arithmetic of the cross correspondence with `λμ = θ` on real line coordinates:
/// X lines `i + φ_X`, Y lines `j + φ_Y`; component `(k, i)` pairs X line `i` with Y line
/// `round((k + ½)/θ − φ_X − φ_Y) − i`, which puts the crossing of the two lines mid-run.
struct CrossKeys {
    theta: f64,
    p: i64,
    q: i64,
}

impl CrossKeys {
    fn new(theta: &QuadReal, p: i64, q: i64) -> Self {
        CrossKeys { theta: theta.to_f64(), p, q }
    }

    fn key_x(&self, line: &Coords, l: i64, along: &Coords, a: i64) -> (i64, i64) {
        let k = (self.theta * line.real(l) + along.real(a) / self.p as f64).floor() as i64;
        (k, line.int(l))
    }

    fn key_y(&self, xline: &Coords, line: &Coords, l: i64, along: &Coords, a: i64) -> (i64, i64) {
        let k = (along.real(a) / self.q as f64 + self.theta * line.real(l)).floor() as i64;
        let c = ((k as f64 + 0.5) / self.theta - xline.phase - line.phase).round() as i64;
        (k, c - line.int(l))
    }
}

/// Identifies a tile during assignment: `(tag, a, b)`.
type TileId = (u8, i64, i64);

const T_SINGLE: u8 = 0;
const T_CROSS: u8 = 1;
const T_PAIR: u8 = 2;
const T_LBASE: u8 = 3;
const T_MBASE: u8 = 4;
const T_ORPHAN: u8 = 5;

#[derive(Clone, Debug, Default)]
struct Group {
    color: u32,
    cells: Vec<(i64, i64, Part)>,
    base: Option<(i64, i64)>,
}

/// A view of the cabinet, optionally transposed.
struct View<'a> {
    cab: &'a Cabinet,
    t: bool,
}

impl View<'_> {
    fn b(&self, j: i64) -> u8 {
        if self.t {
            self.cab.c(j)
        } else {
            self.cab.b(j)
        }
    }

    fn c(&self, k: i64) -> u8 {
        if self.t {
            self.cab.b(k)
        } else {
            self.cab.c(k)
        }
    }

    fn rho_b(&self) -> f64 {
        if self.t {
            self.cab.rho.1.to_f64()
        } else {
            self.cab.rho.0.to_f64()
        }
    }

    fn rho_c(&self) -> f64 {
        if self.t {
            self.cab.rho.0.to_f64()
        } else {
            self.cab.rho.1.to_f64()
        }
    }

    fn map(&self, j: i64, k: i64, part: Part) -> (i64, i64, Part) {
        if self.t {
            (k, j, part.swap())
        } else {
            (j, k, part)
        }
    }
}

fn approx_word(alpha: f64, rho: f64) -> impl Fn(i64) -> u8 {
    move |n: i64| {
        let f = |m: i64| (m as f64 * alpha + rho).floor();
        (f(n + 1) - f(n)) as u8
    }
}

/// Whether the S's of a cross tile run down a column in the untransposed family.
fn s_down(plan: &TilePlan) -> bool {
    matches!(plan.layout, Layout::PairedL { .. })
}

/// Group the cells (or halves) of `[lo, hi)²` into tiles.
fn assign_tiles(plan: &TilePlan, cab: &Cabinet, lo: i64, hi: i64) -> BTreeMap<TileId, Group> {
    let mut groups: BTreeMap<TileId, Group> = BTreeMap::new();
    let theta = plan.layout.theta(&plan.alpha);
    let af = plan.alpha.to_f64();
    let families: &[bool] = if plan.layout.halves() { &[false, true] } else { &[false] };
    for &t in families {
        let view = View { cab, t };
        let fam = if t { 16u8 } else { 0 };
        let bw = |j: i64| view.b(j);
        let cw = |k: i64| view.c(k);
        let ba = approx_word(af, view.rho_b());
        let ca = approx_word(af, view.rho_c());
        let rows = |s: Sel| Coords::new(lo, hi, s, &cw, &ca);
        let cols = |s: Sel| Coords::new(lo, hi, s, &bw, &ba);
        let mut put = |id: TileId, color: u32, j: i64, k: i64, part: Part| {
            let (aj, ak, ap) = view.map(j, k, part);
            let g = groups.entry((id.0 | fam, id.1, id.2)).or_default();
            g.color = color;
            g.cells.push((aj, ak, ap));
        };
        match plan.layout {
            Layout::Whole { x, z } => {
                let keys = CrossKeys::new(&theta, x, z);
                let (r0, c0, r1, c1) = (rows(Sel::Zero), cols(Sel::Zero), rows(Sel::One), cols(Sel::One));
                for k in lo..hi {
                    for j in lo..hi {
                        match Kind::of(view.b(j), view.c(k)) {
                            Kind::S => {
                                let key = keys.key_x(&r0, k, &c0, j);
                                put((T_CROSS, key.0, key.1), 0, j, k, Part::Full);
                            }
                            Kind::L => {
                                let key = keys.key_y(&r0, &c1, j, &r1, k);
                                put((T_CROSS, key.0, key.1), 0, j, k, Part::Full);
                            }
                            Kind::M => put((T_SINGLE, j, k), 1, j, k, Part::Full),
                        }
                    }
                }
            }
            Layout::PairedL { x, z } => {
                let keys = CrossKeys::new(&theta, x, z);
                // S's down a 0-column, L's along an L′ row
                let (r0, c0, rl, c1) = (rows(Sel::Zero), cols(Sel::Zero), rows(Sel::OneOne), cols(Sel::One));
                for k in lo..hi {
                    for j in lo..hi {
                        match (view.b(j), view.c(k)) {
                            (0, 0) => {
                                let key = keys.key_x(&c0, j, &r0, k);
                                put((T_CROSS, key.0, key.1), 0, j, k, Part::Lo);
                            }
                            (1, 1) if view.c(k - 1) == 0 => put((T_PAIR, j, k - 1), 1, j, k, Part::Lo),
                            (1, 1) => {
                                let key = keys.key_y(&c0, &rl, k, &c1, j);
                                put((T_CROSS, key.0, key.1), 0, j, k, Part::Lo);
                            }
                            (1, 0) => put((T_PAIR, j, k), 1, j, k, Part::Full),
                            _ => {}
                        }
                    }
                }
            }
            Layout::Block { g, p } => {
                let keys = CrossKeys::new(&theta, p, 1);
                let next1 = |f: &dyn Fn(i64) -> u8, n: i64| -> i64 { (n..).find(|&m| f(m) == 1).unwrap() };
                let gcol = |j: i64| view.b(j) == 0 && next1(&bw, j) - j <= g;
                let grow = |k: i64| view.c(k) == 0 && next1(&cw, k) - k <= g;
                let (ec, r0, r1, c1) = (cols(Sel::Extra(g)), rows(Sel::Zero), rows(Sel::One), cols(Sel::One));
                let mut lkey: HashMap<(i64, i64), (i64, i64)> = HashMap::new();
                let mut pending: Vec<((i64, i64), i64, i64)> = Vec::new();
                for k in lo..hi {
                    for j in lo..hi {
                        match (view.b(j), view.c(k)) {
                            (0, 0) if gcol(j) => {
                                let jn = next1(&bw, j);
                                if grow(k) {
                                    put((T_LBASE, jn, next1(&cw, k)), 1, j, k, Part::Lo);
                                } else {
                                    put((T_MBASE, jn, k), 0, j, k, Part::Lo);
                                }
                            }
                            (0, 0) => pending.push((keys.key_x(&ec, j, &r0, k), j, k)),
                            (1, 0) if grow(k) => put((T_LBASE, j, next1(&cw, k)), 1, j, k, Part::Full),
                            (1, 0) => put((T_MBASE, j, k), 0, j, k, Part::Full),
                            (1, 1) => {
                                lkey.insert(keys.key_y(&ec, &r1, k, &c1, j), (j, k));
                                put((T_LBASE, j, k), 1, j, k, Part::Lo);
                            }
                            _ => {}
                        }
                    }
                }
                for (key, j, k) in pending {
                    match lkey.get(&key) {
                        Some(&(jl, kl)) => put((T_LBASE, jl, kl), 1, j, k, Part::Lo),
                        None => put((T_ORPHAN, key.0, key.1), 1, j, k, Part::Lo),
                    }
                }
            }
        }
    }
    // basepoints: the crossing of the S row with the L column, else the anchor cell
    for (id, g) in groups.iter_mut() {
        g.cells.sort();
        let t = id.0 & 16 != 0;
        match id.0 & 15 {
            T_CROSS => {
                let s = g.cells.iter().find(|c| cab.kind(c.0, c.1) == Kind::S);
                let l = g.cells.iter().find(|c| cab.kind(c.0, c.1) == Kind::L);
                if let (Some(s), Some(l)) = (s, l) {
                    g.base = Some(if t != s_down(plan) { (s.0, l.1) } else { (l.0, s.1) });
                }
            }
            T_SINGLE | T_PAIR | T_LBASE | T_MBASE => {
                g.base = Some(if t { (id.2, id.1) } else { (id.1, id.2) });
            }
            _ => {}
        }
    }
    groups
}

// ---------------------------------------------------------------------------
// Patch-tiles and catalogs

/// A cell (or half cell) of a patch-tile, relative to the tile's bounding box.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CellRef {
    pub dj: i64,
    pub dk: i64,
    pub part: Part,
    pub kind: Kind,
    /// SAB offset `2τ`.
    pub tau2: i8,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PatchTile {
    pub class: TileClass,
    /// Column word `b` over the bounding box.
    pub cols: Vec<u8>,
    /// Row word `c` over the bounding box.
    pub rows: Vec<u8>,
    pub cells: Vec<CellRef>,
    pub basepoint: (i64, i64),
    pub support_words: Option<(FiniteWord, FiniteWord)>,
    /// Class index within the tile set; congruent supports of different roles get different colors.
    pub color: u32,
}

/// Translation-invariant identity: words, cells, parts and SABs.
pub type TileKey = (u32, Vec<u8>, Vec<u8>, Vec<CellRef>);

impl PatchTile {
    pub fn key(&self) -> TileKey {
        (self.color, self.cols.clone(), self.rows.clone(), self.cells.clone())
    }

    pub fn width(&self) -> i64 {
        self.cols.len() as i64
    }

    pub fn height(&self) -> i64 {
        self.rows.len() as i64
    }

    pub fn transpose(&self) -> PatchTile {
        let mut cells: Vec<CellRef> =
            self.cells.iter().map(|c| CellRef { dj: c.dk, dk: c.dj, part: c.part.swap(), ..*c }).collect();
        cells.sort();
        PatchTile {
            class: self.class,
            cols: self.rows.clone(),
            rows: self.cols.clone(),
            cells,
            basepoint: (self.basepoint.1, self.basepoint.0),
            support_words: None,
            color: self.color,
        }
    }

    pub fn rot180(&self) -> PatchTile {
        let (w, h) = (self.width(), self.height());
        let mut cells: Vec<CellRef> = self
            .cells
            .iter()
            .map(|c| CellRef { dj: w - 1 - c.dj, dk: h - 1 - c.dk, part: c.part.swap(), kind: c.kind, tau2: -c.tau2 })
            .collect();
        cells.sort();
        PatchTile {
            class: self.class,
            cols: self.cols.iter().rev().copied().collect(),
            rows: self.rows.iter().rev().copied().collect(),
            cells,
            basepoint: (w - 1 - self.basepoint.0, h - 1 - self.basepoint.1),
            support_words: None,
            color: self.color,
        }
    }

    /// Smallest key over the isometries that keep the SAB direction: identity, the two diagonal
    /// reflections and the half turn.
    pub fn isometry_key(&self) -> TileKey {
        let t = self.transpose();
        [self.key(), t.key(), self.rot180().key(), t.rot180().key()].into_iter().min().unwrap()
    }

    pub fn dedup_key(&self, mode: Dedup) -> TileKey {
        match mode {
            Dedup::Translation => self.key(),
            Dedup::Isometry => self.isometry_key(),
        }
    }

    pub fn count(&self, kind: Kind) -> usize {
        self.cells.iter().filter(|c| c.kind == kind).count()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let word = |w: &[u8]| w.iter().map(|d| char::from(b'0' + d)).collect::<String>();
        json!({
            "class": self.class.coords(),
            "cols": word(&self.cols),
            "rows": word(&self.rows),
            "cells": self.cells.iter().map(|c| json!([c.dj, c.dk, format!("{:?}", c.part), format!("{:?}", c.kind)])).collect::<Vec<_>>(),
            "basepoint": [self.basepoint.0, self.basepoint.1],
            "sab": self.cells.iter().map(|c| c.tau2).collect::<Vec<_>>(),
            "support_words": self.support_words.as_ref().map(|(u, v)| [u.to_string(), v.to_string()]),
            "color": self.color,
        })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<PatchTile> {
        let bad = |m: &str| Error::Parse { pos: 0, msg: format!("patch-tile json: {m}") };
        let word = |s: &serde_json::Value| -> Result<Vec<u8>> {
            s.as_str()
                .ok_or_else(|| bad("word"))?
                .chars()
                .map(|ch| match ch {
                    '0' => Ok(0),
                    '1' => Ok(1),
                    _ => Err(bad("letter")),
                })
                .collect()
        };
        let int = |x: &serde_json::Value| x.as_i64().ok_or_else(|| bad("integer"));
        let cl = v["class"].as_array().ok_or_else(|| bad("class"))?;
        if cl.len() != 3 || int(&cl[1])? % 2 != 0 {
            return Err(bad("class"));
        }
        let class = TileClass { x: int(&cl[0])?, y: int(&cl[1])? / 2, z: int(&cl[2])? };
        let sab = v["sab"].as_array().ok_or_else(|| bad("sab"))?;
        let cells_v = v["cells"].as_array().ok_or_else(|| bad("cells"))?;
        if sab.len() != cells_v.len() {
            return Err(bad("sab length"));
        }
        let mut cells = Vec::new();
        for (c, t) in cells_v.iter().zip(sab) {
            let a = c.as_array().ok_or_else(|| bad("cell"))?;
            if a.len() != 4 {
                return Err(bad("cell"));
            }
            let part = match a[2].as_str() {
                Some("Full") => Part::Full,
                Some("Lo") => Part::Lo,
                Some("Hi") => Part::Hi,
                _ => return Err(bad("part")),
            };
            let kind = match a[3].as_str() {
                Some("S") => Kind::S,
                Some("M") => Kind::M,
                Some("L") => Kind::L,
                _ => return Err(bad("kind")),
            };
            cells.push(CellRef { dj: int(&a[0])?, dk: int(&a[1])?, part, kind, tau2: int(t)? as i8 });
        }
        let bp = v["basepoint"].as_array().ok_or_else(|| bad("basepoint"))?;
        let support_words = match &v["support_words"] {
            serde_json::Value::Null => None,
            serde_json::Value::Array(a) if a.len() == 2 => {
                let p = |x: &serde_json::Value| FiniteWord::parse(x.as_str().unwrap_or(""));
                Some((p(&a[0])?, p(&a[1])?))
            }
            _ => return Err(bad("support_words")),
        };
        Ok(PatchTile {
            class,
            cols: word(&v["cols"])?,
            rows: word(&v["rows"])?,
            cells,
            basepoint: (int(&bp[0])?, int(&bp[1])?),
            support_words,
            color: v["color"].as_u64().ok_or_else(|| bad("color"))? as u32,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Dedup {
    Translation,
    Isometry,
}

fn marked(cab: &Cabinet, cols: bool, from: i64, to: i64, at: i64) -> FiniteWord {
    let letters = (from..=to).map(|n| if cols { cab.b(n) } else { cab.c(n) }).collect();
    FiniteWord { letters, marks: vec![(at - from) as usize] }
}

/// Build the patch-tile of a complete group.
fn make_tile(plan: &TilePlan, cab: &Cabinet, id: &TileId, g: &Group) -> PatchTile {
    let j0 = g.cells.iter().map(|c| c.0).min().unwrap();
    let j1 = g.cells.iter().map(|c| c.0).max().unwrap();
    let k0 = g.cells.iter().map(|c| c.1).min().unwrap();
    let k1 = g.cells.iter().map(|c| c.1).max().unwrap();
    let mut cells: Vec<CellRef> = g
        .cells
        .iter()
        .map(|&(j, k, part)| CellRef { dj: j - j0, dk: k - k0, part, kind: cab.kind(j, k), tau2: cab.tau2(j, k) })
        .collect();
    cells.sort();
    let base = g.base.unwrap_or((j0, k0));
    let support_words = if id.0 & 15 == T_CROSS && !matches!(plan.layout, Layout::Block { .. }) {
        g.base.map(|(bj, bk)| {
            let (u, v) = (marked(cab, true, j0, j1, bj), marked(cab, false, k0, k1, bk));
            if (id.0 & 16 != 0) != s_down(plan) {
                (v, u)
            } else {
                (u, v)
            }
        })
    } else {
        None
    };
    PatchTile {
        class: plan.classes[g.color as usize],
        cols: (j0..=j1).map(|j| cab.b(j)).collect(),
        rows: (k0..=k1).map(|k| cab.c(k)).collect(),
        cells,
        basepoint: (base.0 - j0, base.1 - k0),
        support_words,
        color: g.color,
    }
}

/// A tile placed in the plane.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Placed {
    pub tile: PatchTile,
    /// Absolute index of the bounding box's lower-left cell.
    pub origin: (i64, i64),
}

/// All complete tiles whose cells lie in `[lo, hi)²`, sorted by origin.
pub fn layout_tiles(plan: &TilePlan, rho: (QuadReal, QuadReal), lo: i64, hi: i64) -> Result<Vec<Placed>> {
    let pad = plan.layout.pad();
    let cab = Cabinet::new(&plan.alpha, rho, lo - pad, hi + 2 * pad)?;
    let groups = assign_tiles(plan, &cab, lo, hi);
    let sizes = plan.layout.tile_sizes();
    let mut out = Vec::new();
    for (id, g) in &groups {
        if id.0 & 15 == T_ORPHAN || g.cells.len() != sizes[g.color as usize] {
            continue;
        }
        let tile = make_tile(plan, &cab, id, g);
        let origin = (g.cells.iter().map(|c| c.0).min().unwrap(), g.cells.iter().map(|c| c.1).min().unwrap());
        out.push(Placed { tile, origin });
    }
    out.sort_by(|a, b| (a.origin, a.tile.key()).cmp(&(b.origin, b.tile.key())));
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PatchCatalog {
    pub alpha: QuadReal,
    pub u: Rat,
    pub v: Rat,
    pub classes: [TileClass; 2],
    pub layout: Layout,
    pub dedup: Dedup,
    pub tiles: Vec<PatchTile>,
    /// Per tile: (rectangular patch id, occurrence index within that patch's sample).
    pub provenance: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CatalogCounts {
    pub tiles: usize,
    pub per_class: [usize; 2],
    /// Distinct supports once SABs are forgotten.
    pub supports: usize,
}

impl PatchCatalog {
    pub fn keys(&self) -> BTreeSet<TileKey> {
        self.tiles.iter().map(|t| t.dedup_key(self.dedup)).collect()
    }

    pub fn contains(&self, t: &PatchTile) -> bool {
        let k = t.dedup_key(self.dedup);
        self.tiles.iter().any(|c| c.dedup_key(self.dedup) == k)
    }

    pub fn counts(&self) -> CatalogCounts {
        let mut per_class = [0; 2];
        for t in &self.tiles {
            per_class[t.color as usize] += 1;
        }
        let supports: BTreeSet<TileKey> = self
            .tiles
            .iter()
            .map(|t| {
                let mut s = t.clone();
                for c in &mut s.cells {
                    c.tau2 = 0;
                }
                s.dedup_key(self.dedup)
            })
            .collect();
        CatalogCounts { tiles: self.tiles.len(), per_class, supports: supports.len() }
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "slope": {"u": self.u.to_string(), "v": self.v.to_string(), "alpha": self.alpha.to_string()},
            "classes": self.classes.iter().map(|c| c.coords()).collect::<Vec<_>>(),
            "layout": self.layout,
            "dedup": self.dedup,
            "tiles": self.tiles.iter().map(|t| t.to_json()).collect::<Vec<_>>(),
            "provenance": self.provenance,
            "counts": self.counts(),
        })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<PatchCatalog> {
        let bad = |m: &str| Error::Parse { pos: 0, msg: format!("catalog json: {m}") };
        let alpha: QuadReal = v["slope"]["alpha"].as_str().ok_or_else(|| bad("alpha"))?.parse()?;
        let pr = |s: &serde_json::Value| -> Result<Rat> {
            s.as_str().ok_or_else(|| bad("rational"))?.parse::<Rat>().map_err(|_| bad("rational"))
        };
        let cls = v["classes"].as_array().ok_or_else(|| bad("classes"))?;
        let cl = |c: &serde_json::Value| -> Result<TileClass> {
            let a: Vec<i64> = serde_json::from_value(c.clone()).map_err(|_| bad("class"))?;
            if a.len() != 3 {
                return Err(bad("class"));
            }
            Ok(TileClass { x: a[0], y: a[1] / 2, z: a[2] })
        };
        if cls.len() != 2 {
            return Err(bad("classes"));
        }
        Ok(PatchCatalog {
            alpha,
            u: pr(&v["slope"]["u"])?,
            v: pr(&v["slope"]["v"])?,
            classes: [cl(&cls[0])?, cl(&cls[1])?],
            layout: serde_json::from_value(v["layout"].clone()).map_err(|_| bad("layout"))?,
            dedup: serde_json::from_value(v["dedup"].clone()).map_err(|_| bad("dedup"))?,
            tiles: v["tiles"].as_array().ok_or_else(|| bad("tiles"))?.iter().map(PatchTile::from_json).collect::<Result<_>>()?,
            provenance: serde_json::from_value(v["provenance"].clone()).map_err(|_| bad("provenance"))?,
        })
    }

    fn plan(&self) -> Result<TilePlan> {
        plan(&self.alpha)
    }
}

/// Sampling used to collect tiles: one window per rectangular patch representative.
#[derive(Clone, Debug)]
pub struct Sampling {
    /// Half-width of the collected window around the origin.
    pub radius: i64,
}

impl Sampling {
    pub fn for_plan(plan: &TilePlan) -> Self {
        let (r1, r2) = plan_patch_size(plan);
        Sampling { radius: 3 * r1.max(r2) + 12 }
    }
}

/// Collect the patch-tiles used around every rectangular patch of size `⌈r₁+1⌉ × ⌈r₂+1⌉`.
pub fn build_catalog(alpha: &QuadReal, dedup: Dedup) -> Result<PatchCatalog> {
    let p = plan(alpha)?;
    let s = Sampling::for_plan(&p);
    build_catalog_with(&p, dedup, &s)
}

pub fn build_catalog_with(plan: &TilePlan, dedup: Dedup, sampling: &Sampling) -> Result<PatchCatalog> {
    let (r1, r2) = plan_patch_size(plan);
    let reps = enumerate_rect_patches(&plan.alpha, r1, r2)?;
    let mut seen: BTreeSet<TileKey> = BTreeSet::new();
    let mut tiles = Vec::new();
    let mut provenance = Vec::new();
    for (ri, rep) in reps.iter().enumerate() {
        let placed = layout_tiles(plan, rep.rho.clone(), -sampling.radius, sampling.radius)?;
        for (oi, pl) in placed.into_iter().enumerate() {
            if seen.insert(pl.tile.dedup_key(dedup)) {
                tiles.push(pl.tile);
                provenance.push((ri, oi));
            }
        }
    }
    Ok(PatchCatalog {
        alpha: plan.alpha.clone(),
        u: plan.u.clone(),
        v: plan.v.clone(),
        classes: plan.classes,
        layout: plan.layout,
        dedup,
        tiles,
        provenance,
    })
}

/// A gap-free tiling of `[0, n)²` by catalog members.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tiling {
    pub window: i64,
    pub rho: (QuadReal, QuadReal),
    pub placed: Vec<Placed>,
}

/// Partition the cells of `[0, n)²` into catalog tiles, checking every SAB against the lattice lines.
pub fn tile_a_window(catalog: &PatchCatalog, rho: (QuadReal, QuadReal), window: i64) -> Result<Tiling> {
    if window <= 0 {
        return Ok(Tiling { window: 0, rho, placed: vec![] });
    }
    let plan = catalog.plan()?;
    let (r1, r2) = plan_patch_size(&plan);
    let margin = 3 * r1.max(r2) + 8;
    let placed = layout_tiles(&plan, rho.clone(), -margin, window + margin)?;
    let keys = catalog.keys();
    let parts: &[Part] = if plan.layout.halves() { &[Part::Lo, Part::Hi] } else { &[Part::Full] };
    // which tile covers each cell of the window
    let mut owner: HashMap<(i64, i64, Part), usize> = HashMap::new();
    for (i, p) in placed.iter().enumerate() {
        for c in &p.tile.cells {
            let (j, k) = (p.origin.0 + c.dj, p.origin.1 + c.dk);
            if c.part == Part::Full && plan.layout.halves() {
                owner.insert((j, k, Part::Lo), i);
                owner.insert((j, k, Part::Hi), i);
            } else {
                owner.insert((j, k, c.part), i);
            }
        }
    }
    let lat = crate::lattice::LatticeParams::irrational(
        QuadReal::one(),
        plan.alpha.clone(),
        [-(&rho.0 + &rho.1), rho.0.clone(), rho.1.clone()],
    )?;
    let cab = Cabinet::new(&plan.alpha, rho.clone(), -1, window + 1)?;
    let mut used = BTreeSet::new();
    for k in 0..window {
        for j in 0..window {
            for &part in parts {
                let Some(&i) = owner.get(&(j, k, part)) else {
                    return Err(Error::CoverageGap(j, k));
                };
                let p = &placed[i];
                if !keys.contains(&p.tile.dedup_key(catalog.dedup)) {
                    return Err(Error::CoverageGap(j, k));
                }
                let c = p
                    .tile
                    .cells
                    .iter()
                    .find(|c| (p.origin.0 + c.dj, p.origin.1 + c.dk) == (j, k))
                    .expect("owner cell");
                let line = -lat.line_coord(crate::lattice::Dir::A, -j - k - 1);
                if cab.sab_from_tau(j, k, c.tau2) != line {
                    return Err(Error::Domain(format!("SAB of cell ({j},{k}) is off the lattice line")));
                }
                used.insert(i);
            }
        }
    }
    Ok(Tiling { window, rho, placed: used.into_iter().map(|i| placed[i].clone()).collect() })
}

// ---------------------------------------------------------------------------
// Height families

/// `α_h = (−h + √(h²+4))/2` for norm −1 and `α*_h = (h − √(h²−4))/2` for norm +1.
pub fn height_slope(h: i64, norm: i32) -> Result<QuadReal> {
    if h < 3 {
        return Err(Error::Domain("height must be at least 3".into()));
    }
    match norm {
        -1 => Ok(QuadReal::surd(-h, 2, 1, 2, (h * h + 4) as u64)),
        1 => Ok(QuadReal::surd(h, 2, -1, 2, (h * h - 4) as u64)),
        _ => Err(Error::NotAUnit),
    }
}

#[derive(Clone, Debug)]
pub struct HeightReport {
    pub h: i64,
    pub norm: i32,
    pub alpha: QuadReal,
    pub classes: [TileClass; 2],
    pub catalog: PatchCatalog,
    pub bound: i64,
}

impl HeightReport {
    pub fn size(&self) -> usize {
        self.catalog.tiles.len()
    }
}

/// Tile set and catalog for the height-`h` family: `{(h−2)S + M, hS + L}` (norm −1) or
/// `{(h−2)S + M, (h−2)S + L}` (norm +1), realized as `T′` and `T″ = T₁ + T₂`.
pub fn height_family_tileset(h: i64, norm: i32) -> Result<HeightReport> {
    let alpha = height_slope(h, norm)?;
    let catalog = build_catalog(&alpha, Dedup::Isometry)?;
    let bound = if norm == -1 { 24 * h } else { 16 * h };
    Ok(HeightReport { h, norm, classes: catalog.classes, alpha, catalog, bound })
}
