//! Bounded displacement: 1-D indexing, the Laczkovich inequality, the
//! Duneau–Oguey surjection and cross correspondences.

use std::collections::{BTreeMap, HashSet};

use num_traits::ToPrimitive;
use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::qfield::QuadReal;

/// `{(sx·x + ox, sy·y + oy)}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lattice2D {
    pub sx: QuadReal,
    pub sy: QuadReal,
    pub ox: QuadReal,
    pub oy: QuadReal,
}

impl Lattice2D {
    pub fn new(sx: QuadReal, sy: QuadReal) -> Result<Self> {
        if sx.signum() <= 0 || sy.signum() <= 0 {
            return Err(Error::Domain("lattice spacings must be positive".into()));
        }
        Ok(Lattice2D { sx, sy, ox: QuadReal::zero(), oy: QuadReal::zero() })
    }

    pub fn density(&self) -> QuadReal {
        (&self.sx * &self.sy).recip().expect("positive spacings")
    }

    pub fn point(&self, x: i64, y: i64) -> (QuadReal, QuadReal) {
        (&(&self.sx * &QuadReal::int(x)) + &self.ox, &(&self.sy * &QuadReal::int(y)) + &self.oy)
    }
}

/// Upper bound rectangle `□(w, h) = [0,w) × [0,h)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ubr {
    pub w: QuadReal,
    pub h: QuadReal,
}

impl Ubr {
    pub fn new(w: QuadReal, h: QuadReal) -> Self {
        Ubr { w, h }
    }

    /// Do the points fit in one translate of the rectangle (half-open)?
    pub fn contains_translate(&self, pts: &[(QuadReal, QuadReal)]) -> bool {
        if pts.is_empty() {
            return true;
        }
        let (xs, ys) = spans(pts);
        xs < self.w && ys < self.h
    }
}

/// `□(a,b) + □(c,d) = □(a+c, b+d)`.
pub fn ubr_add(r1: &Ubr, r2: &Ubr) -> Ubr {
    Ubr { w: &r1.w + &r2.w, h: &r1.h + &r2.h }
}

fn spans(pts: &[(QuadReal, QuadReal)]) -> (QuadReal, QuadReal) {
    let mut it = pts.iter();
    let (x0, y0) = it.next().expect("nonempty");
    let (mut xl, mut xh, mut yl, mut yh) = (x0.clone(), x0.clone(), y0.clone(), y0.clone());
    for (x, y) in it {
        xl = xl.min(x.clone());
        xh = xh.max(x.clone());
        yl = yl.min(y.clone());
        yh = yh.max(y.clone());
    }
    (&xh - &xl, &yh - &yl)
}

/// Indexing `j ↦ x_j` of a 1-D set with bounded discrepancy.
#[derive(Clone, Debug, PartialEq)]
pub struct SpreadIndex {
    pub points: Vec<(i64, QuadReal)>,
    pub bound: QuadReal,
    pub max_displacement: QuadReal,
}

/// Index a finite window of `X ⊂ [−M, M]` as in the constructive proof:
/// nonnegative points increasing from `j = 0`, negative points decreasing from `j = −1`.
///
/// `range` is the integer window `[−M, M]` on which `X` is fully known.
pub fn uniform_spread_index(points: &[QuadReal], range: i64, delta: &QuadReal, c: &QuadReal) -> Result<SpreadIndex> {
    let mut xs: Vec<QuadReal> = points.to_vec();
    xs.sort_by(|a, b| a.partial_cmp(b).expect("same field"));
    let zero = QuadReal::zero();
    for m in -range..=range {
        let mm = QuadReal::int(m);
        let card = if m >= 0 {
            xs.iter().filter(|x| **x >= zero && **x <= mm).count()
        } else {
            xs.iter().filter(|x| **x >= mm && **x <= zero).count()
        } as i64;
        let dev = &QuadReal::int(card) - &(delta * &QuadReal::int(m.abs()));
        if dev.abs() >= *c {
            return Err(Error::CriterionViolated(m));
        }
    }
    let inv = delta.recip()?;
    let bound = &(c * &inv) + &QuadReal::one();
    let mut out = Vec::new();
    let pos = xs.iter().filter(|x| **x >= zero);
    for (j, x) in pos.enumerate() {
        out.push((j as i64, x.clone()));
    }
    let neg = xs.iter().rev().filter(|x| **x < zero);
    for (j, x) in neg.enumerate() {
        out.push((-(j as i64) - 1, x.clone()));
    }
    out.sort_by_key(|(j, _)| *j);
    // only indices whose ideal position j/δ lies well inside the window are certified
    let lim = QuadReal::int(range);
    let mut maxd = QuadReal::zero();
    let mut certified = Vec::new();
    for (j, x) in out {
        let ideal = &QuadReal::int(j) * &inv;
        if (&ideal.abs() + &bound) > lim {
            continue;
        }
        let d = (&x - &ideal).abs();
        if d > bound {
            return Err(Error::CriterionViolated(j));
        }
        maxd = maxd.max(d);
        certified.push((j, x));
    }
    Ok(SpreadIndex { points: certified, bound, max_displacement: maxd })
}

/// Finite union of unit squares `[i,i+1) × [j,j+1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SquareUnion {
    cells: HashSet<(i64, i64)>,
}

impl SquareUnion {
    pub fn new(cells: impl IntoIterator<Item = (i64, i64)>) -> Self {
        SquareUnion { cells: cells.into_iter().collect() }
    }

    /// Axis-parallel block `[x0, x0+w) × [y0, y0+h)`.
    pub fn rect(x0: i64, y0: i64, w: i64, h: i64) -> Self {
        Self::new((x0..x0 + w).flat_map(|i| (y0..y0 + h).map(move |j| (i, j))))
    }

    pub fn area(&self) -> i64 {
        self.cells.len() as i64
    }

    /// Boundary length: unit edges shared with a square outside.
    pub fn perimeter(&self) -> i64 {
        let mut p = 0;
        for &(i, j) in &self.cells {
            for (di, dj) in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
                if !self.cells.contains(&(i + di, j + dj)) {
                    p += 1;
                }
            }
        }
        p
    }

    /// `Σ_y s(y)`: connected horizontal runs over all rows.
    pub fn row_runs(&self) -> i64 {
        self.cells.iter().filter(|&&(i, j)| !self.cells.contains(&(i - 1, j))).count() as i64
    }

    pub fn contains(&self, x: &QuadReal, y: &QuadReal) -> bool {
        match (x.floor().to_i64(), y.floor().to_i64()) {
            (Some(i), Some(j)) => self.cells.contains(&(i, j)),
            _ => false,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LacReport {
    pub holds: bool,
    /// `min_H (C·p(H) − |Card(X∩H) − δμ(H)|)`.
    pub margin: QuadReal,
    pub worst: usize,
}

/// Evaluate `|Card(X ∩ H) − δμ(H)| < C·p(H)` over a family of regions (multiset aware).
pub fn laczkovich_margin(
    x: &[(QuadReal, QuadReal)],
    family: &[SquareUnion],
    delta: &QuadReal,
    c: &QuadReal,
) -> Result<LacReport> {
    let mut best: Option<(QuadReal, usize)> = None;
    for (idx, h) in family.iter().enumerate() {
        if h.area() == 0 {
            return Err(Error::EmptyRegion);
        }
        let card = x.iter().filter(|(a, b)| h.contains(a, b)).count() as i64;
        let dev = (&QuadReal::int(card) - &(delta * &QuadReal::int(h.area()))).abs();
        let m = &(c * &QuadReal::int(h.perimeter())) - &dev;
        if best.as_ref().map_or(true, |(b, _)| m < *b) {
            best = Some((m, idx));
        }
    }
    let (margin, worst) = best.ok_or(Error::EmptyRegion)?;
    Ok(LacReport { holds: margin.signum() > 0, margin, worst })
}

fn check_density(lambda: &QuadReal, mu: &QuadReal, n: i64) -> Result<()> {
    if n < 1 || &(lambda * mu) * &QuadReal::int(n) != QuadReal::one() {
        return Err(Error::DensityMismatch);
    }
    Ok(())
}

fn rnd(x: &QuadReal) -> i64 {
    x.round_nearest().to_i64().expect("coordinate fits in i64")
}

fn rq(x: i64) -> QuadReal {
    QuadReal::int(x)
}

/// The four shear steps on `(x, y, z)`; returns `(X̂, Ŷ, Ẑ)` and every rounding argument.
fn do_forward(lambda: &QuadReal, mu: &QuadReal, n: i64, x: i64, y: i64, z: i64) -> ((i64, i64, i64), Vec<QuadReal>) {
    let il = lambda.recip().expect("λ > 0");
    let im = mu.recip().expect("μ > 0");
    let nn = rq(n);
    let r1 = &(&rq(y) * &il) - &(&nn * &rq(z));
    let z0 = x - rnd(&r1);
    let r2 = &(lambda * &rq(z0)) - &(&rq(z) * &im);
    let xh = y + rnd(&r2);
    let r3 = &(mu * &rq(xh)) - &rq(z0).scale(&crate::qfield::rat(1, n));
    let yh = z + rnd(&r3);
    let r4 = &(&nn * &rq(yh)) - &(&rq(xh) * &il);
    let zh = z0 + rnd(&r4);
    ((xh, yh, zh), vec![r1, r2, r3, r4])
}

/// 3-D bijection `φ̂(λx, μy, nz)`.
pub fn do_map3(lambda: &QuadReal, mu: &QuadReal, n: i64, x: i64, y: i64, z: i64) -> Result<(i64, i64, i64)> {
    check_density(lambda, mu, n)?;
    Ok(do_forward(lambda, mu, n, x, y, z).0)
}

/// Inverse of [`do_map3`], undoing the shears in reverse order.
pub fn do_unmap3(lambda: &QuadReal, mu: &QuadReal, n: i64, xh: i64, yh: i64, zh: i64) -> Result<(i64, i64, i64)> {
    check_density(lambda, mu, n)?;
    let il = lambda.recip()?;
    let im = mu.recip()?;
    let nn = rq(n);
    let z0 = zh - rnd(&(&(&nn * &rq(yh)) - &(&rq(xh) * &il)));
    let z = yh - rnd(&(&(mu * &rq(xh)) - &rq(z0).scale(&crate::qfield::rat(1, n))));
    let y = xh - rnd(&(&(lambda * &rq(z0)) - &(&rq(z) * &im)));
    let x = z0 + rnd(&(&(&rq(y) * &il) - &(&nn * &rq(z))));
    Ok((x, y, z))
}

/// Rounding arguments met while mapping `(λx, μy)`; none should be a half-integer.
pub fn do_rounding_args(lambda: &QuadReal, mu: &QuadReal, n: i64, x: i64, y: i64) -> Vec<QuadReal> {
    do_forward(lambda, mu, n, x, y, 0).1
}

/// `X = y + ⟪λx − λ⟪y/λ⟫⟫`, `Y = ⟪μX − (x − ⟪y/λ⟫)/n⟫`.
pub fn do_map(lambda: &QuadReal, mu: &QuadReal, n: i64, x: i64, y: i64) -> Result<(i64, i64)> {
    check_density(lambda, mu, n)?;
    let il = lambda.recip()?;
    let ry = rnd(&(&rq(y) * &il));
    let xx = y + rnd(&(&(lambda * &rq(x)) - &(lambda * &rq(ry))));
    let yy = rnd(&(&(mu * &rq(xx)) - &rq(x - ry).scale(&crate::qfield::rat(1, n))));
    Ok((xx, yy))
}

/// Per-axis displacement bounds `((λ+1)/2, (μ+1)/2)`.
pub fn do_bounds(lambda: &QuadReal, mu: &QuadReal) -> (QuadReal, QuadReal) {
    let h = crate::qfield::rat(1, 2);
    ((lambda + &QuadReal::one()).scale(&h), (mu + &QuadReal::one()).scale(&h))
}

/// All lattice indices `(x, y)` with `φ(λx, μy) = (X, Y)`.
pub fn do_preimage(lambda: &QuadReal, mu: &QuadReal, n: i64, target: (i64, i64)) -> Result<Vec<(i64, i64)>> {
    check_density(lambda, mu, n)?;
    let (bx, by) = do_bounds(lambda, mu);
    let (tx, ty) = (rq(target.0), rq(target.1));
    let il = lambda.recip()?;
    let im = mu.recip()?;
    let xr = (
        (&(&tx - &bx) * &il).floor().to_i64().unwrap_or(0) - 1,
        (&(&tx + &bx) * &il).ceil().to_i64().unwrap_or(0) + 1,
    );
    let yr = (
        (&(&ty - &by) * &im).floor().to_i64().unwrap_or(0) - 1,
        (&(&ty + &by) * &im).ceil().to_i64().unwrap_or(0) + 1,
    );
    let mut out = Vec::new();
    for x in xr.0..=xr.1 {
        for y in yr.0..=yr.1 {
            if do_map(lambda, mu, n, x, y)? == target {
                out.push((x, y));
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Side {
    X,
    Y,
}

/// Cross correspondence between `X = δ⁻¹(λZ × (λp)⁻¹Z)` and `Y = δ⁻¹((μq)⁻¹Z × μZ)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cross {
    pub lambda: QuadReal,
    pub mu: QuadReal,
    pub p: i64,
    pub q: i64,
    pub delta: QuadReal,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Assignment {
    pub strip: i64,
    pub c_k: i64,
    pub key: (i64, i64),
    pub basepoint: (QuadReal, QuadReal),
}

#[derive(Clone, Debug, PartialEq)]
pub struct BdComponent {
    pub key: (i64, i64),
    pub basepoint: (QuadReal, QuadReal),
    pub members_x: Vec<(QuadReal, QuadReal)>,
    pub members_y: Vec<(QuadReal, QuadReal)>,
}

impl BdComponent {
    pub fn to_json(&self) -> serde_json::Value {
        let pt = |(a, b): &(QuadReal, QuadReal)| json!([a.to_string(), b.to_string()]);
        json!({
            "key": [self.key.0, self.key.1],
            "basepoint": pt(&self.basepoint),
            "x_members": self.members_x.iter().map(pt).collect::<Vec<_>>(),
            "y_members": self.members_y.iter().map(pt).collect::<Vec<_>>(),
        })
    }
}

impl Cross {
    pub fn new(lambda: QuadReal, mu: QuadReal, p: i64, q: i64, delta: QuadReal) -> Result<Self> {
        if p < 1 || q < 1 || lambda.signum() <= 0 || mu.signum() <= 0 || delta.signum() <= 0 {
            return Err(Error::Domain("cross parameters must be positive".into()));
        }
        if &lambda * &mu > QuadReal::one() {
            return Err(Error::ShapeViolated);
        }
        Ok(Cross { lambda, mu, p, q, delta })
    }

    fn lm(&self) -> QuadReal {
        &self.lambda * &self.mu
    }

    /// Smallest integer with `c_k·λμ ∈ [k, k+1)`, i.e. `⌈k/(λμ)⌉`.
    pub fn c_k(&self, k: i64) -> i64 {
        (&QuadReal::int(k) / &self.lm()).ceil().to_i64().expect("fits")
    }

    /// X point with indices `(i, t)`: `δ⁻¹(λi, t/(λp))`.
    pub fn x_point(&self, i: i64, t: i64) -> (QuadReal, QuadReal) {
        let id = self.delta.recip().expect("δ > 0");
        let y = &QuadReal::frac(t, self.p) / &self.lambda;
        (&(&self.lambda * &QuadReal::int(i)) * &id, &y * &id)
    }

    /// Y point with indices `(s, j)`: `δ⁻¹(s/(μq), μj)`.
    pub fn y_point(&self, s: i64, j: i64) -> (QuadReal, QuadReal) {
        let id = self.delta.recip().expect("δ > 0");
        let x = &QuadReal::frac(s, self.q) / &self.mu;
        (&x * &id, &(&self.mu * &QuadReal::int(j)) * &id)
    }

    fn basepoint(&self, i: i64, j: i64) -> (QuadReal, QuadReal) {
        let id = self.delta.recip().expect("δ > 0");
        (&(&self.lambda * &QuadReal::int(i)) * &id, &(&self.mu * &QuadReal::int(j)) * &id)
    }

    /// Component of a lattice point given by its integer indices.
    pub fn assign(&self, side: Side, a: i64, b: i64) -> Assignment {
        let lm = self.lm();
        let (k, i) = match side {
            // μx + λy = λμ i + t/p in the undilated frame
            Side::X => (( &(&lm * &QuadReal::int(a)) + &QuadReal::frac(b, self.p)).floor().to_i64().expect("fits"), a),
            Side::Y => {
                let k = (&QuadReal::frac(a, self.q) + &(&lm * &QuadReal::int(b))).floor().to_i64().expect("fits");
                (k, self.c_k(k) - b)
            }
        };
        let c = self.c_k(k);
        Assignment { strip: k, c_k: c, key: (k, i), basepoint: self.basepoint(i, c - i) }
    }

    /// Integer indices `(i, t)` of the X-members and `(s, j)` of the Y-members of component `(k, i)`.
    pub fn component_indices(&self, k: i64, i: i64) -> (Vec<(i64, i64)>, Vec<(i64, i64)>) {
        let lm = self.lm();
        let j = self.c_k(k) - i;
        // t with λμ i + t/p ∈ [k, k+1), s with s/q + λμ j ∈ [k, k+1)
        let t0 = (&(&QuadReal::int(k) - &(&lm * &QuadReal::int(i))) * &QuadReal::int(self.p)).ceil().to_i64().unwrap();
        let s0 = (&(&QuadReal::int(k) - &(&lm * &QuadReal::int(j))) * &QuadReal::int(self.q)).ceil().to_i64().unwrap();
        ((t0..t0 + self.p).map(|t| (i, t)).collect(), (s0..s0 + self.q).map(|s| (s, j)).collect())
    }

    /// All members of component `(k, i)`.
    pub fn component(&self, k: i64, i: i64) -> BdComponent {
        let (xs, ys) = self.component_indices(k, i);
        BdComponent {
            key: (k, i),
            basepoint: self.basepoint(i, self.c_k(k) - i),
            members_x: xs.iter().map(|&(a, b)| self.x_point(a, b)).collect(),
            members_y: ys.iter().map(|&(a, b)| self.y_point(a, b)).collect(),
        }
    }

    /// `□(1/(δμ), 1/(δλ))`.
    pub fn ubr(&self) -> Ubr {
        Ubr {
            w: (&self.delta * &self.mu).recip().unwrap(),
            h: (&self.delta * &self.lambda).recip().unwrap(),
        }
    }

    /// Group the points of index windows by component.
    pub fn components_in(&self, xs: &[(i64, i64)], ys: &[(i64, i64)]) -> BTreeMap<(i64, i64), (usize, usize)> {
        let mut m: BTreeMap<(i64, i64), (usize, usize)> = BTreeMap::new();
        for &(a, b) in xs {
            m.entry(self.assign(Side::X, a, b).key).or_default().0 += 1;
        }
        for &(a, b) in ys {
            m.entry(self.assign(Side::Y, a, b).key).or_default().1 += 1;
        }
        m
    }
}
