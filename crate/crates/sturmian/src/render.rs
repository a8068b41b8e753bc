//! SVG output. All geometry stays exact until an element is written; each coordinate is
//! converted to a decimal exactly once, with a fixed number of digits.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::lattice::{intersect, Dir, Form, LatticeParams, Point};
use crate::qfield::QuadReal;
use crate::superlattice::psi;
use crate::tileset::{Kind, Part, PatchCatalog, PatchTile, Tiling};
use crate::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Layers {
    pub lines: bool,
    pub cells: bool,
    pub sabs: bool,
    pub boundaries: bool,
    pub basepoints: bool,
}

impl Default for Layers {
    fn default() -> Self {
        Layers { lines: true, cells: true, sabs: true, boundaries: true, basepoints: false }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Palette {
    pub s: String,
    pub m: String,
    pub l: String,
    pub lines: [String; 3],
    pub sab: String,
    pub boundary: String,
    pub base: String,
}

impl Default for Palette {
    fn default() -> Self {
        let c = |s: &str| s.to_string();
        Palette {
            s: c("#f4d35e"),
            m: c("#8ecae6"),
            l: c("#ee6c4d"),
            lines: [c("#3d5a80"), c("#2a9d8f"), c("#9d4edd")],
            sab: c("#d62828"),
            boundary: c("#111111"),
            base: c("#000000"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RenderSpec {
    pub form: Form,
    pub window: i64,
    pub layers: Layers,
    pub palette: Palette,
    /// Decimal digits written per coordinate.
    pub precision: usize,
}

impl Default for RenderSpec {
    fn default() -> Self {
        RenderSpec { form: Form::Cabinet, window: 10, layers: Layers::default(), palette: Palette::default(), precision: 12 }
    }
}

/// Exact point in a given form; isometric `y` is stored divided by √3.
#[derive(Clone, Debug)]
struct XPoint {
    x: QuadReal,
    y: QuadReal,
}

struct Svg {
    form: Form,
    precision: usize,
    body: String,
    bbox: Option<[f64; 4]>,
}

impl Svg {
    fn new(spec: &RenderSpec) -> Self {
        Svg { form: spec.form, precision: spec.precision, body: String::new(), bbox: None }
    }

    fn num(&self, v: f64) -> String {
        let mut s = format!("{:.*}", self.precision, v);
        if s.contains('.') {
            while s.ends_with('0') {
                s.pop();
            }
            if s.ends_with('.') {
                s.pop();
            }
        }
        if s == "-0" {
            s = "0".into();
        }
        s
    }

    /// The single exact → decimal conversion; SVG's y axis points down.
    fn coords(&mut self, p: &XPoint) -> (String, String) {
        let x = p.x.to_f64();
        let y = match self.form {
            Form::Isometric => p.y.to_f64() * 3f64.sqrt(),
            Form::Cabinet => p.y.to_f64(),
        };
        let b = self.bbox.get_or_insert([x, y, x, y]);
        b[0] = b[0].min(x);
        b[1] = b[1].min(y);
        b[2] = b[2].max(x);
        b[3] = b[3].max(y);
        (self.num(x), self.num(-y))
    }

    fn line(&mut self, a: &XPoint, b: &XPoint, class: &str) {
        let (x1, y1) = self.coords(a);
        let (x2, y2) = self.coords(b);
        let _ = writeln!(self.body, r#"<line class="{class}" x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}"/>"#);
    }

    fn polygon(&mut self, pts: &[XPoint], class: &str) {
        let mut s = String::new();
        for (i, p) in pts.iter().enumerate() {
            let (x, y) = self.coords(p);
            if i > 0 {
                s.push(' ');
            }
            let _ = write!(s, "{x},{y}");
        }
        let _ = writeln!(self.body, r#"<polygon class="{class}" points="{s}"/>"#);
    }

    fn circle(&mut self, c: &XPoint, r: f64, class: &str) {
        let (x, y) = self.coords(c);
        let r = self.num(r);
        let _ = writeln!(self.body, r#"<circle class="{class}" cx="{x}" cy="{y}" r="{r}"/>"#);
    }

    fn open_group(&mut self, id: &str) {
        let _ = writeln!(self.body, r#"<g id="{id}">"#);
    }

    fn close_group(&mut self) {
        self.body.push_str("</g>\n");
    }

    fn finish(self, title: &str, meta: &[(&str, String)], palette: &Palette) -> String {
        let [x0, y0, x1, y1] = self.bbox.unwrap_or([0.0; 4]);
        let pad = ((x1 - x0).max(y1 - y0) * 0.02).max(0.5);
        let vb = [x0 - pad, -y1 - pad, x1 - x0 + 2.0 * pad, y1 - y0 + 2.0 * pad];
        let vb: Vec<String> = vb.iter().map(|v| self.num(*v)).collect();
        let mut out = String::new();
        let _ = writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{}">"#, vb.join(" "));
        let _ = writeln!(out, "<title>{}</title>", escape(title));
        out.push_str("<metadata>\n");
        for (k, v) in meta {
            let _ = writeln!(out, r#"<entry key="{}">{}</entry>"#, escape(k), escape(v));
        }
        out.push_str("</metadata>\n<style>\n");
        let p = palette;
        let _ = writeln!(out, ".S{{fill:{}}} .M{{fill:{}}} .L{{fill:{}}}", p.s, p.m, p.l);
        for (i, c) in p.lines.iter().enumerate() {
            let _ = writeln!(out, ".line{i}{{stroke:{c};stroke-width:0.04}}");
        }
        let _ = writeln!(out, ".super{{stroke:{};stroke-width:0.1}}", p.boundary);
        let _ = writeln!(out, ".sab{{stroke:{};stroke-width:0.08}}", p.sab);
        let _ = writeln!(out, ".edge{{stroke:{};stroke-width:0.06}}", p.boundary);
        let _ = writeln!(out, ".base{{fill:{}}}", p.base);
        out.push_str("</style>\n");
        out.push_str(&self.body);
        out.push_str("</svg>\n");
        out
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn from_point(p: Point) -> XPoint {
    XPoint { x: p.x, y: p.y }
}

/// Cabinet `(x, y)` expressed in the requested form: the linear map taking the cabinet
/// basis to the isometric one.
fn place(form: Form, x: &QuadReal, y: &QuadReal) -> XPoint {
    match form {
        Form::Cabinet => XPoint { x: x.clone(), y: y.clone() },
        Form::Isometric => {
            let h = QuadReal::frac(1, 2);
            XPoint { x: &(y - x) * &h, y: -&(&(x + y) * &h) }
        }
    }
}

fn next(d: Dir) -> Dir {
    match d {
        Dir::A => Dir::B,
        Dir::B => Dir::C,
        Dir::C => Dir::A,
    }
}

fn draw_lines(svg: &mut Svg, form: Form, coord: &dyn Fn(Dir, i64) -> QuadReal, frame: &LatticeParams, w: i64, keep: &dyn Fn(Dir, &QuadReal) -> bool, class: &dyn Fn(Dir) -> String) {
    for d in Dir::ALL {
        let d2 = next(d);
        let lo = frame.line_coord(d2, -w);
        let hi = frame.line_coord(d2, w);
        for n in -w..=w {
            let f = coord(d, n);
            if !keep(d, &f) {
                continue;
            }
            let a = from_point(intersect(form, d, &f, d2, &lo));
            let b = from_point(intersect(form, d, &f, d2, &hi));
            svg.line(&a, &b, &class(d));
        }
    }
}

/// Lines `{dir = f(n)}` for `|n| ≤ window`, each drawn between the extreme lines of the next direction.
pub fn lattice_svg(p: &LatticeParams, spec: &RenderSpec) -> String {
    let mut svg = Svg::new(spec);
    svg.open_group("lines");
    let w = spec.window.max(0);
    if w > 0 {
        draw_lines(&mut svg, spec.form, &|d, n| p.line_coord(d, n), p, w, &|_, _| true, &|d| format!("line{}", d.index()));
    }
    svg.close_group();
    let meta = [
        ("kappa", p.kappa.to_string()),
        ("alpha", p.alpha.to_string()),
        ("rho", p.rho.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(",")),
        ("window", w.to_string()),
    ];
    svg.finish("Sturmian lattice", &meta, &spec.palette)
}

/// The level-0 lattice with the level-`n` super lattice drawn on top.
pub fn super_svg(p: &LatticeParams, level: usize, spec: &RenderSpec) -> Result<String> {
    let mut cur = p.clone();
    let mut scale = QuadReal::one();
    for _ in 0..level {
        let s = psi(&cur)?;
        scale = &scale * &s.scale;
        cur = s.params;
    }
    let w = spec.window.max(0);
    let mut svg = Svg::new(spec);
    svg.open_group("level0");
    if w > 0 {
        draw_lines(&mut svg, spec.form, &|d, n| p.line_coord(d, n), p, w, &|_, _| true, &|d| format!("line{}", d.index()));
    }
    svg.close_group();
    svg.open_group("super");
    if w > 0 {
        let bounds = |d: Dir| {
            let a = p.line_coord(d, -w);
            let b = p.line_coord(d, w);
            if a <= b {
                (a, b)
            } else {
                (b, a)
            }
        };
        draw_lines(
            &mut svg,
            spec.form,
            &|d, n| &scale * &cur.line_coord(d, n),
            p,
            w,
            &|d, f| {
                let (a, b) = bounds(d);
                *f >= a && *f <= b
            },
            &|_| "super".to_string(),
        );
    }
    svg.close_group();
    let meta = [
        ("kappa", p.kappa.to_string()),
        ("alpha", p.alpha.to_string()),
        ("level", level.to_string()),
        ("scale", scale.to_string()),
    ];
    Ok(svg.finish("Super Sturmian lattice", &meta, &spec.palette))
}

/// Polygon of a cell or half cell with corners `(x0,y0)–(x1,y1)`: `Lo` lies below the main
/// diagonal, `Hi` above it.
fn cell_poly(x0: &QuadReal, x1: &QuadReal, y0: &QuadReal, y1: &QuadReal, part: Part) -> Vec<(QuadReal, QuadReal)> {
    let c = |x: &QuadReal, y: &QuadReal| (x.clone(), y.clone());
    match part {
        Part::Full => vec![c(x0, y0), c(x1, y0), c(x1, y1), c(x0, y1)],
        Part::Lo => vec![c(x0, y0), c(x1, y0), c(x1, y1)],
        Part::Hi => vec![c(x0, y0), c(x1, y1), c(x0, y1)],
    }
}

/// Segment of `x + y = s` inside `[x0,x1] × [y0,y1]`.
fn sab_segment(x0: &QuadReal, x1: &QuadReal, y0: &QuadReal, y1: &QuadReal, s: &QuadReal) -> Option<((QuadReal, QuadReal), (QuadReal, QuadReal))> {
    let xa = x0.clone().max(s - y1);
    let xb = x1.clone().min(s - y0);
    if xa > xb {
        return None;
    }
    let ya = s - &xa;
    let yb = s - &xb;
    Some(((xa, ya), (xb, yb)))
}

fn kind_class(k: Kind) -> &'static str {
    match k {
        Kind::S => "S",
        Kind::M => "M",
        Kind::L => "L",
    }
}

type Edge = ((String, String), (String, String));

fn edge_key(a: &(QuadReal, QuadReal), b: &(QuadReal, QuadReal)) -> Edge {
    let ka = (a.0.to_string(), a.1.to_string());
    let kb = (b.0.to_string(), b.1.to_string());
    if ka <= kb {
        (ka, kb)
    } else {
        (kb, ka)
    }
}

struct Geometry<'a> {
    xs: &'a dyn Fn(i64) -> QuadReal,
    ys: &'a dyn Fn(i64) -> QuadReal,
}

/// Draw one tile with its lower-left cell at `origin`; cell sides come from `geo`.
fn draw_tile(svg: &mut Svg, spec: &RenderSpec, tile: &PatchTile, origin: (i64, i64), geo: &Geometry, edges: &mut BTreeMap<Edge, (XPoint, XPoint)>) {
    let form = spec.form;
    let mut own: BTreeMap<Edge, (usize, (QuadReal, QuadReal), (QuadReal, QuadReal))> = BTreeMap::new();
    for c in &tile.cells {
        let (j, k) = (origin.0 + c.dj, origin.1 + c.dk);
        let (x0, x1, y0, y1) = ((geo.xs)(j), (geo.xs)(j + 1), (geo.ys)(k), (geo.ys)(k + 1));
        let poly = cell_poly(&x0, &x1, &y0, &y1, c.part);
        if spec.layers.cells {
            let pts: Vec<XPoint> = poly.iter().map(|(x, y)| place(form, x, y)).collect();
            svg.polygon(&pts, kind_class(c.kind));
        }
        for i in 0..poly.len() {
            let (a, b) = (&poly[i], &poly[(i + 1) % poly.len()]);
            let e = own.entry(edge_key(a, b)).or_insert((0, a.clone(), b.clone()));
            e.0 += 1;
        }
        if spec.layers.sabs {
            // midpoint of the anti-diagonal plus the recorded offset
            let mid = &(&(&(&x0 + &x1) + &y0) + &y1) / &QuadReal::int(2);
            let s = &mid + &QuadReal::frac(c.tau2 as i64, 2);
            if let Some((a, b)) = sab_segment(&x0, &x1, &y0, &y1, &s) {
                svg.line(&place(form, &a.0, &a.1), &place(form, &b.0, &b.1), "sab");
            }
        }
    }
    for (k, (n, a, b)) in own {
        if n % 2 == 1 {
            edges.entry(k).or_insert_with(|| (place(form, &a.0, &a.1), place(form, &b.0, &b.1)));
        }
    }
    if spec.layers.basepoints {
        let (j, k) = (origin.0 + tile.basepoint.0, origin.1 + tile.basepoint.1);
        let cx = &(&(geo.xs)(j) + &(geo.xs)(j + 1)) / &QuadReal::int(2);
        let cy = &(&(geo.ys)(k) + &(geo.ys)(k + 1)) / &QuadReal::int(2);
        svg.circle(&place(form, &cx, &cy), 0.15, "base");
    }
}

/// A tiled window in cabinet cells: `x = b(j)`, `y = c(k)` with κ = 1.
pub fn tiling_svg(tiling: &Tiling, alpha: &QuadReal, spec: &RenderSpec) -> Result<String> {
    let rho = &tiling.rho;
    let lat = LatticeParams::irrational(QuadReal::one(), alpha.clone(), [-(&rho.0 + &rho.1), rho.0.clone(), rho.1.clone()])?;
    let xs = |j: i64| lat.line_coord(Dir::B, j);
    let ys = |k: i64| lat.line_coord(Dir::C, k);
    let geo = Geometry { xs: &xs, ys: &ys };
    let mut svg = Svg::new(spec);
    let mut edges = BTreeMap::new();
    svg.open_group("tiles");
    for p in &tiling.placed {
        draw_tile(&mut svg, spec, &p.tile, p.origin, &geo, &mut edges);
    }
    svg.close_group();
    if spec.layers.boundaries {
        svg.open_group("boundaries");
        for (a, b) in edges.values() {
            svg.line(a, b, "edge");
        }
        svg.close_group();
    }
    let meta = [
        ("alpha", alpha.to_string()),
        ("rho", format!("{},{}", rho.0, rho.1)),
        ("window", tiling.window.to_string()),
        ("tiles", tiling.placed.len().to_string()),
    ];
    Ok(svg.finish("Patch-tile tiling", &meta, &spec.palette))
}

/// All catalog tiles side by side; cell sides are `1 + b` and `1 + c` (κ = 1).
pub fn catalog_svg(cat: &PatchCatalog, spec: &RenderSpec) -> String {
    let mut svg = Svg::new(spec);
    let per_row = (cat.tiles.len() as f64).sqrt().ceil().max(1.0) as usize;
    let cell = cat.tiles.iter().map(|t| 2 * t.width().max(t.height())).max().unwrap_or(1) + 2;
    for (i, t) in cat.tiles.iter().enumerate() {
        let (gx, gy) = ((i % per_row) as i64 * cell, (i / per_row) as i64 * cell);
        let cols = t.cols.clone();
        let rows = t.rows.clone();
        let xs = move |j: i64| QuadReal::int(gx + j + cols.iter().take(j.max(0) as usize).map(|&b| b as i64).sum::<i64>());
        let ys = move |k: i64| QuadReal::int(-gy + k + rows.iter().take(k.max(0) as usize).map(|&c| c as i64).sum::<i64>());
        let geo = Geometry { xs: &xs, ys: &ys };
        let mut edges = BTreeMap::new();
        svg.open_group(&format!("tile{i}"));
        draw_tile(&mut svg, spec, t, (0, 0), &geo, &mut edges);
        if spec.layers.boundaries {
            for (a, b) in edges.values() {
                svg.line(a, b, "edge");
            }
        }
        svg.close_group();
    }
    let counts = cat.counts();
    let meta = [
        ("alpha", cat.alpha.to_string()),
        ("classes", format!("{}, {}", cat.classes[0], cat.classes[1])),
        ("dedup", format!("{:?}", cat.dedup)),
        ("tiles", counts.tiles.to_string()),
    ];
    svg.finish("Patch-tile catalog", &meta, &spec.palette)
}
