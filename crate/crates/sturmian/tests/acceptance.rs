//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest harness so the
//! lines always reach the terminal.

use std::collections::HashMap;
use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sturmian::bd::{do_bounds, do_map, laczkovich_margin, Cross, Side, SquareUnion, Ubr};
use sturmian::lattice::{self, verify_axiom, AxiomCheck, Dir, LatticeParams, DEFAULT_MODES};
use sturmian::qfield::{periodic_cf, rat_int};
use sturmian::superlattice::{expansion_constant, orbit, self_similar_params, verify_psi};
use sturmian::tileset::*;
use sturmian::words::{is_c_balanced, mutually_balanced, SkewVariant};
use sturmian::{cf_eval, cf_expand, CfKind, QuadReal};

type Check = Result<(), String>;

fn q(n: i64) -> QuadReal {
    QuadReal::int(n)
}

fn surd(an: i64, ad: i64, bn: i64, bd: i64, d: u64) -> QuadReal {
    QuadReal::surd(an, ad, bn, bd, d)
}

fn zero3() -> [QuadReal; 3] {
    [q(0), q(0), q(0)]
}

fn slopes() -> [QuadReal; 3] {
    [surd(-1, 1, 1, 1, 2), surd(-2, 1, 1, 1, 6), surd(-2, 1, 1, 1, 7)]
}

fn golden() -> QuadReal {
    surd(-1, 2, 1, 2, 5)
}

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn patch_formula() -> Check {
    let n = enumerate_rect_patches(&slopes()[0], 5, 4).map_err(|e| e.to_string())?.len();
    ensure!(n == 90, "sqrt2 - 1, 5x4: {n} patches");
    for a in slopes() {
        for r1 in 1..=6 {
            for r2 in 1..=6 {
                let n = enumerate_rect_patches(&a, r1, r2).map_err(|e| e.to_string())?.len() as i64;
                ensure!(n == (r1 + r2) * (r1 + r2 + 1), "{a}: {r1}x{r2} gives {n}");
            }
        }
    }
    Ok(())
}

fn catalogs() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut sizes = Vec::new();
    for (a, bound) in slopes().into_iter().zip([27, 126, 110]) {
        let cat = build_catalog(&a, Dedup::Isometry).map_err(|e| e.to_string())?;
        ensure!(cat.tiles.len() <= bound, "{a}: {} tiles > {bound}", cat.tiles.len());
        for _ in 0..5 {
            let rho = (QuadReal::frac(rng.gen_range(0..10007), 10007), QuadReal::frac(rng.gen_range(0..10007), 10007));
            let t = tile_a_window(&cat, rho.clone(), 100).map_err(|e| format!("{a} at {:?}: {e}", (rho.0.to_string(), rho.1.to_string())))?;
            let cells: i64 = t.placed.iter().map(|p| p.tile.cells.len() as i64).sum();
            ensure!(cells >= 100 * 100, "{a}: only {cells} cells covered");
        }
        sizes.push(cat.tiles.len());
    }
    println!("      catalog sizes {sizes:?} (bounds 27, 126, 110)");
    Ok(())
}

fn phi_fixtures() -> Check {
    let cases = [((2, -1), [-1, 0, 2]), ((4, -2), [-2, 0, 3]), ((4, -3), [-3, -2, 2])];
    for ((u, v), want) in cases {
        let got = phi_cells(&rat_int(u), &rat_int(v));
        ensure!(got == want.map(rat_int), "phi ({u},{v}) = {got:?}");
    }
    let tc = |x, y, z| TileClass::new(x, y, z).unwrap();
    let want = [(tc(2, 0, 1), TileClass::M), (tc(3, 0, 2), TileClass::M), (tc(2, 0, 3), tc(0, 1, 1))];
    for (a, w) in slopes().iter().zip(want) {
        let (u, v) = minimal_poly(a).map_err(|e| e.to_string())?;
        let got = choose_tile_classes(&u, &v).map_err(|e| e.to_string())?;
        ensure!(got == w, "{a}: classes {} | {}", got.0, got.1);
    }
    Ok(())
}

fn ubr_fixtures() -> Check {
    let [a2, a6, a7] = slopes();
    let tc = |x, y, z| TileClass::new(x, y, z).unwrap();
    let [(_, h), _] = compute_ubr(&tc(2, 0, 1), &TileClass::M, &a2).map_err(|e| e.to_string())?;
    ensure!(h == Ubr::new(surd(2, 1, 1, 1, 2), surd(1, 1, 1, 1, 2)), "sqrt2: {h:?}");
    let [(_, h), _] = compute_ubr(&tc(3, 0, 2), &TileClass::M, &a6).map_err(|e| e.to_string())?;
    ensure!(h == Ubr::new(surd(3, 1, 1, 1, 6), surd(2, 1, 1, 1, 6)), "sqrt6: {h:?}");
    let [(_, h1), (_, h2)] = compute_ubr(&tc(2, 0, 3), &tc(0, 1, 1), &a7).map_err(|e| e.to_string())?;
    ensure!(h1 == Ubr::new(surd(2, 1, 1, 1, 7), surd(11, 3, 4, 3, 7)), "sqrt7 first: {h1:?}");
    ensure!(h2 == Ubr::new(q(0), surd(2, 3, 1, 3, 7)), "sqrt7 second: {h2:?}");
    Ok(())
}

fn random_quadratic(rng: &mut ChaCha8Rng, d: u64, lo: i64, hi: i64) -> QuadReal {
    surd(rng.gen_range(lo..hi), rng.gen_range(1..9), rng.gen_range(lo..hi), rng.gen_range(1..9), d)
}

fn axiom_suite() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for case in 0..50 {
        let d = [2u64, 3, 5, 6, 7, 10][case % 6];
        let alpha = loop {
            let x = random_quadratic(&mut rng, d, -20, 20).fract();
            if !x.is_rational() {
                break x;
            }
        };
        let kappa = &random_quadratic(&mut rng, d, -3, 3).abs() + &q(1);
        let r1 = random_quadratic(&mut rng, d, -10, 10);
        let r2 = random_quadratic(&mut rng, d, -10, 10);
        let rho = [-(&r1 + &r2), r1, r2];
        let p = LatticeParams::irrational(kappa.clone(), alpha.clone(), rho.clone()).map_err(|e| e.to_string())?;
        ensure!(verify_axiom(&p, 100).is_ok(), "case {case}: kappa {kappa}, alpha {alpha}");
        // breaking the zero sum is refused, and the raw lattice violates the axiom
        let mut bad = rho.clone();
        bad[0] = &bad[0] + &QuadReal::frac(1, 7);
        ensure!(LatticeParams::irrational(kappa.clone(), alpha.clone(), bad.clone()).is_err(), "case {case}: non-zero sum accepted");
        let raw = LatticeParams::mechanical_unchecked(kappa, alpha.clone(), bad, DEFAULT_MODES).map_err(|e| e.to_string())?;
        // {nα + ρ} must sweep the whole circle before a shifted rounding is guaranteed to show
        let gap = alpha.clone().min(&q(1) - &alpha).to_f64();
        let window = 100.max((4.0 / gap).ceil() as i64);
        ensure!(matches!(verify_axiom(&raw, window), AxiomCheck::Violation { .. }), "case {case}: non-zero sum passes on window {window}");
    }
    Ok(())
}

fn balancedness() -> Check {
    let r = QuadReal::frac(1, 3);
    let mut fixtures = vec![
        LatticeParams::irrational(q(1), golden(), zero3()).unwrap(),
        LatticeParams::irrational(surd(1, 1, 1, 1, 2), surd(-1, 1, 1, 1, 2), zero3()).unwrap(),
        LatticeParams::irrational(q(3), golden(), [r.clone(), -&r, q(0)]).unwrap(),
        LatticeParams::irrational(q(2), slopes()[2].clone(), zero3()).unwrap(),
        LatticeParams::periodic_example(),
        LatticeParams::kagome(),
    ];
    for (p, qq) in [(2, 5), (3, 7), (1, 3)] {
        fixtures.push(LatticeParams::rational_periodic(p, qq, q(1), &[true, false]).unwrap());
        for v in [SkewVariant::A, SkewVariant::B] {
            fixtures.push(LatticeParams::rational_skew(p, qq, q(2), v).unwrap());
        }
    }
    for (i, p) in fixtures.iter().enumerate() {
        let words: Vec<_> = Dir::ALL.iter().filter_map(|&d| p.corridor_word(d).ok()).collect();
        for w in &words {
            ensure!(is_c_balanced(w, 2, 1000).holds(), "fixture {i}: corridor word not 2-balanced");
        }
        for x in 0..words.len() {
            for y in x + 1..words.len() {
                ensure!(mutually_balanced(&words[x], &words[y], 500).holds(), "fixture {i}: words {x},{y} not mutually balanced");
            }
        }
    }
    for (p, qq) in [(2, 5), (3, 7)] {
        let l = LatticeParams::rational_periodic(p, qq, q(1), &[true, false]).unwrap();
        let a = l.corridor_word(Dir::A).unwrap();
        ensure!(!is_c_balanced(&a, 1, 200).holds(), "{p}/{qq}: word a is 1-balanced");
        for d in [Dir::B, Dir::C] {
            let w = l.corridor_word(d).unwrap();
            ensure!((-200..200).all(|n| w.at(n) == w.at(n + qq)), "{p}/{qq}: companion {d:?} not {qq}-periodic");
        }
    }
    Ok(())
}

fn psi_checks() -> Check {
    let fixed = LatticeParams::irrational(surd(1, 1, 1, 1, 2), surd(-1, 1, 1, 1, 2), zero3()).unwrap();
    let turtle = LatticeParams::irrational(q(3), golden(), zero3()).unwrap();
    let third = LatticeParams::rational_periodic(1, 3, q(2), &[true, false]).unwrap();
    for (name, p) in [("fixed point", &fixed), ("turtle", &turtle), ("1/3", &third)] {
        let c = verify_psi(p, 50).map_err(|e| format!("{name}: {e}"))?;
        ensure!(c.is_ok(), "{name}: {c:?}");
    }
    for period in [vec![1], vec![2], vec![2, 3]] {
        let (k, a) = self_similar_params(&period).map_err(|e| e.to_string())?;
        let p = LatticeParams::irrational(k.clone(), a.clone(), zero3()).map_err(|e| e.to_string())?;
        let o = orbit(&p, period.len()).map_err(|e| e.to_string())?;
        let (kk, aa, scale) = o.last().unwrap().clone();
        ensure!((kk.clone(), aa.clone()) == (k, a.clone()), "{period:?}: orbit ends at ({kk}, {aa})");
        let lambda = expansion_constant(&a).map_err(|e| e.to_string())?.lambda;
        ensure!(scale.abs() == lambda, "{period:?}: |scale| {scale} vs lambda {lambda}");
    }
    Ok(())
}

fn bd_suite() -> Check {
    let mut triples = Vec::new();
    for n in [2u64, 3, 5, 6, 7] {
        let s = QuadReal::sqrt(n).recip().unwrap();
        triples.push((s.clone(), s.clone(), n as i64));
        let l = &s * &QuadReal::frac(2, 3);
        triples.push((l, &s * &QuadReal::frac(3, 2), n as i64));
    }
    for (l, m, n) in &triples {
        let (bx, by) = do_bounds(l, m);
        let mut fib: HashMap<(i64, i64), usize> = HashMap::new();
        for x in -50..50 {
            for y in -50..50 {
                let (a, b) = do_map(l, m, *n, x, y).map_err(|e| e.to_string())?;
                ensure!((&q(a) - &(l * &q(x))).abs() <= bx, "x displacement at ({x},{y})");
                ensure!((&q(b) - &(m * &q(y))).abs() <= by, "y displacement at ({x},{y})");
                *fib.entry((a, b)).or_default() += 1;
            }
        }
        // targets whose whole preimage lies in the window
        let (lf, mf) = (l.to_f64(), m.to_f64());
        let ix = (lf * 49.0 - bx.to_f64() - 1.0).floor() as i64;
        let iy = (mf * 49.0 - by.to_f64() - 1.0).floor() as i64;
        for a in -ix..ix {
            for b in -iy..iy {
                let c = fib.get(&(a, b)).copied().unwrap_or(0);
                ensure!(c == *n as usize, "lambda {l}: target ({a},{b}) has {c} preimages, want {n}");
            }
        }
    }
    let alpha = surd(-1, 1, 1, 1, 2);
    let crosses = [
        Cross::new(QuadReal::sqrt(2).recip().unwrap(), q(1), 2, 1, alpha).unwrap(),
        Cross::new(QuadReal::sqrt(6).recip().unwrap(), q(1), 3, 2, q(1)).unwrap(),
    ];
    for cr in &crosses {
        let ubr = cr.ubr();
        for a in -6..6 {
            for b in -6 * cr.p..6 * cr.p {
                let asg = cr.assign(Side::X, a, b);
                let comp = cr.component(asg.key.0, asg.key.1);
                ensure!(
                    (comp.members_x.len(), comp.members_y.len()) == (cr.p as usize, cr.q as usize),
                    "{}:{} component sizes",
                    cr.p,
                    cr.q
                );
                let mut all = comp.members_x.clone();
                all.extend(comp.members_y.iter().cloned());
                ensure!(ubr.contains_translate(&all), "{}:{} component outside its rectangle", cr.p, cr.q);
            }
        }
    }
    // product lattice (1/δ)Z × Z against a staircase with split rows
    let d1 = golden();
    let inv = d1.recip().unwrap();
    let x: Vec<_> = (-40..40).flat_map(|i| {
        let xi = &q(i) * &inv;
        (-20..20).map(move |j| (xi.clone(), q(j)))
    }).collect();
    let mut cells = Vec::new();
    for r in 0..8i64 {
        cells.extend((0..8 - r).map(|c| (c, r)));
        if r % 3 == 0 {
            cells.extend((10..13).map(|c| (c, r)));
        }
    }
    let h = SquareUnion::new(cells);
    ensure!(2 * h.row_runs() <= h.perimeter(), "staircase runs exceed half the perimeter");
    let rep = laczkovich_margin(&x, &[h], &d1, &q(1)).map_err(|e| e.to_string())?;
    ensure!(rep.holds, "criterion fails on the staircase");
    Ok(())
}

fn turtle_slopes() -> Check {
    let cases = [(surd(5, 10, -1, 10, 5), q(3), golden()), (surd(5, 10, 1, 10, 5), q(1), surd(3, 2, -1, 2, 5))];
    for (freq, kappa, want) in cases {
        let a = lattice::slope_from_frequency(&freq, &kappa);
        ensure!(a == want, "q = {freq}, kappa = {kappa}: {a}");
    }
    Ok(())
}

fn height_families() -> Check {
    for norm in [-1, 1] {
        let mut pts = Vec::new();
        for h in 3..=8 {
            let r = height_family_tileset(h, norm).map_err(|e| format!("h={h}, N={norm}: {e}"))?;
            let prop = verify_properness(&r.catalog.classes, &r.catalog.u, &r.catalog.v);
            ensure!(prop.proper, "h={h}, N={norm}: classes not proper");
            tile_a_window(&r.catalog, (QuadReal::frac(2, 9), QuadReal::frac(4, 13)), 30)
                .map_err(|e| format!("h={h}, N={norm}: {e}"))?;
            let size = r.size() as i64;
            ensure!(size <= r.bound + 40, "h={h}, N={norm}: {size} > {}", r.bound + 40);
            pts.push((h as f64, size as f64));
        }
        // least-squares line through (h, size): positive slope below the leading coefficient,
        // and a good fit
        let n = pts.len() as f64;
        let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
        let (mx, my) = (sx / n, sy / n);
        let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
        let sxx: f64 = pts.iter().map(|(x, _)| (x - mx).powi(2)).sum();
        let syy: f64 = pts.iter().map(|(_, y)| (y - my).powi(2)).sum();
        let slope = sxy / sxx;
        let r2 = sxy * sxy / (sxx * syy);
        let lead = if norm == -1 { 24.0 } else { 16.0 };
        println!(
            "      N={norm:+}: sizes {:?}, fitted slope {slope:.2}, r^2 {r2:.3}",
            pts.iter().map(|p| p.1 as i64).collect::<Vec<_>>()
        );
        ensure!(slope > 0.0 && slope <= lead, "N={norm}: slope {slope}");
        ensure!(r2 >= 0.9, "N={norm}: r^2 {r2}");
    }
    Ok(())
}

fn cf_round_trip() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for i in 0..1000 {
        let d = [2u64, 3, 5, 6, 7, 11, 13, 14, 19, 23][i % 10];
        let x = random_quadratic(&mut rng, d, -30, 30).abs();
        if x.is_zero() {
            continue;
        }
        let kind = if i % 2 == 0 { CfKind::Regular } else { CfKind::Negative };
        let cf = cf_expand(&x, kind).map_err(|e| format!("{x}: {e}"))?;
        let back = cf_eval(&cf).map_err(|e| format!("{x}: {e}"))?.value;
        ensure!(back == x, "{x} -> {cf} -> {back}");
    }
    let s2 = surd(-1, 1, 1, 1, 2);
    let cf = cf_expand(&s2, CfKind::Regular).map_err(|e| e.to_string())?;
    ensure!(cf == periodic_cf(&[2]) || (cf.preperiod == vec![0] && cf.period == vec![2]), "sqrt2 - 1 -> {cf}");
    ensure!(cf_eval(&periodic_cf(&[2])).unwrap().value == s2, "[2 repeating] value");
    let cf = cf_expand(&golden(), CfKind::Regular).map_err(|e| e.to_string())?;
    ensure!(cf.preperiod == vec![0] && cf.period == vec![1], "golden -> {cf}");
    ensure!(cf_eval(&periodic_cf(&[1])).unwrap().value == golden(), "[1 repeating] value");
    Ok(())
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Check); 11] = [
        ("patch-count formula", patch_formula),
        ("catalog cardinalities and coverage", catalogs),
        ("phi-ratio fixtures and tile classes", phi_fixtures),
        ("UBR fixtures", ubr_fixtures),
        ("axiom suite", axiom_suite),
        ("balancedness suite", balancedness),
        ("super lattice verification", psi_checks),
        ("bounded-displacement suite", bd_suite),
        ("turtle slopes", turtle_slopes),
        ("height families", height_families),
        ("continued-fraction round trip", cf_round_trip),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let r = panic::catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let secs = t.elapsed().as_secs_f64();
        match r {
            Ok(()) => println!("PASS {:>2}. {name} ({secs:.1}s)", i + 1),
            Err(e) => {
                failed += 1;
                println!("FAIL {:>2}. {name} ({secs:.1}s): {e}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
