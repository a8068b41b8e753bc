use std::collections::BTreeSet;

use num_traits::Zero;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sturmian::bd::Ubr;
use sturmian::qfield::{rat, rat_int, QuadReal, Rat};
use sturmian::tileset::*;
use sturmian::words::FiniteWord;
use sturmian::Error;

fn q(n: i64) -> QuadReal {
    QuadReal::int(n)
}

fn sqrt2m1() -> QuadReal {
    QuadReal::surd(-1, 1, 1, 1, 2)
}

fn sqrt6m2() -> QuadReal {
    QuadReal::surd(-2, 1, 1, 1, 6)
}

fn sqrt7m2() -> QuadReal {
    QuadReal::surd(-2, 1, 1, 1, 7)
}

fn tc(x: i64, y: i64, z: i64) -> TileClass {
    TileClass::new(x, y, z).unwrap()
}

fn rho(a: i64, b: i64, c: i64, d: i64) -> (QuadReal, QuadReal) {
    (QuadReal::frac(a, b), QuadReal::frac(c, d))
}

#[test]
fn minimal_polynomials() {
    assert_eq!(minimal_poly(&sqrt2m1()).unwrap(), (rat_int(2), rat_int(-1)));
    assert_eq!(minimal_poly(&sqrt6m2()).unwrap(), (rat_int(4), rat_int(-2)));
    assert_eq!(minimal_poly(&sqrt7m2()).unwrap(), (rat_int(4), rat_int(-3)));
    assert_eq!(minimal_poly(&QuadReal::frac(2, 5)), Err(Error::RationalInput));
}

#[test]
fn phi_ratios() {
    let cases = [((2, -1), [-1, 0, 2]), ((4, -2), [-2, 0, 3]), ((4, -3), [-3, -2, 2])];
    for ((u, v), want) in cases {
        let got = phi_cells(&rat_int(u), &rat_int(v));
        assert_eq!(got, want.map(rat_int), "(u,v) = ({u},{v})");
    }
    assert_eq!(phi(&rat_int(2), &rat_int(-1), &tc(2, 0, 1)), rat_int(0));
    let n = NormalVec::new(&rat_int(2), &rat_int(-1));
    assert_eq!((n.n1, n.n2, n.n3), (rat_int(-1), rat_int(0), rat_int(2)));
}

#[test]
fn tile_class_selection() {
    let cases = [((2, -1), (tc(2, 0, 1), TileClass::M)), ((4, -2), (tc(3, 0, 2), TileClass::M)), ((4, -3), (tc(2, 0, 3), tc(0, 1, 1)))];
    for ((u, v), want) in cases {
        assert_eq!(choose_tile_classes(&rat_int(u), &rat_int(v)).unwrap(), want);
    }
    assert_eq!(tc(2, 0, 1).to_string(), "2S + L");
    assert_eq!(tc(0, 1, 1).coords(), [0, 2, 1]);
    assert_eq!(tc(4, 2, 6).reduced(), tc(2, 1, 3));
    assert!(TileClass::new(0, 0, 0).is_err());
}

#[test]
fn density_fixtures() {
    let one = QuadReal::one();
    let a = sqrt2m1();
    let b = &one - &a;
    let (d1, d2) = density_solve(&tc(2, 0, 1), &TileClass::M, &a).unwrap();
    // (1−α)² = 6 − 4√2 = 2α²
    assert_eq!(d1, &(&b * &b) / &q(2));
    assert_eq!(d1, &a * &a);
    assert_eq!(d2, &a * &b);

    let a = sqrt7m2();
    let b = &one - &a;
    let (d1, d2) = density_solve(&tc(2, 0, 3), &tc(0, 1, 1), &a).unwrap();
    assert_eq!(d1, &(&b * &b) / &q(2));
    assert_eq!(d2, &a * &b);
    assert_eq!(&(&q(3) * &d1) + &d2, &a * &a);

    assert_eq!(density_solve(&TileClass::S, &TileClass::S, &a), Err(Error::DegenerateSystem));
}

#[test]
fn ubr_fixtures() {
    let [(c1, h1), (c2, h2)] = compute_ubr(&tc(2, 0, 1), &TileClass::M, &sqrt2m1()).unwrap();
    assert_eq!((c1, c2), (tc(2, 0, 1), TileClass::M));
    assert_eq!(h1, Ubr::new(QuadReal::surd(2, 1, 1, 1, 2), QuadReal::surd(1, 1, 1, 1, 2)));
    assert_eq!(patch_size(&h1), (5, 4));
    assert_eq!(h2, Ubr::new(q(0), q(0)));

    let [(_, h), _] = compute_ubr(&tc(3, 0, 2), &TileClass::M, &sqrt6m2()).unwrap();
    assert_eq!(h, Ubr::new(QuadReal::surd(3, 1, 1, 1, 6), QuadReal::surd(2, 1, 1, 1, 6)));
    assert_eq!(patch_size(&h), (7, 6));

    let [(_, h1), (_, h2)] = compute_ubr(&tc(2, 0, 3), &tc(0, 1, 1), &sqrt7m2()).unwrap();
    assert_eq!(h1, Ubr::new(QuadReal::surd(2, 1, 1, 1, 7), QuadReal::surd(11, 3, 4, 3, 7)));
    assert_eq!(h2, Ubr::new(q(0), QuadReal::surd(2, 3, 1, 3, 7)));
    assert_eq!(patch_size(&h1), (6, 9));
    assert_eq!(patch_size(&h2), (1, 3));
}

#[test]
fn plans_and_refusals() {
    assert_eq!(plan(&sqrt2m1()).unwrap().layout, Layout::Whole { x: 2, z: 1 });
    assert_eq!(plan(&sqrt6m2()).unwrap().layout, Layout::Whole { x: 3, z: 2 });
    // √7 − 2 > 1/2
    assert_eq!(plan(&sqrt7m2()).unwrap().layout, Layout::PairedL { x: 2, z: 3 });
    assert_eq!(plan(&QuadReal::frac(2, 5)).unwrap_err(), Error::RationalSlope);
    assert_eq!(plan(&QuadReal::surd(0, 1, 1, 1, 2)).unwrap_err(), Error::SlopeOutOfRange);
}

#[test]
fn properness_fixtures() {
    let (u, v) = (rat_int(2), rat_int(-1));
    let p = verify_properness(&[tc(2, 0, 1), TileClass::M], &u, &v);
    assert!(p.proper);
    assert_eq!(p.slopes, vec![sqrt2m1()]);

    let p = verify_properness(&[TileClass::S, TileClass::M, TileClass::L], &u, &v);
    assert!(!p.proper);
    assert_eq!(p.witness, Some(Witness::Arc));

    let p = verify_properness(&[tc(2, 0, 1), TileClass::S], &u, &v);
    assert!(!p.proper);
    assert_eq!(p.witness, Some(Witness::NotOrthogonal { class: TileClass::S, phi: rat_int(-1) }));
}

#[test]
fn patch_counts() {
    assert_eq!(enumerate_rect_patches(&sqrt2m1(), 5, 4).unwrap().len(), 90);
    assert_eq!(enumerate_rect_patches(&sqrt6m2(), 7, 6).unwrap().len(), 182);
    for a in [sqrt2m1(), sqrt6m2(), sqrt7m2(), QuadReal::surd(-1, 2, 1, 2, 5)] {
        assert_eq!(enumerate_rect_patches(&a, 1, 1).unwrap().len(), 6);
    }
    for a in [sqrt2m1(), sqrt6m2(), sqrt7m2()] {
        for r1 in 1..=6 {
            for r2 in 1..=6 {
                let reps = enumerate_rect_patches(&a, r1, r2).unwrap();
                assert_eq!(reps.len() as i64, rect_patch_count(r1, r2), "{a} {r1}x{r2}");
                let distinct: BTreeSet<_> = reps.iter().map(|r| r.patch.clone()).collect();
                assert_eq!(distinct.len(), reps.len(), "{a} {r1}x{r2}");
            }
        }
    }
    assert_eq!(enumerate_rect_patches(&QuadReal::frac(1, 3), 2, 2).unwrap_err(), Error::RationalSlope);
}

/// Patch read straight off the lattice lines `b(j) = j + ⌊jα+ρ₁⌋ + ½`, `c(k)` likewise and
/// `a(i) = i + ⌈iα+ρ₀⌉ − ½`, in floating point.
fn float_patch(alpha: f64, r1v: f64, r2v: f64, r1: i64, r2: i64) -> RectPatch {
    let r0 = -r1v - r2v;
    let bl = |j: i64| j as f64 + (j as f64 * alpha + r1v).floor() + 0.5;
    let cl = |k: i64| k as f64 + (k as f64 * alpha + r2v).floor() + 0.5;
    let al = |i: i64| i as f64 + (i as f64 * alpha + r0).ceil() - 0.5;
    let mut sab = Vec::new();
    for k in -r2..0 {
        for j in -r1..0 {
            let mid = (bl(j) + bl(j + 1) + cl(k) + cl(k + 1)) / 2.0;
            let line = -al(-j - k - 1);
            sab.push((2.0 * (line - mid)).round() as i8);
        }
    }
    RectPatch {
        b: (-r1..0).map(|j| (bl(j + 1) - bl(j) - 1.0).round() as u8).collect(),
        c: (-r2..0).map(|k| (cl(k + 1) - cl(k) - 1.0).round() as u8).collect(),
        sab,
    }
}

#[test]
fn patches_match_sampled_intercepts() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (alpha, r1, r2, exact) in [(sqrt2m1(), 3, 2, true), (sqrt6m2(), 2, 2, true), (sqrt2m1(), 5, 4, false)] {
        let reps: BTreeSet<RectPatch> = enumerate_rect_patches(&alpha, r1, r2).unwrap().into_iter().map(|r| r.patch).collect();
        let af = alpha.to_f64();
        let sampled: BTreeSet<RectPatch> =
            (0..40_000).map(|_| float_patch(af, rng.gen(), rng.gen(), r1, r2)).collect();
        assert!(sampled.is_subset(&reps), "{alpha} {r1}x{r2}");
        if exact {
            assert_eq!(sampled, reps, "{alpha} {r1}x{r2}");
        }
    }
}

#[test]
fn factor_complexity() {
    // Sturmian words have exactly n + 1 factors of length n
    for a in [sqrt2m1(), sqrt7m2()] {
        for n in 1..12 {
            let f = factors(&a, n);
            assert_eq!(f.len(), n + 1);
            assert!(f.iter().all(|w| w.len() == n));
        }
    }
}

fn check_support_rules(class: &TileClass, u: &FiniteWord, v: &FiniteWord, ubr: &Ubr) {
    let (lu, lv) = patch_size(ubr);
    assert_eq!(u.count(0) as i64, class.x, "{u}");
    assert_eq!(u.marks.len(), 1);
    assert_eq!(u.letters[u.marks[0]], 1);
    let unmarked_one = |w: &FiniteWord, i: usize, l: u8| w.letters[i] == l && !w.marks.contains(&i);
    assert!(!unmarked_one(u, 0, 1) && !unmarked_one(u, u.len() - 1, 1), "{u}");
    assert_eq!(v.count(1) as i64, class.z, "{v}");
    assert_eq!(v.marks.len(), 1);
    assert_eq!(v.letters[v.marks[0]], 0);
    assert!(!unmarked_one(v, 0, 0) && !unmarked_one(v, v.len() - 1, 0), "{v}");
    assert!(u.len() as i64 <= lu && v.len() as i64 <= lv);
}

#[test]
fn support_words_toy_class() {
    let got: BTreeSet<String> = support_words(&sqrt2m1(), &tc(1, 0, 1), &Ubr::new(q(1), q(1)))
        .into_iter()
        .map(|(u, v)| format!("{u} {v}"))
        .collect();
    let want: BTreeSet<String> = ["01̇ 0̇1", "01̇ 10̇", "1̇0 0̇1", "1̇0 10̇"].iter().map(|s| s.to_string()).collect();
    assert_eq!(got, want);
}

#[test]
fn support_words_obey_marking_rules() {
    for a in [sqrt2m1(), sqrt6m2()] {
        let p = plan(&a).unwrap();
        let (class, ubr) = &p.ubrs[0];
        let all = support_words(&a, class, ubr);
        assert!(!all.is_empty());
        for (u, v) in &all {
            check_support_rules(class, u, v, ubr);
            assert!(factors(&a, u.len()).contains(&u.letters));
            assert!(factors(&a, v.len()).contains(&v.letters));
        }
    }
}

#[test]
fn catalog_supports_are_admissible() {
    for a in [sqrt2m1(), sqrt7m2()] {
        let p = plan(&a).unwrap();
        let (class, ubr) = p.ubrs[0].clone();
        // with S's down a column the UBR is read transposed
        let ubr = match p.layout {
            Layout::PairedL { .. } => Ubr::new(ubr.h, ubr.w),
            _ => ubr,
        };
        let all: BTreeSet<_> = support_words(&a, &class, &ubr).into_iter().collect();
        let cat = build_catalog(&a, Dedup::Translation).unwrap();
        let mut used = 0;
        for t in &cat.tiles {
            if let Some(pair) = &t.support_words {
                check_support_rules(&class, &pair.0, &pair.1, &ubr);
                assert!(all.contains(pair), "{} {}", pair.0, pair.1);
                used += 1;
            }
        }
        assert!(used > 0);
    }
}

fn kind_counts(t: &PatchTile) -> TileClass {
    TileClass { x: t.count(Kind::S) as i64, y: t.count(Kind::M) as i64, z: t.count(Kind::L) as i64 }
}

#[test]
fn sqrt2_catalog() {
    let a = sqrt2m1();
    let cat = build_catalog(&a, Dedup::Isometry).unwrap();
    let counts = cat.counts();
    assert!(counts.tiles <= 27, "{counts:?}");
    assert_eq!(counts.per_class[1], 1);
    let keys = cat.keys();
    assert_eq!(keys.len(), cat.tiles.len());
    let (pw, ph) = plan_patch_size(&plan(&a).unwrap());
    for t in &cat.tiles {
        assert_eq!(kind_counts(t), t.class);
        assert!(t.width() <= pw && t.height() <= ph, "{}x{}", t.width(), t.height());
        assert!(cat.contains(&t.transpose()) && cat.contains(&t.rot180()));
        assert_eq!(t.transpose().transpose(), PatchTile { support_words: None, ..t.clone() });
        assert_eq!(t.rot180().rot180().key(), t.key());
    }
    let tr = build_catalog(&a, Dedup::Translation).unwrap();
    assert!(tr.tiles.len() >= cat.tiles.len());
    let tr_iso: BTreeSet<_> = tr.tiles.iter().map(|t| t.isometry_key()).collect();
    assert_eq!(tr_iso, keys);
}

#[test]
fn catalog_json_round_trip() {
    let cat = build_catalog(&sqrt2m1(), Dedup::Isometry).unwrap();
    let back = PatchCatalog::from_json(&cat.to_json()).unwrap();
    assert_eq!(back, cat);
    let text = serde_json::to_string(&cat.to_json()).unwrap();
    let again = PatchCatalog::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
    assert_eq!(again, cat);
    assert!(PatchCatalog::from_json(&serde_json::json!({"slope": 3})).is_err());
}

#[test]
fn tiling_windows() {
    let a = sqrt2m1();
    let cat = build_catalog(&a, Dedup::Isometry).unwrap();
    let r = rho(3, 7, 5, 11);
    let n = 100;
    let t = tile_a_window(&cat, r.clone(), n).unwrap();
    assert_eq!(t.window, n);

    // the placed tiles partition the window, and every SAB lies on a lattice line
    let mut seen = BTreeSet::new();
    let cab = Cabinet::new(&a, r.clone(), -40, n + 40).unwrap();
    for p in &t.placed {
        assert!(cat.contains(&p.tile));
        for c in &p.tile.cells {
            let (j, k) = (p.origin.0 + c.dj, p.origin.1 + c.dk);
            assert!(seen.insert((j, k)), "cell ({j},{k}) covered twice");
            assert_eq!(cab.kind(j, k), c.kind);
            assert_eq!(cab.sab_from_tau(j, k, c.tau2), sab_line(&a, &r, j, k).unwrap());
        }
    }
    for j in 0..n {
        for k in 0..n {
            assert!(seen.contains(&(j, k)));
        }
    }

    // tile counts follow the cell frequencies S : M : L = (1−α)² : 2α(1−α) : α², where M counts
    // both orientations; the class densities count one orientation of M
    let (d1, d2) = density_solve(&cat.classes[0], &cat.classes[1], &a).unwrap();
    let af = a.to_f64();
    let s_freq = (1.0 - af) * (1.0 - af);
    let m_freq = 2.0 * af * (1.0 - af);
    assert!((d1.to_f64() - s_freq / 2.0).abs() < 1e-12);
    assert!((2.0 * d2.to_f64() - m_freq).abs() < 1e-12);
    let inside = |p: &&Placed| p.origin.0 >= 0 && p.origin.1 >= 0 && p.origin.0 < n && p.origin.1 < n;
    let n1 = t.placed.iter().filter(inside).filter(|p| p.tile.color == 0).count() as f64;
    let n2 = t.placed.iter().filter(inside).filter(|p| p.tile.color == 1).count() as f64;
    let area = (n * n) as f64;
    let perim = (4 * n) as f64;
    assert!((n1 - s_freq / 2.0 * area).abs() <= 2.0 * perim, "{n1}");
    assert!((n2 - m_freq * area).abs() <= 2.0 * perim, "{n2}");

    assert!(tile_a_window(&cat, r.clone(), 0).unwrap().placed.is_empty());
    let empty = PatchCatalog { tiles: vec![], provenance: vec![], ..cat };
    assert_eq!(tile_a_window(&empty, r, 10).unwrap_err(), Error::CoverageGap(0, 0));
}

#[test]
fn paired_catalog_covers() {
    let cat = build_catalog(&sqrt7m2(), Dedup::Isometry).unwrap();
    assert!(cat.tiles.len() <= 110);
    for t in &cat.tiles {
        assert_eq!(kind_counts(t), t.class);
    }
    for r in [rho(1, 3, 2, 7), rho(9, 10, 1, 10)] {
        tile_a_window(&cat, r, 60).unwrap();
    }
}

#[test]
fn height_slopes() {
    assert_eq!(height_slope(6, -1).unwrap(), QuadReal::surd(-3, 1, 1, 1, 10));
    assert_eq!(height_slope(6, 1).unwrap(), QuadReal::surd(3, 1, -2, 1, 2));
    for h in 3..10 {
        for n in [-1, 1] {
            let a = height_slope(h, n).unwrap();
            let (u, v) = minimal_poly(&a).unwrap();
            // α² − Nhα + N = 0
            assert_eq!(u, rat_int(-(n as i64) * h));
            assert_eq!(v, rat_int(n as i64));
            assert!(a.signum() > 0 && a < QuadReal::one());
        }
    }
    assert!(height_slope(2, -1).is_err());
    assert_eq!(height_slope(5, 0).unwrap_err(), Error::NotAUnit);
}

#[test]
fn height_three_families() {
    for norm in [-1, 1] {
        let r = height_family_tileset(3, norm).unwrap();
        assert!(r.size() as i64 <= r.bound + 40, "N={norm}: {}", r.size());
        for t in &r.catalog.tiles {
            assert_eq!(kind_counts(t), t.class);
        }
        tile_a_window(&r.catalog, rho(2, 9, 4, 13), 50).unwrap();
    }
}

fn quadratic_slope() -> impl Strategy<Value = QuadReal> {
    (2u64..60).prop_filter("non-square", |d| {
        let r = (*d as f64).sqrt() as u64;
        r * r != *d
    })
    .prop_flat_map(|d| (Just(d), 1i64..4))
    .prop_map(|(d, m)| {
        // fractional part of m·√d
        let x = &QuadReal::sqrt(d) * &QuadReal::int(m);
        x.fract()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn chosen_classes_are_proper(alpha in quadratic_slope()) {
        let (u, v) = minimal_poly(&alpha).unwrap();
        let (t1, t2) = choose_tile_classes(&u, &v).unwrap();
        prop_assert!(phi(&u, &v, &t1).is_zero());
        prop_assert!(phi(&u, &v, &t2).is_zero());
        prop_assert_eq!(t1, t1.reduced());
        let p = verify_properness(&[t1, t2], &u, &v);
        prop_assert!(p.proper, "{:?}", p);
        prop_assert!(p.slopes.contains(&alpha));
        if let Ok((d1, d2)) = density_solve(&t1, &t2, &alpha) {
            prop_assert!(d1.signum() > 0 && d2.signum() >= 0);
        }
    }

    #[test]
    fn phi_zero_iff_proper(alpha in quadratic_slope(), m in 1i64..5, n in 0i64..5, x in 0i64..6, y in 0i64..6, z in 1i64..6) {
        let (u, v) = minimal_poly(&alpha).unwrap();
        let (t1, t2) = choose_tile_classes(&u, &v).unwrap();
        let combo = t1.scaled(m).add(t2.scaled(n));
        prop_assert!(phi(&u, &v, &combo).is_zero());
        prop_assert!(verify_properness(&[t1, t2, combo], &u, &v).proper);
        let other = tc(x, y, z);
        let f = phi(&u, &v, &other);
        if !f.is_zero() {
            let p = verify_properness(&[t1, other], &u, &v);
            prop_assert!(!p.proper);
            prop_assert_eq!(p.witness, Some(Witness::NotOrthogonal { class: other, phi: f }));
        }
    }

    #[test]
    fn sab_offsets_lie_on_lattice_lines(n1 in 0i64..97, n2 in 0i64..89, j in -8i64..8, k in -8i64..8) {
        let alpha = sqrt6m2();
        let r = (QuadReal::frac(n1, 97), QuadReal::frac(n2, 89));
        let cab = Cabinet::new(&alpha, r.clone(), -10, 10).unwrap();
        let t = cab.tau2(j, k);
        prop_assert!((-1..=1).contains(&t));
        if cab.kind(j, k) == Kind::M {
            prop_assert_eq!(t, 0);
        }
        prop_assert_eq!(cab.sab_from_tau(j, k, t), sab_line(&alpha, &r, j, k).unwrap());
    }

    #[test]
    fn normalized_class_sums_to_one(x in 0i64..9, y in 0i64..9, z in 1i64..9) {
        let n = tc(x, y, z).normalized();
        prop_assert_eq!(&n[0] + &n[1] + &n[2], Rat::from_integer(1.into()));
        prop_assert_eq!(n[1].clone() * rat(1, 2) * rat_int(x + 2 * y + z), rat_int(y));
    }
}
