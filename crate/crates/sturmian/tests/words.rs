use std::collections::BTreeSet;

use proptest::prelude::*;
use sturmian::words::{
    central_word, christoffel, classify_markoff, in_z_plus_alpha_z, is_c_balanced, mechanical_word, mutually_balanced,
    slope, slope_deviation_ok, BiWord, FiniteWord, Markoff, Mode, SkewVariant,
};
use sturmian::{Error, QuadReal};

fn silver() -> QuadReal {
    QuadReal::surd(-1, 1, 1, 1, 2)
}

fn letters(w: &FiniteWord) -> String {
    w.letters.iter().map(|d| char::from(b'0' + d)).collect()
}

#[test]
fn christoffel_fixtures() {
    assert_eq!(letters(&christoffel(2, 5, Mode::Lower).unwrap()), "00101");
    assert_eq!(letters(&christoffel(2, 5, Mode::Upper).unwrap()), "10100");
    assert_eq!(letters(&christoffel(3, 7, Mode::Lower).unwrap()), "0010101");
    assert_eq!(letters(&central_word(3, 7).unwrap()), "01010");
    assert_eq!(christoffel(2, 4, Mode::Lower), Err(Error::NotCoprime(2, 4)));
    assert_eq!(christoffel(0, 1, Mode::Lower), Err(Error::DegenerateSlope));
    for (p, q) in [(1, 2), (2, 5), (3, 8), (5, 13), (4, 11)] {
        let c = central_word(p, q).unwrap();
        assert!(c.is_palindrome(), "{p}/{q}");
        assert_eq!(c.len() as i64, q - 2);
        let lo = christoffel(p, q, Mode::Lower).unwrap();
        assert_eq!(lo.mirror().letters, christoffel(p, q, Mode::Upper).unwrap().letters);
        assert_eq!(lo.height() as i64, p);
    }
}

#[test]
fn finite_word_text() {
    let w = FiniteWord::parse("01\u{307}10").unwrap();
    assert_eq!(w.marks, vec![1]);
    assert!(w.is_marked(1));
    assert_eq!(w.to_string(), "01\u{307}10");
    assert_eq!(w.mirror().marks, vec![2]);
    assert_eq!(w.concat(&w).marks, vec![1, 5]);
    assert!(FiniteWord::parse("012").is_err());
}

#[test]
fn mechanical_words_match_float_formula() {
    let a = silver();
    let rho = QuadReal::frac(1, 3);
    let w = mechanical_word(&a, &rho, Mode::Lower).unwrap();
    let (af, rf) = (a.to_f64(), 1.0 / 3.0);
    for n in -200i64..200 {
        let f = |k: i64| (k as f64 * af + rf).floor() as i64;
        assert_eq!(w.at(n) as i64, f(n + 1) - f(n), "n = {n}");
    }
    assert_eq!(mechanical_word(&QuadReal::frac(3, 2), &rho, Mode::Lower), Err(Error::SlopeOutOfRange));
}

#[test]
fn lower_and_upper_differ_only_at_integer_points() {
    let a = silver();
    // nα lands on an integer only at n = 0
    let lo = mechanical_word(&a, &QuadReal::zero(), Mode::Lower).unwrap();
    let up = mechanical_word(&a, &QuadReal::zero(), Mode::Upper).unwrap();
    let diff: Vec<i64> = (-100..100).filter(|&n| lo.at(n) != up.at(n)).collect();
    assert_eq!(diff, vec![-1, 0]);
    assert!(mutually_balanced(&lo, &up, 200).holds());
}

#[test]
fn sturmian_complexity() {
    let w = mechanical_word(&silver(), &QuadReal::frac(2, 7), Mode::Lower).unwrap();
    let v = w.window(-600, 600);
    for n in 1..=12 {
        let f: BTreeSet<&[u8]> = v.windows(n).collect();
        assert_eq!(f.len(), n + 1, "length {n}");
    }
}

#[test]
fn balance_checks() {
    let w = mechanical_word(&silver(), &QuadReal::zero(), Mode::Lower).unwrap();
    assert!(is_c_balanced(&w, 1, 500).holds());
    let bad = BiWord::periodic_str("0011");
    assert!(!is_c_balanced(&bad, 1, 20).holds());
    assert!(is_c_balanced(&bad, 2, 20).holds());
    let other = mechanical_word(&QuadReal::frac(3, 5), &QuadReal::zero(), Mode::Lower).unwrap();
    assert!(!mutually_balanced(&w, &other, 50).holds());
    assert!(slope_deviation_ok(&w, &silver(), 1000));
    assert!(!slope_deviation_ok(&BiWord::ones(), &silver(), 10));
}

#[test]
fn markoff_classes() {
    let a = silver();
    let on = mechanical_word(&a, &(&a * &QuadReal::int(3)), Mode::Lower).unwrap();
    let off = mechanical_word(&a, &QuadReal::frac(1, 2), Mode::Lower).unwrap();
    assert_eq!(classify_markoff(&on, 100).unwrap().class, Markoff::MH3);
    assert_eq!(classify_markoff(&off, 100).unwrap().class, Markoff::MH2);
    assert_eq!(in_z_plus_alpha_z(&a, &(&a + &QuadReal::int(2))), Some(true));
    assert_eq!(in_z_plus_alpha_z(&a, &QuadReal::frac(1, 2)), Some(false));
    let c = central_word(2, 5).unwrap();
    for v in [SkewVariant::A, SkewVariant::B] {
        let s = BiWord::skew(&c, v, 0);
        assert_eq!(classify_markoff(&s, 100).unwrap().class, Markoff::MH4);
        assert_eq!(slope(&s), Some(QuadReal::frac(2, 5)));
    }
    let periodic = BiWord::blocks(&c, &[true]);
    assert_eq!(classify_markoff(&periodic, 100).unwrap().class, Markoff::MH1);
    assert_eq!(classify_markoff(&BiWord::periodic_str("0011"), 10).unwrap().class, Markoff::NotOneBalanced);
}

#[test]
fn block_words() {
    let c = central_word(2, 5).unwrap();
    let w = BiWord::blocks(&c, &[true, false]);
    // blocks of length q: w₀ = f₋₁f₀ sits at indices −1, 0
    assert_eq!((w.at(-1), w.at(0)), (0, 1));
    assert_eq!((w.at(4), w.at(5)), (1, 0));
    assert_eq!(w.height(0, 10), w.window(0, 10).iter().map(|&x| x as i64).sum::<i64>());
    assert_eq!(w.height(10, 0), -w.height(0, 10));
}

proptest! {
    #[test]
    fn mechanical_heights_are_floor_differences(rn in 0i64..100, a in -300i64..300, len in 0i64..300) {
        let alpha = silver();
        let rho = QuadReal::frac(rn, 100);
        let w = mechanical_word(&alpha, &rho, Mode::Lower).unwrap();
        let b = a + len;
        let fl = |n: i64| (&(&alpha * &QuadReal::int(n)) + &rho).floor_i64();
        prop_assert_eq!(w.height(a, b), fl(b) - fl(a));
        prop_assert_eq!(w.height(a, b), w.window(a, b).iter().map(|&x| x as i64).sum::<i64>());
    }

    #[test]
    fn periodic_heights(u in proptest::collection::vec(0u8..2, 1..8), phase in -10i64..10, a in -50i64..50, len in 0i64..60) {
        let w = BiWord::periodic(&u, phase);
        let direct: i64 = (a..a + len).map(|n| w.at(n) as i64).sum();
        prop_assert_eq!(w.height(a, a + len), direct);
    }

    #[test]
    fn christoffel_words_are_balanced(p in 1i64..30, q in 2i64..40) {
        prop_assume!(p < q && num_integer::gcd(p, q) == 1);
        let w = BiWord::periodic(&christoffel(p, q, Mode::Lower).unwrap().letters, 0);
        prop_assert!(is_c_balanced(&w, 1, 2 * q).holds());
    }
}
