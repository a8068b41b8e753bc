use num_bigint::BigInt;
use sturmian::lattice::*;
use sturmian::qfield::{cf_prefix, CfKind, QuadReal};
use sturmian::superlattice::*;
use sturmian::words::SkewVariant;

fn q(an: i64, ad: i64, bn: i64, bd: i64, d: u64) -> QuadReal {
    QuadReal::surd(an, ad, bn, bd, d)
}

fn zero3() -> [QuadReal; 3] {
    [QuadReal::zero(), QuadReal::zero(), QuadReal::zero()]
}

fn silver() -> (QuadReal, QuadReal) {
    (q(1, 1, 1, 1, 2), q(-1, 1, 1, 1, 2))
}

fn turtle() -> LatticeParams {
    LatticeParams::irrational(QuadReal::int(3), q(-1, 2, 1, 2, 5), zero3()).unwrap()
}

#[test]
fn psi_examples() {
    let (k, a) = silver();
    let p = LatticeParams::irrational(k.clone(), a.clone(), zero3()).unwrap();
    let s = psi(&p).unwrap();
    assert_eq!(s.scale, -&k);
    assert_eq!((s.params.kappa.clone(), s.params.alpha.clone()), (k, a));

    let s = psi(&turtle()).unwrap();
    assert_eq!(s.params.kappa, QuadReal::frac(4, 3));
    assert_eq!(s.params.alpha, q(-1, 2, 1, 2, 5));

    let l = LatticeParams::rational_periodic(1, 2, QuadReal::int(2), &[true]).unwrap();
    let s = psi(&l).unwrap();
    assert_eq!(s.tag, Tag::SlopeZero);
    assert!(s.params.alpha.is_zero());
    assert!(matches!(psi(&LatticeParams::kagome()), Err(sturmian::Error::SlopeZero)));
}

#[test]
fn psi_star_examples() {
    let ks = q(3, 2, 1, 2, 5);
    let a_s = q(3, 2, -1, 2, 5);
    let p = StarParams { kappa: ks.clone(), alpha: a_s.clone(), rho: zero3() };
    let (scale, next) = psi_star(&p).unwrap();
    assert_eq!(scale, ks);
    assert_eq!((next.kappa, next.alpha), (ks, a_s));
    let bad = StarParams { kappa: QuadReal::int(3), alpha: QuadReal::frac(1, 3), rho: zero3() };
    assert!(psi_star(&bad).is_err());
}

#[test]
fn duality_agrees_on_window() {
    let r = QuadReal::frac(2, 7);
    let rho = [r.clone(), q(0, 1, 1, 3, 5), -&(&r + &q(0, 1, 1, 3, 5))];
    let p = LatticeParams::irrational(QuadReal::int(2), q(-1, 2, 1, 2, 5), rho).unwrap();
    let s = StarParams::from_params(&p);
    assert_eq!(s.kappa, QuadReal::int(3));
    for d in Dir::ALL {
        for n in -100..=100 {
            assert_eq!(p.line_coord(d, n), s.line_coord(d, n));
        }
    }
}

#[test]
fn psi_inverse_examples() {
    let (k, a) = silver();
    let p = LatticeParams::irrational(k.clone(), a.clone(), zero3()).unwrap();
    let InverseStep::Lattice(inv) = psi_inverse(&p).unwrap() else { panic!() };
    let back = psi(&inv.params).unwrap();
    assert_eq!((back.params.kappa, back.params.alpha), (k, a));
    assert_eq!(psi_inverse(&turtle()).unwrap(), InverseStep::Trigonal);
    let p = LatticeParams::irrational(QuadReal::frac(4, 3), q(-1, 2, 1, 2, 5), zero3()).unwrap();
    let InverseStep::Lattice(inv) = psi_inverse(&p).unwrap() else { panic!() };
    assert_eq!(inv.params.kappa, QuadReal::int(3));
    assert_eq!(inv.params.alpha, q(-1, 2, 1, 2, 5));
    // unit strips: widths 1 and κ − ⌊κ⌋ + 1 = 1 + 1/κ₋₁
    let pts = insertion_points(&QuadReal::frac(7, 3));
    assert_eq!(pts, vec![QuadReal::frac(2, 3), QuadReal::frac(5, 3)]);
}

#[test]
fn expansion_constants() {
    let golden = q(-1, 2, 1, 2, 5);
    let e = expansion_constant(&golden).unwrap();
    assert_eq!(e.lambda, q(1, 2, 1, 2, 5));
    assert_eq!(e.norm, -1);
    let e = expansion_constant(&q(-1, 1, 1, 1, 2)).unwrap();
    assert_eq!(e.lambda, q(1, 1, 1, 1, 2));
    assert_eq!(e.norm, -1);
    // α = [2,3 repeating]: M = [[1,3],[2,7]]
    let (_, a) = self_similar_params(&[2, 3]).unwrap();
    let e = expansion_constant(&a).unwrap();
    assert_eq!(e.matrix, [[BigInt::from(1), BigInt::from(3)], [BigInt::from(2), BigInt::from(7)]]);
    assert_eq!(e.lambda, q(4, 1, 1, 1, 15));
    assert_eq!(e.norm, 1);
    // λ = ∏ 1/T^j(α) over one period
    let mut prod = QuadReal::one();
    let mut x = a.clone();
    for _ in 0..2 {
        let inv = x.recip().unwrap();
        prod = &prod * &inv;
        x = &inv - &QuadReal::from_bigint(inv.floor());
    }
    assert_eq!(prod, e.lambda);
    // the value printed as "[8̄]* = 4 − √15" is 1/λ
    assert_eq!(e.lambda.recip().unwrap(), q(4, 1, -1, 1, 15));
    assert!(expansion_constant(&q(0, 1, 1, 1, 2)).is_err());
}

#[test]
fn fundamental_lattices() {
    let f = fundamental_lattice(&q(1, 1, 1, 1, 2)).unwrap();
    assert_eq!((f.h, f.norm), (2, -1));
    assert_eq!(f.params.kappa, q(1, 1, 1, 1, 2));
    assert_eq!(f.params.alpha, q(-1, 1, 1, 1, 2));
    let f = fundamental_lattice(&q(3, 2, 1, 2, 5)).unwrap();
    assert_eq!((f.h, f.norm), (3, 1));
    let s = f.star.unwrap();
    assert_eq!((s.kappa, s.alpha), (q(3, 2, 1, 2, 5), q(3, 2, -1, 2, 5)));
    assert!(matches!(fundamental_lattice(&QuadReal::int(2)), Err(sturmian::Error::NotAUnit)));
    assert!(matches!(fundamental_lattice(&q(1, 1, 1, 1, 3)), Err(sturmian::Error::NotAUnit)));
}

#[test]
fn sublattices() {
    let (k, a) = silver();
    let p = LatticeParams::irrational(k, a, zero3()).unwrap();
    assert_eq!(sublattice(&p, 1).unwrap(), p);
    let s = sublattice(&p, 2).unwrap();
    assert_eq!(s.kappa, q(2, 1, 2, 1, 2));
    assert_eq!(s.alpha, q(-2, 1, 2, 1, 2));
    for d in Dir::ALL {
        for i in -40..40 {
            assert_eq!(s.line_coord(d, i), p.line_coord(d, 2 * i));
        }
    }
    let r = LatticeParams::rational_periodic(2, 5, QuadReal::int(1), &[true, false]).unwrap();
    let s = sublattice(&r, 3).unwrap();
    for i in -20..20 {
        assert_eq!(s.line_coord(Dir::A, i), r.line_coord(Dir::A, 3 * i));
    }
}

#[test]
fn fundamental_lattice_is_a_sublattice() {
    use num_traits::ToPrimitive;
    for period in [vec![1], vec![2], vec![2, 3], vec![1, 2], vec![3, 1, 2], vec![1, 1, 4]] {
        let (k, a) = self_similar_params(&period).unwrap();
        let p = LatticeParams::irrational(k, a, zero3()).unwrap();
        let e = expansion_constant(&p.alpha).unwrap();
        // n = q_{k−1}, the lower-left entry of M(α)
        let n = e.matrix[1][0].to_i64().unwrap();
        let sub = sublattice(&p, n).unwrap();
        let f = fundamental_lattice(&e.lambda).unwrap();
        assert_eq!((sub.kappa.clone(), sub.alpha.clone()), (f.params.kappa.clone(), f.params.alpha.clone()), "{period:?}");
        for d in Dir::ALL {
            for i in -20..20 {
                assert_eq!(sub.line_coord(d, i), p.line_coord(d, n * i));
            }
        }
        assert!(verify_axiom(&sub, 30).is_ok());
    }
}

#[test]
fn verify_psi_fixtures() {
    let (k, a) = silver();
    let p = LatticeParams::irrational(k, a, zero3()).unwrap();
    assert!(verify_psi(&p, 50).unwrap().is_ok());
    assert!(verify_psi(&turtle(), 50).unwrap().is_ok());
    let r = QuadReal::frac(1, 3);
    let p = LatticeParams::irrational(QuadReal::int(2), q(-1, 2, 1, 2, 5), [r.clone(), -&r, QuadReal::zero()]).unwrap();
    assert!(verify_psi(&p, 50).unwrap().is_ok());
}

#[test]
fn verify_psi_rational_families() {
    // α = 1/(d+2), d = 1: F(n) = −κ(nκ₁ + ε(−n))
    for choices in [vec![true], vec![false], vec![true, false, false, true]] {
        let l = LatticeParams::rational_periodic(1, 3, QuadReal::int(2), &choices).unwrap();
        assert!(verify_psi(&l, 40).unwrap().is_ok(), "{choices:?}");
        assert!(verify_psi_with_branch(&l, 40, RationalBranch::SlopeOne).unwrap().is_ok());
    }
    for (p, qq) in [(2, 5), (3, 7), (3, 5)] {
        let l = LatticeParams::rational_periodic(p, qq, q(1, 1, 1, 1, 2), &[true, false]).unwrap();
        assert!(verify_psi(&l, 60).unwrap().is_ok());
        let s = psi(&l).unwrap();
        assert!(verify_axiom(&s.params, 30).is_ok());
        for v in [SkewVariant::A, SkewVariant::B] {
            let l = LatticeParams::rational_skew(p, qq, QuadReal::int(2), v).unwrap();
            assert!(verify_psi(&l, 60).unwrap().is_ok());
            let s = psi(&l).unwrap();
            assert!(verify_axiom(&s.params, 30).is_ok());
        }
    }
    for v in [SkewVariant::A, SkewVariant::B] {
        let l = LatticeParams::rational_skew(1, 4, QuadReal::int(2), v).unwrap();
        assert!(verify_psi(&l, 60).unwrap().is_ok());
    }
}

#[test]
fn verify_positive_super_lattice() {
    let p = StarParams::from_params(&turtle());
    assert!(verify_psi_star(&p, 50).unwrap().is_ok());
    let p = StarParams { kappa: q(3, 2, 1, 2, 5), alpha: q(3, 2, -1, 2, 5), rho: zero3() };
    assert!(verify_psi_star(&p, 50).unwrap().is_ok());
}

#[test]
fn shift_conjugacy() {
    let pairs = [
        silver(),
        (QuadReal::int(3), q(-1, 2, 1, 2, 5)),
        self_similar_params(&[2, 3]).unwrap(),
        (q(0, 1, 1, 1, 3), q(0, 1, 1, 1, 7).fract()),
        (q(1, 2, 1, 2, 13), q(0, 1, 1, 1, 6).fract()),
    ];
    for (k0, a0) in pairs {
        // bi-infinite digits: (…, d₋₁, d₀ | d₁, d₂, …)
        let past: Vec<BigInt> = cf_prefix(&k0, CfKind::Regular, 12);
        let future: Vec<BigInt> = cf_prefix(&a0, CfKind::Regular, 14)[1..].to_vec();
        let (mut k, mut a) = (k0.clone(), a0.clone());
        for n in 1..=10usize {
            let (k1, a1) = psi_params(&k, &a).unwrap();
            k = k1;
            a = a1;
            let kd = cf_prefix(&k, CfKind::Regular, 3);
            let ad = cf_prefix(&a, CfKind::Regular, 3);
            // κ_n = [d_n; d_{n−1}, …], α_n = [d_{n+1}, …]
            assert_eq!(kd[0], future[n - 1]);
            let prev = if n >= 2 { future[n - 2].clone() } else { past[0].clone() };
            assert_eq!(kd[1], prev);
            assert_eq!(ad[1], future[n]);
        }
    }
}

#[test]
fn self_similarity() {
    for period in [vec![1], vec![2], vec![2, 3]] {
        let (k, a) = self_similar_params(&period).unwrap();
        let p = LatticeParams::irrational(k.clone(), a.clone(), zero3()).unwrap();
        let orbit = orbit(&p, period.len()).unwrap();
        let (kk, aa, scale) = orbit.last().unwrap().clone();
        assert_eq!((kk, aa), (k, a.clone()));
        assert_eq!(scale.abs(), expansion_constant(&a).unwrap().lambda);
    }
}

#[test]
fn approximation_bounds() {
    let r = QuadReal::frac(1, 5);
    let p = LatticeParams::irrational(QuadReal::int(2), q(-1, 1, 1, 1, 2), [r.clone(), -&r, QuadReal::zero()]).unwrap();
    let half = QuadReal::frac(1, 2);
    let kh = p.kappa.scale(&sturmian::qfield::rat(1, 2));
    for d in Dir::ALL {
        for n in -100..=100 {
            assert!(trigonal_error(&p, d, n) <= half);
            assert!(cutting_error(&p, d, n).unwrap() <= kh);
        }
    }
}
