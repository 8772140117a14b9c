use astro_float::{BigFloat, Consts, RoundingMode};
use hardy_core::hardy::x_of;
use hardy_core::{build_level, build_level_with, Error, Profile};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};

/// −2^{−1} mod N through the extended Euclidean algorithm.
fn admissible_residue(n: u64) -> BigUint {
    let e = BigInt::from(2).extended_gcd(&BigInt::from(n));
    assert!(e.gcd.is_one());
    let inv = e.x.mod_floor(&BigInt::from(n));
    let r = (BigInt::from(n) - inv).mod_floor(&BigInt::from(n));
    r.to_biguint().unwrap()
}

/// Smallest m > s with m ≡ r (mod N).
fn next_in_class(s: &BigUint, r: &BigUint, n: u64) -> BigUint {
    let n = BigUint::from(n);
    let start = s + 1u32;
    let gap = (BigInt::from(r.clone()) - BigInt::from(start.clone())).mod_floor(&BigInt::from(n));
    start + gap.to_biguint().unwrap()
}

fn oracle_sequence(n: u64, x: usize, first_seed: BigUint) -> Vec<BigUint> {
    let modulus = 4 * n + 1;
    let r = admissible_residue(modulus);
    let mut out = vec![next_in_class(&first_seed, &r, modulus)];
    while out.len() < x {
        let s = out.last().unwrap() * 2u32;
        out.push(next_in_class(&s, &r, modulus));
    }
    out
}

#[test]
fn recurrence_matches_modular_inverse_oracle() {
    for n in [50u64, 64, 500, 1234, 10_000] {
        let lv = build_level(n).unwrap();
        let expect = oracle_sequence(n, lv.x(), BigUint::from(n).pow(4));
        assert_eq!(lv.m_seq(), expect.as_slice(), "n = {n}");
    }
}

#[test]
fn mini_recurrence_matches_oracle() {
    for n in [50u64, 333, 1000] {
        let lv = build_level_with(n, Profile::Mini).unwrap();
        let expect = oracle_sequence(n, lv.x(), BigUint::from(2 * n - 1));
        assert_eq!(lv.m_seq(), expect.as_slice(), "n = {n}");
    }
}

#[test]
fn level_500_orders() {
    let lv = build_level(500).unwrap();
    assert_eq!(lv.x(), 131);
    assert_eq!(lv.m(1), &BigUint::from(62_500_001_383u64));
    let digits: Vec<usize> = [1, 66, 110, 131].iter().map(|&l| lv.m(l).to_string().len()).collect();
    assert_eq!(digits, vec![11, 31, 44, 50]);
    assert!((lv.big_m() + 4.6937).abs() < 1e-3);
}

#[test]
fn level_10000_numbers() {
    let lv = build_level(10_000).unwrap();
    assert_eq!(lv.x(), 3093);
    assert!((lv.big_m() + 4.6863).abs() < 1e-3);
    assert_eq!(lv.modulus(), 40_001);
    for w in lv.m_seq().windows(2) {
        assert!(w[1] > &w[0] * 2u32);
        assert!(((&w[1] * 2u32 + 1u32) % 40_001u32).is_zero());
    }
}

#[test]
fn small_levels_rejected() {
    for n in [0u64, 1, 49] {
        assert!(matches!(build_level(n), Err(Error::LevelTooSmall(_))));
    }
}

/// ⌊(N/4)(1 − (ln n)^{−1/6})⌋ characterized as the largest x with
/// n ≥ exp((1 − 4x/N)^{−6}), evaluated at working precision `p`.
fn x_oracle(n: u64, p: usize) -> u64 {
    let rm = RoundingMode::ToEven;
    let mut cc = Consts::new().unwrap();
    let big_n = 4 * n + 1;
    let lhs = BigFloat::from_u64(n, p);
    let holds = |x: u64, cc: &mut Consts| {
        let one = BigFloat::from_u64(1, p);
        let a = one.sub(
            &BigFloat::from_u64(4 * x, p).div(&BigFloat::from_u64(big_n, p), p, rm),
            p,
            rm,
        );
        if a.is_negative() || a.is_zero() {
            return false;
        }
        let e = one.div(&a.powi(6, p, rm), p, rm).exp(p, rm, cc);
        lhs.cmp(&e).unwrap() >= 0
    };
    let guess = x_of(n);
    let mut x = guess.saturating_sub(2);
    while holds(x + 1, &mut cc) {
        x += 1;
    }
    assert!(holds(x, &mut cc));
    x
}

#[test]
fn floor_guard_agrees_with_precision_doubling_oracle() {
    let ns: Vec<u64> = (50..400).chain([500, 1000, 4096, 9999, 10_000, 65_536, 1_000_000]).collect();
    for n in ns {
        let a = x_oracle(n, 256);
        let b = x_oracle(n, 512);
        assert_eq!(a, b, "n = {n}");
        assert_eq!(x_of(n), a, "n = {n}");
    }
}

#[test]
fn summary_fields() {
    let s = build_level(500).unwrap().summary();
    assert_eq!(s.x_n, 131);
    assert_eq!(s.m_digits.len(), 131);
    assert_eq!(s.q_n_digits, 50);
    let v = serde_json::to_value(&s).unwrap();
    assert!(v.get("M_n").is_some());
}
