use std::f64::consts::PI;

use hardy_core::rng::substream;
use hardy_core::spectral::{default_chain, midpoint_grid};
use hardy_core::{build_chain, build_chain_with, BigLag, Certificate, Profile, RationalAngle, SpacingRule};
use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;

#[test]
fn telescoping_block_sums() {
    let ch = build_chain_with(&[50, 60], SpacingRule::Standard, Profile::Mini).unwrap();
    let b = &ch.blocks()[0];
    let mut rng = substream(1, 0);
    for _ in 0..5 {
        let t = RationalAngle::from_ratio(rng.random_range(-999..1000), 1000).unwrap();
        let start = ch.partial_fourier_sum_f(&(&b.c - 1u32), &t).unwrap();
        let end = ch.partial_fourier_sum_f(&b.end, &t).unwrap();
        let expect = b.weight * (b.level.phi_eval(&t.scale(&b.c)) - 0.5);
        assert!((2.0 * PI * (end - start) - expect).abs() < 1e-8);
        let closed = ch.block_boundary_sum(1, &t).unwrap() - ch.block_boundary_sum(0, &t).unwrap();
        assert!((2.0 * PI * closed - expect).abs() < 1e-12);
    }
}

#[test]
fn boundary_sum_on_default_chain_is_closed_form() {
    let ch = default_chain().unwrap();
    let t = RationalAngle::from_ratio(1, 3).unwrap();
    let s2 = ch.block_boundary_sum(2, &t).unwrap();
    assert!((s2 - ch.density_eval(&t)).abs() < 1e-12);
    let s1 = ch.block_boundary_sum(1, &t).unwrap();
    let b2 = &ch.blocks()[1];
    let jump = b2.weight * (b2.level.phi_eval(&t.scale(&b2.c)) - 0.5) / (2.0 * PI);
    assert!((s2 - s1 - jump).abs() < 1e-12);
}

#[test]
fn zero_structure_of_default_chain() {
    let ch = default_chain().unwrap();
    let (b1, b2) = (&ch.blocks()[0], &ch.blocks()[1]);
    let gap = &b1.end + 1u32;
    assert!(gap < b2.c);
    assert_eq!(ch.gamma(&gap).value, 0.0);
    let mut rng = substream(2, 0);
    for _ in 0..300 {
        let r: u64 = rng.random();
        let s: u64 = rng.random_range(1..1u64 << 62);
        let inside = &b2.c * BigUint::from(r) + BigUint::from(s);
        assert_eq!(ch.gamma(&inside).value, 0.0);
        let beyond = &b2.end + BigUint::from(r) + 1u32;
        assert_eq!(ch.gamma(&beyond).value, 0.0);
        let rec = ch.gamma(&(&b2.c * BigUint::from(r.max(1))));
        assert_eq!(rec.block, Some(2));
        assert_eq!(rec.r, Some(BigLag::from(r.max(1))));
    }
}

#[test]
fn first_block_lags_match_coefficients() {
    let ch = default_chain().unwrap();
    let lv = &ch.blocks()[0].level;
    let w = ch.blocks()[0].weight;
    for h in [1u64, 2, 3, 1000, 1001] {
        let expect = w * lv.phi_coeff(&BigUint::from(h));
        assert_eq!(ch.gamma_value(h), expect);
    }
}

#[test]
fn riemann_lebesgue_trend_default_block_one() {
    let ch = default_chain().unwrap();
    let q = ch.blocks()[0].level.q_n().clone();
    let band = &q / 20u32;
    let mut rng = substream(3, 0);
    let mut first: f64 = (1..=2000u64).map(|r| ch.gamma_value(r).abs()).fold(0.0, f64::max);
    let mut last: f64 = 0.0;
    let bits = band.bits();
    for _ in 0..2000 {
        let mut off = BigUint::zero();
        for _ in 0..bits.div_ceil(64) {
            off = (off << 64u32) + BigUint::from(rng.random::<u64>());
        }
        off %= &band;
        first = first.max(ch.gamma(&(&off + 1u32)).value.abs());
        last = last.max(ch.gamma(&(&q - &off)).value.abs());
    }
    assert!(last < first, "last {last} first {first}");
}

#[test]
fn density_floor_and_log_integral() {
    let ch = default_chain().unwrap();
    for t in midpoint_grid(512) {
        assert!(ch.density_eval(&t) >= ch.floor());
    }
    let a = ch.log_integral(2048).unwrap();
    let b = ch.log_integral(4096).unwrap();
    assert!(a.is_finite() && b.is_finite());
    assert!((a - b).abs() <= 1e-4 * b.abs());
}

#[test]
fn integral_of_density_on_mini_chain() {
    let ch = build_chain_with(&[50], SpacingRule::Standard, Profile::Mini).unwrap();
    let q = ch.blocks()[0].level.q_n().to_u64().unwrap();
    let g = (q as usize + 1).next_power_of_two();
    let s: f64 = midpoint_grid(g).iter().map(|t| ch.density_eval(t)).sum();
    assert!((s * 2.0 * PI / g as f64 - 5.0).abs() < 1e-9);
}

#[test]
fn certificates_on_second_default_block() {
    let ch = default_chain().unwrap();
    let scan = ch.divergence_scan(2, 400, 11).unwrap();
    assert!(scan.in_e_count() > 0);
    for d in scan.in_e() {
        assert!(d.holds);
        assert!(d.dirichlet_part.abs() >= d.dirichlet_bound - 1e-8);
    }
    let one = ch.divergence_scan(1, 1, 0).unwrap();
    assert_eq!(one.rows.len(), 1);
    assert_eq!(one.rows[0].1, Certificate::NotInE);
    assert!(ch.divergence_scan(3, 10, 0).is_err());
}

#[test]
fn measure_grows_with_level() {
    let ch = default_chain().unwrap();
    let a = ch.blocks()[0].level.en_measure_estimate(20_000, 1);
    let b = ch.blocks()[1].level.en_measure_estimate(20_000, 1);
    assert!(b > a);
}

#[test]
fn explicit_spacing_chain() {
    let ch = build_chain(&[60], SpacingRule::Explicit(vec![BigLag::from(3)])).unwrap();
    assert_eq!(ch.gamma_value(1), 0.0);
    assert!(ch.gamma_value(3) != 0.0);
    assert_eq!(ch.gamma(&BigUint::from(6u32)).r, Some(BigLag::from(2)));
}
