use std::f64::consts::PI;

use h2ion::bottle::{magic_b2, radial_period_averaged_shift};
use h2ion::constants::{ELEMENTARY_CHARGE, MASS_BE9PLUS, MASS_H2PLUS};
use h2ion::cooling::{coulomb_forces, exchange_time};
use h2ion::e2::clebsch_gordan;
use h2ion::lineshape::{profile_density, statistical_uncertainty};
use h2ion::spin::para_state_energy;
use h2ion::systematics::stark_fields;
use h2ion::{
    BottleField, Coefficient, CoefficientTable, FieldEnvironment, Level, ParticleState, Species, SpinProjection,
    SpinState, TrapConfig,
};
use proptest::prelude::*;

fn projection() -> impl Strategy<Value = SpinProjection> {
    prop_oneof![Just(SpinProjection::Down), Just(SpinProjection::Up)]
}

fn species() -> impl Strategy<Value = Species> {
    prop_oneof![Just(Species::Matter), Just(Species::Antimatter)]
}

fn any_state() -> impl Strategy<Value = SpinState> {
    (0u32..5, 0u32..5, projection(), species())
        .prop_flat_map(|(v, n, m_s, sp)| {
            let n_i = n as i32;
            let m_i = if n % 2 == 0 { Just(0).boxed() } else { (-1i32..=1).boxed() };
            (Just(v), Just(n), Just(m_s), -n_i..=n_i, m_i, Just(sp))
        })
        .prop_map(|(v, n, m_s, m_n, m_i, sp)| SpinState::new(Level::new(v, n), m_s, m_n, m_i, sp).unwrap())
}

/// Para states of the levels with complete field coefficients.
fn evaluable_state() -> impl Strategy<Value = SpinState> {
    (prop_oneof![Just((0u32, 0u32)), Just((0, 2)), Just((2, 2))], projection())
        .prop_flat_map(|((v, n), m_s)| (Just(v), Just(n), Just(m_s), -(n as i32)..=n as i32))
        .prop_map(|(v, n, m_s, m_n)| SpinState::para(v, n, m_s, m_n).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn charge_conjugation_is_an_involution(state in any_state()) {
        let c = state.charge_conjugate();
        prop_assert_ne!(c.species, state.species);
        prop_assert_eq!(c.charge_conjugate(), state);
    }

    #[test]
    fn conjugate_levels_are_degenerate(state in evaluable_state(), b in 0.5f64..8.0) {
        let table = CoefficientTable::shipped();
        let coeffs = table.get(state.level).unwrap();
        let e = para_state_energy(coeffs, &FieldEnvironment::magnetic(b, Species::Matter), &state).unwrap();
        let conj = state.charge_conjugate();
        let e_bar = para_state_energy(coeffs, &FieldEnvironment::magnetic(b, Species::Antimatter), &conj).unwrap();
        prop_assert!((e - e_bar).abs() <= 1e-12 * e.abs().max(1.0));
    }

    #[test]
    fn coefficient_table_text_round_trip(scale in 0.5f64..2.0, which in 0usize..13) {
        let mut table = CoefficientTable::shipped();
        let level = Level::new(0, 2);
        let mut entry = table.get(level).unwrap().clone();
        let field = Coefficient::ALL[which];
        if let Some(x) = entry.value(field) {
            entry.set(field, Some(x * scale));
        }
        if table.insert(entry).is_ok() {
            let back = CoefficientTable::parse(&table.to_text(), "round trip").unwrap();
            prop_assert_eq!(back, table);
        }
    }

    #[test]
    fn clebsch_gordan_selection_rules(
        j1 in 0u32..5, j2 in 0u32..5, j in 0u32..9, m1 in -4i32..=4, m2 in -4i32..=4, m in -8i32..=8,
    ) {
        let cg = clebsch_gordan(j1, m1, j2, m2, j, m);
        let triangle = j + j1.min(j2) >= j1.max(j2) && j <= j1 + j2;
        let projections = m1.unsigned_abs() <= j1 && m2.unsigned_abs() <= j2 && m.unsigned_abs() <= j;
        if cg != 0.0 {
            prop_assert!(triangle && projections && m1 + m2 == m);
        }
        if triangle && projections && m1 + m2 == m {
            // symmetry under exchange of the coupled momenta
            let swapped = clebsch_gordan(j2, m2, j1, m1, j, m);
            let sign = if (j1 + j2 + j) % 2 == 0 { 1.0 } else { -1.0 };
            prop_assert!((swapped - sign * cg).abs() < 1e-12);
        }
    }

    #[test]
    fn magic_strength_scales_with_axial_frequency_squared(
        beta in prop_oneof![-1e6f64..-1.0, 1.0f64..1e6], nu in 1e4f64..5e6, k in 0.1f64..10.0,
    ) {
        let a = magic_b2(beta, 127e12, nu).unwrap();
        let b = magic_b2(beta, 127e12, k * nu).unwrap();
        prop_assert!((b.b2 / a.b2 / (k * k) - 1.0).abs() < 1e-12);
        prop_assert_eq!(a.inverted, beta < 0.0);
    }

    #[test]
    fn radial_shift_is_linear_in_each_speed(
        b2 in -1e6f64..1e6, vp in 0.0f64..1e6, vm in 0.0f64..1e6, k in 0.0f64..10.0,
    ) {
        let bottle = BottleField::new(4.0, b2, 0.0).unwrap();
        let s = |p: f64, m: f64| radial_period_averaged_shift(&bottle, 3e4, 127e12, (60e6, 8e3), (p, m)).unwrap();
        let tol = 1e-11 * (s(vp, 0.0).abs() + s(0.0, vm).abs()).max(1e-300) * (1.0 + k);
        prop_assert!((s(vp, vm) - s(vp, 0.0) - s(0.0, vm)).abs() <= tol);
        prop_assert!((s(k * vp, 0.0) - k * s(vp, 0.0)).abs() <= tol);
    }

    #[test]
    fn motional_field_scales_with_orbit_squared(r in 1e-7f64..1e-3, k in 0.1f64..10.0) {
        let mut trap = TrapConfig::cold(4.0, 1e6);
        trap.r_orbital = Some(r);
        let (_, e1) = stark_fields(&trap, MASS_H2PLUS, ELEMENTARY_CHARGE).unwrap();
        trap.r_orbital = Some(k * r);
        let (_, e2) = stark_fields(&trap, MASS_H2PLUS, ELEMENTARY_CHARGE).unwrap();
        prop_assert!((e2 / e1 / (k * k) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn exchange_time_scalings(s0 in 0.1e-3f64..2e-3, nu in 50e3f64..1e6, k in 0.5f64..2.0) {
        let e = ELEMENTARY_CHARGE;
        let tau = |s: f64, n: f64| exchange_time(MASS_BE9PLUS, MASS_H2PLUS, e, e, 2.0 * PI * n, s).unwrap().duration;
        prop_assert!((tau(k * s0, nu) / tau(s0, nu) / k.powi(3) - 1.0).abs() < 1e-12);
        prop_assert!((tau(s0, k * nu) / tau(s0, nu) / k - 1.0).abs() < 1e-12);
    }

    #[test]
    fn coulomb_impulses_cancel(za in -1e-3f64..1e-3, zb in -1e-3f64..1e-3, opposite in any::<bool>()) {
        let qb = if opposite { -ELEMENTARY_CHARGE } else { ELEMENTARY_CHARGE };
        let a = ParticleState::new(MASS_BE9PLUS, ELEMENTARY_CHARGE, za, 0.0).unwrap();
        let b = ParticleState::new(MASS_H2PLUS, qb, zb, 0.0).unwrap();
        let (fa, fb) = coulomb_forces(&a, &b, 1e-6);
        prop_assert_eq!(fa + fb, 0.0);
    }

    #[test]
    fn profile_density_is_non_negative(f in -100.0f64..20.0, delta in 0.01f64..10.0, sigma in 0.0f64..50.0) {
        let p = profile_density(f, delta, sigma);
        prop_assert!(p.is_finite() && p >= 0.0);
    }

    #[test]
    fn averaging_time_scaling(u in 1e-18f64..1e-12, cycle in 0.1f64..100.0, k in 1.0f64..1e4) {
        let base = statistical_uncertainty(u, cycle, cycle * k).unwrap();
        let longer = statistical_uncertainty(u, cycle, 4.0 * cycle * k).unwrap();
        prop_assert!((base / longer - 2.0).abs() < 1e-12);
        prop_assert!(base <= u);
    }
}
