use std::f64::consts::SQRT_2;

use proptest::prelude::*;
use twocrystal_core::io::{read_counts, write_counts};
use twocrystal_core::linalg;
use twocrystal_core::units::MM;
use twocrystal_core::{
    chsh_s, coincidence_probability, correlation_e, decoherence_parameter, model_state,
    propagation_delays, purity, rho_from_t, simulate_counts, standard_set, visibility,
    AcquisitionPlan, ChshSettings, CountRecord, SourceConfig, TriangularParam,
};

fn angle() -> impl Strategy<Value = f64> {
    -180.0..180.0f64
}

proptest! {
    #[test]
    fn model_state_is_a_density_matrix(p in 0.0..=1.0f64, phi in -7.0..7.0f64) {
        let rho = model_state(p, phi).unwrap();
        let m = rho.matrix();
        prop_assert!(linalg::hermiticity_defect(m) < 1e-15);
        prop_assert!((linalg::trace(m).re - 1.0).abs() < 1e-15);
        prop_assert!(rho.eigenvalues()[0] > -1e-15);
        prop_assert!((purity(&rho) - (0.5 + 0.5 * p * p)).abs() < 1e-12);
    }

    #[test]
    fn visibility_carries_the_phase(p in 0.0..=1.0f64, phi in -3.0..3.0f64) {
        let v = visibility(&model_state(p, phi).unwrap()).unwrap();
        prop_assert!((v - p * phi.cos()).abs() < 1e-12);
    }

    #[test]
    fn orthogonal_outcomes_sum_to_one(p in 0.0..=1.0f64, a in angle(), b in angle()) {
        let rho = model_state(p, 0.0).unwrap();
        let total: f64 = [(a, b), (a + 90.0, b), (a, b + 90.0), (a + 90.0, b + 90.0)]
            .iter()
            .map(|&(x, y)| coincidence_probability(&rho, x, y))
            .sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn correlation_closed_form(p in 0.0..=1.0f64, a in angle(), b in angle()) {
        let rho = model_state(p, 0.0).unwrap();
        let (ar, br) = (a.to_radians(), b.to_radians());
        let expected = p * (2.0 * (ar - br)).cos() + (1.0 - p) * (2.0 * ar).cos() * (2.0 * br).cos();
        prop_assert!((correlation_e(&rho, a, b) - expected).abs() < 1e-12);
    }

    #[test]
    fn tsirelson_bound(p in 0.0..=1.0f64, a in angle(), ap in angle(), b in angle(), bp in angle()) {
        let rho = model_state(p, 0.0).unwrap();
        let s = chsh_s(&rho, &ChshSettings { a, a_prime: ap, b, b_prime: bp });
        prop_assert!(s.abs() <= 2.0 * SQRT_2 + 1e-12);
    }

    #[test]
    fn any_parameter_gives_a_density_matrix(t in prop::array::uniform16(-2.0..2.0f64)) {
        prop_assume!(t.iter().any(|x| x.abs() > 1e-3));
        let rho = rho_from_t(&TriangularParam::new(t)).unwrap();
        let m = rho.matrix();
        prop_assert!(linalg::hermiticity_defect(m) < 1e-12);
        prop_assert!((linalg::trace(m).re - 1.0).abs() < 1e-12);
        prop_assert!(rho.eigenvalues()[0] > -1e-12);
    }

    #[test]
    fn counts_are_reproducible(p in 0.0..=1.0f64, seed in any::<u64>()) {
        let rho = model_state(p, 0.0).unwrap();
        let plan = AcquisitionPlan::tomography(&standard_set(), 500.0, seed);
        prop_assert_eq!(simulate_counts(&rho, &plan).unwrap(), simulate_counts(&rho, &plan).unwrap());
    }

    #[test]
    fn counts_file_round_trip(counts in prop::collection::vec(any::<u32>(), 1..16)) {
        let records: Vec<CountRecord> = counts
            .iter()
            .zip(standard_set())
            .map(|(&n, p)| CountRecord::new(p.label(), n as u64))
            .collect();
        let mut buf = Vec::new();
        write_counts(&mut buf, &records, Some("note")).unwrap();
        prop_assert_eq!(read_counts(buf.as_slice()).unwrap(), records);
    }

    #[test]
    fn delays_scale_with_length(l in 0.0..5.0f64) {
        let base = SourceConfig::laser_diode();
        let (h1, v1) = propagation_delays(&base.clone().with_crystal_length(MM));
        let (h, v) = propagation_delays(&base.with_crystal_length(l * MM));
        prop_assert!((h - l * h1).abs() <= 1e-12 * h1.max(h));
        prop_assert!((v - l * v1).abs() <= 1e-12 * v1.max(v));
    }

    #[test]
    fn longer_crystals_decohere_more(l in 0.0..5.0f64, extra in 0.01..1.0f64) {
        let base = SourceConfig::laser_diode();
        let p1 = decoherence_parameter(&base.clone().with_crystal_length(l * MM));
        let p2 = decoherence_parameter(&base.with_crystal_length((l + extra) * MM));
        prop_assert!(p2 < p1);
        prop_assert!((0.0..=1.0).contains(&p2));
    }
}
