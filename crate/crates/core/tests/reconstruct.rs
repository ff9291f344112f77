use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use shapetensor::bodies::{
    halfspace_intersection, reference_body, translative_hausdorff, BodySpec, DEFAULT_RESOLUTION,
};
use shapetensor::reconstruct::{
    algorithm_hiv_lsq, algorithm_surface_tensor, noise_model, CaseTag, SolverConfig,
};
use shapetensor::sphere::random_unit;
use shapetensor::stability::{convergence_experiment, noise_experiment, summarize_noise};
use shapetensor::tensors::{harmonic_vector, HarmonicVector, TensorSet};

fn relative_dt(spec: &BodySpec, s_o: usize) -> f64 {
    let body = reference_body(spec, DEFAULT_RESOLUTION).unwrap();
    let mu = body.surface_area_measure(DEFAULT_RESOLUTION).unwrap();
    let t = TensorSet::from_measure(&mu, s_o, false).unwrap();
    let r = algorithm_surface_tensor(&t, &SolverConfig::default()).unwrap();
    assert_eq!(r.case, CaseTag::Case3_Polytope);
    translative_hausdorff(&body, r.polytope().unwrap()).unwrap() / body.diameter()
}

#[test]
fn pyramid_rank_four_is_precise() {
    assert!(relative_dt(&BodySpec::pyramid(), 4) <= 0.05);
}

#[test]
fn cube_rank_five_is_recovered() {
    assert!(relative_dt(&BodySpec::cube(1.0), 5) <= 0.02);
}

#[test]
fn convergence_table_is_monotone_and_certified() {
    let rows = convergence_experiment(
        &BodySpec::ellipsoid(),
        &[2, 4, 6],
        DEFAULT_RESOLUTION,
        &SolverConfig::default(),
    )
    .unwrap();
    assert_eq!(rows.len(), 3);
    for w in rows.windows(2) {
        assert!(w[1].dt <= 1.1 * w[0].dt, "{rows:?}");
    }
    assert!(rows.iter().all(|r| r.contained && r.residual <= 1e-6));
    let pyramid = convergence_experiment(
        &BodySpec::pyramid(),
        &[2, 3, 4],
        DEFAULT_RESOLUTION,
        &SolverConfig::default(),
    )
    .unwrap();
    let diam = reference_body(&BodySpec::pyramid(), 1).unwrap().diameter();
    assert!(pyramid[2].dt <= 0.05 * diam);
    assert!(pyramid.iter().all(|r| r.contained));
}

#[test]
fn planar_bodies_reconstruct() {
    for m in [3usize, 6] {
        let dt = relative_dt(&BodySpec::RegularPolygon { m }, m + 1);
        assert!(dt <= 1e-5, "m={m}: {dt}");
    }
}

fn random_polygon_harmonics(rng: &mut ChaCha8Rng, s_o: usize) -> HarmonicVector {
    loop {
        let m = rng.gen_range(5..12);
        let u: Vec<Vec<f64>> = (0..m).map(|_| random_unit(2, rng)).collect();
        let h: Vec<f64> = (0..m).map(|_| rng.gen_range(0.7..1.3)).collect();
        if let Ok(p) = halfspace_intersection(&u, &h) {
            return harmonic_vector(&p.surface_area_measure(), s_o).unwrap();
        }
    }
}

#[test]
fn residual_is_monotone_along_noise_ray() {
    // h(K) lies in the closed convex set of attainable vectors, so the distance
    // from h(K) + tε to that set is nondecreasing in t ≥ 0
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let cfg = SolverConfig {
        starts: 4,
        ..SolverConfig::default()
    };
    let s_o = 4;
    for case in 0..20u64 {
        let clean = random_polygon_harmonics(&mut rng, s_o);
        let eps = noise_model(2, s_o, clean.values[0], 100 + case).unwrap();
        let at = |t: f64| {
            let v = clean
                .values
                .iter()
                .zip(&eps.values)
                .map(|(a, b)| a + t * b)
                .collect();
            algorithm_hiv_lsq(&HarmonicVector::new(2, s_o, v).unwrap(), &cfg)
                .unwrap()
                .residual
        };
        let (full, half) = (at(1.0), at(0.5));
        assert!(
            half <= full + 1e-9 * clean.norm(),
            "case {case}: {half} > {full}"
        );
    }
}

#[test]
fn different_seeds_agree_on_harmonics() {
    let body = reference_body(&BodySpec::pyramid(), 1).unwrap();
    let clean = harmonic_vector(&body.surface_area_measure(1).unwrap(), 3).unwrap();
    let eps = noise_model(3, 3, 0.3 * clean.values[0], 9).unwrap();
    let target = HarmonicVector::new(
        3,
        3,
        clean
            .values
            .iter()
            .zip(&eps.values)
            .map(|(a, b)| a + b)
            .collect(),
    )
    .unwrap();
    let fit = |seed, grid_start| {
        let cfg = SolverConfig {
            seed,
            grid_start,
            ..SolverConfig::default()
        };
        let r = algorithm_hiv_lsq(&target, &cfg).unwrap();
        (harmonic_vector(&r.measure, 3).unwrap(), r.residual)
    };
    let (h1, r1) = fit(1, true);
    let (h2, r2) = fit(77, false);
    assert!(r1 > 0.0 && (r1 - r2).abs() <= 1e-9 * target.norm());
    let d = h1
        .values
        .iter()
        .zip(&h2.values)
        .map(|(a, b)| (a - b).powi(2))
        .sum::<f64>()
        .sqrt();
    assert!(d <= 1e-6 * target.norm(), "{d}");
}

#[test]
fn noise_free_trials_are_all_case_three() {
    let cfg = SolverConfig {
        starts: 3,
        ..SolverConfig::default()
    };
    let rows = noise_experiment(
        &BodySpec::pyramid(),
        4,
        &[0.0, 0.01],
        4,
        1,
        DEFAULT_RESOLUTION,
        &cfg,
    )
    .unwrap();
    let summary = summarize_noise(&rows);
    assert_eq!(summary[0].case3, 4);
    assert!(summary[0].mean_dt <= 0.05 * 2f64.sqrt());
    assert_eq!(rows.len(), 8);
}
