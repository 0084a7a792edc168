use grazesim::analysis::*;
use grazesim::map::{fixed_point, MapState};
use grazesim::noise::OUParams;
use grazesim::oscillator::OscillatorParams;
use grazesim::rng;

fn model(v: MapVariant, osc: &OscillatorParams, mu: f64, eps: f64) -> MapModel {
    MapModel::from_oscillator(
        v,
        osc,
        mu,
        OUParams {
            eps,
            nu: DEFAULT_NU,
        },
    )
    .unwrap()
}

fn reference(v: MapVariant, mu: f64, alpha: f64) -> MapModel {
    let eps = v
        .index()
        .map_or(0.0, |j| epsilon_for_alpha(j, alpha).unwrap());
    model(v, &OscillatorParams::reference(), mu, eps)
}

fn k5() -> OscillatorParams {
    OscillatorParams {
        k_osc: 5.0,
        ..OscillatorParams::reference()
    }
}

#[test]
fn period_incrementing_windows() {
    let p = |mu| reference(MapVariant::Det, mu, 0.0).params;
    for (mu, period) in [(0.03, 3), (0.001, 4)] {
        let c = detect_cycle(&p(mu), MapState::default(), 5000, 50, 1e-10)
            .unwrap()
            .unwrap();
        assert_eq!(c.period(), period, "mu = {mu}");
        assert!(cycle_multiplier(&p(mu), &c).spectral_radius() < 1.0);
    }
    let starts: Vec<MapState> = (0..10)
        .map(|i| MapState::new(-0.1 + 0.02 * f64::from(i), 0.0))
        .collect();
    let found: Vec<usize> = survey_attractors(&p(0.0002), &starts, 20_000, 50, 1000)
        .into_iter()
        .filter_map(|a| match a.unwrap() {
            Attractor::Periodic(c) => Some(c.period()),
            Attractor::Aperiodic { .. } => None,
        })
        .collect();
    assert!(found.contains(&5), "{found:?}");
}

#[test]
fn four_cycle_coexists_with_aperiodic_attractor() {
    let p = reference(MapVariant::Det, 0.0145, 0.0).params;
    let starts: Vec<MapState> = (0..26)
        .flat_map(|i| {
            (0..14).map(move |j| {
                MapState::new(-0.15 + 0.01 * f64::from(i), -0.05 + 0.01 * f64::from(j))
            })
        })
        .collect();
    let mut four = 0;
    let mut chaotic = 0;
    for a in survey_attractors(&p, &starts, 5000, 50, 10_000) {
        match a.unwrap() {
            Attractor::Periodic(c) if c.period() == 4 => four += 1,
            Attractor::Aperiodic { lyapunov } if lyapunov > 0.0 => chaotic += 1,
            _ => {}
        }
    }
    assert!(
        four > 0 && chaotic > 0,
        "four = {four}, chaotic = {chaotic}"
    );
}

#[test]
fn zero_noise_scans_equal_deterministic_scan() {
    let mus: Vec<f64> = (0..40).map(|i| -0.01 + 0.0015 * f64::from(i)).collect();
    let det = bifurcation_scan(
        &reference(MapVariant::Det, 0.0, 0.0),
        &mus,
        300,
        20,
        MapState::default(),
        1,
    );
    for v in [MapVariant::N1, MapVariant::N2, MapVariant::N3] {
        let got = bifurcation_scan(
            &reference(v, 0.0, 0.0),
            &mus,
            300,
            20,
            MapState::default(),
            1,
        );
        assert_eq!(got, det, "{v:?}");
    }
}

#[test]
fn impact_noise_scans_show_no_spread_left_of_grazing() {
    let mus: Vec<f64> = (1..=10).map(|i| -0.001 * f64::from(i)).collect();
    for v in [MapVariant::N2, MapVariant::N3] {
        let pts = bifurcation_scan(
            &reference(v, 0.0, 3.0),
            &mus,
            2000,
            200,
            MapState::default(),
            2,
        );
        for p in pts {
            assert!(p.failure.is_none());
            assert!(
                p.spread() < 1e-12,
                "{v:?} at mu = {}: spread {}",
                p.mu,
                p.spread()
            );
        }
    }
}

#[test]
fn density_is_seed_reproducible() {
    let m = reference(MapVariant::N3, 0.03, 1.0);
    let cfg = DensityConfig {
        n: 20_000,
        nx: 64,
        ny: 64,
        replicas: 3,
        ..Default::default()
    };
    let a = invariant_density(&m, &cfg, MapState::default(), 7).unwrap();
    let b = invariant_density(&m, &cfg, MapState::default(), 7).unwrap();
    let c = invariant_density(&m, &cfg, MapState::default(), 8).unwrap();
    assert_eq!(a, b);
    assert_ne!(a.counts, c.counts);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();
    let d = pool.install(|| invariant_density(&m, &cfg, MapState::default(), 7).unwrap());
    assert_eq!(a, d);
}

#[test]
fn half_histograms_merge_to_full() {
    let m = reference(MapVariant::Det, 0.0145, 0.0);
    let spec = GridSpec {
        x_min: -0.15,
        x_max: 0.05,
        y_min: -0.01,
        y_max: 0.06,
        nx: 50,
        ny: 40,
    };
    let mut orbit = Orbit::new(m, MapState::new(-0.05, 0.01), rng::stream(0, 0));
    orbit.skip(500).unwrap();
    let pts = orbit.collect(20_000).unwrap();
    let mut full = DensityGrid::new(spec).unwrap();
    let mut first = DensityGrid::new(spec).unwrap();
    let mut second = DensityGrid::new(spec).unwrap();
    for (i, s) in pts.iter().enumerate() {
        full.add(s.x, s.y);
        if i < 10_000 {
            first.add(s.x, s.y)
        } else {
            second.add(s.x, s.y)
        }
    }
    first.merge(&second).unwrap();
    assert_eq!(first, full);
}

#[test]
fn fixed_point_density_occupies_one_cell() {
    for v in [MapVariant::N2, MapVariant::N3] {
        let m = model(
            v,
            &k5(),
            -0.002,
            epsilon_for_alpha(v.index().unwrap(), 3.0).unwrap(),
        );
        let fp = fixed_point(&m.params).unwrap().state;
        let cfg = DensityConfig {
            n: 10_000,
            ..Default::default()
        };
        let g = invariant_density(&m, &cfg, fp, 0).unwrap();
        assert_eq!(g.occupied_cells(), 1, "{v:?}");
        assert_eq!(g.out_of_range, 0);
    }
}

#[test]
fn switching_noise_visits_both_coexisting_attractors() {
    let osc = k5();
    let m = model(MapVariant::N1, &osc, -0.002, 0.0005);
    let det = m.with_variant(MapVariant::Det).with_eps(0.0);
    let fp = fixed_point(&det.params).unwrap().state;
    let cycle = detect_cycle(&det.params, MapState::new(-0.1, 0.0), 3000, 10, 1e-10)
        .unwrap()
        .unwrap();
    assert_eq!(cycle.period(), 3);
    let cfg = DensityConfig {
        n: 1_000_000,
        ..Default::default()
    };
    let g = invariant_density(&m, &cfg, fp, 3).unwrap();
    let near_fp = g.mass_near(&[(fp.x, fp.y)], 0.01);
    let near_cycle = g.mass_near(
        &cycle.points.iter().map(|s| (s.x, s.y)).collect::<Vec<_>>(),
        0.02,
    );
    assert!(
        near_fp > 0.05 && near_cycle > 0.05,
        "fixed point {near_fp}, cycle {near_cycle}"
    );
}

#[test]
fn noisy_four_cycle_window_reaches_right_half_plane() {
    let m = reference(MapVariant::N1, 0.001, 1.0);
    let cfg = DensityConfig {
        n: 200_000,
        ..Default::default()
    };
    let g = invariant_density(&m, &cfg, MapState::default(), 4).unwrap();
    assert!(g.mass_right() > 0.0);
}

#[test]
fn small_noise_returns_every_third_iterate() {
    for v in [MapVariant::N1, MapVariant::N2, MapVariant::N3] {
        let mut orbit = Orbit::new(
            reference(v, 0.03, 0.1),
            MapState::default(),
            rng::stream(5, 0),
        );
        orbit.skip(DEFAULT_TRANSIENT).unwrap();
        let stats = return_fractions(&mut orbit, 2000).unwrap();
        assert!(stats.sigma(3) > 0.99, "{v:?}: {:?}", stats.sigma);
        let total: f64 = stats.sigma.values().sum();
        assert!((total - 1.0).abs() <= 1.0 / 2000.0);
    }
}
