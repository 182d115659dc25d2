use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use urbanlos::citygen::*;
use urbanlos::Error;

fn moments(gamma: f64, n: usize, seed: u64) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let xs: Vec<f64> = (0..n).map(|_| sample_height(gamma, &mut rng).unwrap()).collect();
    let mean = xs.iter().sum::<f64>() / n as f64;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, var)
}

#[test]
fn rayleigh_heights_match_closed_form_moments() {
    for (i, gamma) in [15.0_f64, 20.0, 50.0].into_iter().enumerate() {
        let (mean, var) = moments(gamma, 1_000_000, 11 + i as u64);
        let want_mean = gamma * (std::f64::consts::PI / 2.0).sqrt();
        let want_var = (4.0 - std::f64::consts::PI) / 2.0 * gamma * gamma;
        assert!((mean / want_mean - 1.0).abs() < 0.02, "γ={gamma}: mean {mean}");
        assert!((var / want_var - 1.0).abs() < 0.02, "γ={gamma}: var {var}");
    }
    let (mean15, _) = moments(15.0, 1_000_000, 1);
    assert!((mean15 - 18.799_712_059_732_503).abs() / 18.8 < 0.02);
    let (mean50, var50) = moments(50.0, 1_000_000, 2);
    assert!((mean50 - 62.665_706_865_775_01).abs() / 62.67 < 0.02);
    assert!((var50 - 1_073.009_183_012_758_5).abs() / 1073.0 < 0.02);
}

#[test]
fn urban_city_has_exact_count_and_area() {
    let layout = generate_city(&BuiltUpParams::URBAN, &GenConfig { seed: 5, ..GenConfig::default() }).unwrap();
    assert_eq!(layout.buildings.len(), 500);
    let area = layout.built_area();
    assert!((2.94e5..=3.06e5).contains(&area), "built area {area}");
    for b in &layout.buildings {
        assert!((b.width * b.length - 600.0).abs() / 600.0 < 1e-9);
    }
}

fn check_layout(layout: &CityLayout) {
    let bounds = layout.bounds();
    let fps: Vec<_> = layout.buildings.iter().map(Building::footprint).collect();
    for (i, a) in fps.iter().enumerate() {
        assert!(bounds.contains_rect(a), "building {i} leaves the city");
        for b in &fps[i + 1..] {
            assert!(!a.overlaps(b), "buildings overlap: {a:?} {b:?}");
        }
    }
    let discs = layout
        .trees
        .iter()
        .map(|t| (t.center, t.r_t))
        .chain(layout.lights.iter().map(|l| (l.center, l.r_s)));
    for (c, r) in discs {
        assert!(c.x - r >= 0.0 && c.y - r >= 0.0 && c.x + r <= bounds.max.x && c.y + r <= bounds.max.y);
        assert!(fps.iter().all(|f| !f.intersects_disc(c, r)));
    }
    for u in &layout.users {
        assert!(layout.is_open(u.position));
        assert_eq!(u.height, layout.config.h_gu);
    }
}

#[test]
fn generated_layouts_satisfy_invariants() {
    for (i, env) in Environment::ALL.into_iter().enumerate() {
        let cfg = GenConfig {
            seed: 100 + i as u64,
            ..GenConfig::default()
        };
        let layout = generate_city(&env.params(), &cfg).unwrap();
        assert_eq!(layout.users.len(), 100);
        assert_eq!(layout.trees.len(), 200);
        assert_eq!(layout.lights.len(), 500);
        check_layout(&layout);
    }
}

#[test]
fn obstacles_hug_a_building_side() {
    let layout = generate_city(&BuiltUpParams::DENSE_URBAN, &GenConfig { seed: 8, ..GenConfig::default() }).unwrap();
    let d_o = layout.config.d_o;
    for t in &layout.trees {
        // Some building has its edge exactly d_o from the tree center along an axis.
        let hugs = layout.buildings.iter().any(|b| {
            let f = b.footprint();
            let within_x = t.center.x >= f.min.x - 1e-9 && t.center.x <= f.max.x + 1e-9;
            let within_y = t.center.y >= f.min.y - 1e-9 && t.center.y <= f.max.y + 1e-9;
            (within_x && ((f.min.y - t.center.y - d_o).abs() < 1e-9 || (t.center.y - f.max.y - d_o).abs() < 1e-9))
                || (within_y && ((f.min.x - t.center.x - d_o).abs() < 1e-9 || (t.center.x - f.max.x - d_o).abs() < 1e-9))
        });
        assert!(hugs, "tree at {:?} is not on a sidewalk", t.center);
    }
}

#[test]
fn seeds_are_reproducible_and_distinct() {
    let cfg = GenConfig { seed: 42, ..GenConfig::default() };
    let a = generate_city(&BuiltUpParams::URBAN, &cfg).unwrap();
    let b = generate_city(&BuiltUpParams::URBAN, &cfg).unwrap();
    assert_eq!(a.to_json(), b.to_json());
    let c = generate_city(&BuiltUpParams::URBAN, &GenConfig { seed: 43, ..cfg.clone() }).unwrap();
    assert_ne!(a.buildings, c.buildings);
    assert_ne!(a.users, c.users);
    let other_city = generate_city_indexed(&BuiltUpParams::URBAN, &cfg, 1).unwrap();
    assert_ne!(a.buildings, other_city.buildings);
}

#[test]
fn obstacle_counts_do_not_move_buildings_or_trees() {
    let cfg = GenConfig { seed: 9, ..GenConfig::default() };
    let a = generate_city(&BuiltUpParams::URBAN, &cfg).unwrap();
    let b = generate_city(
        &BuiltUpParams::URBAN,
        &GenConfig {
            n_trees: 50,
            n_lights: 0,
            ..cfg
        },
    )
    .unwrap();
    assert_eq!(a.buildings, b.buildings);
    assert_eq!(&a.trees[..50], &b.trees[..]);
}

#[test]
fn layout_json_round_trip_is_byte_identical() {
    let layout = generate_city(&BuiltUpParams::HIGH_RISE, &GenConfig { seed: 3, ..GenConfig::default() }).unwrap();
    let json = layout.to_json();
    let back = CityLayout::from_json(&json).unwrap();
    assert_eq!(back, layout);
    assert_eq!(back.to_json(), json);
}

#[test]
fn users_are_uniform_without_buildings() {
    // α→0: one 1 m² building in a 1 km² city.
    let params = BuiltUpParams::new(1e-6, 1.0, 10.0).unwrap();
    let cfg = GenConfig {
        n_trees: 0,
        n_lights: 0,
        n_gu: 10_000,
        seed: 21,
        ..GenConfig::default()
    };
    let layout = generate_city(&params, &cfg).unwrap();
    let mut cells = [0u32; 100];
    for u in &layout.users {
        let i = ((u.position.x / 100.0) as usize).min(9);
        let j = ((u.position.y / 100.0) as usize).min(9);
        cells[i * 10 + j] += 1;
    }
    let expected = 100.0;
    let chi2: f64 = cells.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    // 99 degrees of freedom, upper 1% point.
    assert!(chi2 < 134.642, "chi-square {chi2}");
}

#[test]
fn bad_parameters_are_rejected() {
    assert!(matches!(BuiltUpParams::new(1.5, 500.0, 15.0), Err(Error::Domain(_))));
    assert!(matches!(BuiltUpParams::new(0.3, 0.0, 15.0), Err(Error::Domain(_))));
    assert!(matches!(BuiltUpParams::new(0.3, 500.0, -1.0), Err(Error::Domain(_))));
    let bad = GenConfig {
        d_o: 0.0,
        ..GenConfig::default()
    };
    assert!(generate_city(&BuiltUpParams::URBAN, &bad).is_err());
}

#[test]
fn crowded_city_is_infeasible() {
    let params = BuiltUpParams::new(0.999, 1.0, 10.0).unwrap();
    let cfg = GenConfig {
        n_gu: 5,
        n_trees: 0,
        n_lights: 0,
        ..GenConfig::default()
    };
    assert!(matches!(generate_city(&params, &cfg), Err(Error::Infeasible(_))));
}

proptest! {
    #[test]
    fn footprint_area_is_preserved(alpha in 0.05f64..0.7, beta in 50.0f64..800.0, shape in 0.5f64..=1.5) {
        let p = BuiltUpParams::new(alpha, beta, 20.0).unwrap();
        let (w, l) = derive_building_dims(&p, KM2, shape).unwrap();
        let b_avg = alpha * 1e6 / beta;
        prop_assert!((w * l - b_avg).abs() / b_avg < 1e-9);
    }

    #[test]
    fn small_cities_keep_invariants(seed in 0u64..1_000, env in 0usize..3) {
        let cfg = GenConfig {
            area: 90_000.0,
            n_trees: 30,
            n_lights: 40,
            n_gu: 25,
            seed,
            ..GenConfig::default()
        };
        let layout = generate_city(&Environment::ALL[env].params(), &cfg).unwrap();
        check_layout(&layout);
    }
}
