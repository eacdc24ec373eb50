use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crflat::catalog::{list_families, make_family, Expectation, GridSpec, HypersurfaceSpec, PointOutcome};
use crflat::invariants::{Label, TolProfile};

fn params(kv: &[(&str, f64)]) -> Vec<(String, f64)> {
    kv.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

fn labels(spec: &HypersurfaceSpec) -> Vec<Label> {
    let tol = TolProfile::default();
    spec.default_grid()
        .points()
        .iter()
        .map(|p| spec.evaluate(p, 6, &tol).label())
        .collect()
}

fn assert_flat(spec: &HypersurfaceSpec) {
    let tol = TolProfile::default();
    let mut evaluated = 0;
    for p in spec.default_grid().points() {
        match spec.evaluate(&p, 6, &tol) {
            PointOutcome::Evaluated(r) => {
                assert_eq!(r.label(), Label::Flat, "{} {:?} at {p:?}", spec.name, spec.params);
                evaluated += 1;
            }
            PointOutcome::Skipped { .. } => {}
        }
    }
    assert!(evaluated > 0, "{} has no evaluated point", spec.name);
}

#[test]
fn every_expected_flat_family_is_flat_at_defaults() {
    for fam in list_families() {
        if fam.expected == Expectation::Flat {
            assert_flat(&make_family(fam.name, &[]).unwrap());
        }
    }
}

#[test]
fn flatness_across_the_parameter_ranges() {
    let sweeps: [(&str, &[f64]); 6] = [
        ("thm54_i", &[0.1, 0.5, 3.0, 10.0]),
        ("thm54_i_rigid", &[0.1, 0.5, 3.0]),
        ("thm54_ii", &[0.05, 0.5, 0.9]),
        ("thm54_iii", &[0.2, 0.8, 1.4]),
        ("thm54_ii_exp", &[0.1, 0.5, 0.9]),
        ("thm54_iii_trig", &[0.2, 0.8, 1.4]),
    ];
    for (name, ds) in sweeps {
        for &d in ds {
            assert_flat(&make_family(name, &params(&[("D", d)])).unwrap());
        }
    }
}

#[test]
fn pre_and_post_substitution_forms_agree_on_flatness() {
    for (pre, post) in [("thm54_ii_exp", "thm54_ii"), ("thm54_iii_trig", "thm54_iii")] {
        for d in [0.3, 0.6] {
            let a = labels(&make_family(pre, &params(&[("D", d)])).unwrap());
            let b = labels(&make_family(post, &params(&[("D", d)])).unwrap());
            assert!(a.iter().all(|l| *l == Label::Flat), "{pre}: {a:?}");
            assert!(b.iter().all(|l| *l == Label::Flat), "{post}: {b:?}");
        }
    }
}

#[test]
fn random_gauges_preserve_flatness() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for name in ["fk", "thm54_i_rigid", "thm54_ii", "thm54_iii"] {
        for _ in 0..3 {
            let gauge: Vec<(String, f64)> = (0..5)
                .flat_map(|k| [format!("u{k}"), format!("ui{k}")])
                .map(|n| (n, rng.random_range(-1.0..=1.0)))
                .collect();
            let spec = make_family(name, &gauge).unwrap();
            assert_flat(&spec);
        }
    }
}

#[test]
fn negative_controls_meet_their_labels() {
    let perturbed = labels(&make_family("perturbed_i", &[]).unwrap());
    // off t1 = 0 the quartic term breaks Levi rank 1
    assert!(perturbed.contains(&Label::NotRank1), "{perturbed:?}");
    assert!(Expectation::Nonflat.is_met(&perturbed));

    let generic = labels(&make_family("pq_generic", &[]).unwrap());
    assert!(generic.contains(&Label::Nonflat), "{generic:?}");
    assert!(!generic.contains(&Label::NotRank1), "{generic:?}");
    assert!(Expectation::Nonflat.is_met(&generic));
}

#[test]
fn rigid_default_grid_is_guard_filtered() {
    let spec = make_family("fk", &[]).unwrap();
    let grid = GridSpec::default_for(spec.form).points();
    assert_eq!(grid.len(), 81);
    assert!(grid.iter().all(|p| spec.failing_guard(p).is_none()));
}
