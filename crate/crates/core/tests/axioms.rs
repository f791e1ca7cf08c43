use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use cubical::laws::{check_axiom, check_exhaustive, instances_for, random_instance, Law, LawError, Shape};
use cubical::models::fincat::bundled;
use cubical::models::sample::Catalog;
use cubical::models::{shell_tower, Broken, FiniteModel, Nerve};
use cubical::{CubeResult, CubeSystem, Sign};

#[test]
fn law_ids_round_trip() {
    for law in Law::ALL {
        assert_eq!(Law::from_id(law.id()).unwrap(), law);
        assert_eq!(Law::from_id(&law.id().to_lowercase()).unwrap(), law);
        assert_eq!(law.to_string(), law.id());
        assert!(!law.statement().is_empty());
    }
    assert_eq!(Law::from_id("TRANSPORT-PLUS"), Err(LawError::UnknownLaw("TRANSPORT-PLUS".into())));
}

#[test]
fn every_law_holds_exhaustively_on_small_nerves() {
    for cat in bundled::all() {
        let name = cat.name().to_string();
        let nerve = Nerve::new(cat, 4);
        let catalog = Catalog::new(&nerve, 3).unwrap();
        for law in Law::ALL {
            for d in law.min_dim()..=(4 - law.raise()).min(3) {
                let report = check_exhaustive(&catalog, law, d);
                assert!(report.passed(), "{law} at dim {d} on {name}: {:?}", report.counterexample);
            }
        }
    }
}

#[test]
fn transport_instances_on_the_poset() {
    let nerve = Nerve::new(bundled::load("poset2x2").unwrap(), 3);
    let catalog = Catalog::new(&nerve, 2).unwrap();
    let f = nerve.arrow_named("f").unwrap();
    let insts = instances_for(&catalog, Law::Transport, &f);
    assert!(!insts.is_empty());
    let report = check_axiom(&nerve, "TRANSPORT", &insts).unwrap();
    assert!(report.passed());
    assert_eq!(report.instances, insts.len());
}

#[test]
fn malformed_instances_are_rejected() {
    let nerve = Nerve::new(bundled::load("poset2x2").unwrap(), 3);
    let f = nerve.arrow_named("f").unwrap();
    let inst = cubical::laws::Instance {
        dirs: vec![1],
        cubes: vec![f.clone(), f],
    };
    assert!(matches!(
        check_axiom(&nerve, "ASSOC", &[inst]),
        Err(LawError::MalformedSample { .. })
    ));
}

/// The 2×2 array `[[Γ⁻ᵢx, a], [b, Γ⁻ᵢy]]`, rows composed in direction
/// `i + 1` and then stacked in direction `i`.
fn gamma_minus_array<M: CubeSystem>(m: &M, x: &M::Cube, y: &M::Cube, i: usize, a: &M::Cube, b: &M::Cube) -> CubeResult<M::Cube> {
    let top = m.compose(&m.connection(x, i, Sign::Minus)?, a, i + 1)?;
    let bottom = m.compose(b, &m.connection(y, i, Sign::Minus)?, i + 1)?;
    m.compose(&top, &bottom, i)
}

#[test]
fn transport_minus_orientation_is_the_only_one_that_validates() {
    let nerves: Vec<Nerve> = bundled::all().into_iter().map(|c| Nerve::new(c, 4)).collect();
    // Off-diagonal cells: ε in direction i or i + 1, applied to x or y.
    let mut valid = Vec::new();
    for top in 0..4 {
        for bottom in 0..4 {
            let holds = nerves.iter().all(|nerve| {
                let catalog = Catalog::new(nerve, 2).unwrap();
                (1..=2).all(|d| {
                    catalog.cubes(d).unwrap().iter().all(|x| {
                        instances_for(&catalog, Law::TransportMinus, x).iter().all(|inst| {
                            let (x, y, i) = (&inst.cubes[0], &inst.cubes[1], inst.dirs[0]);
                            let cell = |code: usize| nerve.degeneracy(if code % 2 == 1 { y } else { x }, i + code / 2);
                            let lhs = nerve.connection(&nerve.compose(x, y, i).unwrap(), i, Sign::Minus).unwrap();
                            match (cell(top), cell(bottom)) {
                                (Ok(a), Ok(b)) => gamma_minus_array(nerve, x, y, i, &a, &b).map_or(false, |r| r == lhs),
                                _ => false,
                            }
                        })
                    })
                })
            });
            if holds {
                valid.push((top, bottom));
            }
        }
    }
    // top = εᵢy, bottom = εᵢ₊₁y
    assert_eq!(valid, vec![(1, 3)]);
    let registry = Law::TransportMinus.statement();
    assert!(registry.contains("(Γ⁻ᵢx ∘ᵢ₊₁ εᵢy) ∘ᵢ (εᵢ₊₁y ∘ᵢ₊₁ Γ⁻ᵢy)"));
}

#[test]
fn tower_satisfies_every_law_exhaustively() {
    for name in ["poset2x2", "free-square"] {
        let tower = shell_tower(bundled::load(name).unwrap(), 1, 2);
        let catalog = Catalog::new(&tower, 2).unwrap();
        for law in Law::ALL {
            for d in law.min_dim()..=(3 - law.raise()).min(2) {
                let report = check_exhaustive(&catalog, law, d);
                assert!(report.passed(), "{law} at dim {d} on tower({name}): {:?}", report.counterexample);
            }
        }
    }
}

#[test]
fn broken_model_counterexample_reproduces() {
    let broken = Broken::new(Nerve::new(bundled::load("poset2x2").unwrap(), 3));
    let catalog = Catalog::new(&broken, 2).unwrap();
    let failures: Vec<_> = Law::ALL
        .into_iter()
        .filter_map(|law| {
            (law.min_dim()..=(3 - law.raise()).min(2))
                .map(|d| check_exhaustive(&catalog, law, d))
                .find_map(|r| r.counterexample.map(|c| (law, c)))
        })
        .collect();
    assert!(!failures.is_empty());
    for (law, c) in failures {
        let again = check_axiom(&broken, law.id(), std::slice::from_ref(&c.instance)).unwrap();
        assert_eq!(again.counterexample.as_ref().map(|c| &c.mismatch), Some(&c.mismatch));
        let healthy = check_axiom(broken.inner(), law.id(), &[c.instance]).unwrap();
        assert!(healthy.passed(), "{law} fails on the healthy nerve too");
    }
}

fn arity(shape: Shape) -> usize {
    match shape {
        Shape::One => 1,
        Shape::Pair => 2,
        Shape::Triple => 3,
        Shape::Grid => 4,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_instances_satisfy_every_law(seed: u64, law_index in 0..Law::ALL.len(), cat_index in 0..bundled::NAMES.len(), d in 1usize..=3) {
        let law = Law::ALL[law_index];
        let nerve = Nerve::new(bundled::load(bundled::NAMES[cat_index]).unwrap(), 4);
        let catalog = Catalog::new(&nerve, 3).unwrap();
        prop_assume!(d >= law.min_dim() && d + law.raise() <= 4);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        if let Some(inst) = random_instance(&catalog, law, d, &mut rng) {
            prop_assert_eq!(inst.cubes.len(), arity(law.shape()));
            prop_assert!(inst.cubes.iter().all(|c| nerve.dim(c) == d));
            law.validate(&nerve, &inst).unwrap();
            prop_assert!(law.evaluate(&nerve, &inst).is_none());
        }
    }

    #[test]
    fn decoded_cubes_round_trip(seed: u64, d in 0usize..=3) {
        let nerve = Nerve::new(bundled::load("free-square").unwrap(), 3);
        let catalog = Catalog::new(&nerve, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = catalog.random(d, &[], &mut rng).unwrap();
        prop_assert_eq!(nerve.decode(&nerve.encode(&x)).unwrap(), x);
    }
}
