use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use cubical::models::fincat::bundled;
use cubical::models::sample::Catalog;
use cubical::models::{shell_tower, FiniteModel, Nerve};
use cubical::shell::{
    all_shells, boundary, is_commutative, shell_big_fold, shell_compose, shell_connection, shell_degeneracy, Shell, ShellError,
};
use cubical::{CubeSystem, Sign};

#[test]
fn nerve_squares_commute_iff_their_paths_agree() {
    for cat in bundled::all() {
        let nerve = Nerve::new(cat, 3);
        let edges = nerve.enumerate(1).unwrap();
        let shells = all_shells(&nerve, 2, &edges).unwrap();
        assert!(!shells.is_empty());
        let c = nerve.category();
        let arrow = |x: &_| nerve.path(x, 0, 1);
        let mut commuting = 0;
        for s in &shells {
            // left then top against bottom then right
            let via_left = c.compose(arrow(s.face(2, Sign::Plus)), arrow(s.face(1, Sign::Minus)));
            let via_bottom = c.compose(arrow(s.face(1, Sign::Plus)), arrow(s.face(2, Sign::Minus)));
            let expected = via_left == via_bottom;
            assert_eq!(is_commutative(&nerve, s).unwrap(), expected, "{s:?} in {}", c.name());
            assert_eq!(!nerve.fillers(s).is_empty(), expected);
            commuting += usize::from(expected);
        }
        if c.name() == "free-square" {
            assert!(commuting < shells.len());
        }
    }
}

#[test]
fn nerve_three_shells_commute_iff_fillable() {
    for name in ["poset2x2", "free-square"] {
        let nerve = Nerve::new(bundled::load(name).unwrap(), 3);
        let squares = nerve.enumerate(2).unwrap();
        for s in all_shells(&nerve, 3, &squares).unwrap() {
            assert_eq!(is_commutative(&nerve, &s).unwrap(), !nerve.fillers(&s).is_empty());
        }
    }
}

#[test]
fn n_and_p_of_a_two_shell_are_the_path_composites() {
    let nerve = Nerve::new(bundled::load("free-square").unwrap(), 3);
    let edges = nerve.enumerate(1).unwrap();
    for s in all_shells(&nerve, 2, &edges).unwrap() {
        let f = shell_big_fold(&nerve, &s).unwrap();
        let n = nerve.compose(s.face(1, Sign::Minus), s.face(2, Sign::Plus), 1).unwrap();
        let p = nerve.compose(s.face(2, Sign::Minus), s.face(1, Sign::Plus), 1).unwrap();
        assert_eq!(f.n_face, n);
        assert_eq!(f.p_face, p);
    }
}

#[test]
fn incompatible_faces_are_rejected() {
    let nerve = Nerve::new(bundled::load("poset2x2").unwrap(), 3);
    let arrow = |n| nerve.arrow_named(n).unwrap();
    let square = Shell::new(&nerve, vec![arrow("h"), arrow("g"), arrow("f"), arrow("k")]).unwrap();
    assert_eq!(square.dim(), 2);
    assert!(matches!(
        Shell::new(&nerve, vec![arrow("g"), arrow("h"), arrow("f"), arrow("k")]),
        Err(ShellError::Incidence { .. })
    ));
    assert!(matches!(
        Shell::new(&nerve, vec![arrow("f"), arrow("g"), arrow("h")]),
        Err(ShellError::WrongArity(3))
    ));
    let point = nerve.face(&arrow("f"), 1, Sign::Minus).unwrap();
    assert!(matches!(
        Shell::new(&nerve, vec![arrow("h"), arrow("g"), arrow("f"), point]),
        Err(ShellError::FaceDimension { .. })
    ));
}

#[test]
fn tower_cells_are_shells_one_level_down() {
    let tower = shell_tower(bundled::load("free-square").unwrap(), 1, 2);
    for x in tower.enumerate(2).unwrap() {
        let s = tower.shell(&x).expect("2-cells of the tower are shells");
        assert_eq!(s.faces(), boundary(&tower, &x).unwrap().faces());
    }
}

fn model(cat_index: usize) -> Nerve {
    Nerve::new(bundled::load(bundled::NAMES[cat_index]).unwrap(), 4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn boundary_commutes_with_composition(seed: u64, cat_index in 0..bundled::NAMES.len(), n in 1usize..=3, i_raw: usize) {
        let nerve = model(cat_index);
        let catalog = Catalog::new(&nerve, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let i = 1 + i_raw % n;
        let x = catalog.random(n, &[], &mut rng).unwrap();
        let upper = nerve.face(&x, i, Sign::Plus).unwrap();
        let y = catalog.random(n, &[(i, Sign::Minus, upper)], &mut rng).unwrap();
        let composite = nerve.compose(&x, &y, i).unwrap();
        let bx = boundary(&nerve, &x).unwrap();
        let by = boundary(&nerve, &y).unwrap();
        prop_assert_eq!(boundary(&nerve, &composite).unwrap(), shell_compose(&nerve, &bx, &by, i).unwrap());
    }

    #[test]
    fn boundary_commutes_with_degeneracies_and_connections(seed: u64, cat_index in 0..bundled::NAMES.len(), n in 1usize..=3, j_raw: usize) {
        let nerve = model(cat_index);
        let catalog = Catalog::new(&nerve, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = catalog.random(n, &[], &mut rng).unwrap();
        let j = 1 + j_raw % (n + 1);
        prop_assert_eq!(
            boundary(&nerve, &nerve.degeneracy(&a, j).unwrap()).unwrap(),
            shell_degeneracy(&nerve, &a, j).unwrap()
        );
        let j = 1 + j_raw % n;
        for alpha in Sign::BOTH {
            let s = shell_connection(&nerve, &a, j, alpha).unwrap();
            prop_assert_eq!(boundary(&nerve, &nerve.connection(&a, j, alpha).unwrap()).unwrap(), s.clone());
            s.validate(&nerve).unwrap();
            prop_assert!(is_commutative(&nerve, &s).unwrap());
        }
    }

    #[test]
    fn boundaries_are_commutative_shells(seed: u64, cat_index in 0..bundled::NAMES.len(), n in 2usize..=4) {
        let nerve = model(cat_index);
        let catalog = Catalog::new(&nerve, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        if let Some(x) = catalog.random(n, &[], &mut rng) {
            let s = boundary(&nerve, &x).unwrap();
            s.validate(&nerve).unwrap();
            prop_assert!(is_commutative(&nerve, &s).unwrap());
        }
    }
}
