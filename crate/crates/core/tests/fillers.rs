use cubical::expr::GeneratorExpression;
use cubical::fillers::{
    eval_in_shells, filler_from_fold, shell_decompose, thin_decompose, thin_filler, unfold_step, FillerError,
};
use cubical::folding::{fold, is_thin, psi};
use cubical::models::fincat::bundled;
use cubical::models::sample::Catalog;
use cubical::models::{shell_tower, FiniteModel, Nerve};
use cubical::shell::{all_shells, boundary, is_commutative, shell_degeneracy, shell_fold, Shell};
use cubical::thin::{check_morphism, connections_from_theta, theta_from_connections, theta_from_fillers, thin_class_difference};
use cubical::{CubeSystem, Sign};

fn poset() -> Nerve {
    Nerve::new(bundled::load("poset2x2").unwrap(), 4)
}

#[test]
fn thin_filler_of_a_connection_boundary_is_the_connection() {
    let nerve = poset();
    for n in 1..=2 {
        for c in nerve.enumerate(n).unwrap() {
            for i in 1..=n {
                for alpha in Sign::BOTH {
                    let g = nerve.connection(&c, i, alpha).unwrap();
                    assert_eq!(thin_filler(&nerve, &boundary(&nerve, &g).unwrap()).unwrap(), g);
                }
            }
        }
    }
}

#[test]
fn thin_filler_of_a_degenerate_shell_is_degenerate() {
    let nerve = poset();
    for u in nerve.enumerate(1).unwrap().into_iter().chain(nerve.enumerate(2).unwrap()) {
        let s = shell_degeneracy(&nerve, &u, 1).unwrap();
        assert_eq!(thin_filler(&nerve, &s).unwrap(), nerve.degeneracy(&u, 1).unwrap());
    }
}

#[test]
fn thin_filler_of_the_poset_square() {
    let nerve = poset();
    let c = nerve.category();
    let m = |n| c.morphism_by_name(n).unwrap();
    let square = nerve.square(m("f"), m("k"), m("h"), m("g")).unwrap();
    let arrow = |n| nerve.arrow_named(n).unwrap();
    let s = Shell::new(&nerve, vec![arrow("h"), arrow("g"), arrow("f"), arrow("k")]).unwrap();
    assert_eq!(thin_filler(&nerve, &s).unwrap(), square);
}

#[test]
fn non_commutative_shells_have_no_thin_filler() {
    let tower = shell_tower(bundled::load("free-square").unwrap(), 1, 2);
    let edges = tower.enumerate(1).unwrap();
    let squares = tower.enumerate(2).unwrap();
    let mut open = 0;
    for s in all_shells(&tower, 2, &edges).unwrap() {
        if is_commutative(&tower, &s).unwrap() {
            let x = thin_filler(&tower, &s).unwrap();
            let thin: Vec<_> = tower.fillers(&s).into_iter().filter(|y| is_thin(&tower, y).unwrap()).collect();
            assert_eq!(thin, vec![x]);
        } else {
            open += 1;
            assert_eq!(thin_filler(&tower, &s), Err(FillerError::NotCommutative));
            let fillers = tower.fillers(&s);
            assert!(!fillers.is_empty());
            assert!(fillers.iter().all(|y| !is_thin(&tower, y).unwrap()));
            assert!(fillers.iter().all(|y| squares.contains(y)));
        }
    }
    assert!(open > 0);
}

#[test]
fn decomposing_the_folded_connection_gives_a_degeneracy() {
    let nerve = poset();
    for a in nerve.enumerate(1).unwrap() {
        let plus = nerve.connection(&a, 1, Sign::Plus).unwrap();
        let minus = nerve.connection(&a, 1, Sign::Minus).unwrap();
        let x = nerve.compose(&plus, &minus, 2).unwrap();
        assert_eq!(x, nerve.degeneracy(&a, 1).unwrap());
        let expr = thin_decompose(&nerve, &x).unwrap();
        assert!(expr.is_base_free());
        assert_eq!(expr.eval(&nerve).unwrap(), nerve.degeneracy(&a, 1).unwrap());
    }
}

#[test]
fn generators_decompose_back_to_themselves() {
    let nerve = poset();
    for c in nerve.enumerate(2).unwrap() {
        for i in 1..=3 {
            let e = nerve.degeneracy(&c, i).unwrap();
            assert_eq!(thin_decompose(&nerve, &e).unwrap().eval(&nerve).unwrap(), e);
        }
        for i in 1..=2 {
            let g = nerve.connection(&c, i, Sign::Plus).unwrap();
            assert_eq!(thin_decompose(&nerve, &g).unwrap().eval(&nerve).unwrap(), g);
        }
    }
}

#[test]
fn non_thin_elements_do_not_decompose() {
    let tower = shell_tower(bundled::load("free-square").unwrap(), 1, 2);
    let open = tower.enumerate(2).unwrap().into_iter().find(|x| !is_thin(&tower, x).unwrap()).unwrap();
    assert_eq!(thin_decompose(&tower, &open), Err(FillerError::NotThin));
}

#[test]
fn unfolding_a_degenerate_input() {
    let nerve = poset();
    for u in nerve.enumerate(2).unwrap() {
        for j in 1..=2 {
            let e = nerve.degeneracy(&u, j).unwrap();
            let s = shell_degeneracy(&nerve, &u, j).unwrap();
            let a = psi(&nerve, &e, j).unwrap();
            assert_eq!(unfold_step(&nerve, &a, &s, j).unwrap(), e);
        }
    }
}

#[test]
fn one_dimensional_fillers_are_the_input() {
    let nerve = poset();
    for a in nerve.enumerate(1).unwrap() {
        let s = boundary(&nerve, &a).unwrap();
        assert_eq!(filler_from_fold(&nerve, &a, &s).unwrap(), a);
    }
}

#[test]
fn fold_round_trip_on_both_families() {
    let nerve = Nerve::new(bundled::load("free-square").unwrap(), 3);
    let tower = shell_tower(bundled::load("free-square").unwrap(), 1, 2);
    for x in nerve.enumerate(3).unwrap() {
        assert_eq!(filler_from_fold(&nerve, &fold(&nerve, &x).unwrap(), &boundary(&nerve, &x).unwrap()).unwrap(), x);
    }
    for x in tower.enumerate(3).unwrap() {
        let s = boundary(&tower, &x).unwrap();
        assert_eq!(filler_from_fold(&tower, &fold(&tower, &x).unwrap(), &s).unwrap(), x);
        for j in 1..3 {
            assert_eq!(unfold_step(&tower, &psi(&tower, &x, j).unwrap(), &s, j).unwrap(), x);
        }
    }
}

#[test]
fn tower_unfolding_has_exactly_one_preimage() {
    let tower = shell_tower(bundled::load("poset2x2").unwrap(), 1, 2);
    let squares = tower.enumerate(2).unwrap();
    let cubes = tower.enumerate(3).unwrap();
    let shells = all_shells(&tower, 3, &squares).unwrap();
    let mut pairs = 0;
    for s in &shells {
        let fillers = tower.fillers(s);
        for j in 1..3 {
            let target = shell_fold(&tower, s, j).unwrap();
            for a in cubes.iter().filter(|a| boundary(&tower, a).unwrap() == target) {
                let preimages: Vec<_> = fillers.iter().filter(|y| psi(&tower, y, j).unwrap() == *a).collect();
                assert_eq!(preimages.len(), 1);
                assert_eq!(&unfold_step(&tower, a, s, j).unwrap(), preimages[0]);
                pairs += 1;
            }
        }
    }
    assert!(pairs > 0);
}

#[test]
fn commutative_shells_decompose_into_shell_generators() {
    let tower = shell_tower(bundled::load("free-square").unwrap(), 1, 1);
    let edges = tower.enumerate(1).unwrap();
    for s in all_shells(&tower, 2, &edges).unwrap() {
        match shell_decompose(&tower, &s) {
            Ok(expr) => {
                assert!(expr.is_base_free());
                assert_eq!(eval_in_shells(&tower, &expr).unwrap(), s);
            }
            Err(e) => {
                assert_eq!(e, FillerError::NotCommutative);
                assert!(!is_commutative(&tower, &s).unwrap());
            }
        }
    }
}

#[test]
fn expressions_survive_json() {
    let nerve = poset();
    let x = nerve.enumerate(3).unwrap().pop().unwrap();
    let expr = thin_decompose(&nerve, &x).unwrap();
    let back = GeneratorExpression::from_json_in(&nerve, &expr.to_json_in(&nerve)).unwrap();
    assert_eq!(back, expr);
}

#[test]
fn theta_examples() {
    let nerve = poset();
    let catalog = Catalog::new(&nerve, 3).unwrap();
    for n in 2..=3 {
        let theta = theta_from_connections(&catalog, n).unwrap();
        for a in catalog.cubes(n - 1).unwrap() {
            for i in 1..=n {
                let s = shell_degeneracy(&nerve, a, i).unwrap();
                assert_eq!(theta.get(&s), Some(&nerve.degeneracy(a, i).unwrap()));
            }
            for i in 1..n {
                for alpha in Sign::BOTH {
                    let g = nerve.connection(a, i, alpha).unwrap();
                    assert_eq!(theta.get(&boundary(&nerve, &g).unwrap()), Some(&g));
                }
            }
        }
        let counts = check_morphism(&catalog, &theta).unwrap();
        assert!(counts.composites > 0);
        // In a nerve every commutative shell has exactly one filler.
        assert_eq!(theta_from_fillers(&catalog, n).unwrap(), theta);
        let induced = connections_from_theta(&catalog, &theta).unwrap();
        for a in catalog.cubes(n - 1).unwrap() {
            for i in 1..n {
                for alpha in Sign::BOTH {
                    assert_eq!(induced.get(a, i, alpha), Some(&nerve.connection(a, i, alpha).unwrap()));
                }
            }
        }
        assert_eq!(thin_class_difference(&catalog, &theta, &induced).unwrap().1, None);
    }
}
