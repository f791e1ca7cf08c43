use std::fs;
use std::path::PathBuf;

use cubical::array::{
    classify, compose_array, compose_partition_checked, render_ascii, render_symbolic, resolve_symbols, Assoc, Axis,
    ComposableArray, ComposablePartition, Plan, Rect, SymbolKind, SymbolicCell,
};
use cubical::fillers::{array_a, array_a_grid, psi_refinement, psi_row, psi_row_grid, unfold_partition};
use cubical::folding::psi;
use cubical::models::fincat::bundled;
use cubical::models::sample::Catalog;
use cubical::models::{shell_tower, FiniteModel, Nerve};
use cubical::shell::boundary;
use cubical::{CubeSystem, Sign};

fn golden(name: &str, actual: &str) {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        fs::create_dir_all(path.parent().unwrap()).unwrap();
        fs::write(&path, actual).unwrap();
    }
    let expected = fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(actual, expected, "golden file {name} differs");
}

/// All `rows × cols` arrays of `n`-cubes composable in directions `h`
/// (along rows) and `v` (down columns).
fn arrays<M: FiniteModel>(cat: &Catalog<'_, M>, n: usize, rows: usize, cols: usize, h: usize, v: usize) -> Vec<Vec<Vec<M::Cube>>> {
    let m = cat.model();
    let cubes = cat.cubes(n).unwrap();
    let mut out = Vec::new();
    let mut grid: Vec<Vec<M::Cube>> = Vec::new();
    fn go<M: FiniteModel>(
        m: &M,
        cat: &Catalog<'_, M>,
        cubes: &[M::Cube],
        n: usize,
        shape: (usize, usize, usize, usize),
        k: usize,
        grid: &mut Vec<Vec<M::Cube>>,
        out: &mut Vec<Vec<Vec<M::Cube>>>,
    ) {
        let (rows, cols, h, v) = shape;
        if k == rows * cols {
            out.push(grid.clone());
            return;
        }
        let (r, c) = (k / cols, k % cols);
        let candidates: Vec<usize> = if c > 0 {
            cat.with_face(n, h, Sign::Minus, &m.face(&grid[r][c - 1], h, Sign::Plus).unwrap()).to_vec()
        } else if r > 0 {
            cat.with_face(n, v, Sign::Minus, &m.face(&grid[r - 1][c], v, Sign::Plus).unwrap()).to_vec()
        } else {
            (0..cubes.len()).collect()
        };
        for idx in candidates {
            let x = &cubes[idx];
            if r > 0 && m.face(x, v, Sign::Minus).unwrap() != m.face(&grid[r - 1][c], v, Sign::Plus).unwrap() {
                continue;
            }
            if c == 0 {
                grid.push(Vec::new());
            }
            grid[r].push(x.clone());
            go(m, cat, cubes, n, shape, k + 1, grid, out);
            grid[r].pop();
            if c == 0 {
                grid.pop();
            }
        }
    }
    go(m, cat, cubes, n, (rows, cols, h, v), 0, &mut grid, &mut out);
    out
}

#[test]
fn interchange_on_nerve_arrays() {
    for name in ["poset2x2", "free-square", "parallel-arrows"] {
        let nerve = Nerve::new(bundled::load(name).unwrap(), 2);
        let cat = Catalog::new(&nerve, 2).unwrap();
        for (rows, cols) in [(2, 2), (2, 3)] {
            for (h, v) in [(2, 1), (1, 2)] {
                let all = arrays(&cat, 2, rows, cols, h, v);
                assert!(!all.is_empty());
                for cells in all {
                    let a = ComposableArray::new(&nerve, cells, h, v).unwrap();
                    assert_eq!(a.compose_rows_first(&nerve).unwrap(), a.compose_columns_first(&nerve).unwrap());
                }
            }
        }
    }
}

#[test]
fn interchange_on_tower_arrays() {
    let tower = shell_tower(bundled::load("free-square").unwrap(), 1, 1);
    let cat = Catalog::new(&tower, 2).unwrap();
    let all = arrays(&cat, 2, 2, 2, 2, 1);
    assert!(!all.is_empty());
    for cells in all {
        let a = ComposableArray::new(&tower, cells, 2, 1).unwrap();
        assert_eq!(a.compose_rows_first(&tower).unwrap(), a.compose_columns_first(&tower).unwrap());
    }
}

fn proof_partitions<M: FiniteModel>(m: &M, n: usize) {
    for x in m.enumerate(n).unwrap() {
        let s = boundary(m, &x).unwrap();
        for j in 1..n {
            let a = psi(m, &x, j).unwrap();
            assert_eq!(compose_array(m, &psi_row(m, &x, j).unwrap()).unwrap(), a);
            let arr = array_a(m, &x, j).unwrap();
            assert_eq!(arr.compose_rows_first(m).unwrap(), x);
            assert_eq!(arr.compose_columns_first(m).unwrap(), x);

            let unfold = unfold_partition(m, &a, &s, j).unwrap();
            let right = Plan::guillotine(&unfold.rects(), Axis::Vertical, Assoc::Right).unwrap();
            assert_ne!(&right, unfold.order());
            assert_eq!(compose_partition_checked(m, &unfold, &right).unwrap(), x);

            let refined = psi_refinement(m, &a, &s, j).unwrap();
            let columns = Plan::columns_first(&refined.rects()).unwrap();
            assert_ne!(&columns, refined.order());
            assert_eq!(compose_partition_checked(m, &refined, &columns).unwrap(), a);
        }
    }
}

#[test]
fn proof_partitions_on_nerves() {
    for cat in bundled::all() {
        proof_partitions(&Nerve::new(cat, 3), 3);
    }
}

#[test]
fn proof_partitions_on_towers() {
    for name in ["poset2x2", "free-square"] {
        proof_partitions(&shell_tower(bundled::load(name).unwrap(), 1, 2), 3);
    }
}

#[test]
fn symbolic_round_trip() {
    let nerve = Nerve::new(bundled::load("free-square").unwrap(), 3);
    let mut checked = 0;
    for x in nerve.enumerate(2).unwrap() {
        let faces_plain = (1..=2).all(|i| Sign::BOTH.iter().all(|&e| !nerve.category().is_identity(nerve.path(&nerve.face(&x, i, e).unwrap(), 0, 1))));
        if !faces_plain {
            continue;
        }
        for grid in [psi_row_grid(&x), array_a_grid(&x)] {
            let a = resolve_symbols(&nerve, &grid, 2, 1, &[]).unwrap();
            for (r, row) in grid.iter().enumerate() {
                for (c, cell) in row.iter().enumerate() {
                    let kind = classify(&nerve, a.get(r, c), 2, 1).unwrap();
                    assert_eq!(kind, cell.kind(), "cell ({r},{c})");
                }
            }
        }
        checked += 1;
    }
    assert!(checked > 0);
}

#[test]
fn golden_psi_row() {
    let grid: Vec<Vec<SymbolicCell<()>>> = psi_row_grid(&());
    golden("psi_row.txt", &render_symbolic(&grid, 2, 1, |_| "x".to_string()));
}

#[test]
fn golden_array_a() {
    let grid: Vec<Vec<SymbolicCell<()>>> = array_a_grid(&());
    golden("array_a.txt", &render_symbolic(&grid, 2, 1, |_| "x".to_string()));
}

#[test]
fn golden_spanning_partition() {
    let cells = vec![
        (Rect::unit(0, 0), "a".to_string()),
        (Rect::unit(0, 1), "b".to_string()),
        (Rect::new(1, 0, 1, 2), "c".to_string()),
    ];
    golden("spanning.txt", &render_ascii(&cells, 2, 1));
}

#[test]
fn golden_identity_display() {
    let grid: Vec<Vec<SymbolicCell<()>>> = vec![
        vec![SymbolicCell::Plain(()), SymbolicCell::EpsH],
        vec![SymbolicCell::EpsV, SymbolicCell::DoubleIdentity],
    ];
    golden("identity_display.txt", &render_symbolic(&grid, 2, 1, |_| "x".to_string()));
    assert_eq!(SymbolKind::DoubleIdentity.symbol(), "□");
}

#[test]
fn spanning_partition_composite() {
    let nerve = Nerve::new(bundled::load("poset2x2").unwrap(), 3);
    let f = nerve.arrow_named("f").unwrap();
    // a = ε₂f, b = ε₂f; c = ε₁ of the composite's lower edge.
    let a = nerve.degeneracy(&f, 2).unwrap();
    let top = nerve.compose(&a, &a, 2).unwrap();
    let c = nerve.degeneracy(&nerve.face(&top, 1, Sign::Plus).unwrap(), 1).unwrap();
    let p = ComposablePartition::rows_first(
        vec![(Rect::unit(0, 0), a.clone()), (Rect::unit(0, 1), a.clone()), (Rect::new(1, 0, 1, 2), c.clone())],
        2,
        1,
    )
    .unwrap();
    let expected = nerve.compose(&nerve.compose(&a, &a, 2).unwrap(), &c, 1).unwrap();
    assert_eq!(cubical::array::compose_partition(&nerve, &p).unwrap(), expected);
}
