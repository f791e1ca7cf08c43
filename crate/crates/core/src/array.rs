//! Two-dimensional composable arrays and partitions of cubes.
//!
//! Arrays compose in two directions: `dir_h` along rows and `dir_v` down
//! columns. Row 0 is the top row, so a column `[x, y]` composes to
//! `x ∘ᵥ y`; a row `[x, y]` composes to `x ∘ₕ y`.

use std::collections::HashSet;

use thiserror::Error;

use crate::cube::{is_degenerate, require_composable, CubeError, CubeSystem, Sign};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArrayError {
    #[error("array has no cells")]
    Empty,
    #[error("row {row} has {len} cells, expected {expected}")]
    Ragged { row: usize, len: usize, expected: usize },
    #[error("horizontal and vertical directions must differ (both {0})")]
    SameDirection(usize),
    #[error("cell at ({row},{col}) has dimension {dim}, expected {expected}")]
    CellDimension {
        row: usize,
        col: usize,
        dim: usize,
        expected: usize,
    },
    #[error("{step}: {cause}")]
    NotComposable { step: String, cause: CubeError },
    #[error("evaluation orders disagree: {first} vs {second}")]
    InterchangeViolation { first: String, second: String },
    #[error("bad tiling: {0}")]
    BadTiling(String),
    #[error("cell ({row},{col}) is unresolvable: {reason}")]
    Unresolvable { row: usize, col: usize, reason: String },
    #[error(transparent)]
    Cube(#[from] CubeError),
}

/// Which way two blocks are glued.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    /// Side by side, composed in `dir_h`.
    Horizontal,
    /// One above the other, composed in `dir_v`.
    Vertical,
}

/// A rectangular grid of cubes whose neighbours are composable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComposableArray<C> {
    cells: Vec<Vec<C>>,
    dir_h: usize,
    dir_v: usize,
}

fn compose_step<M: CubeSystem>(m: &M, x: &M::Cube, y: &M::Cube, dir: usize, step: impl FnOnce() -> String) -> Result<M::Cube, ArrayError> {
    require_composable(m, x, y, dir).map_err(|cause| ArrayError::NotComposable { step: step(), cause })?;
    Ok(m.compose(x, y, dir)?)
}

impl<C: Clone + Eq + std::fmt::Debug> ComposableArray<C> {
    /// Validates shape, dimensions and every adjacency.
    pub fn new<M: CubeSystem<Cube = C>>(
        m: &M,
        cells: Vec<Vec<C>>,
        dir_h: usize,
        dir_v: usize,
    ) -> Result<ComposableArray<C>, ArrayError> {
        if dir_h == dir_v {
            return Err(ArrayError::SameDirection(dir_h));
        }
        let cols = cells.first().map(Vec::len).unwrap_or(0);
        if cols == 0 {
            return Err(ArrayError::Empty);
        }
        for (row, r) in cells.iter().enumerate() {
            if r.len() != cols {
                return Err(ArrayError::Ragged {
                    row,
                    len: r.len(),
                    expected: cols,
                });
            }
        }
        let n = m.dim(&cells[0][0]);
        for (row, r) in cells.iter().enumerate() {
            for (col, x) in r.iter().enumerate() {
                if m.dim(x) != n {
                    return Err(ArrayError::CellDimension {
                        row,
                        col,
                        dim: m.dim(x),
                        expected: n,
                    });
                }
            }
        }
        for (row, r) in cells.iter().enumerate() {
            for (col, x) in r.iter().enumerate() {
                if let Some(y) = r.get(col + 1) {
                    require_composable(m, x, y, dir_h).map_err(|cause| ArrayError::NotComposable {
                        step: format!("({row},{col}) | ({row},{}) in direction {dir_h}", col + 1),
                        cause,
                    })?;
                }
                if let Some(y) = cells.get(row + 1).map(|below| &below[col]) {
                    require_composable(m, x, y, dir_v).map_err(|cause| ArrayError::NotComposable {
                        step: format!("({row},{col}) / ({},{col}) in direction {dir_v}", row + 1),
                        cause,
                    })?;
                }
            }
        }
        Ok(ComposableArray { cells, dir_h, dir_v })
    }

    pub fn rows(&self) -> usize {
        self.cells.len()
    }

    pub fn cols(&self) -> usize {
        self.cells[0].len()
    }

    pub fn get(&self, row: usize, col: usize) -> &C {
        &self.cells[row][col]
    }

    pub fn cells(&self) -> &[Vec<C>] {
        &self.cells
    }

    pub fn dir_h(&self) -> usize {
        self.dir_h
    }

    pub fn dir_v(&self) -> usize {
        self.dir_v
    }

    /// Composes each row in `dir_h`, then the row composites in `dir_v`.
    pub fn compose_rows_first<M: CubeSystem<Cube = C>>(&self, m: &M) -> Result<C, ArrayError> {
        let mut rows = Vec::with_capacity(self.rows());
        for (r, row) in self.cells.iter().enumerate() {
            rows.push(fold_line(m, row.iter(), self.dir_h, |k| format!("row {r}, cell {k}"))?);
        }
        fold_line(m, rows.iter(), self.dir_v, |k| format!("row composite {k}"))
    }

    /// Composes each column in `dir_v`, then the column composites in `dir_h`.
    pub fn compose_columns_first<M: CubeSystem<Cube = C>>(&self, m: &M) -> Result<C, ArrayError> {
        let mut cols = Vec::with_capacity(self.cols());
        for c in 0..self.cols() {
            cols.push(fold_line(m, self.cells.iter().map(|r| &r[c]), self.dir_v, |k| {
                format!("column {c}, cell {k}")
            })?);
        }
        fold_line(m, cols.iter(), self.dir_h, |k| format!("column composite {k}"))
    }

    /// The composite, computed both ways and compared.
    pub fn compose<M: CubeSystem<Cube = C>>(&self, m: &M) -> Result<C, ArrayError> {
        compose_array(m, self)
    }

    /// The same cells as a partition of unit squares.
    pub fn to_partition(&self) -> ComposablePartition<C> {
        let mut cells = Vec::with_capacity(self.rows() * self.cols());
        for (row, r) in self.cells.iter().enumerate() {
            for (col, x) in r.iter().enumerate() {
                cells.push((Rect::unit(row, col), x.clone()));
            }
        }
        let rects: Vec<Rect> = cells.iter().map(|(r, _)| *r).collect();
        let order = Plan::rows_first(&rects).expect("a grid always has a guillotine plan");
        ComposablePartition {
            cells,
            dir_h: self.dir_h,
            dir_v: self.dir_v,
            order,
        }
    }

    pub fn render(&self, label: impl Fn(&C) -> String) -> String {
        self.to_partition().render(label)
    }
}

/// Left-to-right composite of a nonempty line of cubes.
fn fold_line<'a, M: CubeSystem>(
    m: &M,
    mut cells: impl Iterator<Item = &'a M::Cube>,
    dir: usize,
    step: impl Fn(usize) -> String,
) -> Result<M::Cube, ArrayError>
where
    M::Cube: 'a,
{
    let mut acc = cells.next().ok_or(ArrayError::Empty)?.clone();
    for (k, x) in cells.enumerate() {
        acc = compose_step(m, &acc, x, dir, || step(k + 1))?;
    }
    Ok(acc)
}

/// Row-first and column-first composites, which must agree.
pub fn compose_array<M: CubeSystem>(m: &M, a: &ComposableArray<M::Cube>) -> Result<M::Cube, ArrayError> {
    let rows = a.compose_rows_first(m)?;
    let cols = a.compose_columns_first(m)?;
    if rows != cols {
        return Err(ArrayError::InterchangeViolation {
            first: format!("{rows:?}"),
            second: format!("{cols:?}"),
        });
    }
    Ok(rows)
}

/// A rectangle of unit cells: rows `row..row + height`, columns `col..col + width`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rect {
    pub row: usize,
    pub col: usize,
    pub height: usize,
    pub width: usize,
}

impl Rect {
    pub fn new(row: usize, col: usize, height: usize, width: usize) -> Rect {
        Rect { row, col, height, width }
    }

    pub fn unit(row: usize, col: usize) -> Rect {
        Rect::new(row, col, 1, 1)
    }

    fn bottom(&self) -> usize {
        self.row + self.height
    }

    fn right(&self) -> usize {
        self.col + self.width
    }

    fn hull(&self, other: &Rect) -> Rect {
        let (row, col) = (self.row.min(other.row), self.col.min(other.col));
        Rect::new(row, col, self.bottom().max(other.bottom()) - row, self.right().max(other.right()) - col)
    }
}

/// Which association to use when a block splits into more than two pieces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Assoc {
    Left,
    Right,
}

/// An evaluation order: a binary tree of compositions over cell indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Plan {
    Cell(usize),
    Compose {
        axis: Axis,
        first: Box<Plan>,
        second: Box<Plan>,
    },
}

impl Plan {
    pub fn compose(axis: Axis, first: Plan, second: Plan) -> Plan {
        Plan::Compose {
            axis,
            first: Box::new(first),
            second: Box::new(second),
        }
    }

    /// Cuts into horizontal bands first, composing them vertically; each band
    /// is planned the same way. Left-associated.
    pub fn rows_first(rects: &[Rect]) -> Result<Plan, ArrayError> {
        Plan::guillotine(rects, Axis::Vertical, Assoc::Left)
    }

    /// Cuts into vertical strips first, composing them horizontally.
    pub fn columns_first(rects: &[Rect]) -> Result<Plan, ArrayError> {
        Plan::guillotine(rects, Axis::Horizontal, Assoc::Left)
    }

    /// Recursive guillotine decomposition. At each block, cuts along every
    /// full-length line of the preferred axis if there is one, else the other.
    pub fn guillotine(rects: &[Rect], prefer: Axis, assoc: Assoc) -> Result<Plan, ArrayError> {
        if rects.is_empty() {
            return Err(ArrayError::Empty);
        }
        let all: Vec<usize> = (0..rects.len()).collect();
        guillotine_block(rects, &all, prefer, assoc)
    }

    fn cells(&self, out: &mut Vec<usize>) {
        match self {
            Plan::Cell(k) => out.push(*k),
            Plan::Compose { first, second, .. } => {
                first.cells(out);
                second.cells(out);
            }
        }
    }

    /// The region covered, checking each composition glues adjacent blocks.
    fn region(&self, rects: &[Rect]) -> Result<Rect, ArrayError> {
        match self {
            Plan::Cell(k) => rects
                .get(*k)
                .copied()
                .ok_or_else(|| ArrayError::BadTiling(format!("plan refers to missing cell {k}"))),
            Plan::Compose { axis, first, second } => {
                let (a, b) = (first.region(rects)?, second.region(rects)?);
                let glued = match axis {
                    Axis::Horizontal => a.row == b.row && a.height == b.height && a.right() == b.col,
                    Axis::Vertical => a.col == b.col && a.width == b.width && a.bottom() == b.row,
                };
                if !glued {
                    return Err(ArrayError::BadTiling(format!(
                        "{a:?} and {b:?} cannot be glued {}",
                        match axis {
                            Axis::Horizontal => "side by side",
                            Axis::Vertical => "one above the other",
                        }
                    )));
                }
                Ok(a.hull(&b))
            }
        }
    }
}

fn cuts(rects: &[Rect], block: &[usize], axis: Axis) -> Vec<usize> {
    // Cut positions strictly inside the block that no rectangle straddles.
    let span = |r: &Rect| match axis {
        Axis::Vertical => (r.row, r.bottom()),
        Axis::Horizontal => (r.col, r.right()),
    };
    let lo = block.iter().map(|&k| span(&rects[k]).0).min().unwrap_or(0);
    let hi = block.iter().map(|&k| span(&rects[k]).1).max().unwrap_or(0);
    (lo + 1..hi)
        .filter(|&c| {
            block.iter().all(|&k| {
                let (a, b) = span(&rects[k]);
                c <= a || c >= b
            })
        })
        .collect()
}

fn guillotine_block(rects: &[Rect], block: &[usize], prefer: Axis, assoc: Assoc) -> Result<Plan, ArrayError> {
    if let [k] = block {
        return Ok(Plan::Cell(*k));
    }
    let other = match prefer {
        Axis::Horizontal => Axis::Vertical,
        Axis::Vertical => Axis::Horizontal,
    };
    let (axis, lines) = match cuts(rects, block, prefer) {
        c if !c.is_empty() => (prefer, c),
        _ => (other, cuts(rects, block, other)),
    };
    if lines.is_empty() {
        return Err(ArrayError::BadTiling("block has no guillotine cut".to_string()));
    }
    let start = |r: &Rect| match axis {
        Axis::Vertical => r.row,
        Axis::Horizontal => r.col,
    };
    let mut pieces: Vec<Vec<usize>> = vec![Vec::new(); lines.len() + 1];
    for &k in block {
        let p = lines.iter().take_while(|&&c| c <= start(&rects[k])).count();
        pieces[p].push(k);
    }
    let mut plans = pieces
        .iter()
        .map(|p| guillotine_block(rects, p, prefer, assoc))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(match assoc {
        Assoc::Left => {
            let mut it = plans.into_iter();
            let first = it.next().expect("at least two pieces");
            it.fold(first, |acc, p| Plan::compose(axis, acc, p))
        }
        Assoc::Right => {
            let last = plans.pop().expect("at least two pieces");
            plans.into_iter().rev().fold(last, |acc, p| Plan::compose(axis, p, acc))
        }
    })
}

/// A tiling of a rectangle by cubes with an explicit evaluation order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComposablePartition<C> {
    cells: Vec<(Rect, C)>,
    dir_h: usize,
    dir_v: usize,
    order: Plan,
}

impl<C: Clone + Eq + std::fmt::Debug> ComposablePartition<C> {
    /// Checks the tiling and that `order` glues adjacent blocks and uses
    /// every cell once. Face matching is checked when the order is evaluated.
    pub fn new(cells: Vec<(Rect, C)>, dir_h: usize, dir_v: usize, order: Plan) -> Result<ComposablePartition<C>, ArrayError> {
        if dir_h == dir_v {
            return Err(ArrayError::SameDirection(dir_h));
        }
        let rects: Vec<Rect> = cells.iter().map(|(r, _)| *r).collect();
        check_tiling(&rects)?;
        check_plan(&rects, &order)?;
        Ok(ComposablePartition {
            cells,
            dir_h,
            dir_v,
            order,
        })
    }

    /// A partition evaluated rows first.
    pub fn rows_first(cells: Vec<(Rect, C)>, dir_h: usize, dir_v: usize) -> Result<ComposablePartition<C>, ArrayError> {
        let rects: Vec<Rect> = cells.iter().map(|(r, _)| *r).collect();
        let order = Plan::rows_first(&rects)?;
        ComposablePartition::new(cells, dir_h, dir_v, order)
    }

    pub fn cells(&self) -> &[(Rect, C)] {
        &self.cells
    }

    pub fn rects(&self) -> Vec<Rect> {
        self.cells.iter().map(|(r, _)| *r).collect()
    }

    pub fn order(&self) -> &Plan {
        &self.order
    }

    pub fn dir_h(&self) -> usize {
        self.dir_h
    }

    pub fn dir_v(&self) -> usize {
        self.dir_v
    }

    /// Evaluates `plan`, which must be a valid order for this tiling.
    pub fn evaluate<M: CubeSystem<Cube = C>>(&self, m: &M, plan: &Plan) -> Result<C, ArrayError> {
        check_plan(&self.rects(), plan)?;
        self.eval(m, plan)
    }

    fn eval<M: CubeSystem<Cube = C>>(&self, m: &M, plan: &Plan) -> Result<C, ArrayError> {
        match plan {
            Plan::Cell(k) => Ok(self.cells[*k].1.clone()),
            Plan::Compose { axis, first, second } => {
                let (a, b) = (self.eval(m, first)?, self.eval(m, second)?);
                let dir = match axis {
                    Axis::Horizontal => self.dir_h,
                    Axis::Vertical => self.dir_v,
                };
                compose_step(m, &a, &b, dir, || {
                    let (mut l, mut r) = (Vec::new(), Vec::new());
                    first.cells(&mut l);
                    second.cells(&mut r);
                    format!("cells {l:?} with {r:?} in direction {dir}")
                })
            }
        }
    }

    pub fn render(&self, label: impl Fn(&C) -> String) -> String {
        let labelled: Vec<(Rect, String)> = self.cells.iter().map(|(r, c)| (*r, label(c))).collect();
        render_ascii(&labelled, self.dir_h, self.dir_v)
    }
}

fn check_tiling(rects: &[Rect]) -> Result<(), ArrayError> {
    if rects.is_empty() {
        return Err(ArrayError::Empty);
    }
    if let Some(r) = rects.iter().find(|r| r.width == 0 || r.height == 0) {
        return Err(ArrayError::BadTiling(format!("{r:?} is empty")));
    }
    let rows = rects.iter().map(Rect::bottom).max().unwrap_or(0);
    let cols = rects.iter().map(Rect::right).max().unwrap_or(0);
    let mut covered = vec![false; rows * cols];
    for r in rects {
        for y in r.row..r.bottom() {
            for x in r.col..r.right() {
                if std::mem::replace(&mut covered[y * cols + x], true) {
                    return Err(ArrayError::BadTiling(format!("unit ({y},{x}) is covered twice")));
                }
            }
        }
    }
    if let Some(k) = covered.iter().position(|c| !c) {
        return Err(ArrayError::BadTiling(format!("unit ({},{}) is not covered", k / cols, k % cols)));
    }
    Ok(())
}

fn check_plan(rects: &[Rect], plan: &Plan) -> Result<(), ArrayError> {
    plan.region(rects)?;
    let mut used = Vec::new();
    plan.cells(&mut used);
    let distinct: HashSet<usize> = used.iter().copied().collect();
    if used.len() != rects.len() || distinct.len() != rects.len() {
        return Err(ArrayError::BadTiling(format!(
            "plan uses {} cells ({} distinct), partition has {}",
            used.len(),
            distinct.len(),
            rects.len()
        )));
    }
    Ok(())
}

/// Evaluates the partition's own order.
pub fn compose_partition<M: CubeSystem>(m: &M, p: &ComposablePartition<M::Cube>) -> Result<M::Cube, ArrayError> {
    p.eval(m, &p.order)
}

/// Evaluates the partition's order and `alternative`, which must agree.
pub fn compose_partition_checked<M: CubeSystem>(
    m: &M,
    p: &ComposablePartition<M::Cube>,
    alternative: &Plan,
) -> Result<M::Cube, ArrayError> {
    let first = compose_partition(m, p)?;
    let second = p.evaluate(m, alternative)?;
    if first != second {
        return Err(ArrayError::InterchangeViolation {
            first: format!("{first:?}"),
            second: format!("{second:?}"),
        });
    }
    Ok(first)
}

/// Cell kinds in symbolic arrays. Non-plain cells are determined by their
/// neighbours.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SymbolKind {
    Plain,
    /// `εₕt`, an identity for horizontal composition.
    EpsH,
    /// `εᵥt`, an identity for vertical composition.
    EpsV,
    /// `Γ⁺ₖt` with `k = min(dir_h, dir_v)`.
    GammaPlus,
    /// `Γ⁻ₖt` with `k = min(dir_h, dir_v)`.
    GammaMinus,
    /// An identity for both compositions.
    DoubleIdentity,
}

impl SymbolKind {
    pub fn symbol(self) -> &'static str {
        match self {
            SymbolKind::Plain => "",
            SymbolKind::EpsH => "=",
            SymbolKind::EpsV => "| |",
            SymbolKind::GammaPlus => "┌",
            SymbolKind::GammaMinus => "┘",
            SymbolKind::DoubleIdentity => "□",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SymbolicCell<C> {
    Plain(C),
    EpsH,
    EpsV,
    GammaPlus,
    GammaMinus,
    DoubleIdentity,
}

impl<C> SymbolicCell<C> {
    pub fn kind(&self) -> SymbolKind {
        match self {
            SymbolicCell::Plain(_) => SymbolKind::Plain,
            SymbolicCell::EpsH => SymbolKind::EpsH,
            SymbolicCell::EpsV => SymbolKind::EpsV,
            SymbolicCell::GammaPlus => SymbolKind::GammaPlus,
            SymbolicCell::GammaMinus => SymbolKind::GammaMinus,
            SymbolicCell::DoubleIdentity => SymbolKind::DoubleIdentity,
        }
    }
}

/// A side of a cell: top is `∂⁻ᵥ`, bottom `∂⁺ᵥ`, left `∂⁻ₕ`, right `∂⁺ₕ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Top,
    Bottom,
    Left,
    Right,
}

impl Side {
    pub const ALL: [Side; 4] = [Side::Top, Side::Bottom, Side::Left, Side::Right];

    fn face(self, dir_h: usize, dir_v: usize) -> (usize, Sign) {
        match self {
            Side::Top => (dir_v, Sign::Minus),
            Side::Bottom => (dir_v, Sign::Plus),
            Side::Left => (dir_h, Sign::Minus),
            Side::Right => (dir_h, Sign::Plus),
        }
    }

    fn opposite(self) -> Side {
        match self {
            Side::Top => Side::Bottom,
            Side::Bottom => Side::Top,
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

/// A known face of one cell, typically on the outer border.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FacePin<C> {
    pub row: usize,
    pub col: usize,
    pub side: Side,
    pub face: C,
}

/// Determines a symbolic cell from one known side, if that side determines it.
fn solve<M: CubeSystem>(
    m: &M,
    kind: SymbolKind,
    side: Side,
    f: &M::Cube,
    dir_h: usize,
    dir_v: usize,
) -> Result<Option<M::Cube>, CubeError> {
    let k = dir_h.min(dir_v);
    let adjacent = dir_h.abs_diff(dir_v) == 1;
    // Each face is an (n-1)-cube; the direction of `side` in the result.
    let (d, _) = side.face(dir_h, dir_v);
    Ok(match kind {
        SymbolKind::Plain => None,
        SymbolKind::EpsH if d == dir_h => Some(m.degeneracy(f, dir_h)?),
        SymbolKind::EpsV if d == dir_v => Some(m.degeneracy(f, dir_v)?),
        SymbolKind::DoubleIdentity => Some(m.degeneracy(f, d)?),
        SymbolKind::GammaPlus if adjacent && matches!(side, Side::Bottom | Side::Right) => {
            Some(m.connection(f, k, Sign::Plus)?)
        }
        SymbolKind::GammaMinus if adjacent && matches!(side, Side::Top | Side::Left) => {
            Some(m.connection(f, k, Sign::Minus)?)
        }
        _ => None,
    })
}

/// Fills in every non-plain cell from its neighbours and the pinned faces,
/// iterating until nothing changes, then validates the result.
pub fn resolve_symbols<M: CubeSystem>(
    m: &M,
    grid: &[Vec<SymbolicCell<M::Cube>>],
    dir_h: usize,
    dir_v: usize,
    context: &[FacePin<M::Cube>],
) -> Result<ComposableArray<M::Cube>, ArrayError> {
    if dir_h == dir_v {
        return Err(ArrayError::SameDirection(dir_h));
    }
    let rows = grid.len();
    let cols = grid.first().map(Vec::len).unwrap_or(0);
    if rows == 0 || cols == 0 {
        return Err(ArrayError::Empty);
    }
    if let Some((row, r)) = grid.iter().enumerate().find(|(_, r)| r.len() != cols) {
        return Err(ArrayError::Ragged {
            row,
            len: r.len(),
            expected: cols,
        });
    }
    let mut resolved: Vec<Vec<Option<M::Cube>>> = grid
        .iter()
        .map(|r| {
            r.iter()
                .map(|c| match c {
                    SymbolicCell::Plain(x) => Some(x.clone()),
                    _ => None,
                })
                .collect()
        })
        .collect();
    let neighbour = |row: usize, col: usize, side: Side| -> Option<(usize, usize)> {
        match side {
            Side::Top => row.checked_sub(1).map(|r| (r, col)),
            Side::Bottom => (row + 1 < rows).then_some((row + 1, col)),
            Side::Left => col.checked_sub(1).map(|c| (row, c)),
            Side::Right => (col + 1 < cols).then_some((row, col + 1)),
        }
    };
    loop {
        let mut progress = false;
        for row in 0..rows {
            for col in 0..cols {
                if resolved[row][col].is_some() {
                    continue;
                }
                let kind = grid[row][col].kind();
                'sides: for side in Side::ALL {
                    let known = match neighbour(row, col, side) {
                        Some((r, c)) => match &resolved[r][c] {
                            Some(y) => {
                                let (d, s) = side.opposite().face(dir_h, dir_v);
                                Some(m.face(y, d, s)?)
                            }
                            None => None,
                        },
                        None => context
                            .iter()
                            .find(|p| p.row == row && p.col == col && p.side == side)
                            .map(|p| p.face.clone()),
                    };
                    if let Some(f) = known {
                        if let Some(x) = solve(m, kind, side, &f, dir_h, dir_v)? {
                            resolved[row][col] = Some(x);
                            progress = true;
                            break 'sides;
                        }
                    }
                }
            }
        }
        if !progress {
            break;
        }
    }
    let mut cells = Vec::with_capacity(rows);
    for (row, r) in resolved.into_iter().enumerate() {
        let mut out = Vec::with_capacity(cols);
        for (col, c) in r.into_iter().enumerate() {
            let Some(x) = c else {
                return Err(ArrayError::Unresolvable {
                    row,
                    col,
                    reason: format!("no neighbour or pinned face determines {:?}", grid[row][col].kind()),
                });
            };
            if grid[row][col].kind() == SymbolKind::DoubleIdentity
                && !(is_degenerate(m, &x, dir_h)? && is_degenerate(m, &x, dir_v)?)
            {
                return Err(ArrayError::Unresolvable {
                    row,
                    col,
                    reason: "context does not give an identity in both directions".to_string(),
                });
            }
            out.push(x);
        }
        cells.push(out);
    }
    ComposableArray::new(m, cells, dir_h, dir_v)
}

/// Recognises the kind of a resolved cell. Degeneracies are tested before
/// connections, so a connection that is also degenerate reads as degenerate.
pub fn classify<M: CubeSystem>(m: &M, x: &M::Cube, dir_h: usize, dir_v: usize) -> Result<SymbolKind, CubeError> {
    let (h, v) = (is_degenerate(m, x, dir_h)?, is_degenerate(m, x, dir_v)?);
    Ok(match (h, v) {
        (true, true) => SymbolKind::DoubleIdentity,
        (true, false) => SymbolKind::EpsH,
        (false, true) => SymbolKind::EpsV,
        (false, false) => {
            let k = dir_h.min(dir_v);
            if dir_h.abs_diff(dir_v) != 1 || m.dim(x) < k + 1 {
                SymbolKind::Plain
            } else if m.connection(&m.face(x, k, Sign::Plus)?, k, Sign::Plus).ok().as_ref() == Some(x) {
                SymbolKind::GammaPlus
            } else if m.connection(&m.face(x, k, Sign::Minus)?, k, Sign::Minus).ok().as_ref() == Some(x) {
                SymbolKind::GammaMinus
            } else {
                SymbolKind::Plain
            }
        }
    })
}

/// Renders symbolic cells: kinds as symbols, plain cells via `label`.
pub fn render_symbolic<C>(grid: &[Vec<SymbolicCell<C>>], dir_h: usize, dir_v: usize, label: impl Fn(&C) -> String) -> String {
    let cells: Vec<(Rect, String)> = grid
        .iter()
        .enumerate()
        .flat_map(|(row, r)| {
            r.iter().enumerate().map(move |(col, c)| (row, col, c))
        })
        .map(|(row, col, c)| {
            let text = match c {
                SymbolicCell::Plain(x) => label(x),
                other => other.kind().symbol().to_string(),
            };
            (Rect::unit(row, col), text)
        })
        .collect();
    render_ascii(&cells, dir_h, dir_v)
}

/// Box drawing of a tiling with one centred label per rectangle, followed
/// by the direction legend.
pub fn render_ascii(cells: &[(Rect, String)], dir_h: usize, dir_v: usize) -> String {
    let rows = cells.iter().map(|(r, _)| r.bottom()).max().unwrap_or(0);
    let cols = cells.iter().map(|(r, _)| r.right()).max().unwrap_or(0);
    let legend = format!("h: direction {dir_h}, v: direction {dir_v}");
    if rows == 0 || cols == 0 {
        return legend + "\n";
    }
    // Width of a unit column, wide enough for every label.
    let w = cells
        .iter()
        .map(|(r, s)| (s.chars().count() + 2).div_ceil(r.width))
        .max()
        .unwrap_or(3)
        .max(3);
    // hseg[y][x]: grid line y has a segment over unit column x.
    let mut hseg = vec![vec![false; cols]; rows + 1];
    let mut vseg = vec![vec![false; cols + 1]; rows];
    for (r, _) in cells {
        for x in r.col..r.right() {
            hseg[r.row][x] = true;
            hseg[r.bottom()][x] = true;
        }
        for y in r.row..r.bottom() {
            vseg[y][r.col] = true;
            vseg[y][r.right()] = true;
        }
    }
    let (width, height) = (cols * (w + 1) + 1, rows * 2 + 1);
    let mut canvas = vec![vec![' '; width]; height];
    for gy in 0..=rows {
        for gx in 0..=cols {
            let up = gy > 0 && vseg[gy - 1][gx];
            let down = gy < rows && vseg[gy][gx];
            let left = gx > 0 && hseg[gy][gx - 1];
            let right = gx < cols && hseg[gy][gx];
            canvas[2 * gy][gx * (w + 1)] = junction(up, down, left, right);
            if right {
                for k in 1..=w {
                    canvas[2 * gy][gx * (w + 1) + k] = '─';
                }
            }
            if down {
                canvas[2 * gy + 1][gx * (w + 1)] = '│';
            }
        }
    }
    for (r, label) in cells {
        let line = 2 * r.row + r.height;
        let inner = r.width * (w + 1) - 1;
        let len = label.chars().count();
        let start = r.col * (w + 1) + 1 + inner.saturating_sub(len) / 2;
        for (k, ch) in label.chars().enumerate().take(inner) {
            canvas[line][start + k] = ch;
        }
    }
    let mut out = String::new();
    for line in canvas {
        let s: String = line.into_iter().collect();
        out.push_str(s.trim_end());
        out.push('\n');
    }
    out.push_str(&legend);
    out.push('\n');
    out
}

fn junction(up: bool, down: bool, left: bool, right: bool) -> char {
    match (up, down, left, right) {
        (false, true, false, true) => '┌',
        (false, true, true, false) => '┐',
        (true, false, false, true) => '└',
        (true, false, true, false) => '┘',
        (true, true, false, true) => '├',
        (true, true, true, false) => '┤',
        (false, true, true, true) => '┬',
        (true, false, true, true) => '┴',
        (true, true, true, true) => '┼',
        (true, true, false, false) | (true, false, false, false) | (false, true, false, false) => '│',
        (false, false, true, true) | (false, false, true, false) | (false, false, false, true) => '─',
        (false, false, false, false) => ' ',
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::folding::psi;
    use crate::models::fincat::bundled;
    use crate::models::{FiniteModel, Nerve};

    fn poset() -> Nerve {
        Nerve::new(bundled::load("poset2x2").unwrap(), 4)
    }

    fn square(n: &Nerve) -> <Nerve as CubeSystem>::Cube {
        let a = |s: &str| n.category().morphism_by_name(s).unwrap();
        n.square(a("f"), a("k"), a("h"), a("g")).unwrap()
    }

    #[test]
    fn rejects_bad_shapes() {
        let n = poset();
        let x = square(&n);
        assert_eq!(ComposableArray::new(&n, vec![vec![x.clone()]], 1, 1), Err(ArrayError::SameDirection(1)));
        assert_eq!(
            ComposableArray::new(&n, Vec::<Vec<_>>::new(), 1, 2),
            Err(ArrayError::Empty)
        );
        assert!(matches!(
            ComposableArray::new(&n, vec![vec![x.clone(), x.clone()], vec![x.clone()]], 1, 2),
            Err(ArrayError::Ragged { row: 1, .. })
        ));
        assert!(matches!(
            ComposableArray::new(&n, vec![vec![x.clone(), x]], 1, 2),
            Err(ArrayError::NotComposable { .. })
        ));
    }

    #[test]
    fn psi_row() {
        let n = poset();
        let x = square(&n);
        let row = vec![
            n.connection(&n.face(&x, 2, Sign::Minus).unwrap(), 1, Sign::Plus).unwrap(),
            x.clone(),
            n.connection(&n.face(&x, 2, Sign::Plus).unwrap(), 1, Sign::Minus).unwrap(),
        ];
        let a = ComposableArray::new(&n, vec![row], 2, 1).unwrap();
        assert_eq!(compose_array(&n, &a).unwrap(), psi(&n, &x, 1).unwrap());
    }

    #[test]
    fn identity_border() {
        let n = poset();
        let x = square(&n);
        let right = n.degeneracy(&n.face(&x, 2, Sign::Plus).unwrap(), 2).unwrap();
        let below = n.degeneracy(&n.face(&x, 1, Sign::Plus).unwrap(), 1).unwrap();
        let corner = n.degeneracy(&n.face(&right, 1, Sign::Plus).unwrap(), 1).unwrap();
        let a = ComposableArray::new(&n, vec![vec![x.clone(), right], vec![below, corner]], 2, 1).unwrap();
        assert_eq!(compose_array(&n, &a).unwrap(), x);
    }

    #[test]
    fn guillotine_plans() {
        // [[a, b], [c spanning]]
        let rects = [Rect::unit(0, 0), Rect::unit(0, 1), Rect::new(1, 0, 1, 2)];
        let rows = Plan::rows_first(&rects).unwrap();
        assert_eq!(
            rows,
            Plan::compose(
                Axis::Vertical,
                Plan::compose(Axis::Horizontal, Plan::Cell(0), Plan::Cell(1)),
                Plan::Cell(2)
            )
        );
        assert_eq!(Plan::columns_first(&rects).unwrap(), rows);
        let pinwheel = [
            Rect::new(0, 0, 1, 2),
            Rect::new(0, 2, 2, 1),
            Rect::new(1, 0, 2, 1),
            Rect::unit(1, 1),
            Rect::new(2, 1, 1, 2),
        ];
        assert!(matches!(Plan::rows_first(&pinwheel), Err(ArrayError::BadTiling(_))));
    }

    #[test]
    fn tiling_errors() {
        let overlap = [Rect::new(0, 0, 1, 2), Rect::unit(0, 1)];
        assert!(matches!(check_tiling(&overlap), Err(ArrayError::BadTiling(_))));
        let gap = [Rect::unit(0, 0), Rect::unit(1, 1)];
        assert!(matches!(check_tiling(&gap), Err(ArrayError::BadTiling(_))));
        let rects = [Rect::unit(0, 0), Rect::unit(0, 1)];
        let wrong = Plan::compose(Axis::Vertical, Plan::Cell(0), Plan::Cell(1));
        assert!(matches!(check_plan(&rects, &wrong), Err(ArrayError::BadTiling(_))));
        let twice = Plan::compose(Axis::Horizontal, Plan::Cell(0), Plan::Cell(0));
        assert!(check_plan(&rects, &twice).is_err());
    }

    #[test]
    fn single_cell_partition() {
        let n = poset();
        let x = square(&n);
        let p = ComposablePartition::new(vec![(Rect::unit(0, 0), x.clone())], 2, 1, Plan::Cell(0)).unwrap();
        assert_eq!(compose_partition(&n, &p).unwrap(), x);
    }

    #[test]
    fn partition_with_spanning_cell() {
        let n = poset();
        let x = square(&n);
        // [x | ε₂∂⁺₂x] above ε₁ of the top row's lower edge.
        let left = n.degeneracy(&n.face(&x, 2, Sign::Plus).unwrap(), 2).unwrap();
        let top = n.compose(&x, &left, 2).unwrap();
        let below = n.degeneracy(&n.face(&top, 1, Sign::Plus).unwrap(), 1).unwrap();
        let cells = vec![
            (Rect::unit(0, 0), x.clone()),
            (Rect::unit(0, 1), left.clone()),
            (Rect::new(1, 0, 1, 2), below.clone()),
        ];
        let p = ComposablePartition::rows_first(cells, 2, 1).unwrap();
        let expected = n.compose(&n.compose(&x, &left, 2).unwrap(), &below, 1).unwrap();
        assert_eq!(compose_partition(&n, &p).unwrap(), expected);
        assert_eq!(expected, x);
    }

    #[test]
    fn resolves_psi_row() {
        let n = poset();
        let x = square(&n);
        let grid = vec![vec![SymbolicCell::GammaPlus, SymbolicCell::Plain(x.clone()), SymbolicCell::GammaMinus]];
        let a = resolve_symbols(&n, &grid, 2, 1, &[]).unwrap();
        assert_eq!(compose_array(&n, &a).unwrap(), psi(&n, &x, 1).unwrap());
    }

    #[test]
    fn resolves_identity_border() {
        let n = poset();
        let x = square(&n);
        let grid = vec![
            vec![SymbolicCell::Plain(x.clone()), SymbolicCell::EpsH],
            vec![SymbolicCell::EpsV, SymbolicCell::DoubleIdentity],
        ];
        let a = resolve_symbols(&n, &grid, 2, 1, &[]).unwrap();
        assert_eq!(compose_array(&n, &a).unwrap(), x);
    }

    #[test]
    fn unresolvable_without_context() {
        let n = poset();
        let grid: Vec<Vec<SymbolicCell<_>>> = vec![vec![SymbolicCell::EpsH, SymbolicCell::GammaPlus]];
        assert!(matches!(
            resolve_symbols(&n, &grid, 2, 1, &[]),
            Err(ArrayError::Unresolvable { .. })
        ));
    }

    #[test]
    fn pinned_context_resolves() {
        let n = poset();
        let f = n.arrow_named("f").unwrap();
        let grid: Vec<Vec<SymbolicCell<_>>> = vec![vec![SymbolicCell::EpsH]];
        let pin = FacePin {
            row: 0,
            col: 0,
            side: Side::Left,
            face: f.clone(),
        };
        let a = resolve_symbols(&n, &grid, 2, 1, &[pin]).unwrap();
        assert_eq!(a.get(0, 0), &n.degeneracy(&f, 2).unwrap());
        assert_eq!(classify(&n, a.get(0, 0), 2, 1).unwrap(), SymbolKind::EpsH);
        assert!(n.label(a.get(0, 0)).starts_with('['));
    }
}
