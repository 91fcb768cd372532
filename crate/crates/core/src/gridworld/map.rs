use std::collections::HashSet;

use super::distance::{self, UNREACHABLE};
use super::{Cell, CellKind, MapError};

/// How pickup stations are placed on the border of a generated map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StationPlacement {
    /// Evenly spaced along the border perimeter, skipping the four corners.
    Count(usize),
    /// Explicit border cells.
    Explicit(Vec<Cell>),
}

/// An immutable warehouse grid with its bins, stations and cached
/// undirected distance tables.
///
/// Bins and stations are listed in row-major order; bin `i` and station `k`
/// refer to positions in those lists.
#[derive(Debug, Clone)]
pub struct WarehouseMap {
    rows: usize,
    cols: usize,
    cells: Vec<CellKind>,
    bins: Vec<Cell>,
    stations: Vec<Cell>,
    /// `station_tables[k][idx]` = undirected distance from station `k` to cell `idx`.
    station_tables: Vec<Vec<u32>>,
    /// `bin_tables[i][idx]` = undirected distance from cell `idx` to bin `i`.
    bin_tables: Vec<Vec<u32>>,
}

impl PartialEq for WarehouseMap {
    fn eq(&self, other: &Self) -> bool {
        self.rows == other.rows && self.cols == other.cols && self.cells == other.cells
    }
}

impl Eq for WarehouseMap {}

impl WarehouseMap {
    /// Builds a map from a row-major cell grid and validates it.
    ///
    /// Checks: stations and bins lie where allowed (stations on the border,
    /// bins strictly inside), at least one traversable cell exists, and the
    /// traversable subgraph is connected and free of bridges.
    pub fn from_cells(rows: usize, cols: usize, cells: Vec<CellKind>) -> Result<Self, MapError> {
        if rows == 0 || cols == 0 {
            return Err(MapError::InvalidConfig(format!(
                "map dimensions must be positive, got {rows}x{cols}"
            )));
        }
        if cells.len() != rows * cols {
            return Err(MapError::InvalidConfig(format!(
                "expected {} cells for a {rows}x{cols} map, got {}",
                rows * cols,
                cells.len()
            )));
        }
        let mut bins = Vec::new();
        let mut stations = Vec::new();
        for (idx, kind) in cells.iter().enumerate() {
            let cell = Cell::new(idx / cols, idx % cols);
            let border = cell.row == 0 || cell.col == 0 || cell.row + 1 == rows || cell.col + 1 == cols;
            match kind {
                CellKind::Bin if border => {
                    return Err(MapError::Invariant(format!("bin {cell} lies on the border")))
                }
                CellKind::Bin => bins.push(cell),
                CellKind::Station if !border => {
                    return Err(MapError::Invariant(format!(
                        "station {cell} is not on the border"
                    )))
                }
                CellKind::Station => stations.push(cell),
                CellKind::Free => {}
            }
        }
        let mut map = WarehouseMap {
            rows,
            cols,
            cells,
            bins,
            stations,
            station_tables: Vec::new(),
            bin_tables: Vec::new(),
        };
        map.check_connectivity()?;
        map.station_tables = map
            .stations
            .iter()
            .map(|&s| distance::bfs_from(&map, &[s]))
            .collect();
        map.bin_tables = map
            .bins
            .iter()
            .map(|&b| distance::bfs_from_bin(&map, b))
            .collect();
        Ok(map)
    }

    fn check_connectivity(&self) -> Result<(), MapError> {
        let Some(start) = self.traversable_cells().next() else {
            return Err(MapError::Invariant("map has no traversable cells".into()));
        };
        let table = distance::bfs_from(self, &[start]);
        if let Some(cut) = self
            .traversable_cells()
            .find(|c| table[self.index(*c)] == UNREACHABLE)
        {
            return Err(MapError::Invariant(format!(
                "traversable cells are disconnected: {cut} unreachable from {start}"
            )));
        }
        if let Some((a, b)) = distance::find_bridges(self).first() {
            return Err(MapError::Invariant(format!(
                "traversable subgraph is not 2-edge-connected: edge {a}-{b} is a bridge"
            )));
        }
        Ok(())
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn bins(&self) -> &[Cell] {
        &self.bins
    }

    pub fn stations(&self) -> &[Cell] {
        &self.stations
    }

    #[inline]
    pub fn index(&self, cell: Cell) -> usize {
        debug_assert!(self.contains(cell));
        cell.row * self.cols + cell.col
    }

    #[inline]
    pub fn cell_at(&self, idx: usize) -> Cell {
        Cell::new(idx / self.cols, idx % self.cols)
    }

    #[inline]
    pub fn contains(&self, cell: Cell) -> bool {
        cell.row < self.rows && cell.col < self.cols
    }

    #[inline]
    pub fn kind(&self, cell: Cell) -> CellKind {
        self.cells[self.index(cell)]
    }

    #[inline]
    pub fn is_traversable(&self, cell: Cell) -> bool {
        self.contains(cell) && self.kind(cell).is_traversable()
    }

    pub fn is_border(&self, cell: Cell) -> bool {
        cell.row == 0 || cell.col == 0 || cell.row + 1 == self.rows || cell.col + 1 == self.cols
    }

    pub fn traversable_cells(&self) -> impl Iterator<Item = Cell> + '_ {
        (0..self.cells.len())
            .filter(|&i| self.cells[i].is_traversable())
            .map(|i| self.cell_at(i))
    }

    pub fn traversable_count(&self) -> usize {
        self.cells.iter().filter(|k| k.is_traversable()).count()
    }

    /// Orthogonal in-bounds neighbours in N, S, E, W order.
    pub fn neighbors(&self, cell: Cell) -> impl Iterator<Item = Cell> + '_ {
        let Cell { row, col } = cell;
        [
            (row.wrapping_sub(1), col),
            (row + 1, col),
            (row, col + 1),
            (row, col.wrapping_sub(1)),
        ]
        .into_iter()
        .map(Cell::from)
        .filter(move |c| self.contains(*c))
    }

    /// Traversable orthogonal neighbours of `cell`.
    pub fn open_neighbors(&self, cell: Cell) -> impl Iterator<Item = Cell> + '_ {
        self.neighbors(cell).filter(move |c| self.is_traversable(*c))
    }

    /// The traversable cells from which a robot can drop into bin `bin`.
    pub fn access_cells(&self, bin: usize) -> Vec<Cell> {
        let mut cells: Vec<Cell> = self.open_neighbors(self.bins[bin]).collect();
        cells.sort();
        cells
    }

    pub fn bin_index(&self, cell: Cell) -> Option<usize> {
        self.bins.binary_search(&cell).ok()
    }

    pub fn station_index(&self, cell: Cell) -> Option<usize> {
        self.stations.binary_search(&cell).ok()
    }

    /// Undirected distance between station `k` and bin `i`.
    pub fn station_bin_distance(&self, k: usize, i: usize) -> Option<u32> {
        let d = self.bin_tables[i][self.index(self.stations[k])];
        (d != UNREACHABLE).then_some(d)
    }

    /// Cached table of distances from every cell to bin `i`.
    pub fn bin_table(&self, i: usize) -> &[u32] {
        &self.bin_tables[i]
    }

    /// Cached table of distances from station `k` to every cell.
    pub fn station_table(&self, k: usize) -> &[u32] {
        &self.station_tables[k]
    }

    /// Shortest 4-connected path length over traversable cells.
    ///
    /// A bin endpoint is reached through its best access cell, costing one
    /// extra step. Returns `None` when no path exists.
    pub fn undirected_distance(&self, from: Cell, to: Cell) -> Result<Option<u32>, MapError> {
        for c in [from, to] {
            if !self.contains(c) {
                return Err(MapError::OutOfBounds(c));
            }
        }
        if from == to {
            return Ok(Some(0));
        }
        let d = match (self.kind(from), self.kind(to)) {
            (CellKind::Station, _) => {
                let k = self.station_index(from).expect("station listed");
                distance::resolve(self, &self.station_tables[k], to)
            }
            (_, CellKind::Station) => {
                let k = self.station_index(to).expect("station listed");
                distance::resolve(self, &self.station_tables[k], from)
            }
            (CellKind::Free, CellKind::Bin) => {
                let i = self.bin_index(to).expect("bin listed");
                self.bin_tables[i][self.index(from)]
            }
            (CellKind::Bin, CellKind::Free) => {
                let i = self.bin_index(from).expect("bin listed");
                self.bin_tables[i][self.index(to)]
            }
            _ => {
                let table = match self.kind(from) {
                    CellKind::Bin => distance::bfs_from_bin(self, from),
                    _ => distance::bfs_from(self, &[from]),
                };
                distance::resolve(self, &table, to)
            }
        };
        Ok((d != UNREACHABLE).then_some(d))
    }
}

/// Generates a `block_rows × block_cols` warehouse of 3×3 blocks.
///
/// The result has `3·block_rows + 2` rows and `3·block_cols + 2` columns,
/// with one bin per block centre and stations on the border.
pub fn generate_map(
    block_rows: usize,
    block_cols: usize,
    placement: &StationPlacement,
) -> Result<WarehouseMap, MapError> {
    if block_rows == 0 || block_cols == 0 {
        return Err(MapError::InvalidConfig(format!(
            "block counts must be positive, got {block_rows}x{block_cols}"
        )));
    }
    let rows = 3 * block_rows + 2;
    let cols = 3 * block_cols + 2;
    let mut cells = vec![CellKind::Free; rows * cols];
    for br in 0..block_rows {
        for bc in 0..block_cols {
            cells[(3 * br + 2) * cols + 3 * bc + 2] = CellKind::Bin;
        }
    }
    let stations = match placement {
        StationPlacement::Count(n) => perimeter_stations(rows, cols, *n)?,
        StationPlacement::Explicit(list) => {
            let mut seen = HashSet::new();
            for &s in list {
                if s.row >= rows || s.col >= cols {
                    return Err(MapError::InvalidConfig(format!(
                        "station {s} lies outside the {rows}x{cols} map"
                    )));
                }
                if !(s.row == 0 || s.col == 0 || s.row + 1 == rows || s.col + 1 == cols) {
                    return Err(MapError::InvalidConfig(format!(
                        "station {s} is not on the border"
                    )));
                }
                if !seen.insert(s) {
                    return Err(MapError::InvalidConfig(format!("station {s} listed twice")));
                }
            }
            list.clone()
        }
    };
    for s in stations {
        cells[s.row * cols + s.col] = CellKind::Station;
    }
    WarehouseMap::from_cells(rows, cols, cells)
}

/// Border cells excluding corners, clockwise from `(0, 1)`.
fn perimeter(rows: usize, cols: usize) -> Vec<Cell> {
    let mut ring = Vec::with_capacity(2 * (rows + cols));
    ring.extend((1..cols - 1).map(|c| Cell::new(0, c)));
    ring.extend((1..rows - 1).map(|r| Cell::new(r, cols - 1)));
    ring.extend((1..cols - 1).rev().map(|c| Cell::new(rows - 1, c)));
    ring.extend((1..rows - 1).rev().map(|r| Cell::new(r, 0)));
    ring
}

fn perimeter_stations(rows: usize, cols: usize, n: usize) -> Result<Vec<Cell>, MapError> {
    let ring = perimeter(rows, cols);
    if n > ring.len() {
        return Err(MapError::InvalidConfig(format!(
            "{n} stations do not fit on a perimeter of {} non-corner cells",
            ring.len()
        )));
    }
    // Centre each station in its share of the perimeter.
    Ok((0..n).map(|i| ring[(2 * i + 1) * ring.len() / (2 * n)]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn paper_scale_maps_have_expected_counts() {
        let small = generate_map(4, 9, &StationPlacement::Count(12)).unwrap();
        assert_eq!((small.rows(), small.cols()), (14, 29));
        assert_eq!(small.bins().len(), 36);
        assert_eq!(small.stations().len(), 12);

        let medium = generate_map(10, 20, &StationPlacement::Count(20)).unwrap();
        assert_eq!((medium.rows(), medium.cols()), (32, 62));
        // 10x20 blocks carry one bin each.
        assert_eq!(medium.bins().len(), 200);
        assert_eq!(medium.stations().len(), 20);
    }

    #[test]
    fn single_block_map() {
        let map = generate_map(1, 1, &StationPlacement::Count(1)).unwrap();
        assert_eq!((map.rows(), map.cols()), (5, 5));
        assert_eq!(map.bins(), &[Cell::new(2, 2)]);
        assert_eq!(map.stations().len(), 1);
        assert!(map.is_border(map.stations()[0]));
    }

    #[test]
    fn explicit_station_errors() {
        let off = StationPlacement::Explicit(vec![Cell::new(1, 1)]);
        assert!(matches!(generate_map(1, 1, &off), Err(MapError::InvalidConfig(_))));
        let dup = StationPlacement::Explicit(vec![Cell::new(0, 1), Cell::new(0, 1)]);
        assert!(matches!(generate_map(1, 1, &dup), Err(MapError::InvalidConfig(_))));
        let outside = StationPlacement::Explicit(vec![Cell::new(9, 0)]);
        assert!(matches!(generate_map(1, 1, &outside), Err(MapError::InvalidConfig(_))));
        assert!(generate_map(0, 3, &StationPlacement::Count(1)).is_err());
        assert!(generate_map(1, 1, &StationPlacement::Count(13)).is_err());
    }

    #[test]
    fn corner_to_center_bin_is_four() {
        let map = generate_map(1, 1, &StationPlacement::Count(1)).unwrap();
        let d = map
            .undirected_distance(Cell::new(0, 0), Cell::new(2, 2))
            .unwrap();
        assert_eq!(d, Some(4));
        assert_eq!(map.undirected_distance(Cell::new(0, 0), Cell::new(0, 0)).unwrap(), Some(0));
        assert_eq!(map.undirected_distance(Cell::new(0, 0), Cell::new(0, 1)).unwrap(), Some(1));
    }

    #[test]
    fn evenly_spaced_stations_skip_corners() {
        let map = generate_map(4, 9, &StationPlacement::Count(12)).unwrap();
        let corners = [
            Cell::new(0, 0),
            Cell::new(0, 28),
            Cell::new(13, 0),
            Cell::new(13, 28),
        ];
        for s in map.stations() {
            assert!(map.is_border(*s));
            assert!(!corners.contains(s));
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]
        #[test]
        fn generated_maps_validate(a in 1usize..=15, b in 1usize..=15, n in 1usize..=8) {
            let map = generate_map(a, b, &StationPlacement::Count(n)).unwrap();
            prop_assert_eq!(map.rows(), 3 * a + 2);
            prop_assert_eq!(map.cols(), 3 * b + 2);
            prop_assert_eq!(map.bins().len(), a * b);
            prop_assert!(find_bins_sorted(&map));
            prop_assert!(super::distance::find_bridges(&map).is_empty());
        }
    }

    fn find_bins_sorted(map: &WarehouseMap) -> bool {
        map.bins().windows(2).all(|w| w[0] < w[1])
    }
}
