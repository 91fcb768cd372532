use std::collections::VecDeque;

use super::{Cell, WarehouseMap};

/// Table entry for cells that cannot be reached.
pub const UNREACHABLE: u32 = u32::MAX;

/// Breadth-first distances from `sources` over traversable cells.
///
/// Non-traversable sources are ignored. Bin cells stay [`UNREACHABLE`].
pub fn bfs_from(map: &WarehouseMap, sources: &[Cell]) -> Vec<u32> {
    let seeds: Vec<(Cell, u32)> = sources.iter().map(|&c| (c, 0)).collect();
    bfs_seeded(map, &seeds)
}

/// Distances from every cell to bin cell `bin`: one plus the distance to the
/// nearest access cell.
pub(crate) fn bfs_from_bin(map: &WarehouseMap, bin: Cell) -> Vec<u32> {
    let seeds: Vec<(Cell, u32)> = map.open_neighbors(bin).map(|c| (c, 1)).collect();
    let mut table = bfs_seeded(map, &seeds);
    table[map.index(bin)] = 0;
    table
}

fn bfs_seeded(map: &WarehouseMap, seeds: &[(Cell, u32)]) -> Vec<u32> {
    let mut dist = vec![UNREACHABLE; map.len()];
    let mut queue = VecDeque::new();
    // Seeds share one distance level, so a plain FIFO stays sorted.
    for &(c, d) in seeds {
        if map.is_traversable(c) && dist[map.index(c)] == UNREACHABLE {
            dist[map.index(c)] = d;
            queue.push_back(c);
        }
    }
    while let Some(cell) = queue.pop_front() {
        let next = dist[map.index(cell)] + 1;
        for n in map.open_neighbors(cell) {
            let slot = &mut dist[map.index(n)];
            if *slot == UNREACHABLE {
                *slot = next;
                queue.push_back(n);
            }
        }
    }
    dist
}

/// Reads the distance to `target` out of a single-source table, treating a
/// bin target as reached through its best access cell.
pub(crate) fn resolve(map: &WarehouseMap, table: &[u32], target: Cell) -> u32 {
    if map.is_traversable(target) {
        return table[map.index(target)];
    }
    map.open_neighbors(target)
        .map(|n| table[map.index(n)])
        .filter(|&d| d != UNREACHABLE)
        .min()
        .map_or(UNREACHABLE, |d| d + 1)
}

/// Bridges of the traversable subgraph (iterative Tarjan low-link).
pub fn find_bridges(map: &WarehouseMap) -> Vec<(Cell, Cell)> {
    const UNSEEN: usize = usize::MAX;
    let n = map.len();
    let mut disc = vec![UNSEEN; n];
    let mut low = vec![0usize; n];
    let mut bridges = Vec::new();
    let mut timer = 0;

    for root in map.traversable_cells() {
        let r = map.index(root);
        if disc[r] != UNSEEN {
            continue;
        }
        // (vertex, parent, neighbour cursor)
        let mut stack: Vec<(usize, usize, usize)> = vec![(r, UNSEEN, 0)];
        disc[r] = timer;
        low[r] = timer;
        timer += 1;
        while let Some(&mut (v, parent, ref mut cursor)) = stack.last_mut() {
            let nbrs: Vec<usize> = map
                .open_neighbors(map.cell_at(v))
                .map(|c| map.index(c))
                .collect();
            if *cursor < nbrs.len() {
                let u = nbrs[*cursor];
                *cursor += 1;
                if u == parent {
                    continue;
                }
                if disc[u] == UNSEEN {
                    disc[u] = timer;
                    low[u] = timer;
                    timer += 1;
                    stack.push((u, v, 0));
                } else {
                    low[v] = low[v].min(disc[u]);
                }
            } else {
                stack.pop();
                if parent != UNSEEN {
                    low[parent] = low[parent].min(low[v]);
                    if low[v] > disc[parent] {
                        bridges.push((map.cell_at(parent), map.cell_at(v)));
                    }
                }
            }
        }
    }
    bridges
}

#[cfg(test)]
mod tests {
    use super::super::{generate_map, load_map, StationPlacement};
    use super::*;

    #[test]
    fn pendant_cell_is_reported_as_bridge() {
        // (1,2) hangs off the top row through a single edge.
        let text = "5 5\n.....\n.B.B.\n.BBB.\n.....\n.....\n";
        let err = load_map(text).unwrap_err().to_string();
        assert!(err.contains("bridge"), "{err}");
    }

    #[test]
    fn enclosed_cell_is_reported_as_disconnected() {
        let text = "5 5\n.....\n.BBB.\n.B.B.\n.BBB.\n.....\n";
        let err = load_map(text).unwrap_err().to_string();
        assert!(err.contains("disconnected"), "{err}");
    }

    #[test]
    fn generated_maps_have_no_bridges() {
        for (a, b) in [(1, 1), (2, 5), (4, 9)] {
            let map = generate_map(a, b, &StationPlacement::Count(3)).unwrap();
            assert!(find_bridges(&map).is_empty());
        }
    }

    #[test]
    fn metric_properties_hold_on_fig_scale_map() {
        let map = generate_map(4, 9, &StationPlacement::Count(12)).unwrap();
        let cells: Vec<Cell> = map.traversable_cells().collect();
        let tables: Vec<Vec<u32>> = cells.iter().map(|&c| bfs_from(&map, &[c])).collect();
        for (i, &a) in cells.iter().enumerate() {
            assert_eq!(tables[i][map.index(a)], 0);
            for (j, &b) in cells.iter().enumerate() {
                let ab = tables[i][map.index(b)];
                assert_eq!(ab, tables[j][map.index(a)], "symmetry {a} {b}");
                assert_eq!(ab == 0, a == b);
            }
        }
        // Triangle inequality on a stride of intermediate cells.
        for i in (0..cells.len()).step_by(7) {
            for (j, &b) in cells.iter().enumerate().step_by(3) {
                for &c in cells.iter().step_by(11) {
                    let ij = tables[i][map.index(b)];
                    let jk = tables[j][map.index(c)];
                    assert!(tables[i][map.index(c)] <= ij + jk);
                }
            }
        }
    }
}
