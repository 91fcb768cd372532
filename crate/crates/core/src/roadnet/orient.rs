use std::sync::Arc;

use super::{OrientationKind, RoadError, RoadNetwork};
use crate::gridworld::{CellKind, Dir, WarehouseMap};

/// Orients `map` with alternating streets, falling back to a depth-first
/// strong orientation when the street rule does not yield a strongly
/// connected network. Check [`RoadNetwork::kind`] to see which was used.
pub fn orient(map: &Arc<WarehouseMap>) -> Result<RoadNetwork, RoadError> {
    match orient_streets(map) {
        Ok(net) => Ok(net),
        Err(RoadError::NotStronglyConnected(_)) => orient_depth_first(map),
        Err(e) => Err(e),
    }
}

/// Alternating-street orientation only; errors if not strongly connected.
pub fn orient_streets(map: &Arc<WarehouseMap>) -> Result<RoadNetwork, RoadError> {
    let has_bin_row: Vec<bool> = (0..map.rows())
        .map(|r| (0..map.cols()).any(|c| map.kind((r, c).into()) == CellKind::Bin))
        .collect();
    let has_bin_col: Vec<bool> = (0..map.cols())
        .map(|c| (0..map.rows()).any(|r| map.kind((r, c).into()) == CellKind::Bin))
        .collect();
    let row_east = alternate(&has_bin_row);
    let col_north = alternate(&has_bin_col);

    let mut allowed = vec![0u8; map.len()];
    for cell in map.traversable_cells() {
        let mut bits = 0u8;
        for n in map.open_neighbors(cell) {
            let dir = Dir::between(cell, n).expect("neighbours are adjacent");
            let permitted = match dir {
                Dir::East => row_east[cell.row],
                Dir::West => !row_east[cell.row],
                Dir::North => col_north[cell.col],
                Dir::South => !col_north[cell.col],
            };
            if permitted {
                bits |= dir.bit();
            }
        }
        allowed[map.index(cell)] = bits;
    }
    RoadNetwork::build(Arc::clone(map), allowed, OrientationKind::Streets)
}

/// Lines without bins alternate starting from `true`; lines with bins are `false`.
fn alternate(has_bin: &[bool]) -> Vec<bool> {
    let mut street = 0usize;
    has_bin
        .iter()
        .map(|&bin| {
            if bin {
                return false;
            }
            street += 1;
            street % 2 == 1
        })
        .collect()
}

/// Robbins orientation: depth-first tree edges point away from the root,
/// every other edge points back towards the ancestor.
pub fn orient_depth_first(map: &Arc<WarehouseMap>) -> Result<RoadNetwork, RoadError> {
    const UNSEEN: usize = usize::MAX;
    let mut disc = vec![UNSEEN; map.len()];
    let mut allowed = vec![0u8; map.len()];
    let mut timer = 0;
    for root in map.traversable_cells() {
        if disc[map.index(root)] != UNSEEN {
            continue;
        }
        disc[map.index(root)] = timer;
        timer += 1;
        let mut stack = vec![(root, map.open_neighbors(root).collect::<Vec<_>>(), 0usize)];
        while let Some((v, nbrs, cursor)) = stack.last_mut() {
            let v = *v;
            if *cursor == nbrs.len() {
                stack.pop();
                continue;
            }
            let u = nbrs[*cursor];
            *cursor += 1;
            let (vi, ui) = (map.index(v), map.index(u));
            let dir = Dir::between(v, u).expect("neighbours are adjacent");
            let oriented = allowed[vi] & dir.bit() != 0 || allowed[ui] & dir.opposite().bit() != 0;
            if oriented {
                continue;
            }
            if disc[ui] == UNSEEN {
                // Tree edge.
                allowed[vi] |= dir.bit();
                disc[ui] = timer;
                timer += 1;
                let next = map.open_neighbors(u).collect::<Vec<_>>();
                stack.push((u, next, 0));
            } else if disc[ui] < disc[vi] {
                // Back edge towards an ancestor.
                allowed[vi] |= dir.bit();
            }
        }
    }
    RoadNetwork::build(Arc::clone(map), allowed, OrientationKind::DepthFirst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gridworld::{generate_map, load_map, Cell, StationPlacement};

    fn net(a: usize, b: usize, s: usize) -> RoadNetwork {
        let map = Arc::new(generate_map(a, b, &StationPlacement::Count(s)).unwrap());
        orient(&map).unwrap()
    }

    #[test]
    fn generated_maps_use_streets() {
        for (a, b) in [(1, 1), (1, 4), (3, 2), (4, 9)] {
            assert_eq!(net(a, b, 2).kind(), OrientationKind::Streets);
        }
    }

    #[test]
    fn single_block_ring_circulates() {
        let n = net(1, 1, 1);
        // Top row east, right column south, bottom row west, left column north.
        assert!(n.allows(Cell::new(0, 0), Dir::East));
        assert!(n.allows(Cell::new(0, 4), Dir::South));
        assert!(n.allows(Cell::new(4, 4), Dir::West));
        assert!(n.allows(Cell::new(4, 0), Dir::North));
        assert_eq!(n.directed_distance(Cell::new(0, 1), Cell::new(0, 0)).unwrap(), Some(3));
    }

    #[test]
    fn one_step_along_permitted_direction() {
        let n = net(2, 2, 2);
        for cell in n.map().traversable_cells() {
            for s in n.successors(cell) {
                assert_eq!(n.directed_distance(cell, s).unwrap(), Some(1));
            }
            assert_eq!(n.directed_distance(cell, cell).unwrap(), Some(0));
        }
    }

    #[test]
    fn depth_first_fallback_is_strongly_connected() {
        let map = Arc::new(generate_map(3, 3, &StationPlacement::Count(4)).unwrap());
        let dfs = orient_depth_first(&map).unwrap();
        assert_eq!(dfs.kind(), OrientationKind::DepthFirst);
        assert!(!dfs.detour_bound_guaranteed());
        for cell in map.traversable_cells() {
            for n in map.open_neighbors(cell) {
                assert!(dfs.allows_move(cell, n) ^ dfs.allows_move(n, cell));
            }
        }
    }

    #[test]
    fn irregular_loaded_map_falls_back() {
        // A single bin row next to a wide open area: the street rule leaves
        // the right-hand column pair pointing the same way.
        let text = "6 7\n.......\n.B.B...\n.......\n.......\n.B.....\n.......\n";
        let map = Arc::new(load_map(text).unwrap());
        let n = orient(&map).unwrap();
        for a in map.traversable_cells() {
            let t = n.bfs_from(a);
            assert!(map.traversable_cells().all(|b| t[map.index(b)] != u32::MAX));
        }
    }

    #[test]
    fn arrow_dump_marks_bins_and_stations() {
        let n = net(1, 1, 1);
        let dump = n.dump_arrows();
        assert!(dump.starts_with("horizontal\n"));
        assert_eq!(dump.matches('B').count(), 2);
        assert_eq!(dump.matches('S').count(), 2);
    }
}
