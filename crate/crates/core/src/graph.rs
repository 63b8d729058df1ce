//! Interference graphs: which particle pairs block each other's excitation.
//!
//! An edge between particles i and j means they can never be excited
//! simultaneously. Graphs come from geometry (unit-disk: blocked iff the
//! Euclidean distance is at most the blockade radius) or from canonical
//! topologies (rectangular lattices with nearest-neighbor blocking, lines
//! where each particle blocks its `b` nearest neighbors on both sides).
//!
//! Particle indices are 0-based throughout the API; external text formats
//! use 1-based labels and are handled by the companion CLI crate.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{invalid, Result};

/// Undirected, irreflexive blocking relation over N particles, optionally
/// with the geometry that generated it.
///
/// Immutable after construction; downstream modules share it read-only, so
/// concurrent sampling never contends on it.
#[derive(Debug, Clone, PartialEq)]
pub struct InterferenceGraph {
    /// Sorted neighbor lists; `neighbors[i]` never contains `i`.
    neighbors: Vec<Vec<usize>>,
    /// Per-particle neighbor bitsets, `words_per_row` words each,
    /// little-endian (particle k is bit k % 64 of word k / 64).
    masks: Vec<u64>,
    words_per_row: usize,
    n_edges: usize,
    positions: Option<Vec<[f64; 3]>>,
    radius: Option<f64>,
}

impl InterferenceGraph {
    /// Builds a graph from an explicit edge list over `n` particles.
    ///
    /// Duplicate edges collapse; self-loops and out-of-range endpoints are
    /// rejected.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n == 0 {
            return Err(invalid!("graph needs at least one particle"));
        }
        let mut neighbors = vec![Vec::new(); n];
        for &(i, j) in edges {
            if i >= n || j >= n {
                return Err(invalid!("edge ({i}, {j}) out of range for {n} particles"));
            }
            if i == j {
                return Err(invalid!("self-loop on particle {i}"));
            }
            neighbors[i].push(j);
            neighbors[j].push(i);
        }
        for list in &mut neighbors {
            list.sort_unstable();
            list.dedup();
        }
        Ok(Self::from_neighbor_lists(neighbors, None, None))
    }

    /// Builds the unit-disk graph: an edge wherever the Euclidean distance
    /// is at most `radius`. Ties (distance exactly `radius`) block.
    pub fn unit_disk(positions: &[[f64; 3]], radius: f64) -> Result<Self> {
        if positions.is_empty() {
            return Err(invalid!("unit-disk graph needs at least one position"));
        }
        if !radius.is_finite() || radius <= 0.0 {
            return Err(invalid!("blockade radius must be positive and finite, got {radius}"));
        }
        for (k, p) in positions.iter().enumerate() {
            if p.iter().any(|c| !c.is_finite()) {
                return Err(invalid!("non-finite coordinate at particle {k}"));
            }
        }
        let n = positions.len();
        let r2 = radius * radius;
        let mut neighbors = vec![Vec::new(); n];
        for i in 0..n {
            for j in (i + 1)..n {
                let d2: f64 = (0..3)
                    .map(|c| {
                        let d = positions[i][c] - positions[j][c];
                        d * d
                    })
                    .sum();
                if d2 <= r2 {
                    neighbors[i].push(j);
                    neighbors[j].push(i);
                }
            }
        }
        Ok(Self::from_neighbor_lists(
            neighbors,
            Some(positions.to_vec()),
            Some(radius),
        ))
    }

    /// Builds the `n`-wide, `m`-tall rectangular lattice with
    /// nearest-neighbor blocking. Particle `(x, y)` has index `y·n + x` and
    /// position `[x, y, 0]` with unit spacing; the radius is 1.
    pub fn lattice(n: usize, m: usize) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(invalid!("lattice dimensions must be at least 1, got {n}x{m}"));
        }
        let total = n
            .checked_mul(m)
            .ok_or_else(|| invalid!("lattice {n}x{m} overflows the particle count"))?;
        let mut neighbors = vec![Vec::new(); total];
        let mut positions = Vec::with_capacity(total);
        for y in 0..m {
            for x in 0..n {
                let k = y * n + x;
                positions.push([x as f64, y as f64, 0.0]);
                if x + 1 < n {
                    neighbors[k].push(k + 1);
                    neighbors[k + 1].push(k);
                }
                if y + 1 < m {
                    neighbors[k].push(k + n);
                    neighbors[k + n].push(k);
                }
            }
        }
        for list in &mut neighbors {
            list.sort_unstable();
        }
        Ok(Self::from_neighbor_lists(neighbors, Some(positions), Some(1.0)))
    }

    /// Builds the line of `n` particles where each blocks its `b` nearest
    /// neighbors on both sides: an edge iff `0 < |i − j| ≤ b`.
    pub fn line(n: usize, b: usize) -> Result<Self> {
        if n == 0 {
            return Err(invalid!("line needs at least one particle"));
        }
        let mut neighbors = vec![Vec::new(); n];
        for i in 0..n {
            for j in (i + 1)..n.min(i + b + 1) {
                neighbors[i].push(j);
                neighbors[j].push(i);
            }
        }
        for list in &mut neighbors {
            list.sort_unstable();
        }
        Ok(Self::from_neighbor_lists(neighbors, None, None))
    }

    fn from_neighbor_lists(
        neighbors: Vec<Vec<usize>>,
        positions: Option<Vec<[f64; 3]>>,
        radius: Option<f64>,
    ) -> Self {
        let n = neighbors.len();
        let words_per_row = n.div_ceil(64);
        let mut masks = vec![0u64; n * words_per_row];
        let mut degree_sum = 0usize;
        for (i, list) in neighbors.iter().enumerate() {
            degree_sum += list.len();
            let row = &mut masks[i * words_per_row..(i + 1) * words_per_row];
            for &j in list {
                row[j / 64] |= 1u64 << (j % 64);
            }
        }
        Self {
            neighbors,
            masks,
            words_per_row,
            n_edges: degree_sum / 2,
            positions,
            radius,
        }
    }

    /// Number of particles N.
    #[must_use]
    pub fn n_particles(&self) -> usize {
        self.neighbors.len()
    }

    /// Number of undirected edges.
    #[must_use]
    pub fn n_edges(&self) -> usize {
        self.n_edges
    }

    /// Sorted neighbor list of particle `i`.
    #[must_use]
    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.neighbors[i]
    }

    /// Degree of particle `i`.
    #[must_use]
    pub fn degree(&self, i: usize) -> usize {
        self.neighbors[i].len()
    }

    /// Whether particles `i` and `j` block each other.
    #[must_use]
    pub fn are_blocked(&self, i: usize, j: usize) -> bool {
        self.neighbors[i].binary_search(&j).is_ok()
    }

    /// Neighbor bitset of particle `i` (`words_per_config()` words,
    /// little-endian).
    #[must_use]
    pub fn neighbor_mask(&self, i: usize) -> &[u64] {
        &self.masks[i * self.words_per_row..(i + 1) * self.words_per_row]
    }

    /// Words needed for one occupancy bitset over this graph.
    #[must_use]
    pub fn words_per_config(&self) -> usize {
        self.words_per_row
    }

    /// All edges as `(i, j)` pairs with `i < j`, ascending.
    #[must_use]
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.n_edges);
        for (i, list) in self.neighbors.iter().enumerate() {
            for &j in list {
                if j > i {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Particle positions, when the graph came from geometry.
    #[must_use]
    pub fn positions(&self) -> Option<&[[f64; 3]]> {
        self.positions.as_deref()
    }

    /// Blockade radius, when the graph came from geometry.
    #[must_use]
    pub fn radius(&self) -> Option<f64> {
        self.radius
    }
}

/// Number of other particles that particle `i` (0-based) blocks on the line
/// of `n` particles with `b`-neighbor blocking:
/// `min(i + b, n − 1) − max(i − b, 0)`. Equals the degree of `i` in
/// [`InterferenceGraph::line`]`(n, b)`.
pub fn blocking_count(n: usize, b: usize, i: usize) -> Result<usize> {
    if n == 0 {
        return Err(invalid!("line needs at least one particle"));
    }
    if i >= n {
        return Err(invalid!("particle index {i} out of range for n = {n}"));
    }
    let lo = i.saturating_sub(b);
    let hi = (i + b).min(n - 1);
    Ok(hi - lo)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_disk_edges_follow_distance() {
        // Two particles well inside the radius: one edge.
        let g = InterferenceGraph::unit_disk(&[[0.0, 0.0, 0.0], [0.5, 0.0, 0.0]], 1.0).unwrap();
        assert_eq!(g.n_edges(), 1);
        // Two particles at twice the radius: no edge.
        let g = InterferenceGraph::unit_disk(&[[0.0, 0.0, 0.0], [2.0, 0.0, 0.0]], 1.0).unwrap();
        assert_eq!(g.n_edges(), 0);
        // Exact tie blocks.
        let g = InterferenceGraph::unit_disk(&[[0.0, 0.0, 0.0], [1.0, 0.0, 0.0]], 1.0).unwrap();
        assert_eq!(g.n_edges(), 1);
    }

    #[test]
    fn unit_disk_on_grid_excludes_diagonals() {
        // 3x3 grid with spacing 1 and radius 1.2: the 12 nearest-neighbor
        // edges and nothing else (diagonal distance sqrt(2) > 1.2).
        let mut pos = Vec::new();
        for y in 0..3 {
            for x in 0..3 {
                pos.push([x as f64, y as f64, 0.0]);
            }
        }
        let g = InterferenceGraph::unit_disk(&pos, 1.2).unwrap();
        assert_eq!(g.n_edges(), 12);
    }

    #[test]
    fn unit_disk_rejects_bad_input() {
        assert!(InterferenceGraph::unit_disk(&[], 1.0).is_err());
        assert!(InterferenceGraph::unit_disk(&[[0.0, 0.0, 0.0]], 0.0).is_err());
        assert!(InterferenceGraph::unit_disk(&[[0.0, 0.0, 0.0]], -1.0).is_err());
        assert!(InterferenceGraph::unit_disk(&[[f64::NAN, 0.0, 0.0]], 1.0).is_err());
    }

    #[test]
    fn lattice_counts() {
        let g = InterferenceGraph::lattice(1, 1).unwrap();
        assert_eq!((g.n_particles(), g.n_edges()), (1, 0));
        let g = InterferenceGraph::lattice(2, 2).unwrap();
        assert_eq!((g.n_particles(), g.n_edges()), (4, 4));
        // n(m-1) + m(n-1) edges: 9*4 vertical + 8*5 horizontal = 76.
        let g = InterferenceGraph::lattice(9, 5).unwrap();
        assert_eq!((g.n_particles(), g.n_edges()), (45, 76));
        assert_eq!(g.radius(), Some(1.0));
        assert_eq!(g.positions().unwrap().len(), 45);
    }

    #[test]
    fn lattice_matches_unit_disk_on_grid() {
        for (n, m) in [(2, 2), (4, 3), (5, 5)] {
            let lat = InterferenceGraph::lattice(n, m).unwrap();
            let disk = InterferenceGraph::unit_disk(lat.positions().unwrap(), 1.0).unwrap();
            for i in 0..lat.n_particles() {
                assert_eq!(lat.neighbors(i), disk.neighbors(i));
            }
        }
    }

    #[test]
    fn line_shapes() {
        let g = InterferenceGraph::line(9, 1).unwrap();
        assert_eq!(g.n_edges(), 8);
        let g = InterferenceGraph::line(9, 0).unwrap();
        assert_eq!(g.n_edges(), 0);
        // Middle particle of line(9, 4) blocks everyone else.
        let g = InterferenceGraph::line(9, 4).unwrap();
        assert_eq!(g.degree(4), 8);
    }

    #[test]
    fn adjacency_is_symmetric_and_irreflexive() {
        let graphs = [
            InterferenceGraph::line(12, 3).unwrap(),
            InterferenceGraph::lattice(4, 5).unwrap(),
            InterferenceGraph::from_edges(5, &[(0, 1), (1, 2), (0, 1)]).unwrap(),
        ];
        for g in &graphs {
            for i in 0..g.n_particles() {
                assert!(!g.are_blocked(i, i));
                for &j in g.neighbors(i) {
                    assert_ne!(i, j);
                    assert!(g.are_blocked(j, i));
                }
            }
        }
    }

    #[test]
    fn from_edges_dedups_and_validates() {
        let g = InterferenceGraph::from_edges(3, &[(0, 1), (1, 0), (1, 2)]).unwrap();
        assert_eq!(g.n_edges(), 2);
        assert!(InterferenceGraph::from_edges(3, &[(0, 3)]).is_err());
        assert!(InterferenceGraph::from_edges(3, &[(1, 1)]).is_err());
        assert!(InterferenceGraph::from_edges(0, &[]).is_err());
    }

    #[test]
    fn neighbor_masks_match_lists() {
        let g = InterferenceGraph::line(70, 2).unwrap(); // forces two words
        assert_eq!(g.words_per_config(), 2);
        for i in 0..70 {
            let mask = g.neighbor_mask(i);
            let mut from_mask = Vec::new();
            for (w, &word) in mask.iter().enumerate() {
                let mut bits = word;
                while bits != 0 {
                    let b = bits.trailing_zeros() as usize;
                    from_mask.push(w * 64 + b);
                    bits &= bits - 1;
                }
            }
            assert_eq!(from_mask, g.neighbors(i));
        }
    }

    #[test]
    fn blocking_count_formula() {
        // Line of 9, b = 4: end particle blocks 4, middle blocks all 8.
        assert_eq!(blocking_count(9, 4, 0).unwrap(), 4);
        assert_eq!(blocking_count(9, 4, 4).unwrap(), 8);
        assert_eq!(blocking_count(7, 0, 3).unwrap(), 0);
        assert!(blocking_count(9, 4, 9).is_err());
    }

    #[test]
    fn blocking_count_equals_line_degree() {
        for n in 1..=20 {
            for b in 0..=n {
                let g = InterferenceGraph::line(n, b).unwrap();
                for i in 0..n {
                    assert_eq!(blocking_count(n, b, i).unwrap(), g.degree(i), "n={n} b={b} i={i}");
                }
            }
        }
    }
}
