//! Deterministic generators: all canonical structures over a value grid,
//! all relations and maps between small carriers, and seeded random
//! sampling of the same instance spaces.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::extreal::ExtReal;
use crate::filter::{Carrier, Map, Relation};
use crate::space::CapStructure;

use super::ensure_budget;

const PALETTES: [[&str; 6]; 3] = [
    ["a", "b", "c", "d", "e", "f"],
    ["p", "q", "r", "s", "t", "u"],
    ["u", "v", "w", "x", "y", "z"],
];

/// The default carrier of size `n` for space slot `slot` (distinct label
/// palettes keep witnesses readable when several spaces appear together).
pub fn default_carrier(slot: usize, n: usize) -> Carrier {
    let palette = PALETTES[slot % PALETTES.len()];
    if n <= palette.len() {
        Carrier::new(palette[..n].iter().copied()).expect("palette labels")
    } else {
        let base = palette[0];
        Carrier::new((0..n).map(|i| format!("{base}{i}"))).expect("generated labels")
    }
}

/// Number of canonical structures on an `n`-point carrier over a grid:
/// one grid choice per off-diagonal entry.
pub fn space_count(n: usize, grid_len: usize) -> u128 {
    (grid_len as u128).pow((n * n - n) as u32)
}

/// The `idx`-th structure in lexicographic order: off-diagonal entries in
/// row-major order form a base-`|grid|` number, first entry most
/// significant.
pub fn space_by_index(carrier: &Carrier, grid: &[ExtReal], idx: u128) -> CapStructure {
    let n = carrier.len();
    let cells = n * n - n;
    let base = grid.len() as u128;
    let mut digits = vec![0usize; cells];
    let mut rem = idx;
    for d in (0..cells).rev() {
        digits[d] = (rem % base) as usize;
        rem /= base;
    }
    debug_assert_eq!(rem, 0);
    let mut matrix = vec![ExtReal::ZERO; n * n];
    let mut cell = 0;
    for z in 0..n {
        for x in 0..n {
            if z != x {
                matrix[z * n + x] = grid[digits[cell]];
                cell += 1;
            }
        }
    }
    CapStructure::from_flat(carrier, matrix)
}

/// All canonical structures on the carrier over the grid, in lexicographic
/// order, after a budget check.
pub fn enum_spaces(carrier: &Carrier, grid: &[ExtReal]) -> Result<Vec<CapStructure>> {
    let count = space_count(carrier.len(), grid.len());
    ensure_budget(count)?;
    Ok((0..count)
        .map(|i| space_by_index(carrier, grid, i))
        .collect())
}

/// Every canonical structure on carriers of sizes `1..=max_n` for one
/// space slot, addressable by a flat deterministic index.
pub struct SpaceSlot {
    blocks: Vec<(Carrier, u128)>, // (carrier, structure count) per size
    grid: Vec<ExtReal>,
    total: u128,
}

impl SpaceSlot {
    pub fn new(slot: usize, max_n: usize, grid: &[ExtReal]) -> Result<SpaceSlot> {
        let mut blocks = Vec::new();
        let mut total = 0u128;
        for n in 1..=max_n {
            let count = space_count(n, grid.len());
            total += count;
            blocks.push((default_carrier(slot, n), count));
        }
        Ok(SpaceSlot {
            blocks,
            grid: grid.to_vec(),
            total,
        })
    }

    pub fn len(&self) -> u128 {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    pub fn get(&self, idx: u128) -> CapStructure {
        let mut rem = idx;
        for (carrier, count) in &self.blocks {
            if rem < *count {
                return space_by_index(carrier, &self.grid, rem);
            }
            rem -= count;
        }
        panic!("space index {idx} out of range {}", self.total);
    }

    /// Deterministic sample of `count` indices (with replacement).
    pub fn sample_indices(&self, rng: &mut ChaCha8Rng, count: u64) -> Vec<u128> {
        (0..count).map(|_| rng.gen_range(0..self.total)).collect()
    }
}

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn relation_count(x: &Carrier, y: &Carrier) -> u128 {
    1u128 << (x.len() * y.len())
}

/// The `idx`-th relation: bit `xi * |Y| + yi` of `idx` puts `(xi, yi)` in
/// the graph.
pub fn relation_by_index(x: &Carrier, y: &Carrier, idx: u128) -> Relation {
    let ny = y.len();
    let img = (0..x.len())
        .map(|xi| {
            let mut m = 0u64;
            for yi in 0..ny {
                if idx & (1u128 << (xi * ny + yi)) != 0 {
                    m |= 1 << yi;
                }
            }
            m
        })
        .collect();
    Relation::from_images(x, y, img)
}

pub fn map_count(x: &Carrier, y: &Carrier) -> u128 {
    (y.len() as u128).pow(x.len() as u32)
}

/// The `idx`-th total map in mixed-radix order (first domain point most
/// significant).
pub fn map_by_index(x: &Carrier, y: &Carrier, idx: u128) -> Map {
    let ny = y.len() as u128;
    let mut images = vec![0usize; x.len()];
    let mut rem = idx;
    for xi in (0..x.len()).rev() {
        images[xi] = (rem % ny) as usize;
        rem /= ny;
    }
    Map::from_images(x, y, images)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn space_enumeration_counts() {
        assert_eq!(space_count(2, 3), 9);
        assert_eq!(space_count(1, 3), 1);
        assert_eq!(space_count(3, 2), 64);
        assert_eq!(space_count(3, 3), 729);

        let c = default_carrier(0, 2);
        let grid = [ExtReal::ZERO, ExtReal::int(1), ExtReal::INFINITY];
        let all = enum_spaces(&c, &grid).unwrap();
        assert_eq!(all.len(), 9);
        // lexicographic: first is indiscrete, last has both entries inf
        assert_eq!(all[0], CapStructure::indiscrete(&c));
        assert_eq!(all[8], CapStructure::discrete(&c));
        // all distinct
        for i in 0..all.len() {
            for j in i + 1..all.len() {
                assert_ne!(all[i], all[j]);
            }
        }
    }

    #[test]
    fn slot_indexing_is_stable() {
        let grid = [ExtReal::ZERO, ExtReal::INFINITY];
        let slot = SpaceSlot::new(0, 3, &grid).unwrap();
        assert_eq!(slot.len(), 1 + 4 + 64);
        assert_eq!(slot.get(0).carrier().len(), 1);
        assert_eq!(slot.get(1).carrier().len(), 2);
        assert_eq!(slot.get(5).carrier().len(), 3);
        // same index, same structure
        assert_eq!(slot.get(37), slot.get(37));
    }

    #[test]
    fn relation_and_map_indexing() {
        let x = default_carrier(0, 2);
        let y = default_carrier(1, 2);
        assert_eq!(relation_count(&x, &y), 16);
        assert_eq!(map_count(&x, &y), 4);

        let all: Vec<Relation> = (0..16).map(|i| relation_by_index(&x, &y, i)).collect();
        for i in 0..16 {
            for j in i + 1..16 {
                assert_ne!(all[i], all[j]);
            }
        }
        assert!(relation_by_index(&x, &y, 0).pairs().is_empty());

        let m = map_by_index(&x, &y, 1);
        assert_eq!(m.apply("a").unwrap(), "p");
        assert_eq!(m.apply("b").unwrap(), "q");
    }

    #[test]
    fn seeded_sampling_is_deterministic() {
        let grid = [ExtReal::ZERO, ExtReal::int(1), ExtReal::INFINITY];
        let slot = SpaceSlot::new(0, 2, &grid).unwrap();
        let a = slot.sample_indices(&mut seeded_rng(42), 10);
        let b = slot.sample_indices(&mut seeded_rng(42), 10);
        assert_eq!(a, b);
    }
}
