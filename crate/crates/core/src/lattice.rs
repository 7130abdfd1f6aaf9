//! Hypercubic lattices and the A/B/C split around an observable's support.

use std::collections::{BTreeSet, VecDeque};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LatticeKind {
    Chain,
    Square,
    Cubic,
}

impl LatticeKind {
    pub fn dimension(self) -> usize {
        match self {
            LatticeKind::Chain => 1,
            LatticeKind::Square => 2,
            LatticeKind::Cubic => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lattice {
    kind: LatticeKind,
    extents: Vec<usize>,
    periodic: bool,
    edges: Vec<(usize, usize)>,
    neighbors: Vec<Vec<usize>>,
}

impl Lattice {
    /// Sites are indexed row-major: the last axis varies fastest.
    pub fn new(kind: LatticeKind, extents: &[usize], periodic: bool) -> Result<Self> {
        if extents.len() != kind.dimension() {
            return Err(Error::InvalidExtent(format!(
                "{kind:?} needs {} extents, got {}",
                kind.dimension(),
                extents.len()
            )));
        }
        if let Some(axis) = extents.iter().position(|&e| e == 0) {
            return Err(Error::InvalidExtent(format!("axis {axis} has extent 0")));
        }
        // A ring of two sites would carry the same bond twice.
        if periodic {
            if let Some(axis) = extents.iter().position(|&e| e == 2) {
                return Err(Error::InvalidExtent(format!(
                    "periodic axis {axis} of extent 2 doubles its bond"
                )));
            }
        }
        let n: usize = extents.iter().product();
        let mut edge_set = BTreeSet::new();
        for site in 0..n {
            let coords = unravel(site, extents);
            for axis in 0..extents.len() {
                let e = extents[axis];
                let next = if coords[axis] + 1 < e {
                    coords[axis] + 1
                } else if periodic && e > 1 {
                    0
                } else {
                    continue;
                };
                let mut c = coords.clone();
                c[axis] = next;
                let other = ravel(&c, extents);
                edge_set.insert((site.min(other), site.max(other)));
            }
        }
        let edges: Vec<_> = edge_set.into_iter().collect();
        let mut neighbors = vec![Vec::new(); n];
        for &(a, b) in &edges {
            neighbors[a].push(b);
            neighbors[b].push(a);
        }
        for list in &mut neighbors {
            list.sort_unstable();
        }
        Ok(Self { kind, extents: extents.to_vec(), periodic, edges, neighbors })
    }

    pub fn chain(n: usize, periodic: bool) -> Result<Self> {
        Self::new(LatticeKind::Chain, &[n], periodic)
    }

    pub fn kind(&self) -> LatticeKind {
        self.kind
    }

    pub fn extents(&self) -> &[usize] {
        &self.extents
    }

    pub fn is_periodic(&self) -> bool {
        self.periodic
    }

    pub fn n_sites(&self) -> usize {
        self.neighbors.len()
    }

    /// Nearest-neighbour pairs `(i, j)` with `i < j`, sorted.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, site: usize) -> &[usize] {
        &self.neighbors[site]
    }

    pub fn degree(&self, site: usize) -> usize {
        self.neighbors[site].len()
    }

    pub fn coordinates(&self, site: usize) -> Vec<usize> {
        unravel(site, &self.extents)
    }

    pub fn site_at(&self, coords: &[usize]) -> usize {
        ravel(coords, &self.extents)
    }

    /// Graph distance from `sources` to every site (`usize::MAX` if unreachable).
    pub fn distances_from(&self, sources: &[usize]) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.n_sites()];
        let mut queue = VecDeque::new();
        for &s in sources {
            if dist[s] != 0 {
                dist[s] = 0;
                queue.push_back(s);
            }
        }
        while let Some(v) = queue.pop_front() {
            for &w in &self.neighbors[v] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    pub fn distance(&self, a: usize, b: usize) -> usize {
        self.distances_from(&[a])[b]
    }

    pub fn partition(&self, support: &[usize], buffer: usize) -> Result<RegionPartition> {
        RegionPartition::new(self, support, buffer)
    }
}

fn unravel(mut site: usize, extents: &[usize]) -> Vec<usize> {
    let mut coords = vec![0; extents.len()];
    for axis in (0..extents.len()).rev() {
        coords[axis] = site % extents[axis];
        site /= extents[axis];
    }
    coords
}

fn ravel(coords: &[usize], extents: &[usize]) -> usize {
    coords.iter().zip(extents).fold(0, |acc, (&c, &e)| acc * e + c)
}

/// A = observable support, B = sites within `buffer` steps of A, C = the rest.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RegionPartition {
    region_a: Vec<usize>,
    region_b: Vec<usize>,
    region_c: Vec<usize>,
    buffer: usize,
}

impl RegionPartition {
    pub fn new(lattice: &Lattice, support: &[usize], buffer: usize) -> Result<Self> {
        if support.is_empty() {
            return Err(Error::InvalidArgument("region A must be non-empty".into()));
        }
        if let Some(&s) = support.iter().find(|&&s| s >= lattice.n_sites()) {
            return Err(Error::SiteNotPresent(s));
        }
        let dist = lattice.distances_from(support);
        let mut region_a = Vec::new();
        let mut region_b = Vec::new();
        let mut region_c = Vec::new();
        for (site, &d) in dist.iter().enumerate() {
            match d {
                0 => region_a.push(site),
                d if d <= buffer => region_b.push(site),
                _ => region_c.push(site),
            }
        }
        Ok(Self { region_a, region_b, region_c, buffer })
    }

    /// Build a partition from explicit site sets (used for hand-made geometries).
    pub fn from_sets(a: &[usize], b: &[usize], c: &[usize]) -> Result<Self> {
        let mut all: Vec<usize> = a.iter().chain(b).chain(c).copied().collect();
        all.sort_unstable();
        let n = all.len();
        all.dedup();
        if all.len() != n || all.iter().enumerate().any(|(i, &s)| i != s) {
            return Err(Error::InvalidArgument("regions must tile 0..N disjointly".into()));
        }
        if a.is_empty() {
            return Err(Error::InvalidArgument("region A must be non-empty".into()));
        }
        let sorted = |v: &[usize]| {
            let mut v = v.to_vec();
            v.sort_unstable();
            v
        };
        Ok(Self { region_a: sorted(a), region_b: sorted(b), region_c: sorted(c), buffer: 0 })
    }

    pub fn a(&self) -> &[usize] {
        &self.region_a
    }

    pub fn b(&self) -> &[usize] {
        &self.region_b
    }

    pub fn c(&self) -> &[usize] {
        &self.region_c
    }

    pub fn buffer(&self) -> usize {
        self.buffer
    }

    /// A ∪ B in ascending order.
    pub fn window(&self) -> Vec<usize> {
        merge(&self.region_a, &self.region_b)
    }

    /// A ∪ C in ascending order.
    pub fn outer(&self) -> Vec<usize> {
        merge(&self.region_a, &self.region_c)
    }

    pub fn n_sites(&self) -> usize {
        self.region_a.len() + self.region_b.len() + self.region_c.len()
    }
}

fn merge(x: &[usize], y: &[usize]) -> Vec<usize> {
    let mut v: Vec<usize> = x.iter().chain(y).copied().collect();
    v.sort_unstable();
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ring_of_six() {
        let l = Lattice::chain(6, true).unwrap();
        assert_eq!(l.edges().len(), 6);
        assert!((0..6).all(|s| l.degree(s) == 2));
    }

    #[test]
    fn torus_three_by_three() {
        let l = Lattice::new(LatticeKind::Square, &[3, 3], true).unwrap();
        assert_eq!(l.edges().len(), 18);
        assert!((0..9).all(|s| l.degree(s) == 4));
    }

    #[test]
    fn open_path() {
        let l = Lattice::chain(4, false).unwrap();
        assert_eq!(l.edges(), &[(0, 1), (1, 2), (2, 3)]);
        assert_eq!(l.degree(0), 1);
        assert_eq!(l.degree(3), 1);
    }

    #[test]
    fn rejects_bad_extents() {
        assert!(matches!(Lattice::chain(0, false), Err(Error::InvalidExtent(_))));
        assert!(matches!(Lattice::chain(2, true), Err(Error::InvalidExtent(_))));
        assert!(Lattice::chain(2, false).is_ok());
        assert!(Lattice::new(LatticeKind::Square, &[4, 2], true).is_err());
    }

    #[test]
    fn six_ring_partition() {
        let l = Lattice::chain(6, true).unwrap();
        let p = l.partition(&[2], 1).unwrap();
        assert_eq!(p.a(), &[2]);
        assert_eq!(p.b(), &[1, 3]);
        assert_eq!(p.c(), &[0, 4, 5]);
        let p = l.partition(&[2], 3).unwrap();
        assert!(p.c().is_empty());
    }

    #[test]
    fn von_neumann_neighbourhood() {
        let l = Lattice::new(LatticeKind::Square, &[5, 5], true).unwrap();
        let centre = l.site_at(&[2, 2]);
        let p = l.partition(&[centre], 1).unwrap();
        assert_eq!(p.b().len(), 4);
        assert_eq!(p.c().len(), 20);
    }

    #[test]
    fn row_major_indexing() {
        let l = Lattice::new(LatticeKind::Cubic, &[2, 3, 4], false).unwrap();
        assert_eq!(l.site_at(&[1, 2, 3]), 23);
        assert_eq!(l.coordinates(13), vec![1, 0, 1]);
    }
}
