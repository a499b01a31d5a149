use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest supported lattice dimension.
pub const MAX_DIM: usize = 4;

/// Coordinates must stay strictly inside this bound for edge ids to be unique.
pub const COORD_LIMIT: i64 = 1 << 30;

/// A point of the integer lattice Z^d, 2 <= d <= MAX_DIM.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Site {
    coords: [i32; MAX_DIM],
    dim: u8,
}

impl Site {
    pub fn new(coords: &[i64]) -> Self {
        Self::try_new(coords).expect("invalid site")
    }

    pub fn try_new(coords: &[i64]) -> Result<Self> {
        if coords.len() < 2 || coords.len() > MAX_DIM {
            return Err(Error::contract(format!(
                "lattice dimension must lie in [2, {MAX_DIM}], got {}",
                coords.len()
            )));
        }
        let mut c = [0i32; MAX_DIM];
        for (slot, &x) in c.iter_mut().zip(coords) {
            if x.abs() >= COORD_LIMIT {
                return Err(Error::contract(format!("coordinate {x} out of range")));
            }
            *slot = x as i32;
        }
        Ok(Site {
            coords: c,
            dim: coords.len() as u8,
        })
    }

    pub fn origin(dim: usize) -> Self {
        assert!((2..=MAX_DIM).contains(&dim), "unsupported dimension {dim}");
        Site {
            coords: [0; MAX_DIM],
            dim: dim as u8,
        }
    }

    /// The unit vector e_{axis+1}.
    pub fn unit(dim: usize, axis: usize) -> Self {
        let mut s = Self::origin(dim);
        s.coords[axis] = 1;
        s
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    #[inline]
    pub fn coords(&self) -> &[i32] {
        &self.coords[..self.dim as usize]
    }

    #[inline]
    pub fn get(&self, axis: usize) -> i64 {
        self.coords[axis] as i64
    }

    pub fn to_vec(&self) -> Vec<i64> {
        self.coords().iter().map(|&x| x as i64).collect()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.coords().iter().map(|&x| x as f64).collect()
    }

    #[inline]
    pub fn with(&self, axis: usize, value: i64) -> Self {
        let mut s = *self;
        s.coords[axis] = value as i32;
        s
    }

    #[inline]
    pub fn step(&self, axis: usize, delta: i64) -> Self {
        self.with(axis, self.get(axis) + delta)
    }

    pub fn add(&self, other: &Site) -> Site {
        debug_assert_eq!(self.dim, other.dim);
        let mut s = *self;
        for i in 0..self.dim() {
            s.coords[i] += other.coords[i];
        }
        s
    }

    pub fn sub(&self, other: &Site) -> Site {
        debug_assert_eq!(self.dim, other.dim);
        let mut s = *self;
        for i in 0..self.dim() {
            s.coords[i] -= other.coords[i];
        }
        s
    }

    pub fn scale(&self, k: i64) -> Site {
        let v: Vec<i64> = self.coords().iter().map(|&x| x as i64 * k).collect();
        Site::new(&v)
    }

    pub fn dot(&self, other: &Site) -> i64 {
        self.coords()
            .iter()
            .zip(other.coords())
            .map(|(&a, &b)| a as i64 * b as i64)
            .sum()
    }

    /// ℓ1 norm ‖z‖.
    pub fn l1(&self) -> i64 {
        self.coords().iter().map(|&x| (x as i64).abs()).sum()
    }

    pub fn linf(&self) -> i64 {
        self.coords().iter().map(|&x| (x as i64).abs()).max().unwrap_or(0)
    }

    /// Squared Euclidean norm, exact.
    pub fn l2_sq(&self) -> i64 {
        self.dot(self)
    }

    /// Euclidean norm |z|.
    pub fn l2(&self) -> f64 {
        (self.l2_sq() as f64).sqrt()
    }

    pub fn l1_dist(&self, other: &Site) -> i64 {
        self.coords()
            .iter()
            .zip(other.coords())
            .map(|(&a, &b)| (a as i64 - b as i64).abs())
            .sum()
    }

    pub fn is_origin(&self) -> bool {
        self.coords().iter().all(|&x| x == 0)
    }

    /// The 2d lattice neighbours, axis ascending, minus before plus.
    pub fn lattice_neighbors(&self) -> impl Iterator<Item = Site> + '_ {
        (0..self.dim()).flat_map(move |axis| [self.step(axis, -1), self.step(axis, 1)])
    }

    pub fn is_adjacent(&self, other: &Site) -> bool {
        self.dim == other.dim && self.l1_dist(other) == 1
    }

    pub(crate) fn check_dim(&self, dim: usize) -> Result<()> {
        if self.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: self.dim(),
            });
        }
        Ok(())
    }
}

impl Ord for Site {
    fn cmp(&self, other: &Self) -> Ordering {
        self.dim
            .cmp(&other.dim)
            .then_with(|| self.coords().cmp(other.coords()))
    }
}

impl PartialOrd for Site {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.coords().iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

impl Serialize for Site {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_vec().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Site {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<i64>::deserialize(d)?;
        Site::try_new(&v).map_err(serde::de::Error::custom)
    }
}

/// Undirected nearest-neighbour edge {base, base + e_axis}.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct CanonicalEdge {
    pub base: Site,
    pub axis: u8,
}

impl CanonicalEdge {
    pub fn new(base: Site, axis: usize) -> Self {
        assert!(axis < base.dim(), "axis {axis} out of range");
        CanonicalEdge {
            base,
            axis: axis as u8,
        }
    }

    /// Canonical form of the edge between two adjacent sites.
    pub fn between(a: &Site, b: &Site) -> Result<Self> {
        if !a.is_adjacent(b) {
            return Err(Error::contract(format!("{a} and {b} are not lattice neighbours")));
        }
        let axis = (0..a.dim()).find(|&i| a.get(i) != b.get(i)).unwrap();
        let base = if a.get(axis) < b.get(axis) { *a } else { *b };
        Ok(CanonicalEdge::new(base, axis))
    }

    /// Unchecked variant for hot loops where adjacency is already known.
    #[inline]
    pub(crate) fn between_adjacent(a: &Site, b: &Site) -> Self {
        let mut axis = 0;
        while a.coords[axis] == b.coords[axis] {
            axis += 1;
        }
        let base = if a.coords[axis] < b.coords[axis] { *a } else { *b };
        CanonicalEdge {
            base,
            axis: axis as u8,
        }
    }

    pub fn endpoints(&self) -> (Site, Site) {
        (self.base, self.base.step(self.axis as usize, 1))
    }

    /// Collision-free 128-bit id: each coordinate is offset into 31 bits,
    /// followed by the axis.
    #[inline]
    pub fn id(&self) -> u128 {
        let mut id: u128 = 0;
        for &x in self.base.coords() {
            id = (id << 31) | ((x as i64 + COORD_LIMIT) as u128);
        }
        (id << 2) | self.axis as u128
    }
}

impl fmt::Display for CanonicalEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (a, b) = self.endpoints();
        write!(f, "{a}-{b}")
    }
}
