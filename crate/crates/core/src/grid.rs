//! Lattice geometry shared by the user and advertiser automata.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::ConfigError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cell {
    pub row: usize,
    pub col: usize,
}

impl Cell {
    pub const fn new(row: usize, col: usize) -> Self {
        Cell { row, col }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dims {
    pub rows: usize,
    pub cols: usize,
}

impl Dims {
    pub const fn new(rows: usize, cols: usize) -> Self {
        Dims { rows, cols }
    }

    pub fn area(self) -> usize {
        self.rows * self.cols
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Neighborhood {
    /// The four orthogonal cells.
    VonNeumann,
    /// The eight cells at chessboard distance one.
    Moore,
    /// The 24 cells at chessboard distance at most two.
    ExtendedMoore,
}

impl Neighborhood {
    pub const ALL: [Neighborhood; 3] = [
        Neighborhood::VonNeumann,
        Neighborhood::Moore,
        Neighborhood::ExtendedMoore,
    ];

    /// Offsets in row-major order, focal cell excluded.
    pub fn offsets(self) -> &'static [(isize, isize)] {
        const VON_NEUMANN: [(isize, isize); 4] = [(-1, 0), (0, -1), (0, 1), (1, 0)];
        const MOORE: [(isize, isize); 8] = [
            (-1, -1),
            (-1, 0),
            (-1, 1),
            (0, -1),
            (0, 1),
            (1, -1),
            (1, 0),
            (1, 1),
        ];
        const EXTENDED: [(isize, isize); 24] = [
            (-2, -2),
            (-2, -1),
            (-2, 0),
            (-2, 1),
            (-2, 2),
            (-1, -2),
            (-1, -1),
            (-1, 0),
            (-1, 1),
            (-1, 2),
            (0, -2),
            (0, -1),
            (0, 1),
            (0, 2),
            (1, -2),
            (1, -1),
            (1, 0),
            (1, 1),
            (1, 2),
            (2, -2),
            (2, -1),
            (2, 0),
            (2, 1),
            (2, 2),
        ];
        match self {
            Neighborhood::VonNeumann => &VON_NEUMANN,
            Neighborhood::Moore => &MOORE,
            Neighborhood::ExtendedMoore => &EXTENDED,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Neighborhood::VonNeumann => "von_neumann",
            Neighborhood::Moore => "moore",
            Neighborhood::ExtendedMoore => "extended_moore",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Topology {
    /// Edges wrap around; every cell has a full neighbourhood.
    #[default]
    Toroidal,
    /// Cells past the edge do not exist.
    Bounded,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistanceMetric {
    #[default]
    Chebyshev,
    Manhattan,
}

/// A rectangular lattice with a neighbourhood rule. Cells are stored row-major.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lattice {
    pub dims: Dims,
    pub neighborhood: Neighborhood,
    pub topology: Topology,
}

impl Lattice {
    pub fn new(
        dims: Dims,
        neighborhood: Neighborhood,
        topology: Topology,
    ) -> Result<Self, ConfigError> {
        if dims.area() == 0 {
            return Err(ConfigError::new("dims", "grid must have positive area"));
        }
        Ok(Lattice {
            dims,
            neighborhood,
            topology,
        })
    }

    pub fn len(&self) -> usize {
        self.dims.area()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, cell: Cell) -> bool {
        cell.row < self.dims.rows && cell.col < self.dims.cols
    }

    pub fn index(&self, cell: Cell) -> usize {
        debug_assert!(self.contains(cell));
        cell.row * self.dims.cols + cell.col
    }

    pub fn cell(&self, index: usize) -> Cell {
        Cell::new(index / self.dims.cols, index % self.dims.cols)
    }

    fn shift(&self, cell: Cell, dr: isize, dc: isize) -> Option<Cell> {
        let rows = self.dims.rows as isize;
        let cols = self.dims.cols as isize;
        let r = cell.row as isize + dr;
        let c = cell.col as isize + dc;
        match self.topology {
            Topology::Toroidal => Some(Cell::new(
                r.rem_euclid(rows) as usize,
                c.rem_euclid(cols) as usize,
            )),
            Topology::Bounded => {
                if (0..rows).contains(&r) && (0..cols).contains(&c) {
                    Some(Cell::new(r as usize, c as usize))
                } else {
                    None
                }
            }
        }
    }

    /// Neighbours of `cell` under this lattice's rule, focal cell excluded.
    ///
    /// On toroidal lattices too small for the neighbourhood, wrapped offsets that
    /// land on the same cell (or on the focal cell) are reported once (or not at all).
    pub fn neighbors(&self, cell: Cell) -> Vec<Cell> {
        self.neighbors_with(self.neighborhood, cell)
    }

    pub fn neighbors_with(&self, neighborhood: Neighborhood, cell: Cell) -> Vec<Cell> {
        let mut out = Vec::with_capacity(neighborhood.offsets().len());
        for &(dr, dc) in neighborhood.offsets() {
            if let Some(n) = self.shift(cell, dr, dc) {
                if n != cell && !out.contains(&n) {
                    out.push(n);
                }
            }
        }
        out
    }

    fn axis_distance(&self, a: usize, b: usize, size: usize) -> usize {
        let d = a.abs_diff(b);
        match self.topology {
            Topology::Toroidal => d.min(size - d),
            Topology::Bounded => d,
        }
    }

    pub fn distance(&self, a: Cell, b: Cell, metric: DistanceMetric) -> usize {
        let dr = self.axis_distance(a.row, b.row, self.dims.rows);
        let dc = self.axis_distance(a.col, b.col, self.dims.cols);
        match metric {
            DistanceMetric::Chebyshev => dr.max(dc),
            DistanceMetric::Manhattan => dr + dc,
        }
    }
}
