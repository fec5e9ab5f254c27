use serde::Serialize;

use crate::error::{domain, Error, Result};

/// Uniform grid whose cells tile the unit cubes `k + [-1/2, 1/2)^d` exactly.
///
/// Axes beyond `d` are padded with one cell so loops can always run over three
/// axes. The flat sample index is row-major with the last axis fastest.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GridSpec {
    d: usize,
    n_per_unit: usize,
    cells: [usize; 3],
    origin: [i64; 3],
}

impl GridSpec {
    /// `origin` is the lattice point of the first unit cube along each axis;
    /// the box along axis `i` is `[origin_i - 1/2, origin_i - 1/2 + side_i)`.
    pub fn new(d: usize, cells_per_axis: &[usize], h: f64, origin: &[i64]) -> Result<Self> {
        if !(1..=3).contains(&d) {
            return domain(format!("dimension {d} not in 1..=3"));
        }
        if cells_per_axis.len() != d || origin.len() != d {
            return domain("cells_per_axis and origin must have length d");
        }
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::Alignment(format!(
                "cell spacing {h} is not positive"
            )));
        }
        let inv = 1.0 / h;
        let n = inv.round();
        if n < 1.0 || (inv - n).abs() > 1e-9 * n {
            return Err(Error::Alignment(format!("1/h = {inv} is not an integer")));
        }
        let n = n as usize;
        let mut cells = [1usize; 3];
        let mut org = [0i64; 3];
        for i in 0..d {
            let c = cells_per_axis[i];
            if c == 0 || c % n != 0 {
                return Err(Error::Alignment(format!(
                    "axis {i}: {c} cells do not tile whole unit cubes at {n} cells per unit"
                )));
            }
            cells[i] = c;
            org[i] = origin[i];
        }
        Ok(GridSpec {
            d,
            n_per_unit: n,
            cells,
            origin: org,
        })
    }

    /// Cubic box of `side` unit cubes per axis starting at lattice point `origin`.
    pub fn cube(d: usize, side: usize, n_per_unit: usize, origin: i64) -> Result<Self> {
        if n_per_unit == 0 {
            return Err(Error::Alignment("zero cells per unit".into()));
        }
        Self::new(
            d,
            &vec![side * n_per_unit; d],
            1.0 / n_per_unit as f64,
            &vec![origin; d],
        )
    }

    /// Cubic box of `side` unit cubes per axis around the origin; symmetric
    /// about `0` for odd `side`, otherwise centered at `-1/2`.
    pub fn centered(d: usize, side: usize, n_per_unit: usize) -> Result<Self> {
        Self::cube(d, side, n_per_unit, -((side / 2) as i64))
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n_per_unit(&self) -> usize {
        self.n_per_unit
    }

    pub fn h(&self) -> f64 {
        1.0 / self.n_per_unit as f64
    }

    pub fn cells_per_axis(&self) -> &[usize] {
        &self.cells[..self.d]
    }

    /// Cells per axis padded to three axes.
    pub fn cells3(&self) -> [usize; 3] {
        self.cells
    }

    pub fn origin(&self) -> &[i64] {
        &self.origin[..self.d]
    }

    /// Number of unit cubes along axis `i`.
    pub fn side(&self, i: usize) -> usize {
        if i < self.d {
            self.cells[i] / self.n_per_unit
        } else {
            1
        }
    }

    /// Unit cubes per axis padded to three axes.
    pub fn sides3(&self) -> [usize; 3] {
        [self.side(0), self.side(1), self.side(2)]
    }

    /// Box length along axis `i`.
    pub fn length(&self, i: usize) -> f64 {
        self.side(i) as f64
    }

    pub fn lower(&self, i: usize) -> f64 {
        self.origin[i] as f64 - 0.5
    }

    pub fn upper(&self, i: usize) -> f64 {
        self.lower(i) + self.length(i)
    }

    /// Center of the box.
    pub fn center(&self) -> Vec<f64> {
        (0..self.d)
            .map(|i| self.lower(i) + 0.5 * self.length(i))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.cells.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cube_count(&self) -> usize {
        self.sides3().iter().product()
    }

    pub fn cell_volume(&self) -> f64 {
        self.h().powi(self.d as i32)
    }

    /// Coordinate of the center of cell `j` along axis `i`.
    pub fn coord(&self, i: usize, j: usize) -> f64 {
        self.lower(i) + (j as f64 + 0.5) * self.h()
    }

    /// Cell-center coordinates along each axis (empty vec for padded axes).
    pub fn axis_coords(&self) -> [Vec<f64>; 3] {
        let mut out: [Vec<f64>; 3] = Default::default();
        for (i, o) in out.iter_mut().enumerate().take(self.d) {
            *o = (0..self.cells[i]).map(|j| self.coord(i, j)).collect();
        }
        for o in out.iter_mut().skip(self.d) {
            *o = vec![0.0];
        }
        out
    }

    pub fn unravel(&self, idx: usize) -> [usize; 3] {
        let j2 = idx % self.cells[2];
        let r = idx / self.cells[2];
        [r / self.cells[1], r % self.cells[1], j2]
    }

    pub fn ravel(&self, j: [usize; 3]) -> usize {
        (j[0] * self.cells[1] + j[1]) * self.cells[2] + j[2]
    }

    /// Position of the sample with flat index `idx`.
    pub fn point(&self, idx: usize) -> [f64; 3] {
        let j = self.unravel(idx);
        let mut x = [0.0; 3];
        for i in 0..self.d {
            x[i] = self.coord(i, j[i]);
        }
        x
    }

    /// Flat index of the unit cube containing each cell, row-major over cubes.
    pub fn cube_index_map(&self) -> Vec<u32> {
        let n = self.n_per_unit;
        let s = self.sides3();
        let mut out = Vec::with_capacity(self.len());
        for j0 in 0..self.cells[0] {
            let c0 = if self.d > 0 { j0 / n } else { 0 };
            for j1 in 0..self.cells[1] {
                let c1 = if self.d > 1 { j1 / n } else { 0 };
                for j2 in 0..self.cells[2] {
                    let c2 = if self.d > 2 { j2 / n } else { 0 };
                    out.push(((c0 * s[1] + c1) * s[2] + c2) as u32);
                }
            }
        }
        out
    }

    /// Lattice point of the cube with flat index `c`.
    pub fn cube_lattice_point(&self, c: usize) -> [i64; 3] {
        let s = self.sides3();
        let k2 = c % s[2];
        let r = c / s[2];
        let k = [r / s[1], r % s[1], k2];
        let mut out = [0i64; 3];
        for i in 0..self.d {
            out[i] = self.origin[i] + k[i] as i64;
        }
        out
    }

    /// The same box with `factor` times as many unit cubes per axis, keeping
    /// the box center fixed as closely as the lattice allows.
    pub fn enlarged(&self, factor: usize) -> Result<Self> {
        let mut cells = Vec::with_capacity(self.d);
        let mut origin = Vec::with_capacity(self.d);
        for i in 0..self.d {
            let side = self.side(i);
            let new_side = side * factor;
            let shift = ((new_side - side) / 2) as i64;
            cells.push(new_side * self.n_per_unit);
            origin.push(self.origin[i] - shift);
        }
        Self::new(self.d, &cells, self.h(), &origin)
    }

    /// Whether the closed ball `|x - c| <= r` plus `margin` lies inside the box.
    pub fn contains_ball(&self, c: &[f64], r: f64, margin: f64) -> bool {
        (0..self.d)
            .all(|i| c[i] - r - margin >= self.lower(i) && c[i] + r + margin <= self.upper(i))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_integer_inverse_spacing() {
        assert!(matches!(
            GridSpec::new(1, &[10], 0.3, &[0]),
            Err(Error::Alignment(_))
        ));
        assert!(matches!(
            GridSpec::new(1, &[6], 0.25, &[0]),
            Err(Error::Alignment(_))
        ));
        assert!(GridSpec::new(1, &[8], 0.25, &[0]).is_ok());
    }

    #[test]
    fn centered_odd_box_is_symmetric() {
        let g = GridSpec::centered(2, 3, 4).unwrap();
        assert_eq!(g.lower(0), -1.5);
        assert_eq!(g.upper(1), 1.5);
        assert_eq!(g.len(), 144);
        assert_eq!(g.cube_count(), 9);
    }

    #[test]
    fn ravel_round_trip() {
        let g = GridSpec::new(3, &[4, 6, 2], 0.5, &[0, 1, -1]).unwrap();
        for idx in 0..g.len() {
            assert_eq!(g.ravel(g.unravel(idx)), idx);
        }
    }

    #[test]
    fn cube_map_counts_cells_per_cube() {
        let g = GridSpec::new(2, &[6, 9], 1.0 / 3.0, &[0, 0]).unwrap();
        let map = g.cube_index_map();
        let mut counts = vec![0; g.cube_count()];
        for c in map {
            counts[c as usize] += 1;
        }
        assert!(counts.iter().all(|&c| c == 9));
    }

    #[test]
    fn enlarged_keeps_spacing() {
        let g = GridSpec::centered(1, 3, 8).unwrap();
        let e = g.enlarged(2).unwrap();
        assert_eq!(e.side(0), 6);
        assert_eq!(e.h(), g.h());
        assert!(e.lower(0) <= g.lower(0) && e.upper(0) >= g.upper(0));
    }
}
