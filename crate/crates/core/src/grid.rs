//! Uniform grids on the triangle `0 ≤ t ≤ T ≤ T*` and fields stored on them.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub horizon: f64,
    pub n: usize,
}

impl GridSpec {
    pub fn new(horizon: f64, n: usize) -> Self {
        assert!(horizon > 0.0 && horizon.is_finite(), "horizon must be positive");
        assert!(n >= 2, "grid needs at least two steps");
        Self { horizon, n }
    }

    pub fn step(&self) -> f64 {
        self.horizon / self.n as f64
    }

    pub fn time(&self, i: usize) -> f64 {
        if i == self.n {
            self.horizon
        } else {
            i as f64 * self.step()
        }
    }

    pub fn points(&self) -> usize {
        self.n + 1
    }

    /// Index of `t` rounded down onto the grid.
    pub fn floor_index(&self, t: f64) -> usize {
        ((t / self.step()).floor().max(0.0) as usize).min(self.n)
    }
}

/// Values `f(t_i, T_j)` for `i ≤ j`, stored densely by rows.
#[derive(Debug, Clone, PartialEq)]
pub struct TriangleField {
    grid: GridSpec,
    data: Vec<f64>,
}

impl TriangleField {
    pub fn filled(grid: GridSpec, value: f64) -> Self {
        let m = grid.points();
        let mut data = vec![0.0; m * m];
        for i in 0..m {
            for j in i..m {
                data[i * m + j] = value;
            }
        }
        Self { grid, data }
    }

    pub fn from_fn<F: FnMut(usize, usize) -> f64>(grid: GridSpec, mut f: F) -> Self {
        let m = grid.points();
        let mut data = vec![0.0; m * m];
        for i in 0..m {
            for j in i..m {
                data[i * m + j] = f(i, j);
            }
        }
        Self { grid, data }
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        debug_assert!(i <= j);
        self.data[i * self.grid.points() + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        debug_assert!(i <= j);
        let m = self.grid.points();
        self.data[i * m + j] = v;
    }

    /// Row `t_i`, entries for `T_j` with `j ≥ i`.
    pub fn row(&self, i: usize) -> &[f64] {
        let m = self.grid.points();
        &self.data[i * m + i..(i + 1) * m]
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let m = self.grid.points();
        (0..m).flat_map(move |i| (i..m).map(move |j| (i, j, self.get(i, j))))
    }

    pub fn sup(&self) -> f64 {
        self.iter().map(|(_, _, v)| v).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.iter().map(|(_, _, v)| v).fold(f64::INFINITY, f64::min)
    }

    /// `sup |self − other|`; fields must share a grid.
    pub fn sup_distance(&self, other: &TriangleField) -> f64 {
        assert_eq!(self.grid, other.grid);
        self.iter()
            .map(|(i, j, v)| (v - other.get(i, j)).abs())
            .fold(0.0, f64::max)
    }
}
