//! Velocity stencils, grids, distribution storage and the transport phase.
//!
//! Distributions are stored as one array per discrete velocity (structure of
//! arrays), row-major over cells with `x` fastest, and the `M` components of a
//! cell contiguous. Every nonzero velocity owns a one-cell-thick ghost strip on
//! the side it enters the domain from.

use crate::{Error, Result, MAX_COMPONENTS};

/// Discrete velocity, named by the direction it moves along.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Velocity {
    Zero,
    PlusX,
    MinusX,
    PlusY,
    MinusY,
}

impl Velocity {
    /// Fixed global order used for every summation over velocities.
    pub const ALL: [Velocity; 5] = [
        Velocity::Zero,
        Velocity::PlusX,
        Velocity::MinusX,
        Velocity::PlusY,
        Velocity::MinusY,
    ];

    pub fn displacement(self) -> (i32, i32) {
        match self {
            Velocity::Zero => (0, 0),
            Velocity::PlusX => (1, 0),
            Velocity::MinusX => (-1, 0),
            Velocity::PlusY => (0, 1),
            Velocity::MinusY => (0, -1),
        }
    }

    pub fn opposite(self) -> Velocity {
        match self {
            Velocity::Zero => Velocity::Zero,
            Velocity::PlusX => Velocity::MinusX,
            Velocity::MinusX => Velocity::PlusX,
            Velocity::PlusY => Velocity::MinusY,
            Velocity::MinusY => Velocity::PlusY,
        }
    }

    /// Side of the domain through which this velocity enters.
    pub fn inflow_side(self) -> Option<Side> {
        match self {
            Velocity::Zero => None,
            Velocity::PlusX => Some(Side::West),
            Velocity::MinusX => Some(Side::East),
            Velocity::PlusY => Some(Side::South),
            Velocity::MinusY => Some(Side::North),
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Velocity::Zero => "zero",
            Velocity::PlusX => "+x",
            Velocity::MinusX => "-x",
            Velocity::PlusY => "+y",
            Velocity::MinusY => "-y",
        }
    }
}

/// One of the four sides of the rectangular domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    West,
    East,
    South,
    North,
}

impl Side {
    pub const ALL: [Side; 4] = [Side::West, Side::East, Side::South, Side::North];

    /// The velocity that enters the domain through this side.
    pub fn incoming(self) -> Velocity {
        match self {
            Side::West => Velocity::PlusX,
            Side::East => Velocity::MinusX,
            Side::South => Velocity::PlusY,
            Side::North => Velocity::MinusY,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Side::West => "west",
            Side::East => "east",
            Side::South => "south",
            Side::North => "north",
        }
    }
}

/// Axis-aligned velocity stencils.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stencil {
    D1Q2,
    D1Q3,
    D2Q4,
    D2Q5,
}

impl Stencil {
    pub fn velocities(self) -> &'static [Velocity] {
        use Velocity::*;
        match self {
            Stencil::D1Q2 => &[PlusX, MinusX],
            Stencil::D1Q3 => &[Zero, PlusX, MinusX],
            Stencil::D2Q4 => &[PlusX, MinusX, PlusY, MinusY],
            Stencil::D2Q5 => &[Zero, PlusX, MinusX, PlusY, MinusY],
        }
    }

    pub fn dimension(self) -> usize {
        match self {
            Stencil::D1Q2 | Stencil::D1Q3 => 1,
            Stencil::D2Q4 | Stencil::D2Q5 => 2,
        }
    }

    pub fn q(self) -> usize {
        self.velocities().len()
    }

    pub fn has_rest(self) -> bool {
        matches!(self, Stencil::D1Q3 | Stencil::D2Q5)
    }

    /// Position of `v` in this stencil's velocity list.
    pub fn slot(self, v: Velocity) -> Option<usize> {
        self.velocities().iter().position(|&w| w == v)
    }

    pub fn name(self) -> &'static str {
        match self {
            Stencil::D1Q2 => "D1Q2",
            Stencil::D1Q3 => "D1Q3",
            Stencil::D2Q4 => "D2Q4",
            Stencil::D2Q5 => "D2Q5",
        }
    }

    pub fn parse(s: &str) -> Option<Stencil> {
        match s.to_ascii_uppercase().as_str() {
            "D1Q2" => Some(Stencil::D1Q2),
            "D1Q3" => Some(Stencil::D1Q3),
            "D2Q4" => Some(Stencil::D2Q4),
            "D2Q5" => Some(Stencil::D2Q5),
            _ => None,
        }
    }
}

/// Uniform Cartesian grid with square cells, lattice velocity and time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub dim: usize,
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub nx: usize,
    pub ny: usize,
    pub dx: f64,
    pub lambda: f64,
    pub dt: f64,
    /// Requested final time.
    pub t_final: f64,
    pub steps: usize,
}

impl GridSpec {
    pub fn new_1d(x_min: f64, x_max: f64, nx: usize, lambda: f64, t_final: f64) -> Result<Self> {
        Self::build(1, (x_min, x_max), (0.0, 0.0), nx, lambda, t_final)
    }

    /// Two-dimensional grid; `ny` is derived from the square-cell constraint.
    pub fn new_2d(
        x: (f64, f64),
        y: (f64, f64),
        nx: usize,
        lambda: f64,
        t_final: f64,
    ) -> Result<Self> {
        Self::build(2, x, y, nx, lambda, t_final)
    }

    fn build(
        dim: usize,
        x: (f64, f64),
        y: (f64, f64),
        nx: usize,
        lambda: f64,
        t_final: f64,
    ) -> Result<Self> {
        if nx == 0 {
            return Err(Error::InvalidParameter("need at least one cell".into()));
        }
        if !(x.1 > x.0) {
            return Err(Error::InvalidParameter("empty x extent".into()));
        }
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::InvalidParameter(format!("lattice velocity {lambda}")));
        }
        if !(t_final >= 0.0) {
            return Err(Error::InvalidParameter(format!("final time {t_final}")));
        }
        let dx = (x.1 - x.0) / nx as f64;
        let ny = if dim == 2 {
            let cells = (y.1 - y.0) / dx;
            let rounded = cells.round();
            if rounded < 1.0 || (cells - rounded).abs() > 1e-9 * cells.max(1.0) {
                return Err(Error::InvalidParameter(format!(
                    "y extent {} is not a whole number of cells of size {dx}",
                    y.1 - y.0
                )));
            }
            rounded as usize
        } else {
            1
        };
        let dt = dx / lambda;
        let steps = (t_final / dt).round() as usize;
        Ok(GridSpec {
            dim,
            x_min: x.0,
            x_max: x.1,
            y_min: y.0,
            y_max: y.1,
            nx,
            ny,
            dx,
            lambda,
            dt,
            t_final,
            steps,
        })
    }

    pub fn cells(&self) -> usize {
        self.nx * self.ny
    }

    /// Final time actually reached after `steps` steps.
    pub fn realized_final_time(&self) -> f64 {
        self.steps as f64 * self.dt
    }

    pub fn time(&self, n: usize) -> f64 {
        n as f64 * self.dt
    }

    pub fn x_center(&self, ix: usize) -> f64 {
        self.x_min + (ix as f64 + 0.5) * self.dx
    }

    pub fn y_center(&self, iy: usize) -> f64 {
        if self.dim == 1 {
            0.0
        } else {
            self.y_min + (iy as f64 + 0.5) * self.dx
        }
    }

    pub fn index(&self, ix: usize, iy: usize) -> usize {
        iy * self.nx + ix
    }

    /// Cell measure `dx^d`.
    pub fn cell_volume(&self) -> f64 {
        self.dx.powi(self.dim as i32)
    }

    /// Number of boundary cells along a side.
    pub fn side_len(&self, side: Side) -> usize {
        match side {
            Side::West | Side::East => self.ny,
            Side::South | Side::North => self.nx,
        }
    }

    /// Sides that carry incoming velocities for the given dimension.
    pub fn sides(&self) -> &'static [Side] {
        if self.dim == 1 {
            &[Side::West, Side::East]
        } else {
            &Side::ALL
        }
    }

    /// Interior cell adjacent to boundary position `k` on `side`, and the
    /// next one inward.
    pub fn boundary_cells(&self, side: Side, k: usize) -> (usize, Option<usize>) {
        match side {
            Side::West => (self.index(0, k), (self.nx > 1).then(|| self.index(1, k))),
            Side::East => (
                self.index(self.nx - 1, k),
                (self.nx > 1).then(|| self.index(self.nx - 2, k)),
            ),
            Side::South => (self.index(k, 0), (self.ny > 1).then(|| self.index(k, 1))),
            Side::North => (
                self.index(k, self.ny - 1),
                (self.ny > 1).then(|| self.index(k, self.ny - 2)),
            ),
        }
    }

    /// Tangential coordinate interval of boundary position `k` on `side`.
    pub fn face_interval(&self, side: Side, k: usize) -> (f64, f64) {
        match side {
            Side::West | Side::East => {
                if self.dim == 1 {
                    (0.0, 0.0)
                } else {
                    let lo = self.y_min + k as f64 * self.dx;
                    (lo, lo + self.dx)
                }
            }
            Side::South | Side::North => {
                let lo = self.x_min + k as f64 * self.dx;
                (lo, lo + self.dx)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
struct Ghost {
    values: Vec<f64>,
    filled: bool,
}

/// Distribution functions of all velocities of a stencil over the interior
/// cells, plus incoming ghost strips.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionField {
    stencil: Stencil,
    nx: usize,
    ny: usize,
    components: usize,
    data: Vec<Vec<f64>>,
    ghosts: Vec<Ghost>,
}

impl DistributionField {
    pub fn zeros(stencil: Stencil, nx: usize, ny: usize, components: usize) -> Result<Self> {
        if components == 0 || components > MAX_COMPONENTS {
            return Err(Error::Shape(format!("{components} components")));
        }
        if stencil.dimension() == 1 && ny != 1 {
            return Err(Error::Shape(format!("1D stencil on {nx}x{ny} grid")));
        }
        let cells = nx * ny;
        let data = vec![vec![0.0; cells * components]; stencil.q()];
        let ghosts = stencil
            .velocities()
            .iter()
            .map(|v| {
                let len = match v.inflow_side() {
                    None => 0,
                    Some(Side::West | Side::East) => ny,
                    Some(Side::South | Side::North) => nx,
                };
                Ghost { values: vec![0.0; len * components], filled: false }
            })
            .collect();
        Ok(DistributionField { stencil, nx, ny, components, data, ghosts })
    }

    pub fn for_grid(stencil: Stencil, grid: &GridSpec, components: usize) -> Result<Self> {
        if stencil.dimension() != grid.dim {
            return Err(Error::Shape(format!(
                "{} stencil on a {}D grid",
                stencil.name(),
                grid.dim
            )));
        }
        Self::zeros(stencil, grid.nx, grid.ny, components)
    }

    pub fn stencil(&self) -> Stencil {
        self.stencil
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn cells(&self) -> usize {
        self.nx * self.ny
    }

    pub fn components(&self) -> usize {
        self.components
    }

    /// Values of the velocity at stencil slot `slot`, all cells.
    pub fn slot_values(&self, slot: usize) -> &[f64] {
        &self.data[slot]
    }

    pub fn slot_values_mut(&mut self, slot: usize) -> &mut [f64] {
        &mut self.data[slot]
    }

    pub fn values(&self, v: Velocity) -> Option<&[f64]> {
        self.stencil.slot(v).map(|s| self.data[s].as_slice())
    }

    pub fn values_mut(&mut self, v: Velocity) -> Option<&mut [f64]> {
        self.stencil.slot(v).map(move |s| self.data[s].as_mut_slice())
    }

    /// Components of slot `slot` at cell `cell`.
    pub fn get(&self, slot: usize, cell: usize) -> &[f64] {
        let m = self.components;
        &self.data[slot][cell * m..(cell + 1) * m]
    }

    pub fn get_mut(&mut self, slot: usize, cell: usize) -> &mut [f64] {
        let m = self.components;
        &mut self.data[slot][cell * m..(cell + 1) * m]
    }

    /// Ghost values of slot `slot` at boundary position `k`.
    pub fn ghost(&self, slot: usize, k: usize) -> &[f64] {
        let m = self.components;
        &self.ghosts[slot].values[k * m..(k + 1) * m]
    }

    pub fn ghost_mut(&mut self, slot: usize, k: usize) -> &mut [f64] {
        let m = self.components;
        &mut self.ghosts[slot].values[k * m..(k + 1) * m]
    }

    pub fn ghost_filled(&self, slot: usize) -> bool {
        self.ghosts[slot].filled
    }

    pub fn mark_ghost_filled(&mut self, slot: usize) {
        if self.stencil.velocities()[slot] != Velocity::Zero {
            self.ghosts[slot].filled = true;
        }
    }

    /// Invalidate every ghost strip; they must be refilled before streaming.
    pub fn clear_ghosts(&mut self) {
        for g in &mut self.ghosts {
            g.filled = false;
        }
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|d| d.iter().all(|v| v.is_finite()))
    }

    fn same_shape(&self, other: &DistributionField) -> bool {
        self.stencil == other.stencil
            && self.nx == other.nx
            && self.ny == other.ny
            && self.components == other.components
    }
}

/// Conserved moments over the interior cells.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentField {
    pub nx: usize,
    pub ny: usize,
    pub components: usize,
    pub values: Vec<f64>,
}

impl MomentField {
    pub fn zeros(nx: usize, ny: usize, components: usize) -> Self {
        MomentField { nx, ny, components, values: vec![0.0; nx * ny * components] }
    }

    pub fn cells(&self) -> usize {
        self.nx * self.ny
    }

    pub fn cell(&self, cell: usize) -> &[f64] {
        &self.values[cell * self.components..(cell + 1) * self.components]
    }

    pub fn cell_mut(&mut self, cell: usize) -> &mut [f64] {
        let m = self.components;
        &mut self.values[cell * m..(cell + 1) * m]
    }

    pub fn at(&self, ix: usize, iy: usize) -> &[f64] {
        self.cell(iy * self.nx + ix)
    }

    /// Scalar view: component `c` of every cell.
    pub fn component(&self, c: usize) -> Vec<f64> {
        self.values.iter().skip(c).step_by(self.components).copied().collect()
    }
}

/// Sum of the distributions over all velocities, cell by cell, in the fixed
/// velocity order of the stencil.
pub fn compute_moments(field: &DistributionField) -> MomentField {
    let mut out = MomentField::zeros(field.nx, field.ny, field.components);
    compute_moments_into(field, &mut out).expect("shapes built together");
    out
}

pub fn compute_moments_into(field: &DistributionField, out: &mut MomentField) -> Result<()> {
    if out.nx != field.nx || out.ny != field.ny || out.components != field.components {
        return Err(Error::Shape(format!(
            "moment field {}x{}x{} vs distribution field {}x{}x{}",
            out.nx, out.ny, out.components, field.nx, field.ny, field.components
        )));
    }
    let expected = field.cells() * field.components;
    if field.data.len() != field.stencil.q() || field.data.iter().any(|d| d.len() != expected) {
        return Err(Error::Shape("storage does not match stencil".into()));
    }
    out.values.copy_from_slice(&field.data[0]);
    for slot in field.data.iter().skip(1) {
        for (acc, v) in out.values.iter_mut().zip(slot) {
            *acc += v;
        }
    }
    Ok(())
}

/// Transport phase. Reads the post-collision field (with every ghost strip
/// filled) and writes the streamed field into `out`, whose ghosts are left
/// unfilled.
pub fn stream(post_collision: &DistributionField, out: &mut DistributionField) -> Result<()> {
    if !post_collision.same_shape(out) {
        return Err(Error::Shape("stream output has a different shape".into()));
    }
    let f = post_collision;
    let (nx, ny, m) = (f.nx, f.ny, f.components);
    let row = nx * m;
    for (slot, &v) in f.stencil.velocities().iter().enumerate() {
        if v != Velocity::Zero && !f.ghosts[slot].filled {
            return Err(Error::UnfilledGhost { velocity: v.symbol() });
        }
        let src = &f.data[slot];
        let ghost = &f.ghosts[slot].values;
        let dst = &mut out.data[slot];
        match v {
            Velocity::Zero => dst.copy_from_slice(src),
            Velocity::PlusX => {
                for iy in 0..ny {
                    let base = iy * row;
                    dst[base + m..base + row].copy_from_slice(&src[base..base + row - m]);
                    dst[base..base + m].copy_from_slice(&ghost[iy * m..(iy + 1) * m]);
                }
            }
            Velocity::MinusX => {
                for iy in 0..ny {
                    let base = iy * row;
                    dst[base..base + row - m].copy_from_slice(&src[base + m..base + row]);
                    dst[base + row - m..base + row].copy_from_slice(&ghost[iy * m..(iy + 1) * m]);
                }
            }
            Velocity::PlusY => {
                dst[row..].copy_from_slice(&src[..(ny - 1) * row]);
                dst[..row].copy_from_slice(ghost);
            }
            Velocity::MinusY => {
                dst[..(ny - 1) * row].copy_from_slice(&src[row..]);
                dst[(ny - 1) * row..].copy_from_slice(ghost);
            }
        }
    }
    out.clear_ghosts();
    Ok(())
}
