use super::flux::interface_state;
use super::{FarEnd, GridPipe, SimError};
use crate::euler::{conservative_to_primitive, physical_flux, Conserved, GasParams, GasState};

/// A single straight pipe without a junction, advanced by the same Godunov
/// scheme. Used as the reference for two-pipe networks: gluing a mirrored
/// pipe onto another gives the merged domain of a standard Riemann problem.
#[derive(Debug, Clone, PartialEq)]
pub struct LineDomain {
    pub params: GasParams,
    pub dx: f64,
    pub cells: Vec<Conserved>,
    pub left_end: FarEnd,
    pub right_end: FarEnd,
}

impl LineDomain {
    /// Domain `[-L_left, L_right]` whose left half is `left` read backwards
    /// with the velocity flipped.
    pub fn merged(left: &GridPipe, right: &GridPipe) -> Result<Self, SimError> {
        if left.spec.params != right.spec.params {
            return Err(SimError::Setup(
                "merged pipes must share gas parameters".into(),
            ));
        }
        if left.dx() != right.dx() {
            return Err(SimError::Setup(
                "merged pipes must share the cell width".into(),
            ));
        }
        let mut cells: Vec<Conserved> = left.cells.iter().rev().map(Conserved::mirrored).collect();
        cells.extend_from_slice(&right.cells);
        Ok(Self {
            params: right.spec.params,
            dx: right.dx(),
            cells,
            left_end: left.far_end,
            right_end: right.far_end,
        })
    }

    /// Inverse of [`merged`](Self::merged): cells of the left pipe (in pipe
    /// order, mirrored back) and of the right pipe.
    pub fn split(&self, left_cells: usize) -> (Vec<Conserved>, Vec<Conserved>) {
        let left = self.cells[..left_cells]
            .iter()
            .rev()
            .map(Conserved::mirrored)
            .collect();
        (left, self.cells[left_cells..].to_vec())
    }

    pub fn primitives(&self) -> Result<Vec<GasState>, SimError> {
        self.cells
            .iter()
            .enumerate()
            .map(|(j, c)| {
                conservative_to_primitive(c, &self.params).map_err(|source| SimError::InvalidCell {
                    step: 0,
                    time: 0.0,
                    pipe: "line".into(),
                    cell: j,
                    source,
                })
            })
            .collect()
    }

    pub fn advance(&mut self, dt: f64) -> Result<(), SimError> {
        let states = self.primitives()?;
        let m = states.len();
        let ghost = |end: FarEnd, s: &GasState| match end {
            FarEnd::Outflow => *s,
            FarEnd::Wall => s.mirrored(),
        };
        let riemann = |interface, l: &GasState, r: &GasState| {
            interface_state(l, r, &self.params)
                .map(|y| physical_flux(&y, &self.params))
                .map_err(|source| SimError::Riemann {
                    step: 0,
                    time: 0.0,
                    pipe: "line".into(),
                    interface,
                    source,
                })
        };
        let mut faces = Vec::with_capacity(m + 1);
        faces.push(riemann(0, &ghost(self.left_end, &states[0]), &states[0])?);
        for j in 1..m {
            faces.push(riemann(j, &states[j - 1], &states[j])?);
        }
        faces.push(riemann(
            m,
            &states[m - 1],
            &ghost(self.right_end, &states[m - 1]),
        )?);
        let ratio = dt / self.dx;
        for (j, c) in self.cells.iter_mut().enumerate() {
            *c = *c - ratio * (faces[j + 1] - faces[j]);
        }
        Ok(())
    }
}
