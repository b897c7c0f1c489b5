use std::sync::Arc;

use super::{Construction, MbicParams, Message, Part, WriteBlock, M};
use crate::error::{Error, Result};
use crate::galois::Elem;
use crate::linalg::Matrix;
use crate::rscodes::{CyclicInterval, Domain, RsCode};

/// Constituent RS generator occupying one cell of the block layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Constituent {
    G1,
    G2,
    G3,
    G4,
    GI,
    GE,
    GF,
    /// Row-wise sum of the `G4` and `G3` generators.
    G4PlusG3,
}

/// One nonzero cell: the rows of `v_{sub_unit, part}` carry `constituent` in `column`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cell {
    pub sub_unit: usize,
    pub part: Part,
    pub column: usize,
    pub constituent: Constituent,
}

/// The `3k x 3n` generator matrix together with its block structure.
#[derive(Debug, Clone)]
pub struct Layout {
    params: MbicParams,
    domain: Arc<Domain>,
    cells: Vec<Cell>,
    matrix: Matrix,
}

impl Layout {
    /// Builds the generator for whichever construction `params` names.
    pub fn new(params: MbicParams) -> Result<Self> {
        let domain = Arc::new(Domain::new(params.field().clone(), params.n())?);
        let cells = match params.construction() {
            Construction::C3 => c3_cells(),
            Construction::K3 => k3_cells(),
        };
        let mut layout = Layout {
            matrix: Matrix::zeros(params.message_len(), params.block_len()),
            params,
            domain,
            cells,
        };
        layout.fill_matrix();
        Ok(layout)
    }

    pub fn build_c3(params: MbicParams) -> Result<Self> {
        if params.construction() != Construction::C3 {
            return Err(Error::InvalidParams("parameters name K3, not C3".into()));
        }
        Self::new(params)
    }

    pub fn build_k3(params: MbicParams) -> Result<Self> {
        if params.construction() != Construction::K3 {
            return Err(Error::InvalidParams("parameters name C3, not K3".into()));
        }
        Self::new(params)
    }

    pub fn params(&self) -> &MbicParams {
        &self.params
    }

    pub fn domain(&self) -> &Arc<Domain> {
        &self.domain
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn generator(&self) -> &Matrix {
        &self.matrix
    }

    /// Spectral powers a constituent occupies within a sub-block.
    pub fn constituent_support(&self, c: Constituent) -> Vec<CyclicInterval> {
        let (n, k, t, s) = (
            self.params.n(),
            self.params.k() as i64,
            self.params.t(),
            self.params.s(),
        );
        let iv = |start: i64, len: usize| CyclicInterval::with_len(start, len, n);
        let (ti, si) = (t as i64, s as i64);
        match (self.params.construction(), c) {
            (Construction::C3, Constituent::G1) => vec![iv(0, t)],
            (Construction::C3, Constituent::G2) => vec![iv(ti, t)],
            (Construction::C3, Constituent::GI) => vec![iv(2 * ti, k as usize - 2 * t)],
            (Construction::C3, Constituent::GE) => vec![iv(k, t)],
            (Construction::K3, Constituent::G1) => vec![iv(0, s)],
            (Construction::K3, Constituent::G2) => vec![iv(si, s)],
            (Construction::K3, Constituent::G3) => vec![iv(2 * si, s)],
            (Construction::K3, Constituent::G4) => vec![iv(3 * si, s)],
            (Construction::K3, Constituent::G4PlusG3) => vec![iv(3 * si, s), iv(2 * si, s)],
            (Construction::K3, Constituent::GI) => vec![iv(4 * si, k as usize - 4 * s)],
            (Construction::K3, Constituent::GE) => vec![iv(k, s)],
            (Construction::K3, Constituent::GF) => vec![iv(k + si, s)],
            (construction, c) => panic!("{construction} has no constituent {c:?}"),
        }
    }

    /// The constituent RS code (for `G4+G3`, the span of both ranges).
    pub fn constituent_code(&self, c: Constituent) -> RsCode {
        let support = match c {
            Constituent::G4PlusG3 => {
                let s = self.params.s();
                CyclicInterval::with_len(2 * s as i64, 2 * s, self.params.n())
            }
            _ => self.constituent_support(c)[0],
        };
        RsCode::from_support(self.domain.clone(), support)
    }

    /// Code seen by a single sub-block: spectrum `[0 : k+t-1]`, roots `[k+t : n-1]`.
    pub fn sub_block_code(&self) -> RsCode {
        RsCode::from_support(
            self.domain.clone(),
            CyclicInterval::with_len(0, self.params.k() + self.params.t(), self.params.n()),
        )
    }

    fn fill_matrix(&mut self) {
        let n = self.params.n();
        for cell in self.cells.clone() {
            let rows = self.params.message_range(cell.sub_unit, cell.part);
            let cols = cell.column * n;
            for support in self.constituent_support(cell.constituent) {
                for (l, row) in rows.clone().enumerate() {
                    let power = (support.start() + l) % n;
                    let out = &mut self.matrix.row_mut(row)[cols..cols + n];
                    self.domain.add_monomial(out, power, 1);
                }
            }
        }
    }

    /// `v * G`.
    pub fn encode(&self, message: &Message) -> Result<WriteBlock> {
        if message.k() != self.params.k() {
            return Err(Error::LengthMismatch {
                expected: self.params.k(),
                actual: message.k(),
            });
        }
        let word = self.matrix.left_mul(self.params.field(), message.symbols());
        WriteBlock::from_symbols(self.params.n(), word)
    }

    /// Encodes raw symbols (length `3k`).
    pub fn encode_symbols(&self, symbols: &[Elem]) -> Result<WriteBlock> {
        self.encode(&Message::from_symbols(self.params.k(), symbols.to_vec())?)
    }

    /// Cells feeding `column` through `constituent`.
    pub fn feeders(&self, column: usize, constituent: Constituent) -> Vec<Cell> {
        self.cells
            .iter()
            .filter(|c| c.column == column && c.constituent == constituent)
            .copied()
            .collect()
    }
}

fn cell(sub_unit: usize, part: Part, offset: usize, constituent: Constituent) -> Cell {
    Cell {
        sub_unit,
        part,
        column: (sub_unit + offset) % M,
        constituent,
    }
}

fn c3_cells() -> Vec<Cell> {
    use Constituent::*;
    (0..M)
        .flat_map(|j| {
            [
                cell(j, Part::Info, 0, GI),
                cell(j, Part::P1, 0, G1),
                cell(j, Part::P1, 2, GE),
                cell(j, Part::P2, 0, G2),
                cell(j, Part::P2, 1, GE),
            ]
        })
        .collect()
}

fn k3_cells() -> Vec<Cell> {
    use Constituent::*;
    (0..M)
        .flat_map(|j| {
            [
                cell(j, Part::Info, 0, GI),
                cell(j, Part::P1, 0, G1),
                cell(j, Part::P1, 1, GF),
                cell(j, Part::P2, 0, G2),
                cell(j, Part::P2, 1, GE),
                cell(j, Part::P3, 0, G3),
                cell(j, Part::P3, 2, GE),
                cell(j, Part::P4, 0, G4PlusG3),
                cell(j, Part::P4, 2, GE),
            ]
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::galois::Field;

    fn layout(w: u32, n: usize, k: usize, t: usize, c: Construction) -> Layout {
        let f = Arc::new(Field::binary(w).unwrap());
        Layout::new(MbicParams::new(f, n, k, t, c).unwrap()).unwrap()
    }

    #[test]
    fn shapes_and_rank() {
        let p1 = layout(3, 7, 3, 1, Construction::C3);
        assert_eq!((p1.generator().rows(), p1.generator().cols()), (9, 21));
        assert_eq!(p1.generator().rank(p1.params().field()), 9);
        let p3 = layout(4, 15, 6, 2, Construction::K3);
        assert_eq!(p3.generator().rank(p3.params().field()), 18);
    }

    #[test]
    fn info_rows_stay_in_own_sub_block() {
        let l = layout(3, 7, 3, 1, Construction::C3);
        let p = l.params().clone();
        let mut m = Message::zeros(3);
        m.part_mut(&p, 0, Part::Info).copy_from_slice(&[5]);
        let w = l.encode(&m).unwrap();
        let wt = w.block_weights();
        assert!(wt[0] >= 7 && wt[1] == 0 && wt[2] == 0, "{wt:?}");
    }

    #[test]
    fn c3_shared_ge_cancels_in_right_sub_block() {
        let l = layout(3, 7, 3, 1, Construction::C3);
        let p = l.params().clone();
        let f = p.field().clone();
        let mut m = Message::zeros(3);
        m.part_mut(&p, 0, Part::P1)[0] = 3;
        m.part_mut(&p, 1, Part::P2)[0] = f.neg(3);
        let w = l.encode(&m).unwrap();
        assert!(w.sub_block(2).iter().all(|&x| x == 0));
        assert!(w.block_weights()[0] > 0 && w.block_weights()[1] > 0);
    }

    #[test]
    fn k3_g3_g4_cancellation_leaves_g4_only() {
        let l = layout(4, 15, 6, 2, Construction::K3);
        let p = l.params().clone();
        let f = p.field().clone();
        let mut m = Message::zeros(6);
        m.part_mut(&p, 0, Part::P3)[0] = f.neg(9);
        m.part_mut(&p, 0, Part::P4)[0] = 9;
        let w = l.encode(&m).unwrap();
        assert_eq!(&w.block_weights()[1..], &[0, 0]);
        let g4 = l.constituent_code(Constituent::G4).encode(&[9]).unwrap();
        assert_eq!(w.sub_block(0), &g4[..]);
    }

    #[test]
    fn k3_gf_reaches_next_sub_block() {
        let l = layout(4, 15, 6, 2, Construction::K3);
        let p = l.params().clone();
        let mut m = Message::zeros(6);
        m.part_mut(&p, 1, Part::P1)[0] = 4;
        let w = l.encode(&m).unwrap();
        assert!(w.block_weights()[2] > 0);
        assert_eq!(l.feeders(2, Constituent::GF).len(), 1);
        assert_eq!(l.feeders(2, Constituent::GF)[0].sub_unit, 1);
    }
}
