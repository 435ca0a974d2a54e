//! First homology of the unit tangent bundle through its surgery
//! presentation: Dehn fillings of a three-component Hopf-type link with
//! slopes `p-1`, `q-1`, `r-1`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::group_graph::TriangleParams;

/// Integer matrix, row-major.
pub type IntMatrix = Vec<Vec<BigInt>>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurgeryPresentation {
    pub components: [char; 3],
    /// Filling slopes; `None` keeps the component removed.
    pub slopes: [Option<i64>; 3],
    /// Off-diagonal linking numbers.
    pub pairwise_linking: [[i64; 3]; 3],
}

/// Off-diagonal linking sign. With `-1`, `(2,3,7)` is a homology sphere and
/// the order of `H1` is `|pqr - pq - qr - rp|`; `+1` gives order 5 there.
pub const LINK_SIGN: i64 = -1;

pub fn surgery_presentation(params: &TriangleParams) -> SurgeryPresentation {
    let mut link = [[LINK_SIGN; 3]; 3];
    for (i, row) in link.iter_mut().enumerate() {
        row[i] = 0;
    }
    SurgeryPresentation {
        components: ['A', 'B', 'C'],
        slopes: [
            Some(params.p as i64 - 1),
            Some(params.q as i64 - 1),
            params.r.map(|r| r as i64 - 1),
        ],
        pairwise_linking: link,
    }
}

/// Relation matrix: one row per filled component, one column per component.
pub fn linking_matrix(pres: &SurgeryPresentation) -> IntMatrix {
    (0..3)
        .filter_map(|i| {
            pres.slopes[i].map(|s| {
                (0..3)
                    .map(|j| BigInt::from(if i == j { s } else { pres.pairwise_linking[i][j] }))
                    .collect()
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SmithForm {
    /// Diagonal entries, non-negative, each dividing the next up to zeros.
    pub diagonal: Vec<BigInt>,
    pub u: IntMatrix,
    pub v: IntMatrix,
}

pub fn identity(n: usize) -> IntMatrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect()
}

pub fn mat_mul(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).fold(BigInt::zero(), |acc, k| acc + &row[k] * &b[k][j]))
                .collect()
        })
        .collect()
}

/// Determinant by fraction-free elimination.
pub fn determinant(m: &IntMatrix) -> BigInt {
    let n = m.len();
    let mut a = m.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * a[n - 1][n - 1].clone()
}

fn swap_cols(m: &mut IntMatrix, i: usize, j: usize) {
    for row in m.iter_mut() {
        row.swap(i, j);
    }
}

/// `row[dst] -= f * row[src]`.
fn row_axpy(m: &mut IntMatrix, dst: usize, src: usize, f: &BigInt) {
    let src_row = m[src].clone();
    for (x, s) in m[dst].iter_mut().zip(&src_row) {
        *x -= f * s;
    }
}

fn col_axpy(m: &mut IntMatrix, dst: usize, src: usize, f: &BigInt) {
    for row in m.iter_mut() {
        let s = row[src].clone();
        row[dst] -= f * s;
    }
}

/// Smith normal form with unimodular `U`, `V` such that `U M V = D`.
pub fn smith_normal_form(m: &IntMatrix) -> SmithForm {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut a = m.clone();
    let mut u = identity(rows);
    let mut v = identity(cols);
    for t in 0..rows.min(cols) {
        loop {
            // Smallest nonzero entry of the remaining block becomes the pivot.
            let pivot = (t..rows)
                .flat_map(|i| (t..cols).map(move |j| (i, j)))
                .filter(|&(i, j)| !a[i][j].is_zero())
                .min_by(|&(i, j), &(k, l)| a[i][j].abs().cmp(&a[k][l].abs()));
            let Some((pi, pj)) = pivot else { break };
            a.swap(t, pi);
            u.swap(t, pi);
            swap_cols(&mut a, t, pj);
            swap_cols(&mut v, t, pj);
            let mut clean = true;
            for i in t + 1..rows {
                let f = a[i][t].div_floor(&a[t][t]);
                row_axpy(&mut a, i, t, &f);
                row_axpy(&mut u, i, t, &f);
                clean &= a[i][t].is_zero();
            }
            for j in t + 1..cols {
                let f = a[t][j].div_floor(&a[t][t]);
                col_axpy(&mut a, j, t, &f);
                col_axpy(&mut v, j, t, &f);
                clean &= a[t][j].is_zero();
            }
            if !clean {
                continue;
            }
            // The pivot must divide the rest; otherwise fold in a bad row.
            let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !a[i][j].is_multiple_of(&a[t][t])));
            match bad {
                Some(i) => {
                    let one = BigInt::from(-1);
                    row_axpy(&mut a, t, i, &one);
                    row_axpy(&mut u, t, i, &one);
                }
                None => break,
            }
        }
        if a[t][t].is_negative() {
            for x in a[t].iter_mut() {
                *x = -x.clone();
            }
            for x in u[t].iter_mut() {
                *x = -x.clone();
            }
        }
    }
    let diagonal = (0..rows.min(cols)).map(|i| a[i][i].clone()).collect();
    SmithForm { diagonal, u, v }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbelianGroupDesc {
    pub invariant_factors: Vec<BigInt>,
    pub free_rank: usize,
}

impl AbelianGroupDesc {
    /// Order of the group, `None` when infinite.
    pub fn order(&self) -> Option<BigInt> {
        if self.free_rank > 0 {
            None
        } else {
            Some(self.invariant_factors.iter().product())
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.invariant_factors.is_empty()
    }
}

impl fmt::Display for AbelianGroupDesc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self
            .invariant_factors
            .iter()
            .map(|d| format!("Z/{d}"))
            .collect();
        if self.free_rank == 1 {
            parts.push("Z".into());
        } else if self.free_rank > 1 {
            parts.push(format!("Z^{}", self.free_rank));
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// Cokernel of a relation matrix whose columns are generators.
pub fn cokernel(m: &IntMatrix) -> AbelianGroupDesc {
    let cols = m.first().map_or(0, Vec::len);
    let snf = smith_normal_form(m);
    let nonzero: Vec<BigInt> = snf.diagonal.into_iter().filter(|d| !d.is_zero()).collect();
    AbelianGroupDesc {
        free_rank: cols - nonzero.len(),
        invariant_factors: nonzero.into_iter().filter(|d| !d.is_one()).collect(),
    }
}

pub fn h1(pres: &SurgeryPresentation) -> AbelianGroupDesc {
    cokernel(&linking_matrix(pres))
}

/// `|pqr - pq - qr - rp|`, the order of `H1` for finite `r`.
pub fn euler_order(params: &TriangleParams) -> Option<BigInt> {
    let r = BigInt::from(params.r?);
    let p = BigInt::from(params.p);
    let q = BigInt::from(params.q);
    Some((&p * &q * &r - &p * &q - &q * &r - &r * &p).abs())
}
