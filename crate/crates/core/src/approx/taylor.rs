//! Multi-index enumeration and local Taylor coefficients.
//!
//! For a cell center `n/N` the polynomial term coefficients are
//! `c_{n,s} = ∂^s κ(n/N) / s!`, one per output channel, over all
//! multi-indices with `‖s‖₁ ≤ r`. There are at most `(r+1)·d^r` of them.

use crate::error::Result;

use super::{GridIndex, TargetFunction};

/// All multi-indices `s ∈ N^d` with `‖s‖₁ ≤ r`, in graded order (total
/// degree ascending), starting with the zero index.
pub fn multi_indices(d: usize, r: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = vec![0usize; d];
    for degree in 0..=r {
        emit_with_degree(d, degree, 0, &mut current, &mut out);
    }
    out
}

fn emit_with_degree(
    d: usize,
    remaining: usize,
    pos: usize,
    current: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if pos == d {
        if remaining == 0 {
            out.push(current.clone());
        }
        return;
    }
    if pos == d - 1 {
        current[pos] = remaining;
        out.push(current.clone());
        current[pos] = 0;
        return;
    }
    for v in 0..=remaining {
        current[pos] = v;
        emit_with_degree(d, remaining - v, pos + 1, current, out);
    }
    current[pos] = 0;
}

/// `s! = Π s_i!`.
pub fn multi_factorial(s: &[usize]) -> f64 {
    s.iter()
        .map(|&si| (1..=si).map(|v| v as f64).product::<f64>())
        .product()
}

/// Taylor coefficient table for one cell: `coeffs[term][channel]`.
#[derive(Debug, Clone)]
pub struct TaylorTable {
    pub indices: Vec<Vec<usize>>,
    pub coeffs: Vec<Vec<f64>>,
}

impl TaylorTable {
    /// Coefficient of term `s` for output channel `i`.
    pub fn coefficient(&self, term: usize, channel: usize) -> f64 {
        self.coeffs[term][channel]
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs
            .iter()
            .flat_map(|c| c.iter())
            .fold(0.0_f64, |m, c| m.max(c.abs()))
    }
}

/// Compute `c_{n,s} = ∂^s κ(n/N)/s!` for all `‖s‖₁ ≤ r`.
pub fn taylor_coefficients(f: &TargetFunction, n: &GridIndex) -> Result<TaylorTable> {
    let center = n.center();
    let indices = multi_indices(f.dim_in, f.smoothness_r);
    let coeffs = indices
        .iter()
        .map(|s| {
            let derivs = f.derivative(s, &center)?;
            let fact = multi_factorial(s);
            Ok(derivs.into_iter().map(|v| v / fact).collect())
        })
        .collect::<Result<Vec<Vec<f64>>>>()?;
    Ok(TaylorTable { indices, coeffs })
}

/// Evaluate the local polynomial `Σ_s c_s (x − n/N)^s` for every channel.
pub fn taylor_polynomial(table: &TaylorTable, n: &GridIndex, x: &[f64]) -> Vec<f64> {
    let center = n.center();
    let channels = table.coeffs.first().map_or(0, |c| c.len());
    let mut out = vec![0.0; channels];
    for (s, coeffs) in table.indices.iter().zip(&table.coeffs) {
        let monomial: f64 = s
            .iter()
            .zip(x.iter().zip(&center))
            .map(|(&si, (&xi, &ci))| (xi - ci).powi(si as i32))
            .product();
        for (o, c) in out.iter_mut().zip(coeffs) {
            *o += c * monomial;
        }
    }
    out
}
