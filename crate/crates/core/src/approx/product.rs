//! The multiplication gadget: a ReLU network approximating
//! `x_1 · x_2 · … · x_d` on `[−1, 1]^d`.
//!
//! Pairwise products use the polarization identity
//!
//! ```text
//! u·v = (|u+v|/2)² − (|u−v|/2)²
//! ```
//!
//! with each square approximated by the sawtooth construction: `f_k(t)` is
//! the piecewise-linear interpolant of `t²` on the dyadic grid `2^{-k}`,
//! obtained by subtracting scaled sawtooth iterates from `t`, and satisfies
//! `|f_k(t) − t²| ≤ 2^{-2k-2}` on `[0, 1]`. The `d`-fold product folds a
//! balanced binary tree of pairwise gadgets with range clamping to `[−1, 1]`
//! between levels.
//!
//! Exact-zero behaviour matters: the assembled polynomial terms must vanish
//! off their partition cell. With polarization, a zero factor makes the two
//! square chains bitwise identical, and every combining row interleaves the
//! two chains in adjacent columns with opposite coefficients, so the dense
//! matvec cancels them exactly. Zero inputs therefore produce an exactly
//! zero output, in floating point, at every tree level.

use crate::error::{Error, Result};
use crate::net::ReluNetwork;

use super::builder::{Expr, NetBuilder};

/// State of one square chain `f_k(t)` while its layers are emitted.
struct SquareChain {
    /// `w_{j-1}` as an expression over the current layer.
    w: Expr,
    /// `f_{j-1}(t)` as an expression over the current layer.
    acc: Expr,
}

/// `clamp(t) = max(−1, min(1, t)) = σ(t) − σ(t−1) − σ(−t) + σ(−t−1)`.
///
/// This four-unit form has no constant offset, so a gadget that produced an
/// exact zero is represented by four exactly-zero units.
fn clamp_units(p: &Expr) -> Vec<Expr> {
    vec![
        p.clone(),
        p.plus_const(-1.0),
        p.negated(),
        p.negated().plus_const(-1.0),
    ]
}

fn clamp_expr(first_unit: usize) -> Expr {
    let d1 = Expr::unit(first_unit);
    let d2 = Expr::unit(first_unit + 1);
    let d3 = Expr::unit(first_unit + 2);
    let d4 = Expr::unit(first_unit + 3);
    d1.minus(&d2).minus(&d3).plus(&d4)
}

/// Build the product network for `d ≥ 2` inputs at accuracy parameter `k`.
///
/// Guarantees on `[−1,1]^d`: max error ≤ `3d·2^{−2k}`; exact zero whenever a
/// coordinate is zero; width ≤ `(6k+3)d`; depth ≤ `(k+1)d`.
pub fn product_network(d: usize, k: u32) -> Result<ReluNetwork> {
    if d < 2 {
        return Err(Error::InvalidValue(format!(
            "product network needs d >= 2, got {d}"
        )));
    }
    if k == 0 {
        // The k = 0 error budget 3d·2⁰ ≥ 2 is met by the zero map, which is
        // also exactly zero on zero inputs.
        let zero = crate::net::ReluLayer::zeros(1, d);
        return ReluNetwork::new(vec![zero]);
    }
    let mut builder = NetBuilder::new(d);
    let mut channels: Vec<Expr> = (0..d).map(Expr::unit).collect();
    while channels.len() > 1 {
        channels = emit_tree_level(&mut builder, channels, k);
    }
    builder.finish(vec![channels.remove(0)])
}

/// Emit one level of the product tree onto `builder`: pair up channels,
/// multiply each pair, carry an odd leftover. If more than one channel
/// results, gadget outputs are clamped to [−1, 1]. Returns the next level's
/// channels as expressions over the builder's new last layer.
pub(crate) fn emit_tree_level(builder: &mut NetBuilder, channels: Vec<Expr>, k: u32) -> Vec<Expr> {
    debug_assert!(k >= 1 && channels.len() >= 2);
    let pairs = channels.len() / 2;
    let carry = channels.len() % 2 == 1;
    let result_count = pairs + usize::from(carry);

    // Layer A: four units per gadget, splice pair per carried channel.
    let mut a_units = Vec::new();
    for p in 0..pairs {
        let (u, v) = (&channels[2 * p], &channels[2 * p + 1]);
        let sum = u.plus(v);
        let dif = u.minus(v);
        a_units.extend([sum.clone(), sum.negated(), dif.clone(), dif.negated()]);
    }
    if carry {
        let c = channels.last().unwrap();
        a_units.extend([c.clone(), c.negated()]);
    }
    builder.push_layer(a_units);

    // Square chains: start from t± = half the absolute values.
    let mut chains: Vec<SquareChain> = Vec::with_capacity(2 * pairs);
    for p in 0..pairs {
        let base = 4 * p;
        let t_plus = Expr::unit(base).plus(&Expr::unit(base + 1)).scaled(0.5);
        let t_minus = Expr::unit(base + 2).plus(&Expr::unit(base + 3)).scaled(0.5);
        chains.push(SquareChain {
            w: t_plus.clone(),
            acc: t_plus,
        });
        chains.push(SquareChain {
            w: t_minus.clone(),
            acc: t_minus,
        });
    }
    let mut carry_pair = carry.then(|| (Expr::unit(4 * pairs), Expr::unit(4 * pairs + 1)));

    // Saw layers S_1..S_k. Unit layout per gadget:
    // [e1⁺, e1⁻, e2⁺, e2⁻, acc⁺, acc⁻]; carries keep identity pairs.
    // Cancelling twins sit in adjacent columns throughout.
    for j in 1..=k as i32 {
        let c = 0.5_f64.powi(j);
        let mut units = Vec::new();
        for p in 0..pairs {
            let (plus, minus) = (&chains[2 * p], &chains[2 * p + 1]);
            units.extend([
                plus.w.plus_const(-c),
                minus.w.plus_const(-c),
                plus.w.negated().plus_const(c),
                minus.w.negated().plus_const(c),
                plus.acc.clone(),
                minus.acc.clone(),
            ]);
        }
        if let Some((cp, cm)) = &carry_pair {
            units.extend([cp.clone(), cm.clone()]);
        }
        builder.push_layer(units);
        for p in 0..pairs {
            let base = 6 * p;
            for (offset, which) in [(0usize, 2 * p), (1usize, 2 * p + 1)] {
                let e1 = Expr::unit(base + offset);
                let e2 = Expr::unit(base + 2 + offset);
                let a = Expr::unit(base + 4 + offset);
                let w = e1.plus(&e2).negated().plus_const(c);
                let chain = &mut chains[which];
                chain.acc = a.minus(&w.scaled(c));
                chain.w = w;
            }
        }
        if carry_pair.is_some() {
            let base = 6 * pairs;
            carry_pair = Some((Expr::unit(base), Expr::unit(base + 1)));
        }
    }

    // Product expressions over the last saw layer.
    let mut outputs: Vec<Expr> = (0..pairs)
        .map(|p| chains[2 * p].acc.minus(&chains[2 * p + 1].acc))
        .collect();
    if let Some((cp, cm)) = &carry_pair {
        outputs.push(cp.minus(cm));
    }

    if result_count == 1 {
        return outputs;
    }

    // Clamp layer between levels: four units per gadget output, identity
    // pairs for carries.
    let mut units = Vec::new();
    for out in outputs.iter().take(pairs) {
        units.extend(clamp_units(out));
    }
    if carry_pair.is_some() {
        let c = outputs.last().unwrap();
        units.extend([c.clone(), c.negated()]);
    }
    builder.push_layer(units);

    let mut next: Vec<Expr> = (0..pairs).map(|p| clamp_expr(4 * p)).collect();
    if carry_pair.is_some() {
        let base = 4 * pairs;
        next.push(Expr::unit(base).minus(&Expr::unit(base + 1)));
    }
    next
}

/// Reference sawtooth square approximation `f_k(t)` on `[0, 1]`, used as an
/// independent oracle in tests.
pub fn sawtooth_square(t: f64, k: u32) -> f64 {
    let mut g = t;
    let mut acc = t;
    for j in 1..=k as i32 {
        g = 1.0 - (2.0 * g - 1.0).abs(); // sawtooth iterate on [0, 1]
        acc -= g / 4.0_f64.powi(j);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from;
    use rand::Rng;

    #[test]
    fn sawtooth_square_error_bound() {
        for k in [1u32, 3, 6] {
            let cap = 0.25 * 0.25_f64.powi(k as i32);
            for i in 0..=1000 {
                let t = i as f64 / 1000.0;
                assert!((sawtooth_square(t, k) - t * t).abs() <= cap + 1e-15);
            }
        }
    }

    #[test]
    fn pairwise_error_bound() {
        // d = 2: error ≤ 2·2^{-2k-2} = 2^{-2k-1}, well under the 6·2^{-2k} cap.
        for k in [2u32, 4, 6] {
            let net = product_network(2, k).unwrap();
            let cap = 0.5 * 0.25_f64.powi(k as i32);
            let mut rng = rng_from(100 + u64::from(k));
            for _ in 0..5000 {
                let x = rng.random_range(-1.0..1.0);
                let y = rng.random_range(-1.0..1.0);
                let m = net.evaluate(&[x, y]).unwrap()[0];
                assert!(
                    (m - x * y).abs() <= cap + 1e-12,
                    "k={k}: |{m} - {}| > {cap}",
                    x * y
                );
            }
        }
    }

    #[test]
    fn matches_sawtooth_oracle() {
        // The network's pairwise product equals f_k(t+) − f_k(t−) exactly up
        // to float noise.
        let k = 5;
        let net = product_network(2, k).unwrap();
        let mut rng = rng_from(7);
        for _ in 0..2000 {
            let x: f64 = rng.random_range(-1.0..1.0);
            let y = rng.random_range(-1.0..1.0);
            let want =
                sawtooth_square((x + y).abs() / 2.0, k) - sawtooth_square((x - y).abs() / 2.0, k);
            let got = net.evaluate(&[x, y]).unwrap()[0];
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn exact_zero_on_zero_coordinates() {
        for (d, k) in [(2usize, 4u32), (3, 3), (4, 5), (5, 2)] {
            let net = product_network(d, k).unwrap();
            let mut rng = rng_from(11 + d as u64);
            for _ in 0..500 {
                let mut x: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
                x[rng.random_range(0..d)] = 0.0;
                let out = net.evaluate(&x).unwrap()[0];
                assert_eq!(out, 0.0, "d={d} k={k} x={x:?}");
            }
        }
    }

    #[test]
    fn tree_error_bound_d3() {
        let k = 4;
        let net = product_network(3, k).unwrap();
        let cap = 9.0 * 0.25_f64.powi(k as i32);
        let mut rng = rng_from(13);
        for _ in 0..5000 {
            let x: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();
            let truth: f64 = x.iter().product();
            let m = net.evaluate(&x).unwrap()[0];
            assert!((m - truth).abs() <= cap, "{m} vs {truth}");
        }
    }

    #[test]
    fn structural_caps() {
        for (d, k) in [
            (2usize, 4u32),
            (2, 8),
            (3, 4),
            (3, 6),
            (3, 8),
            (4, 6),
            (5, 4),
            (8, 4),
        ] {
            let net = product_network(d, k).unwrap();
            let width_cap = (6 * k as usize + 3) * d;
            let depth_cap = (k as usize + 1) * d;
            let budget_cap = (d as f64).powi(7) * (2.0 * d as f64).powi(k as i32 + 1);
            assert!(
                net.width() <= width_cap,
                "d={d} k={k}: width {}",
                net.width()
            );
            assert!(
                net.depth() <= depth_cap,
                "d={d} k={k}: depth {}",
                net.depth()
            );
            assert!(
                net.norm_budget().value() <= budget_cap,
                "d={d} k={k}: budget {:.3e} cap {budget_cap:.3e}",
                net.norm_budget().value()
            );
        }
    }

    #[test]
    fn k_zero_is_trivially_within_contract() {
        let net = product_network(3, 0).unwrap();
        assert_eq!(net.evaluate(&[0.9, -0.8, 0.7]).unwrap()[0], 0.0);
        assert!(net.depth() <= 3);
    }

    #[test]
    fn rejects_d_below_two() {
        assert!(product_network(1, 3).is_err());
    }
}
