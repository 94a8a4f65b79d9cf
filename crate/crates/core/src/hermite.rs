//! Hermite polynomials and the piecewise Hermite wavelet basis.
//!
//! Exact coefficients are kept as big integers: the coefficients of `H_n`
//! leave the `i64` range around `n = 30`. Floating-point evaluation always
//! goes through the three-term recurrence instead of the stored
//! coefficients, which is far better conditioned for large `|x|`.

use std::f64::consts::PI;

use ndarray::Array2;
use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Largest degree accepted by [`hermite_coeffs`].
pub const MAX_DEGREE: u32 = 64;

/// Exact integer coefficients of a polynomial, ascending powers of `x`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyCoeffs {
    coeffs: Vec<BigInt>,
}

impl PolyCoeffs {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.len() > 1 && coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(BigInt::zero());
        }
        Self { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Coefficient of `x^power`, zero past the degree.
    pub fn coeff(&self, power: usize) -> BigInt {
        self.coeffs.get(power).cloned().unwrap_or_default()
    }

    /// Exact formal derivative.
    pub fn derivative(&self) -> PolyCoeffs {
        if self.coeffs.len() == 1 {
            return PolyCoeffs::new(vec![BigInt::zero()]);
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(p, c)| c * BigInt::from(p))
            .collect();
        PolyCoeffs::new(coeffs)
    }

    /// Horner evaluation in `f64`. Loses precision for large degrees; use
    /// [`hermite_eval`] for Hermite polynomials.
    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + c.to_f64().unwrap_or(f64::NAN))
    }
}

/// Coefficients of the physicists' Hermite polynomial `H_n`, built with
/// `H_{n+1} = 2x H_n - 2n H_{n-1}` from `H_0 = 1`, `H_1 = 2x`.
pub fn hermite_coeffs(n: u32) -> Result<PolyCoeffs> {
    if n > MAX_DEGREE {
        return Err(Error::DegreeOutOfRange(n));
    }
    let mut prev: Vec<BigInt> = vec![BigInt::from(1)];
    if n == 0 {
        return Ok(PolyCoeffs::new(prev));
    }
    let mut cur: Vec<BigInt> = vec![BigInt::zero(), BigInt::from(2)];
    for k in 1..n {
        let mut next = vec![BigInt::zero(); cur.len() + 1];
        for (p, c) in cur.iter().enumerate() {
            next[p + 1] += c * 2;
        }
        let scale = BigInt::from(2 * k);
        for (p, c) in prev.iter().enumerate() {
            next[p] -= c * &scale;
        }
        prev = std::mem::replace(&mut cur, next);
    }
    Ok(PolyCoeffs::new(cur))
}

/// `H_n(x)` by the three-term recurrence in floating point.
pub fn hermite_eval(n: u32, x: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 2.0 * x;
    for k in 1..n {
        let next = 2.0 * x * cur - 2.0 * f64::from(k) * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Gauss–Hermite nodes and weights for `∫ e^{-x²} g(x) dx`, exact for
/// polynomial `g` of degree `≤ 2·order − 1`. Nodes ascend.
///
/// Newton iteration on the orthonormal recurrence with the usual asymptotic
/// starting guesses for the largest roots.
pub fn gauss_hermite(order: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if order == 0 {
        return Err(Error::InvalidParameter("quadrature order must be positive".into()));
    }
    const EPS: f64 = 1e-15;
    const MAX_ITER: usize = 100;
    let pim4 = PI.powf(-0.25);
    let n = order;
    let nf = n as f64;
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let half = n.div_ceil(2);
    let mut z = 0.0_f64;
    for i in 0..half {
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-0.16667),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * x[0],
            3 => 1.91 * z - 0.91 * x[1],
            _ => 2.0 * z - x[i - 2],
        };
        let mut pp = 0.0;
        let mut converged = false;
        for _ in 0..MAX_ITER {
            let mut p1 = pim4;
            let mut p2 = 0.0;
            for j in 1..=n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * (2.0 / jf).sqrt() * p2 - ((jf - 1.0) / jf).sqrt() * p3;
            }
            pp = (2.0 * nf).sqrt() * p2;
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() <= EPS * z.abs().max(1.0) {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::InvalidParameter(format!(
                "Gauss-Hermite Newton iteration did not converge for order {order}"
            )));
        }
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = 2.0 / (pp * pp);
        w[n - 1 - i] = w[i];
    }
    x.reverse();
    w.reverse();
    Ok((x, w))
}

/// `∫ e^{-x²} H_m(x) H_n(x) dx` by Gauss–Hermite quadrature.
///
/// Requires `quad_order ≥ m + n + 1`.
pub fn orthogonality_integral(m: u32, n: u32, quad_order: usize) -> Result<f64> {
    if (quad_order as u64) < u64::from(m) + u64::from(n) + 1 {
        return Err(Error::QuadratureOrder {
            order: quad_order,
            m,
            n,
        });
    }
    let (nodes, weights) = gauss_hermite(quad_order)?;
    Ok(nodes
        .iter()
        .zip(&weights)
        .map(|(&x, &w)| w * hermite_eval(m, x) * hermite_eval(n, x))
        .sum())
}

/// `2^n n! √π`, the squared weighted norm of `H_n`.
pub fn hermite_norm_squared(n: u32) -> f64 {
    let fact: f64 = (1..=n).map(f64::from).product();
    2f64.powi(n as i32) * fact * PI.sqrt()
}

/// `H*_m(x) = H_m(x) / (2^m m! √π)`.
///
/// This is the scaling used by the wavelet basis; it is not the unit-norm
/// Hermite function (that would divide by the square root).
pub fn normalized_hermite(m: u32, x: f64) -> f64 {
    hermite_eval(m, x) / hermite_norm_squared(m)
}

/// Indices of one Hermite wavelet `h_{n,m}` at resolution `k` with
/// truncation order `M`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WaveletBasisSpec {
    k: u32,
    n: u32,
    m: u32,
    order: u32,
}

impl WaveletBasisSpec {
    /// `1 ≤ n ≤ 2^k`, `0 ≤ m < order`.
    pub fn new(k: u32, n: u32, m: u32, order: u32) -> Result<Self> {
        if k > 30 {
            return Err(Error::OutOfRange(format!("resolution level k = {k}")));
        }
        if n < 1 || n > 1u32 << k {
            return Err(Error::OutOfRange(format!(
                "translation n = {n} outside [1, {}]",
                1u32 << k
            )));
        }
        if m >= order {
            return Err(Error::OutOfRange(format!(
                "degree m = {m} with truncation order {order}"
            )));
        }
        Ok(Self { k, n, m, order })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// Half-open support `[(n−1)/2^k, n/2^k)`.
    pub fn support(&self) -> (f64, f64) {
        cell_bounds(self.k, self.n)
    }
}

fn cell_bounds(k: u32, n: u32) -> (f64, f64) {
    let cells = f64::from(1u32 << k);
    (f64::from(n - 1) / cells, f64::from(n) / cells)
}

/// The basis function's polynomial branch, without the support test.
fn cell_basis(k: u32, n: u32, m: u32, t: f64) -> f64 {
    let scale = 2f64.powf(f64::from(k) / 2.0);
    let arg = 2f64.powi(k as i32 + 1) * t - 2.0 * f64::from(n) + 1.0;
    scale * normalized_hermite(m, arg)
}

/// `h_{n,m}(t) = 2^{k/2} H*_m(2^{k+1} t − 2n + 1)` on its support, else 0.
pub fn wavelet_basis_eval(spec: &WaveletBasisSpec, t: f64) -> f64 {
    let (lo, hi) = spec.support();
    if t >= lo && t < hi {
        cell_basis(spec.k, spec.n, spec.m, t)
    } else {
        0.0
    }
}

/// Weight `w_n(t)` of the expansion inner product.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Weight {
    #[default]
    Unit,
    /// `e^{−(2^{k+1} t − 2n + 1)²}`, the Hermite weight mapped onto cell `n`.
    ShiftedGaussian,
}

impl Weight {
    fn eval(self, k: u32, n: u32, t: f64) -> f64 {
        match self {
            Weight::Unit => 1.0,
            Weight::ShiftedGaussian => {
                let arg = 2f64.powi(k as i32 + 1) * t - 2.0 * f64::from(n) + 1.0;
                (-arg * arg).exp()
            }
        }
    }
}

/// Expansion coefficients `C_{n,m}` stored as a `2^k × M` matrix; row
/// `n − 1` holds translation `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffMatrix {
    k: u32,
    order: u32,
    weight: Weight,
    entries: Array2<f64>,
}

impl CoeffMatrix {
    pub fn zeros(k: u32, order: u32, weight: Weight) -> Self {
        Self {
            k,
            order,
            weight,
            entries: Array2::zeros(((1usize << k), order as usize)),
        }
    }

    pub fn from_entries(k: u32, order: u32, weight: Weight, entries: Array2<f64>) -> Result<Self> {
        if entries.dim() != ((1usize << k), order as usize) {
            return Err(Error::DimensionMismatch(format!(
                "coefficient matrix {:?} for k = {k}, M = {order}",
                entries.dim()
            )));
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self {
            k,
            order,
            weight,
            entries,
        })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn weight(&self) -> Weight {
        self.weight
    }

    pub fn entries(&self) -> &Array2<f64> {
        &self.entries
    }

    /// `C_{n,m}` with 1-based `n`.
    pub fn get(&self, n: u32, m: u32) -> f64 {
        self.entries[[(n - 1) as usize, m as usize]]
    }

    /// Flattened `[C_{1,0}, …, C_{1,M−1}, C_{2,0}, …]`.
    pub fn as_vector(&self) -> Vec<f64> {
        self.entries.iter().copied().collect()
    }
}

/// Basis vector `h(t)` in the same ordering as [`CoeffMatrix::as_vector`].
pub fn basis_vector(k: u32, order: u32, t: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity((1usize << k) * order as usize);
    for n in 1..=(1u32 << k) {
        for m in 0..order {
            let spec = WaveletBasisSpec { k, n, m, order };
            out.push(wavelet_basis_eval(&spec, t));
        }
    }
    out
}

/// Composite Simpson rule on each support cell: `(cell n, t, weight)`.
///
/// The right end of each cell is sampled at the largest float below the
/// edge so piecewise data is read from the cell it belongs to.
fn simpson_rule(k: u32, quad_panels: usize) -> Result<Vec<(u32, f64, f64)>> {
    let cells = 1usize << k;
    if !quad_panels.is_power_of_two() || quad_panels < cells << 4 {
        return Err(Error::InvalidParameter(format!(
            "quad_panels = {quad_panels} must be a power of two ≥ {}",
            cells << 4
        )));
    }
    let per_cell = quad_panels / cells;
    let mut rule = Vec::with_capacity(cells * (per_cell + 1));
    for n in 1..=cells as u32 {
        let (lo, hi) = cell_bounds(k, n);
        let h = (hi - lo) / per_cell as f64;
        for j in 0..=per_cell {
            let w = if j == 0 || j == per_cell {
                h / 3.0
            } else if j % 2 == 1 {
                4.0 * h / 3.0
            } else {
                2.0 * h / 3.0
            };
            let t = if j == per_cell {
                hi.next_down()
            } else {
                lo + j as f64 * h
            };
            rule.push((n, t, w));
        }
    }
    Ok(rule)
}

/// Sample points used by [`expansion_coefficients`] and [`project`].
pub fn quadrature_nodes(k: u32, quad_panels: usize) -> Result<Vec<f64>> {
    Ok(simpson_rule(k, quad_panels)?.into_iter().map(|(_, t, _)| t).collect())
}

fn check_order(order: u32) -> Result<()> {
    if order == 0 || order > MAX_DEGREE {
        return Err(Error::InvalidParameter(format!("truncation order M = {order}")));
    }
    Ok(())
}

/// Inner products `C_{n,m} = ∫ w_n(t) h_{n,m}(t) f(t) dt` over each
/// support cell.
pub fn expansion_coefficients<F>(f: F, k: u32, order: u32, weight: Weight, quad_panels: usize) -> Result<CoeffMatrix>
where
    F: Fn(f64) -> f64,
{
    check_order(order)?;
    let rule = simpson_rule(k, quad_panels)?;
    let mut out = CoeffMatrix::zeros(k, order, weight);
    for (n, t, w) in rule {
        let ft = f(t);
        if !ft.is_finite() {
            return Err(Error::NonFinite);
        }
        let wt = w * weight.eval(k, n, t) * ft;
        for m in 0..order {
            out.entries[[(n - 1) as usize, m as usize]] += wt * cell_basis(k, n, m, t);
        }
    }
    Ok(out)
}

/// Weighted least-squares projection of `f` onto `span{h_{n,m}}`.
///
/// The basis is neither normalised nor orthogonal on a cell, so the raw
/// inner products of [`expansion_coefficients`] are corrected by the
/// per-cell Gram matrix. `truncated_reconstruct` of the result reproduces
/// any piecewise polynomial of degree `< M`.
pub fn project<F>(f: F, k: u32, order: u32, weight: Weight, quad_panels: usize) -> Result<CoeffMatrix>
where
    F: Fn(f64) -> f64,
{
    let mut coeffs = expansion_coefficients(f, k, order, weight, quad_panels)?;
    let rule = simpson_rule(k, quad_panels)?;
    let m_len = order as usize;
    let mut gram = vec![vec![0.0; m_len]; m_len];
    let mut current = 0u32;
    let finish = |n: u32, gram: &mut Vec<Vec<f64>>, coeffs: &mut CoeffMatrix| -> Result<()> {
        let mut row = coeffs.entries.row_mut((n - 1) as usize);
        let rhs: Vec<f64> = row.to_vec();
        let sol = solve_dense(std::mem::take(gram), rhs)?;
        for (dst, v) in row.iter_mut().zip(sol) {
            *dst = v;
        }
        *gram = vec![vec![0.0; m_len]; m_len];
        Ok(())
    };
    for (n, t, w) in rule {
        if n != current {
            if current != 0 {
                finish(current, &mut gram, &mut coeffs)?;
            }
            current = n;
        }
        let wt = w * weight.eval(k, n, t);
        let vals: Vec<f64> = (0..order).map(|m| cell_basis(k, n, m, t)).collect();
        for (i, vi) in vals.iter().enumerate() {
            for (j, vj) in vals.iter().enumerate() {
                gram[i][j] += wt * vi * vj;
            }
        }
    }
    finish(current, &mut gram, &mut coeffs)?;
    Ok(coeffs)
}

/// Gaussian elimination with partial pivoting for the small Gram systems.
fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Result<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap_or(col);
        if a[pivot][col].abs() < 1e-300 {
            return Err(Error::InvalidParameter("singular Gram matrix".into()));
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            let (upper, lower) = a.split_at_mut(row);
            for (dst, src) in lower[0][col..].iter_mut().zip(&upper[col][col..]) {
                *dst -= factor * src;
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let tail: f64 = (row + 1..n).map(|c| a[row][c] * x[c]).sum();
        x[row] = (b[row] - tail) / a[row][row];
    }
    Ok(x)
}

/// `Cᵀ h(t) = Σ_n Σ_m C_{n,m} h_{n,m}(t)`.
pub fn truncated_reconstruct(coeffs: &CoeffMatrix, t: f64) -> f64 {
    let cells = 1u32 << coeffs.k;
    if !(0.0..1.0).contains(&t) {
        return 0.0;
    }
    // Only the cell containing t contributes.
    let n = ((t * f64::from(cells)).floor() as u32 + 1).min(cells);
    (0..coeffs.order)
        .map(|m| {
            let spec = WaveletBasisSpec {
                k: coeffs.k,
                n,
                m,
                order: coeffs.order,
            };
            coeffs.get(n, m) * wavelet_basis_eval(&spec, t)
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&c| BigInt::from(c)).collect()
    }

    /// Rodrigues: d^n/dx^n e^{-x²} = P_n(x) e^{-x²} with P_{n+1} = P_n' − 2x P_n,
    /// so H_n = (−1)^n P_n.
    fn rodrigues(n: u32) -> PolyCoeffs {
        let mut p = PolyCoeffs::new(ints(&[1]));
        for _ in 0..n {
            let d = p.derivative();
            let mut next = vec![BigInt::zero(); p.degree() + 2];
            for (i, c) in d.coeffs().iter().enumerate() {
                next[i] += c;
            }
            for (i, c) in p.coeffs().iter().enumerate() {
                next[i + 1] -= c * 2;
            }
            p = PolyCoeffs::new(next);
        }
        if n % 2 == 1 {
            PolyCoeffs::new(p.coeffs().iter().map(|c| -c).collect())
        } else {
            p
        }
    }

    #[test]
    fn low_degree_coefficients() {
        assert_eq!(hermite_coeffs(0).unwrap().coeffs(), ints(&[1]).as_slice());
        assert_eq!(hermite_coeffs(3).unwrap().coeffs(), ints(&[0, -12, 0, 8]).as_slice());
        // H_4 = 2x·(8x³ − 12x) − 6·(4x² − 2)
        assert_eq!(
            hermite_coeffs(4).unwrap().coeffs(),
            ints(&[12, 0, -48, 0, 16]).as_slice()
        );
    }

    #[test]
    fn degree_cap() {
        assert!(hermite_coeffs(64).is_ok());
        assert_eq!(hermite_coeffs(65), Err(Error::DegreeOutOfRange(65)));
    }

    #[test]
    fn leading_coefficient_and_parity() {
        for n in 0..=40u32 {
            let h = hermite_coeffs(n).unwrap();
            assert_eq!(h.degree(), n as usize);
            assert_eq!(h.coeff(n as usize), BigInt::from(2).pow(n));
            for p in 0..=n as usize {
                if (p + n as usize) % 2 == 1 {
                    assert!(h.coeff(p).is_zero(), "H_{n} has odd-parity term x^{p}");
                }
            }
        }
    }

    #[test]
    fn recurrence_matches_rodrigues() {
        for n in 0..=10 {
            assert_eq!(hermite_coeffs(n).unwrap(), rodrigues(n), "n = {n}");
        }
    }

    #[test]
    fn derivative_identity() {
        for n in 1..=10u32 {
            let lhs = hermite_coeffs(n).unwrap().derivative();
            let prev = hermite_coeffs(n - 1).unwrap();
            let rhs = PolyCoeffs::new(prev.coeffs().iter().map(|c| c * (2 * n)).collect());
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn eval_examples() {
        assert_eq!(hermite_eval(0, 7.3), 1.0);
        assert_eq!(hermite_eval(2, 1.0), 2.0);
        assert_eq!(hermite_eval(1, 0.5), 1.0);
    }

    #[test]
    fn eval_agrees_with_coefficients() {
        for n in 0..=10 {
            let h = hermite_coeffs(n).unwrap();
            for i in 0..=80 {
                let x = -4.0 + 0.1 * f64::from(i);
                let a = hermite_eval(n, x);
                let b = h.eval(x);
                assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0), "n={n} x={x}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn generating_function() {
        for xi in -4..=4 {
            let x = f64::from(xi) * 0.25;
            for ti in -4..=4 {
                let t = f64::from(ti) * 0.125;
                let mut fact = 1.0;
                let mut sum = 0.0;
                for n in 0..=20u32 {
                    if n > 0 {
                        fact *= f64::from(n);
                    }
                    sum += hermite_eval(n, x) * t.powi(n as i32) / fact;
                }
                let exact = (2.0 * t * x - t * t).exp();
                assert!((sum - exact).abs() < 1e-8, "x={x} t={t}");
            }
        }
    }

    #[test]
    fn gauss_hermite_weights_sum_to_sqrt_pi() {
        for order in [1, 2, 5, 16, 40] {
            let (x, w) = gauss_hermite(order).unwrap();
            assert_relative_eq!(w.iter().sum::<f64>(), PI.sqrt(), max_relative = 1e-13);
            assert!(x.windows(2).all(|p| p[0] < p[1]));
        }
        assert!(gauss_hermite(0).is_err());
    }

    #[test]
    fn orthogonality_examples() {
        assert!(orthogonality_integral(0, 1, 16).unwrap().abs() < 1e-8);
        assert_relative_eq!(
            orthogonality_integral(1, 1, 16).unwrap(),
            2.0 * PI.sqrt(),
            max_relative = 1e-12
        );
        assert!(orthogonality_integral(2, 3, 16).unwrap().abs() < 1e-8);
        assert!(matches!(
            orthogonality_integral(4, 4, 8),
            Err(Error::QuadratureOrder { .. })
        ));
    }

    #[test]
    fn normalized_examples() {
        let s = PI.sqrt();
        assert_relative_eq!(normalized_hermite(0, 3.0), 1.0 / s, max_relative = 1e-15);
        assert_relative_eq!(normalized_hermite(1, 0.5), 0.5 / s, max_relative = 1e-15);
        assert_relative_eq!(normalized_hermite(2, 0.0), -2.0 / (8.0 * s), max_relative = 1e-15);
    }

    #[test]
    fn basis_examples() {
        let s = PI.sqrt();
        let b = WaveletBasisSpec::new(0, 1, 0, 1).unwrap();
        assert_relative_eq!(wavelet_basis_eval(&b, 0.3), 1.0 / s, max_relative = 1e-15);
        let b = WaveletBasisSpec::new(1, 1, 0, 1).unwrap();
        assert_eq!(wavelet_basis_eval(&b, 0.75), 0.0);
        assert_relative_eq!(wavelet_basis_eval(&b, 0.25), 2f64.sqrt() / s, max_relative = 1e-15);
        assert_eq!(wavelet_basis_eval(&b, 0.5), 0.0);
    }

    #[test]
    fn basis_spec_validation() {
        assert!(WaveletBasisSpec::new(2, 0, 0, 1).is_err());
        assert!(WaveletBasisSpec::new(2, 5, 0, 1).is_err());
        assert!(WaveletBasisSpec::new(2, 4, 0, 1).is_ok());
        assert!(WaveletBasisSpec::new(2, 4, 3, 3).is_err());
    }

    #[test]
    fn expansion_examples() {
        let zero = expansion_coefficients(|_| 0.0, 2, 3, Weight::Unit, 64).unwrap();
        assert!(zero.entries().iter().all(|&c| c == 0.0));

        let b = WaveletBasisSpec::new(0, 1, 0, 1).unwrap();
        let c = expansion_coefficients(|t| wavelet_basis_eval(&b, t), 0, 1, Weight::Unit, 16).unwrap();
        assert_relative_eq!(c.get(1, 0), 1.0 / PI, max_relative = 1e-12);

        let c = expansion_coefficients(|_| 1.0, 1, 1, Weight::Unit, 32).unwrap();
        let expect = 2f64.sqrt() / (2.0 * PI.sqrt());
        assert_relative_eq!(c.get(1, 0), expect, max_relative = 1e-12);
        assert_relative_eq!(c.get(2, 0), expect, max_relative = 1e-12);
    }

    #[test]
    fn expansion_rejects_bad_input() {
        assert!(matches!(
            expansion_coefficients(|_| f64::NAN, 1, 1, Weight::Unit, 32),
            Err(Error::NonFinite)
        ));
        assert!(expansion_coefficients(|_| 1.0, 2, 1, Weight::Unit, 32).is_err());
        assert!(expansion_coefficients(|_| 1.0, 2, 1, Weight::Unit, 96).is_err());
    }

    #[test]
    fn reconstruct_examples() {
        let zero = CoeffMatrix::zeros(2, 3, Weight::Unit);
        assert_eq!(truncated_reconstruct(&zero, 0.4), 0.0);

        let mut single = CoeffMatrix::zeros(0, 1, Weight::Unit);
        single.entries[[0, 0]] = 1.0;
        for t in [0.0, 0.3, 0.99] {
            assert_relative_eq!(truncated_reconstruct(&single, t), 1.0 / PI.sqrt(), max_relative = 1e-15);
        }
    }

    #[test]
    fn reconstruct_matches_basis_vector_dot() {
        let c = expansion_coefficients(|t| (3.0 * t).sin(), 2, 3, Weight::Unit, 64).unwrap();
        let v = c.as_vector();
        for i in 0..50 {
            let t = f64::from(i) / 50.0;
            let h = basis_vector(2, 3, t);
            let dot: f64 = v.iter().zip(&h).map(|(a, b)| a * b).sum();
            assert_relative_eq!(truncated_reconstruct(&c, t), dot, epsilon = 1e-14);
        }
    }

    #[test]
    fn projection_reproduces_piecewise_polynomials() {
        let f = |t: f64| {
            if t < 0.5 {
                1.0 - 2.0 * t + 3.0 * t * t
            } else {
                -0.5 + t * t * t
            }
        };
        for weight in [Weight::Unit, Weight::ShiftedGaussian] {
            let c = project(f, 1, 4, weight, 128).unwrap();
            for t in quadrature_nodes(1, 128).unwrap() {
                assert!((truncated_reconstruct(&c, t) - f(t)).abs() < 1e-9, "t={t}");
            }
        }
    }
}
