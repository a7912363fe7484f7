//! Stieltjes-type matrix barrier: the unique u(X) > λ_max(X) solving
//!
//!   tr((uI − X)^{−q}) = Φ,
//!
//! its exact first and second directional derivatives, the potential
//! Ψ(u) = −(u+1)^{−2}, and the tensor-shift inequality
//! tr(A^α Δ A^β Δ) ≤ tr(A^{α+β} Δ²) for A ≻ 0.
//!
//! The solver eigendecomposes X once and runs safeguarded Newton on
//! φ(u) = Σ_i (u − λ_i)^{−q} − Φ, which is smooth, strictly decreasing and
//! convex on (λ_max, ∞), so Newton from the left of the root converges
//! monotonically and quadratically. Derivative formulas are evaluated in
//! the eigenbasis, where (uI − X)^{−k} is diagonal.

use crate::linalg::{EigDecomp, SymMatrix};
use crate::{Error, Result};

/// Barrier parameters (q ≥ 1 integer, Φ > 0).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BarrierParams {
    pub q: u32,
    pub phi: f64,
}

impl BarrierParams {
    pub fn new(q: u32, phi: f64) -> Result<Self> {
        if q < 1 {
            return Err(Error::invalid("q", "must be an integer >= 1"));
        }
        if !(phi > 0.0) || !phi.is_finite() {
            return Err(Error::invalid("phi", "must be positive and finite"));
        }
        Ok(BarrierParams { q, phi })
    }
}

/// Solved barrier value: u, the relative residual of the defining equation,
/// and the spectral gap u − λ_max(X).
#[derive(Debug, Clone, Copy)]
pub struct BarrierValue {
    pub u: f64,
    pub residual: f64,
    pub gap: f64,
}

/// Default relative-residual tolerance.
pub const DEFAULT_TOL: f64 = 1e-10;

const MAX_NEWTON_ITERS: usize = 200;

fn phi_and_slope(lambdas: &[f64], q: u32, u: f64) -> (f64, f64) {
    let mut f = 0.0;
    let mut fp = 0.0;
    for &l in lambdas {
        let g = u - l;
        let p = g.powi(-(q as i32));
        f += p;
        fp -= q as f64 * p / g;
    }
    (f, fp)
}

/// Returns (u, relative residual).
fn solve_on_spectrum(lambdas: &[f64], q: u32, phi: f64, tol: f64) -> Result<(f64, f64)> {
    let n = lambdas.len() as f64;
    let lmax = lambdas.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let scale = (n / phi).powf(1.0 / q as f64);
    // the root lies in [λ_max + Φ^{-1/q}, λ_max + (n/Φ)^{1/q}]; the bracket
    // below over-covers it by 10^3 on each side
    let mut lo = lmax + scale * 1e-3;
    let mut hi = lmax + scale * 1e3;

    // establish φ(lo) > Φ > φ(hi); monotonicity makes failure impossible,
    // but the loops stay capped defensively
    for _ in 0..MAX_NEWTON_ITERS {
        if phi_and_slope(lambdas, q, lo).0 > phi {
            break;
        }
        lo = lmax + (lo - lmax) * 0.25;
    }
    for _ in 0..MAX_NEWTON_ITERS {
        if phi_and_slope(lambdas, q, hi).0 < phi {
            break;
        }
        hi = lmax + (hi - lmax) * 4.0;
    }

    // Newton from the low side; φ is convex and decreasing, so iterates
    // starting left of the root stay left of it and increase monotonically
    let mut u = lo;
    let mut residual = f64::INFINITY;
    for _ in 0..MAX_NEWTON_ITERS {
        let (f, fp) = phi_and_slope(lambdas, q, u);
        residual = (f - phi).abs() / phi;
        if residual <= tol {
            // two polishing steps sharpen u toward machine precision so
            // second-difference checks of d2u are not solver-noise limited
            for _ in 0..2 {
                let (f2, fp2) = phi_and_slope(lambdas, q, u);
                let next = u - (f2 - phi) / fp2;
                if next > lmax && next.is_finite() {
                    u = next;
                }
            }
            let (f3, _) = phi_and_slope(lambdas, q, u);
            return Ok((u, (f3 - phi).abs() / phi));
        }
        if f > phi {
            lo = lo.max(u);
        } else {
            hi = hi.min(u);
        }
        let mut next = u - (f - phi) / fp;
        if !(next > lo && next < hi) || !next.is_finite() {
            next = 0.5 * (lo + hi);
        }
        u = next;
    }
    Err(Error::NoConvergence {
        iters: MAX_NEWTON_ITERS,
        residual,
    })
}

/// Solve tr((uI − X)^{−q}) = Φ for the unique u > λ_max(X).
///
/// ```
/// use locwalk::barrier::solve_u;
/// use locwalk::linalg::SymMatrix;
///
/// // X = I, q = 1, Φ = n: n/(u−1) = n gives u = 2
/// let v = solve_u(&SymMatrix::identity(4), 1, 4.0, 1e-10).unwrap();
/// assert!((v.u - 2.0).abs() < 1e-10);
/// assert!(v.gap > 0.0);
/// ```
pub fn solve_u(x: &SymMatrix, q: u32, phi: f64, tol: f64) -> Result<BarrierValue> {
    let params = BarrierParams::new(q, phi)?;
    if x.dim() == 0 {
        return Err(Error::invalid("x", "matrix must be at least 1x1"));
    }
    if !(tol > 0.0 && tol <= 1e-6) {
        return Err(Error::invalid("tol", "must lie in (0, 1e-6]"));
    }
    let eig = x.eigh();
    let (u, residual) = solve_on_spectrum(&eig.values, params.q, params.phi, tol)?;
    let lmax = *eig.values.last().unwrap();
    Ok(BarrierValue {
        u,
        residual,
        gap: u - lmax,
    })
}

/// Solve with [`DEFAULT_TOL`].
pub fn solve_u_default(x: &SymMatrix, q: u32, phi: f64) -> Result<BarrierValue> {
    solve_u(x, q, phi, DEFAULT_TOL)
}

/// tr((uI−X)^{−k} H₁ (uI−X)^{−m} H₂) in the eigenbasis:
/// Σ_{ij} (u−λ_i)^{−k} (u−λ_j)^{−m} H̃₁[i,j] H̃₂[i,j].
fn resolvent_pair_trace(
    values: &[f64],
    h1: &SymMatrix,
    h2: &SymMatrix,
    u: f64,
    k: i32,
    m: i32,
) -> f64 {
    let n = values.len();
    let mut acc = 0.0;
    for i in 0..n {
        let gi = (u - values[i]).powi(-k);
        for j in 0..n {
            let gj = (u - values[j]).powi(-m);
            acc += gi * gj * h1.get(i, j) * h2.get(i, j);
        }
    }
    acc
}

/// tr((uI−X)^{−k} H) in the eigenbasis.
fn resolvent_trace(values: &[f64], h: &SymMatrix, u: f64, k: i32) -> f64 {
    values
        .iter()
        .enumerate()
        .map(|(i, &l)| (u - l).powi(-k) * h.get(i, i))
        .sum()
}

fn resolvent_trace_plain(values: &[f64], u: f64, k: i32) -> f64 {
    values.iter().map(|&l| (u - l).powi(-k)).sum()
}

struct Solved {
    eig: EigDecomp,
    u: f64,
}

fn solve_and_decompose(x: &SymMatrix, q: u32, phi: f64) -> Result<Solved> {
    let params = BarrierParams::new(q, phi)?;
    let eig = x.eigh();
    let (u, _) = solve_on_spectrum(&eig.values, params.q, params.phi, DEFAULT_TOL)?;
    Ok(Solved { eig, u })
}

/// First directional derivative of u at X along H:
/// Du(X)\[H\] = tr((uI−X)^{−(q+1)} H) / tr((uI−X)^{−(q+1)}).
pub fn du(x: &SymMatrix, q: u32, phi: f64, h: &SymMatrix) -> Result<f64> {
    if h.dim() != x.dim() {
        return Err(Error::invalid("h", "direction dimension mismatch"));
    }
    let s = solve_and_decompose(x, q, phi)?;
    let ht = s.eig.rotate(h);
    let qi = q as i32;
    let num = resolvent_trace(&s.eig.values, &ht, s.u, qi + 1);
    let den = resolvent_trace_plain(&s.eig.values, s.u, qi + 1);
    Ok(num / den)
}

/// Second directional derivative of u at X along (H₁, H₂): the four-term
/// expression
///
///   Σ_{k=1}^{q+1} tr((uI−X)^{−k} H₁ (uI−X)^{−(q+2−k)} H₂) / κ
///   − (q+1) tr((uI−X)^{−(q+1)}H₁) tr((uI−X)^{−(q+2)}H₂) / κ²
///   − (q+1) tr((uI−X)^{−(q+1)}H₂) tr((uI−X)^{−(q+2)}H₁) / κ²
///   + (q+1) tr((uI−X)^{−(q+1)}H₁) tr((uI−X)^{−(q+1)}H₂) tr((uI−X)^{−(q+2)}) / κ³
///
/// with κ = tr((uI−X)^{−(q+1)}).
pub fn d2u(x: &SymMatrix, q: u32, phi: f64, h1: &SymMatrix, h2: &SymMatrix) -> Result<f64> {
    if h1.dim() != x.dim() || h2.dim() != x.dim() {
        return Err(Error::invalid("h", "direction dimension mismatch"));
    }
    let s = solve_and_decompose(x, q, phi)?;
    let vals = &s.eig.values;
    let u = s.u;
    let qi = q as i32;

    let h1t = s.eig.rotate(h1);
    let h2t = s.eig.rotate(h2);

    let kappa = resolvent_trace_plain(vals, u, qi + 1);
    let tau = resolvent_trace_plain(vals, u, qi + 2);
    let t1_h1 = resolvent_trace(vals, &h1t, u, qi + 1);
    let t1_h2 = resolvent_trace(vals, &h2t, u, qi + 1);
    let t2_h1 = resolvent_trace(vals, &h1t, u, qi + 2);
    let t2_h2 = resolvent_trace(vals, &h2t, u, qi + 2);

    let mut mixed = 0.0;
    for k in 1..=(qi + 1) {
        mixed += resolvent_pair_trace(vals, &h1t, &h2t, u, k, qi + 2 - k);
    }

    let qf = (qi + 1) as f64;
    Ok(mixed / kappa - qf * t1_h1 * t2_h2 / (kappa * kappa)
        - qf * t1_h2 * t2_h1 / (kappa * kappa)
        + qf * t1_h1 * t1_h2 * tau / (kappa * kappa * kappa))
}

/// Tensor-shift inequality evaluation: (lhs, rhs, gap) with
/// lhs = tr(A^α Δ A^β Δ), rhs = tr(A^{α+β} Δ²), gap = rhs − lhs ≥ 0 for
/// A ≻ 0 and symmetric Δ.
pub fn tensor_shift_gap(
    a: &SymMatrix,
    delta: &SymMatrix,
    alpha: f64,
    beta: f64,
) -> Result<(f64, f64, f64)> {
    if delta.dim() != a.dim() {
        return Err(Error::invalid("delta", "dimension mismatch"));
    }
    if !(alpha >= 0.0 && beta >= 0.0) {
        return Err(Error::invalid("alpha", "powers must be nonnegative"));
    }
    let eig = a.eigh();
    if eig.values[0] <= 0.0 {
        return Err(Error::invalid(
            "a",
            format!("must be positive definite (λ_min = {:e})", eig.values[0]),
        ));
    }
    let dt = eig.rotate(delta);
    let n = a.dim();
    let mut lhs = 0.0;
    let mut rhs = 0.0;
    for i in 0..n {
        let li_a = eig.values[i].powf(alpha);
        let li_ab = eig.values[i].powf(alpha + beta);
        for j in 0..n {
            let d2 = dt.get(i, j) * dt.get(i, j);
            lhs += li_a * eig.values[j].powf(beta) * d2;
            rhs += li_ab * d2;
        }
    }
    Ok((lhs, rhs, rhs - lhs))
}

/// Potential Ψ(u) = −(u+1)^{−2}, defined for u > −1.
pub fn psi(u: f64) -> Result<f64> {
    if !(u > -1.0) {
        return Err(Error::invalid("u", "psi requires u > -1"));
    }
    Ok(-1.0 / ((u + 1.0) * (u + 1.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{conjugate, random_orthogonal};
    use crate::rng::stream_rng;
    use proptest::prelude::*;

    /// Independent root oracle: plain bisection on the spectrum.
    fn bisect_u(lambdas: &[f64], q: u32, phi: f64) -> f64 {
        let lmax = lambdas.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let f = |u: f64| -> f64 {
            lambdas
                .iter()
                .map(|&l| (u - l).powi(-(q as i32)))
                .sum::<f64>()
                - phi
        };
        let mut lo = lmax + 1e-6;
        while f(lo) < 0.0 {
            lo = lmax + (lo - lmax) / 2.0;
        }
        let mut hi = lmax + 1.0;
        while f(hi) > 0.0 {
            hi = lmax + (hi - lmax) * 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    fn random_sym_in(n: usize, lo: f64, hi: f64, rng: &mut crate::rng::Rng) -> SymMatrix {
        // random eigenvalues in [lo, hi] conjugated by a random rotation
        let vals: Vec<f64> = (0..n).map(|_| rng.random_range(lo..hi)).collect();
        let q = random_orthogonal(n, rng);
        conjugate(&SymMatrix::diag(&vals), &q)
    }

    fn random_direction(n: usize, rng: &mut crate::rng::Rng) -> SymMatrix {
        let mut h = SymMatrix::zeros(n);
        for i in 0..n {
            for j in i..n {
                h.set_sym(i, j, rng.random_range(-1.0..1.0));
            }
        }
        h
    }

    #[test]
    fn solve_u_closed_forms() {
        // X = 0 (n=2), q=1, Φ=2: 2/u = 2 → u = 1
        let v = solve_u_default(&SymMatrix::zeros(2), 1, 2.0).unwrap();
        assert!((v.u - 1.0).abs() < 1e-10);
        assert!(v.gap > 0.0 && v.residual <= DEFAULT_TOL);

        // X = I, q=1, Φ=n: n/(u−1) = n → u = 2
        for n in [2usize, 5, 9] {
            let v = solve_u_default(&SymMatrix::identity(n), 1, n as f64).unwrap();
            assert!((v.u - 2.0).abs() < 1e-10, "n={n}: u={}", v.u);
        }
    }

    #[test]
    fn solve_u_matches_bisection_oracle() {
        // X = diag(1, 0.5, 0), q=2, Φ=1
        let lambdas = [1.0, 0.5, 0.0];
        let want = bisect_u(&lambdas, 2, 1.0);
        let v = solve_u_default(&SymMatrix::diag(&lambdas), 2, 1.0).unwrap();
        assert!(
            (v.u - want).abs() < 1e-10,
            "solver {} vs oracle {want}",
            v.u
        );

        // and on rotated random spectra across q
        let mut rng = stream_rng(21, 0);
        for q in 1..=3u32 {
            for _ in 0..5 {
                let x = random_sym_in(4, -0.5, 0.9, &mut rng);
                let phi = rng.random_range(0.5..6.0);
                let want = bisect_u(&x.eigh().values, q, phi);
                let got = solve_u_default(&x, q, phi).unwrap();
                assert!(
                    (got.u - want).abs() < 1e-9,
                    "q={q} solver {} vs oracle {want}",
                    got.u
                );
            }
        }
    }

    #[test]
    fn solve_u_rejects_bad_inputs() {
        let x = SymMatrix::identity(3);
        assert!(solve_u(&x, 0, 1.0, 1e-10).is_err());
        assert!(solve_u(&x, 1, -1.0, 1e-10).is_err());
        assert!(solve_u(&x, 1, 1.0, 1e-3).is_err());
        assert!(solve_u(&x, 1, 1.0, 0.0).is_err());
        assert!(solve_u(&SymMatrix::zeros(0), 1, 1.0, 1e-10).is_err());
    }

    #[test]
    fn du_identity_direction_is_one() {
        let mut rng = stream_rng(22, 0);
        for q in 1..=3u32 {
            let x = random_sym_in(5, 0.0, 0.9, &mut rng);
            let d = du(&x, q, 5.0, &SymMatrix::identity(5)).unwrap();
            assert!((d - 1.0).abs() < 1e-10, "q={q}: du = {d}");
        }
    }

    #[test]
    fn du_at_zero_matrix_is_mean_trace() {
        // X = 0, q=1, Φ=n → u = 1 and Du[H] = tr(H)/n
        let n = 4;
        let mut rng = stream_rng(23, 0);
        let h = random_direction(n, &mut rng);
        let d = du(&SymMatrix::zeros(n), 1, n as f64, &h).unwrap();
        assert!((d - h.trace() / n as f64).abs() < 1e-10);
    }

    #[test]
    fn du_matches_central_differences() {
        let mut rng = stream_rng(24, 0);
        let eps = 1e-5;
        for q in 1..=3u32 {
            for _ in 0..6 {
                let x = random_sym_in(5, 0.0, 0.9, &mut rng);
                let h = random_direction(5, &mut rng);
                let phi = 5.0;
                let analytic = du(&x, q, phi, &h).unwrap();
                let up = solve_u_default(&x.add(&h.scale(eps)), q, phi).unwrap().u;
                let dn = solve_u_default(&x.add(&h.scale(-eps)), q, phi).unwrap().u;
                let fd = (up - dn) / (2.0 * eps);
                assert!(
                    ((analytic - fd) / fd.abs().max(1e-8)).abs() < 1e-5,
                    "q={q}: analytic {analytic} vs fd {fd}"
                );
            }
        }
    }

    #[test]
    fn d2u_identity_cancellation_and_symmetry() {
        let mut rng = stream_rng(25, 0);
        for q in 1..=3u32 {
            let x = random_sym_in(5, 0.0, 0.9, &mut rng);
            let id = SymMatrix::identity(5);
            let v = d2u(&x, q, 5.0, &id, &id).unwrap();
            assert!(v.abs() < 1e-10, "q={q}: d2u(I,I) = {v}");

            let h1 = random_direction(5, &mut rng);
            let h2 = random_direction(5, &mut rng);
            let a = d2u(&x, q, 5.0, &h1, &h2).unwrap();
            let b = d2u(&x, q, 5.0, &h2, &h1).unwrap();
            assert!((a - b).abs() < 1e-10 * a.abs().max(1.0));
        }
    }

    #[test]
    fn d2u_matches_second_differences() {
        let mut rng = stream_rng(26, 0);
        let eps = 1e-4;
        for q in 1..=3u32 {
            for _ in 0..4 {
                let x = random_sym_in(4, 0.0, 0.8, &mut rng);
                let h = random_direction(4, &mut rng);
                let phi = 4.0;
                let analytic = d2u(&x, q, phi, &h, &h).unwrap();
                let up = solve_u_default(&x.add(&h.scale(eps)), q, phi).unwrap().u;
                let mid = solve_u_default(&x, q, phi).unwrap().u;
                let dn = solve_u_default(&x.add(&h.scale(-eps)), q, phi).unwrap().u;
                let fd = (up - 2.0 * mid + dn) / (eps * eps);
                assert!(
                    ((analytic - fd) / fd.abs().max(1e-6)).abs() < 1e-4,
                    "q={q}: analytic {analytic} vs fd {fd}"
                );
            }
        }
    }

    #[test]
    fn tensor_shift_examples() {
        let mut rng = stream_rng(27, 0);
        let n = 4;
        // A = I → lhs = rhs exactly
        let delta = random_direction(n, &mut rng);
        let (lhs, rhs, gap) =
            tensor_shift_gap(&SymMatrix::identity(n), &delta, 1.3, 0.7).unwrap();
        assert!((lhs - rhs).abs() < 1e-12 * rhs.abs().max(1.0));
        assert!(gap.abs() < 1e-12 * rhs.abs().max(1.0));

        // α = 0 → lhs = tr(Δ A^β Δ) = rhs
        let a = random_sym_in(n, 0.2, 2.0, &mut rng);
        let (lhs, rhs, _) = tensor_shift_gap(&a, &delta, 0.0, 1.7).unwrap();
        assert!((lhs - rhs).abs() < 1e-11 * rhs.abs().max(1.0));

        // not positive definite → error
        assert!(
            tensor_shift_gap(&SymMatrix::diag(&[1.0, -0.1]), &SymMatrix::identity(2), 1.0, 1.0)
                .is_err()
        );
    }

    #[test]
    fn tensor_shift_random_instances_nonnegative() {
        let mut rng = stream_rng(28, 0);
        for _ in 0..100 {
            let a = random_sym_in(5, 0.05, 3.0, &mut rng);
            let delta = random_direction(5, &mut rng);
            let alpha = rng.random_range(0.0..3.0);
            let beta = rng.random_range(0.0..3.0);
            let (_, _, gap) = tensor_shift_gap(&a, &delta, alpha, beta).unwrap();
            assert!(gap >= -1e-10, "gap = {gap}");
        }
    }

    #[test]
    fn psi_values() {
        assert_eq!(psi(1.5).unwrap(), -(4.0 / 25.0));
        assert_eq!(psi(0.0).unwrap(), -1.0);
        assert!(psi(-1.0).is_err());
        assert!(psi(-2.0).is_err());
        // monotone increasing toward 0 from below
        let mut prev = psi(0.5).unwrap();
        for u in [1.0, 2.0, 10.0, 1e6] {
            let v = psi(u).unwrap();
            assert!(v > prev && v < 0.0);
            prev = v;
        }
    }

    #[test]
    fn translation_covariance() {
        let mut rng = stream_rng(29, 0);
        for q in 1..=3u32 {
            let x = random_sym_in(5, -0.3, 0.9, &mut rng);
            let u0 = solve_u_default(&x, q, 3.0).unwrap().u;
            for s in [-0.7, 0.4, 2.5] {
                let us = solve_u_default(&x.shift(s), q, 3.0).unwrap().u;
                assert!(
                    (us - (u0 + s)).abs() < 1e-10,
                    "q={q} s={s}: {us} vs {}",
                    u0 + s
                );
            }
        }
    }

    #[test]
    fn monotone_in_psd_order() {
        let mut rng = stream_rng(30, 0);
        for _ in 0..10 {
            let x = random_sym_in(4, -0.5, 0.5, &mut rng);
            // Y = X + BᵀB is above X in the PSD order
            let b = random_direction(4, &mut rng);
            let mut bsq = SymMatrix::zeros(4);
            for i in 0..4 {
                for j in i..4 {
                    let mut s = 0.0;
                    for k in 0..4 {
                        s += b.get(k, i) * b.get(k, j);
                    }
                    bsq.set_sym(i, j, 0.3 * s);
                }
            }
            let y = x.add(&bsq);
            let ux = solve_u_default(&x, 2, 2.0).unwrap().u;
            let uy = solve_u_default(&y, 2, 2.0).unwrap().u;
            assert!(uy >= ux - 1e-10, "u(X)={ux} u(Y)={uy}");
        }
    }

    #[test]
    fn rotation_invariance() {
        let mut rng = stream_rng(31, 0);
        let x = random_sym_in(5, 0.0, 1.0, &mut rng);
        let u0 = solve_u_default(&x, 2, 4.0).unwrap().u;
        for _ in 0..5 {
            let q = random_orthogonal(5, &mut rng);
            let u1 = solve_u_default(&conjugate(&x, &q), 2, 4.0).unwrap().u;
            assert!((u0 - u1).abs() < 1e-10);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn du_is_linear(seed in 0u64..1000, a in -2.0f64..2.0, b in -2.0f64..2.0) {
            let mut rng = stream_rng(seed, 77);
            let x = random_sym_in(4, 0.0, 0.8, &mut rng);
            let h1 = random_direction(4, &mut rng);
            let h2 = random_direction(4, &mut rng);
            let combo = h1.scale(a).add(&h2.scale(b));
            let lhs = du(&x, 2, 4.0, &combo).unwrap();
            let rhs = a * du(&x, 2, 4.0, &h1).unwrap() + b * du(&x, 2, 4.0, &h2).unwrap();
            prop_assert!((lhs - rhs).abs() < 1e-12 * (lhs.abs().max(rhs.abs()).max(1.0)));
        }

        #[test]
        fn psi_anchor_holds_for_scaled_identity(k in 1u32..4) {
            // Φ = 2^q·n at X = I gives u = 3/2 and Ψ = −4/25
            let n = 6usize;
            let phi = 2f64.powi(k as i32) * n as f64;
            let v = solve_u_default(&SymMatrix::identity(n), k, phi).unwrap();
            prop_assert!((v.u - 1.5).abs() < 1e-10);
            prop_assert!((psi(v.u).unwrap() + 4.0 / 25.0).abs() < 1e-10);
        }
    }
}
