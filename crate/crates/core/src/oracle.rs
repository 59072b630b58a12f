//! Brute-force reference computations used to cross-check the production
//! paths: spin generators as explicit matrices, beam splitters as matrix
//! exponentials, partial traces over explicit outer products and trapezoid
//! quadrature of the phase distribution.

use std::f64::consts::PI;

use nalgebra::{Complex, DMatrix};

use crate::error::{Error, Result};
use crate::loss_channel::{LossBranch, LossChannel, PureLossyState, ReducedDensity};
use crate::optimal_state::AmplitudeVector;
use crate::povm::{nyquist_samples, PhaseDistribution};
use crate::spin::{k_of, HalfInt, SpinRange};

pub type C64 = Complex<f64>;

/// Largest `2j` the dense oracles accept.
pub const MAX_ORACLE_TWO_J: i32 = 24;

/// Largest photon number [`trace_out_explicit`] accepts.
pub const MAX_TRACE_OUT_PHOTONS: u32 = 10;

const SERIES_TERMS: usize = 18;

fn check_size(j: HalfInt) -> Result<()> {
    if j.twice() < 0 {
        return Err(Error::NegativeSpin(j));
    }
    if j.twice() > MAX_ORACLE_TWO_J {
        return Err(Error::TooManyPhotons {
            n: j.twice() as u32,
            max: MAX_ORACLE_TWO_J as u32,
        });
    }
    Ok(())
}

/// A spin component in the `|j, m>_z` basis, rows ordered from `m = -j`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorMatrix {
    pub j: HalfInt,
    pub entries: DMatrix<C64>,
}

fn ladder(j: HalfInt) -> DMatrix<C64> {
    // <m+1| J_+ |m> = sqrt(j(j+1) - m(m+1))
    let r = SpinRange::new(j).expect("checked");
    let jj = j.to_f64() * (j.to_f64() + 1.0);
    let mut up = DMatrix::zeros(r.len(), r.len());
    for (i, m) in r.iter().enumerate().take(r.len().saturating_sub(1)) {
        let m = m.to_f64();
        up[(i + 1, i)] = C64::new((jj - m * (m + 1.0)).sqrt(), 0.0);
    }
    up
}

pub fn jx_matrix(j: HalfInt) -> Result<GeneratorMatrix> {
    check_size(j)?;
    let up = ladder(j);
    let entries = (&up + up.adjoint()) * C64::new(0.5, 0.0);
    Ok(GeneratorMatrix { j, entries })
}

pub fn jy_matrix(j: HalfInt) -> Result<GeneratorMatrix> {
    check_size(j)?;
    let up = ladder(j);
    let entries = (&up - up.adjoint()) * C64::new(0.0, -0.5);
    Ok(GeneratorMatrix { j, entries })
}

pub fn jz_matrix(j: HalfInt) -> Result<GeneratorMatrix> {
    check_size(j)?;
    let r = SpinRange::new(j)?;
    let diag: Vec<C64> = r.iter().map(|m| C64::new(m.to_f64(), 0.0)).collect();
    Ok(GeneratorMatrix {
        j,
        entries: DMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag)),
    })
}

fn one_norm(a: &DMatrix<C64>) -> f64 {
    a.column_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `exp(a)` by scaling and squaring around a truncated Taylor series.
pub fn expm(a: &DMatrix<C64>) -> DMatrix<C64> {
    let n = a.nrows();
    let norm = one_norm(a);
    let mut squarings = 0u32;
    while norm / 2f64.powi(squarings as i32) > 0.5 {
        squarings += 1;
    }
    let scaled = a * C64::new(2f64.powi(-(squarings as i32)), 0.0);
    let mut sum = DMatrix::<C64>::identity(n, n);
    let mut term = DMatrix::<C64>::identity(n, n);
    for k in 1..=SERIES_TERMS {
        term = &term * &scaled * C64::new(1.0 / k as f64, 0.0);
        sum += &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// `exp(i theta J_x)` on spin `j`.
pub fn bs_unitary(j: HalfInt, theta: f64) -> Result<DMatrix<C64>> {
    let jx = jx_matrix(j)?;
    Ok(expm(&(jx.entries * C64::new(0.0, theta))))
}

/// Entry `<j,a| U |j,b>` of a matrix in the `|j, m>_z` basis.
pub fn element(u: &DMatrix<C64>, j: HalfInt, a: HalfInt, b: HalfInt) -> Result<C64> {
    let r = SpinRange::new(j)?;
    r.check(a)?;
    r.check(b)?;
    Ok(u[(r.index_of(a).unwrap(), r.index_of(b).unwrap())])
}

/// The real rotation element implied by a beam-splitter entry:
/// `i^{a-b} <a| exp(i theta J_x) |b>`.
pub fn rotation_from_unitary(u: &DMatrix<C64>, j: HalfInt, a: HalfInt, b: HalfInt) -> Result<C64> {
    let z = element(u, j, a, b)?;
    let phase = match ((a - b).twice() / 2).rem_euclid(4) {
        0 => C64::new(1.0, 0.0),
        1 => C64::new(0.0, 1.0),
        2 => C64::new(-1.0, 0.0),
        _ => C64::new(0.0, -1.0),
    };
    Ok(phase * z)
}

/// The post-loss pure state built from explicit beam-splitter unitaries
/// rather than rotation elements. Phases follow `exp(i theta J_x)` itself.
pub fn pure_lossy_state_via_unitary(
    state: &AmplitudeVector,
    ch: &LossChannel,
) -> Result<PureLossyState> {
    let j = state.j();
    let mut branches = Vec::with_capacity(state.len());
    for (mu, psi) in state.iter() {
        let k = k_of(j, mu)?;
        let u = bs_unitary(k, ch.theta())?;
        let range = SpinRange::new(k)?;
        let col = range.index_of(k).unwrap();
        let amplitudes = (0..range.len()).map(|row| u[(row, col)] * psi).collect();
        branches.push(LossBranch { mu, k, amplitudes });
    }
    Ok(PureLossyState::from_branches(j, branches))
}

/// `Tr_{c'} |psi><psi|` as a dense matrix on modes `(a', b)`, each with
/// `N + 1` Fock levels; row index `n_a' * (N + 1) + n_b`.
pub fn trace_out_dense(state: &PureLossyState) -> Result<DMatrix<C64>> {
    let n = state.j().twice() as u32;
    if n > MAX_TRACE_OUT_PHOTONS {
        return Err(Error::TooManyPhotons {
            n,
            max: MAX_TRACE_OUT_PHOTONS,
        });
    }
    let levels = n as usize + 1;
    let idx = |a: u32, c: u32, b: u32| (a as usize * levels + c as usize) * levels + b as usize;
    let dim = levels * levels * levels;
    let mut vector = vec![C64::new(0.0, 0.0); dim];
    for t in state.terms() {
        vector[idx(t.a_prime, t.c_prime, t.b)] += t.amplitude;
    }
    let ket = nalgebra::DVector::from_vec(vector);
    let full = &ket * ket.adjoint();

    let mut reduced = DMatrix::zeros(levels * levels, levels * levels);
    for a in 0..levels as u32 {
        for b in 0..levels as u32 {
            for ap in 0..levels as u32 {
                for bp in 0..levels as u32 {
                    let mut acc = C64::new(0.0, 0.0);
                    for c in 0..levels as u32 {
                        acc += full[(idx(a, c, b), idx(ap, c, bp))];
                    }
                    reduced[(a as usize * levels + b as usize, ap as usize * levels + bp as usize)] =
                        acc;
                }
            }
        }
    }
    Ok(reduced)
}

/// Partial trace of the explicit outer product, repacked into lost-photon blocks.
pub fn trace_out_explicit(state: &PureLossyState, loss: f64) -> Result<ReducedDensity> {
    let dense = trace_out_dense(state)?;
    let j = state.j();
    let n = j.twice() as u32;
    let levels = n as usize + 1;
    let mut blocks = Vec::with_capacity(levels);
    for lost in 0..=n {
        let side = (n + 1 - lost) as usize;
        let mut block = DMatrix::zeros(side, side);
        for r in 0..side {
            for c in 0..side {
                // dense index `lost + r` is mu + j; a' holds j + mu - lost photons
                let (mu_r, mu_c) = (lost as usize + r, lost as usize + c);
                let row = r * levels + (n as usize - mu_r);
                let col = c * levels + (n as usize - mu_c);
                block[(r, c)] = dense[(row, col)].re;
            }
        }
        blocks.push((lost, block));
    }
    ReducedDensity::from_blocks(j, loss, blocks)
}

/// Total photon number `n_a' + n_b` of a dense `(a', b)` index.
pub fn dense_inner_photons(index: usize, n: u32) -> u32 {
    let levels = n as usize + 1;
    (index / levels + index % levels) as u32
}

/// Trapezoid estimate of `int_0^{2 pi} P(phi) e^{i phi} d phi`, evaluating
/// `P` from the raw coefficient double sum.
pub fn quadrature_sharpness(dist: &PhaseDistribution, n_points: usize) -> Result<C64> {
    let min = nyquist_samples(dist.j());
    if n_points < min {
        return Err(Error::TooFewSamples {
            what: "quadrature",
            min,
            got: n_points,
        });
    }
    let c = dist.coefficients();
    let size = c.nrows();
    let h = 2.0 * PI / n_points as f64;
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n_points {
        let phi = i as f64 * h;
        let mut p = C64::new(0.0, 0.0);
        for mu in 0..size {
            for nu in 0..size {
                let q = nu as f64 - mu as f64;
                p += C64::from_polar(c[(mu, nu)], q * phi);
            }
        }
        acc += p * C64::from_polar(1.0, phi);
    }
    Ok(acc * h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::loss_channel::{channel_from_loss, pure_lossy_state, reduced_density};
    use crate::optimal_state::optimal_amplitudes;
    use crate::povm::{distribution, sharpness_closed};
    use crate::wigner::d_element;

    fn hi(t: i32) -> HalfInt {
        HalfInt::from_twice(t)
    }

    fn max_abs(m: &DMatrix<C64>) -> f64 {
        m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn spin_half_and_one_generators() {
        let jx = jx_matrix(hi(1)).unwrap().entries;
        assert!((jx[(0, 1)].re - 0.5).abs() < 1e-15 && (jx[(1, 0)].re - 0.5).abs() < 1e-15);
        assert_eq!(jx[(0, 0)], C64::new(0.0, 0.0));
        let jx1 = jx_matrix(hi(2)).unwrap().entries;
        let r = 0.5f64.sqrt();
        assert!((jx1[(0, 1)].re - r).abs() < 1e-15);
        assert!((jx1[(1, 2)].re - r).abs() < 1e-15);
        assert_eq!(jx1[(0, 2)], C64::new(0.0, 0.0));
    }

    #[test]
    fn generators_are_hermitian_and_commute_correctly() {
        for two_j in 0..=MAX_ORACLE_TWO_J {
            let j = hi(two_j);
            let x = jx_matrix(j).unwrap().entries;
            let y = jy_matrix(j).unwrap().entries;
            let z = jz_matrix(j).unwrap().entries;
            for g in [&x, &y, &z] {
                assert!(max_abs(&(g - g.adjoint())) < 1e-12);
            }
            let comm = &x * &y - &y * &x;
            assert!(max_abs(&(comm - &z * C64::new(0.0, 1.0))) < 1e-10);
            // J^2 = j(j+1)
            let casimir = &x * &x + &y * &y + &z * &z;
            let jj = j.to_f64() * (j.to_f64() + 1.0);
            let id = DMatrix::<C64>::identity(two_j as usize + 1, two_j as usize + 1);
            assert!(max_abs(&(casimir - id * C64::new(jj, 0.0))) < 1e-10);
        }
    }

    #[test]
    fn jx_spectrum() {
        for two_j in 0..=12 {
            let jx = jx_matrix(hi(two_j)).unwrap().entries.map(|z| z.re);
            let mut ev: Vec<f64> = nalgebra::SymmetricEigen::new(jx).eigenvalues.iter().copied().collect();
            ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
            for (i, e) in ev.iter().enumerate() {
                assert!((e - (i as f64 - f64::from(two_j) / 2.0)).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn oversize_rejected() {
        assert!(jx_matrix(hi(MAX_ORACLE_TWO_J + 1)).is_err());
        assert!(bs_unitary(hi(30), 0.1).is_err());
    }

    #[test]
    fn unitary_basics() {
        let id = bs_unitary(hi(6), 0.0).unwrap();
        assert!(max_abs(&(id - DMatrix::identity(7, 7))) < 1e-15);
        let u = bs_unitary(hi(1), PI / 2.0).unwrap();
        let c = (PI / 4.0).cos();
        assert!((u[(0, 0)].norm() - c).abs() < 1e-14);
        assert!((u[(1, 1)].norm() - c).abs() < 1e-14);
        for two_j in [1, 4, 9, 24] {
            let u = bs_unitary(hi(two_j), 2.5).unwrap();
            let n = two_j as usize + 1;
            assert!(max_abs(&(u.adjoint() * &u - DMatrix::identity(n, n))) < 1e-10);
        }
    }

    #[test]
    fn unitary_matches_rotation_elements_with_sign() {
        for two_j in 0..=12 {
            let j = hi(two_j);
            let r = SpinRange::new(j).unwrap();
            for &t in &[0.1, 0.7, PI / 2.0, 2.5] {
                let u = bs_unitary(j, t).unwrap();
                for a in r.iter() {
                    for b in r.iter() {
                        let z = rotation_from_unitary(&u, j, a, b).unwrap();
                        let d = d_element(j, a, b, t).unwrap();
                        assert!(z.im.abs() < 1e-8);
                        assert!((z.re - d).abs() < 1e-8, "j={j} a={a} b={b} t={t}");
                    }
                }
            }
        }
    }

    #[test]
    fn unitary_state_matches_rotation_state_up_to_phase() {
        let s = optimal_amplitudes(6).unwrap();
        let ch = channel_from_loss(0.35).unwrap();
        let via_d = pure_lossy_state(&s, &ch).unwrap();
        let via_u = pure_lossy_state_via_unitary(&s, &ch).unwrap();
        for (x, y) in via_d.terms().zip(via_u.terms()) {
            assert_eq!((x.mu, x.m), (y.mu, y.m));
            assert!((x.amplitude.norm() - y.amplitude.norm()).abs() < 1e-12);
        }
    }

    #[test]
    fn explicit_trace_out_matches_blocks() {
        for (n, loss) in [(1, 0.3), (3, 0.0), (5, 0.6), (8, 0.2)] {
            let s = optimal_amplitudes(n).unwrap();
            let ch = channel_from_loss(loss).unwrap();
            let fast = reduced_density(&s, &ch).unwrap();
            for pure in [
                pure_lossy_state(&s, &ch).unwrap(),
                pure_lossy_state_via_unitary(&s, &ch).unwrap(),
            ] {
                let slow = trace_out_explicit(&pure, loss).unwrap();
                assert!(fast.max_abs_diff(&slow) <= 1e-12, "n={n} loss={loss}");
            }
        }
    }

    #[test]
    fn dense_trace_out_is_real_and_block_diagonal() {
        let s = optimal_amplitudes(4).unwrap();
        let ch = channel_from_loss(0.4).unwrap();
        let dense = trace_out_dense(&pure_lossy_state(&s, &ch).unwrap()).unwrap();
        let tr: C64 = dense.diagonal().iter().sum();
        assert!((tr.re - 1.0).abs() < 1e-12 && tr.im.abs() < 1e-15);
        for r in 0..dense.nrows() {
            for c in 0..dense.ncols() {
                let z = dense[(r, c)];
                assert!(z.im.abs() < 1e-15);
                if dense_inner_photons(r, 4) != dense_inner_photons(c, 4) {
                    assert_eq!(z.norm(), 0.0);
                }
            }
        }
    }

    #[test]
    fn random_state_trace() {
        // fixed pseudo-random amplitudes, normalized
        let raw = [0.3, -1.2, 0.7, 0.05, 0.9];
        let norm = raw.iter().map(|x: &f64| x * x).sum::<f64>().sqrt();
        let s = AmplitudeVector::from_amplitudes(raw.iter().map(|x| x / norm).collect()).unwrap();
        let pure = pure_lossy_state(&s, &channel_from_loss(0.2).unwrap()).unwrap();
        assert!((trace_out_explicit(&pure, 0.2).unwrap().trace() - 1.0).abs() < 1e-12);
        assert!(trace_out_explicit(
            &pure_lossy_state(&optimal_amplitudes(11).unwrap(), &LossChannel::lossless()).unwrap(),
            0.0
        )
        .is_err());
    }

    #[test]
    fn quadrature_examples() {
        let two = distribution(&optimal_amplitudes(2).unwrap(), &LossChannel::lossless());
        let q = quadrature_sharpness(&two, 64).unwrap();
        assert!((q.re - 0.5f64.sqrt()).abs() < 1e-10 && q.im.abs() < 1e-12);
        let one = optimal_amplitudes(1).unwrap();
        let ch = channel_from_loss(0.3).unwrap();
        let q = quadrature_sharpness(&distribution(&one, &ch), 64).unwrap();
        assert!((q.norm() - sharpness_closed(&one, &ch).unwrap()).abs() < 1e-8);
        assert!((q.norm() - 0.41833).abs() < 1e-5);
        // single-term state: flat distribution, no fringe
        let flat = AmplitudeVector::from_amplitudes(vec![0.0, 1.0, 0.0]).unwrap();
        let q = quadrature_sharpness(&distribution(&flat, &LossChannel::lossless()), 64).unwrap();
        assert!(q.norm() < 1e-15);
        assert!(quadrature_sharpness(&two, 8).is_err());
    }
}
