//! Photon loss in arm `a`, modelled as a beam splitter that couples `a` to a
//! vacuum mode `c`. Tracing out the scattered mode `c'` leaves a mixed state
//! of the inner modes `a'` and `b`.
//!
//! With `k = (j + mu) / 2`, the `j + mu` photons of arm `a` form the spin
//! state `|k, k>` of the `(a, c)` pair, and the splitter sends it to
//! `sum_m e^{i pi/2 (m - k)} d^k_{m,k}(theta) |k + m>_{a'} |k - m>_{c'}`.
//! The number of lost photons is `l = k - m`.

use nalgebra::{Complex, DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::optimal_state::AmplitudeVector;
use crate::spin::{HalfInt, SpinRange};
use crate::wigner::d_element;

/// Largest photon number the dense reduced density matrix is built for.
pub const DEFAULT_DENSITY_CAP: u32 = 256;

/// A beam splitter of reflectivity `loss`, i.e. transmission
/// `cos^2(theta / 2) = 1 - loss`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossChannel {
    loss: f64,
    theta: f64,
}

impl LossChannel {
    pub fn from_loss(loss: f64) -> Result<Self> {
        if !loss.is_finite() {
            return Err(Error::NonFiniteLoss);
        }
        if loss < 0.0 {
            return Err(Error::NegativeLoss(loss));
        }
        if loss >= 1.0 {
            return Err(Error::LossTooLarge(loss));
        }
        let theta = 2.0 * (1.0 - loss).sqrt().acos();
        Ok(LossChannel { loss, theta })
    }

    pub fn lossless() -> Self {
        LossChannel {
            loss: 0.0,
            theta: 0.0,
        }
    }

    pub fn loss(&self) -> f64 {
        self.loss
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn transmission(&self) -> f64 {
        1.0 - self.loss
    }

    /// `ln(1 - loss)`, accurate for tiny losses.
    pub fn ln_transmission(&self) -> f64 {
        (-self.loss).ln_1p()
    }
}

/// Shorthand for [`LossChannel::from_loss`].
pub fn channel_from_loss(loss: f64) -> Result<LossChannel> {
    LossChannel::from_loss(loss)
}

/// Phase `e^{i pi/2 (m - k)}` for the integer `m - k = -lost`.
fn quarter_turn(lost: u32) -> Complex<f64> {
    match lost % 4 {
        0 => Complex::new(1.0, 0.0),
        1 => Complex::new(0.0, -1.0),
        2 => Complex::new(-1.0, 0.0),
        _ => Complex::new(0.0, 1.0),
    }
}

/// Coefficients of one `mu` term: indexed by `m` from `-k` to `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct LossBranch {
    pub mu: HalfInt,
    pub k: HalfInt,
    pub amplitudes: Vec<Complex<f64>>,
}

/// The pure state of modes `a'`, `c'` and `b` right after the loss splitter.
#[derive(Debug, Clone, PartialEq)]
pub struct PureLossyState {
    j: HalfInt,
    branches: Vec<LossBranch>,
}

/// One basis ket `|n_a'>|n_c'>|n_b>` with its amplitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FockTerm {
    pub mu: HalfInt,
    pub m: HalfInt,
    pub a_prime: u32,
    pub c_prime: u32,
    pub b: u32,
    pub amplitude: Complex<f64>,
}

impl PureLossyState {
    #[cfg_attr(not(any(test, feature = "oracle")), allow(dead_code))]
    pub(crate) fn from_branches(j: HalfInt, branches: Vec<LossBranch>) -> Self {
        PureLossyState { j, branches }
    }

    pub fn j(&self) -> HalfInt {
        self.j
    }

    pub fn branches(&self) -> &[LossBranch] {
        &self.branches
    }

    pub fn get(&self, mu: HalfInt, m: HalfInt) -> Option<Complex<f64>> {
        let branch = self.branches.iter().find(|br| br.mu == mu)?;
        let idx = SpinRange::new(branch.k).ok()?.index_of(m)?;
        Some(branch.amplitudes[idx])
    }

    pub fn terms(&self) -> impl Iterator<Item = FockTerm> + '_ {
        let j = self.j;
        self.branches.iter().flat_map(move |br| {
            let range = SpinRange::new(br.k).expect("k is non-negative");
            range
                .iter()
                .zip(br.amplitudes.iter())
                .map(move |(m, &amplitude)| FockTerm {
                    mu: br.mu,
                    m,
                    a_prime: (br.k + m).twice() as u32 / 2,
                    c_prime: (br.k - m).twice() as u32 / 2,
                    b: (j - br.mu).twice() as u32 / 2,
                    amplitude,
                })
        })
    }

    pub fn norm_sqr(&self) -> f64 {
        self.branches
            .iter()
            .flat_map(|br| br.amplitudes.iter())
            .map(|c| c.norm_sqr())
            .sum()
    }
}

/// Sends every `mu` term of `state` through the loss splitter.
pub fn pure_lossy_state(state: &AmplitudeVector, ch: &LossChannel) -> Result<PureLossyState> {
    let j = state.j();
    let mut branches = Vec::with_capacity(state.len());
    for (mu, psi) in state.iter() {
        let k = crate::spin::k_of(j, mu)?;
        let range = SpinRange::new(k)?;
        let amplitudes = range
            .iter()
            .map(|m| {
                let lost = (k - m).twice() as u32 / 2;
                let d = d_element(k, m, k, ch.theta())?;
                Ok(quarter_turn(lost) * (psi * d))
            })
            .collect::<Result<Vec<_>>>()?;
        branches.push(LossBranch { mu, k, amplitudes });
    }
    Ok(PureLossyState { j, branches })
}

/// The sector of `rho'` with exactly `lost` photons in the discarded mode.
///
/// Rows and columns run over `mu` from `lost - j` to `j`: the basis kets are
/// `|j + mu - lost>_{a'} |j - mu>_b`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityBlock {
    lost: u32,
    matrix: DMatrix<f64>,
}

impl DensityBlock {
    pub fn lost(&self) -> u32 {
        self.lost
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Smallest `mu` present in this block.
    pub fn mu_min(&self, j: HalfInt) -> HalfInt {
        HalfInt::from_int(self.lost as i32) - j
    }
}

/// `rho' = Tr_{c'} |psi><psi|`, stored block-diagonally in the lost-photon number.
///
/// Entries are real: the splitter phases of bra and ket cancel inside each block.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedDensity {
    j: HalfInt,
    loss: f64,
    blocks: Vec<DensityBlock>,
}

impl ReducedDensity {
    /// Assembles a density from explicit blocks. Block `l` must be square with
    /// side `N + 1 - l`; missing blocks are zero.
    pub fn from_blocks(j: HalfInt, loss: f64, blocks: Vec<(u32, DMatrix<f64>)>) -> Result<Self> {
        if j.twice() < 0 {
            return Err(Error::NegativeSpin(j));
        }
        let n = j.twice() as u32;
        let mut out: Vec<DensityBlock> = Vec::with_capacity(blocks.len());
        for (lost, matrix) in blocks {
            if lost > n {
                return Err(Error::MalformedBlock(format!("block {lost} exceeds N = {n}")));
            }
            let side = (n + 1 - lost) as usize;
            if matrix.nrows() != side || matrix.ncols() != side {
                return Err(Error::MalformedBlock(format!(
                    "block {lost} is {}x{}, expected {side}x{side}",
                    matrix.nrows(),
                    matrix.ncols()
                )));
            }
            if out.iter().any(|b| b.lost == lost) {
                return Err(Error::MalformedBlock(format!("duplicate block {lost}")));
            }
            out.push(DensityBlock { lost, matrix });
        }
        out.sort_by_key(|b| b.lost);
        Ok(ReducedDensity { j, loss, blocks: out })
    }

    pub fn j(&self) -> HalfInt {
        self.j
    }

    pub fn loss(&self) -> f64 {
        self.loss
    }

    pub fn blocks(&self) -> &[DensityBlock] {
        &self.blocks
    }

    pub fn block(&self, lost: u32) -> Option<&DensityBlock> {
        self.blocks.iter().find(|b| b.lost == lost)
    }

    /// `<k+m|_{a'} <j-mu|_b rho' |k'+n>_{a'} |j-nu>_b`, with `k = (j+mu)/2` and
    /// `k' = (j+nu)/2`. Zero across different lost-photon numbers.
    pub fn entry(&self, mu: HalfInt, m: HalfInt, nu: HalfInt, n: HalfInt) -> Option<f64> {
        let k = crate::spin::k_of(self.j, mu).ok()?;
        let kp = crate::spin::k_of(self.j, nu).ok()?;
        SpinRange::new(k).ok()?.check(m).ok()?;
        SpinRange::new(kp).ok()?.check(n).ok()?;
        let lost = k - m;
        if lost != kp - n {
            return Some(0.0);
        }
        let lost = lost.twice() as u32 / 2;
        let Some(block) = self.block(lost) else {
            return Some(0.0);
        };
        let mu_min = block.mu_min(self.j);
        let row = (mu - mu_min).twice() as usize / 2;
        let col = (nu - mu_min).twice() as usize / 2;
        Some(block.matrix[(row, col)])
    }

    pub fn trace(&self) -> f64 {
        self.blocks.iter().map(|b| b.matrix.trace()).sum()
    }

    /// `Tr(rho'^2)`.
    pub fn purity(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| (&b.matrix * &b.matrix).trace())
            .sum()
    }

    /// `max |rho'_{xy} - rho'_{yx}|`.
    pub fn symmetry_defect(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| (&b.matrix - b.matrix.transpose()).amax())
            .fold(0.0, f64::max)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| {
                let sym = (&b.matrix + b.matrix.transpose()) * 0.5;
                SymmetricEigen::new(sym).eigenvalues.min()
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Largest entry-wise difference; blocks missing on one side count as zero.
    pub fn max_abs_diff(&self, other: &ReducedDensity) -> f64 {
        let n = self.j.twice().max(other.j.twice()) as u32;
        if self.j != other.j {
            return f64::INFINITY;
        }
        (0..=n)
            .map(|lost| match (self.block(lost), other.block(lost)) {
                (Some(a), Some(b)) => (&a.matrix - &b.matrix).amax(),
                (Some(a), None) | (None, Some(a)) => a.matrix.amax(),
                (None, None) => 0.0,
            })
            .fold(0.0, f64::max)
    }
}

/// Partial trace over the lost-photon mode, for states of at most
/// [`DEFAULT_DENSITY_CAP`] photons.
pub fn reduced_density(state: &AmplitudeVector, ch: &LossChannel) -> Result<ReducedDensity> {
    reduced_density_capped(state, ch, DEFAULT_DENSITY_CAP)
}

/// [`reduced_density`] with an explicit photon-number cap.
///
/// Block `l` is the outer product of `g_mu = psi_mu d^k_{k-l,k}(theta)` with
/// itself; entries with unequal lost-photon numbers are never formed.
pub fn reduced_density_capped(
    state: &AmplitudeVector,
    ch: &LossChannel,
    max_photons: u32,
) -> Result<ReducedDensity> {
    let n = state.photon_number();
    if n > max_photons {
        return Err(Error::TooManyPhotons { n, max: max_photons });
    }
    let j = state.j();
    let psi = state.as_slice();
    let mut blocks = Vec::with_capacity(n as usize + 1);
    for lost in 0..=n {
        // mu runs from lost - j, i.e. dense index `lost` in psi.
        let g = (lost as usize..psi.len())
            .map(|i| {
                // k = (j + mu) / 2 = i / 2
                let k = HalfInt::from_twice(i as i32);
                let m = k - HalfInt::from_int(lost as i32);
                Ok(psi[i] * d_element(k, m, k, ch.theta())?)
            })
            .collect::<Result<Vec<f64>>>()?;
        let g = nalgebra::DVector::from_vec(g);
        blocks.push(DensityBlock {
            lost,
            matrix: &g * g.transpose(),
        });
    }
    Ok(ReducedDensity {
        j,
        loss: ch.loss(),
        blocks,
    })
}
