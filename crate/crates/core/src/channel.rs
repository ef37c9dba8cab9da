//! Air-to-ground propagation and the two-hop MIMO signal chain.
//!
//! Path loss is free-space loss plus an excess term weighted by the
//! elevation-dependent line-of-sight probability. All power arithmetic is
//! linear (watts); decibels only appear at the path-loss boundary.

use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;
use rand::Rng;

use crate::fmath::{self, PI};
use crate::{Error, Result};

/// Propagation and receiver constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    /// Environment factor (dimensionless).
    pub mu: f64,
    /// Environment factor per degree of elevation.
    pub psi: f64,
    /// Excess loss under line of sight, dB.
    pub eta_los_db: f64,
    /// Excess loss without line of sight, dB.
    pub eta_nlos_db: f64,
    pub carrier_hz: f64,
    pub light_speed: f64,
    /// Thermal noise power at the receiver, W.
    pub noise_power_w: f64,
    /// Receiver nonlinearity coefficient.
    pub beta: f64,
    /// Standard deviation of the additive downlink noise.
    pub noise_sigma: f64,
}

impl Default for ChannelParams {
    fn default() -> Self {
        Self {
            mu: 9.6,
            psi: 0.15,
            eta_los_db: 1.0,
            eta_nlos_db: 20.0,
            carrier_hz: 6e9,
            light_speed: 3e8,
            noise_power_w: 1e-12,
            beta: 0.01,
            noise_sigma: 0.1,
        }
    }
}

impl ChannelParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("mu", self.mu),
            ("psi", self.psi),
            ("carrier_hz", self.carrier_hz),
            ("light_speed", self.light_speed),
            ("noise_power_w", self.noise_power_w),
        ];
        for (field, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::param(field, format!("must be finite and > 0, got {v}")));
            }
        }
        if !(self.eta_los_db.is_finite() && self.eta_los_db >= 0.0) {
            return Err(Error::param("eta_los_db", "must be finite and >= 0"));
        }
        if !(self.eta_nlos_db.is_finite() && self.eta_nlos_db >= self.eta_los_db) {
            return Err(Error::param("eta_nlos_db", "must be finite and >= eta_los_db"));
        }
        if !(self.beta.is_finite() && self.beta >= 0.0) {
            return Err(Error::param("beta", "must be finite and >= 0"));
        }
        if !(self.noise_sigma.is_finite() && self.noise_sigma >= 0.0) {
            return Err(Error::param("noise_sigma", "must be finite and >= 0"));
        }
        Ok(())
    }
}

/// Relative position of an aerial transceiver with respect to a ground one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkGeometry {
    pub altitude_m: f64,
    pub horizontal_m: f64,
    pub distance_m: f64,
    pub elevation_rad: f64,
}

impl LinkGeometry {
    pub fn new(altitude_m: f64, horizontal_m: f64) -> Result<Self> {
        let elevation_rad = elevation_angle(altitude_m, horizontal_m)?;
        Ok(Self {
            altitude_m,
            horizontal_m,
            distance_m: fmath::hypot(altitude_m, horizontal_m),
            elevation_rad,
        })
    }

    /// Geometry between a point at `altitude_m` and a ground point at
    /// horizontal offset `(dx, dy)`.
    pub fn from_offset(altitude_m: f64, dx: f64, dy: f64) -> Result<Self> {
        Self::new(altitude_m, fmath::hypot(dx, dy))
    }
}

/// Elevation angle `arctan(h / l)`, with the overhead limit `π/2` at `l = 0`.
pub fn elevation_angle(altitude_m: f64, horizontal_m: f64) -> Result<f64> {
    if !(altitude_m.is_finite() && altitude_m > 0.0) {
        return Err(Error::domain(format!(
            "altitude must be finite and > 0, got {altitude_m}"
        )));
    }
    if !(horizontal_m.is_finite() && horizontal_m >= 0.0) {
        return Err(Error::domain(format!(
            "horizontal distance must be finite and >= 0, got {horizontal_m}"
        )));
    }
    if horizontal_m == 0.0 {
        return Ok(PI / 2.0);
    }
    Ok(fmath::atan(altitude_m / horizontal_m))
}

/// Probability of line of sight at the given elevation.
///
/// `1 / (1 + μ·exp(−ψ·(θ_deg − μ)))`, strictly increasing in θ.
pub fn los_probability(elevation_rad: f64, params: &ChannelParams) -> Result<f64> {
    if !(elevation_rad.is_finite() && elevation_rad > 0.0 && elevation_rad <= PI / 2.0) {
        return Err(Error::domain(format!(
            "elevation must lie in (0, pi/2], got {elevation_rad}"
        )));
    }
    let theta_deg = elevation_rad.to_degrees();
    Ok(1.0 / (1.0 + params.mu * fmath::exp(-params.psi * (theta_deg - params.mu))))
}

/// Free-space term `20·log10(4π f_c d / c)` in dB.
pub fn free_space_loss_db(distance_m: f64, params: &ChannelParams) -> Result<f64> {
    if !(distance_m.is_finite() && distance_m > 0.0) {
        return Err(Error::domain(format!(
            "distance must be finite and > 0, got {distance_m}"
        )));
    }
    Ok(20.0 * fmath::log10(4.0 * PI * params.carrier_hz * distance_m / params.light_speed))
}

/// Mean path loss in dB: free-space loss plus the LoS/NLoS excess mixture.
pub fn path_loss_db(geometry: &LinkGeometry, params: &ChannelParams) -> Result<f64> {
    let free_space = free_space_loss_db(geometry.distance_m, params)?;
    let p_los = los_probability(geometry.elevation_rad, params)?;
    Ok(free_space + p_los * params.eta_los_db + (1.0 - p_los) * params.eta_nlos_db)
}

/// Linear SINR `P / (σ² + Σ I_k)`.
pub fn sinr(received_power_w: f64, noise_power_w: f64, interference_w: &[f64]) -> Result<f64> {
    if !(received_power_w.is_finite() && received_power_w >= 0.0) {
        return Err(Error::domain(format!(
            "received power must be >= 0, got {received_power_w}"
        )));
    }
    if !(noise_power_w.is_finite() && noise_power_w > 0.0) {
        return Err(Error::domain(format!("noise power must be > 0, got {noise_power_w}")));
    }
    let mut total = noise_power_w;
    for &i in interference_w {
        if !(i.is_finite() && i >= 0.0) {
            return Err(Error::domain(format!("interference power must be >= 0, got {i}")));
        }
        total += i;
    }
    Ok(received_power_w / total)
}

/// Shannon spectral efficiency `log2(1 + SINR)` in bits/s/Hz.
pub fn spectral_rate(sinr_linear: f64) -> Result<f64> {
    if !(sinr_linear.is_finite() && sinr_linear >= 0.0) {
        return Err(Error::domain(format!("SINR must be >= 0, got {sinr_linear}")));
    }
    Ok(fmath::log2(1.0 + sinr_linear))
}

/// Spectral rate of a link with the given geometry and transmit power.
pub fn link_rate(
    geometry: &LinkGeometry,
    params: &ChannelParams,
    tx_power_w: f64,
    interference_w: &[f64],
) -> Result<f64> {
    if !(tx_power_w.is_finite() && tx_power_w >= 0.0) {
        return Err(Error::domain(format!("transmit power must be >= 0, got {tx_power_w}")));
    }
    let pl = path_loss_db(geometry, params)?;
    let received = tx_power_w / fmath::pow(10.0, pl / 10.0);
    spectral_rate(sinr(received, params.noise_power_w, interference_w)?)
}

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::shape(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        if data.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::domain("matrix entries must be finite"));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: alloc::vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.cols + col]
    }

    pub fn matmul(&self, rhs: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] += a * rhs.data[k * rhs.cols + j];
                }
            }
        }
        Ok(out)
    }
}

/// One standard normal pair via Box-Muller.
pub(crate) fn standard_normal_pair<R: Rng + ?Sized>(rng: &mut R) -> (f64, f64) {
    // u1 in (0, 1] keeps the logarithm finite.
    let u1 = 1.0 - rng.gen::<f64>();
    let u2 = rng.gen::<f64>();
    let r = fmath::sqrt(-2.0 * fmath::log(u1));
    let t = 2.0 * PI * u2;
    (r * fmath::cos(t), r * fmath::sin(t))
}

/// Circularly-symmetric complex Gaussian with `E|z|² = variance`.
fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, variance: f64) -> Complex64 {
    let (a, b) = standard_normal_pair(rng);
    let s = fmath::sqrt(variance / 2.0);
    Complex64::new(a * s, b * s)
}

/// Draws an `n_tx × n_rx` Rayleigh channel with unit-variance entries.
pub fn draw_channel<R: Rng + ?Sized>(n_tx: usize, n_rx: usize, rng: &mut R) -> Result<ComplexMatrix> {
    if n_tx == 0 || n_rx == 0 {
        return Err(Error::domain(format!(
            "channel dimensions must be >= 1, got {n_tx}x{n_rx}"
        )));
    }
    let data = (0..n_tx * n_rx).map(|_| complex_gaussian(rng, 1.0)).collect();
    Ok(ComplexMatrix {
        rows: n_tx,
        cols: n_rx,
        data,
    })
}

/// Signal at the UAV receiver: `X·H_UL + (3/2)·β·|X|²`, with `|·|²`
/// taken elementwise on the transmitted block.
pub fn mimo_uplink(x: &ComplexMatrix, h_ul: &ComplexMatrix, beta: f64) -> Result<ComplexMatrix> {
    if !(beta.is_finite() && beta >= 0.0) {
        return Err(Error::domain(format!("beta must be >= 0, got {beta}")));
    }
    let mut y = x.matmul(h_ul)?;
    if beta > 0.0 {
        if h_ul.rows != h_ul.cols {
            return Err(Error::shape(format!(
                "nonlinear term needs n_t == n_r, got {}x{} channel",
                h_ul.rows, h_ul.cols
            )));
        }
        let k = 1.5 * beta;
        for (out, xi) in y.data.iter_mut().zip(&x.data) {
            *out += Complex64::new(k * xi.norm_sqr(), 0.0);
        }
    }
    Ok(y)
}

/// Signal at the CU/DU: `Y_UL·H_DL` plus complex AWGN with `E|n|² = σ²`.
pub fn mimo_downlink<R: Rng + ?Sized>(
    y_ul: &ComplexMatrix,
    h_dl: &ComplexMatrix,
    noise_sigma: f64,
    rng: &mut R,
) -> Result<ComplexMatrix> {
    if !(noise_sigma.is_finite() && noise_sigma >= 0.0) {
        return Err(Error::domain(format!("noise sigma must be >= 0, got {noise_sigma}")));
    }
    let mut y = y_ul.matmul(h_dl)?;
    if noise_sigma > 0.0 {
        let var = noise_sigma * noise_sigma;
        for z in y.data.iter_mut() {
            *z += complex_gaussian(rng, var);
        }
    }
    Ok(y)
}
