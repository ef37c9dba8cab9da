//! Network throughput over UAV position.
//!
//! The UAV collects uplink traffic from ground UEs and forwards it over one
//! fronthaul link to the associated CU/DU tower. Links use expected-geometry
//! path loss with no intra-cell sampling, so the objective is a deterministic
//! scalar field over position.

use alloc::format;
use alloc::vec::Vec;

use crate::channel::{link_rate, ChannelParams, LinkGeometry};
use crate::fmath;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Position {
    pub x: f64,
    pub y: f64,
    pub h: f64,
}

impl Position {
    pub fn new(x: f64, y: f64, h: f64) -> Self {
        Self { x, y, h }
    }

    fn horizontal_to(&self, x: f64, y: f64) -> f64 {
        fmath::hypot(self.x - x, self.y - y)
    }
}

/// Ground user equipment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ue {
    pub x: f64,
    pub y: f64,
    pub tx_power_w: f64,
}

/// CU/DU tower.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CuSite {
    pub x: f64,
    pub y: f64,
    pub height_m: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkLayout {
    ues: Vec<Ue>,
    cu_sites: Vec<CuSite>,
    association: Vec<bool>,
    uav_tx_power_w: f64,
}

impl NetworkLayout {
    /// UAV fronthaul transmit power used by [`NetworkLayout::with_first_cu`].
    pub const DEFAULT_UAV_TX_POWER_W: f64 = 1.0;

    /// `association` must mark exactly one site.
    pub fn new(ues: Vec<Ue>, cu_sites: Vec<CuSite>, association: Vec<bool>, uav_tx_power_w: f64) -> Result<Self> {
        if cu_sites.is_empty() {
            return Err(Error::param("cu_sites", "at least one CU/DU site is required"));
        }
        if association.len() != cu_sites.len() {
            return Err(Error::param(
                "association",
                format!("{} indicators for {} sites", association.len(), cu_sites.len()),
            ));
        }
        let marked = association.iter().filter(|&&v| v).count();
        if marked != 1 {
            return Err(Error::param(
                "association",
                format!("exactly one site must be selected, got {marked}"),
            ));
        }
        for (i, ue) in ues.iter().enumerate() {
            if !(ue.x.is_finite() && ue.y.is_finite()) {
                return Err(Error::param("ues", format!("UE {i} position must be finite")));
            }
            if !(ue.tx_power_w.is_finite() && ue.tx_power_w >= 0.0) {
                return Err(Error::param("ues", format!("UE {i} transmit power must be >= 0")));
            }
        }
        for (j, cu) in cu_sites.iter().enumerate() {
            if !(cu.x.is_finite() && cu.y.is_finite() && cu.height_m.is_finite() && cu.height_m >= 0.0) {
                return Err(Error::param(
                    "cu_sites",
                    format!("site {j} must have finite position and height >= 0"),
                ));
            }
        }
        if !(uav_tx_power_w.is_finite() && uav_tx_power_w > 0.0) {
            return Err(Error::param("uav_tx_power_w", "must be finite and > 0"));
        }
        Ok(Self {
            ues,
            cu_sites,
            association,
            uav_tx_power_w,
        })
    }

    /// Layout associated with site 0.
    pub fn with_first_cu(ues: Vec<Ue>, cu_sites: Vec<CuSite>) -> Result<Self> {
        let association = (0..cu_sites.len()).map(|j| j == 0).collect();
        Self::new(ues, cu_sites, association, Self::DEFAULT_UAV_TX_POWER_W)
    }

    pub fn ues(&self) -> &[Ue] {
        &self.ues
    }

    pub fn cu_sites(&self) -> &[CuSite] {
        &self.cu_sites
    }

    pub fn association(&self) -> &[bool] {
        &self.association
    }

    pub fn associated_site(&self) -> usize {
        self.association.iter().position(|&v| v).unwrap_or(0)
    }

    pub fn uav_tx_power_w(&self) -> f64 {
        self.uav_tx_power_w
    }

    /// Same layout with a different association.
    pub fn reassociated(&self, association: Vec<bool>) -> Result<Self> {
        Self::new(
            self.ues.clone(),
            self.cu_sites.clone(),
            association,
            self.uav_tx_power_w,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PositionBox {
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
    pub h_range: (f64, f64),
}

impl Default for PositionBox {
    fn default() -> Self {
        Self {
            x_range: (0.0, 400.0),
            y_range: (0.0, 400.0),
            h_range: (100.0, 200.0),
        }
    }
}

impl PositionBox {
    pub fn validate(&self) -> Result<()> {
        let axes = [
            ("x_range", self.x_range),
            ("y_range", self.y_range),
            ("h_range", self.h_range),
        ];
        for (field, (lo, hi)) in axes {
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(Error::param(field, format!("need finite lo <= hi, got [{lo}, {hi}]")));
            }
        }
        Ok(())
    }

    pub fn mid_altitude(&self) -> f64 {
        0.5 * (self.h_range.0 + self.h_range.1)
    }
}

/// Uplink rate from each UE to the UAV, in UE order.
pub fn uplink_rates(uav: Position, layout: &NetworkLayout, params: &ChannelParams) -> Result<Vec<f64>> {
    layout
        .ues
        .iter()
        .map(|ue| {
            let geometry = LinkGeometry::new(uav.h, uav.horizontal_to(ue.x, ue.y))?;
            link_rate(&geometry, params, ue.tx_power_w, &[])
        })
        .collect()
}

/// Fronthaul rate from the UAV to each CU/DU site, in site order.
pub fn fronthaul_rates(uav: Position, layout: &NetworkLayout, params: &ChannelParams) -> Result<Vec<f64>> {
    layout
        .cu_sites
        .iter()
        .map(|cu| {
            let rise = uav.h - cu.height_m;
            if rise <= 0.0 {
                return Err(Error::domain(format!(
                    "UAV at {} m is not above the CU/DU at {} m",
                    uav.h, cu.height_m
                )));
            }
            let geometry = LinkGeometry::new(rise, uav.horizontal_to(cu.x, cu.y))?;
            link_rate(&geometry, params, layout.uav_tx_power_w, &[])
        })
        .collect()
}

/// `Σ_i R_i + Σ_j V_j·R_j` in bits/s/Hz.
pub fn throughput_objective(uav: Position, layout: &NetworkLayout, params: &ChannelParams) -> Result<f64> {
    if !(uav.x.is_finite() && uav.y.is_finite() && uav.h.is_finite()) {
        return Err(Error::domain("UAV position must be finite"));
    }
    let uplink: f64 = uplink_rates(uav, layout, params)?.iter().sum();
    let fronthaul = fronthaul_rates(uav, layout, params)?[layout.associated_site()];
    Ok(uplink + fronthaul)
}

/// Association vector selecting the site with the highest fronthaul rate,
/// lowest index on ties.
pub fn select_cu(uav: Position, layout: &NetworkLayout, params: &ChannelParams) -> Result<Vec<bool>> {
    let rates = fronthaul_rates(uav, layout, params)?;
    let best = crate::agents::argmax(&rates);
    Ok((0..rates.len()).map(|j| j == best).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityReport {
    pub x_in_range: bool,
    pub y_in_range: bool,
    pub h_in_range: bool,
    pub uplink_sum: f64,
    pub fronthaul_rate: f64,
    /// `fronthaul_rate − uplink_sum`; the constraint holds when positive.
    pub fronthaul_margin: f64,
    pub association_valid: bool,
}

impl FeasibilityReport {
    pub fn fronthaul_ok(&self) -> bool {
        self.fronthaul_margin > 0.0
    }

    pub fn feasible(&self) -> bool {
        self.x_in_range && self.y_in_range && self.h_in_range && self.fronthaul_ok() && self.association_valid
    }

    /// Names of the violated position axes.
    pub fn violated_axes(&self) -> Vec<&'static str> {
        [("x", self.x_in_range), ("y", self.y_in_range), ("h", self.h_in_range)]
            .into_iter()
            .filter(|(_, ok)| !ok)
            .map(|(axis, _)| axis)
            .collect()
    }
}

/// Checks the position box, the fronthaul capacity constraint and the
/// association. Rates that cannot be computed count as zero.
pub fn feasibility_check(
    uav: Position,
    layout: &NetworkLayout,
    bounds: &PositionBox,
    params: &ChannelParams,
) -> FeasibilityReport {
    let within = |v: f64, (lo, hi): (f64, f64)| v >= lo && v <= hi;
    let uplink_sum = uplink_rates(uav, layout, params).map(|r| r.iter().sum()).unwrap_or(0.0);
    let fronthaul_rate: f64 = fronthaul_rates(uav, layout, params)
        .map(|r| {
            r.iter()
                .zip(&layout.association)
                .filter(|(_, &v)| v)
                .map(|(r, _)| r)
                .sum()
        })
        .unwrap_or(0.0);
    FeasibilityReport {
        x_in_range: within(uav.x, bounds.x_range),
        y_in_range: within(uav.y, bounds.y_range),
        h_in_range: within(uav.h, bounds.h_range),
        uplink_sum,
        fronthaul_rate,
        fronthaul_margin: fronthaul_rate - uplink_sum,
        association_valid: layout.association.iter().filter(|&&v| v).count() == 1,
    }
}

/// One sample of the probed field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldPoint {
    pub x: f64,
    pub y: f64,
    pub value: f64,
    /// Strictly above its 4-neighbors.
    pub local_max_4: bool,
    /// Strictly above its 8-neighbors.
    pub local_max_8: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeReport {
    pub resolution: usize,
    pub altitude_m: f64,
    /// Row-major in `y`, `x` varying fastest.
    pub field: Vec<FieldPoint>,
    /// Indices into `field` of the strict 4-neighborhood maxima.
    pub local_maxima: Vec<usize>,
    /// Index into `field` of the global maximum, first in scan order on ties.
    pub global_max: usize,
}

impl ProbeReport {
    pub fn value_at(&self, ix: usize, iy: usize) -> f64 {
        self.field[iy * self.resolution + ix].value
    }
}

/// Scans `resolution × resolution` points over the box at mid-band altitude,
/// reselecting the CU/DU at every point.
pub fn nonconvexity_probe(
    layout: &NetworkLayout,
    bounds: &PositionBox,
    resolution: usize,
    params: &ChannelParams,
) -> Result<ProbeReport> {
    if resolution < 3 {
        return Err(Error::param(
            "resolution",
            format!("need at least 3 points per axis, got {resolution}"),
        ));
    }
    bounds.validate()?;
    params.validate()?;
    let h = bounds.mid_altitude();
    let coord = |(lo, hi): (f64, f64), i: usize| lo + (hi - lo) * i as f64 / (resolution - 1) as f64;
    let mut values = Vec::with_capacity(resolution * resolution);
    for iy in 0..resolution {
        for ix in 0..resolution {
            let uav = Position::new(coord(bounds.x_range, ix), coord(bounds.y_range, iy), h);
            let layout = layout.reassociated(select_cu(uav, layout, params)?)?;
            values.push((uav.x, uav.y, throughput_objective(uav, &layout, params)?));
        }
    }
    let at = |ix: isize, iy: isize| -> Option<f64> {
        let n = resolution as isize;
        (ix >= 0 && iy >= 0 && ix < n && iy < n).then(|| values[(iy * n + ix) as usize].2)
    };
    let mut field = Vec::with_capacity(values.len());
    let mut local_maxima = Vec::new();
    let mut global_max = 0;
    for (k, &(x, y, value)) in values.iter().enumerate() {
        let (ix, iy) = ((k % resolution) as isize, (k / resolution) as isize);
        let above = |offsets: &[(isize, isize)]| {
            offsets
                .iter()
                .filter_map(|&(dx, dy)| at(ix + dx, iy + dy))
                .all(|v| value > v)
        };
        let cross = [(1, 0), (-1, 0), (0, 1), (0, -1)];
        let diagonal = [(1, 1), (1, -1), (-1, 1), (-1, -1)];
        let local_max_4 = above(&cross);
        let local_max_8 = local_max_4 && above(&diagonal);
        if local_max_4 {
            local_maxima.push(k);
        }
        if value > values[global_max].2 {
            global_max = k;
        }
        field.push(FieldPoint {
            x,
            y,
            value,
            local_max_4,
            local_max_8,
        });
    }
    Ok(ProbeReport {
        resolution,
        altitude_m: h,
        field,
        local_maxima,
        global_max,
    })
}

/// Two UE clusters in opposite corners of the default box with one CU/DU
/// at the middle of the south edge.
pub fn two_cluster_layout() -> NetworkLayout {
    let mut ues = Vec::new();
    for (cx, cy) in [(40.0, 40.0), (360.0, 360.0)] {
        for (dx, dy) in [(-10.0, -10.0), (10.0, -10.0), (-10.0, 10.0), (10.0, 10.0)] {
            ues.push(Ue {
                x: cx + dx,
                y: cy + dy,
                tx_power_w: 0.1,
            });
        }
    }
    let cu = alloc::vec![CuSite {
        x: 200.0,
        y: 0.0,
        height_m: 30.0
    }];
    NetworkLayout::new(ues, cu, alloc::vec![true], 0.1).expect("static layout is valid")
}
