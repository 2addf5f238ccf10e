//! Hexagonal tri-sector layout with wrap-around, UE dropping and association.
//!
//! BS indices follow `bs = 3 * site + sector`, with sectors ordered by the
//! azimuths in [`SECTOR_AZIMUTHS_DEG`]. The allocation module relies on this
//! convention through [`site_of`] and [`sector_of`].

use std::f64::consts::PI;
use std::ops::{Add, Sub};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::LinkGrid;

pub const DEFAULT_SITES: usize = 19;
pub const SECTORS_PER_SITE: usize = 3;
pub const SECTOR_AZIMUTHS_DEG: [f64; SECTORS_PER_SITE] = [30.0, 150.0, 270.0];
pub const BS_HEIGHT_M: f64 = 25.0;
pub const UE_HEIGHT_M: f64 = 1.5;
pub const DOWNTILT_DEG: f64 = 12.0;
pub const MIN_BS_UE_DISTANCE_M: f64 = 35.0;

pub const ELEMENT_GAIN_DBI: f64 = 8.0;
pub const HALF_POWER_BEAMWIDTH_DEG: f64 = 65.0;
pub const FRONT_TO_BACK_DB: f64 = 30.0;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ZERO: Point = Point { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dot(self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// Azimuth in degrees, counter-clockwise from the x axis.
    pub fn azimuth_deg(self) -> f64 {
        self.y.atan2(self.x).to_degrees()
    }

    fn rotated(self, angle_rad: f64) -> Self {
        let (s, c) = angle_rad.sin_cos();
        Self::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, rhs: Point) -> Point {
        Point::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, rhs: Point) -> Point {
        Point::new(self.x - rhs.x, self.y - rhs.y)
    }
}

#[inline]
pub fn site_of(bs: usize) -> usize {
    bs / SECTORS_PER_SITE
}

#[inline]
pub fn sector_of(bs: usize) -> usize {
    bs % SECTORS_PER_SITE
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sector {
    pub site_index: usize,
    pub azimuth_deg: f64,
    pub bs_index: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkLayout {
    pub site_positions: Vec<Point>,
    pub sectors: Vec<Sector>,
    pub isd: f64,
    /// Cluster translations; index 0 is the zero vector.
    pub wrap_vectors: Vec<Point>,
}

/// Builds the 19-site hexagonal cluster (centre site, one ring of 6, one ring
/// of 12) with three sectors per site and the 6 wrap-around translations.
pub fn build_layout(isd: f64, n_sites: usize) -> Result<NetworkLayout> {
    if n_sites != DEFAULT_SITES {
        return Err(Error::Layout(format!(
            "only the {DEFAULT_SITES}-site wrap-around cluster is supported, got {n_sites} sites"
        )));
    }
    if !(isd.is_finite() && isd > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "inter-site distance must be positive, got {isd}"
        )));
    }

    // Axial coordinates within hex distance 2 of the origin.
    let mut axial = Vec::new();
    for q in -2i32..=2 {
        for r in -2i32..=2 {
            let ring = q.abs().max(r.abs()).max((q + r).abs());
            if ring <= 2 {
                axial.push((ring, q, r));
            }
        }
    }
    let to_point = |q: i32, r: i32| {
        Point::new(
            isd * (q as f64 + r as f64 / 2.0),
            isd * (r as f64 * 3f64.sqrt() / 2.0),
        )
    };
    axial.sort_by(|a, b| {
        let pa = to_point(a.1, a.2);
        let pb = to_point(b.1, b.2);
        a.0.cmp(&b.0).then(
            pa.azimuth_deg()
                .rem_euclid(360.0)
                .total_cmp(&pb.azimuth_deg().rem_euclid(360.0)),
        )
    });
    let site_positions: Vec<Point> = axial.iter().map(|&(_, q, r)| to_point(q, r)).collect();

    let sectors = (0..n_sites)
        .flat_map(|site| {
            SECTOR_AZIMUTHS_DEG
                .iter()
                .enumerate()
                .map(move |(s, &az)| Sector {
                    site_index: site,
                    azimuth_deg: az,
                    bs_index: site * SECTORS_PER_SITE + s,
                })
        })
        .collect();

    // A 19-cell hexagonal cluster tiles the plane under the shift 3·e1 + 2·e2
    // (i² + ij + j² = 19) and its five 60° rotations.
    let base = to_point(3, 2);
    let mut wrap_vectors = vec![Point::ZERO];
    wrap_vectors.extend((0..6).map(|k| base.rotated(k as f64 * PI / 3.0)));

    Ok(NetworkLayout {
        site_positions,
        sectors,
        isd,
        wrap_vectors,
    })
}

/// Geometry of one BS → UE link, evaluated on the nearest wrap image.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkGeometry {
    pub distance_2d: f64,
    /// UE azimuth relative to the sector boresight, in (−180°, 180°].
    pub horizontal_deg: f64,
    /// UE elevation relative to the down-tilted boresight.
    pub vertical_deg: f64,
}

impl NetworkLayout {
    pub fn n_sites(&self) -> usize {
        self.site_positions.len()
    }

    pub fn n_bs(&self) -> usize {
        self.sectors.len()
    }

    pub fn bs_position(&self, bs: usize) -> Point {
        self.site_positions[self.sectors[bs].site_index]
    }

    /// Displacement from the nearest wrap image of `bs` to `ue_position`.
    pub fn wrap_displacement(&self, bs: usize, ue_position: Point) -> Point {
        let site = self.bs_position(bs);
        let mut best = ue_position - site;
        let mut best_d = best.norm();
        for &v in &self.wrap_vectors[1..] {
            let d = ue_position - (site + v);
            let n = d.norm();
            if n < best_d {
                best = d;
                best_d = n;
            }
        }
        best
    }

    pub fn link_geometry(&self, bs: usize, ue_position: Point, ue_height: f64) -> LinkGeometry {
        let d = self.wrap_displacement(bs, ue_position);
        let distance_2d = d.norm();
        let horizontal_deg = wrap_angle_deg(d.azimuth_deg() - self.sectors[bs].azimuth_deg);
        let elevation_down = (BS_HEIGHT_M - ue_height).atan2(distance_2d).to_degrees();
        LinkGeometry {
            distance_2d,
            horizontal_deg,
            vertical_deg: elevation_down - DOWNTILT_DEG,
        }
    }

    /// Whether `p` lies inside the hexagon of `site` (no wrap).
    fn site_hexagon_contains(&self, site: usize, p: Point) -> bool {
        let rel = p - self.site_positions[site];
        in_hexagon(rel, self.isd)
    }

    /// Whether `p` lies inside the cluster footprint (union of site hexagons).
    pub fn contains(&self, p: Point) -> bool {
        (0..self.n_sites()).any(|s| self.site_hexagon_contains(s, p))
    }
}

/// Site hexagon with apothem `isd / 2` and flat edges facing the neighbours.
fn in_hexagon(rel: Point, isd: f64) -> bool {
    let half = isd / 2.0 + 1e-9;
    (0..3).all(|k| {
        let a = k as f64 * PI / 3.0;
        rel.dot(Point::new(a.cos(), a.sin())).abs() <= half
    })
}

/// Maps an angle in degrees into (−180, 180].
pub fn wrap_angle_deg(a: f64) -> f64 {
    let w = (a + 180.0).rem_euclid(360.0) - 180.0;
    if w == -180.0 {
        180.0
    } else {
        w
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UeDrop {
    pub positions: Vec<Point>,
    /// Serving BS per UE; empty until [`associate_ues`] has run.
    pub association: Vec<usize>,
    pub height: f64,
}

impl UeDrop {
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// UEs grouped by serving BS, each list in ascending UE order.
    pub fn associated_per_bs(&self, n_bs: usize) -> Vec<Vec<usize>> {
        let mut per_bs = vec![Vec::new(); n_bs];
        for (ue, &bs) in self.association.iter().enumerate() {
            per_bs[bs].push(ue);
        }
        per_bs
    }
}

/// Drops `n_ue` UEs uniformly over the cluster footprint, keeping at least
/// [`MIN_BS_UE_DISTANCE_M`] from every site.
pub fn drop_ues<R: Rng + ?Sized>(layout: &NetworkLayout, n_ue: usize, rng: &mut R) -> Result<UeDrop> {
    if n_ue == 0 {
        return Err(Error::InvalidParameter("number of UEs must be positive".into()));
    }
    let circumradius = layout.isd / 3f64.sqrt();
    let half = layout.isd / 2.0;
    let n_sites = layout.n_sites();
    let mut positions = Vec::with_capacity(n_ue);
    // All site hexagons have equal area, so a uniform site choice followed by
    // a uniform point inside the hexagon is uniform over the footprint.
    while positions.len() < n_ue {
        let site = rng.random_range(0..n_sites);
        let rel = Point::new(
            rng.random_range(-circumradius..circumradius),
            rng.random_range(-half..half),
        );
        if !in_hexagon(rel, layout.isd) || rel.norm() < MIN_BS_UE_DISTANCE_M {
            continue;
        }
        positions.push(layout.site_positions[site] + rel);
    }
    Ok(UeDrop {
        positions,
        association: Vec::new(),
        height: UE_HEIGHT_M,
    })
}

/// 3GPP parabolic sector pattern in dBi.
pub fn sector_antenna_gain(horizontal_deg: f64, vertical_deg: f64) -> f64 {
    let a_h = -(12.0 * (horizontal_deg / HALF_POWER_BEAMWIDTH_DEG).powi(2)).min(FRONT_TO_BACK_DB);
    let a_v = -(12.0 * (vertical_deg / HALF_POWER_BEAMWIDTH_DEG).powi(2)).min(FRONT_TO_BACK_DB);
    -(-(a_h + a_v)).min(FRONT_TO_BACK_DB) + ELEMENT_GAIN_DBI
}

/// Serving BS per UE: argmax of the large-scale gain in dB, lowest BS index on ties.
pub fn associate_ues(gains_db: &LinkGrid<f64>) -> Vec<usize> {
    (0..gains_db.n_ue())
        .map(|ue| {
            let mut best = 0;
            let mut best_gain = f64::NEG_INFINITY;
            for bs in 0..gains_db.n_bs() {
                let g = gains_db[(bs, ue)];
                if g > best_gain {
                    best = bs;
                    best_gain = g;
                }
            }
            best
        })
        .collect()
}
