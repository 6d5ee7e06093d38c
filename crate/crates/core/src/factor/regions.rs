//! Stage regions of the staged fill, for any dimension.

use crate::factor::layout::{compute_islands, DeterminedZoneLayout, Island};
use crate::factor::mask::SiteMask;
use crate::geometry::Region;
use crate::{Error, Result};

/// Per-site distances to the zones of a layout.
#[derive(Clone, Debug)]
pub struct ZoneGeometry {
    pub g: u64,
    pub window: Region,
    pub zones: Vec<Region>,
    pub islands: Vec<Island>,
    /// Island of each zone.
    pub zone_island: Vec<usize>,
    /// ℓ∞ distance from each window site to the nearest zone.
    pub distance: Vec<u64>,
    /// Island of the nearest zone (lowest index on ties).
    pub island: Vec<Option<usize>>,
}

impl ZoneGeometry {
    pub fn new(layout: &DeterminedZoneLayout) -> Result<Self> {
        let islands = compute_islands(layout)?;
        let zones = layout.zone_regions();
        let mut zone_island = vec![0; zones.len()];
        for (i, isl) in islands.iter().enumerate() {
            for &z in &isl.zones {
                zone_island[z] = i;
            }
        }
        let window = layout.window.clone();
        let mut distance = Vec::with_capacity(window.len());
        let mut island = Vec::with_capacity(window.len());
        for s in window.sites() {
            let best = zones.iter().enumerate().map(|(i, z)| (z.distance_to_site(&s), i)).min();
            distance.push(best.map_or(u64::MAX, |(d, _)| d));
            island.push(best.map(|(_, i)| zone_island[i]));
        }
        Ok(ZoneGeometry { g: layout.params.g, window, zones, islands, zone_island, distance, island })
    }

    fn depths(&self, idx: usize) -> Option<Vec<u64>> {
        let isl = self.island[idx]?;
        Some(self.islands[isl].depths(&self.window.site_at(idx)))
    }

    /// `U_1`: sites at distance more than `g` from every zone.
    pub fn u1(&self) -> SiteMask {
        let mut m = SiteMask::empty(&self.window);
        for (i, &d) in self.distance.iter().enumerate() {
            m.set(i, d > self.g);
        }
        m
    }

    /// `S_2 = ⋃_I I ∩ (T_1(I) × … × T_d(I))`.
    pub fn s2(&self) -> SiteMask {
        let mut m = SiteMask::empty(&self.window);
        for i in 0..self.window.len() {
            if self.distance[i] <= self.g {
                m.set(i, self.depths(i).is_some_and(|d| d.iter().all(|&x| x > 0)));
            }
        }
        m
    }

    /// Union of the zones.
    pub fn zone_union(&self) -> SiteMask {
        let mut m = SiteMask::empty(&self.window);
        for (i, &d) in self.distance.iter().enumerate() {
            m.set(i, d == 0);
        }
        m
    }

    /// `S_{2j}` for `2 ≤ j ≤ d+1`: within `jg` of a zone of island `I`,
    /// the `i`-th smallest coordinate depth at most `(j−2+i)g` for `i < j`,
    /// and the `j`-th smallest above `(2j−2)g` (vacuous when `j = d+1`).
    pub fn formula_region(&self, j: usize) -> SiteMask {
        let g = self.g;
        let ju = j as u64;
        let mut m = SiteMask::empty(&self.window);
        for idx in 0..self.window.len() {
            if self.distance[idx] > ju * g {
                continue;
            }
            let Some(mut depth) = self.depths(idx) else { continue };
            depth.sort_unstable();
            let low = (1..j).all(|i| depth[i - 1] <= (ju - 2 + i as u64) * g);
            let high = depth.get(j - 1).is_none_or(|&x| x > (2 * ju - 2) * g);
            m.set(idx, low && high);
        }
        m
    }

    /// The `d = 2` Stage 4 region: within `2g` of a zone, one coordinate
    /// depth at most `g` and the other above `2g`.
    pub fn planar_s4(&self) -> SiteMask {
        let g = self.g;
        let mut m = SiteMask::empty(&self.window);
        for idx in 0..self.window.len() {
            if self.distance[idx] > 2 * g {
                continue;
            }
            if let Some(d) = self.depths(idx) {
                m.set(idx, (d[0] <= g && d[1] > 2 * g) || (d[1] <= g && d[0] > 2 * g));
            }
        }
        m
    }
}

/// `U_1, U_3, …, U_{2d+1}` and `S_2, S_4, …, S_{2d+2}` from the general
/// formulas, with `U_{2j+1} = V_{2j} \ ∂_g V_{2j}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StageRegions {
    pub odd: Vec<SiteMask>,
    pub even: Vec<SiteMask>,
}

impl StageRegions {
    pub fn compute(layout: &DeterminedZoneLayout) -> Result<Self> {
        let geo = ZoneGeometry::new(layout)?;
        let d = layout.dim;
        let mut odd = vec![geo.u1()];
        let mut even = vec![geo.s2()];
        for j in 2..=d + 1 {
            let v = odd[j - 2].union(&even[j - 2]);
            odd.push(v.trim(geo.g));
            even.push(geo.formula_region(j));
        }
        Ok(StageRegions { odd, even })
    }

    /// First failing invariant: each `S_{2j}` disjoint from `U_{2j−1}`,
    /// and the last `V` covering the window.
    pub fn partition_error(&self) -> Option<String> {
        for (j, (u, s)) in self.odd.iter().zip(&self.even).enumerate() {
            if !u.is_disjoint(s) {
                return Some(format!("S_{} meets U_{}", 2 * j + 2, 2 * j + 1));
            }
        }
        let last = self.odd.last()?.union(self.even.last()?);
        (!last.complement().is_empty()).then(|| format!("V_{} misses {} sites", 2 * self.even.len(), last.complement().count()))
    }
}

/// `S_{2j}` on the layout window; `j = 1` gives the zones.
pub fn general_stage_regions(layout: &DeterminedZoneLayout, j: usize) -> Result<SiteMask> {
    if j < 1 || j > layout.dim + 1 {
        return Err(Error::InvalidParams(format!("stage index j = {j} outside 1..={}", layout.dim + 1)));
    }
    let geo = ZoneGeometry::new(layout)?;
    Ok(if j == 1 { geo.s2() } else { geo.formula_region(j) })
}
