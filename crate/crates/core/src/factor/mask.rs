//! Dense subsets of a box.

use serde::{Deserialize, Serialize};

use crate::geometry::{Region, Site};

/// A subset of a [`Region`], one flag per site in region order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SiteMask {
    region: Region,
    #[serde(with = "bitstring")]
    bits: Vec<bool>,
}

mod bitstring {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(bits: &[bool], s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&bits.iter().map(|&b| if b { '1' } else { '0' }).collect::<String>())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<bool>, D::Error> {
        let text = String::deserialize(d)?;
        text.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(serde::de::Error::custom(format!("bad mask character {other:?}"))),
            })
            .collect()
    }
}

impl SiteMask {
    pub fn empty(region: &Region) -> Self {
        SiteMask { region: region.clone(), bits: vec![false; region.len()] }
    }

    pub fn full(region: &Region) -> Self {
        SiteMask { region: region.clone(), bits: vec![true; region.len()] }
    }

    pub fn from_fn(region: &Region, mut f: impl FnMut(&Site) -> bool) -> Self {
        SiteMask { region: region.clone(), bits: region.sites().map(|s| f(&s)).collect() }
    }

    pub fn region(&self) -> &Region {
        &self.region
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// False for sites outside the region.
    pub fn contains(&self, s: &Site) -> bool {
        self.region.index_of(s).is_some_and(|i| self.bits[i])
    }

    pub fn get(&self, idx: usize) -> bool {
        self.bits[idx]
    }

    pub fn set(&mut self, idx: usize, v: bool) {
        self.bits[idx] = v;
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.bits.iter().any(|&b| b)
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i)
    }

    pub fn sites(&self) -> impl Iterator<Item = Site> + '_ {
        self.indices().map(|i| self.region.site_at(i))
    }

    fn zip(&self, other: &SiteMask, f: impl Fn(bool, bool) -> bool) -> SiteMask {
        assert_eq!(self.region, other.region, "masks over different regions");
        SiteMask { region: self.region.clone(), bits: self.bits.iter().zip(&other.bits).map(|(&a, &b)| f(a, b)).collect() }
    }

    pub fn union(&self, other: &SiteMask) -> SiteMask {
        self.zip(other, |a, b| a || b)
    }

    pub fn intersection(&self, other: &SiteMask) -> SiteMask {
        self.zip(other, |a, b| a && b)
    }

    pub fn difference(&self, other: &SiteMask) -> SiteMask {
        self.zip(other, |a, b| a && !b)
    }

    pub fn complement(&self) -> SiteMask {
        SiteMask { region: self.region.clone(), bits: self.bits.iter().map(|&b| !b).collect() }
    }

    pub fn is_disjoint(&self, other: &SiteMask) -> bool {
        self.intersection(other).is_empty()
    }

    pub fn translate(&self, t: &Site) -> SiteMask {
        SiteMask { region: self.region.translate(t), bits: self.bits.clone() }
    }

    fn strides(&self) -> Vec<usize> {
        let ext = self.region.extents();
        let mut strides = vec![1usize; ext.len()];
        for a in (0..ext.len().saturating_sub(1)).rev() {
            strides[a] = strides[a + 1] * ext[a + 1];
        }
        strides
    }

    /// Sites of the region within ℓ∞ distance `r` of the mask.
    pub fn dilate(&self, r: u64) -> SiteMask {
        let ext = self.region.extents().to_vec();
        let strides = self.strides();
        let r = r as usize;
        let mut bits = self.bits.clone();
        for (axis, &n) in ext.iter().enumerate() {
            let stride = strides[axis];
            let mut next = vec![false; bits.len()];
            for (idx, slot) in next.iter_mut().enumerate() {
                let c = idx / stride % n;
                let lo = c.saturating_sub(r);
                let hi = (c + r).min(n - 1);
                *slot = (lo..=hi).any(|v| bits[idx - c * stride + v * stride]);
            }
            bits = next;
        }
        SiteMask { region: self.region.clone(), bits }
    }

    /// `V \ ∂_r V` where sites outside the region count as members of `V`.
    pub fn trim(&self, r: u64) -> SiteMask {
        self.difference(&self.complement().dilate(r))
    }

    /// Connected components under ℓ∞-adjacency, each sorted, in order of
    /// their least site.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let ext = self.region.extents().to_vec();
        let strides = self.strides();
        let dim = ext.len();
        let mut seen = vec![false; self.bits.len()];
        let mut out = Vec::new();
        for start in 0..self.bits.len() {
            if !self.bits[start] || seen[start] {
                continue;
            }
            seen[start] = true;
            let mut comp = vec![start];
            let mut stack = vec![start];
            while let Some(idx) = stack.pop() {
                let coords: Vec<usize> = (0..dim).map(|a| idx / strides[a] % ext[a]).collect();
                for code in 0..3usize.pow(dim as u32) {
                    let mut nb = 0usize;
                    let mut ok = true;
                    let mut rest = code;
                    for a in 0..dim {
                        let step = rest % 3;
                        rest /= 3;
                        let c = coords[a] as i64 + step as i64 - 1;
                        if c < 0 || c >= ext[a] as i64 {
                            ok = false;
                            break;
                        }
                        nb += c as usize * strides[a];
                    }
                    if ok && self.bits[nb] && !seen[nb] {
                        seen[nb] = true;
                        comp.push(nb);
                        stack.push(nb);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }
}
