//! The surjection ψ from surrounded patterns to digit tuples.

use serde::{Deserialize, Serialize};

use crate::pattern::Pattern;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CodecDomain {
    /// Only ranks are given; the domain is `0..size`.
    Size(u128),
    /// Explicit domain in lexicographic order.
    Enumerated(Vec<Pattern>),
}

/// Mixed-radix expansion of a rank over `ranges`, digits shifted to start
/// at 1, with the last digit least significant.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PsiCodec {
    ranges: Vec<u128>,
    domain: CodecDomain,
}

impl PsiCodec {
    pub fn new(ranges: Vec<u128>, domain: CodecDomain) -> Result<Self> {
        if ranges.is_empty() || ranges.contains(&0) {
            return Err(Error::InvalidParams("codec ranges must be positive".into()));
        }
        if let CodecDomain::Enumerated(list) = &domain {
            if list.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidParams("codec domain must be sorted and distinct".into()));
            }
        }
        Ok(PsiCodec { ranges, domain })
    }

    /// Ranges for `d = 2`: the zone language size, four edge ranges
    /// `|A|^{3g(k−3g+m)}` and four corner ranges `|A|^{49g²}`. Values that
    /// overflow saturate at `u128::MAX`.
    pub fn planar_ranges(zone_language: u128, alphabet: usize, g: u64, k: u64, m: u64) -> Vec<u128> {
        let pow = |e: u64| -> u128 {
            u32::try_from(e).ok().and_then(|e| (alphabet as u128).checked_pow(e)).unwrap_or(u128::MAX)
        };
        let edge = pow(3 * g * (k + m).saturating_sub(3 * g));
        let corner = pow(49 * g * g);
        let mut r = vec![zone_language];
        r.extend([edge; 4]);
        r.extend([corner; 4]);
        r
    }

    pub fn ranges(&self) -> &[u128] {
        &self.ranges
    }

    pub fn domain(&self) -> &CodecDomain {
        &self.domain
    }

    pub fn domain_size(&self) -> u128 {
        match &self.domain {
            CodecDomain::Size(n) => *n,
            CodecDomain::Enumerated(list) => list.len() as u128,
        }
    }

    /// `∏ R_j`, or `None` if it does not fit in 128 bits.
    pub fn product(&self) -> Option<u128> {
        self.ranges.iter().try_fold(1u128, |acc, &r| acc.checked_mul(r))
    }

    /// The domain is at least as large as the digit space.
    pub fn is_surjective(&self) -> bool {
        self.product().is_some_and(|p| self.domain_size() >= p)
    }

    /// Digits of a rank. Ranks at or beyond `∏ R_j` give the maximal tuple.
    pub fn encode_rank(&self, rank: u128) -> Result<Vec<u128>> {
        if rank >= self.domain_size() {
            return Err(Error::NotInDomain);
        }
        match self.product() {
            Some(p) if rank >= p => return Ok(self.ranges.clone()),
            _ => {}
        }
        let mut digits = vec![0u128; self.ranges.len()];
        let mut rest = rank;
        for (d, &r) in digits.iter_mut().zip(&self.ranges).rev() {
            *d = rest % r + 1;
            rest /= r;
        }
        Ok(digits)
    }

    pub fn rank_of(&self, w: &Pattern) -> Result<u128> {
        match &self.domain {
            CodecDomain::Enumerated(list) => list.binary_search(w).map(|i| i as u128).map_err(|_| Error::NotInDomain),
            CodecDomain::Size(_) => Err(Error::NotInDomain),
        }
    }

    pub fn encode(&self, w: &Pattern) -> Result<Vec<u128>> {
        self.encode_rank(self.rank_of(w)?)
    }

    /// Inverse of [`encode_rank`](Self::encode_rank) below `∏ R_j`.
    pub fn decode(&self, digits: &[u128]) -> Result<u128> {
        if digits.len() != self.ranges.len() {
            return Err(Error::InvalidParams(format!("expected {} digits", self.ranges.len())));
        }
        let mut rank: u128 = 0;
        for (&d, &r) in digits.iter().zip(&self.ranges) {
            if d == 0 || d > r {
                return Err(Error::InvalidParams(format!("digit {d} outside 1..={r}")));
            }
            rank = rank.checked_mul(r).and_then(|x| x.checked_add(d - 1)).ok_or(Error::RankOverflow)?;
        }
        Ok(rank)
    }

    /// Surrounded pattern with the given digits, for an enumerated domain.
    pub fn preimage(&self, digits: &[u128]) -> Result<Pattern> {
        let rank = self.decode(digits)?;
        match &self.domain {
            CodecDomain::Enumerated(list) => list.get(rank as usize).cloned().ok_or(Error::NotInDomain),
            CodecDomain::Size(_) => Err(Error::NotInDomain),
        }
    }
}
