//! Backtracking over finite site sets subject to forbidden patterns.
//!
//! A [`LocalProblem`] fixes an ordered list of variable sites together with
//! a context assigning symbols to some non-variable sites. Every placement
//! of a forbidden pattern that touches a variable and lies inside
//! variables ∪ context becomes a constraint. Variables are filled in
//! coordinate-tuple order and symbols are tried in alphabet order, so
//! solutions are reported in lexicographic order.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::ops::ControlFlow;

use crate::geometry::Site;
use crate::pattern::{Pattern, Symbol};
use crate::{Error, Result};

/// Caps on search effort. Exceeding one is reported as
/// [`Error::BudgetExceeded`], never as a truncated answer.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchBudget {
    /// Symbol trials allowed in a single search.
    pub max_nodes: u64,
    /// Variables allowed in a single problem.
    pub max_sites: usize,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget { max_nodes: 200_000_000, max_sites: 1 << 16 }
    }
}

type Trigger = Box<[(u32, Symbol)]>;

#[derive(Clone, Debug)]
struct Constraint {
    lits: Box<[(u32, Symbol)]>,
}

#[derive(Clone, Debug)]
pub struct LocalProblem {
    sites: Vec<Site>,
    index: HashMap<Site, u32>,
    constraints: Vec<Constraint>,
    alphabet_len: u16,
}

/// Result of [`LocalProblem::select`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Selection {
    pub symbols: Vec<Symbol>,
    /// The requested index exceeded the number of solutions and the
    /// maximal solution was returned instead.
    pub clamped: bool,
    /// Solutions seen before the selection was made.
    pub seen: u128,
}

impl LocalProblem {
    /// `forbidden` patterns are used as given (any translate counts).
    /// `context` returns the fixed symbol at a non-variable site, or `None`
    /// for sites outside the domain.
    pub fn new(
        forbidden: &[Pattern],
        alphabet_len: usize,
        mut sites: Vec<Site>,
        context: impl Fn(&Site) -> Option<Symbol>,
        budget: &SearchBudget,
    ) -> Result<Self> {
        sites.sort();
        sites.dedup();
        if sites.len() > budget.max_sites {
            return Err(Error::BudgetExceeded(format!(
                "{} variable sites exceed the limit of {}",
                sites.len(),
                budget.max_sites
            )));
        }
        let index: HashMap<Site, u32> = sites.iter().enumerate().map(|(i, s)| (s.clone(), i as u32)).collect();
        let mut seen: HashSet<(usize, Site)> = HashSet::new();
        let mut constraints = Vec::new();
        for (fi, f) in forbidden.iter().enumerate() {
            let cells: Vec<(&Site, Symbol)> = f.iter().collect();
            for s in &sites {
                for (off, _) in &cells {
                    let t = s - *off;
                    if !seen.insert((fi, t.clone())) {
                        continue;
                    }
                    let mut lits = Vec::with_capacity(cells.len());
                    let mut live = true;
                    for (o, a) in &cells {
                        let site = *o + &t;
                        if let Some(&v) = index.get(&site) {
                            lits.push((v, *a));
                        } else if context(&site) != Some(*a) {
                            live = false;
                            break;
                        }
                    }
                    if live {
                        lits.sort();
                        lits.dedup();
                        constraints.push(Constraint { lits: lits.into_boxed_slice() });
                    }
                }
            }
        }
        Ok(LocalProblem { sites, index, constraints, alphabet_len: alphabet_len as u16 })
    }

    pub fn sites(&self) -> &[Site] {
        &self.sites
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn var(&self, s: &Site) -> Option<usize> {
        self.index.get(s).map(|&v| v as usize)
    }

    pub fn has_constraints(&self) -> bool {
        !self.constraints.is_empty()
    }

    /// Pins built from a pattern whose sites are variables of this problem.
    pub fn pins_from(&self, w: &Pattern) -> Vec<Option<Symbol>> {
        let mut pins = vec![None; self.sites.len()];
        for (s, a) in w.iter() {
            let v = self.var(s).expect("pinned site must be a variable");
            pins[v] = Some(a);
        }
        pins
    }

    /// Depth-first enumeration. `visit` sees each full assignment in
    /// lexicographic order and may stop the search. Returns `Ok(true)` if
    /// the search space was exhausted.
    pub fn search(
        &self,
        pins: &[Option<Symbol>],
        budget: &SearchBudget,
        mut visit: impl FnMut(&[Symbol]) -> ControlFlow<()>,
    ) -> Result<bool> {
        let n = self.sites.len();
        assert_eq!(pins.len(), n);
        let mut triggers: Vec<Vec<Trigger>> = vec![Vec::new(); n];
        for c in &self.constraints {
            let mut trigger = None;
            let mut free = Vec::with_capacity(c.lits.len());
            let mut matches_pins = true;
            for &(v, a) in c.lits.iter() {
                match pins[v as usize] {
                    Some(p) if p != a => {
                        matches_pins = false;
                        break;
                    }
                    Some(_) => {}
                    None => {
                        trigger = Some(v);
                        free.push((v, a));
                    }
                }
            }
            if !matches_pins {
                continue;
            }
            match trigger {
                // Violated by the pins alone.
                None => return Ok(true),
                Some(t) => triggers[t as usize].push(free.into_boxed_slice()),
            }
        }

        let mut assign: Vec<Symbol> = pins.iter().map(|p| p.unwrap_or(Symbol(0))).collect();
        if n == 0 {
            return Ok(visit(&assign).is_continue());
        }
        let mut next = vec![0u16; n];
        // Conflict-directed backjumping: `conflicts[i]` holds earlier
        // variables whose values ruled out some symbol at `i`; `chrono[i]`
        // is set once a solution was found below `i`.
        let mut conflicts: Vec<BTreeSet<u32>> = vec![BTreeSet::new(); n];
        let mut chrono = vec![false; n];
        let mut nodes: u64 = 0;
        let mut i = 0usize;
        loop {
            let cand = match pins[i] {
                Some(p) => (next[i] == 0).then_some(p),
                None => (next[i] < self.alphabet_len).then_some(Symbol(next[i])),
            };
            let Some(a) = cand else {
                let target = if chrono[i] || pins[i].is_some() {
                    i.checked_sub(1)
                } else {
                    conflicts[i].last().map(|&h| h as usize)
                };
                let Some(h) = target else {
                    return Ok(true);
                };
                let carried = std::mem::take(&mut conflicts[i]);
                if chrono[i] {
                    chrono[h] = true;
                }
                conflicts[h].extend(carried.into_iter().filter(|&v| (v as usize) < h));
                for j in h + 1..=i {
                    next[j] = 0;
                    conflicts[j].clear();
                    chrono[j] = false;
                }
                i = h;
                continue;
            };
            next[i] += 1;
            nodes += 1;
            if nodes > budget.max_nodes {
                return Err(Error::BudgetExceeded(format!("more than {} search nodes", budget.max_nodes)));
            }
            assign[i] = a;
            let violated = triggers[i]
                .iter()
                .find(|lits| lits.iter().all(|&(v, b)| assign[v as usize] == b));
            if let Some(lits) = violated {
                conflicts[i].extend(lits.iter().map(|&(v, _)| v).filter(|&v| (v as usize) < i));
                continue;
            }
            if i + 1 == n {
                chrono[i] = true;
                if visit(&assign).is_break() {
                    return Ok(false);
                }
            } else {
                i += 1;
            }
        }
    }

    pub fn first(&self, pins: &[Option<Symbol>], budget: &SearchBudget) -> Result<Option<Vec<Symbol>>> {
        let mut found = None;
        self.search(pins, budget, |a| {
            found = Some(a.to_vec());
            ControlFlow::Break(())
        })?;
        Ok(found)
    }

    /// Number of solutions. Variables are assigned in order, keeping as
    /// state only those that still share a constraint with a later one.
    pub fn count(&self, pins: &[Option<Symbol>], budget: &SearchBudget) -> Result<u128> {
        let n = self.sites.len();
        if pins.len() != n {
            return Err(Error::InvalidParams(format!("{} pins for {n} variables", pins.len())));
        }
        if self.constraints.iter().any(|c| c.lits.is_empty()) {
            return Ok(0);
        }
        let mut closing: Vec<Vec<&Constraint>> = vec![Vec::new(); n];
        let mut last_use: Vec<Option<usize>> = vec![None; n];
        for c in &self.constraints {
            let hi = c.lits.iter().map(|l| l.0 as usize).max().expect("nonempty");
            closing[hi].push(c);
            for &(v, _) in c.lits.iter() {
                last_use[v as usize] = last_use[v as usize].max(Some(hi));
            }
        }
        let mut frontier: Vec<usize> = Vec::new();
        let mut states: HashMap<Vec<Symbol>, u128> = HashMap::from([(Vec::new(), 1)]);
        let mut pos = vec![usize::MAX; n];
        let mut nodes: u64 = 0;
        let mut values: Vec<Symbol> = Vec::new();
        for i in 0..n {
            for (k, &v) in frontier.iter().enumerate() {
                pos[v] = k;
            }
            pos[i] = frontier.len();
            let keep: Vec<usize> = frontier.iter().copied().chain([i]).filter(|&v| last_use[v] > Some(i)).collect();
            let keep_pos: Vec<usize> = keep.iter().map(|&v| pos[v]).collect();
            let choices: Vec<Symbol> = match pins[i] {
                Some(a) => vec![a],
                None => (0..self.alphabet_len).map(Symbol).collect(),
            };
            let mut next: HashMap<Vec<Symbol>, u128> = HashMap::new();
            for (state, count) in states {
                values.clear();
                values.extend_from_slice(&state);
                values.push(Symbol(0));
                for &a in &choices {
                    nodes += 1;
                    if nodes > budget.max_nodes {
                        return Err(Error::BudgetExceeded(format!("more than {} counting steps", budget.max_nodes)));
                    }
                    values[state.len()] = a;
                    if closing[i].iter().any(|c| c.lits.iter().all(|&(v, b)| values[pos[v as usize]] == b)) {
                        continue;
                    }
                    let key: Vec<Symbol> = keep_pos.iter().map(|&k| values[k]).collect();
                    let slot = next.entry(key).or_insert(0);
                    *slot = slot.checked_add(count).ok_or(Error::RankOverflow)?;
                }
            }
            states = next;
            frontier = keep;
        }
        states.into_values().try_fold(0u128, |acc, c| acc.checked_add(c).ok_or(Error::RankOverflow))
    }

    /// The solution with 0-based index `n` among those passing `accept`,
    /// in lexicographic order; if there are fewer, the last one (the
    /// maximal element) with `clamped` set. `None` when nothing passes.
    pub fn select(
        &self,
        pins: &[Option<Symbol>],
        n: u128,
        budget: &SearchBudget,
        mut accept: impl FnMut(&[Symbol]) -> Result<bool>,
    ) -> Result<Option<Selection>> {
        let mut seen: u128 = 0;
        let mut last: Option<Vec<Symbol>> = None;
        let mut failure = None;
        let mut hit = false;
        self.search(pins, budget, |a| match accept(a) {
            Err(e) => {
                failure = Some(e);
                ControlFlow::Break(())
            }
            Ok(false) => ControlFlow::Continue(()),
            Ok(true) => {
                last = Some(a.to_vec());
                if seen == n {
                    hit = true;
                    return ControlFlow::Break(());
                }
                seen += 1;
                ControlFlow::Continue(())
            }
        })?;
        if let Some(e) = failure {
            return Err(e);
        }
        Ok(last.map(|symbols| Selection { symbols, clamped: !hit, seen }))
    }
}
