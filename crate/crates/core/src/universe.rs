//! The depth-bounded Herbrand universe `Herb_d` and grounding over it.
//!
//! Every operation that grounds terms uses the same clipping rule: an
//! instance with a component deeper than `d` is discarded.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::term::{Signature, Term, TermTuple, Var};

/// Upper bound on `|Herb_d|`; larger universes are rejected up front.
pub const MAX_UNIVERSE_SIZE: usize = 1 << 21;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum UniverseError {
    #[error("the signature has no constants, so the Herbrand universe is empty")]
    NoConstants,
    #[error("the Herbrand universe at depth {depth} exceeds {MAX_UNIVERSE_SIZE} terms")]
    TooLarge { depth: usize },
}

/// A signature together with a depth bound. The ground terms are enumerated
/// once on construction.
#[derive(Clone, Debug)]
pub struct Universe {
    signature: Signature,
    depth: usize,
    herb: Arc<[Term]>,
    // prefix[k] = number of terms of depth <= k
    prefix: Arc<[usize]>,
}

impl PartialEq for Universe {
    fn eq(&self, other: &Self) -> bool {
        self.depth == other.depth
            && self.signature.constants() == other.signature.constants()
            && self.signature.functions() == other.signature.functions()
    }
}

impl Universe {
    pub fn new(signature: Signature, depth: usize) -> Result<Universe, UniverseError> {
        if signature.constants().is_empty() {
            return Err(UniverseError::NoConstants);
        }
        let constants: Vec<Term> = signature
            .constants()
            .iter()
            .map(|c| Term::App(c.clone(), Vec::new()))
            .collect();
        let mut levels: Vec<Vec<Term>> = vec![constants];
        // all[k] holds every term of depth <= k
        let mut all: Vec<Term> = levels[0].clone();
        for k in 1..=depth {
            let mut fresh = Vec::new();
            for (f, &arity) in signature.functions() {
                let total = all.len().checked_pow(arity as u32).unwrap_or(usize::MAX);
                let shallow = all.len() - levels[k - 1].len();
                let without_new = shallow.checked_pow(arity as u32).unwrap_or(usize::MAX);
                let count = total.saturating_sub(without_new);
                if fresh.len().saturating_add(count).saturating_add(all.len()) > MAX_UNIVERSE_SIZE {
                    return Err(UniverseError::TooLarge { depth });
                }
                let mut idx = vec![0usize; arity];
                'odometer: loop {
                    let args: Vec<Term> = idx.iter().map(|&i| all[i].clone()).collect();
                    if args.iter().any(|a| a.depth() == k - 1) {
                        fresh.push(Term::App(f.clone(), args));
                    }
                    for slot in idx.iter_mut().rev() {
                        *slot += 1;
                        if *slot < all.len() {
                            continue 'odometer;
                        }
                        *slot = 0;
                    }
                    break;
                }
            }
            fresh.sort();
            all.extend(fresh.iter().cloned());
            levels.push(fresh);
        }
        let mut prefix = Vec::with_capacity(depth + 1);
        let mut running = 0;
        for level in &levels {
            running += level.len();
            prefix.push(running);
        }
        Ok(Universe {
            signature,
            depth,
            herb: all.into(),
            prefix: prefix.into(),
        })
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// `Herb_d`, ordered by depth and then lexicographically.
    pub fn ground_terms(&self) -> &[Term] {
        &self.herb
    }

    /// Ground terms of depth at most `k` (a prefix of [`Self::ground_terms`]).
    pub fn ground_terms_up_to(&self, k: usize) -> &[Term] {
        &self.herb[..self.prefix[k.min(self.depth)]]
    }

    pub fn contains(&self, t: &Term) -> bool {
        t.is_ground() && t.depth() <= self.depth && self.signature.admits(t)
    }

    pub fn contains_tuple(&self, t: &TermTuple) -> bool {
        t.terms().iter().all(|c| self.contains(c))
    }

    /// Calls `visit` with every assignment of the variables of `terms` to
    /// members of `Herb_d` under which no term exceeds depth `d`.
    ///
    /// Each variable only ranges over terms that fit below its shallowest
    /// occurrence, so clipped instances are mostly never built.
    pub fn for_each_grounding<'a, I, F>(&self, terms: I, mut visit: F)
    where
        I: IntoIterator<Item = &'a Term> + Clone,
        F: FnMut(&BTreeMap<Var, Term>),
    {
        let mut budgets: BTreeMap<Var, usize> = BTreeMap::new();
        for t in terms.clone() {
            // variables count as depth 0, so this bounds every instance from below
            if t.depth() > self.depth {
                return;
            }
            collect_budgets(t, 0, self.depth, &mut budgets);
        }
        let vars: Vec<Var> = budgets.keys().cloned().collect();
        let domains: Vec<&[Term]> = vars
            .iter()
            .map(|v| self.ground_terms_up_to(budgets[v]))
            .collect();
        let mut assignment: BTreeMap<Var, Term> = vars
            .iter()
            .zip(&domains)
            .map(|(v, d)| (v.clone(), d[0].clone()))
            .collect();
        let mut idx = vec![0usize; vars.len()];
        loop {
            let fits = terms
                .clone()
                .into_iter()
                .all(|t| t.substitute(&assignment).depth() <= self.depth);
            if fits {
                visit(&assignment);
            }
            let mut pos = vars.len();
            loop {
                if pos == 0 {
                    return;
                }
                pos -= 1;
                idx[pos] += 1;
                if idx[pos] < domains[pos].len() {
                    assignment.insert(vars[pos].clone(), domains[pos][idx[pos]].clone());
                    break;
                }
                idx[pos] = 0;
                assignment.insert(vars[pos].clone(), domains[pos][0].clone());
            }
        }
    }
}

fn collect_budgets(t: &Term, at: usize, d: usize, budgets: &mut BTreeMap<Var, usize>) {
    match t {
        Term::Var(v) => {
            let b = d.saturating_sub(at);
            budgets
                .entry(v.clone())
                .and_modify(|e| *e = (*e).min(b))
                .or_insert(b);
        }
        Term::App(_, args) => args
            .iter()
            .for_each(|a| collect_budgets(a, at + 1, d, budgets)),
    }
}

pub fn enumerate_ground(u: &Universe) -> Vec<Term> {
    u.ground_terms().to_vec()
}

/// All ground instances of `t` over `Herb_d`, clipped at depth `d`.
pub fn ground_instances(t: &TermTuple, u: &Universe) -> BTreeSet<TermTuple> {
    let mut out = BTreeSet::new();
    if t.is_ground() {
        if t.max_depth() <= u.depth() {
            out.insert(t.clone());
        }
        return out;
    }
    u.for_each_grounding(t.terms(), |theta| {
        out.insert(t.substitute(theta));
    });
    out
}
