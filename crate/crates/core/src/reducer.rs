//! Compiles dynamic formulas into equivalent static ones.
//!
//! Rewriting is innermost-first: the body of a modality is reduced to a
//! static formula before the modality is pushed through it. Knowledge
//! operators keep their written form where the update leaves them alone, so
//! static input comes back unchanged.

use thiserror::Error;

use crate::dynamics::{DynamicsError, EventRegistry, ReadingEventModel};
use crate::syntax::{EventRef, Formula, Group, GroupFamily, ReadMapExpr, SyntaxError};

/// Default bound on rewrite steps.
pub const DEFAULT_STEP_LIMIT: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReduceError {
    #[error("event modality present; only semi-public actions are reduced here")]
    EventOperatorPresent,
    #[error("semi-public action present; only event modalities are reduced here")]
    SemiPublicOperatorPresent,
    #[error("no reduction law for `{0}` after an event")]
    UnsupportedFragment(String),
    #[error("rewrite step limit of {0} exceeded")]
    StepLimit(usize),
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
}

/// Counters from one reduction.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ReduceStats {
    /// Law applications (one per node a modality is pushed through).
    pub steps: usize,
    /// Dynamic modalities eliminated.
    pub modalities: usize,
}

struct Reducer<'a> {
    registry: Option<&'a EventRegistry>,
    allow_semi: bool,
    allow_event: bool,
    limit: usize,
    stats: ReduceStats,
}

/// Removes `[!α]` modalities. Fails on event modalities.
pub fn reduce_semipublic(f: &Formula) -> Result<Formula, ReduceError> {
    Reducer::new(None, true, false).run(f)
}

/// Removes `[E.e]` modalities. Fails on semi-public actions and on common
/// knowledge over several groups beneath an event.
pub fn reduce_event(f: &Formula, registry: &EventRegistry) -> Result<Formula, ReduceError> {
    Reducer::new(Some(registry), false, true).run(f)
}

/// Removes every dynamic modality, applying whichever law set fits each node.
pub fn reduce(f: &Formula, registry: Option<&EventRegistry>) -> Result<Formula, ReduceError> {
    reduce_with_stats(f, registry, DEFAULT_STEP_LIMIT).map(|(g, _)| g)
}

pub fn reduce_with_stats(
    f: &Formula,
    registry: Option<&EventRegistry>,
    limit: usize,
) -> Result<(Formula, ReduceStats), ReduceError> {
    let mut r = Reducer::new(registry, true, true);
    r.limit = limit;
    let g = r.run(f)?;
    Ok((g, r.stats))
}

enum Kind {
    K,
    D,
    C,
    Cd,
}

impl<'a> Reducer<'a> {
    fn new(registry: Option<&'a EventRegistry>, allow_semi: bool, allow_event: bool) -> Self {
        Reducer {
            registry,
            allow_semi,
            allow_event,
            limit: DEFAULT_STEP_LIMIT,
            stats: ReduceStats::default(),
        }
    }

    fn run(&mut self, f: &Formula) -> Result<Formula, ReduceError> {
        let g = self.static_form(f)?;
        debug_assert!(g.is_static());
        Ok(g)
    }

    fn tick(&mut self) -> Result<(), ReduceError> {
        self.stats.steps += 1;
        if self.stats.steps > self.limit {
            Err(ReduceError::StepLimit(self.limit))
        } else {
            Ok(())
        }
    }

    fn static_form(&mut self, f: &Formula) -> Result<Formula, ReduceError> {
        Ok(match f {
            Formula::True | Formula::False | Formula::Atom(_) | Formula::Comp(..) => f.clone(),
            Formula::Not(a) => Formula::not(self.static_form(a)?),
            Formula::And(a, b) => Formula::and(self.static_form(a)?, self.static_form(b)?),
            Formula::Or(a, b) => Formula::or(self.static_form(a)?, self.static_form(b)?),
            Formula::Implies(a, b) => Formula::implies(self.static_form(a)?, self.static_form(b)?),
            Formula::Iff(a, b) => Formula::iff(self.static_form(a)?, self.static_form(b)?),
            Formula::K(x, a) => Formula::k(x.clone(), self.static_form(a)?),
            Formula::D(g, a) => Formula::d(g.clone(), self.static_form(a)?),
            Formula::C(g, a) => Formula::c(g.clone(), self.static_form(a)?),
            Formula::Cd(fam, a) => Formula::cd(fam.clone(), self.static_form(a)?),
            Formula::SemiPub(alpha, a) => {
                if !self.allow_semi {
                    return Err(ReduceError::SemiPublicOperatorPresent);
                }
                let body = self.static_form(a)?;
                self.stats.modalities += 1;
                self.push_semi(alpha, &body)?
            }
            Formula::Event(r, a) => {
                if !self.allow_event {
                    return Err(ReduceError::EventOperatorPresent);
                }
                let body = self.static_form(a)?;
                let em = self.event_model(r)?;
                let e = em.event_index(&r.event)?;
                self.stats.modalities += 1;
                self.push_event(r, em, e, &body)?
            }
        })
    }

    fn event_model(&self, r: &EventRef) -> Result<&'a ReadingEventModel, ReduceError> {
        let registry = self
            .registry
            .ok_or_else(|| SyntaxError::UnknownEventModel(r.model.clone()))?;
        Ok(registry.get(&r.model)?)
    }

    /// `[!α]ψ` for static `ψ`.
    fn push_semi(&mut self, alpha: &ReadMapExpr, f: &Formula) -> Result<Formula, ReduceError> {
        self.tick()?;
        Ok(match f {
            Formula::True | Formula::False | Formula::Atom(_) => f.clone(),
            Formula::Comp(b, c) => Formula::Comp(alpha.lift(b), alpha.lift(c)),
            Formula::Not(a) => Formula::not(self.push_semi(alpha, a)?),
            Formula::And(a, b) => Formula::and(self.push_semi(alpha, a)?, self.push_semi(alpha, b)?),
            Formula::Or(a, b) => Formula::or(self.push_semi(alpha, a)?, self.push_semi(alpha, b)?),
            Formula::Implies(a, b) => {
                Formula::implies(self.push_semi(alpha, a)?, self.push_semi(alpha, b)?)
            }
            Formula::Iff(a, b) => Formula::iff(self.push_semi(alpha, a)?, self.push_semi(alpha, b)?),
            Formula::K(x, a) => {
                let own = Group::singleton(x.clone());
                let read = alpha.lift(&own);
                let body = self.push_semi(alpha, a)?;
                if read == own {
                    Formula::k(x.clone(), body)
                } else {
                    Formula::d(read, body)
                }
            }
            Formula::D(g, a) => Formula::d(alpha.lift(g), self.push_semi(alpha, a)?),
            Formula::C(g, a) => {
                let body = self.push_semi(alpha, a)?;
                let fam = GroupFamily::new(g.iter().map(|b| alpha.lift(&Group::singleton(b.clone()))))
                    .expect("nonempty group");
                if fam.iter().all(|h| h.len() == 1) && fam.len() == g.len() {
                    Formula::c(g.clone(), body)
                } else {
                    Formula::cd(fam, body)
                }
            }
            Formula::Cd(fam, a) => Formula::cd(fam.map(|g| alpha.lift(g)), self.push_semi(alpha, a)?),
            Formula::SemiPub(..) | Formula::Event(..) => unreachable!("body is static"),
        })
    }

    /// `[e]ψ` for static `ψ`.
    fn push_event(
        &mut self,
        r: &EventRef,
        em: &ReadingEventModel,
        e: usize,
        f: &Formula,
    ) -> Result<Formula, ReduceError> {
        self.tick()?;
        let reads = em.reads(e);
        Ok(match f {
            Formula::True | Formula::False | Formula::Atom(_) => f.clone(),
            Formula::Comp(b, c) => {
                let fine = em.group_rel(b)?.contained_in(&em.group_rel(c)?)[e];
                if fine {
                    Formula::Comp(reads.lift(b)?, reads.lift(c)?)
                } else {
                    Formula::False
                }
            }
            Formula::Not(a) => Formula::not(self.push_event(r, em, e, a)?),
            Formula::And(a, b) => {
                Formula::and(self.push_event(r, em, e, a)?, self.push_event(r, em, e, b)?)
            }
            Formula::Or(a, b) => {
                Formula::or(self.push_event(r, em, e, a)?, self.push_event(r, em, e, b)?)
            }
            Formula::Implies(a, b) => {
                Formula::implies(self.push_event(r, em, e, a)?, self.push_event(r, em, e, b)?)
            }
            Formula::Iff(a, b) => {
                Formula::iff(self.push_event(r, em, e, a)?, self.push_event(r, em, e, b)?)
            }
            Formula::K(x, a) => self.event_knowledge(r, em, e, Kind::K, &Group::singleton(x.clone()), a)?,
            Formula::D(g, a) => self.event_knowledge(r, em, e, Kind::D, g, a)?,
            Formula::C(g, a) if g.len() == 1 => self.event_knowledge(r, em, e, Kind::C, g, a)?,
            Formula::Cd(fam, a) if fam.len() == 1 => {
                let g = fam.as_single().expect("one group");
                self.event_knowledge(r, em, e, Kind::Cd, g, a)?
            }
            Formula::C(..) | Formula::Cd(..) => {
                return Err(ReduceError::UnsupportedFragment(
                    Formula::event(r.clone(), f.clone()).to_string(),
                ))
            }
            Formula::SemiPub(..) | Formula::Event(..) => unreachable!("body is static"),
        })
    }

    /// `[e]D_B ψ` is the conjunction of `D_{e(B)}[f]ψ` over `f ~B e`.
    fn event_knowledge(
        &mut self,
        r: &EventRef,
        em: &ReadingEventModel,
        e: usize,
        kind: Kind,
        group: &Group,
        body: &Formula,
    ) -> Result<Formula, ReduceError> {
        let read = em.reads(e).lift(group)?;
        let unchanged = read == *group;
        let mut parts = Vec::new();
        for f in em.group_rel(group)?.block_of(e) {
            let inner = self.push_event(r, em, f, body)?;
            let part = match kind {
                Kind::K if unchanged => {
                    Formula::k(group.iter().next().expect("one agent").clone(), inner)
                }
                Kind::C if unchanged => Formula::c(group.clone(), inner),
                Kind::Cd => Formula::dist(read.clone(), inner),
                _ => Formula::d(read.clone(), inner),
            };
            if !parts.contains(&part) {
                parts.push(part);
            }
        }
        Ok(Formula::conjunction(parts))
    }
}
