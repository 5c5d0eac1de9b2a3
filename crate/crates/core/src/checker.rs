//! Model checking on epistemic models (full language) and on pseudo-models
//! (static language).
//!
//! Dynamic operators are evaluated by building the updated model. Updated
//! models live in an arena owned by an [`Evaluator`], keyed by their parent
//! and the action, so repeated or nested modalities reuse them.

use std::borrow::Cow;
use std::collections::HashMap;

use thiserror::Error;

use crate::dynamics::{product_update, semi_public_update, DynamicsError, EventRegistry, ReadingMap};
use crate::models::{family_rel, EpistemicModel, GroupRelations, ModelError, Partition, PseudoModel};
use crate::syntax::{EventRef, Formula, Group, GroupFamily, ReadMapExpr, SyntaxError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error("dynamic operator in a formula evaluated on a pseudo-model")]
    DynamicOperatorOnPseudoModel,
}

/// The family a knowledge operator quantifies over, with its body.
pub(crate) fn modal_family(f: &Formula) -> Option<(Cow<'_, GroupFamily>, &Formula)> {
    match f {
        Formula::K(a, body) => Some((
            Cow::Owned(GroupFamily::singleton(Group::singleton(a.clone()))),
            body,
        )),
        Formula::D(g, body) => Some((Cow::Owned(GroupFamily::singleton(g.clone())), body)),
        Formula::C(g, body) => Some((
            Cow::Owned(
                GroupFamily::new(g.iter().cloned().map(Group::singleton)).expect("nonempty group"),
            ),
            body,
        )),
        Formula::Cd(fam, body) => Some((Cow::Borrowed(fam), body)),
        _ => None,
    }
}

/// Box over a partition: true at `s` iff `inner` holds on the whole block.
fn box_over(p: &Partition, inner: &[bool]) -> Vec<bool> {
    let mut ok = vec![true; p.num_blocks()];
    for (s, &v) in inner.iter().enumerate() {
        if !v {
            ok[p.label(s) as usize] = false;
        }
    }
    (0..inner.len()).map(|s| ok[p.label(s) as usize]).collect()
}

fn pointwise(a: &[bool], b: &[bool], op: impl Fn(bool, bool) -> bool) -> Vec<bool> {
    a.iter().zip(b).map(|(&x, &y)| op(x, y)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum ActionKey {
    Semi(ReadMapExpr),
    Event(EventRef),
}

struct Child {
    model: usize,
    /// For product updates: number of events and the chosen event.
    shift: Option<(usize, usize)>,
}

impl Child {
    fn image(&self, s: usize) -> usize {
        match self.shift {
            None => s,
            Some((k, e)) => s * k + e,
        }
    }
}

/// Evaluation context for one root model.
pub struct Evaluator<'a> {
    registry: Option<&'a EventRegistry>,
    arena: Vec<Cow<'a, EpistemicModel>>,
    children: HashMap<(usize, ActionKey), Child>,
    families: HashMap<(usize, GroupFamily), Partition>,
}

impl<'a> Evaluator<'a> {
    pub fn new(root: &'a EpistemicModel, registry: Option<&'a EventRegistry>) -> Evaluator<'a> {
        Evaluator {
            registry,
            arena: vec![Cow::Borrowed(root)],
            children: HashMap::new(),
            families: HashMap::new(),
        }
    }

    /// Number of models built so far, the root included.
    pub fn models_built(&self) -> usize {
        self.arena.len()
    }

    pub fn check(&mut self, s: usize, f: &Formula) -> Result<bool, CheckError> {
        if s >= self.arena[0].len() {
            return Err(ModelError::UnknownState(format!("#{s}")).into());
        }
        self.check_at(0, s, f)
    }

    pub fn extension(&mut self, f: &Formula) -> Result<Vec<bool>, CheckError> {
        self.ext(0, f)
    }

    fn family(&mut self, mid: usize, fam: &GroupFamily) -> Result<&Partition, CheckError> {
        let key = (mid, fam.clone());
        if !self.families.contains_key(&key) {
            let p = family_rel(self.arena[mid].as_ref(), fam)?;
            self.families.insert(key.clone(), p);
        }
        Ok(&self.families[&key])
    }

    fn child(&mut self, mid: usize, key: ActionKey) -> Result<&Child, CheckError> {
        let slot = (mid, key);
        if !self.children.contains_key(&slot) {
            let parent = self.arena[mid].as_ref();
            let (model, shift) = match &slot.1 {
                ActionKey::Semi(expr) => {
                    let alpha = ReadingMap::from_expr(expr, parent.agents())?;
                    (semi_public_update(parent, &alpha)?, None)
                }
                ActionKey::Event(r) => {
                    let registry = self
                        .registry
                        .ok_or_else(|| SyntaxError::UnknownEventModel(r.model.clone()))?;
                    let em = registry.get(&r.model)?;
                    let e = em.event_index(&r.event)?;
                    let prod = product_update(parent, em)?;
                    (prod.model, Some((em.len(), e)))
                }
            };
            self.arena.push(Cow::Owned(model));
            let child = Child {
                model: self.arena.len() - 1,
                shift,
            };
            self.children.insert(slot.clone(), child);
        }
        Ok(&self.children[&slot])
    }

    fn check_at(&mut self, mid: usize, s: usize, f: &Formula) -> Result<bool, CheckError> {
        Ok(match f {
            Formula::True => true,
            Formula::False => false,
            Formula::Atom(p) => self.arena[mid].holds(p, s),
            Formula::Comp(b, c) => {
                let m = self.arena[mid].as_ref();
                let (rb, rc) = (m.group_rel(b)?, m.group_rel(c)?);
                rb.block_of(s).into_iter().all(|t| rc.same(s, t))
            }
            Formula::Not(a) => !self.check_at(mid, s, a)?,
            Formula::And(a, b) => self.check_at(mid, s, a)? && self.check_at(mid, s, b)?,
            Formula::Or(a, b) => self.check_at(mid, s, a)? || self.check_at(mid, s, b)?,
            Formula::Implies(a, b) => !self.check_at(mid, s, a)? || self.check_at(mid, s, b)?,
            Formula::Iff(a, b) => self.check_at(mid, s, a)? == self.check_at(mid, s, b)?,
            Formula::K(..) | Formula::D(..) | Formula::C(..) | Formula::Cd(..) => {
                let (fam, body) = modal_family(f).expect("modal node");
                let block = self.family(mid, &fam)?.block_of(s);
                for t in block {
                    if !self.check_at(mid, t, body)? {
                        return Ok(false);
                    }
                }
                true
            }
            Formula::SemiPub(expr, body) => {
                let child = self.child(mid, ActionKey::Semi(expr.clone()))?;
                let (cm, cs) = (child.model, child.image(s));
                self.check_at(cm, cs, body)?
            }
            Formula::Event(r, body) => {
                let child = self.child(mid, ActionKey::Event(r.clone()))?;
                let (cm, cs) = (child.model, child.image(s));
                self.check_at(cm, cs, body)?
            }
        })
    }

    fn ext(&mut self, mid: usize, f: &Formula) -> Result<Vec<bool>, CheckError> {
        let n = self.arena[mid].len();
        Ok(match f {
            Formula::True => vec![true; n],
            Formula::False => vec![false; n],
            Formula::Atom(p) => self.arena[mid].truth(p).into_owned(),
            Formula::Comp(b, c) => self.arena[mid].comparative(b, c)?,
            Formula::Not(a) => self.ext(mid, a)?.into_iter().map(|x| !x).collect(),
            Formula::And(a, b) => pointwise(&self.ext(mid, a)?, &self.ext(mid, b)?, |x, y| x && y),
            Formula::Or(a, b) => pointwise(&self.ext(mid, a)?, &self.ext(mid, b)?, |x, y| x || y),
            Formula::Implies(a, b) => {
                pointwise(&self.ext(mid, a)?, &self.ext(mid, b)?, |x, y| !x || y)
            }
            Formula::Iff(a, b) => pointwise(&self.ext(mid, a)?, &self.ext(mid, b)?, |x, y| x == y),
            Formula::K(..) | Formula::D(..) | Formula::C(..) | Formula::Cd(..) => {
                let (fam, body) = modal_family(f).expect("modal node");
                let inner = self.ext(mid, body)?;
                box_over(self.family(mid, &fam)?, &inner)
            }
            Formula::SemiPub(expr, body) => {
                let child = self.child(mid, ActionKey::Semi(expr.clone()))?;
                let cm = child.model;
                self.ext(cm, body)?
            }
            Formula::Event(r, body) => {
                let child = self.child(mid, ActionKey::Event(r.clone()))?;
                let (cm, shift) = (child.model, child.shift);
                let inner = self.ext(cm, body)?;
                let (k, e) = shift.expect("event children record their event");
                (0..n).map(|s| inner[s * k + e]).collect()
            }
        })
    }
}

/// Truth of `f` at the state named `state`.
pub fn check(
    m: &EpistemicModel,
    state: &str,
    f: &Formula,
    registry: Option<&EventRegistry>,
) -> Result<bool, CheckError> {
    let s = m.state_index(state)?;
    Evaluator::new(m, registry).check(s, f)
}

/// Truth of `f` at every state, in state order.
pub fn extension(
    m: &EpistemicModel,
    f: &Formula,
    registry: Option<&EventRegistry>,
) -> Result<Vec<bool>, CheckError> {
    Evaluator::new(m, registry).extension(f)
}

pub fn valid_on(
    m: &EpistemicModel,
    f: &Formula,
    registry: Option<&EventRegistry>,
) -> Result<bool, CheckError> {
    Ok(extension(m, f, registry)?.into_iter().all(|x| x))
}

/// Truth of a static formula at every state of a pseudo-model: comparatives
/// are read off the valuation, knowledge operators use the stored group
/// relations.
pub fn pseudo_extension(pm: &PseudoModel, f: &Formula) -> Result<Vec<bool>, CheckError> {
    let n = pm.len();
    Ok(match f {
        Formula::True => vec![true; n],
        Formula::False => vec![false; n],
        Formula::Atom(p) => (0..n).map(|s| pm.holds(p, s)).collect(),
        Formula::Comp(b, c) => pm.comp(b, c)?.to_vec(),
        Formula::Not(a) => pseudo_extension(pm, a)?.into_iter().map(|x| !x).collect(),
        Formula::And(a, b) => pointwise(&pseudo_extension(pm, a)?, &pseudo_extension(pm, b)?, |x, y| x && y),
        Formula::Or(a, b) => pointwise(&pseudo_extension(pm, a)?, &pseudo_extension(pm, b)?, |x, y| x || y),
        Formula::Implies(a, b) => {
            pointwise(&pseudo_extension(pm, a)?, &pseudo_extension(pm, b)?, |x, y| !x || y)
        }
        Formula::Iff(a, b) => pointwise(&pseudo_extension(pm, a)?, &pseudo_extension(pm, b)?, |x, y| x == y),
        Formula::K(..) | Formula::D(..) | Formula::C(..) | Formula::Cd(..) => {
            let (fam, body) = modal_family(f).expect("modal node");
            let p = family_rel(pm, &fam)?;
            box_over(&p, &pseudo_extension(pm, body)?)
        }
        Formula::SemiPub(..) | Formula::Event(..) => {
            return Err(CheckError::DynamicOperatorOnPseudoModel)
        }
    })
}

pub fn check_pseudo(pm: &PseudoModel, s: usize, f: &Formula) -> Result<bool, CheckError> {
    if s >= pm.num_states() {
        return Err(ModelError::UnknownState(format!("#{s}")).into());
    }
    Ok(pseudo_extension(pm, f)?[s])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::load_event_model;
    use crate::models::{load_model, load_pseudo, model_as_pseudo};
    use crate::syntax::parse_formula;

    const EX1: &str = r#"{
        "agents": ["a","b","c"],
        "states": ["sp","sq","sr","sw"],
        "relations": {
            "a": [["sp","sr"],["sq","sw"]],
            "b": [["sp","sq"],["sr","sw"]],
            "c": [["sp","sw"],["sq","sr"]]
        },
        "valuation": {"p":["sp"],"q":["sq"],"r":["sr"],"w":["sw"]}
    }"#;

    fn f(text: &str) -> Formula {
        parse_formula(text, None, None).unwrap()
    }

    fn holds(m: &EpistemicModel, s: &str, text: &str) -> bool {
        let top = check(m, s, &f(text), None).unwrap();
        let all = extension(m, &f(text), None).unwrap();
        assert_eq!(top, all[m.state_index(s).unwrap()], "{text}");
        top
    }

    #[test]
    fn example_one_knowledge() {
        let m = load_model(EX1).unwrap();
        assert!(holds(&m, "sp", "D{a,b,c} p"));
        assert!(!holds(&m, "sp", "K a p"));
        assert!(holds(&m, "sp", "C{a,b,c}(p|q|r|w)"));
        assert!(holds(&m, "sp", "[!pub{b}] (K a p & ~K b p)"));
    }

    #[test]
    fn comparatives_and_validity() {
        let m = load_model(EX1).unwrap();
        assert!(valid_on(&m, &f("{a,b} <= {c}"), None).unwrap());
        assert!(valid_on(&m, &f("p -> p"), None).unwrap());
        assert!(!valid_on(&m, &f("{c} <= {a,b}"), None).unwrap());
        assert_eq!(extension(&m, &f("true"), None).unwrap(), vec![true; 4]);
    }

    #[test]
    fn errors() {
        let m = load_model(EX1).unwrap();
        assert!(matches!(
            check(&m, "nope", &f("p"), None),
            Err(CheckError::Model(ModelError::UnknownState(_)))
        ));
        assert!(check(&m, "sp", &f("K z p"), None).is_err());
        assert!(matches!(
            check(&m, "sp", &f("[E.e] p"), None),
            Err(CheckError::Syntax(SyntaxError::UnknownEventModel(_)))
        ));
    }

    #[test]
    fn hacking_event() {
        let m = load_model(
            r#"{"agents":["a","b"],"states":["s","t"],
                "relations":{"a":[["s"],["t"]],"b":[["s","t"]]},"valuation":{"p":["s"]}}"#,
        )
        .unwrap();
        let (em, _) = load_event_model(
            r#"{"agents":["a","b"],"events":["hack","skip"],
                "relations":{"a":[["hack","skip"]],"b":[["hack"],["skip"]]},
                "reads":{"hack":{"b":["a","b"]}}}"#,
            true,
        )
        .unwrap();
        let mut reg = EventRegistry::new();
        reg.insert("E", em).unwrap();
        let reg = Some(&reg);
        assert!(check(&m, "s", &f("[E.hack] K b p"), reg).unwrap());
        assert!(!check(&m, "s", &f("[E.hack] K a K b p"), reg).unwrap());
        assert!(!check(&m, "s", &f("[E.skip] K b p"), reg).unwrap());
        let top = check(&m, "t", &f("[E.hack] ~K b p"), reg).unwrap();
        assert_eq!(top, extension(&m, &f("[E.hack] ~K b p"), reg).unwrap()[1]);
    }

    #[test]
    fn nested_updates_reuse_models() {
        let m = load_model(EX1).unwrap();
        let mut ev = Evaluator::new(&m, None);
        let g = f("[!pub{a}] [!pub{b}] p & [!pub{a}] [!pub{b}] q");
        ev.extension(&g).unwrap();
        assert_eq!(ev.models_built(), 3);
    }

    #[test]
    fn pseudo_semantics_agree_on_induced_models() {
        let m = load_model(EX1).unwrap();
        let pm = model_as_pseudo(&m);
        for text in ["D{a,b} p", "C{a,b,c} ~w", "{a,b} <= {c}", "K a (p | r)", "Cd{{a,b},{c}} ~q"] {
            assert_eq!(
                pseudo_extension(&pm, &f(text)).unwrap(),
                extension(&m, &f(text), None).unwrap(),
                "{text}"
            );
        }
        assert_eq!(
            check_pseudo(&pm, 0, &f("[!pub{a}] p")),
            Err(CheckError::DynamicOperatorOnPseudoModel)
        );
    }

    #[test]
    fn primitive_group_relation_changes_distributed_knowledge() {
        // a and b each confuse s and t, yet the stored {a,b} relation is
        // discrete, which no model allows.
        let pm = load_pseudo(
            r#"{"agents":["a","b"],"states":["s","t"],
                "relations":{"a":[["s","t"]],"b":[["s","t"]]},
                "groups":{"a,b":[["s"],["t"]]},
                "comparatives":{"a<=a":["s","t"],"b<=b":["s","t"],"a,b<=a,b":["s","t"],
                    "a,b<=a":["s","t"],"a,b<=b":["s","t"]},
                "valuation":{"p":["s"]}}"#,
        )
        .unwrap();
        assert_eq!(crate::models::validate_pseudo(&pm), Ok(()));
        assert!(check_pseudo(&pm, 0, &f("D{a,b} p")).unwrap());
        let m = load_model(
            r#"{"agents":["a","b"],"states":["s","t"],
                "relations":{"a":[["s","t"]],"b":[["s","t"]]},"valuation":{"p":["s"]}}"#,
        )
        .unwrap();
        assert!(!check(&m, "s", &f("D{a,b} p"), None).unwrap());
        assert!(check_pseudo(&pm, 0, &f("{a,b} <= {a}")).unwrap());
    }
}
