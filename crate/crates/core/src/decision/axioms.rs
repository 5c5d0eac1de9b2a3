use rand::seq::IndexedRandom;
use rand::Rng;

use crate::dynamics::{compose_events, EventRegistry, ReadingEventModel};
use crate::gen::{self, FormulaConfig};
use crate::syntax::{AgentSet, EventRef, Formula, Group, GroupFamily, Prop, ReadMapExpr};

/// Valid schemas and reduction laws that can be instantiated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Schema {
    Distribution,
    Veracity,
    PositiveIntrospection,
    NegativeIntrospection,
    Monotonicity,
    CommonDistribution,
    CommonFixedPoint,
    CommonInduction,
    Inclusion,
    Additivity,
    Transitivity,
    KnownSuperiority,
    KnownNonSuperiority,
    KnowledgeTransfer,
    CdDistribution,
    CdFixedPoint,
    CdInduction,
    CdNegativeIntrospection,
    ReadAtom,
    ReadNegation,
    ReadConjunction,
    ReadComparative,
    ReadDistributed,
    ReadCommonDistributed,
    ReadComposition,
    EventAtom,
    EventNegation,
    EventConjunction,
    EventComparative,
    EventDistributed,
    EventComposition,
}

impl Schema {
    pub const ALL: [Schema; 31] = [
        Schema::Distribution,
        Schema::Veracity,
        Schema::PositiveIntrospection,
        Schema::NegativeIntrospection,
        Schema::Monotonicity,
        Schema::CommonDistribution,
        Schema::CommonFixedPoint,
        Schema::CommonInduction,
        Schema::Inclusion,
        Schema::Additivity,
        Schema::Transitivity,
        Schema::KnownSuperiority,
        Schema::KnownNonSuperiority,
        Schema::KnowledgeTransfer,
        Schema::CdDistribution,
        Schema::CdFixedPoint,
        Schema::CdInduction,
        Schema::CdNegativeIntrospection,
        Schema::ReadAtom,
        Schema::ReadNegation,
        Schema::ReadConjunction,
        Schema::ReadComparative,
        Schema::ReadDistributed,
        Schema::ReadCommonDistributed,
        Schema::ReadComposition,
        Schema::EventAtom,
        Schema::EventNegation,
        Schema::EventConjunction,
        Schema::EventComparative,
        Schema::EventDistributed,
        Schema::EventComposition,
    ];

    pub fn uses_events(self) -> bool {
        matches!(
            self,
            Schema::EventAtom
                | Schema::EventNegation
                | Schema::EventConjunction
                | Schema::EventComparative
                | Schema::EventDistributed
                | Schema::EventComposition
        )
    }
}

#[derive(Clone, Debug)]
pub struct AxiomInstance {
    pub schema: Schema,
    pub formula: Formula,
}

/// Instances plus the event models their event modalities refer to.
#[derive(Debug)]
pub struct Axioms {
    pub instances: Vec<AxiomInstance>,
    pub registry: EventRegistry,
}

struct Ctx<'a, R: Rng + ?Sized> {
    rng: &'a mut R,
    agents: &'a AgentSet,
    static_cfg: FormulaConfig,
    event_cfg: FormulaConfig,
    registry: EventRegistry,
    events: Vec<String>,
}

impl<R: Rng + ?Sized> Ctx<'_, R> {
    fn phi(&mut self) -> Formula {
        gen::formula(self.rng, &self.static_cfg)
    }

    fn event_phi(&mut self) -> Formula {
        gen::formula(self.rng, &self.event_cfg)
    }

    fn group(&mut self) -> Group {
        gen::group(self.rng, self.agents)
    }

    fn family(&mut self) -> GroupFamily {
        gen::family(self.rng, self.agents, 3)
    }

    fn fam_member(&mut self, fam: &GroupFamily) -> Group {
        let all: Vec<&Group> = fam.iter().collect();
        (*all.choose(self.rng).expect("nonempty")).clone()
    }

    fn subgroup(&mut self, g: &Group) -> Group {
        let sub = AgentSet::from_iter(g.iter().cloned());
        gen::group(self.rng, &sub)
    }

    fn event(&mut self) -> (String, usize) {
        let id = self.events.choose(self.rng).expect("event models").clone();
        let n = self.registry.get(&id).expect("registered").len();
        (id, self.rng.random_range(0..n))
    }

    fn eref(&self, id: &str, e: usize) -> EventRef {
        let em = self.registry.get(id).expect("registered");
        EventRef::new(id, em.event_name(e))
    }

    fn instance(&mut self, schema: Schema) -> Formula {
        use Formula as F;
        match schema {
            Schema::Distribution => {
                let (b, x, y) = (self.group(), self.phi(), self.phi());
                F::implies(
                    F::d(b.clone(), F::implies(x.clone(), y.clone())),
                    F::implies(F::d(b.clone(), x), F::d(b, y)),
                )
            }
            Schema::Veracity => {
                let (b, x) = (self.group(), self.phi());
                F::implies(F::d(b, x.clone()), x)
            }
            Schema::PositiveIntrospection => {
                let (b, x) = (self.group(), self.phi());
                let dx = F::d(b.clone(), x);
                F::implies(dx.clone(), F::d(b, dx))
            }
            Schema::NegativeIntrospection => {
                let (b, x) = (self.group(), self.phi());
                let ndx = F::not(F::d(b.clone(), x));
                F::implies(ndx.clone(), F::d(b, ndx))
            }
            Schema::Monotonicity => {
                let (b, c, x) = (self.group(), self.group(), self.phi());
                F::implies(F::d(b.clone(), x.clone()), F::d(b.union(&c), x))
            }
            Schema::CommonDistribution => {
                let (b, x, y) = (self.group(), self.phi(), self.phi());
                F::implies(
                    F::c(b.clone(), F::implies(x.clone(), y.clone())),
                    F::implies(F::c(b.clone(), x), F::c(b, y)),
                )
            }
            Schema::CommonFixedPoint => {
                let (b, x) = (self.group(), self.phi());
                let cx = F::c(b.clone(), x.clone());
                let knows = b.iter().map(|a| F::k(a.clone(), cx.clone()));
                F::iff(cx.clone(), F::and(x, F::conjunction(knows)))
            }
            Schema::CommonInduction => {
                let (b, x) = (self.group(), self.phi());
                let everyone = F::conjunction(b.iter().map(|a| F::k(a.clone(), x.clone())));
                F::implies(
                    F::c(b.clone(), F::implies(x.clone(), everyone)),
                    F::implies(x.clone(), F::c(b, x)),
                )
            }
            Schema::Inclusion => {
                let b = self.group();
                let c = self.subgroup(&b);
                F::Comp(b, c)
            }
            Schema::Additivity => {
                let (b, c, e) = (self.group(), self.group(), self.group());
                F::implies(
                    F::and(F::Comp(b.clone(), c.clone()), F::Comp(b.clone(), e.clone())),
                    F::Comp(b, c.union(&e)),
                )
            }
            Schema::Transitivity => {
                let (b, c, e) = (self.group(), self.group(), self.group());
                F::implies(
                    F::and(F::Comp(b.clone(), c.clone()), F::Comp(c, e.clone())),
                    F::Comp(b, e),
                )
            }
            Schema::KnownSuperiority => {
                let (b, c) = (self.group(), self.group());
                let bc = F::Comp(b.clone(), c);
                F::implies(bc.clone(), F::d(b, bc))
            }
            Schema::KnownNonSuperiority => {
                let (b, c) = (self.group(), self.group());
                let nbc = F::not(F::Comp(b.clone(), c));
                F::implies(nbc.clone(), F::d(b, nbc))
            }
            Schema::KnowledgeTransfer => {
                let (b, c, x) = (self.group(), self.group(), self.phi());
                F::implies(
                    F::Comp(b.clone(), c.clone()),
                    F::implies(F::d(c, x.clone()), F::d(b, x)),
                )
            }
            Schema::CdDistribution => {
                let (fam, x, y) = (self.family(), self.phi(), self.phi());
                F::implies(
                    F::cd(fam.clone(), F::implies(x.clone(), y.clone())),
                    F::implies(F::cd(fam.clone(), x), F::cd(fam, y)),
                )
            }
            Schema::CdFixedPoint => {
                let (fam, x) = (self.family(), self.phi());
                let cdx = F::cd(fam.clone(), x.clone());
                let knows = fam.iter().map(|b| F::d(b.clone(), cdx.clone()));
                F::iff(cdx.clone(), F::and(x, F::conjunction(knows)))
            }
            Schema::CdInduction => {
                let (fam, x) = (self.family(), self.phi());
                let all = F::conjunction(fam.iter().map(|b| F::d(b.clone(), x.clone())));
                F::implies(
                    F::cd(fam.clone(), F::implies(x.clone(), all)),
                    F::implies(x.clone(), F::cd(fam, x)),
                )
            }
            Schema::CdNegativeIntrospection => {
                let (fam, x) = (self.family(), self.phi());
                let b = self.fam_member(&fam);
                let ncd = F::not(F::cd(fam, x));
                F::implies(ncd.clone(), F::d(b, ncd))
            }
            Schema::ReadAtom => {
                let alpha = gen::readmap(self.rng, self.agents);
                let p = F::Atom(self.static_cfg.props[0].clone());
                F::iff(F::semi(alpha, p.clone()), p)
            }
            Schema::ReadNegation => {
                let (alpha, x) = (gen::readmap(self.rng, self.agents), self.phi());
                F::iff(
                    F::semi(alpha.clone(), F::not(x.clone())),
                    F::not(F::semi(alpha, x)),
                )
            }
            Schema::ReadConjunction => {
                let (alpha, x, y) = (gen::readmap(self.rng, self.agents), self.phi(), self.phi());
                F::iff(
                    F::semi(alpha.clone(), F::and(x.clone(), y.clone())),
                    F::and(F::semi(alpha.clone(), x), F::semi(alpha, y)),
                )
            }
            Schema::ReadComparative => {
                let (alpha, b, c) = (gen::readmap(self.rng, self.agents), self.group(), self.group());
                F::iff(
                    F::semi(alpha.clone(), F::Comp(b.clone(), c.clone())),
                    F::Comp(alpha.lift(&b), alpha.lift(&c)),
                )
            }
            Schema::ReadDistributed => {
                let (alpha, b, x) = (gen::readmap(self.rng, self.agents), self.group(), self.phi());
                F::iff(
                    F::semi(alpha.clone(), F::d(b.clone(), x.clone())),
                    F::d(alpha.lift(&b), F::semi(alpha, x)),
                )
            }
            Schema::ReadCommonDistributed => {
                let (alpha, fam, x) = (gen::readmap(self.rng, self.agents), self.family(), self.phi());
                F::iff(
                    F::semi(alpha.clone(), F::cd(fam.clone(), x.clone())),
                    F::cd(fam.map(|g| alpha.lift(g)), F::semi(alpha, x)),
                )
            }
            Schema::ReadComposition => {
                let alpha = gen::readmap(self.rng, self.agents);
                let beta = gen::readmap(self.rng, self.agents);
                let x = self.phi();
                let both = ReadMapExpr::Map(
                    self.agents
                        .iter()
                        .map(|a| {
                            let own = Group::singleton(a.clone());
                            (a.clone(), alpha.lift(&beta.lift(&own)))
                        })
                        .collect(),
                );
                F::iff(F::semi(alpha, F::semi(beta, x.clone())), F::semi(both, x))
            }
            Schema::EventAtom => {
                let (id, e) = self.event();
                let p = F::Atom(self.event_cfg.props[0].clone());
                F::iff(F::event(self.eref(&id, e), p.clone()), p)
            }
            Schema::EventNegation => {
                let (id, e) = self.event();
                let x = self.event_phi();
                let r = self.eref(&id, e);
                F::iff(F::event(r.clone(), F::not(x.clone())), F::not(F::event(r, x)))
            }
            Schema::EventConjunction => {
                let (id, e) = self.event();
                let (x, y) = (self.event_phi(), self.event_phi());
                let r = self.eref(&id, e);
                F::iff(
                    F::event(r.clone(), F::and(x.clone(), y.clone())),
                    F::and(F::event(r.clone(), x), F::event(r, y)),
                )
            }
            Schema::EventComparative => {
                let (id, e) = self.event();
                let (b, c) = (self.group(), self.group());
                let em = self.registry.get(&id).expect("registered");
                let holds = em.group_rel(&b).expect("known agents").contained_in(
                    &em.group_rel(&c).expect("known agents"),
                )[e];
                let reads = em.reads(e);
                let rhs = if holds {
                    F::Comp(
                        reads.lift(&b).expect("known agents"),
                        reads.lift(&c).expect("known agents"),
                    )
                } else {
                    F::False
                };
                F::iff(F::event(self.eref(&id, e), F::Comp(b, c)), rhs)
            }
            Schema::EventDistributed => {
                let (id, e) = self.event();
                let (b, x) = (self.group(), self.event_phi());
                let em = self.registry.get(&id).expect("registered");
                let rel = em.group_rel(&b).expect("known agents");
                let eb = em.reads(e).lift(&b).expect("known agents");
                let names: Vec<String> = (0..em.len())
                    .filter(|&f| rel.same(e, f))
                    .map(|f| em.event_name(f).to_string())
                    .collect();
                let rhs = F::conjunction(
                    names
                        .into_iter()
                        .map(|f| F::d(eb.clone(), F::event(EventRef::new(&id, f), x.clone()))),
                );
                F::iff(F::event(self.eref(&id, e), F::d(b, x)), rhs)
            }
            Schema::EventComposition => {
                let (first, e) = self.event();
                let (second, f) = self.event();
                let composed = format!("{first}_{second}");
                if self.registry.get(&composed).is_err() {
                    let em = compose_events(
                        self.registry.get(&first).expect("registered"),
                        self.registry.get(&second).expect("registered"),
                    )
                    .expect("same universe");
                    self.registry.insert(&composed, em).expect("valid id");
                }
                let x = self.event_phi();
                F::iff(
                    F::event(self.eref(&first, e), F::event(self.eref(&second, f), x.clone())),
                    F::event(self.eref(&composed, e * self.len(&second) + f), x),
                )
            }
        }
    }

    fn len(&self, id: &str) -> usize {
        self.registry.get(id).expect("registered").len()
    }
}

/// `per_schema` instances of each selected schema over groups and families
/// of `agents`, with random static fillers. Event schemas use two random
/// two-event models named `E` and `F`, returned in the registry together
/// with their compositions.
pub fn instantiate_axioms<R: Rng + ?Sized>(
    agents: &AgentSet,
    schemas: &[Schema],
    per_schema: usize,
    rng: &mut R,
) -> Axioms {
    assert!(!agents.is_empty(), "instances need at least one agent");
    let props = vec![Prop::new("p").expect("valid"), Prop::new("q").expect("valid")];
    let mut static_cfg = FormulaConfig::new(agents.clone(), props.clone());
    static_cfg.depth = 1;
    static_cfg.size = 3;
    let mut event_cfg = static_cfg.clone();
    event_cfg.common = false;
    let mut registry = EventRegistry::new();
    let mut events = Vec::new();
    if schemas.iter().any(|s| s.uses_events()) {
        for id in ["E", "F"] {
            let em: ReadingEventModel = gen::event_model(rng, agents, 2);
            registry.insert(id, em).expect("valid id");
            events.push(id.to_string());
        }
    }
    let mut ctx = Ctx {
        rng,
        agents,
        static_cfg,
        event_cfg,
        registry,
        events,
    };
    let mut instances = Vec::new();
    for &schema in schemas {
        for _ in 0..per_schema {
            let formula = ctx.instance(schema);
            instances.push(AxiomInstance { schema, formula });
        }
    }
    Axioms {
        instances,
        registry: ctx.registry,
    }
}
