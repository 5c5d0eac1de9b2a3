//! Recursive-descent parser for the formula grammar.
//!
//! ```text
//! formula  := iff
//! iff      := impl ( "<->" impl )*
//! impl     := disj ( "->" impl )?
//! disj     := conj ( "|" conj )*
//! conj     := unary ( "&" unary )*
//! unary    := "~" unary | "true" | "false" | PROP
//!           | group "<=" group
//!           | "K" AGENT unary | "D" group unary | "C" group unary
//!           | "Cd" family unary
//!           | "[" action "]" unary | "<" action ">" unary
//!           | "(" formula ")"
//! action   := "!" readmap | IDENT "." IDENT ( ";" IDENT )*
//! readmap  := "pub" group | "res" group
//!           | "grp" "(" group (";" group)* ")"
//!           | "share" "(" group ":" group ")"
//!           | "map" "(" AGENT ":" group ("," AGENT ":" group)* ")"
//! ```
//!
//! Diamonds are read as boxes. Event ids may be `;`-joined so that events of
//! composed models can be named.

use super::lexer::{tokenize, Tok};
use super::{
    is_agent_token, is_prop_token, Agent, AgentSet, EventRef, Formula, Group, GroupFamily, Prop,
    ReadMapExpr, SyntaxError,
};

/// Lookup of event models and their events, used to validate `[E.e]`.
pub trait EventCatalog {
    fn has_model(&self, model: &str) -> bool;
    fn has_event(&self, model: &str, event: &str) -> bool;
}

/// A dynamic action on its own, as accepted by `update --action`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Action {
    SemiPub(ReadMapExpr),
    Event(EventRef),
}

pub(crate) fn is_reserved(word: &str) -> bool {
    matches!(word, "true" | "false")
}

/// Parses a formula. When `universe` is given, every agent must belong to
/// it. When `catalog` is given, every event reference must resolve.
pub fn parse_formula(
    text: &str,
    universe: Option<&AgentSet>,
    catalog: Option<&dyn EventCatalog>,
) -> Result<Formula, SyntaxError> {
    let mut p = Parser::new(text, universe, catalog)?;
    let f = p.formula()?;
    p.expect_eof()?;
    Ok(f)
}

/// Parses a standalone action such as `!pub{a}` or `hack.e`.
pub fn parse_action(
    text: &str,
    universe: Option<&AgentSet>,
    catalog: Option<&dyn EventCatalog>,
) -> Result<Action, SyntaxError> {
    let mut p = Parser::new(text, universe, catalog)?;
    let a = p.action()?;
    p.expect_eof()?;
    Ok(a)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    universe: Option<&'a AgentSet>,
    catalog: Option<&'a dyn EventCatalog>,
}

impl<'a> Parser<'a> {
    fn new(
        text: &str,
        universe: Option<&'a AgentSet>,
        catalog: Option<&'a dyn EventCatalog>,
    ) -> Result<Self, SyntaxError> {
        Ok(Parser {
            toks: tokenize(text)?,
            pos: 0,
            universe,
            catalog,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, expected: &str) -> Result<T, SyntaxError> {
        Err(SyntaxError::Parse {
            pos: self.offset(),
            expected: expected.to_string(),
            found: self.peek().describe(),
        })
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<(), SyntaxError> {
        if self.eat(&tok) {
            Ok(())
        } else {
            self.error(&tok.describe())
        }
    }

    fn expect_eof(&mut self) -> Result<(), SyntaxError> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            self.error("end of input")
        }
    }

    fn is_word(&self, word: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == word)
    }

    fn ident(&mut self, what: &str) -> Result<String, SyntaxError> {
        match self.peek() {
            Tok::Ident(s) => {
                let s = s.clone();
                self.bump();
                Ok(s)
            }
            _ => self.error(what),
        }
    }

    fn formula(&mut self) -> Result<Formula, SyntaxError> {
        let mut left = self.implication()?;
        while self.eat(&Tok::DArrow) {
            let right = self.implication()?;
            left = Formula::iff(left, right);
        }
        Ok(left)
    }

    fn implication(&mut self) -> Result<Formula, SyntaxError> {
        let left = self.disjunction()?;
        if self.eat(&Tok::Arrow) {
            let right = self.implication()?;
            Ok(Formula::implies(left, right))
        } else {
            Ok(left)
        }
    }

    fn disjunction(&mut self) -> Result<Formula, SyntaxError> {
        let mut left = self.conjunction()?;
        while self.eat(&Tok::Pipe) {
            let right = self.conjunction()?;
            left = Formula::or(left, right);
        }
        Ok(left)
    }

    fn conjunction(&mut self) -> Result<Formula, SyntaxError> {
        let mut left = self.unary()?;
        while self.eat(&Tok::Amp) {
            let right = self.unary()?;
            left = Formula::and(left, right);
        }
        Ok(left)
    }

    fn unary(&mut self) -> Result<Formula, SyntaxError> {
        match self.peek().clone() {
            Tok::Tilde => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::LBrace => {
                let b = self.group()?;
                self.expect(Tok::Le)?;
                let c = self.group()?;
                Ok(Formula::Comp(b, c))
            }
            Tok::LBrack => {
                self.bump();
                let action = self.action()?;
                self.expect(Tok::RBrack)?;
                Ok(Self::wrap(action, self.unary()?))
            }
            Tok::Lt => {
                self.bump();
                let action = self.action()?;
                self.expect(Tok::Gt)?;
                Ok(Self::wrap(action, self.unary()?))
            }
            Tok::Ident(word) => match word.as_str() {
                "true" => {
                    self.bump();
                    Ok(Formula::True)
                }
                "false" => {
                    self.bump();
                    Ok(Formula::False)
                }
                "K" => {
                    self.bump();
                    let a = self.agent()?;
                    Ok(Formula::k(a, self.unary()?))
                }
                "D" => {
                    self.bump();
                    let g = self.group()?;
                    Ok(Formula::d(g, self.unary()?))
                }
                "C" => {
                    self.bump();
                    let g = self.group()?;
                    Ok(Formula::c(g, self.unary()?))
                }
                "Cd" => {
                    self.bump();
                    let fam = self.family()?;
                    Ok(Formula::cd(fam, self.unary()?))
                }
                w if is_prop_token(w) => {
                    self.bump();
                    Ok(Formula::Atom(Prop(word)))
                }
                _ => self.error("a formula"),
            },
            _ => self.error("a formula"),
        }
    }

    fn wrap(action: Action, body: Formula) -> Formula {
        match action {
            Action::SemiPub(map) => Formula::semi(map, body),
            Action::Event(r) => Formula::event(r, body),
        }
    }

    fn agent(&mut self) -> Result<Agent, SyntaxError> {
        match self.peek() {
            Tok::Ident(s) if is_agent_token(s) && !is_reserved(s) => {
                let a = Agent(s.clone());
                if let Some(u) = self.universe {
                    if !u.contains(&a) {
                        return Err(SyntaxError::UnknownAgent(a.0));
                    }
                }
                self.bump();
                Ok(a)
            }
            _ => self.error("an agent"),
        }
    }

    fn group(&mut self) -> Result<Group, SyntaxError> {
        self.expect(Tok::LBrace)?;
        if *self.peek() == Tok::RBrace {
            return Err(SyntaxError::EmptyGroup);
        }
        let mut members = vec![self.agent()?];
        while self.eat(&Tok::Comma) {
            members.push(self.agent()?);
        }
        self.expect(Tok::RBrace)?;
        Group::new(members)
    }

    fn family(&mut self) -> Result<GroupFamily, SyntaxError> {
        self.expect(Tok::LBrace)?;
        if *self.peek() == Tok::RBrace {
            return Err(SyntaxError::EmptyFamily);
        }
        let mut groups = vec![self.group()?];
        while self.eat(&Tok::Comma) {
            groups.push(self.group()?);
        }
        self.expect(Tok::RBrace)?;
        GroupFamily::new(groups)
    }

    fn action(&mut self) -> Result<Action, SyntaxError> {
        if self.eat(&Tok::Bang) {
            return Ok(Action::SemiPub(self.readmap()?));
        }
        let model = self.ident("`!` or an event model id")?;
        self.expect(Tok::Dot)?;
        let mut event = self.ident("an event id")?;
        while self.eat(&Tok::Semi) {
            event.push(';');
            event.push_str(&self.ident("an event id")?);
        }
        if let Some(cat) = self.catalog {
            if !cat.has_model(&model) {
                return Err(SyntaxError::UnknownEventModel(model));
            }
            if !cat.has_event(&model, &event) {
                return Err(SyntaxError::UnknownEvent { model, event });
            }
        }
        Ok(Action::Event(EventRef { model, event }))
    }

    fn readmap(&mut self) -> Result<ReadMapExpr, SyntaxError> {
        if self.is_word("pub") {
            self.bump();
            return Ok(ReadMapExpr::Pub(self.group()?));
        }
        if self.is_word("res") {
            self.bump();
            return Ok(ReadMapExpr::Res(self.group()?));
        }
        if self.is_word("grp") {
            self.bump();
            self.expect(Tok::LParen)?;
            let mut groups = vec![self.group()?];
            while self.eat(&Tok::Semi) {
                groups.push(self.group()?);
            }
            self.expect(Tok::RParen)?;
            return Ok(ReadMapExpr::Grp(groups));
        }
        if self.is_word("share") {
            self.bump();
            self.expect(Tok::LParen)?;
            let readers = self.group()?;
            self.expect(Tok::Colon)?;
            let read = self.group()?;
            self.expect(Tok::RParen)?;
            return Ok(ReadMapExpr::Share(readers, read));
        }
        if self.is_word("map") {
            self.bump();
            self.expect(Tok::LParen)?;
            let mut entries: Vec<(Agent, Group)> = Vec::new();
            loop {
                let at = self.offset();
                let a = self.agent()?;
                if entries.iter().any(|(b, _)| *b == a) {
                    return Err(SyntaxError::Parse {
                        pos: at,
                        expected: "an agent not yet mapped".into(),
                        found: format!("`{a}`"),
                    });
                }
                self.expect(Tok::Colon)?;
                let g = self.group()?;
                entries.push((a, g));
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
            self.expect(Tok::RParen)?;
            return Ok(ReadMapExpr::Map(entries));
        }
        self.error("`pub`, `res`, `grp`, `share` or `map`")
    }
}
