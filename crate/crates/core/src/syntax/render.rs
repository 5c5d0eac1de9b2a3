//! Printing formulas in the concrete grammar.

use super::{Formula, ReadMapExpr};

const IFF: u8 = 1;
const IMPL: u8 = 2;
const OR: u8 = 3;
const AND: u8 = 4;
const UNARY: u8 = 5;

pub fn render_formula(f: &Formula) -> String {
    let mut out = String::new();
    write_formula(f, 0, &mut out);
    out
}

pub fn render_readmap(m: &ReadMapExpr) -> String {
    match m {
        ReadMapExpr::Pub(g) => format!("pub{g}"),
        ReadMapExpr::Res(g) => format!("res{g}"),
        ReadMapExpr::Grp(gs) => {
            let inner: Vec<String> = gs.iter().map(|g| g.to_string()).collect();
            format!("grp({})", inner.join(";"))
        }
        ReadMapExpr::Share(a, b) => format!("share({a}:{b})"),
        ReadMapExpr::Map(entries) => {
            let inner: Vec<String> = entries.iter().map(|(a, g)| format!("{a}:{g}")).collect();
            format!("map({})", inner.join(","))
        }
    }
}

fn precedence(f: &Formula) -> u8 {
    match f {
        Formula::Iff(..) => IFF,
        Formula::Implies(..) => IMPL,
        Formula::Or(..) => OR,
        Formula::And(..) => AND,
        _ => UNARY,
    }
}

fn write_formula(f: &Formula, min: u8, out: &mut String) {
    if precedence(f) < min {
        out.push('(');
        write_formula(f, 0, out);
        out.push(')');
        return;
    }
    match f {
        Formula::True => out.push_str("true"),
        Formula::False => out.push_str("false"),
        Formula::Atom(p) => out.push_str(p.as_str()),
        Formula::Comp(b, c) => out.push_str(&format!("{b} <= {c}")),
        Formula::Not(a) => {
            out.push('~');
            write_formula(a, UNARY, out);
        }
        Formula::And(a, b) => binary(a, " & ", b, AND, AND + 1, out),
        Formula::Or(a, b) => binary(a, " | ", b, OR, OR + 1, out),
        Formula::Implies(a, b) => binary(a, " -> ", b, IMPL + 1, IMPL, out),
        Formula::Iff(a, b) => binary(a, " <-> ", b, IFF, IFF + 1, out),
        Formula::K(agent, a) => prefixed(&format!("K {agent} "), a, out),
        Formula::D(g, a) => prefixed(&format!("D{g} "), a, out),
        Formula::C(g, a) => prefixed(&format!("C{g} "), a, out),
        Formula::Cd(fam, a) => prefixed(&format!("Cd{fam} "), a, out),
        Formula::SemiPub(m, a) => prefixed(&format!("[!{}] ", render_readmap(m)), a, out),
        Formula::Event(r, a) => prefixed(&format!("[{}.{}] ", r.model, r.event), a, out),
    }
}

fn binary(a: &Formula, op: &str, b: &Formula, left: u8, right: u8, out: &mut String) {
    write_formula(a, left, out);
    out.push_str(op);
    write_formula(b, right, out);
}

fn prefixed(head: &str, body: &Formula, out: &mut String) {
    out.push_str(head);
    write_formula(body, UNARY, out);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_formula, Group, GroupFamily};

    #[test]
    fn printed_forms() {
        let p = Formula::atom("p");
        assert_eq!(render_formula(&Formula::d(Group::of(&["a"]), p.clone())), "D{a} p");
        assert_eq!(render_formula(&Formula::not(p.clone())), "~p");
        let fam = GroupFamily::new([Group::of(&["a", "b"]), Group::of(&["c", "d"])]).unwrap();
        assert_eq!(
            render_formula(&Formula::cd(fam, p.clone())),
            "Cd{{a,b},{c,d}} p"
        );
    }

    #[test]
    fn parentheses_only_where_needed() {
        for text in [
            "p & q | r",
            "p & (q | r)",
            "(p -> q) -> r",
            "p -> q -> r",
            "p <-> q <-> r",
            "p <-> (q <-> r)",
            "~(p & q)",
            "~~p",
            "K a (p -> q)",
            "[!grp({a,b};{c})] C{a,b,c} (p | q)",
            "[E.e;f] {a} <= {b}",
            "[!map(a:{a,b},b:{b})] true & false",
            "[!share({a}:{b})] ~D{a,b} p",
        ] {
            let f = parse_formula(text, None, None).unwrap();
            assert_eq!(render_formula(&f), text);
        }
    }
}
