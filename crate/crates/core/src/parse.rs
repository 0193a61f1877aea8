//! Recursive-descent parser for formula text.
//!
//! Precedence, loosest first: `->` (right-assoc), `|`, `&`, `U`
//! (right-assoc), then the prefix operators `!`, `X`, `G`, `F`.
//! Identifiers are resolved against a [`Symbols`] table while parsing.

use crate::error::{Error, Result};
use crate::formula::{Formula, PlFormula};
use crate::symbols::{is_identifier, Symbols, RESERVED};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Action language: atoms and boolean connectives only.
    Pl,
    Ltl,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Word(String),
    LParen,
    RParen,
    Comma,
    Bang,
    Amp,
    Bar,
    Arrow,
    End,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let column = i + 1;
        let single = match c {
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            ',' => Some(Tok::Comma),
            '!' => Some(Tok::Bang),
            '&' => Some(Tok::Amp),
            '|' => Some(Tok::Bar),
            _ => None,
        };
        if let Some(tok) = single {
            out.push(Token { tok, column });
            i += 1;
        } else if c.is_whitespace() {
            i += 1;
        } else if c == '-' {
            if chars.get(i + 1) == Some(&'>') {
                out.push(Token {
                    tok: Tok::Arrow,
                    column,
                });
                i += 2;
            } else {
                return Err(syntax(column, "expected `->`"));
            }
        } else if c.is_ascii_alphanumeric() || c == '_' {
            let start = i;
            while i < chars.len()
                && (chars[i].is_ascii_alphanumeric() || chars[i] == '_' || chars[i] == '.')
            {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            if !is_identifier(&word) {
                return Err(syntax(column, format!("malformed identifier `{word}`")));
            }
            out.push(Token {
                tok: Tok::Word(word),
                column,
            });
        } else {
            return Err(syntax(column, format!("unexpected character `{c}`")));
        }
    }
    out.push(Token {
        tok: Tok::End,
        column: chars.len() + 1,
    });
    Ok(out)
}

fn syntax(column: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        column,
        message: message.into(),
    }
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    symbols: &'a Symbols,
    mode: Mode,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn column(&self) -> usize {
        self.tokens[self.pos].column
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn is_word(&self, w: &str) -> bool {
        matches!(self.peek(), Tok::Word(x) if x == w)
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(syntax(self.column(), format!("expected {what}")))
        }
    }

    fn temporal_allowed(&self, op: &str) -> Result<()> {
        match self.mode {
            Mode::Ltl => Ok(()),
            Mode::Pl => Err(syntax(
                self.column(),
                format!("temporal operator `{op}` is not allowed here"),
            )),
        }
    }

    fn formula(&mut self) -> Result<Formula> {
        self.implies()
    }

    fn implies(&mut self) -> Result<Formula> {
        let lhs = self.or()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.implies()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Formula> {
        let mut acc = self.and()?;
        while *self.peek() == Tok::Bar {
            self.bump();
            let rhs = self.and()?;
            acc = Formula::or(acc, rhs);
        }
        Ok(acc)
    }

    fn and(&mut self) -> Result<Formula> {
        let mut acc = self.until()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            let rhs = self.until()?;
            acc = Formula::and(acc, rhs);
        }
        Ok(acc)
    }

    fn until(&mut self) -> Result<Formula> {
        let lhs = self.unary()?;
        if self.is_word("U") {
            self.temporal_allowed("U")?;
            self.bump();
            let rhs = self.until()?;
            return Ok(Formula::until(lhs, rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula> {
        if *self.peek() == Tok::Bang {
            self.bump();
            return Ok(Formula::not(self.unary()?));
        }
        for op in ["X", "G", "F"] {
            if self.is_word(op) {
                self.temporal_allowed(op)?;
                self.bump();
                let inner = self.unary()?;
                return Ok(match op {
                    "X" => Formula::next(inner),
                    "G" => Formula::globally(inner),
                    _ => Formula::eventually(inner),
                });
            }
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Formula> {
        let column = self.column();
        match self.bump().tok {
            Tok::LParen => {
                let f = self.formula()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            Tok::Word(w) => match w.as_str() {
                "true" => Ok(Formula::True),
                "false" => Ok(Formula::False),
                "do" => {
                    self.expect(Tok::LParen, "`(` after `do`")?;
                    let (agent, agent_col) = self.name()?;
                    self.expect(Tok::Comma, "`,`")?;
                    let (action, action_col) = self.name()?;
                    self.expect(Tok::RParen, "`)`")?;
                    let i = self
                        .symbols
                        .agent(&agent)
                        .map_err(|e| positioned(e, agent_col))?;
                    let a = self
                        .symbols
                        .action(&action)
                        .map_err(|e| positioned(e, action_col))?;
                    Ok(Formula::does(i, a))
                }
                w if RESERVED.contains(&w) => Err(syntax(column, format!("unexpected `{w}`"))),
                name => self
                    .symbols
                    .prop(name)
                    .map(Formula::Prop)
                    .map_err(|e| positioned(e, column)),
            },
            Tok::End => Err(syntax(column, "unexpected end of formula")),
            other => Err(syntax(column, format!("unexpected {}", describe(&other)))),
        }
    }

    // Agent and action names inside `do(..)` may coincide with keywords
    // (an action called `F`, for instance).
    fn name(&mut self) -> Result<(String, usize)> {
        let column = self.column();
        match self.bump().tok {
            Tok::Word(w) => Ok((w, column)),
            other => Err(syntax(
                column,
                format!("expected a name, found {}", describe(&other)),
            )),
        }
    }
}

fn positioned(e: Error, column: usize) -> Error {
    match e {
        Error::Undeclared { .. } => syntax(column, e.to_string()),
        other => other,
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Word(w) => format!("`{w}`"),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::Comma => "`,`".into(),
        Tok::Bang => "`!`".into(),
        Tok::Amp => "`&`".into(),
        Tok::Bar => "`|`".into(),
        Tok::Arrow => "`->`".into(),
        Tok::End => "end of formula".into(),
    }
}

pub fn parse_formula(text: &str, mode: Mode, symbols: &Symbols) -> Result<Formula> {
    let tokens = lex(text)?;
    if tokens.len() == 1 {
        return Err(syntax(1, "empty formula"));
    }
    let mut p = Parser {
        tokens,
        pos: 0,
        symbols,
        mode,
    };
    let f = p.formula()?;
    if *p.peek() != Tok::End {
        return Err(syntax(
            p.column(),
            format!("unexpected {} after formula", describe(p.peek())),
        ));
    }
    Ok(f)
}

pub fn parse_ltl(text: &str, symbols: &Symbols) -> Result<Formula> {
    parse_formula(text, Mode::Ltl, symbols)
}

pub fn parse_pl(text: &str, symbols: &Symbols) -> Result<PlFormula> {
    PlFormula::new(parse_formula(text, Mode::Pl, symbols)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbols::{ActionId, AgentId, PropId};

    fn junction() -> Symbols {
        Symbols::new(
            &["crossed1", "crossed2", "collision"],
            &["A1", "A2"],
            &["F"],
        )
        .unwrap()
    }

    fn p(i: u16) -> Formula {
        Formula::Prop(PropId(i))
    }

    #[test]
    fn globally_not() {
        let f = parse_ltl("G !collision", &junction()).unwrap();
        assert_eq!(f, Formula::globally(Formula::not(p(2))));
    }

    #[test]
    fn eventually_desugars_to_until() {
        let f = parse_ltl("F crossed1", &junction()).unwrap();
        assert_eq!(f, Formula::until(Formula::True, p(0)));
    }

    #[test]
    fn effect_formula_from_junction_theory() {
        let s = junction();
        let f = parse_pl("!( !crossed2 & do(A2,F) ) & !collision", &s).unwrap();
        let expected = Formula::and(
            Formula::not(Formula::and(
                Formula::not(p(1)),
                Formula::does(AgentId(1), ActionId(1)),
            )),
            Formula::not(p(2)),
        );
        assert_eq!(f.as_formula(), &expected);
    }

    #[test]
    fn precedence() {
        let s = junction();
        // & binds tighter than |, U tighter than &, -> loosest and right-assoc
        let f = parse_ltl("crossed1 | crossed2 & collision", &s).unwrap();
        assert_eq!(f, Formula::or(p(0), Formula::and(p(1), p(2))));
        let f = parse_ltl("crossed1 & crossed2 U collision", &s).unwrap();
        assert_eq!(f, Formula::and(p(0), Formula::until(p(1), p(2))));
        let f = parse_ltl("crossed1 U crossed2 U collision", &s).unwrap();
        assert_eq!(f, Formula::until(p(0), Formula::until(p(1), p(2))));
        let f = parse_ltl("crossed1 -> crossed2 -> collision", &s).unwrap();
        assert_eq!(f, Formula::implies(p(0), Formula::implies(p(1), p(2))));
        let f = parse_ltl("!crossed1 U X collision", &s).unwrap();
        assert_eq!(f, Formula::until(Formula::not(p(0)), Formula::next(p(2))));
    }

    #[test]
    fn temporal_rejected_in_pl_mode() {
        let err = parse_pl("X crossed1", &junction()).unwrap_err();
        assert!(matches!(err, Error::Syntax { column: 1, .. }));
        assert!(parse_pl("crossed1 U crossed2", &junction()).is_err());
    }

    #[test]
    fn undeclared_identifier_reports_column() {
        let err = parse_ltl("crossed1 & bogus", &junction()).unwrap_err();
        match err {
            Error::Syntax { column, message } => {
                assert_eq!(column, 12);
                assert!(message.contains("bogus"));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_ltl("do(A3,F)", &junction()).is_err());
    }

    #[test]
    fn reserved_words_are_not_props() {
        assert!(parse_ltl("U", &junction()).is_err());
        assert!(parse_ltl("do", &junction()).is_err());
    }

    #[test]
    fn syntax_errors() {
        let s = junction();
        assert!(parse_ltl("", &s).is_err());
        assert!(parse_ltl("(crossed1", &s).is_err());
        assert!(parse_ltl("crossed1 crossed2", &s).is_err());
        assert!(parse_ltl("crossed1 - crossed2", &s).is_err());
        assert!(parse_ltl("do(A1 F)", &s).is_err());
    }

    #[test]
    fn printing_reparses_to_same_tree() {
        let s = junction();
        for text in [
            "G !collision",
            "F crossed1 -> X (crossed2 U collision)",
            "!(G !collision)",
            "(crossed1 | do(A1,F)) & !X true",
            "G F collision & F G !crossed1",
        ] {
            let f = parse_ltl(text, &s).unwrap();
            let printed = f.display(&s).to_string();
            assert_eq!(parse_ltl(&printed, &s).unwrap(), f, "{text} -> {printed}");
        }
    }
}
