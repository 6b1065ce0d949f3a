use super::error::KrError;
use super::lexer::{tokenize, Spanned, Tok};
use super::theory::{OpenFunctionDecl, Statement};
use crate::logic::{sym, Atom, Formula, Rule, Sym, Term};

/// A statement together with the line it starts on.
#[derive(Clone, Debug, PartialEq)]
pub struct Located {
    pub line: usize,
    pub stmt: Statement,
}

pub fn parse_statements(src: &str) -> Result<Vec<Located>, KrError> {
    let mut p = Parser::new(src)?;
    let mut out = Vec::new();
    while p.peek() != &Tok::Eof {
        let line = p.here().line;
        let stmt = p.statement()?;
        out.push(Located { line, stmt });
    }
    Ok(out)
}

/// Parses a single formula, e.g. a query given on the command line.
/// A trailing `.` is optional.
pub fn parse_formula(src: &str) -> Result<Formula, KrError> {
    let mut p = Parser::new(src)?;
    let f = p.formula()?;
    if p.peek() == &Tok::Dot {
        p.advance();
    }
    p.expect_eof()?;
    Ok(f)
}

pub fn parse_term(src: &str) -> Result<Term, KrError> {
    let mut p = Parser::new(src)?;
    let t = p.term()?;
    p.expect_eof()?;
    Ok(t)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    anon: usize,
}

impl Parser {
    fn new(src: &str) -> Result<Self, KrError> {
        Ok(Parser { toks: tokenize(src)?, pos: 0, anon: 0 })
    }

    fn here(&self) -> &Spanned {
        &self.toks[self.pos.min(self.toks.len() - 1)]
    }

    fn peek(&self) -> &Tok {
        &self.here().tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn advance(&mut self) -> Tok {
        let t = self.peek().clone();
        self.pos += 1;
        t
    }

    fn error(&self, msg: impl Into<String>) -> KrError {
        let s = self.here();
        KrError::syntax(s.line, s.col, msg)
    }

    fn unexpected(&self, wanted: &str) -> KrError {
        self.error(format!("expected {wanted}, found {}", self.peek().describe()))
    }

    fn expect(&mut self, tok: Tok) -> Result<(), KrError> {
        if *self.peek() == tok {
            self.advance();
            Ok(())
        } else {
            Err(self.unexpected(&tok.describe()))
        }
    }

    fn expect_eof(&self) -> Result<(), KrError> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            Err(self.unexpected("end of input"))
        }
    }

    fn is_ident(&self, k: usize, name: &str) -> bool {
        matches!(self.peek_at(k), Tok::Ident(s) if s == name)
    }

    fn statement(&mut self) -> Result<Statement, KrError> {
        let stmt = if *self.peek() == Tok::Query {
            self.advance();
            Statement::Query(self.formula()?)
        } else if self.is_ident(0, "fol") && !matches!(self.peek_at(1), Tok::LParen | Tok::If | Tok::Dot) {
            self.advance();
            Statement::Fol(self.formula()?)
        } else if self.is_ident(0, "of")
            && matches!(self.peek_at(1), Tok::Ident(_))
            && *self.peek_at(2) == Tok::ColonColon
        {
            self.advance();
            Statement::OpenFunction(self.open_decl()?)
        } else {
            let head = self.atom("rule head")?;
            let body = if *self.peek() == Tok::If {
                self.advance();
                self.formula()?
            } else {
                Formula::True
            };
            Statement::Rule(Rule { head, body })
        };
        self.expect(Tok::Dot)?;
        Ok(stmt)
    }

    fn open_decl(&mut self) -> Result<OpenFunctionDecl, KrError> {
        let Tok::Ident(name) = self.advance() else { unreachable!("checked by caller") };
        self.expect(Tok::ColonColon)?;
        let mut domain = vec![self.typing_atom()?];
        while *self.peek() == Tok::Comma {
            self.advance();
            domain.push(self.typing_atom()?);
        }
        self.expect(Tok::Arrow)?;
        let range = self.typing_atom()?;
        Ok(OpenFunctionDecl { name: sym(&name), domain, range })
    }

    /// `pred(_)` or `pred(X)` in an open function declaration.
    fn typing_atom(&mut self) -> Result<Sym, KrError> {
        let a = self.atom("unary type predicate")?;
        if a.args.len() != 1 || !a.args[0].is_var() {
            return Err(self.error(format!("type `{a}` must be a unary predicate over a variable")));
        }
        Ok(a.pred)
    }

    fn atom(&mut self, what: &str) -> Result<Atom, KrError> {
        match self.term()? {
            Term::App(f, args) => Ok(Atom { pred: f, args: args.to_vec() }),
            Term::Var(_) => Err(self.error(format!("expected {what}, found a variable"))),
        }
    }

    pub fn formula(&mut self) -> Result<Formula, KrError> {
        let lhs = self.disjunction()?;
        match self.peek() {
            Tok::Implies => {
                self.advance();
                Ok(Formula::implies(lhs, self.formula()?))
            }
            Tok::Equiv => {
                self.advance();
                Ok(Formula::equiv(lhs, self.formula()?))
            }
            _ => Ok(lhs),
        }
    }

    fn disjunction(&mut self) -> Result<Formula, KrError> {
        let mut items = vec![self.conjunction()?];
        while *self.peek() == Tok::Or {
            self.advance();
            items.push(self.conjunction()?);
        }
        Ok(if items.len() == 1 { items.pop().unwrap() } else { Formula::Or(items) })
    }

    fn conjunction(&mut self) -> Result<Formula, KrError> {
        let mut items = vec![self.unary()?];
        while *self.peek() == Tok::And {
            self.advance();
            items.push(self.unary()?);
        }
        Ok(if items.len() == 1 { items.pop().unwrap() } else { Formula::And(items) })
    }

    fn unary(&mut self) -> Result<Formula, KrError> {
        if self.is_ident(0, "not") && *self.peek_at(1) != Tok::Eq {
            self.advance();
            return Ok(Formula::not(self.unary()?));
        }
        if (self.is_ident(0, "exists") || self.is_ident(0, "forall")) && *self.peek_at(1) == Tok::LParen {
            let universal = self.is_ident(0, "forall");
            self.advance();
            let vars = self.quantified_vars()?;
            self.expect(Tok::Dollar)?;
            // The body extends to the end of the enclosing group.
            let body = Box::new(self.formula()?);
            return Ok(if universal { Formula::Forall(vars, body) } else { Formula::Exists(vars, body) });
        }
        self.primary()
    }

    fn quantified_vars(&mut self) -> Result<Vec<Sym>, KrError> {
        self.expect(Tok::LParen)?;
        let mut vars: Vec<Sym> = Vec::new();
        loop {
            let v = match self.peek().clone() {
                Tok::Var(v) => sym(&v),
                _ => return Err(self.unexpected("a variable")),
            };
            if vars.contains(&v) {
                return Err(self.error(format!("variable `{v}` quantified twice")));
            }
            self.advance();
            vars.push(v);
            match self.advance() {
                Tok::Comma => continue,
                Tok::RParen => break,
                _ => {
                    self.pos -= 1;
                    return Err(self.unexpected("`,` or `)`"));
                }
            }
        }
        Ok(vars)
    }

    fn primary(&mut self) -> Result<Formula, KrError> {
        if *self.peek() == Tok::LParen {
            self.advance();
            let f = self.formula()?;
            self.expect(Tok::RParen)?;
            return Ok(f);
        }
        if *self.peek_at(1) != Tok::Eq && *self.peek_at(1) != Tok::LParen {
            if self.is_ident(0, "true") {
                self.advance();
                return Ok(Formula::True);
            }
            if self.is_ident(0, "false") {
                self.advance();
                return Ok(Formula::False);
            }
        }
        if !matches!(self.peek(), Tok::Ident(_) | Tok::Var(_) | Tok::Anon | Tok::Int(_)) {
            return Err(self.unexpected("a formula"));
        }
        let lhs = self.term()?;
        if *self.peek() == Tok::Eq {
            self.advance();
            let rhs = self.term()?;
            return Ok(Formula::Eq(lhs, rhs));
        }
        match lhs {
            Term::App(f, args) => Ok(Formula::Atom(Atom { pred: f, args: args.to_vec() })),
            Term::Var(v) => Err(self.error(format!("variable `{v}` used as a formula"))),
        }
    }

    fn term(&mut self) -> Result<Term, KrError> {
        match self.advance() {
            Tok::Var(v) => Ok(Term::var(&v)),
            Tok::Anon => {
                let name = format!("_{}", self.anon);
                self.anon += 1;
                Ok(Term::var(&name))
            }
            Tok::Int(n) => Ok(Term::int(n)),
            Tok::Ident(f) => {
                if *self.peek() != Tok::LParen {
                    return Ok(Term::constant(&f));
                }
                self.advance();
                let mut args = vec![self.term()?];
                loop {
                    match self.advance() {
                        Tok::Comma => args.push(self.term()?),
                        Tok::RParen => break,
                        _ => {
                            self.pos -= 1;
                            return Err(self.unexpected("`,` or `)`"));
                        }
                    }
                }
                Ok(Term::app(&f, args))
            }
            _ => {
                self.pos -= 1;
                Err(self.unexpected("a term"))
            }
        }
    }
}

/// Names of anonymous variables a parse may introduce.
pub fn is_anonymous_name(v: &str) -> bool {
    v.strip_prefix('_').is_some_and(|d| !d.is_empty() && d.chars().all(|c| c.is_ascii_digit()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one(src: &str) -> Statement {
        let mut v = parse_statements(src).unwrap();
        assert_eq!(v.len(), 1);
        v.pop().unwrap().stmt
    }

    #[test]
    fn uncle_rule() {
        let Statement::Rule(r) = one("uncle(S,C) <- male(S) & sibling(S,P) & parent(P,C).") else {
            panic!("expected a rule")
        };
        assert_eq!(r.head.to_string(), "uncle(S,C)");
        let Formula::And(items) = &r.body else { panic!("expected a conjunction") };
        assert_eq!(items.len(), 3);
    }

    #[test]
    fn open_function_declaration() {
        let s = one("of s_ppp:: clause(Z) -> point(_).");
        assert_eq!(
            s,
            Statement::OpenFunction(OpenFunctionDecl {
                name: sym("s_ppp"),
                domain: vec![sym("clause")],
                range: sym("point"),
            })
        );
    }

    #[test]
    fn fol_axiom() {
        let s = one("fol exists(U)$ utt(U).");
        let expected = Formula::Exists(vec![sym("U")], Box::new(Formula::atom("utt", vec![Term::var("U")])));
        assert_eq!(s, Statement::Fol(expected));
    }

    #[test]
    fn precedence() {
        let f = parse_formula("not a & b ; c => d").unwrap();
        assert_eq!(f.to_string(), "not a & b ; c => d");
        let Formula::Implies(lhs, _) = &f else { panic!() };
        let Formula::Or(items) = &**lhs else { panic!() };
        assert!(matches!(&items[0], Formula::And(v) if matches!(v[0], Formula::Not(_))));
    }

    #[test]
    fn implication_is_right_associative() {
        let f = parse_formula("a => b => c").unwrap();
        let Formula::Implies(_, rhs) = &f else { panic!() };
        assert!(matches!(**rhs, Formula::Implies(..)));
    }

    #[test]
    fn quantifier_scope_runs_to_group_end() {
        let f = parse_formula("p & (exists(X)$ q(X) ; r) & s").unwrap();
        let Formula::And(items) = &f else { panic!() };
        assert_eq!(items.len(), 3);
        let Formula::Exists(_, body) = &items[1] else { panic!() };
        assert!(matches!(**body, Formula::Or(_)));
        let g = parse_formula("forall(X)$ a(X) => b(X)").unwrap();
        let Formula::Forall(_, body) = &g else { panic!() };
        assert!(matches!(**body, Formula::Implies(..)));
    }

    #[test]
    fn anonymous_variables_are_distinct() {
        let f = parse_formula("p(_,_)").unwrap();
        let Formula::Atom(a) = f else { panic!() };
        assert_ne!(a.args[0], a.args[1]);
    }

    #[test]
    fn fact_without_body() {
        let s = one("clause(s1).");
        assert_eq!(s, Statement::Rule(Rule::fact(Atom::new("clause", vec![Term::constant("s1")]))));
        let t = one("clause(s1) <- true .");
        assert_eq!(s, t);
    }

    #[test]
    fn equality_and_negation() {
        let f = parse_formula("not before(L,P) & (T1=T2)").unwrap();
        assert_eq!(f.to_string(), "not before(L,P) & T1 = T2");
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let err = parse_statements("p(X) <- q(X)\nr.").unwrap_err();
        assert_eq!(err, KrError::syntax(2, 1, "expected `.`, found `r`"));
        let err = parse_statements("fol exists(X,X)$ p(X).").unwrap_err();
        assert!(matches!(err, KrError::Syntax { line: 1, .. }));
        assert!(parse_formula("X").is_err());
    }
}
