//! Textual program format.
//!
//! ```text
//! # comment
//! @feature gender {0,1}
//! @feature education {0,1,2,3,4,5}
//! @target scores {0,1,2,3}
//! scores(3) :- gender(1), education(5).  %% w=12
//! scores(0) :- .  %% w=3
//! ```
//!
//! Rules are terminated by `.` and may span several lines. The weight
//! annotation must follow the terminating `.` on the same line.

use std::fmt::Write as _;

use thiserror::Error;

use super::{name_index, Atom, MvlError, Program, Role, Rule, Schema, Variable};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("expected {expected}, found {found}")]
    Unexpected { expected: &'static str, found: String },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("`{0}` is a {1} variable here")]
    WrongRole(String, Role),
    #[error("value {value} is not in the domain of `{variable}`")]
    ValueOutOfDomain { variable: String, value: u32 },
    #[error("integer out of range")]
    IntegerOverflow,
    #[error("header declarations must precede rules")]
    LateHeader,
    #[error("header does not match the supplied schema")]
    SchemaMismatch,
    #[error("no schema header found")]
    MissingHeader,
    #[error(transparent)]
    Schema(#[from] MvlError),
}

/// Canonical text: schema header, then one rule per line in canonical order,
/// each with its weight annotation.
pub fn serialize_program(p: &Program) -> String {
    let schema = p.schema();
    let mut out = String::new();
    for (role, vars) in [(Role::Feature, schema.features()), (Role::Target, schema.targets())] {
        for v in vars {
            let dom: Vec<String> = v.domain.iter().map(u32::to_string).collect();
            let _ = writeln!(out, "@{role} {} {{{}}}", v.name, dom.join(","));
        }
    }
    for r in p.rules() {
        let head = &schema.targets()[r.head.var].name;
        let body: Vec<String> = r
            .body()
            .iter()
            .map(|a| format!("{}({})", schema.features()[a.var].name, a.value))
            .collect();
        let _ = writeln!(out, "{head}({}) :- {}.  %% w={}", r.head.value, body.join(", "), r.weight);
    }
    out
}

/// Parses rules against a known schema. A header, if present, must declare
/// exactly that schema.
pub fn parse_program(text: &str, schema: &Schema) -> Result<Program, ParseError> {
    let (header, rules) = Parser::new(text).run(Some(schema))?;
    if let Some((header, pos)) = header {
        if &header != schema {
            return Err(ParseError { line: pos.0, column: pos.1, kind: ParseErrorKind::SchemaMismatch });
        }
    }
    Program::new(schema.clone(), rules).map_err(|e| ParseError { line: 1, column: 1, kind: e.into() })
}

/// Parses a program whose schema comes from its own header block.
pub fn parse_program_standalone(text: &str) -> Result<Program, ParseError> {
    let (header, rules) = Parser::new(text).run(None)?;
    let (schema, _) = header.ok_or(ParseError { line: 1, column: 1, kind: ParseErrorKind::MissingHeader })?;
    Program::new(schema, rules).map_err(|e| ParseError { line: 1, column: 1, kind: e.into() })
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    line: usize,
    col: usize,
}

type Header = Option<(Schema, (usize, usize))>;

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Parser { src: text.as_bytes(), pos: 0, line: 1, col: 1 }
    }

    fn err(&self, kind: ParseErrorKind) -> ParseError {
        ParseError { line: self.line, column: self.col, kind }
    }

    fn unexpected(&self, expected: &'static str) -> ParseError {
        let found = match self.peek() {
            None => "end of input".to_string(),
            Some(b'\n') => "end of line".to_string(),
            Some(c) => format!("`{}`", c as char),
        };
        self.err(ParseErrorKind::Unexpected { expected, found })
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let c = self.peek()?;
        self.pos += 1;
        if c == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(b' ' | b'\t' | b'\r' | b'\n')) {
            self.bump();
        }
    }

    fn skip_inline_ws(&mut self) {
        while matches!(self.peek(), Some(b' ' | b'\t' | b'\r')) {
            self.bump();
        }
    }

    fn skip_line(&mut self) {
        while let Some(c) = self.bump() {
            if c == b'\n' {
                break;
            }
        }
    }

    fn expect(&mut self, c: u8, what: &'static str) -> Result<(), ParseError> {
        if self.peek() == Some(c) {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(what))
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        let start = self.pos;
        match self.peek() {
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {}
            _ => return Err(self.unexpected("identifier")),
        }
        while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == b'_') {
            self.bump();
        }
        Ok(String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
    }

    fn int(&mut self) -> Result<u64, ParseError> {
        if !matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            return Err(self.unexpected("integer"));
        }
        let mut n: u64 = 0;
        while let Some(c @ b'0'..=b'9') = self.peek() {
            n = n
                .checked_mul(10)
                .and_then(|n| n.checked_add(u64::from(c - b'0')))
                .ok_or_else(|| self.err(ParseErrorKind::IntegerOverflow))?;
            self.bump();
        }
        Ok(n)
    }

    fn value(&mut self) -> Result<u32, ParseError> {
        let n = self.int()?;
        u32::try_from(n).map_err(|_| self.err(ParseErrorKind::IntegerOverflow))
    }

    fn directive(&mut self) -> Result<(Role, Variable), ParseError> {
        self.expect(b'@', "`@`")?;
        let role = match self.ident()?.as_str() {
            "feature" => Role::Feature,
            "target" => Role::Target,
            _ => return Err(self.unexpected("`feature` or `target`")),
        };
        self.skip_inline_ws();
        let name = self.ident()?;
        self.skip_inline_ws();
        self.expect(b'{', "`{`")?;
        let mut domain = Vec::new();
        loop {
            self.skip_inline_ws();
            domain.push(self.value()?);
            self.skip_inline_ws();
            match self.peek() {
                Some(b',') => {
                    self.bump();
                }
                Some(b'}') => {
                    self.bump();
                    break;
                }
                _ => return Err(self.unexpected("`,` or `}`")),
            }
        }
        self.skip_inline_ws();
        if !matches!(self.peek(), None | Some(b'\n')) {
            return Err(self.unexpected("end of line"));
        }
        Ok((role, Variable::new(name, domain)))
    }

    fn atom(&mut self, schema: &Schema, role: Role) -> Result<Atom, ParseError> {
        let (line, column) = (self.line, self.col);
        let at = |kind| ParseError { line, column, kind };
        let name = self.ident()?;
        self.skip_ws();
        self.expect(b'(', "`(`")?;
        self.skip_ws();
        let value = self.value()?;
        self.skip_ws();
        self.expect(b')', "`)`")?;
        let vars = schema.variables(role);
        let var = match name_index(vars).get(name.as_str()) {
            Some(&i) => i,
            None => {
                let other = match role {
                    Role::Feature => Role::Target,
                    Role::Target => Role::Feature,
                };
                return Err(if name_index(schema.variables(other)).contains_key(name.as_str()) {
                    at(ParseErrorKind::WrongRole(name, other))
                } else {
                    at(ParseErrorKind::UnknownVariable(name))
                });
            }
        };
        if !vars[var].contains(value) {
            return Err(at(ParseErrorKind::ValueOutOfDomain { variable: name, value }));
        }
        Ok(Atom { var, value })
    }

    fn rule(&mut self, schema: &Schema) -> Result<Rule, ParseError> {
        let (line, column) = (self.line, self.col);
        let head = self.atom(schema, Role::Target)?;
        self.skip_ws();
        self.expect(b':', "`:-`")?;
        self.expect(b'-', "`:-`")?;
        self.skip_ws();
        let mut body = Vec::new();
        if self.peek() != Some(b'.') {
            loop {
                body.push(self.atom(schema, Role::Feature)?);
                self.skip_ws();
                match self.peek() {
                    Some(b',') => {
                        self.bump();
                        self.skip_ws();
                    }
                    Some(b'.') => break,
                    _ => return Err(self.unexpected("`,` or `.`")),
                }
            }
        }
        self.expect(b'.', "`.`")?;
        let mut rule = Rule::new(head, body).map_err(|e| ParseError { line, column, kind: e.into() })?;
        self.skip_inline_ws();
        if self.peek() == Some(b'%') {
            self.expect(b'%', "`%%`")?;
            self.expect(b'%', "`%%`")?;
            self.skip_inline_ws();
            self.expect(b'w', "`w=`")?;
            self.expect(b'=', "`w=`")?;
            rule.weight = self.int()?;
            self.skip_inline_ws();
        }
        if !matches!(self.peek(), None | Some(b'\n')) {
            return Err(self.unexpected("end of line"));
        }
        Ok(rule)
    }

    fn run(mut self, given: Option<&Schema>) -> Result<(Header, Vec<Rule>), ParseError> {
        let mut decls: Vec<(Variable, Role)> = Vec::new();
        let mut header_pos = None;
        let mut schema: Option<Schema> = given.cloned();
        let mut header: Header = None;
        let mut rules = Vec::new();
        loop {
            self.skip_ws();
            match self.peek() {
                None => break,
                Some(b'#') => self.skip_line(),
                Some(b'@') => {
                    if !rules.is_empty() {
                        return Err(self.err(ParseErrorKind::LateHeader));
                    }
                    header_pos.get_or_insert((self.line, self.col));
                    let (role, var) = self.directive()?;
                    decls.push((var, role));
                }
                Some(_) => {
                    if header.is_none() && !decls.is_empty() {
                        let pos = header_pos.unwrap_or((1, 1));
                        let declared = Schema::from_roles(std::mem::take(&mut decls))
                            .map_err(|e| ParseError { line: pos.0, column: pos.1, kind: e.into() })?;
                        if let Some(given) = given {
                            if &declared != given {
                                return Err(ParseError {
                                    line: pos.0,
                                    column: pos.1,
                                    kind: ParseErrorKind::SchemaMismatch,
                                });
                            }
                        }
                        schema.get_or_insert_with(|| declared.clone());
                        header = Some((declared, pos));
                    }
                    let s = schema.as_ref().ok_or_else(|| self.err(ParseErrorKind::MissingHeader))?;
                    rules.push(self.rule(s)?);
                }
            }
        }
        if header.is_none() && !decls.is_empty() {
            let pos = header_pos.unwrap_or((1, 1));
            let declared = Schema::from_roles(decls)
                .map_err(|e| ParseError { line: pos.0, column: pos.1, kind: e.into() })?;
            header = Some((declared, pos));
        }
        Ok((header, rules))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ay_schema() -> Schema {
        Schema::new(vec![Variable::range("a", 1)], vec![Variable::range("y", 3)]).unwrap()
    }

    fn listing_schema() -> Schema {
        Schema::new(
            vec![
                Variable::range("gender", 1),
                Variable::range("education", 5),
                Variable::range("experience", 5),
            ],
            vec![Variable::range("scores", 3)],
        )
        .unwrap()
    }

    #[test]
    fn serializes_single_rule() {
        let r = Rule::new(Atom::new(0, 1), [Atom::new(0, 0)]).unwrap();
        let p = Program::new(ay_schema(), [r]).unwrap();
        let text = serialize_program(&p);
        assert_eq!(text, "@feature a {0,1}\n@target y {0,1,2,3}\ny(1) :- a(0).  %% w=0\n");
    }

    #[test]
    fn empty_body_renders_bare_dot() {
        let p = Program::new(ay_schema(), [Rule::fact(Atom::new(0, 2))]).unwrap();
        assert!(serialize_program(&p).ends_with("y(2) :- .  %% w=0\n"));
        assert_eq!(parse_program_standalone(&serialize_program(&p)).unwrap(), p);
    }

    #[test]
    fn parses_multiline_listing_fragment() {
        let text = "scores(3) :- gender(1), \n    education(5), \n    experience(3).\n\
                    scores(3) :- education(4), \n    experience(3).\n";
        let p = parse_program(text, &listing_schema()).unwrap();
        assert_eq!(p.len(), 2);
        let s = p.schema();
        let first = &p.rules()[0];
        assert_eq!(first.head, Atom::new(s.target_index("scores").unwrap(), 3));
        assert_eq!(first.body(), &[Atom::new(0, 1), Atom::new(1, 5), Atom::new(2, 3)]);
        assert_eq!(p.rules()[1].body(), &[Atom::new(1, 4), Atom::new(2, 3)]);
    }

    #[test]
    fn rejects_value_outside_domain() {
        let err = parse_program("y(7) :- a(0).", &ay_schema()).unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::ValueOutOfDomain { variable: "y".into(), value: 7 });
        assert_eq!((err.line, err.column), (1, 1));
    }

    #[test]
    fn reports_line_and_column() {
        let err = parse_program("# c\ny(1) :- a(0) ;\n", &ay_schema()).unwrap_err();
        assert_eq!(err.line, 2);
        assert_eq!(err.column, 14);
        assert!(matches!(err.kind, ParseErrorKind::Unexpected { .. }));

        let err = parse_program("y(1) :- b(0).", &ay_schema()).unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UnknownVariable("b".into()));
        assert_eq!(err.column, 9);

        let err = parse_program("a(1) :- .", &ay_schema()).unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::WrongRole("a".into(), Role::Feature));
    }

    #[test]
    fn header_must_match_given_schema() {
        let text = "@feature a {0,1}\n@target y {0,1}\ny(1) :- .\n";
        let err = parse_program(text, &ay_schema()).unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::SchemaMismatch);
        assert_eq!(err.line, 1);
    }

    #[test]
    fn standalone_requires_header() {
        let err = parse_program_standalone("y(1) :- .").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::MissingHeader);
    }

    #[test]
    fn header_after_rules_is_rejected() {
        let text = "@feature a {0,1}\n@target y {0,1}\ny(1) :- .\n@feature b {0}\n";
        let err = parse_program_standalone(text).unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::LateHeader);
        assert_eq!(err.line, 4);
    }

    #[test]
    fn weight_annotation_is_read() {
        let p = parse_program("y(1) :- a(1).  %% w=42\n", &ay_schema()).unwrap();
        assert_eq!(p.rules()[0].weight, 42);
    }

    fn arb_program() -> impl Strategy<Value = Program> {
        let schema = Schema::new(
            vec![Variable::range("a", 2), Variable::new("b", [0, 3, 9]), Variable::range("c", 1)],
            vec![Variable::range("y", 2), Variable::range("z", 1)],
        )
        .unwrap();
        let rule = (0..2usize, 0..2u32, proptest::option::of(0..3u32), proptest::option::of(0..3usize),
                    proptest::option::of(0..2u32), 0..1000u64)
            .prop_map(|(hv, hval, a, b, c, w)| {
                let bvals = [0, 3, 9];
                let mut body = Vec::new();
                if let Some(a) = a { body.push(Atom::new(0, a)); }
                if let Some(b) = b { body.push(Atom::new(1, bvals[b])); }
                if let Some(c) = c { body.push(Atom::new(2, c)); }
                let mut r = Rule::new(Atom::new(hv, hval), body).unwrap();
                r.weight = w;
                r
            });
        proptest::collection::vec(rule, 0..12).prop_map(move |rules| Program::new(schema.clone(), rules).unwrap())
    }

    proptest! {
        #[test]
        fn text_round_trip(p in arb_program()) {
            let text = serialize_program(&p);
            let back = parse_program_standalone(&text).unwrap();
            prop_assert_eq!(&back, &p);
            let weights: Vec<u64> = back.rules().iter().map(|r| r.weight).collect();
            let expected: Vec<u64> = p.rules().iter().map(|r| r.weight).collect();
            prop_assert_eq!(weights, expected);
            prop_assert_eq!(serialize_program(&back), text);
        }
    }
}
