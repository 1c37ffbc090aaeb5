use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use super::{
    ActionSchema, Assignment, BtExpr, ConditionSchema, DeclaredOutcome, DomainSpec, GoalSpec,
    OutcomeSpec, ParamSpace, TemplateSchema,
};
use crate::tree::Control;
use crate::Status;

/// Outcome probabilities of one schema must sum to one within this bound.
const SUM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("{line}:{column}: syntax error: expected {}, found {found}", expected.join(" or "))]
    Syntax {
        line: usize,
        column: usize,
        expected: Vec<String>,
        found: String,
    },
    #[error("{line}:{column}: {message}")]
    Semantic {
        line: usize,
        column: usize,
        message: String,
    },
}

impl ParseError {
    pub fn location(&self) -> (usize, usize) {
        match self {
            ParseError::Syntax { line, column, .. } | ParseError::Semantic { line, column, .. } => {
                (*line, *column)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Loc {
    line: usize,
    column: usize,
}

impl Loc {
    fn semantic(self, message: impl Into<String>) -> ParseError {
        ParseError::Semantic {
            line: self.line,
            column: self.column,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Name(String),
    Number(f64),
    LBrace,
    RBrace,
    LParen,
    RParen,
    Comma,
    Semi,
    Eq,
    Arrow,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Name(n) => write!(f, "`{n}`"),
            Tok::Number(x) => write!(f, "number {x}"),
            Tok::LBrace => f.write_str("`{`"),
            Tok::RBrace => f.write_str("`}`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Semi => f.write_str("`;`"),
            Tok::Eq => f.write_str("`=`"),
            Tok::Arrow => f.write_str("`->`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, Loc)>, ParseError> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut column) = (1usize, 1usize);

    macro_rules! bump {
        () => {{
            let c = chars.next();
            if c == Some('\n') {
                line += 1;
                column = 1;
            } else if c.is_some() {
                column += 1;
            }
            c
        }};
    }

    while let Some(&c) = chars.peek() {
        let loc = Loc { line, column };
        match c {
            c if c.is_whitespace() => {
                bump!();
            }
            '#' => {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    bump!();
                }
            }
            '{' | '}' | '(' | ')' | ',' | ';' | '=' => {
                bump!();
                let tok = match c {
                    '{' => Tok::LBrace,
                    '}' => Tok::RBrace,
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    ',' => Tok::Comma,
                    ';' => Tok::Semi,
                    _ => Tok::Eq,
                };
                out.push((tok, loc));
            }
            '-' => {
                bump!();
                if chars.peek() == Some(&'>') {
                    bump!();
                    out.push((Tok::Arrow, loc));
                } else {
                    return Err(ParseError::Syntax {
                        line: loc.line,
                        column: loc.column,
                        expected: vec!["`->`".into()],
                        found: "`-`".into(),
                    });
                }
            }
            c if c.is_ascii_digit() => {
                let mut s = String::new();
                while let Some(&d) = chars.peek() {
                    if d.is_ascii_digit() || d == '.' {
                        s.push(d);
                        bump!();
                    } else {
                        break;
                    }
                }
                let value = if s.matches('.').count() <= 1 && !s.ends_with('.') {
                    s.parse::<f64>().ok()
                } else {
                    None
                };
                match value {
                    Some(v) => out.push((Tok::Number(v), loc)),
                    None => {
                        return Err(ParseError::Syntax {
                            line: loc.line,
                            column: loc.column,
                            expected: vec!["decimal number".into()],
                            found: format!("`{s}`"),
                        })
                    }
                }
            }
            c if c.is_alphabetic() || c == '_' => {
                let mut s = String::new();
                while let Some(&d) = chars.peek() {
                    if d.is_alphanumeric() || d == '_' {
                        s.push(d);
                        bump!();
                    } else {
                        break;
                    }
                }
                out.push((Tok::Name(s), loc));
            }
            other => {
                return Err(ParseError::Syntax {
                    line: loc.line,
                    column: loc.column,
                    expected: vec!["token".into()],
                    found: format!("`{other}`"),
                })
            }
        }
    }
    out.push((Tok::Eof, Loc { line, column }));
    Ok(out)
}

/// Source locations of declarations, kept apart from the spec so that specs
/// compare by content only.
#[derive(Default)]
struct Locations {
    params: BTreeMap<String, Loc>,
    conditions: BTreeMap<String, Loc>,
    actions: BTreeMap<String, Loc>,
    templates: BTreeMap<String, Loc>,
    /// Assignment locations per owning declaration, in source order.
    assignments: BTreeMap<String, Vec<Loc>>,
    bodies: BTreeMap<String, Vec<Loc>>,
    initial: Option<Loc>,
    goal: Option<Loc>,
}

struct Parser {
    toks: Vec<(Tok, Loc)>,
    pos: usize,
    locs: Locations,
    owner: String,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn loc(&self) -> Loc {
        self.toks[self.pos].1
    }

    fn advance(&mut self) -> (Tok, Loc) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, expected: &[&str]) -> Result<T, ParseError> {
        let loc = self.loc();
        Err(ParseError::Syntax {
            line: loc.line,
            column: loc.column,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: self.peek().to_string(),
        })
    }

    fn expect(&mut self, tok: Tok) -> Result<Loc, ParseError> {
        if *self.peek() == tok {
            Ok(self.advance().1)
        } else {
            self.error(&[&tok.to_string()])
        }
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.advance();
            true
        } else {
            false
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Name(n) if n == kw)
    }

    fn keyword(&mut self, kw: &str) -> Result<Loc, ParseError> {
        if self.is_keyword(kw) {
            Ok(self.advance().1)
        } else {
            self.error(&[&format!("`{kw}`")])
        }
    }

    fn name(&mut self) -> Result<(String, Loc), ParseError> {
        match self.peek().clone() {
            Tok::Name(n) => {
                let loc = self.advance().1;
                Ok((n, loc))
            }
            _ => self.error(&["name"]),
        }
    }

    fn number(&mut self) -> Result<f64, ParseError> {
        match *self.peek() {
            Tok::Number(x) => {
                self.advance();
                Ok(x)
            }
            _ => self.error(&["number"]),
        }
    }

    fn value(&mut self) -> Result<Status, ParseError> {
        if let Tok::Name(n) = self.peek() {
            if let Ok(s) = n.parse::<Status>() {
                self.advance();
                return Ok(s);
            }
        }
        self.error(&["`S`", "`F`", "`R`"])
    }

    /// `"(" NAME { "," NAME } ")"`, or `"()"` when `allow_empty`.
    fn paren_names(&mut self, allow_empty: bool) -> Result<Vec<String>, ParseError> {
        self.expect(Tok::LParen)?;
        let mut names = Vec::new();
        if allow_empty && self.eat(&Tok::RParen) {
            return Ok(names);
        }
        names.push(self.name()?.0);
        while self.eat(&Tok::Comma) {
            names.push(self.name()?.0);
        }
        self.expect(Tok::RParen)?;
        Ok(names)
    }

    fn optional_paren_names(&mut self) -> Result<Vec<String>, ParseError> {
        if *self.peek() == Tok::LParen {
            self.paren_names(true)
        } else {
            Ok(Vec::new())
        }
    }

    fn asgnset(&mut self) -> Result<Vec<Assignment>, ParseError> {
        self.expect(Tok::LBrace)?;
        let mut out = Vec::new();
        if self.eat(&Tok::RBrace) {
            return Ok(out);
        }
        loop {
            let (name, loc) = self.name()?;
            let args = self.optional_paren_names()?;
            self.expect(Tok::Eq)?;
            let value = self.value()?;
            self.locs.assignments.entry(self.owner.clone()).or_default().push(loc);
            out.push(Assignment { name, args, value });
            if self.eat(&Tok::Semi) {
                // tolerate a trailing separator
                if self.eat(&Tok::RBrace) {
                    return Ok(out);
                }
                continue;
            }
            if self.eat(&Tok::RBrace) {
                return Ok(out);
            }
            return self.error(&["`;`", "`}`"]);
        }
    }

    fn file(&mut self) -> Result<DomainSpec, ParseError> {
        let mut spec = DomainSpec::default();
        loop {
            match self.peek().clone() {
                Tok::Eof => return Ok(spec),
                Tok::Name(kw) => match kw.as_str() {
                    "param" => self.param(&mut spec)?,
                    "condition" => self.condition(&mut spec)?,
                    "action" => self.action(&mut spec)?,
                    "template" => self.template(&mut spec)?,
                    "initial" => {
                        let loc = self.advance().1;
                        if self.locs.initial.is_some() {
                            return Err(loc.semantic("duplicate initial declaration"));
                        }
                        self.locs.initial = Some(loc);
                        self.owner = "initial".into();
                        spec.initial = Some(self.asgnset()?);
                    }
                    "goal" => {
                        let loc = self.advance().1;
                        if self.locs.goal.is_some() {
                            return Err(loc.semantic("duplicate goal declaration"));
                        }
                        self.locs.goal = Some(loc);
                        self.owner = "goal".into();
                        let literals = self.asgnset()?;
                        self.keyword("prob")?;
                        let probability = self.number()?;
                        spec.goal = Some(GoalSpec {
                            literals,
                            probability,
                        });
                    }
                    _ => return self.decl_error(),
                },
                _ => return self.decl_error(),
            }
        }
    }

    fn decl_error<T>(&self) -> Result<T, ParseError> {
        self.error(&["`param`", "`condition`", "`action`", "`template`", "`initial`", "`goal`"])
    }

    fn declare(map: &mut BTreeMap<String, Loc>, kind: &str, name: &str, loc: Loc) -> Result<(), ParseError> {
        if map.insert(name.to_string(), loc).is_some() {
            return Err(loc.semantic(format!("duplicate {kind} `{name}`")));
        }
        Ok(())
    }

    fn param(&mut self, spec: &mut DomainSpec) -> Result<(), ParseError> {
        self.keyword("param")?;
        let (name, loc) = self.name()?;
        Self::declare(&mut self.locs.params, "parameter space", &name, loc)?;
        self.expect(Tok::LBrace)?;
        let mut instances = Vec::new();
        while let Tok::Name(_) = self.peek() {
            let (inst, iloc) = self.name()?;
            if instances.contains(&inst) {
                return Err(iloc.semantic(format!("duplicate instance `{inst}` in `{name}`")));
            }
            instances.push(inst);
        }
        self.expect(Tok::RBrace)?;
        spec.params.push(ParamSpace { name, instances });
        Ok(())
    }

    fn condition(&mut self, spec: &mut DomainSpec) -> Result<(), ParseError> {
        self.keyword("condition")?;
        let (name, loc) = self.name()?;
        Self::declare(&mut self.locs.conditions, "condition", &name, loc)?;
        let params = if *self.peek() == Tok::LParen {
            self.paren_names(false)?
        } else {
            Vec::new()
        };
        self.keyword("values")?;
        self.expect(Tok::LBrace)?;
        let mut values = vec![self.value()?];
        while *self.peek() != Tok::RBrace {
            let vloc = self.loc();
            let v = self.value()?;
            if values.contains(&v) {
                return Err(vloc.semantic(format!("value {v} listed twice for `{name}`")));
            }
            values.push(v);
        }
        self.expect(Tok::RBrace)?;
        spec.conditions.push(ConditionSchema {
            name,
            params,
            values,
        });
        Ok(())
    }

    fn action(&mut self, spec: &mut DomainSpec) -> Result<(), ParseError> {
        self.keyword("action")?;
        let (name, loc) = self.name()?;
        Self::declare(&mut self.locs.actions, "action", &name, loc)?;
        self.owner = format!("action {name}");
        let params = if *self.peek() == Tok::LParen {
            self.paren_names(false)?
        } else {
            Vec::new()
        };
        self.expect(Tok::LBrace)?;
        self.keyword("pre")?;
        let pre = self.asgnset()?;
        let mut outcomes = Vec::new();
        while self.is_keyword("outcome") {
            self.advance();
            let probability = self.number()?;
            let report = if self.eat(&Tok::Arrow) {
                Some(self.value()?)
            } else {
                None
            };
            let post = self.asgnset()?;
            outcomes.push(OutcomeSpec {
                probability,
                report,
                post,
            });
        }
        if *self.peek() != Tok::RBrace {
            return self.error(&["`outcome`", "`}`"]);
        }
        self.advance();
        spec.actions.push(ActionSchema {
            name,
            params,
            pre,
            outcomes,
        });
        Ok(())
    }

    fn template(&mut self, spec: &mut DomainSpec) -> Result<(), ParseError> {
        self.keyword("template")?;
        let (name, loc) = self.name()?;
        Self::declare(&mut self.locs.templates, "template", &name, loc)?;
        self.owner = format!("template {name}");
        let params = if *self.peek() == Tok::LParen {
            self.paren_names(false)?
        } else {
            Vec::new()
        };
        self.expect(Tok::LBrace)?;
        self.keyword("pre")?;
        let pre = self.asgnset()?;
        let mut declared = Vec::new();
        while self.is_keyword("declared") {
            self.advance();
            let probability = self.number()?;
            let post = self.asgnset()?;
            declared.push(DeclaredOutcome { probability, post });
        }
        if !self.is_keyword("body") {
            return self.error(&["`declared`", "`body`"]);
        }
        self.advance();
        let mut body_locs = Vec::new();
        let body = self.btexpr(&mut body_locs)?;
        self.locs.bodies.insert(name.clone(), body_locs);
        self.expect(Tok::RBrace)?;
        spec.templates.push(TemplateSchema {
            name,
            params,
            pre,
            declared,
            body,
        });
        Ok(())
    }

    fn btexpr(&mut self, locs: &mut Vec<Loc>) -> Result<BtExpr, ParseError> {
        let control = match self.peek() {
            Tok::Name(n) if n == "seq" => Some(Control::Sequence),
            Tok::Name(n) if n == "fb" => Some(Control::Fallback),
            Tok::Name(n) if n == "skip" => Some(Control::Skipper),
            _ => None,
        };
        if let Some(control) = control {
            self.advance();
            self.expect(Tok::LBrace)?;
            let mut children = vec![self.btexpr(locs)?];
            while *self.peek() != Tok::RBrace {
                children.push(self.btexpr(locs)?);
            }
            self.advance();
            return Ok(BtExpr::Control(control, children));
        }
        let kind = match self.peek() {
            Tok::Name(n) if n == "act" || n == "cond" || n == "tmpl" => n.clone(),
            _ => return self.error(&["`seq`", "`fb`", "`skip`", "`act`", "`cond`", "`tmpl`"]),
        };
        self.advance();
        let (name, loc) = self.name()?;
        locs.push(loc);
        let args = self.optional_paren_names()?;
        Ok(match kind.as_str() {
            "act" => BtExpr::Act { name, args },
            "cond" => BtExpr::Cond { name, args },
            _ => BtExpr::Tmpl { name, args },
        })
    }
}

/// Parses and validates a domain file.
pub fn parse_domain(text: &str) -> Result<DomainSpec, ParseError> {
    let toks = lex(text)?;
    let mut parser = Parser {
        toks,
        pos: 0,
        locs: Locations::default(),
        owner: String::new(),
    };
    let spec = parser.file()?;
    Validator {
        spec: &spec,
        locs: &parser.locs,
        cursor: Vec::new(),
    }
    .run()?;
    Ok(spec)
}

struct Validator<'a> {
    spec: &'a DomainSpec,
    locs: &'a Locations,
    /// Remaining assignment locations of the declaration being checked.
    cursor: Vec<Loc>,
}

/// What an argument may refer to inside a given declaration.
struct Scope<'a> {
    /// Schema parameters; each names a parameter space.
    params: &'a [String],
}

impl<'a> Validator<'a> {
    fn enter(&mut self, owner: &str) {
        let mut locs = self.locs.assignments.get(owner).cloned().unwrap_or_default();
        locs.reverse();
        self.cursor = locs;
    }

    fn run(mut self) -> Result<(), ParseError> {
        let spec = self.spec;
        for c in &spec.conditions {
            let loc = self.locs.conditions[&c.name];
            self.check_signature(&c.params, loc, &c.name)?;
        }
        for a in &spec.actions {
            let loc = self.locs.actions[&a.name];
            self.check_signature(&a.params, loc, &a.name)?;
            let scope = Scope { params: &a.params };
            self.enter(&format!("action {}", a.name));
            for asg in &a.pre {
                self.check_assignment(asg, &scope)?;
            }
            if a.outcomes.is_empty() {
                return Err(loc.semantic(format!("action `{}` has no outcomes", a.name)));
            }
            for o in &a.outcomes {
                for asg in &o.post {
                    self.check_assignment(asg, &scope)?;
                }
            }
            check_probabilities(a.outcomes.iter().map(|o| o.probability), loc, &a.name)?;
        }
        for t in &spec.templates {
            let loc = self.locs.templates[&t.name];
            self.check_signature(&t.params, loc, &t.name)?;
            let scope = Scope { params: &t.params };
            self.enter(&format!("template {}", t.name));
            for asg in &t.pre {
                self.check_assignment(asg, &scope)?;
            }
            for o in &t.declared {
                for asg in &o.post {
                    self.check_assignment(asg, &scope)?;
                }
            }
            if !t.declared.is_empty() {
                check_probabilities(t.declared.iter().map(|o| o.probability), loc, &t.name)?;
            }
            let body_locs = &self.locs.bodies[&t.name];
            let mut i = 0;
            self.check_body(&t.body, &scope, body_locs, &mut i)?;
        }
        self.check_template_cycles()?;
        let no_params = Scope { params: &[] };
        if let Some(initial) = &spec.initial {
            let mut seen = BTreeSet::new();
            self.enter("initial");
            for asg in initial {
                let loc = self.peek_loc();
                self.check_assignment(asg, &no_params)?;
                if !seen.insert((asg.name.clone(), asg.args.clone())) {
                    return Err(loc.semantic(format!("`{}` assigned twice in initial", asg.name)));
                }
            }
        }
        if let Some(goal) = &spec.goal {
            let gloc = self.locs.goal.expect("goal location recorded");
            self.enter("goal");
            for asg in &goal.literals {
                let loc = self.peek_loc();
                self.check_assignment(asg, &no_params)?;
                if asg.value != Status::Success {
                    return Err(loc.semantic(format!("goal literal `{}` must require S", asg.name)));
                }
            }
            if !(goal.probability > 0.0 && goal.probability <= 1.0) {
                return Err(gloc.semantic(format!(
                    "goal probability {} outside (0, 1]",
                    goal.probability
                )));
            }
        }
        Ok(())
    }

    fn peek_loc(&self) -> Loc {
        *self.cursor.last().expect("assignment location recorded")
    }

    fn check_signature(&self, params: &[String], loc: Loc, owner: &str) -> Result<(), ParseError> {
        let mut seen = BTreeSet::new();
        for p in params {
            if self.spec.param(p).is_none() {
                return Err(loc.semantic(format!("unknown parameter space `{p}` in `{owner}`")));
            }
            if !seen.insert(p) {
                return Err(loc.semantic(format!("parameter space `{p}` repeated in `{owner}`")));
            }
        }
        Ok(())
    }

    /// Checks that `arg` fits parameter space `space` within `scope`.
    fn check_arg(&self, arg: &str, space: &str, scope: &Scope, loc: Loc, owner: &str) -> Result<(), ParseError> {
        if scope.params.iter().any(|p| p == arg) {
            if arg == space {
                return Ok(());
            }
            return Err(loc.semantic(format!(
                "parameter `{arg}` used where `{space}` is expected in `{owner}`"
            )));
        }
        let instances = &self.spec.param(space).expect("signature validated").instances;
        if instances.iter().any(|i| i == arg) {
            Ok(())
        } else {
            Err(loc.semantic(format!("`{arg}` is not an instance of `{space}` in `{owner}`")))
        }
    }

    fn check_assignment(&mut self, asg: &Assignment, scope: &Scope) -> Result<(), ParseError> {
        let loc = self.cursor.pop().expect("assignment location recorded");
        let Some(cond) = self.spec.condition(&asg.name) else {
            return Err(loc.semantic(format!("unknown condition `{}`", asg.name)));
        };
        if cond.params.len() != asg.args.len() {
            return Err(loc.semantic(format!(
                "condition `{}` takes {} arguments, got {}",
                asg.name,
                cond.params.len(),
                asg.args.len()
            )));
        }
        for (arg, space) in asg.args.iter().zip(&cond.params) {
            self.check_arg(arg, space, scope, loc, &asg.name)?;
        }
        if !cond.values.contains(&asg.value) {
            return Err(loc.semantic(format!(
                "value {} not allowed for condition `{}`",
                asg.value, asg.name
            )));
        }
        Ok(())
    }

    fn check_body(&self, expr: &BtExpr, scope: &Scope, locs: &[Loc], i: &mut usize) -> Result<(), ParseError> {
        let (name, args, signature, kind) = match expr {
            BtExpr::Control(_, children) => {
                for c in children {
                    self.check_body(c, scope, locs, i)?;
                }
                return Ok(());
            }
            BtExpr::Act { name, args } => (name, args, self.spec.action(name).map(|a| &a.params), "action"),
            BtExpr::Cond { name, args } => (name, args, self.spec.condition(name).map(|c| &c.params), "condition"),
            BtExpr::Tmpl { name, args } => (name, args, self.spec.template(name).map(|t| &t.params), "template"),
        };
        let loc = locs[*i];
        *i += 1;
        let Some(signature) = signature else {
            return Err(loc.semantic(format!("unknown {kind} `{name}`")));
        };
        if signature.len() != args.len() {
            return Err(loc.semantic(format!(
                "{kind} `{name}` takes {} arguments, got {}",
                signature.len(),
                args.len()
            )));
        }
        for (arg, space) in args.iter().zip(signature) {
            self.check_arg(arg, space, scope, loc, name)?;
        }
        Ok(())
    }

    fn check_template_cycles(&self) -> Result<(), ParseError> {
        fn refs(expr: &BtExpr, out: &mut Vec<String>) {
            match expr {
                BtExpr::Control(_, children) => children.iter().for_each(|c| refs(c, out)),
                BtExpr::Tmpl { name, .. } => out.push(name.clone()),
                _ => {}
            }
        }
        let graph: BTreeMap<&str, Vec<String>> = self
            .spec
            .templates
            .iter()
            .map(|t| {
                let mut r = Vec::new();
                refs(&t.body, &mut r);
                (t.name.as_str(), r)
            })
            .collect();
        // 0 = unvisited, 1 = on stack, 2 = done
        fn visit<'g>(n: &'g str, graph: &'g BTreeMap<&str, Vec<String>>, state: &mut BTreeMap<&'g str, u8>) -> bool {
            match state.get(n) {
                Some(1) => return false,
                Some(2) => return true,
                _ => {}
            }
            state.insert(n, 1);
            for m in graph.get(n).into_iter().flatten() {
                if !visit(m, graph, state) {
                    return false;
                }
            }
            state.insert(n, 2);
            true
        }
        let mut state = BTreeMap::new();
        for t in &self.spec.templates {
            if !visit(&t.name, &graph, &mut state) {
                return Err(self.locs.templates[&t.name]
                    .semantic(format!("template `{}` expands into itself", t.name)));
            }
        }
        Ok(())
    }
}

fn check_probabilities(ps: impl Iterator<Item = f64>, loc: Loc, owner: &str) -> Result<(), ParseError> {
    let mut sum = 0.0;
    for p in ps {
        if !(p > 0.0 && p <= 1.0) {
            return Err(loc.semantic(format!("probability {p} of `{owner}` outside (0, 1]")));
        }
        sum += p;
    }
    if (sum - 1.0).abs() > SUM_TOLERANCE {
        let shown = format!("{sum:.9}");
        let shown = shown.trim_end_matches('0').trim_end_matches('.');
        return Err(loc.semantic(format!("outcome probabilities of `{owner}` sum to {shown}")));
    }
    Ok(())
}
