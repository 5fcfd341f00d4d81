use super::lexer::{tokenize, Spanned, Tok};
use super::{
    Annotation, Element, Grammar, GrammarError, LexEntry, Metavar, Path, Repetition, RhsItem,
    Rule, EMPTY_CATEGORY,
};
use crate::instrument::DisjunctId;

/// Parses the grammar file format.
///
/// Sections are `features:`, `start:`, `rules:` and `lexicon:`; all but
/// `rules:` are optional. Without `start:` the first rule's left-hand side
/// is the start symbol. Rules sharing a left-hand side are merged into one
/// rule whose body is a disjunction of the individual bodies, positioned
/// where the first of them appeared.
pub fn parse_grammar(text: &str) -> Result<Grammar, GrammarError> {
    let toks = tokenize(text)?;
    let mut p = Parser { toks, pos: 0 };
    p.grammar()
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

type PResult<T> = Result<T, GrammarError>;

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn peek_at(&self, offset: usize) -> Option<&Tok> {
        self.toks.get(self.pos + offset).map(|t| &t.tok)
    }

    fn here(&self) -> (usize, usize) {
        match self.toks.get(self.pos).or_else(|| self.toks.last()) {
            Some(t) if self.pos < self.toks.len() => (t.line, t.column),
            Some(t) => (t.line, t.column + 1),
            None => (1, 1),
        }
    }

    fn error<T>(&self, message: impl Into<String>) -> PResult<T> {
        let (line, column) = self.here();
        Err(GrammarError::syntax(line, column, message))
    }

    fn unexpected<T>(&self, wanted: &str) -> PResult<T> {
        match self.peek() {
            Some(t) => self.error(format!("expected {wanted}, found {}", t.describe())),
            None => self.error(format!("expected {wanted}, found end of input")),
        }
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|t| t.tok.clone());
        self.pos += 1;
        t
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok) -> PResult<()> {
        if self.eat(&tok) {
            Ok(())
        } else {
            self.unexpected(&tok.describe())
        }
    }

    fn ident(&mut self, wanted: &str) -> PResult<String> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => self.unexpected(wanted),
        }
    }

    fn at_section_header(&self) -> bool {
        matches!(self.peek(), Some(Tok::Ident(_))) && self.peek_at(1) == Some(&Tok::Colon)
    }

    fn grammar(&mut self) -> PResult<Grammar> {
        let mut features: Option<Vec<String>> = None;
        let mut start: Option<(String, (usize, usize))> = None;
        let mut rules: Vec<(Rule, (usize, usize))> = Vec::new();
        let mut lexicon = Vec::new();
        let mut seen_rules = false;

        while self.peek().is_some() {
            if !self.at_section_header() {
                return self.unexpected("a section header");
            }
            let at = self.here();
            let name = self.ident("a section name")?;
            self.expect(Tok::Colon)?;
            match name.as_str() {
                "features" => {
                    let list = features.get_or_insert_with(Vec::new);
                    while !self.eat(&Tok::Semi) {
                        let f = self.ident("a feature name or `;`")?;
                        if !list.contains(&f) {
                            list.push(f);
                        }
                    }
                }
                "start" => {
                    if start.is_some() {
                        return Err(GrammarError::syntax(at.0, at.1, "duplicate `start:` section"));
                    }
                    let pos = self.here();
                    let s = self.ident("a start category")?;
                    self.expect(Tok::Semi)?;
                    start = Some((s, pos));
                }
                "rules" => {
                    seen_rules = true;
                    while self.peek().is_some() && !self.at_section_header() {
                        let pos = self.here();
                        rules.push((self.rule()?, pos));
                    }
                }
                "lexicon" => {
                    while self.peek().is_some() && !self.at_section_header() {
                        lexicon.push(self.lex_entry()?);
                    }
                }
                other => {
                    return Err(GrammarError::syntax(
                        at.0,
                        at.1,
                        format!("unknown section `{other}`"),
                    ))
                }
            }
        }

        if !seen_rules || rules.is_empty() {
            return self.error("grammar has no rules");
        }

        let rules = merge_rules(rules);
        let start_symbol = match start {
            Some((s, (line, column))) => {
                if !rules.iter().any(|r| r.lhs == s) {
                    return Err(GrammarError::syntax(
                        line,
                        column,
                        format!("start symbol `{s}` has no rule"),
                    ));
                }
                s
            }
            None => rules[0].lhs.clone(),
        };

        Ok(Grammar {
            start_symbol,
            declared_functions: features.unwrap_or_default(),
            rules,
            lexicon,
        })
    }

    fn rule(&mut self) -> PResult<Rule> {
        let lhs = self.ident("a rule left-hand side")?;
        if lhs == EMPTY_CATEGORY {
            return self.error("`e` cannot be a rule left-hand side");
        }
        self.expect(Tok::Arrow)?;
        if self.peek() == Some(&Tok::Dot) {
            return self.error("empty RHS");
        }
        let rhs = self.sequence()?;
        self.expect(Tok::Dot)?;
        Ok(Rule { lhs, rhs })
    }

    /// Items up to (not including) `.`, `|` or `}`.
    fn sequence(&mut self) -> PResult<Vec<RhsItem>> {
        let mut items = Vec::new();
        loop {
            match self.peek() {
                Some(Tok::Dot) | Some(Tok::Pipe) | Some(Tok::RBrace) | None => break,
                _ => items.push(self.item()?),
            }
        }
        if items.is_empty() {
            return self.error("empty alternative (write `e` for the empty category)");
        }
        Ok(items)
    }

    fn item(&mut self) -> PResult<RhsItem> {
        match self.peek() {
            Some(Tok::LBrace) => {
                self.bump();
                let mut branches = vec![self.sequence()?];
                while self.eat(&Tok::Pipe) {
                    branches.push(self.sequence()?);
                }
                self.expect(Tok::RBrace)?;
                if branches.len() < 2 {
                    return self.error("a disjunction needs at least two branches");
                }
                Ok(RhsItem::Disjunction(branches))
            }
            Some(Tok::Ident(name)) if name == EMPTY_CATEGORY => {
                self.bump();
                if matches!(
                    self.peek(),
                    Some(Tok::Question) | Some(Tok::Star) | Some(Tok::Plus)
                ) {
                    return self.error("the empty category cannot be repeated");
                }
                Ok(RhsItem::Empty(self.annotation_block()?))
            }
            Some(Tok::Ident(_)) => {
                let category = self.ident("a category")?;
                let repetition = match self.peek() {
                    Some(Tok::Question) => Repetition::Optional,
                    Some(Tok::Star) => Repetition::Star,
                    Some(Tok::Plus) => Repetition::Plus,
                    _ => Repetition::One,
                };
                if repetition != Repetition::One {
                    self.bump();
                }
                let annotations = self.annotation_block()?;
                Ok(RhsItem::Element(Element {
                    category,
                    repetition,
                    annotations,
                }))
            }
            _ => self.unexpected("a category, `e` or `{`"),
        }
    }

    /// Optional `( ANN* )`.
    fn annotation_block(&mut self) -> PResult<Vec<Annotation>> {
        if !self.eat(&Tok::LParen) {
            return Ok(Vec::new());
        }
        let anns = self.annotations(&[Tok::RParen])?;
        self.expect(Tok::RParen)?;
        Ok(anns)
    }

    fn annotations(&mut self, stop: &[Tok]) -> PResult<Vec<Annotation>> {
        let mut out = Vec::new();
        while let Some(t) = self.peek() {
            if stop.contains(t) {
                break;
            }
            out.push(self.annotation()?);
        }
        Ok(out)
    }

    fn annotation(&mut self) -> PResult<Annotation> {
        match self.peek() {
            Some(Tok::LBrace) => {
                self.bump();
                let stop = [Tok::Pipe, Tok::RBrace];
                let mut branches = Vec::new();
                loop {
                    let branch = self.annotations(&stop)?;
                    if branch.is_empty() {
                        return self.error("empty annotation alternative");
                    }
                    branches.push(branch);
                    if !self.eat(&Tok::Pipe) {
                        break;
                    }
                }
                self.expect(Tok::RBrace)?;
                if branches.len() < 2 {
                    return self.error("an annotation disjunction needs at least two branches");
                }
                self.eat(&Tok::Semi);
                Ok(Annotation::Disjunction(branches))
            }
            Some(Tok::At) => {
                self.bump();
                let name = self.ident("a marker name")?;
                let id: DisjunctId = match name.parse() {
                    Ok(id) => id,
                    Err(_) => return self.error(format!("malformed marker `{name}`")),
                };
                self.expect(Tok::Semi)?;
                Ok(Annotation::Marker(id))
            }
            Some(Tok::Tilde) => {
                self.bump();
                let path = self.path()?;
                self.expect(Tok::Semi)?;
                Ok(Annotation::NonExistence(path))
            }
            Some(Tok::Up) | Some(Tok::Down) => {
                let lhs = self.path()?;
                let ann = match self.peek() {
                    Some(Tok::Eq) => {
                        self.bump();
                        match self.peek() {
                            Some(Tok::Up) | Some(Tok::Down) => Annotation::PathEq(lhs, self.path()?),
                            Some(Tok::Ident(_)) => {
                                Annotation::AtomEq(lhs, self.ident("an atom")?)
                            }
                            Some(Tok::Plus) => {
                                self.bump();
                                Annotation::AtomEq(lhs, "+".into())
                            }
                            _ => return self.unexpected("a path or an atom"),
                        }
                    }
                    Some(Tok::Ident(kw)) if kw == "in" => {
                        self.bump();
                        Annotation::Membership(lhs, self.path()?)
                    }
                    _ => return self.unexpected("`=` or `in`"),
                };
                self.expect(Tok::Semi)?;
                Ok(ann)
            }
            _ => self.unexpected("an annotation"),
        }
    }

    fn path(&mut self) -> PResult<Path> {
        let root = match self.bump() {
            Some(Tok::Up) => Metavar::Up,
            Some(Tok::Down) => Metavar::Down,
            _ => {
                self.pos -= 1;
                return self.unexpected("`^` or `!`");
            }
        };
        let mut attrs = Vec::new();
        while let Some(Tok::Ident(a)) = self.peek() {
            if a == "in" {
                break;
            }
            attrs.push(a.clone());
            self.pos += 1;
        }
        Ok(Path { root, attrs })
    }

    fn lex_entry(&mut self) -> PResult<LexEntry> {
        let surface = match self.bump() {
            Some(Tok::Ident(s)) | Some(Tok::Quoted(s)) => s,
            _ => {
                self.pos -= 1;
                return self.unexpected("a surface form");
            }
        };
        let category = self.ident("a lexical category")?;
        if category == EMPTY_CATEGORY {
            return self.error("`e` cannot be a lexical category");
        }
        let at = self.here();
        let annotations = self.annotation_block()?;
        if mentions_down(&annotations) {
            return Err(GrammarError::syntax(
                at.0,
                at.1,
                "lexical annotations may only refer to `^`",
            ));
        }
        self.expect(Tok::Dot)?;
        Ok(LexEntry {
            surface,
            category,
            annotations,
        })
    }
}

fn mentions_down(anns: &[Annotation]) -> bool {
    anns.iter().any(|a| match a {
        Annotation::PathEq(l, r) | Annotation::Membership(l, r) => {
            l.root == Metavar::Down || r.root == Metavar::Down
        }
        Annotation::AtomEq(p, _) | Annotation::NonExistence(p) => p.root == Metavar::Down,
        Annotation::Disjunction(bs) => bs.iter().any(|b| mentions_down(b)),
        Annotation::Marker(_) => false,
    })
}

fn merge_rules(rules: Vec<(Rule, (usize, usize))>) -> Vec<Rule> {
    let mut merged: Vec<(String, Vec<Vec<RhsItem>>)> = Vec::new();
    for (rule, _) in rules {
        match merged.iter_mut().find(|(lhs, _)| *lhs == rule.lhs) {
            Some((_, bodies)) => bodies.push(rule.rhs),
            None => merged.push((rule.lhs, vec![rule.rhs])),
        }
    }
    merged
        .into_iter()
        .map(|(lhs, mut bodies)| {
            let rhs = if bodies.len() == 1 {
                bodies.pop().unwrap()
            } else {
                vec![RhsItem::Disjunction(bodies)]
            };
            Rule { lhs, rhs }
        })
        .collect()
}
