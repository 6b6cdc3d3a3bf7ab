//! Recursive-descent parser for `.dsk` documents.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use super::lexer::{tokenize, Pos, Spanned, Token};
use super::{Document, GraphDef, Item, NonConceptDef, ProductLineDef};
use crate::delta::{Delta, ModOp};
use crate::intangible::IntangibleSpec;
use crate::model::{
    BaseConcept, ConceptName, FunctionalitySpec, IdentityLabel, MemberKind, PartSpec, PropertySpec, RESERVED_WORDS,
};
use crate::pattern::{Edge, EdgeKind, Node, NodeKind, OntologyGraph};
use crate::product_line::{Stage, Variant, VariantSet};
use crate::registry::builtin_corpus;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax {
        expected: String,
        found: String,
    },
    DuplicateName(String),
    UnknownReference(String),
    /// Well-formed text with an invalid value, such as an empty attribute.
    Invalid(String),
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::Syntax { expected, found } => {
                write!(f, "syntax error: expected {expected}, found {found}")
            }
            ParseErrorKind::DuplicateName(name) => write!(f, "duplicate name {name}"),
            ParseErrorKind::UnknownReference(name) => write!(f, "unknown reference {name}"),
            ParseErrorKind::Invalid(message) => f.write_str(message),
        }
    }
}

/// First error found in a document, with its 1-based line and column.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{col}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub kind: ParseErrorKind,
}

impl ParseError {
    fn at(pos: Pos, kind: ParseErrorKind) -> Self {
        ParseError {
            line: pos.line,
            col: pos.col,
            kind,
        }
    }
}

type Result<T> = std::result::Result<T, ParseError>;

/// Parses a UTF-8 `.dsk` document.
pub fn parse(input: &str) -> Result<Document> {
    let tokens = tokenize(input).map_err(|e| {
        ParseError::at(
            e.pos,
            ParseErrorKind::Syntax {
                expected: "token".into(),
                found: e.message,
            },
        )
    })?;
    let mut parser = Parser {
        tokens,
        at: 0,
        references: Vec::new(),
    };
    let document = parser.document()?;

    let known: BTreeSet<String> = builtin_corpus()
        .concepts()
        .chain(document.concepts())
        .map(|c| c.name().to_string())
        .collect();
    if let Some((name, pos)) = parser
        .references
        .iter()
        .find(|(name, _)| !known.contains(name.as_str()))
    {
        return Err(ParseError::at(*pos, ParseErrorKind::UnknownReference(name.to_string())));
    }
    Ok(document)
}

/// Like [`parse`] for raw bytes; invalid UTF-8 is reported at the first
/// offending byte.
pub fn parse_bytes(input: &[u8]) -> Result<Document> {
    match std::str::from_utf8(input) {
        Ok(text) => parse(text),
        Err(err) => {
            let valid = std::str::from_utf8(&input[..err.valid_up_to()]).expect("prefix is valid");
            let line = valid.matches('\n').count() + 1;
            let col = valid.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
            Err(ParseError {
                line,
                col,
                kind: ParseErrorKind::Invalid("input is not valid UTF-8".into()),
            })
        }
    }
}

struct Parser {
    tokens: Vec<Spanned>,
    at: usize,
    /// Base concept references, checked once the whole document is read.
    references: Vec<(ConceptName, Pos)>,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.at].token
    }

    fn pos(&self) -> Pos {
        self.tokens[self.at].pos
    }

    fn advance(&mut self) -> Spanned {
        let spanned = self.tokens[self.at].clone();
        if spanned.token != Token::Eof {
            self.at += 1;
        }
        spanned
    }

    fn error(&self, expected: impl Into<String>) -> ParseError {
        ParseError::at(
            self.pos(),
            ParseErrorKind::Syntax {
                expected: expected.into(),
                found: self.peek().describe(),
            },
        )
    }

    fn at_keyword(&self, keyword: &str) -> bool {
        matches!(self.peek(), Token::Word(w) if w == keyword)
    }

    fn eat_keyword(&mut self, keyword: &str) -> bool {
        let hit = self.at_keyword(keyword);
        if hit {
            self.advance();
        }
        hit
    }

    fn keyword(&mut self, keyword: &str) -> Result<()> {
        if self.eat_keyword(keyword) {
            Ok(())
        } else {
            Err(self.error(format!("`{keyword}`")))
        }
    }

    fn punct(&mut self, token: Token) -> Result<()> {
        if *self.peek() == token {
            self.advance();
            Ok(())
        } else {
            Err(self.error(token.describe()))
        }
    }

    fn ident(&mut self) -> Result<(ConceptName, Pos)> {
        match self.peek() {
            Token::Word(w) if !RESERVED_WORDS.contains(&w.as_str()) => {
                let pos = self.pos();
                let name = ConceptName::new(w.clone())
                    .map_err(|e| ParseError::at(pos, ParseErrorKind::Invalid(e.to_string())))?;
                self.advance();
                Ok((name, pos))
            }
            _ => Err(self.error("identifier")),
        }
    }

    fn string(&mut self) -> Result<(String, Pos)> {
        match self.peek() {
            Token::Str(text) => {
                let out = (text.clone(), self.pos());
                self.advance();
                Ok(out)
            }
            _ => Err(self.error("string")),
        }
    }

    fn document(&mut self) -> Result<Document> {
        let mut items = Vec::new();
        let mut seen: BTreeSet<(&'static str, ConceptName)> = BTreeSet::new();
        loop {
            let start = self.at;
            let item = match self.peek() {
                Token::Eof => break,
                Token::Word(w) => match w.as_str() {
                    "concept" => Item::Concept(self.concept()?),
                    "nonconcept" => Item::NonConcept(self.nonconcept()?),
                    "intangible" => Item::Intangible(self.intangible()?),
                    "productline" => Item::ProductLine(self.productline()?),
                    "graph" => Item::Graph(self.graph()?),
                    _ => return Err(self.error("item keyword")),
                },
                _ => return Err(self.error("item keyword")),
            };
            if !seen.insert((item.keyword(), item.name().clone())) {
                // The name token follows the item keyword.
                let name_pos = self.tokens[start + 1].pos;
                return Err(ParseError::at(
                    name_pos,
                    ParseErrorKind::DuplicateName(item.name().to_string()),
                ));
            }
            items.push(item);
        }
        Ok(Document::new(items))
    }

    fn concept(&mut self) -> Result<BaseConcept> {
        self.keyword("concept")?;
        let (name, _) = self.ident()?;
        self.punct(Token::LBrace)?;

        let mut parts = Vec::new();
        let mut functionalities: Vec<FunctionalitySpec> = Vec::new();
        let mut properties = Vec::new();
        let mut members: BTreeSet<ConceptName> = BTreeSet::new();
        let mut requirements: Vec<(ConceptName, Pos)> = Vec::new();

        loop {
            let kind = if self.eat_keyword("part") {
                MemberKind::Part
            } else if self.eat_keyword("functionality") {
                MemberKind::Functionality
            } else if self.eat_keyword("property") {
                MemberKind::Property
            } else if *self.peek() == Token::RBrace {
                self.advance();
                break;
            } else {
                return Err(self.error("`part`, `functionality`, `property` or `}`"));
            };
            let (member, pos) = self.ident()?;
            if !members.insert(member.clone()) {
                return Err(ParseError::at(pos, ParseErrorKind::DuplicateName(member.to_string())));
            }
            match kind {
                MemberKind::Part => {
                    let essential = self.eat_keyword("essential");
                    parts.push(PartSpec {
                        name: member,
                        essential,
                    });
                }
                MemberKind::Functionality => {
                    let mut requires = BTreeSet::new();
                    if self.eat_keyword("requires") {
                        loop {
                            let (req, req_pos) = self.ident()?;
                            requirements.push((req.clone(), req_pos));
                            requires.insert(req);
                            if *self.peek() != Token::Comma {
                                break;
                            }
                            self.advance();
                        }
                    }
                    functionalities.push(FunctionalitySpec { name: member, requires });
                }
                MemberKind::Property => properties.push(PropertySpec::new(member)),
            }
        }

        for (req, pos) in requirements {
            let resolves = parts.iter().any(|p: &PartSpec| p.name == req)
                || properties.iter().any(|p: &PropertySpec| p.name == req);
            if !resolves {
                return Err(ParseError::at(pos, ParseErrorKind::UnknownReference(req.to_string())));
            }
        }

        Ok(BaseConcept::new(name, parts, functionalities, properties)
            .expect("names and requirements were checked while parsing"))
    }

    fn kind(&mut self) -> Result<MemberKind> {
        for kind in MemberKind::ALL {
            if self.eat_keyword(kind.keyword()) {
                return Ok(kind);
            }
        }
        Err(self.error("`part`, `functionality` or `property`"))
    }

    /// `mod*` followed by the closing brace.
    fn mods(&mut self) -> Result<Vec<ModOp>> {
        let mut ops = Vec::new();
        loop {
            let op = if self.eat_keyword("remove") {
                let kind = self.kind()?;
                ModOp::Remove(kind, self.ident()?.0)
            } else if self.eat_keyword("add") {
                let kind = self.kind()?;
                ModOp::Add(kind, self.ident()?.0)
            } else if self.eat_keyword("restore") {
                let kind = self.kind()?;
                ModOp::Restore(kind, self.ident()?.0)
            } else if self.eat_keyword("identity") {
                if *self.peek() == Token::Non {
                    self.advance();
                    ModOp::SetIdentity(IdentityLabel::Non)
                } else {
                    let (name, _) = self.ident().map_err(|_| self.error("identifier or `Non-`"))?;
                    let negated = self.eat_keyword("negated");
                    ModOp::SetIdentity(IdentityLabel::Named { name, negated })
                }
            } else if *self.peek() == Token::RBrace {
                self.advance();
                return Ok(ops);
            } else {
                return Err(self.error("`remove`, `add`, `restore`, `identity` or `}`"));
            };
            ops.push(op);
        }
    }

    fn base_reference(&mut self) -> Result<ConceptName> {
        self.keyword("from")?;
        let (base, pos) = self.ident()?;
        self.references.push((base.clone(), pos));
        Ok(base)
    }

    fn nonconcept(&mut self) -> Result<NonConceptDef> {
        self.keyword("nonconcept")?;
        let (name, _) = self.ident()?;
        let base = self.base_reference()?;
        self.punct(Token::LBrace)?;
        let ops = self.mods()?;
        Ok(NonConceptDef {
            name,
            delta: Delta::new(base, ops),
        })
    }

    fn intangible(&mut self) -> Result<IntangibleSpec> {
        self.keyword("intangible")?;
        let (term, _) = self.ident()?;
        self.punct(Token::LBrace)?;
        self.keyword("pos")?;
        let (pos_text, pos_at) = self.string()?;
        self.keyword("neg")?;
        let (neg_text, _) = self.string()?;
        self.punct(Token::RBrace)?;
        IntangibleSpec::new(term, pos_text, neg_text)
            .map_err(|e| ParseError::at(pos_at, ParseErrorKind::Invalid(e.to_string())))
    }

    fn productline(&mut self) -> Result<ProductLineDef> {
        self.keyword("productline")?;
        let (name, _) = self.ident()?;
        let base = self.base_reference()?;
        self.punct(Token::LBrace)?;
        let mut variants = Vec::new();
        let mut names = BTreeSet::new();
        while self.eat_keyword("variant") {
            let (variant, pos) = self.ident()?;
            if !names.insert(variant.clone()) {
                return Err(ParseError::at(pos, ParseErrorKind::DuplicateName(variant.to_string())));
            }
            self.keyword("stage")?;
            let stage = Stage::ALL
                .into_iter()
                .find(|s| self.at_keyword(s.keyword()))
                .ok_or_else(|| self.error("`design`, `manufacturing` or `delivery`"))?;
            self.advance();
            self.punct(Token::LBrace)?;
            let ops = self.mods()?;
            variants.push(Variant {
                name: variant,
                delta: Delta::new(base.clone(), ops),
                stage,
            });
        }
        self.punct(Token::RBrace).map_err(|_| self.error("`variant` or `}`"))?;
        let set = VariantSet::new(base, variants).expect("variants share the base and unique names");
        Ok(ProductLineDef { name, set })
    }

    fn graph(&mut self) -> Result<GraphDef> {
        self.keyword("graph")?;
        let (name, _) = self.ident()?;
        self.punct(Token::LBrace)?;

        let mut nodes: Vec<Node> = Vec::new();
        while self.eat_keyword("node") {
            let (id, pos) = self.ident()?;
            if nodes.iter().any(|n| n.id == id.as_str()) {
                return Err(ParseError::at(pos, ParseErrorKind::DuplicateName(id.to_string())));
            }
            self.punct(Token::Colon)?;
            let kind = [
                NodeKind::Class,
                NodeKind::Socket,
                NodeKind::ISocket,
                NodeKind::PosClass,
                NodeKind::NegClass,
            ]
            .into_iter()
            .find(|k| self.at_keyword(k.keyword()))
            .ok_or_else(|| self.error("`class`, `socket`, `isocket`, `pos` or `neg`"))?;
            self.advance();
            let label = if self.eat_keyword("label") {
                Some(self.string()?.0)
            } else {
                None
            };
            nodes.push(Node {
                id: id.to_string(),
                kind,
                label,
            });
        }

        let mut edges: Vec<Edge> = Vec::new();
        while self.eat_keyword("edge") {
            let (from, from_pos) = self.ident()?;
            self.punct(Token::Arrow)?;
            let (to, to_pos) = self.ident()?;
            for (end, pos) in [(&from, from_pos), (&to, to_pos)] {
                if !nodes.iter().any(|n| n.id == end.as_str()) {
                    return Err(ParseError::at(pos, ParseErrorKind::UnknownReference(end.to_string())));
                }
            }
            if edges.iter().any(|e| e.from == from.as_str() && e.to == to.as_str()) {
                return Err(ParseError::at(
                    from_pos,
                    ParseErrorKind::DuplicateName(format!("{from}->{to}")),
                ));
            }
            self.punct(Token::Colon)?;
            let kind = if self.eat_keyword("composition") {
                EdgeKind::Composition
            } else if self.eat_keyword("plugged") {
                match *self.peek() {
                    Token::Int(c) => {
                        self.advance();
                        EdgeKind::PluggedIn(c)
                    }
                    _ => return Err(self.error("cardinality")),
                }
            } else {
                return Err(self.error("`composition` or `plugged`"));
            };
            edges.push(Edge {
                from: from.to_string(),
                to: to.to_string(),
                kind,
            });
        }
        self.punct(Token::RBrace).map_err(|_| self.error("`edge` or `}`"))?;

        let graph = OntologyGraph::new(nodes, edges).expect("ids and edges were checked while parsing");
        Ok(GraphDef { name, graph })
    }
}
