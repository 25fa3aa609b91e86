use super::ast::{AstNode, NodeKind as K};
use super::lexer::{lex, TokKind, Token};
use crate::diag::{Diagnostic, Span};

const BIN_LEVELS: [&[&str]; 10] = [
    &["||"],
    &["&&"],
    &["|"],
    &["&"],
    &["==", "!="],
    &["<", ">", "<=", ">="],
    &["<<", ">>"],
    &["+", "-"],
    &["*", "/", "%"],
    &["^"],
];

const TYPE_KINDS: [&str; 5] = ["int", "str", "float", "bool", "clockdomain"];

pub struct Parser<'a> {
    file: &'a str,
    toks: Vec<Token>,
    pos: usize,
    /// Inside `<...>` argument lists, `>` closes the list instead of comparing.
    no_gt: bool,
}

type PResult<T> = Result<T, Diagnostic>;

/// Parse a complete `.td` source file into a `Package` node.
pub fn parse_source(file: &str, src: &str) -> PResult<AstNode> {
    let mut p = Parser::new(file, src)?;
    p.package()
}

/// Parse a stand-alone `Group`/`Union` type literal, e.g. `Union A { a: Bit(10), }`.
pub fn parse_logical_type_fragment(file: &str, src: &str) -> PResult<AstNode> {
    let mut p = Parser::new(file, src)?;
    let node = p.compound_type()?;
    p.expect_eof()?;
    Ok(node)
}

/// Parse a single expression, wrapped in an `Exp` node.
pub fn parse_expression(file: &str, src: &str) -> PResult<AstNode> {
    let mut p = Parser::new(file, src)?;
    let node = p.exp()?;
    p.expect_eof()?;
    Ok(node)
}

impl<'a> Parser<'a> {
    fn new(file: &'a str, src: &str) -> PResult<Self> {
        Ok(Parser { file, toks: lex(file, src)?, pos: 0, no_gt: false })
    }

    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn peek_at(&self, k: usize) -> &Token {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)]
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn prev_end(&self) -> usize {
        if self.pos == 0 {
            0
        } else {
            self.toks[self.pos - 1].span.end
        }
    }

    fn error(&self, expected: &str) -> Diagnostic {
        let t = self.peek();
        let found = if t.kind == TokKind::Eof { "end of file".to_string() } else { format!("`{}`", t.text) };
        Diagnostic::syntax(self.file, t.span, format!("expected {expected}, found {found}"))
    }

    fn eat_punct(&mut self, p: &str) -> Option<Token> {
        if self.peek().is_punct(p) {
            Some(self.bump())
        } else {
            None
        }
    }

    fn expect_punct(&mut self, p: &str) -> PResult<Token> {
        self.eat_punct(p).ok_or_else(|| self.error(&format!("`{p}`")))
    }

    fn eat_word(&mut self, w: &str) -> Option<Token> {
        if self.peek().is_word(w) {
            Some(self.bump())
        } else {
            None
        }
    }

    fn expect_word(&mut self, w: &str) -> PResult<Token> {
        self.eat_word(w).ok_or_else(|| self.error(&format!("`{w}`")))
    }

    fn expect_eof(&self) -> PResult<()> {
        if self.peek().kind == TokKind::Eof {
            Ok(())
        } else {
            Err(self.error("end of input"))
        }
    }

    fn ident(&mut self) -> PResult<AstNode> {
        let t = self.peek();
        if matches!(t.kind, TokKind::Ident { interpolated: false }) {
            let t = self.bump();
            Ok(AstNode::leaf(K::ID, t.span, t.text))
        } else if t.is_ident() {
            Err(Diagnostic::syntax(self.file, t.span, format!("interpolated identifier `{}` is only allowed as an instance name", t.text)))
        } else {
            Err(self.error("identifier"))
        }
    }

    fn ident_or_interpolated(&mut self) -> PResult<AstNode> {
        let t = self.peek().clone();
        match t.kind {
            TokKind::Ident { interpolated: true } => {
                self.bump();
                Ok(AstNode::leaf(K::InterpolatedID, t.span, t.text))
            }
            _ => self.ident(),
        }
    }

    fn node(&self, kind: K, start: usize, children: Vec<AstNode>) -> AstNode {
        AstNode::new(kind, Span::new(start, self.prev_end()), children)
    }

    fn package(&mut self) -> PResult<AstNode> {
        let start = self.peek().span.start;
        self.expect_word("package").map_err(|_| self.error("`package <name>;` as the first statement"))?;
        let mut children = vec![self.ident()?];
        self.expect_punct(";")?;
        while self.peek().kind != TokKind::Eof {
            children.push(self.statement()?);
        }
        Ok(self.node(K::Package, start, children))
    }

    fn statement(&mut self) -> PResult<AstNode> {
        let t = self.peek().clone();
        if let TokKind::Doc(_) = t.kind {
            let doc = AstNode::leaf(K::Document, t.span, t.text.trim_matches('#').trim());
            self.bump();
            let next = self.peek();
            return if next.is_word("streamlet") {
                self.streamlet(Some(doc))
            } else if next.is_word("impl") || next.is_word("external") {
                self.implement(Some(doc))
            } else {
                Err(self.error("`streamlet` or `impl` after documentation"))
            };
        }
        if t.is_word("import") {
            self.bump();
            let id = self.ident()?;
            self.expect_punct(";")?;
            return Ok(self.node(K::Import, t.span.start, vec![id]));
        }
        if t.is_word("const") {
            return self.const_decl(";");
        }
        if t.is_word("type") {
            return self.type_decl(";");
        }
        if t.is_word("streamlet") {
            return self.streamlet(None);
        }
        if t.is_word("impl") || t.is_word("external") {
            return self.implement(None);
        }
        Err(self.error("a statement (`import`, `const`, `type`, `streamlet`, `impl`)"))
    }

    /// Consume a separator, or accept a following `}` that closes the enclosing list.
    fn separator(&mut self, sep: &str) -> PResult<()> {
        if self.eat_punct(sep).is_some() {
            return Ok(());
        }
        if sep == "," && self.peek().is_punct("}") {
            return Ok(());
        }
        Err(self.error(&format!("`{sep}`")))
    }

    fn const_decl(&mut self, sep: &str) -> PResult<AstNode> {
        let start = self.expect_word("const")?.span.start;
        let mut children = vec![self.ident()?];
        if self.eat_punct(":").is_some() {
            let t = self.peek().clone();
            if !TYPE_KINDS.iter().any(|k| t.is_word(k)) {
                return Err(self.error("one of `int`, `str`, `float`, `bool`, `clockdomain`"));
            }
            self.bump();
            children.push(AstNode::leaf(K::TypeIndicator, t.span, t.text));
        }
        if self.eat_punct("=").is_some() {
            children.push(self.exp()?);
        }
        self.separator(sep)?;
        Ok(self.node(K::Const, start, children))
    }

    fn type_decl(&mut self, sep: &str) -> PResult<AstNode> {
        let start = self.expect_word("type")?.span.start;
        let t = self.peek();
        let children = if (t.is_word("Group") || t.is_word("Union")) && self.peek_at(1).is_ident() && self.peek_at(2).is_punct("{") {
            vec![self.compound_type()?]
        } else {
            let id = self.ident()?;
            self.expect_punct("=")?;
            vec![id, self.logical_type()?]
        };
        self.separator(sep)?;
        Ok(self.node(K::DeclareType, start, children))
    }

    fn compound_type(&mut self) -> PResult<AstNode> {
        let t = self.bump();
        let kind = match t.text.as_str() {
            "Group" => K::LogicalGroupType,
            "Union" => K::LogicalUnionType,
            _ => {
                self.pos -= 1;
                return Err(self.error("`Group` or `Union`"));
            }
        };
        let mut children = vec![self.ident()?];
        self.expect_punct("{")?;
        while !self.peek().is_punct("}") {
            if self.peek().is_word("const") {
                children.push(self.const_decl(",")?);
                continue;
            }
            let s = self.peek().span.start;
            let id = self.ident()?;
            self.expect_punct(":")?;
            let ty = self.logical_type()?;
            self.separator(",")?;
            children.push(self.node(K::SubItemItem, s, vec![id, ty]));
        }
        self.expect_punct("}")?;
        Ok(self.node(kind, t.span.start, children))
    }

    fn logical_type(&mut self) -> PResult<AstNode> {
        let t = self.peek().clone();
        let start = t.span.start;
        let inner = if t.is_word("Null") {
            self.bump();
            AstNode::leaf(K::LogicalNullType, t.span, "Null")
        } else if t.is_word("Bit") {
            self.bump();
            self.expect_punct("(")?;
            let e = self.exp()?;
            self.expect_punct(")")?;
            self.node(K::LogicalBitType, start, vec![e])
        } else if t.is_word("Stream") {
            self.stream_type()?
        } else if (t.is_word("Group") || t.is_word("Union")) && self.peek_at(1).is_ident() {
            self.compound_type()?
        } else if t.is_word("streamlet") || t.is_word("impl") {
            self.bump();
            let mut children = vec![AstNode::leaf(K::TypeIndicator, t.span, t.text.clone())];
            children.push(self.ident()?);
            if self.peek().is_punct("<") {
                children.push(self.template_args()?);
            }
            self.expect_punct(".")?;
            children.push(self.ident()?);
            self.node(K::LogicalMemberType, start, children)
        } else if t.is_ident() {
            let mut children = vec![self.ident()?];
            if self.eat_punct(".").is_some() {
                children.push(self.ident()?);
            }
            self.node(K::LogicalUserDefinedType, start, children)
        } else {
            return Err(self.error("a logical type"));
        };
        Ok(self.node(K::LogicalType, start, vec![inner]))
    }

    fn stream_type(&mut self) -> PResult<AstNode> {
        let start = self.expect_word("Stream")?.span.start;
        self.expect_punct("(")?;
        let mut children = vec![self.logical_type()?];
        while let Some(comma) = self.eat_punct(",") {
            let name = self.peek().clone();
            let kind = match name.text.as_str() {
                "d" => K::StreamPropertyDimension,
                "u" => K::StreamPropertyUserType,
                "t" => K::StreamPropertyThroughput,
                "s" => K::StreamPropertySynchronicity,
                "c" => K::StreamPropertyComplexity,
                "r" => K::StreamPropertyDirection,
                "x" => K::StreamPropertyKeep,
                _ => return Err(self.error("a stream property (`d`, `u`, `t`, `s`, `c`, `r`, `x`)")),
            };
            self.bump();
            self.expect_punct("=")?;
            let value = if kind == K::StreamPropertyUserType { self.logical_type()? } else { self.exp()? };
            children.push(self.node(kind, comma.span.start, vec![value]));
        }
        self.expect_punct(")")?;
        Ok(self.node(K::LogicalStreamType, start, children))
    }

    pub fn exp(&mut self) -> PResult<AstNode> {
        let start = self.peek().span.start;
        let first = self.binary(0)?;
        let body = if self.peek().is_punct("=") {
            self.bump();
            let step = self.binary(0)?;
            self.expect_punct("=>")?;
            let end = self.binary(0)?;
            self.node(K::RangeExp, start, vec![first, step, end])
        } else {
            first
        };
        Ok(self.node(K::Exp, start, vec![body]))
    }

    fn binary_op(&self, level: usize) -> Option<String> {
        let t = self.peek();
        if t.kind != TokKind::Punct {
            return None;
        }
        if self.no_gt && (t.text == ">" || t.text == ">=" || t.text == ">>") {
            return None;
        }
        BIN_LEVELS[level].contains(&t.text.as_str()).then(|| t.text.clone())
    }

    fn binary(&mut self, level: usize) -> PResult<AstNode> {
        if level == BIN_LEVELS.len() {
            return self.unary();
        }
        let start = self.peek().span.start;
        let mut lhs = self.binary(level + 1)?;
        while self.binary_op(level).is_some() {
            let op = self.bump();
            let op_node = AstNode::leaf(K::BinaryOperator, op.span, op.text.clone());
            // `^` is right-associative.
            let rhs = if op.text == "^" { self.binary(level)? } else { self.binary(level + 1)? };
            lhs = self.node(K::BinaryExp, start, vec![lhs, op_node, rhs]);
            if op.text == "^" {
                break;
            }
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<AstNode> {
        let t = self.peek().clone();
        if t.kind == TokKind::Punct && matches!(t.text.as_str(), "-" | "!" | "~") {
            self.bump();
            let op = AstNode::leaf(K::UnaryOperator, t.span, t.text.clone());
            let operand = self.unary()?;
            let u = self.node(K::UnaryExp, t.span.start, vec![op, operand]);
            return Ok(self.node(K::Term, t.span.start, vec![u]));
        }
        let atom = self.primary()?;
        Ok(self.node(K::Term, t.span.start, vec![atom]))
    }

    fn primary(&mut self) -> PResult<AstNode> {
        let t = self.peek().clone();
        let start = t.span.start;
        match &t.kind {
            TokKind::Int => {
                self.bump();
                let raw = match t.text.get(..2) {
                    Some("0b" | "0B") => K::INT_RAW_BIN,
                    Some("0x" | "0X") => K::INT_RAW_HEX,
                    Some("0o" | "0O") => K::INT_RAW_OCT,
                    _ => K::INT_RAW_NORAML,
                };
                if super::lexer::parse_int_literal(&t.text).is_none() {
                    return Err(Diagnostic::syntax(self.file, t.span, format!("integer literal `{}` does not fit in 64 bits", t.text)));
                }
                let leaf = AstNode::leaf(raw, t.span, t.text.clone());
                return Ok(self.node(K::IntExp, start, vec![leaf]));
            }
            TokKind::Float => {
                self.bump();
                let leaf = AstNode::leaf(K::FLOAT, t.span, t.text.clone());
                return Ok(self.node(K::FloatExp, start, vec![leaf]));
            }
            TokKind::Str(value) => {
                self.bump();
                let leaf = AstNode::leaf(K::STR, t.span, value.clone());
                return Ok(self.node(K::StringExp, start, vec![leaf]));
            }
            _ => {}
        }
        if t.is_punct("(") {
            self.bump();
            let saved = std::mem::replace(&mut self.no_gt, false);
            let e = self.exp();
            self.no_gt = saved;
            let e = e?;
            self.expect_punct(")")?;
            return Ok(self.node(K::ParenthesesExp, start, vec![e]));
        }
        if t.is_punct("{") {
            self.bump();
            let saved = std::mem::replace(&mut self.no_gt, false);
            let mut items = Vec::new();
            while !self.peek().is_punct("}") {
                items.push(self.exp()?);
                if self.eat_punct(",").is_none() {
                    break;
                }
            }
            self.no_gt = saved;
            self.expect_punct("}")?;
            return Ok(self.node(K::ArrayExp, start, items));
        }
        if t.is_word("true") || t.is_word("false") {
            self.bump();
            let leaf = AstNode::leaf(K::BOOL, t.span, t.text.clone());
            return Ok(self.node(K::BoolExp, start, vec![leaf]));
        }
        if t.is_word("type") {
            self.bump();
            let ty = if self.peek().is_ident() && !["Bit", "Stream", "Null"].iter().any(|w| self.peek().is_word(w)) {
                // `type a.m` or `type pkg.a.m`: the last segment is the member.
                let mut ids = vec![self.ident()?];
                while self.eat_punct(".").is_some() {
                    ids.push(self.ident()?);
                }
                if ids.len() < 2 || ids.len() > 3 {
                    return Err(Diagnostic::syntax(self.file, Span::new(start, self.prev_end()), "expected `type <name>.<member>`"));
                }
                let member = ids.pop().unwrap_or_else(|| unreachable!());
                let ty_start = ids[0].span.start;
                let ty_end = ids[ids.len() - 1].span.end;
                let ud = AstNode::new(K::LogicalUserDefinedType, Span::new(ty_start, ty_end), ids);
                let lt = AstNode::new(K::LogicalType, ud.span, vec![ud]);
                return Ok(self.node(K::TypeMemberExp, start, vec![lt, member]));
            } else {
                self.logical_type()?
            };
            self.expect_punct(".")?;
            let member = self.ident()?;
            return Ok(self.node(K::TypeMemberExp, start, vec![ty, member]));
        }
        if t.is_word("streamlet") || t.is_word("impl") {
            self.bump();
            let mut children = vec![self.ident()?];
            if self.peek().is_punct("<") {
                children.push(self.template_args()?);
            }
            self.expect_punct(".")?;
            children.push(self.ident()?);
            let kind = if t.text == "streamlet" { K::StreamletMemberExp } else { K::ImplementMemberExp };
            return Ok(self.node(kind, start, children));
        }
        if t.is_ident() {
            let name = t.text.as_str();
            let next = self.peek_at(1);
            if matches!(name, "round" | "floor" | "ceil") && next.is_punct("(") {
                self.bump();
                let f = AstNode::leaf(K::FunctionName, t.span, name);
                self.expect_punct("(")?;
                let arg = self.exp()?;
                self.expect_punct(")")?;
                return Ok(self.node(K::FunctionExp, start, vec![f, arg]));
            }
            if name.len() > 3 && name.starts_with("log") && name[3..].bytes().all(|b| b.is_ascii_digit()) && next.is_punct("(") {
                self.bump();
                let f = AstNode::leaf(K::FunctionName, t.span, name);
                self.expect_punct("(")?;
                let arg = self.exp()?;
                self.expect_punct(")")?;
                return Ok(self.node(K::LogExp, start, vec![f, arg]));
            }
            if name == "log" && !next.is_punct(".") && !next.is_punct("[") {
                self.bump();
                let f = AstNode::leaf(K::FunctionName, t.span, name);
                let base = if self.eat_punct("<").is_some() {
                    let saved = std::mem::replace(&mut self.no_gt, true);
                    let b = self.binary(0);
                    self.no_gt = saved;
                    let b = b?;
                    self.expect_punct(">")?;
                    b
                } else {
                    let bs = self.peek().span.start;
                    let atom = self.primary()?;
                    self.node(K::Term, bs, vec![atom])
                };
                self.expect_punct("(")?;
                let arg = self.exp()?;
                self.expect_punct(")")?;
                return Ok(self.node(K::LogExp, start, vec![f, base, arg]));
            }
            let id = self.ident()?;
            let mut base = if self.eat_punct(".").is_some() {
                let member = self.ident()?;
                self.node(K::QualifiedIdentifierExp, start, vec![id, member])
            } else {
                self.node(K::IdentifierExp, start, vec![id])
            };
            while self.eat_punct("[").is_some() {
                let saved = std::mem::replace(&mut self.no_gt, false);
                let idx = self.exp();
                self.no_gt = saved;
                let idx = idx?;
                self.expect_punct("]")?;
                base = self.node(K::ArrayIndexExp, start, vec![base, idx]);
            }
            return Ok(base);
        }
        Err(self.error("an expression"))
    }

    fn template_params(&mut self) -> PResult<AstNode> {
        let start = self.expect_punct("<")?.span.start;
        let mut params = Vec::new();
        loop {
            let s = self.peek().span.start;
            let id = self.ident()?;
            self.expect_punct(":")?;
            let t = self.peek().clone();
            let kind = if t.is_word("impl") {
                self.bump();
                self.expect_word("of")?;
                let target = self.ident()?;
                self.node(K::TemplateKindImplOf, t.span.start, vec![target])
            } else if TYPE_KINDS.iter().any(|k| t.is_word(k)) || t.is_word("type") {
                self.bump();
                AstNode::leaf(K::TemplateKind, t.span, t.text.clone())
            } else {
                return Err(self.error("a template parameter kind"));
            };
            params.push(self.node(K::TemplateParam, s, vec![id, kind]));
            if self.eat_punct(",").is_none() {
                break;
            }
        }
        self.expect_punct(">")?;
        Ok(self.node(K::TemplateParams, start, params))
    }

    fn template_args(&mut self) -> PResult<AstNode> {
        let start = self.expect_punct("<")?.span.start;
        let saved = std::mem::replace(&mut self.no_gt, true);
        let r = self.template_arg_list();
        self.no_gt = saved;
        let args = r?;
        self.expect_punct(">")?;
        Ok(self.node(K::TemplateArgs, start, args))
    }

    fn template_arg_list(&mut self) -> PResult<Vec<AstNode>> {
        let mut args = Vec::new();
        if self.peek().is_punct(">") {
            return Ok(args);
        }
        loop {
            let t = self.peek().clone();
            let arg = if t.is_word("type") {
                self.bump();
                let ty = self.logical_type()?;
                self.node(K::TemplateArgType, t.span.start, vec![ty])
            } else if t.is_word("impl") {
                self.bump();
                let id = self.ident()?;
                self.node(K::TemplateArgImpl, t.span.start, vec![id])
            } else {
                let e = self.exp()?;
                self.node(K::TemplateArgExp, t.span.start, vec![e])
            };
            args.push(arg);
            if self.eat_punct(",").is_none() {
                break;
            }
        }
        Ok(args)
    }

    fn streamlet(&mut self, doc: Option<AstNode>) -> PResult<AstNode> {
        let kw = self.expect_word("streamlet")?;
        let start = doc.as_ref().map_or(kw.span.start, |d| d.span.start);
        let mut children: Vec<AstNode> = doc.into_iter().collect();
        children.push(self.ident()?);
        if self.peek().is_punct("<") {
            children.push(self.template_params()?);
        }
        self.expect_punct("{")?;
        while !self.peek().is_punct("}") {
            let t = self.peek().clone();
            let item = if t.is_word("const") {
                self.const_decl(",")?
            } else if t.is_word("type") {
                self.type_decl(",")?
            } else if t.is_word("assert") {
                self.assert_item()?
            } else {
                self.port()?
            };
            children.push(item);
        }
        self.expect_punct("}")?;
        self.eat_punct(";");
        Ok(self.node(K::Streamlet, start, children))
    }

    fn assert_item(&mut self) -> PResult<AstNode> {
        let start = self.expect_word("assert")?.span.start;
        self.expect_punct("(")?;
        let e = self.exp()?;
        self.expect_punct(")")?;
        let node = self.node(K::Assert, start, vec![e]);
        self.separator(",")?;
        Ok(node)
    }

    fn port(&mut self) -> PResult<AstNode> {
        let start = self.peek().span.start;
        let mut children = vec![self.ident().map_err(|_| self.error("a port, `const`, `type` or `assert`"))?];
        self.expect_punct(":")?;
        children.push(self.logical_type()?);
        if let Some(open) = self.eat_punct("[") {
            let e = self.exp()?;
            self.expect_punct("]")?;
            children.push(self.node(K::ArraySize, open.span.start, vec![e]));
        }
        let dir = self.peek().clone();
        if !(dir.is_word("in") || dir.is_word("out")) {
            return Err(self.error("port direction `in` or `out`"));
        }
        self.bump();
        children.push(AstNode::leaf(K::PortDirection, dir.span, dir.text.clone()));
        if let Some(tick) = self.eat_punct("`") {
            let t = self.peek().clone();
            let inner = match &t.kind {
                TokKind::Str(v) => {
                    self.bump();
                    AstNode::leaf(K::STR, t.span, v.clone())
                }
                _ => self.ident()?,
            };
            children.push(self.node(K::ClockDomain, tick.span.start, vec![inner]));
        }
        self.separator(",")?;
        Ok(self.node(K::Port, start, children))
    }

    fn implement(&mut self, doc: Option<AstNode>) -> PResult<AstNode> {
        let first = self.peek().span.start;
        let start = doc.as_ref().map_or(first, |d| d.span.start);
        let mut children: Vec<AstNode> = doc.into_iter().collect();
        if let Some(ext) = self.eat_word("external") {
            children.push(AstNode::leaf(K::External, ext.span, "external"));
        }
        self.expect_word("impl")?;
        children.push(self.ident()?);
        if self.peek().is_punct("(") {
            if children.iter().any(|c| c.kind == K::External) {
                return Err(self.error("`of` (an implementation declared from a template cannot be external)"));
            }
            self.bump();
            children.push(self.implement_exp()?);
            self.expect_punct(")")?;
            self.expect_punct(";")?;
            return Ok(self.node(K::ImplementFromTemplate, start, children));
        }
        if self.peek().is_punct("<") {
            children.push(self.template_params()?);
        }
        self.expect_word("of")?;
        let s = self.peek().span.start;
        let mut sc = vec![self.ident()?];
        if self.eat_punct(".").is_some() {
            sc.push(self.ident()?);
        }
        if self.peek().is_punct("<") {
            sc.push(self.template_args()?);
        }
        children.push(self.node(K::StreamletExp, s, sc));
        self.expect_punct("{")?;
        self.impl_items(&mut children)?;
        self.expect_punct("}")?;
        self.eat_punct(";");
        Ok(self.node(K::Implement, start, children))
    }

    fn implement_exp(&mut self) -> PResult<AstNode> {
        let s = self.peek().span.start;
        let mut c = vec![self.ident()?];
        if self.eat_punct(".").is_some() {
            c.push(self.ident()?);
        }
        if self.peek().is_punct("<") {
            c.push(self.template_args()?);
        }
        Ok(self.node(K::ImplementExp, s, c))
    }

    fn impl_items(&mut self, out: &mut Vec<AstNode>) -> PResult<()> {
        while !self.peek().is_punct("}") {
            let t = self.peek().clone();
            let item = if t.is_word("const") {
                self.const_decl(",")?
            } else if t.is_word("type") {
                self.type_decl(",")?
            } else if t.is_word("assert") {
                self.assert_item()?
            } else if t.is_word("instance") {
                self.instance()?
            } else if t.is_word("if") {
                self.if_block()?
            } else if t.is_word("for") {
                self.for_block()?
            } else if t.is_word("process") && self.peek_at(1).is_punct("{") {
                self.process()?
            } else {
                self.connection()?
            };
            out.push(item);
        }
        Ok(())
    }

    fn instance(&mut self) -> PResult<AstNode> {
        let start = self.expect_word("instance")?.span.start;
        let name = self.ident_or_interpolated()?;
        self.expect_punct("(")?;
        let target = self.implement_exp()?;
        self.expect_punct(")")?;
        let mut children = vec![name, target];
        if let Some(open) = self.eat_punct("[") {
            let e = self.exp()?;
            self.expect_punct("]")?;
            children.push(self.node(K::ArraySize, open.span.start, vec![e]));
        }
        let node = self.node(K::Instance, start, children);
        self.separator(",")?;
        Ok(node)
    }

    fn block_items(&mut self, children: &mut Vec<AstNode>) -> PResult<()> {
        self.expect_punct("{")?;
        self.impl_items(children)?;
        self.expect_punct("}")?;
        Ok(())
    }

    fn if_block(&mut self) -> PResult<AstNode> {
        let start = self.peek().span.start;
        let mut branches = Vec::new();
        let mut kw = self.expect_word("if")?;
        let mut kind = K::IfBranch;
        loop {
            self.expect_punct("(")?;
            let mut c = vec![self.exp()?];
            self.expect_punct(")")?;
            self.block_items(&mut c)?;
            branches.push(self.node(kind, kw.span.start, c));
            match self.eat_word("elif") {
                Some(t) => {
                    kw = t;
                    kind = K::ElifBranch;
                }
                None => break,
            }
        }
        if let Some(e) = self.eat_word("else") {
            let mut c = Vec::new();
            self.block_items(&mut c)?;
            branches.push(self.node(K::ElseBranch, e.span.start, c));
        }
        let node = self.node(K::IfBlock, start, branches);
        self.eat_punct(",");
        Ok(node)
    }

    fn for_block(&mut self) -> PResult<AstNode> {
        let start = self.expect_word("for")?.span.start;
        let mut c = vec![self.ident()?];
        self.expect_word("in")?;
        c.push(self.exp()?);
        self.block_items(&mut c)?;
        let node = self.node(K::ForBlock, start, c);
        self.eat_punct(",");
        Ok(node)
    }

    fn process(&mut self) -> PResult<AstNode> {
        let start = self.expect_word("process")?.span.start;
        let mut depth = 0usize;
        loop {
            let t = self.bump();
            if t.kind == TokKind::Eof {
                return Err(Diagnostic::syntax(self.file, Span::new(start, t.span.end), "unterminated `process` block"));
            }
            if t.is_punct("{") {
                depth += 1;
            } else if t.is_punct("}") {
                depth -= 1;
                if depth == 0 {
                    break;
                }
            }
        }
        let node = AstNode::leaf(K::Process, Span::new(start, self.prev_end()), "process");
        self.separator(",")?;
        Ok(node)
    }

    fn port_end(&mut self) -> PResult<AstNode> {
        let start = self.peek().span.start;
        let first = self.indexed_ref(K::PortRef)?;
        let children = if self.eat_punct(".").is_some() {
            let mut owner = first;
            owner.kind = K::OwnerRef;
            vec![owner, self.indexed_ref(K::PortRef)?]
        } else {
            vec![first]
        };
        Ok(self.node(K::PortEnd, start, children))
    }

    fn indexed_ref(&mut self, kind: K) -> PResult<AstNode> {
        let start = self.peek().span.start;
        if !self.peek().is_ident() {
            return Err(self.error("a connection, instance or declaration"));
        }
        let mut c = vec![self.ident_or_interpolated()?];
        if self.eat_punct("[").is_some() {
            c.push(self.exp()?);
            self.expect_punct("]")?;
        }
        Ok(self.node(kind, start, c))
    }

    fn connection(&mut self) -> PResult<AstNode> {
        let start = self.peek().span.start;
        let mut children = vec![self.port_end()?];
        if self.eat_punct("=>").is_none() {
            let eq = self.expect_punct("=").map_err(|_| self.error("`=>` or `=<depth>=>`"))?;
            let e = self.binary(0)?;
            let e = self.node(K::Exp, e.span.start, vec![e]);
            self.expect_punct("=>")?;
            children.push(self.node(K::FifoDepth, eq.span.start, vec![e]));
        }
        children.push(self.port_end()?);
        if let TokKind::Str(v) = &self.peek().kind {
            let v = v.clone();
            let t = self.bump();
            let s = AstNode::leaf(K::STR, t.span, v);
            children.push(AstNode::new(K::ConnectionName, t.span, vec![s]));
        }
        if let Some(at) = self.eat_punct("@") {
            let w = self.peek().clone();
            if !w.is_word("NoStrictType") {
                return Err(self.error("`NoStrictType`"));
            }
            self.bump();
            self.expect_punct("@")?;
            children.push(AstNode::leaf(K::NoStrictType, Span::new(at.span.start, self.prev_end()), "NoStrictType"));
        }
        let node = self.node(K::Connection, start, children);
        self.separator(",")?;
        Ok(node)
    }
}
