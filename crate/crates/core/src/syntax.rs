//! Typed declarations lowered from the generic syntax tree.

use std::sync::Arc;

use crate::diag::{Diagnostic, Span};
use crate::parser::lexer::parse_int_literal;
use crate::parser::{AstNode, NodeKind as K};
use crate::value::{BasicKind, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnOp {
    Neg,
    Not,
    BitNot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Or,
    And,
    BitOr,
    BitAnd,
    Eq,
    Ne,
    Lt,
    Gt,
    Le,
    Ge,
    Shl,
    Shr,
    Add,
    Sub,
    Mul,
    Div,
    Mod,
    Pow,
}

impl BinOp {
    pub fn parse(s: &str) -> Option<BinOp> {
        use BinOp::*;
        Some(match s {
            "||" => Or,
            "&&" => And,
            "|" => BitOr,
            "&" => BitAnd,
            "==" => Eq,
            "!=" => Ne,
            "<" => Lt,
            ">" => Gt,
            "<=" => Le,
            ">=" => Ge,
            "<<" => Shl,
            ">>" => Shr,
            "+" => Add,
            "-" => Sub,
            "*" => Mul,
            "/" => Div,
            "%" => Mod,
            "^" => Pow,
            _ => return None,
        })
    }

    pub fn symbol(self) -> &'static str {
        use BinOp::*;
        match self {
            Or => "||",
            And => "&&",
            BitOr => "|",
            BitAnd => "&",
            Eq => "==",
            Ne => "!=",
            Lt => "<",
            Gt => ">",
            Le => "<=",
            Ge => ">=",
            Shl => "<<",
            Shr => ">>",
            Add => "+",
            Sub => "-",
            Mul => "*",
            Div => "/",
            Mod => "%",
            Pow => "^",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Round,
    Floor,
    Ceil,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExprKind {
    Int(i64),
    Float(f64),
    Str(String),
    Bool(bool),
    Array(Vec<Expr>),
    Range(Box<Expr>, Box<Expr>, Box<Expr>),
    Ident(String),
    Qualified(String, String),
    Unary(UnOp, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
    Log(Box<Expr>, Box<Expr>),
    Index(Box<Expr>, Box<Expr>),
    TypeMember(Box<TypeExpr>, String),
    StreamletMember(ItemRef, String),
    ImplMember(ItemRef, String),
    /// Already-evaluated operand, produced by loop substitution.
    Value(Value),
}

impl Expr {
    pub fn new(kind: ExprKind, span: Span) -> Self {
        Expr { kind, span }
    }
}

/// A (possibly qualified, possibly template-instantiating) streamlet or implementation name.
#[derive(Debug, Clone, PartialEq)]
pub struct ItemRef {
    pub package: Option<String>,
    pub name: String,
    pub args: Option<Vec<TemplateArg>>,
    pub span: Span,
    pub raw: String,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TemplateArg {
    Expr(Expr),
    Type(TypeExpr),
    Impl(String, Span),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TypeExpr {
    pub kind: TypeExprKind,
    pub span: Span,
    pub raw: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MemberOwner {
    Streamlet,
    Impl,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TypeExprKind {
    Null,
    Bit(Expr),
    Stream { elem: Box<TypeExpr>, props: Vec<StreamProp> },
    Named(String),
    Qualified(String, String),
    Compound(Arc<CompoundDecl>),
    Member { owner_kind: MemberOwner, owner: ItemRef, member: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PropKind {
    Dimension,
    User,
    Throughput,
    Synchronicity,
    Complexity,
    Direction,
    Keep,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PropValue {
    Expr(Expr),
    Type(TypeExpr),
}

#[derive(Debug, Clone, PartialEq)]
pub struct StreamProp {
    pub kind: PropKind,
    pub value: PropValue,
    pub raw: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompoundDecl {
    pub is_union: bool,
    pub name: String,
    pub items: Vec<CompoundItem>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CompoundItem {
    Const(ConstDecl),
    Field { name: String, ty: TypeExpr, span: Span },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstDecl {
    pub name: String,
    pub kind: Option<BasicKind>,
    pub value: Option<Expr>,
    pub raw: String,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TypeDecl {
    Alias { name: String, ty: TypeExpr, span: Span },
    Compound(Arc<CompoundDecl>),
}

impl TypeDecl {
    pub fn name(&self) -> &str {
        match self {
            TypeDecl::Alias { name, .. } => name,
            TypeDecl::Compound(c) => &c.name,
        }
    }

    pub fn span(&self) -> Span {
        match self {
            TypeDecl::Alias { span, .. } => *span,
            TypeDecl::Compound(c) => c.span,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ParamKind {
    Basic(BasicKind),
    Type,
    ImplOf(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TemplateParam {
    pub name: String,
    pub kind: ParamKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AssertDecl {
    pub expr: Expr,
    pub raw: String,
    pub span: Span,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Dir {
    In,
    Out,
}

impl Dir {
    pub fn name(self) -> &'static str {
        match self {
            Dir::In => "in",
            Dir::Out => "out",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ClockRef {
    Var(String),
    Literal(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PortDecl {
    pub name: String,
    pub ty: TypeExpr,
    pub array: Option<Expr>,
    pub array_raw: String,
    pub dir: Dir,
    pub clock: Option<ClockRef>,
    pub clock_raw: String,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StreamletItem {
    Const(ConstDecl),
    Type(TypeDecl),
    Assert(AssertDecl),
    Port(PortDecl),
}

#[derive(Debug, Clone, PartialEq)]
pub struct StreamletDecl {
    pub name: String,
    pub doc: Option<String>,
    pub params: Vec<TemplateParam>,
    pub items: Vec<StreamletItem>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InstanceDecl {
    pub name: String,
    pub target: ItemRef,
    pub array: Option<Expr>,
    pub array_raw: String,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EndDecl {
    pub owner: Option<(String, Option<Expr>)>,
    pub port: String,
    pub port_index: Option<Expr>,
    pub owner_raw: String,
    pub port_raw: String,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConnDecl {
    pub src: EndDecl,
    pub dst: EndDecl,
    pub fifo: Option<Expr>,
    pub fifo_raw: String,
    pub name: String,
    pub no_strict: bool,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IfDecl {
    pub branches: Vec<(Expr, String, Vec<ImplItem>, Span)>,
    pub otherwise: Option<(Vec<ImplItem>, Span)>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForDecl {
    pub var: String,
    pub iter: Expr,
    pub iter_raw: String,
    pub body: Vec<ImplItem>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ImplItem {
    Const(ConstDecl),
    Type(TypeDecl),
    Assert(AssertDecl),
    Instance(InstanceDecl),
    Connection(ConnDecl),
    If(IfDecl),
    For(ForDecl),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImplDecl {
    pub name: String,
    pub doc: Option<String>,
    pub external: bool,
    pub params: Vec<TemplateParam>,
    pub of: ItemRef,
    pub items: Vec<ImplItem>,
    pub process: bool,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImplAliasDecl {
    pub name: String,
    pub doc: Option<String>,
    pub target: ItemRef,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PackageDecl {
    pub name: String,
    pub file: String,
    pub imports: Vec<(String, Span)>,
    pub consts: Vec<ConstDecl>,
    pub types: Vec<TypeDecl>,
    pub streamlets: Vec<Arc<StreamletDecl>>,
    pub impls: Vec<Arc<ImplDecl>>,
    pub aliases: Vec<Arc<ImplAliasDecl>>,
}

struct Lower<'a> {
    file: &'a str,
    src: &'a str,
}

type LResult<T> = Result<T, Diagnostic>;

/// Lower a parsed `Package` node into typed declarations.
pub fn lower_package(file: &str, src: &str, ast: &AstNode) -> LResult<PackageDecl> {
    let l = Lower { file, src };
    let mut pkg = PackageDecl {
        name: ast.children[0].text().to_string(),
        file: file.to_string(),
        imports: Vec::new(),
        consts: Vec::new(),
        types: Vec::new(),
        streamlets: Vec::new(),
        impls: Vec::new(),
        aliases: Vec::new(),
    };
    for el in ast.elements() {
        match el.kind {
            K::Import => pkg.imports.push((el.children[0].text().to_string(), el.span)),
            K::Const => pkg.consts.push(l.const_decl(el)?),
            K::DeclareType => pkg.types.push(l.type_decl(el)?),
            K::Streamlet => pkg.streamlets.push(Arc::new(l.streamlet(el)?)),
            K::Implement => pkg.impls.push(Arc::new(l.implement(el)?)),
            K::ImplementFromTemplate => pkg.aliases.push(Arc::new(l.alias(el)?)),
            _ => return Err(l.err(el.span, format!("unexpected `{}` at package level", el.kind))),
        }
    }
    Ok(pkg)
}

/// Lower a stand-alone expression tree (used by tests and tools).
pub fn lower_expression(src: &str, ast: &AstNode) -> LResult<Expr> {
    Lower { file: "<expr>", src }.exp(ast)
}

fn strip_ws(s: &str) -> String {
    s.chars().filter(|c| !c.is_whitespace()).collect()
}

impl<'a> Lower<'a> {
    fn err(&self, span: Span, msg: impl Into<String>) -> Diagnostic {
        Diagnostic::syntax(self.file, span, msg)
    }

    fn text(&self, span: Span) -> String {
        self.src[span.start..span.end].to_string()
    }

    fn doc(&self, n: &AstNode) -> Option<String> {
        n.child(K::Document).map(|d| d.text().to_string())
    }

    fn const_decl(&self, n: &AstNode) -> LResult<ConstDecl> {
        let kind = n.child(K::TypeIndicator).and_then(|t| BasicKind::parse(t.text()));
        let value = match n.child(K::Exp) {
            Some(e) => Some(self.exp(e)?),
            None => None,
        };
        let raw = n.child(K::Exp).map(|e| self.text(e.span)).unwrap_or_default();
        if value.is_none() && kind != Some(BasicKind::ClockDomain) {
            return Err(self.err(n.span, "only clockdomain constants may omit their value"));
        }
        Ok(ConstDecl { name: n.children[0].text().to_string(), kind, value, raw, span: n.span })
    }

    fn type_decl(&self, n: &AstNode) -> LResult<TypeDecl> {
        let first = &n.children[0];
        match first.kind {
            K::LogicalGroupType | K::LogicalUnionType => Ok(TypeDecl::Compound(Arc::new(self.compound(first)?))),
            _ => Ok(TypeDecl::Alias {
                name: first.text().to_string(),
                ty: self.logical_type(&n.children[1])?,
                span: n.span,
            }),
        }
    }

    fn compound(&self, n: &AstNode) -> LResult<CompoundDecl> {
        let mut items = Vec::new();
        for c in &n.children[1..] {
            match c.kind {
                K::Const => items.push(CompoundItem::Const(self.const_decl(c)?)),
                K::SubItemItem => items.push(CompoundItem::Field {
                    name: c.children[0].text().to_string(),
                    ty: self.logical_type(&c.children[1])?,
                    span: c.span,
                }),
                _ => return Err(self.err(c.span, "unexpected item in logical group/union")),
            }
        }
        Ok(CompoundDecl {
            is_union: n.kind == K::LogicalUnionType,
            name: n.children[0].text().to_string(),
            items,
            span: n.span,
        })
    }

    fn logical_type(&self, n: &AstNode) -> LResult<TypeExpr> {
        let inner = if n.kind == K::LogicalType { &n.children[0] } else { n };
        let kind = match inner.kind {
            K::LogicalNullType => TypeExprKind::Null,
            K::LogicalBitType => TypeExprKind::Bit(self.exp(&inner.children[0])?),
            K::LogicalStreamType => {
                let elem = self.logical_type(&inner.children[0])?;
                let mut props = Vec::new();
                for p in &inner.children[1..] {
                    let kind = match p.kind {
                        K::StreamPropertyDimension => PropKind::Dimension,
                        K::StreamPropertyUserType => PropKind::User,
                        K::StreamPropertyThroughput => PropKind::Throughput,
                        K::StreamPropertySynchronicity => PropKind::Synchronicity,
                        K::StreamPropertyComplexity => PropKind::Complexity,
                        K::StreamPropertyDirection => PropKind::Direction,
                        _ => PropKind::Keep,
                    };
                    if props.iter().any(|q: &StreamProp| q.kind == kind) {
                        return Err(self.err(p.span, "stream property given more than once"));
                    }
                    let v = &p.children[0];
                    let value = if kind == PropKind::User {
                        PropValue::Type(self.logical_type(v)?)
                    } else {
                        PropValue::Expr(self.exp(v)?)
                    };
                    props.push(StreamProp { kind, value, raw: self.text(v.span) });
                }
                TypeExprKind::Stream { elem: Box::new(elem), props }
            }
            K::LogicalGroupType | K::LogicalUnionType => TypeExprKind::Compound(Arc::new(self.compound(inner)?)),
            K::LogicalUserDefinedType => match inner.children.as_slice() {
                [a] => TypeExprKind::Named(a.text().to_string()),
                [a, b] => TypeExprKind::Qualified(a.text().to_string(), b.text().to_string()),
                _ => return Err(self.err(inner.span, "malformed type name")),
            },
            K::LogicalMemberType => {
                let owner_kind = if inner.children[0].text() == "impl" { MemberOwner::Impl } else { MemberOwner::Streamlet };
                let rest = &inner.children[1..];
                let member = rest[rest.len() - 1].text().to_string();
                let owner = self.item_ref_parts(&rest[..rest.len() - 1], Span::new(rest[0].span.start, rest[rest.len() - 2].span.end))?;
                TypeExprKind::Member { owner_kind, owner, member }
            }
            _ => return Err(self.err(inner.span, "expected a logical type")),
        };
        Ok(TypeExpr { kind, span: inner.span, raw: self.text(inner.span) })
    }

    /// `ID [ID] [TemplateArgs]` children forming a streamlet/impl reference.
    fn item_ref_parts(&self, parts: &[AstNode], span: Span) -> LResult<ItemRef> {
        let ids: Vec<&AstNode> = parts.iter().filter(|p| p.kind == K::ID).collect();
        let (package, name) = match ids.as_slice() {
            [a] => (None, a.text().to_string()),
            [a, b] => (Some(a.text().to_string()), b.text().to_string()),
            _ => return Err(self.err(span, "malformed component reference")),
        };
        let args = match parts.iter().find(|p| p.kind == K::TemplateArgs) {
            Some(a) => Some(self.template_args(a)?),
            None => None,
        };
        Ok(ItemRef { package, name, args, span, raw: self.text(span) })
    }

    fn item_ref(&self, n: &AstNode) -> LResult<ItemRef> {
        self.item_ref_parts(&n.children, n.span)
    }

    fn template_args(&self, n: &AstNode) -> LResult<Vec<TemplateArg>> {
        n.children
            .iter()
            .map(|a| {
                Ok(match a.kind {
                    K::TemplateArgType => TemplateArg::Type(self.logical_type(&a.children[0])?),
                    K::TemplateArgImpl => TemplateArg::Impl(a.children[0].text().to_string(), a.span),
                    _ => TemplateArg::Expr(self.exp(&a.children[0])?),
                })
            })
            .collect()
    }

    fn template_params(&self, n: Option<&AstNode>) -> LResult<Vec<TemplateParam>> {
        let Some(n) = n else { return Ok(Vec::new()) };
        let mut out: Vec<TemplateParam> = Vec::new();
        for p in &n.children {
            let name = p.children[0].text().to_string();
            if out.iter().any(|q| q.name == name) {
                return Err(self.err(p.span, format!("duplicate template parameter `{name}`")));
            }
            let k = &p.children[1];
            let kind = match k.kind {
                K::TemplateKindImplOf => ParamKind::ImplOf(k.children[0].text().to_string()),
                _ if k.text() == "type" => ParamKind::Type,
                _ => ParamKind::Basic(BasicKind::parse(k.text()).ok_or_else(|| self.err(k.span, "unknown parameter kind"))?),
            };
            out.push(TemplateParam { name, kind, span: p.span });
        }
        Ok(out)
    }

    fn assert_decl(&self, n: &AstNode) -> LResult<AssertDecl> {
        let e = &n.children[0];
        Ok(AssertDecl { expr: self.exp(e)?, raw: self.text(e.span), span: n.span })
    }

    fn streamlet(&self, n: &AstNode) -> LResult<StreamletDecl> {
        let mut items = Vec::new();
        for c in &n.children {
            match c.kind {
                K::Const => items.push(StreamletItem::Const(self.const_decl(c)?)),
                K::DeclareType => items.push(StreamletItem::Type(self.type_decl(c)?)),
                K::Assert => items.push(StreamletItem::Assert(self.assert_decl(c)?)),
                K::Port => items.push(StreamletItem::Port(self.port(c)?)),
                _ => {}
            }
        }
        Ok(StreamletDecl {
            name: n.child(K::ID).map(|i| i.text().to_string()).unwrap_or_default(),
            doc: self.doc(n),
            params: self.template_params(n.child(K::TemplateParams))?,
            items,
            span: n.span,
        })
    }

    fn port(&self, n: &AstNode) -> LResult<PortDecl> {
        let array = n.child(K::ArraySize);
        let clock = n.child(K::ClockDomain);
        Ok(PortDecl {
            name: n.children[0].text().to_string(),
            ty: self.logical_type(&n.children[1])?,
            array: match array {
                Some(a) => Some(self.exp(&a.children[0])?),
                None => None,
            },
            array_raw: array.map(|a| self.text(a.children[0].span)).unwrap_or_default(),
            dir: if n.child(K::PortDirection).map(|d| d.text()) == Some("in") { Dir::In } else { Dir::Out },
            clock: clock.map(|c| {
                let inner = &c.children[0];
                if inner.kind == K::STR {
                    ClockRef::Literal(inner.text().to_string())
                } else {
                    ClockRef::Var(inner.text().to_string())
                }
            }),
            clock_raw: clock.map(|c| self.text(c.children[0].span)).unwrap_or_default(),
            span: n.span,
        })
    }

    fn implement(&self, n: &AstNode) -> LResult<ImplDecl> {
        let external = n.child(K::External).is_some();
        let mut items = Vec::new();
        let mut process = false;
        for c in &n.children {
            if c.kind == K::Process {
                process = true;
            } else if let Some(item) = self.impl_item(c)? {
                items.push(item);
            }
        }
        if external && (!items.is_empty() || process) {
            return Err(self.err(n.span, "an external implementation must have an empty body"));
        }
        let of = n.child(K::StreamletExp).ok_or_else(|| self.err(n.span, "missing `of <streamlet>`"))?;
        Ok(ImplDecl {
            name: n.child(K::ID).map(|i| i.text().to_string()).unwrap_or_default(),
            doc: self.doc(n),
            external,
            params: self.template_params(n.child(K::TemplateParams))?,
            of: self.item_ref(of)?,
            items,
            process,
            span: n.span,
        })
    }

    fn alias(&self, n: &AstNode) -> LResult<ImplAliasDecl> {
        Ok(ImplAliasDecl {
            name: n.child(K::ID).map(|i| i.text().to_string()).unwrap_or_default(),
            doc: self.doc(n),
            target: self.item_ref(n.child(K::ImplementExp).ok_or_else(|| self.err(n.span, "missing implementation"))?)?,
            span: n.span,
        })
    }

    fn impl_items(&self, nodes: &[AstNode]) -> LResult<Vec<ImplItem>> {
        let mut out = Vec::new();
        for c in nodes {
            if c.kind == K::Process {
                return Err(self.err(c.span, "`process` blocks are only allowed directly in an implementation"));
            }
            if let Some(i) = self.impl_item(c)? {
                out.push(i);
            }
        }
        Ok(out)
    }

    fn impl_item(&self, c: &AstNode) -> LResult<Option<ImplItem>> {
        Ok(Some(match c.kind {
            K::Const => ImplItem::Const(self.const_decl(c)?),
            K::DeclareType => ImplItem::Type(self.type_decl(c)?),
            K::Assert => ImplItem::Assert(self.assert_decl(c)?),
            K::Instance => {
                let array = c.child(K::ArraySize);
                ImplItem::Instance(InstanceDecl {
                    name: c.children[0].text().to_string(),
                    target: self.item_ref(&c.children[1])?,
                    array: match array {
                        Some(a) => Some(self.exp(&a.children[0])?),
                        None => None,
                    },
                    array_raw: array.map(|a| self.text(a.children[0].span)).unwrap_or_default(),
                    span: c.span,
                })
            }
            K::Connection => ImplItem::Connection(self.connection(c)?),
            K::IfBlock => {
                let mut branches = Vec::new();
                let mut otherwise = None;
                for b in &c.children {
                    match b.kind {
                        K::ElseBranch => otherwise = Some((self.impl_items(&b.children)?, b.span)),
                        _ => branches.push((
                            self.exp(&b.children[0])?,
                            self.text(b.children[0].span),
                            self.impl_items(&b.children[1..])?,
                            b.span,
                        )),
                    }
                }
                ImplItem::If(IfDecl { branches, otherwise, span: c.span })
            }
            K::ForBlock => ImplItem::For(ForDecl {
                var: c.children[0].text().to_string(),
                iter: self.exp(&c.children[1])?,
                iter_raw: self.text(c.children[1].span),
                body: self.impl_items(&c.children[2..])?,
                span: c.span,
            }),
            _ => return Ok(None),
        }))
    }

    fn end(&self, n: &AstNode) -> LResult<EndDecl> {
        let indexed = |r: &AstNode| -> LResult<(String, Option<Expr>)> {
            let idx = match r.children.get(1) {
                Some(e) => Some(self.exp(e)?),
                None => None,
            };
            Ok((r.children[0].text().to_string(), idx))
        };
        let port_node = n.child(K::PortRef).ok_or_else(|| self.err(n.span, "missing port"))?;
        let (port, port_index) = indexed(port_node)?;
        let owner_node = n.child(K::OwnerRef);
        Ok(EndDecl {
            owner: match owner_node {
                Some(o) => Some(indexed(o)?),
                None => None,
            },
            port,
            port_index,
            owner_raw: owner_node.map(|o| self.text(o.span)).unwrap_or_default(),
            port_raw: self.text(port_node.span),
            span: n.span,
        })
    }

    fn connection(&self, c: &AstNode) -> LResult<ConnDecl> {
        let ends: Vec<&AstNode> = c.children_of(K::PortEnd).collect();
        let fifo = c.child(K::FifoDepth);
        let name = match c.child(K::ConnectionName) {
            Some(n) => n.children[0].text().to_string(),
            None => format!("connection_{}-{}", c.span.start, c.span.end),
        };
        Ok(ConnDecl {
            src: self.end(ends[0])?,
            dst: self.end(ends[1])?,
            fifo: match fifo {
                Some(f) => Some(self.exp(&f.children[0])?),
                None => None,
            },
            fifo_raw: fifo.map(|f| self.text(f.children[0].span)).unwrap_or_else(|| "0".into()),
            name,
            no_strict: c.child(K::NoStrictType).is_some(),
            span: c.span,
        })
    }

    fn exp(&self, n: &AstNode) -> LResult<Expr> {
        let span = n.span;
        let kind = match n.kind {
            K::Exp | K::Term | K::ParenthesesExp => return self.exp(&n.children[0]),
            K::BinaryExp => {
                let op = BinOp::parse(n.children[1].text()).ok_or_else(|| self.err(n.children[1].span, "unknown operator"))?;
                ExprKind::Binary(op, Box::new(self.exp(&n.children[0])?), Box::new(self.exp(&n.children[2])?))
            }
            K::UnaryExp => {
                let op = match n.children[0].text() {
                    "-" => UnOp::Neg,
                    "!" => UnOp::Not,
                    _ => UnOp::BitNot,
                };
                ExprKind::Unary(op, Box::new(self.exp(&n.children[1])?))
            }
            K::RangeExp => ExprKind::Range(
                Box::new(self.exp(&n.children[0])?),
                Box::new(self.exp(&n.children[1])?),
                Box::new(self.exp(&n.children[2])?),
            ),
            K::IntExp => {
                let leaf = &n.children[0];
                ExprKind::Int(parse_int_literal(leaf.text()).ok_or_else(|| self.err(span, "integer literal out of range"))?)
            }
            K::FloatExp => ExprKind::Float(n.children[0].text().parse().map_err(|_| self.err(span, "malformed float literal"))?),
            K::StringExp => ExprKind::Str(n.children[0].text().to_string()),
            K::BoolExp => ExprKind::Bool(n.children[0].text() == "true"),
            K::ArrayExp => ExprKind::Array(n.children.iter().map(|c| self.exp(c)).collect::<LResult<_>>()?),
            K::IdentifierExp => ExprKind::Ident(n.children[0].text().to_string()),
            K::QualifiedIdentifierExp => ExprKind::Qualified(n.children[0].text().to_string(), n.children[1].text().to_string()),
            K::ArrayIndexExp => ExprKind::Index(Box::new(self.exp(&n.children[0])?), Box::new(self.exp(&n.children[1])?)),
            K::FunctionExp => {
                let f = match n.children[0].text() {
                    "round" => Func::Round,
                    "floor" => Func::Floor,
                    _ => Func::Ceil,
                };
                ExprKind::Call(f, Box::new(self.exp(&n.children[1])?))
            }
            K::LogExp => {
                let name = n.children[0].text();
                if n.children.len() == 2 {
                    let base: i64 = name[3..].parse().map_err(|_| self.err(n.children[0].span, "malformed log base"))?;
                    let b = Expr::new(ExprKind::Int(base), n.children[0].span);
                    ExprKind::Log(Box::new(b), Box::new(self.exp(&n.children[1])?))
                } else {
                    ExprKind::Log(Box::new(self.exp(&n.children[1])?), Box::new(self.exp(&n.children[2])?))
                }
            }
            K::TypeMemberExp => ExprKind::TypeMember(Box::new(self.logical_type(&n.children[0])?), n.children[1].text().to_string()),
            K::StreamletMemberExp | K::ImplementMemberExp => {
                let member = n.children[n.children.len() - 1].text().to_string();
                let parts = &n.children[..n.children.len() - 1];
                let owner = self.item_ref_parts(parts, Span::new(parts[0].span.start, parts[parts.len() - 1].span.end))?;
                if n.kind == K::StreamletMemberExp {
                    ExprKind::StreamletMember(owner, member)
                } else {
                    ExprKind::ImplMember(owner, member)
                }
            }
            _ => return Err(self.err(span, format!("unexpected `{}` in expression", n.kind))),
        };
        Ok(Expr::new(kind, span))
    }
}

/// Name of an anonymous stream: its element text without whitespace.
pub fn anonymous_stream_name(elem: &TypeExpr) -> String {
    strip_ws(&elem.raw)
}
