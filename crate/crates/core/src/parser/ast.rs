use std::fmt;

use crate::diag::Span;

macro_rules! node_kinds {
    ($($k:ident),* $(,)?) => {
        /// Grammar nonterminals; the variant name is the dumped tag.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
        #[allow(non_camel_case_types)]
        pub enum NodeKind { $($k),* }

        impl NodeKind {
            pub fn name(self) -> &'static str {
                match self { $(NodeKind::$k => stringify!($k)),* }
            }
        }
    };
}

node_kinds!(
    Package,
    Import,
    ID,
    InterpolatedID,
    Document,
    External,
    Const,
    TypeIndicator,
    DeclareType,
    LogicalType,
    LogicalNullType,
    LogicalBitType,
    LogicalStreamType,
    LogicalUserDefinedType,
    LogicalGroupType,
    LogicalUnionType,
    LogicalMemberType,
    SubItemItem,
    StreamPropertyDimension,
    StreamPropertyUserType,
    StreamPropertyThroughput,
    StreamPropertySynchronicity,
    StreamPropertyComplexity,
    StreamPropertyDirection,
    StreamPropertyKeep,
    Exp,
    Term,
    BinaryExp,
    BinaryOperator,
    UnaryExp,
    UnaryOperator,
    RangeExp,
    IntExp,
    INT_RAW_NORAML,
    INT_RAW_BIN,
    INT_RAW_HEX,
    INT_RAW_OCT,
    FloatExp,
    FLOAT,
    StringExp,
    STR,
    BoolExp,
    BOOL,
    IdentifierExp,
    QualifiedIdentifierExp,
    ArrayExp,
    ArrayIndexExp,
    ParenthesesExp,
    FunctionExp,
    FunctionName,
    LogExp,
    TypeMemberExp,
    StreamletMemberExp,
    ImplementMemberExp,
    Streamlet,
    TemplateParams,
    TemplateParam,
    TemplateKind,
    TemplateKindImplOf,
    TemplateArgs,
    TemplateArgExp,
    TemplateArgType,
    TemplateArgImpl,
    Port,
    ArraySize,
    PortDirection,
    ClockDomain,
    Assert,
    Implement,
    ImplementFromTemplate,
    StreamletExp,
    ImplementExp,
    Instance,
    Connection,
    PortEnd,
    OwnerRef,
    PortRef,
    FifoDepth,
    ConnectionName,
    NoStrictType,
    IfBlock,
    IfBranch,
    ElifBranch,
    ElseBranch,
    ForBlock,
    Process,
);

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Position-annotated syntax tree node.
#[derive(Debug, Clone, PartialEq)]
pub struct AstNode {
    pub kind: NodeKind,
    pub span: Span,
    pub children: Vec<AstNode>,
    /// Source text for identifier and literal leaves.
    pub leaf_text: Option<String>,
}

impl AstNode {
    pub fn new(kind: NodeKind, span: Span, children: Vec<AstNode>) -> Self {
        AstNode { kind, span, children, leaf_text: None }
    }

    pub fn leaf(kind: NodeKind, span: Span, text: impl Into<String>) -> Self {
        AstNode { kind, span, children: Vec::new(), leaf_text: Some(text.into()) }
    }

    pub fn text(&self) -> &str {
        self.leaf_text.as_deref().unwrap_or("")
    }

    pub fn child(&self, kind: NodeKind) -> Option<&AstNode> {
        self.children.iter().find(|c| c.kind == kind)
    }

    pub fn children_of(&self, kind: NodeKind) -> impl Iterator<Item = &AstNode> {
        self.children.iter().filter(move |c| c.kind == kind)
    }

    /// Top-level statements of a `Package` node, excluding the package name.
    pub fn elements(&self) -> &[AstNode] {
        match self.children.first() {
            Some(first) if self.kind == NodeKind::Package && first.kind == NodeKind::ID => &self.children[1..],
            _ => &self.children,
        }
    }

    pub fn walk(&self, f: &mut dyn FnMut(&AstNode)) {
        f(self);
        for c in &self.children {
            c.walk(f);
        }
    }
}

/// `Kind(start, end, [children])`, or `Kind(start, end)` for childless nodes.
pub fn dump_ast(node: &AstNode) -> String {
    let mut out = String::new();
    write_node(node, &mut out);
    out
}

/// Bracketed list of sibling nodes: `[A(..), B(..)]`.
pub fn dump_ast_list(nodes: &[AstNode]) -> String {
    let mut out = String::from("[");
    for (i, n) in nodes.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        write_node(n, &mut out);
    }
    out.push(']');
    out
}

fn write_node(node: &AstNode, out: &mut String) {
    out.push_str(node.kind.name());
    out.push_str(&format!("({}, {}", node.span.start, node.span.end));
    if !node.children.is_empty() {
        out.push_str(", ");
        out.push_str(&dump_ast_list(&node.children));
    }
    out.push(')');
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn leaf_has_no_bracket_list() {
        assert_eq!(dump_ast(&AstNode::leaf(NodeKind::ID, Span::new(6, 7), "A")), "ID(6, 7)");
    }

    #[test]
    fn nested_dump() {
        let n = AstNode::new(
            NodeKind::Exp,
            Span::new(1, 3),
            vec![AstNode::leaf(NodeKind::INT_RAW_NORAML, Span::new(1, 3), "10")],
        );
        assert_eq!(dump_ast(&n), "Exp(1, 3, [INT_RAW_NORAML(1, 3)])");
        assert_eq!(dump_ast_list(&[n.clone(), n]).matches("Exp").count(), 2);
    }
}
