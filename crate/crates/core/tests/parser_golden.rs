use tydi::parser::{dump_ast_list, parse_logical_type_fragment};

#[test]
fn union_snippet_matches_published_listing() {
    let src = include_str!("fixtures/union_a.td");
    let expected = include_str!("fixtures/union_a.ast.txt").trim();
    let node = parse_logical_type_fragment("union_a.td", src).unwrap();
    assert_eq!(dump_ast_list(&[node]), expected);
}
