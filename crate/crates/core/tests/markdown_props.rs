use proptest::prelude::*;
use smartreview::markdown::{self, Block};

fn markdownish() -> impl Strategy<Value = String> {
    let pieces = prop::sample::select(vec![
        "a",
        "word",
        " ",
        "  ",
        "\n",
        "\n\n",
        "#",
        "## ",
        "- ",
        "* ",
        "1. ",
        "2) ",
        "> ",
        "```",
        "~~~",
        "`",
        "``",
        "*",
        "**",
        "_",
        "__",
        "[",
        "]",
        "(",
        ")",
        "[@R1]",
        "[@R1; @R2]",
        "@",
        "@R3",
        "@key-1",
        ";",
        "\\",
        "<b>",
        "</b>",
        "<",
        ">",
        "<https://x.org/a>",
        "[t](u)",
        "[x](javascript:y)",
        "e@mail",
        "é",
        "\t",
        "\r\n",
        "9.",
    ]);
    prop::collection::vec(pieces, 0..40).prop_map(|v| v.concat())
}

fn heading_levels_ok(ast: &markdown::TextAst) -> bool {
    ast.blocks.iter().all(|b| match b {
        Block::Heading { level, .. } => (markdown::MIN_HEADING..=markdown::MAX_HEADING).contains(level),
        _ => true,
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn parse_is_total_on_arbitrary_text(s in any::<String>()) {
        let ast = markdown::parse(&s);
        prop_assert!(heading_levels_ok(&ast));
        let again = markdown::parse(&markdown::emit_markdown(&ast));
        prop_assert_eq!(again, ast);
    }

    #[test]
    fn emit_markdown_is_a_fixed_point(s in markdownish()) {
        let ast = markdown::parse(&s);
        prop_assert!(heading_levels_ok(&ast));
        let emitted = markdown::emit_markdown(&ast);
        let again = markdown::parse(&emitted);
        prop_assert_eq!(&again, &ast, "emitted {:?}", emitted);
    }

    #[test]
    fn citation_numbering_is_stable(s in markdownish()) {
        let ast = markdown::parse(&s);
        let first = markdown::extract_citations(&ast);
        prop_assert_eq!(&first, &markdown::extract_citations(&ast));
        prop_assert_eq!(first, markdown::extract_citations(&markdown::parse(&markdown::emit_markdown(&ast))));
    }
}
