//! Markdown subset with R Markdown style citations.
//!
//! Blocks: paragraphs, ATX headings (levels clamped to 2..=4, `#` becomes
//! `##`), bullet and numbered lists, fenced code, single-paragraph block
//! quotes. Inlines: text, `*em*`/`_em_`, `**strong**`/`__strong__`,
//! `[text](url)`, `` `code` `` and citations written `[@key]`,
//! `[@k1; @k2]` or a bare `@key`. Emphasis, strong and link text are flat.
//!
//! Parsing never fails: anything unrecognised is kept as text, raw HTML
//! tags are dropped.

use serde::{Deserialize, Serialize};

use crate::html;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TextAst {
    pub blocks: Vec<Block>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Block {
    Paragraph(Vec<Inline>),
    Heading { level: u8, content: Vec<Inline> },
    List { ordered: bool, items: Vec<Vec<Inline>> },
    Code { language: Option<String>, code: String },
    Quote(Vec<Inline>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Inline {
    Text(String),
    Emphasis(String),
    Strong(String),
    Link { text: String, url: String },
    Code(String),
    Citation(Citation),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Citation {
    pub key: String,
    pub raw: String,
}

pub const MIN_HEADING: u8 = 2;
pub const MAX_HEADING: u8 = 4;

fn is_key_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '-'
}

// ---- block level ---------------------------------------------------------------

struct Fence {
    marker: char,
    len: usize,
    language: Option<String>,
}

fn strip_indent(line: &str) -> Option<&str> {
    let spaces = line.len() - line.trim_start_matches(' ').len();
    (spaces <= 3).then(|| &line[spaces..])
}

fn fence_open(line: &str) -> Option<Fence> {
    let rest = strip_indent(line)?;
    let marker = rest.chars().next().filter(|c| *c == '`' || *c == '~')?;
    let len = rest.chars().take_while(|c| *c == marker).count();
    if len < 3 {
        return None;
    }
    let info = rest[len..].trim();
    if marker == '`' && info.contains('`') {
        return None;
    }
    Some(Fence {
        marker,
        len,
        language: info.split_whitespace().next().map(str::to_owned),
    })
}

fn fence_closes(line: &str, fence: &Fence) -> bool {
    let t = line.trim();
    t.chars().count() >= fence.len && t.chars().all(|c| c == fence.marker)
}

fn heading(line: &str) -> Option<(u8, &str)> {
    let rest = strip_indent(line)?;
    let hashes = rest.chars().take_while(|c| *c == '#').count();
    if hashes == 0 || hashes > 6 {
        return None;
    }
    let after = &rest[hashes..];
    if !(after.is_empty() || after.starts_with([' ', '\t'])) {
        return None;
    }
    let mut content = after.trim();
    let without = content.trim_end_matches('#');
    if without.len() != content.len() && (without.is_empty() || without.ends_with([' ', '\t'])) {
        content = without.trim_end();
    }
    let level = (hashes as u8).clamp(MIN_HEADING, MAX_HEADING);
    Some((level, content))
}

/// `(ordered, content)` of a list item line.
fn list_item(line: &str) -> Option<(bool, &str)> {
    let rest = strip_indent(line)?;
    let rest_after = |marker_len: usize| {
        let after = &rest[marker_len..];
        (after.is_empty() || after.starts_with([' ', '\t'])).then(|| after.trim())
    };
    if rest.starts_with(['-', '*', '+']) {
        return rest_after(1).map(|c| (false, c));
    }
    let digits = rest.chars().take_while(char::is_ascii_digit).count();
    if (1..=9).contains(&digits) && rest[digits..].starts_with(['.', ')']) {
        return rest_after(digits + 1).map(|c| (true, c));
    }
    None
}

fn quote_line(line: &str) -> Option<&str> {
    let rest = strip_indent(line)?.strip_prefix('>')?;
    Some(rest.strip_prefix(' ').unwrap_or(rest))
}

fn is_blank(line: &str) -> bool {
    line.trim().is_empty()
}

fn starts_block(line: &str) -> bool {
    fence_open(line).is_some() || heading(line).is_some() || list_item(line).is_some() || quote_line(line).is_some()
}

pub fn parse(text: &str) -> TextAst {
    let normalized = text.replace("\r\n", "\n").replace('\r', "\n");
    let lines: Vec<&str> = normalized.split('\n').collect();
    let mut blocks = Vec::new();
    let mut i = 0;
    while i < lines.len() {
        let line = lines[i];
        if is_blank(line) {
            i += 1;
        } else if let Some(fence) = fence_open(line) {
            i += 1;
            let mut code = Vec::new();
            while i < lines.len() && !fence_closes(lines[i], &fence) {
                code.push(lines[i]);
                i += 1;
            }
            i += 1;
            blocks.push(Block::Code {
                language: fence.language,
                code: code.join("\n"),
            });
        } else if let Some((level, content)) = heading(line) {
            i += 1;
            blocks.push(Block::Heading {
                level,
                content: parse_inlines(content),
            });
        } else if quote_line(line).is_some() {
            let mut parts = Vec::new();
            while let Some(part) = lines.get(i).and_then(|l| quote_line(l)) {
                parts.push(part);
                i += 1;
            }
            let content = parse_inlines(&parts.join("\n"));
            if !content.is_empty() {
                blocks.push(Block::Quote(content));
            }
        } else if let Some((ordered, _)) = list_item(line) {
            let mut items: Vec<String> = Vec::new();
            while i < lines.len() && !is_blank(lines[i]) {
                match list_item(lines[i]) {
                    Some((o, content)) if o == ordered => items.push(content.to_owned()),
                    Some(_) => break,
                    None if starts_block(lines[i]) => break,
                    None => {
                        let last = items.last_mut().expect("list starts with an item");
                        last.push('\n');
                        last.push_str(lines[i].trim());
                    }
                }
                i += 1;
            }
            blocks.push(Block::List {
                ordered,
                items: items.iter().map(|s| parse_inlines(s)).collect(),
            });
        } else {
            let mut parts = Vec::new();
            while i < lines.len() && !is_blank(lines[i]) && (parts.is_empty() || !starts_block(lines[i])) {
                parts.push(lines[i].trim());
                i += 1;
            }
            let content = parse_inlines(&parts.join("\n"));
            if !content.is_empty() {
                blocks.push(Block::Paragraph(content));
            }
        }
    }
    TextAst { blocks }
}

// ---- inline level --------------------------------------------------------------

fn collapse(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Index of the next unescaped occurrence of `pat` at or after `from`.
fn find_unescaped(chars: &[char], from: usize, pat: &[char], check: impl Fn(usize) -> bool) -> Option<usize> {
    let mut j = from;
    while j + pat.len() <= chars.len() {
        if chars[j] == '\\' {
            j += 2;
            continue;
        }
        if chars[j..j + pat.len()] == *pat && check(j) {
            return Some(j);
        }
        j += 1;
    }
    None
}

/// `<tag ...>` spanning `start..end` (exclusive of `end`), and whether it is
/// an autolink.
fn angle_span(chars: &[char], start: usize) -> Option<(usize, bool)> {
    let first = *chars.get(start + 1)?;
    if !(first.is_ascii_alphabetic() || first == '/' || first == '!') {
        return None;
    }
    let mut j = start + 1;
    while j < chars.len() {
        match chars[j] {
            '>' => break,
            '<' => return None,
            _ => j += 1,
        }
    }
    if j >= chars.len() {
        return None;
    }
    let inner: String = chars[start + 1..j].iter().collect();
    let autolink = inner.split_once(':').is_some_and(|(scheme, rest)| {
        scheme.len() >= 2 && scheme.chars().all(|c| c.is_ascii_alphanumeric() || "+.-".contains(c)) && !rest.is_empty()
    }) && !inner.chars().any(char::is_whitespace);
    Some((j + 1, autolink))
}

/// Escapes resolved and tags dropped; used for flat inline content.
fn plain(chars: &[char]) -> String {
    let mut out = String::new();
    let mut i = 0;
    while i < chars.len() {
        match chars[i] {
            '\\' if chars.get(i + 1).is_some_and(char::is_ascii_punctuation) => {
                out.push(chars[i + 1]);
                i += 2;
            }
            '<' => match angle_span(chars, i) {
                Some((end, true)) => {
                    out.extend(&chars[i + 1..end - 1]);
                    i = end;
                }
                Some((end, false)) => i = end,
                None => {
                    out.push('<');
                    i += 1;
                }
            },
            c => {
                out.push(c);
                i += 1;
            }
        }
    }
    collapse(&out)
}

fn unescape(chars: &[char]) -> String {
    let mut out = String::new();
    let mut i = 0;
    while i < chars.len() {
        if chars[i] == '\\' && chars.get(i + 1).is_some_and(char::is_ascii_punctuation) {
            out.push(chars[i + 1]);
            i += 2;
        } else {
            out.push(chars[i]);
            i += 1;
        }
    }
    out
}

fn code_span(chars: &[char], start: usize) -> Option<(String, usize)> {
    let run = chars[start..].iter().take_while(|c| **c == '`').count();
    let mut j = start + run;
    while j < chars.len() {
        if chars[j] == '`' {
            let close = chars[j..].iter().take_while(|c| **c == '`').count();
            if close == run {
                let mut content: String = chars[start + run..j]
                    .iter()
                    .map(|c| if *c == '\n' { ' ' } else { *c })
                    .collect();
                if content.is_empty() {
                    return None;
                }
                let all_spaces = content.chars().all(|c| c == ' ');
                if content.len() >= 2 && content.starts_with(' ') && content.ends_with(' ') && !all_spaces {
                    content = content[1..content.len() - 1].to_owned();
                }
                return Some((content, j + close));
            }
            j += close;
        } else {
            j += 1;
        }
    }
    None
}

fn citation_group(chars: &[char], start: usize) -> Option<(Vec<Citation>, usize)> {
    let skip_ws = |mut j: usize| {
        while chars.get(j).is_some_and(|c| c.is_whitespace()) {
            j += 1;
        }
        j
    };
    let key_at = |j: usize| -> Option<(String, usize)> {
        if chars.get(j) != Some(&'@') {
            return None;
        }
        let len = chars[j + 1..].iter().take_while(|c| is_key_char(**c)).count();
        (len > 0).then(|| (chars[j + 1..j + 1 + len].iter().collect(), j + 1 + len))
    };
    let mut citations = Vec::new();
    let mut j = skip_ws(start + 1);
    loop {
        let (key, next) = key_at(j)?;
        citations.push(Citation {
            raw: format!("@{key}"),
            key,
        });
        j = skip_ws(next);
        match chars.get(j) {
            Some(']') => return Some((citations, j + 1)),
            Some(';') => j = skip_ws(j + 1),
            _ => return None,
        }
    }
}

fn link(chars: &[char], start: usize) -> Option<(Inline, usize)> {
    let mut j = start + 1;
    while j < chars.len() {
        match chars[j] {
            '\\' => j += 2,
            '[' => return None,
            ']' => break,
            _ => j += 1,
        }
    }
    if j >= chars.len() || chars.get(j + 1) != Some(&'(') {
        return None;
    }
    let close = find_unescaped(chars, j + 2, &[')'], |_| true)?;
    let url = unescape(&chars[j + 2..close]).trim().to_owned();
    if url.is_empty() || url.chars().any(char::is_whitespace) {
        return None;
    }
    Some((
        Inline::Link {
            text: plain(&chars[start + 1..j]),
            url,
        },
        close + 1,
    ))
}

fn delimited(chars: &[char], start: usize, d: char, double: bool) -> Option<(String, usize)> {
    let width = if double { 2 } else { 1 };
    if d == '_' && start > 0 && chars[start - 1].is_alphanumeric() {
        return None;
    }
    let pat = vec![d; width];
    let close = find_unescaped(chars, start + width, &pat, |j| {
        d != '_' || !chars.get(j + width).is_some_and(|c| c.is_alphanumeric())
    })?;
    let content = plain(&chars[start + width..close]);
    (!content.is_empty()).then_some((content, close + width))
}

pub fn parse_inlines(text: &str) -> Vec<Inline> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut buf = String::new();
    let flush = |buf: &mut String, out: &mut Vec<Inline>| {
        if !buf.is_empty() {
            out.push(Inline::Text(std::mem::take(buf)));
        }
    };
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            '\\' if chars.get(i + 1).is_some_and(char::is_ascii_punctuation) => {
                buf.push(chars[i + 1]);
                i += 2;
            }
            '`' => match code_span(&chars, i) {
                Some((code, end)) => {
                    flush(&mut buf, &mut out);
                    out.push(Inline::Code(code));
                    i = end;
                }
                None => {
                    let run = chars[i..].iter().take_while(|c| **c == '`').count();
                    buf.extend(std::iter::repeat_n('`', run));
                    i += run;
                }
            },
            '*' | '_' => {
                let strong = (chars.get(i + 1) == Some(&c))
                    .then(|| delimited(&chars, i, c, true))
                    .flatten();
                if let Some((content, end)) = strong {
                    flush(&mut buf, &mut out);
                    out.push(Inline::Strong(content));
                    i = end;
                } else if let Some((content, end)) = delimited(&chars, i, c, false) {
                    flush(&mut buf, &mut out);
                    out.push(Inline::Emphasis(content));
                    i = end;
                } else {
                    buf.push(c);
                    i += 1;
                }
            }
            '[' => {
                if let Some((citations, end)) = citation_group(&chars, i) {
                    flush(&mut buf, &mut out);
                    out.extend(citations.into_iter().map(Inline::Citation));
                    i = end;
                } else if let Some((node, end)) = link(&chars, i) {
                    flush(&mut buf, &mut out);
                    out.push(node);
                    i = end;
                } else {
                    buf.push('[');
                    i += 1;
                }
            }
            '@' if i == 0 || !chars[i - 1].is_alphanumeric() => {
                let len = chars[i + 1..].iter().take_while(|c| is_key_char(**c)).count();
                if len > 0 {
                    flush(&mut buf, &mut out);
                    let key: String = chars[i + 1..i + 1 + len].iter().collect();
                    out.push(Inline::Citation(Citation {
                        raw: format!("@{key}"),
                        key,
                    }));
                    i += 1 + len;
                } else {
                    buf.push('@');
                    i += 1;
                }
            }
            '<' => match angle_span(&chars, i) {
                Some((end, true)) => {
                    flush(&mut buf, &mut out);
                    let url: String = chars[i + 1..end - 1].iter().collect();
                    out.push(Inline::Link { text: url.clone(), url });
                    i = end;
                }
                Some((end, false)) => i = end,
                None => {
                    buf.push('<');
                    i += 1;
                }
            },
            c => {
                buf.push(c);
                i += 1;
            }
        }
    }
    flush(&mut buf, &mut out);
    normalize(out)
}

/// Merges adjacent text, collapses whitespace runs and trims the run's edges.
fn normalize(nodes: Vec<Inline>) -> Vec<Inline> {
    let mut merged: Vec<Inline> = Vec::new();
    for node in nodes {
        match (merged.last_mut(), node) {
            (Some(Inline::Text(prev)), Inline::Text(t)) => prev.push_str(&t),
            (_, node) => merged.push(node),
        }
    }
    let last = merged.len().saturating_sub(1);
    let mut out = Vec::new();
    for (i, node) in merged.into_iter().enumerate() {
        let Inline::Text(t) = node else {
            out.push(node);
            continue;
        };
        let mut s = String::with_capacity(t.len());
        for c in t.chars() {
            if c.is_whitespace() {
                if !s.ends_with(' ') {
                    s.push(' ');
                }
            } else {
                s.push(c);
            }
        }
        if i == 0 {
            s = s.trim_start().to_owned();
        }
        if i == last {
            s = s.trim_end().to_owned();
        }
        if !s.is_empty() {
            out.push(Inline::Text(s));
        }
    }
    out
}

// ---- queries -------------------------------------------------------------------

fn inline_citations(nodes: &[Inline]) -> impl Iterator<Item = &str> {
    nodes.iter().filter_map(|n| match n {
        Inline::Citation(c) => Some(c.key.as_str()),
        _ => None,
    })
}

fn block_inlines(block: &Block) -> Vec<&[Inline]> {
    match block {
        Block::Paragraph(c) | Block::Quote(c) | Block::Heading { content: c, .. } => vec![c.as_slice()],
        Block::List { items, .. } => items.iter().map(Vec::as_slice).collect(),
        Block::Code { .. } => Vec::new(),
    }
}

/// Cited keys in first-appearance order without duplicates.
pub fn extract_citations(ast: &TextAst) -> Vec<String> {
    extract_citations_all([ast])
}

/// Citation order over several documents read one after another.
pub fn extract_citations_all<'a>(asts: impl IntoIterator<Item = &'a TextAst>) -> Vec<String> {
    let mut seen = std::collections::HashSet::new();
    let mut keys = Vec::new();
    for ast in asts {
        for block in &ast.blocks {
            for nodes in block_inlines(block) {
                for key in inline_citations(nodes) {
                    if seen.insert(key.to_owned()) {
                        keys.push(key.to_owned());
                    }
                }
            }
        }
    }
    keys
}

/// Visible text, used for word counts.
pub fn plain_text(ast: &TextAst) -> String {
    let mut out = Vec::new();
    for block in &ast.blocks {
        if let Block::Code { code, .. } = block {
            out.push(code.clone());
        }
        for nodes in block_inlines(block) {
            for node in nodes {
                out.push(match node {
                    Inline::Text(t) | Inline::Emphasis(t) | Inline::Strong(t) | Inline::Code(t) => t.clone(),
                    Inline::Link { text, url } => if text.is_empty() { url } else { text }.clone(),
                    Inline::Citation(c) => c.raw.clone(),
                });
            }
        }
    }
    out.join(" ")
}

// ---- Markdown output -----------------------------------------------------------

fn escape_md(text: &str, line_start: bool) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        if "\\`*_[]<>@#~".contains(c) {
            out.push('\\');
        }
        out.push(c);
    }
    if line_start {
        if out.starts_with(['-', '+']) {
            out.insert(0, '\\');
        } else {
            let digits = out.chars().take_while(char::is_ascii_digit).count();
            if digits > 0 && out[digits..].starts_with(['.', ')']) {
                out.insert(digits, '\\');
            }
        }
    }
    out
}

fn emit_inlines_md(nodes: &[Inline]) -> String {
    let mut out = String::new();
    for (i, node) in nodes.iter().enumerate() {
        match node {
            Inline::Text(t) => out.push_str(&escape_md(t, i == 0)),
            Inline::Emphasis(t) => {
                out.push('*');
                out.push_str(&escape_md(t, false));
                out.push('*');
            }
            Inline::Strong(t) => {
                out.push_str("**");
                out.push_str(&escape_md(t, false));
                out.push_str("**");
            }
            Inline::Link { text, url } => {
                out.push('[');
                out.push_str(&escape_md(text, false));
                out.push_str("](");
                for c in url.chars() {
                    if "\\()".contains(c) {
                        out.push('\\');
                    }
                    out.push(c);
                }
                out.push(')');
            }
            Inline::Code(code) => {
                let longest = longest_run(code, '`');
                let fence = "`".repeat(longest + 1);
                let pad = code.starts_with('`')
                    || code.ends_with('`')
                    || (code.starts_with(' ') && code.ends_with(' ') && !code.chars().all(|c| c == ' '));
                out.push_str(&fence);
                if pad {
                    out.push(' ');
                }
                out.push_str(code);
                if pad {
                    out.push(' ');
                }
                out.push_str(&fence);
            }
            Inline::Citation(c) => {
                out.push_str("[@");
                out.push_str(&c.key);
                out.push(']');
            }
        }
    }
    out
}

fn longest_run(s: &str, target: char) -> usize {
    let mut best = 0;
    let mut run = 0;
    for c in s.chars() {
        if c == target {
            run += 1;
            best = best.max(run);
        } else {
            run = 0;
        }
    }
    best
}

/// Canonical Markdown for an AST; parsing it yields the same AST.
pub fn emit_markdown(ast: &TextAst) -> String {
    let mut blocks = Vec::new();
    for block in &ast.blocks {
        blocks.push(match block {
            Block::Paragraph(c) => emit_inlines_md(c),
            Block::Heading { level, content } => {
                let body = emit_inlines_md(content);
                let hashes = "#".repeat(*level as usize);
                if body.is_empty() {
                    hashes
                } else {
                    format!("{hashes} {body}")
                }
            }
            Block::List { ordered, items } => items
                .iter()
                .enumerate()
                .map(|(i, item)| {
                    let marker = if *ordered { format!("{}.", i + 1) } else { "-".into() };
                    let body = emit_inlines_md(item);
                    if body.is_empty() {
                        marker
                    } else {
                        format!("{marker} {body}")
                    }
                })
                .collect::<Vec<_>>()
                .join("\n"),
            Block::Code { language, code } => {
                let fence = "~".repeat((longest_run(code, '~') + 1).max(3));
                match language {
                    Some(lang) => format!("{fence} {lang}\n{code}\n{fence}"),
                    None => format!("{fence}\n{code}\n{fence}"),
                }
            }
            Block::Quote(c) => format!("> {}", emit_inlines_md(c)),
        });
    }
    blocks.join("\n\n")
}

// ---- HTML output ---------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CitationTarget {
    pub number: usize,
    pub title: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HtmlOptions {
    /// Level of the heading that owns this fragment; body headings nest
    /// below it without skipping levels.
    pub parent_level: u8,
}

impl Default for HtmlOptions {
    fn default() -> Self {
        Self { parent_level: 1 }
    }
}

fn emit_inlines_html(nodes: &[Inline], resolve: &dyn Fn(&str) -> Option<CitationTarget>, out: &mut String) {
    for node in nodes {
        match node {
            Inline::Text(t) => out.push_str(&html::escape(t)),
            Inline::Emphasis(t) => {
                out.push_str("<em>");
                out.push_str(&html::escape(t));
                out.push_str("</em>");
            }
            Inline::Strong(t) => {
                out.push_str("<strong>");
                out.push_str(&html::escape(t));
                out.push_str("</strong>");
            }
            Inline::Link { text, url } => {
                let label = if text.is_empty() { url } else { text };
                if html::is_safe_url(url) {
                    out.push_str(&format!(
                        "<a href=\"{}\">{}</a>",
                        html::escape(url),
                        html::escape(label)
                    ));
                } else {
                    out.push_str(&html::escape(label));
                }
            }
            Inline::Code(c) => {
                out.push_str("<code>");
                out.push_str(&html::escape(c));
                out.push_str("</code>");
            }
            Inline::Citation(c) => match resolve(&c.key) {
                Some(target) => out.push_str(&format!(
                    "<a class=\"citation\" href=\"#ref-{}\" title=\"{}\">[{}]</a>",
                    html::escape(&c.key),
                    html::escape(&target.title),
                    target.number
                )),
                None => out.push_str(&format!(
                    "<span class=\"citation unresolved\" data-unresolved=\"true\">[@{}]</span>",
                    html::escape(&c.key)
                )),
            },
        }
    }
}

pub fn emit_html(ast: &TextAst, resolve: &dyn Fn(&str) -> Option<CitationTarget>) -> String {
    emit_html_with(ast, resolve, HtmlOptions::default())
}

pub fn emit_html_with(ast: &TextAst, resolve: &dyn Fn(&str) -> Option<CitationTarget>, options: HtmlOptions) -> String {
    let base = options.parent_level;
    let mut last = base;
    let mut out = String::new();
    for block in &ast.blocks {
        match block {
            Block::Paragraph(c) => {
                out.push_str("<p>");
                emit_inlines_html(c, resolve, &mut out);
                out.push_str("</p>\n");
            }
            Block::Heading { level, content } => {
                let wanted = (level + base - 1).min(6);
                let actual = wanted.min(last + 1).max(base + 1).min(6);
                last = actual;
                out.push_str(&format!("<h{actual}>"));
                emit_inlines_html(content, resolve, &mut out);
                out.push_str(&format!("</h{actual}>\n"));
            }
            Block::List { ordered, items } => {
                let tag = if *ordered { "ol" } else { "ul" };
                out.push_str(&format!("<{tag}>\n"));
                for item in items {
                    out.push_str("<li>");
                    emit_inlines_html(item, resolve, &mut out);
                    out.push_str("</li>\n");
                }
                out.push_str(&format!("</{tag}>\n"));
            }
            Block::Code { language, code } => {
                match language {
                    Some(lang) => out.push_str(&format!("<pre><code class=\"language-{}\">", html::escape(lang))),
                    None => out.push_str("<pre><code>"),
                }
                out.push_str(&html::escape(code));
                out.push_str("</code></pre>\n");
            }
            Block::Quote(c) => {
                out.push_str("<blockquote><p>");
                emit_inlines_html(c, resolve, &mut out);
                out.push_str("</p></blockquote>\n");
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn text(s: &str) -> Inline {
        Inline::Text(s.into())
    }

    fn cite(k: &str) -> Inline {
        Inline::Citation(Citation {
            key: k.into(),
            raw: format!("@{k}"),
        })
    }

    fn para(s: &str) -> Vec<Inline> {
        match parse(s).blocks.as_slice() {
            [Block::Paragraph(c)] => c.clone(),
            other => panic!("expected one paragraph, got {other:?}"),
        }
    }

    #[test]
    fn citation_forms() {
        assert_eq!(
            para("As shown in [@R100]."),
            vec![text("As shown in "), cite("R100"), text(".")]
        );
        assert_eq!(
            para("See [@R100; @R101]"),
            vec![text("See "), cite("R100"), cite("R101")]
        );
        assert_eq!(
            para("@R1 and (@R2)"),
            vec![cite("R1"), text(" and ("), cite("R2"), text(")")]
        );
        assert_eq!(para("mail a@b.org"), vec![text("mail a@b.org")]);
        assert_eq!(para("[@R1;]"), vec![text("["), cite("R1"), text(";]")]);
        assert_eq!(para(r"\@R1"), vec![text("@R1")]);
    }

    #[test]
    fn headings_are_demoted_and_clamped() {
        let ast = parse("# Title\n###### Deep\n### Mid ###\n#hashtag");
        assert_eq!(
            ast.blocks,
            vec![
                Block::Heading {
                    level: 2,
                    content: vec![text("Title")]
                },
                Block::Heading {
                    level: 4,
                    content: vec![text("Deep")]
                },
                Block::Heading {
                    level: 3,
                    content: vec![text("Mid")]
                },
                Block::Paragraph(vec![text("#hashtag")]),
            ]
        );
    }

    #[test]
    fn blocks() {
        let ast = parse(
            "Intro line\ncontinues\n\n- a\n- *b*\n\n1. one\n2) two\n\n> quoted\n> more\n\n```rust\nfn main() {}\n\n```",
        );
        assert_eq!(
            ast.blocks,
            vec![
                Block::Paragraph(vec![text("Intro line continues")]),
                Block::List {
                    ordered: false,
                    items: vec![vec![text("a")], vec![Inline::Emphasis("b".into())]]
                },
                Block::List {
                    ordered: true,
                    items: vec![vec![text("one")], vec![text("two")]]
                },
                Block::Quote(vec![text("quoted more")]),
                Block::Code {
                    language: Some("rust".into()),
                    code: "fn main() {}\n".into()
                },
            ]
        );
    }

    #[test]
    fn inline_markup() {
        assert_eq!(
            para("**bold** _it_ `x` [ORKG](https://orkg.org) snake_case_name"),
            vec![
                Inline::Strong("bold".into()),
                text(" "),
                Inline::Emphasis("it".into()),
                text(" "),
                Inline::Code("x".into()),
                text(" "),
                Inline::Link {
                    text: "ORKG".into(),
                    url: "https://orkg.org".into()
                },
                text(" snake_case_name"),
            ]
        );
        assert_eq!(para("``a`b``"), vec![Inline::Code("a`b".into())]);
        assert_eq!(para("`unclosed"), vec![text("`unclosed")]);
    }

    #[test]
    fn html_is_stripped() {
        assert_eq!(
            para("a <b>bold</b> <script>x</script> move"),
            vec![text("a bold x move")]
        );
        assert!(parse("<br>").blocks.is_empty());
        assert_eq!(
            para("<https://orkg.org>"),
            vec![Inline::Link {
                text: "https://orkg.org".into(),
                url: "https://orkg.org".into()
            }]
        );
        assert_eq!(para("1 < 2"), vec![text("1 < 2")]);
    }

    #[test]
    fn extracts_in_first_appearance_order() {
        let ast = parse("Cites [@R100], @R101 and [@R100; @R102].\n\n- also @R103");
        assert_eq!(extract_citations(&ast), vec!["R100", "R101", "R102", "R103"]);
        assert!(extract_citations(&parse("no citations")).is_empty());
        let second = parse("[@R104] then [@R100]");
        assert_eq!(
            extract_citations_all([&ast, &second]),
            vec!["R100", "R101", "R102", "R103", "R104"]
        );
    }

    #[test]
    fn html_citations() {
        let resolve = |k: &str| {
            (k == "R100").then(|| CitationTarget {
                number: 1,
                title: "A paper".into(),
            })
        };
        let out = emit_html(&parse("See [@R100] and [@badkey]."), &resolve);
        assert_eq!(
            out,
            "<p>See <a class=\"citation\" href=\"#ref-R100\" title=\"A paper\">[1]</a> and \
             <span class=\"citation unresolved\" data-unresolved=\"true\">[@badkey]</span>.</p>\n"
        );
        assert_eq!(emit_html(&TextAst::default(), &resolve), "");
    }

    #[test]
    fn nested_headings_do_not_skip() {
        let ast = parse("#### Deep first\n## Then\n### Child");
        let out = emit_html_with(&ast, &|_| None, HtmlOptions { parent_level: 2 });
        assert_eq!(out, "<h3>Deep first</h3>\n<h3>Then</h3>\n<h4>Child</h4>\n");
    }

    #[test]
    fn unsafe_links_become_text() {
        let out = emit_html(&parse("[x](javascript:alert(1\\))"), &|_| None);
        assert_eq!(out, "<p>x</p>\n");
    }

    #[test]
    fn markdown_round_trip_examples() {
        for src in [
            "# T\n\n1. a\n2. b",
            "2019. A year",
            "- item with `code` and [@R1]",
            "text with \\*stars\\* and <em>tags</em>",
            "``` ``x`` ```",
            "~~~\n~~~~\n~~~~~",
            "> quote with **strong**",
        ] {
            let ast = parse(src);
            assert_eq!(parse(&emit_markdown(&ast)), ast, "source {src:?}");
        }
    }
}
