//! Readability-style HTML to plain text.
//!
//! Only text inside paragraph-like blocks (`p`, headings, list items, table
//! cells, and loose text runs inside containers) survives. Blocks whose
//! visible characters are mostly link text are dropped, as are subtrees that
//! never carry article content (`script`, `nav`, `footer`, ...) or whose
//! class/id marks them as page chrome. Each surviving block becomes one line.

use std::sync::OnceLock;

use ego_tree::NodeRef;
use regex::Regex;
use scraper::{ElementRef, Html, Node, Selector};

/// Link-text share above which a block counts as navigation.
const MAX_LINK_DENSITY: f64 = 0.5;

const SKIPPED: &[&str] = &[
    "script", "style", "noscript", "nav", "header", "footer", "aside", "form", "iframe", "svg", "template", "button",
    "select", "textarea", "head", "object", "embed", "canvas", "video", "audio", "img", "input", "meta", "link",
    "title", "picture", "map",
];

const BLOCKS: &[&str] = &[
    "p",
    "h1",
    "h2",
    "h3",
    "h4",
    "h5",
    "h6",
    "li",
    "td",
    "th",
    "pre",
    "blockquote",
    "dd",
    "dt",
    "figcaption",
    "caption",
];

const INLINE: &[&str] = &[
    "a", "span", "b", "strong", "em", "i", "u", "small", "sup", "sub", "code", "font", "label", "abbr", "cite", "mark",
    "time", "q", "s", "del", "ins", "kbd", "var", "bdi", "bdo", "wbr",
];

fn chrome_hint() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(
            r"(?i)(^|[\s_-])(nav|navbar|navigation|menu|footer|sidebar|breadcrumbs?|comments?|share|social|advert|ads|banner|cookie|related|popup|subscribe)($|[\s_-])",
        )
        .unwrap()
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtractedText {
    pub title: String,
    pub body: String,
}

pub fn extract_document(html: &str) -> ExtractedText {
    let doc = Html::parse_document(html);
    let title = first_text(&doc, "title").or_else(|| first_text(&doc, "h1")).unwrap_or_default();
    let root = content_root(&doc);

    let mut walker = Walker::default();
    walker.container(*root);
    walker.flush();

    let lines: Vec<String> =
        walker.blocks.into_iter().filter(|b| b.link_density() <= MAX_LINK_DENSITY).flat_map(|b| b.lines()).collect();
    ExtractedText { title: sanitize(&title), body: lines.join("\n") }
}

fn first_text(doc: &Html, selector: &str) -> Option<String> {
    let sel = Selector::parse(selector).ok()?;
    doc.select(&sel).map(|e| collapse(&e.text().collect::<String>())).find(|t| !t.is_empty())
}

/// The largest `article`, else `main`, else `body`.
fn content_root(doc: &Html) -> ElementRef<'_> {
    for tag in ["article", "main", "body"] {
        let sel = Selector::parse(tag).unwrap();
        let best = doc
            .select(&sel)
            .map(|e| (e.text().map(|t| t.chars().filter(|c| !c.is_whitespace()).count()).sum::<usize>(), e))
            .filter(|(n, _)| *n > 0)
            .max_by_key(|(n, _)| *n);
        if let Some((_, e)) = best {
            return e;
        }
    }
    doc.root_element()
}

#[derive(Debug, Default)]
struct Block {
    text: String,
    link_chars: usize,
    visible_chars: usize,
}

impl Block {
    fn push_text(&mut self, text: &str, in_link: bool, preformatted: bool) {
        for c in text.chars() {
            if c == '\n' && preformatted {
                self.text.push('\n');
                continue;
            }
            if !c.is_whitespace() {
                self.visible_chars += 1;
                if in_link {
                    self.link_chars += 1;
                }
            }
            self.text.push(c);
        }
    }

    fn link_density(&self) -> f64 {
        if self.visible_chars == 0 {
            return 0.0;
        }
        self.link_chars as f64 / self.visible_chars as f64
    }

    fn lines(self) -> Vec<String> {
        self.text.split('\n').map(|l| sanitize(&collapse(l))).filter(|l| !l.is_empty()).collect()
    }
}

#[derive(Default)]
struct Walker {
    blocks: Vec<Block>,
    current: Block,
}

impl Walker {
    fn flush(&mut self) {
        let block = std::mem::take(&mut self.current);
        if block.visible_chars > 0 {
            self.blocks.push(block);
        }
    }

    /// Walk a non-block element; loose inline runs become implicit blocks.
    fn container(&mut self, node: NodeRef<'_, Node>) {
        for child in node.children() {
            match child.value() {
                Node::Text(t) => self.current.push_text(t, false, false),
                Node::Element(e) => {
                    let name = e.name();
                    if is_skipped(e) {
                        continue;
                    }
                    if name == "br" {
                        self.current.text.push('\n');
                    } else if BLOCKS.contains(&name) {
                        self.flush();
                        let mut block = Block::default();
                        collect(child, &mut block, false, name == "pre");
                        self.blocks.push(block);
                    } else if INLINE.contains(&name) {
                        collect(child, &mut self.current, name == "a", false);
                    } else {
                        self.flush();
                        self.container(child);
                        self.flush();
                    }
                }
                _ => {}
            }
        }
    }
}

/// Gather all text under `node` into one block; nested structure becomes line breaks.
fn collect(node: NodeRef<'_, Node>, block: &mut Block, in_link: bool, pre: bool) {
    for child in node.children() {
        match child.value() {
            Node::Text(t) => block.push_text(t, in_link, pre),
            Node::Element(e) => {
                let name = e.name();
                if is_skipped(e) {
                    continue;
                }
                if name == "br" {
                    block.text.push('\n');
                } else if INLINE.contains(&name) {
                    collect(child, block, in_link || name == "a", pre);
                } else {
                    block.text.push('\n');
                    collect(child, block, in_link, pre || name == "pre");
                    block.text.push('\n');
                }
            }
            _ => {}
        }
    }
}

fn is_skipped(e: &scraper::node::Element) -> bool {
    if SKIPPED.contains(&e.name()) {
        return true;
    }
    let hint = chrome_hint();
    e.attr("class").is_some_and(|c| hint.is_match(c)) || e.attr("id").is_some_and(|i| hint.is_match(i))
}

fn collapse(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Text such as `&lt;div` decodes to something that looks like a tag; swap
/// the bracket for its full-width form so output never contains markup.
fn sanitize(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut chars = s.chars().peekable();
    while let Some(c) = chars.next() {
        if c == '<' && chars.peek().is_some_and(|n| n.is_ascii_alphabetic() || matches!(n, '/' | '!' | '?')) {
            out.push('\u{FF1C}');
        } else {
            out.push(c);
        }
    }
    out
}
