//! Plain-text and HTML rendering of alert emails.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::composer::AlertEmail;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DigestFormat {
    Text,
    Html,
}

impl DigestFormat {
    pub fn extension(&self) -> &'static str {
        match self {
            DigestFormat::Text => "txt",
            DigestFormat::Html => "html",
        }
    }
}

/// Prefix of the first message line under a paper in text digests.
pub const TEXT_MESSAGE_PREFIX: &str = "  ↳ ";
const TEXT_CONTINUATION: &str = "    ";

pub fn render_digest(email: &AlertEmail, format: DigestFormat) -> String {
    match format {
        DigestFormat::Text => render_text(email),
        DigestFormat::Html => render_html(email),
    }
}

/// Digest file name: `<user>_<feed>_<date>.<ext>`.
pub fn digest_file_name(email: &AlertEmail, format: DigestFormat) -> String {
    format!("{}.{}", email.email_id(), format.extension())
}

fn render_text(email: &AlertEmail) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "New papers in your feed: {}", email.feed_name);
    let _ = writeln!(out, "Date: {}", email.date);
    for (n, rec) in email.recommendations.iter().enumerate() {
        out.push('\n');
        let _ = writeln!(out, "{}. {}", n + 1, rec.title);
        if !rec.authors.is_empty() {
            let _ = writeln!(out, "   {}", rec.authors.join(", "));
        }
        if let Some(msg) = &rec.message {
            for (k, line) in msg.text.lines().enumerate() {
                let prefix = if k == 0 { TEXT_MESSAGE_PREFIX } else { TEXT_CONTINUATION };
                let _ = writeln!(out, "{prefix}{line}");
            }
        }
    }
    out
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&#39;"),
            _ => out.push(c),
        }
    }
    out
}

fn render_html(email: &AlertEmail) -> String {
    let mut out = String::new();
    let feed = escape(&email.feed_name);
    out.push_str("<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\"/>\n");
    let _ = writeln!(out, "<title>New papers in your feed: {feed}</title>");
    out.push_str("<style>.relevance-message { color: #d35400; }</style>\n</head>\n<body>\n");
    let _ = writeln!(out, "<h1>New papers in your feed: {feed}</h1>");
    let _ = writeln!(out, "<p class=\"date\">{}</p>", escape(&email.date));
    if !email.recommendations.is_empty() {
        out.push_str("<ol class=\"recommendations\">\n");
        for rec in &email.recommendations {
            let _ = writeln!(out, "<li data-paper-id=\"{}\">", escape(rec.paper_id.as_str()));
            let _ = writeln!(out, "<p class=\"title\">{}</p>", escape(&rec.title));
            if !rec.authors.is_empty() {
                let _ = writeln!(out, "<p class=\"authors\">{}</p>", escape(&rec.authors.join(", ")));
            }
            if let Some(msg) = &rec.message {
                let lines: Vec<String> = msg.text.lines().map(escape).collect();
                let _ = writeln!(
                    out,
                    "<span class=\"relevance-message\">{}</span>",
                    lines.join("<br/>")
                );
            }
            out.push_str("</li>\n");
        }
        out.push_str("</ol>\n");
    }
    out.push_str("</body>\n</html>\n");
    out
}
