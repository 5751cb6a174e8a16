//! Local-corpus hit counting: free-text terms, title words and outbound
//! link domains, aggregated per year into [`CountRecord`]s.
//!
//! Counting is at document level. A term counts once per document no matter
//! how often it occurs, the way a search engine reports hits.
//!
//! Text matching is case-insensitive and whole-word: the characters on
//! either side of a match must be non-alphanumeric or a string edge. There is
//! no stemming, so `universities` does not match `university`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};
use url::Url;

use crate::contingency::{AxisLabels, CountRecord};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Document {
    pub id: String,
    pub year: Option<i32>,
    pub body: String,
    /// Title supplied out of band (sidecar metadata).
    pub title: Option<String>,
    /// Explicit outbound link targets. When absent they are extracted from
    /// the body.
    pub links: Option<Vec<String>>,
}

impl Document {
    pub fn new(id: impl Into<String>, year: i32, body: impl Into<String>) -> Self {
        Document {
            id: id.into(),
            year: Some(year),
            body: body.into(),
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanMode {
    FreeText,
    TitleWords,
    LinkDomains,
}

impl ScanMode {
    pub fn default_patterns(self) -> [&'static str; 3] {
        match self {
            ScanMode::FreeText | ScanMode::TitleWords => ["university", "industry", "government"],
            ScanMode::LinkDomains => [".edu", ".com", ".gov"],
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ScanMode::FreeText => "free_text",
            ScanMode::TitleWords => "title_words",
            ScanMode::LinkDomains => "link_domains",
        }
    }
}

impl fmt::Display for ScanMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ScanMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "free_text" | "text" => Ok(ScanMode::FreeText),
            "title_words" | "title" => Ok(ScanMode::TitleWords),
            "link_domains" | "links" => Ok(ScanMode::LinkDomains),
            other => Err(format!(
                "unknown scan mode '{other}' (expected free-text, title-words or link-domains)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanSpec {
    pub mode: ScanMode,
    pub patterns: [String; 3],
}

impl ScanSpec {
    pub fn new(mode: ScanMode, patterns: [String; 3]) -> Result<Self> {
        if let Some(n) = patterns.iter().position(|p| p.trim().is_empty()) {
            return Err(Error::InvalidScanSpec(format!(
                "pattern {} is empty",
                n + 1
            )));
        }
        if mode == ScanMode::LinkDomains {
            if let Some(p) = patterns.iter().find(|p| normalize_suffix(p).is_empty()) {
                return Err(Error::InvalidScanSpec(format!(
                    "domain suffix '{p}' has no labels"
                )));
            }
        }
        Ok(ScanSpec { mode, patterns })
    }

    pub fn with_defaults(mode: ScanMode) -> Self {
        ScanSpec {
            mode,
            patterns: mode.default_patterns().map(String::from),
        }
    }
}

fn href_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(r#"(?i)\bhref\s*=\s*(?:"([^"]*)"|'([^']*)'|([^\s"'>]+))"#).unwrap()
    })
}

fn bare_url_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r#"(?i)\b[a-z][a-z0-9+.\-]*://[^\s<>"']+"#).unwrap())
}

fn markup_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"<[A-Za-z!/]").unwrap())
}

fn title_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"(?is)<title\b[^>]*>(.*?)</title\s*>").unwrap())
}

fn tag_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"<[^>]*>").unwrap())
}

fn decode_entities(s: &str) -> String {
    s.replace("&lt;", "<")
        .replace("&gt;", ">")
        .replace("&quot;", "\"")
        .replace("&#39;", "'")
        .replace("&nbsp;", " ")
        .replace("&amp;", "&")
}

pub fn is_markup(body: &str) -> bool {
    markup_re().is_match(body)
}

/// First `<title>` element of a markup body (tags stripped, whitespace
/// collapsed), falling back to the sidecar title.
pub fn extract_title(doc: &Document) -> Option<String> {
    let from_markup = title_re().captures(&doc.body).and_then(|c| {
        let inner = tag_re().replace_all(c.get(1)?.as_str(), " ");
        let text = decode_entities(&inner)
            .split_whitespace()
            .collect::<Vec<_>>()
            .join(" ");
        (!text.is_empty()).then_some(text)
    });
    from_markup.or_else(|| {
        doc.title
            .as_deref()
            .map(|t| t.split_whitespace().collect::<Vec<_>>().join(" "))
            .filter(|t| !t.is_empty())
    })
}

/// Outbound link targets: explicit links if given, else `href` attributes
/// for markup bodies and bare absolute URLs for plain text.
pub fn link_targets(doc: &Document) -> Vec<String> {
    if let Some(links) = &doc.links {
        return links.clone();
    }
    if is_markup(&doc.body) {
        href_re()
            .captures_iter(&doc.body)
            .filter_map(|c| c.get(1).or_else(|| c.get(2)).or_else(|| c.get(3)))
            .map(|m| decode_entities(m.as_str()))
            .collect()
    } else {
        bare_url_re()
            .find_iter(&doc.body)
            .map(|m| m.as_str().to_string())
            .collect()
    }
}

fn normalize_suffix(pattern: &str) -> String {
    pattern
        .trim()
        .trim_start_matches('.')
        .trim_end_matches('.')
        .to_lowercase()
}

fn host_of(target: &str) -> Option<String> {
    let url = Url::parse(target.trim()).ok()?;
    let host = url.host_str()?.trim_end_matches('.').to_lowercase();
    (!host.is_empty()).then_some(host)
}

/// Whether `host` ends with `suffix` at a label boundary.
pub fn host_matches(host: &str, suffix: &str) -> bool {
    let suffix = normalize_suffix(suffix);
    if suffix.is_empty() {
        return false;
    }
    host == suffix
        || (host.len() > suffix.len()
            && host.ends_with(&suffix)
            && host.as_bytes()[host.len() - suffix.len() - 1] == b'.')
}

/// The subset of `patterns` matched by at least one outbound link host.
/// Unparseable or relative targets are skipped.
pub fn extract_link_domains(doc: &Document, patterns: &[String; 3]) -> BTreeSet<String> {
    let hosts: Vec<String> = link_targets(doc)
        .iter()
        .filter_map(|t| host_of(t))
        .collect();
    patterns
        .iter()
        .filter(|p| hosts.iter().any(|h| host_matches(h, p)))
        .cloned()
        .collect()
}

struct WordMatcher(Regex);

impl WordMatcher {
    fn new(term: &str) -> Self {
        let boundary = r"[^\p{Alphabetic}\p{N}]";
        let re = format!(
            r"(?i)(?:^|{boundary}){}(?:$|{boundary})",
            regex::escape(term.trim())
        );
        WordMatcher(Regex::new(&re).expect("escaped term compiles"))
    }

    fn is_match(&self, text: &str) -> bool {
        self.0.is_match(text)
    }
}

/// Compiled form of a [`ScanSpec`].
pub struct Scanner {
    spec: ScanSpec,
    words: Option<[WordMatcher; 3]>,
}

impl Scanner {
    pub fn new(spec: ScanSpec) -> Self {
        let words = match spec.mode {
            ScanMode::LinkDomains => None,
            _ => Some([0, 1, 2].map(|k| WordMatcher::new(&spec.patterns[k]))),
        };
        Scanner { spec, words }
    }

    /// Presence of each of the three patterns in one document.
    pub fn presence(&self, doc: &Document) -> [bool; 3] {
        match (self.spec.mode, &self.words) {
            (ScanMode::FreeText, Some(w)) => [0, 1, 2].map(|k| w[k].is_match(&doc.body)),
            (ScanMode::TitleWords, Some(w)) => match extract_title(doc) {
                Some(title) => [0, 1, 2].map(|k| w[k].is_match(&title)),
                None => [false; 3],
            },
            _ => {
                let found = extract_link_domains(doc, &self.spec.patterns);
                [0, 1, 2].map(|k| found.contains(&self.spec.patterns[k]))
            }
        }
    }

    /// Same as [`scan_corpus`], reusing the compiled patterns.
    pub fn scan(&self, docs: &[Document]) -> Result<Vec<CountRecord>> {
        let missing: Vec<String> = docs
            .iter()
            .filter(|d| d.year.is_none())
            .map(|d| d.id.clone())
            .collect();
        if !missing.is_empty() {
            return Err(Error::MissingYear(missing));
        }

        let mut by_year: BTreeMap<i32, [u64; 8]> = BTreeMap::new();
        for doc in docs {
            let year = doc.year.expect("checked above");
            tally(by_year.entry(year).or_default(), self.presence(doc));
        }
        let labels = AxisLabels(self.spec.patterns.clone());
        Ok(by_year
            .into_iter()
            .map(|(year, counts)| {
                CountRecord::from_counts(year, counts).with_labels(labels.clone())
            })
            .collect())
    }
}

fn tally(counts: &mut [u64; 8], [u, i, g]: [bool; 3]) {
    let flags = [u, i, g, u && i, u && g, i && g, u && i && g, true];
    for (slot, hit) in counts.iter_mut().zip(flags) {
        *slot += u64::from(hit);
    }
}

/// One record per year present, years ascending.
pub fn scan_corpus(docs: &[Document], spec: &ScanSpec) -> Result<Vec<CountRecord>> {
    Scanner::new(spec.clone()).scan(docs)
}

/// Merge per-year records from several shards of one corpus.
pub fn merge_records(shards: &[Vec<CountRecord>]) -> Vec<CountRecord> {
    let mut by_year: BTreeMap<i32, CountRecord> = BTreeMap::new();
    for rec in shards.iter().flatten() {
        by_year
            .entry(rec.year)
            .and_modify(|acc| *acc = acc.merged(rec))
            .or_insert_with(|| rec.clone());
    }
    by_year.into_values().collect()
}

#[derive(Debug, Default, PartialEq, Eq)]
struct Sidecar {
    year: Option<i32>,
    title: Option<String>,
}

fn parse_sidecar(text: &str) -> Sidecar {
    let mut meta = Sidecar::default();
    for line in text.lines() {
        let Some((key, value)) = line.split_once(':') else {
            continue;
        };
        let value = value.trim();
        match key.trim().to_ascii_lowercase().as_str() {
            "year" => meta.year = value.parse().ok(),
            "title" if !value.is_empty() => meta.title = Some(value.to_string()),
            _ => {}
        }
    }
    meta
}

/// Year from a `YYYY_` file-name prefix.
pub fn year_from_filename(name: &str) -> Option<i32> {
    let bytes = name.as_bytes();
    if bytes.len() > 4 && bytes[..4].iter().all(u8::is_ascii_digit) && bytes[4] == b'_' {
        name[..4].parse().ok()
    } else {
        None
    }
}

/// Loads every file under `dir` (recursively, in path order) except
/// `.meta` sidecars. The year comes from `<file>.meta` if it has one,
/// otherwise from a `YYYY_` file-name prefix.
pub fn load_corpus(dir: &Path) -> Result<Vec<Document>> {
    if !dir.is_dir() {
        return Err(Error::Io {
            path: dir.display().to_string(),
            message: "not a readable directory".into(),
        });
    }
    let mut docs = Vec::new();
    for entry in walkdir::WalkDir::new(dir).sort_by_file_name() {
        let entry = entry.map_err(|e| Error::Io {
            path: dir.display().to_string(),
            message: e.to_string(),
        })?;
        let path = entry.path();
        if !entry.file_type().is_file() || path.extension().is_some_and(|e| e == "meta") {
            continue;
        }
        let body = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut sidecar_path = path.as_os_str().to_owned();
        sidecar_path.push(".meta");
        let sidecar = match std::fs::read_to_string(&sidecar_path) {
            Ok(text) => parse_sidecar(&text),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Sidecar::default(),
            Err(e) => return Err(Error::io(Path::new(&sidecar_path), e)),
        };
        let file_name = entry.file_name().to_string_lossy();
        let id = path
            .strip_prefix(dir)
            .unwrap_or(path)
            .to_string_lossy()
            .replace('\\', "/");
        docs.push(Document {
            year: sidecar.year.or_else(|| year_from_filename(&file_name)),
            id,
            body,
            title: sidecar.title,
            links: None,
        });
    }
    Ok(docs)
}
