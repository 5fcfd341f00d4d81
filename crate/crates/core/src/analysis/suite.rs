use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use super::AnalysisError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Intended {
    Ok,
    Bad,
}

impl Intended {
    /// Lower-case form used in the usage database.
    pub fn as_str(self) -> &'static str {
        match self {
            Intended::Ok => "ok",
            Intended::Bad => "bad",
        }
    }

    fn keyword(self) -> &'static str {
        match self {
            Intended::Ok => "OK",
            Intended::Bad => "BAD",
        }
    }
}

impl fmt::Display for Intended {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Intended {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ok" => Ok(Intended::Ok),
            "bad" => Ok(Intended::Bad),
            _ => Err(format!("expected `ok` or `bad`, found `{s}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TestCase {
    pub id: String,
    pub text: String,
    pub intended: Intended,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TestSuite {
    pub cases: Vec<TestCase>,
}

impl TestSuite {
    pub fn len(&self) -> usize {
        self.cases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cases.is_empty()
    }
}

/// Reads `OK <sentence>` / `BAD <sentence>` lines. A line may start with
/// `id:<name>`; otherwise the id is the 1-based line number. Blank lines and
/// lines starting with `#` are skipped.
pub fn parse_suite(text: &str) -> Result<TestSuite, AnalysisError> {
    let mut cases = Vec::new();
    let mut seen = HashSet::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let malformed = |message: String| AnalysisError::Malformed { line: n + 1, message };
        let (id, rest) = match line.strip_prefix("id:") {
            Some(after) => {
                let (id, rest) = after.split_once(char::is_whitespace).unwrap_or((after, ""));
                if id.is_empty() {
                    return Err(malformed("empty id".into()));
                }
                (id.to_string(), rest.trim_start())
            }
            None => ((n + 1).to_string(), line),
        };
        let (flag, sentence) = rest.split_once(char::is_whitespace).unwrap_or((rest, ""));
        let intended = match flag {
            "OK" => Intended::Ok,
            "BAD" => Intended::Bad,
            other => return Err(malformed(format!("expected OK or BAD, found `{other}`"))),
        };
        if !seen.insert(id.clone()) {
            return Err(AnalysisError::DuplicateId(id));
        }
        cases.push(TestCase {
            id,
            text: sentence.trim().to_string(),
            intended,
        });
    }
    Ok(TestSuite { cases })
}

/// Writes every case with an explicit id, so ids survive reordering and
/// removal of lines.
pub fn render_suite(suite: &TestSuite) -> String {
    let mut out = String::new();
    for c in &suite.cases {
        out.push_str(&format!("id:{} {} {}\n", c.id, c.intended.keyword(), c.text));
    }
    out
}
