//! Run artifacts: CSV tables, a plain-text summary, the config echo and a
//! gnuplot script.

use std::fmt::Write as _;
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
    Inconclusive,
}

impl Outcome {
    pub fn from_pass(pass: bool) -> Self {
        if pass {
            Self::Pass
        } else {
            Self::Fail
        }
    }

    pub fn and(self, other: Self) -> Self {
        use Outcome::*;
        match (self, other) {
            (Fail, _) | (_, Fail) => Fail,
            (Inconclusive, _) | (_, Inconclusive) => Inconclusive,
            _ => Pass,
        }
    }

    pub fn exit_code(self) -> u8 {
        match self {
            Self::Pass => 0,
            Self::Fail => 1,
            Self::Inconclusive => 3,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::Pass => "PASS",
            Self::Fail => "FAIL",
            Self::Inconclusive => "INCONCLUSIVE",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Csv {
    pub name: String,
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Csv {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Self { name: name.into(), header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn row(&mut self, cells: Vec<String>) {
        debug_assert_eq!(cells.len(), self.header.len());
        self.rows.push(cells);
    }

    pub fn render(&self) -> String {
        let mut s = self.header.join(",");
        s.push('\n');
        for r in &self.rows {
            s.push_str(&r.join(","));
            s.push('\n');
        }
        s
    }
}

/// Full-precision float cell; `{:e}` round-trips and is platform-stable.
pub fn num(x: f64) -> String {
    format!("{x:e}")
}

#[derive(Debug, Clone)]
pub struct Report {
    pub title: String,
    /// The relations the run checks, written out as formulas.
    pub equations: Vec<String>,
    pub lines: Vec<String>,
    pub tables: Vec<Csv>,
    pub plot: Option<String>,
    pub outcome: Outcome,
}

impl Report {
    pub fn new(title: &str) -> Self {
        Self { title: title.into(), equations: Vec::new(), lines: Vec::new(), tables: Vec::new(), plot: None, outcome: Outcome::Pass }
    }

    pub fn equation(&mut self, e: &str) {
        self.equations.push(e.into());
    }

    pub fn line(&mut self, l: impl Into<String>) {
        self.lines.push(l.into());
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{}", self.title);
        let _ = writeln!(s, "checks:");
        for e in &self.equations {
            let _ = writeln!(s, "  {e}");
        }
        for l in &self.lines {
            let _ = writeln!(s, "{l}");
        }
        let _ = writeln!(s, "result: {}", self.outcome.label());
        s
    }

    pub fn write(&self, dir: &Path, config_echo: &str) -> std::io::Result<()> {
        std::fs::create_dir_all(dir)?;
        for t in &self.tables {
            std::fs::write(dir.join(format!("{}.csv", t.name)), t.render())?;
        }
        std::fs::write(dir.join("summary.txt"), self.summary())?;
        std::fs::write(dir.join("config.txt"), config_echo)?;
        if let Some(p) = &self.plot {
            std::fs::write(dir.join("plot.gp"), p)?;
        }
        Ok(())
    }
}
