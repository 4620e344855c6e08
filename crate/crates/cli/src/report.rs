use std::collections::BTreeMap;
use std::fmt::Write as _;

use cartan_core::{Mat, Rational, Subspace};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub task: String,
    pub inputs: BTreeMap<String, String>,
    pub results: Results,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Results {
    pub dims: BTreeMap<String, usize>,
    /// Named bases; each vector is a list of `"p/q"` strings.
    pub bases: BTreeMap<String, Vec<Vec<String>>>,
    /// The first note is the headline of the task.
    pub notes: Vec<String>,
    pub caveats: Vec<String>,
}

pub fn rat_strings(v: &[Rational]) -> Vec<String> {
    v.iter().map(|x| x.to_string()).collect()
}

impl Report {
    pub fn new(task: &str) -> Self {
        Report {
            task: task.to_string(),
            ..Default::default()
        }
    }

    pub fn input(&mut self, k: &str, v: &str) -> &mut Self {
        self.inputs.insert(k.into(), v.into());
        self
    }

    pub fn dim(&mut self, k: &str, d: usize) -> &mut Self {
        self.results.dims.insert(k.into(), d);
        self
    }

    pub fn basis(&mut self, k: &str, s: &Subspace) -> &mut Self {
        self.results
            .bases
            .insert(k.into(), s.basis_vectors().iter().map(|v| rat_strings(v)).collect());
        self
    }

    pub fn basis_mats(&mut self, k: &str, ms: &[Mat]) -> &mut Self {
        self.results
            .bases
            .insert(k.into(), ms.iter().map(|m| rat_strings(&m.vectorize())).collect());
        self
    }

    pub fn note(&mut self, n: impl Into<String>) -> &mut Self {
        self.results.notes.push(n.into());
        self
    }

    pub fn caveat(&mut self, c: impl Into<String>) -> &mut Self {
        self.results.caveats.push(c.into());
        self
    }

    /// Plain-text rendering: headline, then dims, bases, notes and caveats.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut notes = self.results.notes.iter();
        let _ = writeln!(out, "== {} ==", self.task);
        if let Some(h) = notes.next() {
            let _ = writeln!(out, "{h}");
        }
        if !self.inputs.is_empty() {
            let ins: Vec<String> = self.inputs.iter().map(|(k, v)| format!("{k}={v}")).collect();
            let _ = writeln!(out, "inputs: {}", ins.join(", "));
        }
        if !self.results.dims.is_empty() {
            let ds: Vec<String> = self.results.dims.iter().map(|(k, v)| format!("{k}={v}")).collect();
            let _ = writeln!(out, "dims: {}", ds.join(", "));
        }
        for (k, vs) in &self.results.bases {
            let _ = writeln!(out, "basis {k}:");
            for v in vs {
                let _ = writeln!(out, "  [{}]", v.join(", "));
            }
        }
        for n in notes {
            let _ = writeln!(out, "note: {n}");
        }
        for c in &self.results.caveats {
            let _ = writeln!(out, "caveat: {c}");
        }
        out
    }
}
