//! Check reports: a flat list of named pass/fail items with optional
//! machine-readable certificates, rendered as text or JSON. Rendering is
//! deterministic — items keep their insertion order and JSON keys keep
//! their declaration order (maps inside certificates sort their keys).

use serde::Serialize;

#[derive(Serialize, Debug)]
pub struct CheckReport {
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub items: Vec<CheckItem>,
    pub pass: bool,
}

#[derive(Serialize, Debug)]
pub struct CheckItem {
    pub name: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<serde_json::Value>,
}

impl CheckItem {
    pub fn pass(name: impl Into<String>) -> Self {
        CheckItem {
            name: name.into(),
            pass: true,
            detail: None,
            certificate: None,
        }
    }

    pub fn fail(name: impl Into<String>) -> Self {
        CheckItem {
            name: name.into(),
            pass: false,
            detail: None,
            certificate: None,
        }
    }

    pub fn of(name: impl Into<String>, pass: bool) -> Self {
        if pass {
            CheckItem::pass(name)
        } else {
            CheckItem::fail(name)
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }

    pub fn with_certificate(mut self, certificate: serde_json::Value) -> Self {
        self.certificate = Some(certificate);
        self
    }
}

impl CheckReport {
    pub fn new(command: impl Into<String>, seed: Option<u64>, items: Vec<CheckItem>) -> Self {
        let pass = items.iter().all(|i| i.pass);
        CheckReport {
            command: command.into(),
            seed,
            items,
            pass,
        }
    }

    /// The plain-text rendering: one line per item, then a verdict line.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        match self.seed {
            Some(seed) => out.push_str(&format!("== {} (seed {seed})\n", self.command)),
            None => out.push_str(&format!("== {}\n", self.command)),
        }
        for item in &self.items {
            let mark = if item.pass { "PASS" } else { "FAIL" };
            out.push_str(&format!("{mark} {}", item.name));
            if let Some(detail) = &item.detail {
                out.push_str(&format!(": {detail}"));
            }
            out.push('\n');
            if let Some(cert) = &item.certificate {
                if !item.pass {
                    out.push_str(&format!("  certificate: {cert}\n"));
                }
            }
        }
        let verdict = if self.pass { "PASS" } else { "FAIL" };
        out.push_str(&format!(
            "RESULT: {verdict} ({} item{})\n",
            self.items.len(),
            if self.items.len() == 1 { "" } else { "s" },
        ));
        out
    }

    pub fn render_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    pub fn render(&self, json: bool) -> String {
        if json {
            self.render_json()
        } else {
            self.render_text()
        }
    }
}

/// A table as a JSON certificate value.
pub fn table_json(table: &clonelab_core::OpTable) -> serde_json::Value {
    serde_json::json!({
        "universe": table.universe().size(),
        "arity": table.arity(),
        "entries": table.entries(),
    })
}
