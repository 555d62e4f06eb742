//! CSV writers, the run manifest and the machine-readable error file.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use semiclassical::{Complex, ComplexField, PhaseField};

/// Collects written files and scalar results for the manifest.
#[derive(Debug, Default)]
pub struct OutputDir {
    root: PathBuf,
    files: Vec<String>,
    results: Vec<(String, String)>,
    decisions: Vec<(String, String)>,
    warnings: Vec<String>,
}

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

impl OutputDir {
    pub fn create(root: &Path) -> io::Result<Self> {
        fs::create_dir_all(root)?;
        Ok(OutputDir { root: root.to_path_buf(), ..Default::default() })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn record(&mut self, key: &str, value: impl ToString) {
        self.results.push((key.to_string(), value.to_string()));
    }

    pub fn record_f64(&mut self, key: &str, value: f64) {
        self.record(key, num(value));
    }

    /// Writes a header line, rows and optional `#` footer lines.
    pub fn write_table(&mut self, name: &str, header: &[&str], rows: &[Vec<f64>], footer: &[String]) -> io::Result<()> {
        let mut text = header.join(",");
        text.push('\n');
        for row in rows {
            text.push_str(&row.iter().map(|v| num(*v)).collect::<Vec<_>>().join(","));
            text.push('\n');
        }
        for line in footer {
            text.push_str("# ");
            text.push_str(line);
            text.push('\n');
        }
        self.write_text(name, &text)
    }

    pub fn write_text(&mut self, name: &str, text: &str) -> io::Result<()> {
        fs::write(self.root.join(name), text)?;
        self.files.push(name.to_string());
        Ok(())
    }

    /// `x,re,im` per node.
    pub fn write_line_field(&mut self, name: &str, xs: &[f64], values: &[Complex]) -> io::Result<()> {
        let rows: Vec<Vec<f64>> = xs.iter().zip(values).map(|(x, v)| vec![*x, v.re, v.im]).collect();
        self.write_table(name, &["x", "re", "im"], &rows, &[])
    }

    pub fn write_wavefunction(&mut self, name: &str, phi: &ComplexField) -> io::Result<()> {
        self.write_line_field(name, &phi.grid().x_nodes(), phi.values())
    }

    /// `x,k,re,im` in x-major order.
    pub fn write_phase_field(&mut self, name: &str, f: &PhaseField) -> io::Result<()> {
        let g = f.grid();
        let mut rows = Vec::with_capacity(g.len());
        for i in 0..g.n_x {
            for j in 0..g.n_k {
                let v = f.get(i, j);
                rows.push(vec![g.x(i), g.k(j), v.re, v.im]);
            }
        }
        self.write_table(name, &["x", "k", "re", "im"], &rows, &[])
    }

    pub fn warn(&mut self, message: impl Into<String>) {
        self.warnings.push(message.into());
    }

    pub fn warn_all(&mut self, messages: &[String]) {
        self.warnings.extend(messages.iter().cloned());
    }

    /// Scheme or boundary choice actually used by the run.
    pub fn decision(&mut self, key: &str, value: impl ToString) {
        self.decisions.push((key.to_string(), value.to_string()));
    }

    /// Writes `manifest.txt` and echoes the effective configuration to
    /// `config.toml`. Only the `wall_clock_seconds` line differs between
    /// repeated runs.
    pub fn write_manifest(&mut self, kind: &str, config_text: &str, threads: usize, wall_clock: f64) -> io::Result<()> {
        fs::write(self.root.join("config.toml"), config_text)?;
        let mut text = String::new();
        let mut line = |k: &str, v: &str| {
            text.push_str(k);
            text.push_str(" = ");
            text.push_str(v);
            text.push('\n');
        };
        line("kind", kind);
        line("status", "ok");
        line("version", env!("CARGO_PKG_VERSION"));
        line("threads", &threads.to_string());
        line("wall_clock_seconds", &format!("{wall_clock:.3}"));
        for (k, v) in &self.decisions {
            line(&format!("decision.{k}"), v);
        }
        for (k, v) in &self.results {
            line(&format!("result.{k}"), v);
        }
        for w in &self.warnings {
            line("warning", w);
        }
        for f in &self.files {
            line("file", f);
        }
        line("file", "config.toml");
        for l in config_text.lines().filter(|l| !l.is_empty()) {
            if let Some((k, v)) = l.split_once(" = ") {
                line(&format!("config.{k}"), v);
            }
        }
        fs::write(self.root.join("manifest.txt"), text)
    }
}

/// `error.txt` for a failed run.
pub fn write_error_file(root: &Path, kind: &str, code: u8, category: &str, message: &str) -> io::Result<()> {
    fs::create_dir_all(root)?;
    let mut out = fs::File::create(root.join("error.txt"))?;
    writeln!(out, "kind = {kind}")?;
    writeln!(out, "status = error")?;
    writeln!(out, "exit_code = {code}")?;
    writeln!(out, "category = {category}")?;
    for (n, line) in message.lines().enumerate() {
        writeln!(out, "message.{n} = {line}")?;
    }
    Ok(())
}

/// Flat matrix of kernels plus the sidecar index of data centers.
pub fn write_matrix(out: &mut OutputDir, stem: &str, m: &semiclassical::analysis::RepresentativeMatrix) -> io::Result<()> {
    let xs = m.grid.x_nodes();
    let mut rows = Vec::with_capacity(m.pair_count() * xs.len());
    for (n, e) in m.entries.iter().enumerate() {
        for (x, v) in xs.iter().zip(&e.values) {
            rows.push(vec![n as f64, *x, v.re, v.im]);
        }
    }
    out.write_table(&format!("{stem}.csv"), &["pair", "x", "re", "im"], &rows, &[])?;
    let n_j = m.centers_j.len();
    let index: Vec<Vec<f64>> = (0..m.pair_count())
        .map(|n| vec![n as f64, (n / n_j) as f64, (n % n_j) as f64, m.centers_i[n / n_j], m.centers_j[n % n_j]])
        .collect();
    out.write_table(&format!("{stem}.index.csv"), &["pair", "i", "j", "center_i", "center_j"], &index, &[])
}
