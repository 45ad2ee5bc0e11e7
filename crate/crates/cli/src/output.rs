use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde_json::{json, Value};

use crate::args::Cli;

/// Files of one run, all under the output directory.
pub struct Outputs {
    dir: PathBuf,
    written: Vec<String>,
}

/// Columns and labels for a log-log plot of one CSV.
pub struct Plot<'a> {
    pub title: &'a str,
    pub x_col: usize,
    pub y_col: usize,
    pub x_label: &'a str,
    pub y_label: &'a str,
}

impl Outputs {
    pub fn new(dir: &Path) -> Result<Outputs> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Outputs { dir: dir.to_path_buf(), written: Vec::new() })
    }

    fn create(&mut self, name: &str) -> Result<fs::File> {
        let path = self.dir.join(name);
        let file = fs::File::create(&path).with_context(|| format!("writing {}", path.display()))?;
        self.written.push(name.to_string());
        Ok(file)
    }

    /// Header row, then one line per row.
    pub fn csv(&mut self, name: &str, header: &str, rows: impl IntoIterator<Item = String>) -> Result<()> {
        let mut out = std::io::BufWriter::new(self.create(name)?);
        writeln!(out, "{header}")?;
        for row in rows {
            writeln!(out, "{row}")?;
        }
        out.flush()?;
        Ok(())
    }

    /// A gnuplot script rendering `csv` on log-log axes to a PNG of the same stem.
    pub fn plot(&mut self, name: &str, csv: &str, plot: &Plot<'_>) -> Result<()> {
        let stem = Path::new(name).with_extension("png");
        let script = format!(
            "set datafile separator ','\n\
             set terminal pngcairo size 900,600\n\
             set output '{png}'\n\
             set logscale xy\n\
             set grid\n\
             set key top right\n\
             set title '{title}'\n\
             set xlabel '{xl}'\n\
             set ylabel '{yl}'\n\
             plot '{csv}' using (abs(${x})):(abs(${y})) skip 1 with linespoints pt 7 ps 0.6 title '{title}'\n",
            png = stem.display(),
            title = plot.title,
            xl = plot.x_label,
            yl = plot.y_label,
            x = plot.x_col,
            y = plot.y_col,
        );
        self.create(name)?.write_all(script.as_bytes())?;
        Ok(())
    }

    /// `run.json`: the parsed configuration, the command line and the results summary.
    pub fn manifest(&mut self, cli: &Cli, argv: &[String], summary: Value) -> Result<()> {
        let mut files = self.written.clone();
        files.push("run.json".to_string());
        let manifest = json!({
            "command": argv,
            "subcommand": cli.command,
            "seed": cli.global.seed,
            "precision_bits": cli.global.prec,
            "branch": cli.global.branch.as_str(),
            "git_describe": "unknown",
            "outputs": files,
            "summary": summary,
        });
        let mut text = serde_json::to_string_pretty(&manifest)?;
        text.push('\n');
        self.create("run.json")?.write_all(text.as_bytes())?;
        Ok(())
    }
}
