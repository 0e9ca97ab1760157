//! Feature-distribution CSV export (boxplot-ready).

use fakestereo_core::features::ComponentStats;
use std::fs;
use std::io;
use std::path::Path;

pub const STATS_HEADER: &str = "component,channel,label,min,q1,median,q3,max,mean";

pub fn render_stats_csv(rows: &[ComponentStats]) -> String {
    let mut out = String::from(STATS_HEADER);
    out.push('\n');
    for r in rows {
        let label = r.label.map(|l| l.to_string()).unwrap_or_else(|| "unlabeled".into());
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.component, r.channel, label, r.min, r.q1, r.median, r.q3, r.max, r.mean
        ));
    }
    out
}

pub fn write_stats_csv(rows: &[ComponentStats], path: &Path) -> io::Result<()> {
    fs::write(path, render_stats_csv(rows))
}
