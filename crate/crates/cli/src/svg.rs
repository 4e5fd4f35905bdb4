//! One static picture per epoch boundary.

use std::f64::consts::TAU;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use apf_core::algorithm::embed_targets;
use apf_core::{classify, ConfigClass, Configuration, RoundRecord, TargetPattern, TurnAngle};

const SIZE: f64 = 240.0;
const RADIUS: f64 = 100.0;

fn xy(a: &TurnAngle, r: f64) -> (f64, f64) {
    let th = a.to_f64() * TAU;
    (SIZE / 2.0 + r * th.cos(), SIZE / 2.0 - r * th.sin())
}

pub fn render(c: &Configuration, pattern: &TargetPattern, caption: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(s, r#"<circle cx="{0}" cy="{0}" r="{RADIUS}" fill="none" stroke="gray"/>"#, SIZE / 2.0);
    let leader = match classify(c) {
        Ok(ConfigClass::Leader { leader, pivotal }) => {
            if let Ok(emb) = embed_targets(c, leader, pivotal, pattern) {
                for t in &emb.targets {
                    let (x, y) = xy(t, RADIUS);
                    let _ = writeln!(s, r#"<circle cx="{x:.2}" cy="{y:.2}" r="6" fill="none" stroke="steelblue"/>"#);
                }
            }
            Some(leader)
        }
        _ => None,
    };
    for (i, p) in c.positions().iter().enumerate() {
        let (x, y) = xy(p, RADIUS);
        let fill = if Some(i) == leader { "crimson" } else { "black" };
        let _ = writeln!(s, r#"<circle cx="{x:.2}" cy="{y:.2}" r="4" fill="{fill}"><title>{p}</title></circle>"#);
    }
    let _ = writeln!(s, r#"<text x="8" y="{}" font-size="11" font-family="monospace">{caption}</text>"#, SIZE - 8.0);
    s.push_str("</svg>\n");
    s
}

/// `epoch_000.svg` is the start; `epoch_k.svg` the configuration when epoch `k` closes
/// (or when the trace ends).
pub fn write_epochs(dir: &Path, c0: &Configuration, records: &[RoundRecord], pattern: &TargetPattern) -> Result<usize> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut frames = vec![(0usize, c0.clone())];
    for (k, r) in records.iter().enumerate() {
        let closes = records.get(k + 1).is_none_or(|next| next.epoch != r.epoch);
        if closes {
            frames.push((r.epoch, Configuration::new(r.positions_after.clone())?));
        }
    }
    for (epoch, c) in &frames {
        let path = dir.join(format!("epoch_{epoch:03}.svg"));
        fs::write(&path, render(c, pattern, &format!("epoch {epoch}")))
            .with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(frames.len())
}
