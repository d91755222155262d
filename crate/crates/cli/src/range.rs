//! Value lists on the command line: `a,b,c`, a single value, or
//! `lo:hi:linN` / `lo:hi:logN` for `N` evenly or geometrically spaced points.

use anyhow::{bail, Context, Result};

pub fn parse_values(text: &str) -> Result<Vec<f64>> {
    let text = text.trim();
    if text.contains(':') {
        return parse_range(text);
    }
    text.split(',').map(|v| v.trim().parse::<f64>().with_context(|| format!("not a number: {v:?}"))).collect()
}

fn parse_range(text: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    let [lo, hi, spacing] = parts[..] else {
        bail!("range must look like lo:hi:linN or lo:hi:logN, got {text:?}");
    };
    let lo: f64 = lo.parse().with_context(|| format!("bad range start {lo:?}"))?;
    let hi: f64 = hi.parse().with_context(|| format!("bad range end {hi:?}"))?;
    let (log, count) = if let Some(c) = spacing.strip_prefix("log") {
        (true, c)
    } else if let Some(c) = spacing.strip_prefix("lin") {
        (false, c)
    } else {
        bail!("range spacing must be linN or logN, got {spacing:?}");
    };
    let count: usize = count.parse().with_context(|| format!("bad point count {count:?}"))?;
    if count == 0 {
        bail!("range needs at least one point");
    }
    if !(lo.is_finite() && hi.is_finite()) || hi < lo {
        bail!("range needs finite lo <= hi, got {lo}:{hi}");
    }
    if log && lo <= 0.0 {
        bail!("log range needs lo > 0");
    }
    if count == 1 {
        return Ok(vec![lo]);
    }
    let step = |i: usize| i as f64 / (count - 1) as f64;
    Ok((0..count)
        .map(|i| {
            if i == 0 {
                lo
            } else if i == count - 1 {
                hi
            } else if log {
                (lo.ln() + (hi.ln() - lo.ln()) * step(i)).exp()
            } else {
                lo + (hi - lo) * step(i)
            }
        })
        .collect())
}

/// Integer values, rounded, with repeats dropped (order kept).
pub fn parse_counts(text: &str) -> Result<Vec<usize>> {
    let mut out: Vec<usize> = Vec::new();
    for v in parse_values(text)? {
        if !(v >= 0.0 && v.is_finite()) {
            bail!("expected a non-negative count, got {v}");
        }
        let r = v.round() as usize;
        if out.last() != Some(&r) && !out.contains(&r) {
            out.push(r);
        }
    }
    Ok(out)
}

pub fn parse_u32_list(text: &str) -> Result<Vec<u32>> {
    parse_counts(text)?.into_iter().map(|v| u32::try_from(v).context("value too large")).collect()
}
