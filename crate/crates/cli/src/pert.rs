//! Key-value perturbation files.
//!
//! One `key = value` per line, `#` starts a comment. Keys are `a_ij` / `b_ij`
//! (coefficient of `x^i y^j` in `f` / `g`, also `a_i_j`), or the quadratic
//! charts of the `(-1, -2, 1)` family: `alpha0..alpha3`, `alphahat0..3`,
//! `baralpha0..baralpha3`, `q0..q3`.

use anyhow::{anyhow, bail, Context, Result};
use cubic_melnikov::abelian::PerturbationPoly;
use cubic_melnikov::charts::{alpha_transforms, quad_perturbation, Chart};
use std::collections::BTreeMap;

#[derive(Debug, Clone)]
pub struct PertFile {
    pub pert: PerturbationPoly,
    /// Set when the file used one of the quadratic charts.
    pub chart: Option<(Chart, [f64; 4])>,
}

fn monomial(rest: &str) -> Option<(u32, u32)> {
    if let Some((i, j)) = rest.split_once('_') {
        return Some((i.parse().ok()?, j.parse().ok()?));
    }
    if rest.len() == 2 && rest.chars().all(|c| c.is_ascii_digit()) {
        let d: Vec<u32> = rest.chars().map(|c| c.to_digit(10).unwrap()).collect();
        return Some((d[0], d[1]));
    }
    None
}

fn chart_key(key: &str) -> Option<(Chart, usize)> {
    let (stem, idx) = key.split_at(key.len().checked_sub(1)?);
    let k: usize = idx.parse().ok().filter(|k| *k < 4)?;
    let chart = match stem {
        "alpha" => Chart::Alpha,
        "alphahat" | "hatalpha" => Chart::AlphaHat,
        "baralpha" | "alphabar" => Chart::AlphaBar,
        "q" => Chart::Q,
        _ => return None,
    };
    Some((chart, k))
}

pub fn parse(text: &str) -> Result<PertFile> {
    let mut a = BTreeMap::new();
    let mut b = BTreeMap::new();
    let mut chart: Option<(Chart, [f64; 4])> = None;
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, val) = line.split_once('=').ok_or_else(|| anyhow!("line {}: expected 'key = value'", n + 1))?;
        let key = key.trim().to_ascii_lowercase();
        let val: f64 = val.trim().parse().with_context(|| format!("line {}: bad number '{}'", n + 1, val.trim()))?;
        if !val.is_finite() {
            bail!("line {}: coefficient must be finite", n + 1);
        }
        if let Some((c, k)) = chart_key(&key) {
            match &mut chart {
                Some((prev, v)) if *prev == c => v[k] = val,
                Some((prev, _)) => bail!("line {}: mixes charts {prev} and {c}", n + 1),
                None => {
                    let mut v = [0.0; 4];
                    v[k] = val;
                    chart = Some((c, v));
                }
            }
            continue;
        }
        let (map, rest) = if let Some(r) = key.strip_prefix("a_") {
            (&mut a, r)
        } else if let Some(r) = key.strip_prefix("b_") {
            (&mut b, r)
        } else {
            bail!("line {}: unknown key '{key}'", n + 1);
        };
        let ij = monomial(rest).ok_or_else(|| anyhow!("line {}: unknown key '{key}'", n + 1))?;
        if map.insert(ij, val).is_some() {
            bail!("line {}: duplicate key '{key}'", n + 1);
        }
    }
    if let Some((c, v)) = chart {
        if !a.is_empty() || !b.is_empty() {
            bail!("chart keys cannot be mixed with a_ij / b_ij");
        }
        let q = alpha_transforms(v, c, Chart::Q);
        return Ok(PertFile { pert: quad_perturbation(q), chart: Some((c, v)) });
    }
    let n = a.keys().chain(b.keys()).map(|(i, j)| i + j).max().unwrap_or(0);
    let to_vec = |m: &BTreeMap<(u32, u32), f64>| m.iter().map(|(&(i, j), &c)| (i, j, c)).collect::<Vec<_>>();
    let pert = PerturbationPoly::new(n, &to_vec(&a), &to_vec(&b))?;
    Ok(PertFile { pert, chart: None })
}

pub fn read(path: &std::path::Path) -> Result<PertFile> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse(&text).with_context(|| format!("in {}", path.display()))
}
