//! IHyper, MHyper, IMHyper and the LDF-consistent HBRL variant.

use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{GlcError, Result};
use crate::hyperblock::{covered_indices, inside, Algorithm, Hyperblock};
use crate::linear::GlcModel;

const PURITY_EPS: f64 = 1e-12;

/// The interval chosen in one IHyper round.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalChoice {
    pub attribute: usize,
    pub low: f64,
    pub high: f64,
    /// Remaining points with a value in `[low, high]`.
    pub size: usize,
    pub class: String,
}

fn check_purity(p: f64) -> Result<()> {
    if p > 0.0 && p <= 1.0 {
        Ok(())
    } else {
        Err(GlcError::InvalidParameter(format!(
            "purity threshold must be in (0, 1], got {p}"
        )))
    }
}

fn check_impurity(p: f64) -> Result<()> {
    if (0.0..1.0).contains(&p) {
        Ok(())
    } else {
        Err(GlcError::InvalidParameter(format!(
            "impurity threshold must be in [0, 1), got {p}"
        )))
    }
}

/// Consistency constraint for HBRL: every training point whose value on the
/// scanned attribute lies in the interval must share one LDF prediction.
struct LdfGuard<'a> {
    /// LDF prediction per point, as class ids.
    predictions: &'a [usize],
}

struct Candidate {
    attribute: usize,
    start: usize,
    end: usize,
    size: usize,
    class: usize,
}

/// Best interval on attribute `a` among `remaining`.
fn scan_attribute(
    d: &Dataset,
    class_ids: &[usize],
    n_classes: usize,
    remaining: &[usize],
    a: usize,
    purity: f64,
    guard: Option<&LdfGuard>,
) -> Option<(Candidate, Vec<f64>)> {
    let mut sorted: Vec<usize> = remaining.to_vec();
    sorted.sort_by(|&p, &q| d.point(p)[a].total_cmp(&d.point(q)[a]).then(p.cmp(&q)));
    let mut values: Vec<f64> = Vec::new();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for &p in &sorted {
        let v = d.point(p)[a];
        if values.last() != Some(&v) {
            values.push(v);
            groups.push(vec![0; n_classes]);
        }
        groups.last_mut().expect("pushed")[class_ids[p]] += 1;
    }

    // distinct values over all points with their LDF prediction masks
    let all_masks: Option<(Vec<f64>, Vec<u64>)> = guard.map(|g| {
        let mut all: Vec<usize> = (0..d.len()).collect();
        all.sort_by(|&p, &q| d.point(p)[a].total_cmp(&d.point(q)[a]));
        let mut vals: Vec<f64> = Vec::new();
        let mut masks: Vec<u64> = Vec::new();
        for p in all {
            let v = d.point(p)[a];
            if vals.last() != Some(&v) {
                vals.push(v);
                masks.push(0);
            }
            *masks.last_mut().expect("pushed") |= 1 << g.predictions[p];
        }
        (vals, masks)
    });

    let mut best: Option<Candidate> = None;
    for s in 0..values.len() {
        let mut counts = vec![0usize; n_classes];
        let mut total = 0usize;
        let mut mask = 0u64;
        let mut cursor = 0usize;
        if let Some((vals, _)) = &all_masks {
            cursor = vals.partition_point(|&v| v < values[s]);
        }
        for e in s..values.len() {
            for (c, n) in groups[e].iter().enumerate() {
                counts[c] += n;
                total += n;
            }
            let class = if let Some((vals, masks)) = &all_masks {
                while cursor < vals.len() && vals[cursor] <= values[e] {
                    mask |= masks[cursor];
                    cursor += 1;
                }
                if mask.count_ones() != 1 {
                    break;
                }
                mask.trailing_zeros() as usize
            } else {
                // majority, ties to the lower class id
                let mut c = 0;
                for (i, &n) in counts.iter().enumerate() {
                    if n > counts[c] {
                        c = i;
                    }
                }
                c
            };
            if (counts[class] as f64) / (total as f64) + PURITY_EPS < purity {
                continue;
            }
            if best.as_ref().is_none_or(|b| total > b.size) {
                best = Some(Candidate {
                    attribute: a,
                    start: s,
                    end: e,
                    size: total,
                    class,
                });
            }
        }
    }
    best.map(|b| (b, values))
}

fn interval_rounds(
    d: &Dataset,
    purity: f64,
    guard: Option<&LdfGuard>,
    class_names: &[String],
    class_ids: &[usize],
    algorithm: Algorithm,
) -> (Vec<Hyperblock>, Vec<IntervalChoice>, Vec<usize>) {
    let mut remaining: Vec<usize> = (0..d.len()).collect();
    let mut blocks = Vec::new();
    let mut trace = Vec::new();
    while !remaining.is_empty() {
        let mut best: Option<(Candidate, Vec<f64>)> = None;
        for a in 0..d.n_attributes() {
            if let Some((c, values)) =
                scan_attribute(d, class_ids, class_names.len(), &remaining, a, purity, guard)
            {
                let better = match &best {
                    None => true,
                    // attributes scan in increasing order, so only a strictly
                    // larger interval displaces an earlier one
                    Some((b, _)) => c.size > b.size,
                };
                if better {
                    best = Some((c, values));
                }
            }
        }
        let Some((c, values)) = best else { break };
        let (low, high) = (values[c.start], values[c.end]);
        let a = c.attribute;
        let (taken, rest): (Vec<usize>, Vec<usize>) = remaining
            .iter()
            .partition(|&&p| (low..=high).contains(&d.point(p)[a]));
        let class = class_names[c.class].clone();
        blocks.push(Hyperblock::envelope_of(d, &taken, class.clone(), Some(a), algorithm));
        trace.push(IntervalChoice {
            attribute: a,
            low,
            high,
            size: c.size,
            class,
        });
        remaining = rest;
    }
    (blocks, trace, remaining)
}

/// IHyper: repeatedly takes the largest single-attribute interval whose
/// majority class reaches `purity` among the not-yet-covered points, and
/// emits the envelope of its points as a block.
///
/// Every start value is tried against every end value. Ties on interval
/// size go to the lower attribute index, then the lower start value.
pub fn ihyper(d: &Dataset, purity: f64) -> Result<Vec<Hyperblock>> {
    Ok(ihyper_with_trace(d, purity)?.0)
}

/// [`ihyper`] that also returns the interval picked in each round.
pub fn ihyper_with_trace(d: &Dataset, purity: f64) -> Result<(Vec<Hyperblock>, Vec<IntervalChoice>)> {
    check_purity(purity)?;
    let (classes, ids) = d.class_ids();
    let (blocks, trace, _) = interval_rounds(d, purity, None, &classes, &ids, Algorithm::Ihyper);
    Ok((blocks, trace))
}

struct Block {
    lower: Vec<f64>,
    upper: Vec<f64>,
    class: usize,
    seed: Option<usize>,
    algorithm: Algorithm,
}

fn joint(a: &Block, b: &Block) -> (Vec<f64>, Vec<f64>) {
    (
        a.lower.iter().zip(&b.lower).map(|(x, y)| x.min(*y)).collect(),
        a.upper.iter().zip(&b.upper).map(|(x, y)| x.max(*y)).collect(),
    )
}

struct Merger<'a> {
    d: &'a Dataset,
    class_ids: &'a [usize],
    blocks: Vec<Option<Block>>,
}

impl Merger<'_> {
    fn has_opposite(&self, lower: &[f64], upper: &[f64], class: usize) -> bool {
        self.d
            .points()
            .iter()
            .zip(self.class_ids)
            .any(|(p, &c)| c != class && inside(lower, upper, p))
    }

    fn impurity(&self, lower: &[f64], upper: &[f64], class: usize) -> f64 {
        let (mut total, mut opposite) = (0usize, 0usize);
        for (p, &c) in self.d.points().iter().zip(self.class_ids) {
            if inside(lower, upper, p) {
                total += 1;
                opposite += (c != class) as usize;
            }
        }
        if total == 0 {
            0.0
        } else {
            opposite as f64 / total as f64
        }
    }

    fn absorb(&mut self, i: usize, j: usize, lower: Vec<f64>, upper: Vec<f64>) {
        self.blocks[j] = None;
        let b = self.blocks[i].as_mut().expect("live block");
        b.lower = lower;
        b.upper = upper;
    }

    fn pure_phase(&mut self) {
        loop {
            let mut merged = false;
            for i in 0..self.blocks.len() {
                if self.blocks[i].is_none() {
                    continue;
                }
                for j in i + 1..self.blocks.len() {
                    let (Some(bi), Some(bj)) = (&self.blocks[i], &self.blocks[j]) else {
                        continue;
                    };
                    if bi.class != bj.class {
                        continue;
                    }
                    let (lower, upper) = joint(bi, bj);
                    if !self.has_opposite(&lower, &upper, bi.class) {
                        self.absorb(i, j, lower, upper);
                        merged = true;
                    }
                }
            }
            if !merged {
                break;
            }
        }
    }

    fn impure_phase(&mut self, threshold: f64) {
        loop {
            let mut merged = false;
            for i in 0..self.blocks.len() {
                let Some(bi) = &self.blocks[i] else { continue };
                let mut best: Option<(f64, usize, Vec<f64>, Vec<f64>)> = None;
                for j in 0..self.blocks.len() {
                    if j == i {
                        continue;
                    }
                    let Some(bj) = &self.blocks[j] else { continue };
                    if bj.class != bi.class {
                        continue;
                    }
                    let (lower, upper) = joint(bi, bj);
                    let imp = self.impurity(&lower, &upper, bi.class);
                    if best.as_ref().is_none_or(|b| imp < b.0) {
                        best = Some((imp, j, lower, upper));
                    }
                }
                if let Some((imp, j, lower, upper)) = best {
                    if imp < threshold {
                        self.absorb(i, j, lower, upper);
                        merged = true;
                    }
                }
            }
            if !merged {
                break;
            }
        }
    }

    fn finish(self, names: &[String], d: &Dataset) -> Vec<Hyperblock> {
        self.blocks
            .into_iter()
            .flatten()
            .map(|b| Hyperblock {
                member_indices: covered_indices(&b.lower, &b.upper, d),
                lower: b.lower,
                upper: b.upper,
                class: names[b.class].clone(),
                seed_attribute: b.seed,
                algorithm: b.algorithm,
            })
            .collect()
    }
}

fn seeded_pool(
    d: &Dataset,
    names: &[String],
    class_ids: &[usize],
    seeds: &[Hyperblock],
    singleton_tag: Algorithm,
) -> Result<Vec<Option<Block>>> {
    let mut pool = Vec::new();
    for s in seeds {
        let class = names
            .iter()
            .position(|c| *c == s.class)
            .ok_or_else(|| GlcError::UnknownClass(s.class.clone()))?;
        if s.n_attributes() != d.n_attributes() {
            return Err(GlcError::DimensionMismatch {
                expected: d.n_attributes(),
                got: s.n_attributes(),
            });
        }
        pool.push(Some(Block {
            lower: s.lower.clone(),
            upper: s.upper.clone(),
            class,
            seed: s.seed_attribute,
            algorithm: s.algorithm,
        }));
    }
    for (i, p) in d.points().iter().enumerate() {
        if seeds.iter().any(|s| s.contains(p)) {
            continue;
        }
        pool.push(Some(Block {
            lower: p.clone(),
            upper: p.clone(),
            class: class_ids[i],
            seed: None,
            algorithm: singleton_tag,
        }));
    }
    Ok(pool)
}

/// MHyper: starts from one block per point (after any `seeds`, which cover
/// their own points), merges same-class blocks while the joint envelope holds
/// no point of another class, then merges the lowest-impurity pairs while
/// the impurity stays below `impurity`.
pub fn mhyper(d: &Dataset, impurity: f64, seeds: Option<&[Hyperblock]>) -> Result<Vec<Hyperblock>> {
    check_impurity(impurity)?;
    let (names, ids) = d.class_ids();
    let pool = seeded_pool(d, &names, &ids, seeds.unwrap_or(&[]), Algorithm::Mhyper)?;
    let mut m = Merger {
        d,
        class_ids: &ids,
        blocks: pool,
    };
    m.pure_phase();
    if impurity > 0.0 {
        m.impure_phase(impurity);
    }
    Ok(m.finish(&names, d))
}

/// Only the pure merging phase of [`mhyper`].
pub fn mhyper_pure(d: &Dataset, seeds: Option<&[Hyperblock]>) -> Result<Vec<Hyperblock>> {
    mhyper(d, 0.0, seeds)
}

/// IHyper followed by MHyper over the blocks it produced plus one block per
/// point they leave uncovered. Every training point ends up in some block.
pub fn imhyper(d: &Dataset, purity: f64, impurity: f64) -> Result<Vec<Hyperblock>> {
    check_impurity(impurity)?;
    let seeds = ihyper(d, purity)?;
    mhyper(d, impurity, Some(&seeds))
}

/// Blocks that reproduce the model's decisions: IHyper where an interval is
/// allowed only if every training point in its attribute range has the same
/// model prediction, then pure MHyper merging under the model's labels. Each
/// block is labeled with the model's prediction for the points it covers.
pub fn hbrl(d: &Dataset, m: &GlcModel, purity: f64) -> Result<Vec<Hyperblock>> {
    check_purity(purity)?;
    let (names, ids) = d.class_ids();
    let predicted: Vec<String> = d
        .points()
        .iter()
        .map(|p| m.predict(p).map(str::to_string))
        .collect::<Result<_>>()?;
    let predictions: Vec<usize> = predicted
        .iter()
        .map(|l| {
            names
                .iter()
                .position(|c| c == l)
                .ok_or_else(|| GlcError::UnknownClass(l.clone()))
        })
        .collect::<Result<_>>()?;
    let guard = LdfGuard {
        predictions: &predictions,
    };
    let (seeds, _, _) = interval_rounds(d, purity, Some(&guard), &names, &ids, Algorithm::Hbrl);

    let by_model = d.relabeled(predicted)?;
    let (model_names, model_ids) = by_model.class_ids();
    let pool = seeded_pool(&by_model, &model_names, &model_ids, &seeds, Algorithm::Hbrl)?;
    let mut merger = Merger {
        d: &by_model,
        class_ids: &model_ids,
        blocks: pool,
    };
    merger.pure_phase();
    Ok(merger
        .finish(&model_names, &by_model)
        .into_iter()
        .map(|mut b| {
            b.algorithm = Algorithm::Hbrl;
            b
        })
        .collect())
}
