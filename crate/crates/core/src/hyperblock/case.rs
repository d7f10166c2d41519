use crate::data::Dataset;
use crate::error::{GlcError, Result};
use crate::hyperblock::{covered_indices, envelope, inside, Algorithm, Hyperblock};
use crate::linear::GlcModel;

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Rule for training point `index`: the envelope of its class, shrunk until
/// no point of another class is inside.
///
/// While a counterexample remains, the one nearest to `x` is cut off by
/// moving a single bound to the next same-class value past it; the move that
/// drops the fewest same-class points wins, ties going to attributes in
/// increasing coefficient order and to the lower bound. The final bounds are
/// the envelope of the surviving same-class points. A point that shares its
/// exact coordinates with another class gets the box `b = d = x`.
pub fn case_rule(d: &Dataset, m: &GlcModel, index: usize) -> Result<Hyperblock> {
    if index >= d.len() {
        return Err(GlcError::PointNotFound(format!("index {index}")));
    }
    if m.n_attributes() != d.n_attributes() {
        return Err(GlcError::DimensionMismatch {
            expected: d.n_attributes(),
            got: m.n_attributes(),
        });
    }
    let x = d.point(index);
    let class = d.label(index).to_string();
    let mut order: Vec<usize> = (0..d.n_attributes()).collect();
    order.sort_by(|&a, &b| m.k()[a].total_cmp(&m.k()[b]).then(a.cmp(&b)));

    let same: Vec<usize> = (0..d.len()).filter(|&i| d.label(i) == class).collect();
    let others: Vec<usize> = (0..d.len()).filter(|&i| d.label(i) != class).collect();
    let (mut lower, mut upper) = envelope(d, &same);

    loop {
        let inside_same: Vec<usize> = same
            .iter()
            .copied()
            .filter(|&i| inside(&lower, &upper, d.point(i)))
            .collect();
        let nearest = others
            .iter()
            .copied()
            .filter(|&i| inside(&lower, &upper, d.point(i)))
            .min_by(|&a, &b| dist2(d.point(a), x).total_cmp(&dist2(d.point(b), x)).then(a.cmp(&b)));
        let Some(y) = nearest.map(|i| d.point(i)) else {
            let (l, u) = envelope(d, &inside_same);
            lower = l;
            upper = u;
            break;
        };

        // (lost, attribute, is_upper, new bound)
        let mut best: Option<(usize, usize, bool, f64)> = None;
        for &a in &order {
            let (yi, xi) = (y[a], x[a]);
            let candidate = if yi < xi {
                inside_same
                    .iter()
                    .map(|&i| d.point(i)[a])
                    .filter(|&v| v > yi)
                    .min_by(f64::total_cmp)
                    .map(|v| (false, v))
            } else if yi > xi {
                inside_same
                    .iter()
                    .map(|&i| d.point(i)[a])
                    .filter(|&v| v < yi)
                    .max_by(f64::total_cmp)
                    .map(|v| (true, v))
            } else {
                None
            };
            if let Some((is_upper, v)) = candidate {
                let lost = inside_same
                    .iter()
                    .filter(|&&i| {
                        let p = d.point(i)[a];
                        if is_upper {
                            p > v
                        } else {
                            p < v
                        }
                    })
                    .count();
                if best.is_none_or(|b| lost < b.0) {
                    best = Some((lost, a, is_upper, v));
                }
            }
        }
        match best {
            Some((_, a, true, v)) => upper[a] = v,
            Some((_, a, false, v)) => lower[a] = v,
            None => {
                lower = x.to_vec();
                upper = x.to_vec();
                break;
            }
        }
    }

    let member_indices = covered_indices(&lower, &upper, d);
    Ok(Hyperblock {
        lower,
        upper,
        class,
        seed_attribute: None,
        member_indices,
        algorithm: Algorithm::Case,
    })
}

/// [`case_rule`] for the first training point equal to `x`.
pub fn case_rule_for_point(x: &[f64], d: &Dataset, m: &GlcModel) -> Result<Hyperblock> {
    let index = d
        .points()
        .iter()
        .position(|p| p.as_slice() == x)
        .ok_or_else(|| GlcError::PointNotFound(format!("{x:?}")))?;
    case_rule(d, m, index)
}
