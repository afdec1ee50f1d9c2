use alloc::vec::Vec;

use crate::error::{Error, Result};

struct Block {
    value: f64,
    weight: f64,
    len: usize,
}

/// Weighted least-squares projection of `g` onto nonincreasing vectors, by
/// pool-adjacent-violators.
///
/// Zero weights are allowed; a zero-weight entry takes the value of whatever
/// block it gets pooled into.
pub fn isotonic_decreasing_fit(g: &[f64], w: &[f64]) -> Result<Vec<f64>> {
    if g.len() != w.len() {
        return Err(Error::LengthMismatch {
            expected: g.len(),
            got: w.len(),
        });
    }
    if w.iter().any(|&x| !(x >= 0.0)) {
        return Err(Error::MalformedInput(
            "isotonic weights must be nonnegative",
        ));
    }
    if !w.iter().any(|&x| x > 0.0) {
        return Err(Error::VacuousProblem);
    }

    let mut blocks: Vec<Block> = Vec::with_capacity(g.len());
    for (&value, &weight) in g.iter().zip(w) {
        blocks.push(Block {
            value,
            weight,
            len: 1,
        });
        while blocks.len() > 1 && blocks[blocks.len() - 1].value > blocks[blocks.len() - 2].value {
            let hi = blocks.pop().unwrap();
            let lo = blocks.last_mut().unwrap();
            let total = lo.weight + hi.weight;
            lo.value = if total > 0.0 {
                (lo.weight * lo.value + hi.weight * hi.value) / total
            } else {
                0.5 * (lo.value + hi.value)
            };
            lo.weight = total;
            lo.len += hi.len;
        }
    }
    Ok(blocks
        .iter()
        .flat_map(|b| core::iter::repeat(b.value).take(b.len))
        .collect())
}
