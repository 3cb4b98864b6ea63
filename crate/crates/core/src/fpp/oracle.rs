use crate::env::EdgeWeights;
use crate::error::{Error, Result};
use crate::weight::Weight;

use super::Variant;

/// Largest `m + n` accepted by [`brute_force_value`].
pub const BRUTE_FORCE_MAX_STEPS: usize = 16;

/// Minimum path weight by enumerating every up-right path from `(0, 0)` to
/// `(m, n)`. Independent of the DP recursion; meant as a test oracle.
pub fn brute_force_value<W: Weight>(env: &impl EdgeWeights<W>, variant: Variant, m: usize, n: usize) -> Result<W> {
    let steps = m + n;
    if steps > BRUTE_FORCE_MAX_STEPS {
        return Err(Error::Budget(steps, BRUTE_FORCE_MAX_STEPS));
    }
    let (max_m, max_n) = env.extent();
    if m > max_m || n > max_n {
        return Err(Error::Bounds { i: m, j: n, m: max_m, n: max_n });
    }
    let mut best: Option<W> = None;
    // Bit k set means step k goes right.
    for mask in 0u32..(1u32 << steps) {
        if mask.count_ones() as usize != m {
            continue;
        }
        let (mut i, mut j) = (0, 0);
        let mut total = W::ZERO;
        for k in 0..steps {
            if mask >> k & 1 == 1 {
                i += 1;
                total = total + variant.select(env.pair(i, j), i).horizontal;
            } else {
                j += 1;
                total = total + variant.select(env.pair(i, j), i).vertical;
            }
        }
        best = Some(match best {
            Some(b) if b <= total => b,
            _ => total,
        });
    }
    Ok(best.unwrap_or(W::ZERO))
}
