//! Test-support oracles for the alignment dynamic program.
//!
//! Both oracles compute the minimum total cost over all monotone alignments
//! (delete / insert / match-or-substitute / bounded adjacent-block
//! transposition) without touching the production DP table or backtrace:
//! the naive one enumerates every path recursively, the memoized one adds a
//! per-cell cache so longer sentences stay tractable.  They exist to check
//! `align`, so they must never call it.

use gecstrat_core::{Cost, CostConfig};
use num_traits::Zero;

const MAX_TRANSPOSE: usize = 4;

fn sub_cost(a: &str, b: &str, cfg: &CostConfig) -> Cost {
    if a == b {
        Cost::zero()
    } else if a.to_lowercase() == b.to_lowercase() {
        cfg.case_only_substitute
    } else {
        cfg.substitute_base
    }
}

fn transposable(src: &[String], tgt: &[String], i: usize, j: usize, k: usize) -> bool {
    if i + k > src.len() || j + k > tgt.len() {
        return false;
    }
    let mut a: Vec<String> = src[i..i + k].iter().map(|t| t.to_lowercase()).collect();
    let mut b: Vec<String> = tgt[j..j + k].iter().map(|t| t.to_lowercase()).collect();
    a.sort();
    b.sort();
    a == b
}

/// Plain exponential enumeration of every monotone alignment.
pub fn oracle_cost_naive(src: &[String], tgt: &[String], cfg: &CostConfig) -> Cost {
    fn go(src: &[String], tgt: &[String], i: usize, j: usize, cfg: &CostConfig) -> Cost {
        if i == src.len() && j == tgt.len() {
            return Cost::zero();
        }
        let mut best: Option<Cost> = None;
        let mut consider = |cost: Cost| {
            if best.is_none_or(|b| cost < b) {
                best = Some(cost);
            }
        };
        if i < src.len() {
            consider(cfg.delete + go(src, tgt, i + 1, j, cfg));
        }
        if j < tgt.len() {
            consider(cfg.insert + go(src, tgt, i, j + 1, cfg));
        }
        if i < src.len() && j < tgt.len() {
            consider(sub_cost(&src[i], &tgt[j], cfg) + go(src, tgt, i + 1, j + 1, cfg));
        }
        for k in 2..=MAX_TRANSPOSE {
            if transposable(src, tgt, i, j, k) {
                let block = cfg.transpose_per_token * Cost::new(k as i64, 1);
                consider(block + go(src, tgt, i + k, j + k, cfg));
            }
        }
        best.expect("at least one move is always available")
    }
    go(src, tgt, 0, 0, cfg)
}

/// Same recursion with a cell cache, usable up to a few dozen tokens.
pub fn oracle_cost_memo(src: &[String], tgt: &[String], cfg: &CostConfig) -> Cost {
    fn go(
        src: &[String],
        tgt: &[String],
        i: usize,
        j: usize,
        cfg: &CostConfig,
        memo: &mut [Option<Cost>],
        width: usize,
    ) -> Cost {
        if i == src.len() && j == tgt.len() {
            return Cost::zero();
        }
        if let Some(cached) = memo[i * width + j] {
            return cached;
        }
        let mut best: Option<Cost> = None;
        let consider = |cost: Cost, best: &mut Option<Cost>| {
            if best.is_none_or(|b| cost < b) {
                *best = Some(cost);
            }
        };
        if i < src.len() {
            let c = cfg.delete + go(src, tgt, i + 1, j, cfg, memo, width);
            consider(c, &mut best);
        }
        if j < tgt.len() {
            let c = cfg.insert + go(src, tgt, i, j + 1, cfg, memo, width);
            consider(c, &mut best);
        }
        if i < src.len() && j < tgt.len() {
            let c = sub_cost(&src[i], &tgt[j], cfg) + go(src, tgt, i + 1, j + 1, cfg, memo, width);
            consider(c, &mut best);
        }
        for k in 2..=MAX_TRANSPOSE {
            if transposable(src, tgt, i, j, k) {
                let block = cfg.transpose_per_token * Cost::new(k as i64, 1);
                let c = block + go(src, tgt, i + k, j + k, cfg, memo, width);
                consider(c, &mut best);
            }
        }
        let best = best.expect("at least one move is always available");
        memo[i * width + j] = Some(best);
        best
    }
    let width = tgt.len() + 1;
    let mut memo = vec![None; (src.len() + 1) * width];
    go(src, tgt, 0, 0, cfg, &mut memo, width)
}

/// Every token sequence over `alphabet` with length 0..=`max_len`.
pub fn all_sequences(alphabet: &[&str], max_len: usize) -> Vec<Vec<String>> {
    let mut out: Vec<Vec<String>> = vec![Vec::new()];
    let mut frontier: Vec<Vec<String>> = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for seq in &frontier {
            for symbol in alphabet {
                let mut grown = seq.clone();
                grown.push(symbol.to_string());
                next.push(grown);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}
