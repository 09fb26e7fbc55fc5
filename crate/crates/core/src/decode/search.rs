//! Beam search over the lexicon trie.
//!
//! Each trie node carries a column `S[i][e]`: the best spatial score of
//! spelling the node's prefix with the first `i` taps using `e` edits.
//! Depth by depth, only the `beam_width` nodes with the best optimistic
//! score survive. Since no depth has more nodes than the lexicon has
//! words, a beam at least as wide as the lexicon is exact.

use std::collections::HashMap;

use super::lexicon::Lexicon;
use super::spatial::Emission;
use super::DecodeConfig;

#[derive(Debug, Clone, PartialEq)]
pub struct Alignment {
    pub word: String,
    pub spatial: f64,
    pub edits: usize,
}

/// Edits allowed for a word of `taps` taps.
pub fn edit_budget(taps: usize, taps_per_edit: usize) -> usize {
    taps.div_ceil(taps_per_edit.max(1))
}

struct Taps {
    n: usize,
    budget: usize,
    single: Vec<HashMap<char, f64>>,
    /// Multi-character units per tap: (unit chars, score).
    multi: Vec<Vec<(Vec<char>, f64)>>,
    /// Optimistic score for taps `i..`.
    rest: Vec<f64>,
}

impl Taps {
    fn cell(&self, i: usize, e: usize) -> usize {
        i * (self.budget + 1) + e
    }
}

pub fn beam_search(lexicon: &Lexicon, emissions: &[Emission], config: &DecodeConfig) -> Vec<Alignment> {
    let n = emissions.len();
    let pen = config.edit_penalty;
    let mut single = Vec::with_capacity(n);
    let mut multi = Vec::with_capacity(n);
    for em in emissions {
        let mut s = HashMap::new();
        let mut m = Vec::new();
        for (u, &score) in &em.units {
            let chars: Vec<char> = u.chars().collect();
            if chars.len() == 1 {
                s.insert(chars[0], score);
            } else if !chars.is_empty() {
                m.push((chars, score));
            }
        }
        m.sort_by(|a, b| a.0.cmp(&b.0));
        single.push(s);
        multi.push(m);
    }
    let mut rest = vec![0.0; n + 1];
    for i in (0..n).rev() {
        let best = emissions[i]
            .units
            .values()
            .copied()
            .fold(pen, f64::max);
        rest[i] = rest[i + 1] + best;
    }
    let t = Taps {
        n,
        budget: edit_budget(n, config.taps_per_edit),
        single,
        multi,
        rest,
    };
    let width = t.budget + 1;

    let mut root = vec![f64::NEG_INFINITY; (n + 1) * width];
    root[0] = 0.0;
    for i in 1..=n {
        for e in 1..width {
            root[t.cell(i, e)] = root[t.cell(i - 1, e - 1)] + pen;
        }
    }
    let mut columns: HashMap<usize, Vec<f64>> = HashMap::from([(0, root)]);
    let mut frontier = vec![0usize];
    let mut out = Vec::new();

    while !frontier.is_empty() {
        let mut scored: Vec<(f64, usize)> = Vec::new();
        let mut fresh: HashMap<usize, Vec<f64>> = HashMap::new();
        for &p in &frontier {
            for &child in lexicon.node(p).children.values() {
                let col = column(lexicon, child, &columns, &t, pen);
                let bound = (0..=n)
                    .flat_map(|i| (0..width).map(move |e| (i, e)))
                    .map(|(i, e)| col[t.cell(i, e)] + t.rest[i])
                    .fold(f64::NEG_INFINITY, f64::max);
                if bound.is_finite() {
                    scored.push((bound, child));
                    fresh.insert(child, col);
                }
            }
        }
        scored.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)));
        scored.truncate(config.beam_width.max(1));
        frontier = scored.iter().map(|&(_, id)| id).collect();
        for &id in &frontier {
            let col = fresh.remove(&id).expect("scored nodes have columns");
            if let Some(word) = &lexicon.node(id).word {
                let (edits, spatial) = (0..width)
                    .map(|e| (e, col[t.cell(n, e)]))
                    .fold((0, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
                if spatial.is_finite() {
                    out.push(Alignment {
                        word: word.clone(),
                        spatial,
                        edits,
                    });
                }
            }
            columns.insert(id, col);
        }
    }
    out
}

fn column(lexicon: &Lexicon, v: usize, columns: &HashMap<usize, Vec<f64>>, t: &Taps, pen: f64) -> Vec<f64> {
    let node = lexicon.node(v);
    let width = t.budget + 1;
    let parent = &columns[&node.parent];
    let grand = (node.depth >= 2)
        .then(|| lexicon.node(node.parent))
        .and_then(|p| columns.get(&p.parent).map(|g| (p.ch, g)));
    let mut col = vec![f64::NEG_INFINITY; (t.n + 1) * width];
    for i in 0..=t.n {
        for e in 0..width {
            let mut best = f64::NEG_INFINITY;
            if e >= 1 {
                best = best.max(parent[t.cell(i, e - 1)] + pen);
            }
            if i >= 1 {
                if let Some(s) = t.single[i - 1].get(&node.ch) {
                    best = best.max(parent[t.cell(i - 1, e)] + s);
                }
                if e >= 1 {
                    best = best.max(parent[t.cell(i - 1, e - 1)] + pen);
                    best = best.max(col[t.cell(i - 1, e - 1)] + pen);
                }
                for (unit, s) in &t.multi[i - 1] {
                    if let Some(anc) = ancestor_spelling(lexicon, v, unit) {
                        if let Some(a) = columns.get(&anc) {
                            best = best.max(a[t.cell(i - 1, e)] + s);
                        }
                    }
                }
            }
            if i >= 2 && e >= 1 {
                if let Some((pch, g)) = grand {
                    if let (Some(a), Some(b)) = (t.single[i - 2].get(&node.ch), t.single[i - 1].get(&pch)) {
                        best = best.max(g[t.cell(i - 2, e - 1)] + a + b + pen);
                    }
                }
            }
            col[t.cell(i, e)] = best;
        }
    }
    col
}

/// The ancestor from which `unit` spells the path down to `v`, if any.
fn ancestor_spelling(lexicon: &Lexicon, v: usize, unit: &[char]) -> Option<usize> {
    let mut at = v;
    for &ch in unit.iter().rev() {
        let node = lexicon.node(at);
        if node.depth == 0 || node.ch != ch {
            return None;
        }
        at = node.parent;
    }
    Some(at)
}
