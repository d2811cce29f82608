//! Exhaustive search for the largest family of hop-wise disjoint paths.
//!
//! A path is a chain of size-`m` antenna subsets `S_0, ..., S_N`. Two paths
//! share a channel coefficient at hop `n` iff both `S_n` and `S_{n+1}`
//! intersect, so a family is independent iff its `S_n x S_{n+1}` rectangles
//! are pairwise disjoint at every hop.

#![allow(dead_code)]

fn subsets(n: usize, m: usize) -> Vec<u32> {
    (0u32..1 << n).filter(|s| s.count_ones() as usize == m).collect()
}

struct Search {
    m: usize,
    p: usize,
    stages: Vec<usize>,
    subsets: Vec<Vec<u32>>,
    /// `occ[n][a]`: stage-`n+1` antennas already paired with antenna `a`
    /// of stage `n` at hop `n`.
    occ: Vec<Vec<u32>>,
    /// Subset indices per stage of every placed path.
    paths: Vec<Vec<usize>>,
}

impl Search {
    fn fits(&self, n: usize, a: u32, b: u32) -> bool {
        bits(a).all(|i| self.occ[n][i] & b == 0)
    }

    fn toggle(&mut self, n: usize, a: u32, b: u32) {
        for i in bits(a) {
            self.occ[n][i] ^= b;
        }
    }

    /// Every row (column) of a hop holds at most `free / m` more paths, and
    /// each remaining path uses `m` rows and `m` columns.
    fn capacity_ok(&self, remaining: usize) -> bool {
        let need = remaining * self.m;
        (0..self.occ.len()).all(|n| {
            let cols = self.stages[n + 1];
            let rows: usize = self.occ[n]
                .iter()
                .map(|&o| (cols - o.count_ones() as usize) / self.m)
                .sum();
            let col_cap: usize = (0..cols)
                .map(|c| self.occ[n].iter().filter(|&&o| o >> c & 1 == 0).count() / self.m)
                .sum();
            rows >= need && col_cap >= need
        })
    }

    /// Places path `j`, stage `n`. `tied` means the prefix so far equals the
    /// previous path's, so indices must not decrease (paths in lex order).
    fn place(&mut self, j: usize, n: usize, tied: bool) -> bool {
        if n == self.stages.len() {
            if j + 1 == self.p {
                return true;
            }
            if !self.capacity_ok(self.p - j - 1) {
                return false;
            }
            return self.place(j + 1, 0, true);
        }
        let lo = if tied { self.paths[j - 1][n] } else { 0 };
        for k in lo..self.subsets[n].len() {
            let s = self.subsets[n][k];
            if n > 0 {
                let prev = self.subsets[n - 1][self.paths[j][n - 1]];
                if !self.fits(n - 1, prev, s) {
                    continue;
                }
                self.toggle(n - 1, prev, s);
            }
            self.paths[j][n] = k;
            let ok = self.place(j, n + 1, tied && k == lo);
            if n > 0 {
                let prev = self.subsets[n - 1][self.paths[j][n - 1]];
                self.toggle(n - 1, prev, s);
            }
            if ok {
                return true;
            }
        }
        false
    }
}

fn bits(mask: u32) -> impl Iterator<Item = usize> {
    (0..32).filter(move |b| mask >> b & 1 == 1)
}

/// A family of `p` independent paths, as per-stage bitmasks, if one exists.
///
/// Relabeling antennas within a stage preserves independence, so the first
/// path is fixed to the lowest subset at every stage and the rest follow in
/// lexicographic order.
pub fn find_family(stages: &[usize], m: usize, p: usize) -> Option<Vec<Vec<u32>>> {
    if p == 0 {
        return Some(Vec::new());
    }
    let subsets: Vec<Vec<u32>> = stages.iter().map(|&n| subsets(n, m)).collect();
    let hops = stages.len() - 1;
    let mut s = Search {
        m,
        p,
        stages: stages.to_vec(),
        occ: (0..hops).map(|n| vec![0; stages[n]]).collect(),
        paths: vec![vec![0; stages.len()]; p],
        subsets,
    };
    for n in 0..hops {
        let (a, b) = (s.subsets[n][0], s.subsets[n + 1][0]);
        s.toggle(n, a, b);
    }
    let found = p == 1 || (s.capacity_ok(p - 1) && s.place(1, 0, true));
    found.then(|| {
        s.paths
            .iter()
            .map(|path| path.iter().enumerate().map(|(n, &k)| s.subsets[n][k]).collect())
            .collect()
    })
}

/// Area bound `floor(M_n M_{n+1} / m^2)` minimized over hops.
pub fn area_bound(stages: &[usize], m: usize) -> usize {
    stages.windows(2).map(|w| w[0] * w[1] / (m * m)).min().unwrap_or(0)
}

/// Exact maximum family size, searching upward from `lower` (a size known
/// to be achievable) until the next size is infeasible or hits the area
/// bound. Also returns a witness of the maximum.
pub fn exact_max_family(stages: &[usize], m: usize, lower: usize) -> (usize, Vec<Vec<u32>>) {
    let mut best = find_family(stages, m, lower).expect("lower bound must be achievable");
    let mut size = lower;
    let ub = area_bound(stages, m);
    while size < ub {
        match find_family(stages, m, size + 1) {
            Some(f) => {
                best = f;
                size += 1;
            }
            None => break,
        }
    }
    (size, best)
}

/// Independent check that a bitmask family is hop-wise disjoint.
pub fn family_is_independent(family: &[Vec<u32>]) -> bool {
    for (i, a) in family.iter().enumerate() {
        for b in &family[i + 1..] {
            let clash = (0..a.len() - 1).any(|n| a[n] & b[n] != 0 && a[n + 1] & b[n + 1] != 0);
            if clash {
                return false;
            }
        }
    }
    true
}

/// Every stage list with `hops` hops and entries in `1..=max`.
pub fn all_topologies(hops: usize, max: usize) -> Vec<Vec<usize>> {
    let len = hops + 1;
    let mut out = Vec::new();
    let mut cur = vec![1usize; len];
    loop {
        out.push(cur.clone());
        let mut i = 0;
        while i < len && cur[i] == max {
            cur[i] = 1;
            i += 1;
        }
        if i == len {
            return out;
        }
        cur[i] += 1;
    }
}

pub fn to_indices(mask: u32) -> Vec<usize> {
    (0..32).filter(|b| mask >> b & 1 == 1).collect()
}
