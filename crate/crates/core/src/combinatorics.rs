//! Counting and lexicographic enumeration helpers.

use alloc::vec::Vec;

pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i + 1) as u128;
    }
    acc
}

/// `n (n-1) ... (n-k+1)`, saturating.
pub fn falling(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128);
    }
    acc
}

pub fn pow(base: u64, exp: u64) -> u128 {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.saturating_mul(base as u128);
    }
    acc
}

/// Advances `c` (a strictly increasing sequence over `0..n`) to the next
/// k-subset in lexicographic order. Returns false when exhausted.
pub fn next_combination(c: &mut [u32], n: u32) -> bool {
    let k = c.len();
    if k == 0 {
        return false;
    }
    let mut i = k;
    while i > 0 {
        i -= 1;
        if c[i] < n - (k - i) as u32 {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Calls `f` on every k-subset of `items` in lexicographic order of positions.
/// Stops early when `f` returns true; returns whether it stopped early.
pub fn for_each_subset_of_size<T: Copy>(
    items: &[T],
    k: usize,
    mut f: impl FnMut(&[T]) -> bool,
) -> bool {
    let n = items.len();
    if k > n {
        return false;
    }
    let mut idx: Vec<u32> = (0..k as u32).collect();
    let mut buf: Vec<T> = idx.iter().map(|&i| items[i as usize]).collect();
    loop {
        if f(&buf) {
            return true;
        }
        if !next_combination(&mut idx, n as u32) {
            return false;
        }
        for (b, &i) in buf.iter_mut().zip(idx.iter()) {
            *b = items[i as usize];
        }
    }
}

/// Lexicographic successor of a permutation, `false` at the last one.
pub fn next_permutation<T: Ord>(p: &mut [T]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Calls `f` on every injective sequence of length `k` over `0..n`, in
/// lexicographic order. Stops early when `f` returns true.
pub fn for_each_injection(n: u32, k: usize, mut f: impl FnMut(&[u32]) -> bool) -> bool {
    if k as u64 > n as u64 {
        return false;
    }
    let mut cur: Vec<u32> = Vec::with_capacity(k);
    let mut used = alloc::vec![false; n as usize];
    fn rec(
        n: u32,
        k: usize,
        cur: &mut Vec<u32>,
        used: &mut [bool],
        f: &mut dyn FnMut(&[u32]) -> bool,
    ) -> bool {
        if cur.len() == k {
            return f(cur);
        }
        for v in 0..n {
            if !used[v as usize] {
                used[v as usize] = true;
                cur.push(v);
                let stop = rec(n, k, cur, used, f);
                cur.pop();
                used[v as usize] = false;
                if stop {
                    return true;
                }
            }
        }
        false
    }
    rec(n, k, &mut cur, &mut used, &mut f)
}

/// Calls `f` on every set partition of `items`, given as a list of blocks
/// (each in item order, blocks ordered by first item).
pub fn for_each_set_partition<T: Copy>(items: &[T], mut f: impl FnMut(&[Vec<T>])) {
    let mut blocks: Vec<Vec<T>> = Vec::new();
    fn rec<T: Copy>(items: &[T], i: usize, blocks: &mut Vec<Vec<T>>, f: &mut dyn FnMut(&[Vec<T>])) {
        if i == items.len() {
            f(blocks);
            return;
        }
        for b in 0..blocks.len() {
            blocks[b].push(items[i]);
            rec(items, i + 1, blocks, f);
            blocks[b].pop();
        }
        blocks.push(alloc::vec![items[i]]);
        rec(items, i + 1, blocks, f);
        blocks.pop();
    }
    rec(items, 0, &mut blocks, &mut f);
}

/// Canonical equality pattern of a tuple: each coordinate is replaced by the
/// index of the first coordinate holding the same value, renumbered densely.
pub fn equality_pattern(t: &[u32]) -> Vec<u8> {
    let mut out = Vec::with_capacity(t.len());
    let mut seen: Vec<u32> = Vec::with_capacity(t.len());
    for &x in t {
        match seen.iter().position(|&s| s == x) {
            Some(p) => out.push(p as u8),
            None => {
                out.push(seen.len() as u8);
                seen.push(x);
            }
        }
    }
    out
}
