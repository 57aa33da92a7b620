//! Permutations, unshuffles and graded (Koszul) signs.

/// A permutation of `m` graded inputs.
///
/// `images[i]` is the (0-based) index of the input placed at slot `i`, so the
/// reordered sequence is `x[images[0]], x[images[1]], ...`. `degrees[j]` is the
/// homological degree of input `x[j]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedPermutation {
    pub images: Vec<usize>,
    pub degrees: Vec<i32>,
}

impl GradedPermutation {
    pub fn new(images: Vec<usize>, degrees: Vec<i32>) -> Self {
        assert_eq!(images.len(), degrees.len(), "one degree per input");
        let mut seen = vec![false; images.len()];
        for &i in &images {
            assert!(i < images.len() && !seen[i], "not a permutation");
            seen[i] = true;
        }
        GradedPermutation { images, degrees }
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }
}

fn parity(k: i64) -> i32 {
    if k.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// (-1)^{number of inversions}.
pub fn perm_sign(p: &GradedPermutation) -> i32 {
    sign_of(&p.images)
}

pub fn sign_of(images: &[usize]) -> i32 {
    let mut inv = 0i64;
    for i in 0..images.len() {
        for j in i + 1..images.len() {
            if images[i] > images[j] {
                inv += 1;
            }
        }
    }
    parity(inv)
}

/// Koszul sign ε: each pair of inputs whose relative order is reversed contributes
/// (-1)^{deg a * deg b}.
pub fn koszul_sign(p: &GradedPermutation) -> i32 {
    koszul_of(&p.images, &p.degrees)
}

pub fn koszul_of(images: &[usize], degrees: &[i32]) -> i32 {
    let mut odd = 0i64;
    for i in 0..images.len() {
        for j in i + 1..images.len() {
            if images[i] > images[j] {
                odd += (degrees[images[i]] as i64) * (degrees[images[j]] as i64);
            }
        }
    }
    parity(odd)
}

/// χ(σ) = (-1)^σ ε(σ).
pub fn chi(images: &[usize], degrees: &[i32]) -> i32 {
    sign_of(images) * koszul_of(images, degrees)
}

/// All (k, l)-unshuffles: permutations increasing on the first `k` slots and on the last `l`.
pub fn unshuffles(k: usize, l: usize) -> Vec<Vec<usize>> {
    block_unshuffles(&[k, l])
}

/// Unshuffles for an arbitrary block composition: increasing inside each block.
pub fn block_unshuffles(blocks: &[usize]) -> Vec<Vec<usize>> {
    let m: usize = blocks.iter().sum();
    let mut out = Vec::new();
    let mut assign = vec![usize::MAX; m];
    fill(blocks, 0, &mut assign, &mut out);
    out
}

fn fill(blocks: &[usize], b: usize, assign: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if b == blocks.len() {
        let mut images = Vec::with_capacity(assign.len());
        for blk in 0..blocks.len() {
            for (i, &a) in assign.iter().enumerate() {
                if a == blk {
                    images.push(i);
                }
            }
        }
        out.push(images);
        return;
    }
    let free: Vec<usize> = (0..assign.len()).filter(|&i| assign[i] == usize::MAX).collect();
    for subset in subsets(&free, blocks[b]) {
        for &i in &subset {
            assign[i] = b;
        }
        fill(blocks, b + 1, assign, out);
        for &i in &subset {
            assign[i] = usize::MAX;
        }
    }
}

/// k-element subsets of `items` in lexicographic order.
pub fn subsets(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn go(items: &[usize], k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..items.len() {
            if items.len() - i < k - cur.len() {
                break;
            }
            cur.push(items[i]);
            go(items, k, i + 1, cur, out);
            cur.pop();
        }
    }
    go(items, k, 0, &mut cur, &mut out);
    out
}

/// Compositions of `m` into `t` positive parts.
pub fn compositions(m: usize, t: usize) -> Vec<Vec<usize>> {
    if t == 0 {
        return if m == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 1..=m.saturating_sub(t - 1) {
        for mut rest in compositions(m - first, t - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc = 1u64;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// (-1)^k as ±1.
pub fn neg_one_pow(k: i64) -> i32 {
    parity(k)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sign_examples() {
        assert_eq!(perm_sign(&GradedPermutation::new(vec![0, 1, 2], vec![0; 3])), 1);
        assert_eq!(perm_sign(&GradedPermutation::new(vec![1, 0], vec![0; 2])), -1);
        assert_eq!(perm_sign(&GradedPermutation::new(vec![1, 2, 0], vec![0; 3])), 1);
    }

    #[test]
    fn koszul_examples() {
        assert_eq!(koszul_sign(&GradedPermutation::new(vec![1, 0], vec![0, 0])), 1);
        assert_eq!(koszul_sign(&GradedPermutation::new(vec![1, 0], vec![1, 1])), -1);
        assert_eq!(koszul_sign(&GradedPermutation::new(vec![2, 1, 0], vec![1, 1, 1])), -1);
    }

    #[test]
    fn unshuffle_counts() {
        assert_eq!(unshuffles(1, 1).len(), 2);
        assert_eq!(unshuffles(2, 1).len(), 3);
        assert_eq!(unshuffles(3, 2).len(), 10);
        assert_eq!(unshuffles(0, 3), vec![vec![0, 1, 2]]);
        assert_eq!(block_unshuffles(&[1, 1, 1]).len(), 6);
    }

    #[test]
    fn compositions_small() {
        assert_eq!(compositions(3, 2), vec![vec![1, 2], vec![2, 1]]);
        assert_eq!(compositions(2, 3), Vec::<Vec<usize>>::new());
    }
}
