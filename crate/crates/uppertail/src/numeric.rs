//! Small numeric helpers shared across modules: compensated summation,
//! log-space combination of probabilities, subset iteration.

/// Kahan compensated accumulator. The parameter sweeps compare floating-point
/// sums against exact oracles at 1e-12, which plain left-to-right summation
/// does not reliably deliver on longer edge lists.
#[derive(Clone, Copy, Debug, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let y = x - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum
    }
}

/// log(exp(a) + exp(b)) without leaving log space.
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    if a > b {
        a + f64::ln_1p((b - a).exp())
    } else {
        b + f64::ln_1p((a - b).exp())
    }
}

/// log of a sum of terms given in log space.
pub fn log_sum_exp(terms: &[f64]) -> f64 {
    terms.iter().fold(f64::NEG_INFINITY, |acc, &t| log_add_exp(acc, t))
}

/// Falling factorial n * (n-1) * ... * (n-m+1) as u128. Returns 0 when m > n.
pub fn falling_factorial(n: u128, m: u128) -> u128 {
    if m > n {
        return 0;
    }
    let mut out: u128 = 1;
    for i in 0..m {
        out = out.checked_mul(n - i).expect("falling factorial overflow");
    }
    out
}

/// Binomial coefficient as u128; saturates on overflow (never hit at desk scale).
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut num: u128 = 1;
    for i in 0..k {
        num = num * (n - i) as u128 / (i + 1) as u128;
    }
    num
}

/// Visit every `j`-element subset of `items` in lexicographic order.
pub fn for_each_subset<T: Copy>(items: &[T], j: usize, mut visit: impl FnMut(&[T])) {
    if j == 0 || j > items.len() {
        return;
    }
    let mut idx: Vec<usize> = (0..j).collect();
    let mut buf: Vec<T> = idx.iter().map(|&i| items[i]).collect();
    loop {
        visit(&buf);
        // advance the combination
        let mut i = j;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != i + items.len() - j {
                break;
            }
            if i == 0 {
                return;
            }
        }
        idx[i] += 1;
        for t in i + 1..j {
            idx[t] = idx[t - 1] + 1;
        }
        for t in i..j {
            buf[t] = items[idx[t]];
        }
    }
}

/// Collect all `j`-element subsets of `items`.
pub fn subsets<T: Copy>(items: &[T], j: usize) -> Vec<Vec<T>> {
    let mut out = Vec::new();
    for_each_subset(items, j, |s| out.push(s.to_vec()));
    out
}
