//! Trajectory accumulators, standard errors and the grouped jackknife.

/// Running sums of every component at every record time.
#[derive(Clone, Debug)]
pub struct Accumulator {
    pub records: usize,
    pub comps: usize,
    pub count: Vec<u64>,
    pub sum: Vec<f64>,
    pub sumsq: Vec<f64>,
}

impl Accumulator {
    pub fn new(records: usize, comps: usize) -> Self {
        Accumulator {
            records,
            comps,
            count: vec![0; records],
            sum: vec![0.0; records * comps],
            sumsq: vec![0.0; records * comps],
        }
    }

    pub fn add(&mut self, record: usize, values: &[f64]) {
        debug_assert_eq!(values.len(), self.comps);
        self.count[record] += 1;
        let o = record * self.comps;
        for (c, v) in values.iter().enumerate() {
            self.sum[o + c] += v;
            self.sumsq[o + c] += v * v;
        }
    }

    pub fn merge(&mut self, other: &Accumulator) {
        for (a, b) in self.count.iter_mut().zip(&other.count) {
            *a += b;
        }
        for (a, b) in self.sum.iter_mut().zip(&other.sum) {
            *a += b;
        }
        for (a, b) in self.sumsq.iter_mut().zip(&other.sumsq) {
            *a += b;
        }
    }

    pub fn mean(&self, record: usize, comp: usize) -> f64 {
        self.sum[record * self.comps + comp] / self.count[record] as f64
    }

    /// Standard error of the mean.
    pub fn stderr(&self, record: usize, comp: usize) -> f64 {
        let n = self.count[record] as f64;
        if n < 2.0 {
            return f64::NAN;
        }
        let m = self.mean(record, comp);
        let var = (self.sumsq[record * self.comps + comp] / n - m * m).max(0.0) * n / (n - 1.0);
        (var / n).sqrt()
    }

    pub fn means(&self, record: usize) -> Vec<f64> {
        (0..self.comps).map(|c| self.mean(record, c)).collect()
    }
}

/// Largest number of jackknife groups.
pub const MAX_GROUPS: usize = 64;

/// Merges consecutive chunk accumulators into at most [`MAX_GROUPS`] groups.
pub fn group(chunks: &[Accumulator]) -> Vec<Accumulator> {
    if chunks.is_empty() {
        return Vec::new();
    }
    let g = chunks.len().min(MAX_GROUPS);
    let mut out = Vec::with_capacity(g);
    for i in 0..g {
        let (lo, hi) = (i * chunks.len() / g, (i + 1) * chunks.len() / g);
        let mut a = chunks[lo].clone();
        for c in &chunks[lo + 1..hi] {
            a.merge(c);
        }
        out.push(a);
    }
    out
}

/// Delete-one-group jackknife of `f(means)` at one record. Returns the
/// full-sample estimate and its standard error.
pub fn jackknife<F: Fn(&[f64]) -> f64>(total: &Accumulator, groups: &[Accumulator], record: usize, f: F) -> (f64, f64) {
    let est = f(&total.means(record));
    let g = groups.len();
    if g < 2 {
        return (est, f64::NAN);
    }
    let comps = total.comps;
    let o = record * comps;
    let mut vals = Vec::with_capacity(g);
    let mut m = vec![0.0; comps];
    for gr in groups {
        let n = (total.count[record] - gr.count[record]) as f64;
        if n <= 0.0 {
            continue;
        }
        for c in 0..comps {
            m[c] = (total.sum[o + c] - gr.sum[o + c]) / n;
        }
        vals.push(f(&m));
    }
    let k = vals.len() as f64;
    if k < 2.0 {
        return (est, f64::NAN);
    }
    let mean = vals.iter().sum::<f64>() / k;
    let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() * (k - 1.0) / k;
    (est, var.sqrt())
}
