use serde::Serialize;

/// One row of `run` output.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunRecord {
    pub run_id: u64,
    pub algorithm: &'static str,
    pub n: usize,
    pub k: usize,
    pub eps: Option<f64>,
    #[serde(rename = "T")]
    pub t: Option<usize>,
    pub seed: u64,
    pub value: f64,
    pub opt_value: Option<f64>,
    pub ratio: Option<f64>,
    pub queries: u64,
    pub peak_buffer: Option<usize>,
    pub wall_ms: Option<f64>,
}

pub const HEADER: &str =
    "run_id,algorithm,n,k,eps,T,seed,value,opt_value,ratio,queries,peak_buffer,wall_ms";

/// `value / opt` when the optimum is positive.
pub fn ratio(value: f64, opt: Option<f64>) -> Option<f64> {
    opt.filter(|&o| o > 0.0).map(|o| value / o)
}

/// Twelve significant digits, trailing zeros trimmed.
pub fn sig12(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let mag = x.abs().log10().floor() as i32;
    let decimals = (11 - mag).max(0) as usize;
    let s = format!("{x:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn opt<T>(v: Option<T>, f: impl Fn(T) -> String) -> String {
    v.map(f).unwrap_or_else(|| "NA".into())
}

impl RunRecord {
    pub fn csv_row(&self) -> String {
        [
            self.run_id.to_string(),
            self.algorithm.to_string(),
            self.n.to_string(),
            self.k.to_string(),
            opt(self.eps, sig12),
            opt(self.t, |t| t.to_string()),
            self.seed.to_string(),
            sig12(self.value),
            opt(self.opt_value, sig12),
            opt(self.ratio, sig12),
            self.queries.to_string(),
            opt(self.peak_buffer, |p| p.to_string()),
            opt(self.wall_ms, sig12),
        ]
        .join(",")
    }
}
