//! Affine forms and sums of products of affine forms over the seven program
//! variables, with interval bounds over boxes.

/// Number of variable slots: `a, b, c, d, α, β₀, β₁`.
pub const NV: usize = 7;

/// Closed interval `[lo, hi]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn point(x: f64) -> Self {
        Self { lo: x, hi: x }
    }

    fn mul(self, o: Self) -> Self {
        let p = [self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi];
        Self {
            lo: p.iter().copied().fold(f64::INFINITY, f64::min),
            hi: p.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        }
    }

    fn square(self) -> Self {
        let (a, b) = (self.lo.abs(), self.hi.abs());
        let hi = a.max(b).powi(2);
        let lo = if self.lo <= 0.0 && self.hi >= 0.0 { 0.0 } else { a.min(b).powi(2) };
        Self { lo, hi }
    }

    fn scale(self, w: f64) -> Self {
        if w >= 0.0 {
            Self::new(self.lo * w, self.hi * w)
        } else {
            Self::new(self.hi * w, self.lo * w)
        }
    }

    fn add(self, o: Self) -> Self {
        Self::new(self.lo + o.lo, self.hi + o.hi)
    }

    fn abs_max(self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }
}

/// `c0 + Σ c[j]·x[j]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Affine {
    pub c0: f64,
    pub c: [f64; NV],
}

impl Affine {
    pub fn constant(c0: f64) -> Self {
        Self { c0, c: [0.0; NV] }
    }

    /// Builds from `(slot, coefficient)` pairs.
    pub fn of(c0: f64, terms: &[(usize, f64)]) -> Self {
        let mut c = [0.0; NV];
        for &(j, w) in terms {
            c[j] += w;
        }
        Self { c0, c }
    }

    pub fn eval(&self, x: &[f64; NV]) -> f64 {
        self.c0 + self.c.iter().zip(x).map(|(c, x)| c * x).sum::<f64>()
    }

    /// Exact range over a box.
    pub fn range(&self, bx: &[Interval; NV]) -> Interval {
        let mut r = Interval::point(self.c0);
        for (c, iv) in self.c.iter().zip(bx) {
            if *c != 0.0 {
                r = r.add(iv.scale(*c));
            }
        }
        r
    }

    pub fn depends_on(&self, j: usize) -> bool {
        self.c[j] != 0.0
    }

    /// Euclidean norm of the gradient.
    pub fn grad_norm(&self) -> f64 {
        self.c.iter().map(|c| c * c).sum::<f64>().sqrt()
    }
}

/// `w·A` or `w·A·B`.
#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    pub w: f64,
    pub a: Affine,
    pub b: Option<Affine>,
}

/// Sum of [`Term`]s; every constraint and objective piece is one of these.
#[derive(Clone, Debug, PartialEq)]
pub struct Expr {
    pub terms: Vec<Term>,
}

impl Expr {
    pub fn affine(a: Affine) -> Self {
        Self {
            terms: vec![Term { w: 1.0, a, b: None }],
        }
    }

    pub fn product(w: f64, a: Affine, b: Affine) -> Self {
        Self {
            terms: vec![Term { w, a, b: Some(b) }],
        }
    }

    pub fn plus(mut self, other: Expr) -> Self {
        self.terms.extend(other.terms);
        self
    }

    /// The affine form, if the expression has a single linear term.
    pub fn as_affine(&self) -> Option<Affine> {
        match self.terms.as_slice() {
            [Term { w, a, b: None }] => {
                let mut a = *a;
                a.c0 *= w;
                a.c.iter_mut().for_each(|c| *c *= w);
                Some(a)
            }
            _ => None,
        }
    }

    pub fn eval(&self, x: &[f64; NV]) -> f64 {
        self.terms
            .iter()
            .map(|t| t.w * t.a.eval(x) * t.b.map_or(1.0, |b| b.eval(x)))
            .sum()
    }

    pub fn depends_on(&self, j: usize) -> bool {
        self.terms
            .iter()
            .any(|t| t.a.depends_on(j) || t.b.is_some_and(|b| b.depends_on(j)))
    }

    /// Natural interval extension.
    fn naive_range(&self, bx: &[Interval; NV]) -> Interval {
        let mut r = Interval::point(0.0);
        for t in &self.terms {
            let ra = t.a.range(bx);
            let v = match t.b {
                None => ra,
                Some(b) if b == t.a => ra.square(),
                Some(b) => ra.mul(b.range(bx)),
            };
            r = r.add(v.scale(t.w));
        }
        r
    }

    /// Interval enclosure of each partial derivative over a box.
    pub fn gradient_range(&self, bx: &[Interval; NV]) -> [Interval; NV] {
        let mut g = [Interval::point(0.0); NV];
        for t in &self.terms {
            match t.b {
                None => {
                    for (gj, c) in g.iter_mut().zip(t.a.c) {
                        *gj = gj.add(Interval::point(t.w * c));
                    }
                }
                Some(b) => {
                    // ∂(A·B) = A·∂B + B·∂A
                    let (ra, rb) = (t.a.range(bx), b.range(bx));
                    for j in 0..NV {
                        let d = ra.scale(b.c[j]).add(rb.scale(t.a.c[j]));
                        g[j] = g[j].add(d.scale(t.w));
                    }
                }
            }
        }
        g
    }

    /// Enclosure of the range over a box: the tighter of the natural
    /// interval extension and the mean-value form around the box centre.
    pub fn range(&self, bx: &[Interval; NV]) -> Interval {
        let naive = self.naive_range(bx);
        if self.terms.iter().all(|t| t.b.is_none()) {
            return naive;
        }
        let mut mid = [0.0; NV];
        for (m, iv) in mid.iter_mut().zip(bx) {
            *m = 0.5 * (iv.lo + iv.hi);
        }
        let grad = self.gradient_range(bx);
        let spread: f64 = grad
            .iter()
            .zip(bx)
            .map(|(g, iv)| g.abs_max() * 0.5 * (iv.hi - iv.lo))
            .sum();
        let fm = self.eval(&mid);
        Interval::new(naive.lo.max(fm - spread), naive.hi.min(fm + spread))
    }

    /// Bound on the Euclidean gradient norm over a box.
    pub fn lipschitz(&self, bx: &[Interval; NV]) -> f64 {
        self.gradient_range(bx)
            .iter()
            .map(|g| g.abs_max().powi(2))
            .sum::<f64>()
            .sqrt()
    }
}
