//! Regions of the real line, weighted measures `ω(x) dx`, and the adaptive
//! Gauss quadrature behind every pairing `⟨φ, ψ⟩ = ∫ φ ψ ω dx`.
//!
//! Unbounded pieces are mapped onto a bounded cell with `x = a + u/(1-u)` and
//! truncated where the weight underflows. Endpoint power-law singularities
//! (Laguerre `x^α`, Jacobi `(1∓x)^{a,b}`) are smoothed with a graded
//! substitution `x = a + h·t^m`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};

/// Default absolute tolerance for pairings.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Maximum bisection depth of the adaptive integrator.
pub const MAX_DEPTH: u32 = 40;

const MAX_CELLS: usize = 200_000;
const CELL_ORDER: usize = 20;

/// Open interval `(lo, hi)` with endpoints in the extended reals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Interval { lo, hi }
    }

    pub fn is_bounded(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo < x && x < self.hi
    }
}

/// A finite union of disjoint open intervals, kept sorted and merged.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Region {
    intervals: Vec<Interval>,
}

impl Region {
    pub fn empty() -> Self {
        Region::default()
    }

    pub fn interval(lo: f64, hi: f64) -> Self {
        Region::from_intervals([Interval::new(lo, hi)])
    }

    pub fn real_line() -> Self {
        Region::interval(f64::NEG_INFINITY, f64::INFINITY)
    }

    /// `(-∞, s)`.
    pub fn below(s: f64) -> Self {
        Region::interval(f64::NEG_INFINITY, s)
    }

    /// Builds a region from arbitrary intervals, dropping empty ones and
    /// merging overlapping or touching neighbours.
    pub fn from_intervals<I: IntoIterator<Item = Interval>>(iter: I) -> Self {
        let mut v: Vec<Interval> = iter
            .into_iter()
            .filter(|iv| iv.lo < iv.hi && !iv.lo.is_nan() && !iv.hi.is_nan())
            .collect();
        v.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        let mut merged: Vec<Interval> = Vec::with_capacity(v.len());
        for iv in v {
            match merged.last_mut() {
                Some(last) if iv.lo <= last.hi => last.hi = last.hi.max(iv.hi),
                _ => merged.push(iv),
            }
        }
        Region { intervals: merged }
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn contains(&self, x: f64) -> bool {
        self.intervals.iter().any(|iv| iv.contains(x))
    }

    pub fn is_bounded(&self) -> bool {
        self.intervals.iter().all(Interval::is_bounded)
    }

    /// Smallest interval containing the region.
    pub fn hull(&self) -> Option<Interval> {
        Some(Interval::new(
            self.intervals.first()?.lo,
            self.intervals.last()?.hi,
        ))
    }

    pub fn union(&self, other: &Region) -> Region {
        Region::from_intervals(self.intervals.iter().chain(&other.intervals).copied())
    }

    pub fn intersect(&self, other: &Region) -> Region {
        let mut out = Vec::new();
        for a in &self.intervals {
            for b in &other.intervals {
                let lo = a.lo.max(b.lo);
                let hi = a.hi.min(b.hi);
                if lo < hi {
                    out.push(Interval::new(lo, hi));
                }
            }
        }
        Region::from_intervals(out)
    }

    /// `self ∖ other` (boundary points are immaterial for absolutely
    /// continuous measures).
    pub fn difference(&self, other: &Region) -> Region {
        let mut pieces = self.intervals.clone();
        for cut in &other.intervals {
            let mut next = Vec::with_capacity(pieces.len() + 1);
            for p in pieces {
                if cut.hi <= p.lo || cut.lo >= p.hi {
                    next.push(p);
                    continue;
                }
                if cut.lo > p.lo {
                    next.push(Interval::new(p.lo, cut.lo));
                }
                if cut.hi < p.hi {
                    next.push(Interval::new(cut.hi, p.hi));
                }
            }
            pieces = next;
        }
        Region::from_intervals(pieces)
    }

    /// Total Lebesgue length (may be infinite).
    pub fn length(&self) -> f64 {
        self.intervals.iter().map(|iv| iv.hi - iv.lo).sum()
    }
}

fn fmt_endpoint(x: f64) -> String {
    if x == f64::INFINITY {
        "inf".into()
    } else if x == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{x}")
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "empty");
        }
        let parts: Vec<String> = self
            .intervals
            .iter()
            .map(|iv| format!("({},{})", fmt_endpoint(iv.lo), fmt_endpoint(iv.hi)))
            .collect();
        write!(f, "{}", parts.join("u"))
    }
}

pub(crate) fn parse_endpoint(s: &str) -> Result<f64> {
    let t = s.trim();
    match t.to_ascii_lowercase().as_str() {
        "inf" | "+inf" | "infinity" | "+infinity" => Ok(f64::INFINITY),
        "-inf" | "-infinity" => Ok(f64::NEG_INFINITY),
        _ => t
            .parse::<f64>()
            .map_err(|_| Error::Parse(format!("bad interval endpoint {t:?}"))),
    }
}

/// Grammar: `(a,b)u(c,d)...`, endpoints are reals or `inf`/`-inf`; `empty`
/// (or the empty string) is the empty region. Square brackets are accepted
/// and treated like parentheses.
impl FromStr for Region {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() || s.eq_ignore_ascii_case("empty") || s == "∅" {
            return Ok(Region::empty());
        }
        let mut out = Vec::new();
        let mut rest = s;
        loop {
            rest = rest.trim_start();
            let open = rest
                .chars()
                .next()
                .ok_or_else(|| Error::Parse(format!("unexpected end of region {s:?}")))?;
            if open != '(' && open != '[' {
                return Err(Error::Parse(format!("expected '(' in region {s:?}")));
            }
            let close = rest
                .find([')', ']'])
                .ok_or_else(|| Error::Parse(format!("unterminated interval in {s:?}")))?;
            let body = &rest[1..close];
            let (lo, hi) = body
                .split_once(',')
                .ok_or_else(|| Error::Parse(format!("missing ',' in interval {body:?}")))?;
            let (lo, hi) = (parse_endpoint(lo)?, parse_endpoint(hi)?);
            if !(lo < hi) {
                return Err(Error::Parse(format!("empty interval ({lo},{hi})")));
            }
            out.push(Interval::new(lo, hi));
            rest = rest[close + 1..].trim_start();
            if rest.is_empty() {
                break;
            }
            rest = rest
                .strip_prefix('u')
                .or_else(|| rest.strip_prefix('U'))
                .or_else(|| rest.strip_prefix('∪'))
                .ok_or_else(|| Error::Parse(format!("expected 'u' between intervals in {s:?}")))?;
        }
        Ok(Region::from_intervals(out))
    }
}

/// How fast the weight decays along unbounded directions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailDecay {
    CompactlySupported,
    /// At least as fast as `e^{-|x|}`.
    Exponential,
    /// At least as fast as `e^{-x²}`.
    SubGaussian,
}

/// Nonnegative weight function `ω`.
#[derive(Clone)]
pub enum Weight {
    Lebesgue,
    /// `x^α e^{-x}` on `(0, ∞)`.
    Laguerre { alpha: f64 },
    /// `(1-x)^a (1+x)^b` on `(-1, 1)`.
    Jacobi { a: f64, b: f64 },
    /// `e^{-x²}` on the real line.
    Hermite,
    /// User-supplied weight.
    Custom {
        name: String,
        f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
        decay: TailDecay,
        /// `(location, exponent)` of power-law endpoint behaviour.
        singular_endpoints: Vec<(f64, f64)>,
    },
}

impl fmt::Debug for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Weight({self})")
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Weight::Lebesgue => write!(f, "lebesgue"),
            Weight::Laguerre { alpha } => write!(f, "laguerre:{alpha}"),
            Weight::Jacobi { a, b } => write!(f, "jacobi:{a},{b}"),
            Weight::Hermite => write!(f, "hermite"),
            Weight::Custom { name, .. } => write!(f, "custom:{name}"),
        }
    }
}

impl Weight {
    pub fn custom<F>(name: &str, decay: TailDecay, f: F) -> Weight
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Weight::Custom {
            name: name.to_string(),
            f: Arc::new(f),
            decay,
            singular_endpoints: Vec::new(),
        }
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Weight::Lebesgue => 1.0,
            Weight::Laguerre { alpha } => {
                if *alpha == 0.0 {
                    (-x).exp()
                } else {
                    x.powf(*alpha) * (-x).exp()
                }
            }
            Weight::Jacobi { a, b } => {
                let l = if *a == 0.0 { 1.0 } else { (1.0 - x).powf(*a) };
                let r = if *b == 0.0 { 1.0 } else { (1.0 + x).powf(*b) };
                l * r
            }
            Weight::Hermite => (-x * x).exp(),
            Weight::Custom { f, .. } => f(x),
        }
    }

    /// `ω(x)` where `x` lies at exact distance `dist` from `anchor`; keeps
    /// endpoint power laws accurate when `x` rounds onto the endpoint.
    #[inline]
    fn eval_anchored(&self, x: f64, anchor: f64, dist: f64) -> f64 {
        match self {
            Weight::Laguerre { alpha } if anchor == 0.0 && *alpha != 0.0 => {
                dist.powf(*alpha) * (-x).exp()
            }
            Weight::Jacobi { a, b } if anchor == 1.0 => dist.powf(*a) * (2.0 - dist).powf(*b),
            Weight::Jacobi { a, b } if anchor == -1.0 => (2.0 - dist).powf(*a) * dist.powf(*b),
            _ => self.eval(x),
        }
    }

    /// Support on which the classical weights are defined.
    pub fn natural_support(&self) -> Region {
        match self {
            Weight::Laguerre { .. } => Region::interval(0.0, f64::INFINITY),
            Weight::Jacobi { .. } => Region::interval(-1.0, 1.0),
            _ => Region::real_line(),
        }
    }

    pub fn tail_decay(&self) -> Option<TailDecay> {
        match self {
            Weight::Lebesgue => None,
            Weight::Laguerre { .. } => Some(TailDecay::Exponential),
            Weight::Jacobi { .. } => Some(TailDecay::CompactlySupported),
            Weight::Hermite => Some(TailDecay::SubGaussian),
            Weight::Custom { decay, .. } => Some(*decay),
        }
    }

    /// Endpoints where the weight behaves like `|x - c|^γ` with `γ` not a
    /// nonnegative integer.
    fn singular_endpoints(&self) -> Vec<(f64, f64)> {
        let frac = |g: f64| !(g >= 0.0 && g.fract() == 0.0);
        match self {
            Weight::Laguerre { alpha } if frac(*alpha) => vec![(0.0, *alpha)],
            Weight::Jacobi { a, b } => {
                let mut v = Vec::new();
                if frac(*b) {
                    v.push((-1.0, *b));
                }
                if frac(*a) {
                    v.push((1.0, *a));
                }
                v
            }
            Weight::Custom {
                singular_endpoints, ..
            } => singular_endpoints.clone(),
            _ => Vec::new(),
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            Weight::Laguerre { alpha } if !(*alpha > -1.0) => Err(Error::InvalidParameter(
                format!("laguerre alpha must exceed -1, got {alpha}"),
            )),
            Weight::Jacobi { a, b } if !(*a > -1.0 && *b > -1.0) => Err(Error::InvalidParameter(
                format!("jacobi parameters must exceed -1, got ({a}, {b})"),
            )),
            _ => Ok(()),
        }
    }
}

/// Grammar: `laguerre:ALPHA`, `jacobi:A,B`, `hermite`, `lebesgue`.
impl FromStr for Weight {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, params) = s.split_once(':').unwrap_or((s, ""));
        let nums = || -> Result<Vec<f64>> {
            params
                .split(',')
                .filter(|p| !p.trim().is_empty())
                .map(|p| {
                    p.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::Parse(format!("bad weight parameter {p:?}")))
                })
                .collect()
        };
        let w = match name.to_ascii_lowercase().as_str() {
            "laguerre" => match nums()?.as_slice() {
                [] => Weight::Laguerre { alpha: 0.0 },
                [alpha] => Weight::Laguerre { alpha: *alpha },
                _ => return Err(Error::Parse("laguerre takes one parameter".into())),
            },
            "jacobi" => match nums()?.as_slice() {
                [a, b] => Weight::Jacobi { a: *a, b: *b },
                _ => return Err(Error::Parse("jacobi takes two parameters a,b".into())),
            },
            "hermite" => Weight::Hermite,
            "lebesgue" => Weight::Lebesgue,
            other => return Err(Error::Parse(format!("unknown weight {other:?}"))),
        };
        w.validate()?;
        Ok(w)
    }
}

/// Nodes and positive weights for `Σ wᵢ f(xᵢ) ≈ ∫ f`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub target: Region,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    /// Affine image of a rule on `(-1, 1)` onto `(a, b)`.
    pub fn mapped(&self, a: f64, b: f64) -> QuadratureRule {
        let h = 0.5 * (b - a);
        let c = 0.5 * (a + b);
        QuadratureRule {
            nodes: self.nodes.iter().map(|&t| c + h * t).collect(),
            weights: self.weights.iter().map(|&w| h * w).collect(),
            target: Region::interval(a, b),
        }
    }
}

/// Gauss–Legendre rule of the given order on `(-1, 1)`.
pub fn gauss_legendre(order: usize) -> Result<QuadratureRule> {
    if !(1..=512).contains(&order) {
        return Err(Error::OrderOutOfRange(order));
    }
    let n = order;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                let (_, d) = legendre_with_derivative(n, x);
                dp = d;
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Ok(QuadratureRule {
        nodes,
        weights,
        target: Region::interval(-1.0, 1.0),
    })
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

fn cell_rule() -> &'static QuadratureRule {
    static RULE: OnceLock<QuadratureRule> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(CELL_ORDER).expect("valid order"))
}

/// Maps the unit cell `t ∈ (0,1)` onto one support piece.
#[derive(Debug, Clone, Copy)]
enum Map {
    /// `x = a + h·t^m` (h may be negative: grading towards the right end).
    Graded { a: f64, h: f64, m: i32 },
    /// `v = vmax·t^m`, `x = a + dir·v/(1-v)`.
    Tail { a: f64, dir: f64, vmax: f64, m: i32 },
}

impl Map {
    /// Returns `(x, dx/dt, |x − anchor|, anchor)`; the distance is exact even
    /// when `x` itself rounds onto the anchor.
    #[inline]
    fn apply(&self, t: f64) -> (f64, f64, f64, f64) {
        match *self {
            Map::Graded { a, h, m } => {
                let (d, jac) = if m == 1 {
                    (h.abs() * t, h.abs())
                } else {
                    let tm1 = t.powi(m - 1);
                    (h.abs() * tm1 * t, h.abs() * m as f64 * tm1)
                };
                (a + h.signum() * d, jac, d, a)
            }
            Map::Tail { a, dir, vmax, m } => {
                let (v, dv) = if m == 1 {
                    (vmax * t, vmax)
                } else {
                    let tm1 = t.powi(m - 1);
                    (vmax * tm1 * t, vmax * m as f64 * tm1)
                };
                let r = 1.0 - v;
                let d = v / r;
                (a + dir * d, dv / (r * r), d, a)
            }
        }
    }
}

fn grading_exponent(gamma: f64) -> i32 {
    ((4.0 / (gamma + 1.0)).ceil() as i32).clamp(1, 24)
}

/// Weighted measure `ω(x) dx` restricted to a region.
#[derive(Debug, Clone)]
pub struct Measure {
    support: Region,
    weight: Weight,
    tail: TailDecay,
}

impl Measure {
    pub fn new(support: Region, weight: Weight) -> Result<Self> {
        weight.validate()?;
        let tail = if support.is_bounded() {
            TailDecay::CompactlySupported
        } else {
            match weight.tail_decay() {
                Some(TailDecay::CompactlySupported) => TailDecay::CompactlySupported,
                Some(t) => t,
                None => {
                    return Err(Error::InvalidParameter(format!(
                        "weight {weight} has no finite moments on unbounded support {support}"
                    )))
                }
            }
        };
        Ok(Measure {
            support,
            weight,
            tail,
        })
    }

    /// Weight on its natural support.
    pub fn classical(weight: Weight) -> Result<Self> {
        let support = weight.natural_support();
        Measure::new(support, weight)
    }

    pub fn laguerre(alpha: f64) -> Result<Self> {
        Measure::classical(Weight::Laguerre { alpha })
    }

    pub fn jacobi(a: f64, b: f64) -> Result<Self> {
        Measure::classical(Weight::Jacobi { a, b })
    }

    pub fn hermite() -> Self {
        Measure::classical(Weight::Hermite).expect("hermite is valid")
    }

    pub fn lebesgue(support: Region) -> Result<Self> {
        Measure::new(support, Weight::Lebesgue)
    }

    pub fn support(&self) -> &Region {
        &self.support
    }

    pub fn weight(&self) -> &Weight {
        &self.weight
    }

    pub fn tail_decay(&self) -> TailDecay {
        self.tail
    }

    /// True when this is a classical weight on its whole natural support.
    pub fn is_classical_full(&self) -> bool {
        !matches!(self.weight, Weight::Lebesgue | Weight::Custom { .. })
            && self.support == self.weight.natural_support()
    }

    /// Same weight on `support ∖ excluded`.
    pub fn restrict(&self, excluded: &Region) -> Result<Measure> {
        let support = self.support.difference(excluded);
        if support.is_empty() {
            return Err(Error::EmptyRestrictedSupport);
        }
        Ok(Measure {
            tail: if support.is_bounded() {
                TailDecay::CompactlySupported
            } else {
                self.tail
            },
            support,
            weight: self.weight.clone(),
        })
    }

    /// Same weight on `support ∩ region` (possibly empty).
    pub fn on(&self, region: &Region) -> Measure {
        let support = self.support.intersect(region);
        Measure {
            tail: if support.is_bounded() {
                TailDecay::CompactlySupported
            } else {
                self.tail
            },
            support,
            weight: self.weight.clone(),
        }
    }

    /// Same support, weight replaced (used for gauge changes).
    pub fn with_weight(&self, weight: Weight) -> Result<Measure> {
        Measure::new(self.support.clone(), weight)
    }

    /// Density of the measure w.r.t. Lebesgue measure (zero off support).
    pub fn density(&self, x: f64) -> f64 {
        if self.support.contains(x) {
            self.weight.eval(x)
        } else {
            0.0
        }
    }

    fn cutoff(&self, a: f64, dir: f64) -> f64 {
        // Distance from the finite end `a` to where the weight underflows.
        let reach = match self.tail {
            TailDecay::SubGaussian => 30.0,
            _ => 760.0,
        };
        let far = (dir * a).max(0.0) + reach;
        (far - dir * a).max(1.0)
    }

    fn maps(&self) -> Vec<Map> {
        let sing = self.weight.singular_endpoints();
        let exp_at = |c: f64| -> Option<f64> {
            sing.iter()
                .find(|(loc, _)| (loc - c).abs() <= 1e-14 * (1.0 + c.abs()))
                .map(|&(_, g)| g)
        };
        let mut maps = Vec::new();
        for iv in self.support.intervals() {
            match (iv.lo.is_finite(), iv.hi.is_finite()) {
                (true, true) => {
                    let (l, r) = (exp_at(iv.lo), exp_at(iv.hi));
                    let h = iv.hi - iv.lo;
                    match (l, r) {
                        (None, None) => maps.push(Map::Graded { a: iv.lo, h, m: 1 }),
                        (Some(g), None) => maps.push(Map::Graded {
                            a: iv.lo,
                            h,
                            m: grading_exponent(g),
                        }),
                        (None, Some(g)) => maps.push(Map::Graded {
                            a: iv.hi,
                            h: -h,
                            m: grading_exponent(g),
                        }),
                        (Some(gl), Some(gr)) => {
                            maps.push(Map::Graded {
                                a: iv.lo,
                                h: 0.5 * h,
                                m: grading_exponent(gl),
                            });
                            maps.push(Map::Graded {
                                a: iv.hi,
                                h: -0.5 * h,
                                m: grading_exponent(gr),
                            });
                        }
                    }
                }
                (true, false) => {
                    let len = self.cutoff(iv.lo, 1.0);
                    maps.push(Map::Tail {
                        a: iv.lo,
                        dir: 1.0,
                        vmax: len / (1.0 + len),
                        m: exp_at(iv.lo).map_or(1, grading_exponent),
                    });
                }
                (false, true) => {
                    let len = self.cutoff(iv.hi, -1.0);
                    maps.push(Map::Tail {
                        a: iv.hi,
                        dir: -1.0,
                        vmax: len / (1.0 + len),
                        m: exp_at(iv.hi).map_or(1, grading_exponent),
                    });
                }
                (false, false) => {
                    let len = self.cutoff(0.0, 1.0);
                    let vmax = len / (1.0 + len);
                    maps.push(Map::Tail {
                        a: 0.0,
                        dir: -1.0,
                        vmax,
                        m: 1,
                    });
                    maps.push(Map::Tail {
                        a: 0.0,
                        dir: 1.0,
                        vmax,
                        m: 1,
                    });
                }
            }
        }
        maps
    }

    /// `∫ f ω dx` over the support with absolute error at most `tol`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, tol: f64) -> Result<f64> {
        let v = self.integrate_vec(1, |x, out| out[0] = f(x), tol)?;
        Ok(v[0])
    }

    /// Vector-valued version of [`Measure::integrate`]; the error bound holds
    /// componentwise (max norm).
    pub fn integrate_vec<F>(&self, dim: usize, f: F, tol: f64) -> Result<Vec<f64>>
    where
        F: Fn(f64, &mut [f64]),
    {
        if !(tol > 0.0) {
            return Err(Error::InvalidParameter(format!("tolerance must be positive, got {tol}")));
        }
        Ok(self.adaptive(dim, &f, tol)?.0)
    }

    /// Like [`Measure::integrate_vec`] but also returns the error estimate.
    pub fn integrate_with_error<F>(&self, dim: usize, f: F, tol: f64) -> Result<(Vec<f64>, f64)>
    where
        F: Fn(f64, &mut [f64]),
    {
        self.adaptive(dim, &f, tol)
    }

    fn adaptive<F>(&self, dim: usize, f: &F, tol: f64) -> Result<(Vec<f64>, f64)>
    where
        F: Fn(f64, &mut [f64]),
    {
        let maps = self.maps();
        let mut scratch = vec![0.0; dim];
        let mut heap = BinaryHeap::new();
        let done = vec![0.0; dim];
        let mut next_id = 0usize;
        for (mi, map) in maps.iter().enumerate() {
            let start = match map {
                Map::Tail { .. } => 8,
                Map::Graded { .. } => 4,
            };
            for c in 0..start {
                let (lo, hi) = (c as f64 / start as f64, (c + 1) as f64 / start as f64);
                let cell = self.make_cell(mi, map, lo, hi, 0, dim, f, &mut scratch, next_id);
                next_id += 1;
                heap.push(cell);
            }
        }

        let total_err = |heap: &BinaryHeap<Cell>| -> f64 { heap.iter().map(|c| c.err).sum::<f64>() };
        let mut err = total_err(&heap);
        let mut count = heap.len();
        while err > tol {
            let Some(worst) = heap.pop() else { break };
            if !worst.err.is_finite() {
                return Err(self.diverged(&heap, &done, f64::INFINITY));
            }
            if worst.depth >= MAX_DEPTH || count >= MAX_CELLS {
                heap.push(worst);
                return Err(self.diverged(&heap, &done, err));
            }
            err -= worst.err;
            let mid = 0.5 * (worst.lo + worst.hi);
            let map = &maps[worst.map];
            for (lo, hi) in [(worst.lo, mid), (mid, worst.hi)] {
                let cell = self.make_cell(
                    worst.map,
                    map,
                    lo,
                    hi,
                    worst.depth + 1,
                    dim,
                    f,
                    &mut scratch,
                    next_id,
                );
                next_id += 1;
                err += cell.err;
                heap.push(cell);
            }
            count += 1;
            if count % 512 == 0 {
                err = total_err(&heap);
            }
        }
        // Deterministic summation order: by map and position.
        let mut cells: Vec<Cell> = heap.into_vec();
        cells.sort_by(|a, b| (a.map, a.lo).partial_cmp(&(b.map, b.lo)).unwrap_or(Ordering::Equal));
        let mut out = done;
        for c in &cells {
            for (o, v) in out.iter_mut().zip(&c.value) {
                *o += v;
            }
        }
        let err = cells.iter().map(|c| c.err).sum::<f64>();
        Ok((out, err))
    }

    fn diverged(&self, heap: &BinaryHeap<Cell>, done: &[f64], err: f64) -> Error {
        let estimate = done.first().copied().unwrap_or(0.0)
            + heap.iter().map(|c| c.value.first().copied().unwrap_or(0.0)).sum::<f64>();
        Error::IntegrationDiverged {
            estimate,
            error_bound: err,
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn make_cell<F>(
        &self,
        map_index: usize,
        map: &Map,
        lo: f64,
        hi: f64,
        depth: u32,
        dim: usize,
        f: &F,
        scratch: &mut [f64],
        id: usize,
    ) -> Cell
    where
        F: Fn(f64, &mut [f64]),
    {
        let whole = self.cell_sum(map, lo, hi, dim, f, scratch);
        let mid = 0.5 * (lo + hi);
        let left = self.cell_sum(map, lo, mid, dim, f, scratch);
        let right = self.cell_sum(map, mid, hi, dim, f, scratch);
        let mut err: f64 = 0.0;
        let value: Vec<f64> = left
            .iter()
            .zip(&right)
            .zip(&whole)
            .map(|((l, r), w)| {
                let s = l + r;
                let e = (s - w).abs();
                err = if e.is_nan() { f64::INFINITY } else { err.max(e) };
                s
            })
            .collect();
        Cell {
            map: map_index,
            lo,
            hi,
            depth,
            value,
            err,
            id,
        }
    }

    fn cell_sum<F>(&self, map: &Map, lo: f64, hi: f64, dim: usize, f: &F, buf: &mut [f64]) -> Vec<f64>
    where
        F: Fn(f64, &mut [f64]),
    {
        let rule = cell_rule();
        let h = 0.5 * (hi - lo);
        let c = 0.5 * (hi + lo);
        let mut acc = vec![0.0; dim];
        for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
            let (x, jac, dist, anchor) = map.apply(c + h * t);
            let om = self.weight.eval_anchored(x, anchor, dist) * jac;
            if om == 0.0 || !x.is_finite() {
                continue;
            }
            buf.iter_mut().for_each(|b| *b = 0.0);
            f(x, buf);
            let ww = w * h * om;
            for (a, b) in acc.iter_mut().zip(buf.iter()) {
                let term = ww * b;
                // Weight underflow in the far tail: contribution negligible.
                if !term.is_finite() && om < 1e-280 {
                    continue;
                }
                *a += term;
            }
        }
        acc
    }

    /// Gauss rule with one mapped panel of the given order per support piece;
    /// weights include `ω` and the substitution Jacobian.
    pub fn gauss_rule(&self, order: usize) -> Result<QuadratureRule> {
        self.composite_rule(1, order)
    }

    /// Composite Gauss rule: each mapped support piece is split into
    /// `panels` equal cells with an `order`-point rule in each.
    pub fn composite_rule(&self, panels: usize, order: usize) -> Result<QuadratureRule> {
        let base = gauss_legendre(order)?;
        let panels = panels.max(1);
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for map in self.maps() {
            for p in 0..panels {
                let lo = p as f64 / panels as f64;
                let hi = (p + 1) as f64 / panels as f64;
                let h = 0.5 * (hi - lo);
                let c = 0.5 * (hi + lo);
                for (&t, &w) in base.nodes.iter().zip(&base.weights) {
                    let (x, jac, dist, anchor) = map.apply(c + h * t);
                    let ww = w * h * jac * self.weight.eval_anchored(x, anchor, dist);
                    if ww > 0.0 && ww.is_finite() && x.is_finite() {
                        nodes.push(x);
                        weights.push(ww);
                    }
                }
            }
        }
        let mut idx: Vec<usize> = (0..nodes.len()).collect();
        idx.sort_by(|&i, &j| nodes[i].total_cmp(&nodes[j]));
        Ok(QuadratureRule {
            nodes: idx.iter().map(|&i| nodes[i]).collect(),
            weights: idx.iter().map(|&i| weights[i]).collect(),
            target: self.support.clone(),
        })
    }
}

#[derive(Debug)]
struct Cell {
    map: usize,
    lo: f64,
    hi: f64,
    depth: u32,
    value: Vec<f64>,
    err: f64,
    id: usize,
}

impl PartialEq for Cell {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Cell {}
impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Cell {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err
            .total_cmp(&other.err)
            .then_with(|| other.id.cmp(&self.id))
    }
}

/// `m` restricted to `support ∖ excluded`.
pub fn restrict(m: &Measure, excluded: &Region) -> Result<Measure> {
    m.restrict(excluded)
}

/// `∫ f(x) ω(x) dx` over the support of `m`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, m: &Measure, tol: f64) -> Result<f64> {
    m.integrate(f, tol)
}
