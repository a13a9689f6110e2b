//! Test statistics: the empirical kernel distance covariance and its
//! normalized correlation form, the kernel two-sample distance, and two
//! competitor statistics for circular data.
//!
//! The distance covariance is a V-statistic: every sum runs over all index
//! tuples with replacement, diagonal terms included, with no bias correction.
//! The production evaluators run in O(n^2) by collapsing the triple sum
//! through row sums; literal O(n^3) transcriptions are kept as oracles.
//!
//! [`PermutableStat`] is the seam the permutation bootstrap works through: a
//! prepared statistic caches everything that is invariant under relabeling of
//! the second sample (Gram matrices, row sums, totals, normalizers) and
//! evaluates any permutation by index indirection, so kernels are never
//! re-evaluated inside the bootstrap loop.

use crate::error::{Error, Result};
use crate::geometry::{chord_distance, pairwise_distances, AngleVector, DirectionalSample};
use crate::kernels::{gram_from_distances, GramMatrix, Kernel};
use crate::matrix::SquareMatrix;
use serde::Serialize;

/// Marginal V-statistics at or below this value are treated as degenerate.
pub const DEGENERATE_EPS: f64 = 1e-14;

/// A named scalar statistic computed from a sample of size `n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StatValue {
    pub name: String,
    pub value: f64,
    pub n: usize,
}

impl StatValue {
    pub fn new(name: impl Into<String>, value: f64, n: usize) -> Result<Self> {
        if !value.is_finite() {
            return Err(Error::Input(format!("non-finite statistic value {value}")));
        }
        Ok(StatValue {
            name: name.into(),
            value,
            n,
        })
    }
}

fn check_same_size(a: &GramMatrix, b: &GramMatrix) -> Result<usize> {
    if a.n() != b.n() {
        return Err(Error::Input(format!(
            "Gram matrices have different sizes: {} vs {}",
            a.n(),
            b.n()
        )));
    }
    Ok(a.n())
}

/// Empirical kernel distance covariance of two Gram matrices, evaluated in
/// O(n^2) via row sums:
///
/// `(1/n^2) sum_ij A_ij B_ij + (1/n^4)(sum_ij A_ij)(sum_ij B_ij)
///  - (2/n^3) sum_i r_i s_i`
///
/// where `r_i`, `s_i` are the row sums of `A` and `B`. The row-sum identity
/// `sum_ijk A_ij B_ik = sum_i r_i s_i` collapses the triple sum.
pub fn v_statistic(a: &GramMatrix, b: &GramMatrix) -> Result<f64> {
    let n = check_same_size(a, b)?;
    let nf = n as f64;
    let rows_a = a.values().row_sums();
    let rows_b = b.values().row_sums();
    let total_a: f64 = rows_a.iter().sum();
    let total_b: f64 = rows_b.iter().sum();
    let mut cross = 0.0;
    for i in 0..n {
        let ra = a.values().row(i);
        let rb = b.values().row(i);
        let mut acc = 0.0;
        for j in 0..n {
            acc += ra[j] * rb[j];
        }
        cross += acc;
    }
    let mut row_prod = 0.0;
    for i in 0..n {
        row_prod += rows_a[i] * rows_b[i];
    }
    Ok(cross / (nf * nf) + total_a * total_b / nf.powi(4) - 2.0 * row_prod / nf.powi(3))
}

/// Literal O(n^3) transcription of the distance-covariance triple sum, kept
/// as an independent oracle for [`v_statistic`]. Intended for n <= 50.
pub fn v_statistic_naive(a: &GramMatrix, b: &GramMatrix) -> Result<f64> {
    let n = check_same_size(a, b)?;
    let nf = n as f64;
    let mut term1 = 0.0;
    for i in 0..n {
        for j in 0..n {
            term1 += a.get(i, j) * b.get(i, j);
        }
    }
    let mut sum_a = 0.0;
    let mut sum_b = 0.0;
    for i in 0..n {
        for j in 0..n {
            sum_a += a.get(i, j);
            sum_b += b.get(i, j);
        }
    }
    let mut term3 = 0.0;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                term3 += a.get(i, j) * b.get(i, k);
            }
        }
    }
    Ok(term1 / (nf * nf) + sum_a * sum_b / nf.powi(4) - 2.0 * term3 / nf.powi(3))
}

/// Normalized distance correlation:
/// `v(A,B) / sqrt(v(A,A) * v(B,B))`.
///
/// Fails with [`Error::DegenerateMarginal`] when either marginal V-statistic
/// is at or below [`DEGENERATE_EPS`] (for example a constant sample).
pub fn distance_correlation(a: &GramMatrix, b: &GramMatrix) -> Result<f64> {
    check_same_size(a, b)?;
    let vxx = v_statistic(a, a)?;
    let vyy = v_statistic(b, b)?;
    if vxx <= DEGENERATE_EPS {
        return Err(Error::DegenerateMarginal(format!(
            "first marginal has V-statistic {vxx:e}"
        )));
    }
    if vyy <= DEGENERATE_EPS {
        return Err(Error::DegenerateMarginal(format!(
            "second marginal has V-statistic {vyy:e}"
        )));
    }
    Ok(v_statistic(a, b)? / (vxx.sqrt() * vyy.sqrt()))
}

/// Plug-in kernel distance between the distributions of two samples:
/// `2 mean(K across) - mean(K within X) - mean(K within Y)`, within-sample
/// means over all ordered pairs (diagonal included).
pub fn two_sample_distance(
    kernel: Kernel,
    x: &DirectionalSample,
    y: &DirectionalSample,
) -> Result<f64> {
    kernel.validate()?;
    if x.ambient_dim() != y.ambient_dim() {
        return Err(Error::Input(format!(
            "two-sample distance requires equal ambient dimensions ({} vs {})",
            x.ambient_dim(),
            y.ambient_dim()
        )));
    }
    let mean_within = |s: &DirectionalSample| -> f64 {
        let n = s.n();
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += kernel.eval(chord_distance(s.row(i), s.row(j)).expect("same dims"));
            }
        }
        acc / (n * n) as f64
    };
    let mut cross = 0.0;
    for i in 0..x.n() {
        for j in 0..y.n() {
            cross += kernel.eval(chord_distance(x.row(i), y.row(j))?);
        }
    }
    cross /= (x.n() * y.n()) as f64;
    Ok(2.0 * cross - mean_within(x) - mean_within(y))
}

/// Sines of deviations from the sample circular mean direction, computed by
/// `atan2(sum sin, sum cos)`. A near-zero resultant means the mean direction
/// is undefined.
fn centered_sines(t: &AngleVector) -> Result<Vec<f64>> {
    let n = t.len() as f64;
    let (mut ss, mut cs) = (0.0, 0.0);
    for &a in t.as_slice() {
        ss += a.sin();
        cs += a.cos();
    }
    if (ss * ss + cs * cs).sqrt() / n <= 1e-12 {
        return Err(Error::DegenerateMarginal(
            "zero resultant length: circular mean direction undefined".into(),
        ));
    }
    let mean = ss.atan2(cs);
    Ok(t.as_slice().iter().map(|&a| (a - mean).sin()).collect())
}

/// Circular correlation coefficient:
/// `sum sin(t_i - t_mean) sin(p_i - p_mean) /
///  sqrt(sum sin^2(t_i - t_mean) * sum sin^2(p_i - p_mean))`.
pub fn circular_correlation(theta: &AngleVector, phi: &AngleVector) -> Result<f64> {
    if theta.len() != phi.len() {
        return Err(Error::Input(format!(
            "angle vectors have different lengths: {} vs {}",
            theta.len(),
            phi.len()
        )));
    }
    if theta.len() < 2 {
        return Err(Error::Input(
            "circular correlation requires at least 2 observations".into(),
        ));
    }
    let u = centered_sines(theta)?;
    let v = centered_sines(phi)?;
    let su2: f64 = u.iter().map(|x| x * x).sum();
    let sv2: f64 = v.iter().map(|x| x * x).sum();
    if su2 <= DEGENERATE_EPS || sv2 <= DEGENERATE_EPS {
        return Err(Error::DegenerateMarginal(
            "all angles coincide with the circular mean direction".into(),
        ));
    }
    let num: f64 = u.iter().zip(&v).map(|(a, b)| a * b).sum();
    Ok(num / (su2.sqrt() * sv2.sqrt()))
}

#[inline]
fn trig_weight(lambda: f64, t: f64) -> f64 {
    (lambda * t.sin()).cos() * (lambda * (t.cos() - 1.0)).exp()
}

fn trig_weight_matrix(t: &AngleVector, lambda: f64) -> SquareMatrix {
    let a = t.as_slice();
    SquareMatrix::from_fn(a.len(), |j, k| trig_weight(lambda, a[j] - a[k]))
}

/// Trigonometric-moment test statistic with weight
/// `J(t) = cos(lambda sin t) exp(lambda (cos t - 1))` applied to all pairwise
/// angle differences:
///
/// `(1/n) sum_jk J(t_jk) J(p_jk) + (1/n^3)(sum_jk J(t_jk))(sum_jk J(p_jk))
///  - (2/n^2) sum_jkl J(t_jk) J(p_jl)`
///
/// with the last sum collapsed through row sums.
pub fn trigonometric_moment_stat(
    theta: &AngleVector,
    phi: &AngleVector,
    lambda: f64,
) -> Result<f64> {
    validate_lambda(lambda)?;
    if theta.len() != phi.len() {
        return Err(Error::Input(format!(
            "angle vectors have different lengths: {} vs {}",
            theta.len(),
            phi.len()
        )));
    }
    let jt = trig_weight_matrix(theta, lambda);
    let jp = trig_weight_matrix(phi, lambda);
    Ok(trig_combine(&jt, &jp, None))
}

fn validate_lambda(lambda: f64) -> Result<()> {
    if !lambda.is_finite() || lambda <= 0.0 {
        return Err(Error::Config(format!(
            "trigonometric-moment lambda must be positive, got {lambda}"
        )));
    }
    Ok(())
}

fn trig_combine(jt: &SquareMatrix, jp: &SquareMatrix, sigma: Option<&[usize]>) -> f64 {
    let n = jt.n();
    let nf = n as f64;
    let rows_t = jt.row_sums();
    let rows_p = jp.row_sums();
    let total_t: f64 = rows_t.iter().sum();
    let total_p: f64 = rows_p.iter().sum();
    let (cross, row_prod) = match sigma {
        None => {
            let mut cross = 0.0;
            for i in 0..n {
                let rt = jt.row(i);
                let rp = jp.row(i);
                for j in 0..n {
                    cross += rt[j] * rp[j];
                }
            }
            let mut rp = 0.0;
            for i in 0..n {
                rp += rows_t[i] * rows_p[i];
            }
            (cross, rp)
        }
        Some(s) => {
            let pd = jp.data();
            let mut cross = 0.0;
            for i in 0..n {
                let rt = jt.row(i);
                let base = s[i] * n;
                for j in 0..n {
                    cross += rt[j] * pd[base + s[j]];
                }
            }
            let mut rp = 0.0;
            for i in 0..n {
                rp += rows_t[i] * rows_p[s[i]];
            }
            (cross, rp)
        }
    };
    cross / nf + total_t * total_p / nf.powi(3) - 2.0 * row_prod / (nf * nf)
}

/// A statistic identifier with its parameters, parsed from strings like
/// `dcor:energy:0.25`, `ccor`, `trig:1`, or `nk:ratio`.
#[derive(Debug, Clone, PartialEq)]
pub enum StatSpec {
    /// Distance correlation under a kernel (default kernel `energy:1`).
    Dcor(Kernel),
    /// Circular correlation coefficient (two-sided; tested through |r|).
    CircCor,
    /// Trigonometric-moment statistic (default lambda 1).
    Trig { lambda: f64 },
    /// Kernel two-sample distance (two-sample mode, not a paired test).
    Nk(Kernel),
}

impl StatSpec {
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "ccor" {
            return Ok(StatSpec::CircCor);
        }
        if s == "dcor" {
            return Ok(StatSpec::Dcor(Kernel::energy(1.0)?));
        }
        if let Some(rest) = s.strip_prefix("dcor:") {
            return Ok(StatSpec::Dcor(Kernel::parse(rest)?));
        }
        if s == "trig" {
            return Ok(StatSpec::Trig { lambda: 1.0 });
        }
        if let Some(rest) = s.strip_prefix("trig:") {
            let lambda: f64 = rest
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("cannot parse trig lambda {rest:?}")))?;
            validate_lambda(lambda)?;
            return Ok(StatSpec::Trig { lambda });
        }
        if s == "nk" {
            return Ok(StatSpec::Nk(Kernel::energy(1.0)?));
        }
        if let Some(rest) = s.strip_prefix("nk:") {
            return Ok(StatSpec::Nk(Kernel::parse(rest)?));
        }
        Err(Error::Config(format!(
            "unknown statistic {s:?} (expected dcor[:<kernel>], ccor, trig[:<lambda>], nk[:<kernel>])"
        )))
    }

    /// Canonical identifier, the inverse of [`StatSpec::parse`].
    pub fn identifier(&self) -> String {
        match self {
            StatSpec::Dcor(k) => format!("dcor:{}", k.spec_string()),
            StatSpec::CircCor => "ccor".into(),
            StatSpec::Trig { lambda } => format!("trig:{lambda}"),
            StatSpec::Nk(k) => format!("nk:{}", k.spec_string()),
        }
    }

    /// Compact column header for tables: `D_<a>`, `D_k`, `D_l`, `C`,
    /// `T_<lambda>`, `N_<label>`.
    pub fn column_label(&self) -> String {
        match self {
            StatSpec::Dcor(k) => format!("D_{}", k.short_label()),
            StatSpec::CircCor => "C".into(),
            StatSpec::Trig { lambda } => format!("T_{lambda}"),
            StatSpec::Nk(k) => format!("N_{}", k.short_label()),
        }
    }
}

/// Paired observations handed to a test: either angles (so circular-only
/// statistics can be computed) or Cartesian samples of any supported kind.
#[derive(Debug, Clone)]
pub enum TestData {
    Circular { theta: AngleVector, phi: AngleVector },
    General { x: DirectionalSample, y: DirectionalSample },
}

impl TestData {
    pub fn len(&self) -> usize {
        match self {
            TestData::Circular { theta, .. } => theta.len(),
            TestData::General { x, .. } => x.n(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn validate(&self) -> Result<()> {
        let (a, b) = match self {
            TestData::Circular { theta, phi } => (theta.len(), phi.len()),
            TestData::General { x, y } => (x.n(), y.n()),
        };
        if a != b {
            return Err(Error::Input(format!(
                "paired samples have different sizes: {a} vs {b}"
            )));
        }
        Ok(())
    }
}

/// A statistic that can be re-evaluated under a permutation of the second
/// sample's indices (or of pooled labels, for two-sample statistics) without
/// touching the original observations.
pub trait PermutableStat: Send + Sync {
    /// Canonical identifier of the underlying statistic.
    fn name(&self) -> &str;
    /// Length of the permuted index set (the sample size; pooled size for
    /// two-sample statistics).
    fn sample_len(&self) -> usize;
    /// Value on the original labeling.
    fn observed(&self) -> f64;
    /// Value after relabeling by `sigma` (a bijection on `0..len()`).
    fn permuted(&self, sigma: &[usize]) -> f64;
}

/// Distance correlation prepared for permutation: Grams, row sums, totals and
/// the marginal normalizer are cached. Both marginal V-statistics are
/// invariant under relabeling, so only the cross term is recomputed.
pub struct PreparedDcor {
    a: SquareMatrix,
    b: SquareMatrix,
    rows_a: Vec<f64>,
    rows_b: Vec<f64>,
    total_a: f64,
    total_b: f64,
    denom: f64,
    observed: f64,
    name: String,
}

impl PreparedDcor {
    pub fn new(a: &GramMatrix, b: &GramMatrix) -> Result<Self> {
        let n = check_same_size(a, b)?;
        let vxx = v_statistic(a, a)?;
        let vyy = v_statistic(b, b)?;
        if vxx <= DEGENERATE_EPS || vyy <= DEGENERATE_EPS {
            return Err(Error::DegenerateMarginal(format!(
                "marginal V-statistics {vxx:e}, {vyy:e}"
            )));
        }
        let name = if a.kernel() == b.kernel() {
            format!("dcor:{}", a.kernel().spec_string())
        } else {
            format!(
                "dcor:{}|{}",
                a.kernel().spec_string(),
                b.kernel().spec_string()
            )
        };
        let rows_a = a.values().row_sums();
        let rows_b = b.values().row_sums();
        let total_a = rows_a.iter().sum();
        let total_b = rows_b.iter().sum();
        let mut prepared = PreparedDcor {
            a: a.values().clone(),
            b: b.values().clone(),
            rows_a,
            rows_b,
            total_a,
            total_b,
            denom: vxx.sqrt() * vyy.sqrt(),
            observed: 0.0,
            name,
        };
        let identity: Vec<usize> = (0..n).collect();
        prepared.observed = prepared.permuted(&identity);
        Ok(prepared)
    }
}

impl PermutableStat for PreparedDcor {
    fn name(&self) -> &str {
        &self.name
    }

    fn sample_len(&self) -> usize {
        self.a.n()
    }

    fn observed(&self) -> f64 {
        self.observed
    }

    fn permuted(&self, sigma: &[usize]) -> f64 {
        let n = self.a.n();
        debug_assert_eq!(sigma.len(), n);
        let nf = n as f64;
        let bd = self.b.data();
        let mut cross = 0.0;
        for i in 0..n {
            let arow = self.a.row(i);
            let base = sigma[i] * n;
            let mut acc = 0.0;
            for j in 0..n {
                acc += arow[j] * bd[base + sigma[j]];
            }
            cross += acc;
        }
        let mut row_prod = 0.0;
        for (ra, &s) in self.rows_a.iter().zip(sigma) {
            row_prod += ra * self.rows_b[s];
        }
        let v =
            cross / (nf * nf) + self.total_a * self.total_b / nf.powi(4)
                - 2.0 * row_prod / nf.powi(3);
        v / self.denom
    }
}

/// Circular correlation prepared for permutation. The circular means are
/// permutation-invariant, so only the centered sines need relabeling. The
/// tested statistic is |r| (the competitor is two-sided).
pub struct PreparedCircCor {
    u: Vec<f64>,
    v: Vec<f64>,
    denom: f64,
    observed: f64,
}

impl PreparedCircCor {
    pub fn new(theta: &AngleVector, phi: &AngleVector) -> Result<Self> {
        // surfaces the same errors as the plain statistic
        circular_correlation(theta, phi)?;
        let u = centered_sines(theta)?;
        let v = centered_sines(phi)?;
        let su2: f64 = u.iter().map(|x| x * x).sum();
        let sv2: f64 = v.iter().map(|x| x * x).sum();
        let mut prepared = PreparedCircCor {
            u,
            v,
            denom: su2.sqrt() * sv2.sqrt(),
            observed: 0.0,
        };
        let identity: Vec<usize> = (0..prepared.u.len()).collect();
        prepared.observed = prepared.permuted(&identity);
        Ok(prepared)
    }
}

impl PermutableStat for PreparedCircCor {
    fn name(&self) -> &str {
        "ccor"
    }

    fn sample_len(&self) -> usize {
        self.u.len()
    }

    fn observed(&self) -> f64 {
        self.observed
    }

    fn permuted(&self, sigma: &[usize]) -> f64 {
        debug_assert_eq!(sigma.len(), self.u.len());
        let mut num = 0.0;
        for (i, &ui) in self.u.iter().enumerate() {
            num += ui * self.v[sigma[i]];
        }
        (num / self.denom).abs()
    }
}

/// Trigonometric-moment statistic prepared for permutation.
pub struct PreparedTrig {
    jt: SquareMatrix,
    jp: SquareMatrix,
    observed: f64,
    name: String,
}

impl PreparedTrig {
    pub fn new(theta: &AngleVector, phi: &AngleVector, lambda: f64) -> Result<Self> {
        validate_lambda(lambda)?;
        if theta.len() != phi.len() {
            return Err(Error::Input(format!(
                "angle vectors have different lengths: {} vs {}",
                theta.len(),
                phi.len()
            )));
        }
        let jt = trig_weight_matrix(theta, lambda);
        let jp = trig_weight_matrix(phi, lambda);
        let observed = trig_combine(&jt, &jp, None);
        Ok(PreparedTrig {
            jt,
            jp,
            observed,
            name: format!("trig:{lambda}"),
        })
    }
}

impl PermutableStat for PreparedTrig {
    fn name(&self) -> &str {
        &self.name
    }

    fn sample_len(&self) -> usize {
        self.jt.n()
    }

    fn observed(&self) -> f64 {
        self.observed
    }

    fn permuted(&self, sigma: &[usize]) -> f64 {
        trig_combine(&self.jt, &self.jp, Some(sigma))
    }
}

/// Kernel two-sample distance prepared for a pooled-label permutation test:
/// the kernel matrix over the pooled points is computed once, and every
/// relabeling is evaluated by index indirection.
pub struct PreparedTwoSample {
    pooled: SquareMatrix,
    n_x: usize,
    observed: f64,
    name: String,
}

impl PreparedTwoSample {
    pub fn new(kernel: Kernel, x: &DirectionalSample, y: &DirectionalSample) -> Result<Self> {
        kernel.validate()?;
        if x.ambient_dim() != y.ambient_dim() || x.kind() != y.kind() {
            return Err(Error::Input(
                "two-sample test requires both samples on the same space".into(),
            ));
        }
        let m = x.n() + y.n();
        let point = |i: usize| {
            if i < x.n() {
                x.row(i)
            } else {
                y.row(i - x.n())
            }
        };
        let mut pooled = SquareMatrix::zeros(m);
        for i in 0..m {
            for j in (i + 1)..m {
                let v = kernel.eval(chord_distance(point(i), point(j))?);
                pooled.set(i, j, v);
                pooled.set(j, i, v);
            }
        }
        let mut prepared = PreparedTwoSample {
            pooled,
            n_x: x.n(),
            observed: 0.0,
            name: format!("nk:{}", kernel.spec_string()),
        };
        let identity: Vec<usize> = (0..m).collect();
        prepared.observed = prepared.permuted(&identity);
        Ok(prepared)
    }
}

impl PermutableStat for PreparedTwoSample {
    fn name(&self) -> &str {
        &self.name
    }

    fn sample_len(&self) -> usize {
        self.pooled.n()
    }

    fn observed(&self) -> f64 {
        self.observed
    }

    fn permuted(&self, sigma: &[usize]) -> f64 {
        let m = self.pooled.n();
        debug_assert_eq!(sigma.len(), m);
        let nx = self.n_x;
        let ny = m - nx;
        let g = &self.pooled;
        let mut within_x = 0.0;
        for &i in &sigma[..nx] {
            for &j in &sigma[..nx] {
                within_x += g.get(i, j);
            }
        }
        let mut within_y = 0.0;
        for &i in &sigma[nx..] {
            for &j in &sigma[nx..] {
                within_y += g.get(i, j);
            }
        }
        let mut cross = 0.0;
        for &i in &sigma[..nx] {
            for &j in &sigma[nx..] {
                cross += g.get(i, j);
            }
        }
        2.0 * cross / (nx * ny) as f64
            - within_x / (nx * nx) as f64
            - within_y / (ny * ny) as f64
    }
}

/// Prepares one statistic for permutation testing.
pub fn prepare_statistic(spec: &StatSpec, data: &TestData) -> Result<Box<dyn PermutableStat>> {
    let mut all = prepare_statistics(std::slice::from_ref(spec), data)?;
    Ok(all.pop().expect("one spec produces one statistic"))
}

/// Prepares several statistics over the same data, sharing the pairwise
/// distance matrices across all distance-correlation kernels.
pub fn prepare_statistics(
    specs: &[StatSpec],
    data: &TestData,
) -> Result<Vec<Box<dyn PermutableStat>>> {
    data.validate()?;
    let needs_cartesian = specs
        .iter()
        .any(|s| matches!(s, StatSpec::Dcor(_) | StatSpec::Nk(_)));
    let cartesian: Option<(DirectionalSample, DirectionalSample)> = if needs_cartesian {
        Some(match data {
            TestData::Circular { theta, phi } => (theta.to_sample(), phi.to_sample()),
            TestData::General { x, y } => (x.clone(), y.clone()),
        })
    } else {
        None
    };
    let mut distances: Option<(SquareMatrix, SquareMatrix)> = None;
    let mut out: Vec<Box<dyn PermutableStat>> = Vec::with_capacity(specs.len());
    for spec in specs {
        match spec {
            StatSpec::Dcor(kernel) => {
                let (x, y) = cartesian.as_ref().expect("cartesian views prepared");
                if distances.is_none() {
                    distances = Some((pairwise_distances(x), pairwise_distances(y)));
                }
                let (dx, dy) = distances.as_ref().unwrap();
                let ga = gram_from_distances(*kernel, dx)?;
                let gb = gram_from_distances(*kernel, dy)?;
                out.push(Box::new(PreparedDcor::new(&ga, &gb)?));
            }
            StatSpec::CircCor => match data {
                TestData::Circular { theta, phi } => {
                    out.push(Box::new(PreparedCircCor::new(theta, phi)?));
                }
                TestData::General { .. } => {
                    return Err(Error::Config(
                        "statistic ccor requires circular data on both margins".into(),
                    ));
                }
            },
            StatSpec::Trig { lambda } => match data {
                TestData::Circular { theta, phi } => {
                    out.push(Box::new(PreparedTrig::new(theta, phi, *lambda)?));
                }
                TestData::General { .. } => {
                    return Err(Error::Config(
                        "statistic trig requires circular data on both margins".into(),
                    ));
                }
            },
            StatSpec::Nk(kernel) => {
                let (x, y) = cartesian.as_ref().expect("cartesian views prepared");
                out.push(Box::new(PreparedTwoSample::new(*kernel, x, y)?));
            }
        }
    }
    Ok(out)
}
