//! Low-rank adaptation and 8-bit quantization at toy scale.
//!
//! A frozen `d×k` base `W0` is adapted by `ΔW = B·A` with `B: d×r` and
//! `A: r×k`. Training touches only the factors, on a least-squares objective
//! `L = ‖(W0 + BA)X − Y‖²_F / n` where `n` is the number of columns of `X`.
//! There is no `α/r` scaling factor.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// A weight matrix that cannot be mutated once built.
#[derive(Debug, Clone, PartialEq)]
pub struct BaseMatrix {
    w0: DMatrix<f64>,
}

impl BaseMatrix {
    pub fn new(w0: DMatrix<f64>) -> Result<Self> {
        if w0.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("base matrix has non-finite entries"));
        }
        Ok(BaseMatrix { w0 })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.w0
    }

    pub fn shape(&self) -> (usize, usize) {
        self.w0.shape()
    }

    /// SHA-256 over the shape and the little-endian bytes of every entry.
    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        let (d, k) = self.shape();
        h.update((d as u64).to_le_bytes());
        h.update((k as u64).to_le_bytes());
        for v in self.w0.iter() {
            h.update(v.to_bits().to_le_bytes());
        }
        hex::encode(h.finalize())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoraAdapter {
    pub b: DMatrix<f64>,
    pub a: DMatrix<f64>,
}

impl LoraAdapter {
    pub fn new(b: DMatrix<f64>, a: DMatrix<f64>) -> Result<Self> {
        if b.ncols() != a.nrows() || b.ncols() == 0 {
            return Err(Error::domain(format!(
                "factor shapes {:?} and {:?} do not chain",
                b.shape(),
                a.shape()
            )));
        }
        Ok(LoraAdapter { b, a })
    }

    pub fn rank(&self) -> usize {
        self.a.nrows()
    }

    /// Shape `(d, k)` of the update.
    pub fn shape(&self) -> (usize, usize) {
        (self.b.nrows(), self.a.ncols())
    }

    /// Dense `B·A`.
    pub fn delta(&self) -> DMatrix<f64> {
        &self.b * &self.a
    }

    pub fn trainable_params(&self) -> usize {
        self.b.len() + self.a.len()
    }
}

pub fn dense_params(d: usize, k: usize) -> usize {
    d * k
}

/// `A` drawn from N(0, 1/r), `B` zero, so the adapted model starts equal to
/// the base.
pub fn init_adapter(d: usize, k: usize, r: usize, seed: u64) -> Result<LoraAdapter> {
    if r == 0 || r >= d.min(k) {
        return Err(Error::domain(format!(
            "rank {r} must satisfy 1 <= r < min({d}, {k})"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, 1.0 / (r as f64).sqrt()).expect("positive sd");
    let a = DMatrix::from_fn(r, k, |_, _| normal.sample(&mut rng));
    Ok(LoraAdapter {
        b: DMatrix::zeros(d, r),
        a,
    })
}

fn check_shapes(base: &BaseMatrix, adapter: &LoraAdapter) -> Result<()> {
    if base.shape() != adapter.shape() {
        return Err(Error::domain(format!(
            "adapter shape {:?} does not match base {:?}",
            adapter.shape(),
            base.shape()
        )));
    }
    Ok(())
}

/// `W0·x + B·(A·x)` without forming `B·A`.
pub fn forward(base: &BaseMatrix, adapter: &LoraAdapter, x: &DVector<f64>) -> Result<DVector<f64>> {
    check_shapes(base, adapter)?;
    if x.len() != base.shape().1 {
        return Err(Error::domain(format!(
            "input length {} does not match k = {}",
            x.len(),
            base.shape().1
        )));
    }
    Ok(base.matrix() * x + &adapter.b * (&adapter.a * x))
}

pub fn merge(base: &BaseMatrix, adapter: &LoraAdapter) -> Result<BaseMatrix> {
    check_shapes(base, adapter)?;
    BaseMatrix::new(base.matrix() + adapter.delta())
}

fn residual(base: &BaseMatrix, adapter: &LoraAdapter, x: &DMatrix<f64>, y: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    check_shapes(base, adapter)?;
    let (d, k) = base.shape();
    if x.nrows() != k || y.nrows() != d || x.ncols() != y.ncols() || x.ncols() == 0 {
        return Err(Error::domain(format!(
            "batch shapes X {:?}, Y {:?} do not fit a {d}x{k} layer",
            x.shape(),
            y.shape()
        )));
    }
    let ax = &adapter.a * x;
    Ok(base.matrix() * x + &adapter.b * ax - y)
}

pub fn loss(base: &BaseMatrix, adapter: &LoraAdapter, x: &DMatrix<f64>, y: &DMatrix<f64>) -> Result<f64> {
    let e = residual(base, adapter, x, y)?;
    Ok(e.norm_squared() / x.ncols() as f64)
}

#[derive(Debug, Clone)]
pub struct Gradients {
    pub loss: f64,
    pub b: DMatrix<f64>,
    pub a: DMatrix<f64>,
}

/// Loss and its analytic gradients with respect to `B` and `A`.
pub fn gradients(base: &BaseMatrix, adapter: &LoraAdapter, x: &DMatrix<f64>, y: &DMatrix<f64>) -> Result<Gradients> {
    let e = residual(base, adapter, x, y)?;
    let n = x.ncols() as f64;
    let ax = &adapter.a * x;
    Ok(Gradients {
        loss: e.norm_squared() / n,
        b: &e * ax.transpose() * (2.0 / n),
        a: adapter.b.transpose() * &e * x.transpose() * (2.0 / n),
    })
}

/// One gradient-descent step on the factors. Returns the updated adapter and
/// the loss measured before the update.
pub fn train_step(
    base: &BaseMatrix,
    adapter: &LoraAdapter,
    batch: (&DMatrix<f64>, &DMatrix<f64>),
    lr: f64,
) -> Result<(LoraAdapter, f64)> {
    if !(lr > 0.0 && lr.is_finite()) {
        return Err(Error::domain(format!("learning rate {lr} must be positive")));
    }
    let g = gradients(base, adapter, batch.0, batch.1)?;
    if !g.loss.is_finite() {
        return Err(Error::Divergence(g.loss));
    }
    let next = LoraAdapter {
        b: &adapter.b - g.b * lr,
        a: &adapter.a - g.a * lr,
    };
    if next.b.iter().chain(next.a.iter()).any(|v| !v.is_finite()) {
        return Err(Error::Divergence(f64::INFINITY));
    }
    Ok((next, g.loss))
}

fn factor_entry(p: &mut LoraAdapter, which: usize, i: usize) -> &mut f64 {
    if which == 0 {
        &mut p.b[i]
    } else {
        &mut p.a[i]
    }
}

/// Largest relative gap between analytic gradients and central differences
/// with step `h`, over every entry of both factors.
pub fn gradient_check(
    base: &BaseMatrix,
    adapter: &LoraAdapter,
    x: &DMatrix<f64>,
    y: &DMatrix<f64>,
    h: f64,
) -> Result<f64> {
    let g = gradients(base, adapter, x, y)?;
    let mut worst: f64 = 0.0;
    let mut probe = adapter.clone();
    for which in 0..2 {
        let len = if which == 0 { adapter.b.len() } else { adapter.a.len() };
        for i in 0..len {
            let orig = *factor_entry(&mut probe, which, i);
            *factor_entry(&mut probe, which, i) = orig + h;
            let up = loss(base, &probe, x, y)?;
            *factor_entry(&mut probe, which, i) = orig - h;
            let down = loss(base, &probe, x, y)?;
            *factor_entry(&mut probe, which, i) = orig;
            let numeric = (up - down) / (2.0 * h);
            let analytic = if which == 0 { g.b[i] } else { g.a[i] };
            let scale = analytic.abs().max(numeric.abs()).max(1e-6);
            worst = worst.max((analytic - numeric).abs() / scale);
        }
    }
    Ok(worst)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuantizedMatrix {
    pub nrows: usize,
    pub ncols: usize,
    /// Column-major codes.
    pub codes: Vec<u8>,
    pub scale: f64,
    pub zero_point: f64,
}

/// Per-tensor affine 8-bit quantization.
pub fn quantize8(m: &DMatrix<f64>) -> Result<QuantizedMatrix> {
    if m.is_empty() {
        return Err(Error::domain("cannot quantize an empty matrix"));
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::domain("cannot quantize non-finite entries"));
    }
    let min = m.min();
    let max = m.max();
    let scale = if max > min { (max - min) / 255.0 } else { 1.0 };
    let codes = m
        .iter()
        .map(|&v| ((v - min) / scale).round_ties_even().clamp(0.0, 255.0) as u8)
        .collect();
    Ok(QuantizedMatrix {
        nrows: m.nrows(),
        ncols: m.ncols(),
        codes,
        scale,
        zero_point: min,
    })
}

pub fn dequantize8(q: &QuantizedMatrix) -> DMatrix<f64> {
    DMatrix::from_iterator(
        q.nrows,
        q.ncols,
        q.codes.iter().map(|&c| q.scale * f64::from(c) + q.zero_point),
    )
}

pub fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn gaussian_matrix(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| StandardNormal.sample(rng))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DemoConfig {
    pub d: usize,
    pub k: usize,
    pub r: usize,
    pub steps: usize,
    pub seed: u64,
    pub lr: f64,
}

impl Default for DemoConfig {
    fn default() -> Self {
        DemoConfig {
            d: 8,
            k: 6,
            r: 1,
            steps: 200,
            seed: 7,
            lr: 0.25,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DemoReport {
    pub config: DemoConfig,
    /// Loss before each step, followed by the final loss.
    pub losses: Vec<f64>,
    pub final_loss: f64,
    pub monotone: bool,
    pub base_fingerprint: String,
    pub base_unchanged: bool,
    pub trainable_params: usize,
    pub dense_params: usize,
    pub factored_vs_merged_max_err: f64,
    pub gradient_check_max_rel_err: f64,
    pub quant_scale: f64,
    pub quant_max_err: f64,
}

/// Fits a rank-`r` target update `ΔW*` with an adapter of the same rank,
/// using `X = I` so the objective is `‖BA − ΔW*‖² / k`.
pub fn recovery_problem(cfg: &DemoConfig) -> Result<(BaseMatrix, DMatrix<f64>, DMatrix<f64>, LoraAdapter)> {
    let DemoConfig { d, k, r, seed, .. } = *cfg;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base = BaseMatrix::new(gaussian_matrix(d, k, &mut rng))?;
    let adapter = init_adapter(d, k, r, seed.wrapping_add(1))?;
    // Target factors normalized so each has unit spectral scale.
    let u = gaussian_matrix(d, r, &mut rng);
    let v = gaussian_matrix(r, k, &mut rng);
    let target = (&u / u.norm()) * (&v / v.norm()) * (r as f64).sqrt() * 2.0;
    let x = DMatrix::identity(k, k);
    let y = base.matrix() * &x + target * &x;
    Ok((base, x, y, adapter))
}

pub fn run_demo(cfg: &DemoConfig) -> Result<DemoReport> {
    let (base, x, y, mut adapter) = recovery_problem(cfg)?;
    let fingerprint = base.fingerprint();
    let mut losses = Vec::with_capacity(cfg.steps + 1);
    for _ in 0..cfg.steps {
        let (next, l) = train_step(&base, &adapter, (&x, &y), cfg.lr)?;
        losses.push(l);
        adapter = next;
    }
    let final_loss = loss(&base, &adapter, &x, &y)?;
    losses.push(final_loss);
    let monotone = losses.windows(2).all(|w| w[1] <= w[0]);

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5eed);
    let probe = DVector::from_fn(cfg.k, |_, _| StandardNormal.sample(&mut rng));
    let factored = forward(&base, &adapter, &probe)?;
    let dense = merge(&base, &adapter)?.matrix() * &probe;
    let factored_vs_merged_max_err = (factored - dense).amax();

    let checked = LoraAdapter::new(gaussian_matrix(cfg.d, cfg.r, &mut rng), adapter.a.clone())?;
    let gradient_check_max_rel_err = gradient_check(&base, &checked, &x, &y, 1e-5)?;

    let q = quantize8(base.matrix())?;
    let quant_max_err = max_abs_diff(base.matrix(), &dequantize8(&q));

    Ok(DemoReport {
        config: *cfg,
        final_loss,
        monotone,
        base_unchanged: base.fingerprint() == fingerprint,
        base_fingerprint: fingerprint,
        trainable_params: adapter.trainable_params(),
        dense_params: dense_params(cfg.d, cfg.k),
        factored_vs_merged_max_err,
        gradient_check_max_rel_err,
        quant_scale: q.scale,
        quant_max_err,
        losses,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn init_is_zero_update() {
        let a = init_adapter(4, 4, 1, 3).unwrap();
        assert_eq!(a.delta(), DMatrix::zeros(4, 4));
        assert!(init_adapter(4, 4, 4, 3).is_err());
        assert!(init_adapter(4, 4, 0, 3).is_err());
        let p = init_adapter(8, 6, 2, 0).unwrap();
        assert_eq!((p.trainable_params(), dense_params(8, 6)), (28, 48));
    }

    #[test]
    fn init_sd_follows_rank() {
        let a = init_adapter(300, 300, 4, 9).unwrap().a;
        let var = a.iter().map(|v| v * v).sum::<f64>() / a.len() as f64;
        assert!((var - 0.25).abs() < 0.02, "{var}");
    }

    #[test]
    fn forward_edge_cases() {
        let mut r = rng(1);
        let base = BaseMatrix::new(gaussian_matrix(5, 3, &mut r)).unwrap();
        let zero = init_adapter(5, 3, 1, 2).unwrap();
        let x = DVector::from_vec(vec![1.0, -2.0, 0.5]);
        assert_eq!(forward(&base, &zero, &x).unwrap(), base.matrix() * &x);
        assert_eq!(forward(&base, &zero, &DVector::zeros(3)).unwrap(), DVector::zeros(5));
        assert!(forward(&base, &zero, &DVector::zeros(4)).is_err());
        assert_eq!(merge(&base, &zero).unwrap(), base);
    }

    #[test]
    fn rank_one_merge() {
        let base = BaseMatrix::new(DMatrix::zeros(4, 3)).unwrap();
        let a = LoraAdapter::new(
            DMatrix::from_column_slice(4, 1, &[1.0, 2.0, 3.0, 4.0]),
            DMatrix::from_row_slice(1, 3, &[1.0, 0.0, -1.0]),
        )
        .unwrap();
        let delta = merge(&base, &a).unwrap().matrix() - base.matrix();
        let sv = delta.singular_values();
        assert!(sv[0] > 1.0 && sv[1] < 1e-12);
    }

    #[test]
    fn optimum_is_stationary() {
        let mut r = rng(4);
        let base = BaseMatrix::new(gaussian_matrix(4, 3, &mut r)).unwrap();
        let x = gaussian_matrix(3, 6, &mut r);
        let y = base.matrix() * &x;
        let a = init_adapter(4, 3, 1, 5).unwrap();
        let (next, l) = train_step(&base, &a, (&x, &y), 0.1).unwrap();
        assert_eq!(l, 0.0);
        assert_eq!(next, a);
    }

    #[test]
    fn gradients_match_finite_differences() {
        let mut r = rng(11);
        let base = BaseMatrix::new(gaussian_matrix(4, 3, &mut r)).unwrap();
        let a = LoraAdapter::new(gaussian_matrix(4, 2, &mut r), gaussian_matrix(2, 3, &mut r)).unwrap();
        let x = gaussian_matrix(3, 5, &mut r);
        let y = gaussian_matrix(4, 5, &mut r);
        assert!(gradient_check(&base, &a, &x, &y, 1e-5).unwrap() < 1e-4);
    }

    #[test]
    fn divergence_is_reported() {
        let base = BaseMatrix::new(DMatrix::zeros(3, 2)).unwrap();
        let a = LoraAdapter::new(DMatrix::from_element(3, 1, 1e200), DMatrix::from_element(1, 2, 1e200)).unwrap();
        let x = DMatrix::identity(2, 2);
        let y = DMatrix::zeros(3, 2);
        assert!(matches!(train_step(&base, &a, (&x, &y), 0.1), Err(Error::Divergence(_))));
        assert!(train_step(&base, &a, (&x, &y), 0.0).is_err());
    }

    #[test]
    fn quantize_examples() {
        let c = DMatrix::from_element(3, 3, -1.75);
        let q = quantize8(&c).unwrap();
        assert!(q.codes.iter().all(|&v| v == 0));
        assert_eq!(dequantize8(&q), c);

        let m = DMatrix::from_row_slice(1, 2, &[0.0, 255.0 * 0.5]);
        let q = quantize8(&m).unwrap();
        assert_eq!(q.codes, vec![0, 255]);
        assert_eq!(dequantize8(&q), m);

        assert!(quantize8(&DMatrix::from_element(1, 1, f64::NAN)).is_err());
    }

    #[test]
    fn demo_recovers_rank_one() {
        let report = run_demo(&DemoConfig::default()).unwrap();
        assert!(report.monotone);
        assert!(report.final_loss < 1e-6, "{}", report.final_loss);
        assert!(report.base_unchanged);
        assert!(report.factored_vs_merged_max_err < 1e-10);
        assert!(report.quant_max_err <= report.quant_scale / 2.0);
    }
}
