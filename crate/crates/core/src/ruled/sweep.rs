//! Randomized search for non-cylindrical ruled surfaces whose residual
//! polynomial vanishes identically.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::Metric;

use super::generate::{random_case, random_helicoid_case, SweepCase};
use super::{coefficients, frame, DirectorClass, Result, RuledError, RuledSurface};

/// Coefficients at or below this (after scaling by `max(1, |P|³)`) count as
/// vanishing.
pub const FLAG_THRESHOLD: f64 = 1e-6;
/// `|w'|` below this marks a surface as cylindrical.
pub const CYLINDER_FLOOR: f64 = 1e-8;
/// `α` closer to zero than this is redrawn.
pub const ALPHA_FLOOR: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepClass {
    /// Euclidean normalized class.
    Standard,
    /// `<w', w'>_L = +1`.
    DeltaPlus,
    /// `<w', w'>_L = −1`.
    DeltaMinus,
    /// Alternates `δ = +1` (even ids) and `δ = −1` (odd ids).
    Nondegenerate,
    Lightlike,
}

impl SweepClass {
    pub fn metric(self) -> Metric {
        match self {
            SweepClass::Standard => Metric::Euclidean,
            _ => Metric::Lorentzian,
        }
    }

    pub fn default_for(metric: Metric) -> Self {
        match metric {
            Metric::Euclidean => SweepClass::Standard,
            Metric::Lorentzian => SweepClass::Nondegenerate,
        }
    }

    pub fn director_class(self, id: usize) -> DirectorClass {
        match self {
            SweepClass::Standard => DirectorClass::EuclidStandard,
            SweepClass::DeltaPlus => DirectorClass::LorentzNondegenerate(1),
            SweepClass::DeltaMinus => DirectorClass::LorentzNondegenerate(-1),
            SweepClass::Nondegenerate => DirectorClass::LorentzNondegenerate(if id % 2 == 0 { 1 } else { -1 }),
            SweepClass::Lightlike => DirectorClass::LorentzLightlikeDirector,
        }
    }
}

impl std::str::FromStr for SweepClass {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(match s {
            "standard" | "euclid" => SweepClass::Standard,
            "delta-plus" | "plus" => SweepClass::DeltaPlus,
            "delta-minus" | "minus" => SweepClass::DeltaMinus,
            "nondegenerate" => SweepClass::Nondegenerate,
            "lightlike" => SweepClass::Lightlike,
            other => return Err(format!("unknown class '{other}'")),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepFamily {
    Random,
    /// Helicoids over `w = (cos s, sin s, 0)`; with `α = 0` every one of them
    /// is minimal and must be flagged.
    Helicoid,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub n_surfaces: usize,
    pub n_s_samples: usize,
    pub seed: u64,
    pub metric: Metric,
    pub class: SweepClass,
    pub alpha_range: (f64, f64),
    pub family: SweepFamily,
}

impl SweepConfig {
    pub fn new(metric: Metric, n_surfaces: usize, seed: u64) -> Self {
        SweepConfig {
            n_surfaces,
            n_s_samples: 10,
            seed,
            metric,
            class: SweepClass::default_for(metric),
            alpha_range: (-3.0, 3.0),
            family: SweepFamily::Random,
        }
    }

    fn alpha_fixed_zero(&self) -> bool {
        self.alpha_range == (0.0, 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(RuledError::Config(msg.to_string()));
        if self.n_surfaces == 0 {
            return bad("n_surfaces must be positive");
        }
        if self.n_s_samples == 0 {
            return bad("n_s_samples must be positive");
        }
        let (lo, hi) = self.alpha_range;
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return bad("alpha_range must be a finite interval with lo <= hi");
        }
        if !self.alpha_fixed_zero() && lo > -ALPHA_FLOOR && hi < ALPHA_FLOOR {
            return bad("alpha_range contains no admissible nonzero alpha");
        }
        if self.class.metric() != self.metric {
            return bad("class does not belong to the metric");
        }
        if self.family == SweepFamily::Helicoid && self.metric != Metric::Euclidean {
            return bad("the helicoid family is Euclidean");
        }
        Ok(())
    }

    fn sample_alpha(&self, rng: &mut impl Rng) -> f64 {
        if self.alpha_fixed_zero() {
            return 0.0;
        }
        let (lo, hi) = self.alpha_range;
        loop {
            let a = if lo == hi { lo } else { rng.gen_range(lo..hi) };
            if a.abs() >= ALPHA_FLOOR {
                return a;
            }
        }
    }

    fn rng_for(&self, id: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(id as u64);
        rng
    }

    fn case(&self, id: usize) -> Result<SweepCase> {
        let mut rng = self.rng_for(id);
        let alpha = self.sample_alpha(&mut rng);
        match self.family {
            SweepFamily::Random => random_case(self.class.director_class(id), alpha, &mut rng),
            SweepFamily::Helicoid => random_helicoid_case(alpha, &mut rng),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurfaceRow {
    pub id: usize,
    pub class: String,
    pub alpha: f64,
    /// `max_s max_n |A_n(s)| / max(1, |P(s)|³)`.
    pub max_abs_coeff: f64,
    pub flagged: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExcludedSurface {
    pub id: usize,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub config: SweepConfig,
    pub per_surface: Vec<SurfaceRow>,
    pub counterexamples: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub excluded: Vec<ExcludedSurface>,
}

impl SweepReport {
    /// Smallest per-surface coefficient size: how close the sweep came to a
    /// counterexample.
    pub fn min_max_abs_coeff(&self) -> Option<f64> {
        self.per_surface.iter().map(|r| r.max_abs_coeff).reduce(f64::min)
    }
}

fn class_label(c: DirectorClass) -> String {
    match c {
        DirectorClass::EuclidStandard => "standard".into(),
        DirectorClass::LorentzNondegenerate(1) => "delta-plus".into(),
        DirectorClass::LorentzNondegenerate(_) => "delta-minus".into(),
        DirectorClass::LorentzLightlikeDirector => "lightlike".into(),
        DirectorClass::Cylindrical(_) => "cylindrical".into(),
    }
}

fn is_cylindrical(rs: &RuledSurface) -> bool {
    matches!(rs.class(), DirectorClass::Cylindrical(_))
        || rs.sample_points(33).into_iter().any(|s| rs.director(s).d1.norm() < CYLINDER_FLOOR)
}

/// Interior sample points (midpoints of `n` equal cells).
fn interior_samples(rs: &RuledSurface, n: usize) -> Vec<f64> {
    let (a, b) = rs.s_range();
    (0..n).map(|i| a + (b - a) * (i as f64 + 0.5) / n as f64).collect()
}

enum Outcome {
    Row(SurfaceRow),
    Excluded(ExcludedSurface),
}

fn evaluate(id: usize, case: &SweepCase, n_samples: usize) -> Outcome {
    let rs = &case.surface;
    if is_cylindrical(rs) {
        return Outcome::Excluded(ExcludedSurface { id, reason: "cylindrical".into() });
    }
    let mut worst = 0.0f64;
    for s in interior_samples(rs, n_samples) {
        let scaled = coefficients(rs, s, &case.v, case.alpha)
            .and_then(|cv| Ok(cv.max_abs() / frame(rs, s)?.p.abs().powi(3).max(1.0)));
        match scaled {
            Ok(x) => worst = worst.max(x),
            Err(e) => return Outcome::Excluded(ExcludedSurface { id, reason: e.to_string() }),
        }
    }
    Outcome::Row(SurfaceRow {
        id,
        class: class_label(rs.class()),
        alpha: case.alpha,
        max_abs_coeff: worst,
        flagged: worst <= FLAG_THRESHOLD,
    })
}

/// Runs the sweep over `cfg.n_surfaces` generated surfaces followed by the
/// `planted` cases (ids continue after the generated ones).
///
/// Cylinders are filtered out before evaluation and reported under
/// `excluded`. Surface `id` draws from ChaCha8 stream `id` of `cfg.seed`,
/// so the report does not depend on thread scheduling.
pub fn run_sweep(cfg: &SweepConfig, planted: &[SweepCase]) -> Result<SweepReport> {
    cfg.validate()?;
    let outcomes: Vec<Outcome> = (0..cfg.n_surfaces + planted.len())
        .into_par_iter()
        .map(|id| {
            if id >= cfg.n_surfaces {
                return evaluate(id, &planted[id - cfg.n_surfaces], cfg.n_s_samples);
            }
            match cfg.case(id) {
                Ok(case) => evaluate(id, &case, cfg.n_s_samples),
                Err(e) => Outcome::Excluded(ExcludedSurface { id, reason: format!("generation failed: {e}") }),
            }
        })
        .collect();
    let mut per_surface = Vec::new();
    let mut excluded = Vec::new();
    for o in outcomes {
        match o {
            Outcome::Row(r) => per_surface.push(r),
            Outcome::Excluded(e) => excluded.push(e),
        }
    }
    let counterexamples = per_surface.iter().filter(|r| r.flagged).map(|r| r.id).collect();
    Ok(SweepReport { config: cfg.clone(), per_surface, counterexamples, excluded })
}

pub fn falsification_sweep(cfg: &SweepConfig) -> Result<SweepReport> {
    run_sweep(cfg, &[])
}
