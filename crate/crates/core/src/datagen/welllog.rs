use alloc::format;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;

use super::rockphysics::RockConstants;
use super::uniform;
use crate::nn::SampleSet;
use crate::{ceil_count, derive_seed, Error, Matrix, Result, SeedRng};

/// Logs per depth sample: porosity, clay fraction, hydrate saturation, Vp.
pub const WELL_LOGS: usize = 4;

/// Value written into muted (missing) samples of a normalized suite.
pub const MUTE_SENTINEL: f64 = -0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LogColumn {
    Phi,
    Vsh,
    Sh,
    Vp,
}

impl LogColumn {
    pub const ALL: [LogColumn; WELL_LOGS] = [LogColumn::Phi, LogColumn::Vsh, LogColumn::Sh, LogColumn::Vp];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            LogColumn::Phi => "phi",
            LogColumn::Vsh => "vsh",
            LogColumn::Sh => "sh",
            LogColumn::Vp => "vp",
        }
    }
}

/// Closed ranges for the three property logs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropertyRanges {
    pub phi: (f64, f64),
    pub vsh: (f64, f64),
    pub sh: (f64, f64),
}

impl PropertyRanges {
    pub fn validate(&self) -> Result<()> {
        for (name, (lo, hi)) in [("phi", self.phi), ("vsh", self.vsh), ("sh", self.sh)] {
            if !(0.0 <= lo && lo <= hi && hi <= 1.0) {
                return Err(Error::argument(format!("{name} range [{lo}, {hi}] is not inside [0, 1]")));
            }
        }
        Ok(())
    }

    pub fn contains(&self, phi: f64, vsh: f64, sh: f64) -> bool {
        let within = |v: f64, (lo, hi): (f64, f64)| (lo..=hi).contains(&v);
        within(phi, self.phi) && within(vsh, self.vsh) && within(sh, self.sh)
    }
}

/// Lithology families used to build training suites.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LogSource {
    Synthetic1,
    /// Shaly, clay-rich marine sediment.
    KrishnaGodavari,
    /// Sandy, low-clay sediment.
    MountElbert,
}

impl LogSource {
    pub const ALL: [LogSource; 3] = [LogSource::Synthetic1, LogSource::KrishnaGodavari, LogSource::MountElbert];

    pub fn ranges(self) -> PropertyRanges {
        match self {
            LogSource::Synthetic1 => PropertyRanges { phi: (0.30, 0.60), vsh: (0.50, 0.80), sh: (0.0, 0.20) },
            LogSource::KrishnaGodavari => PropertyRanges { phi: (0.0, 0.90), vsh: (0.85, 0.95), sh: (0.0, 0.30) },
            LogSource::MountElbert => PropertyRanges { phi: (0.35, 0.45), vsh: (0.0, 0.40), sh: (0.0, 0.60) },
        }
    }
}

/// Four aligned logs (`len x 4`, columns in [`LogColumn`] order) and a mask of
/// touched samples.
#[derive(Debug, Clone, PartialEq)]
pub struct WellLogSuite {
    values: Matrix,
    mask: Vec<bool>,
}

impl WellLogSuite {
    pub fn new(values: Matrix) -> Result<Self> {
        if values.cols() != WELL_LOGS {
            return Err(Error::shape(format!("a log suite has {WELL_LOGS} columns, got {}", values.cols())));
        }
        let mask = alloc::vec![false; values.rows() * WELL_LOGS];
        Ok(WellLogSuite { values, mask })
    }

    pub fn with_mask(values: Matrix, mask: Vec<bool>) -> Result<Self> {
        let mut suite = Self::new(values)?;
        if mask.len() != suite.mask.len() {
            return Err(Error::shape(format!("mask has {} entries, expected {}", mask.len(), suite.mask.len())));
        }
        suite.mask = mask;
        Ok(suite)
    }

    pub fn len(&self) -> usize {
        self.values.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn values(&self) -> &Matrix {
        &self.values
    }

    pub fn get(&self, depth: usize, log: LogColumn) -> f64 {
        self.values.get(depth, log.index())
    }

    pub fn column(&self, log: LogColumn) -> Vec<f64> {
        self.values.column(log.index())
    }

    /// Row-major `len x 4` flags; `true` where a corruption touched the sample.
    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn is_masked(&self, depth: usize, log: LogColumn) -> bool {
        self.mask[depth * WELL_LOGS + log.index()]
    }
}

fn walk_step<R: Rng + ?Sized>(rng: &mut R, drift: &mut f64, p: f64, (lo, hi): (f64, f64), max_change: f64) -> f64 {
    *drift = (0.85 * *drift + 0.5 * uniform(rng, -1.0, 1.0)).clamp(-1.0, 1.0);
    let floor = 0.1 * (hi - lo);
    let bound = (max_change * p.abs().max(floor)).min(0.15 * (hi - lo));
    let next = p + *drift * bound;
    if next <= lo || next >= hi {
        *drift = -*drift;
    }
    next.clamp(lo, hi)
}

fn relative_change(a: f64, b: f64, floor: f64) -> f64 {
    (b - a).abs() / a.abs().max(floor)
}

/// `count` raw (unnormalized) suites of `len` samples each. Properties follow
/// smooth bounded random walks inside `ranges`; every adjacent change of any
/// property, Vp included, stays within `max_adjacent_change` of the local
/// magnitude (floored at a tenth of the property's range for Vp-free logs).
pub fn synth_well_suite(
    ranges: &PropertyRanges,
    len: usize,
    count: usize,
    max_adjacent_change: f64,
    constants: &RockConstants,
    seed: u64,
) -> Result<Vec<WellLogSuite>> {
    ranges.validate()?;
    if !(max_adjacent_change > 0.0) {
        return Err(Error::argument("maximum adjacent change must be > 0"));
    }
    let bounds = [ranges.phi, ranges.vsh, ranges.sh];
    (0..count)
        .map(|n| {
            let mut rng = crate::rng_from_seed(derive_seed(seed, n as u64));
            let mut values = Matrix::zeros(len, WELL_LOGS);
            let mut p: [f64; 3] = core::array::from_fn(|k| uniform(&mut rng, bounds[k].0, bounds[k].1));
            let mut drift = [0.0f64; 3];
            let mut vp = constants.sediment_velocity(p[0], p[1], p[2]);
            for i in 0..len {
                if i > 0 {
                    let proposal: [f64; 3] = core::array::from_fn(|k| {
                        walk_step(&mut rng, &mut drift[k], p[k], bounds[k], max_adjacent_change)
                    });
                    // Pull the step back towards the previous sample until Vp also complies.
                    let mut t = 1.0;
                    while t > 1e-6 {
                        let q: [f64; 3] = core::array::from_fn(|k| p[k] + t * (proposal[k] - p[k]));
                        let v = constants.sediment_velocity(q[0], q[1], q[2]);
                        if relative_change(vp, v, 0.0) <= max_adjacent_change {
                            p = q;
                            vp = v;
                            break;
                        }
                        t *= 0.5;
                    }
                }
                for (k, &v) in p.iter().enumerate() {
                    values.set(i, k, v);
                }
                values.set(i, LogColumn::Vp.index(), vp);
            }
            WellLogSuite::new(values)
        })
        .collect()
}

/// Per-log min-max map onto `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogScaling {
    pub min: [f64; WELL_LOGS],
    pub max: [f64; WELL_LOGS],
}

impl LogScaling {
    /// Extremes of every log over all `suites`.
    pub fn fit(suites: &[WellLogSuite]) -> Result<Self> {
        let mut min = [f64::INFINITY; WELL_LOGS];
        let mut max = [f64::NEG_INFINITY; WELL_LOGS];
        for s in suites {
            for i in 0..s.len() {
                for k in 0..WELL_LOGS {
                    let v = s.values.get(i, k);
                    min[k] = min[k].min(v);
                    max[k] = max[k].max(v);
                }
            }
        }
        for k in 0..WELL_LOGS {
            if !(max[k] > min[k]) {
                return Err(Error::argument(format!("log {} has no spread to normalize", LogColumn::ALL[k].name())));
            }
        }
        Ok(LogScaling { min, max })
    }

    pub fn normalize_value(&self, log: LogColumn, v: f64) -> f64 {
        let k = log.index();
        (v - self.min[k]) / (self.max[k] - self.min[k])
    }

    pub fn denormalize_value(&self, log: LogColumn, v: f64) -> f64 {
        let k = log.index();
        self.min[k] + v * (self.max[k] - self.min[k])
    }

    pub fn normalize(&self, suite: &WellLogSuite) -> WellLogSuite {
        self.apply(suite, Self::normalize_value)
    }

    pub fn denormalize(&self, suite: &WellLogSuite) -> WellLogSuite {
        self.apply(suite, Self::denormalize_value)
    }

    fn apply(&self, suite: &WellLogSuite, f: fn(&Self, LogColumn, f64) -> f64) -> WellLogSuite {
        let values = Matrix::from_fn(suite.len(), WELL_LOGS, |i, k| f(self, LogColumn::ALL[k], suite.values.get(i, k)));
        WellLogSuite { values, mask: suite.mask.clone() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WellCorruption {
    /// Touched samples are set to [`MUTE_SENTINEL`].
    Mute,
    /// Touched samples get up to 10% local-scale uniform noise.
    Noise,
}

/// Where the touched samples of a corrupted log sit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Placement {
    Contiguous,
    Scattered,
}

/// Corrupts `ceil(fraction * len)` samples of one uniformly chosen log.
pub fn corrupt_well_suite(
    suite: &WellLogSuite,
    mode: WellCorruption,
    fraction: f64,
    placement: Placement,
    seed: u64,
) -> Result<WellLogSuite> {
    let mut rng = crate::rng_from_seed(seed);
    let log = LogColumn::ALL[rng.gen_range(0..WELL_LOGS)];
    corrupt_log(suite, log, mode, fraction, placement, &mut rng)
}

/// Like [`corrupt_well_suite`] with the log fixed by the caller.
pub fn corrupt_well_column(
    suite: &WellLogSuite,
    log: LogColumn,
    mode: WellCorruption,
    fraction: f64,
    placement: Placement,
    seed: u64,
) -> Result<WellLogSuite> {
    corrupt_log(suite, log, mode, fraction, placement, &mut crate::rng_from_seed(seed))
}

fn corrupt_log<R: Rng + ?Sized>(
    suite: &WellLogSuite,
    log: LogColumn,
    mode: WellCorruption,
    fraction: f64,
    placement: Placement,
    rng: &mut R,
) -> Result<WellLogSuite> {
    if !(0.1..=0.4).contains(&fraction) {
        return Err(Error::argument(format!("corrupted fraction must lie in [0.1, 0.4], got {fraction}")));
    }
    let len = suite.len();
    let count = ceil_count(fraction, len);
    let points: Vec<usize> = match placement {
        Placement::Contiguous => {
            let start = rng.gen_range(0..=len - count);
            (start..start + count).collect()
        }
        Placement::Scattered => rand::seq::index::sample(rng, len, count).into_vec(),
    };
    let mut out = suite.clone();
    let k = log.index();
    for i in points {
        let v = match mode {
            WellCorruption::Mute => MUTE_SENTINEL,
            WellCorruption::Noise => suite.values.get(i, k) * (1.0 + uniform(rng, -0.1, 0.1)),
        };
        out.values.set(i, k, v);
        out.mask[i * WELL_LOGS + k] = true;
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct WellImageConfig {
    /// Depth samples per image (the image is `window_rows x 4`).
    pub window_rows: usize,
    pub stride: usize,
    /// Corrupted versions generated per clean suite.
    pub corrupted_copies: usize,
    pub fraction: (f64, f64),
    /// Probability that a corrupted copy is muted rather than noised.
    pub mute_probability: f64,
    /// `None` picks contiguous or scattered placement at random per copy.
    pub placement: Option<Placement>,
    pub scope: CorruptionScope,
}

/// What a corrupted copy is cut from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorruptionScope {
    /// Corrupt the whole suite, then cut the image; redrawn until the image
    /// overlaps the corruption, so images see partial and complete overlaps
    /// with long corrupted stretches.
    Suite,
    /// Corrupt every clean image independently.
    Image,
}

impl WellImageConfig {
    pub fn new(window_rows: usize) -> Self {
        WellImageConfig {
            window_rows,
            stride: 1,
            corrupted_copies: 7,
            fraction: (0.1, 0.4),
            mute_probability: 0.5,
            placement: None,
            scope: CorruptionScope::Suite,
        }
    }
}

/// Training images from normalized clean suites. Every window origin yields
/// the clean image as a clean pair plus `corrupted_copies` noisy pairs. With
/// [`CorruptionScope::Suite`] the copies are cut from corrupted suites; with
/// [`CorruptionScope::Image`] each image is corrupted on its own. The result
/// is shuffled.
pub fn well_images(suites: &[WellLogSuite], config: &WellImageConfig, seed: u64) -> Result<SampleSet> {
    let m = config.window_rows;
    if m == 0 || config.stride == 0 {
        return Err(Error::argument("window rows and stride must be >= 1"));
    }
    let (flo, fhi) = config.fraction;
    let draw = |rng: &mut SeedRng, suite: &WellLogSuite| {
        let mode =
            if rng.gen::<f64>() < config.mute_probability { WellCorruption::Mute } else { WellCorruption::Noise };
        let placement =
            config.placement.unwrap_or(if rng.gen::<bool>() { Placement::Contiguous } else { Placement::Scattered });
        let fraction = uniform(rng, flo, fhi);
        let log = LogColumn::ALL[rng.gen_range(0..WELL_LOGS)];
        corrupt_log(suite, log, mode, fraction, placement, rng)
    };
    let mut set = SampleSet::with_shape(m, WELL_LOGS);
    for (n, suite) in suites.iter().enumerate() {
        if suite.len() < m {
            return Err(Error::argument(format!("{m}-sample window exceeds a {}-sample suite", suite.len())));
        }
        let mut rng = crate::rng_from_seed(derive_seed(seed, n as u64));
        for r0 in crate::windowing::window_origins(suite.len(), m, config.stride) {
            let cells = r0 * WELL_LOGS..(r0 + m) * WELL_LOGS;
            let clean = &suite.values.as_slice()[cells.clone()];
            set.push(clean, clean, false)?;
            match config.scope {
                CorruptionScope::Suite => {
                    for _ in 0..config.corrupted_copies {
                        let c = loop {
                            let c = draw(&mut rng, suite)?;
                            if c.mask[cells.clone()].iter().any(|&t| t) {
                                break c;
                            }
                        };
                        set.push(clean, &c.values.as_slice()[cells.clone()], true)?;
                    }
                }
                CorruptionScope::Image => {
                    let image = WellLogSuite::new(Matrix::from_vec(m, WELL_LOGS, clean.to_vec())?)?;
                    for _ in 0..config.corrupted_copies {
                        let c = draw(&mut rng, &image)?;
                        set.push(clean, c.values.as_slice(), true)?;
                    }
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..set.len()).collect();
    order.shuffle(&mut crate::rng_from_seed(derive_seed(seed, u64::MAX)));
    set.subset(&order).reshaped(m, WELL_LOGS)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn suites(source: LogSource, count: usize) -> Vec<WellLogSuite> {
        synth_well_suite(&source.ranges(), 120, count, 0.2, &RockConstants::default(), 9).unwrap()
    }

    #[test]
    fn zero_count_is_empty() {
        assert!(synth_well_suite(&LogSource::Synthetic1.ranges(), 50, 0, 0.2, &RockConstants::default(), 1)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn synthetic1_ranges_respected() {
        for s in suites(LogSource::Synthetic1, 5) {
            for i in 0..s.len() {
                let (phi, vsh, sh) = (s.get(i, LogColumn::Phi), s.get(i, LogColumn::Vsh), s.get(i, LogColumn::Sh));
                assert!((0.30..=0.60).contains(&phi) && (0.50..=0.80).contains(&vsh) && (0.0..=0.20).contains(&sh));
            }
        }
    }

    #[test]
    fn adjacent_change_bounded() {
        for source in LogSource::ALL {
            let r = source.ranges();
            let floors = [0.1 * (r.phi.1 - r.phi.0), 0.1 * (r.vsh.1 - r.vsh.0), 0.1 * (r.sh.1 - r.sh.0), 0.0];
            for s in suites(source, 4) {
                for (k, &floor) in floors.iter().enumerate() {
                    let c = s.values().column(k);
                    for w in c.windows(2) {
                        assert!(relative_change(w[0], w[1], floor) <= 0.2 + 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn invalid_ranges_rejected() {
        let bad = PropertyRanges { phi: (0.5, 0.2), vsh: (0.0, 1.0), sh: (0.0, 1.0) };
        assert!(synth_well_suite(&bad, 10, 1, 0.2, &RockConstants::default(), 0).is_err());
    }

    #[test]
    fn mute_sets_sentinel_and_counts() {
        let s = &suites(LogSource::MountElbert, 1)[0];
        let s = WellLogSuite::new(s.values().block(0, 0, 100, WELL_LOGS)).unwrap();
        let c = corrupt_well_column(&s, LogColumn::Sh, WellCorruption::Mute, 0.1, Placement::Scattered, 3).unwrap();
        assert_eq!(c.mask().iter().filter(|&&m| m).count(), 10);
        for i in 0..100 {
            if c.is_masked(i, LogColumn::Sh) {
                assert_eq!(c.get(i, LogColumn::Sh), MUTE_SENTINEL);
            }
        }
    }

    #[test]
    fn noise_leaves_untouched_bits() {
        let s = &suites(LogSource::KrishnaGodavari, 1)[0];
        let c = corrupt_well_suite(s, WellCorruption::Noise, 0.3, Placement::Contiguous, 4).unwrap();
        for i in 0..s.len() {
            for log in LogColumn::ALL {
                if !c.is_masked(i, log) {
                    assert_eq!(c.get(i, log).to_bits(), s.get(i, log).to_bits());
                } else {
                    assert!((c.get(i, log) - s.get(i, log)).abs() <= 0.1 * s.get(i, log).abs() + 1e-15);
                }
            }
        }
        assert!(corrupt_well_suite(s, WellCorruption::Noise, 0.5, Placement::Contiguous, 4).is_err());
    }

    #[test]
    fn scaling_maps_to_unit_interval() {
        let raw = suites(LogSource::Synthetic1, 3);
        let scaling = LogScaling::fit(&raw).unwrap();
        for s in &raw {
            let n = scaling.normalize(s);
            assert!(n.values().as_slice().iter().all(|v| (0.0..=1.0).contains(v)));
            let back = scaling.denormalize(&n);
            for (a, b) in back.values().as_slice().iter().zip(s.values().as_slice()) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn images_count_and_shape() {
        let raw = suites(LogSource::Synthetic1, 2);
        let scaling = LogScaling::fit(&raw).unwrap();
        let norm: Vec<_> = raw.iter().map(|s| scaling.normalize(s)).collect();
        let set = well_images(&norm, &WellImageConfig::new(70), 5).unwrap();
        assert_eq!(set.len(), 2 * 51 * 8);
        assert_eq!(set.shape(), (70, WELL_LOGS));
        for i in 0..set.len() {
            if !set.is_noisy(i) {
                assert_eq!(set.clean(i), set.corrupted(i));
            }
        }
    }
}
