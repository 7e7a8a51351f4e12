//! Monte Carlo estimators for logical error and acceptance rates.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::code::Basis;
use crate::protocol::ProtocolSchedule;
use crate::Result;

use super::frame::{Effect, FrameSim, LocationKind};
use super::lut::LutDecoder;
use super::noise::NoiseModel;

/// Two-sided 95% normal quantile.
const Z95: f64 = 1.959_963_984_540_054;

/// Wilson score interval at 95% for `successes` out of `trials`.
pub fn wilson(successes: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let phat = successes as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let center = (phat + z2 / (2.0 * n)) / denom;
    let half = Z95 * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lo = if successes == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if successes == trials {
        1.0
    } else {
        (center + half).min(1.0)
    };
    (lo, hi)
}

/// Which logical error an estimator tracks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Estimator {
    /// Residual X errors on the output, detected by logical Z.
    X,
    /// Residual Z errors, copied onto an ideal `|+>_L` block and read out in the X basis.
    Z,
}

impl std::fmt::Display for Estimator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Estimator::X => "X",
            Estimator::Z => "Z",
        })
    }
}

/// Aggregated outcome of a sampling run for one estimator.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimResult {
    pub estimator: Estimator,
    pub p: f64,
    pub shots: u64,
    pub accepted: u64,
    pub logical_failures: u64,
    /// Failures caused by a syndrome missing from the decoder table.
    pub heralded: u64,
    pub acceptance_rate: f64,
    pub acceptance_ci: (f64, f64),
    pub logical_error_rate: f64,
    pub logical_error_ci: (f64, f64),
    pub seed: u64,
}

impl SimResult {
    fn new(estimator: Estimator, p: f64, seed: u64, shots: u64, accepted: u64, failures: u64, heralded: u64) -> Self {
        assert!(failures <= accepted && accepted <= shots);
        let rate = |a: u64, b: u64| if b == 0 { 0.0 } else { a as f64 / b as f64 };
        Self {
            estimator,
            p,
            shots,
            accepted,
            logical_failures: failures,
            heralded,
            acceptance_rate: rate(accepted, shots),
            acceptance_ci: wilson(accepted, shots),
            logical_error_rate: rate(failures, accepted),
            logical_error_ci: wilson(failures, accepted),
            seed,
        }
    }

    /// Half-width of the acceptance-rate interval.
    pub fn acceptance_half_width(&self) -> f64 {
        (self.acceptance_ci.1 - self.acceptance_ci.0) / 2.0
    }

    pub fn csv_record(&self, code: &str) -> CsvRecord {
        CsvRecord {
            code: code.to_string(),
            p: self.p,
            shots: self.shots,
            accepted: self.accepted,
            failures: self.logical_failures,
            r_a: self.acceptance_rate,
            r_a_ci_lo: self.acceptance_ci.0,
            r_a_ci_hi: self.acceptance_ci.1,
            p_l: self.logical_error_rate,
            p_l_ci_lo: self.logical_error_ci.0,
            p_l_ci_hi: self.logical_error_ci.1,
            seed: self.seed,
            estimator: self.estimator,
        }
    }
}

/// One CSV row.
#[derive(Clone, Debug, Serialize)]
pub struct CsvRecord {
    pub code: String,
    pub p: f64,
    pub shots: u64,
    pub accepted: u64,
    pub failures: u64,
    #[serde(rename = "r_A")]
    pub r_a: f64,
    #[serde(rename = "r_A_ci_lo")]
    pub r_a_ci_lo: f64,
    #[serde(rename = "r_A_ci_hi")]
    pub r_a_ci_hi: f64,
    pub p_l: f64,
    pub p_l_ci_lo: f64,
    pub p_l_ci_hi: f64,
    pub seed: u64,
    pub estimator: Estimator,
}

/// Renders results as CSV text with a header row.
pub fn to_csv(code: &str, results: &[SimResult]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in results {
        w.serialize(r.csv_record(code))
            .map_err(|e| crate::Error::Invalid(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| crate::Error::Invalid(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("CSV output is UTF-8"))
}

/// Least-squares slope of `log y` against `log x`, skipping points with `y == 0`.
pub fn loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Fault locations sharing one firing probability.
#[derive(Clone, Debug)]
struct Class {
    ln_miss: f64,
    certain: bool,
    locations: Vec<u32>,
    paulis: Vec<u8>,
}

/// Decides acceptance and logical failure of one shot.
#[derive(Clone, Debug)]
pub struct Judge {
    lut_x: LutDecoder,
    lut_z: LutDecoder,
    logical_z: Vec<u64>,
    logical_x: Vec<u64>,
}

/// Per-shot verdict.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Verdict {
    pub accepted: bool,
    pub fail_x: bool,
    pub fail_z: bool,
    pub heralded_x: bool,
    pub heralded_z: bool,
}

impl Judge {
    pub fn new(schedule: &ProtocolSchedule) -> Result<Self> {
        let code = schedule.code();
        Ok(Self {
            lut_x: LutDecoder::new(code, Basis::X)?,
            lut_z: LutDecoder::new(code, Basis::Z)?,
            logical_z: code.logicals_z().row_words64(),
            logical_x: code.logicals_x().row_words64(),
        })
    }

    /// Evaluates an accepted shot's effect; `gadget` enables the Z verdict.
    pub fn judge(&self, e: &Effect, accepted: bool, gadget: bool) -> Verdict {
        let mut v = Verdict {
            accepted,
            ..Default::default()
        };
        if !accepted {
            return v;
        }
        let odd = |rows: &[u64], w: u64| rows.iter().any(|&r| (r & w).count_ones() & 1 == 1);
        match self.lut_x.decode(e.residual_x) {
            Some(c) => v.fail_x = odd(&self.logical_z, e.residual_x ^ c),
            None => (v.fail_x, v.heralded_x) = (true, true),
        }
        if gadget {
            // correction from the X-basis record, then a perfect round on the copy
            let after = self.lut_z.decode(e.gadget_record).map(|c| e.gadget_z ^ c);
            match after.and_then(|r| self.lut_z.decode(r).map(|c| r ^ c)) {
                Some(r) => v.fail_z = odd(&self.logical_x, r),
                None => (v.fail_z, v.heralded_z) = (true, true),
            }
        }
        v
    }
}

#[derive(Clone, Copy, Debug, Default)]
struct Counts {
    shots: u64,
    accepted: u64,
    fail_x: u64,
    fail_z: u64,
    heralded_x: u64,
    heralded_z: u64,
}

impl Counts {
    fn add(&mut self, o: &Counts) {
        self.shots += o.shots;
        self.accepted += o.accepted;
        self.fail_x += o.fail_x;
        self.fail_z += o.fail_z;
        self.heralded_x += o.heralded_x;
        self.heralded_z += o.heralded_z;
    }
}

/// Samples shots of a flattened protocol under a noise model.
#[derive(Clone, Debug)]
pub struct Sampler {
    sim: FrameSim,
    judge: Judge,
    classes: Vec<Class>,
    noise: NoiseModel,
}

impl Sampler {
    pub fn new(schedule: &ProtocolSchedule, noise: NoiseModel, gadget: bool) -> Result<Self> {
        let sim = FrameSim::new(schedule, gadget);
        let judge = Judge::new(schedule)?;
        let mut classes: Vec<(f64, Vec<u32>, Vec<u8>)> = Vec::new();
        for (i, loc) in sim.locations().iter().enumerate() {
            let q = match loc.kind {
                LocationKind::Cx => noise.two_qubit_depol,
                LocationKind::Init(_) | LocationKind::Measure(_) => noise.prep_meas_flip,
                LocationKind::Idle => noise.idle_depol,
                LocationKind::Depolarize => noise.gadget_depol,
            };
            if q <= 0.0 {
                continue;
            }
            let idx = match classes.iter().position(|c| c.0 == q) {
                Some(j) => j,
                None => {
                    classes.push((q, Vec::new(), Vec::new()));
                    classes.len() - 1
                }
            };
            classes[idx].1.push(i as u32);
            classes[idx].2.push(loc.kind.pauli_count() as u8);
        }
        let classes = classes
            .into_iter()
            .map(|(q, locations, paulis)| Class {
                ln_miss: (1.0 - q).ln(),
                certain: q >= 1.0,
                locations,
                paulis,
            })
            .collect();
        Ok(Self {
            sim,
            judge,
            classes,
            noise,
        })
    }

    pub fn sim(&self) -> &FrameSim {
        &self.sim
    }

    pub fn judge(&self) -> &Judge {
        &self.judge
    }

    /// Runs `shots` shots split across `threads` workers. Reproducible from
    /// `(seed, threads)`.
    fn run(&self, shots: u64, seed: u64, threads: usize) -> Counts {
        let threads = threads.max(1).min(shots.max(1) as usize);
        let mut total = Counts::default();
        if threads == 1 {
            total.add(&self.run_chunk(shots, seed, 0));
            return total;
        }
        let parts: Vec<Counts> = std::thread::scope(|s| {
            let handles: Vec<_> = (0..threads)
                .map(|w| {
                    let lo = shots * w as u64 / threads as u64;
                    let hi = shots * (w as u64 + 1) / threads as u64;
                    s.spawn(move || self.run_chunk(hi - lo, seed, w as u64))
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("worker panicked"))
                .collect()
        });
        for p in &parts {
            total.add(p);
        }
        total
    }

    fn run_chunk(&self, shots: u64, seed: u64, stream: u64) -> Counts {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        let gadget = self.sim.has_gadget();
        let mut counts = Counts {
            shots,
            ..Default::default()
        };
        if shots == 0 {
            return counts;
        }
        // position of the next fault in each class's shot-major stream
        let mut next: Vec<u64> = self.classes.iter().map(|c| skip(&mut rng, c)).collect();
        let lens: Vec<u64> = self.classes.iter().map(|c| c.locations.len() as u64).collect();
        let mut clean_until = 0u64;
        loop {
            let shot = next
                .iter()
                .zip(&lens)
                .map(|(&pos, &len)| pos / len)
                .min()
                .unwrap_or(shots)
                .min(shots);
            // shots without faults accept with no logical error
            counts.accepted += shot - clean_until;
            if shot == shots {
                break;
            }
            let mut e = Effect::default();
            for (ci, class) in self.classes.iter().enumerate() {
                let base = shot * lens[ci];
                while next[ci] < base + lens[ci] {
                    let li = (next[ci] - base) as usize;
                    let pauli = rng.random_range(0..class.paulis[li]) as usize;
                    e ^= self.sim.effect(class.locations[li] as usize, pauli);
                    next[ci] += 1 + skip(&mut rng, class);
                }
            }
            let accepted = self.sim.acceptance().accepts(&e.records);
            let v = self.judge.judge(&e, accepted, gadget);
            counts.accepted += u64::from(v.accepted);
            counts.fail_x += u64::from(v.fail_x);
            counts.fail_z += u64::from(v.fail_z);
            counts.heralded_x += u64::from(v.heralded_x);
            counts.heralded_z += u64::from(v.heralded_z);
            clean_until = shot + 1;
        }
        counts
    }
}

// Number of fault-free draws before the next fault.
#[inline]
fn skip(rng: &mut ChaCha8Rng, class: &Class) -> u64 {
    if class.certain {
        return 0;
    }
    let u: f64 = 1.0 - rng.random::<f64>();
    let s = (u.ln() / class.ln_miss).floor();
    if s >= u64::MAX as f64 / 2.0 {
        u64::MAX / 2
    } else {
        s as u64
    }
}

fn result(est: Estimator, noise: &NoiseModel, seed: u64, c: &Counts) -> SimResult {
    let (f, h) = match est {
        Estimator::X => (c.fail_x, c.heralded_x),
        Estimator::Z => (c.fail_z, c.heralded_z),
    };
    SimResult::new(est, noise.p, seed, c.shots, c.accepted, f, h)
}

/// Logical-X failure rate of the protocol output after one perfect decoding round.
pub fn estimate_x_logical(
    schedule: &ProtocolSchedule,
    noise: NoiseModel,
    shots: u64,
    seed: u64,
    threads: usize,
) -> Result<SimResult> {
    let s = Sampler::new(schedule, noise, false)?;
    Ok(result(Estimator::X, &s.noise, seed, &s.run(shots, seed, threads)))
}

/// Logical-Z failure rate measured through the copy-and-measure gadget.
pub fn estimate_z_logical(
    schedule: &ProtocolSchedule,
    noise: NoiseModel,
    shots: u64,
    seed: u64,
    threads: usize,
) -> Result<SimResult> {
    Ok(estimate_both(schedule, noise, shots, seed, threads)?.1)
}

/// Both estimators from the same shots (the gadget does not affect the X verdict).
pub fn estimate_both(
    schedule: &ProtocolSchedule,
    noise: NoiseModel,
    shots: u64,
    seed: u64,
    threads: usize,
) -> Result<(SimResult, SimResult)> {
    let s = Sampler::new(schedule, noise, true)?;
    let c = s.run(shots, seed, threads);
    Ok((
        result(Estimator::X, &s.noise, seed, &c),
        result(Estimator::Z, &s.noise, seed, &c),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::tests::steane_encoder;
    use crate::code::registry_lookup;
    use crate::protocol::build_protocol;

    fn steane_schedule() -> ProtocolSchedule {
        let code = registry_lookup("steane").unwrap();
        let c = steane_encoder();
        build_protocol([&c, &c, &c, &c], &code).unwrap()
    }

    #[test]
    fn wilson_reference_values() {
        // closed form at phat = 1/2
        let (lo, hi) = wilson(50, 100);
        let z = Z95;
        let half = z * (0.25 / 100.0 + z * z / 40000.0f64).sqrt() / (1.0 + z * z / 100.0);
        assert!((lo - (0.5 - half)).abs() < 1e-12 && (hi - (0.5 + half)).abs() < 1e-12);
        assert_eq!(wilson(0, 0), (0.0, 1.0));
        let (lo, _) = wilson(0, 1000);
        assert_eq!(lo, 0.0);
    }

    #[test]
    fn slope_of_power_law() {
        let pts: Vec<(f64, f64)> = [1e-3, 2e-3, 5e-3].iter().map(|&p: &f64| (p, 7.0 * p.powi(3))).collect();
        assert!((loglog_slope(&pts).unwrap() - 3.0).abs() < 1e-9);
        assert_eq!(loglog_slope(&[(1e-3, 0.0), (2e-3, 1.0)]), None);
    }

    #[test]
    fn noiseless_accepts_everything() {
        let (x, z) = estimate_both(&steane_schedule(), NoiseModel::noiseless(), 1000, 3, 1).unwrap();
        for r in [x, z] {
            assert_eq!((r.shots, r.accepted, r.logical_failures), (1000, 1000, 0));
            assert_eq!(r.acceptance_rate, 1.0);
        }
    }

    #[test]
    fn seeded_runs_repeat() {
        let s = steane_schedule();
        let a = estimate_both(&s, NoiseModel::new(5e-3), 20_000, 11, 2).unwrap();
        let b = estimate_both(&s, NoiseModel::new(5e-3), 20_000, 11, 2).unwrap();
        assert_eq!(a, b);
        let c = estimate_both(&s, NoiseModel::new(5e-3), 20_000, 12, 2).unwrap();
        assert_ne!(a.0.accepted, c.0.accepted);
    }

    #[test]
    fn skip_sampling_matches_location_count() {
        // with idle, init and gate noise all at one level the expected fault
        // count per shot is the event probability summed over locations
        let s = steane_schedule();
        let noise = NoiseModel::new(0.02);
        let sampler = Sampler::new(&s, noise, false).unwrap();
        let expected: f64 = sampler
            .classes
            .iter()
            .map(|c| c.locations.len() as f64 * (1.0 - c.ln_miss.exp()))
            .sum();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let shots = 20_000u64;
        let mut total = 0u64;
        for c in &sampler.classes {
            let stream = shots * c.locations.len() as u64;
            let mut pos = skip(&mut rng, c);
            while pos < stream {
                total += 1;
                pos += 1 + skip(&mut rng, c);
            }
        }
        let mean = total as f64 / shots as f64;
        assert!((mean - expected).abs() < 0.05 * expected, "{mean} vs {expected}");
    }

    #[test]
    fn csv_has_expected_columns() {
        let r = estimate_x_logical(&steane_schedule(), NoiseModel::new(1e-3), 100, 1, 1).unwrap();
        let text = to_csv("steane", &[r]).unwrap();
        let header = text.lines().next().unwrap();
        assert_eq!(
            header,
            "code,p,shots,accepted,failures,r_A,r_A_ci_lo,r_A_ci_hi,p_l,p_l_ci_lo,p_l_ci_hi,seed,estimator"
        );
        assert_eq!(text.lines().count(), 2);
    }
}
