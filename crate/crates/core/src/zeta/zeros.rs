//! Zero isolation on the critical line and zero-list persistence.
//!
//! Sign changes of Hardy's `Z(t) = e^{iθ(t)} ζ(1/2+it)` are scanned on a
//! grid of four points per mean zero gap and refined by bisection to 1e-9.
//! Completeness is audited against the counting formula
//! `N(t) ≈ θ(t)/π + 1`: any window whose running count deviates by 2 or
//! more is rescanned at doubled density, up to three doublings, after
//! which the window is reported as incomplete.
//!
//! Zero files are plain text, one ascending ASCII decimal per line, with
//! `#` comment lines; `# t_max:` and `# accuracy:` comments carry
//! metadata. Decimal strings round-trip bit-exactly through save/load.

use super::{em_corrections, em_cutoff, rs_theta, zeta_complex, ZetaError};
use num_complex::Complex64;
use rayon::prelude::*;
use std::io::Write;
use std::path::Path;

const ZERO_ACCURACY: f64 = 1e-9;
const HORIZON: f64 = 1e4;
const AUDIT_WINDOW: f64 = 32.0;

/// Sorted positive ordinates of nontrivial zeros with accuracy metadata.
#[derive(Debug, Clone)]
pub struct ZeroList {
    ordinates: Vec<f64>,
    accuracy: f64,
    t_max: f64,
}

impl ZeroList {
    /// Build from parts, validating that ordinates are strictly
    /// increasing, positive, and within `t_max`.
    pub fn new(ordinates: Vec<f64>, accuracy: f64, t_max: f64) -> Result<Self, ZetaError> {
        if !(accuracy > 0.0) || !(t_max > 0.0) {
            return Err(ZetaError::Domain(
                "accuracy and t_max must be positive".into(),
            ));
        }
        for (i, &g) in ordinates.iter().enumerate() {
            if !g.is_finite() || g <= 0.0 {
                return Err(ZetaError::Domain(format!("ordinate {i} is not positive")));
            }
            if g > t_max {
                return Err(ZetaError::Domain(format!(
                    "ordinate {g} exceeds t_max = {t_max}"
                )));
            }
            if i > 0 && ordinates[i - 1] >= g {
                return Err(ZetaError::Domain(format!(
                    "ordinates not strictly increasing at index {i}"
                )));
            }
        }
        Ok(Self {
            ordinates,
            accuracy,
            t_max,
        })
    }

    pub fn ordinates(&self) -> &[f64] {
        &self.ordinates
    }

    pub fn len(&self) -> usize {
        self.ordinates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ordinates.is_empty()
    }

    pub fn accuracy(&self) -> f64 {
        self.accuracy
    }

    /// Completeness horizon.
    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    /// Number of ordinates `< t` and `≤ t` (for the half-weight counting
    /// convention at exact ordinates).
    pub fn count_below(&self, t: f64) -> (usize, usize) {
        let strictly = self.ordinates.partition_point(|&g| g < t);
        let weakly = self.ordinates.partition_point(|&g| g <= t);
        (strictly, weakly)
    }

    /// Ordinates within `[lo, hi]`.
    pub fn window(&self, lo: f64, hi: f64) -> &[f64] {
        let a = self.ordinates.partition_point(|&g| g < lo);
        let b = self.ordinates.partition_point(|&g| g <= hi);
        &self.ordinates[a..b]
    }
}

/// Cached evaluator for `ζ(1/2 + it)` and `Z(t)`; log/rsqrt tables are
/// built once and shared read-only across workers.
pub struct CriticalLine {
    ln_k: Vec<f64>,
    inv_sqrt: Vec<f64>,
    t_cap: f64,
}

impl CriticalLine {
    pub fn new(t_cap: f64) -> Result<Self, ZetaError> {
        if !(t_cap > 0.0) || t_cap > 1.1e5 {
            return Err(ZetaError::Domain(format!(
                "critical-line cap {t_cap} outside (0, 1.1e5]"
            )));
        }
        let n_cap = 2 * em_cutoff(Complex64::new(0.5, t_cap)) + 8;
        let mut ln_k = Vec::with_capacity(n_cap + 1);
        let mut inv_sqrt = Vec::with_capacity(n_cap + 1);
        for k in 0..=n_cap {
            let kf = k.max(1) as f64;
            ln_k.push(kf.ln());
            inv_sqrt.push(1.0 / kf.sqrt());
        }
        Ok(Self {
            ln_k,
            inv_sqrt,
            t_cap,
        })
    }

    /// `ζ(1/2 + it)` with the cached tables.
    pub fn zeta_half(&self, t: f64) -> Complex64 {
        assert!(
            t.abs() <= self.t_cap,
            "t = {t} beyond evaluator cap {}",
            self.t_cap
        );
        let s = Complex64::new(0.5, t);
        let mut n = em_cutoff(s);
        loop {
            let nf = n as f64;
            let mut re = 0.0;
            let mut im = 0.0;
            for k in 1..n {
                let (sin, cos) = (t * self.ln_k[k]).sin_cos();
                re += self.inv_sqrt[k] * cos;
                im -= self.inv_sqrt[k] * sin;
            }
            let mut main = Complex64::new(re, im);
            let n_pow_ms = (-s * nf.ln()).exp();
            main += 0.5 * n_pow_ms;
            main += n_pow_ms * nf / (s - 1.0);
            match em_corrections(s, nf, 1e-13) {
                Some((corr, _)) => return main + corr,
                None => {
                    n *= 2;
                    assert!(n < self.ln_k.len(), "correction series failed to converge");
                }
            }
        }
    }

    /// Hardy `Z(t)` (real part of `e^{iθ} ζ(1/2+it)`).
    pub fn z(&self, t: f64) -> f64 {
        let theta = rs_theta(t).expect("t ≥ 0").theta;
        let zeta = self.zeta_half(t);
        let (sin, cos) = theta.sin_cos();
        cos * zeta.re - sin * zeta.im
    }
}

/// One-shot Hardy `Z(t)`.
pub fn hardy_z(t: f64) -> Result<f64, ZetaError> {
    hardy_z_parts(t).map(|(z, _)| z)
}

/// Hardy `Z(t)` together with the imaginary residue of `e^{iθ} ζ(1/2+it)`,
/// which vanishes for the true functions and so measures evaluation error.
pub fn hardy_z_parts(t: f64) -> Result<(f64, f64), ZetaError> {
    let theta = rs_theta(t)?.theta;
    let zeta = if t == 0.0 {
        Complex64::new(super::zeta_real(0.5)?, 0.0)
    } else {
        zeta_complex(Complex64::new(0.5, t))?
    };
    let (sin, cos) = theta.sin_cos();
    Ok((
        cos * zeta.re - sin * zeta.im,
        sin * zeta.re + cos * zeta.im,
    ))
}

/// Scan grid: four points per mean zero gap `2π / log(t/2π)`.
fn grid_step(t: f64) -> f64 {
    let d = (t / (2.0 * std::f64::consts::PI)).ln().max(1.0);
    2.0 * std::f64::consts::PI / (4.0 * d)
}

fn bisect(line: &CriticalLine, mut lo: f64, mut hi: f64, mut z_lo: f64) -> f64 {
    while hi - lo > ZERO_ACCURACY {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let z_mid = line.z(mid);
        if z_mid == 0.0 {
            return mid;
        }
        if (z_mid > 0.0) == (z_lo > 0.0) {
            lo = mid;
            z_lo = z_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Sign-scan `[lo, hi]` at `density ×` the base grid and bisect each
/// bracket. Deterministic: the grid is built sequentially and parallel
/// results are concatenated in chunk order.
fn scan(line: &CriticalLine, lo: f64, hi: f64, density: f64) -> Vec<f64> {
    let mut grid = vec![lo];
    let mut t = lo;
    while t < hi {
        t = (t + grid_step(t.max(1.0)) / density).min(hi);
        grid.push(t);
    }
    let values: Vec<f64> = grid
        .par_chunks(1024)
        .flat_map_iter(|chunk| chunk.iter().map(|&t| line.z(t)).collect::<Vec<_>>())
        .collect();
    let brackets: Vec<(f64, f64, f64)> = (0..grid.len() - 1)
        .filter(|&i| (values[i] > 0.0) != (values[i + 1] > 0.0))
        .map(|i| (grid[i], grid[i + 1], values[i]))
        .collect();
    brackets
        .par_chunks(64)
        .flat_map_iter(|chunk| {
            chunk
                .iter()
                .map(|&(a, b, za)| bisect(line, a, b, za))
                .collect::<Vec<_>>()
        })
        .collect()
}

fn expected_count(t: f64) -> i64 {
    // The counting formula N(t) ≈ θ(t)/π + 1 carries S(t) as its error
    // term; S(0⁺) = −1 exactly, so below the first zero the count is 0.
    if t < 14.0 {
        return 0;
    }
    let theta = rs_theta(t).expect("t ≥ 0").theta;
    (theta / std::f64::consts::PI + 1.0).round() as i64
}

fn audit_boundaries(t_min: f64, t_max: f64) -> Vec<f64> {
    let mut bs = Vec::new();
    let mut b = t_min + AUDIT_WINDOW;
    while b < t_max {
        bs.push(b);
        b += AUDIT_WINDOW;
    }
    bs.push(t_max);
    bs
}

/// First boundary where the count falls short of the formula by at least
/// `threshold` (positive deviations only: bisection cannot invent zeros,
/// so an excess is always end-noise of the counting formula).
fn first_failing_boundary(
    zeros: &[f64],
    t_min: f64,
    t_max: f64,
    threshold: i64,
    tolerated: &std::collections::HashSet<i64>,
) -> Option<(f64, i64)> {
    let base = expected_count(t_min);
    for b in audit_boundaries(t_min, t_max) {
        if tolerated.contains(&((b / AUDIT_WINDOW).round() as i64)) {
            continue;
        }
        let found = zeros.partition_point(|&g| g <= b) as i64;
        let dev = (expected_count(b) - base) - found;
        if dev >= threshold {
            return Some((b, dev));
        }
    }
    None
}

/// All zeros with ordinate in `(t_min, t_max]`, refined to 1e-9 and
/// audited for completeness against the counting formula.
pub fn find_zeros(t_min: f64, t_max: f64) -> Result<ZeroList, ZetaError> {
    if !(t_min >= 0.0) || !(t_max > t_min) {
        return Err(ZetaError::Domain(format!(
            "need 0 ≤ t_min < t_max, got [{t_min}, {t_max}]"
        )));
    }
    if t_max > HORIZON {
        return Err(ZetaError::Domain(format!(
            "t_max = {t_max} beyond the default 1e4 zero-search horizon"
        )));
    }
    let line = CriticalLine::new(t_max + 1.0)?;
    let mut zeros = scan(&line, t_min, t_max, 1.0);
    zeros.sort_by(f64::total_cmp);

    // Refinement budget is per window: independent marginal regions must
    // not starve each other. The rescan range widens with each attempt
    // because the counting formula's ±1 noise can mask a missed pair for
    // a few windows downstream of where it actually sits.
    //
    // Persisting deviation tolerance: starting the range at t_min > 0
    // contributes its own ±1 of formula noise at the base point, so a
    // stuck +2 there is not evidence of a miss; from t_min = 0 the base
    // is exact and any stuck +2 is reported as incompleteness.
    let persist_allowance = if t_min == 0.0 { 1 } else { 2 };
    let mut budgets: std::collections::HashMap<i64, u32> = std::collections::HashMap::new();
    let mut tolerated: std::collections::HashSet<i64> = std::collections::HashSet::new();
    while let Some((boundary, dev)) =
        first_failing_boundary(&zeros, t_min, t_max, 2, &tolerated)
    {
        let key = (boundary / AUDIT_WINDOW).round() as i64;
        let attempts = budgets.entry(key).or_insert(0);
        if *attempts >= 3 {
            if dev <= persist_allowance {
                tolerated.insert(key);
                continue;
            }
            return Err(ZetaError::Incomplete {
                lo: (boundary - 2.0 * AUDIT_WINDOW).max(t_min),
                hi: boundary,
                deviation: dev,
            });
        }
        *attempts += 1;
        let reach = 2.0 * AUDIT_WINDOW * 2f64.powi(*attempts as i32 - 1);
        let lo = (boundary - reach).max(t_min);
        let extra = scan(&line, lo, boundary.min(t_max), 2f64.powi(*attempts as i32));
        for z in extra {
            let pos = zeros.partition_point(|&g| g < z);
            let dup_before = pos > 0 && (zeros[pos - 1] - z).abs() <= 4.0 * ZERO_ACCURACY;
            let dup_after = pos < zeros.len() && (zeros[pos] - z).abs() <= 4.0 * ZERO_ACCURACY;
            if !dup_before && !dup_after {
                zeros.insert(pos, z);
            }
        }
    }
    ZeroList::new(zeros, ZERO_ACCURACY, t_max)
}

/// Count audit for an existing list (no zeta evaluations).
#[derive(Debug, Clone)]
pub struct AuditReport {
    pub count: usize,
    pub expected_final: i64,
    pub max_boundary_deviation: i64,
    pub worst_window: Option<(f64, f64, i64)>,
    pub pass: bool,
}

pub fn audit(list: &ZeroList) -> AuditReport {
    let t_max = list.t_max();
    let mut max_dev = 0i64;
    let mut worst = None;
    let mut prev = 0.0f64;
    for b in audit_boundaries(0.0, t_max) {
        let found = list.ordinates().partition_point(|&g| g <= b) as i64;
        let dev = expected_count(b) - found;
        if dev.abs() > max_dev.abs() {
            max_dev = dev;
            worst = Some((prev, b, dev));
        }
        prev = b;
    }
    let expected_final = expected_count(t_max);
    AuditReport {
        count: list.len(),
        expected_final,
        max_boundary_deviation: max_dev,
        worst_window: if max_dev.abs() >= 2 { worst } else { None },
        pass: max_dev.abs() < 2 && (expected_final - list.len() as i64).abs() <= 3,
    }
}

/// Render a zero list in the text format: metadata comments then one
/// ordinate per line at 1e-9 precision. Decimal strings survive a
/// render→parse→render cycle unchanged.
pub fn render_zeros(list: &ZeroList) -> String {
    let mut out = String::with_capacity(list.len() * 14 + 64);
    out.push_str(&format!("# t_max: {:.9}\n", list.t_max()));
    out.push_str(&format!("# accuracy: {:e}\n", list.accuracy()));
    for &g in list.ordinates() {
        out.push_str(&format!("{g:.9}\n"));
    }
    out
}

/// Write a zero list to a file in the text format.
pub fn save_zeros(list: &ZeroList, path: &Path) -> Result<(), ZetaError> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    out.write_all(render_zeros(list).as_bytes())?;
    Ok(())
}

/// Read a zero file (ascending decimals, `#` comments). `# t_max:` and
/// `# accuracy:` comments override the defaults (last ordinate, 1e-9).
pub fn load_zeros(path: &Path) -> Result<ZeroList, ZetaError> {
    parse_zeros(&std::fs::read_to_string(path)?)
}

/// Parse the text format from a string.
pub fn parse_zeros(text: &str) -> Result<ZeroList, ZetaError> {
    let mut ordinates = Vec::new();
    let mut t_max = None;
    let mut accuracy = None;
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(comment) = trimmed.strip_prefix('#') {
            let comment = comment.trim();
            if let Some(v) = comment.strip_prefix("t_max:") {
                t_max = Some(v.trim().parse::<f64>().map_err(|e| ZetaError::BadZeroFile {
                    line: line_no,
                    reason: format!("bad t_max: {e}"),
                })?);
            } else if let Some(v) = comment.strip_prefix("accuracy:") {
                accuracy = Some(v.trim().parse::<f64>().map_err(|e| {
                    ZetaError::BadZeroFile {
                        line: line_no,
                        reason: format!("bad accuracy: {e}"),
                    }
                })?);
            }
            continue;
        }
        let value: f64 = trimmed.parse().map_err(|_| ZetaError::BadZeroFile {
            line: line_no,
            reason: format!("not a number: {trimmed:?}"),
        })?;
        if !value.is_finite() || value <= 0.0 {
            return Err(ZetaError::BadZeroFile {
                line: line_no,
                reason: "ordinate must be positive and finite".into(),
            });
        }
        if let Some(&last) = ordinates.last() {
            if value <= last {
                return Err(ZetaError::BadZeroFile {
                    line: line_no,
                    reason: format!("not ascending: {value} after {last}"),
                });
            }
        }
        ordinates.push(value);
    }
    let t_max = t_max.unwrap_or_else(|| ordinates.last().copied().unwrap_or(1.0));
    ZeroList::new(ordinates, accuracy.unwrap_or(ZERO_ACCURACY), t_max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};

    #[test]
    fn hardy_z_at_zero_is_zeta_half() {
        assert_abs_diff_eq!(hardy_z(0.0).unwrap(), -1.4603545088, epsilon = 1e-8);
    }

    #[test]
    fn z_sign_change_at_first_zero() {
        let a = hardy_z(14.0).unwrap();
        let b = hardy_z(14.2).unwrap();
        assert!(a * b < 0.0, "Z(14) = {a}, Z(14.2) = {b}");
    }

    #[test]
    fn imaginary_residue_vanishes_at_random_heights() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let t = rng.gen_range(1.0..1000.0);
            let (_, residue) = hardy_z_parts(t).unwrap();
            assert!(residue.abs() <= 1e-9, "t = {t}: residue {residue:e}");
        }
    }

    #[test]
    fn critical_line_matches_one_shot() {
        let line = CriticalLine::new(200.0).unwrap();
        for t in [1.0, 14.1347, 99.5, 150.0] {
            assert_abs_diff_eq!(line.z(t), hardy_z(t).unwrap(), epsilon = 1e-11);
        }
    }

    #[test]
    fn first_ten_zeros() {
        let list = find_zeros(0.0, 50.0).unwrap();
        assert_eq!(list.len(), 10);
        assert_abs_diff_eq!(list.ordinates()[0], 14.134725142, epsilon = 1e-7);
        assert_abs_diff_eq!(list.ordinates()[9], 49.773832478, epsilon = 1e-7);
    }

    #[test]
    fn empty_below_first_zero() {
        let list = find_zeros(0.0, 14.0).unwrap();
        assert!(list.is_empty());
    }

    #[test]
    fn close_pair_near_7005_is_resolved() {
        // Lehmer-style close pair: gap ≈ 0.0377, far below the mean gap
        let list = find_zeros(6995.0, 7015.0).unwrap();
        let pair = list.window(7005.0, 7005.2);
        assert_eq!(pair.len(), 2, "window: {pair:?}");
        assert_abs_diff_eq!(pair[0], 7005.062866, epsilon = 1e-5);
        assert_abs_diff_eq!(pair[1], 7005.100565, epsilon = 1e-5);
    }

    #[test]
    fn counts_match_formula_at_1000() {
        let list = find_zeros(0.0, 1000.0).unwrap();
        assert_eq!(list.len() as i64, expected_count(1000.0));
        assert_eq!(list.len(), 649);
        let report = audit(&list);
        assert!(report.pass);
    }

    #[test]
    fn horizon_rejected() {
        assert!(find_zeros(0.0, 2e4).is_err());
    }

    #[test]
    fn save_load_round_trip_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let p1 = dir.path().join("z1.txt");
        let p2 = dir.path().join("z2.txt");
        let list = find_zeros(0.0, 100.0).unwrap();
        save_zeros(&list, &p1).unwrap();
        let back = load_zeros(&p1).unwrap();
        assert_eq!(back.len(), list.len());
        assert_eq!(back.t_max(), list.t_max());
        assert_eq!(back.accuracy(), list.accuracy());
        save_zeros(&back, &p2).unwrap();
        assert_eq!(
            std::fs::read(&p1).unwrap(),
            std::fs::read(&p2).unwrap(),
            "decimal strings must round-trip unchanged"
        );
    }

    #[test]
    fn malformed_line_is_named() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("bad.txt");
        std::fs::write(&p, "14.134725142\n21.022039639\nabc\n").unwrap();
        match load_zeros(&p) {
            Err(ZetaError::BadZeroFile { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected BadZeroFile, got {other:?}"),
        }
    }

    #[test]
    fn non_monotone_rejected_with_line() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("bad.txt");
        std::fs::write(&p, "21.0\n14.0\n").unwrap();
        match load_zeros(&p) {
            Err(ZetaError::BadZeroFile { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected BadZeroFile, got {other:?}"),
        }
    }

    #[test]
    fn metadata_comments_parsed() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("meta.txt");
        std::fs::write(&p, "# t_max: 30.0\n# accuracy: 1e-6\n14.134725\n21.022040\n25.010858\n")
            .unwrap();
        let list = load_zeros(&p).unwrap();
        assert_eq!(list.t_max(), 30.0);
        assert_eq!(list.accuracy(), 1e-6);
        assert_eq!(list.len(), 3);
    }

    #[test]
    fn zero_list_validation() {
        assert!(ZeroList::new(vec![2.0, 1.0], 1e-9, 10.0).is_err());
        assert!(ZeroList::new(vec![1.0, 2.0], 1e-9, 1.5).is_err());
        assert!(ZeroList::new(vec![-1.0], 1e-9, 10.0).is_err());
        let ok = ZeroList::new(vec![1.0, 2.0], 1e-9, 10.0).unwrap();
        assert_eq!(ok.count_below(2.0), (1, 2));
    }

    #[test]
    fn find_zeros_deterministic_across_thread_counts() {
        let reference = find_zeros(0.0, 200.0).unwrap();
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(2)
            .build()
            .unwrap();
        let other = pool.install(|| find_zeros(0.0, 200.0).unwrap());
        assert_eq!(reference.len(), other.len());
        for (a, b) in reference.ordinates().iter().zip(other.ordinates()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }
}
