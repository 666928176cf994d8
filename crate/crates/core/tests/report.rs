use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use facediv_core::config::BinConfig;
use facediv_core::diversity::{report, BinPolicy, EvennessBase};
use facediv_core::features::{Dimension, FeatureRow, FeatureTable};
use facediv_core::Error;

fn table_from(f: impl Fn(usize, Dimension) -> Option<f64>, rows: usize) -> FeatureTable {
    FeatureTable {
        rows: (0..rows)
            .map(|i| {
                let mut r = FeatureRow::new(format!("f{i:03}"));
                for &d in Dimension::ALL {
                    match f(i, d) {
                        Some(v) => r.set(d, v),
                        None => r.invalidate(d, "missing"),
                    }
                }
                r
            })
            .collect(),
        config: None,
    }
}

fn six_bins() -> BinConfig {
    BinConfig {
        overrides: Dimension::ALL.iter().map(|&d| (d, BinPolicy::EqualWidth(6))).collect(),
        ..BinConfig::default()
    }
}

#[test]
fn uniform_table_is_perfectly_even() {
    let t = table_from(|i, d| Some(i as f64 * (1.0 + d.index() as f64)), 60);
    let rep = report(&t, &six_bins()).unwrap();
    for row in &rep.rows {
        let s = row.scores.as_ref().unwrap();
        assert!((s.shannon_e - 1.0).abs() < 1e-12, "{}", row.measurement);
        assert!((s.simpson_e - 1.0).abs() < 1e-12, "{}", row.measurement);
        assert!((s.simpson_d - 6.0).abs() < 1e-12);
    }
}

#[test]
fn uniform_under_default_bins() {
    // one face per fixed class, equal counts in every equal-width bin
    let fixed = |d: Dimension, i: usize| match d {
        Dimension::AgePred | Dimension::AgeLabel => [1.0, 8.0, 15.0, 25.0, 40.0, 50.0, 70.0][i % 7],
        Dimension::GenderLabel => (i % 2) as f64,
        Dimension::PoseSigned => [-1.0, 0.0, 1.0][i % 3],
        _ => i as f64,
    };
    let t = table_from(|i, d| Some(fixed(d, i)), 42 * 7);
    let bins = BinConfig::default();
    let rep = report(&t, &bins).unwrap();
    for row in &rep.rows {
        let s = row.scores.as_ref().unwrap();
        assert!((s.shannon_e - 1.0).abs() < 1e-12, "{} {}", row.measurement, s.shannon_e);
        assert_eq!(s.classes, bins.policy_for(row.dimension).bin_count());
    }
    let gender = rep.rows.iter().find(|r| r.dimension == Dimension::GenderLabel).unwrap();
    let s = gender.scores.as_ref().unwrap();
    assert!((s.simpson_d - 2.0).abs() < 1e-12 && (s.shannon_h - 2f64.ln()).abs() < 1e-12);
}

#[test]
fn single_face_has_no_diversity() {
    let t = table_from(|_, d| Some(d.index() as f64 * 0.5), 1);
    let rep = report(&t, &BinConfig::default()).unwrap();
    assert_eq!(rep.rows.len(), Dimension::ALL.len());
    for row in &rep.rows {
        let s = row.scores.as_ref().unwrap();
        assert_eq!(s.shannon_h, 0.0, "{}", row.measurement);
        assert_eq!(s.simpson_d, 1.0);
        assert_eq!(s.variance, 0.0);
    }
}

#[test]
fn empty_table_is_an_error() {
    let t = table_from(|_, _| None, 0);
    assert!(matches!(report(&t, &BinConfig::default()), Err(Error::EmptyTable)));
}

#[test]
fn all_invalid_dimension_is_absent() {
    let t = table_from(|_, d| (d != Dimension::Ita).then_some(1.0), 5);
    let rep = report(&t, &BinConfig::default()).unwrap();
    let ita = rep.rows.iter().find(|r| r.dimension == Dimension::Ita).unwrap();
    assert!(ita.scores.is_none() && ita.reason.is_some());
    assert_eq!((ita.n, ita.excluded), (0, 5));
}

struct Expected {
    h: f64,
    d: f64,
    e_h: f64,
    e_d: f64,
    mean: f64,
    var: f64,
}

/// Straightforward recomputation: equal-width edges, linear bin search,
/// counts turned into scores.
fn brute(values: &[f64], policy: &BinPolicy, base: EvennessBase) -> Expected {
    let edges: Vec<f64> = match policy {
        BinPolicy::FixedEdges(e) => e.clone(),
        BinPolicy::EqualWidth(b) => {
            let lo = values.iter().cloned().fold(f64::MAX, f64::min);
            let hi = values.iter().cloned().fold(f64::MIN, f64::max);
            let w = if hi > lo { (hi - lo) / *b as f64 } else { 1.0 };
            let mut e: Vec<f64> = (0..=*b).map(|i| lo + w * i as f64).collect();
            if hi > lo {
                e[*b] = hi;
            }
            e
        }
    };
    let b = edges.len() - 1;
    let mut counts = vec![0usize; b];
    for &v in values {
        let mut k = 0;
        while k + 1 < b && v >= edges[k + 1] {
            k += 1;
        }
        counts[k] += 1;
    }
    let n = values.len() as f64;
    let mut h = 0.0;
    let mut sq = 0.0;
    for &c in &counts {
        if c > 0 {
            let p = c as f64 / n;
            h -= p * p.ln();
            sq += p * p;
        }
    }
    let s = match base {
        EvennessBase::Nominal => b,
        EvennessBase::Occupied => counts.iter().filter(|&&c| c > 0).count(),
    } as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    Expected { h, d: 1.0 / sq, e_h: if s > 1.0 { h / s.ln() } else { 1.0 }, e_d: 1.0 / sq / s, mean, var }
}

#[test]
fn report_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for base in [EvennessBase::Nominal, EvennessBase::Occupied] {
        for trial in 0..5 {
            let rows = rng.gen_range(1..=100);
            let cells: Vec<Vec<Option<f64>>> = (0..rows)
                .map(|_| {
                    Dimension::ALL
                        .iter()
                        .map(|d| match d {
                            _ if rng.gen_bool(0.1) => None,
                            Dimension::GenderLabel => Some(rng.gen_range(0..2) as f64),
                            Dimension::PoseSigned => Some(rng.gen_range(-1..=1) as f64),
                            Dimension::AgeLabel | Dimension::AgePred => Some(rng.gen_range(0.0..100.0)),
                            _ => Some(rng.gen_range(-5.0..50.0)),
                        })
                        .collect()
                })
                .collect();
            let t = table_from(|i, d| cells[i][d.index()], rows);
            let bins = BinConfig { evenness: base, ..BinConfig::default() };
            let rep = report(&t, &bins).unwrap();
            for row in &rep.rows {
                let values: Vec<f64> = cells.iter().filter_map(|c| c[row.dimension.index()]).collect();
                assert_eq!(row.n + row.excluded, rows);
                let Some(s) = &row.scores else {
                    assert!(values.is_empty());
                    continue;
                };
                let e = brute(&values, &bins.policy_for(row.dimension), base);
                for (got, want) in [
                    (s.shannon_h, e.h),
                    (s.simpson_d, e.d),
                    (s.shannon_e, e.e_h),
                    (s.simpson_e, e.e_d),
                    (s.mean, e.mean),
                    (s.variance, e.var),
                ] {
                    assert!(
                        (got - want).abs() <= 1e-12 * want.abs().max(1.0),
                        "trial {trial} {}: {got} vs {want}",
                        row.measurement
                    );
                }
            }
        }
    }
}
