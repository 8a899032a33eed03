//! Thread-parallel gap scans and the gap/cluster data of the `fig1` command.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use liouvq_core::model::{xy_chain_spec, XYChainParams};
use liouvq_core::spectrum::{chain_gap, p_eigenvalues, rapidity_cluster, relaxation_gap, GapRow, GapScan, SpectrumError};
use liouvq_core::Complex64;

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "LIOUVQ_THREADS";

/// Worker count: `LIOUVQ_THREADS` if it parses as a positive integer,
/// otherwise the available parallelism.
pub fn thread_cap() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// Maps `f` over `items` on up to `threads` scoped workers. The result is in
/// input order regardless of scheduling.
pub fn par_map<T, R, F>(items: &[T], threads: usize, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync,
{
    let workers = threads.max(1).min(items.len());
    if workers <= 1 {
        return items.iter().map(f).collect();
    }
    let next = AtomicUsize::new(0);
    let done = Mutex::new(Vec::with_capacity(items.len()));
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| {
                let mut local = Vec::new();
                loop {
                    let k = next.fetch_add(1, Ordering::Relaxed);
                    let Some(item) = items.get(k) else { break };
                    local.push((k, f(item)));
                }
                done.lock().unwrap().extend(local);
            });
        }
    });
    let mut out = done.into_inner().unwrap();
    out.sort_by_key(|(k, _)| *k);
    out.into_iter().map(|(_, r)| r).collect()
}

/// [`liouvq_core::spectrum::gap_scan`] spread over threads.
pub fn gap_scan_parallel(template: &XYChainParams, ls: &[usize], threads: usize) -> GapScan {
    let rows = par_map(ls, threads, |&l| GapRow {
        l,
        gap: chain_gap(&XYChainParams { l, ..*template }),
    });
    GapScan::from_rows(rows)
}

/// Inclusive arithmetic range `lmin, lmin + step, ... <= lmax`.
pub fn length_range(lmin: usize, lmax: usize, step: usize) -> Vec<usize> {
    (lmin..=lmax).step_by(step.max(1)).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct Fig1Config {
    pub j: f64,
    /// Field values `h_z / J`.
    pub fields: Vec<f64>,
    /// Lengths of the gap panel.
    pub lengths: Vec<usize>,
    /// Lengths of the cluster-vs-length panel.
    pub cluster_lengths: Vec<usize>,
    pub cluster_field: f64,
    /// Length of the cluster-vs-field panel.
    pub cluster_l: usize,
}

impl Default for Fig1Config {
    fn default() -> Self {
        Self {
            j: 1.0,
            fields: vec![0.01, 0.02, 0.03],
            lengths: length_range(20, 100, 10),
            cluster_lengths: vec![50, 75, 100],
            cluster_field: 0.01,
            cluster_l: 100,
        }
    }
}

impl Fig1Config {
    /// Ising chain (`γ = 1`) with unit boundary couplings.
    pub fn chain(&self, l: usize, field: f64) -> XYChainParams {
        XYChainParams::with_boundary_couplings(l, self.j, 1.0, field * self.j, 1.0, 1.0)
    }
}

/// Eigenvalues of `P` near `iJ` for one chain.
#[derive(Clone, Debug, PartialEq)]
pub struct Cluster {
    pub l: usize,
    pub field: f64,
    pub points: Vec<Complex64>,
    /// `min |λ - iJ|` over all eigenvalues of `P`.
    pub distance: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Fig1Data {
    /// One scan per field, in the order of `Fig1Config::fields`.
    pub gaps: Vec<(f64, GapScan)>,
    pub by_length: Vec<Cluster>,
    pub by_field: Vec<Cluster>,
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
#[error("L = {l}, h_z/J = {field}: {source}")]
pub struct Fig1Error {
    pub l: usize,
    pub field: f64,
    #[source]
    pub source: SpectrumError,
}

/// Computes all three panels. Each distinct `(L, h_z)` chain is
/// diagonalized once.
pub fn fig1_data(cfg: &Fig1Config, threads: usize) -> Result<Fig1Data, Fig1Error> {
    let mut jobs: Vec<(usize, f64)> = Vec::new();
    let mut push = |job: (usize, f64)| {
        if !jobs.contains(&job) {
            jobs.push(job);
        }
    };
    for &f in &cfg.fields {
        for &l in &cfg.lengths {
            push((l, f));
        }
        push((cfg.cluster_l, f));
    }
    for &l in &cfg.cluster_lengths {
        push((l, cfg.cluster_field));
    }

    let spectra = par_map(&jobs, threads, |&(l, f)| {
        xy_chain_spec(&cfg.chain(l, f))
            .map_err(SpectrumError::from)
            .and_then(|s| p_eigenvalues(&s))
    });
    let mut solved = Vec::with_capacity(jobs.len());
    for (&(l, field), r) in jobs.iter().zip(spectra) {
        match r {
            Ok(v) => solved.push(((l, field), v)),
            Err(source) => return Err(Fig1Error { l, field, source }),
        }
    }
    let lookup = |l: usize, f: f64| -> &Vec<Complex64> {
        &solved.iter().find(|(k, _)| *k == (l, f)).expect("every job was solved").1
    };
    let target = Complex64::new(0.0, cfg.j);
    let cluster = |l: usize, field: f64| {
        let values = lookup(l, field);
        Cluster {
            l,
            field,
            points: rapidity_cluster(values, cfg.j),
            distance: values.iter().map(|z| (z - target).norm()).fold(f64::INFINITY, f64::min),
        }
    };

    let gaps = cfg
        .fields
        .iter()
        .map(|&f| {
            let rows = cfg
                .lengths
                .iter()
                .map(|&l| GapRow {
                    l,
                    gap: Ok(relaxation_gap(lookup(l, f))),
                })
                .collect();
            (f, GapScan::from_rows(rows))
        })
        .collect();
    let by_length = cfg.cluster_lengths.iter().map(|&l| cluster(l, cfg.cluster_field)).collect();
    let by_field = cfg.fields.iter().map(|&f| cluster(cfg.cluster_l, f)).collect();
    Ok(Fig1Data { gaps, by_length, by_field })
}

#[cfg(test)]
mod tests {
    use super::*;
    use liouvq_core::spectrum::gap_scan;

    #[test]
    fn par_map_keeps_input_order() {
        let items: Vec<u64> = (0..97).collect();
        let out = par_map(&items, 8, |&x| {
            std::thread::sleep(std::time::Duration::from_micros(97 - x));
            x * x
        });
        assert_eq!(out, items.iter().map(|x| x * x).collect::<Vec<_>>());
        assert!(par_map(&[] as &[u64], 4, |&x| x).is_empty());
    }

    #[test]
    fn parallel_scan_matches_serial() {
        let t = XYChainParams::with_boundary_couplings(0, 1.0, 1.0, 0.05, 1.0, 1.0);
        let ls = [9, 4, 6, 12, 5];
        let a = gap_scan_parallel(&t, &ls, 3);
        let b = gap_scan(&t, &ls);
        assert_eq!(a, b);
        assert_eq!(a.rows.iter().map(|r| r.l).collect::<Vec<_>>(), vec![4, 5, 6, 9, 12]);
    }

    #[test]
    fn failing_rows_drop_the_fit() {
        let t = XYChainParams::with_boundary_couplings(0, 1.0, 1.0, 0.05, 1.0, 1.0);
        let scan = gap_scan_parallel(&t, &[1, 4, 8], 2);
        assert!(scan.rows[0].gap.is_err());
        assert!(scan.fit.is_none());
    }

    #[test]
    fn length_range_is_inclusive() {
        assert_eq!(length_range(20, 100, 10).len(), 9);
        assert_eq!(length_range(5, 5, 3), vec![5]);
        assert!(length_range(6, 5, 1).is_empty());
    }

    #[test]
    fn small_fig1_is_consistent() {
        let cfg = Fig1Config {
            lengths: vec![8, 12],
            cluster_lengths: vec![10, 12],
            cluster_l: 12,
            ..Fig1Config::default()
        };
        let data = fig1_data(&cfg, 4).unwrap();
        assert_eq!(data.gaps.len(), 3);
        for (f, scan) in &data.gaps {
            let direct = gap_scan(&cfg.chain(0, *f), &cfg.lengths);
            assert_eq!(scan, &direct);
        }
        assert_eq!(data.by_length.len(), 2);
        assert_eq!(data.by_field.len(), 3);
        assert_eq!(data.by_length[1], data.by_field[0]);
        for c in data.by_length.iter().chain(&data.by_field) {
            for z in &c.points {
                assert!((z - Complex64::new(0.0, 1.0)).norm() >= c.distance);
            }
        }
    }
}
