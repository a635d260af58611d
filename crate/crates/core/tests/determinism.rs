//! Identical specs and seeds give byte-identical CSV output for any worker
//! count.

use censornet::config::{ExperimentId, ExperimentSpec, Problem};
use censornet::experiment::run_experiment;
use censornet::workspace::SolverSettings;

fn spec(workers: usize, out: &std::path::Path) -> ExperimentSpec {
    let mut spec = ExperimentSpec::new(ExperimentId::Custom);
    spec.problem = Problem::O;
    spec.sweeps.rho = Some(vec![0.3, 0.6]);
    spec.sweeps.p0 = Some(vec![0.5]);
    spec.out_dir = out.to_path_buf();
    spec.workers = Some(workers);
    spec.settings = SolverSettings {
        n_mc_pu: 1_500,
        n_mc_oracle: 20_000,
        tau_grid: 31,
        coarse_n_mc: 500,
        f_grid: 31,
        joint_f_grid: 9,
        golden_iters: 12,
        seed: 42,
        ..SolverSettings::default()
    };
    spec
}

#[test]
fn csv_is_identical_across_worker_counts() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("one"), dir.path().join("three"));
    let fa = run_experiment(&spec(1, &a)).unwrap();
    let fb = run_experiment(&spec(3, &b)).unwrap();
    assert_eq!(fa.len(), fb.len());
    for (x, y) in fa.iter().zip(&fb) {
        let (bx, by) = (std::fs::read(x).unwrap(), std::fs::read(y).unwrap());
        assert_eq!(bx, by, "{} differs from {}", x.display(), y.display());
    }
    let text = std::fs::read_to_string(&fa[0]).unwrap();
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let headers = rdr.headers().unwrap().clone();
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 8);
    for row in &rows {
        for col in ["pm", "pf", "pt"] {
            let i = headers.iter().position(|h| h == col).unwrap();
            let se = headers.iter().position(|h| h == format!("{col}_se")).unwrap();
            if let Ok(v) = row[i].parse::<f64>() {
                assert!((0.0..=1.0).contains(&v), "{col} = {v}");
                assert!(row[se].parse::<f64>().is_ok(), "{col} without standard error");
            }
        }
    }
}
