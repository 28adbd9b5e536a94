mod oracles;

use approx::assert_abs_diff_eq;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use srs_lbp::embedding::embed;
use srs_lbp::evaluation::rank;
use srs_lbp::{
    build_descriptor, fit_pca, fit_pca_with, hellinger_l2, project, PcaSolver, RadialConfig,
    SampleRecord,
};

use oracles::*;

fn random_rows(n: usize, d: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| (0..d).map(|_| rng.random_range(-1.0..1.0)).collect())
        .collect()
}

#[test]
fn tiny_pca_matches_jacobi_oracle() {
    for seed in 0..10 {
        let rows = random_rows(3, 5, seed);
        let model = fit_pca(&rows, 2).unwrap();
        let (values, vectors) = jacobi_eigen(covariance(&rows));
        assert_eq!(model.n_components(), 2);
        for k in 0..2 {
            assert_abs_diff_eq!(model.explained_variance()[k], values[k], epsilon = 1e-9);
            for (a, b) in model.component(k).iter().zip(&vectors[k]) {
                assert_abs_diff_eq!(a, b, epsilon = 1e-6);
            }
        }
    }
}

#[test]
fn gram_and_covariance_routes_agree() {
    for (n, d, seed) in [(6, 20, 1u64), (10, 40, 2), (30, 12, 3)] {
        let rows = random_rows(n, d, seed);
        let cov = fit_pca_with(&rows, 50, PcaSolver::Covariance).unwrap();
        let gram = fit_pca_with(&rows, 50, PcaSolver::Gram).unwrap();
        assert_eq!(cov.n_components(), gram.n_components());
        assert_eq!(cov.n_components(), (n - 1).min(d));
        for (a, b) in cov.components().iter().zip(gram.components()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-6);
        }
        for (a, b) in cov.explained_variance().iter().zip(gram.explained_variance()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-9);
        }
        assert!(gram.orthonormality_error() < 1e-6);
        assert!(cov.orthonormality_error() < 1e-6);
    }
}

#[test]
fn full_rank_projection_is_an_isometry() {
    let rows = random_rows(12, 4, 9);
    let model = fit_pca(&rows, 4).unwrap();
    assert_eq!(model.n_components(), 4);
    let proj: Vec<Vec<f64>> = rows.iter().map(|r| project(&model, r).unwrap()).collect();
    let dist = |a: &[f64], b: &[f64]| {
        a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
    };
    for i in 0..rows.len() {
        for j in 0..rows.len() {
            assert_abs_diff_eq!(dist(&rows[i], &rows[j]), dist(&proj[i], &proj[j]), epsilon = 1e-6);
        }
    }
}

#[test]
fn explained_variance_and_reconstruction_are_monotone() {
    let rows = random_rows(15, 30, 4);
    let model = fit_pca(&rows, 200).unwrap();
    let var = model.explained_variance();
    assert!(var.windows(2).all(|w| w[0] >= w[1]));
    let mut previous = f64::INFINITY;
    for n in 0..=model.n_components() {
        let m = model.truncated(n);
        let err: f64 = rows
            .iter()
            .map(|r| {
                let rec = m.reconstruct(&project(&m, r).unwrap());
                rec.iter().zip(r).map(|(a, b)| (a - b).powi(2)).sum::<f64>()
            })
            .sum();
        assert!(err <= previous + 1e-9, "N={n}: {err} > {previous}");
        previous = err;
    }
    assert!(previous < 1e-18 * rows.len() as f64 + 1e-12);
}

#[test]
fn fitting_is_bitwise_deterministic() {
    let rows = random_rows(40, 300, 8);
    let a = fit_pca(&rows, 30).unwrap();
    let b = fit_pca(&rows, 30).unwrap();
    assert_eq!(a, b);
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let c = pool.install(|| fit_pca(&rows, 30).unwrap());
    assert_eq!(a, c);
}

#[test]
fn embedding_page_descriptors() {
    let pages: Vec<_> = (0..6)
        .map(|s| {
            let img = random_image(40, 40, s);
            build_descriptor(&img, &RadialConfig::srs(vec![1, 3]).unwrap())
                .unwrap()
                .with_sample_id(format!("p{s}"))
        })
        .collect();
    let model = fit_pca(&pages, 200).unwrap();
    assert_eq!(model.input_dim(), 512);
    assert!(model.n_components() <= 5);
    for p in &pages {
        let e = embed(&model, &p.sample_id, &p.values).unwrap();
        let norm = e.values.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert_abs_diff_eq!(norm, 1.0, epsilon = 1e-9);
    }
}

proptest! {
    #[test]
    fn hellinger_output_is_unit_or_zero(v in proptest::collection::vec(-1e3f64..1e3, 1..40)) {
        let h = hellinger_l2(&v);
        let norm = h.iter().map(|x| x * x).sum::<f64>().sqrt();
        if v.iter().all(|&x| x == 0.0) {
            prop_assert_eq!(norm, 0.0);
        } else {
            prop_assert!((norm - 1.0).abs() < 1e-9);
        }
        for (a, b) in v.iter().zip(&h) {
            prop_assert!(*a == 0.0 && *b == 0.0 || a.signum() == b.signum());
        }
    }

    #[test]
    fn uniform_scaling_preserves_rankings(seed in any::<u64>(), scale in 0.01f64..100.0) {
        let rows = random_rows(9, 6, seed);
        let scaled: Vec<Vec<f64>> = rows.iter().map(|r| r.iter().map(|v| v * scale).collect()).collect();
        let records = |data: &[Vec<f64>]| -> Vec<SampleRecord> {
            let model = fit_pca(data, 200).unwrap();
            data.iter()
                .enumerate()
                .map(|(i, r)| SampleRecord {
                    writer_id: String::new(),
                    embedded: embed(&model, &i.to_string(), r).unwrap(),
                })
                .collect()
        };
        let (a, b) = (records(&rows), records(&scaled));
        for (qa, qb) in a.iter().zip(&b) {
            let ra = rank(&qa.embedded, &a).unwrap();
            let rb = rank(&qb.embedded, &b).unwrap();
            for (x, y) in ra.neighbors.iter().zip(&rb.neighbors) {
                prop_assert!((x.distance - y.distance).abs() < 1e-9);
            }
            // ids may only differ where distances are numerically tied
            for w in 0..ra.neighbors.len() {
                if ra.neighbors[w].sample_id != rb.neighbors[w].sample_id {
                    let gap = |k: usize| (ra.neighbors[k].distance - ra.neighbors[w].distance).abs();
                    let tied = (w > 0 && gap(w - 1) < 1e-9) || (w + 1 < ra.neighbors.len() && gap(w + 1) < 1e-9);
                    prop_assert!(tied);
                }
            }
        }
    }
}
