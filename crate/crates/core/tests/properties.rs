use diskembed::dag::synth::random_dag;
use diskembed::dag::{parse_edge_list, transitive_closure, transitive_reduction, Dag};
use diskembed::eval::{f1_at, tune_threshold};
use diskembed::model::{init_embeddings, Checkpoint, TrainConfig};
use diskembed::{contains, protrusion, FormalDisk, GeometryKind, QuasiMetricSpace};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn kind() -> impl Strategy<Value = GeometryKind> {
    prop_oneof![
        Just(GeometryKind::Euclidean),
        Just(GeometryKind::Polyhedral),
        Just(GeometryKind::Sphere),
        Just(GeometryKind::Lorentz),
    ]
}

fn dag_from(n: usize, edges: &[(usize, usize)]) -> Dag {
    let names = (0..n).map(|i| format!("v{i}")).collect();
    Dag::new(names, edges.to_vec()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn checkpoint_round_trips(kind in kind(), dim in 2usize..6, n in 1usize..20, seed: u64) {
        let space = QuasiMetricSpace::from_kind(kind, dim).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let table = init_embeddings(&space, n, &TrainConfig::default(), &mut rng).unwrap();
        let text = Checkpoint::to_string(&table).unwrap();
        let back = Checkpoint::parse(&text).unwrap();
        prop_assert_eq!(back.node_names(), table.node_names());
        prop_assert_eq!(back.radii(), table.radii());
        for i in 0..n {
            prop_assert_eq!(back.center(i), table.center(i));
        }
        prop_assert_eq!(Checkpoint::to_string(&back).unwrap(), text);
    }

    #[test]
    fn edge_list_round_trips(n in 2usize..15, p in 0.0f64..0.6, seed: u64) {
        let dag = random_dag(n, p, seed);
        let again = parse_edge_list(&dag.to_tsv()).unwrap();
        let names = |d: &Dag| {
            let mut e: Vec<(String, String)> = d
                .edges()
                .iter()
                .map(|&(a, b)| (d.name(a).to_string(), d.name(b).to_string()))
                .collect();
            e.sort();
            e
        };
        prop_assert_eq!(names(&dag), names(&again));
    }

    #[test]
    fn reduction_generates_the_closure(n in 2usize..15, p in 0.0f64..0.6, seed: u64) {
        let dag = random_dag(n, p, seed);
        let closure = transitive_closure(&dag);
        let reduction = transitive_reduction(&dag);
        prop_assert!(reduction.is_subset(&closure));
        let from_reduction = dag_from(n, reduction.as_slice());
        prop_assert_eq!(transitive_closure(&from_reduction), closure.clone());
        let from_closure = dag_from(n, closure.as_slice());
        prop_assert_eq!(transitive_closure(&from_closure), closure);
        prop_assert_eq!(transitive_reduction(&from_closure), reduction);
    }

    #[test]
    fn euclidean_containment_matches_ball_inclusion(
        cx in -2.0f64..2.0, cy in -2.0f64..2.0, r in 0.1f64..2.0,
        dx in -2.0f64..2.0, dy in -2.0f64..2.0, s in 0.0f64..2.0,
    ) {
        let sp = QuasiMetricSpace::euclidean(2).unwrap();
        let a = FormalDisk::new(sp.point(vec![cx, cy]).unwrap(), r);
        let b = FormalDisk::new(sp.point(vec![dx, dy]).unwrap(), s);
        let d = ((cx - dx).powi(2) + (cy - dy).powi(2)).sqrt();
        let l = protrusion(&sp, &a, &b).unwrap();
        prop_assert!((l - (d - r + s)).abs() < 1e-12);
        if (d + s - r).abs() > 1e-9 {
            prop_assert_eq!(contains(&sp, &a, &b).unwrap(), d + s <= r);
        }
    }

    #[test]
    fn tuned_threshold_is_optimal(
        data in prop::collection::vec((-1.0f64..1.0, any::<bool>()), 2..40)
    ) {
        let scores: Vec<f64> = data.iter().map(|d| d.0).collect();
        let labels: Vec<bool> = data.iter().map(|d| d.1).collect();
        prop_assume!(labels.contains(&true) && labels.contains(&false));
        let tau = tune_threshold(&scores, &labels).unwrap();
        let best = f1_at(&scores, &labels, tau).unwrap().f1;
        for &t in &scores {
            prop_assert!(f1_at(&scores, &labels, t).unwrap().f1 <= best + 1e-12);
        }
    }
}
