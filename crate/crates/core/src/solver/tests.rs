use std::sync::Mutex;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::circuit::samples::random_circuit;
use crate::circuit::{cnf_to_aig, parse_dimacs, AigBuilder, AigCircuit, Assignment, Mask};
use crate::datagen::gen_sr;

fn and2() -> AigCircuit {
    let (mut b, p) = AigBuilder::with_pis(2);
    let g = b.and(p[0], p[1]);
    b.finish(g)
}

fn nand2() -> AigCircuit {
    let (mut b, p) = AigBuilder::with_pis(2);
    let g = b.and(p[0], p[1]);
    let n = b.not(g);
    b.finish(n)
}

/// Random circuits with 1 to 4 PIs, each kept with its satisfiability.
fn small_corpus() -> Vec<(AigCircuit, bool)> {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut out = Vec::new();
    for pis in 1..=4 {
        for gates in [1, 3, 6, 10] {
            for _ in 0..15 {
                let c = random_circuit(&mut rng, pis, gates);
                let sat = (0..1u64 << pis).any(|m| c.eval_po(Assignment::from_index(pis, m).values()));
                out.push((c, sat));
            }
        }
    }
    out
}

#[test]
fn forced_and_assignment() {
    let (a, order) = iterative_solve(&and2(), &ExactPredictor, &[0, 0]).unwrap();
    assert_eq!(a.values(), &[true, true]);
    assert_eq!(order.len(), 2);
}

#[test]
fn nand_tie_breaks_to_first_input() {
    let (a, order) = iterative_solve(&nand2(), &ExactPredictor, &[0, 0]).unwrap();
    assert_eq!(order, vec![0, 1]);
    assert_eq!(a.values(), &[false, true]);
    assert!(verify(&nand2(), &a));
}

#[test]
fn pre_assigned_inputs_are_not_decided() {
    let (a, order) = iterative_solve(&and2(), &ExactPredictor, &[1, 0]).unwrap();
    assert_eq!(order, vec![1]);
    assert_eq!(a.values(), &[true, true]);
}

#[test]
fn flipping_recovers_from_adversarial_predictor() {
    let c = AigCircuit::new(vec![crate::circuit::Gate::Pi], 1, 0).unwrap();
    let r = solve_with_flipping(&c, &ConstantPredictor(0.0)).unwrap();
    assert_eq!(r.status, SolveStatus::Satisfied);
    assert_eq!(r.rounds_used, 2);
    assert_eq!(r.assignment.unwrap().values(), &[true]);
}

#[test]
fn unsatisfiable_circuit_is_unknown_at_once() {
    let f = parse_dimacs("p cnf 1 2\n1 0\n-1 0\n").unwrap();
    let r = solve_with_flipping(&cnf_to_aig(&f), &ExactPredictor).unwrap();
    assert_eq!(r.status, SolveStatus::Unknown);
    assert_eq!(r.predictor_calls, 1);
    assert!(r.assignment.is_none());
}

#[test]
fn verify_examples() {
    let phi = cnf_to_aig(&parse_dimacs("p cnf 3 3\n-1 2 0\n-2 -3 0\n1 3 0\n").unwrap());
    assert!(verify(&phi, &Assignment::new(vec![false, false, true])));
    assert!(!verify(&and2(), &Assignment::new(vec![true, false])));
    let mut b = AigBuilder::new();
    b.pi();
    let z = b.const0();
    let c = b.finish(z);
    for v in [false, true] {
        assert!(!verify(&c, &Assignment::new(vec![v])));
    }
}

#[test]
fn oracle_solves_small_corpus_in_first_round() {
    for (c, sat) in small_corpus() {
        let r = solve_with_flipping(&c, &ExactPredictor).unwrap();
        if sat {
            assert_eq!(r.status, SolveStatus::Satisfied);
            assert_eq!(r.rounds_used, 1);
            let a = sample_scheme(&c, &ExactPredictor, Scheme::MostCertain).unwrap().unwrap();
            assert!(verify(&c, &a));
        } else {
            assert_eq!(r.status, SolveStatus::Unknown);
        }
    }
}

#[test]
fn results_are_sound_and_bounded() {
    for (i, (c, sat)) in small_corpus().into_iter().enumerate() {
        let r = solve_with_flipping(&c, &RandomPredictor { seed: i as u64 }).unwrap();
        assert!(r.rounds_used <= c.num_pis() + 1);
        match r.status {
            SolveStatus::Satisfied => assert!(verify(&c, r.assignment.as_ref().unwrap())),
            SolveStatus::Unknown => assert!(r.assignment.is_none()),
        }
        if !sat {
            assert_eq!(r.status, SolveStatus::Unknown);
        }
    }
}

/// Records how many PIs each query has masked.
struct Recorder(Mutex<Vec<usize>>);

impl Predictor for Recorder {
    fn predict_pis(&self, c: &AigCircuit, mask: &Mask) -> Result<Vec<f64>, PredictError> {
        let masked = (0..c.num_pis()).filter(|&i| mask.is_masked(i)).count();
        self.0.lock().unwrap().push(masked);
        Ok(vec![0.3; c.num_pis()])
    }
}

#[test]
fn masked_inputs_grow_by_one_per_query() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let c = random_circuit(&mut rng, 5, 12);
    let rec = Recorder(Mutex::new(Vec::new()));
    let (_, order) = iterative_solve(&c, &rec, &[0; 5]).unwrap();
    assert_eq!(*rec.0.lock().unwrap(), vec![0, 1, 2, 3, 4]);
    let mut sorted = order.clone();
    sorted.sort();
    assert_eq!(sorted, vec![0, 1, 2, 3, 4]);
}

#[test]
fn oracle_suite_on_sr8() {
    let instances: Vec<(String, AigCircuit)> = (0..100)
        .map(|i| (format!("sr8-{i}"), cnf_to_aig(&gen_sr(8, i).unwrap().sat)))
        .collect();
    let (results, m) = evaluate_suite(&instances, &ExactPredictor).unwrap();
    assert_eq!(results.len(), 100);
    assert_eq!(m.solved, 100);
    assert_eq!(m.problems_solved, 1.0);
    assert_eq!(m.mean_rounds, 1.0);
    assert_eq!(m.rounds_histogram, vec![100]);
    assert!(m.to_csv().contains("rounds_1,100"));
}

#[test]
fn unsat_instances_are_never_reported_solved() {
    let instances: Vec<(String, AigCircuit)> = (0..20)
        .map(|i| (format!("u{i}"), cnf_to_aig(&gen_sr(6, i).unwrap().unsat)))
        .collect();
    for p in [&RandomPredictor { seed: 1 } as &dyn Predictor, &ConstantPredictor(0.9)] {
        let (_, m) = evaluate_suite(&instances, p).unwrap();
        assert_eq!(m.solved, 0);
    }
}

#[test]
fn one_shot_thresholds_the_first_query() {
    let a = sample_scheme(&and2(), &ConstantPredictor(0.5), Scheme::OneShot).unwrap().unwrap();
    assert_eq!(a.values(), &[true, true]);
    let b = baseline_schemes(&nand2(), &ExactPredictor).unwrap();
    // θ = 1/3 for both inputs: thresholding gives (0, 0), which satisfies NAND.
    assert_eq!(b.one_shot.unwrap().values(), &[false, false]);
    assert!(verify(&nand2(), &b.most_certain.unwrap()));
}
