use ndarray::Array2;

use super::*;
use crate::circuit::samples::random_circuit;
use crate::circuit::{AigBuilder, AigCircuit, Gate, Mask};
use crate::sim::exact_profile;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const D: usize = 16;

fn states(n: usize, d: usize, seed: u64) -> Array2<f64> {
    sample_initial_states(&[n], d, seed)
}

fn nand3() -> AigCircuit {
    gradcheck_circuit().0
}

#[test]
fn mask_replaces_rows_with_prototypes() {
    let mut h = states(3, D, 1);
    let before = h.clone();
    apply_mask(&mut h, &[1, 0, -1]);
    assert!(h.row(0).iter().all(|&x| x == 1.0));
    assert_eq!(h.row(1), before.row(1));
    assert!(h.row(2).iter().all(|&x| x == -1.0));
}

#[test]
fn attention_weights() {
    // x1 -> NOT (one predecessor); AND(x1, x2) with identical predecessor states.
    let (mut b, p) = AigBuilder::with_pis(2);
    let n = b.not(p[0]);
    let g = b.and(p[0], p[1]);
    let o = b.and(n, g);
    let c = b.finish(o);
    let params = ModelParams::init(D, 3);
    let m = Mask::empty(c.len());
    let bg = BatchGraph::new(&[(&c, &m)]);
    let mut h = states(c.len(), D, 4);
    let r0 = h.row(0).to_owned();
    h.row_mut(1).assign(&r0);
    let st = propagate(&params, &bg, &h);
    let att = st.forward_attention(&bg);
    assert_eq!(att[n].to_vec(), vec![1.0]);
    assert!((att[g][0] - 0.5).abs() < 1e-15 && (att[g][1] - 0.5).abs() < 1e-15);
}

#[test]
fn identity_point_passes_states_through() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let c = random_circuit(&mut rng, 5, 15);
    let mut h = states(c.len(), D, 6);
    apply_mask(&mut h, Mask::po_only(&c).values());
    let id = PropLayer::identity(D);
    assert_eq!(forward_prop(&c, &h, &id), h);
    assert_eq!(reverse_prop(&c, &h, &id), h);
}

#[test]
fn reverse_keeps_output_prototype() {
    let (mut b, p) = AigBuilder::with_pis(1);
    let n = b.not(p[0]);
    let c = b.finish(n);
    let m = Mask::po_only(&c);
    let bg = BatchGraph::new(&[(&c, &m)]);
    let st = propagate(&ModelParams::init(D, 1), &bg, &states(c.len(), D, 2));
    assert!(st.reverse.row(n).iter().all(|&x| x == 1.0));
    // The PI aggregates only the output's prototype.
    assert_eq!(st.reverse_attention(&bg)[0].to_vec(), vec![1.0]);
}

#[test]
fn prediction_contract() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let c = random_circuit(&mut rng, 5, 20);
    let params = ModelParams::init(D, 8);
    let mut m = Mask::po_only(&c);
    m.set(2, 1);
    m.set(3, -1);
    let y = predict(&c, &m, &params, 11);
    for (i, &v) in y.iter().enumerate() {
        match m.get(i) {
            1 => assert_eq!(v, 1.0),
            -1 => assert_eq!(v, 0.0),
            _ => assert!(v > 0.0 && v < 1.0),
        }
    }
    assert_eq!(y, predict(&c, &m, &params, 11));
}

#[test]
fn loss_examples() {
    let m = Mask::empty(3);
    assert_eq!(loss(&[0.1, 0.2, 0.3], &m, &[0.1, 0.2, 0.3]).unwrap(), 0.0);
    let m = Mask::from_values(vec![1, 0]);
    assert!((loss(&[1.0, 0.3], &m, &[1.0, 0.8]).unwrap() - 0.5).abs() < 1e-15);
    assert!(matches!(loss(&[1.0], &Mask::from_values(vec![1]), &[1.0]), Err(ModelError::AllMasked)));
}

#[test]
fn prototype_pinning_after_every_mask_stage() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let params = ModelParams::init(D, 10);
    for k in 0..10 {
        let c = random_circuit(&mut rng, 6, 25);
        let mut m = Mask::po_only(&c);
        m.set_bool(k % 6, k % 2 == 0);
        let bg = BatchGraph::new(&[(&c, &m)]);
        let st = propagate(&params, &bg, &states(c.len(), D, k as u64));
        for h in [&st.h0, &st.h1, &st.h2] {
            for (i, row) in h.rows().into_iter().enumerate() {
                match m.get(i) {
                    1 => assert!(row.iter().all(|&x| x == 1.0)),
                    -1 => assert!(row.iter().all(|&x| x == -1.0)),
                    _ => {}
                }
            }
        }
    }
}

#[test]
fn attention_sums_to_one() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let params = ModelParams::init(D, 13);
    let c = random_circuit(&mut rng, 8, 60);
    let m = Mask::po_only(&c);
    let bg = BatchGraph::new(&[(&c, &m)]);
    let st = propagate(&params, &bg, &states(c.len(), D, 1));
    for att in st.forward_attention(&bg).into_iter().chain(st.reverse_attention(&bg)) {
        if !att.is_empty() {
            assert!((att.sum() - 1.0).abs() < 1e-6);
        }
    }
}

#[test]
fn reverse_parameters_do_not_touch_forward_states() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let c = random_circuit(&mut rng, 6, 30);
    let m = Mask::po_only(&c);
    let bg = BatchGraph::new(&[(&c, &m)]);
    let h = states(c.len(), D, 2);
    let a = ModelParams::init(D, 15);
    let mut b = a.clone();
    b.reverse = ModelParams::init(D, 99).reverse;
    let (sa, sb) = (propagate(&a, &bg, &h), propagate(&b, &bg, &h));
    assert_eq!(sa.forward, sb.forward);
    assert_ne!(sa.reverse, sb.reverse);
}

/// Swaps two nodes of the same forward level by relabelling the circuit.
#[test]
fn forward_states_ignore_order_within_a_level() {
    let (mut b, p) = AigBuilder::with_pis(3);
    let g1 = b.and(p[0], p[1]);
    let g2 = b.and(p[1], p[2]);
    let top = b.and(g1, g2);
    let c = b.finish(top);
    let swapped = AigCircuit::new(
        vec![Gate::Pi, Gate::Pi, Gate::Pi, Gate::And(1, 2), Gate::And(0, 1), Gate::And(4, 3)],
        3,
        5,
    )
    .unwrap();
    let layer = ModelParams::init(D, 16).forward;
    let h = states(c.len(), D, 3);
    let mut hs = h.clone();
    hs.row_mut(3).assign(&h.row(4));
    hs.row_mut(4).assign(&h.row(3));
    let a = forward_prop(&c, &h, &layer);
    let b = forward_prop(&swapped, &hs, &layer);
    assert_eq!(a.row(3), b.row(4));
    assert_eq!(a.row(4), b.row(3));
    for i in [0, 1, 2, 5] {
        for (x, y) in a.row(i).iter().zip(b.row(i)) {
            assert!((x - y).abs() < 1e-12);
        }
    }
}

#[test]
fn gradients_match_finite_differences() {
    let (c, m, labels) = gradcheck_circuit();
    assert_eq!(c.len(), 6);
    let params = ModelParams::init(HIDDEN, 17);
    let report = grad_check(&params, &c, &m, &labels, 3, 1e-4).unwrap();
    for (name, dev) in &report.groups {
        assert!(*dev <= 1e-3, "{name}: {dev}");
    }
    // At this point one regressor ReLU sits within 1e-6 of its kink.
    assert!(report.reduced_steps > 0);
}

#[test]
fn lone_input_has_zero_layer_gradients() {
    let c = AigCircuit::new(vec![Gate::Pi], 1, 0).unwrap();
    let m = Mask::empty(1);
    let params = ModelParams::init(D, 18);
    let g = analytic_gradient(&params, &c, &m, &[0.7], 1).unwrap();
    let groups = params.groups();
    for (name, range) in &groups {
        if !name.starts_with("regressor") {
            assert!(g[range.clone()].iter().all(|&x| x == 0.0), "{name}");
        }
    }
    let report = grad_check(&params, &c, &m, &[0.7], 1, 1e-4).unwrap();
    assert!(report.max_rel <= 1e-3);
}

#[test]
fn corrupted_gradient_is_caught() {
    let (c, m, labels) = gradcheck_circuit();
    let params = ModelParams::init(D, 19);
    let mut g = analytic_gradient(&params, &c, &m, &labels, 2).unwrap();
    let i = params.groups().iter().find(|(n, _)| n == "forward.gru.w_hh").unwrap().1.start + 5;
    g[i] = 2.0 * g[i] + 0.1;
    let report = compare_gradients(&params, &c, &m, &labels, 2, 1e-4, &g).unwrap();
    assert!(report.max_rel > 0.1);
}

#[test]
fn checkpoint_round_trip_keeps_predictions() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("model.ckpt");
    let params = ModelParams::init(D, 20);
    save_checkpoint(&params, &path).unwrap();
    let loaded = load_checkpoint(&path, D).unwrap();
    let c = nand3();
    let m = Mask::po_only(&c);
    assert_eq!(predict(&c, &m, &params, 1), predict(&c, &m, &loaded, 1));
    assert!(matches!(load_checkpoint(&path, 2 * D), Err(ModelError::Dimension { .. })));
}

#[test]
fn overfits_a_single_record() {
    let (c, m, labels) = gradcheck_circuit();
    assert_eq!(labels, exact_profile(&c, &m).unwrap().theta);
    let ex = [Example {
        circuit: &c,
        mask: &m,
        labels: &labels,
    }];
    let cfg = TrainConfig {
        learning_rate: 1e-3,
        ..Default::default()
    };
    let mut params = ModelParams::init(HIDDEN, 21);
    let mut adam = Adam::new(params.num_params(), cfg.learning_rate, cfg.weight_decay);
    for step in 0..500 {
        train_step(&mut params, &mut adam, &ex, step).unwrap();
    }
    let pe = prediction_error(&params, &ex, 12345, 1);
    assert!(pe <= 0.02, "{pe}");
}

