use crnlab::birch::{birch_point, g_alpha, random_interior_point, BirchOptions};
use crnlab::classify::{is_endotactic, is_strongly_endotactic, is_w_endotactic, strong_condition_holds};
use crnlab::dynamics::mass_action_rhs;
use crnlab::geometry::linalg::{orthogonalize, qvec};
use crnlab::geometry::{super_chain, DEFAULT_MAX_HYPERPLANES};
use crnlab::jets::{
    endotactic_along, float_super_chain, jet_inner, jets_fundamental_check, pull_sum, strongly_sustained_along, Frame,
    JetSchedule,
};
use crnlab::{stoichiometric_subspace, ReactionNetwork, StoichiometryInfo};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const NAMES: [&str; 4] = ["A", "B", "C", "D"];

fn network_strategy() -> impl Strategy<Value = ReactionNetwork> {
    (1usize..=3)
        .prop_flat_map(|n| {
            let complex = prop::collection::vec(0i64..=3, n);
            (Just(n), prop::collection::vec((complex.clone(), complex), 1..=5))
        })
        .prop_filter_map("self-loops only", |(n, rows)| {
            let rows: Vec<_> = rows.into_iter().filter(|(s, t)| s != t).collect();
            if rows.is_empty() {
                return None;
            }
            let refs: Vec<(&[i64], &[i64])> = rows.iter().map(|(s, t)| (s.as_slice(), t.as_slice())).collect();
            ReactionNetwork::from_integer_reactions(&NAMES[..n], &refs).ok()
        })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn jet_inner_matches_direct_evaluation(
        dim in 2usize..=4,
        seed in any::<u64>(),
        v in prop::collection::vec(-3i64..=3, 4),
        i in 2.0f64..50.0,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let frame = Frame::random(&mut rng, dim, dim).unwrap();
        let v: Vec<f64> = v[..dim].iter().map(|x| *x as f64).collect();
        let sched = JetSchedule::default();
        let direct = dot(&sched.w(&frame, i), &v);
        let got = jet_inner(&frame.components(&v), &sched.point(dim, i));
        if direct.abs() > 1e-9 {
            prop_assert_eq!(got.sign as f64, direct.signum());
            prop_assert!((got.ln_abs - direct.abs().ln()).abs() < 1e-8);
        }
    }

    #[test]
    fn first_nonzero_component_fixes_the_sign(
        dim in 2usize..=4,
        seed in any::<u64>(),
        v in prop::collection::vec(-3i64..=3, 4),
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let frame = Frame::random(&mut rng, dim, dim).unwrap();
        let v: Vec<f64> = v[..dim].iter().map(|x| *x as f64).collect();
        let comps = frame.components(&v);
        let Some(lam) = comps.iter().position(|c| *c != 0.0) else { return Ok(()) };
        let tail: f64 = comps[lam + 1..].iter().map(|c| c.abs()).sum();
        let sched = JetSchedule::default();
        // once β_{j+1}/β_j = 1/i is small enough the leading term wins
        let i = (4.0 * tail / comps[lam].abs()).max(2.0);
        for i in [i, 10.0 * i] {
            let pt = sched.point(dim, i);
            let s = jet_inner(&comps, &pt);
            prop_assert_eq!(s.sign as f64, comps[lam].signum());
            // normalized inner product stays within the total component mass
            let normalized = (s.ln_abs - pt.log_beta[lam]).exp();
            prop_assert!(normalized <= comps[lam].abs() + tail + 1e-12);
            prop_assert!(normalized >= comps[lam].abs() - tail / i - 1e-12);
        }
    }

    #[test]
    fn fundamental_check_reaches_exact_chain(
        dim in 2usize..=4,
        points in prop::collection::vec(prop::collection::vec(-3i64..=3, 4), 2..8),
        frame_raw in prop::collection::vec(prop::collection::vec(-3i64..=3, 4), 4),
    ) {
        let mut q: Vec<Vec<i64>> = points.into_iter().map(|p| p[..dim].to_vec()).collect();
        q.sort();
        q.dedup();
        let rational: Vec<_> = frame_raw.iter().map(|w| qvec(&w[..dim])).collect();
        let exact_frame = orthogonalize(&rational);
        prop_assume!(!exact_frame.is_empty());
        let frame = Frame::from_rational(&exact_frame).unwrap();
        let qq: Vec<_> = q.iter().map(|p| qvec(p)).collect();
        let chain = super_chain(&qq, &exact_frame).unwrap();
        let want: Vec<usize> = chain.last().unwrap().iter().map(|p| qq.iter().position(|x| x == p).unwrap()).collect();
        let qf: Vec<Vec<f64>> = q.iter().map(|p| p.iter().map(|x| *x as f64).collect()).collect();
        let mut float_last = float_super_chain(&qf, &frame).unwrap().pop().unwrap();
        float_last.sort();
        let mut want_sorted = want.clone();
        want_sorted.sort();
        prop_assert_eq!(&float_last, &want_sorted);
        let r = jets_fundamental_check(&qf, &frame, &JetSchedule::default(), 1, 3000).unwrap();
        prop_assert!(r.stabilized_at.is_some());
    }

    #[test]
    fn pull_sum_is_inner_product_with_field(
        net in network_strategy(),
        seed in any::<u64>(),
        log_theta in 0.05f64..2.0,
    ) {
        let n = net.n_species();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w: Vec<f64> = Frame::random(&mut rng, n, 1).unwrap().vectors()[0].clone();
        let k: Vec<f64> = (0..net.reactions().len()).map(|r| 0.5 + r as f64 * 0.3).collect();
        let theta = log_theta.exp();
        let x: Vec<f64> = w.iter().map(|wi| theta.powf(*wi)).collect();
        let f = mass_action_rhs(&net, &k, &x).unwrap();
        let scale = f.iter().map(|v| v.abs()).sum::<f64>().max(1.0);
        prop_assert!((pull_sum(&net, &k, &w, theta).unwrap() - dot(&w, &f)).abs() <= 1e-10 * scale);
    }

    #[test]
    fn mass_action_field_lies_in_stoichiometric_subspace(
        net in network_strategy(),
        x in prop::collection::vec(0.1f64..5.0, 3),
    ) {
        let n = net.n_species();
        let k = vec![1.3; net.reactions().len()];
        let f = mass_action_rhs(&net, &k, &x[..n]).unwrap();
        let stoich = stoichiometric_subspace(&net);
        let off = stoich.project_hperp(&f);
        let scale = f.iter().map(|v| v.abs()).sum::<f64>().max(1.0);
        prop_assert!(off.iter().all(|v| v.abs() <= 1e-10 * scale));
    }

    #[test]
    fn deciders_agree_with_restatements_and_witnesses(net in network_strategy()) {
        let endo = is_endotactic(&net, DEFAULT_MAX_HYPERPLANES).unwrap();
        let strong = is_strongly_endotactic(&net, DEFAULT_MAX_HYPERPLANES).unwrap();
        prop_assert!(!strong.holds || endo.holds);
        if let Some(w) = &endo.witness {
            prop_assert!(!is_w_endotactic(&net, w).unwrap().holds);
            prop_assert!(!endotactic_along(&net, w));
        }
        if endo.holds {
            if let Some(w) = &strong.witness {
                prop_assert!(!strong_condition_holds(&net, w).unwrap());
                prop_assert!(!strongly_sustained_along(&net, w));
            }
        }
    }

    #[test]
    fn birch_point_minimizes_free_energy(
        n in 2usize..=4,
        rows in prop::collection::vec(prop::collection::vec(-2i64..=2, 4), 1..=3),
        x0 in prop::collection::vec(0.2f64..5.0, 4),
        alpha in prop::collection::vec(0.2f64..5.0, 4),
        seed in any::<u64>(),
    ) {
        let vs: Vec<_> = rows.iter().map(|r| qvec(&r[..n])).filter(|v| v.iter().any(|x| *x != num::zero())).collect();
        prop_assume!(!vs.is_empty());
        let stoich = StoichiometryInfo::from_vectors(&vs, n);
        let (x0, alpha) = (&x0[..n], &alpha[..n]);
        let sol = birch_point(&stoich, x0, alpha, &BirchOptions::default()).unwrap();
        prop_assert!(sol.residual <= 1e-12);
        prop_assert!(stoich.conservation_defect(&sol.point, x0) <= 1e-9);
        let g_star = g_alpha(&sol.point, alpha).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..5 {
            let y = random_interior_point(&stoich, x0, &mut rng);
            prop_assert!(g_alpha(&y, alpha).unwrap() >= g_star - 1e-9);
        }
    }
}
