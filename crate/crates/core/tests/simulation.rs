use nanosim_core::{
    run_active, run_passive_swarm, EnvironmentParams, EventKind, Model, Payload, RunConfig, Status,
};
use proptest::prelude::*;

fn near_target(model: Model, n: usize, phi0: f64) -> RunConfig {
    let params = EnvironmentParams {
        b: 1e12,
        d: 1e-9,
        n,
        ..EnvironmentParams::reference()
    }
    .with_phi0(phi0);
    let mut cfg = RunConfig::new(model, params);
    cfg.step_cap = 2_000_000;
    cfg
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn active_run_bookkeeping(seed in any::<u64>(), n in 2usize..7, phi0 in 1e-4f64..6e-4) {
        let mut cfg = near_target(Model::Active, n, phi0);
        cfg.seed = seed;
        let r = run_active(&cfg, seed % 97).unwrap();
        let drug = r.agents.iter().filter(|a| a.payload == Payload::Drug).count();
        prop_assert_eq!(drug, n.div_ceil(2));
        prop_assert!(r.agents[..drug].iter().all(|a| a.payload == Payload::Drug));

        prop_assert!(r.events.windows(2).all(|w| w[0].t <= w[1].t));
        let drops: Vec<_> = r.events.iter().filter(|e| e.event == EventKind::DropSignal).collect();
        prop_assert_eq!(drops.len(), r.z_final);
        prop_assert_eq!(r.first_signal_drop_time, drops.first().map(|e| e.t));
        let delivered = r.events.iter().filter(|e| e.event == EventKind::DropDrug).count();
        prop_assert_eq!(delivered, r.y_final);

        for a in &r.agents {
            match a.status {
                Status::Delivered(t) => prop_assert_eq!(a.delivery_time, Some(t)),
                _ => prop_assert_eq!(a.delivery_time, None),
            }
        }
        if let Some(t) = r.runtime_to_quota {
            let (y, _) = r.counts_at(t);
            prop_assert!(y >= cfg.quota_count(drug));
            prop_assert!(t == 0 || r.counts_at(t - 1).0 < cfg.quota_count(drug));
            prop_assert_eq!(r.final_t, t);
        }
    }

    #[test]
    fn passive_agents_do_not_interact(seed in any::<u64>(), phi0 in 1e-4f64..4e-4) {
        let mut one = near_target(Model::Passive, 1, phi0);
        one.seed = seed;
        one.quota_fraction = 1.0;
        let mut three = one.clone();
        three.params.n = 3;
        let a = run_passive_swarm(&one, 3).unwrap();
        let b = run_passive_swarm(&three, 3).unwrap();
        prop_assert_eq!(a.agents[0].delivery_time, b.agents[0].delivery_time);
    }
}

#[test]
fn trial_result_json_round_trip() {
    let cfg = near_target(Model::Active, 4, 2e-4);
    let r = run_active(&cfg, 1).unwrap();
    let text = serde_json::to_string(&r).unwrap();
    let back: nanosim_core::TrialResult = serde_json::from_str(&text).unwrap();
    assert_eq!(back, r);
    let mut lines = Vec::new();
    r.write_events_jsonl(&mut lines).unwrap();
    assert_eq!(String::from_utf8(lines).unwrap().lines().count(), r.events.len());
}
