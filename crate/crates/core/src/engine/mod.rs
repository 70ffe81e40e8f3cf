//! Full simulation runs: passive single agent and swarm, and the active model.
//!
//! Within a timestep `t >= 1`, agents move in ascending id order and sense
//! the field at `t`. A signal payload released during timestep `t` is
//! registered at `t` and, because drops only count for later timesteps,
//! every agent in the same timestep sees the start-of-step field. Detection
//! is checked once at `t = 0` and after every completed step.

mod config;
mod result;

pub use config::{FieldSpec, Model, RunConfig, DEFAULT_QUOTA, DEFAULT_STEP_CAP, DEFAULT_TRAJECTORY_STRIDE};
pub use result::{AgentState, Event, EventKind, Payload, Status, TrajectoryPoint, TrialResult};

use crate::error::{Error, Result};
use crate::gradient::GradientField;
use crate::movement::biased_step;
use crate::rng::RngStream;

/// Single passive agent walking from `x0` until detection or the step cap.
pub fn run_passive_single(config: &RunConfig, trial: u64) -> Result<TrialResult> {
    if config.model != Model::Passive || config.params.n != 1 {
        return Err(Error::Config(
            "single-agent runs need the passive model with n = 1".into(),
        ));
    }
    run_passive_swarm(config, trial)
}

/// `n` independent passive agents; stops once the delivery quota is met.
pub fn run_passive_swarm(config: &RunConfig, trial: u64) -> Result<TrialResult> {
    if config.model != Model::Passive {
        return Err(Error::Config("passive runs need model = passive".into()));
    }
    config.validate()?;
    let field = config.field.build(&config.params);
    simulate(config, trial, field, vec![Payload::Drug; config.params.n])
}

/// Active model: `ceil(n/2)` drug carriers then `floor(n/2)` signal carriers,
/// starting in an empty drop field.
pub fn run_active(config: &RunConfig, trial: u64) -> Result<TrialResult> {
    if config.model != Model::Active {
        return Err(Error::Config("active runs need model = active".into()));
    }
    config.validate()?;
    let n = config.params.n;
    let drug = n.div_ceil(2);
    let payloads = (0..n)
        .map(|i| if i < drug { Payload::Drug } else { Payload::Signal })
        .collect();
    simulate(config, trial, GradientField::empty_drops(&config.params), payloads)
}

/// Drug-carrying agents walking in a caller-supplied field, e.g. a drop
/// field pre-seeded with an earlier release.
pub fn run_in_field(config: &RunConfig, trial: u64, field: GradientField) -> Result<TrialResult> {
    config.params.validate()?;
    simulate(config, trial, field, vec![Payload::Drug; config.params.n])
}

/// Dispatches on `config.model`.
pub fn run_trial(config: &RunConfig, trial: u64) -> Result<TrialResult> {
    match config.model {
        Model::Passive => run_passive_swarm(config, trial),
        Model::Active => run_active(config, trial),
    }
}

struct Run<'a> {
    config: &'a RunConfig,
    field: GradientField,
    agents: Vec<AgentState>,
    rngs: Vec<RngStream>,
    events: Vec<Event>,
    trajectories: Option<Vec<Vec<TrajectoryPoint>>>,
    y: usize,
    z: usize,
    first_drop: Option<u64>,
}

impl Run<'_> {
    fn detect(&mut self, i: usize, t: u64) -> Result<()> {
        let params = &self.config.params;
        let agent = &mut self.agents[i];
        if agent.position.distance(params.x_star) > params.epsilon {
            return Ok(());
        }
        agent.status = Status::Delivered(t);
        agent.delivery_time = Some(t);
        let kind = match agent.payload {
            Payload::Drug => {
                self.y += 1;
                EventKind::DropDrug
            }
            Payload::Signal => {
                self.field.register_drop(t)?;
                self.z += 1;
                self.first_drop.get_or_insert(t);
                EventKind::DropSignal
            }
        };
        self.events.push(Event {
            t,
            agent: i,
            event: kind,
            pos: agent.position,
        });
        if let Some(tr) = self.trajectories.as_mut() {
            let last = tr[i].last().map(|p| p.t);
            if last != Some(t) {
                tr[i].push(TrajectoryPoint { t, pos: agent.position });
            }
        }
        Ok(())
    }
}

fn simulate(
    config: &RunConfig,
    trial: u64,
    field: GradientField,
    payloads: Vec<Payload>,
) -> Result<TrialResult> {
    let params = &config.params;
    let n = payloads.len();
    let drug_agents = payloads.iter().filter(|&&p| p == Payload::Drug).count();
    let need = config.quota_count(drug_agents);
    let agents: Vec<AgentState> = payloads
        .into_iter()
        .enumerate()
        .map(|(id, payload)| AgentState {
            id,
            position: params.x0,
            payload,
            status: Status::Active,
            delivery_time: None,
        })
        .collect();
    let trajectories = config.record_trajectories.then(|| {
        (0..n)
            .map(|_| vec![TrajectoryPoint { t: 0, pos: params.x0 }])
            .collect()
    });
    let mut run = Run {
        config,
        field,
        agents,
        rngs: (0..n as u64)
            .map(|i| RngStream::new(config.seed, trial, i))
            .collect(),
        events: Vec::new(),
        trajectories,
        y: 0,
        z: 0,
        first_drop: None,
    };

    for i in 0..n {
        run.detect(i, 0)?;
    }
    let mut runtime = (run.y >= need).then_some(0);
    let mut t = 0;
    while runtime.is_none() && t < config.step_cap {
        t += 1;
        let mut any_active = false;
        for i in 0..n {
            if !run.agents[i].is_active() {
                continue;
            }
            any_active = true;
            let out = biased_step(run.agents[i].position, &run.field, params, t, &mut run.rngs[i])?;
            run.agents[i].position = out.new_position;
            if let Some(tr) = run.trajectories.as_mut() {
                if t % config.trajectory_stride == 0 {
                    tr[i].push(TrajectoryPoint { t, pos: out.new_position });
                }
            }
            run.detect(i, t)?;
        }
        if run.y >= need {
            runtime = Some(t);
        } else if !any_active {
            break;
        }
    }

    if runtime.is_none() {
        for i in 0..n {
            if run.agents[i].is_active() {
                run.agents[i].status = Status::Capped;
                run.events.push(Event {
                    t,
                    agent: i,
                    event: EventKind::Capped,
                    pos: run.agents[i].position,
                });
            }
        }
    }

    Ok(TrialResult {
        model: config.model,
        trial,
        seed: config.seed,
        agents: run.agents,
        first_signal_drop_time: run.first_drop,
        runtime_to_quota: runtime,
        y_final: run.y,
        z_final: run.z,
        final_t: t,
        events: run.events,
        trajectories: run.trajectories,
    })
}
