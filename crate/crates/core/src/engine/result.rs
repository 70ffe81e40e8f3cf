use serde::{Deserialize, Serialize};
use std::io::{self, Write};

use crate::engine::config::Model;
use crate::geometry::Vec2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Payload {
    Drug,
    Signal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Active,
    Delivered(u64),
    Capped,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentState {
    pub id: usize,
    pub position: Vec2,
    pub payload: Payload,
    pub status: Status,
    pub delivery_time: Option<u64>,
}

impl AgentState {
    pub fn is_active(&self) -> bool {
        self.status == Status::Active
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    DropSignal,
    DropDrug,
    Capped,
}

/// One line of the JSON Lines event log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub t: u64,
    pub agent: usize,
    pub event: EventKind,
    pub pos: Vec2,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub t: u64,
    pub pos: Vec2,
}

/// Outcome of one seeded run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub model: Model,
    pub trial: u64,
    pub seed: u64,
    pub agents: Vec<AgentState>,
    pub first_signal_drop_time: Option<u64>,
    /// `None` when the step cap was reached first.
    pub runtime_to_quota: Option<u64>,
    pub y_final: usize,
    pub z_final: usize,
    /// Last timestep executed.
    pub final_t: u64,
    pub events: Vec<Event>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trajectories: Option<Vec<Vec<TrajectoryPoint>>>,
}

impl TrialResult {
    pub fn n(&self) -> usize {
        self.agents.len()
    }

    pub fn delivery_times(&self) -> Vec<Option<u64>> {
        self.agents.iter().map(|a| a.delivery_time).collect()
    }

    pub fn drug_delivery_times(&self) -> Vec<Option<u64>> {
        self.agents
            .iter()
            .filter(|a| a.payload == Payload::Drug)
            .map(|a| a.delivery_time)
            .collect()
    }

    pub fn capped_count(&self) -> usize {
        self.agents.iter().filter(|a| a.status == Status::Capped).count()
    }

    pub fn active_count(&self) -> usize {
        self.agents.iter().filter(|a| a.is_active()).count()
    }

    pub fn is_capped(&self) -> bool {
        self.runtime_to_quota.is_none()
    }

    /// Drug deliveries `y` and signal drops `z` completed by timestep `t`.
    pub fn counts_at(&self, t: u64) -> (usize, usize) {
        let mut y = 0;
        let mut z = 0;
        for e in self.events.iter().take_while(|e| e.t <= t) {
            match e.event {
                EventKind::DropDrug => y += 1,
                EventKind::DropSignal => z += 1,
                EventKind::Capped => {}
            }
        }
        (y, z)
    }

    pub fn write_events_jsonl<W: Write>(&self, mut w: W) -> io::Result<()> {
        for e in &self.events {
            serde_json::to_writer(&mut w, e)?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }
}
