//! Per-agent believed coverage under communication delay.
//!
//! Agents broadcast their sensor footprint each step. A message sent at
//! time s becomes visible to a receiver at time t >= s + delay; an
//! agent's own sensing applies immediately. Inactive agents stop
//! sending. With zero delay, every belief equals true coverage.

use std::collections::VecDeque;

use crate::sim::{sensor_footprint, Cell, CoverageGrid, World};

#[derive(Debug, Clone)]
struct Message {
    send_time: usize,
    cells: Vec<Cell>,
}

/// One agent's view of team coverage.
#[derive(Debug, Clone)]
pub struct BeliefCoverage {
    pub owner: usize,
    pub believed: CoverageGrid,
    inbox: VecDeque<Message>,
}

impl BeliefCoverage {
    fn new(owner: usize, size: usize) -> Self {
        BeliefCoverage {
            owner,
            believed: CoverageGrid::empty(size),
            inbox: VecDeque::new(),
        }
    }

    fn deliver_up_to(&mut self, now: usize, delay: usize) {
        while let Some(msg) = self.inbox.front() {
            if msg.send_time + delay <= now {
                let msg = self.inbox.pop_front().unwrap();
                for cell in msg.cells {
                    self.believed.cover(cell);
                }
            } else {
                break;
            }
        }
    }
}

/// The whole team's beliefs for one environment instance.
#[derive(Debug, Clone)]
pub struct BeliefState {
    beliefs: Vec<BeliefCoverage>,
    comm_delay: usize,
}

impl BeliefState {
    /// Initial beliefs at world time 0: own footprints immediate,
    /// teammate footprints queued as messages sent at time 0.
    pub fn new(world: &World, comm_delay: usize) -> Self {
        let mut state = BeliefState {
            beliefs: (0..world.num_agents())
                .map(|i| BeliefCoverage::new(i, world.size()))
                .collect(),
            comm_delay,
        };
        state.ingest(world);
        state
    }

    pub fn comm_delay(&self) -> usize {
        self.comm_delay
    }

    pub fn belief(&self, agent: usize) -> &BeliefCoverage {
        &self.beliefs[agent]
    }

    /// Call once after every world step (and once at reset through
    /// [`BeliefState::new`]). Applies own sensing immediately, queues
    /// active teammates' footprints, then delivers everything due.
    pub fn update(&mut self, world: &World) {
        self.ingest(world);
    }

    fn ingest(&mut self, world: &World) {
        let now = world.t;
        let size = world.size();
        let footprints: Vec<Option<Vec<Cell>>> = world
            .agents
            .iter()
            .map(|a| {
                a.active
                    .then(|| sensor_footprint(a.position, a.sensor_k, size))
            })
            .collect();

        for belief in &mut self.beliefs {
            if let Some(own) = &footprints[belief.owner] {
                for &cell in own {
                    belief.believed.cover(cell);
                }
            }
            for (sender, cells) in footprints.iter().enumerate() {
                if sender == belief.owner {
                    continue;
                }
                if let Some(cells) = cells {
                    belief.inbox.push_back(Message {
                        send_time: now,
                        cells: cells.clone(),
                    });
                }
            }
            belief.deliver_up_to(now, self.comm_delay);
        }
    }
}
