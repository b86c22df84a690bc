use std::collections::VecDeque;

use crate::geometry::Point;

use super::tsp::tsp_tour;

/// An event waiting for, or receiving, service.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PendingEvent {
    /// Arrival index, starting at 0.
    pub id: u64,
    pub arrival: f64,
    pub location: Point,
    pub service: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompletedService {
    pub id: u64,
    pub robot: usize,
    pub arrival: f64,
    /// Time between arrival and the robot reaching the location.
    pub wait: f64,
    pub service: f64,
    pub completion: f64,
    /// Backlog and tour sizes of the robot right after completion.
    pub backlog: usize,
    pub tour: usize,
}

impl CompletedService {
    pub fn system_time(&self) -> f64 {
        self.wait + self.service
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    ToReference,
    IdleAtReference,
    TravelingToEvent,
    Servicing,
}

/// One vehicle running the three-case process: return to the reference
/// when there is no work, turn the backlog into a tour, serve the tour.
#[derive(Debug, Clone)]
pub struct DtrpRobot {
    pub id: usize,
    pub generator: Point,
    pub reference: Point,
    pub position: Point,
    pub speed: f64,
    backlog: Vec<PendingEvent>,
    tour: VecDeque<PendingEvent>,
    mode: Mode,
    service_left: f64,
    wait: f64,
    swap_factor: usize,
    cap_hits: u64,
    tours: u64,
}

impl DtrpRobot {
    pub fn new(id: usize, generator: Point, reference: Point, position: Point, speed: f64, swap_factor: usize) -> Self {
        let mode = if position == reference { Mode::IdleAtReference } else { Mode::ToReference };
        DtrpRobot {
            id,
            generator,
            reference,
            position,
            speed,
            backlog: Vec::new(),
            tour: VecDeque::new(),
            mode,
            service_left: 0.0,
            wait: 0.0,
            swap_factor,
            cap_hits: 0,
            tours: 0,
        }
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn backlog(&self) -> &[PendingEvent] {
        &self.backlog
    }

    pub fn tour(&self) -> &VecDeque<PendingEvent> {
        &self.tour
    }

    pub fn outstanding(&self) -> usize {
        self.backlog.len() + self.tour.len()
    }

    pub fn cap_hits(&self) -> u64 {
        self.cap_hits
    }

    pub fn tours_built(&self) -> u64 {
        self.tours
    }

    pub fn assign(&mut self, event: PendingEvent) {
        self.backlog.push(event);
    }

    /// No work and parked at the reference.
    pub fn is_idle(&self) -> bool {
        self.backlog.is_empty() && self.tour.is_empty() && self.position == self.reference
    }

    /// Advance the process from `now` by `dt`; completed services are
    /// appended to `done`.
    pub fn step(&mut self, now: f64, dt: f64, done: &mut Vec<CompletedService>) {
        debug_assert!(dt > 0.0);
        let mut t = now;
        let mut left = dt;
        loop {
            if let Some(front) = self.tour.front().copied() {
                if self.mode == Mode::Servicing {
                    if self.service_left <= left {
                        t += self.service_left;
                        left -= self.service_left;
                        self.tour.pop_front();
                        self.service_left = 0.0;
                        self.mode = Mode::TravelingToEvent;
                        done.push(CompletedService {
                            id: front.id,
                            robot: self.id,
                            arrival: front.arrival,
                            wait: self.wait,
                            service: front.service,
                            completion: t,
                            backlog: self.backlog.len(),
                            tour: self.tour.len(),
                        });
                    } else {
                        self.service_left -= left;
                        return;
                    }
                } else {
                    self.mode = Mode::TravelingToEvent;
                    let d = self.position.distance(&front.location);
                    let reach = self.speed * left;
                    if d <= reach {
                        let travel = d / self.speed;
                        t += travel;
                        left -= travel;
                        self.position = front.location;
                        self.mode = Mode::Servicing;
                        self.service_left = front.service;
                        self.wait = (t - front.arrival).max(0.0);
                    } else {
                        self.position = self.position + (front.location - self.position) * (reach / d);
                        return;
                    }
                }
            } else if !self.backlog.is_empty() {
                let points: Vec<Point> = self.backlog.iter().map(|e| e.location).collect();
                let tour = tsp_tour(&self.position, &points, self.swap_factor);
                self.cap_hits += u64::from(tour.cap_hit);
                self.tours += 1;
                self.tour = tour.order.iter().map(|&i| self.backlog[i]).collect();
                self.backlog.clear();
                self.mode = Mode::TravelingToEvent;
            } else {
                let d = self.position.distance(&self.reference);
                let reach = self.speed * left;
                if d <= reach {
                    self.position = self.reference;
                    self.mode = Mode::IdleAtReference;
                } else {
                    self.position = self.position + (self.reference - self.position) * (reach / d);
                    self.mode = Mode::ToReference;
                }
                return;
            }
            if left <= 0.0 {
                return;
            }
        }
    }
}
