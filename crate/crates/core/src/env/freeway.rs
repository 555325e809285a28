//! MiniFreeway: a chicken crosses ten lanes of traffic.
//!
//! Each step applies the action, moves the cars, then resolves the
//! chicken: reaching `y <= 0` scores one crossing and a car overlap knocks
//! the chicken back. Both are shown in the emitted snapshot (the chicken
//! at the top, or overlapping the car) and the chicken is moved to the
//! bottom at the start of the next step.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{EnvConfig, EnvError, Environment, StepResult};
use crate::games::Game;
use crate::object::{overlaps, GameObject, Snapshot};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FreewayParams {
    pub lanes: usize,
    /// Pixels per `up`/`down` action.
    pub chicken_step: f64,
    /// Speed (px/step) per lane, top lane first. Directions alternate.
    pub car_speeds: Vec<f64>,
    /// x of the controlled chicken; the idle second chicken sits at
    /// `player_x + 32`.
    pub player_x: f64,
}

impl Default for FreewayParams {
    fn default() -> Self {
        FreewayParams {
            lanes: 10,
            chicken_step: 2.0,
            car_speeds: vec![1.0, 2.0, 3.0, 4.0, 2.0, 2.0, 4.0, 3.0, 2.0, 1.0],
            player_x: 84.0,
        }
    }
}

pub const ACTIONS: &[&str] = &["noop", "up", "down"];

const CHICKEN: (f64, f64) = (6.0, 8.0);
const CAR: (f64, f64) = (8.0, 10.0);
const CHICKEN_RGB: [u8; 3] = [252, 252, 84];
const CAR_RGB: [u8; 3] = [167, 26, 26];

#[derive(Debug, Clone, Copy, PartialEq)]
enum Pending {
    None,
    Crossed,
    Hit,
}

pub struct MiniFreeway {
    config: EnvConfig,
    rng: ChaCha8Rng,
    chicken: GameObject,
    other: GameObject,
    cars: Vec<GameObject>,
    velocities: Vec<f64>,
    pending: Pending,
    t: u64,
    score: i64,
    collisions: u64,
    done: bool,
}

impl MiniFreeway {
    pub fn new(config: EnvConfig) -> Result<Self, EnvError> {
        let p = &config.freeway;
        if p.lanes == 0 || p.car_speeds.len() != p.lanes {
            return Err(EnvError::InvalidConfig(format!(
                "{} lanes but {} car speeds",
                p.lanes,
                p.car_speeds.len()
            )));
        }
        if !(p.chicken_step > 0.0) || config.horizon == 0 {
            return Err(EnvError::InvalidConfig("chicken_step and horizon must be positive".into()));
        }
        let rng = ChaCha8Rng::seed_from_u64(config.seed);
        let bottom = config.screen_height;
        let chicken = GameObject::new("Chicken", p.player_x, bottom, CHICKEN.0, CHICKEN.1).with_rgb(CHICKEN_RGB);
        let other = GameObject::new("Chicken", p.player_x + 32.0, bottom, CHICKEN.0, CHICKEN.1).with_rgb(CHICKEN_RGB);
        let mut env = MiniFreeway {
            config,
            rng,
            chicken,
            other,
            cars: Vec::new(),
            velocities: Vec::new(),
            pending: Pending::None,
            t: 0,
            score: 0,
            collisions: 0,
            done: true,
        };
        env.reset();
        Ok(env)
    }

    /// y of the top edge of a lane's cars. Lanes span the road between the
    /// start (bottom) and goal (top) strips.
    pub fn lane_y(&self, lane: usize) -> f64 {
        let h = self.config.screen_height;
        let road_top = h * 0.075;
        let pitch = (h * 0.85) / self.config.freeway.lanes as f64;
        (road_top + pitch * lane as f64 + (pitch - CAR.1) / 2.0).round()
    }

    fn snapshot(&self) -> Snapshot {
        let mut objects = Vec::with_capacity(13);
        objects.push(self.chicken.clone());
        objects.push(self.other.clone());
        objects.extend(self.cars.iter().cloned());
        objects.push(
            GameObject::new("Score", 48.0, 1.0, 12.0, 7.0)
                .with_hud(true)
                .with_value(self.score)
                .with_rgb(CHICKEN_RGB),
        );
        Snapshot::new(self.t, objects)
    }

    fn wrap(&self, x: f64) -> f64 {
        let span = self.config.screen_width + CAR.0;
        (x + CAR.0).rem_euclid(span) - CAR.0
    }

    pub fn score(&self) -> i64 {
        self.score
    }
}

impl Environment for MiniFreeway {
    fn game(&self) -> Game {
        Game::Freeway
    }

    fn action_count(&self) -> usize {
        ACTIONS.len()
    }

    fn action_names(&self) -> &'static [&'static str] {
        ACTIONS
    }

    fn reset(&mut self) -> Snapshot {
        let bottom = self.config.screen_height;
        let px = self.config.freeway.player_x;
        self.chicken = GameObject::new("Chicken", px, bottom, CHICKEN.0, CHICKEN.1).with_rgb(CHICKEN_RGB);
        self.other = GameObject::new("Chicken", px + 32.0, bottom, CHICKEN.0, CHICKEN.1).with_rgb(CHICKEN_RGB);
        let lanes = self.config.freeway.lanes;
        self.cars.clear();
        self.velocities.clear();
        for lane in 0..lanes {
            let x = self.rng.random_range(0.0..self.config.screen_width).floor();
            let y = self.lane_y(lane);
            self.cars.push(GameObject::new("Car", x, y, CAR.0, CAR.1).with_rgb(CAR_RGB));
            let speed = self.config.freeway.car_speeds[lane];
            self.velocities.push(if lane % 2 == 0 { -speed } else { speed });
        }
        self.pending = Pending::None;
        self.t = 0;
        self.score = 0;
        self.collisions = 0;
        self.done = false;
        self.snapshot()
    }

    fn step(&mut self, action: usize) -> Result<StepResult, EnvError> {
        if self.done {
            return Err(EnvError::StepAfterDone);
        }
        if action >= ACTIONS.len() {
            return Err(EnvError::InvalidAction { action, count: ACTIONS.len() });
        }
        let bottom = self.config.screen_height;
        let (cx, cy) = (self.chicken.x, self.chicken.y);
        if self.pending != Pending::None {
            self.chicken.move_to(cx, bottom);
        } else {
            let dy = match action {
                1 => -self.config.freeway.chicken_step,
                2 => self.config.freeway.chicken_step,
                _ => 0.0,
            };
            self.chicken.move_to(cx, (cy + dy).min(bottom));
        }
        self.other.move_to(self.other.x, self.other.y);
        for i in 0..self.cars.len() {
            let nx = self.wrap(self.cars[i].x + self.velocities[i]);
            let y = self.cars[i].y;
            self.cars[i].move_to(nx, y);
        }
        self.t += 1;

        let mut delta = 0.0;
        self.pending = Pending::None;
        if self.chicken.y <= 0.0 {
            delta = 1.0;
            self.score += 1;
            self.pending = Pending::Crossed;
        } else if self.cars.iter().any(|c| overlaps(&self.chicken, c)) {
            self.collisions += 1;
            self.pending = Pending::Hit;
        }
        self.done = self.t as usize >= self.config.horizon;
        let mut info = BTreeMap::new();
        info.insert("crossings", self.score as f64);
        info.insert("collisions", self.collisions as f64);
        Ok(StepResult { snapshot: self.snapshot(), true_score_delta: delta, done: self.done, info })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn env() -> MiniFreeway {
        MiniFreeway::new(EnvConfig::freeway(42)).unwrap()
    }

    fn chicken(s: &Snapshot) -> &GameObject {
        &s.objects[0]
    }

    #[test]
    fn reset_places_chicken_at_bottom() {
        let mut e = env();
        let s = e.reset();
        assert_eq!(chicken(&s).y, 160.0);
        assert_eq!(chicken(&s).dy(), 0.0);
        assert_eq!(s.by_category("Chicken").count(), 2);
        assert_eq!(s.by_category("Car").count(), 10);
        assert!(s.by_category("Chicken").all(|c| c.x >= 80.0));
    }

    #[test]
    fn up_moves_two_pixels() {
        let mut e = env();
        e.reset();
        let r = e.step(1).unwrap();
        assert_eq!(chicken(&r.snapshot).y, 158.0);
        assert_eq!(chicken(&r.snapshot).prev_y, 160.0);
    }

    #[test]
    fn collision_knocks_back() {
        let mut e = env();
        e.reset();
        // Park a car on the chicken's next position.
        e.chicken.move_to(84.0, 100.0);
        e.velocities = vec![0.0; 10];
        e.cars[0].move_to(82.0, 96.0);
        let r = e.step(0).unwrap();
        assert!(overlaps(chicken(&r.snapshot), &r.snapshot.objects[2]));
        assert_eq!(r.true_score_delta, 0.0);
        let r = e.step(1).unwrap();
        assert_eq!(chicken(&r.snapshot).y, 160.0);
        assert_eq!(r.true_score_delta, 0.0);
    }

    #[test]
    fn crossing_scores_once() {
        let mut e = env();
        e.reset();
        e.velocities = vec![0.0; 10];
        for c in &mut e.cars {
            c.move_to(0.0, c.y);
        }
        let mut total = 0.0;
        let mut at_top = None;
        for i in 0..90 {
            let r = e.step(1).unwrap();
            total += r.true_score_delta;
            if r.true_score_delta == 1.0 {
                assert!(chicken(&r.snapshot).y <= 0.0);
                at_top = Some(i);
            }
        }
        assert_eq!(total, 1.0);
        assert_eq!(at_top, Some(79));
    }

    #[test]
    fn horizon_ends_episode() {
        let mut cfg = EnvConfig::freeway(1);
        cfg.horizon = 5;
        let mut e = MiniFreeway::new(cfg).unwrap();
        for _ in 0..4 {
            assert!(!e.step(0).unwrap().done);
        }
        assert!(e.step(0).unwrap().done);
        assert_eq!(e.step(0), Err(EnvError::StepAfterDone));
    }
}
