//! MiniPong: the agent's paddle (Player) on the right, a tracking
//! opponent (Enemy) on the left.
//!
//! A ball leaving through the left edge scores +1, through the right edge
//! -1. After a point the ball keeps flying behind the paddle for
//! `respawn_delay` steps before it is served again from the center.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{EnvConfig, EnvError, Environment, StepResult};
use crate::games::Game;
use crate::object::{overlaps, GameObject, Snapshot};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PongParams {
    pub paddle_speed: f64,
    /// Speed cap of the opponent's tracking controller.
    pub enemy_speed: f64,
    /// Horizontal ball speed (px/step).
    pub ball_speed: f64,
    pub respawn_delay: u32,
    /// The episode ends when either side reaches this many points.
    pub points_to_win: i64,
}

impl Default for PongParams {
    fn default() -> Self {
        PongParams { paddle_speed: 3.0, enemy_speed: 1.5, ball_speed: 2.0, respawn_delay: 16, points_to_win: 5 }
    }
}

pub const ACTIONS: &[&str] = &["noop", "up", "down"];

const PADDLE: (f64, f64) = (4.0, 15.0);
const BALL: (f64, f64) = (2.0, 4.0);
const ENEMY_X: f64 = 16.0;
const PLAYER_X: f64 = 140.0;

pub struct MiniPong {
    config: EnvConfig,
    rng: ChaCha8Rng,
    player: GameObject,
    enemy: GameObject,
    ball: GameObject,
    vel: (f64, f64),
    /// Steps until the next serve while the ball is out of play.
    respawn: Option<u32>,
    t: u64,
    points: (i64, i64),
    done: bool,
}

impl MiniPong {
    pub fn new(config: EnvConfig) -> Result<Self, EnvError> {
        if config.horizon == 0 || config.pong.points_to_win <= 0 {
            return Err(EnvError::InvalidConfig("horizon and points_to_win must be positive".into()));
        }
        let rng = ChaCha8Rng::seed_from_u64(config.seed);
        let blank = GameObject::new("", 0.0, 0.0, 0.0, 0.0);
        let mut env = MiniPong {
            config,
            rng,
            player: blank.clone(),
            enemy: blank.clone(),
            ball: blank,
            vel: (0.0, 0.0),
            respawn: None,
            t: 0,
            points: (0, 0),
            done: true,
        };
        env.reset();
        Ok(env)
    }

    fn serve(&mut self) {
        let (w, h) = (self.config.screen_width, self.config.screen_height);
        let (x, y) = ((w - BALL.0) / 2.0, (h - BALL.1) / 2.0);
        self.ball = GameObject::new("Ball", x, y, BALL.0, BALL.1).with_rgb([236, 236, 236]);
        let s = self.config.pong.ball_speed;
        let vx = if self.rng.random_bool(0.5) { s } else { -s };
        let vy = self.rng.random_range(-1.0..1.0) * s * 0.75;
        self.vel = (vx, vy);
        self.respawn = None;
    }

    fn snapshot(&self) -> Snapshot {
        let objects = vec![
            self.player.clone(),
            self.enemy.clone(),
            self.ball.clone(),
            GameObject::new("PlayerScore", 100.0, 1.0, 12.0, 7.0).with_hud(true).with_value(self.points.0),
            GameObject::new("EnemyScore", 20.0, 1.0, 12.0, 7.0).with_hud(true).with_value(self.points.1),
        ];
        Snapshot::new(self.t, objects)
    }

    /// Points scored by (agent, opponent).
    pub fn points(&self) -> (i64, i64) {
        self.points
    }

    fn bounce(&mut self, paddle_is_player: bool) {
        let paddle = if paddle_is_player { &self.player } else { &self.enemy };
        let toward = if paddle_is_player { self.vel.0 > 0.0 } else { self.vel.0 < 0.0 };
        if toward && overlaps(&self.ball, paddle) {
            // Spin from the hit offset, -1 at the top edge to 1 at the bottom.
            let offset = ((self.ball.y + BALL.1 / 2.0) - (paddle.y + PADDLE.1 / 2.0)) / (PADDLE.1 / 2.0 + BALL.1 / 2.0);
            let s = self.config.pong.ball_speed;
            self.vel = (-self.vel.0, (offset * s).clamp(-1.5 * s, 1.5 * s));
        }
    }
}

impl Environment for MiniPong {
    fn game(&self) -> Game {
        Game::Pong
    }

    fn action_count(&self) -> usize {
        ACTIONS.len()
    }

    fn action_names(&self) -> &'static [&'static str] {
        ACTIONS
    }

    fn reset(&mut self) -> Snapshot {
        let h = self.config.screen_height;
        let py = (h - PADDLE.1) / 2.0;
        self.player = GameObject::new("Player", PLAYER_X, py, PADDLE.0, PADDLE.1).with_rgb([92, 186, 92]);
        self.enemy = GameObject::new("Enemy", ENEMY_X, py, PADDLE.0, PADDLE.1).with_rgb([213, 130, 74]);
        self.serve();
        self.t = 0;
        self.points = (0, 0);
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
        let (w, h) = (self.config.screen_width, self.config.screen_height);
        let p = self.config.pong.clone();
        let max_y = h - PADDLE.1;

        let dy = match action {
            1 => -p.paddle_speed,
            2 => p.paddle_speed,
            _ => 0.0,
        };
        let (px, py) = (self.player.x, self.player.y);
        self.player.move_to(px, (py + dy).clamp(0.0, max_y));

        let target = self.ball.y + BALL.1 / 2.0 - PADDLE.1 / 2.0;
        let ey = self.enemy.y + (target - self.enemy.y).clamp(-p.enemy_speed, p.enemy_speed);
        let ex = self.enemy.x;
        self.enemy.move_to(ex, ey.clamp(0.0, max_y));

        let mut delta = 0.0;
        match self.respawn {
            Some(0) => self.serve(),
            Some(n) => {
                self.respawn = Some(n - 1);
                let (bx, by) = (self.ball.x + self.vel.0, self.ball.y + self.vel.1);
                self.ball.move_to(bx, by);
            }
            None => {
                let (mut bx, mut by) = (self.ball.x + self.vel.0, self.ball.y + self.vel.1);
                if by < 0.0 {
                    by = -by;
                    self.vel.1 = -self.vel.1;
                } else if by > h - BALL.1 {
                    by = 2.0 * (h - BALL.1) - by;
                    self.vel.1 = -self.vel.1;
                }
                self.ball.move_to(bx, by);
                self.bounce(true);
                self.bounce(false);
                bx = self.ball.x;
                if bx < 0.0 {
                    delta = 1.0;
                    self.points.0 += 1;
                    self.respawn = Some(p.respawn_delay);
                } else if bx > w {
                    delta = -1.0;
                    self.points.1 += 1;
                    self.respawn = Some(p.respawn_delay);
                }
            }
        }
        self.t += 1;
        let won = self.points.0 >= p.points_to_win || self.points.1 >= p.points_to_win;
        self.done = won || self.t as usize >= self.config.horizon;
        let mut info = BTreeMap::new();
        info.insert("points_for", self.points.0 as f64);
        info.insert("points_against", self.points.1 as f64);
        Ok(StepResult { snapshot: self.snapshot(), true_score_delta: delta, done: self.done, info })
    }
}
