//! Fixed-length observation vectors from object snapshots.

use crate::games::Game;
use crate::object::Snapshot;

/// Features per slot: x, y, dx, dy, w, h (normalized by the screen) and a
/// presence flag.
pub const SLOT_FEATURES: usize = 7;

#[derive(Debug, Clone, PartialEq)]
pub struct Layout {
    pub game: Game,
    /// Canonical slot order: (category, number of slots).
    pub slots: Vec<(&'static str, usize)>,
    pub width: f64,
    pub height: f64,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ObserveError {
    #[error("no observation layout for {0}")]
    NoLayout(Game),
    #[error("schema mismatch at t={t}: {message}")]
    Schema { t: u64, message: String },
}

impl Layout {
    pub fn new(game: Game, width: f64, height: f64) -> Result<Self, ObserveError> {
        let slots = match game {
            Game::Freeway => vec![("Chicken", 2), ("Car", 10)],
            Game::Pong => vec![("Player", 1), ("Enemy", 1), ("Ball", 1)],
            g => return Err(ObserveError::NoLayout(g)),
        };
        Ok(Layout { game, slots, width, height })
    }

    pub fn slot_count(&self) -> usize {
        self.slots.iter().map(|(_, n)| n).sum()
    }

    pub fn dim(&self) -> usize {
        self.slot_count() * SLOT_FEATURES
    }

    pub fn observe(&self, snapshot: &Snapshot) -> Result<Vec<f64>, ObserveError> {
        let mut out = Vec::with_capacity(self.dim());
        let mut used = 0;
        for &(category, n) in &self.slots {
            let mut placed = 0;
            for o in snapshot.reward_visible().filter(|o| o.category == category) {
                if placed == n {
                    return Err(ObserveError::Schema {
                        t: snapshot.t,
                        message: format!("more than {n} {category} objects"),
                    });
                }
                let (w, h) = (self.width, self.height);
                out.extend_from_slice(&[o.x / w, o.y / h, o.dx() / w, o.dy() / h, o.w / w, o.h / h, 1.0]);
                placed += 1;
            }
            out.resize(out.len() + (n - placed) * SLOT_FEATURES, 0.0);
            used += placed;
        }
        let visible = snapshot.reward_visible().count();
        if visible != used {
            return Err(ObserveError::Schema {
                t: snapshot.t,
                message: format!("{} objects outside the {} layout", visible - used, self.game),
            });
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{make, EnvConfig};
    use crate::object::GameObject;

    #[test]
    fn freeway_reset_chicken_at_the_bottom() {
        let mut env = make(&EnvConfig::freeway(1)).unwrap();
        let s = env.reset();
        let layout = Layout::new(Game::Freeway, 160.0, 160.0).unwrap();
        let v = layout.observe(&s).unwrap();
        assert_eq!(v.len(), 12 * SLOT_FEATURES);
        assert_eq!(v[1], 1.0);
        assert_eq!(v[6], 1.0);
        assert_eq!(layout.observe(&s).unwrap(), v);
    }

    #[test]
    fn missing_object_is_zero_padded() {
        let layout = Layout::new(Game::Pong, 160.0, 160.0).unwrap();
        let s = Snapshot::new(
            0,
            vec![GameObject::new("Player", 140.0, 80.0, 4.0, 15.0), GameObject::new("Enemy", 16.0, 80.0, 4.0, 15.0)],
        );
        let v = layout.observe(&s).unwrap();
        assert_eq!(&v[14..21], &[0.0; 7]);
        assert_eq!(v[6], 1.0);
    }

    #[test]
    fn unknown_objects_are_rejected() {
        let layout = Layout::new(Game::Pong, 160.0, 160.0).unwrap();
        let s = Snapshot::new(3, vec![GameObject::new("Shark", 0.0, 0.0, 8.0, 7.0)]);
        assert!(matches!(layout.observe(&s), Err(ObserveError::Schema { t: 3, .. })));
        assert!(Layout::new(Game::Skiing, 160.0, 210.0).is_err());
    }
}
