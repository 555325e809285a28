//! Object-centric state abstraction.
//!
//! A [`Snapshot`] is the list of [`GameObject`]s visible at one step. Reward
//! programs, environments, traces and the fuzzer all speak this type, and the
//! geometry helpers here are the primitives the reward language exposes.

use serde::{Deserialize, Serialize};

use crate::games::Game;

/// One detected on-screen entity.
///
/// Coordinates are the top-left corner in pixels. `prev_x`/`prev_y` hold the
/// position at the previous step; after a reset they equal `x`/`y`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameObject {
    pub category: String,
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
    pub prev_x: f64,
    pub prev_y: f64,
    pub rgb: [u8; 3],
    pub orientation: Option<f64>,
    pub hud: bool,
    pub value: Option<i64>,
    pub prev_value: Option<i64>,
}

impl GameObject {
    /// A stationary object: previous position equals current position.
    pub fn new(category: impl Into<String>, x: f64, y: f64, w: f64, h: f64) -> Self {
        GameObject {
            category: category.into(),
            x,
            y,
            w: w.max(0.0),
            h: h.max(0.0),
            prev_x: x,
            prev_y: y,
            rgb: [0, 0, 0],
            orientation: None,
            hud: false,
            value: None,
            prev_value: None,
        }
    }

    pub fn with_rgb(mut self, rgb: [u8; 3]) -> Self {
        self.rgb = rgb;
        self
    }

    pub fn with_prev(mut self, prev_x: f64, prev_y: f64) -> Self {
        self.prev_x = prev_x;
        self.prev_y = prev_y;
        self
    }

    pub fn with_value(mut self, value: i64) -> Self {
        self.value = Some(value);
        self
    }

    pub fn with_prev_value(mut self, prev_value: i64) -> Self {
        self.prev_value = Some(prev_value);
        self
    }

    pub fn with_hud(mut self, hud: bool) -> Self {
        self.hud = hud;
        self
    }

    /// Moves the object, remembering the old position as the previous one.
    pub fn move_to(&mut self, x: f64, y: f64) {
        self.prev_x = self.x;
        self.prev_y = self.y;
        self.x = x;
        self.y = y;
    }

    pub fn dx(&self) -> f64 {
        self.x - self.prev_x
    }

    pub fn dy(&self) -> f64 {
        self.y - self.prev_y
    }

    /// Previous value; falls back to the current value when no previous one
    /// was recorded, the same way value-bearing objects behave right after a
    /// reset.
    pub fn prev_value_or_current(&self) -> Option<i64> {
        self.prev_value.or(self.value)
    }

    /// `value - prev_value`; `None` when the object carries no value.
    pub fn value_diff(&self) -> Option<i64> {
        let v = self.value?;
        v.checked_sub(self.prev_value_or_current()?)
    }

    /// Score displays never reach reward programs.
    pub fn is_score_display(&self) -> bool {
        self.hud || self.category.contains("Score")
    }
}

/// Center point of the bounding box.
pub fn center(obj: &GameObject) -> (f64, f64) {
    (obj.x + obj.w / 2.0, obj.y + obj.h / 2.0)
}

/// Manhattan distance between the two box centers.
pub fn manhattan_distance(a: &GameObject, b: &GameObject) -> f64 {
    let (ax, ay) = center(a);
    let (bx, by) = center(b);
    (ax - bx).abs() + (ay - by).abs()
}

/// Strict axis-aligned box intersection. Boxes sharing only an edge do not
/// overlap.
pub fn overlaps(a: &GameObject, b: &GameObject) -> bool {
    a.x < b.x + b.w && a.x + a.w > b.x && a.y < b.y + b.h && a.y + a.h > b.y
}

/// True when the top-left corner of `a` lies inside `b` (bounds inclusive).
///
/// Not symmetric: a large box containing a small one is not "in" it.
pub fn corner_in(a: &GameObject, b: &GameObject) -> bool {
    b.x <= a.x && a.x <= b.x + b.w && b.y <= a.y && a.y <= b.y + b.h
}

/// Closest candidate by [`manhattan_distance`], returning its index.
/// Ties go to the lowest index.
pub fn nearest<'a>(
    reference: &GameObject,
    candidates: &'a [GameObject],
) -> Option<(usize, &'a GameObject)> {
    nearest_by_ref(reference, candidates.iter())
}

pub(crate) fn nearest_by_ref<'a, I>(reference: &GameObject, candidates: I) -> Option<(usize, &'a GameObject)>
where
    I: IntoIterator<Item = &'a GameObject>,
{
    let mut best: Option<(usize, &GameObject, f64)> = None;
    for (i, c) in candidates.into_iter().enumerate() {
        let d = manhattan_distance(reference, c);
        match best {
            Some((_, _, bd)) if !(d < bd) => {}
            _ => best = Some((i, c, d)),
        }
    }
    best.map(|(i, c, _)| (i, c))
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("t={t}, object {index}: {message}")]
pub struct SchemaError {
    pub t: u64,
    pub index: usize,
    pub message: String,
}

/// All objects present at one step, in a stable order.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Snapshot {
    pub t: u64,
    pub objects: Vec<GameObject>,
}

impl Snapshot {
    pub fn new(t: u64, objects: Vec<GameObject>) -> Self {
        Snapshot { t, objects }
    }

    /// Objects a reward program may see: HUD and score displays removed.
    pub fn reward_visible(&self) -> impl Iterator<Item = &GameObject> {
        self.objects.iter().filter(|o| !o.is_score_display())
    }

    /// Copy with HUD and score displays dropped.
    pub fn without_hud(&self) -> Snapshot {
        Snapshot { t: self.t, objects: self.reward_visible().cloned().collect() }
    }

    pub fn by_category<'a>(&'a self, category: &'a str) -> impl Iterator<Item = &'a GameObject> + 'a {
        self.objects.iter().filter(move |o| o.category == category)
    }

    /// Checks the reward-visible objects against a game's class registry:
    /// known category, finite coordinates, nonnegative extent, and a value
    /// exactly on value-bearing classes.
    pub fn check_schema(&self, game: Game) -> Result<(), SchemaError> {
        for (i, o) in self.objects.iter().enumerate() {
            if o.is_score_display() {
                continue;
            }
            let err = |message: String| SchemaError { t: self.t, index: i, message };
            let class = game.class(&o.category).ok_or_else(|| err(format!("unknown {game} class `{}`", o.category)))?;
            if ![o.x, o.y, o.w, o.h, o.prev_x, o.prev_y].iter().all(|v| v.is_finite()) {
                return Err(err("non-finite coordinate".into()));
            }
            if o.w < 0.0 || o.h < 0.0 {
                return Err(err("negative extent".into()));
            }
            if class.valued != o.value.is_some() {
                return Err(err(format!("{} must {}carry a value", o.category, if class.valued { "" } else { "not " })));
            }
        }
        Ok(())
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("snapshot serialization is infallible")
    }

    pub fn from_json_line(line: &str) -> serde_json::Result<Snapshot> {
        serde_json::from_str(line)
    }
}
