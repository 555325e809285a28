//! Registry of the supported games: descriptions, object classes and the
//! schema text shown to the language model.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Game {
    Freeway,
    Pong,
    Seaquest,
    Skiing,
}

/// One object class of a game, as the object extractor reports it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectClass {
    pub name: &'static str,
    pub wh: (f64, f64),
    pub rgb: [u8; 3],
    /// Carries `value`/`prev_value` (oxygen bars, counters).
    pub valued: bool,
    pub doc: &'static str,
}

const fn class(name: &'static str, w: f64, h: f64, rgb: [u8; 3], doc: &'static str) -> ObjectClass {
    ObjectClass { name, wh: (w, h), rgb, valued: false, doc }
}

const FREEWAY: &[ObjectClass] = &[
    class("Chicken", 6.0, 8.0, [252, 252, 84], "The player figure i.e., the chicken."),
    class("Car", 8.0, 10.0, [167, 26, 26], "The cars on the lanes."),
];

const PONG: &[ObjectClass] = &[
    class("Player", 4.0, 15.0, [92, 186, 92], "The player figure i.e., the movable bar at the side."),
    class("Enemy", 4.0, 15.0, [213, 130, 74], "The enemy bar on the opposite side."),
    class("Ball", 2.0, 4.0, [236, 236, 236], "The game ball."),
];

const SEAQUEST: &[ObjectClass] = &[
    class("Player", 16.0, 11.0, [187, 187, 53], "The player figure i.e., the submarine."),
    class("Diver", 8.0, 11.0, [66, 72, 200], "The divers to be retrieved."),
    class("Shark", 8.0, 7.0, [92, 186, 92], "The killer sharks."),
    class("Submarine", 8.0, 11.0, [170, 170, 170], "The enemy submarines."),
    class("EnemyMissile", 8.0, 1.0, [66, 72, 200], "The torpedoes fired by enemy submarines."),
    class("PlayerMissile", 8.0, 1.0, [187, 187, 53], "The torpedoes fired by the player."),
    ObjectClass {
        name: "OxygenBar",
        wh: (64.0, 5.0),
        rgb: [214, 92, 92],
        valued: true,
        doc: "The oxygen bar; its value is the remaining oxygen (0 to 64).",
    },
    class("CollectedDiver", 8.0, 9.0, [24, 26, 167], "The indicator of a diver already collected."),
];

const SKIING: &[ObjectClass] = &[
    class("Player", 10.0, 18.0, [214, 92, 92], "The player figure i.e., the skier."),
    class("Flag", 5.0, 14.0, [10, 10, 255], "The flags of the gates."),
    class("Tree", 16.0, 30.0, [110, 156, 66], "The trees on the slope."),
    class("Mogul", 16.0, 7.0, [214, 214, 214], "The moguls on the slope."),
];

impl Game {
    pub const ALL: [Game; 4] = [Game::Freeway, Game::Pong, Game::Seaquest, Game::Skiing];

    pub fn name(self) -> &'static str {
        match self {
            Game::Freeway => "freeway",
            Game::Pong => "pong",
            Game::Seaquest => "seaquest",
            Game::Skiing => "skiing",
        }
    }

    /// Display name used in prompts.
    pub fn title(self) -> &'static str {
        match self {
            Game::Freeway => "Freeway",
            Game::Pong => "Pong",
            Game::Seaquest => "Seaquest",
            Game::Skiing => "Skiing",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Game::Freeway => include_str!("../templates/games/freeway.txt"),
            Game::Pong => include_str!("../templates/games/pong.txt"),
            Game::Seaquest => include_str!("../templates/games/seaquest.txt"),
            Game::Skiing => include_str!("../templates/games/skiing.txt"),
        }
    }

    /// Reward-visible object classes. Score displays are deliberately absent.
    pub fn classes(self) -> &'static [ObjectClass] {
        match self {
            Game::Freeway => FREEWAY,
            Game::Pong => PONG,
            Game::Seaquest => SEAQUEST,
            Game::Skiing => SKIING,
        }
    }

    pub fn class(self, name: &str) -> Option<&'static ObjectClass> {
        self.classes().iter().find(|c| c.name == name)
    }

    /// Screen extent (width, height) in pixels.
    pub fn screen(self) -> (f64, f64) {
        match self {
            Game::Freeway => (160.0, 160.0),
            _ => (160.0, 210.0),
        }
    }

    /// Whether a simulator exists; the other games are replay-only.
    pub fn simulated(self) -> bool {
        matches!(self, Game::Freeway | Game::Pong)
    }
}

impl fmt::Display for Game {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown game `{0}` (expected freeway, pong, seaquest or skiing)")]
pub struct UnknownGame(pub String);

impl FromStr for Game {
    type Err = UnknownGame;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Game::ALL.into_iter().find(|g| g.name() == s.to_ascii_lowercase()).ok_or_else(|| UnknownGame(s.to_string()))
    }
}

/// Text standing in for the parent object class in prompts.
pub const PARENT_CLASS_TEXT: &str = "\
class GameObject:
    \"\"\"
    The parent class of every detected object. Reward programs read these
    attributes with `obj.<field>`.
    \"\"\"
    category: str      # class name, e.g. \"Player\"; compare with obj.category == \"Player\"
    x: float           # left edge in pixels
    y: float           # top edge in pixels
    w: float           # width in pixels
    h: float           # height in pixels
    prev_x: float      # x at the previous step
    prev_y: float      # y at the previous step
    dx: float          # x - prev_x
    dy: float          # y - prev_y
    orientation: float # only for objects that have one
    rgb: (int, int, int)

    # helpers available as builtins:
    # center_x(obj), center_y(obj), center(obj) -> (x + w/2, y + h/2)
    # manhattan(a, b): manhattan distance between the centers
    # overlaps(a, b): the bounding boxes intersect
    # corner_in(a, b): the top-left corner of a lies inside b
    # nearest(obj, objs): the closest object of objs, or none


class ValueObject(GameObject):
    \"\"\"
    An object with a numeric value, e.g. a resource bar.
    \"\"\"
    value: int
    prev_value: int    # value at the previous step
    value_diff: int    # value - prev_value";

/// Per-game object class listing, rendered from the registry.
pub fn schema_text(game: Game) -> String {
    let mut out = String::new();
    for (i, c) in game.classes().iter().enumerate() {
        if i > 0 {
            out.push_str("\n\n");
        }
        let parent = if c.valued { "ValueObject" } else { "GameObject" };
        out.push_str(&format!(
            "class {}({parent}):\n    \"\"\"\n    {}\n    \"\"\"\n    wh = {}, {}\n    rgb = {}, {}, {}",
            c.name, c.doc, c.wh.0, c.wh.1, c.rgb[0], c.rgb[1], c.rgb[2]
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn descriptions_are_verbatim() {
        assert!(Game::Freeway.description().contains("cross ten horizontal lanes"));
        assert!(Game::Freeway.description().ends_with("The screen height is 160."));
        assert!(Game::Pong.description().starts_with("In this game the agent has to knock the ball"));
        assert!(Game::Seaquest.description().contains("base. \nYour sub"));
        assert!(Game::Skiing.description().contains("horizontal pairs of flags"));
    }

    #[test]
    fn schemas_omit_scores() {
        for g in Game::ALL {
            let s = schema_text(g);
            assert!(!s.contains("Score"), "{g}");
            for c in g.classes() {
                assert!(s.contains(&format!("class {}(", c.name)));
            }
        }
        assert!(schema_text(Game::Pong).contains("wh = 4, 15"));
    }

    #[test]
    fn parse_names() {
        assert_eq!("Pong".parse::<Game>().unwrap(), Game::Pong);
        assert!("tetris".parse::<Game>().is_err());
    }
}
