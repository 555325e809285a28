//! Hand transcriptions of the eight published reward programs (four games,
//! full and no-relations synthesis), compiled into the library.

use crate::dsl::{compile, ProgramOrigin, RewardProgram};
use crate::games::Game;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Fixture {
    pub game: Game,
    /// Synthesis mode of the original program (`Full` or `NoRelations`).
    pub mode: ProgramOrigin,
    /// File name under `fixtures/`.
    pub file: &'static str,
    pub source: &'static str,
    /// The original program ends in a clamp to [-1, 1].
    pub clamped: bool,
}

macro_rules! fixture {
    ($game:ident, $mode:ident, $file:literal, $clamped:literal) => {
        Fixture {
            game: Game::$game,
            mode: ProgramOrigin::$mode,
            file: $file,
            source: include_str!(concat!("../../../fixtures/", $file)),
            clamped: $clamped,
        }
    };
}

pub const ALL: [Fixture; 8] = [
    fixture!(Freeway, Full, "freeway_full.rw", true),
    fixture!(Freeway, NoRelations, "freeway_no_relations.rw", true),
    fixture!(Pong, Full, "pong_full.rw", true),
    fixture!(Pong, NoRelations, "pong_no_relations.rw", true),
    fixture!(Seaquest, Full, "seaquest_full.rw", false),
    fixture!(Seaquest, NoRelations, "seaquest_no_relations.rw", false),
    fixture!(Skiing, Full, "skiing_full.rw", true),
    fixture!(Skiing, NoRelations, "skiing_no_relations.rw", false),
];

impl Fixture {
    /// Compiled program, tagged as a hand fixture. Fixtures are checked by
    /// the test suite, so a failure here is a build defect.
    pub fn program(&self) -> RewardProgram {
        compile(self.source).unwrap_or_else(|d| panic!("fixture {} does not compile: {d:?}", self.file))
    }
}

pub fn get(game: Game, mode: ProgramOrigin) -> Option<&'static Fixture> {
    ALL.iter().find(|f| f.game == game && f.mode == mode)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::{parse, pretty_print, typecheck};

    #[test]
    fn all_fixtures_typecheck() {
        for f in ALL {
            let p = parse(f.source).unwrap_or_else(|d| panic!("{}: {d:?}", f.file));
            let errs = typecheck(&p);
            assert!(errs.is_empty(), "{}: {errs:?}", f.file);
        }
    }

    #[test]
    fn fixtures_roundtrip() {
        for f in ALL {
            let p = f.program();
            let q = parse(&pretty_print(&p)).unwrap();
            assert_eq!(p, q, "{}", f.file);
        }
    }

    #[test]
    fn freeway_full_shape() {
        let p = get(Game::Freeway, ProgramOrigin::Full).unwrap().program();
        let names: Vec<&str> = p.helpers.iter().map(|h| h.name.as_str()).collect();
        assert_eq!(names, ["detect_collision", "has_reached_top", "progress_made", "check_if_reset", "find_closest_car"]);
    }
}
