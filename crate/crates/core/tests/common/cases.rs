//! Hand-traced snapshots for the fixture programs. `expected` is the value
//! worked out on paper from the original Python program; `traps` marks
//! snapshots on which the original raises.

use relreward_core::{GameObject, Game};

pub struct Case {
    pub name: &'static str,
    pub objects: Vec<GameObject>,
    pub expected: f64,
    pub traps: bool,
}

fn case(name: &'static str, objects: Vec<GameObject>, expected: f64) -> Case {
    Case { name, objects, expected, traps: false }
}

fn trap(name: &'static str, objects: Vec<GameObject>) -> Case {
    Case { name, objects, expected: 0.0, traps: true }
}

/// An object of `game`'s class `name` with the schema size, at rest.
pub fn o(game: Game, name: &str, x: f64, y: f64) -> GameObject {
    let c = game.class(name).unwrap_or_else(|| panic!("{game} has no {name}"));
    GameObject::new(name, x, y, c.wh.0, c.wh.1).with_rgb(c.rgb)
}

fn score_hud() -> GameObject {
    GameObject::new("PlayerScore", 40.0, 2.0, 12.0, 8.0).with_hud(true).with_value(3)
}

pub fn freeway_full() -> Vec<Case> {
    let f = |n, x, y| o(Game::Freeway, n, x, y);
    vec![
        case("bottom, no collision", vec![f("Chicken", 44.0, 160.0)], 0.0),
        case("top: 1.0 + 0.1 clamped", vec![f("Chicken", 44.0, 0.0)], 1.0),
        case("halfway, hit by a car: 0.05 - 1.0", vec![f("Chicken", 44.0, 80.0), f("Car", 42.0, 78.0)], -0.95),
        case("no chicken", vec![f("Car", 10.0, 20.0), f("Car", 70.0, 40.0)], 0.0),
        case("a quarter up", vec![f("Chicken", 44.0, 120.0), f("Car", 100.0, 20.0)], 0.025),
        case("leftmost chicken is the player", vec![f("Chicken", 108.0, 40.0), f("Chicken", 44.0, 120.0)], 0.025),
        case("equal x: first chicken wins", vec![f("Chicken", 44.0, 40.0), f("Chicken", 44.0, 120.0)], 0.075),
        case("edge contact counts as collision", vec![f("Chicken", 44.0, 80.0), f("Car", 50.0, 80.0)], -0.95),
        case("two cars penalize once", vec![f("Chicken", 44.0, 80.0), f("Car", 42.0, 78.0), f("Car", 40.0, 76.0)], -0.95),
        case("past the top edge", vec![f("Chicken", 44.0, -2.0)], 1.0),
        case("score display ignored", vec![score_hud(), f("Chicken", 44.0, 120.0)], 0.025),
        case("empty", vec![], 0.0),
    ]
}

pub fn freeway_no_relations() -> Vec<Case> {
    let f = |n, x, y| o(Game::Freeway, n, x, y);
    vec![
        case(
            "simulated chickens at x >= 80",
            vec![f("Chicken", 84.0, 100.0).with_prev(84.0, 102.0), f("Chicken", 116.0, 0.0), f("Car", 84.0, 98.0)],
            0.0,
        ),
        case("moving up: -2/160 - 2*2/160", vec![f("Chicken", 44.0, 158.0).with_prev(44.0, 160.0)], -0.0375),
        case("moving down", vec![f("Chicken", 44.0, 102.0).with_prev(44.0, 100.0)], 0.0125),
        case("corner inside a car", vec![f("Chicken", 44.0, 100.0), f("Car", 40.0, 96.0)], -0.5),
        case(
            "two cars and moving up, clamped",
            vec![f("Chicken", 44.0, 100.0).with_prev(44.0, 102.0), f("Car", 40.0, 96.0), f("Car", 42.0, 92.0)],
            -1.0,
        ),
        case("at the top", vec![f("Chicken", 44.0, 0.0)], 0.5),
        case("reaching the top", vec![f("Chicken", 44.0, 0.0).with_prev(44.0, 2.0)], 0.4625),
        case(
            "last matching chicken wins",
            vec![f("Chicken", 44.0, 50.0), f("Chicken", 60.0, 30.0).with_prev(60.0, 32.0)],
            -0.0375,
        ),
        case("empty", vec![], 0.0),
        case("x just below 80", vec![f("Chicken", 79.5, 104.0).with_prev(79.5, 100.0)], 0.025),
        case("x exactly 80 is not selected", vec![f("Chicken", 80.0, 0.0).with_prev(80.0, 2.0)], 0.0),
    ]
}

pub fn pong_full() -> Vec<Case> {
    let f = |n, x, y| o(Game::Pong, n, x, y);
    let paddles = || vec![f("Enemy", 16.0, 100.0), f("Player", 140.0, 45.0)];
    let with = |extra: Vec<GameObject>| {
        let mut v = paddles();
        v.extend(extra);
        v
    };
    vec![
        case("ball behind the enemy", with(vec![f("Ball", -3.0, 60.0)]), 1.0),
        case("ball hits the player paddle", with(vec![f("Ball", 141.0, 50.0)]), 0.1),
        case("ball behind the player", with(vec![f("Ball", 161.0, 60.0)]), -1.0),
        case("ball in play", with(vec![f("Ball", 80.0, 60.0)]), 0.0),
        case("no ball", paddles(), 0.0),
        case("no enemy", vec![f("Player", 140.0, 45.0), f("Ball", -3.0, 60.0)], 0.0),
        case("ball hits the enemy paddle", with(vec![f("Ball", 18.0, 110.0)]), 0.1),
        case("ball right edge at 1 is still in", with(vec![f("Ball", -1.0, 60.0)]), 0.0),
        case("x = 160 is not past", with(vec![f("Ball", 160.0, 60.0)]), 0.0),
        case(
            "scored and touching: 1.1 clamped",
            vec![f("Enemy", -4.0, 55.0), f("Player", 140.0, 45.0), f("Ball", -3.0, 60.0)],
            1.0,
        ),
        case(
            "conceded and touching",
            vec![f("Enemy", 16.0, 100.0), f("Player", 159.0, 55.0), f("Ball", 161.0, 60.0)],
            -0.9,
        ),
        case("last ball is used", with(vec![f("Ball", -3.0, 60.0), f("Ball", 80.0, 60.0)]), 0.0),
        case("score display ignored", with(vec![score_hud(), f("Ball", -3.0, 60.0)]), 1.0),
    ]
}

pub fn pong_no_relations() -> Vec<Case> {
    let f = |n, x, y| o(Game::Pong, n, x, y);
    let with = |ball: f64| vec![f("Player", 140.0, 45.0), f("Enemy", 16.0, 100.0), f("Ball", ball, 60.0)];
    vec![
        case("ball left of the enemy", with(10.0), 1.0),
        case("ball right of the player", with(150.0), -1.0),
        case("ball in play", with(80.0), 0.0),
        trap("no ball", vec![f("Player", 140.0, 45.0), f("Enemy", 16.0, 100.0)]),
        trap("no player", vec![f("Enemy", 16.0, 100.0), f("Ball", 80.0, 60.0)]),
        case("ball at enemy x", with(16.0), 0.0),
        case("ball at player right edge", with(144.0), 0.0),
        case(
            "both conditions cancel",
            vec![f("Player", 140.0, 45.0), f("Enemy", 150.0, 100.0), f("Ball", 148.0, 60.0)],
            0.0,
        ),
        case(
            "last player is used",
            vec![f("Player", 140.0, 45.0), f("Player", 100.0, 45.0), f("Enemy", 16.0, 100.0), f("Ball", 120.0, 60.0)],
            -1.0,
        ),
        case("ball at 0", with(0.0), 1.0),
        trap("empty", vec![]),
    ]
}

fn oxygen(v: i64) -> GameObject {
    o(Game::Seaquest, "OxygenBar", 49.0, 170.0).with_value(v).with_prev_value(v)
}

pub fn seaquest_full() -> Vec<Case> {
    let f = |n, x, y| o(Game::Seaquest, n, x, y);
    let player = || f("Player", 50.0, 50.0);
    vec![
        case("low oxygen: -0.05 - 0.1", vec![player(), oxygen(5)], -0.15),
        case("full oxygen", vec![player(), oxygen(64)], 0.0),
        case("oxygen 20", vec![player(), oxygen(20)], -0.05),
        case("oxygen 10", vec![player(), oxygen(10)], -0.15),
        case("oxygen 21", vec![player(), oxygen(21)], 0.0),
        case("diver pickup", vec![player(), f("Diver", 60.0, 55.0), oxygen(64)], 0.1),
        case(
            "second of two adjacent divers is skipped",
            vec![player(), f("Diver", 52.0, 52.0), f("Diver", 60.0, 52.0), oxygen(64)],
            0.1,
        ),
        case(
            "three divers: skip pattern",
            vec![player(), f("Diver", 52.0, 52.0), f("Diver", 56.0, 52.0), f("Diver", 60.0, 52.0)],
            0.2,
        ),
        case("shark collision", vec![player(), f("Shark", 60.0, 55.0), oxygen(64)], -0.1),
        case("enemy missile", vec![player(), f("EnemyMissile", 55.0, 55.0), oxygen(64)], -0.05),
        case(
            "torpedo hits a submarine",
            vec![player(), f("PlayerMissile", 100.0, 80.0), f("Submarine", 104.0, 75.0), oxygen(64)],
            0.05,
        ),
        case("no player: only oxygen counts", vec![f("Diver", 52.0, 52.0), oxygen(5)], -0.15),
        case(
            "shark, submarine and low oxygen",
            vec![player(), f("Shark", 60.0, 55.0), f("Submarine", 44.0, 45.0), oxygen(15)],
            -0.25,
        ),
        case("no oxygen bar", vec![player()], 0.0),
    ]
}

pub fn seaquest_no_relations() -> Vec<Case> {
    let f = |n, x, y| o(Game::Seaquest, n, x, y);
    let player = || f("Player", 50.0, 50.0);
    vec![
        case("nothing happens", vec![player(), oxygen(64)], 0.0),
        case("player corner in a diver", vec![player(), f("Diver", 48.0, 45.0)], 0.1),
        case("player corner in a shark", vec![player(), f("Shark", 46.0, 48.0)], -0.1),
        case("oxygen 19", vec![player(), oxygen(19)], -0.05),
        case("oxygen 20", vec![player(), oxygen(20)], 0.0),
        case(
            "torpedo in a submarine",
            vec![player(), f("PlayerMissile", 102.0, 80.0), f("Submarine", 100.0, 75.0)],
            0.05,
        ),
        case("enemy missile in the player", vec![player(), f("EnemyMissile", 55.0, 55.0)], -0.1),
        case(
            "surfacing with two divers",
            vec![f("Player", 50.0, 0.0), f("CollectedDiver", 10.0, 180.0), f("CollectedDiver", 20.0, 180.0)],
            -0.025,
        ),
        case(
            "surfacing with six divers",
            (0..6).map(|i| f("CollectedDiver", 10.0 * i as f64, 180.0)).chain([f("Player", 50.0, 0.0)]).collect(),
            0.0,
        ),
        case("no player, low oxygen", vec![f("Diver", 48.0, 45.0), oxygen(5)], -0.05),
        case(
            "first player is used",
            vec![player(), f("Player", 100.0, 0.0), f("Diver", 48.0, 45.0)],
            0.1,
        ),
        case("two divers", vec![player(), f("Diver", 48.0, 45.0), f("Diver", 46.0, 40.0)], 0.2),
    ]
}

pub fn skiing_full() -> Vec<Case> {
    let f = |n, x, y| o(Game::Skiing, n, x, y);
    let player = || f("Player", 70.0, 40.0);
    vec![
        case("gate passage", vec![player(), f("Flag", 60.0, 100.0), f("Flag", 85.0, 100.0)], 0.5),
        case(
            "obstacle at distance 10: -0.01 * (20 - 10)",
            // a small tree sprite, so that distance 10 does not collide
            vec![player(), GameObject::new("Tree", 81.0, 45.0, 8.0, 8.0)],
            -0.1,
        ),
        case("tree collision", vec![player(), f("Tree", 66.0, 30.0)], -1.0),
        case("flag collision", vec![player(), f("Flag", 72.0, 45.0)], -1.0),
        case("alone on the slope", vec![player()], 0.0),
        trap("no player", vec![f("Flag", 60.0, 100.0), f("Flag", 85.0, 100.0)]),
        case("flags not aligned", vec![player(), f("Flag", 60.0, 100.0), f("Flag", 85.0, 101.0)], 0.0),
        case("center on the gate's left edge", vec![player(), f("Flag", 75.0, 100.0), f("Flag", 90.0, 100.0)], 0.5),
        case(
            "two gates: 1.0",
            vec![player(), f("Flag", 60.0, 100.0), f("Flag", 85.0, 100.0), f("Flag", 60.0, 150.0), f("Flag", 85.0, 150.0)],
            1.0,
        ),
        case(
            "gate and a mogul at distance 15",
            vec![player(), f("Flag", 60.0, 100.0), f("Flag", 85.0, 100.0), f("Mogul", 82.0, 45.5)],
            0.45,
        ),
        case(
            "unsorted flags are paired by (y, x)",
            vec![player(), f("Flag", 85.0, 100.0), f("Flag", 20.0, 160.0), f("Flag", 60.0, 100.0)],
            0.5,
        ),
        case("obstacle at distance 20 is ignored", vec![player(), GameObject::new("Tree", 91.0, 45.0, 8.0, 8.0)], 0.0),
    ]
}

pub fn skiing_no_relations() -> Vec<Case> {
    let f = |n, x, y| o(Game::Skiing, n, x, y);
    let player = || f("Player", 70.0, 40.0);
    vec![
        case("alone on the slope", vec![player()], 0.0),
        case("tree collision", vec![player(), f("Tree", 66.0, 30.0)], -0.3),
        case("flag collision", vec![player(), f("Flag", 78.0, 50.0)], -0.2),
        case("mogul collision", vec![player(), f("Mogul", 75.0, 55.0)], -0.05),
        case("between two flags", vec![player(), f("Flag", 60.0, 100.0), f("Flag", 85.0, 100.0)], 0.1),
        case("flags at different heights still pair", vec![player(), f("Flag", 85.0, 100.0), f("Flag", 60.0, 140.0)], 0.1),
        case("no player", vec![f("Flag", 60.0, 100.0), f("Flag", 85.0, 100.0), f("Tree", 0.0, 0.0)], 0.0),
        case(
            "four flags: first pair",
            vec![player(), f("Flag", 60.0, 100.0), f("Flag", 85.0, 100.0), f("Flag", 100.0, 120.0), f("Flag", 130.0, 120.0)],
            0.1,
        ),
        case("player x on a flag x is not between", vec![player(), f("Flag", 70.0, 100.0), f("Flag", 85.0, 100.0)], 0.0),
        case(
            "tree, flag and passage: -0.3 - 0.2 + 0.1",
            vec![player(), f("Tree", 66.0, 30.0), f("Flag", 68.0, 45.0), f("Flag", 85.0, 100.0)],
            -0.4,
        ),
        case("two trees", vec![player(), f("Tree", 66.0, 30.0), f("Tree", 75.0, 50.0)], -0.6),
        case("flag inside the player's x span is missed", vec![player(), f("Flag", 72.0, 45.0)], 0.0),
    ]
}

pub type Oracle = fn(&[GameObject]) -> Option<f64>;

/// (fixture file, cases, independent oracle)
pub fn all() -> Vec<(&'static str, Vec<Case>, Oracle)> {
    use super::oracles as or;
    vec![
        ("freeway_full.rw", freeway_full(), or::freeway_full as Oracle),
        ("freeway_no_relations.rw", freeway_no_relations(), or::freeway_no_relations),
        ("pong_full.rw", pong_full(), or::pong_full),
        ("pong_no_relations.rw", pong_no_relations(), or::pong_no_relations),
        ("seaquest_full.rw", seaquest_full(), or::seaquest_full),
        ("seaquest_no_relations.rw", seaquest_no_relations(), or::seaquest_no_relations),
        ("skiing_full.rw", skiing_full(), or::skiing_full),
        ("skiing_no_relations.rw", skiing_no_relations(), or::skiing_no_relations),
    ]
}
