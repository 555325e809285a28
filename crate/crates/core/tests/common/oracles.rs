//! Direct Rust renderings of the eight original Python reward programs.
//!
//! They share no code with the interpreter (not even the geometry
//! helpers) and follow the Python statement order so that floating point
//! results are bit-identical. `None` means the Python code would raise.

use relreward_core::GameObject;

fn cat<'a>(objs: &'a [GameObject], c: &str) -> Vec<&'a GameObject> {
    objs.iter().filter(|o| o.category == c).collect()
}

/// Python `min(a, b)` / `max(a, b)`: the first argument wins ties.
fn py_min(a: f64, b: f64) -> f64 {
    if b < a { b } else { a }
}

fn py_max(a: f64, b: f64) -> f64 {
    if b > a { b } else { a }
}

fn clamp_unit(r: f64) -> f64 {
    py_max(py_min(r, 1.0), -1.0)
}

fn aabb(a: &GameObject, b: &GameObject) -> bool {
    a.x < b.x + b.w && a.x + a.w > b.x && a.y < b.y + b.h && a.y + a.h > b.y
}

fn is_on_top(a: &GameObject, other: &GameObject) -> bool {
    (other.x <= a.x && a.x <= other.x + other.w) && (other.y <= a.y && a.y <= other.y + other.h)
}

/// The partial corner test shared by Freeway (full) and Skiing (direct).
fn edge_in_span(p: &GameObject, o: &GameObject) -> bool {
    let (px1, px2, py1, py2) = (p.x, p.x + p.w, p.y, p.y + p.h);
    let (ox1, ox2, oy1, oy2) = (o.x, o.x + o.w, o.y, o.y + o.h);
    (ox1 <= px1 && px1 <= ox2 || ox1 <= px2 && px2 <= ox2) && (oy1 <= py1 && py1 <= oy2 || oy1 <= py2 && py2 <= oy2)
}

fn manhattan(a: &GameObject, b: &GameObject) -> f64 {
    let (ax, ay) = (a.x + a.w / 2.0, a.y + a.h / 2.0);
    let (bx, by) = (b.x + b.w / 2.0, b.y + b.h / 2.0);
    (ax - bx).abs() + (ay - by).abs()
}

pub fn freeway_full(objs: &[GameObject]) -> Option<f64> {
    let mut reward = 0.0;
    let screen_height = 160.0;
    let chickens = cat(objs, "Chicken");
    let cars = cat(objs, "Car");
    if !chickens.is_empty() {
        let mut pc = chickens[0];
        for c in &chickens[1..] {
            if c.x < pc.x {
                pc = c;
            }
        }
        if pc.y <= 0.0 {
            reward += 1.0;
        }
        reward += (screen_height - pc.y) / screen_height * 0.1;
        for car in cars {
            if edge_in_span(pc, car) {
                reward += -1.0;
                break;
            }
        }
    }
    Some(clamp_unit(reward))
}

pub fn freeway_no_relations(objs: &[GameObject]) -> Option<f64> {
    let mut reward = 0.0;
    let mut player = None;
    let mut cars = Vec::new();
    for o in objs {
        if o.category == "Chicken" && o.x < 80.0 {
            player = Some(o);
        } else if o.category == "Car" {
            cars.push(o);
        }
    }
    let Some(c) = player else { return Some(reward) };
    let dy = c.y - c.prev_y;
    reward += dy / 160.0;
    if dy < 0.0 {
        reward -= 2.0 * (dy.abs() / 160.0);
    }
    for car in cars {
        if is_on_top(c, car) {
            reward -= 0.5;
        }
    }
    if c.y <= 0.0 {
        reward += 0.5;
    }
    Some(clamp_unit(reward))
}

pub fn pong_full(objs: &[GameObject]) -> Option<f64> {
    let mut reward = 0.0;
    let (mut ball, mut player, mut enemy) = (None, None, None);
    for o in objs {
        match o.category.as_str() {
            "Ball" => ball = Some(o),
            "Player" => player = Some(o),
            "Enemy" => enemy = Some(o),
            _ => {}
        }
    }
    let (Some(ball), Some(player), Some(enemy)) = (ball, player, enemy) else { return Some(reward) };
    let passed = |paddle: &GameObject| match paddle.category.as_str() {
        "Player" => ball.x > 160.0,
        "Enemy" => ball.x + ball.w < 0.0,
        _ => false,
    };
    if passed(enemy) {
        reward += 1.0;
    } else if passed(player) {
        reward -= 1.0;
    }
    if aabb(ball, player) || aabb(ball, enemy) {
        reward += 0.1;
    }
    Some(clamp_unit(reward))
}

pub fn pong_no_relations(objs: &[GameObject]) -> Option<f64> {
    let mut reward = 0.0;
    let (mut p, mut e, mut b) = (None, None, None);
    for o in objs {
        match o.category.as_str() {
            "Player" => p = Some(o),
            "Enemy" => e = Some(o),
            "Ball" => b = Some(o),
            _ => {}
        }
    }
    // game_objects[None] raises TypeError
    let (player, enemy, ball) = (p?, e?, b?);
    if ball.x < enemy.x {
        reward += 1.0;
    }
    if ball.x > player.x + player.w {
        reward -= 1.0;
    }
    Some(clamp_unit(reward))
}

pub fn seaquest_full(objs: &[GameObject]) -> Option<f64> {
    let mut reward = 0.0;
    let mut player = None;
    let mut divers = Vec::new();
    let mut enemies = Vec::new();
    let mut player_missiles = Vec::new();
    let mut enemy_missiles = Vec::new();
    let mut oxygen_bar = None;
    for o in objs {
        match o.category.as_str() {
            "Player" => player = Some(o),
            "Diver" => divers.push(o),
            "Shark" | "Submarine" => enemies.push(o),
            "PlayerMissile" => player_missiles.push(o),
            "EnemyMissile" => enemy_missiles.push(o),
            "OxygenBar" => oxygen_bar = Some(o),
            _ => {}
        }
    }
    if let Some(p) = player {
        // Python list iteration while removing: index-based walk.
        let mut i = 0;
        while i < divers.len() {
            if aabb(p, divers[i]) {
                reward += 0.1;
                divers.remove(i);
            }
            i += 1;
        }
        for e in &enemies {
            if aabb(p, e) {
                reward -= 0.1;
            }
        }
        for m in &enemy_missiles {
            if aabb(p, m) {
                reward -= 0.05;
            }
        }
        let mut mi = 0;
        while mi < player_missiles.len() {
            let missile = player_missiles[mi];
            let mut ei = 0;
            let mut removed = false;
            while ei < enemies.len() {
                if aabb(missile, enemies[ei]) {
                    reward += 0.05;
                    enemies.remove(ei);
                    if removed {
                        // second list.remove(missile): ValueError
                        return None;
                    }
                    let pos = player_missiles.iter().position(|m| std::ptr::eq(*m, missile))?;
                    player_missiles.remove(pos);
                    removed = true;
                }
                ei += 1;
            }
            mi += 1;
        }
    }
    if let Some(o) = oxygen_bar {
        if o.value? <= 20 {
            reward -= 0.05;
        }
    }
    if let Some(o) = oxygen_bar {
        if o.value? <= 10 {
            reward -= 0.1;
        }
    }
    Some(reward)
}

pub fn seaquest_no_relations(objs: &[GameObject]) -> Option<f64> {
    let mut reward = 0.0;
    let player = cat(objs, "Player").first().copied();
    let divers = cat(objs, "Diver");
    let sharks = cat(objs, "Shark");
    let subs = cat(objs, "Submarine");
    let enemy_missiles = cat(objs, "EnemyMissile");
    let player_missiles = cat(objs, "PlayerMissile");
    let oxygen_bar = cat(objs, "OxygenBar").first().copied();
    for d in &divers {
        if player.is_some_and(|p| is_on_top(p, d)) {
            reward += 0.1;
        }
    }
    for s in &sharks {
        if player.is_some_and(|p| is_on_top(p, s)) {
            reward += -0.1;
        }
    }
    for s in &subs {
        if player.is_some_and(|p| is_on_top(p, s)) {
            reward += -0.1;
        }
    }
    if let Some(o) = oxygen_bar {
        if o.value? < 20 {
            reward += -0.05;
        }
    }
    for m in &player_missiles {
        for s in &subs {
            if is_on_top(m, s) {
                reward += 0.05;
            }
        }
    }
    for m in &enemy_missiles {
        if player.is_some_and(|p| is_on_top(m, p)) {
            reward += -0.1;
        }
    }
    let collected = cat(objs, "CollectedDiver").len();
    if collected < 6 && player.is_some_and(|p| p.y == 0.0) {
        reward += -0.025;
    }
    Some(reward)
}

pub fn skiing_full(objs: &[GameObject]) -> Option<f64> {
    // Python ints and floats; an f64 represents every value exactly here.
    let mut reward = 0.0;
    let player = cat(objs, "Player").first().copied()?; // StopIteration
    let flags = cat(objs, "Flag");
    let trees = cat(objs, "Tree");
    let moguls = cat(objs, "Mogul");
    if trees.iter().chain(&flags).any(|o| aabb(player, o)) {
        reward += -1.0;
    }
    let mut sorted = flags.clone();
    sorted.sort_by(|a, b| (a.y, a.x).partial_cmp(&(b.y, b.x)).unwrap());
    let mut i = 0;
    while i < sorted.len() {
        if i + 1 < sorted.len() {
            let (f1, f2) = (sorted[i], sorted[i + 1]);
            if f1.y == f2.y {
                let left = py_min(f1.x, f2.x);
                let right = py_max(f1.x + f1.w, f2.x + f2.w);
                let cx = player.x + player.w / 2.0;
                if left <= cx && cx <= right {
                    reward += 0.5;
                }
            }
        }
        i += 2;
    }
    let mut closest = f64::INFINITY;
    for o in trees.iter().chain(&moguls) {
        let d = manhattan(player, o);
        if d < closest {
            closest = d;
        }
    }
    if closest < 20.0 {
        reward += -0.01 * (20.0 - closest);
    }
    Some(clamp_unit(reward))
}

pub fn skiing_no_relations(objs: &[GameObject]) -> Option<f64> {
    let mut reward = 0.0;
    let mut player = None;
    let (mut flags, mut trees, mut moguls) = (Vec::new(), Vec::new(), Vec::new());
    for o in objs {
        match o.category.as_str() {
            "Player" => player = Some(o),
            "Flag" => flags.push(o),
            "Tree" => trees.push(o),
            "Mogul" => moguls.push(o),
            _ => {}
        }
    }
    if let Some(p) = player {
        for t in &trees {
            if edge_in_span(p, t) {
                reward += -0.3;
            }
        }
        for f in &flags {
            if edge_in_span(p, f) {
                reward += -0.2;
            }
        }
        for m in &moguls {
            if edge_in_span(p, m) {
                reward += -0.05;
            }
        }
        if flags.len() >= 2 {
            let mut sorted = flags.clone();
            sorted.sort_by(|a, b| a.x.partial_cmp(&b.x).unwrap());
            let mut i = 0;
            while i + 1 < sorted.len() {
                if sorted[i].x < p.x && p.x < sorted[i + 1].x {
                    reward += 0.1;
                }
                i += 2;
            }
        }
    }
    Some(reward)
}

/// Advantages as the explicit sum of discounted TD errors, truncated after
/// the first episode end.
pub fn gae_bruteforce(r: &[f64], v: &[f64], done: &[bool], bootstrap: f64, gamma: f64, lambda: f64) -> Vec<f64> {
    let n = r.len();
    let delta: Vec<f64> = (0..n)
        .map(|t| {
            let next = if t + 1 < n { v[t + 1] } else { bootstrap };
            let live = if done[t] { 0.0 } else { 1.0 };
            r[t] + gamma * next * live - v[t]
        })
        .collect();
    (0..n)
        .map(|t| {
            let mut sum = 0.0;
            for l in 0..n - t {
                sum += (gamma * lambda).powi(l as i32) * delta[t + l];
                if done[t + l] {
                    break;
                }
            }
            sum
        })
        .collect()
}
