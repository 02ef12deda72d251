//! Second leader-election phase: from a stable configuration (or a lone
//! leader1) to a single robot lit `leader` with an empty left half.

use super::view::View;
use crate::config::{Action, Light, LocalMove};
use crate::geometry::{GridPoint, HorizontalAxis};

fn all_call(lights: &[(GridPoint, Light)]) -> bool {
    lights.iter().all(|&(_, l)| l == Light::Call)
}

fn all_off(lights: &[(GridPoint, Light)]) -> bool {
    lights.iter().all(|&(_, l)| l == Light::Off)
}

fn decider_step(v: &View) -> Option<Action> {
    // Any visible leader1 ends the decider's job, not only one on the right
    // column or the own column.
    if v.any_light(Light::Leader1) {
        return Some(Action::stay(Light::Off));
    }
    let right = v.right_lights();
    let partner = v.own_column().find(|&(_, l)| l == Light::Decider).map(|(p, _)| p);
    let axis = partner.and_then(|p| View::axis(GridPoint::ORIGIN, p));
    let axis_free = |k: HorizontalAxis| v.right_column().and_then(|x| v.occupied_on_axis(x, k)).is_none();

    if let Some(k) = axis.filter(|&k| axis_free(k)) {
        if v.right_symmetric(k) {
            return all_call(&right).then(|| Action::new(Light::Decider, LocalMove::Right));
        }
        return v.on_dominant_half(k).then(|| Action::stay(Light::Leader1));
    }
    if right.iter().any(|&(_, l)| l == Light::Decider) {
        return Some(Action::new(Light::Decider, LocalMove::Right));
    }
    let decider_left = v.left_lights().iter().any(|&(_, l)| l == Light::Decider);
    if v.own_column_has(Light::Call) && !decider_left && all_call(&right) {
        return Some(Action::new(Light::Decider, LocalMove::Right));
    }
    None
}

/// Closest to the axis among the robots of the own column; ties count.
fn closest_to_axis(v: &View, k: HorizontalAxis) -> bool {
    let mine = k.doubled_distance(0);
    v.own_column().all(|(p, _)| k.doubled_distance(p.y) >= mine)
}

pub(crate) fn off_step(v: &View) -> Option<Action> {
    let left = v.left_lights();
    let deciders: Vec<GridPoint> = left.iter().filter(|(_, l)| *l == Light::Decider).map(|&(p, _)| p).collect();
    let [a, b] = deciders[..] else {
        return None;
    };
    let k = View::axis(a, b)?;
    if k.contains_row(0) {
        return Some(Action::stay(Light::Leader1));
    }
    if v.right_symmetric(k) {
        (closest_to_axis(v, k) || v.own_column_has(Light::Call)).then(|| Action::stay(Light::Call))
    } else {
        (v.is_terminal() && v.on_dominant_half(k)).then(|| Action::stay(Light::Leader1))
    }
}

fn call_step(v: &View) -> Option<Action> {
    v.any_light(Light::Leader1).then(|| Action::stay(Light::Off))
}

/// Vertical step of a lone leader1. Robots of the right neighbouring column
/// may still carry a stale step to the left into this column, so when they
/// all lie on one side the leader1 walks away from them; otherwise it
/// follows its own up.
fn singleton_direction(right: &[(GridPoint, Light)]) -> LocalMove {
    if !right.is_empty() && right.iter().all(|(p, _)| p.y > 0) {
        LocalMove::Down
    } else {
        LocalMove::Up
    }
}

fn leader1_step(v: &View) -> Option<Action> {
    // Competing leader1s: one further left wins. On a shared column the one
    // on the dominant half of the right neighbouring column waits for the
    // other to give up; a symmetric column leaves neither standing.
    if v.iter().any(|(p, l)| l == Light::Leader1 && p.x < 0) {
        return Some(Action::stay(Light::Off));
    }
    if let Some((other, _)) = v.own_column().find(|&(_, l)| l == Light::Leader1) {
        let k = View::axis(GridPoint::ORIGIN, other)?;
        return if !v.right_symmetric(k) && v.on_dominant_half(k) { None } else { Some(Action::stay(Light::Off)) };
    }
    let own: Vec<(GridPoint, Light)> = v.own_column().collect();
    if !(all_off(&v.left_lights()) && all_off(&v.right_lights()) && all_off(&own)) {
        return None;
    }
    if v.upper_closed_empty() || v.lower_closed_empty() {
        if !v.left_closed_empty() {
            return Some(Action::new(Light::Leader1, LocalMove::Left));
        }
        // The far end of the column just left may have been hidden behind
        // the near end and be stepping out of it; it is waited for, and
        // follows if it was not.
        if v.right_column() == Some(1) && v.right_lights().len() >= 2 {
            return None;
        }
        return Some(Action::stay(Light::Leader));
    }
    if !v.is_terminal() {
        return Some(Action::new(Light::Leader1, LocalMove::Left));
    }
    Some(match own.first() {
        Some(&(other, _)) => Action::new(Light::Leader1, View::away_from(other)),
        None => Action::new(Light::Leader1, singleton_direction(&v.right_lights())),
    })
}

pub(crate) fn step(v: &View) -> Option<Action> {
    match v.light {
        Light::Decider => decider_step(v),
        Light::Off => off_step(v),
        Light::Call => call_step(v),
        Light::Leader1 => leader1_step(v),
        _ => None,
    }
}
