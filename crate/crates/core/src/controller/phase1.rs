//! First leader-election phase: terminal robots of the leftmost column step
//! out, then either a leader candidate appears or the pair turns into the
//! two deciders of a stable configuration.

use super::view::View;
use crate::config::{Action, Light, LocalMove};
use crate::geometry::GridPoint;

pub(crate) fn off_step(v: &View) -> Option<Action> {
    // Only a fully dark neighbourhood may start the election; this also
    // covers "no leader1 on the right column".
    if v.is_terminal() && v.left_open_empty() && v.all_off() {
        return Some(Action::new(Light::Terminal1, LocalMove::Left));
    }
    if let Some(light) = follows(v) {
        return Some(Action::new(light, LocalMove::Left));
    }
    let left = v.left_lights();
    let marked: Vec<GridPoint> = left.iter().filter(|(_, l)| *l == Light::Terminal1).map(|&(p, _)| p).collect();
    if let [a, b] = marked[..] {
        if View::axis(a, b).is_some_and(|k| k.contains_row(0)) {
            return Some(Action::stay(Light::Leader1));
        }
    }
    None
}

/// The far end of a column whose other end (a terminal1) or a passing
/// leader1 has just stepped out of it follows into the next column, so that
/// the one waiting there always sees what it waits for. The robots of the
/// own column lie on the side of the one that left. Returns the light to
/// step with.
fn follows(v: &View) -> Option<Light> {
    let [(t, l)] = v.iter().filter(|(p, _)| p.x < 0).collect::<Vec<_>>()[..] else {
        return None;
    };
    let light = match l {
        Light::Terminal1 => Light::Terminal1,
        Light::Leader1 => Light::Off,
        _ => return None,
    };
    let rest_off = v.iter().filter(|(p, _)| p.x >= 0).all(|(_, l)| l == Light::Off);
    let side_ok = match v.own_column().map(|(p, _)| p.y.signum()).next() {
        None => l == Light::Terminal1 && t.y != 0,
        Some(s) => v.is_terminal() && t.y.signum() == s,
    };
    (t.x == -1 && rest_off && side_ok).then_some(light)
}

fn terminal1_step(v: &View) -> Option<Action> {
    // A leader1 anywhere in sight has already won; this also catches a late
    // start on a leftmost column the leader1 has walked into.
    if v.any_light(Light::Leader1) {
        return Some(Action::stay(Light::Off));
    }
    if let Some((partner, _)) = v.own_column().find(|&(_, l)| l == Light::Terminal1) {
        let k = View::axis(GridPoint::ORIGIN, partner)?;
        let right = v.right_column();
        return match right.and_then(|x| v.occupied_on_axis(x, k)) {
            None if v.right_symmetric(k) => Some(Action::stay(Light::Symmetric)),
            None if v.on_dominant_half(k) => Some(Action::stay(Light::Leader1)),
            _ => None,
        };
    }
    if v.own_column_has(Light::Symmetric) {
        return Some(Action::stay(Light::Symmetric));
    }
    if v.own_column_has(Light::Off) {
        return Some(Action::stay(Light::Off));
    }
    // Next to the column it came from, the other end of that column may
    // still be on its way; it is waited for.
    if v.is_singleton() && v.right_column() != Some(1) && v.right_lights().iter().all(|&(_, l)| l == Light::Off) {
        return Some(Action::stay(Light::Leader1));
    }
    None
}

fn symmetric_step(v: &View) -> Option<Action> {
    if v.any_light(Light::Leader1) {
        return Some(Action::stay(Light::Off));
    }
    let (partner, _) = v
        .own_column()
        .find(|&(_, l)| l == Light::Symmetric || l == Light::Decider)?;
    if !v.upper_closed_empty() && !v.lower_closed_empty() {
        Some(Action::new(Light::Symmetric, View::away_from(partner)))
    } else {
        Some(Action::stay(Light::Decider))
    }
}

pub(crate) fn step(v: &View) -> Option<Action> {
    match v.light {
        Light::Off => off_step(v),
        Light::Terminal1 => terminal1_step(v),
        Light::Symmetric => symmetric_step(v),
        _ => None,
    }
}
