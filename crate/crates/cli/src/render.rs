//! Static SVG of a run: grid, one trajectory per robot, targets as outlines.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write;

use apf_grid::config::{Light, RobotId};
use apf_grid::geometry::GridPoint;
use apf_grid::sim::TraceRecord;

const CELL: i64 = 28;
const MARGIN: i64 = 2;

pub fn light_colour(light: Light) -> &'static str {
    match light {
        Light::Off => "#8c8c8c",
        Light::Terminal1 => "#e67e22",
        Light::Symmetric => "#8e44ad",
        Light::Decider => "#2e86c1",
        Light::Call => "#17a589",
        Light::Leader1 => "#d4ac0d",
        Light::Leader => "#c0392b",
        Light::Done => "#229954",
    }
}

/// Visited positions of one robot, each with the light held on arrival.
struct Path {
    stops: Vec<(GridPoint, Light)>,
}

fn paths(trace: &[TraceRecord]) -> BTreeMap<RobotId, Path> {
    let mut out: BTreeMap<RobotId, Path> = BTreeMap::new();
    for rec in trace {
        let path = out.entry(rec.robot).or_insert_with(|| Path { stops: vec![(rec.pos_before, rec.light_before)] });
        let last = path.stops.last_mut().expect("paths start non-empty");
        if rec.pos_after != last.0 {
            path.stops.push((rec.pos_after, rec.light_after));
        } else {
            last.1 = rec.light_after;
        }
    }
    out
}

/// Places `targets` over `finals`: exactly on top when the pattern was formed
/// (up to translation and a vertical flip), otherwise lower left corners
/// aligned.
pub fn place_targets(targets: &[GridPoint], finals: &[GridPoint]) -> Vec<GridPoint> {
    let corner = |pts: &[GridPoint]| {
        (pts.iter().map(|p| p.x).min().unwrap_or(0), pts.iter().map(|p| p.y).min().unwrap_or(0))
    };
    let (fx, fy) = corner(finals);
    let shift = |pts: Vec<GridPoint>| {
        let (tx, ty) = corner(&pts);
        pts.into_iter().map(|p| GridPoint::new(p.x - tx + fx, p.y - ty + fy)).collect::<Vec<_>>()
    };
    let have: HashSet<GridPoint> = finals.iter().copied().collect();
    let upright = shift(targets.to_vec());
    let flipped = shift(targets.iter().map(|p| GridPoint::new(p.x, -p.y)).collect());
    if flipped.len() == have.len() && flipped.iter().all(|p| have.contains(p)) && !upright.iter().all(|p| have.contains(p)) {
        flipped
    } else {
        upright
    }
}

pub fn render_svg(trace: &[TraceRecord], targets: &[GridPoint]) -> String {
    let paths = paths(trace);
    let finals: Vec<GridPoint> = paths.values().filter_map(|p| p.stops.last().map(|s| s.0)).collect();
    let placed = place_targets(targets, &finals);
    let all: Vec<GridPoint> = paths.values().flat_map(|p| p.stops.iter().map(|s| s.0)).chain(placed.iter().copied()).collect();
    let min_x = all.iter().map(|p| p.x).min().unwrap_or(0) - MARGIN;
    let max_x = all.iter().map(|p| p.x).max().unwrap_or(0) + MARGIN;
    let min_y = all.iter().map(|p| p.y).min().unwrap_or(0) - MARGIN;
    let max_y = all.iter().map(|p| p.y).max().unwrap_or(0) + MARGIN;
    let (w, h) = ((max_x - min_x) * CELL, (max_y - min_y) * CELL);
    // svg y grows downward
    let sx = |x: i64| (x - min_x) * CELL;
    let sy = |y: i64| (max_y - y) * CELL;

    let mut svg = String::new();
    let _ = writeln!(svg, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#);
    let _ = writeln!(svg, r##"<rect width="{w}" height="{h}" fill="#ffffff"/>"##);
    let _ = writeln!(svg, r##"<g stroke="#e5e5e5" stroke-width="1">"##);
    for x in min_x..=max_x {
        let _ = writeln!(svg, r#"<line x1="{0}" y1="0" x2="{0}" y2="{h}"/>"#, sx(x));
    }
    for y in min_y..=max_y {
        let _ = writeln!(svg, r#"<line x1="0" y1="{0}" x2="{w}" y2="{0}"/>"#, sy(y));
    }
    let _ = writeln!(svg, "</g>");

    let _ = writeln!(svg, r##"<g fill="none" stroke="#222222" stroke-width="2" stroke-dasharray="4 3">"##);
    for t in &placed {
        let _ = writeln!(svg, r#"<rect x="{}" y="{}" width="{}" height="{}"/>"#, sx(t.x) - CELL / 3, sy(t.y) - CELL / 3, 2 * CELL / 3, 2 * CELL / 3);
    }
    let _ = writeln!(svg, "</g>");

    for (id, path) in &paths {
        let final_light = path.stops.last().map_or(Light::Off, |s| s.1);
        let points: Vec<String> = path.stops.iter().map(|(p, _)| format!("{},{}", sx(p.x), sy(p.y))).collect();
        let _ = writeln!(
            svg,
            r#"<polyline data-robot="{}" fill="none" stroke="{}" stroke-width="2" stroke-opacity="0.6" points="{}"/>"#,
            id.0,
            light_colour(final_light),
            points.join(" ")
        );
        for (p, l) in &path.stops {
            let _ = writeln!(svg, r#"<circle cx="{}" cy="{}" r="3" fill="{}"/>"#, sx(p.x), sy(p.y), light_colour(*l));
        }
        if let Some((p, l)) = path.stops.last() {
            let _ = writeln!(svg, r##"<circle cx="{}" cy="{}" r="7" fill="{}" stroke="#000000"/>"##, sx(p.x), sy(p.y), light_colour(*l));
        }
    }
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(v: &[(i64, i64)]) -> Vec<GridPoint> {
        v.iter().map(|&p| GridPoint::from(p)).collect()
    }

    #[test]
    fn targets_land_on_a_formed_pattern() {
        let targets = pts(&[(0, 0), (1, 0), (1, 2)]);
        let finals = pts(&[(5, 7), (6, 7), (6, 9)]);
        assert_eq!(place_targets(&targets, &finals), finals);
        let flipped = pts(&[(5, 9), (6, 9), (6, 7)]);
        assert_eq!(place_targets(&targets, &flipped), flipped);
    }

    #[test]
    fn unformed_patterns_align_corners() {
        let placed = place_targets(&pts(&[(0, 0), (2, 1)]), &pts(&[(3, 3), (9, 9)]));
        assert_eq!(placed, pts(&[(3, 3), (5, 4)]));
    }
}
