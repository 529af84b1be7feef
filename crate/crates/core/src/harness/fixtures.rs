//! Built-in floor plans used by the CLI defaults and the test suites.

use crate::geometry::{Door, Environment, FloorPlan, PlanStart, Point2, Segment2};
use crate::pdr::Pose;

fn wall(a: (f64, f64), b: (f64, f64)) -> Segment2<f64> {
    Segment2::new(Point2::new(a.0, a.1), Point2::new(b.0, b.1)).expect("fixture walls are non-degenerate")
}

fn door(id: &str, c: (f64, f64), t: (f64, f64)) -> Door<f64> {
    Door::new(id, Point2::new(c.0, c.1), Point2::new(t.0, t.1), Environment::Indoor, Environment::Outdoor)
        .expect("fixture doors are valid")
}

/// Two buildings joined by an open-air path.
///
/// Building A spans x in [-25, 0], y in [-10, 10], with a 3 m corridor
/// along y = 0 and an exit door `a-east` at the origin. Building B spans
/// x in [10, 40], y in [27.375, 50], entered through `b-south` at
/// (24.375, 27.375). The walk starts in the corridor facing +x.
pub fn campus_plan() -> FloorPlan<f64> {
    let g = 0.45;
    let (bx, by) = (24.375, 27.375);
    let walls = vec![
        // building A
        wall((-25.0, -10.0), (0.0, -10.0)),
        wall((-25.0, 10.0), (0.0, 10.0)),
        wall((-25.0, -10.0), (-25.0, 10.0)),
        wall((0.0, -10.0), (0.0, -g)),
        wall((0.0, g), (0.0, 10.0)),
        // corridor
        wall((-22.0, -1.5), (-4.5, -1.5)),
        wall((-22.0, 1.5), (-4.5, 1.5)),
        wall((-22.0, -1.5), (-22.0, 1.5)),
        // building B
        wall((10.0, by), (bx - g, by)),
        wall((bx + g, by), (40.0, by)),
        wall((10.0, by), (10.0, 50.0)),
        wall((40.0, by), (40.0, 50.0)),
        wall((10.0, 50.0), (40.0, 50.0)),
    ];
    FloorPlan {
        walls,
        doors: vec![door("a-east", (0.0, 0.0), (0.0, 1.0)), door("b-south", (bx, by), (1.0, 0.0))],
        start: Some(PlanStart {
            pose: Pose::new(Point2::new(-18.375, 0.0), 0.0),
            environment: Environment::Indoor,
        }),
    }
}

/// A straight indoor corridor `width` meters wide along +x from the origin,
/// `length` meters long, with no doors.
pub fn corridor_plan(length: f64, width: f64) -> FloorPlan<f64> {
    let h = width / 2.0;
    FloorPlan {
        walls: vec![
            wall((-1.0, -h), (length, -h)),
            wall((-1.0, h), (length, h)),
            wall((-1.0, -h), (-1.0, h)),
            wall((length, -h), (length, h)),
        ],
        doors: Vec::new(),
        start: Some(PlanStart {
            pose: Pose::new(Point2::origin(), 0.0),
            environment: Environment::Indoor,
        }),
    }
}
