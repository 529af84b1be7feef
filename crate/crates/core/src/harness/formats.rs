//! File formats: IMU traces as CSV, floor plans, radio maps and walk scripts
//! as versioned TOML, event logs and ground truth as JSON.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fingerprint::{Fingerprint, RadioMap, RssMap};
use crate::geometry::{Door, Environment, FloorPlan, PlanStart, Point2, Segment2};
use crate::pdr::Pose;
use crate::signal::{ImuSample, Trace};
use crate::sim::{DoorAction, DoorActionKind, WalkScript};

pub const TRACE_HEADER: [&str; 10] = ["t", "ax", "ay", "az", "gx", "gy", "gz", "mx", "my", "mz"];
pub const FORMAT_VERSION: u32 = 1;
/// Door tangents off unit length by at most this much are renormalized.
pub const TANGENT_RENORMALIZE_TOL: f64 = 1e-6;

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn parse_error(path: &Path, line: Option<usize>, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

pub(crate) fn toml_error(path: &Path, text: &str, e: &toml::de::Error) -> Error {
    let line = e.span().map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1);
    parse_error(path, line, e.message())
}

fn check_version(path: &Path, version: u32) -> Result<()> {
    if version != FORMAT_VERSION {
        return Err(parse_error(path, None, format!("unsupported version {version}, expected {FORMAT_VERSION}")));
    }
    Ok(())
}

// ---------------------------------------------------------------- traces

pub fn trace_to_csv(trace: &Trace<f64>) -> String {
    let mut out = TRACE_HEADER.join(",");
    out.push('\n');
    for s in trace.samples() {
        let fields: Vec<String> = std::iter::once(s.t)
            .chain(s.accel)
            .chain(s.gyro)
            .chain(s.mag)
            .map(|v| v.to_string())
            .collect();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

pub fn trace_from_csv(text: &str, path: &Path) -> Result<Trace<f64>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let header = rdr
        .headers()
        .map_err(|e| parse_error(path, Some(1), e.to_string()))?
        .clone();
    if header.iter().map(str::trim).ne(TRACE_HEADER) {
        return Err(parse_error(path, Some(1), format!("expected header `{}`", TRACE_HEADER.join(","))));
    }
    let mut samples = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map(|p| p.line() as usize);
            parse_error(path, line, e.to_string())
        })?;
        let line = rec.position().map(|p| p.line() as usize);
        let mut v = [0.0f64; 10];
        for (slot, field) in v.iter_mut().zip(rec.iter()) {
            *slot = field
                .trim()
                .parse()
                .map_err(|_| parse_error(path, line, format!("`{field}` is not a number")))?;
        }
        samples.push(ImuSample {
            t: v[0],
            accel: [v[1], v[2], v[3]],
            gyro: [v[4], v[5], v[6]],
            mag: [v[7], v[8], v[9]],
        });
    }
    Trace::new(samples)
}

pub fn load_trace(path: &Path) -> Result<Trace<f64>> {
    trace_from_csv(&read_text(path)?, path)
}

pub fn save_trace(path: &Path, trace: &Trace<f64>) -> Result<()> {
    write_text(path, &trace_to_csv(trace))
}

// ----------------------------------------------------------- floor plans

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PlanFile {
    version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    start: Option<StartFile>,
    #[serde(default)]
    walls: Vec<WallFile>,
    #[serde(default)]
    doors: Vec<DoorFile>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StartFile {
    position: [f64; 2],
    heading: f64,
    environment: Environment,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WallFile {
    a: [f64; 2],
    b: [f64; 2],
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DoorFile {
    id: String,
    center: [f64; 2],
    tangent: [f64; 2],
    inner: Environment,
    outer: Environment,
}

fn pt(a: [f64; 2]) -> Point2<f64> {
    Point2::new(a[0], a[1])
}

fn arr(p: Point2<f64>) -> [f64; 2] {
    [p.x, p.y]
}

pub fn plan_to_toml(plan: &FloorPlan<f64>) -> String {
    let file = PlanFile {
        version: FORMAT_VERSION,
        start: plan.start.as_ref().map(|s| StartFile {
            position: arr(s.pose.position),
            heading: s.pose.heading,
            environment: s.environment,
        }),
        walls: plan
            .walls
            .iter()
            .map(|w| WallFile { a: arr(w.a), b: arr(w.b) })
            .collect(),
        doors: plan
            .doors
            .iter()
            .map(|d| DoorFile {
                id: d.id.clone(),
                center: arr(d.center),
                tangent: arr(d.tangent),
                inner: d.inner_env,
                outer: d.outer_env,
            })
            .collect(),
    };
    toml::to_string(&file).expect("plan serializes")
}

pub fn plan_from_toml(text: &str, path: &Path) -> Result<FloorPlan<f64>> {
    let file: PlanFile = toml::from_str(text).map_err(|e| toml_error(path, text, &e))?;
    check_version(path, file.version)?;
    let walls = file
        .walls
        .iter()
        .map(|w| Segment2::new(pt(w.a), pt(w.b)))
        .collect::<Result<Vec<_>>>()?;
    let mut doors = Vec::with_capacity(file.doors.len());
    for d in file.doors {
        let mut tangent = pt(d.tangent);
        let norm = tangent.norm();
        if (norm - 1.0).abs() > TANGENT_RENORMALIZE_TOL || !norm.is_finite() {
            return Err(Error::invariant(
                "door.unit_tangent",
                format!("door `{}` tangent has norm {norm}", d.id),
            ));
        }
        if norm != 1.0 {
            log::warn!("door `{}`: renormalizing tangent of norm {norm}", d.id);
            tangent = tangent * (1.0 / norm);
        }
        doors.push(Door::new(d.id, pt(d.center), tangent, d.inner, d.outer)?);
    }
    let plan = FloorPlan {
        walls,
        doors,
        start: file.start.map(|s| PlanStart {
            pose: Pose::new(pt(s.position), s.heading),
            environment: s.environment,
        }),
    };
    plan.validate()?;
    Ok(plan)
}

pub fn load_plan(path: &Path) -> Result<FloorPlan<f64>> {
    plan_from_toml(&read_text(path)?, path)
}

pub fn save_plan(path: &Path, plan: &FloorPlan<f64>) -> Result<()> {
    write_text(path, &plan_to_toml(plan))
}

// ------------------------------------------------------------ radio maps

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RadioMapFile {
    version: u32,
    #[serde(default)]
    transmitters: Vec<String>,
    fingerprints: Vec<FingerprintFile>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FingerprintFile {
    position: [f64; 2],
    rss: RssMap<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ObservationFile {
    version: u32,
    rss: RssMap<f64>,
}

pub fn radiomap_to_toml(map: &RadioMap<f64>) -> String {
    let file = RadioMapFile {
        version: FORMAT_VERSION,
        transmitters: map.transmitters().iter().cloned().collect(),
        fingerprints: map
            .entries()
            .iter()
            .map(|e| FingerprintFile {
                position: arr(e.position),
                rss: e.rss.clone(),
            })
            .collect(),
    };
    toml::to_string(&file).expect("radio map serializes")
}

pub fn radiomap_from_toml(text: &str, path: &Path) -> Result<RadioMap<f64>> {
    let file: RadioMapFile = toml::from_str(text).map_err(|e| toml_error(path, text, &e))?;
    check_version(path, file.version)?;
    let entries = file
        .fingerprints
        .into_iter()
        .map(|f| Fingerprint {
            position: pt(f.position),
            rss: f.rss,
        })
        .collect();
    RadioMap::new(entries, file.transmitters)
}

pub fn load_radiomap(path: &Path) -> Result<RadioMap<f64>> {
    radiomap_from_toml(&read_text(path)?, path)
}

pub fn save_radiomap(path: &Path, map: &RadioMap<f64>) -> Result<()> {
    write_text(path, &radiomap_to_toml(map))
}

/// A single RSS observation: `version = 1` and an `[rss]` table.
pub fn load_observation(path: &Path) -> Result<RssMap<f64>> {
    let text = read_text(path)?;
    let file: ObservationFile = toml::from_str(&text).map_err(|e| toml_error(path, &text, &e))?;
    check_version(path, file.version)?;
    Ok(file.rss)
}

// ---------------------------------------------------------- walk scripts

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScriptFile {
    version: u32,
    waypoints: Vec<[f64; 2]>,
    #[serde(default = "default_cadence")]
    cadence: f64,
    #[serde(default = "default_step_length")]
    step_length: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    initial_heading: Option<f64>,
    initial_env: Environment,
    #[serde(default = "default_lead_in")]
    lead_in: f64,
    #[serde(default = "default_group")]
    group: String,
    #[serde(default)]
    door_actions: Vec<DoorActionFile>,
    #[serde(default)]
    pauses: Vec<PauseFile>,
}

fn default_cadence() -> f64 {
    2.0
}

fn default_step_length() -> f64 {
    0.75
}

fn default_lead_in() -> f64 {
    0.5
}

fn default_group() -> String {
    "default".into()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum ActionName {
    OpenAndCross,
    TurnBack,
    TouchAndTurnBack,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DoorActionFile {
    waypoint: usize,
    door: String,
    action: ActionName,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PauseFile {
    waypoint: usize,
    seconds: f64,
}

/// Parses a walk script, resolving door ids against `plan`.
pub fn script_from_toml(text: &str, path: &Path, plan: &FloorPlan<f64>) -> Result<WalkScript> {
    let file: ScriptFile = toml::from_str(text).map_err(|e| toml_error(path, text, &e))?;
    check_version(path, file.version)?;
    let door_actions = file
        .door_actions
        .iter()
        .map(|a| {
            let door = plan
                .door(&a.door)
                .ok_or_else(|| Error::InvalidScript(format!("unknown door `{}`", a.door)))?;
            let kind = match a.action {
                ActionName::OpenAndCross => DoorActionKind::OpenAndCross,
                ActionName::TurnBack => DoorActionKind::ApproachAndTurnBack { touch: false },
                ActionName::TouchAndTurnBack => DoorActionKind::ApproachAndTurnBack { touch: true },
            };
            Ok(DoorAction {
                waypoint: a.waypoint,
                door: door.clone(),
                kind,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(WalkScript {
        waypoints: file.waypoints.into_iter().map(pt).collect(),
        cadence: file.cadence,
        step_length_true: file.step_length,
        initial_heading: file.initial_heading,
        initial_env: file.initial_env,
        door_actions,
        pauses: file.pauses.iter().map(|p| (p.waypoint, p.seconds)).collect(),
        lead_in: file.lead_in,
        group: file.group,
    })
}

pub fn script_to_toml(script: &WalkScript) -> String {
    let file = ScriptFile {
        version: FORMAT_VERSION,
        waypoints: script.waypoints.iter().map(|p| arr(*p)).collect(),
        cadence: script.cadence,
        step_length: script.step_length_true,
        initial_heading: script.initial_heading,
        initial_env: script.initial_env,
        lead_in: script.lead_in,
        group: script.group.clone(),
        door_actions: script
            .door_actions
            .iter()
            .map(|a| DoorActionFile {
                waypoint: a.waypoint,
                door: a.door.id.clone(),
                action: match a.kind {
                    DoorActionKind::OpenAndCross => ActionName::OpenAndCross,
                    DoorActionKind::ApproachAndTurnBack { touch: false } => ActionName::TurnBack,
                    DoorActionKind::ApproachAndTurnBack { touch: true } => ActionName::TouchAndTurnBack,
                },
            })
            .collect(),
        pauses: script
            .pauses
            .iter()
            .map(|&(waypoint, seconds)| PauseFile { waypoint, seconds })
            .collect(),
    };
    toml::to_string(&file).expect("script serializes")
}

pub fn load_script(path: &Path, plan: &FloorPlan<f64>) -> Result<WalkScript> {
    script_from_toml(&read_text(path)?, path, plan)
}

// ------------------------------------------------------------------ json

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("value serializes");
    s.push('\n');
    s
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    write_text(path, &to_json(value))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = read_text(path)?;
    serde_json::from_str(&text).map_err(|e| parse_error(path, Some(e.line()), e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(t: f64) -> ImuSample<f64> {
        ImuSample {
            t,
            accel: [0.1, -0.2, 9.81],
            gyro: [1e-5, 0.0, -0.3333333333333333],
            mag: [20.0, -1.5, 44.0],
        }
    }

    #[test]
    fn trace_round_trip_is_byte_identical() {
        let trace = Trace::new(vec![sample(0.0), sample(0.01), sample(0.02)]).unwrap();
        let text = trace_to_csv(&trace);
        let back = trace_from_csv(&text, Path::new("t.csv")).unwrap();
        assert_eq!(back, trace);
        assert_eq!(trace_to_csv(&back), text);
    }

    #[test]
    fn trace_errors_carry_lines() {
        let p = Path::new("t.csv");
        assert!(matches!(trace_from_csv("t,ax\n0,1\n", p), Err(Error::Parse { line: Some(1), .. })));
        let bad = "t,ax,ay,az,gx,gy,gz,mx,my,mz\n0,0,0,0,0,0,0,0,0,0\n0.1,0,x,0,0,0,0,0,0,0\n";
        assert!(matches!(trace_from_csv(bad, p), Err(Error::Parse { line: Some(3), .. })));
        let back = "t,ax,ay,az,gx,gy,gz,mx,my,mz\n0.1,0,0,0,0,0,0,0,0,0\n0.1,0,0,0,0,0,0,0,0,0\n";
        assert!(matches!(trace_from_csv(back, p), Err(Error::Invariant { name: "trace.monotonic_time", .. })));
    }

    const PLAN: &str = r#"version = 1

[start]
position = [1.0, 2.0]
heading = 0.5
environment = "indoor"

[[walls]]
a = [0.0, 0.0]
b = [10.0, 0.0]

[[doors]]
id = "d1"
center = [5.0, 0.0]
tangent = [1.0000001, 0.0]
inner = "outdoor"
outer = "indoor"
"#;

    #[test]
    fn plan_parse_and_normalize() {
        let p = Path::new("p.toml");
        let plan = plan_from_toml(PLAN, p).unwrap();
        assert_eq!(plan.doors[0].tangent, Point2::new(1.0, 0.0));
        assert_eq!(plan.start.as_ref().unwrap().environment, Environment::Indoor);
        let text = plan_to_toml(&plan);
        assert_eq!(plan_to_toml(&plan_from_toml(&text, p).unwrap()), text);

        let off = PLAN.replace("1.0000001", "1.01");
        assert!(matches!(plan_from_toml(&off, p), Err(Error::Invariant { name: "door.unit_tangent", .. })));
        let v2 = PLAN.replace("version = 1", "version = 2");
        assert!(matches!(plan_from_toml(&v2, p), Err(Error::Parse { .. })));
        let bad = PLAN.replace("heading = 0.5", "heading = \"east\"");
        assert!(matches!(plan_from_toml(&bad, p), Err(Error::Parse { line: Some(5), .. })));
    }

    #[test]
    fn radiomap_round_trip() {
        let text = "version = 1\ntransmitters = [\"A\", \"B\", \"C\"]\n\n[[fingerprints]]\nposition = [0.0, 1.0]\n\n[fingerprints.rss]\nA = -50.0\nB = -70.5\n";
        let p = Path::new("r.toml");
        let map = radiomap_from_toml(text, p).unwrap();
        assert_eq!(map.transmitters().len(), 3);
        let canon = radiomap_to_toml(&map);
        assert_eq!(radiomap_to_toml(&radiomap_from_toml(&canon, p).unwrap()), canon);
    }
}
