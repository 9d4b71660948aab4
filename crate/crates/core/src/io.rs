//! File formats: curve and intrinsics CSV, profile-pair JSON, report JSON
//! and Wavefront OBJ.
//!
//! Floats are written with `{:e}`, the shortest representation that reads
//! back to the same `f64`, so CSV round trips are exact.

use std::io::{BufRead, Write};

use serde::Deserialize;
use serde_json::{json, Map, Value};

use crate::classify::ClassificationReport;
use crate::constructions::{CheckReport, RuledSurfacePatch};
use crate::discrete::{IntrinsicRow, IntrinsicSamples};
use crate::error::{Error, Result};
use crate::frenet::{Frame, FrenetState, SampledCurve, Vec3};
use crate::profiles::{ProfilePair, RationalLinearProfile};

pub const CURVE_HEADER: &str = "s,x,y,z,tx,ty,tz,nx,ny,nz,bx,by,bz";
pub const POSITION_HEADER: &str = "s,x,y,z";
pub const INTRINSICS_HEADER: &str = "s,kappa,tau";

fn push_row(out: &mut String, values: &[f64]) {
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(&format!("{v:e}"));
    }
    out.push('\n');
}

/// Curve CSV text: the full 13-column layout when frames are present,
/// otherwise `s,x,y,z`.
pub fn curve_csv(curve: &SampledCurve) -> String {
    let mut out = String::new();
    match curve.frames() {
        Some(frames) => {
            out.push_str(CURVE_HEADER);
            out.push('\n');
            for ((s, p), f) in curve.s().iter().zip(curve.positions()).zip(frames) {
                let (t, n, b) = (f.tangent, f.normal, f.binormal);
                push_row(
                    &mut out,
                    &[*s, p.x, p.y, p.z, t.x, t.y, t.z, n.x, n.y, n.z, b.x, b.y, b.z],
                );
            }
        }
        None => {
            out.push_str(POSITION_HEADER);
            out.push('\n');
            for (s, p) in curve.s().iter().zip(curve.positions()) {
                push_row(&mut out, &[*s, p.x, p.y, p.z]);
            }
        }
    }
    out
}

pub fn write_curve_csv<W: Write>(curve: &SampledCurve, mut w: W) -> Result<()> {
    w.write_all(curve_csv(curve).as_bytes())?;
    Ok(())
}

/// Numeric rows tagged with their 1-based line number.
type Rows = Vec<(usize, Vec<f64>)>;

/// Header line and numeric rows.
fn read_table<R: BufRead>(r: R) -> Result<(String, Rows)> {
    let mut lines = r.lines().enumerate();
    let header = loop {
        match lines.next() {
            Some((_, line)) => {
                let line = line?;
                if !line.trim().is_empty() {
                    break line.trim().replace(' ', "");
                }
            }
            None => return Err(Error::Parse("empty input: missing header".into())),
        }
    };
    let names: Vec<&str> = header.split(',').collect();
    let mut rows = Vec::new();
    for (idx, line) in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != names.len() {
            return Err(Error::Parse(format!(
                "line {}: expected {} fields, found {}",
                idx + 1,
                names.len(),
                fields.len()
            )));
        }
        let values = fields
            .iter()
            .zip(&names)
            .map(|(f, name)| {
                f.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| Error::Parse(format!("line {}: field {name}: not a finite number: {f:?}", idx + 1)))
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push((idx + 1, values));
    }
    Ok((header, rows))
}

/// Which kind of table a CSV holds, judged by its header.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableKind {
    Curve,
    Positions,
    Intrinsics,
}

pub fn table_kind(header: &str) -> Option<TableKind> {
    match header.trim().replace(' ', "").as_str() {
        CURVE_HEADER => Some(TableKind::Curve),
        POSITION_HEADER => Some(TableKind::Positions),
        INTRINSICS_HEADER => Some(TableKind::Intrinsics),
        _ => None,
    }
}

/// Reads either curve layout. Frames are taken as written; the profile is
/// not stored in the file and comes back as `None`.
pub fn read_curve_csv<R: BufRead>(r: R) -> Result<SampledCurve> {
    let (header, rows) = read_table(r)?;
    let kind = table_kind(&header);
    if !matches!(kind, Some(TableKind::Curve | TableKind::Positions)) {
        return Err(Error::Parse(format!(
            "line 1: unrecognized curve header {header:?}, expected {CURVE_HEADER:?} or {POSITION_HEADER:?}"
        )));
    }
    let s: Vec<f64> = rows.iter().map(|r| r.1[0]).collect();
    let positions: Vec<Vec3> = rows.iter().map(|r| Vec3::new(r.1[1], r.1[2], r.1[3])).collect();
    match kind {
        Some(TableKind::Positions) => SampledCurve::from_positions(s, positions),
        _ => {
            let states = rows
                .iter()
                .map(|(_, v)| FrenetState {
                    s: v[0],
                    position: Vec3::new(v[1], v[2], v[3]),
                    frame: Frame {
                        tangent: Vec3::new(v[4], v[5], v[6]),
                        normal: Vec3::new(v[7], v[8], v[9]),
                        binormal: Vec3::new(v[10], v[11], v[12]),
                    },
                })
                .collect();
            SampledCurve::from_states(states, None)
        }
    }
}

pub fn intrinsics_csv(samples: &IntrinsicSamples) -> String {
    let mut out = String::from(INTRINSICS_HEADER);
    out.push('\n');
    for r in samples.rows() {
        push_row(&mut out, &[r.s, r.kappa, r.tau]);
    }
    out
}

pub fn write_intrinsics_csv<W: Write>(samples: &IntrinsicSamples, mut w: W) -> Result<()> {
    w.write_all(intrinsics_csv(samples).as_bytes())?;
    Ok(())
}

pub fn read_intrinsics_csv<R: BufRead>(r: R) -> Result<IntrinsicSamples> {
    let (header, rows) = read_table(r)?;
    if table_kind(&header) != Some(TableKind::Intrinsics) {
        return Err(Error::Parse(format!(
            "line 1: unrecognized intrinsics header {header:?}, expected {INTRINSICS_HEADER:?}"
        )));
    }
    IntrinsicSamples::new(
        rows.into_iter()
            .map(|(_, v)| IntrinsicRow { s: v[0], kappa: v[1], tau: v[2] })
            .collect(),
    )
}

/// Position series `x,y,z` for plotting.
pub fn xyz_csv(curve: &SampledCurve) -> String {
    let mut out = String::from("x,y,z\n");
    for p in curve.positions() {
        push_row(&mut out, &[p.x, p.y, p.z]);
    }
    out
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ProfileSpec {
    a: f64,
    b: f64,
    #[serde(default)]
    c: f64,
    #[serde(default = "one")]
    d: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PairSpec {
    kappa: ProfileSpec,
    tau: ProfileSpec,
    s_range: [f64; 2],
}

/// Parses `{"kappa":{a,b[,c,d]},"tau":{…},"s_range":[lo,hi]}`; omitted `c`
/// and `d` default to 0 and 1.
pub fn parse_profile_spec(text: &str) -> Result<ProfilePair> {
    let spec: PairSpec = serde_json::from_str(text)
        .map_err(|e| Error::Parse(format!("line {}, column {}: {e}", e.line(), e.column())))?;
    let build = |name: &str, p: &ProfileSpec| {
        RationalLinearProfile::new(p.a, p.b, p.c, p.d)
            .map_err(|e| Error::Domain(format!("{name}: {e}")))
    };
    let kappa = build("kappa", &spec.kappa)?;
    let tau = build("tau", &spec.tau)?;
    ProfilePair::new(kappa, tau, spec.s_range[0], spec.s_range[1]).map_err(|e| match e {
        Error::Domain(_) => e,
        other => Error::Domain(other.to_string()),
    })
}

/// Inverse of [`parse_profile_spec`], with all four coefficients written out.
pub fn profile_spec_json(pp: &ProfilePair) -> String {
    let coeffs = |p: &RationalLinearProfile| {
        let [a, b, c, d] = p.coefficients();
        json!({"a": a, "b": b, "c": c, "d": d})
    };
    let v = json!({
        "kappa": coeffs(pp.kappa()),
        "tau": coeffs(pp.tau()),
        "s_range": [pp.s_min(), pp.s_max()],
    });
    pretty(&v)
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

/// Finite floats as numbers; infinities and NaN as strings, which JSON
/// cannot represent.
fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        json!(x.to_string())
    }
}

pub fn report_value(report: &ClassificationReport) -> Value {
    let labels: Vec<&str> = report.labels.iter().map(|l| l.name()).collect();
    let mut fits = Map::new();
    for (key, fit) in &report.fits {
        fits.insert(
            key.clone(),
            json!({
                "family": fit.family,
                "coefficients": fit.coefficients.coefficients().map(num),
                "rms": num(fit.rms_residual),
                "max": num(fit.max_residual),
            }),
        );
    }
    let mut v = json!({
        "labels": labels,
        "fits": fits,
        "tol": report.tol_used,
    });
    let extra = v.as_object_mut().expect("object literal");
    if !report.ratio_orientation.is_empty() {
        let orient: Map<String, Value> = report
            .ratio_orientation
            .iter()
            .map(|(l, o)| (l.name().to_string(), json!(o)))
            .collect();
        extra.insert("ratio_orientation".into(), Value::Object(orient));
    }
    if !report.inferred.is_empty() {
        let inferred: Vec<&str> = report.inferred.iter().map(|l| l.name()).collect();
        extra.insert("inferred".into(), json!(inferred));
    }
    if !report.notes.is_empty() {
        extra.insert("notes".into(), json!(report.notes));
    }
    v
}

pub fn report_json(report: &ClassificationReport) -> String {
    pretty(&report_value(report))
}

pub fn check_report_json(report: &CheckReport) -> String {
    let mut v = json!({
        "name": report.name,
        "passed": report.passed,
        "max_violation": num(report.max_violation),
        "tol": report.tol,
        "profile": report.violation_profile.iter().map(|&(s, x)| json!([s, num(x)])).collect::<Vec<_>>(),
    });
    let extra = v.as_object_mut().expect("object literal");
    if report.helix_excluded {
        extra.insert("helix_excluded".into(), json!(true));
    }
    if !report.normal_component.is_empty() {
        extra.insert(
            "normal_component".into(),
            json!(report.normal_component.iter().map(|&(s, x)| json!([s, num(x)])).collect::<Vec<_>>()),
        );
    }
    if !report.notes.is_empty() {
        extra.insert("notes".into(), json!(report.notes));
    }
    pretty(&v)
}

/// Vertices row-major over `(s, v)`; each grid quad becomes two triangles.
pub fn obj(patch: &RuledSurfacePatch) -> String {
    let mut out = String::new();
    for p in &patch.grid {
        out.push_str(&format!("v {:e} {:e} {:e}\n", p.x, p.y, p.z));
    }
    let idx = |i: usize, j: usize| i * patch.n_v + j + 1;
    for i in 0..patch.n_s.saturating_sub(1) {
        for j in 0..patch.n_v - 1 {
            let (a, b, c, d) = (idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1));
            out.push_str(&format!("f {a} {b} {c}\nf {a} {c} {d}\n"));
        }
    }
    out
}

pub fn write_obj<W: Write>(patch: &RuledSurfacePatch, mut w: W) -> Result<()> {
    w.write_all(obj(patch).as_bytes())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::classify_default;
    use crate::constructions::{check_developable, ruled_surface, Director};
    use crate::frenet::integrate_frenet;
    use proptest::prelude::*;

    fn euler_pair() -> ProfilePair {
        parse_profile_spec(r#"{"kappa":{"a":1,"b":1},"tau":{"a":2,"b":0},"s_range":[0,5]}"#).unwrap()
    }

    #[test]
    fn profile_spec_examples() {
        let pp = euler_pair();
        assert_eq!(pp.kappa_at(2.0).unwrap(), 3.0);
        assert_eq!(pp.tau_at(2.0).unwrap(), 4.0);

        let pp = parse_profile_spec(
            r#"{"kappa":{"a":0,"b":1,"c":1,"d":1},"tau":{"a":0,"b":1},"s_range":[0,1]}"#,
        )
        .unwrap();
        assert!((pp.kappa_at(1.0).unwrap() - 0.5).abs() < 1e-15);

        let err = parse_profile_spec(r#"{"kappa":{"a":1,"b":-1},"tau":{"a":0,"b":1},"s_range":[0,5]}"#);
        assert!(matches!(err, Err(Error::Domain(_))), "{err:?}");
    }

    #[test]
    fn profile_spec_parse_errors_name_location() {
        let e = parse_profile_spec("{\"kappa\":{\"a\":1,\"b\":1},\n\"tau\":{\"a\":0,\"q\":1},\"s_range\":[0,1]}").unwrap_err();
        let Error::Parse(msg) = e else { panic!("{e:?}") };
        assert!(msg.starts_with("line 2") && msg.contains("`q`"), "{msg}");

        let e = parse_profile_spec(r#"{"kappa":{"a":1,"b":1},"s_range":[0,1]}"#).unwrap_err();
        let Error::Parse(msg) = e else { panic!("{e:?}") };
        assert!(msg.contains("tau"), "{msg}");
    }

    #[test]
    fn profile_spec_writer_round_trips() {
        let pp = ProfilePair::new(
            RationalLinearProfile::new(0.3, 1.0, 0.2, 1.5).unwrap(),
            RationalLinearProfile::linear(-0.1, 0.4).unwrap(),
            0.0,
            2.0,
        )
        .unwrap();
        assert_eq!(parse_profile_spec(&profile_spec_json(&pp)).unwrap(), pp);
    }

    #[test]
    fn curve_csv_round_trip_is_exact() {
        let pp = euler_pair();
        let curve = integrate_frenet(&pp, 1e-2, &FrenetState::canonical(0.0)).unwrap();
        let text = curve_csv(&curve);
        assert!(text.starts_with(CURVE_HEADER));
        let back = read_curve_csv(text.as_bytes()).unwrap();
        assert_eq!(back.s(), curve.s());
        assert_eq!(back.positions(), curve.positions());
        assert_eq!(back.frames(), curve.frames());

        let positions = curve.positions_only();
        let back = read_curve_csv(curve_csv(&positions).as_bytes()).unwrap();
        assert_eq!(back, positions);
    }

    #[test]
    fn curve_csv_row_count_and_errors() {
        let curve = integrate_frenet(&euler_pair(), 1e-3, &FrenetState::canonical(0.0)).unwrap();
        assert_eq!(curve_csv(&curve).lines().count(), 5002);

        let bad = "s,x,y,z\n0,0,0,0\n1,1,zero,0\n";
        let Err(Error::Parse(msg)) = read_curve_csv(bad.as_bytes()) else { panic!() };
        assert!(msg.contains("line 3") && msg.contains("field y"), "{msg}");
        assert!(read_curve_csv("s,x\n0,0\n".as_bytes()).is_err());
        assert!(read_curve_csv("s,x,y,z\n0,0,0\n".as_bytes()).is_err());
        assert!(read_curve_csv("".as_bytes()).is_err());
        assert!(read_curve_csv("s,x,y,z\n1,0,0,0\n0,1,0,0\n".as_bytes()).is_err());
    }

    #[test]
    fn intrinsics_round_trip() {
        let rows = (0..10)
            .map(|i| IntrinsicRow { s: i as f64 * 0.1, kappa: 1.0 / 3.0 + i as f64, tau: -0.7 * i as f64 })
            .collect();
        let samples = IntrinsicSamples::new(rows).unwrap();
        let text = intrinsics_csv(&samples);
        assert_eq!(read_intrinsics_csv(text.as_bytes()).unwrap(), samples);
        assert!(read_intrinsics_csv(curve_csv(&SampledCurve::from_positions(vec![0.0], vec![Vec3::zeros()]).unwrap()).as_bytes()).is_err());
    }

    #[test]
    fn report_json_layout() {
        let report = classify_default((&euler_pair()).into()).unwrap();
        let v: Value = serde_json::from_str(&report_json(&report)).unwrap();
        let labels: Vec<&str> = v["labels"].as_array().unwrap().iter().map(|l| l.as_str().unwrap()).collect();
        for want in ["EulerSpiral", "GeneralizedEuler", "Bertrand"] {
            assert!(labels.contains(&want), "{labels:?}");
        }
        let fit = &v["fits"]["Bertrand"];
        assert!(fit["family"].is_string());
        assert_eq!(fit["coefficients"].as_array().unwrap().len(), 4);
        assert!(fit["rms"].is_number() && fit["max"].is_number());
        assert_eq!(v["tol"].as_f64(), Some(report.tol_used));
    }

    #[test]
    fn check_report_json_layout() {
        let pp = ProfilePair::new(
            RationalLinearProfile::constant(1.0).unwrap(),
            RationalLinearProfile::linear(1.0, 0.0).unwrap(),
            0.0,
            3.0,
        )
        .unwrap();
        let r = check_developable(&pp, Director::new(1.0, 0.0, 0.0, 1.0), 1e-9).unwrap();
        let v: Value = serde_json::from_str(&check_report_json(&r)).unwrap();
        assert_eq!(v["name"], "developable");
        assert_eq!(v["passed"], true);
        assert_eq!(v["max_violation"].as_f64(), Some(0.0));
        assert_eq!(v["tol"].as_f64(), Some(1e-9));
        let first = v["profile"][0].as_array().unwrap();
        assert_eq!(first.len(), 2);
    }

    #[test]
    fn obj_layout() {
        let curve = integrate_frenet(&euler_pair(), 1.0, &FrenetState::canonical(0.0)).unwrap();
        let patch = ruled_surface(&curve, Director::new(0.0, 1.0, 0.0, 0.0), -1.0, 1.0, 3).unwrap();
        let text = obj(&patch);
        let verts: Vec<&str> = text.lines().filter(|l| l.starts_with("v ")).collect();
        let faces: Vec<&str> = text.lines().filter(|l| l.starts_with("f ")).collect();
        assert_eq!(verts.len(), 6 * 3);
        assert_eq!(faces.len(), 5 * 2 * 2);
        assert_eq!(faces[0], "f 1 4 5");
        assert_eq!(faces[1], "f 1 5 2");
        let second: Vec<f64> = verts[1][2..].split(' ').map(|x| x.parse().unwrap()).collect();
        let p = patch.point(0, 1);
        assert_eq!(second, vec![p.x, p.y, p.z]);
    }

    proptest! {
        #[test]
        fn float_rows_round_trip(xs in prop::collection::vec(prop::num::f64::NORMAL | prop::num::f64::SUBNORMAL | prop::num::f64::ZERO, 4)) {
            let s = vec![0.0];
            let curve = SampledCurve::from_positions(s, vec![Vec3::new(xs[0], xs[1], xs[2])]).unwrap();
            let back = read_curve_csv(curve_csv(&curve).as_bytes()).unwrap();
            prop_assert_eq!(back.positions()[0], curve.positions()[0]);
        }
    }
}
