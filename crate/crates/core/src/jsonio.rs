//! Versioned JSON schemas for every file format and payload the CLI and the
//! C interface speak. Rationals travel as "a" or "a/b" strings; nothing is
//! ever a float.

use crate::algebra::form::Form;
use crate::algebra::gf::{Gf, GfEl};
use crate::algebra::laurent::Laurent;
use crate::algebra::poly::Poly;
use crate::algebra::ratfn::{P1Point, RatFn};
use crate::asw::WittNormalForm;
use crate::discgeom::{ClusterTree, MarkedDisc};
use crate::error::{Error, Result};
use crate::groups::Subgroup;
use crate::hurwitz::{HEdge, HVertex, HurwitzTree, TreeAction, Violation};
use crate::kgb::KgbVerdict;
use crate::lifting::{BranchRow, DepthProfile, DifferentCertificate};
use crate::padic::puiseux::Puiseux;
use crate::padic::ring::{EisRing, PadicElem};
use crate::padic::vlaurent::VLaurent;
use crate::rat::{rat_from_str, rat_to_string, Rat};
use crate::ramification::{Numbering, RamFiltration};
use serde_json::{json, Map, Value};
use std::sync::Arc;

fn get<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key)
        .ok_or_else(|| Error::usage(format!("missing field {key:?}")))
}

fn as_u64(v: &Value, key: &str) -> Result<u64> {
    get(v, key)?
        .as_u64()
        .ok_or_else(|| Error::usage(format!("field {key:?} must be a nonnegative integer")))
}

fn as_i64(v: &Value) -> Result<i64> {
    v.as_i64()
        .ok_or_else(|| Error::usage("expected an integer"))
}

fn as_rat(v: &Value) -> Result<Rat> {
    match v {
        Value::String(s) => rat_from_str(s),
        Value::Number(n) => n
            .as_i64()
            .map(Rat::from_integer)
            .ok_or_else(|| Error::usage("expected an integer or \"a/b\" string")),
        _ => Err(Error::usage("expected an integer or \"a/b\" string")),
    }
}

pub fn rat_value(r: &Rat) -> Value {
    Value::String(rat_to_string(r))
}

fn check_schema(v: &Value, expect: &str) -> Result<()> {
    let s = get(v, "schema")?
        .as_str()
        .ok_or_else(|| Error::usage("schema must be a string"))?;
    if s != expect {
        return Err(Error::usage(format!(
            "expected schema {expect:?}, found {s:?}"
        )));
    }
    Ok(())
}

// --- ramification filtrations ---

pub fn filtration_to_json(f: &RamFiltration) -> Value {
    json!({
        "schema": "filtration/1",
        "numbering": match f.numbering { Numbering::Lower => "lower", Numbering::Upper => "upper" },
        "order": f.order0,
        "breaks": f.breaks.iter().map(|(t, o)| json!([rat_to_string(t), o])).collect::<Vec<_>>(),
    })
}

pub fn filtration_from_json(v: &Value) -> Result<RamFiltration> {
    check_schema(v, "filtration/1")?;
    let numbering = match get(v, "numbering")?.as_str() {
        Some("lower") => Numbering::Lower,
        Some("upper") => Numbering::Upper,
        _ => return Err(Error::usage("numbering must be \"lower\" or \"upper\"")),
    };
    let order = as_u64(v, "order")?;
    let mut breaks = vec![];
    for b in get(v, "breaks")?
        .as_array()
        .ok_or_else(|| Error::usage("breaks must be an array"))?
    {
        let pair = b
            .as_array()
            .filter(|a| a.len() == 2)
            .ok_or_else(|| Error::usage("each break is [threshold, order]"))?;
        let t = as_rat(&pair[0])?;
        let o = pair[1]
            .as_u64()
            .ok_or_else(|| Error::usage("break order must be an integer"))?;
        breaks.push((t, o));
    }
    RamFiltration::new(numbering, order, breaks)
}

// --- finite-field coefficients and Laurent polynomials ---

fn gf_coeff_to_json(x: &GfEl) -> Value {
    Value::Array(
        x.coords()
            .iter()
            .map(|&c| Value::Number(c.into()))
            .collect(),
    )
}

fn gf_coeff_from_json(field: &Arc<Gf>, v: &Value) -> Result<GfEl> {
    match v {
        Value::Number(n) => Ok(GfEl::from_u64(
            field,
            n.as_u64()
                .ok_or_else(|| Error::usage("coefficient must be nonnegative"))?,
        )),
        Value::Array(a) => {
            let coords = a
                .iter()
                .map(|x| {
                    x.as_u64()
                        .ok_or_else(|| Error::usage("coefficient coordinates must be integers"))
                })
                .collect::<Result<Vec<u64>>>()?;
            GfEl::from_coords(field, &coords)
        }
        _ => Err(Error::usage("coefficient must be an integer or array")),
    }
}

pub fn laurent_to_json(l: &Laurent) -> Value {
    let mut m = Map::new();
    for (e, c) in l.terms() {
        m.insert(e.to_string(), gf_coeff_to_json(c));
    }
    Value::Object(m)
}

pub fn laurent_from_json(field: &Arc<Gf>, v: &Value) -> Result<Laurent> {
    let obj = v
        .as_object()
        .ok_or_else(|| Error::usage("Laurent polynomial must be an object"))?;
    let mut terms = vec![];
    for (k, c) in obj {
        let e: i64 = k
            .parse()
            .map_err(|_| Error::usage(format!("bad exponent key {k:?}")))?;
        terms.push((e, gf_coeff_from_json(field, c)?));
    }
    Ok(Laurent::from_terms(field, terms))
}

// --- Witt normal forms ---

pub fn witt_to_json(w: &WittNormalForm) -> Value {
    json!({
        "schema": "witt/1",
        "p": w.field().p(),
        "r": w.field().r(),
        "witt": w.coords().iter().map(laurent_to_json).collect::<Vec<_>>(),
    })
}

pub fn witt_from_json(v: &Value) -> Result<WittNormalForm> {
    check_schema(v, "witt/1")?;
    let p = as_u64(v, "p")?;
    let r = as_u64(v, "r")? as usize;
    let field = Gf::new(p, r)?;
    let coords = get(v, "witt")?
        .as_array()
        .ok_or_else(|| Error::usage("witt must be an array"))?
        .iter()
        .map(|x| laurent_from_json(&field, x))
        .collect::<Result<Vec<_>>>()?;
    WittNormalForm::new(&field, coords)
}

// --- valued Laurent polynomials (symbolic backend) ---

pub fn valued_laurent_from_json(v: &Value) -> Result<(u64, VLaurent<Puiseux>)> {
    check_schema(v, "valued-laurent/1")?;
    let p = as_u64(v, "p")?;
    let r = v.get("r").and_then(|x| x.as_u64()).unwrap_or(1) as usize;
    let field = Gf::new(p, r)?;
    let mut out = VLaurent::new();
    for t in get(v, "terms")?
        .as_array()
        .ok_or_else(|| Error::usage("terms must be an array"))?
    {
        let exp = as_i64(get(t, "exp")?)?;
        let val = as_rat(get(t, "val")?)?;
        let res = match t.get("res") {
            None | Some(Value::Null) => {
                return Err(Error::usage(
                    "depth inputs need explicit residues (res field)",
                ))
            }
            Some(x) => gf_coeff_from_json(&field, x)?,
        };
        out.add_term(exp, Puiseux::monomial(val, res));
    }
    Ok((p, out))
}

// --- marked discs and cluster trees ---

pub fn marked_disc_from_json(v: &Value, precision_override: Option<i64>) -> Result<(MarkedDisc, Vec<String>)> {
    check_schema(v, "marked-disc/1")?;
    if let Some(mat) = v.get("matrix") {
        let rows = mat
            .as_array()
            .ok_or_else(|| Error::usage("matrix must be an array of rows"))?;
        let mut m = vec![];
        for row in rows {
            let row = row
                .as_array()
                .ok_or_else(|| Error::usage("matrix row must be an array"))?;
            m.push(row.iter().map(as_rat).collect::<Result<Vec<_>>>()?);
        }
        let labels = label_list(v, m.len());
        return Ok((MarkedDisc::Matrix(m), labels));
    }
    let ring_v = get(v, "ring")?;
    let p = as_u64(ring_v, "p")?;
    let eis = get(ring_v, "eisenstein")?
        .as_array()
        .ok_or_else(|| Error::usage("eisenstein must be an array of integers"))?
        .iter()
        .map(|x| {
            x.as_i64()
                .map(|n| n as i128)
                .ok_or_else(|| Error::usage("eisenstein coefficients must be integers"))
        })
        .collect::<Result<Vec<i128>>>()?;
    let prec = precision_override
        .or_else(|| ring_v.get("precision").and_then(|x| x.as_i64()))
        .unwrap_or(8 * eis.len() as i64);
    let ring = EisRing::new(p, eis, prec)?;
    let pts_v = get(v, "points")?
        .as_array()
        .ok_or_else(|| Error::usage("points must be an array"))?;
    let mut pts = vec![];
    for pv in pts_v {
        pts.push(padic_from_json(&ring, pv)?);
    }
    let labels = label_list(v, pts.len());
    Ok((MarkedDisc::Points(pts), labels))
}

fn label_list(v: &Value, n: usize) -> Vec<String> {
    match v.get("labels").and_then(|x| x.as_array()) {
        Some(a) => a
            .iter()
            .enumerate()
            .map(|(i, x)| x.as_str().map(str::to_owned).unwrap_or_else(|| format!("x{i}")))
            .collect(),
        None => (0..n).map(|i| format!("x{i}")).collect(),
    }
}

/// A point as an integer-coefficient vector in the pi-power basis.
pub fn padic_from_json(ring: &Arc<EisRing>, v: &Value) -> Result<PadicElem> {
    let coeffs: Vec<i128> = match v {
        Value::Number(n) => vec![n
            .as_i64()
            .ok_or_else(|| Error::usage("point coordinate must be an integer"))?
            as i128],
        Value::Array(a) => a
            .iter()
            .map(|x| {
                x.as_i64()
                    .map(|n| n as i128)
                    .ok_or_else(|| Error::usage("point coordinates must be integers"))
            })
            .collect::<Result<Vec<_>>>()?,
        _ => return Err(Error::usage("point must be an integer or array")),
    };
    let mut acc = PadicElem::zero(ring);
    let pi = PadicElem::pi(ring);
    let mut pw = PadicElem::from_i128(ring, 1);
    for (i, c) in coeffs.into_iter().enumerate() {
        if i > 0 {
            pw = pw.mul(&pi);
        }
        acc = acc.add(&pw.mul_i128(c));
    }
    Ok(acc)
}

pub fn cluster_tree_to_json(t: &ClusterTree, labels: &[String]) -> Value {
    let vertices: Vec<Value> = t
        .clusters
        .iter()
        .map(|c| {
            json!({
                "id": c.id,
                "depth": rat_to_string(&c.depth),
                "points": c.members.iter().map(|&i| labels[i].clone()).collect::<Vec<_>>(),
            })
        })
        .collect();
    let edges: Vec<Value> = t
        .clusters
        .iter()
        .map(|c| match c.parent {
            Some(p) => json!({
                "parent": p,
                "child": c.id,
                "thickness": rat_to_string(&c.thickness),
            }),
            None => json!({
                "parent": "infinity",
                "child": c.id,
                "thickness": rat_to_string(&c.thickness),
            }),
        })
        .collect();
    json!({
        "schema": "cluster-tree/1",
        "vertices": vertices,
        "edges": edges,
        "root": t.root,
    })
}

// --- polynomials, forms, Hurwitz trees ---

fn poly_to_json(p: &Poly) -> Value {
    Value::Array(p.coeffs().iter().map(gf_coeff_to_json).collect())
}

fn poly_from_json(field: &Arc<Gf>, v: &Value) -> Result<Poly> {
    let coeffs = v
        .as_array()
        .ok_or_else(|| Error::usage("polynomial must be a coefficient array (low first)"))?
        .iter()
        .map(|x| gf_coeff_from_json(field, x))
        .collect::<Result<Vec<_>>>()?;
    Ok(Poly::from_coeffs(field, coeffs))
}

fn poly_display(p: &Poly) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut parts = vec![];
    for (i, c) in p.coeffs().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let cs = format!("{c}");
        parts.push(match i {
            0 => cs,
            1 if c.is_one() => "z".into(),
            1 => format!("{cs}*z"),
            _ if c.is_one() => format!("z^{i}"),
            _ => format!("{cs}*z^{i}"),
        });
    }
    parts.join(" + ")
}

fn form_to_json(f: &Form) -> Value {
    json!({
        "num": poly_to_json(f.coefficient().num()),
        "den": poly_to_json(f.coefficient().den()),
        "display": format!("({}) / ({}) dz", poly_display(f.coefficient().num()), poly_display(f.coefficient().den())),
    })
}

fn form_from_json(field: &Arc<Gf>, v: &Value) -> Result<Form> {
    let num = poly_from_json(field, get(v, "num")?)?;
    let den = poly_from_json(field, get(v, "den")?)?;
    Ok(Form::new(RatFn::new(num, den)?))
}

fn point_to_json(p: &P1Point) -> Value {
    match p {
        P1Point::Infinity => Value::String("inf".into()),
        P1Point::Finite(x) => gf_coeff_to_json(x),
    }
}

fn point_from_json(field: &Arc<Gf>, v: &Value) -> Result<P1Point> {
    match v {
        Value::String(s) if s == "inf" => Ok(P1Point::Infinity),
        other => Ok(P1Point::Finite(gf_coeff_from_json(field, other)?)),
    }
}

pub fn hurwitz_to_json(t: &HurwitzTree) -> Value {
    let vertices: Vec<Value> = t
        .vertices
        .iter()
        .map(|v| match &v.form {
            None => json!({ "delta": rat_to_string(&v.delta) }),
            Some(f) => json!({ "delta": rat_to_string(&v.delta), "form": form_to_json(f) }),
        })
        .collect();
    let edges: Vec<Value> = t
        .edges
        .iter()
        .map(|e| {
            json!({
                "parent": e.parent,
                "child": e.child,
                "thickness": rat_to_string(&e.thickness),
                "node_parent": e.node_parent.as_ref().map(point_to_json).unwrap_or(Value::Null),
                "node_child": point_to_json(&e.node_child),
            })
        })
        .collect();
    let marked: Vec<Value> = t
        .marked
        .iter()
        .map(|(v, pt)| json!([v, point_to_json(pt)]))
        .collect();
    let action = t.action.as_ref().map(|a| {
        json!({
            "vertex_map": a.vertex_map,
            "moebius": a.moebius.iter().map(|m| Value::Array(m.iter().map(gf_coeff_to_json).collect())).collect::<Vec<_>>(),
        })
    });
    json!({
        "schema": "hurwitz-tree/1",
        "p": t.p,
        "m": t.m,
        "chi": t.chi,
        "r": t.field.r(),
        "vertices": vertices,
        "edges": edges,
        "marked": marked,
        "infty": json!([t.infty.0, point_to_json(&t.infty.1)]),
        "action": action.unwrap_or(Value::Null),
    })
}

pub fn hurwitz_from_json(v: &Value) -> Result<HurwitzTree> {
    check_schema(v, "hurwitz-tree/1")?;
    let p = as_u64(v, "p")?;
    let m = as_u64(v, "m")?;
    let chi = as_u64(v, "chi")?;
    let r = v.get("r").and_then(|x| x.as_u64()).unwrap_or(1) as usize;
    let field = Gf::new(p, r)?;
    let mut vertices = vec![];
    for (i, vv) in get(v, "vertices")?
        .as_array()
        .ok_or_else(|| Error::usage("vertices must be an array"))?
        .iter()
        .enumerate()
    {
        let delta = as_rat(get(vv, "delta")?)?;
        let form = match vv.get("form") {
            None | Some(Value::Null) => None,
            Some(fv) => Some(form_from_json(&field, fv)?),
        };
        if i == 0 && form.is_some() {
            return Err(Error::usage("vertex 0 is the root and has no form"));
        }
        vertices.push(HVertex { delta, form });
    }
    let mut edges = vec![];
    for ev in get(v, "edges")?
        .as_array()
        .ok_or_else(|| Error::usage("edges must be an array"))?
    {
        let parent = as_u64(ev, "parent")? as usize;
        let child = as_u64(ev, "child")? as usize;
        let thickness = as_rat(get(ev, "thickness")?)?;
        let node_parent = match get(ev, "node_parent")? {
            Value::Null => None,
            other => Some(point_from_json(&field, other)?),
        };
        let node_child = point_from_json(&field, get(ev, "node_child")?)?;
        edges.push(HEdge {
            parent,
            child,
            thickness,
            node_parent,
            node_child,
        });
    }
    let mut marked = vec![];
    for mv in get(v, "marked")?
        .as_array()
        .ok_or_else(|| Error::usage("marked must be an array"))?
    {
        let pair = mv
            .as_array()
            .filter(|a| a.len() == 2)
            .ok_or_else(|| Error::usage("marked entries are [vertex, point]"))?;
        let w = pair[0]
            .as_u64()
            .ok_or_else(|| Error::usage("marked vertex must be an integer"))?
            as usize;
        marked.push((w, point_from_json(&field, &pair[1])?));
    }
    let infty_v = get(v, "infty")?
        .as_array()
        .filter(|a| a.len() == 2)
        .ok_or_else(|| Error::usage("infty is [vertex, point]"))?;
    let infty = (
        infty_v[0]
            .as_u64()
            .ok_or_else(|| Error::usage("infty vertex must be an integer"))? as usize,
        point_from_json(&field, &infty_v[1])?,
    );
    let action = match v.get("action") {
        None | Some(Value::Null) => None,
        Some(av) => {
            let vertex_map = get(av, "vertex_map")?
                .as_array()
                .ok_or_else(|| Error::usage("vertex_map must be an array"))?
                .iter()
                .map(|x| {
                    x.as_u64()
                        .map(|n| n as usize)
                        .ok_or_else(|| Error::usage("vertex_map entries are integers"))
                })
                .collect::<Result<Vec<_>>>()?;
            let moebius = get(av, "moebius")?
                .as_array()
                .ok_or_else(|| Error::usage("moebius must be an array"))?
                .iter()
                .map(|mv| -> Result<[GfEl; 4]> {
                    let a = mv
                        .as_array()
                        .filter(|a| a.len() == 4)
                        .ok_or_else(|| Error::usage("each moebius map is [a,b,c,d]"))?;
                    Ok([
                        gf_coeff_from_json(&field, &a[0])?,
                        gf_coeff_from_json(&field, &a[1])?,
                        gf_coeff_from_json(&field, &a[2])?,
                        gf_coeff_from_json(&field, &a[3])?,
                    ])
                })
                .collect::<Result<Vec<_>>>()?;
            Some(TreeAction {
                vertex_map,
                moebius,
            })
        }
    };
    Ok(HurwitzTree {
        p,
        m,
        chi,
        field,
        vertices,
        edges,
        marked,
        infty,
        action,
    })
}

pub fn violations_to_json(v: &[Violation]) -> Value {
    Value::Array(
        v.iter()
            .map(|x| json!({ "axiom": x.axiom.tag(), "detail": x.detail }))
            .collect(),
    )
}

// --- verdicts and certificates ---

fn subgroup_to_json(h: &Subgroup) -> Value {
    Value::Array(
        h.iter()
            .map(|(a, b)| json!([a, b]))
            .collect(),
    )
}

pub fn kgb_verdict_to_json(v: &KgbVerdict) -> Value {
    json!({
        "schema": "kgb-verdict/1",
        "vanishes": v.vanishes,
        "witness": v.witness.as_ref().map(|b| {
            Value::Array(b.tuple.iter().map(|(a, c)| json!([a, c])).collect())
        }).unwrap_or(Value::Null),
        "table": v.table.iter().map(|row| {
            json!([row.subgroup.len(), row.r_char0, row.r_charp])
        }).collect::<Vec<_>>(),
        "subgroups": v.table.iter().map(|row| subgroup_to_json(&row.subgroup)).collect::<Vec<_>>(),
    })
}

fn branch_row_to_json(r: &BranchRow) -> Value {
    json!([
        r.valuation.as_ref().map(rat_value).unwrap_or_else(|| Value::String("pole".into())),
        r.disc_points,
        r.ram_index,
    ])
}

pub fn certificate_to_json(c: &DifferentCertificate) -> Value {
    json!({
        "schema": "different-certificate/1",
        "delta_eta": c.delta_eta.to_string(),
        "delta_s": c.delta_s.to_string(),
        "status": c.status.as_str(),
        "branch_table": c.table.iter().map(branch_row_to_json).collect::<Vec<_>>(),
    })
}

pub fn depth_profile_to_json(p: &DepthProfile) -> Value {
    json!({
        "schema": "depth-profile/1",
        "samples": p.samples.iter().map(|(r, d)| json!([rat_to_string(r), rat_to_string(d)])).collect::<Vec<_>>(),
        "slopes": p.slopes.iter().map(|s| rat_value(s)).collect::<Vec<_>>(),
        "nu": p.nu.clone(),
        "slope_bound_ok": p.slope_bound_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rint;

    #[test]
    fn filtration_round_trip() {
        let f = RamFiltration::new(
            Numbering::Lower,
            6,
            vec![(rint(0), 3), (rint(1), 1)],
        )
        .unwrap();
        let j = filtration_to_json(&f);
        let back = filtration_from_json(&j).unwrap();
        assert_eq!(f, back);
    }

    #[test]
    fn hurwitz_round_trip() {
        let t = crate::hurwitz::build_small_conductor(5, 2, 3, None, Some(vec![1, 2])).unwrap();
        let j = hurwitz_to_json(&t);
        let back = hurwitz_from_json(&j).unwrap();
        assert!(back.validate().unwrap().is_empty());
        assert_eq!(back.conductor().unwrap(), 3);
        // byte-identical re-serialization
        assert_eq!(
            serde_json::to_string(&j).unwrap(),
            serde_json::to_string(&hurwitz_to_json(&back)).unwrap()
        );
    }

    #[test]
    fn witt_round_trip() {
        let field = Gf::new(3, 1).unwrap();
        let w = WittNormalForm::new(
            &field,
            vec![
                Laurent::term(GfEl::from_u64(&field, 1), -1),
                Laurent::term(GfEl::from_u64(&field, 2), -7),
            ],
        )
        .unwrap();
        let j = witt_to_json(&w);
        let back = witt_from_json(&j).unwrap();
        assert_eq!(back.upper_jumps().unwrap(), vec![1, 7]);
    }
}
