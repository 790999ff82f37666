use std::fmt::Write;

use serde_json::{json, Value};
use subtori_core::arrangement::{fmt_point, CubeAtlas, Subset};
use subtori_core::complexes::Coeff;
use subtori_core::linalg::InvariantFactors;
use subtori_core::models::ComplementAnswer;

fn subset_name(s: Subset) -> String {
    if s.is_empty() {
        "∅".into()
    } else {
        s.to_string()
    }
}

fn one_based(s: Subset) -> Vec<usize> {
    s.members().iter().map(|m| m + 1).collect()
}

pub fn poset_text(atlas: &CubeAtlas) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "T^{}, {} subtori", atlas.n, atlas.k);
    let _ = writeln!(
        out,
        "{:<10} {:<9} {:<8} {:<6} {:<11} anchors",
        "subset", "occupied", "tangent", "forms", "components"
    );
    for s in atlas.ordered_subsets() {
        let st = atlas.stratum(s);
        let (occ, tangent, forms) = if st.occupied {
            ("yes", st.tangent_rank.to_string(), st.form_rank().to_string())
        } else {
            ("empty", "-".into(), "-".into())
        };
        let anchors: Vec<String> = st.components.iter().map(|x| fmt_point(x)).collect();
        let _ = writeln!(
            out,
            "{:<10} {:<9} {:<8} {:<6} {:<11} {}",
            subset_name(s),
            occ,
            tangent,
            forms,
            st.n_components(),
            anchors.join(" ")
        );
    }
    if !atlas.covering_maps().is_empty() {
        let _ = writeln!(out, "component maps (component of T_I -> component of T_J):");
        for ((j, i), parents) in atlas.covering_maps() {
            let _ = writeln!(out, "  {} -> {}: {:?}", subset_name(*i), subset_name(*j), parents);
        }
    }
    out
}

pub fn poset_json(atlas: &CubeAtlas) -> Value {
    let strata: Vec<Value> = atlas
        .ordered_subsets()
        .into_iter()
        .map(|s| {
            let st = atlas.stratum(s);
            let anchors: Vec<Vec<String>> =
                st.components.iter().map(|x| x.iter().map(ToString::to_string).collect()).collect();
            json!({
                "subset": one_based(s),
                "occupied": st.occupied,
                "tangent_rank": if st.occupied { json!(st.tangent_rank) } else { Value::Null },
                "form_rank": if st.occupied { json!(st.form_rank()) } else { Value::Null },
                "components": st.n_components(),
                "anchors": anchors,
            })
        })
        .collect();
    let maps: Vec<Value> = atlas
        .covering_maps()
        .iter()
        .map(|((j, i), parents)| json!({ "from": one_based(*i), "to": one_based(*j), "parents": parents }))
        .collect();
    json!({ "dim": atlas.n, "k": atlas.k, "strata": strata, "component_maps": maps })
}

/// Invariant factors over the ring: `Q^2`, `Z_(2)^3 + Z/4`.
fn group(g: &InvariantFactors, c: Coeff) -> String {
    let ring = match c {
        Coeff::Z => "Z".to_string(),
        Coeff::Q => "Q".to_string(),
        Coeff::Zp(p) => format!("Z_({p})"),
    };
    let mut parts = Vec::new();
    match g.free_rank {
        0 => {}
        1 => parts.push(ring),
        r => parts.push(format!("{ring}^{r}")),
    }
    parts.extend(g.torsion.iter().map(|t| format!("Z/{t}")));
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
}

pub fn answer_text(n: usize, a: &ComplementAnswer) -> String {
    let mut out = String::new();
    let _ = write!(out, "coefficients {}, model {}", a.coeff, a.model);
    if !a.primes_checked.is_empty() {
        let ps: Vec<String> = a.primes_checked.iter().map(ToString::to_string).collect();
        let _ = write!(out, ", primes checked {}", ps.join(" "));
    }
    out.push('\n');
    let cells: Vec<(String, String)> =
        (0..=n).map(|j| (group(&a.complement.group(j), a.coeff), group(&a.relative.group(n - j), a.coeff))).collect();
    let w = cells.iter().map(|c| c.0.chars().count()).max().unwrap_or(0).max("H_j(T - U)".len());
    let _ = writeln!(out, "  j  {:<w$}   q  H^q(T, U)", "H_j(T - U)");
    for (j, (h, r)) in cells.iter().enumerate() {
        let _ = writeln!(out, "  {j}  {h:<w$}   {}  {r}", n - j);
    }
    for note in &a.notes {
        let _ = writeln!(out, "  note: {note}");
    }
    out
}
