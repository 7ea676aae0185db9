use std::fmt::Write;

use biocs::kg::{ConditionRecord, EgoGraph};

fn argument(key: &str, attr: Option<&str>) -> String {
    match attr {
        Some(a) => format!("{{{key}: {a}}}"),
        None => key.to_string(),
    }
}

fn condition(c: &ConditionRecord) -> String {
    format!(
        "({}, {}, {})",
        argument(&c.subj_key, c.subj_attr.as_deref()),
        c.pred,
        argument(&c.obj_key, c.obj_attr.as_deref())
    )
}

/// Plain-text view of an ego graph: a header line, then one aligned row per
/// edge. Conditions are listed in the last column.
pub fn table(ego: &EgoGraph) -> String {
    let Some(center) = &ego.center else {
        return "no such concept\n".to_string();
    };
    let mut out = format!("{} ({}), frequency {}\n", center.key, center.display, center.freq);
    if ego.edges.is_empty() {
        out.push_str("no matching edges\n");
        return out;
    }
    let header = ["SUBJECT", "PREDICATE", "OBJECT", "SUPPORT", "CONDITIONS"].map(String::from);
    let mut rows = vec![header];
    for e in &ego.edges {
        let conds: Vec<String> = e.edge.conditions.iter().map(condition).collect();
        rows.push([
            argument(&e.edge.subj_key, e.edge.subj_attr.as_deref()),
            e.edge.pred_lemma.clone(),
            argument(&e.edge.obj_key, e.edge.obj_attr.as_deref()),
            e.edge.support.to_string(),
            if conds.is_empty() {
                "-".to_string()
            } else {
                conds.join("; ")
            },
        ]);
    }
    let mut widths = [0usize; 4];
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row.iter()) {
            *w = (*w).max(cell.chars().count());
        }
    }
    for row in &rows {
        for (w, cell) in widths.iter().zip(row.iter()) {
            let _ = write!(out, "{cell:<w$}  ");
        }
        out.push_str(&row[4]);
        out.push('\n');
    }
    out
}
