use panelfact_web::{cost_curve, factor, strassen_counts, MAX_SHOWN};
use serde_json::Value;

fn parse(s: String) -> Value {
    serde_json::from_str(&s).unwrap()
}

#[test]
fn cost_curve_covers_both_ends() {
    let v = parse(cost_curve(2000, 2));
    let pts = v["points"].as_array().unwrap();
    assert_eq!(pts.first().unwrap()["s"], 1);
    assert_eq!(pts.last().unwrap()["s"], 2000);
    assert_eq!(pts.last().unwrap()["strassen_flush"], 0);
    let best = v["best_strassen"].as_u64().unwrap();
    assert!(best > 1 && best < 2000);
    assert_eq!(v["best_classical"], 1);
    assert!(parse(cost_curve(0, 1))["error"].is_string());
}

#[test]
fn factor_reports_flushes_and_entries() {
    let v = parse(factor("cholesky", 20, 6, 1, 2));
    assert_eq!(v["flush_at"], serde_json::json!([7, 13, 19]));
    assert!(v["residual_rel"].as_f64().unwrap() < 1e-14);
    assert_eq!(v["factors"][0].as_array().unwrap().len(), 400);
    assert_eq!(v["names"], serde_json::json!(["L"]));

    let q = parse(factor("qr", 12, 5, 0, 1));
    assert!(q["orth_rel"].as_f64().unwrap() < 1e-13);
    assert_eq!(q["factors"].as_array().unwrap().len(), 2);

    let big = parse(factor("lu", MAX_SHOWN + 1, 10, 2, 1));
    assert!(big["factors"].as_array().unwrap().is_empty());
}

#[test]
fn factor_rejects_bad_input() {
    for s in [
        factor("svd", 4, 1, 0, 0),
        factor("lu", 4, 5, 0, 0),
        factor("lu", 0, 1, 0, 0),
    ] {
        assert!(parse(s)["error"].is_string());
    }
}

#[test]
fn strassen_counts_match_prediction() {
    let rows = parse(strassen_counts(37, 3));
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 4);
    assert_eq!(rows[0]["mults"], 37 * 37 * 37);
    for r in rows {
        assert_eq!(r["mults"], r["predicted"]["mults"]);
        assert_eq!(r["adds"], r["predicted"]["adds"]);
    }
}
