//! The incomplete slab metric against an independent high-precision oracle.

mod common;

use finsler::geometry::mean_landsberg;
use finsler::zoo;
use serde::Deserialize;

#[derive(Deserialize)]
struct Point {
    x: Vec<f64>,
    y: Vec<f64>,
    #[serde(rename = "F")]
    f: f64,
    #[serde(rename = "J")]
    j: Vec<f64>,
    #[serde(rename = "J_norm")]
    j_norm: f64,
}

#[derive(Deserialize)]
struct Oracle {
    points: Vec<Point>,
    threshold: f64,
}

fn oracle() -> Oracle {
    let text = std::fs::read_to_string(common::manifest_path("tests/oracles/slab_landsberg.json")).unwrap();
    serde_json::from_str(&text).unwrap()
}

#[test]
fn slab_landsberg_matches_oracle() {
    let metric = zoo::incomplete_slab(3).unwrap();
    for p in oracle().points {
        let f = metric.value(&p.x, &p.y);
        assert!((f - p.f).abs() <= 1e-13 * p.f, "F at {:?}: {f} vs {}", p.x, p.f);
        let j = mean_landsberg(&metric, &metric.sample(&p.x, &p.y).unwrap()).unwrap();
        let scale = p.j.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for (a, b) in j.covariant.iter().zip(&p.j) {
            assert!((a - b).abs() <= 1e-10 * scale, "J at {:?}: {a} vs {b}", p.x);
        }
        assert!((j.norm() - p.j_norm).abs() <= 1e-10 * p.j_norm);
    }
}

#[test]
fn witness_threshold_is_half_the_oracle_minimum() {
    let o = oracle();
    let min = o.points.iter().map(|p| p.j_norm).fold(f64::INFINITY, f64::min);
    assert_eq!(o.threshold, min / 2.0);
    assert!((o.threshold - 5.0 / 13.0).abs() < 1e-15);
}

#[test]
fn slab_axis_is_euclidean() {
    let metric = zoo::incomplete_slab(3).unwrap();
    let y = [0.3, -1.2, 2.0];
    let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
    assert!((metric.value(&[0.0, 0.0, 0.7], &y) - norm).abs() < 1e-15);
}
