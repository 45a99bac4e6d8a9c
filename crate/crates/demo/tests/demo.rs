use footcorpus_demo::{heatmap_json, legend_json, locate_json, lora_json};
use serde_json::Value;

fn parse(s: &str) -> Value {
    serde_json::from_str(s).unwrap()
}

#[test]
fn locate_reports_cell_and_description() {
    let v = parse(&locate_json(99.0, 2.0).unwrap());
    assert_eq!((v["col"].as_u64(), v["row"].as_u64()), (Some(5), Some(0)));
    assert_eq!(v["label"], "[region 5 , 0]");
    assert_eq!(v["description"], "Offensive third, left win");
    let corner = parse(&locate_json(100.0, 100.0).unwrap());
    assert_eq!(corner["index"], 23);
    assert!(locate_json(-0.5, 10.0).is_err());
    assert!(locate_json(f64::NAN, 10.0).is_err());
}

#[test]
fn legend_covers_the_grid() {
    let v = parse(&legend_json());
    assert_eq!(v["cells"].as_array().unwrap().len(), 24);
    assert_eq!(v["event_types"].as_array().unwrap().len(), 11);
}

#[test]
fn heatmap_counts_agree_with_total_and_are_seeded() {
    let a = parse(&heatmap_json(6, 4, 11, 2, "Simple pass").unwrap());
    let counts: u64 = a["counts"].as_array().unwrap().iter().map(|c| c.as_u64().unwrap()).sum();
    assert_eq!(counts, a["total"].as_u64().unwrap());
    assert!(counts > 0);
    assert_eq!(a["matches"], 4);
    assert_eq!(a["teams"].as_array().unwrap().len(), 6);
    assert_eq!(heatmap_json(6, 4, 11, 2, "Simple pass").unwrap(), a.to_string());
    assert_ne!(heatmap_json(6, 4, 12, 2, "Simple pass").unwrap(), a.to_string());
    assert!(heatmap_json(6, 4, 11, 6, "Simple pass").is_err());
    assert!(heatmap_json(5, 4, 11, 0, "Simple pass").is_err());
    assert!(heatmap_json(6, 4, 11, 0, "Dribble").is_err());
}

#[test]
fn lora_curve_decreases() {
    let v = parse(&lora_json(8, 6, 2, 60, 1, 0.25).unwrap());
    let losses: Vec<f64> = v["losses"].as_array().unwrap().iter().map(|l| l.as_f64().unwrap()).collect();
    assert_eq!(losses.len(), 61);
    assert!(losses.windows(2).all(|w| w[1] <= w[0]));
    assert_eq!(v["base_unchanged"], true);
    assert!(lora_json(8, 6, 9, 10, 1, 0.25).is_err());
    assert!(lora_json(8, 6, 1, 1_000_000, 1, 0.25).is_err());
}
