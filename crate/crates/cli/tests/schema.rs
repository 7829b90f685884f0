#[test]
fn published_schema_is_current() {
    let committed = include_str!("../schema/run_config.schema.json");
    assert_eq!(ftscale_cli::run_config_schema(), committed, "regenerate with `ftscale --print-schema`");
}

#[test]
fn schema_covers_every_command() {
    let schema: serde_json::Value = serde_json::from_str(&ftscale_cli::run_config_schema()).unwrap();
    let text = schema.to_string();
    for name in ["optimize", "sweep", "gatesim", "longrange", "shor", "fit"] {
        assert!(text.contains(&format!("\"{name}\"")), "{name}");
    }
}
