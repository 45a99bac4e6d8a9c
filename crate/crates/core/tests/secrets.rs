use std::sync::{Mutex, OnceLock};
use std::time::Duration;

use footcorpus::distill::{EndpointConfig, HttpReply, Teacher, Transport, API_KEY_ENV, ENDPOINT_ENV};
use footcorpus::fixture::{fixture_gen_with, FixtureOptions};
use footcorpus::pipeline::{run_pipeline_with, InputPaths, RunConfig};

const SECRET: &str = "sk-live-0123456789abcdef";

struct Capture(Mutex<Vec<String>>);

impl log::Log for Capture {
    fn enabled(&self, _: &log::Metadata) -> bool {
        true
    }
    fn log(&self, record: &log::Record) {
        self.0.lock().unwrap().push(record.args().to_string());
    }
    fn flush(&self) {}
}

fn logs() -> &'static Capture {
    static CAPTURE: OnceLock<&'static Capture> = OnceLock::new();
    CAPTURE.get_or_init(|| {
        let c: &'static Capture = Box::leak(Box::new(Capture(Mutex::new(Vec::new()))));
        log::set_logger(c).unwrap();
        log::set_max_level(log::LevelFilter::Trace);
        c
    })
}

/// Fails the first call of each prompt with 429, then answers. Asserts the
/// key arrives through the config and never through the body.
struct Flaky {
    seen: Mutex<Vec<String>>,
}

impl Transport for Flaky {
    fn post(&self, config: &EndpointConfig, body: &str) -> Result<HttpReply, String> {
        assert_eq!(config.api_key.as_ref().map(|k| k.expose()), Some(SECRET));
        assert!(!body.contains(SECRET));
        let mut seen = self.seen.lock().unwrap();
        if !seen.iter().any(|b| b == body) {
            seen.push(body.to_owned());
            return Ok(HttpReply {
                status: 429,
                retry_after: Some(Duration::ZERO),
                body: String::new(),
            });
        }
        let text = r#"Pairs: [("footgpt, who pressed high?", "The home side."), ("footgpt, where?", "On the wings.")]"#;
        Ok(HttpReply {
            status: 200,
            retry_after: None,
            body: serde_json::json!({ "text": text }).to_string(),
        })
    }
}

fn all_files(dir: &std::path::Path, out: &mut Vec<std::path::PathBuf>) {
    for e in std::fs::read_dir(dir).unwrap() {
        let p = e.unwrap().path();
        if p.is_dir() {
            all_files(&p, out);
        } else {
            out.push(p);
        }
    }
}

#[test]
fn api_key_never_reaches_outputs_caches_or_logs() {
    let capture = logs();
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data");
    fixture_gen_with(4, 2, 3, &FixtureOptions::sparse())
        .unwrap()
        .write_to(&data)
        .unwrap();
    let mut cfg = RunConfig {
        input: InputPaths::in_dir(&data),
        output_dir: dir.path().join("out"),
        ..RunConfig::default()
    };
    cfg.teacher.live = true;
    cfg.teacher.endpoint.backoff_base_ms = 0;
    let endpoint = cfg.teacher.endpoint.clone().with_env(|k| match k {
        ENDPOINT_ENV => Some("http://teacher.test/v1".into()),
        API_KEY_ENV => Some(SECRET.into()),
        _ => None,
    });
    let teacher = Teacher::with_transport(endpoint, Box::new(Flaky { seen: Mutex::new(Vec::new()) }))
        .with_sleeper(Box::new(|_| {}));
    let manifest = run_pipeline_with(&cfg, &teacher).unwrap();
    assert_eq!(manifest.teacher_mode, "live");
    assert!(teacher.network_calls() > 0);

    let mut files = Vec::new();
    all_files(&cfg.output_dir, &mut files);
    assert!(files.iter().any(|f| f.to_string_lossy().contains("teacher_cache")));
    for f in files {
        let bytes = std::fs::read(&f).unwrap();
        assert!(
            !String::from_utf8_lossy(&bytes).contains(SECRET),
            "{} contains the key",
            f.display()
        );
    }
    let logged = capture.0.lock().unwrap();
    assert!(logged.iter().any(|l| l.contains("429")), "retries were logged");
    assert!(logged.iter().all(|l| !l.contains(SECRET)));
    assert!(!format!("{teacher_cfg:?}", teacher_cfg = cfg).contains(SECRET));
}
