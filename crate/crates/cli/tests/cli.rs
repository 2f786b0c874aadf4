use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use cdf_compact::family::{FamilySpec, Locations, ParametricTail, Template};
use cdf_compact::rational::ratio;
use cdf_compact::sample::{random_cdf, random_discrete};
use cdf_compact_cli::spec::{parse_family_spec, serialize_family_spec};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const EXAMPLE: &str =
    r#"{"tails":[{"template":"mixture-escape","a":"3/10","base":{"dirac":"0"},"t":"n","horizon":128}]}"#;

fn run(dir: &Path, spec: &str, args: &[&str]) -> Output {
    let input = dir.join("family.json");
    fs::write(&input, spec).unwrap();
    Command::new(env!("CARGO_BIN_EXE_cdfc"))
        .arg(args[0])
        .arg(&input)
        .args(&args[1..])
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn bracket_check_on_example_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), EXAMPLE, &["prokhorov-check"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("3/10,3/10,1/100,1,PASS"), "{out}");
}

#[test]
fn single_member_is_tight() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        dir.path(),
        r#"{"explicit":[{"uniform":{"a":"-1","b":"2"}}]}"#,
        &["indices"],
    );
    assert!(o.status.success());
    let out = stdout(&o);
    let row = out.lines().nth(1).unwrap();
    assert!(row.starts_with("0,true,"), "{row}");
}

#[test]
fn levy_value_in_metrics_table() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        dir.path(),
        r#"{"explicit":[{"dirac":"0"},{"dirac":"1/2"}]}"#,
        &["metrics", "--gamma", "1"],
    );
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.starts_with("F,G,D_u,L_1,phi_1/2\n"));
    assert!(out.contains("explicit[0],explicit[1],1,1/2,0"), "{out}");
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.md");
    let b = dir.path().join("b.md");
    for out in [&a, &b] {
        let o = run(
            dir.path(),
            EXAMPLE,
            &[
                "report",
                "--seed",
                "7",
                "--grid-depth",
                "16",
                "--out",
                out.to_str().unwrap(),
            ],
        );
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let text = fs::read_to_string(&a).unwrap();
    assert_eq!(text, fs::read_to_string(&b).unwrap());
    assert!(text.contains("<svg"));
    assert!(text.contains("| bracket | PASS |"));
}

#[test]
fn svg_plot_format() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        dir.path(),
        EXAMPLE,
        &["indices", "--format", "svg-plot", "--grid-depth", "8"],
    );
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.starts_with("<svg") && out.trim_end().ends_with("</svg>"));
    assert!(!out.contains("NaN"));
}

#[test]
fn malformed_input_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        dir.path(),
        r#"{"tails":[{"template":"shift-escape","base":{"dirac":"0"},"t":"m"}]}"#,
        &["indices"],
    );
    assert_eq!(o.status.code(), Some(2));
    let err: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["error"], "input");
    assert_eq!(err["field"], "tails[0].t");
}

#[test]
fn narrow_window_is_a_computation_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        dir.path(),
        r#"{"explicit":[{"dirac":"5"}]}"#,
        &["indices", "--window", "1/2"],
    );
    assert_eq!(o.status.code(), Some(2));
    let err: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["error"], "computation");
}

#[test]
fn bad_flag_values_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), EXAMPLE, &["indices", "--eps", "0.01"]);
    assert!(!o.status.success());
}

fn random_tail(rng: &mut ChaCha8Rng) -> ParametricTail {
    let locations = if rng.gen_bool(0.5) {
        Locations::multiple(ratio(rng.gen_range(1..=6), rng.gen_range(1..=3))).unwrap()
    } else {
        let mut t = ratio(rng.gen_range(-4..=4), 2);
        let prefix = (0..rng.gen_range(1..=4))
            .map(|_| {
                t += ratio(rng.gen_range(1..=4), 2);
                t.clone()
            })
            .collect();
        Locations::explicit(prefix).unwrap()
    };
    let template = match rng.gen_range(0..4) {
        0 => Template::Constant,
        1 => Template::ShiftEscape { locations },
        2 => Template::MixtureEscape {
            weight: ratio(rng.gen_range(0..=5), 5),
            locations,
        },
        _ => Template::ShiftConverge {
            scale: ratio(rng.gen_range(1..=7), rng.gen_range(1..=3)),
        },
    };
    ParametricTail::new(template, random_cdf(rng), rng.gen_range(1..=200)).unwrap()
}

fn family() -> impl Strategy<Value = FamilySpec> {
    any::<u64>().prop_map(|seed| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let explicit = (0..rng.gen_range(0..=3))
            .map(|_| {
                if rng.gen_bool(0.5) {
                    random_cdf(&mut rng)
                } else {
                    random_discrete(&mut rng, 5)
                }
            })
            .collect();
        let mut tails: Vec<ParametricTail> = (0..rng.gen_range(0..=3)).map(|_| random_tail(&mut rng)).collect();
        if tails.is_empty() {
            tails.push(random_tail(&mut rng));
        }
        FamilySpec::new(explicit, tails).unwrap()
    })
}

proptest! {
    #[test]
    fn spec_round_trip(f in family()) {
        let text = serialize_family_spec(&f);
        prop_assert_eq!(parse_family_spec(&text).unwrap(), f);
    }
}
