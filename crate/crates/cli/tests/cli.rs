use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use glc_core::geometry::{dsc_polyline, DscConfig};
use glc_core::{load_csv, normalize_minmax, LabelColumn};
use http_body_util::BodyExt;
use tower::ServiceExt;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn golden(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

fn glc<I, S>(args: I) -> Output
where
    I: IntoIterator<Item = S>,
    S: AsRef<std::ffi::OsStr>,
{
    Command::new(env!("CARGO_BIN_EXE_glc"))
        .args(args)
        .env_remove("GLC_SEED")
        .output()
        .unwrap()
}

fn ok(out: &Output) -> String {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn iris_dsc1_matches_golden_svg() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("iris.svg");
    let iris = data("iris.csv");
    ok(&glc(["viz", p(&iris), "--label-col", "species", "--mode", "dsc1", "--order", "4,2,3,1", "-o", p(&out)]));
    let svg = fs::read_to_string(&out).unwrap();
    let want = golden("iris_dsc1_4231.svg");
    if std::env::var_os("GLC_UPDATE_GOLDEN").is_some() {
        fs::write(&want, &svg).unwrap();
    }
    assert_eq!(svg, fs::read_to_string(&want).unwrap());
    assert_eq!(svg.matches("<path").count(), 150);
}

#[test]
fn dsc1_scene_follows_the_requested_order() {
    let dir = tempfile::tempdir().unwrap();
    let scene = dir.path().join("scene.json");
    let iris = data("iris.csv");
    ok(&glc(["viz", p(&iris), "--label-col", "species", "--mode", "dsc1", "--order", "4,2,3,1", "--scene", p(&scene)]));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&scene).unwrap()).unwrap();
    let d = normalize_minmax(&load_csv(fs::File::open(&iris).unwrap(), &LabelColumn::parse("species")).unwrap());
    let cfg = DscConfig::dsc1(vec![3, 1, 2, 0]).unwrap();
    for (i, pl) in v["polylines"].as_array().unwrap().iter().enumerate() {
        let want = dsc_polyline(d.point(i), &cfg).unwrap();
        let got: Vec<[f64; 2]> = serde_json::from_value(pl["vertices"].clone()).unwrap();
        assert_eq!(got, want.vertices);
    }
}

#[test]
fn spec_examples() {
    let wbc = data("wbc.csv");
    let text = ok(&glc(["fit", p(&wbc), "--label-col", "class"]));
    assert_eq!(text.matches("angle =").count(), 9);
    let acc: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("accuracy = "))
        .and_then(|r| r.split_whitespace().next())
        .unwrap()
        .parse()
        .unwrap();
    assert!(acc >= 0.96);

    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("out.svg");
    ok(&glc(["viz", p(&data("iris.csv")), "--label-col", "species", "--mode", "glcl", "-o", p(&svg)]));
    assert_eq!(fs::read_to_string(&svg).unwrap().matches("<path").count(), 150);
}

#[test]
fn exit_codes_and_messages() {
    let wbc = data("wbc.csv");
    assert_eq!(glc(["--help"]).status.code(), Some(0));
    assert_eq!(glc(["--version"]).status.code(), Some(0));
    assert_eq!(glc(Vec::<&str>::new()).status.code(), Some(1));

    let unknown = glc(["fit", p(&wbc), "--bogus"]);
    assert_eq!(unknown.status.code(), Some(1));
    assert!(stderr(&unknown).contains("--bogus"));

    let missing = glc(["fit", "no-such-file.csv"]);
    assert_eq!(missing.status.code(), Some(2));
    assert!(stderr(&missing).contains("no-such-file.csv"));

    let label = glc(["fit", p(&wbc), "--label-col", "nope"]);
    assert_eq!(label.status.code(), Some(2));
    assert!(stderr(&label).contains("nope"));

    for (args, flag) in [
        (vec!["fit", "--method", "tree"], "--method"),
        (vec!["fit", "--angle", "0:30"], "--angle"),
        (vec!["viz", "--mode", "radial"], "--mode"),
        (vec!["viz", "--mode", "dsc1", "--order", "1,1,2"], "--order"),
        (vec!["rules", "--algo", "forest"], "--algo"),
        (vec!["rules", "--algo", "case"], "--index"),
        (vec!["rules", "--rect", "0,0,1"], "--rect"),
        (vec!["worstcase", "--cap", "1.5"], "--cap"),
        (vec!["cv", "--model", "tree"], "--model"),
        (vec!["cv", "--k", "1"], "--k"),
    ] {
        let mut argv = vec![args[0], p(&wbc)];
        argv.extend(&args[1..]);
        let out = glc(&argv);
        assert_eq!(out.status.code(), Some(1), "{argv:?}: {}", stderr(&out));
        assert!(stderr(&out).contains(flag), "{argv:?}: {}", stderr(&out));
    }

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    fs::write(&bad, "a,b,class\n1,x,p\n2,3,q\n").unwrap();
    let out = glc(["fit", p(&bad)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("bad.csv"));
}

#[test]
fn seed_falls_back_to_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    let iris = data("iris.csv");
    let common = ["cv", p(&iris), "--label-col", "species", "--positive", "versicolor", "--model", "lda,knn"];
    ok(&glc(common.iter().copied().chain(["--seed", "11", "-o", p(&a)])));
    let out = Command::new(env!("CARGO_BIN_EXE_glc"))
        .args(common)
        .args(["-o", p(&b)])
        .env("GLC_SEED", "11")
        .output()
        .unwrap();
    ok(&out);
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let csv = fs::read_to_string(&a).unwrap();
    assert!(csv.starts_with("Model,Fold 1,"));
    assert_eq!(csv.lines().count(), 5);
}

#[test]
fn rules_round_trip_into_separate() {
    let dir = tempfile::tempdir().unwrap();
    let wbc = data("wbc.csv");
    let rules = dir.path().join("rules.json");
    ok(&glc(["rules", p(&wbc), "--algo", "mhyper", "-o", p(&rules)]));
    let doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(&rules).unwrap()).unwrap();
    assert_eq!(doc["algorithm"], "MHYPER");
    // find a pair of blocks that can be separated
    let n = doc["rules"].as_array().unwrap().len();
    let svg = dir.path().join("sep.svg");
    let scene = dir.path().join("sep.json");
    let mut done = false;
    'outer: for a in 1..=n {
        for b in a + 1..=n {
            let (sa, sb) = (a.to_string(), b.to_string());
            let out = glc([
                "separate", p(&wbc), p(&rules), p(&rules), "--block-a", &sa, "--block-b", &sb, "-o", p(&svg),
                "--scene", p(&scene),
            ]);
            if out.status.success() {
                done = true;
                break 'outer;
            }
            assert_eq!(out.status.code(), Some(1), "{}", stderr(&out));
        }
    }
    assert!(done);
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&scene).unwrap()).unwrap();
    let (h1, h2) = (&v["transform"]["hb1_y_range"], &v["transform"]["hb2_y_range"]);
    assert!(h1[0].as_f64().unwrap() > h2[1].as_f64().unwrap());
    assert!(fs::read_to_string(&svg).unwrap().starts_with("<svg"));

    let out = glc(["separate", p(&wbc), p(&rules), p(&rules), "--block-a", "999"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("--block-a"));
}

async fn call(app: &Router, method: Method, uri: &str, body: impl Into<Body>) -> (StatusCode, String) {
    let req = Request::builder().method(method).uri(uri).body(body.into()).unwrap();
    let res = app.clone().oneshot(req).await.unwrap();
    let status = res.status();
    let bytes = res.into_body().collect().await.unwrap().to_bytes();
    (status, String::from_utf8(bytes.to_vec()).unwrap())
}

#[tokio::test]
async fn cli_and_service_exports_are_identical() {
    let dir = tempfile::tempdir().unwrap();
    let wbc = data("wbc.csv");
    let out = |n: &str| dir.path().join(n);
    ok(&glc(["fit", p(&wbc), "-o", p(&out("fit.json"))]));
    ok(&glc(["rules", p(&wbc), "--algo", "hbrl", "-o", p(&out("hbrl.json"))]));
    ok(&glc(["worstcase", p(&wbc), "-o", p(&out("wc.json"))]));
    ok(&glc(["viz", p(&wbc), "--mode", "glcl", "-o", p(&out("glcl.svg"))]));
    ok(&glc(["viz", p(&wbc), "--mode", "dsc2", "--order", "9,8,7,6,5,4,3,2,1", "-o", p(&out("dsc2.svg"))]));
    ok(&glc(["cv", p(&wbc), "--model", "lda,gnb", "--k", "5", "--seed", "3", "--json", p(&out("cv.json"))]));
    ok(&glc(["rules", p(&wbc), "--rect", "-5,-5,0.5,5", "--rect", "1.5,-5,9,5", "-o", p(&out("irl.json"))]));
    let read = |n: &str| fs::read_to_string(out(n)).unwrap();

    let app = glc_service::router();
    let (s, created) = call(&app, Method::POST, "/sessions?label_col=class&name=wbc", fs::read(&wbc).unwrap()).await;
    assert_eq!(s, StatusCode::CREATED);
    let id = serde_json::from_str::<serde_json::Value>(&created).unwrap()["id"].as_str().unwrap().to_string();
    let base = format!("/sessions/{id}");

    let (_, fit) = call(&app, Method::POST, &format!("{base}/model/fit"), "{}").await;
    assert_eq!(fit, read("fit.json"));
    let (_, hbrl) = call(&app, Method::POST, &format!("{base}/blocks"), r#"{"algo":"hbrl"}"#).await;
    assert_eq!(hbrl, read("hbrl.json"));
    let (_, svg) = call(&app, Method::GET, &format!("{base}/export/svg"), Body::empty()).await;
    assert_eq!(svg, read("glcl.svg"));
    let (_, wc) = call(&app, Method::POST, &format!("{base}/worstcase"), "{}").await;
    assert_eq!(wc, read("wc.json"));
    let (_, svg) = call(&app, Method::GET, &format!("{base}/export/svg?mode=dsc2&order=9,8,7,6,5,4,3,2,1"), Body::empty()).await;
    assert_eq!(svg, read("dsc2.svg"));
    let (_, cv) = call(&app, Method::POST, &format!("{base}/crossval"), r#"{"model":"lda,gnb","k":5,"seed":3}"#).await;
    assert_eq!(cv, read("cv.json"));
    for rect in [[-5.0, -5.0, 0.5, 5.0], [1.5, -5.0, 9.0, 5.0]] {
        let body = serde_json::json!({"rect": {"x0": rect[0], "y0": rect[1], "x1": rect[2], "y1": rect[3]}});
        let (s, b) = call(&app, Method::POST, &format!("{base}/rules/selection"), body.to_string()).await;
        assert_eq!(s, StatusCode::OK, "{b}");
    }
    let (_, irl) = call(&app, Method::GET, &format!("{base}/export/rules?tag=irl"), Body::empty()).await;
    assert_eq!(irl, read("irl.json"));
}
