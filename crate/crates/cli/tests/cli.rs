use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use axum::body::Body;
use axum::http::{header, Request, StatusCode};
use http_body_util::BodyExt;
use sdskg::coversheet::CoverSheet;
use sdskg::store::{CatalogEntry, SdsStore, StoreConfig};
use sdskg_service::{router, AppState, ServiceConfig};
use serde_json::{json, Value};
use tower::ServiceExt;

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn sdskg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sdskg")).args(args).output().unwrap()
}

fn sdskg_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_sdskg"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json_fixtures(filter: &str) -> Vec<String> {
    let mut v: Vec<String> = std::fs::read_dir(fixtures().join("sds/json"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.file_name().unwrap().to_string_lossy().contains(filter))
        .map(|p| p.to_string_lossy().into_owned())
        .collect();
    v.sort();
    v
}

fn ingest_into(dir: &Path, files: &[String]) -> Output {
    let mut args = vec!["ingest", "--store", dir.to_str().unwrap()];
    args.extend(files.iter().map(String::as_str));
    sdskg(&args)
}

#[test]
fn ingest_reports_and_persists() {
    let dir = tempfile::tempdir().unwrap();
    let files = json_fixtures("ethanol");
    let out = ingest_into(dir.path(), &files);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(stdout(&out).lines().filter(|l| l.starts_with("created")).count(), 8);

    // Second run: unchanged, JSON schema.
    let mut args = vec!["--json", "ingest", "--store", dir.path().to_str().unwrap()];
    args.push(&files[0]);
    let out = sdskg(&args);
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v[0]["report"]["status"], "unchanged");

    let store = SdsStore::open(dir.path(), StoreConfig::bundled()).unwrap();
    assert_eq!(store.len(), 8);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let store = dir.path().to_str().unwrap();
    // Input error: bad JSON from stdin.
    let out = sdskg_stdin(&["ingest", "--store", store, "-"], "{ \"compound\": ");
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("error:"));
    // Missing file.
    assert_eq!(code(&sdskg(&["validate", "/nonexistent.ttl"])), 2);
    // Validation failure: quarantined upload.
    let mut doc: Value =
        serde_json::from_str(&std::fs::read_to_string(&json_fixtures("ethanol_sigma_en_2021")[0]).unwrap()).unwrap();
    doc["language"] = json!("xx");
    let out = sdskg_stdin(&["ingest", "--store", store, "-"], &doc.to_string());
    assert_eq!(code(&out), 1);
    // Unknown SDS id in a selection.
    assert_eq!(code(&sdskg(&["coversheet", "--store", store, "--select", "urn:nope"])), 2);
    // Corrupt store.
    std::fs::write(dir.path().join(sdskg::store::GRAPH_FILE), "garbage").unwrap();
    assert_eq!(code(&sdskg(&["query", store, "--sparql", "-"])), 2);
}

#[test]
fn validate_conforming_and_mutated() {
    let conforming = fixtures().join("shacl/safed-conforming.ttl");
    let out = sdskg(&["validate", conforming.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    assert_eq!(stdout(&out).trim(), "conforms");

    let shapes = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/data/dpg-safed-shapes.ttl");
    let text = std::fs::read_to_string(&conforming).unwrap();
    let mutated = text.replace("safed:manufacturer \"Sigma-Aldrich\" ;", "");
    assert_ne!(mutated, text);
    let out = sdskg_stdin(&["--json", "validate", "-", "--shapes", shapes.to_str().unwrap()], &mutated);
    assert_eq!(code(&out), 1);
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["conforms"], false);
    assert_eq!(report["results"].as_array().unwrap().len(), 1);
}

#[test]
fn infer_and_taxonomy_check() {
    let data = fixtures().join("shacl/safed-conforming.ttl");
    let out = sdskg(&["--json", "infer", data.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["inferred"].as_array().unwrap().len(), 1);
    assert_eq!(v["capped"], false);

    let ghs = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/data/dpg-ghs.ttl");
    assert_eq!(code(&sdskg(&["taxonomy", "check", ghs.to_str().unwrap()])), 0);
    let cyclic = "@prefix skos: <http://www.w3.org/2004/02/skos/core#> .
        @prefix ex: <https://example.org/> .
        ex:s a skos:ConceptScheme .
        ex:a a skos:Concept ; skos:inScheme ex:s ; skos:prefLabel \"A\"@en ; skos:broader ex:b .
        ex:b a skos:Concept ; skos:inScheme ex:s ; skos:prefLabel \"B\"@en ; skos:broader ex:a .";
    let out = sdskg_stdin(&["--json", "taxonomy", "check", "-"], cyclic);
    assert_eq!(code(&out), 1);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["violations"][0]["kind"], "broaderCycle");
}

#[test]
fn query_from_stdin() {
    let dir = tempfile::tempdir().unwrap();
    ingest_into(dir.path(), &json_fixtures("acetomenophin-400_sigma_en"));
    let q = "SELECT ?m WHERE { ?m a safed:Mixture }";
    let out = sdskg_stdin(&["--json", "query", dir.path().to_str().unwrap(), "--sparql", "-"], q);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["variables"], json!(["m"]));
    assert_eq!(v["rows"].as_array().unwrap().len(), 1);
}

async fn call(app: &axum::Router, req: Request<Body>) -> (StatusCode, header::HeaderMap, Vec<u8>) {
    let resp = app.clone().oneshot(req).await.unwrap();
    let (status, headers) = (resp.status(), resp.headers().clone());
    (status, headers, resp.into_body().collect().await.unwrap().to_bytes().to_vec())
}

#[tokio::test]
async fn cli_render_equals_service_render() {
    let dir = tempfile::tempdir().unwrap();
    let out = ingest_into(dir.path(), &json_fixtures("_"));
    assert_eq!(code(&out), 0);

    let config = ServiceConfig {
        data_dir: Some(dir.path().to_path_buf()),
        ..ServiceConfig::default()
    };
    let state = AppState::open(&config, StoreConfig::bundled()).unwrap();
    let app = router(state.clone(), None);
    let catalog: Vec<CatalogEntry> = state.store().catalog();
    let ids: Vec<String> = catalog.iter().step_by(5).map(|e| e.sds_id.clone()).collect();

    let (_, _, body) = call(&app, Request::post("/carts").body(Body::empty()).unwrap()).await;
    let cart: Value = serde_json::from_slice(&body).unwrap();
    let cart = cart["cartId"].as_str().unwrap();
    for id in &ids {
        let req = Request::put(format!("/carts/{cart}/items"))
            .header(header::CONTENT_TYPE, "application/json")
            .body(Body::from(json!({ "add": id }).to_string()))
            .unwrap();
        assert_eq!(call(&app, req).await.0, StatusCode::OK);
    }
    let req = Request::post(format!("/carts/{cart}/coversheet"))
        .header(header::CONTENT_TYPE, "application/json")
        .body(Body::from(json!({ "productName": "Shipment 7" }).to_string()))
        .unwrap();
    let (status, headers, body) = call(&app, req).await;
    assert_eq!(status, StatusCode::OK);
    let sheet: CoverSheet = serde_json::from_slice(&body).unwrap();
    let location = headers[header::LOCATION].to_str().unwrap().to_string();

    let stamp = sheet.generated_at.to_rfc3339();
    let select = ids.join(",");
    let store = dir.path().to_str().unwrap();
    for format in ["md", "html", "json"] {
        let (_, _, service) = call(&app, Request::get(format!("{location}?format={format}")).body(Body::empty()).unwrap()).await;
        let out = sdskg(&[
            "coversheet", "--store", store, "--select", &select, "--product-name", "Shipment 7", "--format", format,
            "--generated-at", &stamp,
        ]);
        assert_eq!(code(&out), 0);
        let mut service = String::from_utf8(service).unwrap();
        if !service.ends_with('\n') {
            service.push('\n');
        }
        assert_eq!(stdout(&out), service, "{format}");
    }

    // Same payload through --json.
    let out = sdskg(&["--json", "coversheet", "--store", store, "--select", &select, "--product-name", "Shipment 7", "--generated-at", &stamp]);
    let cli_sheet: CoverSheet = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(cli_sheet, sheet);

    // Network export agrees too.
    let (_, _, net) = call(&app, Request::get(format!("/network?cart={cart}")).body(Body::empty()).unwrap()).await;
    let out = sdskg(&["network", "--store", store, "--select", &select]);
    assert_eq!(serde_json::from_slice::<Value>(&out.stdout).unwrap(), serde_json::from_slice::<Value>(&net).unwrap());
}

#[test]
fn select_from_file_and_by_compound() {
    let dir = tempfile::tempdir().unwrap();
    ingest_into(dir.path(), &json_fixtures("_"));
    let store = SdsStore::open(dir.path(), StoreConfig::bundled()).unwrap();
    let ids: Vec<String> = store
        .catalog()
        .into_iter()
        .filter(|e| e.compound_name == "Ethanol")
        .map(|e| e.sds_id)
        .collect();
    let list = dir.path().join("ids.txt");
    std::fs::write(&list, format!("# ethanol\n{}\n", ids.join("\n"))).unwrap();
    let s = dir.path().to_str().unwrap();
    let stamp = "2024-05-01T00:00:00Z";
    let a = sdskg(&["--json", "coversheet", "--store", s, "--select", list.to_str().unwrap(), "--generated-at", stamp]);
    let b = sdskg(&["--json", "coversheet", "--store", s, "--compound", "ethanol", "--generated-at", stamp]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let sheet: CoverSheet = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(sheet.source_sds.len(), 8);
}
