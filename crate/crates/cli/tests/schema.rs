//! Every JSON report the binary emits validates against its shipped schema
//! document under `schema/`.

mod common;

use common::{assert_valid, run_ok};

fn write(dir: &std::path::Path, name: &str, content: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, content).unwrap();
    path.display().to_string()
}

#[test]
fn div_reports_validate() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "p.tsv", "a\t2\nb\t1\nc\t1\n");
    let q = write(dir.path(), "q.tsv", "a\t1\nb\t1\n");
    for base in ["kl", "js"] {
        for mode in ["paper-literal", "token", "strict"] {
            let report = run_ok(&[
                "div",
                "--base",
                base,
                "--mode",
                mode,
                "--input-kind",
                "tsv",
                &p,
                &q,
            ]);
            assert_valid("div.schema.json", &report);
        }
    }
}

#[test]
fn triv_reports_validate() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "p.tsv", "a\t2\nb\t1\nc\t1\n");
    let q = write(dir.path(), "q.tsv", "a\t1\nb\t1\n");
    let r = write(dir.path(), "r.tsv", "a\t1\n");
    for form in ["product", "compound"] {
        for base in ["kl", "js"] {
            let report = run_ok(&[
                "triv",
                "--form",
                form,
                "--base",
                base,
                "--mode",
                "strict",
                "--input-kind",
                "tsv",
                &p,
                &q,
                &r,
            ]);
            assert_valid("triv.schema.json", &report);
        }
    }
}

#[test]
fn matrix_reports_validate() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "p.tsv", "a\t2\nb\t1\n");
    let q = write(dir.path(), "q.tsv", "a\t1\nc\t1\n");
    let report = run_ok(&[
        "matrix",
        "--base",
        "js",
        "--mode",
        "token",
        "--input-kind",
        "tsv",
        "--output",
        "json",
        &p,
        &q,
    ]);
    assert_valid("matrix.schema.json", &report);

    let explicit = run_ok(&[
        "matrix",
        "--base",
        "kl",
        "--input-kind",
        "tsv",
        "--output",
        "json",
        "--denom",
        "7",
        &p,
        &q,
    ]);
    assert_valid("matrix.schema.json", &explicit);
}

#[test]
fn variants_reports_validate() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "p.tsv", "a\t2\nb\t1\nc\t1\n");
    let q = write(dir.path(), "q.tsv", "a\t1\nb\t1\n");
    let r = write(dir.path(), "r.tsv", "a\t1\n");
    for form in ["product", "compound"] {
        let plain = run_ok(&["variants", "--form", form]);
        assert_valid("variants.schema.json", &plain);
        let evaluated = run_ok(&[
            "variants",
            "--form",
            form,
            "--evaluate",
            "--base",
            "js",
            "--input-kind",
            "tsv",
            &p,
            &q,
            &r,
        ]);
        assert_valid("variants.schema.json", &evaluated);
    }
}
