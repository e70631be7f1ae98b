use std::collections::BTreeSet;
use std::path::Path;

fn book_src() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/../../book/src"))
}

fn chapters_in_summary() -> BTreeSet<String> {
    let summary = std::fs::read_to_string(book_src().join("SUMMARY.md")).unwrap();
    summary
        .lines()
        .filter_map(|l| l.split_once("](").map(|(_, rest)| rest.trim_end_matches(')').to_owned()))
        .collect()
}

#[test]
fn every_chapter_is_doc_tested() {
    let lib = include_str!("../src/lib.rs");
    let included: BTreeSet<String> = lib
        .lines()
        .filter_map(|l| l.split_once("book/src/").map(|(_, rest)| rest.split('"').next().unwrap().to_owned()))
        .collect();
    assert_eq!(chapters_in_summary(), included);
}

#[test]
fn every_chapter_exists_and_summary_is_complete() {
    let on_disk: BTreeSet<String> = std::fs::read_dir(book_src())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|name| name.ends_with(".md") && name != "SUMMARY.md")
        .collect();
    assert_eq!(chapters_in_summary(), on_disk);
}

#[test]
fn listings_are_tagged() {
    for chapter in chapters_in_summary() {
        let text = std::fs::read_to_string(book_src().join(&chapter)).unwrap();
        let mut open = false;
        for (n, line) in text.lines().enumerate() {
            if let Some(tag) = line.strip_prefix("```") {
                if !open {
                    assert!(!tag.is_empty(), "{chapter}:{}: untagged code fence", n + 1);
                }
                open = !open;
            }
        }
        assert!(!open, "{chapter}: unterminated code fence");
    }
}
