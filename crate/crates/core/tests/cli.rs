use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use hindi_wsd::corpus::{self, write_corpus};
use hindi_wsd::synthetic::{separable_corpus, SyntheticSpec};
use hindi_wsd::{Corpus, Instance, Token};

fn hwsd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hwsd"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn write(c: &Corpus, path: &Path) {
    let mut buf = Vec::new();
    write_corpus(c, &mut buf).unwrap();
    fs::write(path, buf).unwrap();
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn small_synthetic(targets: usize, per_sense: usize) -> Corpus {
    separable_corpus(&SyntheticSpec {
        targets,
        instances_per_sense: per_sense,
        ..Default::default()
    })
}

#[test]
fn stats_prints_three_counts() {
    let out = hwsd(&["stats", "--corpus", p(&fixture("haar.jsonl"))]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    let expected = corpus::corpus_stats(&corpus::load_corpus(&fixture("haar.jsonl")).unwrap());
    assert!(text.contains(&format!("words\t{}", expected.word_count)));
    assert!(text.contains("instances\t12"));
    assert!(text.contains("polysemous_words\t1"));
}

#[test]
fn stats_missing_corpus_exits_two() {
    let out = hwsd(&["stats", "--corpus", "/no/such/file.jsonl"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("corpus not found"));
    assert!(stdout(&out).is_empty());
}

#[test]
fn stats_invalid_corpus_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.jsonl");
    fs::write(
        &path,
        "{\"target\":\"हार\",\"sense\":\"a\",\"text\":\"कुछ नहीं\"}\n",
    )
    .unwrap();
    let out = hwsd(&["stats", "--corpus", p(&path)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("line 1"));
}

#[test]
fn split_writes_reloadable_partition() {
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("all.jsonl");
    // 2 targets x 2 senses x 25 = 100 instances
    write(&small_synthetic(2, 25), &src);
    let (train, test) = (
        dir.path().join("train.jsonl"),
        dir.path().join("test.jsonl"),
    );
    let run = || {
        let out = hwsd(&[
            "split",
            "--corpus",
            p(&src),
            "--train",
            p(&train),
            "--test",
            p(&test),
            "--seed",
            "3",
        ]);
        assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
        (fs::read(&train).unwrap(), fs::read(&test).unwrap())
    };
    let first = run();
    let tr = corpus::load_corpus(&train).unwrap();
    let te = corpus::load_corpus(&test).unwrap();
    // 25 per group -> round(18.75) = 19 train, 6 test
    assert_eq!((tr.len(), te.len()), (76, 24));
    assert_eq!(run(), first);
}

#[test]
fn split_singleton_group_warns() {
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("all.jsonl");
    fs::write(
        &src,
        "{\"target\":\"हार\",\"sense\":\"a\",\"text\":\"हार एक\"}\n{\"target\":\"हार\",\"sense\":\"b\",\"text\":\"हार दो\"}\n{\"target\":\"हार\",\"sense\":\"b\",\"text\":\"हार तीन\"}\n",
    )
    .unwrap();
    let out = hwsd(&[
        "split",
        "--corpus",
        p(&src),
        "--train",
        p(&dir.path().join("tr.jsonl")),
        "--test",
        p(&dir.path().join("te.jsonl")),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stderr(&out).contains("warning"));
}

#[test]
fn split_unwritable_output_fails() {
    let out = hwsd(&[
        "split",
        "--corpus",
        p(&fixture("haar.jsonl")),
        "--train",
        "/no/such/dir/train.jsonl",
        "--test",
        "/no/such/dir/test.jsonl",
    ]);
    assert_ne!(out.status.code(), Some(0));
}

#[test]
fn train_then_predict_necklace_sense() {
    let dir = tempfile::tempdir().unwrap();
    let models = dir.path().join("models");
    let out = hwsd(&[
        "train",
        "--train",
        p(&fixture("haar.jsonl")),
        "--model-dir",
        p(&models),
        "--methods",
        "c+bs",
        "--windows",
        "5",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stdout(&out).contains("हार\tc+bs@5\tsenses=2"));
    let model_path = models.join("हार.json");
    let json = fs::read_to_string(&model_path).unwrap();
    assert!(json.contains("\"method\": \"c+bs\"") && json.contains("\"window\": 5"));

    let paragraph_two = "न्यूयॉर्क। हीरे का हार पहनी एक बार्बी गुडिया न्यूयॉर्क में रेकॉर्ड कीमत में नीलाम हुई है।";
    let out = hwsd(&[
        "predict",
        "--model-dir",
        p(&models),
        "--target",
        "हार",
        "--text",
        paragraph_two,
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    assert_eq!(text.lines().next().unwrap(), "predicted\tमाला");
    assert_eq!(text.lines().count(), 3);

    let defeat = "केकेआर की हार से बहुत दुख हुआ।";
    let out = hwsd(&[
        "predict",
        "--model-dir",
        p(&models),
        "--target",
        "हार",
        "--text",
        defeat,
    ]);
    assert_eq!(stdout(&out).lines().next().unwrap(), "predicted\tपराजय");

    let out = hwsd(&[
        "predict",
        "--model-dir",
        p(&models),
        "--target",
        "हार",
        "--text",
        "यह वाक्य अलग है",
    ]);
    assert_eq!(out.status.code(), Some(3));

    let out = hwsd(&[
        "predict",
        "--model-dir",
        p(&models),
        "--target",
        "कदम",
        "--text",
        "कदम बढ़ाओ",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn single_sense_model_scores_zero_relative() {
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("one.jsonl");
    let tok = |s: &str| Token::new(s).unwrap();
    let c = Corpus::from_instances(vec![Instance::new(
        vec![tok("सोने"), tok("का"), tok("हार")],
        2,
        "माला",
    )
    .unwrap()]);
    write(&c, &src);
    let models = dir.path().join("m");
    let out = hwsd(&["train", "--train", p(&src), "--model-dir", p(&models)]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stderr(&out).contains("single sense"));
    let out = hwsd(&[
        "predict",
        "--model-dir",
        p(&models),
        "--target",
        "हार",
        "--text",
        "हार",
    ]);
    let text = stdout(&out);
    let score_line = text.lines().nth(1).unwrap();
    assert!(score_line.starts_with("माला\t"));
    assert!(score_line.ends_with("\t0.000000"));
}

#[test]
fn train_writes_one_model_per_target() {
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("all.jsonl");
    write(&small_synthetic(60, 3), &src);
    let models = dir.path().join("models");
    let out = hwsd(&["train", "--train", p(&src), "--model-dir", p(&models)]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(fs::read_dir(&models).unwrap().count(), 60);
    assert_eq!(stdout(&out).lines().count(), 60);
}

#[test]
fn train_rejects_empty_set_and_grids() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.jsonl");
    fs::write(&empty, "").unwrap();
    let models = dir.path().join("m");
    let out = hwsd(&["train", "--train", p(&empty), "--model-dir", p(&models)]);
    assert_eq!(out.status.code(), Some(1));
    let out = hwsd(&[
        "train",
        "--train",
        p(&fixture("haar.jsonl")),
        "--model-dir",
        p(&models),
        "--windows",
        "2..5",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sweep_single_cell_and_bad_method() {
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("all.jsonl");
    write(&small_synthetic(3, 20), &src);
    let out = hwsd(&[
        "sweep",
        "--corpus",
        p(&src),
        "--methods",
        "bs",
        "--windows",
        "5",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(stdout(&out).lines().count(), 2);

    let out = hwsd(&["sweep", "--corpus", p(&src), "--methods", "bs,xyz"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("l+c+v"));
}

#[test]
fn sweep_default_grid_has_sixteen_rows() {
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("all.jsonl");
    write(&small_synthetic(3, 20), &src);
    let out_path = dir.path().join("report.txt");
    let out = hwsd(&["sweep", "--corpus", p(&src), "--out", p(&out_path)]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stdout(&out).is_empty());
    let text = fs::read_to_string(&out_path).unwrap();
    let rows: Vec<Vec<&str>> = text
        .lines()
        .skip(1)
        .map(|l| l.split_whitespace().collect())
        .collect();
    assert_eq!(rows.len(), 16);
    assert_eq!(rows[0][..2], ["c+bs", "5"]);
    assert_eq!(rows[15][..2], ["bs", "2"]);
}

#[test]
fn eval_on_fixed_split() {
    let dir = tempfile::tempdir().unwrap();
    let c = small_synthetic(2, 20);
    let split = corpus::split(&c, 0.75, 9).unwrap();
    let (train, test) = (dir.path().join("tr.jsonl"), dir.path().join("te.jsonl"));
    write(&split.train, &train);
    write(&split.test, &test);
    let out = hwsd(&[
        "eval",
        "--train",
        p(&train),
        "--test",
        p(&test),
        "--methods",
        "c+bs,v",
        "--windows",
        "3",
        "--format",
        "csv",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let csv = stdout(&out);
    assert!(csv.starts_with("scope,method,window,target,precision,recall,f1,accuracy,n_test\n"));
    let overall = csv.lines().filter(|l| l.starts_with("overall,")).count();
    let words = csv.lines().filter(|l| l.starts_with("word,")).count();
    assert_eq!((overall, words), (2, 4));
}
