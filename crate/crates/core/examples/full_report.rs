//! Drive the command line entry point: simulate a dataset, then report on it.

use grasp_synergy::cli;

fn main() {
    let root = std::env::temp_dir().join("grasp-synergy-example-report");
    let data = root.join("data");
    let out = root.join("report");
    let (data, out) = (data.to_str().unwrap(), out.to_str().unwrap());

    let code = cli::run(["grasp-synergy", "simulate", "--seed", "42", "--out", data]);
    assert_eq!(code, 0);
    let code = cli::run(["grasp-synergy", "report", "--dataset", data, "--seed", "7", "--out", out]);
    assert_eq!(code, 0);

    let mut files: Vec<_> = std::fs::read_dir(out)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    files.sort();
    println!("{} records in {out}:", files.len());
    for f in files {
        println!("  {f}");
    }
}
