//! Every checked-in figure config regenerates its golden CSV byte for byte.
//! Set `QFI_BLESS=1` to rewrite the golden files instead.

use std::path::PathBuf;

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn regenerate(name: &str) -> Vec<u8> {
    let config = root().join("configs").join(format!("{name}.toml"));
    let mut out = Vec::new();
    let mut err = Vec::new();
    let args = ["qfi", "sweep", "--config", config.to_str().unwrap()];
    let code = qfi_core::cli::run(args, &mut out, &mut err);
    assert_eq!(code, 0, "{name}: {}", String::from_utf8_lossy(&err));
    out
}

#[test]
fn figure_sweeps_match_golden_files() {
    let bless = std::env::var_os("QFI_BLESS").is_some();
    let mut names: Vec<String> = std::fs::read_dir(root().join("configs"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "toml"))
        .map(|p| p.file_stem().unwrap().to_string_lossy().into_owned())
        .collect();
    names.sort();
    assert_eq!(names.len(), 8);
    for name in names {
        let fresh = regenerate(&name);
        let path = root().join("golden").join(format!("{name}.csv"));
        if bless {
            std::fs::write(&path, &fresh).unwrap();
            continue;
        }
        let golden = std::fs::read(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert!(fresh == golden, "{name} differs from {}", path.display());
    }
}
