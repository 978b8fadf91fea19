use std::env;
use std::path::PathBuf;

fn main() {
    let crate_dir = PathBuf::from(env::var("CARGO_MANIFEST_DIR").expect("CARGO_MANIFEST_DIR not set"));
    let config_path = crate_dir.join("cbindgen.toml");
    let header = crate_dir.join("include").join("freqcap.h");

    println!("cargo:rerun-if-changed=src");
    println!("cargo:rerun-if-changed={}", config_path.display());

    std::fs::create_dir_all(header.parent().expect("header path has a parent")).expect("cannot create include dir");
    let config = cbindgen::Config::from_file(&config_path).expect("failed to read cbindgen.toml");
    cbindgen::Builder::new()
        .with_crate(&crate_dir)
        .with_config(config)
        .generate()
        .expect("failed to generate C bindings")
        .write_to_file(header);
}
