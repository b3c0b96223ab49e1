use std::process::Command;

fn compiles_with(compiler: &str, lang: &str) -> Option<bool> {
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join(if lang == "c" { "t.c" } else { "t.cpp" });
    std::fs::write(
        &src,
        "#include \"stabrad.h\"\n\
         int main(void) {\n\
           StabradOptions o = stabrad_options_default();\n\
           StabradMatrix *a = stabrad_matrix_grcar(10, 1.0);\n\
           StabradStructure *s = stabrad_structure_sparsity_real(a);\n\
           StabradRadiusResult *r = 0;\n\
           StabradStatus st = stabrad_solve_delta(a, s, 0.5, &o, &r);\n\
           (void)st;\n\
           stabrad_result_free(r);\n\
           stabrad_structure_free(s);\n\
           stabrad_matrix_free(a);\n\
           return 0;\n\
         }\n",
    )
    .unwrap();
    let out = Command::new(compiler)
        .args(["-fsyntax-only", "-Wall", "-Werror", "-x", if lang == "c" { "c" } else { "c++" }])
        .arg(concat!("-I", env!("CARGO_MANIFEST_DIR"), "/include"))
        .arg(&src)
        .output()
        .ok()?;
    if !out.status.success() {
        eprintln!("{}", String::from_utf8_lossy(&out.stderr));
    }
    Some(out.status.success())
}

#[test]
fn header_is_valid_c_and_cpp() {
    match (compiles_with("cc", "c"), compiles_with("c++", "cpp")) {
        (None, None) => eprintln!("SKIP: no C compiler found"),
        (c, cpp) => {
            assert_ne!(c, Some(false));
            assert_ne!(cpp, Some(false));
        }
    }
}
