// QZ and SVD come from the system LAPACK (reference or OpenBLAS build).
fn main() {
    println!("cargo:rustc-link-lib=lapack");
    println!("cargo:rustc-link-lib=blas");
}
