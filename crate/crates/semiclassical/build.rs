fn main() {
    // System OpenBLAS carries the BLAS and LAPACK symbols needed by the
    // `lapack` FFI bindings.
    println!("cargo:rustc-link-lib=dylib=openblas");
}
