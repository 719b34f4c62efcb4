#pragma once

namespace poincare {

/// OpenBLAS picks its kernels when it is loaded. On some AVX-512 virtual
/// machines the auto-selected kernels return wrong dgemm/potrf results, so
/// executables call this first: when OPENBLAS_CORETYPE is unset on an
/// AVX-512 CPU it pins the Haswell kernels and re-executes the program.
/// Does nothing if the variable is already set or the CPU lacks AVX-512.
void pin_blas_kernel(int argc, char** argv);

}  // namespace poincare
