#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace pfront {

/// Configuration / input errors: wrong schema, violated preconditions on
/// user-supplied parameters. CLI maps these to exit code 2.
struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Numerical failures: non-convergence, lost fronts, empty fit windows.
/// CLI maps these to exit code 3.
struct numeric_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Minimize a quasiconvex g on [lo, hi] by golden-section search.
/// Returns {argmin, min}. tol is the final bracket width on the argument.
std::pair<double, double> golden_min(const std::function<double(double)>& g,
                                     double lo, double hi, double tol);

/// Least-squares fit of y against the given basis columns (row-major:
/// basis[i*ncols + j] is column j evaluated at sample i). Returns the
/// coefficient vector; rms_out (optional) receives the residual rms.
std::vector<double> lstsq(const std::vector<double>& basis, std::size_t ncols,
                          const std::vector<double>& y, double* rms_out = nullptr);

/// FNV-1a 64-bit over a byte buffer; content hashes in manifests and curves.
std::uint64_t fnv1a(const void* data, std::size_t n, std::uint64_t seed = 0xcbf29ce484222325ull);
std::string hex64(std::uint64_t h);

/// Deterministic parallel map: runs body(i) for i in [0, n) on at most
/// nthreads workers, partitioned by contiguous index blocks. Results must be
/// written into per-index slots by the caller; completion order never leaks.
void parallel_for(std::size_t n, unsigned nthreads, const std::function<void(std::size_t)>& body);

/// Reduce x into [0, L) for periodic coordinates. Exact on grid-aligned
/// inputs whose spacing is binary-representable.
double wrap_coord(double x, double L);

/// Printf-style "%.17g" formatting: shortest round-trip decimal for CSV
/// determinism across runs.
std::string fmt_g17(double v);

inline constexpr const char* kToolVersion = "pfront 0.1.0";

}  // namespace pfront
