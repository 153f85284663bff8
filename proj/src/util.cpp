#include "pfront/util.hpp"

#include <cmath>
#include <cstdio>
#include <thread>

namespace pfront {

std::pair<double, double> golden_min(const std::function<double(double)>& g,
                                     double lo, double hi, double tol) {
    if (!(lo < hi)) throw config_error("golden_min: empty bracket");
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;   // 0.618...
    const double invphi2 = (3.0 - std::sqrt(5.0)) / 2.0;  // 0.382...
    double a = lo, b = hi;
    double hlen = b - a;
    double c = a + invphi2 * hlen;
    double d = a + invphi * hlen;
    double fc = g(c), fd = g(d);
    while (b - a > tol) {
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            hlen = b - a;
            c = a + invphi2 * hlen;
            fc = g(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            hlen = b - a;
            d = a + invphi * hlen;
            fd = g(d);
        }
    }
    // Smallest argument attaining the bracket minimum; callers treating flat
    // minima rely on this bias toward the left end.
    double xm = (fc <= fd) ? c : d;
    double fm = std::min(fc, fd);
    return {xm, fm};
}

std::vector<double> lstsq(const std::vector<double>& basis, std::size_t ncols,
                          const std::vector<double>& y, double* rms_out) {
    const std::size_t n = y.size();
    if (ncols == 0 || n < ncols || basis.size() != n * ncols)
        throw numeric_error("lstsq: fewer samples than basis columns");
    // Normal equations; ncols <= 3 here, conditioning is a non-issue at
    // these sizes after the caller centers the time axis.
    std::vector<double> ata(ncols * ncols, 0.0), aty(ncols, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < ncols; ++j) {
            aty[j] += basis[i * ncols + j] * y[i];
            for (std::size_t k = 0; k < ncols; ++k)
                ata[j * ncols + k] += basis[i * ncols + j] * basis[i * ncols + k];
        }
    }
    // Gaussian elimination with partial pivoting.
    std::vector<double> m = ata, rhs = aty;
    std::vector<std::size_t> piv(ncols);
    for (std::size_t j = 0; j < ncols; ++j) piv[j] = j;
    for (std::size_t col = 0; col < ncols; ++col) {
        std::size_t best = col;
        for (std::size_t r = col + 1; r < ncols; ++r)
            if (std::fabs(m[r * ncols + col]) > std::fabs(m[best * ncols + col])) best = r;
        if (best != col) {
            for (std::size_t k = 0; k < ncols; ++k) std::swap(m[col * ncols + k], m[best * ncols + k]);
            std::swap(rhs[col], rhs[best]);
        }
        double p = m[col * ncols + col];
        if (std::fabs(p) < 1e-300) throw numeric_error("lstsq: singular normal matrix");
        for (std::size_t r = col + 1; r < ncols; ++r) {
            double fac = m[r * ncols + col] / p;
            for (std::size_t k = col; k < ncols; ++k) m[r * ncols + k] -= fac * m[col * ncols + k];
            rhs[r] -= fac * rhs[col];
        }
    }
    std::vector<double> x(ncols, 0.0);
    for (std::size_t col = ncols; col-- > 0;) {
        double s = rhs[col];
        for (std::size_t k = col + 1; k < ncols; ++k) s -= m[col * ncols + k] * x[k];
        x[col] = s / m[col * ncols + col];
    }
    if (rms_out) {
        double ss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double pred = 0.0;
            for (std::size_t j = 0; j < ncols; ++j) pred += basis[i * ncols + j] * x[j];
            ss += (y[i] - pred) * (y[i] - pred);
        }
        *rms_out = std::sqrt(ss / double(n));
    }
    return x;
}

std::uint64_t fnv1a(const void* data, std::size_t n, std::uint64_t seed) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = seed;
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string hex64(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void parallel_for(std::size_t n, unsigned nthreads, const std::function<void(std::size_t)>& body) {
    if (n == 0) return;
    if (nthreads <= 1 || n == 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    unsigned workers = static_cast<unsigned>(std::min<std::size_t>(nthreads, n));
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::size_t chunk = (n + workers - 1) / workers;
    // First worker exception (by block order) is rethrown after the join.
    std::vector<std::exception_ptr> errs(workers);
    for (unsigned w = 0; w < workers; ++w) {
        std::size_t b = std::size_t(w) * chunk, e = std::min(n, b + chunk);
        if (b >= e) break;
        pool.emplace_back([&body, &err = errs[w], b, e] {
            try {
                for (std::size_t i = b; i < e; ++i) body(i);
            } catch (...) {
                err = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& err : errs)
        if (err) std::rethrow_exception(err);
}

double wrap_coord(double x, double L) {
    double r = x - L * std::floor(x / L);
    if (r < 0.0) r += L;
    if (r >= L) r -= L;
    return r;
}

std::string fmt_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace pfront
