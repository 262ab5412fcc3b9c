#pragma once

// Grid-scan root finding shared by every solver in the library.
//
// The expensive part is evaluating the target function on a 1-D grid; each
// point is independent, so the evaluation loop runs under OpenMP when
// Exec::parallel is selected. Exec::serial runs the identical algorithm
// without threads and produces bit-identical results; the test suite and
// tools/bench_kernels compare the two paths.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <exception>
#include <functional>
#include <utility>
#include <vector>

#include "dshell/errors.hpp"

namespace dshell::scan {

enum class Exec { serial, parallel };

/// fn(i) for i in [0, n). Exceptions thrown by fn are rethrown (first one
/// wins) after all iterations finish or bail out.
template <class F>
void for_each_index(std::size_t n, Exec exec, F&& fn) {
    if (exec == Exec::serial) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::exception_ptr err = nullptr;
    std::atomic<bool> failed{false};
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(n); ++i) {
        if (failed.load(std::memory_order_relaxed)) continue;
        try {
            fn(static_cast<std::size_t>(i));
        } catch (...) {
#pragma omp critical(dshell_scan_err)
            {
                if (!failed.exchange(true)) err = std::current_exception();
            }
        }
    }
    if (err) std::rethrow_exception(err);
}

struct Options {
    double step = 1e-2;     // grid spacing of the sign scan
    double xtol = 1e-10;    // bisection tolerance on the abscissa
    int max_bisect = 200;
    Exec exec = Exec::parallel;
};

/// Plain bisection on a bracketing cell [a, b] with f(a) f(b) < 0.
template <class F>
double bisect(F&& f, double a, double b, double fa, double fb, const Options& opt) {
    for (int it = 0; it < opt.max_bisect && (b - a) > opt.xtol; ++it) {
        double m = 0.5 * (a + b);
        double fm = f(m);
        if (!std::isfinite(fm))
            throw convergence_error("bisect: non-finite function value");
        if (fm == 0.0) return m;
        if ((fa < 0.0) != (fm < 0.0)) {
            b = m;
            fb = fm;
        } else {
            a = m;
            fa = fm;
        }
    }
    if ((b - a) > opt.xtol)
        throw convergence_error("bisect: bracket failed to converge");
    return 0.5 * (a + b);
}

/// Sign-scan over an explicit, ascending list of evaluation points followed
/// by bisection of every bracketing cell. Roots are returned in ascending
/// order. A grid value of exactly zero is itself a root.
template <class F>
std::vector<double> find_roots_on_points(F&& f, const std::vector<double>& xs,
                                         const Options& opt) {
    const std::size_t n = xs.size();
    if (n < 2) return {};
    std::vector<double> fx(n);
    for_each_index(n, opt.exec, [&](std::size_t i) { fx[i] = f(xs[i]); });
    for (std::size_t i = 0; i < n; ++i)
        if (!std::isfinite(fx[i]))
            throw convergence_error("find_roots: non-finite value on the scan grid");

    std::vector<std::size_t> cells;
    std::vector<double> exact;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (fx[i] == 0.0) exact.push_back(xs[i]);
        if (fx[i] * fx[i + 1] < 0.0) cells.push_back(i);
    }
    if (fx[n - 1] == 0.0) exact.push_back(xs[n - 1]);

    std::vector<double> roots(cells.size());
    for_each_index(cells.size(), opt.exec, [&](std::size_t c) {
        std::size_t i = cells[c];
        roots[c] = bisect(f, xs[i], xs[i + 1], fx[i], fx[i + 1], opt);
    });
    for (double x : exact) roots.push_back(x);
    std::sort(roots.begin(), roots.end());
    return roots;
}

/// Uniform grid of ceil((hi-lo)/step) cells with exact endpoints.
inline std::vector<double> uniform_points(double lo, double hi, double step) {
    if (!(hi > lo)) throw domain_error("scan: empty interval");
    std::size_t cells = static_cast<std::size_t>(std::ceil((hi - lo) / step));
    if (cells < 1) cells = 1;
    std::vector<double> xs(cells + 1);
    for (std::size_t i = 0; i <= cells; ++i)
        xs[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(cells);
    xs.front() = lo;
    xs.back() = hi;
    return xs;
}

template <class F>
std::vector<double> find_roots(F&& f, double lo, double hi, const Options& opt) {
    return find_roots_on_points(f, uniform_points(lo, hi, opt.step), opt);
}

} // namespace dshell::scan
