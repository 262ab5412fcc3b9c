#include "dshell/exactref.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "dshell/specfun.hpp"

namespace dshell::exactref {

namespace sf = specfun;

RadialGrid::RadialGrid(double rmin, double rmax, int n)
    : r_min(rmin), r_max(rmax), n_points(n) {
    if (!(rmin > 0.0) || rmin > 1e-4)
        throw domain_error("RadialGrid: r_min must be in (0, 1e-4]");
    if (!(rmax >= 8.0)) throw domain_error("RadialGrid: r_max must be >= 8");
    if (n < 10000) throw domain_error("RadialGrid: n_points must be >= 1e4");
}

namespace {

constexpr double kTiny = std::numeric_limits<double>::min();

double effective_f(int l, const StepWell& well, double E, double r) {
    double V = 0.5 * r * r - (r < well.range ? well.depth : 0.0);
    return 2.0 * (V + 0.5 * l * (l + 1.0) / (r * r) - E);
}

// Unnormalized outside solution pieces: value of U(-nu, b, z) through the
// connection formula, with error reporting left to the caller.
struct MatchParts {
    sf::KummerSeries m_in;   // M(-nu - V0/2, b, d^2) and d/dz
    sf::TricomiParts u_out;  // U(-nu, b, d^2) and d/dz
};

MatchParts match_parts(int l, const StepWell& well, double E) {
    double b = l + 1.5;
    double nu = 0.5 * (E - l - 1.5);
    double z = well.range * well.range;
    MatchParts p;
    p.m_in = sf::kummer_m_series(-nu - 0.5 * well.depth, b, z);
    p.u_out = sf::tricomi_u_parts(-nu, b, z);
    if (!std::isfinite(p.m_in.err_f) || !std::isfinite(p.m_in.err_df))
        throw convergence_error("exact_levels_matching: inside series did not converge");
    return p;
}

} // namespace

namespace detail {

double matching_mismatch(int l, const StepWell& well, double E) {
    MatchParts p = match_parts(l, well, E);
    // The r^l exp(-r^2/2) prefactors cancel in the cross-multiplied
    // log-derivative difference, leaving the Wronskian-type combination
    // M' U - M U' at z = d^2.
    double t1 = p.m_in.df * p.u_out.f;
    double t2 = p.m_in.f * p.u_out.df;
    double scale = std::hypot(p.m_in.f, p.m_in.df) * std::hypot(p.u_out.f, p.u_out.df);
    return (t1 - t2) / (scale + kTiny);
}

} // namespace detail

namespace {

// Two-piece evaluation of the unnormalized u(r); A_in enforces continuity
// at r = d.
struct ExactEvaluator {
    int l;
    StepWell well;
    double E;
    double b, nu, a_in, A_in;

    ExactEvaluator(int l_, const StepWell& w, double E_)
        : l(l_), well(w), E(E_), b(l_ + 1.5), nu(0.5 * (E_ - l_ - 1.5)),
          a_in(-nu - 0.5 * w.depth) {
        double z = well.range * well.range;
        sf::KummerSeries m = sf::kummer_m_series(a_in, b, z);
        sf::TricomiParts u = sf::tricomi_u_parts(-nu, b, z);
        // continuity ratio; fall back to the derivative ratio at a node of M
        A_in = (std::fabs(m.f) > 1e-12 * std::fabs(m.df)) ? u.f / m.f : u.df / m.df;
    }

    double operator()(double r) const {
        double z = r * r;
        double pref = std::pow(r, l + 1.0) * std::exp(-0.5 * z);
        if (r <= well.range)
            return A_in * pref * sf::kummer_m_series(a_in, b, z).f;
        return pref * sf::tricomi_u_parts(-nu, b, z).f;
    }
};

int count_nodes_sampled(const ExactEvaluator& ev, double r_max) {
    const int n = 1200;
    int nodes = 0;
    double prev = 0.0;
    for (int i = 1; i <= n; ++i) {
        double r = r_max * i / n;
        double u = ev(r);
        if (i > 1 && u * prev < 0.0) ++nodes;
        if (u != 0.0) prev = u;
    }
    return nodes;
}

} // namespace

std::vector<EigenSolveReport> exact_levels_matching(int l, const StepWell& well,
                                                    double E_lo, double E_hi,
                                                    scan::Exec exec) {
    if (!(E_lo < E_hi)) throw domain_error("exact_levels_matching: empty window");
    if (E_lo < -well.depth)
        throw domain_error("exact_levels_matching: window extends below -V0");
    if (E_hi > 40.0) throw domain_error("exact_levels_matching: window must stay <= 40");

    auto f = [&](double E) { return detail::matching_mismatch(l, well, E); };
    scan::Options opt;
    opt.step = 0.01;
    opt.xtol = 1e-10;
    opt.exec = exec;
    std::vector<double> roots = scan::find_roots(f, E_lo, E_hi, opt);

    std::vector<EigenSolveReport> out;
    out.reserve(roots.size());
    for (double E : roots) {
        EigenSolveReport rep;
        rep.E = E;
        rep.method = Method::kummer_match;
        rep.residual = std::fabs(f(E));
        ExactEvaluator ev(l, well, E);
        double r_max = std::max(6.0, std::sqrt(2.0 * std::max(E, 0.0)) + 4.0);
        rep.nodes = count_nodes_sampled(ev, r_max);
        out.push_back(rep);
    }
    return out;
}

std::vector<WaveFunctionSample> exact_wavefunction(int l, const StepWell& well,
                                                   double E,
                                                   std::span<const double> r_grid) {
    if (r_grid.size() < 2) throw domain_error("exact_wavefunction: need >= 2 grid points");
    for (std::size_t i = 0; i < r_grid.size(); ++i) {
        if (!(r_grid[i] > 0.0) || (i > 0 && !(r_grid[i] > r_grid[i - 1])))
            throw domain_error("exact_wavefunction: grid must be positive ascending");
    }
    if (std::fabs(detail::matching_mismatch(l, well, E)) > 1e-6)
        throw domain_error("exact_wavefunction: E is not an eigenvalue");

    ExactEvaluator ev(l, well, E);
    std::vector<WaveFunctionSample> out(r_grid.size());
    scan::for_each_index(r_grid.size(), scan::Exec::parallel, [&](std::size_t i) {
        out[i] = {r_grid[i], ev(r_grid[i])};
    });

    double norm2 = 0.0;
    for (std::size_t i = 0; i + 1 < out.size(); ++i) {
        double dr = out[i + 1].r - out[i].r;
        norm2 += 0.5 * dr * (out[i].u * out[i].u + out[i + 1].u * out[i + 1].u);
    }
    if (!(norm2 > 0.0)) throw convergence_error("exact_wavefunction: zero norm");
    double inv = 1.0 / std::sqrt(norm2);
    for (auto& s : out) s.u *= inv;
    return out;
}

namespace {

// One Numerov integration pair at energy E: outward from the origin seed and
// inward from a decaying seed, meeting at index im.
struct Shot {
    double theta = 0.0;  // normalized log-derivative mismatch at the matcher
    int nodes = 0;       // interior + exterior sign changes
};

struct NumerovWork {
    int l;
    StepWell well;
    RadialGrid grid;
    int im;  // match index, r ~ max(d, 1)

    NumerovWork(int l_, const StepWell& w, const RadialGrid& g)
        : l(l_), well(w), grid(g) {
        double rm = std::max(w.range, 1.0);
        im = static_cast<int>(std::lround((rm - g.r_min) / g.h()));
        im = std::clamp(im, 2, g.n_points - 3);
    }

    double r_at(int i) const { return grid.r_min + i * grid.h(); }

    // Outward sweep storing the 5-point window around im; returns nodes on
    // (0, im] and the window values.
    void sweep_out(double E, double w5[5], int& nodes) const {
        double h = grid.h(), h12 = h * h / 12.0;
        double c2 = -(well.depth + E) / (2.0 * l + 3.0);
        double r0 = r_at(0), r1 = r_at(1);
        double um = std::pow(r0, l + 1.0) * (1.0 + c2 * r0 * r0);
        double uc = std::pow(r1, l + 1.0) * (1.0 + c2 * r1 * r1);
        double fm = effective_f(l, well, E, r0);
        double fc = effective_f(l, well, E, r1);
        nodes = 0;
        auto window = [&](int i, double u) {
            int k = i - (im - 2);
            if (k >= 0 && k <= 4) w5[k] = u;
        };
        window(0, um);
        window(1, uc);
        for (int i = 2; i <= im + 2; ++i) {
            double fn = effective_f(l, well, E, r_at(i));
            double un = (2.0 * uc * (1.0 - 5.0 * h12 * fc) - um * (1.0 + h12 * fm)) /
                        (1.0 + h12 * fn);
            if (uc * un < 0.0 && i <= im) ++nodes;
            um = uc;
            uc = un;
            fm = fc;
            fc = fn;
            if (std::fabs(uc) > 1e250) {
                um *= 1e-250;
                uc *= 1e-250;
                for (int k = 0; k < 5; ++k) w5[k] *= 1e-250;
            }
            window(i, uc);
        }
    }

    void sweep_in(double E, double w5[5], int& nodes) const {
        int n = grid.n_points;
        double h = grid.h(), h12 = h * h / 12.0;
        double rN = r_at(n - 1);
        double fN = effective_f(l, well, E, rN);
        if (!(fN > 0.0))
            throw domain_error("numerov_levels: r_max lies inside the classically allowed region");
        double um = 1e-250;  // u(r_max)
        double uc = um * std::exp(h * std::sqrt(fN));
        double fm = fN;
        double fc = effective_f(l, well, E, r_at(n - 2));
        nodes = 0;
        auto window = [&](int i, double u) {
            int k = i - (im - 2);
            if (k >= 0 && k <= 4) w5[k] = u;
        };
        window(n - 1, um);
        window(n - 2, uc);
        for (int i = n - 3; i >= im - 2; --i) {
            double fn = effective_f(l, well, E, r_at(i));
            double un = (2.0 * uc * (1.0 - 5.0 * h12 * fc) - um * (1.0 + h12 * fm)) /
                        (1.0 + h12 * fn);
            if (uc * un < 0.0 && i >= im) ++nodes;
            um = uc;
            uc = un;
            fm = fc;
            fc = fn;
            if (std::fabs(uc) > 1e250) {
                um *= 1e-250;
                uc *= 1e-250;
                for (int k = 0; k < 5; ++k) w5[k] *= 1e-250;
            }
            window(i, uc);
        }
    }

    Shot shoot(double E) const {
        double win[5] = {0, 0, 0, 0, 0}, wout[5] = {0, 0, 0, 0, 0};
        int nin = 0, nout = 0;
        sweep_out(E, win, nin);
        sweep_in(E, wout, nout);
        double mi = 0.0, mo = 0.0;
        for (int k = 0; k < 5; ++k) {
            mi = std::max(mi, std::fabs(win[k]));
            mo = std::max(mo, std::fabs(wout[k]));
        }
        if (!(mi > 0.0) || !(mo > 0.0))
            throw convergence_error("numerov_levels: vanishing solution at the matcher");
        for (int k = 0; k < 5; ++k) {
            win[k] /= mi;
            wout[k] /= mo;
        }
        double h = grid.h();
        double din = (win[0] - 8.0 * win[1] + 8.0 * win[3] - win[4]) / (12.0 * h);
        double dout = (wout[0] - 8.0 * wout[1] + 8.0 * wout[3] - wout[4]) / (12.0 * h);
        double t1 = din * wout[2];
        double t2 = win[2] * dout;
        Shot s;
        s.theta = (t1 - t2) / (std::fabs(t1) + std::fabs(t2) + kTiny);
        s.nodes = nin + nout;
        return s;
    }
};

// Locate the theta sign change inside [a, b]; widens to a fine scan when the
// endpoints do not bracket.
double refine_theta_root(const NumerovWork& w, double a, double b) {
    scan::Options opt;
    opt.xtol = 1e-11;
    auto th = [&](double E) { return w.shoot(E).theta; };
    double fa = th(a), fb = th(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if (fa * fb < 0.0) return scan::bisect(th, a, b, fa, fb, opt);
    const int n = 64;
    double prev = fa, xprev = a;
    for (int i = 1; i <= n; ++i) {
        double x = a + (b - a) * i / n;
        double fx = th(x);
        if (fx == 0.0) return x;
        if (prev * fx < 0.0) return scan::bisect(th, xprev, x, prev, fx, opt);
        prev = fx;
        xprev = x;
    }
    throw convergence_error("numerov_levels: lost the eigenvalue inside a node bracket");
}

std::vector<double> numerov_eigenvalues(const NumerovWork& w, double E_lo, double E_hi) {
    Shot lo = w.shoot(E_lo), hi = w.shoot(E_hi);
    std::vector<double> out;
    std::vector<int> targets;
    for (int t = lo.nodes; t < hi.nodes; ++t) targets.push_back(t);
    out.resize(targets.size());
    scan::for_each_index(targets.size(), scan::Exec::parallel, [&](std::size_t ti) {
        int t = targets[ti];
        double a = E_lo, b = E_hi;
        while (b - a > 0.125) {
            double m = 0.5 * (a + b);
            if (w.shoot(m).nodes <= t)
                a = m;
            else
                b = m;
        }
        out[ti] = refine_theta_root(w, a, b);
    });
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace

namespace detail {

std::vector<WaveFunctionSample> numerov_solution(int l, const StepWell& well,
                                                 double E, const RadialGrid& grid) {
    NumerovWork w(l, well, grid);
    int n = grid.n_points;
    double h = grid.h(), h12 = h * h / 12.0;
    std::vector<double> uin(w.im + 3, 0.0), uout(n, 0.0);

    {
        double c2 = -(well.depth + E) / (2.0 * l + 3.0);
        double r0 = w.r_at(0), r1 = w.r_at(1);
        uin[0] = std::pow(r0, l + 1.0) * (1.0 + c2 * r0 * r0);
        uin[1] = std::pow(r1, l + 1.0) * (1.0 + c2 * r1 * r1);
        double fm = effective_f(l, well, E, r0);
        double fc = effective_f(l, well, E, r1);
        for (int i = 2; i <= w.im + 2; ++i) {
            double fn = effective_f(l, well, E, w.r_at(i));
            uin[i] = (2.0 * uin[i - 1] * (1.0 - 5.0 * h12 * fc) -
                      uin[i - 2] * (1.0 + h12 * fm)) /
                     (1.0 + h12 * fn);
            fm = fc;
            fc = fn;
            if (std::fabs(uin[i]) > 1e250)
                for (int j = 0; j <= i; ++j) uin[j] *= 1e-250;
        }
    }
    {
        double fN = effective_f(l, well, E, w.r_at(n - 1));
        if (!(fN > 0.0))
            throw domain_error("numerov_solution: r_max inside the allowed region");
        uout[n - 1] = 1e-250;
        uout[n - 2] = uout[n - 1] * std::exp(h * std::sqrt(fN));
        double fm = fN;
        double fc = effective_f(l, well, E, w.r_at(n - 2));
        for (int i = n - 3; i >= w.im - 2; --i) {
            double fn = effective_f(l, well, E, w.r_at(i));
            uout[i] = (2.0 * uout[i + 1] * (1.0 - 5.0 * h12 * fc) -
                       uout[i + 2] * (1.0 + h12 * fm)) /
                      (1.0 + h12 * fn);
            fm = fc;
            fc = fn;
            if (std::fabs(uout[i]) > 1e250)
                for (int j = i; j < n; ++j) uout[j] *= 1e-250;
        }
    }
    if (uout[w.im] == 0.0)
        throw convergence_error("numerov_solution: exterior solution vanishes at the matcher");
    double scale = uin[w.im] / uout[w.im];

    std::vector<WaveFunctionSample> u(n);
    for (int i = 0; i < n; ++i) {
        double v = (i <= w.im) ? (i < static_cast<int>(uin.size()) ? uin[i] : 0.0)
                               : uout[i] * scale;
        u[i] = {w.r_at(i), v};
    }
    double norm2 = 0.0;
    for (int i = 0; i + 1 < n; ++i)
        norm2 += 0.5 * h * (u[i].u * u[i].u + u[i + 1].u * u[i + 1].u);
    double inv = 1.0 / std::sqrt(norm2);
    for (auto& s : u) s.u *= inv;
    return u;
}

} // namespace detail

std::vector<EigenSolveReport> numerov_levels(int l, const StepWell& well,
                                             double E_lo, double E_hi,
                                             const RadialGrid& grid) {
    if (!(E_lo < E_hi)) throw domain_error("numerov_levels: empty window");
    if (!(E_hi < 0.5 * grid.r_max * grid.r_max - 2.0))
        throw domain_error("numerov_levels: window too high for this r_max");

    NumerovWork base(l, well, grid);
    std::vector<double> e1 = numerov_eigenvalues(base, E_lo, E_hi);

    RadialGrid fine(grid.r_min, grid.r_max, 2 * grid.n_points - 1);
    NumerovWork ref(l, well, fine);

    std::vector<EigenSolveReport> out(e1.size());
    scan::for_each_index(e1.size(), scan::Exec::parallel, [&](std::size_t i) {
        double width = 1e-4;
        double E2 = 0.0;
        bool ok = false;
        for (int attempt = 0; attempt < 4 && !ok; ++attempt, width *= 8.0) {
            try {
                E2 = refine_theta_root(ref, e1[i] - width, e1[i] + width);
                ok = true;
            } catch (const convergence_error&) {
            }
        }
        if (!ok)
            throw convergence_error("numerov_levels: refinement on the doubled grid failed");
        if (std::fabs(E2 - e1[i]) > 1e-6)
            throw convergence_error("numerov_levels: step-size-limited accuracy (grids disagree)");
        EigenSolveReport rep;
        rep.E = E2;
        rep.method = Method::numerov;
        rep.residual = std::fabs(ref.shoot(E2).theta);
        auto u = detail::numerov_solution(l, well, E2, fine);
        int nodes = 0;
        for (std::size_t j = 1; j + 1 < u.size(); ++j)
            if (u[j].u * u[j + 1].u < 0.0) ++nodes;
        rep.nodes = nodes;
        out[i] = rep;
    });
    return out;
}

} // namespace exactref
} // namespace dshell
