#include "dshell/trapsolver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "dshell/specfun.hpp"

namespace dshell::trapsolver {

namespace sf = specfun;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTiny = std::numeric_limits<double>::min();

inline double parity(int l) { return (l % 2 == 0) ? 1.0 : -1.0; }

void check_window(double lo, double hi) {
    if (!(lo < hi)) throw domain_error("trapsolver: empty energy window");
    if (lo < -40.0 || hi > 40.0)
        throw domain_error("trapsolver: window must lie inside [-40, 40]");
}

double nu_of(int l, double E) { return 0.5 * (E - l - 1.5); }
double E_of(int l, double nu) { return 2.0 * nu + l + 1.5; }

// Branch labels: floor interval between the Gamma(-nu) poles for nu >= 0
// (roots within 1e-9 of a pole snap to it, the noninteracting label);
// negative-nu roots are indexed -1, -2, ... by decreasing energy.
void assign_branches(std::vector<TrapLevel>& levels) {
    std::vector<TrapLevel*> below;
    for (auto& lv : levels) {
        if (lv.nu > -1e-9) {
            lv.branch = static_cast<int>(std::floor(lv.nu + 1e-9));
        } else {
            below.push_back(&lv);
        }
    }
    std::sort(below.begin(), below.end(),
              [](const TrapLevel* a, const TrapLevel* b) { return a->nu > b->nu; });
    int idx = -1;
    for (auto* lv : below) lv->branch = idx--;
}

} // namespace

double coupling_prefactor(int l) {
    if (l < 0 || l > 10) throw domain_error("coupling_prefactor: l out of [0, 10]");
    double dfac = sf::double_factorial(2 * l + 1);
    double g = sf::gamma_real(l + 1.5);
    return 0.5 * kPi * parity(l) * dfac * dfac / (g * g);
}

ProjectivePair eigenvalue_lhs(int l, double nu) {
    if (!(std::fabs(nu) <= 50.0)) throw domain_error("eigenvalue_lhs: |nu| must be <= 50");
    double A = coupling_prefactor(l);
    return ProjectivePair::normalized(A * sf::reciprocal_gamma(-nu - l - 0.5),
                                      sf::reciprocal_gamma(-nu));
}

std::vector<TrapLevel> levels_fixed_a(int l, double a_pow, double E_lo, double E_hi,
                                      scan::Exec exec) {
    check_window(E_lo, E_hi);
    if (std::isnan(a_pow)) throw domain_error("levels_fixed_a: a_pow is NaN");
    double A = coupling_prefactor(l);
    bool infinite = std::isinf(a_pow);
    bool reciprocal_form = !infinite && std::fabs(a_pow) > 1.0;

    auto W = [&](double nu) {
        double r2 = sf::reciprocal_gamma(-nu - l - 0.5);
        if (infinite) return r2;
        double r1 = sf::reciprocal_gamma(-nu);
        double t1, t2;
        if (reciprocal_form) {
            t1 = A * r2;
            t2 = r1 / a_pow;
        } else {
            t1 = A * a_pow * r2;
            t2 = r1;
        }
        return (t1 - t2) / (std::fabs(t1) + std::fabs(t2) + kTiny);
    };

    scan::Options opt;
    opt.step = 0.005;
    opt.xtol = 1e-12;
    opt.exec = exec;
    std::vector<double> nus = scan::find_roots(W, nu_of(l, E_lo), nu_of(l, E_hi), opt);

    std::vector<TrapLevel> out;
    out.reserve(nus.size());
    for (double nu : nus) {
        TrapLevel lv;
        lv.l = l;
        lv.nu = nu;
        lv.E = E_of(l, nu);
        lv.residual = std::fabs(W(nu));
        out.push_back(lv);
    }
    assign_branches(out);
    std::sort(out.begin(), out.end(),
              [](const TrapLevel& a, const TrapLevel& b) { return a.E < b.E; });
    return out;
}

std::vector<SelfConsistentLevel> self_consistent_levels(int l, const StepWell& well,
                                                        double E_lo, double E_hi,
                                                        scan::Exec exec) {
    check_window(E_lo, E_hi);
    double A = coupling_prefactor(l);

    auto Wsc = [&](double E) {
        ScatteringPoint sp = freescatter::scattering_length_pow(l, well, E);
        double nu = nu_of(l, E);
        double t1 = A * sp.a_proj.num * sf::reciprocal_gamma(-nu - l - 0.5);
        double t2 = sp.a_proj.den * sf::reciprocal_gamma(-nu);
        return (t1 - t2) / (std::fabs(t1) + std::fabs(t2) + kTiny);
    };

    scan::Options opt;
    opt.step = 0.01;
    opt.xtol = 1e-10;
    opt.exec = exec;

    // E = 0 is excluded: the t-pair generating formula changes branch there,
    // so a sign flip across 0 is only a root if each side brackets on its own.
    const double eps0 = 1e-9;
    std::vector<double> roots;
    auto collect = [&](double lo, double hi) {
        if (hi - lo < 4.0 * eps0) return;
        auto r = scan::find_roots(Wsc, lo, hi, opt);
        roots.insert(roots.end(), r.begin(), r.end());
    };
    if (E_lo < -eps0 && E_hi > eps0) {
        collect(E_lo, -eps0);
        collect(eps0, E_hi);
    } else if (E_hi <= -eps0 || E_lo >= eps0) {
        collect(E_lo, E_hi);
    } else {
        // window touches 0; nudge the offending endpoint
        if (E_lo > -eps0) collect(eps0, E_hi);
        else collect(E_lo, -eps0);
    }
    std::sort(roots.begin(), roots.end());

    std::vector<TrapLevel> levels;
    std::vector<SelfConsistentLevel> out;
    levels.reserve(roots.size());
    for (double E : roots) {
        TrapLevel lv;
        lv.l = l;
        lv.nu = nu_of(l, E);
        lv.E = E;
        lv.residual = std::fabs(Wsc(E));
        levels.push_back(lv);
    }
    assign_branches(levels);

    for (auto& lv : levels) {
        ScatteringPoint sp = freescatter::scattering_length_pow(l, well, lv.E);
        double r1 = sf::reciprocal_gamma(-lv.nu);
        double r2 = sf::reciprocal_gamma(-lv.nu - l - 0.5);
        double residual = lv.residual;
        // re-verify in the original form where every factor is finite
        if (std::fabs(r1) > 1e-280 && sp.a_proj.den != 0.0 && std::isfinite(sp.a_pow)) {
            double orig = std::fabs(A * (r2 / r1) * sp.a_pow - 1.0) /
                          (std::fabs(A * (r2 / r1) * sp.a_pow) + 1.0);
            residual = std::max(residual, orig);
        }
        lv.residual = residual;
        SelfConsistentLevel scl{lv, sp.a_pow, residual, well, false};
        scl.flagged = (std::fabs(sp.a_proj.num) < 1e-6 && std::fabs(r1) < 1e-6) ||
                      (std::fabs(sp.a_proj.den) < 1e-6 && std::fabs(r2) < 1e-6);
        out.push_back(scl);
    }
    std::sort(out.begin(), out.end(), [](const SelfConsistentLevel& a,
                                         const SelfConsistentLevel& b) {
        return a.level.E < b.level.E;
    });
    return out;
}

std::vector<WaveFunctionSample> pseudo_wavefunction(int l, const TrapLevel& level,
                                                    double s,
                                                    std::span<const double> r_grid) {
    if (level.l != l) throw domain_error("pseudo_wavefunction: level belongs to another l");
    if (!(s > 0.0) || s > 1e-2)
        throw domain_error("pseudo_wavefunction: shell radius must be in (0, 1e-2]");
    if (level.residual > 1e-8)
        throw domain_error("pseudo_wavefunction: level residual too large (not an eigenvalue)");
    if (r_grid.size() < 2) throw domain_error("pseudo_wavefunction: need >= 2 grid points");
    for (std::size_t i = 0; i < r_grid.size(); ++i)
        if (!(r_grid[i] > 0.0) || (i > 0 && !(r_grid[i] > r_grid[i - 1])))
            throw domain_error("pseudo_wavefunction: grid must be positive ascending");

    const double b = l + 1.5;
    const double nu = level.nu;
    const double xg = -nu - l - 0.5;

    // Outside solution written as C_l U = (-1)^l Gamma(b)/pi *
    //   [ Gamma(1-b) M(-nu,b,z) + Gamma(xg) rg(-nu) z^{1-b} M(xg,2-b,z) ],
    // using Gamma(x) rg(x) = 1; finite through the unitarity points where
    // Gamma(xg) alone blows up. Overall scale drops out after normalization.
    double c_reg = sf::gamma_real(1.0 - b);
    double c_irr;
    if (std::fabs(xg - std::nearbyint(xg)) < 1e-13 && xg <= 0.0) {
        c_reg = 0.0;  // exact unitarity level: purely the z^{1-b} branch
        c_irr = 1.0;
    } else {
        c_irr = sf::gamma_real(xg) * sf::reciprocal_gamma(-nu);
    }
    double cmax = std::max(std::fabs(c_reg), std::fabs(c_irr));
    c_reg /= cmax;
    c_irr /= cmax;

    auto outside_bracket = [&](double z) {
        double v = 0.0;
        if (c_reg != 0.0) v += c_reg * sf::kummer_m_series(-nu, b, z).f;
        if (c_irr != 0.0) v += c_irr * std::pow(z, 1.0 - b) * sf::kummer_m_series(xg, 2.0 - b, z).f;
        return v;
    };

    double z_s = s * s;
    double B = outside_bracket(z_s) / sf::kummer_m_series(-nu, b, z_s).f;

    auto u_at = [&](double r) {
        double z = r * r;
        double pref = std::pow(r, l + 1.0) * std::exp(-0.5 * z);
        if (r < s) return B * pref * sf::kummer_m_series(-nu, b, z).f;
        return pref * outside_bracket(z);
    };

    std::vector<WaveFunctionSample> out(r_grid.size());
    scan::for_each_index(r_grid.size(), scan::Exec::parallel, [&](std::size_t i) {
        out[i] = {r_grid[i], u_at(r_grid[i])};
    });

    // trapezoid normalization over the grid points at r >= s
    double norm2 = 0.0;
    for (std::size_t i = 0; i + 1 < out.size(); ++i) {
        if (out[i].r < s) continue;
        double dr = out[i + 1].r - out[i].r;
        norm2 += 0.5 * dr * (out[i].u * out[i].u + out[i + 1].u * out[i + 1].u);
    }
    if (!(norm2 > 0.0)) throw convergence_error("pseudo_wavefunction: zero norm on grid");
    double inv = 1.0 / std::sqrt(norm2);
    for (auto& w : out) w.u *= inv;
    return out;
}

double delta_bound_energy(double a_signed) {
    if (!(a_signed > 0.0))
        throw domain_error("delta_bound_energy: requires a_signed > 0");
    return -0.5 / (a_signed * a_signed);
}

double prefactor_ratio(int l) {
    if (l < 0) throw domain_error("prefactor_ratio: l must be >= 0");
    // Huang-Yang coupling: 2 pi (l+1) (2l-1)!!/(2l)!! a^{2l+1}.
    // Shell-limit coupling in the same 3D-delta normalization:
    //   2 pi (2l+1)!!/(2l)!! a^{2l+1}.
    // The common 2 pi/(2l)!! cancels exactly; the quotient below equals
    // (l+1)/(2l+1) to the last bit because both products are exact integers.
    double hy = (l + 1.0) * sf::double_factorial(2 * l - 1);
    double shell = sf::double_factorial(2 * l + 1);
    return hy / shell;
}

namespace {

// 16-point Gauss-Legendre nodes/weights on [-1, 1] (positive half; mirrored).
constexpr double kGLx[8] = {0.0950125098376374, 0.2816035507792589,
                            0.4580167776572274, 0.6178762444026438,
                            0.7554044083550030, 0.8656312023878318,
                            0.9445750230732326, 0.9894009349916499};
constexpr double kGLw[8] = {0.1894506104550685, 0.1826034150449236,
                            0.1691565193950025, 0.1495959888165767,
                            0.1246289712555339, 0.0951585116824928,
                            0.0622535239386479, 0.0271524594117541};

template <class F>
double gl16(F&& f, double a, double b) {
    double c = 0.5 * (a + b), hw = 0.5 * (b - a);
    double s = 0.0;
    for (int i = 0; i < 8; ++i) {
        s += kGLw[i] * (f(c - hw * kGLx[i]) + f(c + hw * kGLx[i]));
    }
    return s * hw;
}

// Integrate f over [a, b] split at the given interior breakpoints.
template <class F>
double integrate_panels(F&& f, const std::vector<double>& pts) {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) s += gl16(f, pts[i], pts[i + 1]);
    return s;
}

std::vector<double> geometric_panels(double a, double b) {
    std::vector<double> p{a};
    double x = a;
    while (x * 2.0 < b) {
        x *= 2.0;
        p.push_back(x);
    }
    // finish with uniform panels no wider than 0.5
    double last = p.back();
    int m = std::max(1, static_cast<int>(std::ceil((b - last) / 0.5)));
    for (int i = 1; i <= m; ++i) p.push_back(last + (b - last) * i / m);
    return p;
}

struct Moments {
    double norm2;
    double r2_half;  // integral of u^2 r^2/2
};

template <class F>
Moments moments(F&& u, const std::vector<double>& panels) {
    Moments m{};
    m.norm2 = integrate_panels([&](double r) { double v = u(r); return v * v; }, panels);
    m.r2_half = integrate_panels(
        [&](double r) { double v = u(r); return 0.5 * v * v * r * r; }, panels);
    return m;
}

} // namespace

PerturbativeShift perturbative_shift(int l, const StepWell& well, double E_b, double s) {
    if (!(s >= 1e-4) || !(s <= 1e-1))
        throw domain_error("perturbative_shift: s must be in [1e-4, 1e-1]");
    if (!(E_b < 0.0) || !(E_b > -well.depth))
        throw domain_error("perturbative_shift: E_b must be in (-V0, 0)");
    {
        auto bs = freescatter::well_bound_states(l, well, -well.depth + 1e-9, -1e-9);
        bool found = false;
        for (double e : bs) found = found || std::fabs(e - E_b) <= 1e-6;
        if (!found)
            throw domain_error("perturbative_shift: E_b is not a bound state of the well");
    }

    double kappa = std::sqrt(-2.0 * E_b);
    double r_cap = std::min(40.0, 90.0 / kappa);

    // delta-shell bound state: i_l inside the shell, k_l outside, matched at s
    double is = sf::mod_sph_bessel_ik(l, kappa * s).i.f;
    double ks = sf::mod_sph_bessel_ik(l, kappa * s).k.f;
    auto u_shell = [&](double r) {
        if (r <= 0.0) return 0.0;
        auto bb = sf::mod_sph_bessel_ik(l, kappa * r);
        return (r <= s) ? r * bb.i.f * ks : r * bb.k.f * is;
    };
    std::vector<double> shell_panels = geometric_panels(std::min(s, 1e-4) * 1e-2, r_cap);
    shell_panels.insert(shell_panels.begin(), 0.0);
    // make sure s itself is a breakpoint
    shell_panels.push_back(s);
    std::sort(shell_panels.begin(), shell_panels.end());
    Moments ms = moments(u_shell, shell_panels);

    // free-well bound state: j_l inside the well, k_l outside, matched at d
    double q = std::sqrt(2.0 * (E_b + well.depth));
    double jd = sf::sph_bessel_jn(l, q * well.range).j.f;
    double kd = sf::mod_sph_bessel_ik(l, kappa * well.range).k.f;
    auto u_well = [&](double r) {
        if (r <= 0.0) return 0.0;
        if (r <= well.range) return r * sf::sph_bessel_jn(l, q * r).j.f * kd;
        return r * sf::mod_sph_bessel_ik(l, kappa * r).k.f * jd;
    };
    std::vector<double> well_panels{0.0};
    {
        int m = std::max(2, static_cast<int>(std::ceil(q * well.range / 1.5)));
        for (int i = 1; i <= m; ++i) well_panels.push_back(well.range * i / m);
        auto tail = geometric_panels(well.range, r_cap);
        well_panels.insert(well_panels.end(), tail.begin() + 1, tail.end());
    }
    Moments mw = moments(u_well, well_panels);

    PerturbativeShift out{};
    out.shell_term = ms.r2_half / ms.norm2;
    out.well_term = mw.r2_half / mw.norm2;
    out.dE = out.shell_term - out.well_term;
    return out;
}

} // namespace dshell::trapsolver
