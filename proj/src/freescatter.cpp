#include "dshell/freescatter.hpp"

#include <cmath>
#include <limits>

#include "dshell/specfun.hpp"

namespace dshell {

namespace sf = specfun;

StepWell::StepWell(double V0, double d) : depth(V0), range(d) {
    if (!(V0 > 0.0) || V0 > 1e4) throw domain_error("StepWell: depth must be in (0, 1e4]");
    if (!(d > 0.0) || d > 2.0) throw domain_error("StepWell: range must be in (0, 2]");
}

ProjectivePair ProjectivePair::normalized(double n, double d) {
    double h = std::hypot(n, d);
    if (!(h > 0.0) || !std::isfinite(h))
        throw domain_error("ProjectivePair: degenerate pair");
    return {n / h, d / h};
}

double ProjectivePair::value() const {
    if (den == 0.0) return std::copysign(std::numeric_limits<double>::infinity(), num);
    return num / den;
}

namespace freescatter {

namespace {

inline double parity(int l) { return (l % 2 == 0) ? 1.0 : -1.0; }

// Inside log-derivative of the regular solution at r = d, as a pair
// (q w_l'(q d), w_l(q d)) normalized to unit length. w = j for E > -V0,
// w = i for E < -V0; at E = -V0 both reduce to r^l and the pair limits to
// (l, d)/hypot. Continuous in E across both boundaries.
struct InsidePair {
    double n, d;
};

InsidePair inside_pair(int l, const StepWell& well, double E) {
    double q2 = 2.0 * (E + well.depth);
    double n, d;
    if (q2 > 1e-280) {
        double q = std::sqrt(q2);
        sf::BesselJN b = sf::sph_bessel_jn(l, q * well.range);
        n = q * b.j.df;
        d = b.j.f;
    } else if (q2 < -1e-280) {
        double qt = std::sqrt(-q2);
        sf::BesselIK b = sf::mod_sph_bessel_ik(l, qt * well.range);
        n = qt * b.i.df;
        d = b.i.f;
    } else {
        n = static_cast<double>(l);
        d = well.range;
    }
    double h = std::hypot(n, d);
    return {n / h, d / h};
}

struct RawSC {
    double S, C;
};

RawSC raw_tan_pair(int l, const StepWell& well, double E) {
    double k = std::sqrt(2.0 * E);
    InsidePair in = inside_pair(l, well, E);
    sf::BesselJN b = sf::sph_bessel_jn(l, k * well.range);
    double S = in.d * k * b.j.df - in.n * b.j.f;
    double C = in.d * k * b.n.df - in.n * b.n.f;
    return {S, C};
}

struct RawPQ {
    double P, Q;
};

// Negative-energy matching reduced to real arithmetic.
//
// Derivation note: with k = i kappa and x = kappa d,
//   j_l(ix)  = i^l i_l(x),            j_l'(ix) = i^{l-1} i_l'(x),
//   n_l(ix)  = i^{l+1} [i_l(x) + (-1)^l k_l(x)],
//   n_l'(ix) = i^l     [i_l'(x) + (-1)^l k_l'(x)],
// so S(i kappa) = i^l P and C(i kappa) = i^{l+1} (P + Q) with the real
//   P = kappa g_d i_l' - g_n i_l,
//   Q = (-1)^l (kappa g_d k_l' - g_n k_l),
// (g_n, g_d) the inside pair. Hence t = tanh[i delta(i kappa)]
//   = i S/C = P/(P + Q), real, and t = 1 exactly at Q = 0 (bound states).
RawPQ raw_pq(int l, const StepWell& well, double E) {
    double kappa = std::sqrt(-2.0 * E);
    InsidePair in = inside_pair(l, well, E);
    sf::BesselIK b = sf::mod_sph_bessel_ik(l, kappa * well.range);
    double P = in.d * kappa * b.i.df - in.n * b.i.f;
    double Q = parity(l) * (in.d * kappa * b.k.df - in.n * b.k.f);
    return {P, Q};
}

} // namespace

ProjectivePair tan_delta(int l, const StepWell& well, double E) {
    if (!(E > 0.0)) throw domain_error("tan_delta: E must be positive");
    RawSC sc = raw_tan_pair(l, well, E);
    return ProjectivePair::normalized(sc.S, sc.C);
}

ProjectivePair continuation_t(int l, const StepWell& well, double E) {
    if (!(E < 0.0)) throw domain_error("continuation_t: E must be negative");
    RawPQ pq = raw_pq(l, well, E);
    return ProjectivePair::normalized(pq.P, pq.P + pq.Q);
}

ScatteringPoint scattering_length_pow(int l, const StepWell& well, double E) {
    if (E == 0.0 || !std::isfinite(E))
        throw domain_error("scattering_length_pow: E must be finite and nonzero");
    ScatteringPoint out;
    out.E = E;
    out.l = l;
    if (E > 0.0) {
        double k = std::sqrt(2.0 * E);
        RawSC sc = raw_tan_pair(l, well, E);
        out.tan_or_t = ProjectivePair::normalized(sc.S, sc.C);
        out.a_proj = ProjectivePair::normalized(-sc.S, sc.C * std::pow(k, 2 * l + 1));
    } else {
        // Analytic continuation of -tan(delta)/k^{2l+1} through k = i kappa:
        // the common complex factor -i^l of (-S, C k^{2l+1}) drops out,
        // leaving (P, (-1)^l (P+Q) kappa^{2l+1}), i.e.
        // a^{2l+1}(E<0) = (-1)^l tanh[i delta_l(i kappa)] / kappa^{2l+1}.
        double kappa = std::sqrt(-2.0 * E);
        RawPQ pq = raw_pq(l, well, E);
        out.tan_or_t = ProjectivePair::normalized(pq.P, pq.P + pq.Q);
        out.a_proj = ProjectivePair::normalized(
            pq.P, parity(l) * (pq.P + pq.Q) * std::pow(kappa, 2 * l + 1));
    }
    if (out.a_proj.is_infinite()) {
        out.a_pow = std::copysign(std::numeric_limits<double>::infinity(), out.a_proj.num);
    } else {
        out.a_pow = out.a_proj.num / out.a_proj.den;
    }
    out.a_signed = std::copysign(
        std::pow(std::fabs(out.a_pow), 1.0 / (2.0 * l + 1.0)), out.a_pow);
    return out;
}

std::vector<double> well_bound_states(int l, const StepWell& well, double E_lo,
                                      double E_hi, double scan_step, scan::Exec exec) {
    if (!(E_lo < E_hi) || !(E_lo > -well.depth) || !(E_hi < 0.0))
        throw domain_error("well_bound_states: window must lie inside (-V0, 0)");
    auto g = [&](double E) {
        double kappa = std::sqrt(-2.0 * E);
        InsidePair in = inside_pair(l, well, E);
        sf::BesselIK b = sf::mod_sph_bessel_ik(l, kappa * well.range);
        double t1 = in.n * b.k.f;
        double t2 = in.d * kappa * b.k.df;
        return (t1 - t2) / (std::fabs(t1) + std::fabs(t2) +
                            std::numeric_limits<double>::min());
    };
    scan::Options opt;
    opt.step = scan_step;
    opt.xtol = 5e-13;
    opt.exec = exec;
    return scan::find_roots(g, E_lo, E_hi, opt);
}

double calibrate_depth(int l, double d, double E_b, double V0_max) {
    if (!(d > 0.0) || d > 2.0) throw domain_error("calibrate_depth: d must be in (0, 2]");
    if (!(E_b < 0.0)) throw domain_error("calibrate_depth: E_b must be negative");
    double kappa = std::sqrt(-2.0 * E_b);
    sf::BesselIK kb = sf::mod_sph_bessel_ik(l, kappa * d);
    double K = kb.k.f;
    double Kd = kappa * kb.k.df;
    // Bound state exactly at E_b as a function of depth, scanned in the
    // inside wavenumber q (roots are ~pi/d apart there). The first root is
    // the least-bound branch: the n = 0 state reaches E_b first.
    auto g = [&](double q) {
        sf::BesselJN b = sf::sph_bessel_jn(l, q * d);
        double t1 = q * b.j.df * K;
        double t2 = b.j.f * Kd;
        return (t1 - t2) / (std::fabs(t1) + std::fabs(t2) +
                            std::numeric_limits<double>::min());
    };
    if (!(V0_max + E_b > 0.0))
        throw domain_error("calibrate_depth: V0_max does not exceed |E_b|");
    double q_hi = std::sqrt(2.0 * (V0_max + E_b));
    if (!(q_hi > 2e-6))
        throw convergence_error("calibrate_depth: empty depth scan range");
    scan::Options opt;
    opt.step = 0.01;
    opt.xtol = 1e-13;
    auto xs = scan::uniform_points(1e-6, q_hi, opt.step);
    std::vector<double> fx(xs.size());
    scan::for_each_index(xs.size(), opt.exec, [&](std::size_t i) { fx[i] = g(xs[i]); });
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
        if (!std::isfinite(fx[i]) || !std::isfinite(fx[i + 1]))
            throw convergence_error("calibrate_depth: non-finite scan value");
        if (fx[i] == 0.0) return 0.5 * xs[i] * xs[i] - E_b;
        if (fx[i] * fx[i + 1] < 0.0) {
            double q = scan::bisect(g, xs[i], xs[i + 1], fx[i], fx[i + 1], opt);
            return 0.5 * q * q - E_b;
        }
    }
    throw convergence_error("calibrate_depth: no depth <= V0_max binds at E_b");
}

namespace {

// (2l+1)-th derivative of r^{l+1} j_l(k r) at r = s, from the ascending
// series of j_l (every term differentiates exactly).
double deriv_shell_regular(int l, double k, double s) {
    double term = std::pow(k, l) * sf::double_factorial(2 * l);
    double sum = term;
    double k2s2 = k * k * s * s;
    for (int m = 0; m < 60; ++m) {
        term *= -k2s2 * (l + m + 1.0) /
                ((2.0 * m + 1.0) * (2.0 * m + 2.0) * (m + 1.0));
        sum += term;
        if (std::fabs(term) < 1e-18 * std::fabs(sum)) break;
    }
    return sum;
}

// Same for r^{l+1} n_l(k r); only powers >= 2l+1 survive, so the result is
// O(k^{l+1} s) and vanishes with s.
double deriv_shell_irregular(int l, double k, double s) {
    double term = std::pow(0.5 * k * k, l + 1) / std::pow(k, l + 1) * s;
    {
        // (2l+2)!/(l+1)! accumulated as a product to stay exact
        for (int j = l + 2; j <= 2 * l + 2; ++j) term *= j;
    }
    double sum = term;
    double k2s2 = k * k * s * s;
    for (int m = l + 1; m < l + 60; ++m) {
        term *= -k2s2 * (2.0 * m + 1.0) * (2.0 * m + 2.0) /
                (2.0 * (2.0 * m - 2.0 * l) * (2.0 * m - 2.0 * l + 1.0) *
                 (m + 1.0) * (2.0 * m + 1.0 - 2.0 * l));
        sum += term;
        if (std::fabs(term) < 1e-18 * std::fabs(sum)) break;
    }
    return sum;
}

} // namespace

double shell_consistency(int l, double a_pow, double s, double k) {
    if (!(s > 0.0) || !(k > 0.0)) throw domain_error("shell_consistency: s, k must be positive");
    if (!(k * s < 0.05)) throw domain_error("shell_consistency: requires k s < 0.05");
    if (l < 0 || l > 10) throw domain_error("shell_consistency: l out of [0, 10]");
    if (a_pow == 0.0) return 0.0;

    // Outside solution j - tau n, inside B j; exact continuity at s plus the
    // jump condition 1/2 [R+' - R-'] = Ohat R+ with
    // Ohat = 1/2 (2l+1)!!/(2l)!! a_pow s^{-(l+2)} d^{2l+1}/dr^{2l+1} r^{l+1}.
    // Eliminating B via the Wronskian j n' - j' n = 1/x^2 gives
    //   tau = c a D_j / (c a D_n - 1/(k s^2 j_l(k s))).
    double c = sf::double_factorial(2 * l + 1) / sf::double_factorial(2 * l);
    double spow = std::pow(s, -(l + 2.0));
    double Dj = deriv_shell_regular(l, k, s);
    double Dn = deriv_shell_irregular(l, k, s);
    sf::BesselJN b = sf::sph_bessel_jn(l, k * s);
    double denom = c * a_pow * spow * Dn - 1.0 / (k * s * s * b.j.f);
    return c * a_pow * spow * Dj / denom;
}

} // namespace freescatter
} // namespace dshell
