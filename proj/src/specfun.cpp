#include "dshell/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace dshell::specfun {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr int kLMax = 10;

[[noreturn]] void bad_arg(const std::string& msg) { throw domain_error(msg); }

void require_finite(double x, const char* name) {
    if (!std::isfinite(x)) bad_arg(std::string(name) + " must be finite");
}

// sin(pi*x), reduced around the nearest integer so that integer x gives
// exactly zero.
double sin_pi(double x) {
    double n = std::nearbyint(x);
    double s = std::sin(kPi * (x - n));
    long long m = static_cast<long long>(n);
    return (m % 2 == 0) ? s : -s;
}

// Lanczos coefficients, g = 607/128, 15 terms (Godfrey's set).
constexpr double kLanczosG = 4.7421875;
constexpr double kLanczosC[15] = {
    0.99999999999999709182,     57.156235665862923517,
    -59.597960355475491248,     14.136097974741747174,
    -0.49191381609762019978,    0.33994649984811888699e-4,
    0.46523628927048575665e-4,  -0.98374475304879564677e-4,
    0.15808870322491248884e-3,  -0.21026444172410488319e-3,
    0.21743961811521264320e-3,  -0.16431810653676389022e-3,
    0.84418223983852743293e-4,  -0.26190838401581408670e-4,
    0.36899182659531622704e-5};

// Gamma(x) for x >= 0.5. The power is split so Gamma stays representable up
// to the double overflow threshold near x = 171.6.
double gamma_positive(double x) {
    double s = kLanczosC[0];
    for (int i = 1; i < 15; ++i) s += kLanczosC[i] / (x + i - 1);
    double t = x + kLanczosG - 0.5;
    double p = std::pow(t, 0.5 * (x - 0.5));
    return std::sqrt(2.0 * kPi) * s * p * std::exp(-t) * p;
}

} // namespace

double double_factorial(int n) {
    if (n < -1) bad_arg("double_factorial: n must be >= -1");
    double p = 1.0;
    for (int k = n; k >= 2; k -= 2) p *= k;
    return p;
}

double gamma_real(double x) {
    require_finite(x, "gamma_real: x");
    if (x > 171.6) bad_arg("gamma_real: overflow for x > 171.6");
    if (x < -171.6) bad_arg("gamma_real: underflow for x < -171.6");
    if (x >= 0.5) return gamma_positive(x);
    if (x == std::nearbyint(x)) bad_arg("gamma_real: pole at non-positive integer");
    return kPi / (sin_pi(x) * gamma_positive(1.0 - x));
}

double reciprocal_gamma(double x) {
    require_finite(x, "reciprocal_gamma: x");
    if (x >= 0.5) {
        if (x > 171.6) return 0.0;  // 1/Gamma underflows
        return 1.0 / gamma_positive(x);
    }
    if (x <= 0.0 && x == std::nearbyint(x)) return 0.0;  // pole of Gamma
    if (x < -171.6) bad_arg("reciprocal_gamma: overflow for x < -171.6");
    return sin_pi(x) * gamma_positive(1.0 - x) / kPi;
}

namespace {

void check_order(int l) {
    if (l < 0 || l > kLMax) bad_arg("spherical Bessel order must be in [0, 10]");
}

// Upward three-term recurrence f_{m+1} = (2m+1)/x f_m - f_{m-1}, shared by
// j and n. Returns f_l and f_l' = f_{l-1} - (l+1)/x f_l.
BesselPair recur_up_jn(int l, double x, double f0, double f1) {
    if (l == 0) return {f0, -f1};
    double fm = f0, fc = f1;
    for (int m = 1; m < l; ++m) {
        double fn = (2.0 * m + 1.0) / x * fc - fm;
        fm = fc;
        fc = fn;
    }
    return {fc, fm - (l + 1.0) / x * fc};
}

// Ascending series around x = 0; sign = -1 for j_l, +1 for i_l.
BesselPair series_jl_il(int l, double x, double sign) {
    double pref = std::pow(x, l) / double_factorial(2 * l + 1);
    double x2 = x * x;
    double term = 1.0;
    double sf = 1.0;
    double sd = static_cast<double>(l);
    for (int m = 1; m <= 80; ++m) {
        term *= sign * 0.5 * x2 / (m * (2.0 * l + 2.0 * m + 1.0));
        sf += term;
        sd += term * (l + 2.0 * m);
        if (std::fabs(term) < 1e-18 * std::fabs(sf)) break;
    }
    return {pref * sf, pref * sd / x};
}

// Downward (Miller) recurrence for j_l, normalized with the closed forms of
// j_0 or j_1, whichever is well away from a zero. Valid for l >= 1.
BesselPair miller_j(int l, double x) {
    int ltop = l + 26 + static_cast<int>(std::lround(std::min(x, 15.0)));
    double fp = 0.0;
    double fc = 1e-280;
    double fl = 0.0, flm1 = 0.0, f1 = 0.0;
    for (int m = ltop; m >= 1; --m) {
        double fm1 = (2.0 * m + 1.0) / x * fc - fp;
        fp = fc;
        fc = fm1;
        int idx = m - 1;
        if (idx == l) fl = fc;
        if (idx == l - 1) flm1 = fc;
        if (idx == 1) f1 = fc;
        if (std::fabs(fc) > 1e250) {
            fp *= 1e-250;
            fc *= 1e-250;
            fl *= 1e-250;
            flm1 *= 1e-250;
            f1 *= 1e-250;
        }
    }
    double f0 = fc;
    double scale;
    if (std::fabs(std::sin(x)) > 0.3) {
        scale = (std::sin(x) / x) / f0;
    } else {
        double j1t = std::sin(x) / (x * x) - std::cos(x) / x;
        scale = j1t / f1;
    }
    double jl = fl * scale;
    double jlm1 = flm1 * scale;
    return {jl, jlm1 - (l + 1.0) / x * jl};
}

// Downward recurrence for i_l: f_{m-1} = f_{m+1} + (2m+1)/x f_m, normalized
// with i_0 = sinh(x)/x. Valid for l >= 1.
BesselPair miller_i(int l, double x) {
    int ltop = l + 26 + static_cast<int>(std::lround(std::min(x, 40.0)));
    double fp = 0.0;
    double fc = 1e-280;
    double fl = 0.0, flm1 = 0.0;
    for (int m = ltop; m >= 1; --m) {
        double fm1 = fp + (2.0 * m + 1.0) / x * fc;
        fp = fc;
        fc = fm1;
        int idx = m - 1;
        if (idx == l) fl = fc;
        if (idx == l - 1) flm1 = fc;
        if (std::fabs(fc) > 1e250) {
            fp *= 1e-250;
            fc *= 1e-250;
            fl *= 1e-250;
            flm1 *= 1e-250;
        }
    }
    double scale = (std::sinh(x) / x) / fc;
    double il = fl * scale;
    double ilm1 = flm1 * scale;
    return {il, ilm1 - (l + 1.0) / x * il};
}

} // namespace

BesselJN sph_bessel_jn(int l, double x) {
    check_order(l);
    require_finite(x, "sph_bessel_jn: x");
    if (x <= 0.0 || x > 1e3) bad_arg("sph_bessel_jn: x must be in (0, 1e3]");

    double n0 = -std::cos(x) / x;
    double n1 = -std::cos(x) / (x * x) - std::sin(x) / x;
    BesselPair n = recur_up_jn(l, x, n0, n1);
    if (!std::isfinite(n.f) || !std::isfinite(n.df))
        bad_arg("sph_bessel_jn: n_l overflows at this (l, x)");

    BesselPair j;
    if (x < 0.5) {
        j = series_jl_il(l, x, -1.0);
    } else if (x >= l + 0.5) {
        double j0 = std::sin(x) / x;
        double j1 = std::sin(x) / (x * x) - std::cos(x) / x;
        j = recur_up_jn(l, x, j0, j1);
    } else {
        j = miller_j(l, x);
    }
    return {j, n};
}

BesselIK mod_sph_bessel_ik(int l, double x) {
    check_order(l);
    require_finite(x, "mod_sph_bessel_ik: x");
    if (x <= 0.0) bad_arg("mod_sph_bessel_ik: x must be positive");
    if (x > 100.0) bad_arg("mod_sph_bessel_ik: x > 100 would overflow i_l");

    // k family: upward recurrence k_{m+1} = k_{m-1} + (2m+1)/x k_m is stable
    // (k_l grows with l); derivative k_l' = -k_{l-1} - (l+1)/x k_l.
    double ex = std::exp(-x);
    double k0 = ex / x;
    double k1 = ex * (x + 1.0) / (x * x);
    BesselPair k;
    if (l == 0) {
        k = {k0, -k0 * (1.0 + 1.0 / x)};
    } else {
        double km = k0, kc = k1;
        for (int m = 1; m < l; ++m) {
            double kn = km + (2.0 * m + 1.0) / x * kc;
            km = kc;
            kc = kn;
        }
        k = {kc, -km - (l + 1.0) / x * kc};
    }
    if (!std::isfinite(k.f) || !std::isfinite(k.df))
        bad_arg("mod_sph_bessel_ik: k_l overflows at this (l, x)");

    BesselPair i;
    if (x < 0.5) {
        i = series_jl_il(l, x, +1.0);
    } else if (l == 0) {
        i = {std::sinh(x) / x, std::cosh(x) / x - std::sinh(x) / (x * x)};
    } else {
        i = miller_i(l, x);
    }
    return {i, k};
}

namespace {

inline void kahan_add(double& sum, double& comp, double x) {
    double y = x - comp;
    double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
}

bool is_nonpositive_integer(double x) {
    return x <= 0.0 && x == std::nearbyint(x);
}

} // namespace

KummerSeries kummer_m_series(double a, double b, double z) {
    require_finite(a, "kummer_m: a");
    require_finite(b, "kummer_m: b");
    require_finite(z, "kummer_m: z");
    if (z < 0.0) bad_arg("kummer_m: z must be >= 0");
    if (z > 500.0) bad_arg("kummer_m: z > 500 unsupported");
    if (std::fabs(a) > 500.0) bad_arg("kummer_m: |a| > 500 unsupported");
    if (is_nonpositive_integer(b)) bad_arg("kummer_m: b is a non-positive integer");

    KummerSeries out;
    if (z == 0.0) {
        out.f = 1.0;
        out.df = a / b;
        out.terms = 1;
        return out;
    }

    // f  = sum_k (a)_k/(b)_k z^k/k!
    // df = sum_k (a)_{k+1}/(b)_{k+1} z^k/k!
    double t = 1.0, u = a / b;
    double sf = t, cf = 0.0;
    double sd = u, cd = 0.0;
    double wf = 2.0 * std::fabs(t);  // weighted |term| sums for the error bound
    double wd = 3.0 * std::fabs(u);
    int k = 0;
    bool converged = false;
    const int cap = 500;
    for (k = 0; k < cap; ++k) {
        t *= (a + k) * z / ((b + k) * (k + 1.0));
        u *= (a + k + 1.0) * z / ((b + k + 1.0) * (k + 1.0));
        kahan_add(sf, cf, t);
        kahan_add(sd, cd, u);
        wf += (3.0 * (k + 1.0) + 2.0) * std::fabs(t);
        wd += (3.0 * (k + 1.0) + 3.0) * std::fabs(u);
        if (t == 0.0 && u == 0.0) {  // terminating polynomial
            converged = true;
            break;
        }
        double rho_t = std::fabs((a + k + 1.0) * z / ((b + k + 1.0) * (k + 2.0)));
        double rho_u = std::fabs((a + k + 2.0) * z / ((b + k + 2.0) * (k + 2.0)));
        if (rho_t < 0.9 && rho_u < 0.9 &&
            std::fabs(t) < 1e-3 * kEps * wf + 1e-300 &&
            std::fabs(u) < 1e-3 * kEps * wd + 1e-300) {
            converged = true;
            // geometric tail bound
            wf += std::fabs(t) * rho_t / (1.0 - rho_t) / kEps;
            wd += std::fabs(u) * rho_u / (1.0 - rho_u) / kEps;
            break;
        }
    }
    out.f = sf;
    out.df = sd;
    out.terms = k + 1;
    if (!converged || !std::isfinite(sf) || !std::isfinite(sd)) {
        out.err_f = std::numeric_limits<double>::infinity();
        out.err_df = std::numeric_limits<double>::infinity();
    } else {
        out.err_f = kEps * wf;
        out.err_df = kEps * wd;
    }
    return out;
}

KummerValue kummer_m(double a, double b, double z) {
    KummerSeries s = kummer_m_series(a, b, z);
    bool bad_f = s.err_f > 1e-7 * std::fabs(s.f) && s.err_f > 1e-12;
    bool bad_d = s.err_df > 1e-7 * std::fabs(s.df) && s.err_df > 1e-12;
    if (bad_f || bad_d)
        throw precision_error("kummer_m: series error estimate exceeds tolerance");
    return {s.f, s.df};
}

namespace {

void check_half_integer_b(double b) {
    double two_b = 2.0 * b;
    double r = std::nearbyint(two_b);
    if (std::fabs(two_b - r) > 1e-9 || std::fabs(std::fmod(r, 2.0)) != 1.0)
        bad_arg("tricomi_u: b must be a half-integer");
}

// Value-only connection formula; used for the derivative recursion.
double tricomi_value(double a, double b, double z, double* err) {
    KummerSeries m1 = kummer_m_series(a, b, z);
    KummerSeries m2 = kummer_m_series(a + 1.0 - b, 2.0 - b, z);
    double c1 = gamma_real(1.0 - b) * reciprocal_gamma(a + 1.0 - b);
    double c2 = gamma_real(b - 1.0) * reciprocal_gamma(a);
    double zp = std::pow(z, 1.0 - b);
    double t1 = c1 * m1.f;
    double t2 = c2 * zp * m2.f;
    if (err) {
        *err = 4.0 * kEps * (std::fabs(t1) + std::fabs(t2)) +
               std::fabs(c1) * m1.err_f + std::fabs(c2) * zp * m2.err_f;
    }
    return t1 + t2;
}

} // namespace

TricomiParts tricomi_u_parts(double a, double b, double z) {
    require_finite(a, "tricomi_u: a");
    require_finite(z, "tricomi_u: z");
    if (z <= 0.0) bad_arg("tricomi_u: z must be positive");
    check_half_integer_b(b);

    TricomiParts out;
    out.f = tricomi_value(a, b, z, &out.err_f);
    double derr = 0.0;
    if (a == 0.0) {
        out.df = 0.0;  // U(0,b,z) = 1
    } else {
        out.df = -a * tricomi_value(a + 1.0, b + 1.0, z, &derr);
    }
    out.err_df = std::fabs(a) * derr;
    return out;
}

KummerValue tricomi_u(double a, double b, double z) {
    TricomiParts p = tricomi_u_parts(a, b, z);
    bool bad_f = p.err_f > 1e-6 * std::fabs(p.f) && p.err_f > 1e-12;
    bool bad_d = p.err_df > 1e-6 * std::fabs(p.df) && p.err_df > 1e-12;
    if (bad_f || bad_d || !std::isfinite(p.f) || !std::isfinite(p.df))
        throw precision_error("tricomi_u: cancellation between connection terms");
    return {p.f, p.df};
}

} // namespace dshell::specfun
