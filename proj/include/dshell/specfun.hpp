#pragma once

// Real-valued special-function kernels. Everything else in the library is
// built on these.
//
// Conventions:
//   sph_bessel_jn      spherical Bessel/Neumann j_l, n_l with
//                      j_0 = sin(x)/x, n_0 = -cos(x)/x and Wronskian
//                      j_l n_l' - j_l' n_l = 1/x^2.
//   mod_sph_bessel_ik  modified spherical Bessel i_l, k_l with
//                      i_0 = sinh(x)/x and k_0 = exp(-x)/x (no pi/2 factor),
//                      Wronskian i_l k_l' - i_l' k_l = -1/x^2.
//   kummer_m           confluent hypergeometric M(a,b,z), Taylor series with
//                      compensated summation and a running error estimate.
//   tricomi_u          U(a,b,z) for half-integer b via the two-term Kummer
//                      connection formula; derivative U' = -a U(a+1,b+1,z).
//
// All functions are pure and reentrant. Invalid arguments throw
// dshell::domain_error; certified precision loss throws dshell::precision_error.

#include "dshell/errors.hpp"

namespace dshell::specfun {

struct BesselPair {
    double f;   // function value
    double df;  // derivative with respect to the argument
};

struct BesselJN {
    BesselPair j;
    BesselPair n;
};

struct BesselIK {
    BesselPair i;
    BesselPair k;
};

struct KummerValue {
    double f;   // M or U
    double df;  // d/dz
};

/// Raw series result with absolute error estimates. Never throws on
/// precision loss; callers that need a guarantee check the estimates.
struct KummerSeries {
    double f = 0.0;
    double df = 0.0;
    double err_f = 0.0;   // absolute
    double err_df = 0.0;  // absolute
    int terms = 0;
};

/// Raw connection-formula result for U(a,b,z), with error estimates.
struct TricomiParts {
    double f = 0.0;
    double df = 0.0;
    double err_f = 0.0;
    double err_df = 0.0;
};

/// n!! with (-1)!! = 0!! = 1. Exact for n <= 30.
double double_factorial(int n);

/// Gamma(x) by Lanczos approximation, reflection for x < 0.5.
/// Rejects non-positive integers and |x| > 171.6.
double gamma_real(double x);

/// 1/Gamma(x), entire: returns exactly 0 at the poles of Gamma.
double reciprocal_gamma(double x);

/// j_l(x), n_l(x) and derivatives, 0 <= l <= 10, 0 < x <= 1e3.
BesselJN sph_bessel_jn(int l, double x);

/// i_l(x), k_l(x) and derivatives, 0 <= l <= 10, 0 < x <= 1e2.
BesselIK mod_sph_bessel_ik(int l, double x);

/// M(a,b,z) series; returns value, z-derivative and error estimates.
KummerSeries kummer_m_series(double a, double b, double z);

/// M(a,b,z); throws precision_error when the running error estimate cannot
/// certify the value.
KummerValue kummer_m(double a, double b, double z);

/// U(a,b,z) connection-formula pieces with error estimates (no throw on
/// cancellation). b must be a positive half-integer, z > 0.
TricomiParts tricomi_u_parts(double a, double b, double z);

/// U(a,b,z); throws precision_error when cancellation between the two
/// connection terms exceeds 1e-6 estimated relative error.
KummerValue tricomi_u(double a, double b, double z);

} // namespace dshell::specfun
