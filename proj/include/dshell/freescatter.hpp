#pragma once

// Free-space scattering on an attractive spherical step well: phase shifts,
// the fully energy-dependent l-wave scattering length, its analytic
// continuation to E < 0, bound states, depth calibration, and a finite-radius
// delta-shell consistency check.
//
// Units: hbar = mu = 1, lengths in the oscillator length z0, energies in
// hbar*omega. k = sqrt(2E) for E > 0, kappa = sqrt(-2E) for E < 0.

#include <vector>

#include "dshell/errors.hpp"
#include "dshell/rootscan.hpp"

namespace dshell {

/// V(r) = -depth for r < range, 0 outside.
struct StepWell {
    double depth;   // V0 > 0, in hbar*omega
    double range;   // d > 0, in z0
    StepWell(double V0, double d);
};

/// (num, den) representation of pole-prone ratios, normalized to
/// num^2 + den^2 = 1 with the sign produced by the generating formula.
struct ProjectivePair {
    double num = 0.0;
    double den = 1.0;
    static ProjectivePair normalized(double n, double d);
    double value() const;  // num/den; +-inf when den == 0
    bool is_infinite() const { return den == 0.0; }
};

struct ScatteringPoint {
    double E = 0.0;
    int l = 0;
    ProjectivePair tan_or_t;  // tan(delta_l) for E > 0, tanh[i delta_l(i kappa)] for E < 0
    ProjectivePair a_proj;    // projective a_l^{2l+1}
    double a_pow = 0.0;       // a_l^{2l+1} in z0^{2l+1}; +-inf at a resonance
    double a_signed = 0.0;    // signed odd root of a_pow, in z0
};

namespace freescatter {

/// tan(delta_l) as the pair (S, C): with beta the inside log-derivative,
/// S = k j_l'(kd) - beta j_l(kd), C = k n_l'(kd) - beta n_l(kd), both
/// multiplied through by j_l(q d) so a node of the inside function is
/// harmless. Requires E > 0.
ProjectivePair tan_delta(int l, const StepWell& well, double E);

/// tanh[i delta_l(i kappa)] for E < 0 as a real pair. The imaginary-argument
/// algebra is done analytically (see the derivation note in the source);
/// only real i_l/k_l arithmetic happens at run time.
ProjectivePair continuation_t(int l, const StepWell& well, double E);

/// Energy-dependent a_l^{2l+1}(E) for E != 0, both energy branches.
ScatteringPoint scattering_length_pow(int l, const StepWell& well, double E);

/// All bound-state energies in (E_lo, E_hi) subset of (-V0, 0), ascending.
std::vector<double> well_bound_states(int l, const StepWell& well, double E_lo,
                                      double E_hi, double scan_step = 1e-3,
                                      scan::Exec exec = scan::Exec::parallel);

/// Smallest V0 such that the least-bound l-wave state of well(V0, d) sits at
/// E_b, to |dE_b| <= 1e-8. Throws convergence_error when no V0 <= V0_max works.
double calibrate_depth(int l, double d, double E_b, double V0_max = 1e4);

/// Effective tan(delta) of the finite-radius delta-shell of strength a_pow,
/// built from exact continuity at r = s plus the derivative-jump condition of
/// the regularizing operator. Converges to -a_pow k^{2l+1} as s -> 0.
/// Requires k s < 0.05.
double shell_consistency(int l, double a_pow, double s, double k);

} // namespace freescatter
} // namespace dshell
