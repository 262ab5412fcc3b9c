#pragma once

// Pseudopotential spectrum of two particles in an isotropic harmonic trap.
//
// The trap eigenvalue relation for partial wave l,
//
//   A_l Gamma(-nu) / Gamma(-nu - l - 1/2) = 1 / a_l^{2l+1},
//   A_l = (pi/2) (-1)^l [(2l+1)!!]^2 / Gamma(l+3/2)^2,   E = 2 nu + l + 3/2,
//
// is solved in the pole-free form
//
//   W(nu) = A_l a^{2l+1} rg(-nu - l - 1/2) - rg(-nu),   rg = 1/Gamma (entire),
//
// either at fixed a^{2l+1} (levels_fixed_a) or self-consistently against the
// energy-dependent a_l^{2l+1}(E) of a step well (self_consistent_levels).
// For l = 0 the relation reduces to the Busch s-wave form
// 2 Gamma(-nu)/Gamma(-nu-1/2) = 1/a.

#include <span>
#include <vector>

#include "dshell/errors.hpp"
#include "dshell/exactref.hpp"
#include "dshell/freescatter.hpp"
#include "dshell/rootscan.hpp"

namespace dshell::trapsolver {

struct TrapLevel {
    int l = 0;
    double nu = 0.0;       // Kummer parameter, a = -nu
    double E = 0.0;        // 2 nu + l + 3/2
    int branch = 0;        // inter-pole interval of Gamma(-nu); -1, -2, ... below nu = 0
    double residual = 0.0; // |W(nu)| in normalized units
};

struct SelfConsistentLevel {
    TrapLevel level;
    double a_pow_at_E = 0.0;  // a_l^{2l+1} evaluated at the level energy
    double residual = 0.0;    // normalized |W_sc|, cross-checked in original form
    StepWell well;
    bool flagged = false;     // near-degenerate double zero (spurious-root guard)
};

struct PerturbativeShift {
    double dE;          // shell_term - well_term
    double shell_term;  // <r^2/2> over the finite-s delta-shell bound state
    double well_term;   // <r^2/2> over the free-well bound state
};

/// A_l of the eigenvalue relation (equals (-1)^l 2^(2l+1)).
double coupling_prefactor(int l);

/// Left side of the eigenvalue relation as the entire pair
/// (A_l rg(-nu-l-1/2), rg(-nu)); requires |nu| <= 50.
ProjectivePair eigenvalue_lhs(int l, double nu);

/// All trap levels in [E_lo, E_hi] at fixed a^{2l+1} (pass +-infinity for the
/// unitarity spectrum). Window must stay inside [-40, 40].
std::vector<TrapLevel> levels_fixed_a(int l, double a_pow, double E_lo, double E_hi,
                                      scan::Exec exec = scan::Exec::parallel);

/// Simultaneous solutions of the trap relation and a_l^{2l+1}(E) of the well,
/// both energy branches, E = 0 handled by one-sided limits.
std::vector<SelfConsistentLevel> self_consistent_levels(
    int l, const StepWell& well, double E_lo, double E_hi,
    scan::Exec exec = scan::Exec::parallel);

/// Piecewise trap wave function u(r) = r R(r) of a level, with shell radius
/// s: inside B M(-nu,b,r^2), outside C_l U(-nu,b,r^2) (times r^{l+1}
/// exp(-r^2/2)), continuous at s, normalized on the grid points >= s.
std::vector<WaveFunctionSample> pseudo_wavefunction(int l, const TrapLevel& level,
                                                    double s,
                                                    std::span<const double> r_grid);

/// E_delta = -1/(2 a^2); the delta-shell bound state for a > 0.
double delta_bound_energy(double a_signed);

/// Ratio of the Huang-Yang contact coupling to the corrected one, computed
/// from the two published prefactor expressions; equals (l+1)/(2l+1).
double prefactor_ratio(int l);

/// First-order trap shift difference between the finite-s delta-shell bound
/// state and the free-well bound state at E_b.
PerturbativeShift perturbative_shift(int l, const StepWell& well, double E_b, double s);

} // namespace dshell::trapsolver
