#pragma once

// Exact reference spectra and wave functions for the step well plus
// isotropic harmonic trap, by two independent methods:
//
//   exact_levels_matching  analytic matching of Kummer solutions at r = d
//                          (inside parameter shifted by V0/2),
//   numerov_levels         brute-force Numerov shooting on a uniform grid.
//
// The two methods cross-validate each other and serve as the oracle for the
// pseudopotential solver.

#include <span>
#include <vector>

#include "dshell/errors.hpp"
#include "dshell/freescatter.hpp"
#include "dshell/rootscan.hpp"

namespace dshell {

/// Sample of the reduced radial wave function u(r) = r R(r).
struct WaveFunctionSample {
    double r;
    double u;
};

namespace exactref {

/// Uniform grid used by the Numerov oracle.
struct RadialGrid {
    double r_min;
    double r_max;
    int n_points;
    RadialGrid(double rmin, double rmax, int n);
    double h() const { return (r_max - r_min) / (n_points - 1); }
};

enum class Method { kummer_match, numerov };

struct EigenSolveReport {
    double E = 0.0;
    Method method = Method::kummer_match;
    double residual = 0.0;  // method's own mismatch metric at the root
    int nodes = 0;          // radial node count
};

/// Eigenvalues in [E_lo, E_hi] from the log-derivative match at r = d of the
/// inside M and outside U solutions. Requires E_lo >= -V0.
std::vector<EigenSolveReport> exact_levels_matching(
    int l, const StepWell& well, double E_lo, double E_hi,
    scan::Exec exec = scan::Exec::parallel);

/// Eigenvalues in [E_lo, E_hi] by Numerov integration with node-count
/// bracketing. Internally re-solved on a doubled grid; throws
/// convergence_error when the two resolutions disagree by more than 1e-6.
std::vector<EigenSolveReport> numerov_levels(int l, const StepWell& well,
                                             double E_lo, double E_hi,
                                             const RadialGrid& grid);

/// Normalized u(r) on r_grid for an eigenvalue E of exact_levels_matching.
std::vector<WaveFunctionSample> exact_wavefunction(int l, const StepWell& well,
                                                   double E,
                                                   std::span<const double> r_grid);

namespace detail {

/// Matched, normalized Numerov solution at an eigenvalue (for cross-checks).
std::vector<WaveFunctionSample> numerov_solution(int l, const StepWell& well,
                                                 double E, const RadialGrid& grid);

/// Normalized log-derivative mismatch at r = d of the Kummer matching method.
double matching_mismatch(int l, const StepWell& well, double E);

} // namespace detail
} // namespace exactref
} // namespace dshell
