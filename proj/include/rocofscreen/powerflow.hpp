#pragma once

#include <complex>
#include <vector>

#include "rocofscreen/case_model.hpp"

namespace rocofscreen {

struct PowerFlowOptions {
    double tol = 1e-8;  // per-unit power
    int max_iter = 20;
};

struct PowerFlowSolution {
    std::vector<double> v_mag;  // per bus
    std::vector<double> v_ang;  // radians
    int iterations = 0;
    double max_mismatch = 0.0;  // per-unit power
    // Generator outputs at the solution, aligned with GridCase::generators.
    // Slack P and PV/slack Q are shared among the machines at each bus.
    std::vector<double> gen_p_mw;
    std::vector<double> gen_q_mvar;

    std::vector<std::complex<double>> voltages() const;
};

/// Newton-Raphson in polar form from a flat start. PV buses hold their v_mag
/// setpoint without reactive limits; a PV bus with no in-service generator is
/// solved as PQ. Throws NumericalError on divergence or a singular Jacobian.
PowerFlowSolution solve_powerflow(const GridCase& grid, const PowerFlowOptions& options = {});

/// Wraps the voltages already stored in the case after checking that they
/// satisfy the scheduled injections to within tol. Throws DataError otherwise.
PowerFlowSolution accept_solved_voltages(const GridCase& grid, double tol = 1e-4);

/// Copy of the case with the solved voltages and generator outputs written back.
GridCase apply_solution(GridCase grid, const PowerFlowSolution& solution);

/// Largest |P| / |Q| mismatch (per unit) of the stored case voltages against
/// the scheduled injections, using the same bus-type rules as the solver.
double injection_mismatch(const GridCase& grid, const std::vector<std::complex<double>>& voltages);

}  // namespace rocofscreen
