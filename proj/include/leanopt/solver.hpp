#pragma once

#include <map>
#include <string>
#include <vector>

#include "leanopt/model.hpp"

namespace leanopt {

enum class SolveStatus { Optimal, Infeasible, Unbounded, GapLimit };

struct Solution {
    SolveStatus status = SolveStatus::Infeasible;
    double objective = 0.0;
    std::map<std::string, double> values;
    double gap = 0.0;
    // Dual objective reconstructed at simplex exit (LP only); equals the primal
    // objective within tolerance at optimality.
    double dual_objective = 0.0;
};

struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NodeLimitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct EnumerationLimitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SolverOptions {
    double feas_tol = 1e-6;
    double int_tol = 1e-6;
    double rel_gap = 1e-4;          // MILP termination gap
    double pivot_tol = 1e-12;       // below this a pivot is numerically unstable
    long node_limit = 1000000;
    long long enum_limit = 1000000; // brute-force enumeration cap
};

// Primal simplex with Bland's rule; integrality is ignored (relaxation).
Solution solve_lp(const LinearModel& model, const SolverOptions& opts = {});

// Best-first branch and bound, branching on the most fractional variable
// (ties broken by lowest variable index).
Solution solve_milp(const LinearModel& model, const SolverOptions& opts = {});

// Exact optimum over the integer box intersected with the constraints.
// Ranges are inclusive [lo, hi]; variables absent from `box` use their own
// finite integer bounds.
Solution brute_force(const LinearModel& model,
                     const std::map<std::string, std::pair<long, long>>& box = {},
                     const SolverOptions& opts = {});

// Max violation of bounds and constraints at the given point.
double constraint_violation(const LinearModel& model, const std::map<std::string, double>& values);

}  // namespace leanopt
