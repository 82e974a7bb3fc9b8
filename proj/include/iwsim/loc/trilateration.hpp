#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "iwsim/loc/twr.hpp"

namespace iwsim::loc {

struct RangeMeasurement {
  Anchor anchor;
  double distance = 0.0;  // m
};

struct PositionEstimate {
  Vec3 position = Vec3::Zero();
  double residual_rms = 0.0;  // m
  int iterations = 0;
  bool converged = false;
};

/// Anchors coplanar, collinear or duplicated. `condition` is the ratio of
/// the largest to the smallest singular value of the centred anchor matrix.
class DegenerateGeometry : public std::runtime_error {
 public:
  DegenerateGeometry(const std::string& what, double condition)
      : std::runtime_error(what), condition(condition) {}
  double condition;
};

struct SolverOptions {
  int max_iterations = 100;
  double step_tol = 1e-9;      // m
  double gradient_tol = 1e-6;  // |J^T r|, m
  double lambda0 = 1e-3;
  double max_condition = 1e9;
};

/// Levenberg-damped Gauss-Newton on sum_i (|p - a_i| - d_i)^2. With an
/// `initial` guess, one run from there. Without, runs from the anchor
/// centroid and from linear_solution() and keeps the lower residual.
/// Converged means the last step was below step_tol and the gradient below
/// gradient_tol; otherwise the best iterate is returned with converged = false.
PositionEstimate trilaterate(const std::vector<RangeMeasurement>& measurements,
                             std::optional<Vec3> initial = std::nullopt,
                             const SolverOptions& options = {});

/// Closed-form least-squares point from the sphere differences against the
/// first anchor. Exact for consistent distances.
Vec3 linear_solution(const std::vector<RangeMeasurement>& measurements);

/// Condition number of the centred anchor matrix (infinite when singular).
double geometry_condition(const std::vector<RangeMeasurement>& measurements);

}  // namespace iwsim::loc
