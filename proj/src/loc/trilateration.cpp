#include "iwsim/loc/trilateration.hpp"

#include <cmath>
#include <limits>
#include <set>
#include <string>

namespace iwsim::loc {

namespace {

struct Linearization {
  Eigen::MatrixXd J;
  Eigen::VectorXd r;
};

Linearization linearize(const std::vector<RangeMeasurement>& ms, const Vec3& p) {
  const auto n = static_cast<Eigen::Index>(ms.size());
  Linearization lin{Eigen::MatrixXd::Zero(n, 3), Eigen::VectorXd::Zero(n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vec3 diff = p - ms[static_cast<std::size_t>(i)].anchor.position;
    const double dist = diff.norm();
    lin.r[i] = dist - ms[static_cast<std::size_t>(i)].distance;
    if (dist > 0.0) lin.J.row(i) = (diff / dist).transpose();
  }
  return lin;
}

double cost(const std::vector<RangeMeasurement>& ms, const Vec3& p) {
  double c = 0.0;
  for (const RangeMeasurement& m : ms) {
    const double r = (p - m.anchor.position).norm() - m.distance;
    c += r * r;
  }
  return c;
}

PositionEstimate refine(const std::vector<RangeMeasurement>& measurements, Vec3 p,
                        const SolverOptions& options) {
  PositionEstimate est;
  double c = cost(measurements, p);
  double lambda = options.lambda0;
  double nu = 2.0;
  bool small_step = false;
  int it = 0;
  // Damping follows the gain ratio (actual over predicted cost reduction).
  for (; it < options.max_iterations; ++it) {
    const Linearization lin = linearize(measurements, p);
    const Eigen::Matrix3d JtJ = lin.J.transpose() * lin.J;
    const Vec3 g = lin.J.transpose() * lin.r;
    const Vec3 step = (JtJ + lambda * Eigen::Matrix3d::Identity()).ldlt().solve(-g);
    if (step.norm() < options.step_tol) {
      small_step = true;
      ++it;
      break;
    }
    const double c_new = cost(measurements, p + step);
    const double predicted = -(2.0 * g.dot(step) + step.dot(JtJ * step));
    const double rho = predicted > 0.0 ? (c - c_new) / predicted : -1.0;
    if (rho > 0.0) {
      p += step;
      c = c_new;
      lambda *= std::max(1.0 / 3.0, 1.0 - std::pow(2.0 * rho - 1.0, 3));
      nu = 2.0;
    } else {
      lambda *= nu;
      nu *= 2.0;
      if (!std::isfinite(lambda) || lambda > 1e16) {
        small_step = true;  // no descent left at this precision
        ++it;
        break;
      }
    }
  }
  const Linearization fin = linearize(measurements, p);
  const double grad = (fin.J.transpose() * fin.r).norm();
  est.position = p;
  est.iterations = it;
  est.residual_rms = std::sqrt(c / static_cast<double>(measurements.size()));
  est.converged = small_step && grad <= options.gradient_tol;
  return est;
}

}  // namespace

double geometry_condition(const std::vector<RangeMeasurement>& measurements) {
  const auto n = static_cast<Eigen::Index>(measurements.size());
  if (n == 0) return std::numeric_limits<double>::infinity();
  Eigen::MatrixXd A(n, 3);
  for (Eigen::Index i = 0; i < n; ++i) {
    A.row(i) = measurements[static_cast<std::size_t>(i)].anchor.position.transpose();
  }
  const Eigen::RowVector3d centroid = A.colwise().mean();
  A.rowwise() -= centroid;
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
  const Eigen::VectorXd s = svd.singularValues();
  if (s.size() < 3 || s[2] <= 0.0) return std::numeric_limits<double>::infinity();
  return s[0] / s[2];
}

PositionEstimate trilaterate(const std::vector<RangeMeasurement>& measurements,
                             std::optional<Vec3> initial, const SolverOptions& options) {
  if (measurements.size() < 4) {
    throw std::invalid_argument("trilateration needs at least 4 measurements, got " +
                                std::to_string(measurements.size()));
  }
  std::set<int> ids;
  for (const RangeMeasurement& m : measurements) {
    if (!ids.insert(m.anchor.id).second) {
      throw std::invalid_argument("duplicate anchor id " + std::to_string(m.anchor.id));
    }
    if (!std::isfinite(m.distance)) {
      throw std::invalid_argument("distance to anchor " + std::to_string(m.anchor.id) +
                                  " is not finite");
    }
  }
  const double cond = geometry_condition(measurements);
  if (!(cond <= options.max_condition)) {
    throw DegenerateGeometry("degenerate geometry: anchors are coplanar, collinear or duplicated "
                             "(condition " + std::to_string(cond) + ")", cond);
  }

  if (initial) return refine(measurements, *initial, options);
  Vec3 centroid = Vec3::Zero();
  for (const RangeMeasurement& m : measurements) centroid += m.anchor.position;
  centroid /= static_cast<double>(measurements.size());
  PositionEstimate best = refine(measurements, centroid, options);
  // Second start from the linearized solution; the lower cost wins.
  const PositionEstimate alt = refine(measurements, linear_solution(measurements), options);
  if (alt.residual_rms < best.residual_rms) best = alt;
  return best;
}

Vec3 linear_solution(const std::vector<RangeMeasurement>& measurements) {
  // |p - a_i|^2 - |p - a_0|^2 = d_i^2 - d_0^2 is linear in p.
  const auto n = static_cast<Eigen::Index>(measurements.size());
  const Vec3 a0 = measurements[0].anchor.position;
  const double d0 = measurements[0].distance;
  Eigen::MatrixXd A(n - 1, 3);
  Eigen::VectorXd b(n - 1);
  for (Eigen::Index i = 1; i < n; ++i) {
    const RangeMeasurement& m = measurements[static_cast<std::size_t>(i)];
    A.row(i - 1) = 2.0 * (m.anchor.position - a0).transpose();
    b[i - 1] = d0 * d0 - m.distance * m.distance + m.anchor.position.squaredNorm() - a0.squaredNorm();
  }
  return A.colPivHouseholderQr().solve(b);
}

}  // namespace iwsim::loc
