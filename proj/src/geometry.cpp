#include "compgrad/geometry.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "compgrad/numerics.hpp"

namespace compgrad {

UnitVector::UnitVector(Eigen::VectorXd v) : v_(std::move(v)) {
  if (v_.size() == 0) throw std::invalid_argument("UnitVector: empty vector");
  if (!v_.allFinite()) throw std::invalid_argument("UnitVector: non-finite entries");
  const double norm = v_.norm();
  if (norm < 1e-150) throw std::invalid_argument("UnitVector: zero vector");
  v_ /= norm;
  // One renormalization pass leaves at most ~1e-16 defect; guard anyway.
  if (std::abs(v_.norm() - 1.0) > 1e-12)
    throw std::invalid_argument("UnitVector: normalization failed");
}

OrthonormalFrame OrthonormalFrame::from_columns(Eigen::MatrixXd q) {
  if (q.rows() == 0 || q.rows() != q.cols())
    throw std::invalid_argument("OrthonormalFrame: matrix must be square and nonempty");
  if (!q.allFinite())
    throw std::invalid_argument("OrthonormalFrame: non-finite entries");
  const Eigen::MatrixXd gram = q.transpose() * q;
  const double defect =
      (gram - Eigen::MatrixXd::Identity(q.cols(), q.cols())).cwiseAbs().maxCoeff();
  if (defect > 1e-10)
    throw std::invalid_argument("OrthonormalFrame: columns not orthonormal (defect " +
                                std::to_string(defect) + ")");
  return OrthonormalFrame(std::move(q));
}

UnitVector sample_sphere(int n, Rng& rng) {
  if (n < 1) throw std::invalid_argument("sample_sphere: n must be >= 1");
  Eigen::VectorXd g(n);
  while (true) {
    for (int i = 0; i < n; ++i) g[i] = rng.gaussian();
    if (g.norm() > 1e-12) break;
  }
  return UnitVector(std::move(g));
}

OrthonormalFrame sample_haar_frame(int n, Rng& rng) {
  if (n < 1) throw std::invalid_argument("sample_haar_frame: n must be >= 1");
  Eigen::MatrixXd a(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) a(i, j) = rng.gaussian();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  Eigen::MatrixXd q = qr.householderQ();
  const Eigen::MatrixXd& r = qr.matrixQR();
  // Fixing the sign of R's diagonal makes the decomposition unique, which is
  // what turns "QR of a gaussian matrix" into the rotation-invariant law.
  for (int j = 0; j < n; ++j)
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  return OrthonormalFrame::from_columns(std::move(q));
}

OrthonormalFrame rotate_to_e1(const UnitVector& u) {
  const int n = u.dimension();
  const Eigen::VectorXd& v = u.vec();
  if (n == 1) {
    Eigen::MatrixXd q(1, 1);
    q(0, 0) = v[0] >= 0.0 ? 1.0 : -1.0;
    return OrthonormalFrame::from_columns(std::move(q));
  }
  // Reflect through w = u + sign(u1) e1; the shifted branch keeps ||w||
  // bounded away from zero for every u.
  const double sign = v[0] >= 0.0 ? 1.0 : -1.0;
  Eigen::VectorXd w = v;
  w[0] += sign;
  const double wsq = w.squaredNorm();
  Eigen::MatrixXd h =
      Eigen::MatrixXd::Identity(n, n) - (2.0 / wsq) * (w * w.transpose());
  // H maps e1 to -sign * u; flip the first column so column 0 equals u.
  if (sign > 0.0) h.col(0) = -h.col(0);
  return OrthonormalFrame::from_columns(std::move(h));
}

ConcentrationReport verify_concentration(int n, long long samples, Rng& rng) {
  if (n < 5)
    throw std::invalid_argument("verify_concentration: requires n >= 5");
  if (samples < 1)
    throw std::invalid_argument("verify_concentration: samples must be >= 1");
  const double root_n = std::sqrt(static_cast<double>(n));
  const double tau_small = 24.0 / (25.0 * root_n);
  const double tau_tiny = 18.0 / (25.0 * root_n);
  const double tau_large = 1.0 / (5.0 * root_n);
  long long c_small = 0, c_tiny = 0, c_large = 0;
  Eigen::VectorXd g(n);
  for (long long s = 0; s < samples; ++s) {
    double norm_sq = 0.0;
    for (int i = 0; i < n; ++i) {
      g[i] = rng.gaussian();
      norm_sq += g[i] * g[i];
    }
    // <y, e1> for y uniform on the sphere; any fixed direction gives the
    // same law by rotation invariance.
    const double y1 = std::abs(g[0]) / std::sqrt(norm_sq);
    if (y1 <= tau_small) ++c_small;
    if (y1 <= tau_tiny) ++c_tiny;
    if (y1 >= tau_large) ++c_large;
  }
  ConcentrationReport rep;
  rep.n = n;
  rep.samples = samples;
  const double m = static_cast<double>(samples);
  rep.fraction_small = c_small / m;
  rep.fraction_tiny = c_tiny / m;
  rep.fraction_large = c_large / m;
  rep.ci_small = wilson_interval(c_small, samples);
  rep.ci_tiny = wilson_interval(c_tiny, samples);
  rep.ci_large = wilson_interval(c_large, samples);
  return rep;
}

namespace detail {

bool conditioned_direction(int n, double floor, double truncation, Rng& rng,
                           Eigen::VectorXd& out, double& weight) {
  out.resize(n);
  for (int i = 0; i < n; ++i) {
    double g;
    do {
      g = rng.gaussian();
    } while (g < -truncation);
    out[i] = g;
  }
  out /= out.norm();
  double most_negative = 0.0;
  for (int i = 0; i < n; ++i) most_negative = std::max(most_negative, -out[i]);
  if (-most_negative < floor) return false;
  if (most_negative <= 0.0) {
    weight = 1.0;
    return true;
  }
  // The truncated proposal under-represents directions whose most negative
  // coordinate could only arise from a small gaussian radius; the direction
  // density picked up a factor P(chi_n <= truncation / most_negative).
  const double cdf = chi_cdf(n, truncation / most_negative);
  weight = cdf > 0.0 ? 1.0 / cdf : 1.0;
  return true;
}

}  // namespace detail

OverlapReport verify_basis_overlap(int n, long long target_accepted, Rng& rng,
                                   long long max_proposals) {
  if (n < 500)
    throw std::invalid_argument(
        "verify_basis_overlap: stated for n >= 500; smaller n has no claimed bound");
  if (target_accepted < 1)
    throw std::invalid_argument("verify_basis_overlap: target_accepted must be >= 1");
  if (max_proposals <= 0) max_proposals = 4096 * target_accepted;

  OverlapReport rep;
  rep.n = n;
  const double root_n = std::sqrt(static_cast<double>(n));
  const double floor = -1.0 / static_cast<double>(n);
  const double truncation = 1.25 / root_n;

  // Sanity reference: unconditioned mean of (1/sqrt n) sum |x_i|.
  {
    const long long sanity = 2000;
    double acc = 0.0;
    Eigen::VectorXd g(n);
    for (long long s = 0; s < sanity; ++s) {
      for (int i = 0; i < n; ++i) g[i] = rng.gaussian();
      acc += g.cwiseAbs().sum() / (g.norm() * root_n);
    }
    rep.unsigned_mean = acc / static_cast<double>(sanity);
  }

  Eigen::VectorXd x;
  double weight = 1.0;
  std::vector<double> ws, vals;
  ws.reserve(static_cast<std::size_t>(target_accepted));
  vals.reserve(static_cast<std::size_t>(target_accepted));
  while (rep.accepted < target_accepted && rep.proposed < max_proposals) {
    ++rep.proposed;
    if (!detail::conditioned_direction(n, floor, truncation, rng, x, weight))
      continue;
    ++rep.accepted;
    ws.push_back(weight);
    vals.push_back(x.sum() / root_n);
    rep.max_weight = std::max(rep.max_weight, weight);
  }
  rep.acceptance_rate =
      rep.proposed > 0 ? static_cast<double>(rep.accepted) / rep.proposed : 0.0;
  rep.reliable = rep.accepted >= target_accepted && rep.accepted >= 100;
  if (rep.accepted == 0) return rep;

  double wsum = 0.0, wvsum = 0.0;
  for (std::size_t i = 0; i < ws.size(); ++i) {
    wsum += ws[i];
    wvsum += ws[i] * vals[i];
  }
  rep.conditional_mean = wvsum / wsum;
  double var = 0.0;
  for (std::size_t i = 0; i < ws.size(); ++i) {
    const double d = vals[i] - rep.conditional_mean;
    var += ws[i] * ws[i] * d * d;
  }
  rep.standard_error = std::sqrt(var) / wsum;
  return rep;
}

}  // namespace compgrad
