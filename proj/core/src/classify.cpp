#include "hankelwave/classify.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "hankelwave/errors.hpp"

namespace hankelwave {

namespace {

// Residuals, label, and margin from a coefficient vector (Eq. 6 rule).
void fill_result(const LabeledDictionary& dict, const Vector& y,
                 ClassificationResult& res) {
  const int k = dict.num_classes();
  res.residuals.resize(k);
  res.residuals.setConstant(std::numeric_limits<double>::infinity());
  Vector recon(y.size());
  for (int cls = 0; cls < k; ++cls) {
    recon.setZero();
    // Only the class's own blocks contribute: delta_i(x) zeroes the rest.
    for (const auto& b : dict.blocks)
      if (b.class_id == cls)
        recon.noalias() += dict.A.middleCols(b.begin, b.end - b.begin) *
                           res.coefficients.segment(b.begin, b.end - b.begin);
    res.residuals(cls) = (y - recon).norm();
  }
  res.label = 0;
  double best = res.residuals(0);
  for (int cls = 1; cls < k; ++cls)
    if (res.residuals(cls) < best) {  // strict: lowest id wins ties
      best = res.residuals(cls);
      res.label = cls;
    }
  double runner = std::numeric_limits<double>::infinity();
  for (int cls = 0; cls < k; ++cls)
    if (cls != res.label) runner = std::min(runner, res.residuals(cls));
  res.margin = k > 1 ? runner - best : 0.0;
}

}  // namespace

ProjectionOperator crc_precompute(const LabeledDictionary& dict, double lambda) {
  dict.validate();
  if (lambda < 0.0) throw ParameterError("crc_precompute: lambda must be >= 0");
  const Matrix& A = dict.A;
  Matrix gram = A.transpose() * A;
  if (lambda == 0.0) {
    // Permitted only for a provably well-conditioned Gram matrix.
    Eigen::SelfAdjointEigenSolver<Matrix> es(gram);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    if (lo <= 0.0 || hi / lo >= 1e8)
      throw ParameterError(
          "crc_precompute: lambda = 0 requires cond(A^T A) < 1e8");
  }
  gram.diagonal().array() += lambda;
  Eigen::LLT<Matrix> llt(gram);
  if (llt.info() != Eigen::Success)
    throw ParameterError("crc_precompute: A^T A + lambda I not positive definite");
  ProjectionOperator op;
  op.P = llt.solve(A.transpose());
  op.lambda = lambda;
  op.fingerprint = dict.fingerprint();
  return op;
}

ClassificationResult crc_classify(const ProjectionOperator& op,
                                  const LabeledDictionary& dict,
                                  const Vector& y) {
  if (op.fingerprint != dict.fingerprint())
    throw StaleOperatorError(
        "crc_classify: projection operator was built from a different dictionary");
  if (y.size() != dict.A.rows())
    throw ShapeError("crc_classify: window length does not match dictionary");
  ClassificationResult res;
  res.coefficients = op.P * y;
  fill_result(dict, y, res);
  return res;
}

ClassificationResult src_classify(const LabeledDictionary& dict, const Vector& y,
                                  double lambda, const SrcOptions& opts) {
  dict.validate();
  if (lambda < 0.0) throw ParameterError("src_classify: lambda must be >= 0");
  if (y.size() != dict.A.rows())
    throw ShapeError("src_classify: window length does not match dictionary");

  // ISTA with backtracking line search on 1/2||y - Ax||^2 + lambda ||x||_1.
  const Matrix& A = dict.A;
  Vector x = Vector::Zero(A.cols());
  double step = 1.0;
  auto f = [&](const Vector& v) { return 0.5 * (y - A * v).squaredNorm(); };
  double fx = f(x);
  Vector grad = A.transpose() * (A * x - y);
  ClassificationResult res;
  res.converged = false;
  for (int it = 0; it < opts.max_iter; ++it) {
    Vector xn;
    for (;;) {
      Vector cand = x - step * grad;
      xn = cand.unaryExpr([t = step * lambda](double v) {
        const double a = std::abs(v) - t;
        return a > 0.0 ? (v > 0.0 ? a : -a) : 0.0;
      });
      const Vector diff = xn - x;
      const double fn = f(xn);
      // Sufficient-decrease (majorization) condition.
      if (fn <= fx + grad.dot(diff) + diff.squaredNorm() / (2.0 * step) + 1e-15)
        break;
      step *= 0.5;
      if (step < 1e-12) break;
    }
    const double move = (xn - x).norm();
    x = xn;
    fx = f(x);
    grad = A.transpose() * (A * x - y);
    if (move <= opts.tol * std::max(1.0, x.norm())) {
      res.converged = true;
      break;
    }
  }
  res.coefficients = x;
  fill_result(dict, y, res);
  return res;
}

}  // namespace hankelwave
