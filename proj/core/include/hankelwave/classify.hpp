#pragma once

#include <cstdint>

#include "hankelwave/trainer.hpp"
#include "hankelwave/types.hpp"

namespace hankelwave {

// Precomputed ridge projection P = (A^T A + lambda I)^-1 A^T.
struct ProjectionOperator {
  Matrix P;            // n_cols x m
  double lambda = 0.0;
  std::uint64_t fingerprint = 0;  // of the dictionary it was built from
};

struct ClassificationResult {
  int label = 0;
  Vector residuals;     // per-class ||y - A delta_i(x)||
  Vector coefficients;  // x-hat over dictionary columns
  double margin = 0.0;  // runner-up residual minus winner residual
  bool converged = true;
};

// Computed once via an SPD (LLT) factorization and reused per observation.
// Throws ParameterError for lambda < 0, or lambda == 0 when A^T A has an
// estimated condition number >= 1e8.
ProjectionOperator crc_precompute(const LabeledDictionary& dict, double lambda);

// x = P*y; label = argmin_i ||y - A delta_i(x)|| (lowest id on exact tie).
// Throws ShapeError on dimension mismatch, StaleOperatorError when the
// operator's fingerprint does not match the dictionary.
ClassificationResult crc_classify(const ProjectionOperator& op,
                                  const LabeledDictionary& dict,
                                  const Vector& y);

struct SrcOptions {
  int max_iter = 500;
  double tol = 1e-6;
};

// l1 baseline: x minimizes 1/2||y - Ax||^2 + lambda*||x||_1 via iterative
// shrinkage-thresholding with backtracking line search; labeling identical
// to CRC. Non-convergence is reported via converged=false, never an error.
ClassificationResult src_classify(const LabeledDictionary& dict, const Vector& y,
                                  double lambda, const SrcOptions& opts = {});

}  // namespace hankelwave
