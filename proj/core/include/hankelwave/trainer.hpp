#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hankelwave/hankel.hpp"
#include "hankelwave/types.hpp"

namespace hankelwave {

// ---------------------------------------------------------------------------
// Ordered Subspace Clustering:  min 1/2||X - XZ||_F^2 + l1*||Z||_1
//                                  + l2*||Z R||_{1,2},  diag(Z) = 0
// ---------------------------------------------------------------------------

struct OscParams {
  double lambda1 = 0.1;
  double lambda2 = 1.0;
  double rho = 1.0;
  double tol = 1e-4;   // relative primal residual threshold
  int max_iter = 300;

  void validate() const;  // throws ParameterError
};

struct CoefficientMatrix {
  Matrix Z;
  bool converged = false;
  int iterations = 0;
  double residual_l1 = 0.0;      // ||Z - J|| / max(1, ||Z||)
  double residual_smooth = 0.0;  // ||ZR - S|| / max(1, ||ZR||)
  // Best-so-far envelope of the Eq. 9 objective, one entry per iteration.
  // The raw per-iteration objective of this splitting is not monotone; the
  // envelope is, and Z is the best iterate found.
  std::vector<double> objective_envelope;
};

// n x (n-1) lower-bidiagonal differencing matrix: -1 on the diagonal, +1 on
// the first subdiagonal, so (Z*R) column j = Z col j+1 - Z col j.
// Throws ParameterError for n < 2.
Matrix build_R(int n);

// Eq. 9 objective for a given Z.
double osc_objective(const Matrix& X, const Matrix& Z, const OscParams& p);

// ADMM-style splitting: auxiliary J (elementwise soft-threshold) and S
// (column block soft-threshold on Z*R), Z-update via a two-sided
// eigendecomposition solve, zero-diagonal projection every iterate.
// Throws DivergenceError on non-finite intermediates.
CoefficientMatrix osc_solve(const Matrix& X, const OscParams& params);

// W = |Z| + |Z^T| with zero diagonal.
Matrix build_affinity(const Matrix& Z);

// Normalized-cuts labeling: symmetric normalized Laplacian, bottom-k
// eigenvectors, row-normalize, k-means (10 seeded restarts, 100 iters,
// best inertia). Zero-degree nodes are attached to the nearest nonzero
// neighbor in (column) time. Throws ParameterError on bad k / all-zero W.
std::vector<int> spectral_cluster(const Matrix& W, int k,
                                  std::uint64_t seed = 0);

// Greedy farthest-point sampling: start at column 0, repeatedly add the
// column maximizing the minimum distance to the selected set.
std::vector<int> farthest_point_sampling(const Matrix& X, int m);

// ---------------------------------------------------------------------------
// Labeled dictionary
// ---------------------------------------------------------------------------

struct DictionaryBlock {
  int class_id = 0;
  int begin = 0;  // first column (inclusive)
  int end = 0;    // past-the-end column
};

struct LabeledDictionary {
  Matrix A;  // unit-norm columns, class-blocked
  std::vector<DictionaryBlock> blocks;
  std::vector<int> class_of;  // per-column class id
  std::vector<std::string> class_names;
  // Embedding metadata needed to reproduce the training-time transform.
  int w = 0;
  int c = 0;
  int stride = 1;
  std::vector<std::string> channel_names;
  Vector channel_scale;  // per-channel std used for standardization

  int num_classes() const { return static_cast<int>(class_names.size()); }
  // FNV-1a over A's bytes + block table; identifies the dictionary a
  // ProjectionOperator was built from.
  std::uint64_t fingerprint() const;

  void validate() const;  // throws ShapeError / TrainingError
};

// ---------------------------------------------------------------------------
// Distillation (Fig. 9 nested clustering; no manual pattern spotting)
// ---------------------------------------------------------------------------

struct TrainerConfig {
  int w = 20;
  int stride = 1;
  OscParams osc{0.1, 0.1, 1.0, 1e-4, 200};
  // Per-class farthest-point budgets; empty -> per_class for every class.
  int per_class = 30;
  std::vector<int> per_class_override;
  double crc_lambda = 0.5;
  // Self-consistency refinement: classify the training pools with the first
  // dictionary, drop disagreeing windows, rebuild once.
  bool refine = true;
  std::uint64_t cluster_seed = 0;
};

// Cluster-to-class recipes: cluster counts are fixed per corpus and class
// identity is read off which maneuver dominates each run, so no window is
// ever labeled by hand.
struct ClusterSchedule {
  enum class Kind {
    // runs = {cruise+normal run, cruise+sudden run}. Run 1: k=2, majority
    // duration -> cruise, minority -> normal. Run 2: k=2, minority ->
    // braking, re-clustered k=2: majority -> sudden, minority (the normal
    // shoulders) -> normal. Classes: 0 cruise, 1 normal, 2 sudden.
    kBrakingNested,
    // runs = 5 single-posture runs then 8 gesture runs (pair order
    // gesture_pairs()). Posture runs feed their class directly (k=1);
    // gesture runs: k=3, the cluster farthest from all posture centroids is
    // the gesture, the remaining clusters are boundary shoulders harvested
    // into their endpoint posture pools. Margin filters keep pools pure.
    kPostureGesture,
  };
  Kind kind = Kind::kBrakingNested;
  // Posture recipe margins (ignored by the braking recipe).
  double gesture_margin = 0.05;   // gesture window: own sim >= posture sim + gm
  double shoulder_margin = 0.08;  // harvested shoulder: posture sim >= gesture sim + dm
};

// Runs are raw feature matrices (channels x samples), unlabeled. Channel
// scales are computed over all runs. Throws TrainingError (empty class),
// AmbiguityError (mapping tie), InsufficientDataError.
LabeledDictionary distill_dictionary(const std::vector<Matrix>& runs,
                                     const ClusterSchedule& schedule,
                                     const TrainerConfig& config,
                                     const std::vector<std::string>& channel_names = {});

}  // namespace hankelwave
