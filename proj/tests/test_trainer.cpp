#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <map>

#include "hankelwave/errors.hpp"
#include "hankelwave/rng.hpp"
#include "hankelwave/trainer.hpp"

using namespace hankelwave;

namespace {

// Sequential union of subspaces: `segments` blocks of `per` columns, each
// drawn from a random `dim`-dimensional subspace of R^ambient plus noise.
Matrix subspace_union(int segments, int per, int ambient, int dim, double sigma,
                      std::uint64_t seed, std::vector<int>* truth = nullptr) {
  Rng rng(seed);
  Matrix X(ambient, segments * per);
  for (int s = 0; s < segments; ++s) {
    Matrix B(ambient, dim);
    for (int i = 0; i < ambient; ++i)
      for (int j = 0; j < dim; ++j) B(i, j) = rng.gaussian();
    for (int k = 0; k < per; ++k) {
      Vector coef(dim);
      for (int j = 0; j < dim; ++j) coef(j) = rng.gaussian();
      Vector col = B * coef;
      col /= col.norm();
      for (int i = 0; i < ambient; ++i) col(i) += sigma * rng.gaussian();
      X.col(s * per + k) = col;
      if (truth) truth->push_back(s);
    }
  }
  return X;
}

// Clustering accuracy under the best label permutation (k <= 3 here, so
// brute force is fine).
double best_accuracy(const std::vector<int>& pred, const std::vector<int>& truth,
                     int k) {
  std::vector<int> perm(k);
  for (int i = 0; i < k; ++i) perm[i] = i;
  double best = 0.0;
  do {
    int ok = 0;
    for (std::size_t i = 0; i < pred.size(); ++i)
      if (perm[pred[i]] == truth[i]) ++ok;
    best = std::max(best, double(ok) / double(pred.size()));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace

TEST_CASE("build_R: lower-bidiagonal differencing structure") {
  const Matrix R = build_R(4);
  CHECK(R.rows() == 4);
  CHECK(R.cols() == 3);
  Matrix expect(4, 3);
  expect << -1, 0, 0, 1, -1, 0, 0, 1, -1, 0, 0, 1;
  CHECK((R - expect).norm() == doctest::Approx(0.0));
  // (Z*R) column j = Z col j+1 - Z col j.
  Matrix Z(2, 4);
  Z << 1, 2, 4, 8, 0, 1, 3, 6;
  const Matrix D = Z * R;
  CHECK(D(0, 0) == doctest::Approx(1.0));
  CHECK(D(0, 2) == doctest::Approx(4.0));
  CHECK(D(1, 1) == doctest::Approx(2.0));
  CHECK_THROWS_AS(build_R(1), ParameterError);
}

TEST_CASE("osc_objective: trivial values") {
  // Z = 0 leaves only the data term.
  Matrix X(2, 3);
  X << 1, 2, 3, 4, 5, 6;
  OscParams p{0.5, 0.25, 1.0, 1e-4, 10};
  CHECK(osc_objective(X, Matrix::Zero(3, 3), p) ==
        doctest::Approx(0.5 * X.squaredNorm()).epsilon(1e-14));
  // Hand-worked non-zero case: Z with a single off-diagonal entry.
  Matrix Z = Matrix::Zero(3, 3);
  Z(0, 1) = 2.0;
  // data: 0.5||X - XZ||^2; l1: 0.5*2; smooth: 0.25*sum_j ||(ZR)_j||_2.
  const double data = 0.5 * (X - X * Z).squaredNorm();
  // ZR columns: col0 = Zc1-Zc0 = (2,0,0), col1 = Zc2-Zc1 = (-2,0,0).
  const double expect = data + 0.5 * 2.0 + 0.25 * (2.0 + 2.0);
  CHECK(osc_objective(X, Z, p) == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("osc_solve: recovers two sequential subspaces") {
  std::vector<int> truth;
  const Matrix X = subspace_union(2, 50, 40, 4, 0.01, 1, &truth);
  OscParams p{0.1, 0.1, 1.0, 1e-4, 200};
  const auto cm = osc_solve(X, p);
  CHECK(cm.Z.rows() == 100);
  CHECK(cm.Z.diagonal().cwiseAbs().maxCoeff() == doctest::Approx(0.0));
  // Best-so-far envelope is monotone non-increasing by construction.
  for (std::size_t i = 1; i < cm.objective_envelope.size(); ++i)
    CHECK(cm.objective_envelope[i] <= cm.objective_envelope[i - 1] + 1e-9);
  const auto lab = spectral_cluster(build_affinity(cm.Z), 2);
  CHECK(best_accuracy(lab, truth, 2) >= 0.95);
}

TEST_CASE("osc_solve: parameter validation") {
  Matrix X = Matrix::Random(4, 6);
  CHECK_THROWS_AS(osc_solve(X, OscParams{-1.0, 0.1, 1.0, 1e-4, 10}),
                  ParameterError);
  CHECK_THROWS_AS(osc_solve(X, OscParams{0.1, 0.1, 0.0, 1e-4, 10}),
                  ParameterError);
  CHECK_THROWS_AS(osc_solve(X, OscParams{0.1, 0.1, 1.0, 1e-4, 0}),
                  ParameterError);
}

TEST_CASE("build_affinity: symmetric, zero diagonal") {
  Matrix Z(3, 3);
  Z << 0, -2, 1, 3, 0, 0, 0, 1, 0;
  const Matrix W = build_affinity(Z);
  CHECK(W(0, 1) == doctest::Approx(5.0));
  CHECK(W(1, 0) == doctest::Approx(5.0));
  CHECK(W(0, 2) == doctest::Approx(1.0));
  CHECK(W.diagonal().cwiseAbs().maxCoeff() == doctest::Approx(0.0));
}

TEST_CASE("spectral_cluster: exact on a block-diagonal affinity") {
  const int n = 12;
  Matrix W = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && (i < 6) == (j < 6)) W(i, j) = 1.0;
  const auto lab = spectral_cluster(W, 2);
  for (int i = 1; i < 6; ++i) CHECK(lab[i] == lab[0]);
  for (int i = 7; i < n; ++i) CHECK(lab[i] == lab[6]);
  CHECK(lab[0] != lab[6]);
}

TEST_CASE("spectral_cluster: validation") {
  Matrix W = Matrix::Zero(4, 4);
  CHECK_THROWS_AS(spectral_cluster(W, 2), ParameterError);  // all-zero
  W(0, 1) = W(1, 0) = 1.0;
  W(2, 3) = W(3, 2) = 1.0;
  CHECK_THROWS_AS(spectral_cluster(W, 0), ParameterError);
  CHECK_THROWS_AS(spectral_cluster(W, 5), ParameterError);
}

TEST_CASE("farthest_point_sampling: greedy max-min order") {
  // 1-D points 0, 1, 9, 10: start at col 0, then 10 (farthest). Points 1
  // and 9 then tie at min-distance 1; the tie breaks to the lowest index.
  Matrix X(1, 4);
  X << 0, 1, 9, 10;
  const auto sel = farthest_point_sampling(X, 3);
  CHECK(sel[0] == 0);
  CHECK(sel[1] == 3);
  CHECK(sel[2] == 1);
  CHECK(farthest_point_sampling(X, 10).size() == 4);  // clamped to cols
}

TEST_CASE("LabeledDictionary: fingerprint tracks content") {
  LabeledDictionary d;
  d.A = Matrix::Identity(4, 4);
  d.blocks = {{0, 0, 2}, {1, 2, 4}};
  d.class_of = {0, 0, 1, 1};
  d.class_names = {"a", "b"};
  d.w = 2;
  d.c = 2;
  d.channel_scale = Vector::Ones(2);
  const auto fp1 = d.fingerprint();
  d.A(0, 0) += 1e-9;
  CHECK(d.fingerprint() != fp1);
}

TEST_CASE("distill_dictionary: run-count validation") {
  TrainerConfig cfg;
  ClusterSchedule sched;
  sched.kind = ClusterSchedule::Kind::kBrakingNested;
  CHECK_THROWS_AS(distill_dictionary({}, sched, cfg), TrainingError);
  CHECK_THROWS_AS(distill_dictionary({Matrix::Random(2, 100)}, sched, cfg),
                  TrainingError);
  sched.kind = ClusterSchedule::Kind::kPostureGesture;
  CHECK_THROWS_AS(distill_dictionary({Matrix::Random(5, 100)}, sched, cfg),
                  TrainingError);
}
