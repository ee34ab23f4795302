#include "hankelwave/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <functional>
#include <iostream>
#include <limits>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "hankelwave/errors.hpp"
#include "hankelwave/ingest.hpp"
#include "hankelwave/rng.hpp"

namespace hankelwave {

void OscParams::validate() const {
  if (lambda1 < 0.0) throw ParameterError("OscParams: lambda1 must be >= 0");
  if (!(lambda2 > 0.0)) throw ParameterError("OscParams: lambda2 must be > 0");
  if (!(rho > 0.0)) throw ParameterError("OscParams: rho must be > 0");
  if (!(tol > 0.0)) throw ParameterError("OscParams: tol must be > 0");
  if (max_iter < 1) throw ParameterError("OscParams: max_iter must be >= 1");
}

Matrix build_R(int n) {
  if (n < 2) throw ParameterError("build_R: n must be >= 2");
  Matrix R = Matrix::Zero(n, n - 1);
  for (int j = 0; j < n - 1; ++j) {
    R(j, j) = -1.0;
    R(j + 1, j) = 1.0;
  }
  return R;
}

namespace {

// (Z * R): column j = Z col j+1 - Z col j.
Matrix right_diff(const Matrix& Z) {
  const long n = Z.cols();
  Matrix out(Z.rows(), n - 1);
  for (long j = 0; j + 1 < n; ++j) out.col(j) = Z.col(j + 1) - Z.col(j);
  return out;
}

// (M * R^T) for M with n-1 columns: spreads each difference back.
Matrix right_diff_adjoint(const Matrix& M) {
  const long n = M.cols() + 1;
  Matrix out(M.rows(), n);
  out.col(0) = -M.col(0);
  for (long j = 1; j + 1 < n; ++j) out.col(j) = M.col(j - 1) - M.col(j);
  out.col(n - 1) = M.col(n - 2);
  return out;
}

}  // namespace

double osc_objective(const Matrix& X, const Matrix& Z, const OscParams& p) {
  const Matrix E = X - X * Z;
  const Matrix ZR = right_diff(Z);
  return 0.5 * E.squaredNorm() + p.lambda1 * Z.cwiseAbs().sum() +
         p.lambda2 * ZR.colwise().norm().sum();
}

CoefficientMatrix osc_solve(const Matrix& X, const OscParams& params) {
  params.validate();
  const long N = X.cols();
  if (N < 3) throw InsufficientDataError("osc_solve: need at least 3 columns");

  const Matrix G = X.transpose() * X;
  // Eigendecomposition of R R^T (tridiagonal second-difference matrix).
  Matrix RRt = Matrix::Zero(N, N);
  for (long j = 0; j + 1 < N; ++j) {
    RRt(j, j) += 1.0;
    RRt(j + 1, j + 1) += 1.0;
    RRt(j, j + 1) -= 1.0;
    RRt(j + 1, j) -= 1.0;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> esR(RRt);
  Eigen::SelfAdjointEigenSolver<Matrix> esG(G);
  const Matrix& Q = esR.eigenvectors();
  const Vector& lamR = esR.eigenvalues();
  const Matrix& V = esG.eigenvectors();
  const Vector& sig = esG.eigenvalues();

  const double rho = params.rho;
  Matrix Z = Matrix::Zero(N, N), J = Matrix::Zero(N, N);
  Matrix S = Matrix::Zero(N, N - 1);
  Matrix U1 = Matrix::Zero(N, N), U2 = Matrix::Zero(N, N - 1);

  CoefficientMatrix out;
  Matrix best = Z;
  double best_obj = std::numeric_limits<double>::infinity();
  int it = 0;
  for (; it < params.max_iter; ++it) {
    Matrix RHS = G + rho * (J - U1) + rho * right_diff_adjoint(S - U2);
    Matrix B = V.transpose() * RHS * Q;
    for (long i = 0; i < N; ++i)
      for (long j = 0; j < N; ++j)
        B(i, j) /= sig(i) + rho + rho * lamR(j);
    Z = V * B * Q.transpose();
    Z.diagonal().setZero();

    // l1 prox.
    const double thr1 = params.lambda1 / rho;
    J = (Z + U1).unaryExpr([thr1](double v) {
      const double a = std::abs(v) - thr1;
      return a > 0.0 ? (v > 0.0 ? a : -a) : 0.0;
    });
    J.diagonal().setZero();

    // Column block soft threshold on Z R.
    const Matrix ZR = right_diff(Z);
    Matrix T2 = ZR + U2;
    const double thr2 = params.lambda2 / rho;
    for (long j = 0; j < T2.cols(); ++j) {
      const double nrm = T2.col(j).norm();
      const double scale =
          nrm > 0.0 ? std::max(0.0, 1.0 - thr2 / nrm) : 0.0;
      T2.col(j) *= scale;
    }
    S = T2;

    U1 += Z - J;
    U2 += ZR - S;

    if (!Z.allFinite())
      throw DivergenceError("osc_solve: non-finite iterate at iteration " +
                            std::to_string(it));

    const double obj = osc_objective(X, Z, params);
    if (obj < best_obj) {
      best_obj = obj;
      best = Z;
    }
    out.objective_envelope.push_back(best_obj);

    out.residual_l1 = (Z - J).norm() / std::max(1.0, Z.norm());
    out.residual_smooth = (ZR - S).norm() / std::max(1.0, ZR.norm());
    if (out.residual_l1 < params.tol && out.residual_smooth < params.tol) {
      out.converged = true;
      ++it;
      break;
    }
  }
  out.iterations = it;
  out.Z = best;
  return out;
}

Matrix build_affinity(const Matrix& Z) {
  if (!Z.allFinite()) throw DataError("build_affinity: non-finite Z");
  Matrix W = Z.cwiseAbs() + Z.transpose().cwiseAbs();
  W.diagonal().setZero();
  return W;
}

namespace {

int count_components(const Matrix& W) {
  const long n = W.rows();
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  for (long i = 0; i < n; ++i)
    for (long j = i + 1; j < n; ++j)
      if (W(i, j) != 0.0) parent[find(static_cast<int>(i))] = find(static_cast<int>(j));
  int comps = 0;
  for (long i = 0; i < n; ++i)
    if (find(static_cast<int>(i)) == i) ++comps;
  return comps;
}

}  // namespace

std::vector<int> spectral_cluster(const Matrix& W, int k, std::uint64_t seed) {
  const long n = W.rows();
  if (W.cols() != n) throw ShapeError("spectral_cluster: W must be square");
  if (k < 1 || k > n) throw ParameterError("spectral_cluster: bad cluster count");
  if (W.cwiseAbs().maxCoeff() == 0.0)
    throw ParameterError("spectral_cluster: all-zero affinity");
  if (k == 1) return std::vector<int>(n, 0);

  Vector d = W.rowwise().sum();
  std::vector<long> zero_degree;
  for (long i = 0; i < n; ++i)
    if (d(i) == 0.0) {
      zero_degree.push_back(i);
      d(i) = 1.0;
    }
  if (count_components(W) > k)
    std::cerr << "[hankelwave] warning: affinity graph has more than " << k
              << " connected components\n";

  const Vector dm = d.array().rsqrt();
  Matrix L = Matrix::Identity(n, n) -
             (dm.asDiagonal() * W * dm.asDiagonal()).eval();
  Eigen::SelfAdjointEigenSolver<Matrix> es(L);
  Matrix U = es.eigenvectors().leftCols(k);
  for (long i = 0; i < n; ++i) {
    const double nrm = std::max(U.row(i).norm(), 1e-12);
    U.row(i) /= nrm;
  }

  // k-means: 10 seeded restarts, 100 iterations, best inertia.
  Rng rng(seed);
  std::vector<int> best_labels(n, 0);
  double best_inertia = std::numeric_limits<double>::infinity();
  for (int restart = 0; restart < 10; ++restart) {
    std::vector<long> idx;
    while (static_cast<int>(idx.size()) < k) {
      const long cand = static_cast<long>(rng.below(n));
      if (std::find(idx.begin(), idx.end(), cand) == idx.end())
        idx.push_back(cand);
    }
    Matrix C(k, U.cols());
    for (int i = 0; i < k; ++i) C.row(i) = U.row(idx[i]);
    std::vector<int> labels(n, 0);
    for (int iter = 0; iter < 100; ++iter) {
      for (long i = 0; i < n; ++i) {
        int bi = 0;
        double bd = std::numeric_limits<double>::infinity();
        for (int c = 0; c < k; ++c) {
          const double dist = (U.row(i) - C.row(c)).squaredNorm();
          if (dist < bd) {
            bd = dist;
            bi = c;
          }
        }
        labels[i] = bi;
      }
      Matrix Cn = Matrix::Zero(k, U.cols());
      std::vector<int> cnt(k, 0);
      for (long i = 0; i < n; ++i) {
        Cn.row(labels[i]) += U.row(i);
        ++cnt[labels[i]];
      }
      for (int c = 0; c < k; ++c)
        if (cnt[c] > 0)
          Cn.row(c) /= cnt[c];
        else
          Cn.row(c) = C.row(c);
      if ((Cn - C).norm() < 1e-12) {
        C = Cn;
        break;
      }
      C = Cn;
    }
    double inertia = 0.0;
    for (long i = 0; i < n; ++i)
      inertia += (U.row(i) - C.row(labels[i])).squaredNorm();
    if (inertia < best_inertia) {
      best_inertia = inertia;
      best_labels = labels;
    }
  }

  // Zero-degree nodes take the label of the nearest connected node in time.
  for (long z : zero_degree) {
    for (long off = 1; off < n; ++off) {
      const long lo = z - off, hi = z + off;
      if (lo >= 0 && W.row(lo).cwiseAbs().sum() > 0.0) {
        best_labels[z] = best_labels[lo];
        break;
      }
      if (hi < n && W.row(hi).cwiseAbs().sum() > 0.0) {
        best_labels[z] = best_labels[hi];
        break;
      }
    }
  }
  return best_labels;
}

std::vector<int> farthest_point_sampling(const Matrix& X, int m) {
  const long n = X.cols();
  if (n == 0) return {};
  if (n <= m) {
    std::vector<int> all(n);
    std::iota(all.begin(), all.end(), 0);
    return all;
  }
  std::vector<int> sel{0};
  Vector d(n);
  for (long j = 0; j < n; ++j) d(j) = (X.col(j) - X.col(0)).norm();
  for (int s = 1; s < m; ++s) {
    long best = 0;
    d.maxCoeff(&best);
    sel.push_back(static_cast<int>(best));
    for (long j = 0; j < n; ++j)
      d(j) = std::min(d(j), (X.col(j) - X.col(best)).norm());
  }
  return sel;
}

// ---------------------------------------------------------------------------
// LabeledDictionary
// ---------------------------------------------------------------------------

std::uint64_t LabeledDictionary::fingerprint() const {
  // FNV-1a folded over 8-byte words (byte tail); recomputed on demand so any
  // mutation of A or the block table is detected, but cheap enough to run on
  // every classification.
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::size_t i = 0;
    for (; i + 8 <= len; i += 8) {
      std::uint64_t word;
      std::memcpy(&word, p + i, 8);
      h ^= word;
      h *= 1099511628211ULL;
    }
    for (; i < len; ++i) {
      h ^= p[i];
      h *= 1099511628211ULL;
    }
  };
  mix(A.data(), sizeof(double) * A.size());
  for (const auto& b : blocks) {
    mix(&b.class_id, sizeof(b.class_id));
    mix(&b.begin, sizeof(b.begin));
    mix(&b.end, sizeof(b.end));
  }
  mix(&w, sizeof(w));
  mix(&c, sizeof(c));
  mix(&stride, sizeof(stride));
  return h;
}

void LabeledDictionary::validate() const {
  if (A.cols() == 0) throw TrainingError("dictionary is empty");
  if (static_cast<long>(class_of.size()) != A.cols())
    throw ShapeError("dictionary class_of length mismatch");
  if (A.rows() != static_cast<long>(w) * c)
    throw ShapeError("dictionary rows do not match w*c");
  long covered = 0;
  for (const auto& b : blocks) {
    if (b.begin < 0 || b.end > A.cols() || b.begin >= b.end)
      throw ShapeError("dictionary block out of range");
    covered += b.end - b.begin;
  }
  if (covered != A.cols())
    throw ShapeError("dictionary blocks do not partition the columns");
}

// ---------------------------------------------------------------------------
// Distillation
// ---------------------------------------------------------------------------

namespace {

// Standardize -> slide -> unit-normalize.
Matrix embed(const Matrix& features, const Vector& scales, int w, int stride) {
  TrainingMatrix tm =
      slide_windows(apply_channel_scales(features, scales), {}, w, stride);
  normalize_columns(tm);
  return std::move(tm.X);
}

Matrix cluster_input(const Matrix& X, const OscParams& osc, int k,
                     std::uint64_t seed, std::vector<int>& labels_out) {
  CoefficientMatrix cm = osc_solve(X, osc);
  Matrix W = build_affinity(cm.Z);
  labels_out = spectral_cluster(W, k, seed);
  return W;
}

std::vector<long> where(const std::vector<int>& labels, int value) {
  std::vector<long> idx;
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == value) idx.push_back(static_cast<long>(i));
  return idx;
}

Matrix take_cols(const Matrix& X, const std::vector<long>& idx) {
  Matrix out(X.rows(), idx.size());
  for (std::size_t j = 0; j < idx.size(); ++j) out.col(j) = X.col(idx[j]);
  return out;
}

LabeledDictionary build_from_pools(const std::vector<Matrix>& pools,
                                   const std::vector<std::string>& class_names,
                                   const std::vector<int>& budgets, int w,
                                   int c, int stride,
                                   const std::vector<std::string>& channel_names,
                                   const Vector& scales) {
  LabeledDictionary dict;
  dict.w = w;
  dict.c = c;
  dict.stride = stride;
  dict.channel_names = channel_names;
  dict.channel_scale = scales;
  dict.class_names = class_names;

  std::vector<Matrix> blocks;
  long total = 0;
  for (std::size_t cls = 0; cls < pools.size(); ++cls) {
    if (pools[cls].cols() == 0)
      throw TrainingError("class '" + class_names[cls] +
                          "' has no training windows");
    const auto sel = farthest_point_sampling(pools[cls], budgets[cls]);
    Matrix b(pools[cls].rows(), sel.size());
    for (std::size_t j = 0; j < sel.size(); ++j)
      b.col(j) = pools[cls].col(sel[j]);
    total += b.cols();
    blocks.push_back(std::move(b));
  }
  dict.A.resize(blocks.front().rows(), total);
  long at = 0;
  for (std::size_t cls = 0; cls < blocks.size(); ++cls) {
    const long nb = blocks[cls].cols();
    dict.A.middleCols(at, nb) = blocks[cls];
    dict.blocks.push_back({static_cast<int>(cls), static_cast<int>(at),
                           static_cast<int>(at + nb)});
    for (long j = 0; j < nb; ++j) dict.class_of.push_back(static_cast<int>(cls));
    at += nb;
  }
  normalize_columns(dict.A);
  dict.validate();
  return dict;
}

// Minimal internal CRC used for the self-consistency refinement pass
// (avoids a dependency on the classifiers module from the trainer).
std::vector<int> crc_labels(const LabeledDictionary& dict, double lambda,
                            const Matrix& Y) {
  const Matrix& A = dict.A;
  const long m = A.cols();
  Matrix gram = A.transpose() * A;
  gram.diagonal().array() += lambda;
  Eigen::LLT<Matrix> llt(gram);
  const Matrix Xh = llt.solve(A.transpose() * Y);
  const int k = dict.num_classes();
  std::vector<int> out(Y.cols());
  for (long j = 0; j < Y.cols(); ++j) {
    int best = 0;
    double bestr = std::numeric_limits<double>::infinity();
    for (int cls = 0; cls < k; ++cls) {
      Vector coef = Vector::Zero(m);
      for (const auto& b : dict.blocks)
        if (b.class_id == cls)
          coef.segment(b.begin, b.end - b.begin) =
              Xh.col(j).segment(b.begin, b.end - b.begin);
      const double r = (Y.col(j) - A * coef).norm();
      if (r < bestr) {
        bestr = r;
        best = cls;
      }
    }
    out[j] = best;
  }
  return out;
}

std::vector<Matrix> refine_pools(const std::vector<Matrix>& pools,
                                 const LabeledDictionary& dict,
                                 double lambda) {
  std::vector<Matrix> out(pools.size());
  for (std::size_t cls = 0; cls < pools.size(); ++cls) {
    const auto pred = crc_labels(dict, lambda, pools[cls]);
    std::vector<long> keep;
    for (std::size_t j = 0; j < pred.size(); ++j)
      if (pred[j] == static_cast<int>(cls)) keep.push_back(static_cast<long>(j));
    // Keep the original pool when refinement would starve the class.
    out[cls] = keep.size() >= 4 ? take_cols(pools[cls], keep) : pools[cls];
  }
  return out;
}

std::vector<int> resolve_budgets(const TrainerConfig& cfg, std::size_t k) {
  if (cfg.per_class_override.empty())
    return std::vector<int>(k, cfg.per_class);
  if (cfg.per_class_override.size() != k)
    throw ParameterError("per_class_override length must equal class count");
  return cfg.per_class_override;
}

LabeledDictionary distill_braking(const std::vector<Matrix>& runs,
                                  const TrainerConfig& cfg,
                                  const std::vector<std::string>& channel_names) {
  if (runs.size() != 2)
    throw TrainingError(
        "braking schedule expects 2 runs (cruise+normal, cruise+sudden)");
  const Vector scales = channel_scales(runs);
  const Matrix XA = embed(runs[0], scales, cfg.w, cfg.stride);
  const Matrix XB = embed(runs[1], scales, cfg.w, cfg.stride);

  // Pass 1 on run A: the majority-duration cluster is cruise.
  std::vector<int> labA;
  cluster_input(XA, cfg.osc, 2, cfg.cluster_seed, labA);
  const auto a0 = where(labA, 0), a1 = where(labA, 1);
  if (a0.size() == a1.size())
    throw AmbiguityError(
        "braking run 1: cluster durations tie (" + std::to_string(a0.size()) +
        " vs " + std::to_string(a1.size()) + " windows)");
  const auto& cruiseA = a0.size() > a1.size() ? a0 : a1;
  const auto& normalA = a0.size() > a1.size() ? a1 : a0;

  // Pass 1 on run B: minority = braking; majority joins the cruise pool.
  std::vector<int> labB;
  cluster_input(XB, cfg.osc, 2, cfg.cluster_seed, labB);
  const auto b0 = where(labB, 0), b1 = where(labB, 1);
  if (b0.size() == b1.size())
    throw AmbiguityError(
        "braking run 2: cluster durations tie (" + std::to_string(b0.size()) +
        " vs " + std::to_string(b1.size()) + " windows)");
  const auto& cruiseB = b0.size() > b1.size() ? b0 : b1;
  const auto& brakeB = b0.size() > b1.size() ? b1 : b0;

  // Pass 2 (nested): re-cluster the braking windows; the majority is the
  // sudden stop, the minority is the normal-braking shoulders.
  const Matrix XBrake = take_cols(XB, brakeB);
  std::vector<int> lab2;
  cluster_input(XBrake, cfg.osc, 2, cfg.cluster_seed, lab2);
  const auto c0 = where(lab2, 0), c1 = where(lab2, 1);
  if (c0.size() == c1.size())
    throw AmbiguityError(
        "braking run 2 nested pass: cluster durations tie (" +
        std::to_string(c0.size()) + " vs " + std::to_string(c1.size()) +
        " windows)");
  const auto& suddenIdx = c0.size() > c1.size() ? c0 : c1;
  const auto& shoulderIdx = c0.size() > c1.size() ? c1 : c0;

  auto hstack = [](const Matrix& a, const Matrix& b) {
    Matrix out(a.rows(), a.cols() + b.cols());
    out << a, b;
    return out;
  };
  std::vector<Matrix> pools(3);
  pools[0] = hstack(take_cols(XA, cruiseA), take_cols(XB, cruiseB));
  pools[1] = hstack(take_cols(XA, normalA), take_cols(XBrake, shoulderIdx));
  pools[2] = take_cols(XBrake, suddenIdx);

  const std::vector<std::string> names{"cruise", "normal", "sudden"};
  const auto budgets = resolve_budgets(cfg, 3);
  LabeledDictionary dict =
      build_from_pools(pools, names, budgets, cfg.w,
                       static_cast<int>(runs[0].rows()), cfg.stride,
                       channel_names, scales);
  if (cfg.refine) {
    auto refined = refine_pools(pools, dict, cfg.crc_lambda);
    dict = build_from_pools(refined, names, budgets, cfg.w,
                            static_cast<int>(runs[0].rows()), cfg.stride,
                            channel_names, scales);
  }
  return dict;
}

LabeledDictionary distill_posture(const std::vector<Matrix>& runs,
                                  const ClusterSchedule& schedule,
                                  const TrainerConfig& cfg,
                                  const std::vector<std::string>& channel_names) {
  const auto& pairs = gesture_pairs();
  if (runs.size() != 5 + pairs.size())
    throw TrainingError(
        "posture schedule expects 13 runs (5 posture, 8 gesture)");
  const Vector scales = channel_scales(runs);
  const int n_classes = 13;

  // Posture runs feed their class directly (k = 1).
  std::vector<Matrix> posture_pure(5);
  std::vector<Vector> pcent(5);
  for (int p = 0; p < 5; ++p) {
    posture_pure[p] = embed(runs[p], scales, cfg.w, cfg.stride);
    Vector c = posture_pure[p].rowwise().mean();
    pcent[p] = c / c.norm();
  }

  // Gesture runs: k = 3; the cluster farthest from every posture centroid
  // is the gesture, the rest are endpoint shoulders.
  std::vector<Matrix> gesture_pool(pairs.size());
  std::vector<Vector> gcent(pairs.size());
  struct Harvest {
    Matrix X;
    int gid;
  };
  std::vector<std::vector<Harvest>> harvested(5);
  for (std::size_t r = 0; r < pairs.size(); ++r) {
    const auto [a, b] = pairs[r];
    const Matrix X = embed(runs[5 + r], scales, cfg.w, cfg.stride);
    std::vector<int> lab;
    cluster_input(X, cfg.osc, 3, cfg.cluster_seed, lab);
    int best = -1;
    double best_score = std::numeric_limits<double>::infinity();
    std::vector<Vector> cents(3);
    for (int cl = 0; cl < 3; ++cl) {
      const auto idx = where(lab, cl);
      if (idx.size() < 4) continue;
      Vector cen = take_cols(X, idx).rowwise().mean();
      cen /= cen.norm();
      cents[cl] = cen;
      double score = 0.0;
      for (int p = 0; p < 5; ++p)
        score = std::max(score, std::abs(pcent[p].dot(cen)));
      if (score < best_score) {
        best_score = score;
        best = cl;
      }
    }
    if (best < 0)
      throw TrainingError("gesture run " + std::to_string(r) +
                          ": no usable cluster");
    gesture_pool[r] = take_cols(X, where(lab, best));
    gcent[r] = cents[best];
    for (int cl = 0; cl < 3; ++cl) {
      if (cl == best) continue;
      const auto idx = where(lab, cl);
      if (idx.empty()) continue;
      Matrix Xc = take_cols(X, idx);
      Vector cen = Xc.rowwise().mean();
      cen /= cen.norm();
      const int who = std::abs(cen.dot(pcent[a])) >= std::abs(cen.dot(pcent[b]))
                          ? a
                          : b;
      harvested[who].push_back({std::move(Xc), static_cast<int>(5 + r)});
    }
  }

  // Assemble pools with the margin filters.
  std::vector<Matrix> pools(n_classes);
  for (int p = 0; p < 5; ++p) {
    std::vector<Matrix> parts{posture_pure[p]};
    for (const auto& h : harvested[p]) {
      std::vector<long> keep;
      const Vector& gc = gcent[h.gid - 5];
      for (long j = 0; j < h.X.cols(); ++j)
        if (std::abs(pcent[p].dot(h.X.col(j))) >=
            std::abs(gc.dot(h.X.col(j))) + schedule.shoulder_margin)
          keep.push_back(j);
      if (!keep.empty()) parts.push_back(take_cols(h.X, keep));
    }
    long total = 0;
    for (const auto& m : parts) total += m.cols();
    pools[p].resize(parts.front().rows(), total);
    long at = 0;
    for (const auto& m : parts) {
      pools[p].middleCols(at, m.cols()) = m;
      at += m.cols();
    }
  }
  for (std::size_t r = 0; r < pairs.size(); ++r) {
    const Matrix& X = gesture_pool[r];
    Vector cen = X.rowwise().mean();
    cen /= cen.norm();
    std::vector<long> keep;
    for (long j = 0; j < X.cols(); ++j) {
      const double own = cen.dot(X.col(j));  // signed: same side as the mean
      double other = 0.0;
      for (int p = 0; p < 5; ++p)
        other = std::max(other, std::abs(pcent[p].dot(X.col(j))));
      if (own >= other + schedule.gesture_margin) keep.push_back(j);
    }
    pools[5 + r] = keep.size() >= 4 ? take_cols(X, keep) : X;
  }

  std::vector<std::string> names;
  for (int p = 0; p < 5; ++p) names.push_back("posture" + std::to_string(p));
  for (const auto& [a, b] : pairs)
    names.push_back("gesture" + std::to_string(a) + std::to_string(b));
  const auto budgets = resolve_budgets(cfg, n_classes);
  LabeledDictionary dict =
      build_from_pools(pools, names, budgets, cfg.w,
                       static_cast<int>(runs[0].rows()), cfg.stride,
                       channel_names, scales);
  if (cfg.refine) {
    auto refined = refine_pools(pools, dict, cfg.crc_lambda);
    dict = build_from_pools(refined, names, budgets, cfg.w,
                            static_cast<int>(runs[0].rows()), cfg.stride,
                            channel_names, scales);
  }
  return dict;
}

}  // namespace

LabeledDictionary distill_dictionary(const std::vector<Matrix>& runs,
                                     const ClusterSchedule& schedule,
                                     const TrainerConfig& config,
                                     const std::vector<std::string>& channel_names) {
  if (runs.empty()) throw TrainingError("no training runs supplied");
  switch (schedule.kind) {
    case ClusterSchedule::Kind::kBrakingNested:
      return distill_braking(runs, config, channel_names);
    case ClusterSchedule::Kind::kPostureGesture:
      return distill_posture(runs, schedule, config, channel_names);
  }
  throw ParameterError("unknown cluster schedule");
}

}  // namespace hankelwave
