#include "hankelwave/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "hankelwave/errors.hpp"
#include "hankelwave/rng.hpp"

namespace hankelwave {

namespace {

constexpr double kG = 9.81;

double smoothstep(double x) {
  x = std::clamp(x, 0.0, 1.0);
  return x * x * (3.0 - 2.0 * x);
}

}  // namespace

// ---------------------------------------------------------------------------
// CSV I/O
// ---------------------------------------------------------------------------

namespace {

std::vector<std::vector<double>> parse_csv(const std::string& path,
                                           std::size_t min_cols) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open trace file: " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    // Skip a header line if the first field is not numeric.
    std::vector<double> vals;
    std::stringstream ss(line);
    std::string field;
    bool numeric = true;
    while (std::getline(ss, field, ',')) {
      char* end = nullptr;
      double v = std::strtod(field.c_str(), &end);
      while (end && *end == ' ') ++end;
      if (end == field.c_str() || (end && *end != '\0' && *end != '\r')) {
        numeric = false;
        break;
      }
      vals.push_back(v);
    }
    if (!numeric) {
      if (lineno == 1) continue;  // header
      throw FormatError("non-numeric field at row " + std::to_string(lineno) +
                        " of " + path);
    }
    if (vals.size() < min_cols)
      throw FormatError("expected >= " + std::to_string(min_cols) +
                        " columns at row " + std::to_string(lineno) + " of " +
                        path + ", got " + std::to_string(vals.size()));
    rows.push_back(std::move(vals));
  }
  if (rows.empty()) throw FormatError("empty trace file: " + path);
  return rows;
}

void check_uniform(const std::vector<ImuSample>& samples, double fs) {
  const double dt = 1.0 / fs;
  double worst = 0.0;
  for (std::size_t i = 1; i < samples.size(); ++i) {
    const double gap = samples[i].t - samples[i - 1].t;
    if (gap <= 0.0)
      throw TimingError("non-increasing timestamps at sample " +
                        std::to_string(i));
    worst = std::max(worst, std::abs(gap - dt));
  }
  if (worst > 0.01 * dt) {
    char buf[128];
    std::snprintf(buf, sizeof(buf),
                  "non-uniform sampling: worst gap deviation %.6f s exceeds "
                  "1%% of %.6f s",
                  worst, dt);
    throw TimingError(buf);
  }
}

}  // namespace

SignalTrace load_trace(const std::string& path, double fs) {
  if (fs <= 0.0) throw ParameterError("fs must be positive");
  auto rows = parse_csv(path, 7);
  SignalTrace trace;
  trace.fs = fs;
  trace.samples.reserve(rows.size());
  for (const auto& r : rows) {
    ImuSample s;
    s.t = r[0];
    s.accel = Vector3(r[1], r[2], r[3]);
    s.gyro = Vector3(r[4], r[5], r[6]);
    trace.samples.push_back(s);
  }
  check_uniform(trace.samples, fs);
  return trace;
}

namespace {

void write_trace_rows(std::ofstream& out, const SignalTrace& trace,
                      const std::vector<int>* labels) {
  out << "t,ax,ay,az,gx,gy,gz";
  if (labels) out << ",label";
  out << "\n";
  char buf[256];
  for (std::size_t i = 0; i < trace.samples.size(); ++i) {
    const auto& s = trace.samples[i];
    std::snprintf(buf, sizeof(buf),
                  "%.9f,%.9f,%.9f,%.9f,%.9f,%.9f,%.9f", s.t, s.accel.x(),
                  s.accel.y(), s.accel.z(), s.gyro.x(), s.gyro.y(),
                  s.gyro.z());
    out << buf;
    if (labels) out << "," << (*labels)[i];
    out << "\n";
  }
}

}  // namespace

void save_trace(const SignalTrace& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write trace file: " + path);
  write_trace_rows(out, trace, nullptr);
}

void save_labeled_trace(const LabeledTrace& lt, const std::string& path) {
  if (lt.labels.size() != lt.trace.size())
    throw ShapeError("labels length does not match trace length");
  std::ofstream out(path);
  if (!out) throw IoError("cannot write trace file: " + path);
  write_trace_rows(out, lt.trace, &lt.labels);
}

LabeledTrace load_labeled_trace(const std::string& path, double fs) {
  if (fs <= 0.0) throw ParameterError("fs must be positive");
  auto rows = parse_csv(path, 8);
  LabeledTrace lt;
  lt.trace.fs = fs;
  for (const auto& r : rows) {
    ImuSample s;
    s.t = r[0];
    s.accel = Vector3(r[1], r[2], r[3]);
    s.gyro = Vector3(r[4], r[5], r[6]);
    lt.trace.samples.push_back(s);
    lt.labels.push_back(static_cast<int>(std::lround(r[7])));
  }
  check_uniform(lt.trace.samples, fs);
  return lt;
}

std::vector<ScenarioSegment> load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open scenario file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw FormatError(std::string("scenario JSON parse error: ") + e.what());
  }
  if (!j.is_array()) throw FormatError("scenario must be a JSON array");
  std::vector<ScenarioSegment> script;
  for (const auto& item : j) {
    ScenarioSegment seg;
    seg.state = item.at("state").get<int>();
    seg.duration_s = item.at("duration_s").get<double>();
    script.push_back(seg);
  }
  return script;
}

void save_scenario(const std::vector<ScenarioSegment>& script,
                   const std::string& path) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& seg : script)
    j.push_back({{"state", seg.state}, {"duration_s", seg.duration_s}});
  std::ofstream out(path);
  if (!out) throw IoError("cannot write scenario file: " + path);
  out << j.dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// Braking synthesis
// ---------------------------------------------------------------------------

namespace {

// Normal braking: smooth rise, hold, two-step pumped release with a small
// rebound below baseline.
std::vector<double> normal_profile(int n, double fs) {
  const double dur = n / fs;
  const double rise = 0.7, release = 0.6;
  const double hold_end = dur - release;
  std::vector<double> y(n);
  for (int i = 0; i < n; ++i) {
    const double x = i / fs;
    if (x < rise) {
      y[i] = smoothstep(x / rise);
    } else if (x < hold_end) {
      y[i] = 1.0;
    } else {
      const double u = (x - hold_end) / release;
      if (u < 0.25)
        y[i] = 1.0 - 0.55 * smoothstep(u / 0.25);
      else if (u < 0.45)
        y[i] = 0.45;
      else if (u < 0.75)
        y[i] = 0.45 - 0.55 * smoothstep((u - 0.45) / 0.3);
      else
        y[i] = -0.10 * (1.0 - smoothstep((u - 0.75) / 0.25));
    }
  }
  return y;
}

constexpr double kAmpNormal = 0.17, kAmpSudden = 0.42;
constexpr double kDecNormal = 1.5, kDecSudden = 3.5;

// Compound sudden stop: lead shoulder up to the normal level, deep core
// bump, fall-through with undershoot, short recovery tail.
std::pair<std::vector<double>, std::vector<double>> sudden_compound(
    int n_lead, int n_core, int n_trail) {
  const double ln = kAmpNormal / kAmpSudden;
  std::vector<double> prof;
  prof.reserve(n_lead + n_core + n_trail);
  for (int i = 0; i < n_lead; ++i) {
    const double t1 = static_cast<double>(i) / std::max(n_lead, 1);
    prof.push_back(ln * smoothstep(t1 / 0.5));
  }
  double core_last = 1.0;
  for (int i = 0; i < n_core; ++i) {
    const double t2 = static_cast<double>(i) / std::max(n_core, 1);
    const double prog =
        t2 < 0.35 ? t2 / 0.35 * 0.5 : 0.5 + (t2 - 0.35) / 0.65 * 0.5;
    const double bump = std::sin(M_PI * prog);
    double v = 0.55 * ln + (1.0 - 0.55 * ln) * bump;
    if (i == 0) v = ln;
    prof.push_back(v);
    core_last = v;
  }
  const double start = n_core > 0 ? core_last : 1.0;
  double trail_last = 0.0;
  for (int i = 0; i < n_trail; ++i) {
    const double t3 = static_cast<double>(i) / std::max(n_trail, 1);
    double v;
    if (t3 >= 0.6)
      v = -0.35 * (1.0 - smoothstep((t3 - 0.6) / 0.4));
    else
      v = start - (start + 0.35) * smoothstep(t3 / 0.6);
    prof.push_back(v);
    trail_last = v;
  }
  std::vector<double> tail(6, 0.0);
  if (n_trail > 0) {
    for (int i = 0; i < 6; ++i) {
      const double t4 = (i + 1) / 6.0;
      tail[i] = trail_last * (1.0 - smoothstep(t4));
    }
  }
  return {prof, tail};
}

}  // namespace

LabeledTrace synthesize_braking_trace(const std::vector<ScenarioSegment>& script,
                                      std::uint64_t seed, double fs,
                                      const BrakingNoise& noise) {
  if (fs <= 0.0) throw ParameterError("fs must be positive");
  if (script.empty()) throw ScenarioError("empty scenario script");
  for (const auto& seg : script) {
    if (seg.state < 0 || seg.state > 2)
      throw ScenarioError("unknown braking state id " +
                          std::to_string(seg.state));
    if (seg.duration_s <= 0.0)
      throw ScenarioError("non-positive segment duration");
  }

  struct Seg {
    int state, start, n;
  };
  std::vector<Seg> segs;
  int n_tot = 0;
  for (const auto& seg : script) {
    const int n = static_cast<int>(std::lround(seg.duration_s * fs));
    segs.push_back({seg.state, n_tot, n});
    n_tot += n;
  }
  if (n_tot < 1) throw ScenarioError("scenario too short at this rate");

  Rng rng(seed);
  const double p1 = rng.uniform(0.0, 2.0 * M_PI);
  const double p2 = rng.uniform(0.0, 2.0 * M_PI);

  // Road texture: two incommensurate sinusoids on the pitch angle.
  std::vector<double> th(n_tot), ax_long(n_tot, 0.0);
  std::vector<int> lab(n_tot, 0);
  for (int i = 0; i < n_tot; ++i) {
    const double t = i / fs;
    th[i] = 0.02 * std::sin(2.0 * M_PI * 1.3 * t + p1) +
            0.006 * std::sin(2.0 * M_PI * 2.7 * t + p2);
  }
  for (const auto& s : segs)
    std::fill(lab.begin() + s.start, lab.begin() + s.start + s.n, s.state);

  // (normal, sudden, normal) triples become one compound event; lone
  // normal segments get the normal profile.
  for (std::size_t i = 0; i < segs.size();) {
    const auto& s = segs[i];
    if (s.state == 1 && i + 2 < segs.size() && segs[i + 1].state == 2 &&
        segs[i + 2].state == 1) {
      auto [prof, tail] = sudden_compound(s.n, segs[i + 1].n, segs[i + 2].n);
      for (std::size_t k = 0; k < prof.size(); ++k) {
        const int idx = s.start + static_cast<int>(k);
        if (idx >= n_tot) break;
        th[idx] += kAmpSudden * prof[k];
        ax_long[idx] -= kDecSudden * prof[k];
      }
      const int e = s.start + static_cast<int>(prof.size());
      for (std::size_t k = 0; k < tail.size() && e + static_cast<int>(k) < n_tot;
           ++k) {
        th[e + k] += kAmpSudden * tail[k];
        ax_long[e + k] -= kDecSudden * tail[k];
      }
      i += 3;
    } else if (s.state == 1) {
      auto prof = normal_profile(s.n, fs);
      for (int k = 0; k < s.n; ++k) {
        th[s.start + k] += kAmpNormal * prof[k];
        ax_long[s.start + k] -= kDecNormal * prof[k];
      }
      ++i;
    } else {
      ++i;
    }
  }

  // Pitch rate: central differences, one-sided at the ends.
  std::vector<double> thdot(n_tot, 0.0);
  if (n_tot >= 2) {
    thdot[0] = (th[1] - th[0]) * fs;
    thdot[n_tot - 1] = (th[n_tot - 1] - th[n_tot - 2]) * fs;
    for (int i = 1; i + 1 < n_tot; ++i)
      thdot[i] = (th[i + 1] - th[i - 1]) * fs * 0.5;
  }

  const double bias =
      noise.enabled ? rng.uniform(-noise.bias_range, noise.bias_range) : 0.0;

  LabeledTrace lt;
  lt.trace.fs = fs;
  lt.trace.samples.resize(n_tot);
  lt.labels = lab;
  for (int i = 0; i < n_tot; ++i) {
    auto& s = lt.trace.samples[i];
    s.t = i / fs;
    s.gyro = Vector3(0.0, thdot[i] + bias, 0.0);
    s.accel = Vector3(-kG * std::sin(th[i]) + ax_long[i] * std::cos(th[i]), 0.0,
                      kG * std::cos(th[i]));
  }
  if (noise.enabled) {
    for (int i = 0; i < n_tot; ++i)
      lt.trace.samples[i].gyro.y() += rng.gaussian(noise.gyro_sigma);
    for (int axis = 0; axis < 3; ++axis)
      for (int i = 0; i < n_tot; ++i)
        lt.trace.samples[i].accel(axis) += rng.gaussian(noise.accel_sigma);
  }
  return lt;
}

// ---------------------------------------------------------------------------
// Posture / gesture synthesis
// ---------------------------------------------------------------------------

// Five fixed posture directions (orthonormal, QR of a seeded Gaussian) and
// eight gesture plateau directions chosen offline to minimize the maximum
// pairwise |cos| over the full 13-direction set (achieved coherence 0.494).
const double kPostureDirections[5][5] = {
    {-0.16687316018548493, 0.71311660512765018, -0.48158744250351421,
     0.47057699857340962, 0.1012367499354359},
    {-0.68595506523074679, 0.086728421375559098, 0.51091023935230695,
     0.24465133329060565, -0.44839745968736566},
    {0.26599126539906476, -0.31661730169154378, -0.40229961257072927,
     0.32374433232256045, -0.74989783305156388},
    {-0.58971983952563634, -0.15194019837306133, -0.57018658322591254,
     -0.5462705361405954, -0.074969651473371882},
    {-0.28826750509770138, -0.60050857513014677, -0.14172700724453888,
     0.56167706216869517, 0.46981233482206236},
};

const double kGestureDirections[8][5] = {
    {-0.32693840017158676, -0.023784954456356734, -0.069051199559235624,
     -0.35206461740300554, -0.8739725370096354},
    {0.21224925020344573, 0.36757846456234095, -0.80391561924068278,
     -0.24032883107022987, -0.34029113752102508},
    {-0.62764099761747516, 0.69114170414643605, -0.087478401470706263,
     -0.25973005527111437, -0.2308197360805492},
    {0.29049635733571116, 0.58583631262274205, 0.055163170572617971,
     0.44756617972784279, -0.60749421442798324},
    {-0.074586055514587482, 0.7484501567820786, 0.65506948240807006,
     0.070813499878584471, -0.011344804459556372},
    {-0.46352840653431759, 0.02820663637505607, 0.45341076477441455,
     -0.75088251419637275, -0.12222900744494414},
    {0.66325197471039499, 0.092174377785855646, 0.46734851225438512,
     -0.42398909777516047, 0.39168777768009344},
    {-0.2263357850227348, 0.21659643810594825, -0.5859219131510276,
     -0.14823855642401371, 0.73251548618218487},
};

const std::vector<std::pair<int, int>>& gesture_pairs() {
  static const std::vector<std::pair<int, int>> pairs = {
      {0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 0}, {0, 2}, {2, 4}, {1, 3}};
  return pairs;
}

int gesture_id(int a, int b) {
  if (a == b || a < 0 || a > 4 || b < 0 || b > 4)
    throw ScenarioError("invalid posture pair (" + std::to_string(a) + ", " +
                        std::to_string(b) + ")");
  if (a > b) std::swap(a, b);
  const auto& pairs = gesture_pairs();
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const int lo = std::min(pairs[k].first, pairs[k].second);
    const int hi = std::max(pairs[k].first, pairs[k].second);
    if (lo == a && hi == b) return 5 + static_cast<int>(k);
  }
  // The two untrained pairs share a trained gesture each (documented map).
  if (a == 0 && b == 3) return gesture_id(0, 2);
  if (a == 1 && b == 4) return gesture_id(1, 3);
  throw ScenarioError("unmapped posture pair");  // unreachable for 0..4
}

namespace {

double raised_cosine(double x) {
  x = std::clamp(x, 0.0, 1.0);
  return 0.5 * (1.0 - std::cos(M_PI * x));
}

}  // namespace

LabeledTrace synthesize_posture_trace(const std::vector<int>& script,
                                      std::uint64_t seed,
                                      const PostureOptions& opts) {
  if (script.empty()) throw ScenarioError("empty posture script");
  if (opts.fs <= 0.0) throw ParameterError("fs must be positive");
  for (std::size_t k = 0; k < script.size(); ++k) {
    if (script[k] < 0 || script[k] > 4)
      throw ScenarioError("posture id out of range: " +
                          std::to_string(script[k]));
    if (k > 0 && script[k] == script[k - 1])
      throw ScenarioError("repeated consecutive posture " +
                          std::to_string(script[k]) + " at position " +
                          std::to_string(k));
  }
  if (!opts.dwell_s.empty() && opts.dwell_s.size() != script.size())
    throw ScenarioError("dwell list length must match script length");

  const int ng = static_cast<int>(std::lround(opts.gesture_s * opts.fs));
  auto posture_vec = [](int p) {
    Eigen::Matrix<double, 5, 1> v;
    for (int i = 0; i < 5; ++i) v(i) = kPostureDirections[p][i];
    return (v * kPostureAmplitude).eval();
  };
  auto gesture_vec = [](int gid) {
    Eigen::Matrix<double, 5, 1> v;
    for (int i = 0; i < 5; ++i) v(i) = kGestureDirections[gid - 5][i];
    return (v * kPostureAmplitude).eval();
  };

  std::vector<Eigen::Matrix<double, 5, 1>> cols;
  std::vector<int> labels;
  for (std::size_t k = 0; k < script.size(); ++k) {
    const int p = script[k];
    const double dwell = opts.dwell_s.empty() ? 3.0 : opts.dwell_s[k];
    const int nd = static_cast<int>(std::lround(dwell * opts.fs));
    const auto vp = posture_vec(p);
    for (int i = 0; i < nd; ++i) {
      cols.push_back(vp);
      labels.push_back(p);
    }
    if (k + 1 < script.size()) {
      const int q = script[k + 1];
      const int gid = gesture_id(p, q);
      const auto vg = gesture_vec(gid);
      const auto vq = posture_vec(q);
      for (int i = 0; i < ng; ++i) {
        const double u = (i + 1.0) / (ng + 1.0);
        Eigen::Matrix<double, 5, 1> x;
        if (u < opts.ramp_fraction) {
          const double s = raised_cosine(u / opts.ramp_fraction);
          x = vp * (1.0 - s) + vg * s;
        } else if (u < 1.0 - opts.ramp_fraction) {
          x = vg;
        } else {
          const double s =
              raised_cosine((u - (1.0 - opts.ramp_fraction)) / opts.ramp_fraction);
          x = vg * (1.0 - s) + vq * s;
        }
        cols.push_back(x);
        labels.push_back(gid);
      }
    }
  }

  const int n = static_cast<int>(cols.size());
  // Noise drawn channel-major for reproducibility of the documented stream.
  Matrix noise = Matrix::Zero(5, n);
  if (opts.noise_sigma > 0.0) {
    Rng rng(seed);
    for (int ch = 0; ch < 5; ++ch)
      for (int i = 0; i < n; ++i) noise(ch, i) = rng.gaussian(opts.noise_sigma);
  }

  LabeledTrace lt;
  lt.trace.fs = opts.fs;
  lt.trace.channel_names = {"c0", "c1", "c2", "c3", "c4", "unused"};
  lt.trace.samples.resize(n);
  lt.labels = labels;
  for (int i = 0; i < n; ++i) {
    auto& s = lt.trace.samples[i];
    s.t = i / opts.fs;
    const auto x = cols[i] + noise.col(i);
    s.accel = Vector3(x(0), x(1), x(2));
    s.gyro = Vector3(x(3), x(4), 0.0);
  }
  return lt;
}

}  // namespace hankelwave
