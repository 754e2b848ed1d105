#include "assim/core.hpp"

#include <cmath>
#include <limits>

namespace assim {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr double kTwoPi = 6.283185307179586476925286766559;

}  // namespace

// ---------------------------------------------------------------------------
// RngStream
// ---------------------------------------------------------------------------

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id) {
  std::uint64_t state = seed;
  std::uint64_t a = splitmix64(state);
  state ^= stream_id * 0xD1B54A32D192ED03ULL + 0x8BB84B93962EACC9ULL;
  std::uint64_t b = splitmix64(state);
  std::uint64_t c = splitmix64(state);
  std::uint64_t d = splitmix64(state);
  std::seed_seq seq{
      static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
      static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32),
      static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(c >> 32),
      static_cast<std::uint32_t>(d), static_cast<std::uint32_t>(d >> 32)};
  engine_.seed(seq);
}

double RngStream::uniform01() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RngStream::uniform_pos() {
  return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
}

double RngStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform_pos();
  double u2 = uniform01();
  double mag = std::sqrt(-2.0 * std::log(u1));
  spare_ = mag * std::sin(kTwoPi * u2);
  has_spare_ = true;
  return mag * std::cos(kTwoPi * u2);
}

VectorXd RngStream::normal_vec(Eigen::Index n) {
  VectorXd out(n);
  for (Eigen::Index i = 0; i < n; ++i) out[i] = normal();
  return out;
}

RngStream RngStream::substream(std::uint64_t tag) const {
  std::uint64_t state = seed_ ^ 0xA0761D6478BD642FULL;
  std::uint64_t mixed = splitmix64(state);
  state ^= stream_id_;
  mixed ^= splitmix64(state);
  return RngStream(mixed, tag);
}

// ---------------------------------------------------------------------------
// Domain type validation
// ---------------------------------------------------------------------------

void ModelDims::validate() const {
  if (state_dim < 1 || measurement_dim < 1)
    throw Error("ModelDims: dimensions must be >= 1");
  if (measurement_dim > state_dim)
    throw Error("ModelDims: measurement_dim exceeds state_dim");
}

MatrixXd NoiseSpec::process_cov() const {
  return process_std.array().square().matrix().asDiagonal();
}

MatrixXd NoiseSpec::measurement_cov() const {
  return measurement_std.array().square().matrix().asDiagonal();
}

void NoiseSpec::validate(const ModelDims& dims) const {
  if (process_std.size() != dims.state_dim)
    throw Error("NoiseSpec: process_std length mismatch");
  if (measurement_std.size() != dims.measurement_dim)
    throw Error("NoiseSpec: measurement_std length mismatch");
  if (!(process_std.array() >= 0).all() || !process_std.allFinite())
    throw Error("NoiseSpec: process_std entries must be finite and >= 0");
  if (!(measurement_std.array() >= 0).all() || !measurement_std.allFinite())
    throw Error("NoiseSpec: measurement_std entries must be finite and >= 0");
}

void ObservationSelector::validate(int state_dim) const {
  if (observed_indices.empty()) throw Error("ObservationSelector: empty selection");
  int prev = -1;
  for (int idx : observed_indices) {
    if (idx <= prev) throw Error("ObservationSelector: indices must be strictly increasing");
    if (idx < 0 || idx >= state_dim) throw Error("ObservationSelector: index out of range");
    prev = idx;
  }
}

VectorXd ObservationSelector::select(const VectorXd& state) const {
  VectorXd out(measurement_dim());
  for (int i = 0; i < measurement_dim(); ++i) out[i] = state[observed_indices[i]];
  return out;
}

VectorXd ObservationSelector::embed(const VectorXd& measurement, VectorXd base) const {
  for (int i = 0; i < measurement_dim(); ++i) base[observed_indices[i]] = measurement[i];
  return base;
}

ObservationSelector ObservationSelector::all(int state_dim) {
  ObservationSelector s;
  s.observed_indices.resize(state_dim);
  for (int i = 0; i < state_dim; ++i) s.observed_indices[i] = i;
  return s;
}

void TimeSeries::validate() const {
  if (values.rows() == 0) throw Error("TimeSeries: empty");
  if (!values.allFinite()) throw Error("TimeSeries: non-finite values");
}

// ---------------------------------------------------------------------------
// Numeric primitives
// ---------------------------------------------------------------------------

CholeskyPSD cholesky_psd(const MatrixXd& m, double jitter_max) {
  if (m.rows() != m.cols() || m.rows() < 1)
    throw NotFactorizable("cholesky_psd: matrix must be square and non-empty");
  if (!m.allFinite())
    throw NotFactorizable("cholesky_psd: non-finite matrix");
  if (m.isZero(0.0)) return {MatrixXd::Zero(m.rows(), m.cols()), 0.0};

  auto attempt = [&m](double eps, CholeskyPSD& out) {
    MatrixXd shifted = m;
    if (eps > 0.0) shifted.diagonal().array() += eps;
    Eigen::LLT<MatrixXd> llt(shifted);
    if (llt.info() != Eigen::Success) return false;
    out.lower = llt.matrixL();
    out.jitter = eps;
    return true;
  };

  CholeskyPSD result;
  if (attempt(0.0, result)) return result;
  for (double eps = 1e-12; eps < jitter_max; eps *= 100.0) {
    if (attempt(eps, result)) return result;
  }
  if (jitter_max > 0.0 && attempt(jitter_max, result)) return result;
  throw NotFactorizable("cholesky_psd: factorization failed at jitter_max");
}

VectorXd gaussian_draw(RngStream& rng, const VectorXd& mean, const VectorXd& std) {
  if (mean.size() != std.size()) throw Error("gaussian_draw: length mismatch");
  VectorXd z = rng.normal_vec(mean.size());
  return mean.array() + std.array() * z.array();
}

TimeSeries perturb_observations(RngStream& rng, const TimeSeries& truth, const VectorXd& r) {
  if (truth.dim() != r.size()) throw Error("perturb_observations: length mismatch");
  TimeSeries out = truth;
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    VectorXd z = rng.normal_vec(r.size());
    out.values.row(i) += (r.array() * z.array()).matrix().transpose();
  }
  out.provenance = truth.label + " + N(0, diag(r^2)), seed=" + std::to_string(rng.seed()) +
                   ", stream=" + std::to_string(rng.stream_id());
  return out;
}

double log_normal_diag(const VectorXd& x, const VectorXd& mean, const VectorXd& std) {
  constexpr double kLogTwoPi = 1.8378770664093454835606594728112;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    double d = x[i] - mean[i];
    if (std[i] == 0.0) {
      if (std::abs(d) <= 1e-9 * (1.0 + std::abs(mean[i]))) continue;
      return -std::numeric_limits<double>::infinity();
    }
    double z = d / std[i];
    acc += -0.5 * (kLogTwoPi + z * z) - std::log(std[i]);
  }
  return acc;
}

double log_normal_cov(const VectorXd& x, const VectorXd& mean, const CholeskyPSD& chol) {
  constexpr double kLogTwoPi = 1.8378770664093454835606594728112;
  const Eigen::Index n = x.size();
  VectorXd d = x - mean;
  if (chol.lower.isZero(0.0)) {
    // Degenerate point mass: density is a convention, constant across equal inputs.
    for (Eigen::Index i = 0; i < n; ++i)
      if (std::abs(d[i]) > 1e-9 * (1.0 + std::abs(mean[i])))
        return -std::numeric_limits<double>::infinity();
    return 0.0;
  }
  VectorXd z = chol.lower.triangularView<Eigen::Lower>().solve(d);
  double logdet = chol.lower.diagonal().array().log().sum();
  return -0.5 * (static_cast<double>(n) * kLogTwoPi + z.squaredNorm()) - logdet;
}

}  // namespace assim
