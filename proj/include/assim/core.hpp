#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace assim {

inline constexpr const char* kVersion = "0.1.0";

using Eigen::MatrixXd;
using Eigen::VectorXd;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Covariance could not be Cholesky-factorized even with the maximum jitter.
struct NotFactorizable : Error {
  using Error::Error;
};

struct ParseError : Error {
  int line = 0;
  int column = 0;
  ParseError(const std::string& msg, int line_, int column_)
      : Error(msg), line(line_), column(column_) {}
};

struct GapError : Error {
  int missing_year = 0;
  GapError(const std::string& msg, int year) : Error(msg), missing_year(year) {}
};

struct UnitError : Error {
  using Error::Error;
};

struct NoOverlap : Error {
  using Error::Error;
};

struct WindowTooLarge : Error {
  using Error::Error;
};

struct SeriesTooShort : Error {
  using Error::Error;
};

struct SingularRegression : Error {
  using Error::Error;
};

struct DegenerateData : Error {
  using Error::Error;
};

struct InfiniteDivergence : Error {
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Seeded randomness
// ---------------------------------------------------------------------------

/// Deterministic random stream keyed by (seed, stream_id).
///
/// Identical keys reproduce identical draw sequences on any platform; distinct
/// stream ids give statistically independent sequences. The generator is
/// mt19937_64 keyed through SplitMix64, with normals from Box-Muller over
/// 53-bit uniforms (fixed for a given release, independent of the C++ library's
/// distribution implementations).
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  /// Uniform on [0, 1).
  double uniform01();
  /// Uniform on (0, 1].
  double uniform_pos();
  /// Standard normal draw.
  double normal();
  VectorXd normal_vec(Eigen::Index n);

  /// Independent child stream; children with distinct tags are independent of
  /// each other and of the parent.
  RngStream substream(std::uint64_t tag) const;

 private:
  std::uint64_t seed_ = 0;
  std::uint64_t stream_id_ = 0;
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

struct ModelDims {
  int state_dim = 1;        // L
  int measurement_dim = 1;  // K

  void validate() const;
};

/// Diagonal process/measurement noise given as standard deviations.
struct NoiseSpec {
  VectorXd process_std;      // length L
  VectorXd measurement_std;  // length K

  MatrixXd process_cov() const;      // diag(q^2)
  MatrixXd measurement_cov() const;  // diag(r^2)
  void validate(const ModelDims& dims) const;
};

/// Ordered subset of state components that the measurement map exposes.
struct ObservationSelector {
  std::vector<int> observed_indices;  // 0-based, strictly increasing

  int measurement_dim() const { return static_cast<int>(observed_indices.size()); }
  void validate(int state_dim) const;
  VectorXd select(const VectorXd& state) const;
  /// Writes the observed components into `base` and returns the result.
  VectorXd embed(const VectorXd& measurement, VectorXd base) const;
  static ObservationSelector all(int state_dim);
};

struct GaussianBelief {
  VectorXd mean;
  MatrixXd cov;

  void symmetrize() { cov = ((cov + cov.transpose()) * 0.5).eval(); }
};

/// Yearly time series of scalar or vector values.
struct TimeSeries {
  int start_year = 0;
  int step = 1;        // years
  MatrixXd values;     // rows = time, cols = components
  std::string label;
  std::string provenance;

  Eigen::Index size() const { return values.rows(); }
  Eigen::Index dim() const { return values.cols(); }
  int year(Eigen::Index i) const { return start_year + static_cast<int>(i) * step; }
  void validate() const;
};

/// Transition f(state, step index, noise draw) and measurement h(state, noise).
struct StateSpaceModel {
  ModelDims dims;
  NoiseSpec noise;
  ObservationSelector selector;
  std::function<VectorXd(const VectorXd&, int, const VectorXd&)> transition;
  std::function<VectorXd(const VectorXd&, const VectorXd&)> measurement;
};

// ---------------------------------------------------------------------------
// Numeric primitives
// ---------------------------------------------------------------------------

struct CholeskyPSD {
  MatrixXd lower;  // S with S * S^T = m + jitter * I
  double jitter = 0.0;
};

/// Lower-Cholesky factor of a symmetric PSD matrix, escalating the diagonal
/// jitter through {0, 1e-12, 1e-10, ...} up to jitter_max until factorization
/// succeeds. Throws NotFactorizable when even jitter_max fails.
CholeskyPSD cholesky_psd(const MatrixXd& m, double jitter_max);

/// mean + std (.) z with z iid standard normal from the stream.
VectorXd gaussian_draw(RngStream& rng, const VectorXd& mean, const VectorXd& std);

/// Adds iid N(0, diag(r^2)) noise to every value of the series.
TimeSeries perturb_observations(RngStream& rng, const TimeSeries& truth, const VectorXd& r);

/// Log density of N(mean, diag(std^2)) at x. A zero-std component contributes
/// 0 when x matches the mean (within round-off) and -inf otherwise.
double log_normal_diag(const VectorXd& x, const VectorXd& mean, const VectorXd& std);

/// Log density of N(mean, cov) at x through a precomputed Cholesky factor.
double log_normal_cov(const VectorXd& x, const VectorXd& mean, const CholeskyPSD& chol);

}  // namespace assim
