#include "assim/resampling.hpp"

#include <algorithm>
#include <cmath>

namespace assim {

namespace {

void validate_weights(const VectorXd& w) {
  if (w.size() < 1) throw Error("resample: empty weight vector");
  if (!(w.array() >= 0.0).all()) throw Error("resample: negative weight");
  if (std::abs(w.sum() - 1.0) > 1e-9) throw Error("resample: weights must sum to 1");
}

}  // namespace

ResamplingKind resampling_kind_from_string(const std::string& name) {
  if (name == "multinomial") return ResamplingKind::Multinomial;
  if (name == "systematic") return ResamplingKind::Systematic;
  throw Error("unknown resampling kind: " + name);
}

std::string to_string(ResamplingKind kind) {
  return kind == ResamplingKind::Multinomial ? "multinomial" : "systematic";
}

std::vector<int> multinomial_resample(const VectorXd& w, RngStream& rng) {
  validate_weights(w);
  const int count = static_cast<int>(w.size());
  VectorXd cumsum(count);
  double acc = 0.0;
  for (int m = 0; m < count; ++m) {
    acc += w[m];
    cumsum[m] = acc;
  }
  cumsum[count - 1] = 1.0;

  std::vector<int> selected(count);
  for (int i = 0; i < count; ++i) {
    double u = rng.uniform_pos();
    // first m with Q^(m) >= u, i.e. Q^(m-1) < u <= Q^(m)
    const double* begin = cumsum.data();
    const double* it = std::lower_bound(begin, begin + count, u);
    selected[i] = static_cast<int>(std::min<std::ptrdiff_t>(it - begin, count - 1));
  }
  return selected;
}

std::vector<int> systematic_resample_with_offset(const VectorXd& w, double u1) {
  validate_weights(w);
  const int count = static_cast<int>(w.size());
  std::vector<int> selected(count);
  double acc = w[0];
  int m = 0;
  for (int i = 0; i < count; ++i) {
    double u = u1 + static_cast<double>(i) / count;
    while (u > acc && m + 1 < count) acc += w[++m];
    selected[i] = m;
  }
  return selected;
}

std::vector<int> systematic_resample(const VectorXd& w, RngStream& rng) {
  const double u1 = rng.uniform_pos() / static_cast<double>(w.size());  // (0, 1/I]
  return systematic_resample_with_offset(w, u1);
}

}  // namespace assim
