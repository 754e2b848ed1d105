#pragma once

#include "assim/core.hpp"

namespace assim {

enum class ResamplingKind { Multinomial, Systematic };

ResamplingKind resampling_kind_from_string(const std::string& name);
std::string to_string(ResamplingKind kind);

/// I iid selections with P(index = m) = w[m], via cumulative-sum bracketing
/// Q^(m-1) < u <= Q^(m). Weights must be non-negative and sum to 1 (1e-9).
std::vector<int> multinomial_resample(const VectorXd& w, RngStream& rng);

/// Stratified selection: u1 ~ U(0, 1/I], u_i = u1 + (i-1)/I, same bracketing.
/// Each index is selected floor(I w[m]) or ceil(I w[m]) times.
std::vector<int> systematic_resample(const VectorXd& w, RngStream& rng);

/// Deterministic variant used by tests and by systematic_resample internally.
std::vector<int> systematic_resample_with_offset(const VectorXd& w, double u1);

/// Resamples an indexable particle population in place via `copy(dst, src)`.
template <typename CopyFn>
void apply_resample(const std::vector<int>& selected, CopyFn copy) {
  // Callers copy through a scratch population, so plain index application works.
  for (int dst = 0; dst < static_cast<int>(selected.size()); ++dst) copy(dst, selected[dst]);
}

}  // namespace assim
