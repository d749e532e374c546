#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace hypercone::synth {

struct Schedule {
  long total_steps = 2000;
  long warmup_steps = 100;
  double peak_lr = 5e-3;

  void validate() const;
};

/// Linear warmup to the peak, then cosine decay to zero at total_steps.
double lr_at(long step, const Schedule& schedule);

struct AdamWConfig {
  double beta1 = 0.9;
  double beta2 = 0.98;
  double weight_decay = 0.2;
  double eps = 1e-8;
};

struct AdamWState {
  std::vector<double> m;
  std::vector<double> v;
  std::int64_t step = 0;

  explicit AdamWState(std::size_t n = 0) : m(n, 0.0), v(n, 0.0) {}
};

/// One decoupled-decay AdamW update. `decay[i]` selects which entries are
/// decayed; entries with `frozen[i]` set are left untouched (an empty mask
/// means none). Throws NumericalError on a non-finite gradient.
void adamw_step(std::span<double> params, std::span<const double> grads, AdamWState& state, double lr,
                const AdamWConfig& config, const std::vector<bool>& decay,
                const std::vector<bool>& frozen = {});

}  // namespace hypercone::synth
