#include "hypercone/synth/optim.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "hypercone/errors.hpp"

namespace hypercone::synth {

void Schedule::validate() const {
  if (total_steps <= 0) throw ValidationError("total steps must be positive");
  if (warmup_steps < 0 || warmup_steps >= total_steps) throw ValidationError("warmup must satisfy 0 <= W < T");
  if (!(peak_lr > 0.0) || !std::isfinite(peak_lr)) throw ValidationError("peak learning rate must be positive");
}

double lr_at(long step, const Schedule& s) {
  if (step < 0 || step > s.total_steps) throw ValidationError("step out of range: " + std::to_string(step));
  if (step < s.warmup_steps) {
    return s.peak_lr * static_cast<double>(step) / static_cast<double>(s.warmup_steps);
  }
  const double progress =
      static_cast<double>(step - s.warmup_steps) / static_cast<double>(s.total_steps - s.warmup_steps);
  return s.peak_lr * 0.5 * (1.0 + std::cos(std::numbers::pi * progress));
}

void adamw_step(std::span<double> params, std::span<const double> grads, AdamWState& state, double lr,
                const AdamWConfig& c, const std::vector<bool>& decay, const std::vector<bool>& frozen) {
  const std::size_t n = params.size();
  if (grads.size() != n || state.m.size() != n || state.v.size() != n || decay.size() != n ||
      (!frozen.empty() && frozen.size() != n)) {
    throw ValidationError("adamw_step: shape mismatch");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(grads[i])) {
      throw NumericalError("adamw_step: non-finite gradient at index " + std::to_string(i));
    }
  }
  state.step += 1;
  const double bc1 = 1.0 - std::pow(c.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(c.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < n; ++i) {
    if (!frozen.empty() && frozen[i]) continue;
    state.m[i] = c.beta1 * state.m[i] + (1.0 - c.beta1) * grads[i];
    state.v[i] = c.beta2 * state.v[i] + (1.0 - c.beta2) * grads[i] * grads[i];
    if (decay[i]) params[i] -= lr * c.weight_decay * params[i];
    const double m_hat = state.m[i] / bc1;
    const double v_hat = state.v[i] / bc2;
    params[i] -= lr * m_hat / (std::sqrt(v_hat) + c.eps);
  }
}

}  // namespace hypercone::synth
