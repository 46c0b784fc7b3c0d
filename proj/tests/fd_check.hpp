#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "gcnse/tensor.hpp"

namespace gcnse::testing {

struct FdReport {
  std::size_t checked = 0;
  std::size_t refined = 0;
  double max_rel_error = 0.0;
  std::vector<std::string> failures;

  bool pass() const { return failures.empty(); }
};

inline double rel_error(double analytic, double numeric) {
  const double diff = std::abs(analytic - numeric);
  if (diff <= 1e-8) return 0.0;
  return diff / std::max(std::abs(analytic), std::abs(numeric));
}

/// Central-difference check of analytic gradients, base step h = 1e-4.
/// A finite difference straddling a ReLU kink is not an estimate of the
/// derivative, so entries that fail at the base step are re-measured at
/// h/10 and h/100; stepping off the kink must recover agreement, while a
/// genuine gradient bug fails at every step size.
template <typename LossFn>
FdReport check_gradients(LossFn&& loss, const std::vector<Tensor*>& params,
                         const std::vector<const Tensor*>& grads, double tol = 1e-4,
                         double base_step = 1e-4) {
  FdReport report;
  for (std::size_t k = 0; k < params.size(); ++k) {
    Tensor& p = *params[k];
    const Tensor& g = *grads[k];
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double analytic = g.data()[i];
      const double saved = p.data()[i];
      const auto fd_at = [&](double h) {
        p.data()[i] = saved + h;
        const double up = loss();
        p.data()[i] = saved - h;
        const double down = loss();
        p.data()[i] = saved;
        return (up - down) / (2.0 * h);
      };
      double numeric = fd_at(base_step);
      double err = rel_error(analytic, numeric);
      if (err >= tol) {
        for (double h : {base_step / 10.0, base_step / 100.0}) {
          ++report.refined;
          numeric = fd_at(h);
          err = rel_error(analytic, numeric);
          if (err < tol) break;
        }
      }
      ++report.checked;
      report.max_rel_error = std::max(report.max_rel_error, err);
      if (err >= tol) {
        report.failures.push_back("tensor " + std::to_string(k) + " entry " + std::to_string(i) +
                                  ": analytic " + std::to_string(analytic) + " vs fd " +
                                  std::to_string(numeric));
      }
    }
  }
  return report;
}

}  // namespace gcnse::testing
