#include "gcnse/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

namespace gcnse::metrics {

namespace {

void check_mask(const std::vector<int>& mask, int n) {
  if (mask.empty()) throw std::invalid_argument("metrics: empty mask");
  for (int i : mask) {
    if (i < 0 || i >= n) throw std::invalid_argument("metrics: mask index out of range");
  }
}

}  // namespace

double accuracy(const std::vector<int>& pred, const std::vector<int>& truth,
                const std::vector<int>& mask) {
  if (pred.size() != truth.size()) throw std::invalid_argument("accuracy: length mismatch");
  check_mask(mask, static_cast<int>(truth.size()));
  std::size_t correct = 0;
  for (int i : mask) {
    if (pred[i] == truth[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(mask.size());
}

double macro_auc(const Tensor& probs, const std::vector<int>& truth, const std::vector<int>& mask) {
  if (static_cast<int>(truth.size()) != probs.rows()) throw std::invalid_argument("macro_auc: length mismatch");
  check_mask(mask, probs.rows());
  std::set<int> present;
  for (int i : mask) {
    if (truth[i] < 0 || truth[i] >= probs.cols()) throw std::invalid_argument("macro_auc: label out of range");
    present.insert(truth[i]);
  }
  if (present.size() < 2) throw std::invalid_argument("macro_auc: mask holds a single class; AUC undefined");

  double total = 0.0;
  for (int c : present) {
    std::vector<double> scores;
    std::vector<char> positive;
    scores.reserve(mask.size());
    positive.reserve(mask.size());
    for (int i : mask) {
      scores.push_back(probs(i, c));
      positive.push_back(truth[i] == c ? 1 : 0);
    }
    const std::vector<double> ranks = average_ranks(scores);
    double rank_sum = 0.0;
    std::size_t n_pos = 0;
    for (std::size_t k = 0; k < ranks.size(); ++k) {
      if (positive[k]) {
        rank_sum += ranks[k];
        ++n_pos;
      }
    }
    const std::size_t n_neg = ranks.size() - n_pos;
    const double auc =
        (rank_sum - static_cast<double>(n_pos) * (static_cast<double>(n_pos) + 1.0) / 2.0) /
        (static_cast<double>(n_pos) * static_cast<double>(n_neg));
    total += auc;
  }
  return total / static_cast<double>(present.size());
}

double macro_f1(const std::vector<int>& pred, const std::vector<int>& truth,
                const std::vector<int>& mask, int num_classes) {
  if (pred.size() != truth.size()) throw std::invalid_argument("macro_f1: length mismatch");
  check_mask(mask, static_cast<int>(truth.size()));
  std::vector<long long> tp(num_classes, 0), fp(num_classes, 0), fn(num_classes, 0);
  std::set<int> present;
  for (int i : mask) {
    if (truth[i] < 0 || truth[i] >= num_classes || pred[i] < 0 || pred[i] >= num_classes) {
      throw std::invalid_argument("macro_f1: class out of range");
    }
    present.insert(truth[i]);
    present.insert(pred[i]);
    if (pred[i] == truth[i]) {
      tp[truth[i]]++;
    } else {
      fp[pred[i]]++;
      fn[truth[i]]++;
    }
  }
  double total = 0.0;
  for (int c : present) {
    const double precision = tp[c] + fp[c] == 0 ? 0.0 : static_cast<double>(tp[c]) / static_cast<double>(tp[c] + fp[c]);
    const double recall = tp[c] + fn[c] == 0 ? 0.0 : static_cast<double>(tp[c]) / static_cast<double>(tp[c] + fn[c]);
    total += precision + recall == 0.0 ? 0.0 : 2.0 * precision * recall / (precision + recall);
  }
  return total / static_cast<double>(present.size());
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("pearson: length mismatch");
  if (x.size() < 3) throw std::invalid_argument("pearson: need at least 3 points");
  for (const auto& v : {x, y}) {
    bool constant = true;
    for (double e : v) constant = constant && e == v[0];
    if (constant) throw std::invalid_argument("pearson: constant input; correlation undefined");
  }
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw std::invalid_argument("pearson: constant input; correlation undefined");
  return sxy / std::sqrt(sxx * syy);
}

std::vector<double> average_ranks(std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> ranks(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && x[order[j + 1]] == x[order[i]]) ++j;
    // ranks are 1-based; tied values share the mean rank of their span
    const double rank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("spearman: length mismatch");
  const std::vector<double> rx = average_ranks(x);
  const std::vector<double> ry = average_ranks(y);
  return pearson(rx, ry);
}

EvalReport evaluate(const Tensor& probs, const std::vector<int>& pred, const std::vector<int>& truth,
                    const std::vector<int>& mask, int num_classes) {
  EvalReport report;
  report.accuracy = accuracy(pred, truth, mask);
  report.f1 = macro_f1(pred, truth, mask, num_classes);
  report.auc = macro_auc(probs, truth, mask);

  report.per_class_f1.assign(num_classes, 0.0);
  report.per_class_auc.assign(num_classes, -1.0);
  std::vector<long long> tp(num_classes, 0), fp(num_classes, 0), fn(num_classes, 0);
  for (int i : mask) {
    if (pred[i] == truth[i]) {
      tp[truth[i]]++;
    } else {
      fp[pred[i]]++;
      fn[truth[i]]++;
    }
  }
  for (int c = 0; c < num_classes; ++c) {
    const double precision = tp[c] + fp[c] == 0 ? 0.0 : static_cast<double>(tp[c]) / static_cast<double>(tp[c] + fp[c]);
    const double recall = tp[c] + fn[c] == 0 ? 0.0 : static_cast<double>(tp[c]) / static_cast<double>(tp[c] + fn[c]);
    report.per_class_f1[c] = precision + recall == 0.0 ? 0.0 : 2.0 * precision * recall / (precision + recall);
  }
  // per-class AUC where both positives and negatives exist in the mask
  for (int c = 0; c < num_classes; ++c) {
    std::size_t n_pos = 0;
    for (int i : mask) {
      if (truth[i] == c) ++n_pos;
    }
    if (n_pos == 0 || n_pos == mask.size()) continue;
    std::vector<double> scores;
    std::vector<char> positive;
    for (int i : mask) {
      scores.push_back(probs(i, c));
      positive.push_back(truth[i] == c ? 1 : 0);
    }
    const std::vector<double> ranks = average_ranks(scores);
    double rank_sum = 0.0;
    for (std::size_t k = 0; k < ranks.size(); ++k) {
      if (positive[k]) rank_sum += ranks[k];
    }
    const double n_neg = static_cast<double>(mask.size() - n_pos);
    report.per_class_auc[c] =
        (rank_sum - static_cast<double>(n_pos) * (static_cast<double>(n_pos) + 1.0) / 2.0) /
        (static_cast<double>(n_pos) * n_neg);
  }
  return report;
}

}  // namespace gcnse::metrics
