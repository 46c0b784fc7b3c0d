#pragma once

#include <span>
#include <vector>

#include "gcnse/tensor.hpp"

namespace gcnse::metrics {

struct EvalReport {
  double accuracy = 0.0;
  double auc = 0.0;
  double f1 = 0.0;
  std::vector<double> per_class_f1;   // length num_classes
  std::vector<double> per_class_auc;  // length num_classes; -1 when undefined
};

/// Fraction of masked nodes with pred == truth.
double accuracy(const std::vector<int>& pred, const std::vector<int>& truth,
                const std::vector<int>& mask);

/// Macro one-vs-rest AUC over classes present in the masked truth, rank-based
/// (Mann-Whitney) with ties counted 1/2. Throws when the mask holds a single
/// class.
double macro_auc(const Tensor& probs, const std::vector<int>& truth, const std::vector<int>& mask);

/// Unweighted mean of per-class 2PR/(P+R) over classes present in the masked
/// truth or predictions; a class with P+R = 0 scores 0.
double macro_f1(const std::vector<int>& pred, const std::vector<int>& truth,
                const std::vector<int>& mask, int num_classes);

/// Throws on constant input (undefined correlation).
double pearson(std::span<const double> x, std::span<const double> y);

/// Pearson of average ranks; ties share their rank mean.
double spearman(std::span<const double> x, std::span<const double> y);

std::vector<double> average_ranks(std::span<const double> x);

EvalReport evaluate(const Tensor& probs, const std::vector<int>& pred, const std::vector<int>& truth,
                    const std::vector<int>& mask, int num_classes);

}  // namespace gcnse::metrics
