#pragma once

#include <map>
#include <string>
#include <vector>

#include "strongtree/dataset.hpp"
#include "strongtree/tree.hpp"

namespace strongtree {

struct GroupRates {
  int rows = 0;
  double positive_rate = 0.0;  // share predicted as class 1
  double true_positive_rate = 0.0;
  double false_positive_rate = 0.0;
};

struct Metrics {
  int rows = 0;
  int correct = 0;
  double accuracy = 0.0;
  std::vector<double> per_class_accuracy;  // NaN for classes without rows
  double balanced_accuracy = 0.0;          // mean over classes with rows
  double worst_case_accuracy = 0.0;
  std::vector<std::vector<int>> confusion;  // [true][predicted]
  std::map<std::string, GroupRates> groups;
};

/// Scores `tree` on `data`. With `group_column` set, also reports rates per
/// value of that source column (rates are meaningful for binary labels).
Metrics evaluate(const TrainedTree& tree, const BinaryDataset& data, const std::string& group_column = {});

std::string format_metrics(const Metrics& m, const std::vector<std::string>& class_names);

}  // namespace strongtree
