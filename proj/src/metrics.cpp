#include "strongtree/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace strongtree {

Metrics evaluate(const TrainedTree& tree, const BinaryDataset& data, const std::string& group_column) {
  Metrics m;
  const std::vector<int> pred = predict_all(tree, data);
  const int K = static_cast<int>(tree.class_names.size());
  m.rows = data.n_rows();
  m.confusion.assign(K, std::vector<int>(K, 0));
  for (int i = 0; i < m.rows; ++i) {
    ++m.confusion[data.y[i]][pred[i]];
    m.correct += pred[i] == data.y[i];
  }
  m.accuracy = m.rows ? static_cast<double>(m.correct) / m.rows : 0.0;
  double sum = 0.0;
  int seen = 0;
  m.worst_case_accuracy = 1.0;
  for (int k = 0; k < K; ++k) {
    int total = 0;
    for (int c : m.confusion[k]) total += c;
    if (total == 0) {
      m.per_class_accuracy.push_back(std::numeric_limits<double>::quiet_NaN());
      continue;
    }
    const double a = static_cast<double>(m.confusion[k][k]) / total;
    m.per_class_accuracy.push_back(a);
    sum += a;
    ++seen;
    m.worst_case_accuracy = std::min(m.worst_case_accuracy, a);
  }
  m.balanced_accuracy = seen ? sum / seen : 0.0;
  if (!seen) m.worst_case_accuracy = 0.0;

  if (!group_column.empty()) {
    const std::vector<std::string>& groups = data.attribute(group_column);
    std::map<std::string, std::array<int, 5>> tally;  // rows, predicted 1, positives, TP, FP
    for (int i = 0; i < m.rows; ++i) {
      auto& t = tally[groups[i]];
      ++t[0];
      t[1] += pred[i] == 1;
      t[2] += data.y[i] == 1;
      t[3] += data.y[i] == 1 && pred[i] == 1;
      t[4] += data.y[i] != 1 && pred[i] == 1;
    }
    for (const auto& [g, t] : tally) {
      GroupRates r;
      r.rows = t[0];
      r.positive_rate = static_cast<double>(t[1]) / t[0];
      r.true_positive_rate = t[2] ? static_cast<double>(t[3]) / t[2] : std::numeric_limits<double>::quiet_NaN();
      const int negatives = t[0] - t[2];
      r.false_positive_rate = negatives ? static_cast<double>(t[4]) / negatives : std::numeric_limits<double>::quiet_NaN();
      m.groups[g] = r;
    }
  }
  return m;
}

std::string format_metrics(const Metrics& m, const std::vector<std::string>& class_names) {
  std::ostringstream out;
  char buf[128];
  std::snprintf(buf, sizeof buf, "rows=%d correct=%d accuracy=%.4f", m.rows, m.correct, m.accuracy);
  out << buf << "\n";
  std::snprintf(buf, sizeof buf, "balanced_accuracy=%.4f worst_case_accuracy=%.4f", m.balanced_accuracy,
                m.worst_case_accuracy);
  out << buf << "\n";
  for (std::size_t k = 0; k < m.per_class_accuracy.size(); ++k) {
    std::snprintf(buf, sizeof buf, "class %s accuracy=%.4f", class_names[k].c_str(), m.per_class_accuracy[k]);
    out << buf << "\n";
  }
  out << "confusion (rows true, columns predicted):\n";
  out << "true\\pred";
  for (const std::string& c : class_names) out << "\t" << c;
  out << "\n";
  for (std::size_t k = 0; k < m.confusion.size(); ++k) {
    out << class_names[k];
    for (int c : m.confusion[k]) out << "\t" << c;
    out << "\n";
  }
  for (const auto& [g, r] : m.groups) {
    std::snprintf(buf, sizeof buf, "group %s rows=%d positive_rate=%.4f tpr=%.4f fpr=%.4f", g.c_str(), r.rows,
                  r.positive_rate, r.true_positive_rate, r.false_positive_rate);
    out << buf << "\n";
  }
  return out.str();
}

}  // namespace strongtree
