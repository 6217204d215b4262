#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace kgcr {

enum class Correctness { Correct, CorrectWithNote, Incorrect };

std::string to_string(Correctness c);

// Correct iff predicted == {truth}; correct-with-note when the truth is
// among several candidates. Throws EMPTY_PREDICTION.
Correctness correctness(const std::set<std::string>& predicted,
                        const std::string& truth);

struct ExplanationTrace {
  std::string pipeline;
  std::vector<std::string> conclusion;
  std::set<std::string> scenes_used;
  std::string steps;
};

std::size_t knowledge_usage(const ExplanationTrace& t);

// Metric-by-submission score table; cells may be absent.
struct ScoreTable {
  std::vector<std::string> metrics;      // row names
  std::vector<std::string> submissions;  // column names
  std::map<std::pair<std::size_t, std::size_t>, double> cells;  // (row, col)

  std::optional<double> cell(std::size_t row, std::size_t col) const {
    auto it = cells.find({row, col});
    if (it == cells.end()) return std::nullopt;
    return it->second;
  }
};

// CSV with a header row naming the submissions; first field of each data
// row is the metric name; empty fields are absent cells.
ScoreTable parse_score_table(const std::string& csv);

struct ColumnStats {
  std::string submission;
  std::size_t count = 0;
  double mean = 0.0;
  double median = 0.0;
  double stddev = 0.0;  // sample by default
  double metric_average = 0.0;  // mean of the column's per-metric scores
};

// Aggregates over present cells only; throws EMPTY_COLUMN when a column
// has no scores. sample_sd selects sample vs population SD.
std::vector<ColumnStats> aggregate(const ScoreTable& t, bool sample_sd = true);

// Half-up decimal rounding, for presentation only.
double round_half_up(double x, int digits);

struct TTestResult {
  double t = 0.0;  // +/-infinity under the zero-variance convention
  int df = 0;
  double critical = 0.0;
  bool significant = false;
};

// Paired two-tailed t-test with a built-in critical-value table for
// df 1..30 and alpha in {0.05, 0.01}. Throws LENGTH_MISMATCH. With zero
// variance of the differences: significant with t = +/-inf when the mean
// difference is nonzero, else t = 0 and not significant.
TTestResult paired_t_test(const std::vector<double>& a,
                          const std::vector<double>& b, double alpha);

}  // namespace kgcr
