#include "kgcr/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "kgcr/error.hpp"

namespace kgcr {

std::string to_string(Correctness c) {
  switch (c) {
    case Correctness::Correct: return "correct";
    case Correctness::CorrectWithNote: return "correct_with_note";
    case Correctness::Incorrect: return "incorrect";
  }
  return "";
}

Correctness correctness(const std::set<std::string>& predicted,
                        const std::string& truth) {
  if (predicted.empty())
    throw Error("EMPTY_PREDICTION", "no suspects predicted");
  if (predicted.size() == 1 && *predicted.begin() == truth)
    return Correctness::Correct;
  if (predicted.count(truth)) return Correctness::CorrectWithNote;
  return Correctness::Incorrect;
}

std::size_t knowledge_usage(const ExplanationTrace& t) {
  return t.scenes_used.size();
}

ScoreTable parse_score_table(const std::string& csv) {
  ScoreTable table;
  std::istringstream in(csv);
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
      if (c == ',') {
        fields.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
    fields.push_back(cur);
    if (header) {
      for (std::size_t i = 1; i < fields.size(); i++)
        table.submissions.push_back(fields[i]);
      header = false;
      continue;
    }
    std::size_t row = table.metrics.size();
    table.metrics.push_back(fields[0]);
    for (std::size_t i = 1; i < fields.size() && i - 1 < table.submissions.size();
         i++) {
      std::string f = fields[i];
      f.erase(std::remove_if(f.begin(), f.end(), ::isspace), f.end());
      if (f.empty()) continue;
      double v = std::stod(f);
      if (v < 1.0 || v > 5.0)
        throw Error("SCORE_OUT_OF_RANGE",
                    "score " + f + " outside [1,5] for metric " + fields[0]);
      table.cells[{row, i - 1}] = v;
    }
  }
  return table;
}

double round_half_up(double x, int digits) {
  double scale = std::pow(10.0, digits);
  return std::floor(x * scale + 0.5) / scale;
}

std::vector<ColumnStats> aggregate(const ScoreTable& t, bool sample_sd) {
  std::vector<ColumnStats> out;
  for (std::size_t col = 0; col < t.submissions.size(); col++) {
    std::vector<double> values;
    for (std::size_t row = 0; row < t.metrics.size(); row++)
      if (auto v = t.cell(row, col)) values.push_back(*v);
    if (values.empty())
      throw Error("EMPTY_COLUMN",
                  "submission " + t.submissions[col] + " has no scores");
    ColumnStats s;
    s.submission = t.submissions[col];
    s.count = values.size();
    double sum = 0.0;
    for (double v : values) sum += v;
    s.mean = sum / static_cast<double>(values.size());
    s.metric_average = s.mean;
    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    std::size_t n = sorted.size();
    s.median = n % 2 ? sorted[n / 2]
                     : (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0;
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    if (n == 1) {
      s.stddev = 0.0;
    } else {
      double denom = sample_sd ? static_cast<double>(n - 1)
                               : static_cast<double>(n);
      s.stddev = std::sqrt(ss / denom);
    }
    out.push_back(std::move(s));
  }
  return out;
}

namespace {

// Two-tailed critical values of Student's t, df 1..30.
const double kCritical05[30] = {
    12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228,
    2.201,  2.179, 2.160, 2.145, 2.131, 2.120, 2.110, 2.101, 2.093, 2.086,
    2.080,  2.074, 2.069, 2.064, 2.060, 2.056, 2.052, 2.048, 2.045, 2.042};
const double kCritical01[30] = {
    63.657, 9.925, 5.841, 4.604, 4.032, 3.707, 3.499, 3.355, 3.250, 3.169,
    3.106,  3.055, 3.012, 2.977, 2.947, 2.921, 2.898, 2.878, 2.861, 2.845,
    2.831,  2.819, 2.807, 2.797, 2.787, 2.779, 2.771, 2.763, 2.756, 2.750};

double critical_value(int df, double alpha) {
  if (df < 1 || df > 30)
    throw Error("DF_OUT_OF_RANGE",
                "critical-value table covers df 1..30, got " +
                    std::to_string(df));
  if (alpha == 0.05) return kCritical05[df - 1];
  if (alpha == 0.01) return kCritical01[df - 1];
  throw Error("BAD_ALPHA", "alpha must be 0.05 or 0.01");
}

}  // namespace

TTestResult paired_t_test(const std::vector<double>& a,
                          const std::vector<double>& b, double alpha) {
  if (a.size() != b.size())
    throw Error("LENGTH_MISMATCH", "paired samples differ in length");
  if (a.size() < 2)
    throw Error("LENGTH_MISMATCH", "need at least 2 pairs");
  std::size_t n = a.size();
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; i++) d[i] = a[i] - b[i];
  double mean = 0.0;
  for (double x : d) mean += x;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double x : d) ss += (x - mean) * (x - mean);
  double sd = std::sqrt(ss / static_cast<double>(n - 1));

  TTestResult r;
  r.df = static_cast<int>(n) - 1;
  r.critical = critical_value(r.df, alpha);
  if (sd == 0.0) {
    if (mean == 0.0) {
      r.t = 0.0;
      r.significant = false;
    } else {
      r.t = mean > 0 ? std::numeric_limits<double>::infinity()
                     : -std::numeric_limits<double>::infinity();
      r.significant = true;
    }
    return r;
  }
  r.t = mean / (sd / std::sqrt(static_cast<double>(n)));
  r.significant = std::abs(r.t) > r.critical;
  return r;
}

}  // namespace kgcr
