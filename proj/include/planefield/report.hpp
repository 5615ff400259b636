#pragma once

#include <map>
#include <string>

namespace planefield {

// Outcome of a statistical or numerical check. `passed` is always
// value <= threshold; the details map is serialized with stable (sorted) key
// order so reports are diffable.
struct ComparisonReport {
  std::string statistic_name;
  double value = 0;
  double threshold = 0;
  long long n_samples = 0;
  bool passed = false;
  std::map<std::string, std::string> details;

  std::string summary() const;  // one human-readable line
  std::string to_json() const;  // stable key order
};

ComparisonReport make_report(std::string statistic_name, double value, double threshold,
                             long long n_samples,
                             std::map<std::string, std::string> details = {});

// Round-trip-exact formatting for doubles (17 significant digits).
std::string format_double(double v);

}  // namespace planefield
