#include "planefield/report.hpp"

#include <cstdio>
#include <sstream>

#include "json.hpp"

namespace planefield {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

ComparisonReport make_report(std::string statistic_name, double value, double threshold,
                             long long n_samples, std::map<std::string, std::string> details) {
  ComparisonReport r;
  r.statistic_name = std::move(statistic_name);
  r.value = value;
  r.threshold = threshold;
  r.n_samples = n_samples;
  r.passed = value <= threshold;
  r.details = std::move(details);
  return r;
}

std::string ComparisonReport::summary() const {
  std::ostringstream os;
  os << (passed ? "PASS" : "FAIL") << " " << statistic_name << " = " << format_double(value)
     << " (threshold " << format_double(threshold) << ", n = " << n_samples << ")";
  return os.str();
}

std::string ComparisonReport::to_json() const {
  nlohmann::json j;  // nlohmann::json keeps object keys sorted
  j["statistic_name"] = statistic_name;
  j["value"] = value;
  j["threshold"] = threshold;
  j["n_samples"] = n_samples;
  j["passed"] = passed;
  nlohmann::json d;
  for (const auto& [k, v] : details) d[k] = v;
  j["details"] = d;
  return j.dump(2);
}

}  // namespace planefield
