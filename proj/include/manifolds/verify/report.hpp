#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

namespace manifolds::verify {

using json = nlohmann::ordered_json;

struct SuiteDims {
  int n = 0;       // truncation dimension (0 = suite default)
  int p = 0;       // frame width
  int k = 0;       // free rank
  int window = 0;  // l2 window radius
};

struct SuiteConfig {
  std::string suite_name;
  SuiteDims dims;
  int trials = 0;  // 0 = suite default
  std::uint64_t seed = 20260810ull;
  std::map<std::string, double> tolerances;  // overrides over suite defaults
  std::string output_path;
  std::string csv_path;
};

enum class Bound { upper, lower };  // pass iff value <= bound / value >= bound

struct CheckRecord {
  std::string check_id;
  double value = 0.0;
  double bound = 0.0;
  Bound direction = Bound::upper;
  double margin = 0.0;  // >= 0 iff passed
  bool passed = false;
};

struct SuiteReport {
  std::string suite_name;
  SuiteDims dims;
  int trials = 0;
  std::uint64_t seed = 0;
  std::map<std::string, double> tolerances;  // resolved values
  bool passed = true;
  std::vector<CheckRecord> checks;
  json worst_witness;  // serialized inputs of the worst-margin check
  std::string error;   // nonempty on internal failure
  double runtime_ms = 0.0;

  json to_json(bool zero_runtime = false) const {
    json j;
    j["suite"] = suite_name;
    json cfg;
    cfg["n"] = dims.n;
    cfg["p"] = dims.p;
    cfg["k"] = dims.k;
    cfg["window"] = dims.window;
    cfg["trials"] = trials;
    cfg["seed"] = seed;
    json tols;
    for (const auto& [name, value] : tolerances) tols[name] = value;
    cfg["tolerances"] = tols;
    j["config"] = cfg;
    j["passed"] = passed;
    json checks_json = json::array();
    for (const auto& c : checks) {
      json cj;
      cj["id"] = c.check_id;
      cj["value"] = c.value;
      cj["bound"] = c.bound;
      cj["direction"] = c.direction == Bound::upper ? "<=" : ">=";
      cj["margin"] = c.margin;
      cj["passed"] = c.passed;
      checks_json.push_back(cj);
    }
    j["checks"] = checks_json;
    j["worst_witness"] = worst_witness.is_null() ? json() : worst_witness;
    j["error"] = error;
    j["runtime_ms"] = zero_runtime ? 0.0 : runtime_ms;
    return j;
  }

  std::string to_csv() const {
    std::string out = "suite,check_id,value,bound,margin\n";
    char buf[256];
    for (const auto& c : checks) {
      std::snprintf(buf, sizeof(buf), "%s,%s,%.17g,%.17g,%.17g\n", suite_name.c_str(),
                    c.check_id.c_str(), c.value, c.bound, c.margin);
      out += buf;
    }
    return out;
  }
};

inline json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

inline json matrix_to_json(const Eigen::MatrixXcd& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j)
      row.push_back(json::array({m(i, j).real(), m(i, j).imag()}));
    rows.push_back(row);
  }
  return rows;
}

inline json vector_to_json(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (int i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

// Collects check records; every failing check gets a witness, and the
// worst-margin witnessed check is surfaced on the report.
class ReportBuilder {
 public:
  explicit ReportBuilder(SuiteReport* report) : report_(report) {}

  void check(const std::string& id, double value, double bound, Bound direction,
             json witness = json()) {
    CheckRecord rec;
    rec.check_id = id;
    rec.value = value;
    rec.bound = bound;
    rec.direction = direction;
    rec.margin = direction == Bound::upper ? bound - value : value - bound;
    rec.passed = rec.margin >= 0.0;
    report_->checks.push_back(rec);
    if (!rec.passed) report_->passed = false;
    if (witness.is_null() && !rec.passed) {
      witness = json{{"check", id}, {"value", value}, {"bound", bound}};
    }
    if (!witness.is_null() && rec.margin < worst_margin_) {
      worst_margin_ = rec.margin;
      witness["check"] = id;
      report_->worst_witness = witness;
    }
  }

  void check_true(const std::string& id, bool ok, json witness = json()) {
    check(id, ok ? 1.0 : 0.0, 1.0, Bound::lower, std::move(witness));
  }

 private:
  SuiteReport* report_;
  double worst_margin_ = std::numeric_limits<double>::infinity();
};

}  // namespace manifolds::verify
