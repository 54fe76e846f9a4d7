#pragma once

// CPLEX LP text writer, for handing a model to an external solver.

#include <cctype>
#include <cmath>
#include <cstdio>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "shiftplan/milp/model.hpp"

namespace shiftplan::milp {

namespace detail {

inline std::string lp_number(double v) {
  if (v == kInf) return "+inf";
  if (v == -kInf) return "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline bool lp_name_char(char c) {
  if (std::isalnum(static_cast<unsigned char>(c))) return true;
  static constexpr std::string_view extra = "!\"#$%&()/,.;?@_`'{}|~";
  return extra.find(c) != std::string_view::npos;
}

/// Makes names legal LP identifiers and unique.
inline std::vector<std::string> lp_names(const std::vector<std::string>& raw, const char* fallback) {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  out.reserve(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    std::string name;
    for (char c : raw[i]) name += lp_name_char(c) ? c : '_';
    if (name.empty()) name = fallback + std::to_string(i);
    const char first = name.front();
    if (std::isdigit(static_cast<unsigned char>(first)) || first == '.' || first == 'e' || first == 'E')
      name = std::string(fallback) + "_" + name;
    if (seen.count(name) != 0) name += "_" + std::to_string(i);
    seen.insert(name);
    out.push_back(std::move(name));
  }
  return out;
}

/// Appends " + 3 x" style terms, wrapping long lines.
class LinearWriter {
 public:
  explicit LinearWriter(std::string& out) : out_(out) {}

  void term(double coef, const std::string& var) {
    if (count_ > 0 && count_ % 8 == 0) out_ += "\n   ";
    if (coef < 0.0) {
      out_ += count_ == 0 ? " -" : " - ";
      coef = -coef;
    } else if (count_ > 0) {
      out_ += " + ";
    } else {
      out_ += " ";
    }
    out_ += lp_number(coef);
    out_ += ' ';
    out_ += var;
    ++count_;
  }
  int count() const { return count_; }

 private:
  std::string& out_;
  int count_ = 0;
};

}  // namespace detail

inline std::string export_lp(const MilpModel& model) {
  model.validate();
  const auto vars = detail::lp_names(model.names, "v");
  std::vector<std::string> raw_rows;
  raw_rows.reserve(model.rows.size());
  for (const auto& r : model.rows) raw_rows.push_back(r.name);
  const auto rows = detail::lp_names(raw_rows, "c");

  std::string out = "\\ shiftplan model: " + std::to_string(model.num_vars()) + " variables, " +
                    std::to_string(model.num_rows()) + " rows\n";
  out += "Maximize\n obj:";
  {
    detail::LinearWriter w(out);
    for (std::size_t j = 0; j < vars.size(); ++j)
      if (model.objective[j] != 0.0) w.term(model.objective[j], vars[j]);
    if (w.count() == 0 && !vars.empty()) w.term(0.0, vars.front());
  }
  out += "\nSubject To\n";
  for (std::size_t i = 0; i < model.rows.size(); ++i) {
    const Row& row = model.rows[i];
    out += " " + rows[i] + ":";
    detail::LinearWriter w(out);
    for (const auto& t : row.terms)
      if (t.coef != 0.0) w.term(t.coef, vars[static_cast<std::size_t>(t.var)]);
    if (w.count() == 0) {
      if (vars.empty()) {
        out.resize(out.size() - rows[i].size() - 2);  // nothing to write the row against
        continue;
      }
      w.term(0.0, vars.front());
    }
    out += row.sense == Sense::LessEqual ? " <= " : row.sense == Sense::Equal ? " = " : " >= ";
    out += detail::lp_number(row.rhs);
    out += '\n';
  }
  out += "Bounds\n";
  for (std::size_t j = 0; j < vars.size(); ++j) {
    const double lo = model.lower[j], hi = model.upper[j];
    if (lo == -kInf && hi == kInf) {
      out += " " + vars[j] + " free\n";
    } else if (lo == hi) {
      out += " " + vars[j] + " = " + detail::lp_number(lo) + "\n";
    } else {
      out += " " + detail::lp_number(lo) + " <= " + vars[j] + " <= " + detail::lp_number(hi) + "\n";
    }
  }
  out += "Generals\n";
  for (std::size_t j = 0; j < vars.size(); ++j)
    if (model.integer[j]) out += " " + vars[j] + "\n";
  out += "End\n";
  return out;
}

}  // namespace shiftplan::milp
