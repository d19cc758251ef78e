#include <algorithm>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "mlnec/error.hpp"
#include "mlnec/results.hpp"

namespace mlnec {

namespace {

std::vector<std::size_t> order_by_fluent_time(const std::vector<QueryAtom>& atoms) {
  std::vector<std::size_t> idx(atoms.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (atoms[a].fluent != atoms[b].fluent) return atoms[a].fluent < atoms[b].fluent;
    return atoms[a].time < atoms[b].time;
  });
  return idx;
}

}  // namespace

std::string serialize_results(const MarginalTable& table) {
  std::string out = "time,fluent,probability\n";
  char buf[32];
  for (std::size_t i : order_by_fluent_time(table.atoms)) {
    std::snprintf(buf, sizeof buf, "%.4f", table.probability[i]);
    out += std::to_string(table.atoms[i].time) + "," + table.atoms[i].fluent + "," + buf + "\n";
  }
  return out;
}

std::string serialize_results(const MapAssignment& assignment) {
  std::string out = "time,fluent,truth\n";
  for (std::size_t i : order_by_fluent_time(assignment.atoms))
    out += std::to_string(assignment.atoms[i].time) + "," + assignment.atoms[i].fluent + "," +
           (assignment.truth[i] ? "true" : "false") + "\n";
  return out;
}

std::vector<ResultRow> parse_results(std::string_view csv) {
  std::vector<ResultRow> rows;
  std::istringstream in{std::string(csv)};
  std::string line;
  int lineno = 0;
  bool header = false;
  bool decision_column = false;  // recognize output: probability,recognised
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!header) {
      if (line.rfind("time,fluent,", 0) != 0) throw ParseError("expected results header", lineno, 1);
      header = true;
      decision_column = line == "time,fluent,probability,recognised";
      continue;
    }
    if (decision_column) line.erase(line.rfind(','));
    auto first = line.find(',');
    auto last = line.rfind(',');
    if (first == std::string::npos || first == last) throw ParseError("malformed results row", lineno, 1);
    ResultRow r;
    try {
      r.time = std::stoi(line.substr(0, first));
    } catch (const std::exception&) {
      throw ParseError("bad time field", lineno, 1);
    }
    r.fluent = line.substr(first + 1, last - first - 1);
    std::string v = line.substr(last + 1);
    if (v == "true")
      r.value = 1.0;
    else if (v == "false")
      r.value = 0.0;
    else {
      try {
        r.value = std::stod(v);
      } catch (const std::exception&) {
        throw ParseError("bad value field", lineno, static_cast<int>(last) + 2);
      }
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace mlnec
