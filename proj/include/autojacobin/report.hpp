#pragma once

// CSV outputs (cost traces, recall curves) and the CSV reader used by the
// plotter. Numbers are written with %.17g so files are reproducible and
// round-trip exactly.

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "autojacobin/errors.hpp"
#include "autojacobin/hamming.hpp"
#include "autojacobin/trainer.hpp"

namespace ajb {

inline std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string trace_csv(const TrainReport& r) {
  std::ostringstream os;
  os << "iteration,total,recon,jacobian,binary,step,evals,fallback\n";
  for (const auto& t : r.trace)
    os << t.iteration << ',' << fmt_double(t.parts.total()) << ',' << fmt_double(t.parts.recon)
       << ',' << fmt_double(t.parts.jacobian) << ',' << fmt_double(t.parts.binary) << ','
       << fmt_double(t.step) << ',' << t.evals << ',' << (t.fallback ? 1 : 0) << '\n';
  return os.str();
}

/// Full-training-set objective after each epoch (epoch 0 = initialization).
inline std::string epoch_cost_csv(const TrainReport& r) {
  std::ostringstream os;
  os << "epoch,total,recon,jacobian,binary\n";
  for (const auto& e : r.epoch_costs)
    os << e.epoch << ',' << fmt_double(e.parts.total()) << ',' << fmt_double(e.parts.recon) << ','
       << fmt_double(e.parts.jacobian) << ',' << fmt_double(e.parts.binary) << '\n';
  return os.str();
}

inline std::string recall_csv(const RecallCurve& c) {
  std::ostringstream os;
  os << "i,recall\n";
  for (std::size_t i = 0; i < c.values.size(); ++i) os << (i + 1) << ',' << fmt_double(c.values[i]) << '\n';
  os << "m_recall," << fmt_double(c.m_recall) << '\n';
  return os.str();
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw Error("write to '" + path + "' failed");
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "' for reading");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    out.push_back(cell);
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline CsvTable parse_csv(const std::string& text) {
  CsvTable t;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (first) {
      t.header = split_csv_line(line);
      first = false;
    } else {
      t.rows.push_back(split_csv_line(line));
    }
  }
  return t;
}

inline bool parse_number(const std::string& s, double& out) {
  if (s.empty()) return false;
  std::size_t used = 0;
  try {
    out = std::stod(s, &used);
  } catch (const std::exception&) {
    return false;
  }
  return used == s.size();
}

}  // namespace ajb
