#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "transnet/network.hpp"

namespace transnet {

// Shortest round-trip decimal form (std::to_chars), so emitted files are
// byte-stable and parse back to the exact double.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& s) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("parse_double: cannot parse '" + s + "'");
  }
}

inline std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  return in;
}

inline std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  return out;
}

// Counters surfaced to the caller instead of printing from library code.
struct EdgeListReport {
  int self_loops_dropped = 0;
  int duplicates_dropped = 0;
};

// Parses "i j" pairs (whitespace separated, zero based). Ordering within the
// file is irrelevant; both orientations denote the same undirected edge.
inline std::vector<std::pair<int, int>> read_edge_list(const std::string& path) {
  auto in = open_input(path);
  std::vector<std::pair<int, int>> edges;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ss(line);
    long i = 0, j = 0;
    if (!(ss >> i)) continue;  // blank line
    if (!(ss >> j))
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": expected 'i j' pair");
    std::string rest;
    if (ss >> rest)
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": trailing tokens");
    if (i < 0 || j < 0)
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": negative node index");
    edges.emplace_back(static_cast<int>(i), static_cast<int>(j));
  }
  return edges;
}

// Builds the symmetric binary matrix over n nodes. Self-loops are dropped
// and duplicates merged (counts reported); out-of-range indices are an error.
inline BinaryNetwork edges_to_network(const std::vector<std::pair<int, int>>& edges, int n,
                                      EdgeListReport* report = nullptr) {
  if (n < 1) throw std::invalid_argument("edges_to_network: need n >= 1");
  BinaryNetwork net;
  net.adj = Matrix::Zero(n, n);
  EdgeListReport rep;
  for (const auto& [i, j] : edges) {
    if (i >= n || j >= n)
      throw std::runtime_error("edge (" + std::to_string(i) + "," + std::to_string(j) +
                               ") out of range for n=" + std::to_string(n));
    if (i == j) {
      ++rep.self_loops_dropped;
      continue;
    }
    if (net.adj(i, j) != 0.0) {
      ++rep.duplicates_dropped;
      continue;
    }
    net.adj(i, j) = 1.0;
    net.adj(j, i) = 1.0;
  }
  if (report) *report = rep;
  return net;
}

// Upper-triangle edge list, one "i j" per line with i < j.
inline void write_edge_list(const std::string& path, const BinaryNetwork& net) {
  auto out = open_output(path);
  const int n = net.n();
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (net.adj(i, j) != 0.0) out << i << ' ' << j << '\n';
    }
  }
}

// One label per line; -1 (or NA) marks an unlabeled node.
inline std::vector<int> read_labels(const std::string& path) {
  auto in = open_input(path);
  std::vector<int> labels;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string token;
    std::istringstream ss(line);
    if (!(ss >> token)) continue;
    if (token == "NA" || token == "na") {
      labels.push_back(-1);
      continue;
    }
    try {
      labels.push_back(std::stoi(token));
    } catch (const std::exception&) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": bad label '" + token + "'");
    }
  }
  return labels;
}

inline void write_labels(const std::string& path, const std::vector<int>& labels) {
  auto out = open_output(path);
  for (int l : labels) out << l << '\n';
}

// Plain-text key=value metadata, order preserving on write.
inline void write_kv(const std::string& path,
                     const std::vector<std::pair<std::string, std::string>>& entries) {
  auto out = open_output(path);
  for (const auto& [key, value] : entries) out << key << '=' << value << '\n';
}

inline std::map<std::string, std::string> read_kv(const std::string& path) {
  auto in = open_input(path);
  std::map<std::string, std::string> kv;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": expected key=value");
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return kv;
}

}  // namespace transnet
