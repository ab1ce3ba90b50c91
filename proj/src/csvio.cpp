#include "ictree/csvio.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace ictree {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

std::string strip(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

[[noreturn]] void fail(int line, const std::string& what) {
  throw std::invalid_argument("line " + std::to_string(line) + ": " + what);
}

double parse_number(const std::string& text, int line, const std::string& col) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(text, &pos);
    if (pos != text.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    fail(line, "column '" + col + "': not a number: '" + text + "'");
  }
}

}  // namespace

std::string format_double(double x) {
  if (x == kInf) return "inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

ParsedDataset parse_dataset(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw std::invalid_argument("empty dataset: no header");
  auto cols = split(strip(header), ',');
  if (cols.size() < 2 || strip(cols[0]) != "left" || strip(cols[1]) != "right")
    throw std::invalid_argument("header must start with 'left,right'");

  ParsedDataset ds;
  struct ColSpec {
    std::string name;
    CovariateKind kind;
    std::vector<double> scores;
  };
  std::vector<ColSpec> specs;
  for (std::size_t c = 2; c < cols.size(); ++c) {
    const std::string col = strip(cols[c]);
    const auto sep = col.find(':');
    if (sep == std::string::npos)
      throw std::invalid_argument("covariate column '" + col + "' needs a :type tag");
    ColSpec spec;
    spec.name = col.substr(0, sep);
    std::string type = col.substr(sep + 1);
    if (type == "num") {
      spec.kind = CovariateKind::numeric;
    } else if (type == "nom") {
      spec.kind = CovariateKind::nominal;
    } else if (type.rfind("ord(", 0) == 0 && type.back() == ')') {
      spec.kind = CovariateKind::ordinal;
      for (const auto& s : split(type.substr(4, type.size() - 5), '|'))
        spec.scores.push_back(parse_number(strip(s), 1, spec.name));
      if (spec.scores.size() < 2)
        throw std::invalid_argument("ordinal column '" + spec.name + "' needs >= 2 scores");
      for (std::size_t i = 1; i < spec.scores.size(); ++i)
        if (!(spec.scores[i - 1] < spec.scores[i]))
          throw std::invalid_argument("ordinal column '" + spec.name +
                                      "': scores must be strictly increasing");
    } else {
      throw std::invalid_argument("unknown type tag in column '" + col + "'");
    }
    specs.push_back(std::move(spec));
  }

  std::vector<std::vector<std::string>> nominal_labels(specs.size());
  std::vector<std::vector<double>> values(specs.size());

  std::string line;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string body = strip(line);
    if (body.empty()) continue;
    auto cells = split(body, ',');
    if (cells.size() != cols.size())
      fail(lineno, "expected " + std::to_string(cols.size()) + " fields, found " +
                       std::to_string(cells.size()));

    const std::string left_text = strip(cells[0]);
    const std::string right_text = strip(cells[1]);
    if (left_text.empty()) fail(lineno, "missing value in column 'left'");
    const double left = parse_number(left_text, lineno, "left");
    double right;
    if (right_text.empty() || right_text == "inf") {
      right = kInf;
    } else {
      right = parse_number(right_text, lineno, "right");
    }
    if (left < 0.0) fail(lineno, "left endpoint must be nonnegative");
    if (right < left) fail(lineno, "right < left");
    if (right == left) {
      ds.observations.push_back(exact_obs(left));
    } else if (right == kInf) {
      ds.observations.push_back(right_censored_obs(left));
    } else {
      ds.observations.push_back(interval_obs(left, right));
    }

    for (std::size_t c = 0; c < specs.size(); ++c) {
      const std::string cell = strip(cells[c + 2]);
      if (cell.empty()) fail(lineno, "missing value in column '" + specs[c].name + "'");
      switch (specs[c].kind) {
        case CovariateKind::numeric:
          values[c].push_back(parse_number(cell, lineno, specs[c].name));
          break;
        case CovariateKind::ordinal: {
          const double v = parse_number(cell, lineno, specs[c].name);
          if (!std::binary_search(specs[c].scores.begin(), specs[c].scores.end(), v))
            fail(lineno, "column '" + specs[c].name + "': value " + cell +
                             " is not a declared ordinal score");
          values[c].push_back(v);
          break;
        }
        case CovariateKind::nominal:
          nominal_labels[c].push_back(cell);
          values[c].push_back(0.0);  // filled after levels are known
          break;
      }
    }
  }
  if (ds.observations.empty()) throw std::invalid_argument("dataset has no rows");

  for (std::size_t c = 0; c < specs.size(); ++c) {
    Covariate cov;
    cov.name = specs[c].name;
    cov.kind = specs[c].kind;
    cov.level_scores = specs[c].scores;
    if (cov.kind == CovariateKind::nominal) {
      std::vector<std::string> levels = nominal_labels[c];
      std::sort(levels.begin(), levels.end());
      levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
      cov.levels = levels;
      cov.values.reserve(nominal_labels[c].size());
      for (const auto& label : nominal_labels[c])
        cov.values.push_back(static_cast<double>(
            std::lower_bound(levels.begin(), levels.end(), label) - levels.begin()));
    } else {
      cov.values = std::move(values[c]);
    }
    ds.covariates.push_back(std::move(cov));
  }
  return ds;
}

ParsedDataset parse_dataset_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset file: " + path);
  return parse_dataset(in);
}

void write_dataset(std::ostream& out, const std::vector<CensoredObservation>& obs,
                   const std::vector<Covariate>& covariates) {
  out << "left,right";
  for (const auto& c : covariates) {
    out << ',' << c.name << ':';
    switch (c.kind) {
      case CovariateKind::numeric: out << "num"; break;
      case CovariateKind::nominal: out << "nom"; break;
      case CovariateKind::ordinal: {
        out << "ord(";
        for (std::size_t i = 0; i < c.level_scores.size(); ++i)
          out << (i ? "|" : "") << format_double(c.level_scores[i]);
        out << ')';
        break;
      }
    }
  }
  out << '\n';
  for (std::size_t i = 0; i < obs.size(); ++i) {
    out << format_double(obs[i].left) << ',' << format_double(obs[i].right);
    for (const auto& c : covariates) {
      out << ',';
      if (c.kind == CovariateKind::nominal)
        out << c.levels[static_cast<std::size_t>(c.values[i])];
      else
        out << format_double(c.values[i]);
    }
    out << '\n';
  }
}

std::vector<double> prediction_row(const ParsedDataset& data, const Tree& tree, int row) {
  std::vector<double> out(tree.covariates.size(), 0.0);
  for (std::size_t c = 0; c < tree.covariates.size(); ++c) {
    const auto& info = tree.covariates[c];
    const Covariate* src = nullptr;
    for (const auto& dc : data.covariates)
      if (dc.name == info.name) {
        src = &dc;
        break;
      }
    if (!src) throw std::invalid_argument("prediction data lacks covariate '" + info.name + "'");
    if (src->kind != info.kind)
      throw std::invalid_argument("covariate '" + info.name + "' type differs from the tree");
    const double v = src->values[static_cast<std::size_t>(row)];
    if (info.kind == CovariateKind::nominal) {
      const auto& label = src->levels[static_cast<std::size_t>(v)];
      const auto it = std::find(info.levels.begin(), info.levels.end(), label);
      out[c] = it == info.levels.end() ? -1.0
                                       : static_cast<double>(it - info.levels.begin());
    } else {
      out[c] = v;
    }
  }
  return out;
}

}  // namespace ictree
