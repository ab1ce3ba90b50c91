#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "ictree/tree.hpp"

namespace ictree {

// Typed comma-separated dataset: header `left,right,name:type,...` with type
// `num`, `nom`, or `ord(s1|s2|...)`. Right censoring is `inf` or an empty
// right field; exact events have left == right. No missing values.
struct ParsedDataset {
  std::vector<CensoredObservation> observations;
  std::vector<Covariate> covariates;
};

ParsedDataset parse_dataset(std::istream& in);
ParsedDataset parse_dataset_file(const std::string& path);

void write_dataset(std::ostream& out, const std::vector<CensoredObservation>& obs,
                   const std::vector<Covariate>& covariates);

// Shortest exact decimal representation (17 significant digits).
std::string format_double(double x);

// Row values aligned with the tree's covariates, matched by name; nominal
// labels unknown to the tree map to -1 and only fail if a split needs them.
std::vector<double> prediction_row(const ParsedDataset& data, const Tree& tree, int row);

}  // namespace ictree
