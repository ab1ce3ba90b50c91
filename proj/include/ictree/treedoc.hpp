#pragma once

#include <string>

#include "ictree/tree.hpp"

namespace ictree {

// Versioned JSON document for a fitted tree: config echo, covariate schema,
// recursive node records with terminal curves as (q, p, mass) triples.
// Round-trip stable: export -> import -> export is byte-identical.
std::string tree_to_json(const Tree& tree);
Tree tree_from_json(const std::string& text);

void write_tree_file(const std::string& path, const Tree& tree);
Tree read_tree_file(const std::string& path);

// Indented text rendering with per-terminal quartile times where defined.
std::string render_tree_text(const Tree& tree);

}  // namespace ictree
