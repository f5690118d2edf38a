#pragma once

#include "sopkit/oracle.hpp"

#include <string>
#include <vector>

namespace sopkit {

/// Tree-shaped pattern oracles for canonical SOP''_2 families: an atom's
/// parameters are the heap indices of a chain of n+1 nodes, and the rule looks
/// only at equality and comparability of those nodes, so the family is
/// 2-fbti by construction.
struct TreePattern {
    std::string name;
    int n = 1;
    std::string description;
};

/// The built-in corpus, each with a valid n.
const std::vector<TreePattern> &tree_patterns();

/// Throws OracleError for an unknown name or an n the rule does not support.
std::shared_ptr<PatternPlugin> make_tree_pattern(const std::string &name, int n);

} // namespace sopkit
