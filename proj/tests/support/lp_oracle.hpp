#pragma once

#include <optional>

#include "strongtree/linear_model.hpp"

namespace oracle {

/// Optimum of a small bounded LP by enumerating every vertex (all choices of
/// n active inequalities). Integrality marks are ignored. nullopt if infeasible.
std::optional<double> lp_by_vertices(const strongtree::LinearModel& model);

}  // namespace oracle
