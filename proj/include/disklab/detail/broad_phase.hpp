#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "disklab/geometry.hpp"

namespace disklab::detail {

// Sorted pairs (a, b), a < b, of boxes that overlap once each is grown by slack.
// Boxes flagged in skip take no part.
std::vector<std::pair<std::uint32_t, std::uint32_t>> box_pairs(const std::vector<Box>& boxes, const std::vector<char>& skip,
                                                               double slack);

}  // namespace disklab::detail
