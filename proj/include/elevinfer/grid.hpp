#pragma once

#include <vector>

#include "elevinfer/types.hpp"

namespace elev {

struct GridSpec {
    BoundingRect boundary;
    int rows = 1;
    int cols = 1;
};

// rows x cols disjoint tiles covering the boundary, row-major from the
// south-west corner. Throws DataError on a zero-area boundary.
std::vector<BoundingRect> segment_grid(const GridSpec& spec);

}  // namespace elev
