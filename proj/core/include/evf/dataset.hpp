#pragma once

#include <cstddef>
#include <vector>

#include "evf/linalg.hpp"

namespace evf {

/// Sliding-window samples: each input is a (window x features) matrix whose
/// rows precede the scalar next-hour target chronologically.
struct WindowedDataset {
    std::vector<Matrix> inputs;
    Vector targets;
    std::size_t window = 0;
    std::size_t slide = 1;
    std::size_t features = 0;

    std::size_t size() const { return inputs.size(); }
};

}  // namespace evf
