#pragma once

#include "msequiv/model.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace msequiv {

/// Halton sequence with a Cranley-Patterson rotation drawn from `seed`.
/// Points lie in the open unit cube (0, 1)^dim.
class HaltonSequence {
public:
    HaltonSequence(std::size_t dim, std::uint64_t seed);

    [[nodiscard]] std::vector<double> next();
    [[nodiscard]] std::size_t dimension() const noexcept { return shift_.size(); }

private:
    std::vector<double> shift_;
    std::uint64_t index_ = 1;
};

/// Maps a unit-cube point into the interior of the box.
std::vector<double> scale_to_box(const std::vector<double>& unit, const std::vector<Interval>& box);

}  // namespace msequiv
