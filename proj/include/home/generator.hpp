#pragma once

#include <cstdint>

#include "home/scene.hpp"

namespace home {

struct IntRange {
  int min = 0;
  int max = 0;
};

struct GeneratorParams {
  IntRange room_count{3, 6};
  IntRange objects_per_room{15, 22};
};

/// Seeded single-storey house: rectangular rooms on a grid with shared walls,
/// door gaps between consecutive rooms, furniture placed by rejection
/// sampling, one ceiling light per room and one sound source. A pure
/// function of (seed, params). Throws ParamError for impossible ranges.
House generate_house(std::uint64_t seed, const GeneratorParams& params = {});

}  // namespace home
