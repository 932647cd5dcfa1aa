#pragma once

#include <cstdint>
#include <string>

namespace fsim {

// The three control layers, ordered by scope.
enum class Layer : std::uint8_t { Agent = 0, Src = 1, Msm = 2 };

inline std::string to_string(Layer layer) {
    switch (layer) {
    case Layer::Agent: return "agent";
    case Layer::Src: return "src";
    case Layer::Msm: return "msm";
    }
    return "?";
}

} // namespace fsim
