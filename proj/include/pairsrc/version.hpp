#pragma once

namespace pairsrc {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace pairsrc
