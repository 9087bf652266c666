#pragma once

namespace nnmr {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace nnmr
