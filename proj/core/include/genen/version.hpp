#pragma once

namespace genen {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace genen
