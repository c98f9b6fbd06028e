#pragma once

namespace duhamel {

inline constexpr const char* kVersion = "0.1.0";

} // namespace duhamel
