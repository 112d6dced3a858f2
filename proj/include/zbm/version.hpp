#pragma once

namespace zbm {

// Library version; also tags the on-disk prime cache format.
inline constexpr const char* kVersion = "1.0.0";
inline constexpr unsigned kPrimeCacheVersion = 1;

}  // namespace zbm
