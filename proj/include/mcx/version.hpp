#pragma once

namespace mcx {

inline constexpr const char* tool_version = "0.1.0";

// Identifies the toy prefix machine revision; bump if the instruction set
// or cost model ever changes, since persisted tables depend on it.
inline constexpr const char* machine_version = "pm1";

} // namespace mcx
