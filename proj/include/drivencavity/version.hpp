#pragma once

namespace drivencavity {

// Recorded in every run manifest so outputs can be traced to the code that
// produced them.
inline constexpr const char* kVersion = "0.1.0";

} // namespace drivencavity
