#pragma once

namespace selfrocket {

inline constexpr const char* kLibraryVersion = "0.1.0";

// Version tag of the serialized model container. Bump on any layout change.
inline constexpr int kModelFormatVersion = 1;

} // namespace selfrocket
