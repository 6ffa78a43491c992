#pragma once

namespace loglin {

inline const char* version_string() { return "loglin 0.1.0"; }

} // namespace loglin
