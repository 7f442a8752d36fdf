#pragma once

#define NEWSAUDIT_VERSION_MAJOR 0
#define NEWSAUDIT_VERSION_MINOR 3
#define NEWSAUDIT_VERSION_PATCH 0
#define NEWSAUDIT_VERSION "0.3.0"

namespace newsaudit {

inline constexpr const char* version() { return NEWSAUDIT_VERSION; }

} // namespace newsaudit
