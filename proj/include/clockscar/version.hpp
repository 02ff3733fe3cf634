#pragma once

namespace clockscar {

inline constexpr const char* version() { return "0.1.0"; }

}  // namespace clockscar
