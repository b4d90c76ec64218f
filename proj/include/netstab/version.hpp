#pragma once

namespace netstab {

inline constexpr const char* kVersion = "0.1.0";

}
