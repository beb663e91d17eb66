#pragma once

namespace surprise {

inline constexpr const char* kVersion = "0.1.0";

}
