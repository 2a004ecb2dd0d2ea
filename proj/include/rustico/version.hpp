#ifndef RUSTICO_VERSION_HPP
#define RUSTICO_VERSION_HPP

namespace rustico {

inline constexpr const char* kVersion = "0.1.0";

} // namespace rustico

#endif
