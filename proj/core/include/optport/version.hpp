#ifndef OPTPORT_VERSION_HPP
#define OPTPORT_VERSION_HPP

namespace optport {

inline constexpr const char* kVersion = "0.1.0";

} // namespace optport

#endif
