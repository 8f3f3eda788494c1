#ifndef GOC_VERSION_HPP_
#define GOC_VERSION_HPP_

namespace goc {

inline constexpr char const* kVersion = "0.1.0";

}  // namespace goc

#endif  // GOC_VERSION_HPP_
