#include "drivepg/random.hpp"

#include <sstream>

#include "drivepg/errors.hpp"

namespace drivepg {

std::string serialize_rng(const Rng& rng) {
  std::ostringstream out;
  out << rng;
  return out.str();
}

Rng deserialize_rng(const std::string& text) {
  std::istringstream in(text);
  Rng rng;
  in >> rng;
  if (in.fail()) throw FormatError("rng", "malformed generator state");
  return rng;
}

}  // namespace drivepg
