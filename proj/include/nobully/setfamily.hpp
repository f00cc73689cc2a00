#pragma once

// A family of n membership oracles X_1..X_n over the simplex, as used by the
// covering-witness computation. Closedness and the covering hypothesis are
// the caller's responsibility; violations of the latter surface as
// covering_error at concrete grid points.

#include <functional>
#include <span>
#include <vector>

#include "errors.hpp"

namespace nobully {

struct SetFamily {
  using Member = std::function<bool(std::span<const double>)>;

  int n = 0;
  std::vector<Member> members;

  void validate() const {
    if (n < 1) throw input_error("set family needs at least one set");
    if (members.size() != static_cast<std::size_t>(n))
      throw input_error("set family needs exactly one membership test per set");
    for (const auto& m : members)
      if (!m) throw input_error("set family has an empty membership test");
  }
};

}  // namespace nobully
