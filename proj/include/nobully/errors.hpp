#pragma once

// Error taxonomy shared across the library. Everything derives from
// nobully::error so callers can catch the whole family at once; the CLI maps
// the concrete types onto process exit codes.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace nobully {

class error : public std::runtime_error {
 public:
  explicit error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed or out-of-domain user input (bad profile, bad expression binding,
// non-bijective endowment, ...).
class input_error : public error {
 public:
  using error::error;
};

// An exhaustive operation was asked to run past its configured bound, or a
// requested grid does not fit in machine integers.
class size_error : public error {
 public:
  using error::error;
};

// Misuse of an API contract (e.g. asking for the neighbors of a terminal
// candidate).
class contract_error : public error {
 public:
  using error::error;
};

// A structural invariant that is guaranteed by construction failed anyway.
// Seeing this means a bug, not bad input.
class internal_error : public error {
 public:
  using error::error;
};

// The path-following walk exceeded its step budget. Termination is certain
// for well-formed inputs, so this converts a bug into a diagnosable failure
// instead of a hang.
class step_limit_error : public error {
 public:
  step_limit_error(const std::string& what, std::uint64_t steps)
      : error(what), steps(steps) {}
  std::uint64_t steps;
};

// A self-map produced values outside the simplex beyond tolerance.
class map_validation_error : public error {
 public:
  map_validation_error(const std::string& what, std::vector<double> point,
                       std::vector<double> raw)
      : error(what), point(std::move(point)), raw(std::move(raw)) {}
  std::vector<double> point;  // where the map was evaluated
  std::vector<double> raw;    // what it returned
};

// A set family failed its covering hypothesis at a concrete grid point: no
// index j has both x_j > 0 and x in X_j.
class covering_error : public error {
 public:
  covering_error(const std::string& what, std::vector<std::int64_t> coords,
                 std::int64_t denom)
      : error(what), coords(std::move(coords)), denom(denom) {}
  std::vector<std::int64_t> coords;
  std::int64_t denom;
};

// A refinement loop ran out of rounds before meeting its tolerance. Carries
// the best point seen so the caller can report it.
class no_convergence_error : public error {
 public:
  no_convergence_error(const std::string& what, std::vector<double> best_point,
                       double best_residual, int rounds)
      : error(what),
        best_point(std::move(best_point)),
        best_residual(best_residual),
        rounds(rounds) {}
  std::vector<double> best_point;
  double best_residual;
  int rounds;
};

// Text could not be tokenized or parsed; pos is a 0-based character offset
// into the input line.
class parse_error : public error {
 public:
  parse_error(const std::string& what, std::size_t pos)
      : error(what), pos(pos) {}
  std::size_t pos;
};

// A well-formed expression failed during numeric evaluation (division by
// zero is the only case).
class eval_error : public error {
 public:
  using error::error;
};

}  // namespace nobully
