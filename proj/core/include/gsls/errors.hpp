#pragma once

#include <stdexcept>
#include <string>

namespace gsls {

struct InvalidArg : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Random graph generation exhausted its retry budget without producing a
// GMD with distinct eigenvalues.
struct DegenerateGraph : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A linear solve met the condition-number ceiling (Vandermonde systems).
struct IllConditioned : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Scalar mode with |a| >= 1 and b = 0: no stabilizing gain exists.
struct Unstabilizable : std::runtime_error {
  Unstabilizable(const std::string& msg, int mode = -1)
      : std::runtime_error(msg), mode_index(mode) {}
  int mode_index;
};

struct UnstableClosedLoop : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Leading coefficient of Phi_x is singular in some mode, so the controller
// K = Phi_u Phi_x^{-1} is not realizable.
struct DegenerateResponse : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Unstable : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SolverFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace gsls
