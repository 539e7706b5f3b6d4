#pragma once

#include <stdexcept>
#include <string>

namespace corebench {

// Malformed or out-of-domain input. Maps to CLI exit status 2.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Coalition enumeration would exceed the configured cap. CLI exit status 3.
class InstanceTooLarge : public std::runtime_error {
 public:
  InstanceTooLarge(std::size_t n, std::size_t cap)
      : std::runtime_error("instance has " + std::to_string(n) +
                           " agents, enumeration cap is " + std::to_string(cap)),
        agents_(n),
        cap_(cap) {}

  std::size_t agents() const noexcept { return agents_; }
  std::size_t cap() const noexcept { return cap_; }

 private:
  std::size_t agents_;
  std::size_t cap_;
};

// A mathematical invariant that must hold did not. CLI exit status 1.
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// An allocation curve or rule that should be monotone was observed decreasing.
class MonotonicityViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace corebench
