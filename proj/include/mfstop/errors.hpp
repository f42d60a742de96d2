#pragma once

#include <stdexcept>
#include <string>

namespace mfstop {

// Argument outside the mathematical domain of a closed-form statistic.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Model, preset or configuration file is malformed.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// The root scan saw more than one sign change inside a single scan cell.
class ScanTooCoarse : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotARoot : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Splicing would require the stopped count to decrease.
class OrderViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace mfstop
