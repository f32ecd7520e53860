#pragma once

#include <stdexcept>
#include <string>

namespace rspc {

// Arguments outside an operation's documented domain.
class invalid_input : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A factor table lookup for an (estimator, n) pair that is not tabulated.
class table_incomplete : public std::runtime_error {
 public:
  table_incomplete(const std::string& estimator, int n)
      : std::runtime_error("factor table has no entry for (" + estimator +
                           ", n=" + std::to_string(n) + ")"),
        estimator_(estimator),
        n_(n) {}

  const std::string& estimator() const noexcept { return estimator_; }
  int n() const noexcept { return n_; }

 private:
  std::string estimator_;
  int n_;
};

// Unreadable, unparsable, or incompatible files (version or checksum
// mismatches included).
class io_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rspc
