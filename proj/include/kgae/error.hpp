#pragma once

#include <stdexcept>
#include <string>

namespace kgae {

// Malformed or unreadable external input (files, streams, formats).
struct io_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Input that is structurally valid but statistically unusable,
// e.g. a constant sample handed to a variance-ratio test.
struct degenerate_data_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Non-finite values where finite arithmetic is required.
struct numeric_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace kgae
