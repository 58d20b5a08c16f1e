#pragma once

#include <stdexcept>
#include <string>

namespace fbasis {

// Error codes shared with the C API (see include/fbasis/fbasis.h).
enum class errc : int {
    ok = 0,
    checks_failed = 1,
    config = 2,
    singular_parameter = 3,
    rank_mismatch = 4,
    unknown_pair = 5,
    unknown_kind = 6,
    missing_entry = 7,
    malformed_document = 8,
    division_near_zero = 9,
    branch_cut = 10,
    singular_diagonal = 11,
    dimension_mismatch = 12,
    not_a_bijection = 13,
    index_out_of_range = 14,
    insufficient_rapidities = 15,
    internal = 16,
};

class Error : public std::runtime_error {
  public:
    Error(errc code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
    errc code() const { return code_; }

  private:
    errc code_;
};

[[noreturn]] inline void raise(errc code, const std::string& msg) { throw Error(code, msg); }

} // namespace fbasis
