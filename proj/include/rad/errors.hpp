#pragma once

#include <stdexcept>
#include <string>

namespace rad {

// Bad user-supplied configuration (flags, schema, score/spec mismatch).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A caller broke a documented precondition; indicates a bug, not bad input.
struct ContractViolation : std::logic_error {
    using std::logic_error::logic_error;
};

// AD-tree asked for content that was never inserted. Signals a broken
// enumeration-order invariant upstream; never silently recomputed.
struct CacheMiss : std::logic_error {
    using std::logic_error::logic_error;
};

// Runtime failures (I/O, memory budget).
struct RuntimeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace rad
