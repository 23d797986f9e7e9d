#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "leanopt/model.hpp"

namespace leanopt {

// Thrown when signature refinement cannot distinguish variables and the
// exhaustive matching fallback would exceed the configured size cap.
struct AmbiguityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CanonicalForm {
    std::string signature;                    // full canonical serialization
    std::uint64_t fingerprint = 0;            // FNV-1a of the signature
    std::vector<std::string> variable_order;  // original names in canonical order
};

struct CanonicalOptions {
    // Exhaustive bijection fallback is attempted only up to this many variables.
    int exhaustive_cap = 30;
    // Search-node budget for the fallback before giving up with AmbiguityError.
    long node_budget = 200000;
    double rel_tol = 1e-9;
};

// Canonical form invariant under variable renaming, constraint reordering and
// row negation with sense flip; sensitive to coefficient/rhs/sense/kind edits.
CanonicalForm canonicalize(const LinearModel& model, const CanonicalOptions& opts = {});

struct EquivalenceResult {
    bool equivalent = false;
    // Witness bijection (a-name, b-name), present when equivalent.
    std::optional<std::vector<std::pair<std::string, std::string>>> mapping;
};

// True iff a variable bijection maps a onto b up to constraint permutation and
// row-sign normalization. Throws AmbiguityError past the size cap.
EquivalenceResult models_equivalent(const LinearModel& a, const LinearModel& b,
                                    const CanonicalOptions& opts = {});

// Row-sign normalized copy: terms merged, >= rows negated to <=, zero terms dropped.
LinearModel normalized_copy(const LinearModel& model);

}  // namespace leanopt
