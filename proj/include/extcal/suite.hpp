#pragma once

#include <cstdint>

#include "extcal/report.hpp"

namespace extcal {

enum class SuiteMutation {
    None,
    BoundarySign, // deliberately mis-signed cube faces; the structural checks must catch it
};

// The built-in golden verification set: exterior-algebra identities, the
// worked pullback and reparameterisation examples, Stokes, the three dynamics
// engines and the elliptic kit. Deterministic under the seed.
VerificationReport run_suite(std::uint64_t seed, SuiteMutation mutation = SuiteMutation::None);

} // namespace extcal
