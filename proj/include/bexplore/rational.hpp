#pragma once

#include <gmpxx.h>

#include <string>

namespace bexplore {

// All probabilities and utilities in the engine are exact rationals.
// mpq_class keeps values in lowest terms with a positive denominator,
// which is exactly the representation the engine relies on: explorability
// is a strict positivity condition that floating point cannot certify.
using Rat = mpq_class;
using Int = mpz_class;

// Parses "p/q" or a plain integer string. Rejects zero denominators and
// any other malformed input.
Rat parse_rational(const std::string& text);

// Canonical form: "p" when the denominator is 1, otherwise "p/q".
std::string rat_to_string(const Rat& value);

Int rat_floor(const Rat& value);
Int rat_ceil(const Rat& value);

// Smallest integer >= value, as a long. Throws if it does not fit.
long rat_ceil_long(const Rat& value);

double rat_to_double(const Rat& value);

// Certified upper bounds computed via MPFR with upward rounding, returned
// as exact rationals. Used where a bound must never be undercounted
// (sample-count formulas). Argument must be positive (log2 also > 1).
Rat ln_upper(const Rat& x);
Rat log2_upper(const Rat& x);

}  // namespace bexplore
