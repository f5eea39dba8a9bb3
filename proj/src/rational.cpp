#include "bexplore/rational.hpp"

#include <mpfr.h>

#include <cctype>
#include <limits>

#include "bexplore/error.hpp"

namespace bexplore {

namespace {

bool is_integer_text(const std::string& s) {
  if (s.empty()) return false;
  std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  }
  return true;
}

}  // namespace

Rat parse_rational(const std::string& text) {
  const auto slash = text.find('/');
  if (slash == std::string::npos) {
    if (!is_integer_text(text)) {
      throw ValidationError("", "not a rational: \"" + text + "\"");
    }
    return Rat(Int(text));
  }
  const std::string num = text.substr(0, slash);
  const std::string den = text.substr(slash + 1);
  if (!is_integer_text(num) || !is_integer_text(den)) {
    throw ValidationError("", "not a rational: \"" + text + "\"");
  }
  Int d(den);
  if (d == 0) {
    throw ValidationError("", "zero denominator in \"" + text + "\"");
  }
  Rat r(Int(num), d);
  r.canonicalize();
  return r;
}

std::string rat_to_string(const Rat& value) {
  if (value.get_den() == 1) return value.get_num().get_str();
  return value.get_num().get_str() + "/" + value.get_den().get_str();
}

Int rat_floor(const Rat& value) {
  Int q;
  mpz_fdiv_q(q.get_mpz_t(), value.get_num().get_mpz_t(),
             value.get_den().get_mpz_t());
  return q;
}

Int rat_ceil(const Rat& value) {
  Int q;
  mpz_cdiv_q(q.get_mpz_t(), value.get_num().get_mpz_t(),
             value.get_den().get_mpz_t());
  return q;
}

long rat_ceil_long(const Rat& value) {
  Int c = rat_ceil(value);
  if (!c.fits_slong_p()) {
    throw ValidationError("", "value too large: " + c.get_str());
  }
  return c.get_si();
}

double rat_to_double(const Rat& value) { return value.get_d(); }

namespace {

Rat mpfr_round_up(int (*fn)(mpfr_ptr, mpfr_srcptr, mpfr_rnd_t), const Rat& x) {
  if (x <= 0) throw ValidationError("", "log of non-positive value");
  mpfr_t in, out;
  mpfr_init2(in, 192);
  mpfr_init2(out, 192);
  mpfr_set_q(in, x.get_mpq_t(), MPFR_RNDU);
  fn(out, in, MPFR_RNDU);
  mpq_t q;
  mpq_init(q);
  mpfr_get_q(q, out);
  Rat result(q);
  mpq_clear(q);
  mpfr_clear(in);
  mpfr_clear(out);
  return result;
}

}  // namespace

Rat ln_upper(const Rat& x) { return mpfr_round_up(mpfr_log, x); }

Rat log2_upper(const Rat& x) { return mpfr_round_up(mpfr_log2, x); }

}  // namespace bexplore
