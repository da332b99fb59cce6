#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "errors.hpp"

namespace gcollatz {

using Integer = mpz_class;

inline Integer pow_ui(const Integer& base, unsigned long e) {
  Integer r;
  mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
  return r;
}

inline Integer pow_ui(unsigned long base, unsigned long e) {
  Integer r;
  mpz_ui_pow_ui(r.get_mpz_t(), base, e);
  return r;
}

inline std::string to_string(const Integer& v) { return v.get_str(); }

/// Parses a decimal integer, optionally signed, or a power written `b^e`.
inline Integer parse_integer(std::string_view text) {
  std::string s(text);
  auto fail = [&] { throw error(errc::invalid_parameters, "not an integer: '" + s + "'"); };
  if (s.empty()) fail();
  if (auto caret = s.find('^'); caret != std::string::npos) {
    Integer base = parse_integer(s.substr(0, caret));
    Integer e = parse_integer(s.substr(caret + 1));
    if (e < 0 || !e.fits_ulong_p()) fail();
    return pow_ui(base, e.get_ui());
  }
  std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (i == s.size()) fail();
  for (std::size_t j = i; j < s.size(); ++j)
    if (s[j] < '0' || s[j] > '9') fail();
  Integer v;
  if (v.set_str(s[0] == '+' ? s.substr(1) : s, 10) != 0) fail();
  return v;
}

inline std::optional<std::uint64_t> to_u64(const Integer& v) {
  if (v < 0 || mpz_sizeinbase(v.get_mpz_t(), 2) > 64) return std::nullopt;
  std::uint64_t out = 0;
  mpz_export(&out, nullptr, -1, sizeof(out), 0, 0, v.get_mpz_t());
  return out;
}

inline Integer from_u64(std::uint64_t v) {
  Integer r;
  mpz_import(r.get_mpz_t(), 1, -1, sizeof(v), 0, 0, &v);
  return r;
}

inline std::optional<std::int64_t> to_i64(const Integer& v) {
  if (mpz_sizeinbase(v.get_mpz_t(), 2) > 62) return std::nullopt;
  return static_cast<std::int64_t>(v.get_si());
}

}  // namespace gcollatz
