#pragma once

// Exact parameter grids and the per-cell record written by the sweep command.

#include <cstddef>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "negric/criterion.hpp"
#include "negric/error.hpp"
#include "negric/filiform.hpp"
#include "negric/rational.hpp"

namespace negric {

struct RationalRange {
  Rational lo, hi, step;

  std::vector<Rational> values() const {
    std::vector<Rational> v;
    for (Rational x = lo; x <= hi; x += step) v.push_back(x);
    return v;
  }
};

/// "lo..hi/step" or "lo..hi:step". With fractional bounds use the colon form; in the slash
/// form the step follows the last '/'.
inline RationalRange parse_range(const std::string& text, std::size_t max_points = 1000000) {
  const auto dots = text.find("..");
  require(dots != std::string::npos, ErrorCode::Parse, "range '" + text + "' must look like lo..hi/step");
  const std::string lo = text.substr(0, dots), rest = text.substr(dots + 2);
  auto sep = rest.find(':');
  if (sep == std::string::npos) sep = rest.rfind('/');
  require(sep != std::string::npos, ErrorCode::Parse, "range '" + text + "' has no step");
  RationalRange r{parse_rational(lo), parse_rational(rest.substr(0, sep)), parse_rational(rest.substr(sep + 1))};
  require(r.step > 0, ErrorCode::InvalidArgument, "range '" + text + "': step must be positive");
  require(r.lo <= r.hi, ErrorCode::InvalidArgument, "range '" + text + "': empty (lo > hi)");
  const Rational count = (r.hi - r.lo) / r.step;
  require(count < static_cast<long>(max_points), ErrorCode::InvalidArgument, "range '" + text + "' has too many points");
  return r;
}

struct SweepCell {
  Rational a, d;
  Rational T;                                            // trace for the given sign
  std::vector<std::pair<std::string, Rational>> forms;   // iota values for the given sign
  std::size_t l = 0;                                     // critical index, Q_n with n >= 6 only
  std::string answer;                                    // yes, no, or nilpotent
  bool sign_flipped = false;
};

inline bool uses_qn_columns(Family f, std::size_t n) { return f == Family::Q && n >= 6; }

inline SweepCell sweep_cell(Family family, std::size_t n, const Rational& a, const Rational& d) {
  SweepCell c;
  c.a = a;
  c.d = d;
  if (uses_qn_columns(family, n)) {
    const auto profile = iota_profile(n, a, d);
    c.T = profile.T;
    for (std::size_t k = n / 2 + 1; k <= n; ++k) c.forms.emplace_back("iota_" + std::to_string(k), profile.values.at(k));
    c.l = critical_l(n).l;
  } else {
    Rational alpha = a, beta = d;
    if (family == Family::Q) {
      alpha = d;
      beta = a - 2 * d;
    }
    const std::size_t dim = family == Family::Q ? 4 : n;
    c.T = alpha + iota2_Ln(dim, alpha, beta);
    c.forms = {{"iota_2", iota2_Ln(dim, alpha, beta)}, {"iota_n", iotan_Ln(dim, alpha, beta)}};
    if (dim == 3) c.forms.emplace_back("iota_1", 4 * alpha + beta);
  }
  if (a == 0 && d == 0) {
    c.answer = "nilpotent";
    return c;
  }
  const Decision dec = family == Family::Q ? decide_Qn(n, a, d) : decide_Ln(n, a, d);
  c.answer = dec.answer ? "yes" : "no";
  c.sign_flipped = dec.answer && dec.sign_flipped;
  return c;
}

inline std::string sweep_csv_header(Family family, std::size_t n) {
  std::ostringstream os;
  os << "a,d,T";
  const SweepCell probe = sweep_cell(family, n, 1, 0);
  for (const auto& f : probe.forms) os << ',' << f.first;
  if (uses_qn_columns(family, n)) os << ",l";
  os << ",answer,sign_flipped";
  return os.str();
}

inline std::string sweep_csv_line(const SweepCell& c, bool with_l) {
  std::ostringstream os;
  os << c.a << ',' << c.d << ',' << c.T;
  for (const auto& f : c.forms) os << ',' << f.second;
  if (with_l) os << ',' << c.l;
  os << ',' << c.answer << ',' << (c.sign_flipped ? "true" : "false");
  return os.str();
}

}  // namespace negric
