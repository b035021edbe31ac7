#pragma once

#include <cmath>
#include <ostream>
#include <sstream>
#include <string>

#include "wbary/lp.hpp"

namespace wbary::lp {

namespace detail {

inline std::string format_real(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

inline void write_terms(std::ostream& os, std::span<const Term> terms) {
  if (terms.empty()) {
    os << " 0 x0";
    return;
  }
  for (const auto& t : terms) os << (t.coef < 0 ? " - " : " + ") << format_real(std::abs(t.coef)) << " x" << t.var;
}

}  // namespace detail

/// Writes `prob` in CPLEX LP text format. Variables are named x<j>, rows c<i>.
inline void write_lp_format(std::ostream& os, const LpProblem& prob) {
  os << "\\ written by wbary\n";
  os << (prob.sense() == Sense::minimize ? "Minimize\n" : "Maximize\n") << " obj:";
  std::vector<Term> obj;
  for (std::size_t j = 0; j < prob.num_vars(); ++j)
    if (prob.cost(j) != 0.0) obj.push_back({j, prob.cost(j)});
  detail::write_terms(os, obj);
  os << "\nSubject To\n";
  for (std::size_t i = 0; i < prob.num_rows(); ++i) {
    os << " c" << i << ":";
    detail::write_terms(os, prob.row(i));
    switch (prob.relation(i)) {
      case Relation::less_equal: os << " <= "; break;
      case Relation::greater_equal: os << " >= "; break;
      case Relation::equal: os << " = "; break;
    }
    os << detail::format_real(prob.rhs(i)) << '\n';
  }
  os << "Bounds\n";
  for (std::size_t j = 0; j < prob.num_vars(); ++j) {
    const double lo = prob.lower(j), up = prob.upper(j);
    if (lo == up) {
      os << " x" << j << " = " << detail::format_real(lo) << '\n';
    } else if (std::isinf(up)) {
      if (lo != 0.0) os << " x" << j << " >= " << (std::isinf(lo) ? "-inf" : detail::format_real(lo)) << '\n';
    } else {
      os << ' ' << (std::isinf(lo) ? "-inf" : detail::format_real(lo)) << " <= x" << j
         << " <= " << detail::format_real(up) << '\n';
    }
  }
  os << "End\n";
}

}  // namespace wbary::lp
