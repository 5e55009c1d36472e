#include "lmicert/gram.hpp"

namespace lmicert {

MembershipGrams<double> membership_grams(const SdpSolution & sol, int alpha, int nvars, int level)
{
  MembershipGrams<double> g{GramSos<double>::zero(nvars, level), GramSosMatrix<double>::zero(alpha, nvars, level)};
  if (sol.primal.size() < 2) { throw std::invalid_argument("solution has no primal blocks"); }
  g.s.g     = sol.primal[kSosBlock];
  g.big_s.g = sol.primal[kMatrixBlock];
  return g;
}

}  // namespace lmicert
