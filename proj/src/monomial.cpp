#include "lmicert/monomial.hpp"

#include <numeric>
#include <stdexcept>

namespace lmicert {

Monomial::Monomial(std::vector<int> exps) : exps_(std::move(exps))
{
  for (int e : exps_) {
    if (e < 0) { throw std::invalid_argument("negative exponent"); }
    degree_ += e;
  }
}

Monomial Monomial::variable(int nvars, int i)
{
  if (i < 0 || i >= nvars) { throw std::out_of_range("variable index out of range"); }
  Monomial m(nvars);
  m.exps_[static_cast<std::size_t>(i)] = 1;
  m.degree_                            = 1;
  return m;
}

Monomial operator*(const Monomial & a, const Monomial & b)
{
  if (a.nvars() != b.nvars()) { throw std::invalid_argument("monomial variable count mismatch"); }
  Monomial r(a.nvars());
  for (std::size_t i = 0; i < a.exps_.size(); ++i) { r.exps_[i] = a.exps_[i] + b.exps_[i]; }
  r.degree_ = a.degree_ + b.degree_;
  return r;
}

std::optional<Monomial> Monomial::divide(const Monomial & b) const
{
  if (nvars() != b.nvars()) { throw std::invalid_argument("monomial variable count mismatch"); }
  Monomial r(nvars());
  for (std::size_t i = 0; i < exps_.size(); ++i) {
    if (exps_[i] < b.exps_[i]) { return std::nullopt; }
    r.exps_[i] = exps_[i] - b.exps_[i];
  }
  r.degree_ = degree_ - b.degree_;
  return r;
}

bool operator<(const Monomial & a, const Monomial & b)
{
  if (a.degree_ != b.degree_) { return a.degree_ < b.degree_; }
  // higher power of the earlier variable comes first
  return a.exps_ > b.exps_;
}

std::string Monomial::str() const
{
  std::string out;
  for (std::size_t i = 0; i < exps_.size(); ++i) {
    if (exps_[i] == 0) { continue; }
    if (!out.empty()) { out += '*'; }
    out += 'x' + std::to_string(i + 1);
    if (exps_[i] > 1) { out += '^' + std::to_string(exps_[i]); }
  }
  return out.empty() ? "1" : out;
}

std::int64_t basis_size(int nvars, int degree)
{
  if (nvars < 0 || degree < 0) { throw std::invalid_argument("basis_size needs n >= 0 and d >= 0"); }
  // C(n+d, n) computed incrementally; every partial product is an integer
  std::int64_t r = 1;
  for (int i = 1; i <= nvars; ++i) { r = r * (degree + i) / i; }
  return r;
}

namespace {

void fill_degree(int nvars, int var, int remaining, std::vector<int> & cur, std::vector<Monomial> & out)
{
  if (var == nvars - 1) {
    cur[static_cast<std::size_t>(var)] = remaining;
    out.emplace_back(cur);
    return;
  }
  for (int e = remaining; e >= 0; --e) {
    cur[static_cast<std::size_t>(var)] = e;
    fill_degree(nvars, var + 1, remaining - e, cur, out);
  }
}

}  // namespace

MonomialBasis::MonomialBasis(int nvars, int degree) : nvars_(nvars), degree_(degree)
{
  if (nvars < 0 || degree < 0) { throw std::invalid_argument("basis needs n >= 0 and d >= 0"); }
  monomials_.reserve(static_cast<std::size_t>(basis_size(nvars, degree)));
  if (nvars == 0) {
    monomials_.emplace_back(0);
  } else {
    std::vector<int> cur(static_cast<std::size_t>(nvars), 0);
    for (int t = 0; t <= degree; ++t) { fill_degree(nvars, 0, t, cur, monomials_); }
  }
  for (std::size_t i = 0; i < monomials_.size(); ++i) { index_.emplace(monomials_[i], static_cast<int>(i)); }
}

int MonomialBasis::index_of(const Monomial & m) const
{
  const auto it = index_.find(m);
  return it == index_.end() ? -1 : it->second;
}

}  // namespace lmicert
