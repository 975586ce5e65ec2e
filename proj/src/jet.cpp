#include "pdim/jet.hpp"

#include <algorithm>
#include <stdexcept>

namespace pdim {

Jet Jet::constant(Complex value, int order) {
  Jet j(order);
  j.c_[0] = value;
  return j;
}

Jet Jet::variable(Complex base, int order) {
  Jet j(order);
  j.c_[0] = base;
  if (order >= 1) j.c_[1] = 1.0;
  return j;
}

Jet Jet::truncated(int order) const {
  Jet j(order);
  for (int i = 0; i <= std::min(order, this->order()); ++i) j.c_[i] = c_[i];
  return j;
}

Jet Jet::reciprocal() const {
  if (c_.empty() || c_[0] == Complex{}) throw std::domain_error("jet reciprocal of a series with zero constant term");
  const int n = order();
  Jet r(n);
  r.c_[0] = 1.0 / c_[0];
  for (int i = 1; i <= n; ++i) {
    Complex s{};
    for (int k = 1; k <= i; ++k) s += c_[k] * r.c_[i - k];
    r.c_[i] = -s * r.c_[0];
  }
  return r;
}

Jet Jet::pow(int e) const {
  if (e < 0) return reciprocal().pow(-e);
  Jet result = constant(1.0, order());
  Jet base = *this;
  while (e > 0) {
    if (e & 1) result *= base;
    e >>= 1;
    if (e) base *= base;
  }
  return result;
}

Complex Jet::evaluate(Complex t) const {
  Complex s{};
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) s = s * t + *it;
  return s;
}

Jet Jet::derivative() const {
  if (order() <= 0) return Jet(0);
  Jet d(order() - 1);
  for (int i = 1; i <= order(); ++i) d.c_[i - 1] = c_[i] * static_cast<double>(i);
  return d;
}

Jet& Jet::operator+=(const Jet& o) {
  if (o.order() < order()) c_.resize(o.c_.size());
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
  return *this;
}

Jet& Jet::operator-=(const Jet& o) {
  if (o.order() < order()) c_.resize(o.c_.size());
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
  return *this;
}

Jet& Jet::operator*=(const Jet& o) {
  const int n = std::min(order(), o.order());
  std::vector<Complex> r(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) {
    if (c_[i] == Complex{}) continue;
    for (int k = 0; i + k <= n; ++k) r[i + k] += c_[i] * o.c_[k];
  }
  c_ = std::move(r);
  return *this;
}

Jet& Jet::operator*=(Complex s) {
  for (auto& x : c_) x *= s;
  return *this;
}

Jet& Jet::operator+=(Complex s) {
  if (!c_.empty()) c_[0] += s;
  return *this;
}

Jet Jet::operator-() const {
  Jet r = *this;
  for (auto& x : r.c_) x = -x;
  return r;
}

}  // namespace pdim
