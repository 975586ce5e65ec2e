#pragma once

#include <complex>
#include <span>
#include <vector>

namespace pdim {

using Complex = std::complex<double>;

/// Truncated Taylor series c_0 + c_1 t + ... + c_N t^N.
/// Binary operations truncate to the smaller order of the operands.
class Jet {
 public:
  Jet() = default;
  explicit Jet(int order) : c_(static_cast<std::size_t>(order) + 1) {}
  explicit Jet(std::vector<Complex> coeffs) : c_(std::move(coeffs)) {}

  static Jet constant(Complex value, int order);
  /// The jet of the identity map expanded at base: base + t.
  static Jet variable(Complex base, int order);

  int order() const { return static_cast<int>(c_.size()) - 1; }
  Complex operator[](int i) const { return i < static_cast<int>(c_.size()) ? c_[i] : Complex{}; }
  Complex& operator[](int i) { return c_[i]; }
  Complex value() const { return c_.empty() ? Complex{} : c_[0]; }
  std::span<const Complex> coefficients() const { return c_; }

  Jet truncated(int order) const;
  Jet reciprocal() const;
  Jet pow(int e) const;
  /// Horner evaluation of the polynomial part at t.
  Complex evaluate(Complex t) const;
  Jet derivative() const;

  Jet& operator+=(const Jet& o);
  Jet& operator-=(const Jet& o);
  Jet& operator*=(const Jet& o);
  Jet& operator*=(Complex s);
  Jet& operator+=(Complex s);

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(Jet a, const Jet& b) { return a *= b; }
  friend Jet operator*(Jet a, Complex s) { return a *= s; }
  friend Jet operator*(Complex s, Jet a) { return a *= s; }
  friend Jet operator+(Jet a, Complex s) { return a += s; }
  Jet operator-() const;

 private:
  std::vector<Complex> c_;
};

}  // namespace pdim
