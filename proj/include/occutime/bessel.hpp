#pragma once

// Modified Bessel functions of the first kind, I_n(z), for integer order and
// nonnegative real argument.

namespace occutime {

class BesselOrder {
 public:
  static constexpr int kMaxOrder = 150;

  // Throws Error(InvalidArgument) for n < 0 or n > kMaxOrder.
  explicit BesselOrder(int n);

  int value() const noexcept { return n_; }

 private:
  int n_;
};

// I_n(z). Throws Error(Overflow) when the result is not representable.
double bessel_i(BesselOrder n, double z);

// e^{-z} I_n(z); finite for every finite z >= 0.
double bessel_i_scaled(BesselOrder n, double z);

inline double bessel_i(int n, double z) { return bessel_i(BesselOrder(n), z); }
inline double bessel_i_scaled(int n, double z) {
  return bessel_i_scaled(BesselOrder(n), z);
}

}  // namespace occutime
