#include "mjost/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace mjost::detail {

namespace bq = boost::math::quadrature;

namespace {

template <std::size_t M, class Src>
std::array<double, M> copy_table(const Src& src) {
  std::array<double, M> out{};
  for (std::size_t i = 0; i < M; ++i) out[i] = src[i];
  return out;
}

}  // namespace

const std::array<double, 8>& Gk15::nodes() {
  static const auto t = copy_table<8>(bq::gauss_kronrod<double, 15>::abscissa());
  return t;
}

const std::array<double, 8>& Gk15::kronrod_weights() {
  static const auto t = copy_table<8>(bq::gauss_kronrod<double, 15>::weights());
  return t;
}

const std::array<double, 4>& Gk15::gauss_weights() {
  static const auto t = copy_table<4>(bq::gauss<double, 7>::weights());
  return t;
}

template <std::size_t N>
const std::array<double, (N + 1) / 2>& GaussLegendre<N>::nodes() {
  static const auto t = copy_table<(N + 1) / 2>(bq::gauss<double, N>::abscissa());
  return t;
}

template <std::size_t N>
const std::array<double, (N + 1) / 2>& GaussLegendre<N>::weights() {
  static const auto t = copy_table<(N + 1) / 2>(bq::gauss<double, N>::weights());
  return t;
}

template struct GaussLegendre<7>;
template struct GaussLegendre<10>;
template struct GaussLegendre<15>;
template struct GaussLegendre<20>;
template struct GaussLegendre<30>;

}  // namespace mjost::detail
