#include "lightons/domain.h"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace lightons {

BallDomain::BallDomain(double radius) : radius_(radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("BallDomain: radius must be positive");
}

bool BallDomain::contains(const Vector& x, double tol) const {
  return x.norm() <= radius_ + tol;
}

Vector scale_to_radius(const Vector& y, double radius) {
  double s = radius / y.norm();
  Vector out = s * y;
  while (out.norm() > radius) {
    s = std::nextafter(s, 0.0);
    out = s * y;
  }
  return out;
}

Vector BallDomain::project(const Vector& y) const {
  const double n = y.norm();
  if (n <= radius_) return y;
  return scale_to_radius(y, radius_);
}

std::string BallDomain::name() const {
  std::ostringstream os;
  os << "ball(" << radius_ << ")";
  return os.str();
}

BoxDomain::BoxDomain(double lo, double hi) : lo_(lo), hi_(hi) {
  if (!(hi > lo)) throw std::invalid_argument("BoxDomain: need lo < hi");
}

bool BoxDomain::contains(const Vector& x, double tol) const {
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x(i) < lo_ - tol || x(i) > hi_ + tol) return false;
  }
  return true;
}

Vector BoxDomain::project(const Vector& y) const {
  return y.cwiseMax(lo_).cwiseMin(hi_);
}

double BoxDomain::diameter(int d) const { return (hi_ - lo_) * std::sqrt(double(d)); }

double BoxDomain::enclosing_radius(int d) const {
  const double m = std::max(std::abs(lo_), std::abs(hi_));
  return m * std::sqrt(double(d));
}

std::string BoxDomain::name() const {
  std::ostringstream os;
  os << "box[" << lo_ << "," << hi_ << "]";
  return os.str();
}

DomainPtr make_ball(double radius) { return std::make_shared<BallDomain>(radius); }
DomainPtr make_box(double lo, double hi) { return std::make_shared<BoxDomain>(lo, hi); }

}  // namespace lightons
