#ifndef LIGHTONS_DOMAIN_H_
#define LIGHTONS_DOMAIN_H_

#include <memory>
#include <optional>
#include <string>

#include "lightons/linalg.h"

namespace lightons {

// A compact convex decision set given by a membership test and a Euclidean
// projector. The projector's output is always a member, and members are fixed
// points of the projector.
class ConvexDomain {
 public:
  virtual ~ConvexDomain() = default;

  virtual int dim_hint() const { return 0; }  // 0 when any dimension works.
  virtual bool contains(const Vector& x, double tol = 1e-12) const = 0;
  virtual Vector project(const Vector& y) const = 0;
  // Diameter D for a d-dimensional instance.
  virtual double diameter(int d) const = 0;
  // Radius of the smallest origin-centred ball containing the domain.
  virtual double enclosing_radius(int d) const = 0;
  // Set when the domain is exactly an origin-centred Euclidean ball.
  virtual std::optional<double> ball_radius() const { return std::nullopt; }
  virtual std::string name() const = 0;
};

using DomainPtr = std::shared_ptr<const ConvexDomain>;

// B(R) = { x : ||x||_2 <= R }.
class BallDomain final : public ConvexDomain {
 public:
  explicit BallDomain(double radius);

  double radius() const { return radius_; }
  bool contains(const Vector& x, double tol = 1e-12) const override;
  Vector project(const Vector& y) const override;
  double diameter(int) const override { return 2.0 * radius_; }
  double enclosing_radius(int) const override { return radius_; }
  std::optional<double> ball_radius() const override { return radius_; }
  std::string name() const override;

 private:
  double radius_;
};

// Axis-aligned box [lo, hi]^d with the same bounds on every coordinate.
class BoxDomain final : public ConvexDomain {
 public:
  BoxDomain(double lo, double hi);

  bool contains(const Vector& x, double tol = 1e-12) const override;
  Vector project(const Vector& y) const override;
  double diameter(int d) const override;
  double enclosing_radius(int d) const override;
  std::string name() const override;

 private:
  double lo_;
  double hi_;
};

DomainPtr make_ball(double radius);
DomainPtr make_box(double lo, double hi);

// (radius / ||y||) y, nudged down by ulps until its computed norm is at most
// radius, so the result passes a zero-tolerance membership test.
Vector scale_to_radius(const Vector& y, double radius);

// Euclidean projection onto the domain.
inline Vector euclidean_project(const ConvexDomain& domain, const Vector& y) {
  return domain.project(y);
}

}  // namespace lightons

#endif  // LIGHTONS_DOMAIN_H_
