#pragma once

#include <complex>
#include <memory>
#include <random>
#include <string>
#include <variant>

#include "dmg/numerics.hpp"

namespace dmg {

using Mat2c = Eigen::Matrix2cd;
using Rng = std::mt19937_64;

enum class Side { Left, Right };

/// Group contract on raw coordinates. Tangent vectors at g are expressed in the
/// ambient coordinates of g; algebra vectors and covectors in algebra coordinates
/// identified with their duals by the dot product.
class LieGroup {
 public:
  virtual ~LieGroup() = default;

  virtual std::string name() const = 0;
  virtual int algebra_dim() const = 0;
  virtual int coordinate_dim() const = 0;

  virtual Vec identity() const = 0;
  virtual Vec mul(const Vec& g1, const Vec& g2) const = 0;
  virtual Vec inv(const Vec& g) const = 0;
  virtual Vec exp(const Vec& xi) const = 0;
  virtual Vec log(const Vec& g) const = 0;
  virtual Vec bracket(const Vec& a, const Vec& b) const = 0;
  /// ad*_xi mu with <ad*_xi mu, eta> = -<mu, [xi, eta]>.
  virtual Vec coad(const Vec& xi, const Vec& mu) const;
  /// Matrix of Ad_g in algebra coordinates.
  virtual Mat Ad(const Vec& g) const;

  /// Throws DomainError if g is not a valid element.
  virtual void validate(const Vec& g) const;
  /// Nearest valid element to an ambient coordinate vector.
  virtual Vec retract(const Vec& x) const { return x; }

  /// d/dt g exp(t xi) at t = 0, ambient coordinates.
  virtual Vec left_lift(const Vec& g, const Vec& xi) const;
  /// d/dt exp(t xi) g at t = 0, ambient coordinates.
  virtual Vec right_lift(const Vec& g, const Vec& xi) const;

  Vec lift(Side s, const Vec& g, const Vec& xi) const {
    return s == Side::Left ? left_lift(g, xi) : right_lift(g, xi);
  }
  /// Columns are lifts of the algebra basis vectors (coordinate_dim x algebra_dim).
  Mat lift_matrix(Side s, const Vec& g) const;
  /// Lift computed by differentiating the translated exponential curve.
  Vec fd_lift(Side s, const Vec& g, const Vec& xi, const Tolerances& tol = {}) const;

  /// Draw exp of a Gaussian algebra vector.
  Vec random(Rng& rng, double sigma = 0.5) const;
};

using GroupPtr = std::shared_ptr<const LieGroup>;

class SU2Group final : public LieGroup {
 public:
  std::string name() const override { return "SU(2)"; }
  int algebra_dim() const override { return 3; }
  int coordinate_dim() const override { return 4; }
  Vec identity() const override;
  Vec mul(const Vec& a, const Vec& b) const override;
  Vec inv(const Vec& g) const override;
  Vec exp(const Vec& xi) const override;
  Vec log(const Vec& g) const override;
  Vec bracket(const Vec& a, const Vec& b) const override;
  Vec coad(const Vec& xi, const Vec& mu) const override;
  Mat Ad(const Vec& g) const override;
  void validate(const Vec& g) const override;
  Vec retract(const Vec& x) const override;
  Vec left_lift(const Vec& g, const Vec& xi) const override;
  Vec right_lift(const Vec& g, const Vec& xi) const override;
};

/// Lower-triangular factor of the Iwasawa decomposition, chart (a, b, c), c > -1,
/// with (a1,b1,c1)*(a2,b2,c2) = (a1,b1,c1)(1+c2) + (a2,b2,c2).
class KGroup final : public LieGroup {
 public:
  std::string name() const override { return "K"; }
  int algebra_dim() const override { return 3; }
  int coordinate_dim() const override { return 3; }
  Vec identity() const override;
  Vec mul(const Vec& a, const Vec& b) const override;
  Vec inv(const Vec& g) const override;
  Vec exp(const Vec& y) const override;
  Vec log(const Vec& g) const override;
  Vec bracket(const Vec& a, const Vec& b) const override;
  Vec coad(const Vec& y, const Vec& psi) const override;
  Mat Ad(const Vec& g) const override;
  void validate(const Vec& g) const override;
  Vec left_lift(const Vec& g, const Vec& y) const override;
  Vec right_lift(const Vec& g, const Vec& y) const override;
};

/// Rotation matrices stored row-major in 9 coordinates.
class SO3Group final : public LieGroup {
 public:
  std::string name() const override { return "SO(3)"; }
  int algebra_dim() const override { return 3; }
  int coordinate_dim() const override { return 9; }
  Vec identity() const override;
  Vec mul(const Vec& a, const Vec& b) const override;
  Vec inv(const Vec& g) const override;
  Vec exp(const Vec& xi) const override;
  Vec log(const Vec& g) const override;
  Vec bracket(const Vec& a, const Vec& b) const override;
  Vec coad(const Vec& xi, const Vec& mu) const override;
  Mat Ad(const Vec& g) const override;
  void validate(const Vec& g) const override;
  Vec retract(const Vec& x) const override;
  Vec left_lift(const Vec& g, const Vec& xi) const override;
  Vec right_lift(const Vec& g, const Vec& xi) const override;

  static Mat3 to_matrix(const Vec& g);
  static Vec from_matrix(const Mat3& R);
};

/// Circle group in an unwrapped angle chart.
class SO2Group final : public LieGroup {
 public:
  std::string name() const override { return "SO(2)"; }
  int algebra_dim() const override { return 1; }
  int coordinate_dim() const override { return 1; }
  Vec identity() const override { return Vec::Zero(1); }
  Vec mul(const Vec& a, const Vec& b) const override { return a + b; }
  Vec inv(const Vec& g) const override { return -g; }
  Vec exp(const Vec& xi) const override { return xi; }
  Vec log(const Vec& g) const override { return g; }
  Vec bracket(const Vec&, const Vec&) const override { return Vec::Zero(1); }
  Vec coad(const Vec&, const Vec&) const override { return Vec::Zero(1); }
  Mat Ad(const Vec&) const override { return Mat::Identity(1, 1); }
  Vec left_lift(const Vec&, const Vec& xi) const override { return xi; }
  Vec right_lift(const Vec&, const Vec& xi) const override { return xi; }
};

class RnGroup final : public LieGroup {
 public:
  explicit RnGroup(int n) : n_(n) {}
  std::string name() const override { return "R^" + std::to_string(n_); }
  int algebra_dim() const override { return n_; }
  int coordinate_dim() const override { return n_; }
  Vec identity() const override { return Vec::Zero(n_); }
  Vec mul(const Vec& a, const Vec& b) const override { return a + b; }
  Vec inv(const Vec& g) const override { return -g; }
  Vec exp(const Vec& xi) const override { return xi; }
  Vec log(const Vec& g) const override { return g; }
  Vec bracket(const Vec&, const Vec&) const override { return Vec::Zero(n_); }
  Vec coad(const Vec&, const Vec&) const override { return Vec::Zero(n_); }
  Mat Ad(const Vec&) const override { return Mat::Identity(n_, n_); }
  Vec left_lift(const Vec&, const Vec& xi) const override { return xi; }
  Vec right_lift(const Vec&, const Vec& xi) const override { return xi; }

 private:
  int n_;
};

GroupPtr make_su2();
GroupPtr make_k();
GroupPtr make_so3();
GroupPtr make_so2();
GroupPtr make_rn(int n);

// Tagged values. The tag is the identity of the owning group object.

struct GroupElement {
  const LieGroup* group = nullptr;
  Vec coords;
};
struct AlgebraVector {
  const LieGroup* group = nullptr;
  Vec coords;
};
struct Covector {
  const LieGroup* group = nullptr;
  Vec coords;
};

GroupElement element(const LieGroup& G, Vec coords);
AlgebraVector algebra(const LieGroup& G, Vec coords);
Covector covector(const LieGroup& G, Vec coords);

GroupElement group_mul(const GroupElement& g1, const GroupElement& g2);
GroupElement group_inv(const GroupElement& g);
GroupElement exp(const AlgebraVector& xi);
AlgebraVector Ad(const GroupElement& g, const AlgebraVector& xi);
Covector coad(const AlgebraVector& xi, const Covector& mu);
AlgebraVector bracket(const AlgebraVector& a, const AlgebraVector& b);
double pairing(const Covector& mu, const AlgebraVector& xi);

/// Pull back a cotangent vector at g (ambient coordinates) to the algebra dual,
/// through left (T*_e l_g) or right (T*_e r_g) translation.
Covector translate_covector(Side side, const GroupElement& g, const Vec& mu_at);

/// Ambient FD Jacobian of y -> y g (Right) or y -> g y (Left) at x.
Mat translation_jacobian(const LieGroup& G, Side side, const Vec& g, const Vec& x,
                         const Tolerances& tol = {});

// SU(2) views.

/// Standard rotation matrix of a unit quaternion (w, x, y, z).
Mat3 rot_of(const Vec& q);
Mat2c su2_to_complex(const Vec& q);
Vec su2_from_complex(const Mat2c& m);
/// r e1 + s e2 + t e3 as a 2x2 complex matrix.
Mat2c su2_algebra_to_complex(const Vec3& x);
Vec3 su2_algebra_from_complex(const Mat2c& m);

// K views.

enum class KRep { Coords, Complex2, Real3 };
using KValue = std::variant<Vec3, Mat2c, Mat3>;

/// Group element conversion between the three representations.
KValue k_convert(KRep from, KRep to, const KValue& value);
/// Algebra conversion between the three representations.
KValue k_algebra_convert(KRep from, KRep to, const KValue& value);

Mat2c k_to_complex(const Vec3& b);
Mat3 k_to_real3(const Vec3& b);
Vec3 k_from_complex(const Mat2c& m);
Vec3 k_from_real3(const Mat3& m);
Mat2c k_algebra_to_complex(const Vec3& y);
Mat3 k_algebra_to_real3(const Vec3& y);

}  // namespace dmg
