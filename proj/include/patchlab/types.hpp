#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

namespace patchlab {

using Real = double;
using Vec2 = Eigen::Vector2d;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;
using ArrXX = Eigen::ArrayXXd;

inline constexpr Real kPi = 3.14159265358979323846264338327950288;

// Thrown when an input violates a documented precondition.
struct domain_error : std::domain_error {
    using std::domain_error::domain_error;
};

// Thrown when an iterative scheme fails to reach its target.
struct numerical_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct BBox {
    Vec2 lo{0.0, 0.0};
    Vec2 hi{0.0, 0.0};

    double width() const { return hi.x() - lo.x(); }
    double height() const { return hi.y() - lo.y(); }
    double diagonal() const { return (hi - lo).norm(); }
    void expand(const Vec2& p) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    void pad(double m) {
        lo.array() -= m;
        hi.array() += m;
    }
};

}  // namespace patchlab
