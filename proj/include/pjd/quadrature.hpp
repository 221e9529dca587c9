#ifndef PJD_QUADRATURE_HPP
#define PJD_QUADRATURE_HPP

#include <utility>
#include <vector>

namespace pjd {

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
    int size() const { return static_cast<int>(nodes.size()); }
};

/// Nodes/weights for int f(t) e^{-t^2} dt on R (physicists' Hermite weight).
QuadratureRule gauss_hermite(int n);

/// Nodes/weights for int f(t) dt on [-1, 1].
QuadratureRule gauss_legendre(int n);

/// Nodes/weights for int f(t) t^alpha e^{-t} dt on [0, inf).
QuadratureRule gauss_laguerre(int n, double alpha = 0.0);

} // namespace pjd

#endif
