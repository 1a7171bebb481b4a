#ifndef ADIASEARCH_TYPES_HPP
#define ADIASEARCH_TYPES_HPP

#include <complex>
#include <Eigen/Dense>

namespace adiasearch {

using Real = double;
using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

} // namespace adiasearch

#endif
