#include "qkdrate/linalg.hpp"

#include <string>

namespace qkdrate {

double clamp_psd_eigenvalue(double lambda) {
  if (lambda < -kPsdRejectTol) {
    throw std::domain_error("matrix is not positive semidefinite (eigenvalue " +
                            std::to_string(lambda) + ")");
  }
  return lambda > 0.0 ? lambda : 0.0;
}

}  // namespace qkdrate
