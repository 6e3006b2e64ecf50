#include "bidfm/matrix.hpp"

#include <cmath>
#include <string>

#include "bidfm/errors.hpp"

namespace bidfm {

void require_finite(const Matrix& m, std::string_view what) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      if (!std::isfinite(m(i, j))) {
        throw DomainError(std::string(what) + ": non-finite entry at (" + std::to_string(i) + ", " +
                          std::to_string(j) + ")");
      }
    }
  }
}

}  // namespace bidfm
