#include "kamqho/errors.hpp"

#include <sstream>
#include <utility>

namespace kamqho {

namespace {

std::string resonance_message(const std::vector<int>& k, int row, int col, double div, double fl) {
  std::ostringstream os;
  os.precision(6);
  os << "resonant frequency at k = (";
  for (std::size_t l = 0; l < k.size(); ++l) os << (l ? "," : "") << k[l];
  os << "): |k.omega + lambda_" << row << " - lambda_" << col << "| = " << div
     << " below floor " << fl;
  return os.str();
}

std::string blowup_message(int m, double value, double limit) {
  std::ostringstream os;
  os.precision(6);
  os << "norm blowup at step " << m << ": ||P|| = " << value << " > eps_m = " << limit;
  return os.str();
}

}  // namespace

ResonantFrequency::ResonantFrequency(std::vector<int> mode, int row, int col, double div,
                                     double fl)
    : std::runtime_error(resonance_message(mode, row, col, div, fl)),
      k(std::move(mode)),
      i(row),
      j(col),
      divisor(div),
      floor(fl) {}

NormBlowup::NormBlowup(int m, double value, double limit)
    : std::runtime_error(blowup_message(m, value, limit)), step(m), norm(value), bound(limit) {}

}  // namespace kamqho
