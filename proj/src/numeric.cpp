#include "wermer/numeric.hpp"

#include "wermer/schedule.hpp"

namespace wermer {

int precision_for_depth(const ParameterSchedule& schedule, int n, int max_bits) {
  if (n < 0 || n > schedule.depth)
    throw InvalidArgument("precision_for_depth: depth " + std::to_string(n) + " outside schedule");
  const LogReal log2_inv = -schedule.log_delta[static_cast<std::size_t>(n)] / log(LogReal(2));
  const LogReal need = ceil(2 * log2_inv) + 64;
  // Anything past the int range is certainly over budget.
  if (need > LogReal(1 << 30))
    throw BudgetExceeded("precision for depth " + std::to_string(n) + " is astronomically large");
  const int bits = std::max(64, need.convert_to<int>());
  if (bits > max_bits)
    throw BudgetExceeded("depth " + std::to_string(n) + " needs " + std::to_string(bits) + " bits, budget " +
                         std::to_string(max_bits));
  return bits;
}

}  // namespace wermer
