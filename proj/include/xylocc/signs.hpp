#pragma once

namespace xylocc {

enum class DerivativeSign { negative, zero, positive };

/// zero when |value| < zero_threshold, otherwise the sign of value.
DerivativeSign classify_sign(double value, double zero_threshold = 0.0);

const char* to_string(DerivativeSign sign);

}  // namespace xylocc
